"""Vertex boundary conditions as matrix pairs, inner products, and skew forms.

Boundary data of a function on the graph is collected into two vectors of
length 2N with a fixed slot layout:

    psi  = (f_1(0), ..., f_N(0), f_1(L_1), ..., f_N(L_N))
    dpsi = (-f_1'(L_1), ..., -f_N'(L_N), f_1'(0), ..., f_N'(0))

i.e. values at the vertex first, then at the outer ends; derivatives at the
outer ends (negated) first, then at the vertex. A boundary-condition pair
(A, B) constrains a function through A psi + B dpsi = 0 in this layout.

Three built-in condition families are provided. Two are the PT-consistent
sets (value continuity at the vertex with a derivative sum over the outer
ends, and its derivative/value mirror image); the third is the standard
self-adjoint vertex coupling kept as a Hermitian reference.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EvaluationFailure,
    GraphMismatch,
    InsufficientBasis,
    ResolutionTooCoarse,
    UnknownFamily,
)
from .graph import DEFAULT_RESOLUTION, MetricStarGraph, bond_grid, quadrature, simpson_weights

# family tags (shared with the spectral module and the CLI)
PT_DIRICHLET = "pt-dirichlet"
PT_NEUMANN = "pt-neumann"
KIRCHHOFF_REF = "kirchhoff-ref"
CUSTOM = "custom"

BUILTIN_FAMILIES = (PT_DIRICHLET, PT_NEUMANN, KIRCHHOFF_REF)

# inner-product tags for omega_direct
HERMITIAN = "hermitian"
PT = "pt"

#: singular values below RANK_TOL * sigma_max count as zero
RANK_TOL = 1e-10

#: default number of kernel modes retained by cpt_inner
DEFAULT_CPT_TRUNCATION = 20


@dataclass(frozen=True)
class BondFunction:
    """Per-bond callables for a function and its x-derivative.

    Callables should accept a float or an ndarray of positions in [0, L_j].
    `second_derivs` is optional; when present, forms that need f'' use it
    instead of finite differences.
    """

    graph: MetricStarGraph
    values: tuple[Callable, ...] = field(repr=False)
    derivs: tuple[Callable, ...] = field(repr=False)
    second_derivs: Optional[tuple[Callable, ...]] = field(default=None, repr=False)

    def __post_init__(self):
        n = self.graph.n_bonds
        if len(self.values) != n or len(self.derivs) != n:
            raise DimensionMismatch("one value and one derivative callable per bond required")
        if self.second_derivs is not None and len(self.second_derivs) != n:
            raise DimensionMismatch("one second-derivative callable per bond required")

    @property
    def has_second_derivs(self) -> bool:
        return self.second_derivs is not None

    def value(self, bond: int, x):
        return self.values[bond - 1](x)

    def deriv(self, bond: int, x):
        return self.derivs[bond - 1](x)

    def second_deriv(self, bond: int, x):
        if self.second_derivs is None:
            raise EvaluationFailure("no analytic second derivative available")
        return self.second_derivs[bond - 1](x)


def bond_function(graph, values, derivs, second_derivs=None) -> BondFunction:
    sd = tuple(second_derivs) if second_derivs is not None else None
    return BondFunction(graph, tuple(values), tuple(derivs), sd)


def zero_function(graph: MetricStarGraph) -> BondFunction:
    n = graph.n_bonds
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float)) + 0j
    return BondFunction(graph, (zero,) * n, (zero,) * n, (zero,) * n)


def trig_function(graph: MetricStarGraph, terms: Sequence[Sequence[tuple]]) -> BondFunction:
    """Build f_j(x) = sum_m a_m sin(w_m x + p_m) from per-bond (a, w, p) triples.

    Amplitudes may be complex. Derivatives are analytic, so the function is
    usable wherever exact f' and f'' are needed.
    """
    if len(terms) != graph.n_bonds:
        raise DimensionMismatch("one term list per bond required")

    def make(fn_terms, order):
        def f(x, _terms=tuple(fn_terms), _order=order):
            x = np.asarray(x, dtype=float)
            out = np.zeros(x.shape, dtype=complex)
            for a, w, p in _terms:
                if _order == 0:
                    out += a * np.sin(w * x + p)
                elif _order == 1:
                    out += a * w * np.cos(w * x + p)
                else:
                    out += -a * w * w * np.sin(w * x + p)
            return out if out.shape else complex(out)

        return f

    vals = tuple(make(t, 0) for t in terms)
    ders = tuple(make(t, 1) for t in terms)
    secs = tuple(make(t, 2) for t in terms)
    return BondFunction(graph, vals, ders, secs)


def combine(functions: Sequence[BondFunction], coeffs) -> BondFunction:
    """Pointwise linear combination sum_i c_i f_i of functions on one graph."""
    if not functions:
        raise DimensionMismatch("need at least one function")
    graph = functions[0].graph
    for f in functions[1:]:
        if f.graph != graph:
            raise GraphMismatch("all functions must share one graph")
    coeffs = tuple(complex(c) for c in coeffs)
    if len(coeffs) != len(functions):
        raise DimensionMismatch("one coefficient per function required")
    with_second = all(f.has_second_derivs for f in functions)

    def make(bond, kind):
        def f(x, _b=bond, _k=kind):
            acc = None
            for c, fn in zip(coeffs, functions):
                part = getattr(fn, _k)(_b, x)
                acc = c * np.asarray(part, dtype=complex) if acc is None else acc + c * np.asarray(part, dtype=complex)
            return acc if np.ndim(acc) else complex(acc)

        return f

    n = graph.n_bonds
    vals = tuple(make(b, "value") for b in range(1, n + 1))
    ders = tuple(make(b, "deriv") for b in range(1, n + 1))
    secs = tuple(make(b, "second_deriv") for b in range(1, n + 1)) if with_second else None
    return BondFunction(graph, vals, ders, secs)


def _sample(func: Callable, pts: np.ndarray) -> np.ndarray:
    """Evaluate a per-bond callable on a grid, tolerating scalar-only callables."""
    out = np.asarray(func(pts), dtype=complex)
    if out.shape == pts.shape:
        return out
    if out.ndim == 0:
        return np.array([complex(func(float(x))) for x in pts])
    raise EvaluationFailure(f"callable returned shape {out.shape} for grid of {pts.shape}")


@dataclass(frozen=True)
class TraceVectors:
    """Boundary values and sign-adjusted boundary derivatives of one function."""

    psi: np.ndarray = field(repr=False)
    dpsi: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.psi.shape != self.dpsi.shape or self.psi.ndim != 1:
            raise DimensionMismatch("psi and dpsi must be vectors of equal length")
        if self.psi.shape[0] % 2 != 0:
            raise DimensionMismatch("trace vectors have length 2N")

    @property
    def n_bonds(self) -> int:
        return self.psi.shape[0] // 2


def trace_vectors(f: BondFunction, graph: MetricStarGraph) -> TraceVectors:
    """Collect endpoint values/derivatives of f into the fixed slot layout."""
    if f.graph != graph:
        raise GraphMismatch("function was built on a different graph")
    n = graph.n_bonds
    psi = np.empty(2 * n, dtype=complex)
    dpsi = np.empty(2 * n, dtype=complex)
    for j in range(1, n + 1):
        lj = graph.length(j)
        psi[j - 1] = f.value(j, 0.0)
        psi[n + j - 1] = f.value(j, lj)
        dpsi[j - 1] = -f.deriv(j, lj)
        dpsi[n + j - 1] = f.deriv(j, 0.0)
    if not (np.isfinite(psi).all() and np.isfinite(dpsi).all()):
        raise EvaluationFailure("non-finite endpoint value or derivative")
    return TraceVectors(psi=psi, dpsi=dpsi)


@dataclass(frozen=True)
class BCMatrices:
    """Matrix pair (A, B) acting on trace vectors: A psi + B dpsi = 0.

    A well-posed condition set has rank(A|B) = 2N; that is reported by
    check_ranks rather than enforced here, so deficient pairs (e.g. from a
    corrupted custom file) can still be inspected.
    """

    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    family: str
    n_bonds: int

    def __post_init__(self):
        m = 2 * self.n_bonds
        if self.a.shape != (m, m) or self.b.shape != (m, m):
            raise DimensionMismatch(
                f"expected {m}x{m} matrices, got {self.a.shape} and {self.b.shape}"
            )


def bc_matrices(family: str, graph: MetricStarGraph) -> BCMatrices:
    """Build the matrix pair for one of the built-in condition families.

    Row layout (2N rows):
      rows 1..N-1   vertex matching (values or derivatives equal across bonds)
      row  N        the single summed condition
      rows N+1..2N  one outer-end condition per bond
    """
    n = graph.n_bonds
    m = 2 * n
    a = np.zeros((m, m), dtype=complex)
    b = np.zeros((m, m), dtype=complex)
    if family == PT_DIRICHLET:
        # f_1(0) = ... = f_N(0); sum_j f_j'(L_j) = 0; f_j(L_j) = 0
        for r in range(n - 1):
            a[r, r] = 1.0
            a[r, r + 1] = -1.0
        b[n - 1, 0:n] = -1.0  # dpsi slots hold -f_j'(L_j)
        for j in range(n):
            a[n + j, n + j] = 1.0
    elif family == PT_NEUMANN:
        # f_1'(0) = ... = f_N'(0); sum_j f_j(L_j) = 0; f_j'(L_j) = 0
        for r in range(n - 1):
            b[r, n + r] = 1.0
            b[r, n + r + 1] = -1.0
        a[n - 1, n : 2 * n] = 1.0
        for j in range(n):
            b[n + j, j] = -1.0
    elif family == KIRCHHOFF_REF:
        # f_1(0) = ... = f_N(0); sum_j f_j'(0) = 0; f_j(L_j) = 0
        for r in range(n - 1):
            a[r, r] = 1.0
            a[r, r + 1] = -1.0
        b[n - 1, n : 2 * n] = 1.0
        for j in range(n):
            a[n + j, n + j] = 1.0
    else:
        raise UnknownFamily(f"no built-in condition family named {family!r}")
    return BCMatrices(a=a, b=b, family=family, n_bonds=n)


def bc_residual(bc: BCMatrices, t: TraceVectors) -> float:
    """Euclidean norm of A psi + B dpsi."""
    if t.n_bonds != bc.n_bonds:
        raise DimensionMismatch(
            f"trace vectors for {t.n_bonds} bonds, matrices for {bc.n_bonds}"
        )
    return float(np.linalg.norm(bc.a @ t.psi + bc.b @ t.dpsi))


def _outer_end_swap(n: int) -> np.ndarray:
    """Permutation exchanging the two N-blocks of a trace vector."""
    p = np.zeros((2 * n, 2 * n))
    p[:n, n:] = np.eye(n)
    p[n:, :n] = np.eye(n)
    return p


def check_ab_symmetry(bc: BCMatrices) -> float:
    """Frobenius norm of A B~^H - B~ A^H, the self-adjointness defect.

    The Hermitian compact-form condition is stated for derivative slots
    ordered (f'(0)..., -f'(L)...), i.e. derivatives pointing into each bond.
    Our stored B acts on the layout with the blocks swapped, so B is mapped
    to that ordering before the test. Zero means the pair defines a
    self-adjoint vertex coupling; the PT families are intentionally nonzero
    here (sqrt(2N) for the built-ins).
    """
    if bc.a.shape != bc.b.shape:
        raise DimensionMismatch("A and B must have equal shapes")
    b_inward = bc.b @ _outer_end_swap(bc.n_bonds)
    defect = bc.a @ b_inward.conj().T - b_inward @ bc.a.conj().T
    return float(np.linalg.norm(defect))


@dataclass(frozen=True)
class RankReport:
    rank_a: int
    rank_b: int
    rank_ab: int


def _numerical_rank(m: np.ndarray) -> int:
    sigma = np.linalg.svd(m, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > RANK_TOL * sigma[0]))


def check_ranks(bc: BCMatrices) -> RankReport:
    """Numerical ranks of A, B, and the stacked (A|B)."""
    return RankReport(
        rank_a=_numerical_rank(bc.a),
        rank_b=_numerical_rank(bc.b),
        rank_ab=_numerical_rank(np.hstack([bc.a, bc.b])),
    )


def _check_same_graph(f: BondFunction, g: BondFunction) -> MetricStarGraph:
    if f.graph != g.graph:
        raise GraphMismatch("functions live on different graphs")
    return f.graph


def l2_inner(f: BondFunction, g: BondFunction, resolution: int = DEFAULT_RESOLUTION) -> complex:
    """Hermitian inner product sum_j int f_j(x) conj(g_j(x)) dx."""
    graph = _check_same_graph(f, g)
    total = 0j
    for j in range(1, graph.n_bonds + 1):
        grid = bond_grid(graph, j, resolution)
        fv = _sample(f.values[j - 1], grid.points)
        gv = _sample(g.values[j - 1], grid.points)
        total += quadrature(fv * np.conj(gv), grid)
    return total


def pt_inner(f: BondFunction, g: BondFunction, resolution: int = DEFAULT_RESOLUTION) -> complex:
    """Inner product with the first argument reflected and conjugated.

    sum_j int conj(f_j(L_j - x)) g_j(x) dx: bond-wise parity composed with
    complex conjugation acts on f before integration.
    """
    graph = _check_same_graph(f, g)
    total = 0j
    for j in range(1, graph.n_bonds + 1):
        grid = bond_grid(graph, j, resolution)
        lj = graph.length(j)
        f_refl = _sample(f.values[j - 1], lj - grid.points)
        gv = _sample(g.values[j - 1], grid.points)
        total += quadrature(np.conj(f_refl) * gv, grid)
    return total


def cpt_inner(
    f: BondFunction,
    g: BondFunction,
    basis,
    truncation: int = DEFAULT_CPT_TRUNCATION,
    resolution: int = DEFAULT_RESOLUTION,
) -> complex:
    """Positive-definite extension of the reflected inner product.

    Applies the charge-like kernel C_j(x, y) = sum_n phi~_j^(n)(x) phi~_j^(n)(y)
    to the reflected conjugate of f, then integrates against g. The kernel
    modes phi~ are the basis modes rescaled by 1/sqrt of their own reflected
    self-product, which is what makes the diagonal values come out positive;
    with unscaled modes the sign of that self-product leaks through. The mode
    sum is truncated at `truncation` and the result depends on it.
    """
    graph = _check_same_graph(f, g)
    if truncation < 1:
        raise InsufficientBasis(f"truncation must be >= 1, got {truncation}")
    modes = list(getattr(basis, "modes", basis))[:truncation]
    if len(modes) < truncation:
        raise InsufficientBasis(
            f"kernel truncated at {truncation} but basis holds only {len(modes)} modes"
        )
    funcs = [m.as_bond_function() for m in modes]
    weights = []
    for bf in funcs:
        p = pt_inner(bf, bf, resolution)
        weights.append(1.0 / p)

    total = 0j
    for j in range(1, graph.n_bonds + 1):
        grid = bond_grid(graph, j, resolution)
        lj = graph.length(j)
        w = simpson_weights(grid.count, grid.spacing)
        f_refl_conj = np.conj(_sample(f.values[j - 1], lj - grid.points))
        gv = _sample(g.values[j - 1], grid.points)
        for wn, bf in zip(weights, funcs):
            phi = _sample(bf.values[j - 1], grid.points)
            a = np.dot(w, phi * f_refl_conj)
            b = np.dot(w, phi * gv)
            total += wn * a * b
    return total


def omega_hermitian(f: BondFunction, g: BondFunction, graph: MetricStarGraph) -> complex:
    """Boundary-term value of <Hf, g> - <f, Hg> for H = -d^2/dx^2.

    Integration by parts leaves only endpoint terms; this evaluates them
    directly. Vanishes whenever f and g both satisfy a self-adjoint
    condition set such as the Kirchhoff reference family.
    """
    if f.graph != graph or g.graph != graph:
        raise GraphMismatch("functions live on a different graph")
    total = 0j
    for j in range(1, graph.n_bonds + 1):
        lj = graph.length(j)
        fv0, fvl = complex(f.value(j, 0.0)), complex(f.value(j, lj))
        fd0, fdl = complex(f.deriv(j, 0.0)), complex(f.deriv(j, lj))
        gv0, gvl = complex(g.value(j, 0.0)), complex(g.value(j, lj))
        gd0, gdl = complex(g.deriv(j, 0.0)), complex(g.deriv(j, lj))
        total += (
            -fdl * np.conj(gvl)
            + fvl * np.conj(gdl)
            + fd0 * np.conj(gv0)
            - fv0 * np.conj(gd0)
        )
    if not np.isfinite(total):
        raise EvaluationFailure("non-finite endpoint data")
    return complex(total)


def omega_pt(f: BondFunction, g: BondFunction, graph: MetricStarGraph) -> complex:
    """Boundary-term value of the skew form under the reflected inner product.

    This is the expansion that vanishes identically under integration by
    parts against pt_inner; its sign and conjugation placement are pinned by
    agreement with the volume-integral oracle omega_direct(..., PT):

      sum_j [ conj(f_j'(0)) g_j(L_j) - conj(f_j'(L_j)) g_j(0)
              + conj(f_j(0)) g_j'(L_j) - conj(f_j(L_j)) g_j'(0) ]

    Equivalent to omega_pt_symplectic on the trace vectors.
    """
    if f.graph != graph or g.graph != graph:
        raise GraphMismatch("functions live on a different graph")
    total = 0j
    for j in range(1, graph.n_bonds + 1):
        lj = graph.length(j)
        total += (
            np.conj(complex(f.deriv(j, 0.0))) * complex(g.value(j, lj))
            - np.conj(complex(f.deriv(j, lj))) * complex(g.value(j, 0.0))
            + np.conj(complex(f.value(j, 0.0))) * complex(g.deriv(j, lj))
            - np.conj(complex(f.value(j, lj))) * complex(g.deriv(j, 0.0))
        )
    if not np.isfinite(total):
        raise EvaluationFailure("non-finite endpoint data")
    return complex(total)


def omega_pt_symplectic(f: BondFunction, g: BondFunction, graph: MetricStarGraph) -> complex:
    """Same skew form evaluated as a symplectic pairing of trace vectors.

    (G^T, G'^T) [[0, I], [-I, 0]] (conj(F), conj(F'))^T with F, F' the trace
    vectors of f and G, G' those of g. Serves as the second route for the
    boundary-term formula in omega_pt.
    """
    tf = trace_vectors(f, graph)
    tg = trace_vectors(g, graph)
    m = 2 * graph.n_bonds
    j_blk = np.zeros((2 * m, 2 * m))
    j_blk[:m, m:] = np.eye(m)
    j_blk[m:, :m] = -np.eye(m)
    row = np.concatenate([tg.psi, tg.dpsi])
    col = np.concatenate([np.conj(tf.psi), np.conj(tf.dpsi)])
    return complex(row @ j_blk @ col)


def _fd2_weights(offsets: np.ndarray, h: float) -> np.ndarray:
    """Stencil weights for f'' from samples at x + offsets*h (exact on
    polynomials up to the stencil size)."""
    k = len(offsets)
    v = np.vander(offsets, k, increasing=True).T  # v[p, i] = offsets[i]**p
    rhs = np.zeros(k)
    rhs[2] = 2.0  # second derivative of x^2
    return np.linalg.solve(v, rhs) / (h * h)


def _second_derivative_samples(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference second derivative on a uniform grid."""
    n = len(values)
    if n < 7:
        raise ResolutionTooCoarse("need at least 7 grid points for the f'' stencil")
    out = np.empty(n, dtype=complex)
    w_int = _fd2_weights(np.arange(-2, 3, dtype=float), h)
    for shift, row in ((0, np.arange(0, 6)), (1, np.arange(-1, 5))):
        w = _fd2_weights(row.astype(float), h)
        out[shift] = np.dot(w, values[shift + row])
        out[n - 1 - shift] = np.dot(w[::-1], values[n - 1 - shift - row[::-1]])
    center = np.convolve(values, w_int[::-1], mode="valid")
    out[2 : n - 2] = center
    return out


def omega_direct(
    f: BondFunction,
    g: BondFunction,
    product: str = HERMITIAN,
    resolution: int = DEFAULT_RESOLUTION,
) -> complex:
    """Skew form <Hf, g> - <f, Hg> evaluated as volume integrals.

    The independent oracle for the boundary-term formulas: H = -d^2/dx^2 is
    applied with analytic second derivatives when available, otherwise with
    fourth-order finite differences on the quadrature grid.
    """
    graph = _check_same_graph(f, g)
    if product not in (HERMITIAN, PT):
        raise UnknownFamily(f"unknown product tag {product!r}")
    total = 0j
    for j in range(1, graph.n_bonds + 1):
        grid = bond_grid(graph, j, resolution)
        pts = grid.points
        lj = graph.length(j)
        fv = _sample(f.values[j - 1], pts)
        gv = _sample(g.values[j - 1], pts)
        if f.has_second_derivs:
            hf = -_sample(f.second_derivs[j - 1], pts)
        else:
            hf = -_second_derivative_samples(fv, grid.spacing)
        if g.has_second_derivs:
            hg = -_sample(g.second_derivs[j - 1], pts)
        else:
            hg = -_second_derivative_samples(gv, grid.spacing)
        if product == HERMITIAN:
            total += quadrature(hf * np.conj(gv) - fv * np.conj(hg), grid)
        else:
            # reflected first argument: uniform grids map x -> L - x exactly
            total += quadrature(np.conj(hf[::-1]) * gv - np.conj(fv[::-1]) * hg, grid)
    return total
