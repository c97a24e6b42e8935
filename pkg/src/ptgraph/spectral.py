"""Secular-equation root finding and normalized eigenfunction construction.

Both PT-consistent condition families share one transcendental root
condition in the wavenumber k; the Hermitian reference family has its own.
Roots are located by a sign-change scan plus bisection, with an extra pass
that catches even-multiplicity roots (the scan sees a dip of |S| instead of
a crossing). Roots where some sin(k L_j) vanishes are flagged degenerate:
the closed-form eigenfunctions divide by sin(k L_j) and are undefined
there, so such roots are excluded from basis construction and reported
separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import (
    KIRCHHOFF_REF,
    PT_DIRICHLET,
    PT_NEUMANN,
    BondFunction,
    l2_inner,
)
from .errors import (
    DegenerateMode,
    DimensionMismatch,
    InvalidWindow,
    NormalizationError,
    NotARoot,
    OutOfDomain,
    StepTooLarge,
    UnknownFamily,
)
from .graph import DEFAULT_RESOLUTION, MetricStarGraph

#: default bisection / dedup tolerances
DEFAULT_ROOT_TOL = 1e-12
ROOT_DEDUP_TOL = 1e-9
#: a root is degenerate when some |sin(k L_j)| falls below this
DEGENERATE_SINE_TOL = 1e-8
#: an |S| dip must refine below this to count as an even-multiplicity root
EVEN_ROOT_TOL = 1e-12
#: |S(k)| required of a k passed to eigenmode()
MODE_ROOT_TOL = 1e-9
#: tolerance of the closed-form-vs-quadrature norm cross-check
NORM_CHECK_TOL = 1e-8

_SIN_FAMILIES = (PT_DIRICHLET, KIRCHHOFF_REF)
_ALL_FAMILIES = (PT_DIRICHLET, PT_NEUMANN, KIRCHHOFF_REF)


def secular(k, graph: MetricStarGraph):
    """Root condition shared by both PT condition families.

    Pole-free form sum_j prod_{i != j} sin(k L_i); equivalent to
    sum_j 1/sin(k L_j) = 0 away from the sine zeros, and for three bonds it
    is sin kL1 sin kL2 + sin kL1 sin kL3 + sin kL2 sin kL3. Accepts a scalar
    or an array of k values.
    """
    lengths = np.asarray(graph.lengths)
    k_arr = np.asarray(k, dtype=float)
    sines = np.sin(k_arr[..., None] * lengths)
    n = len(lengths)
    total = np.zeros(k_arr.shape)
    for j in range(n):
        others = np.delete(sines, j, axis=-1)
        total = total + np.prod(others, axis=-1)
    return total if total.shape else float(total)


def secular_kirchhoff(k, graph: MetricStarGraph):
    """Root condition of the Hermitian reference family.

    Pole-free form of sum_j cot(k L_j) = 0: sum_j cos(k L_j) prod_{i != j}
    sin(k L_i). Not shared with the PT families.
    """
    lengths = np.asarray(graph.lengths)
    k_arr = np.asarray(k, dtype=float)
    sines = np.sin(k_arr[..., None] * lengths)
    cosines = np.cos(k_arr[..., None] * lengths)
    n = len(lengths)
    total = np.zeros(k_arr.shape)
    for j in range(n):
        others = np.delete(sines, j, axis=-1)
        total = total + cosines[..., j] * np.prod(others, axis=-1)
    return total if total.shape else float(total)


def _secular_for_family(family: str):
    if family in (PT_DIRICHLET, PT_NEUMANN):
        return secular
    if family == KIRCHHOFF_REF:
        return secular_kirchhoff
    raise UnknownFamily(f"no spectral problem for family {family!r}")


def _secular_deriv(k: float, graph: MetricStarGraph, family: str) -> float:
    """d/dk of the family's root condition (used to pin |S| dips)."""
    ls = graph.lengths
    n = len(ls)
    s = [math.sin(k * l) for l in ls]
    c = [math.cos(k * l) for l in ls]

    def prod_except(skip):
        p = 1.0
        for m in range(n):
            if m not in skip:
                p *= s[m]
        return p

    if family in (PT_DIRICHLET, PT_NEUMANN):
        return sum(
            ls[i] * c[i] * prod_except({j, i})
            for j in range(n)
            for i in range(n)
            if i != j
        )
    if family == KIRCHHOFF_REF:
        tot = 0.0
        for j in range(n):
            tot += -ls[j] * s[j] * prod_except({j})
            tot += c[j] * sum(
                ls[i] * c[i] * prod_except({j, i}) for i in range(n) if i != j
            )
        return tot
    raise UnknownFamily(f"no spectral problem for family {family!r}")


@dataclass(frozen=True)
class SecularRoot:
    """One located root: its k, the degeneracy flag, and how it was found."""

    k: float
    degenerate: bool
    sign_change: bool


def _bisect(fn, a: float, b: float, fa: float, fb: float) -> float:
    """Bisection run down to the floating-point floor of the bracket."""
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def _is_degenerate(k: float, graph: MetricStarGraph) -> bool:
    return any(abs(math.sin(k * l)) < DEGENERATE_SINE_TOL for l in graph.lengths)


def find_roots(
    graph: MetricStarGraph,
    k_min: float,
    k_max: float,
    scan_step: float | None = None,
    tol: float = DEFAULT_ROOT_TOL,
    family: str = PT_DIRICHLET,
) -> list[SecularRoot]:
    """Locate all roots of the family's secular function on (k_min, k_max].

    Scans in steps of scan_step for sign changes and refines each bracket by
    bisection (at least to width `tol`, in practice to the floating-point
    floor). Dips of |S| that refine below EVEN_ROOT_TOL are kept as
    even-multiplicity roots. k = 0 is always excluded. Refuses scan steps
    above pi / (2 max L_j), which could hop over adjacent roots.
    """
    if not (math.isfinite(k_min) and math.isfinite(k_max)) or k_min < 0 or k_min >= k_max:
        raise InvalidWindow(f"need 0 <= k_min < k_max, got [{k_min}, {k_max}]")
    if not (tol > 0.0 and math.isfinite(tol)):
        raise InvalidWindow(f"tol must be a positive number, got {tol}")
    max_l = max(graph.lengths)
    if scan_step is None:
        scan_step = math.pi / (50.0 * max_l)
    if not (scan_step > 0.0 and math.isfinite(scan_step)):
        raise InvalidWindow(f"scan_step must be a positive number, got {scan_step}")
    if scan_step > math.pi / (2.0 * max_l):
        raise StepTooLarge(
            f"scan_step {scan_step:g} exceeds pi/(2 max L) = {math.pi / (2 * max_l):g} "
            "and could skip roots"
        )
    sec_fn = _secular_for_family(family)
    fn = lambda k: float(sec_fn(k, graph))

    lo = max(k_min, tol)
    if lo >= k_max:
        return []
    grid = np.arange(lo, k_max, scan_step)
    if grid.size == 0 or grid[-1] < k_max:
        grid = np.append(grid, k_max)
    vals = np.asarray(sec_fn(grid, graph), dtype=float)

    candidates: list[tuple[float, bool]] = []  # (k, sign_change)
    for i in np.nonzero(vals == 0.0)[0]:
        candidates.append((float(grid[i]), True))
    sgn = np.sign(vals)
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        k_root = _bisect(fn, float(grid[i]), float(grid[i + 1]), vals[i], vals[i + 1])
        candidates.append((k_root, True))

    # |S| dips with no sign change: refine on dS/dk, keep if S reaches ~0
    bracketed = {int(i) for i in np.nonzero(sgn[:-1] * sgn[1:] <= 0)[0]}
    absv = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if not (absv[i - 1] >= absv[i] <= absv[i + 1]):
            continue
        if {i - 1, i} & bracketed:
            continue
        dfn = lambda k: _secular_deriv(k, graph, family)
        dlo, dhi = dfn(float(grid[i - 1])), dfn(float(grid[i + 1]))
        if dlo == 0.0:
            k_min_pt = float(grid[i - 1])
        elif dhi == 0.0:
            k_min_pt = float(grid[i + 1])
        elif (dlo < 0.0) != (dhi < 0.0):
            k_min_pt = _bisect(dfn, float(grid[i - 1]), float(grid[i + 1]), dlo, dhi)
        else:
            continue
        if abs(fn(k_min_pt)) < EVEN_ROOT_TOL:
            candidates.append((k_min_pt, False))

    out: list[SecularRoot] = []
    for k_root, via_sign in sorted(candidates):
        if out and k_root - out[-1].k < ROOT_DEDUP_TOL:
            continue
        out.append(
            SecularRoot(k=k_root, degenerate=_is_degenerate(k_root, graph), sign_change=via_sign)
        )
    return out


@dataclass(frozen=True)
class EigenMode:
    """One eigen-wavenumber with its closed-form bond profile.

    The profile is norm_const * sin(k (L_j - x)) / sin(k L_j) for the
    value-continuity families and the cosine analog for the derivative-
    continuity family; norm_const makes the graph L2 norm exactly one.
    """

    k: float
    family: str
    norm_const: float
    graph: MetricStarGraph
    degenerate_flag: bool = False

    def value(self, bond: int, x):
        lj = self.graph.length(bond)
        s = math.sin(self.k * lj)
        if self.family in _SIN_FAMILIES:
            return self.norm_const * np.sin(self.k * (lj - np.asarray(x))) / s
        return self.norm_const * np.cos(self.k * (lj - np.asarray(x))) / s

    def deriv(self, bond: int, x):
        lj = self.graph.length(bond)
        s = math.sin(self.k * lj)
        if self.family in _SIN_FAMILIES:
            return -self.k * self.norm_const * np.cos(self.k * (lj - np.asarray(x))) / s
        return self.k * self.norm_const * np.sin(self.k * (lj - np.asarray(x))) / s

    def as_bond_function(self) -> BondFunction:
        """Adapter with analytic derivatives (f'' = -k^2 f)."""
        k2 = self.k * self.k

        def val(b):
            return lambda x: self.value(b, x)

        def der(b):
            return lambda x: self.deriv(b, x)

        def sec(b):
            return lambda x: -k2 * self.value(b, x)

        n = self.graph.n_bonds
        return BondFunction(
            self.graph,
            tuple(val(b) for b in range(1, n + 1)),
            tuple(der(b) for b in range(1, n + 1)),
            tuple(sec(b) for b in range(1, n + 1)),
        )


def eigenmode(
    k: float,
    family: str,
    graph: MetricStarGraph,
    resolution: int = DEFAULT_RESOLUTION,
) -> EigenMode:
    """Build the normalized eigenfunction at a non-degenerate secular root.

    The normalization constant comes from the closed form

        [ sum_j (2 k L_j -/+ sin 2 k L_j) / (4 k sin^2 k L_j) ]^(-1/2)

    (minus for the sine-profile families, plus for the cosine profile), and
    is cross-checked against the quadrature L2 norm at `resolution` points
    per bond; disagreement beyond NORM_CHECK_TOL raises NormalizationError.
    """
    if family not in _ALL_FAMILIES:
        raise UnknownFamily(f"cannot build eigenfunctions for family {family!r}")
    sec_fn = _secular_for_family(family)
    resid = abs(float(sec_fn(k, graph)))
    if resid >= MODE_ROOT_TOL:
        raise NotARoot(f"|secular({k})| = {resid:g} >= {MODE_ROOT_TOL:g}")
    sines = [math.sin(k * l) for l in graph.lengths]
    if min(abs(s) for s in sines) <= DEGENERATE_SINE_TOL:
        raise DegenerateMode(
            f"sin(k L_j) vanishes at k = {k:.12g}; closed-form profile undefined"
        )
    sign = -1.0 if family in _SIN_FAMILIES else 1.0
    total = sum(
        (2.0 * k * l + sign * math.sin(2.0 * k * l)) / (4.0 * k * s * s)
        for l, s in zip(graph.lengths, sines)
    )
    norm_const = total ** -0.5
    mode = EigenMode(k=float(k), family=family, norm_const=norm_const, graph=graph)
    bf = mode.as_bond_function()
    n2 = l2_inner(bf, bf, resolution)
    if abs(n2 - 1.0) > NORM_CHECK_TOL:
        raise NormalizationError(
            f"quadrature norm {n2.real:.12g} deviates from 1 beyond {NORM_CHECK_TOL:g} "
            f"(resolution {resolution} too coarse for k = {k:g}?)"
        )
    return mode


def evaluate_mode(mode: EigenMode, bond: int, x: float) -> complex:
    """Closed-form mode value at a point of bond `bond` (1-based)."""
    _check_domain(mode, bond, x)
    return complex(mode.value(bond, float(x)))


def evaluate_mode_deriv(mode: EigenMode, bond: int, x: float) -> complex:
    """Closed-form x-derivative of the mode (no numerical differencing)."""
    _check_domain(mode, bond, x)
    return complex(mode.deriv(bond, float(x)))


def _check_domain(mode: EigenMode, bond: int, x: float):
    if not 1 <= bond <= mode.graph.n_bonds:
        raise OutOfDomain(f"bond {bond} not in 1..{mode.graph.n_bonds}")
    if not 0.0 <= x <= mode.graph.length(bond):
        raise OutOfDomain(f"x = {x} outside [0, {mode.graph.length(bond)}] on bond {bond}")


@dataclass(frozen=True)
class SpectralBasis:
    """Ascending non-degenerate eigenmodes of one family on one graph.

    Degenerate roots are not silently dropped; they are kept in
    `degenerate_roots` so callers can tell the eigenbasis may be incomplete.
    """

    modes: tuple[EigenMode, ...]
    family: str
    k_max: float
    graph: MetricStarGraph
    degenerate_roots: tuple[SecularRoot, ...] = field(default=())

    def __post_init__(self):
        ks = [m.k for m in self.modes]
        for a, b in zip(ks, ks[1:]):
            if not b > a + ROOT_DEDUP_TOL:
                raise DimensionMismatch("mode wavenumbers must be strictly increasing")
        for m in self.modes:
            if m.family != self.family or m.graph != self.graph:
                raise DimensionMismatch("all modes must share the basis family and graph")

    def __len__(self) -> int:
        return len(self.modes)


def build_basis(
    graph: MetricStarGraph,
    family: str,
    k_max: float,
    scan_step: float | None = None,
    tol: float = DEFAULT_ROOT_TOL,
    resolution: int = DEFAULT_RESOLUTION,
) -> SpectralBasis:
    """Find all roots on (0, k_max] and build eigenmodes at the regular ones."""
    roots = find_roots(graph, 0.0, k_max, scan_step, tol, family=family)
    modes = tuple(
        eigenmode(r.k, family, graph, resolution) for r in roots if not r.degenerate
    )
    degenerate = tuple(r for r in roots if r.degenerate)
    return SpectralBasis(
        modes=modes, family=family, k_max=float(k_max), graph=graph, degenerate_roots=degenerate
    )
