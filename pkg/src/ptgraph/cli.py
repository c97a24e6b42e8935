"""Command-line front end writing deterministic CSV artifacts.

Subcommands:
  spectrum   secular roots on (0, kmax] as CSV (n, k, degenerate)
  modes      eigenfunction profiles sampled per bond as CSV
  evolve     vertex-current time series of a coefficient state as CSV
  verify     matrix and spectral consistency report with PASS/FAIL lines

Exit codes: 0 success / all checks pass, 1 computational failure or
internal error, 2 usage or validation error (message names the flag).
Numbers are printed with a fixed number of significant digits and files
are written atomically, so identical configurations give byte-identical
artifacts.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .boundary import (
    BUILTIN_FAMILIES,
    CUSTOM,
    KIRCHHOFF_REF,
    PT_DIRICHLET,
    PT_NEUMANN,
    BCMatrices,
    bc_matrices,
    bc_residual,
    check_ab_symmetry,
    check_ranks,
    l2_inner,
    omega_hermitian,
    omega_pt,
    omega_pt_symplectic,
    trace_vectors,
)
from .dynamics import WaveState, current_series
from .errors import PTGraphError
from .graph import MetricStarGraph, make_star_graph
from .spectral import build_basis, find_roots

DEFAULT_KMAX = 20.0
DEFAULT_TOL = 1e-12
DEFAULT_RESOLUTION = 2001
DEFAULT_PRECISION = 12

#: verify thresholds (fixed; the report gates against exactly these)
VERIFY_BC_RESIDUAL_TOL = 1e-10
VERIFY_OMEGA_PT_TOL = 1e-8
VERIFY_OMEGA_HERMITIAN_TOL = 1e-9
VERIFY_OMEGA_ROUTE_TOL = 1e-12
VERIFY_AB_SYMMETRY_TOL = 1e-14
VERIFY_MODE_COUNT = 5


class UsageError(Exception):
    """Bad flag value; carries the flag name for the error message."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; mirrors the library preconditions.

    Built from parsed flags by `from_args`, which raises UsageError naming
    the offending flag on any violation.
    """

    graph: MetricStarGraph
    lengths_raw: str
    family_raw: str
    family: str
    custom_path: Optional[str]
    k_max: float
    tol: float
    resolution: int
    precision: int
    output_path: Optional[str]
    t_max: float = 1.0
    t_steps: int = 1000
    coeff_spec: Optional[str] = None

    @classmethod
    def from_args(cls, args, allowed_families) -> "RunConfig":
        try:
            lengths = [float(tok) for tok in args.lengths.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise UsageError("--lengths", f"could not parse {args.lengths!r}: {exc}")
        try:
            graph = make_star_graph(lengths)
        except PTGraphError as exc:
            raise UsageError("--lengths", str(exc))

        family, custom_path = cls._resolve_family(args.family, allowed_families)
        if not (args.kmax > 0 and math.isfinite(args.kmax)):
            raise UsageError("--kmax", f"must be a positive number, got {args.kmax}")
        if not (args.tol > 0 and math.isfinite(args.tol)):
            raise UsageError("--tol", f"must be a positive number, got {args.tol}")
        if args.resolution < 3 or args.resolution % 2 == 0:
            raise UsageError("--resolution", f"must be an odd integer >= 3, got {args.resolution}")
        if args.precision < 1 or args.precision > 17:
            raise UsageError("--precision", f"must be in 1..17, got {args.precision}")

        t_max = getattr(args, "tmax", 1.0)
        t_steps = getattr(args, "tsteps", 1000)
        coeff_spec = getattr(args, "coeffs", None)
        if coeff_spec is not None:
            if not (t_max > 0 and math.isfinite(t_max)):
                raise UsageError("--tmax", f"must be a positive number, got {t_max}")
            if t_steps < 2:
                raise UsageError("--tsteps", f"must be an integer >= 2, got {t_steps}")

        return cls(
            graph=graph,
            lengths_raw=args.lengths,
            family_raw=args.family,
            family=family,
            custom_path=custom_path,
            k_max=args.kmax,
            tol=args.tol,
            resolution=args.resolution,
            precision=args.precision,
            output_path=args.out,
            t_max=t_max,
            t_steps=t_steps,
            coeff_spec=coeff_spec,
        )

    @staticmethod
    def _resolve_family(raw: str, allowed):
        if raw in allowed:
            return raw, None
        if raw.startswith("custom:") and CUSTOM in allowed:
            path = raw[len("custom:"):]
            if not path:
                raise UsageError("--family", "custom family needs a file path (custom:<path>)")
            return CUSTOM, path
        raise UsageError("--family", f"{raw!r} is not one of {', '.join(allowed)}")


def _fmt(x, precision: int) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # avoid "-0"
    return format(x, f".{precision}g")


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ptgraph-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out_path):
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)


def _config_comments(cfg: RunConfig, command: str) -> list[str]:
    return [
        f"# ptgraph {__version__}",
        f"# command: {command}",
        f"# lengths: {cfg.lengths_raw}",
        f"# family: {cfg.family_raw}",
        f"# kmax: {_fmt(cfg.k_max, cfg.precision)}",
        f"# tol: {_fmt(cfg.tol, cfg.precision)}",
        f"# resolution: {cfg.resolution}",
        f"# precision: {cfg.precision}",
    ]


def cmd_spectrum(cfg: RunConfig) -> int:
    roots = find_roots(cfg.graph, 0.0, cfg.k_max, None, cfg.tol, family=cfg.family)
    lines = _config_comments(cfg, "spectrum")
    lines.append("n,k,degenerate")
    for n, r in enumerate(roots, start=1):
        lines.append(f"{n},{_fmt(r.k, cfg.precision)},{'true' if r.degenerate else 'false'}")
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return 0


def cmd_modes(cfg: RunConfig) -> int:
    basis = build_basis(cfg.graph, cfg.family, cfg.k_max, tol=cfg.tol)
    lines = _config_comments(cfg, "modes")
    for n, mode in enumerate(basis.modes, start=1):
        bf = mode.as_bond_function()
        norm = l2_inner(bf, bf).real
        lines.append(f"# norm_check,{n},{_fmt(norm, cfg.precision)}")
    lines.append("n,bond,x,re_psi,im_psi")
    for n, mode in enumerate(basis.modes, start=1):
        for bond in range(1, cfg.graph.n_bonds + 1):
            xs = np.linspace(0.0, cfg.graph.length(bond), cfg.resolution)
            vals = np.asarray(mode.value(bond, xs), dtype=complex)
            for x, v in zip(xs, vals):
                lines.append(
                    f"{n},{bond},{_fmt(x, cfg.precision)},"
                    f"{_fmt(v.real, cfg.precision)},{_fmt(v.imag, cfg.precision)}"
                )
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return 0


def _parse_coeffs(raw: str, n_modes: int) -> np.ndarray:
    if raw.startswith("equal:"):
        try:
            count = int(raw[len("equal:"):])
        except ValueError:
            raise UsageError("--coeffs", f"could not parse mode count in {raw!r}")
        if count < 1:
            raise UsageError("--coeffs", f"equal:<K> needs K >= 1, got {count}")
        if count > n_modes:
            raise UsageError(
                "--coeffs", f"equal:{count} requested but only {n_modes} regular modes available"
            )
        c = np.zeros(n_modes, dtype=complex)
        c[:count] = 1.0 / math.sqrt(count)
        return c
    if raw.startswith("list:"):
        toks = [t for t in raw[len("list:"):].split(",") if t.strip() != ""]
        if not toks:
            raise UsageError("--coeffs", "list:<c1,c2,...> needs at least one value")
        try:
            vals = [complex(t) for t in toks]
        except ValueError as exc:
            raise UsageError("--coeffs", f"could not parse coefficient: {exc}")
        if len(vals) > n_modes:
            raise UsageError(
                "--coeffs", f"{len(vals)} coefficients given but only {n_modes} modes available"
            )
        c = np.zeros(n_modes, dtype=complex)
        c[: len(vals)] = vals
        return c
    raise UsageError("--coeffs", f"expected equal:<K> or list:<c1,c2,...>, got {raw!r}")


def cmd_evolve(cfg: RunConfig) -> int:
    basis = build_basis(cfg.graph, cfg.family, cfg.k_max, tol=cfg.tol)
    coeffs = _parse_coeffs(cfg.coeff_spec, len(basis.modes))
    state = WaveState(basis=basis, coeffs=coeffs, t=0.0)
    times = np.linspace(0.0, cfg.t_max, cfg.t_steps)
    series = current_series(state, times)
    lines = _config_comments(cfg, "evolve")
    lines.append(f"# coeffs: {cfg.coeff_spec}")
    lines.append(f"# tmax: {_fmt(cfg.t_max, cfg.precision)}")
    lines.append(f"# tsteps: {cfg.t_steps}")
    lines.append("t,J_total," + ",".join(f"J_{j}" for j in range(1, cfg.graph.n_bonds + 1)))
    for i, t in enumerate(series.times):
        row = [_fmt(t, cfg.precision), _fmt(series.total[i], cfg.precision)]
        row += [_fmt(series.per_bond[j, i], cfg.precision) for j in range(cfg.graph.n_bonds)]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return 0


def _load_custom_matrices(path: str, n_bonds: int) -> BCMatrices:
    """Plain-text (A|B) pair: 2N rows of 4N whitespace-separated complex
    entries ('re' or 're+imj'), the A block first, then the B block."""
    try:
        with open(path) as fh:
            rows = [line.split() for line in fh if line.strip() and not line.startswith("#")]
    except OSError as exc:
        raise UsageError("--family", f"cannot read custom matrix file: {exc}")
    m = 2 * n_bonds
    if len(rows) != m:
        raise UsageError("--family", f"custom matrix file must have {m} rows, found {len(rows)}")
    entries = []
    for i, row in enumerate(rows, start=1):
        if len(row) != 2 * m:
            raise UsageError(
                "--family", f"row {i} must have {2 * m} entries, found {len(row)}"
            )
        try:
            entries.append([complex(tok) for tok in row])
        except ValueError as exc:
            raise UsageError("--family", f"row {i}: could not parse entry: {exc}")
    full = np.array(entries, dtype=complex)
    return BCMatrices(a=full[:, :m], b=full[:, m:], family=CUSTOM, n_bonds=n_bonds)


def cmd_verify(cfg: RunConfig) -> int:
    report: list[str] = []
    failed = False

    def check(ok: bool, label: str):
        nonlocal failed
        report.append(f"[{'PASS' if ok else 'FAIL'}] {label}")
        if not ok:
            failed = True

    p = cfg.precision
    graph = cfg.graph
    report.append(f"ptgraph {__version__} verify")
    report.append(f"family  : {cfg.family_raw}")
    report.append(f"lengths : {cfg.lengths_raw}")
    n2 = 2 * graph.n_bonds

    bc = (
        _load_custom_matrices(cfg.custom_path, graph.n_bonds)
        if cfg.family == CUSTOM
        else bc_matrices(cfg.family, graph)
    )
    ranks = check_ranks(bc)
    report.append(f"rank_a  : {ranks.rank_a}")
    report.append(f"rank_b  : {ranks.rank_b}")
    report.append(f"rank_ab : {ranks.rank_ab}")
    check(ranks.rank_ab == n2, f"rank(A|B) = 2N = {n2}")
    if ranks.rank_a < n2 or ranks.rank_b < n2:
        report.append(
            "[NOTE] rank(A) or rank(B) is below 2N although the compact-form "
            "condition is usually quoted with both equal to 2N; the stacked "
            "rank above is the nondegeneracy condition actually enforced."
        )
    absym = check_ab_symmetry(bc)
    report.append(f"ab_symmetry_defect : {_fmt(absym, p)}")
    if cfg.family == KIRCHHOFF_REF:
        check(absym < VERIFY_AB_SYMMETRY_TOL, f"self-adjointness defect < {VERIFY_AB_SYMMETRY_TOL:g}")
    else:
        report.append(
            "[INFO] defect recorded only: non-self-adjoint families are nonzero here by design"
        )

    if cfg.family == CUSTOM:
        report.append("[INFO] spectral checks need a built-in family; skipped for custom matrices")
    else:
        basis = build_basis(graph, cfg.family, cfg.k_max, tol=cfg.tol)
        modes = basis.modes[:VERIFY_MODE_COUNT]
        report.append(
            f"modes_used : {len(modes)} of {len(basis.modes)} regular "
            f"(k = {', '.join(_fmt(m.k, p) for m in modes)})"
        )
        if basis.degenerate_roots:
            ks = ", ".join(_fmt(r.k, p) for r in basis.degenerate_roots)
            report.append(
                f"[WARN] {len(basis.degenerate_roots)} degenerate root(s) flagged (k = {ks}); "
                "eigenfunctions are undefined there and the basis may be incomplete"
            )
        if not modes:
            report.append("[INFO] no regular modes below kmax; mode-based checks are vacuous")
        else:
            funcs = [m.as_bond_function() for m in modes]
            res_max = max(bc_residual(bc, trace_vectors(f, graph)) for f in funcs)
            report.append(f"bc_residual_max : {_fmt(res_max, p)}")
            check(res_max < VERIFY_BC_RESIDUAL_TOL, f"bc residual < {VERIFY_BC_RESIDUAL_TOL:g}")

            if cfg.family == KIRCHHOFF_REF:
                om_max = max(
                    abs(omega_hermitian(f, g, graph)) for f in funcs for g in funcs
                )
                report.append(f"omega_hermitian_max : {_fmt(om_max, p)}")
                check(
                    om_max < VERIFY_OMEGA_HERMITIAN_TOL,
                    f"|omega_hermitian| over mode pairs < {VERIFY_OMEGA_HERMITIAN_TOL:g}",
                )
            else:
                om_max = max(abs(omega_pt(f, g, graph)) for f in funcs for g in funcs)
                route = max(
                    abs(omega_pt(f, g, graph) - omega_pt_symplectic(f, g, graph))
                    for f in funcs
                    for g in funcs
                )
                report.append(f"omega_pt_max : {_fmt(om_max, p)}")
                check(om_max < VERIFY_OMEGA_PT_TOL, f"|omega_pt| over mode pairs < {VERIFY_OMEGA_PT_TOL:g}")
                report.append(f"omega_route_diff : {_fmt(route, p)}")
                check(
                    route < VERIFY_OMEGA_ROUTE_TOL,
                    f"boundary vs symplectic route agreement < {VERIFY_OMEGA_ROUTE_TOL:g}",
                )

            gram = np.empty((len(funcs), len(funcs)), dtype=complex)
            for i, f in enumerate(funcs):
                for j, g in enumerate(funcs):
                    gram[i, j] = l2_inner(f, g, cfg.resolution)
            dev = float(np.max(np.abs(gram - np.eye(len(funcs)))))
            report.append(f"gram_max_identity_dev : {_fmt(dev, p)}")
            report.append(f"gram_cond : {_fmt(np.linalg.cond(gram), p)}")

    report.append(f"result: {'FAIL' if failed else 'PASS'}")
    text = "\n".join(report) + "\n"
    sys.stdout.write(text)
    if cfg.output_path:
        _atomic_write(cfg.output_path, text)
    return 1 if failed else 0


_ALLOWED_FAMILIES = {
    "spectrum": BUILTIN_FAMILIES,
    "modes": (PT_DIRICHLET, PT_NEUMANN),
    "evolve": BUILTIN_FAMILIES,
    "verify": BUILTIN_FAMILIES + (CUSTOM,),
}

_COMMANDS = {
    "spectrum": cmd_spectrum,
    "modes": cmd_modes,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptgraph",
        description="Spectral solver and verification toolkit for PT-symmetric quantum star graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--lengths", required=True, help="comma-separated bond lengths, e.g. 1.0,1.5,2.0")
        sp.add_argument("--family", default=PT_DIRICHLET,
                        help="pt-dirichlet | pt-neumann | kirchhoff-ref | custom:<path>")
        sp.add_argument("--kmax", type=float, default=DEFAULT_KMAX, help="upper end of the root window")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root refinement tolerance")
        sp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                        help="points per bond for sampling and quadrature (odd)")
        sp.add_argument("--out", default=None, help="output file (stdout if omitted)")
        sp.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="significant digits in output numbers")

    sp = sub.add_parser("spectrum", help="write the secular roots as CSV")
    add_common(sp)

    sp = sub.add_parser("modes", help="write sampled eigenfunction profiles as CSV")
    add_common(sp)

    sp = sub.add_parser("evolve", help="write the vertex-current time series as CSV")
    add_common(sp)
    sp.add_argument("--coeffs", required=True, help="equal:<K> or list:<c1,c2,...>")
    sp.add_argument("--tmax", type=float, default=1.0, help="end of the time window")
    sp.add_argument("--tsteps", type=int, default=1000, help="number of time samples")

    sp = sub.add_parser("verify", help="run matrix and spectral consistency checks")
    add_common(sp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args, _ALLOWED_FAMILIES[args.command])
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PTGraphError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
