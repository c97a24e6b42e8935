"""Shared test helpers: random smooth functions and golden values.

The golden numbers were fixed by an independent oracle (scipy brentq on the
directly-typed three-bond product form, scipy simpson for integrals) before
the library was built.
"""
import numpy as np

import ptgraph as pg

# first root of the PT secular function for lengths (1, 1.5, 2)
GOLDEN_K1 = 1.74112242151518

# all 12 roots on (0, 20] for lengths (1, 1.5, 2); k = n*pi are degenerate
GOLDEN_REGULAR_123 = (
    1.741122421515,
    2.749698976598,
    9.816671637761,
    10.825248192844,
    14.307493035874,
    15.316069590957,
)
GOLDEN_ROOT_COUNT_123 = 12

# secular value at k = 1 for lengths (1, 1.5, 2)
GOLDEN_SECULAR_AT_1 = 2.51153011454353

# first regular roots of the Kirchhoff reference secular, lengths (1, 1.5, 2)
GOLDEN_KIRCHHOFF_123 = (
    1.047197551197,
    1.783726566080,
    2.479447417936,
    3.803737889240,
    4.499458741100,
)

# self-adjointness defect of both PT families at N = 3
GOLDEN_ABSYM_PT = np.sqrt(6.0)

# max |J(0,t)| of the equal-weight 5-mode state, t in [0,1] x 1000
GOLDEN_MAX_CURRENT_D = 3.4345550671
GOLDEN_MAX_CURRENT_N = 4.0187098727


def random_trig(graph, rng, n_terms=3, complex_amps=True):
    """Random trig polynomial per bond with analytic derivatives."""
    terms = []
    for _ in range(graph.n_bonds):
        bond_terms = []
        for _ in range(n_terms):
            amp = rng.uniform(-1, 1) + (1j * rng.uniform(-1, 1) if complex_amps else 0.0)
            freq = rng.uniform(0.5, 6.0)
            phase = rng.uniform(0, 2 * np.pi)
            bond_terms.append((amp, freq, phase))
        terms.append(bond_terms)
    return pg.trig_function(graph, terms)


def fd_derivative(fn, x, h=1e-5):
    """Fourth-order central difference first derivative."""
    return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)


def fd_second_derivative(fn, x, h=1e-4):
    """Fourth-order central difference second derivative."""
    return (
        -fn(x + 2 * h) + 16 * fn(x + h) - 30 * fn(x) + 16 * fn(x - h) - fn(x - 2 * h)
    ) / (12 * h * h)


def dense_scan_roots(lengths, k_max, step=1e-6, zero_tol=1e-12, chunk=4_000_000):
    """Independent dense-scan root count: directly-typed three-bond secular,
    sign changes plus |S| dips below zero_tol away from sign changes."""
    l1, l2, l3 = lengths

    def sec(k):
        s1, s2, s3 = np.sin(k * l1), np.sin(k * l2), np.sin(k * l3)
        return s1 * s2 + s1 * s3 + s2 * s3

    n_total = int(round(k_max / step))
    sign_roots = []
    dip_samples = []
    prev_k = prev_v = None
    for start in range(1, n_total + 1, chunk):
        idx = np.arange(start, min(start + chunk, n_total + 1))
        ks = idx * step
        vs = sec(ks)
        if prev_k is not None:
            ks = np.concatenate(([prev_k], ks))
            vs = np.concatenate(([prev_v], vs))
        sgn = np.sign(vs)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            # plain bisection, independent of the library's refinement
            a, b, fa = ks[i], ks[i + 1], vs[i]
            for _ in range(80):
                m = 0.5 * (a + b)
                fm = sec(m)
                if fm == 0.0:
                    a = b = m
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = m, fm
                else:
                    b = m
            sign_roots.append(0.5 * (a + b))
        for i in np.nonzero(np.abs(vs) < zero_tol)[0]:
            dip_samples.append(ks[i])
        prev_k, prev_v = ks[-1], vs[-1]

    clusters = []
    for k in sorted(dip_samples):
        if clusters and k - clusters[-1][-1] < 10 * step:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    even_roots = []
    for cl in clusters:
        center = 0.5 * (cl[0] + cl[-1])
        if not any(abs(center - s) < 10 * step for s in sign_roots):
            even_roots.append(center)
    return sorted(sign_roots), sorted(even_roots)
