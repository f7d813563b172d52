"""The validation suite: named numerical checks with fixed tolerances and a JSON report."""

from collections import Counter
from dataclasses import asdict, dataclass
import json
import warnings

import numpy as np

from . import oracles, qed, scaling
from .dirac import identity4, slash
from .propagators import pair_Dminus, pair_Dplus
from .splitter import ThresholdWarning, av_causal, boosted_versor, ret_causal, ret_noncausal
from .testfunctions import TestFunction, multi_indices, omega_subtract
from .wick import enumerate_contractions, epstein_glaser_sums, qed_vertex

REPORT_SCHEMA = 1
MASS = 1.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.value:.3e} (tolerance {self.tolerance:.1e}) {self.detail}".rstrip()


def _rel(a, b):
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / scale)


# -- individual checks -----------------------------------------------------------------

def check_singularity_degrees():
    patterns = [p for p in enumerate_contractions(qed_vertex(1), qed_vertex(2)) if p.q > 0]
    found = Counter(p.omega for p in patterns)
    expected = Counter({-1: 2, -2: 1, 2: 1, 1: 2, 4: 1})
    ok = found == expected
    return CheckResult("singularity_degrees", ok, float(sum((found - expected).values())), 0.0,
                       f"found {dict(sorted(found.items()))}")


def check_s2_structure():
    patterns = enumerate_contractions(qed_vertex(1), qed_vertex(2))
    counts = Counter(p.q for p in patterns)
    ok = len(patterns) == 8 and counts == Counter({0: 1, 1: 3, 2: 3, 3: 1})
    table = qed.s2_table()
    linked = sorted(t.pattern_id for t in table) == sorted(p.scalar_factor_id for p in patterns)
    return CheckResult("s2_structure", ok and linked, float(len(patterns)), 8.0,
                       f"per q {dict(sorted(counts.items()))}, table linked {linked}")


def check_partition_counts(n_max=12):
    worst = 0
    for n in range(2, n_max + 1):
        _, R, _ = epstein_glaser_sums(n)
        worst = max(worst, abs(len(R) - oracles.count_nonempty_proper_subsets(n)),
                    abs(len(R) - (2 ** (n - 1) - 1)))
    return CheckResult("partition_counts", worst == 0, float(worst), 0.0, f"n <= {n_max}")


def _spacelike_points(rng, n):
    out = []
    while len(out) < n:
        xx = -rng.uniform(0.01, 25.0)
        vec = rng.normal(size=3)
        r = rng.uniform(np.sqrt(-xx), np.sqrt(-xx) + 5.0)
        vec *= r / np.linalg.norm(vec)
        t = np.sqrt(max(r * r + xx, 0.0)) * rng.choice([-1.0, 1.0])
        out.append(np.array([t, *vec]))
    return out


def check_causal_support(seed=4):
    pts = _spacelike_points(np.random.default_rng(seed), 1000)
    plus = np.array([pair_Dplus(x, MASS) for x in pts])
    total = np.array([pair_Dplus(x, MASS) + pair_Dminus(x, MASS) for x in pts])
    ratio = float(np.max(np.abs(total)) / np.max(np.abs(plus)))
    return CheckResult("causal_support", ratio < 1e-10, ratio, 1e-10, "1000 spacelike x")


def _oracle_points():
    pts = []
    rng = np.random.default_rng(5)
    while len(pts) < 20:
        t = rng.uniform(-3.0, 3.0)
        r = rng.uniform(0.0, 3.0)
        if abs(abs(t) - r) < 0.25:
            continue
        vec = rng.normal(size=3)
        vec *= r / np.linalg.norm(vec)
        pts.append(np.array([t, *vec]))
    return pts


def check_momentum_oracle():
    worst = 0.0
    n_time = 0
    for x in _oracle_points():
        n_time += x[0] ** 2 > x[1:] @ x[1:]
        value = pair_Dplus(x, MASS)
        worst = max(worst, abs(oracles.dplus_momentum_oracle(x, MASS) - value) / abs(value))
    return CheckResult("momentum_oracle", worst < 1e-4, worst, 1e-4, f"20 points, {n_time} timelike")


def _off_threshold_momenta(rng, n, thr, avoid=0.05):
    pts = []
    while len(pts) < n:
        s = rng.uniform(-40.0, 40.0)
        if abs(s - thr) < avoid * thr or abs(s) < 0.05:
            continue
        vec = rng.normal(size=3)
        if s < 0:
            vec *= np.sqrt(-s) / np.linalg.norm(vec) * rng.uniform(1.05, 2.0)
        e = np.sqrt(s + vec @ vec)
        pts.append(np.array([rng.choice([-1.0, 1.0]) * e, *vec]))
    return pts


def _fd_derivatives(func, h):
    """Central finite differences of func at 0 through order 2.

    Stencils avoid the light cone: mixed time-space steps use unequal widths.
    """
    out = {}
    e = np.eye(4)
    out[(0, 0, 0, 0)] = func(h * e[0] * 1e-3)
    for a in range(4):
        step = h * e[a]
        out[("d", a)] = (func(step) - func(-step)) / (2 * h)
        # p = 0 sits on the light cone; this stencil is exact on quadratics without using it
        out[("dd", a, a)] = (func(2 * step) - func(step) - func(-step) + func(-2 * step)) / (3 * h * h)
    for a in range(4):
        for b in range(a + 1, 4):
            ka = h
            kb = h / 2 if a == 0 else h
            terms = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
            out[("dd", a, b)] = sum(w * func(sa * ka * e[a] + sb * kb * e[b]) for sa, sb, w in terms) / (4 * ka * kb)
    return out


def check_splitting_identity(seed=6):
    f = qed.vacuum_polarization_f(MASS)
    pts = _off_threshold_momenta(np.random.default_rng(seed), 200, 4 * MASS**2)
    worst = 0.0
    for p in pts:
        d = f(p)
        diff = ret_causal(f, p) - av_causal(f, p)
        scale = max(abs(d), abs(ret_causal(f, p)))
        worst = max(worst, abs(diff - d) / scale)
    ret = lambda p: ret_causal(f, p)
    coarse, fine = _fd_derivatives(ret, 1e-2), _fd_derivatives(ret, 5e-3)
    # one Richardson step removes the h^2 truncation of the stencils
    derivs = {k: (4 * fine[k] - coarse[k]) / 3 for k in coarse}
    scale = max(abs(f(p)) for p in pts)
    fd = max(abs(v) for v in derivs.values()) / scale
    ok = worst < 1e-6 and fd < 1e-6
    return CheckResult("splitting_identity", ok, max(worst, fd), 1e-6,
                       f"ret-av=f max rel {worst:.2e}; derivatives at 0 / scale {fd:.2e}")


def check_pi_cross_validation(seed=7):
    fit = qed.fit_pi_freedom(MASS)
    pts = qed.random_momenta(np.random.default_rng(seed), 100, (5 * MASS**2, 100 * MASS**2))
    worst = 0.0
    for p in pts:
        closed = qed.pi_scalar(p, MASS)
        route = qed.pi_scalar_from_splitting(p, MASS) + fit(p)
        worst = max(worst, abs(closed - route) / abs(closed))
    # the absorptive part against an eps-regularised evaluation of the same integral
    im_worst = 0.0
    for p in pts:
        s = p[0] ** 2 - p[1:] @ p[1:]
        expected = -np.pi / 3 * (s + 2 * MASS**2) * np.sqrt(1 - 4 * MASS**2 / s)
        closed = qed.pi_scalar(p, MASS).imag
        oracle = oracles.pi_absorptive_oracle(s, MASS, qed.vp_spectral)
        im_worst = max(im_worst, abs(closed - expected) / abs(expected), abs(oracle - expected) / abs(expected))
    ok = worst < 1e-3 and im_worst < 1e-6
    return CheckResult("pi_cross_validation", ok, worst, 1e-3,
                       f"Im Pi vs -(pi/3)(p^2+2m^2)sqrt(1-4m^2/p^2), closed form and eps oracle: "
                       f"{im_worst:.2e} (tol 1e-6)")


def check_sigma_cross_validation(seed=8):
    fit = qed.fit_sigma_freedom(MASS)
    rng = np.random.default_rng(seed)
    pts = (qed.random_momenta(rng, 50, (0.1 * MASS**2, 0.9 * MASS**2))
           + qed.random_momenta(rng, 50, (1.5 * MASS**2, 50 * MASS**2)))
    worst = 0.0
    for p in pts:
        closed = qed.sigma_tilde(p, MASS)
        route = qed.sigma_from_splitting(p, MASS) + fit(p)
        worst = max(worst, _rel(route, closed))
    on_shell = 0.0
    for vec in (np.zeros(3), np.array([0.3, -0.4, 1.2]), np.array([2.0, 0.0, 0.5])):
        p = np.array([np.sqrt(MASS**2 + vec @ vec), *vec])
        expected = (2 * np.pi) ** -4 * 3 / 8 * (slash(p) - MASS * identity4)
        on_shell = max(on_shell, _rel(qed.sigma_tilde(p, MASS), expected))
    ok = worst < 1e-3 and on_shell < 1e-10
    return CheckResult("sigma_cross_validation", ok, worst, 1e-3, f"on-shell reduction {on_shell:.2e} (tol 1e-10)")


CUTOFFS = (8.0, 16.0, 32.0, 64.0)


def check_cutoff_scan():
    q1 = [scaling.contraction_cutoff_scan(1, L, 0.0) for L in CUTOFFS]
    cauchy = abs(q1[-1] - q1[-2])
    # fermion-loop pair: two contracted spinor kernels
    q2_small = scaling.contraction_cutoff_scan(2, 8.0, (0.0, 0.0))
    q2_large = scaling.contraction_cutoff_scan(2, 64.0, (0.0, 0.0))
    ratio = abs(q2_large) / abs(q2_small)
    ok = cauchy < 1e-6 and ratio > 10.0
    return CheckResult("cutoff_scan", ok, cauchy, 1e-6, f"q=2 growth F(64)/F(8) = {ratio:.1f} (need > 10)")


def check_scaling_estimator():
    results = []
    for d, omega in ((qed.c2_scalar(MASS), 2), (qed.k2_scalar(MASS), 1)):
        est = scaling.singular_order_estimate(d)
        results.append((d.name, est.omega, abs(est.omega - omega)))
    worst = max(r[2] for r in results)
    detail = ", ".join(f"{n} {w:.3f}" for n, w, _ in results)
    return CheckResult("scaling_estimator", worst <= 0.5, worst, 0.5, detail)


def check_omega_projector(seed=11, order=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    idempotent = True
    for _ in range(50):
        phi = TestFunction.random(rng, max_degree=4, n_terms=8)
        once = omega_subtract(phi, order)
        twice = omega_subtract(once, order)
        idempotent &= once.coefficients == twice.coefficients and once.base == twice.base
        for beta in multi_indices(order):
            worst = max(worst, abs(once.derivative_at_zero(beta)))
    ok = idempotent and worst < 1e-12
    return CheckResult("omega_projector", ok, worst, 1e-12, f"idempotent {idempotent}")


def check_frame_independence():
    f = qed.vacuum_polarization_f(MASS)
    g = qed.vacuum_polarization_g(MASS)
    v1, v2 = boosted_versor(0.0), boosted_versor(0.6, axis=2)
    momenta = [np.array(p, dtype=float) for p in
               ((3.0, 0.4, 0.0, 0.0), (-2.6, 0.3, 0.5, 0.0), (0.5, 1.5, 0.0, 0.0), (1.0, 0.2, 0.1, 0.0))]
    f_worst, g_best = 0.0, 0.0
    for p in momenta:
        a, b = ret_noncausal(f, v1, p), ret_noncausal(f, v2, p)
        f_worst = max(f_worst, abs(a - b) / max(abs(a), abs(b)))
        a, b = ret_noncausal(g, v1, p), ret_noncausal(g, v2, p)
        g_best = max(g_best, abs(a - b) / max(abs(a), abs(b)))
    ok = f_worst < 1e-4 and g_best > 1e-2
    return CheckResult("frame_independence", ok, f_worst, 1e-4, f"non-causal g differs by {g_best:.2e} (need > 1e-2)")


CHECKS = (
    ("1", check_singularity_degrees),
    ("2", check_s2_structure),
    ("3", check_partition_counts),
    ("4", check_causal_support),
    ("5", check_momentum_oracle),
    ("6", check_splitting_identity),
    ("7", check_pi_cross_validation),
    ("8", check_sigma_cross_validation),
    ("9", check_cutoff_scan),
    ("10", check_scaling_estimator),
    ("11", check_omega_projector),
    ("12", check_frame_independence),
)


def run_checks(selected=None):
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        for key, check in CHECKS:
            if selected and key not in selected and check.__name__[6:] not in selected:
                continue
            try:
                out.append(check())
            except Exception as exc:  # a crash is a failed check, not a crashed report
                out.append(CheckResult(check.__name__[6:], False, float("nan"), float("nan"),
                                       f"error: {type(exc).__name__}: {exc}"))
    return out


def report(results):
    return {
        "schema": REPORT_SCHEMA,
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }


def report_json(results, **kwargs):
    return json.dumps(report(results), **kwargs)
