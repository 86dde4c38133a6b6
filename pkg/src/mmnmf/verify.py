"""Self-check battery for the costs, updates and auxiliary functions.

:func:`run_verify_suite` draws seeded random instances and measures, for each
named property, the worst violation observed. Failures are recorded in the
report, never raised.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import auxiliary as aux
from . import costs, probes, updates
from .costs import CostKind
from .solver import cost_scale

FD_STEP = 1e-6
HESS_STEP = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    covers: str
    detail: str = ""


@dataclass
class VerifyReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {"seed": self.seed, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


# Instance generation ---------------------------------------------------------


def random_instance(rng, max_nm=8, max_r=3, low=0.1, high=2.0):
    n = int(rng.integers(2, max_nm + 1))
    m = int(rng.integers(2, max_nm + 1))
    r = int(rng.integers(1, max_r + 1))
    v = rng.uniform(low, high, size=(n, m))
    w = rng.uniform(low, high, size=(n, r))
    h = rng.uniform(low, high, size=(r, m))
    return v, w, h


def random_context(rng, max_n=6, max_r=6, low=0.1, high=2.0):
    n = int(rng.integers(1, max_n + 1))
    r = int(rng.integers(1, max_r + 1))
    return aux.AuxContext(
        v=rng.uniform(low, high, size=n),
        w=rng.uniform(low, high, size=(n, r)),
        ht=rng.uniform(low, high, size=r),
    )


# Numerical oracles -----------------------------------------------------------


def fd_gradient(f, x, step=FD_STEP):
    """Central differences with step ``step * (1 + |x|)`` per entry."""
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        d = step * (1.0 + abs(x[idx]))
        xp, xm = x.copy(), x.copy()
        xp[idx] += d
        xm[idx] -= d
        g[idx] = (f(xp) - f(xm)) / (2 * d)
    return g


def fd_hessian(f, x, step=HESS_STEP):
    x = np.array(x, dtype=float)
    k = x.size
    out = np.zeros((k, k))
    for p in range(k):
        for q in range(k):
            def at(sp, sq):
                y = x.copy()
                y[p] += sp * step
                y[q] += sq * step
                return f(y)

            out[p, q] = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * step * step)
    return out


def relative_error(analytic, approx, floor=1e-8):
    analytic = np.asarray(analytic, dtype=float)
    approx = np.asarray(approx, dtype=float)
    return float(np.max(np.abs(analytic - approx) / np.maximum(np.abs(analytic), floor)))


def _max_rel_diff(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b) / scale))


# Individual checks -----------------------------------------------------------


def _result(name, err, tol, covers, detail="", strict=False):
    ok = (err < tol) if strict else (err <= tol)
    return CheckResult(name, bool(ok and math.isfinite(err)), float(err), float(tol), covers, detail)


def check_gradient(rng, kind, trials=30, tol=1e-5):
    grad = {CostKind.EUCLIDEAN: costs.grad_h_euclidean, CostKind.GKL: costs.grad_h_gkl}[kind]
    worst = 0.0
    for _ in range(trials):
        v, w, h = random_instance(rng)
        fd = fd_gradient(lambda x: costs.cost(kind, v, w, x), h)
        worst = max(worst, relative_error(grad(v, w, h), fd))
    return _result(f"gradient_{kind.value}", worst, tol, "gradients of the objectives in H")


def check_hessian(rng, trials=10, tol=1e-4):
    worst = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        fd = fd_hessian(lambda x: aux.f_euclidean(ctx, x), ctx.ht)
        worst = max(worst, float(np.max(np.abs(costs.hessian_h_euclidean(ctx.w) - fd))))
    return _result("hessian_euclidean", worst, tol, "Hessian of the column cost equals W^T W")


def check_aux_conditions(rng, kind, trials=300, tol_eq=1e-10, tol_major=1e-12):
    worst_eq = 0.0
    worst_major = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        h = rng.uniform(0.1, 2.0, size=ctx.rank)
        f_h = aux.f_value(ctx, h, kind)
        worst_eq = max(worst_eq, abs(aux.g_value(ctx.with_anchor(h), h, kind) - f_h))
        worst_major = max(worst_major, f_h - aux.g_value(ctx, h, kind))
    err = max(worst_eq / tol_eq, worst_major / tol_major, 0.0)
    detail = f"max |G(h,h)-F(h)| = {worst_eq:.3g}; max F(h)-G(h,ht) = {worst_major:.3g}"
    return _result(f"auxiliary_{kind.value}", err, 1.0, "auxiliary-function conditions G(h,h)=F(h), G>=F", detail)


def check_psd_gap(rng, trials=200, tol=1e-10):
    worst = 0.0
    most_negative = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        nu = rng.normal(size=ctx.rank)
        direct, paired = aux.psd_gap(ctx, nu)
        worst = max(worst, abs(direct - paired) / max(1.0, abs(paired)))
        most_negative = min(most_negative, direct, paired)
    err = worst if most_negative >= -1e-12 else math.inf
    return _result("psd_gap_dual_formula", err, tol, "nu^T M nu as quadratic form and as paired-difference sum",
                   f"most negative value {most_negative:.3g}")


def check_k_dominance(rng, trials=200):
    worst = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        excess = np.diag(aux.k_matrix(ctx)) - np.diag(ctx.w.T @ ctx.w)
        worst = max(worst, float(-excess.min()))
    return _result("k_dominance", max(worst, 0.0), 1e-12, "K(ht)_aa >= (W^T W)_aa")


def check_mm_chain(rng, kind, trials=100, slack=1e-12):
    worst = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        h_next = aux.mm_step(ctx, kind)
        chain = aux.mm_chain(ctx, h_next, kind)
        scale = 1.0 + abs(chain[-1])
        worst = max(worst, max((lo - hi) / scale for lo, hi in zip(chain, chain[1:])))
    return _result(f"mm_chain_{kind.value}", max(worst, 0.0), slack, "F(h1) <= G(h1,h0) <= G(h0,h0) <= F(h0)")


def check_argmin_equivalence(rng, kind, trials=100, tol=1e-12):
    argmin = aux._ARGMIN[kind]
    worst = 0.0
    for _ in range(trials):
        ctx = random_context(rng)
        h_mm = argmin(ctx)
        h_mu = updates.UPDATE_H[kind](ctx.v[:, None], ctx.w, ctx.ht[:, None])[:, 0]
        worst = max(worst, _max_rel_diff(h_mm, h_mu))
    return _result(f"argmin_equivalence_{kind.value}", worst, tol, "closed-form MM minimizer equals the multiplicative rule")


def check_adaptive_rate(rng, trials=50, tol=1e-12):
    worst = 0.0
    for _ in range(trials):
        v, w, h = random_instance(rng)
        pairs = (
            (updates.eta_euclidean(w, h), costs.grad_h_euclidean(v, w, h), updates.update_h_euclidean(v, w, h)),
            (updates.eta_gkl(w, h), costs.grad_h_gkl(v, w, h), updates.update_h_gkl(v, w, h)),
        )
        for eta, grad, mu in pairs:
            worst = max(worst, _max_rel_diff(updates.additive_step(h, eta, grad), mu))
    return _result("adaptive_rate_equivalence", worst, tol, "h - eta * grad reproduces both multiplicative rules")


def check_monotonicity(rng, kind, trials=20, iters=50, slack=1e-12):
    worst = 0.0
    for _ in range(trials):
        v, w, h = random_instance(rng, max_nm=12, max_r=4, low=1e-3, high=1.0)
        floor = cost_scale(kind, v)
        prev = costs.cost(kind, v, w, h)
        for _ in range(iters):
            for half in ("h", "w"):
                if half == "h":
                    h = updates.UPDATE_H[kind](v, w, h)
                else:
                    w = updates.UPDATE_W[kind](v, w, h)
                cur = costs.cost(kind, v, w, h)
                worst = max(worst, (cur - prev) / max(prev, floor))
                prev = cur
    return _result(f"monotonicity_{kind.value}", max(worst, 0.0), slack, "cost non-increasing at every half-step")


def check_fixed_point(rng, trials=10, tol_update=1e-12, tol_grad=1e-9):
    worst_upd = 0.0
    worst_grad = 0.0
    for _ in range(trials):
        _, w, h = random_instance(rng)
        v = w @ h
        for kind, grad in ((CostKind.EUCLIDEAN, costs.grad_h_euclidean), (CostKind.GKL, costs.grad_h_gkl)):
            worst_upd = max(worst_upd, _max_rel_diff(updates.UPDATE_H[kind](v, w, h), h))
            worst_upd = max(worst_upd, _max_rel_diff(updates.UPDATE_W[kind](v, w, h), w))
            worst_grad = max(worst_grad, float(np.max(np.abs(grad(v, w, h)))))
    err = max(worst_upd / tol_update, worst_grad / tol_grad)
    return _result("fixed_point_stationarity", err, 1.0, "V = WH is a fixed point of every update, with zero gradient",
                   f"max update change {worst_upd:.3g}, max |grad| {worst_grad:.3g}")


def check_transposition(rng, trials=30, tol=1e-12):
    worst = 0.0
    for _ in range(trials):
        v, w, h = random_instance(rng)
        worst = max(worst, _max_rel_diff(updates.update_w_euclidean(v, w, h), updates.update_w_euclidean_direct(v, w, h)))
        worst = max(worst, _max_rel_diff(updates.update_w_gkl(v, w, h), updates.update_w_gkl_direct(v, w, h)))
    return _result("transposition_duality", worst, tol, "W rules via (V^T, H^T, W^T) equal the direct W formulas")


def check_counterexamples(vs=(0.5, 1.0, 2.0, 4.0), rs=(1, 3, 7), tol=1e-12):
    worst_e = 0.0
    worst_k = 0.0
    for v in vs:
        eu = -v * v / 16
        kl = v * (math.log(4.0) - math.log(3.0) - 1.0)
        reps_e = [probes.euclid_scalar_counterexample(v)] + [probes.euclid_vector_counterexample(v, r) for r in rs]
        reps_k = [probes.kl_scalar_counterexample(v)] + [probes.kl_vector_counterexample(v, r) for r in rs]
        worst_e = max([worst_e] + [abs(rep.gap - eu) / abs(eu) for rep in reps_e])
        worst_k = max([worst_k] + [abs(rep.gap - kl) / abs(kl) for rep in reps_k])
    return [
        _result("counterexample_euclidean", worst_e, tol, "non-convexity gap -v^2/16 for scalar and vector probes"),
        _result("counterexample_gkl", worst_k, tol, "non-convexity gap v log(4/(3e)) for scalar and vector probes"),
    ]


def check_matrix_witness(tol=1e-8):
    worst = 0.0
    for kind, exact in ((CostKind.EUCLIDEAN, lambda v: -v * v / 16), (CostKind.GKL, lambda v: v * math.log(4 / (3 * math.e)))):
        for n, m, r in ((1, 1, 1), (3, 2, 2), (5, 4, 3)):
            for v in (0.5, 1.0, 2.0, 4.0):
                rep = probes.matrix_nonconvexity_witness(kind, n, m, r, v)
                worst = max(worst, abs(rep.gap - exact(v)))
    return _result("matrix_witness", worst, tol, "vector counterexamples embedded into full (W, H) instances")


def check_landscape(steps=1000, h_min=0.01, h_max=10.0):
    problems = []
    for v, w in ((1.0, 1.0), (1.0, 2.0), (2.0, 0.5)):
        sample = probes.landscape_sample(v, w, probes.linear_grid(h_min, h_max, steps))
        if not np.all(np.diff(sample.kld_values) < 0):
            problems.append(f"kld not strictly decreasing (v={v}, w={w})")
        if np.any(sample.gkld_values < 0):
            problems.append(f"gkld negative (v={v}, w={w})")
        nearest = int(np.argmin(np.abs(sample.h_grid - sample.h_star)))
        if int(np.argmin(sample.gkld_values)) != nearest:
            problems.append(f"gkld minimum not at h* (v={v}, w={w})")
        deriv = np.array([probes.gkl_scalar_derivative(v, [w], [x], 0) for x in sample.h_grid])
        signs = np.sign(deriv[deriv != 0])
        if np.count_nonzero(np.diff(signs)) != 1:
            problems.append(f"derivative sign changes != 1 (v={v}, w={w})")
    return CheckResult("landscape_sign_pattern", not problems, float(len(problems)), 0.0,
                       "KLD strictly decreasing, GKLD convex with unique minimum at v/w", "; ".join(problems))


def run_verify_suite(seed=0, report_path=None):
    """Run every check and optionally write the JSON report to ``report_path``."""
    rng = np.random.default_rng(seed)
    report = VerifyReport(seed=int(seed))
    add = report.checks.append
    add(check_gradient(rng, CostKind.EUCLIDEAN))
    add(check_gradient(rng, CostKind.GKL))
    add(check_hessian(rng))
    add(check_aux_conditions(rng, CostKind.EUCLIDEAN))
    add(check_aux_conditions(rng, CostKind.GKL))
    add(check_psd_gap(rng))
    add(check_k_dominance(rng))
    add(check_mm_chain(rng, CostKind.EUCLIDEAN))
    add(check_mm_chain(rng, CostKind.GKL))
    add(check_argmin_equivalence(rng, CostKind.EUCLIDEAN))
    add(check_argmin_equivalence(rng, CostKind.GKL))
    add(check_adaptive_rate(rng))
    add(check_monotonicity(rng, CostKind.EUCLIDEAN))
    add(check_monotonicity(rng, CostKind.GKL))
    add(check_fixed_point(rng))
    add(check_transposition(rng))
    report.checks.extend(check_counterexamples())
    add(check_matrix_witness())
    add(check_landscape())
    if report_path is not None:
        report.write_json(report_path)
    return report
