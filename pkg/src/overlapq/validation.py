"""Analytic-vs-simulation comparison, reduction identities and the
shared/independent batch-size adjudication."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import (MONTE_CARLO, PairBatch, PairIndividual, TupleQuery,
                       default_grid, tail_curve)
from .distributions import (Deterministic, DeterministicBatch, ExplicitBatch, Exponential,
                            QueueModel)
from .errors import DomainError
from .numerics import Quadrature
from .simulation import estimate_tail, overlaps_from_trajectory, simulate_trajectory

MC_WIDENING = 3.0
# identities are checked to 1e-10, so numerical paths run two digits tighter
REDUCTION_QUADRATURE = Quadrature(atol=1e-12, rtol=1e-10)


@dataclass
class ValidationReport:
    query: dict
    model: dict
    max_abs_deviation: float
    per_point_pass: list
    verdict: str
    n: int
    delta: float
    seeds: dict
    semantics_compared: list
    t: list = field(default_factory=list)
    analytic: list = field(default_factory=list)
    empirical: list = field(default_factory=list)
    epsilon: float = 0.0
    analytic_method: str = ""

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def compare_curves(analytic, sim):
    """Check every analytic grid value against the DKW band of ``sim``.

    Gap Monte-Carlo curves get the band widened by three of their own
    standard errors, since both sides are then random.
    """
    t_a = np.asarray(analytic.t, dtype=float)
    t_s = np.asarray(sim.t, dtype=float)
    if t_a.shape != t_s.shape or not np.array_equal(t_a, t_s):
        raise DomainError("analytic and simulated curves use different grids")
    band = np.full(t_a.shape, sim.epsilon)
    if analytic.method == MONTE_CARLO:
        band = band + MC_WIDENING * np.asarray(analytic.error, dtype=float)
    dev = np.abs(np.asarray(analytic.values) - np.asarray(sim.values))
    ok = dev <= band
    semantics = analytic.meta.get("semantics")
    seeds = {"simulation": sim.seed}
    if analytic.method == MONTE_CARLO:
        seeds["analytic"] = analytic.meta.get("seed")
    return ValidationReport(
        query=analytic.query, model=analytic.model,
        max_abs_deviation=float(dev.max()) if dev.size else 0.0,
        per_point_pass=[bool(v) for v in ok], verdict="pass" if ok.all() else "fail",
        n=sim.n, delta=sim.delta, seeds=seeds,
        semantics_compared=[semantics] if semantics else [],
        t=t_a.tolist(), analytic=[float(v) for v in analytic.values],
        empirical=[float(v) for v in sim.values], epsilon=sim.epsilon,
        analytic_method=analytic.method)


# --------------------------------------------------------------------------
# reduction identities
# --------------------------------------------------------------------------


@dataclass
class ReductionResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    detail: str = ""


def _closeness(name, a, b, tol, detail=""):
    dev = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
    return ReductionResult(name, dev, tol, dev <= tol, detail)


def _sigma_check(name, mc_curve, exact, detail=""):
    """Max deviation measured in Monte-Carlo standard errors (must be <= 3)."""
    err = np.asarray(mc_curve.error)
    dev = np.abs(mc_curve.values - np.asarray(exact))
    # points with vanishing standard error must match to rounding
    scaled = np.where(err > 0, dev / np.where(err > 0, err, 1.0),
                      np.where(dev > 1e-12, np.inf, 0.0))
    worst = float(scaled.max())
    return ReductionResult(name, worst, MC_WIDENING, worst <= MC_WIDENING,
                           detail + " [in std errors]")


def reduction_suite(arrival_rate=1.0, service_rate=1.0, batch=None, lags=(1, 2, 3),
                    n_samples=10**5, seed=0, det_service=1.0, quad=REDUCTION_QUADRATURE):
    """Run the reduction identities for one family of parameters.

    ``batch`` is the non-degenerate batch law used for the tuple-to-pair
    reductions (default: sizes 1 and 3 with equal probability).
    """
    batch = batch or ExplicitBatch((0.5, 0.0, 0.5))
    lam, mu = float(arrival_rate), float(service_rate)
    single = QueueModel(Exponential(lam), DeterministicBatch(1), Exponential(mu))
    batched = QueueModel(Exponential(lam), batch, Exponential(mu))
    det = QueueModel(Exponential(lam), batch, Deterministic(det_service))
    results = []
    rho = lam / (lam + mu)

    for k in lags:
        q = PairIndividual(k)
        grid = default_grid(single, q)
        base = {m: tail_curve(single, q, grid, m, quad).values for m in ("closed", "quadrature")}
        for mode in ("first", "last"):
            for m in ("closed", "quadrature"):
                c = tail_curve(single, PairBatch(mode, k), grid, m, quad)
                results.append(_closeness(f"B=1 pair {mode} == individual (k={k}, {m})",
                                          c.values, base[m], 1e-10))
        results.append(_closeness(f"individual pair closed vs quadrature (k={k})",
                                  base["closed"], base["quadrature"], 1e-8))
        closed_mm = np.exp(-2 * mu * grid) * rho**k
        tup = tail_curve(single, TupleQuery((1, 1 + k)), grid, "closed")
        results.append(_closeness(f"M/M/inf tuple (n, n+{k}) closed form", tup.values,
                                  closed_mm, 1e-10))
        for mode in ("first", "last"):
            pair = tail_curve(batched, PairBatch(mode, k), grid, "closed")
            tq = tail_curve(batched, TupleQuery((1, 1 + k), mode), grid, "closed")
            results.append(_closeness(f"m=2 tuple {mode} == pair {mode} (k={k})",
                                      tq.values, pair.values, 1e-10))
            numeric = tail_curve(batched, PairBatch(mode, k), grid, "quadrature", quad)
            results.append(_closeness(f"M^B/M/inf pair {mode} closed vs quadrature (k={k})",
                                      pair.values, numeric.values, 1e-8))
            dgrid = np.linspace(0.0, det_service * 1.2, 61)
            dc = tail_curve(det, PairBatch(mode, k), dgrid, "closed")
            dq = tail_curve(det, PairBatch(mode, k), dgrid, "quadrature", quad)
            results.append(_closeness(f"GI^B/D/inf pair {mode} closed vs quadrature (k={k})",
                                      dc.values, dq.values, 1e-8))
        tq = tail_curve(batched, TupleQuery((1, 1 + k)), grid, "closed")
        pi = tail_curve(batched, PairIndividual(k), grid, "closed")
        results.append(_closeness(f"m=2 tuple individual == pair individual (k={k})",
                                  tq.values, pi.values, 1e-10))

    q3 = TupleQuery((1, 2, 3))
    grid = default_grid(single, q3)
    exact = tail_curve(single, q3, grid, "closed")
    for mode in ("first", "last"):
        c = tail_curve(single, TupleQuery((1, 2, 3), mode), grid, "closed")
        results.append(_closeness(f"B=1 tuple {mode} == individual (closed)", c.values,
                                  exact.values, 1e-10))
        mc = tail_curve(single, TupleQuery((1, 2, 3), mode), grid, "mc",
                        n_samples=n_samples, seed=seed)
        results.append(_sigma_check(f"B=1 tuple {mode} (gap-MC) == individual", mc, exact.values))
    mc = tail_curve(single, q3, grid, "mc", n_samples=n_samples, seed=seed)
    results.append(_sigma_check("M/M/inf tuple (1,2,3) closed vs gap-MC", mc, exact.values))

    span2 = TupleQuery((1, 3))
    grid2 = default_grid(single, span2)
    mc13 = tail_curve(single, span2, grid2, "mc", n_samples=n_samples, seed=seed)
    results.append(_sigma_check("tuple (1,3) gap-MC == pair k=2", mc13,
                                tail_curve(single, PairIndividual(2), grid2, "closed").values))

    sweep = [float(tail_curve(single, PairIndividual(k), [0.0], "closed").values[0])
             for k in lags]
    results.append(_closeness("lag decay at t=0", sweep, [rho**k for k in lags], 1e-12,
                              "values " + ", ".join(f"{v:.6g}" for v in sweep)))
    return results


# --------------------------------------------------------------------------
# semantics adjudication
# --------------------------------------------------------------------------


@dataclass
class AdjudicationReport:
    query: dict
    model: dict
    independent: ValidationReport
    shared: ValidationReport
    semantics_deviation: float
    supported: str
    decisive: bool
    n_comparisons: int = 2

    def to_dict(self):
        return asdict(self)


def semantics_adjudication(model, query, n_anchors=10**6, seed=0, delta=0.01, grid=None):
    """Compare independent and shared batch-size tuple formulas with a
    trajectory simulation and report which one the simulation supports."""
    if not isinstance(query, TupleQuery) or query.mode == "individual":
        raise DomainError("adjudication needs a first/last tuple query")
    if grid is None:
        grid = default_grid(model, query)
    grid = np.asarray(grid, dtype=float)
    curves = {sem: tail_curve(model, TupleQuery(query.indices, query.mode, sem), grid,
                              seed=seed)
              for sem in ("independent", "shared")}
    log = simulate_trajectory(model, int(n_anchors) * (query.span + 1), seed)
    samples = overlaps_from_trajectory(log, query)
    sim = estimate_tail(samples, grid, delta, seed)
    reports = {sem: compare_curves(c, sim) for sem, c in curves.items()}
    gap = float(np.max(np.abs(curves["independent"].values - curves["shared"].values)))
    passing = [sem for sem, r in reports.items() if r.passed]
    supported = {0: "neither", 2: "both"}.get(len(passing), passing[0] if passing else "neither")
    return AdjudicationReport(query.to_dict(), model.to_dict(), reports["independent"],
                              reports["shared"], gap, supported, len(passing) == 1)


def report_lines(results):
    """One ``PASS``/``FAIL`` line per reduction result."""
    return [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: deviation {r.deviation:.3g} "
            f"(tol {r.tolerance:g}){' ' + r.detail if r.detail else ''}" for r in results]

