"""Tail distributions and means of overlap times in the GI^B/GI/inf queue.

Every tail operation assembles the evaluation routes that exist for the
given (model, query) pair and picks one:

* ``closed``      - exact expressions (exponential or deterministic service
  combined with closed-form Laplace transforms / k-fold cdfs of the
  inter-arrival law);
* ``quadrature``  - one-dimensional integrals against the density ``h_k`` of
  a k-fold inter-arrival sum, or exponential-service formulas that need a
  numerically evaluated Laplace transform;
* ``mc``          - gap Monte-Carlo: sample the independent block gaps between
  the queried batches once, then average the conditional tail product.

``method="auto"`` takes the first route available in that order.

Tuple overlaps use the sign convention ``t + (A_{n_m} - A_{n_i})`` for every
member ``i``, which is what conditioning on the arrival gaps gives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import comb

from . import rng as rngmod
from .distributions import BlockSum, Deterministic, Exponential
from .errors import DomainError, ModelSpecError, UnsupportedCombination
from .numerics import DEFAULT_QUADRATURE, integrate_semiinfinite

CLOSED = "closed-form"
QUADRATURE = "quadrature"
MONTE_CARLO = "gap-monte-carlo"
METHODS = ("auto", "closed", "quadrature", "mc")

DEFAULT_SAMPLES = 10**6
DEFAULT_STEPS = 101
TAIL_FLOOR = 1e-6
# binomial expansions of 1 - E[G^B] cancel catastrophically for large batches
MAX_BINOMIAL_SUPPORT = 20
MAX_SUBSET_MEMBERS = 12


# --------------------------------------------------------------------------
# queries
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PairIndividual:
    """Customer in batch ``n`` against a customer in batch ``n + lag``."""

    lag: int
    same_customer: bool = False

    def __post_init__(self):
        _check_int(self.lag, "lag", 0)
        if self.same_customer and self.lag != 0:
            raise DomainError("same_customer is only meaningful for lag 0")

    def to_dict(self):
        return {"type": "pair_individual", "lag": self.lag, "same_customer": self.same_customer}


@dataclass(frozen=True)
class PairBatch:
    """Batch ``n`` against batch ``n + lag`` under first/last-to-leave."""

    mode: str
    lag: int

    def __post_init__(self):
        if self.mode not in ("first", "last"):
            raise DomainError("batch pair mode must be 'first' or 'last'")
        if int(self.lag) != self.lag or self.lag < 1:
            raise DomainError("batch-pair lag must be >= 1")

    def to_dict(self):
        return {"type": "pair_batch", "lag": self.lag, "mode": self.mode}


@dataclass(frozen=True)
class TupleQuery:
    """Batches ``n_1 < ... < n_m`` overlapping simultaneously.

    ``semantics`` only matters for the batch modes: ``independent`` draws a
    separate size per batch (the queue model), ``shared`` uses one size for
    every batch in the tuple.
    """

    indices: tuple
    mode: str = "individual"
    semantics: str = "independent"

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) < 2:
            raise DomainError("a tuple query needs at least two indices")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError("tuple indices must be strictly increasing")
        if self.mode not in ("individual", "first", "last"):
            raise DomainError("tuple mode must be 'individual', 'first' or 'last'")
        if self.semantics not in ("independent", "shared"):
            raise DomainError("batch semantics must be 'independent' or 'shared'")
        object.__setattr__(self, "indices", idx)

    @property
    def gaps(self):
        """Numbers of inter-arrival times between consecutive members."""
        return tuple(b - a for a, b in zip(self.indices, self.indices[1:]))

    @property
    def span(self):
        return self.indices[-1] - self.indices[0]

    def to_dict(self):
        return {"type": "tuple", "indices": list(self.indices), "mode": self.mode,
                "batch_semantics": self.semantics}


def _check_int(value, name, minimum):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}")


def query_from_dict(data):
    """Parse the query JSON schema; errors name the offending field."""
    if not isinstance(data, dict):
        raise ModelSpecError("query", "expected a JSON object")
    known = {"type", "lag", "same_customer", "mode", "indices", "batch_semantics"}
    extra = set(data) - known
    if extra:
        raise ModelSpecError(sorted(extra)[0], "unknown key")
    kind = data.get("type")

    def need(key, types):
        if key not in data:
            raise ModelSpecError(key, "missing")
        value = data[key]
        if not isinstance(value, types) or isinstance(value, bool) and bool not in types:
            raise ModelSpecError(key, "wrong type")
        return value

    try:
        if kind == "pair_individual":
            same = data.get("same_customer", False)
            if not isinstance(same, bool):
                raise ModelSpecError("same_customer", "expected a boolean")
            return PairIndividual(need("lag", (int,)), same)
        if kind == "pair_batch":
            mode = need("mode", (str,))
            if mode not in ("first", "last"):
                raise ModelSpecError("mode", "expected 'first' or 'last'")
            lag = need("lag", (int,))
            if lag < 1:
                raise ModelSpecError("lag", "batch-pair lag must be >= 1")
            return PairBatch(mode, lag)
        if kind == "tuple":
            indices = need("indices", (list,))
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in indices):
                raise ModelSpecError("indices", "expected a list of integers")
            mode = data.get("mode", "individual")
            if mode not in ("individual", "first", "last"):
                raise ModelSpecError("mode", "expected 'individual', 'first' or 'last'")
            sem = data.get("batch_semantics", "independent")
            if sem not in ("independent", "shared"):
                raise ModelSpecError("batch_semantics", "expected 'independent' or 'shared'")
            return TupleQuery(tuple(indices), mode, sem)
    except DomainError as exc:
        field_name = "indices" if kind == "tuple" else "lag"
        raise ModelSpecError(field_name, str(exc)) from None
    raise ModelSpecError("type", f"unknown query type {kind!r}")


# --------------------------------------------------------------------------
# results
# --------------------------------------------------------------------------


@dataclass
class TailCurve:
    """``P(O > t)`` on a grid.

    ``error`` is the quadrature tolerance for quadrature curves, the
    per-point Monte-Carlo standard error for gap-MC curves and 0 for closed
    forms.
    """

    t: np.ndarray
    values: np.ndarray
    method: str
    model: dict
    query: dict
    error: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"t": self.t.tolist(), "values": self.values.tolist(), "method": self.method,
                "model": self.model, "query": self.query, "error": self.error.tolist(),
                "meta": self.meta}


@dataclass
class MeanResult:
    value: float
    method: str
    error: float
    closed_form: float | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class _Route:
    tag: str
    fn: Callable
    err: Callable
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Settings:
    quad: object = DEFAULT_QUADRATURE
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0


def _pointwise(scalar_fn):
    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.array([scalar_fn(float(v)) for v in t.ravel()]).reshape(t.shape)
    return fn


def _const(value):
    return lambda t: np.full(np.shape(t), float(value))


def _shifted_atoms(dist, t):
    return [a - t for a in dist.atoms if a - t > 0]


# --------------------------------------------------------------------------
# shared building blocks
# --------------------------------------------------------------------------


def _exp_rate(dist):
    return dist.rate if isinstance(dist, Exponential) else None


def _laplace_tag(dist):
    return CLOSED if dist.laplace_closed else QUADRATURE


def _det_service_route(model, span):
    """Deterministic service: every member leaves at ``A + Delta``, so all
    tuple/pair overlaps reduce to ``P(A_span < Delta - t) 1{t < Delta}``."""
    service = model.service
    if not isinstance(service, Deterministic):
        return None
    block = BlockSum(model.interarrival, span)
    if not block.exact:
        return None
    delta = service.value

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < delta, block.prob_below(delta - t), 0.0)

    return lambda: _Route(CLOSED, fn, _const(0.0), {"closed_form": "deterministic-service"})


def _gap_samples(model, gaps, settings, salt):
    """``N x len(gaps)`` independent block sums of inter-arrival times."""
    blocks = [BlockSum(model.interarrival, g) for g in gaps]

    def draw(rng, size):
        return np.column_stack([b.sample(rng, size) for b in blocks])

    return rngmod.map_chunks(draw, settings.n_samples, settings.seed, salt)


def _member_gaps(block_gaps):
    """``A_{n_m} - A_{n_i}`` for every member from the block gaps (last is 0)."""
    n = block_gaps.shape[0]
    rev = np.cumsum(block_gaps[:, ::-1], axis=1)[:, ::-1]
    return np.column_stack([rev, np.zeros(n)])


def _mc_route(model, gaps, settings, factor, salt, meta=None):
    """Gap Monte-Carlo: mean over sampled gaps of ``factor(t, member_gaps)``."""
    member = _member_gaps(_gap_samples(model, gaps, settings, salt))
    n = member.shape[0]
    cache = {}

    def stats(v):
        if v not in cache:
            x = factor(v, member)
            cache[v] = (float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0)
        return cache[v]

    info = {"samples": n, "seed": settings.seed, **(meta or {})}
    return _Route(MONTE_CARLO, _pointwise(lambda v: stats(v)[0]),
                  _pointwise(lambda v: stats(v)[1]), info)


def _select(routes, method, what):
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    order = ("closed", "quadrature", "mc") if method == "auto" else (method,)
    for name in order:
        build = routes.get(name)
        if build is not None:
            return build()
    raise UnsupportedCombination(f"no {method} evaluation available for {what}")


def _quad_meta(settings):
    return {"atol": settings.quad.atol, "rtol": settings.quad.rtol}


# --------------------------------------------------------------------------
# route tables
# --------------------------------------------------------------------------


def _pair_individual_routes(model, q, settings):
    service = model.service
    if q.lag == 0:
        if q.same_customer:
            route = lambda: _Route(CLOSED, service.tail, _const(0.0), {"case": "self"})
        else:
            route = lambda: _Route(CLOSED, lambda t: service.tail(t) ** 2, _const(0.0),
                                   {"case": "same-batch"})
        return {"closed": route, "quadrature": route, "mc": route}

    k = q.lag
    block = BlockSum(model.interarrival, k)
    routes = {}
    mu = _exp_rate(service)
    if mu is not None:
        lap = model.interarrival.laplace(mu) ** k

        def fn(t, lap=lap):
            return service.tail(t) * np.exp(-mu * np.asarray(t, dtype=float)) * lap

        laplace_route = lambda: _Route(_laplace_tag(model.interarrival), fn,
                                       _const(0.0), {"closed_form": "exponential-service"})
        if model.interarrival.laplace_closed:
            routes["closed"] = laplace_route
    det = _det_service_route(model, k)
    if det is not None:
        routes["closed"] = det

    def quad_fn(t):
        inner = block.expect(lambda x: service.tail(t + x), settings.quad,
                             _shifted_atoms(service, t))
        return float(service.tail(t)) * inner

    routes["quadrature"] = lambda: _Route(QUADRATURE, _pointwise(quad_fn),
                                          _const(settings.quad.atol), _quad_meta(settings))
    routes["mc"] = lambda: _mc_route(
        model, (k,), settings,
        lambda t, g: service.tail(t) * service.tail(t + g[:, 0]), salt=1)
    return routes


def _binomial_last_factor(batch, mu, lap, k, t):
    """``E[G(t + A_k)^B]`` for exponential service by binomial expansion."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for j, p in zip(batch.support, batch.probs):
        m = np.arange(j + 1)
        coef = comb(j, m) * (-1.0) ** m * np.array([lap(mu * mm) ** k for mm in m])
        total = total + p * (np.exp(-mu * np.multiply.outer(t, m)) @ coef)
    return total


def _pair_batch_routes(model, q, settings):
    service, batch = model.service, model.batch
    k = q.lag
    block = BlockSum(model.interarrival, k)
    routes = {}
    mu = _exp_rate(service)
    lap = model.interarrival.laplace
    if mu is not None and model.interarrival.laplace_closed:
        if q.mode == "first":
            def fn(t):
                t = np.asarray(t, dtype=float)
                e = np.exp(-mu * np.multiply.outer(t, batch.support))
                gap = np.array([lap(mu * j) ** k for j in batch.support])
                return (e @ (batch.probs * gap)) * (e @ batch.probs)
            routes["closed"] = lambda: _Route(CLOSED, fn, _const(0.0),
                                              {"closed_form": "exponential-service"})
        elif batch.max_size <= MAX_BINOMIAL_SUPPORT:
            def fn(t):
                first = 1.0 - _binomial_last_factor(batch, mu, lap, k, t)
                return np.clip(first, 0.0, 1.0) * (1.0 - batch.pgf(service.cdf(t)))
            routes["closed"] = lambda: _Route(CLOSED, fn, _const(0.0),
                                              {"closed_form": "exponential-service-binomial"})
    det = _det_service_route(model, k)
    if det is not None:
        routes["closed"] = det

    if q.mode == "first":
        def quad_fn(t):
            inner = block.expect(lambda x: batch.pgf(service.tail(t + x)), settings.quad,
                                 _shifted_atoms(service, t))
            return inner * batch.pgf(service.tail(t))

        def factor(t, g):
            return batch.pgf(service.tail(t + g[:, 0])) * batch.pgf(service.tail(t))
    else:
        def quad_fn(t):
            inner = block.expect(lambda x: batch.pgf(service.cdf(t + x)), settings.quad,
                                 _shifted_atoms(service, t))
            return (1.0 - inner) * (1.0 - batch.pgf(service.cdf(t)))

        def factor(t, g):
            return (1.0 - batch.pgf(service.cdf(t + g[:, 0]))) * (1.0 - batch.pgf(service.cdf(t)))

    routes["quadrature"] = lambda: _Route(QUADRATURE, _pointwise(quad_fn),
                                          _const(settings.quad.atol), _quad_meta(settings))
    routes["mc"] = lambda: _mc_route(model, (k,), settings, factor, salt=2)
    return routes


def _cumulative_size_weights(batch, gaps, lap_fn):
    """Weights ``w_S`` with ``P(O > t) = sum_S w_S exp(-mu t S)``.

    Used for first-to-leave tuples with exponential service and independent
    batch sizes. ``S`` runs over cumulative sizes ``j_1 + ... + j_i``; block
    gap ``l`` is discounted by ``L(mu S_l) ** gaps[l]``, where ``S_l`` is the
    size accumulated over the members that arrived before it.
    """
    pmf = np.zeros(batch.max_size + 1)
    pmf[batch.support] = batch.probs
    w = pmf.copy()
    for d in gaps:
        s = np.arange(w.size)
        disc = np.array([lap_fn(float(v)) ** d if w[v] != 0 else 0.0 for v in s])
        w = np.convolve(w * disc, pmf)
    return w


def _signed_last_weights(batch):
    """Coefficients ``c_r`` with ``1 - E[(1 - x)^B] = sum_r c_r x^r``."""
    c = np.zeros(batch.max_size + 1)
    for j, p in zip(batch.support, batch.probs):
        r = np.arange(1, j + 1)
        c[r] += p * comb(j, r) * (-1.0) ** (r + 1)
    return c


def _tuple_routes(model, q, settings):
    service, batch = model.service, model.batch
    m = len(q.indices)
    gaps = q.gaps
    mu = _exp_rate(service)
    lap = model.interarrival.laplace
    tag = _laplace_tag(model.interarrival)
    routes = {}

    def add_exact(build):
        # exponential-service formulas: exact when L is closed form,
        # otherwise they rely on a numerically integrated Laplace transform
        if tag == CLOSED:
            routes["closed"] = build
        routes["quadrature"] = build

    mode = q.mode
    semantics = "independent" if mode == "individual" else q.semantics
    meta = {"semantics": semantics, "sign": "t + (A_nm - A_ni)"}

    if mu is not None:
        if mode == "individual":
            const = float(np.prod([lap(mu * (l + 1)) ** d for l, d in enumerate(gaps)]))
            fn = lambda t: np.exp(-mu * m * np.asarray(t, dtype=float)) * const
            add_exact(lambda: _Route(tag, fn, _const(0.0), dict(meta)))
        elif mode == "first" and semantics == "independent":
            w = _cumulative_size_weights(batch, gaps, lambda s: lap(mu * s))
            s_idx = np.arange(w.size)
            fn = lambda t: np.exp(-mu * np.multiply.outer(np.asarray(t, dtype=float), s_idx)) @ w
            add_exact(lambda: _Route(tag, fn, _const(0.0), dict(meta)))
        elif mode == "first":
            js = batch.support
            coef = np.array([p * np.prod([lap(mu * j * (l + 1)) ** d for l, d in enumerate(gaps)])
                             for j, p in zip(js, batch.probs)])
            fn = lambda t: np.exp(-mu * m * np.multiply.outer(np.asarray(t, dtype=float), js)) @ coef
            add_exact(lambda: _Route(tag, fn, _const(0.0), dict(meta)))
        elif semantics == "independent":
            if batch.max_size <= MAX_BINOMIAL_SUPPORT:
                c = _signed_last_weights(batch)
                w = _cumulative_size_weights_signed(c, gaps, lambda s: lap(mu * s))
                s_idx = np.arange(w.size)

                def fn(t):
                    e = np.exp(-mu * np.multiply.outer(np.asarray(t, dtype=float), s_idx))
                    return np.clip(e @ w, 0.0, 1.0)
                add_exact(lambda: _Route(tag, fn, _const(0.0), dict(meta)))
        elif m <= MAX_SUBSET_MEMBERS:
            fn = _shared_last_literal(batch, mu, lap, gaps, m)
            add_exact(lambda: _Route(tag, fn, _const(0.0), dict(meta)))

    if mode == "last" and semantics == "shared":
        if mu is None:
            raise UnsupportedCombination(
                "shared batch semantics in last-to-leave mode need exponential service")
    else:
        det = _det_service_route(model, q.span)
        if det is not None:
            routes["closed"] = det

    if m == 2 and "quadrature" not in routes and semantics == "independent":
        pair = PairIndividual(gaps[0]) if mode == "individual" else PairBatch(mode, gaps[0])
        sub = (_pair_individual_routes if mode == "individual" else _pair_batch_routes)(
            model, pair, settings)
        routes["quadrature"] = sub["quadrature"]

    if mode == "individual":
        factor = lambda t, g: np.prod(service.tail(t + g), axis=1)
    elif mode == "first" and semantics == "independent":
        factor = lambda t, g: np.prod(batch.pgf(service.tail(t + g)), axis=1)
    elif mode == "first":
        factor = lambda t, g: batch.pgf(np.prod(service.tail(t + g), axis=1))
    elif semantics == "independent":
        factor = lambda t, g: np.prod(1.0 - batch.pgf(service.cdf(t + g)), axis=1)
    else:
        def factor(t, g):
            acc = np.zeros(g.shape[0])
            for j, p in zip(batch.support, batch.probs):
                acc += p * np.prod(-np.expm1(-mu * j * (t + g)), axis=1)
            return 1.0 - acc
    routes["mc"] = lambda: _mc_route(model, gaps, settings, factor, salt=3, meta=dict(meta))
    return routes


def _cumulative_size_weights_signed(c, gaps, lap_fn):
    w = c.copy()
    for d in gaps:
        s = np.arange(w.size)
        disc = np.array([lap_fn(float(v)) ** d if w[v] != 0 else 0.0 for v in s])
        w = np.convolve(w * disc, c)
    return w


def _shared_last_literal(batch, mu, lap, gaps, m):
    """``1 - E[prod_i (1 - exp(-mu B (t + gap_i)))]`` with one shared ``B``.

    Expanded over subsets ``S`` of members; member ``i`` in ``S`` puts weight
    ``mu B`` on every block gap after it.
    """
    terms = []
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            counts = [sum(1 for i in subset if i <= l) for l in range(m - 1)]
            terms.append((size, counts))
    coef = {}
    for j, p in zip(batch.support, batch.probs):
        for size, counts in terms:
            lapprod = np.prod([lap(mu * j * c) ** d for c, d in zip(counts, gaps)])
            key = (int(j), size)
            coef[key] = coef.get(key, 0.0) + p * (-1.0) ** size * lapprod

    def fn(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for (j, size), cval in coef.items():
            acc = acc + cval * np.exp(-mu * j * size * t)
        return np.clip(1.0 - acc, 0.0, 1.0)

    return fn


def _routes(model, query, settings):
    if isinstance(query, PairIndividual):
        return _pair_individual_routes(model, query, settings)
    if isinstance(query, PairBatch):
        return _pair_batch_routes(model, query, settings)
    if isinstance(query, TupleQuery):
        return _tuple_routes(model, query, settings)
    raise DomainError(f"unsupported query {query!r}")


def available_methods(model, query):
    """Routes that exist for this pair, in ``auto`` preference order."""
    routes = _routes(model, query, _Settings())
    return [name for name in ("closed", "quadrature", "mc") if routes.get(name)]


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------


def _tail_bound(model, query):
    service, batch = model.service, model.batch
    last = getattr(query, "mode", None) == "last"
    members = len(query.indices) if isinstance(query, TupleQuery) else 1
    if last:
        return lambda t: min(1.0, members * (1.0 - batch.pgf(service.cdf(t))))
    return lambda t: float(service.tail(t))


def default_t_max(model, query, floor=TAIL_FLOOR):
    """Smallest ``t`` at which an upper bound of the tail drops below ``floor``."""
    service = model.service
    if isinstance(service, Deterministic):
        return float(service.value)
    bound = _tail_bound(model, query)
    lo, hi = 0.0, max(service.quantile(0.5), 1e-12)
    while bound(hi) >= floor:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        midpoint = 0.5 * (lo + hi)
        if bound(midpoint) >= floor:
            lo = midpoint
        else:
            hi = midpoint
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def default_grid(model, query, steps=DEFAULT_STEPS, t_max=None):
    if steps < 2:
        raise DomainError("a grid needs at least two points")
    if t_max is None:
        t_max = default_t_max(model, query)
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    return np.linspace(0.0, float(t_max), int(steps))


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


def _evaluate(model, query, grid, method, quad, n_samples, seed, expected):
    if not isinstance(query, expected):
        raise DomainError(f"expected a {expected.__name__} query")
    settings = _Settings(quad, int(n_samples), int(seed))
    if grid is None:
        grid = default_grid(model, query)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(grid < 0):
        raise DomainError("grid must be a 1-D array of nonnegative times")
    route = _select(_routes(model, query, settings), method, type(query).__name__)
    values = np.clip(np.asarray(route.fn(grid), dtype=float), 0.0, 1.0) + 0.0
    err = np.broadcast_to(np.asarray(route.err(grid), dtype=float), grid.shape).copy()
    return TailCurve(grid, values, route.tag, model.to_dict(), query.to_dict(), err,
                     dict(route.meta))


def pair_individual_tail(model, query, grid=None, method="auto", quad=DEFAULT_QUADRATURE,
                         n_samples=DEFAULT_SAMPLES, seed=0):
    """``P(O > t)`` for two individual customers ``lag`` batches apart."""
    return _evaluate(model, query, grid, method, quad, n_samples, seed, PairIndividual)


def pair_batch_last_tail(model, query, grid=None, method="auto", quad=DEFAULT_QUADRATURE,
                         n_samples=DEFAULT_SAMPLES, seed=0):
    """Batch-pair tail when a batch counts as present until its last member leaves."""
    if isinstance(query, PairBatch) and query.mode != "last":
        raise DomainError("pair_batch_last_tail needs a 'last' mode query")
    return _evaluate(model, query, grid, method, quad, n_samples, seed, PairBatch)


def pair_batch_first_tail(model, query, grid=None, method="auto", quad=DEFAULT_QUADRATURE,
                          n_samples=DEFAULT_SAMPLES, seed=0):
    """Batch-pair tail when a batch counts as present until its first member leaves."""
    if isinstance(query, PairBatch) and query.mode != "first":
        raise DomainError("pair_batch_first_tail needs a 'first' mode query")
    return _evaluate(model, query, grid, method, quad, n_samples, seed, PairBatch)


def _tuple(mode):
    def op(model, query, grid=None, method="auto", quad=DEFAULT_QUADRATURE,
           n_samples=DEFAULT_SAMPLES, seed=0):
        if isinstance(query, TupleQuery) and query.mode != mode:
            raise DomainError(f"expected a tuple query in {mode!r} mode")
        return _evaluate(model, query, grid, method, quad, n_samples, seed, TupleQuery)
    return op


tuple_individual_tail = _tuple("individual")
tuple_individual_tail.__name__ = "tuple_individual_tail"
tuple_individual_tail.__doc__ = "Tail of the time all tuple members are present together."
tuple_first_tail = _tuple("first")
tuple_first_tail.__name__ = "tuple_first_tail"
tuple_first_tail.__doc__ = "Tuple overlap with each batch present until its first departure."
tuple_last_tail = _tuple("last")
tuple_last_tail.__name__ = "tuple_last_tail"
tuple_last_tail.__doc__ = "Tuple overlap with each batch present until its last departure."


def min_max_tail(batch, service, mode, t):
    """Tail of the min or max of a random-size vector of i.i.d. service draws."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if mode == "min":
        return batch.pgf(service.tail(t))
    if mode == "max":
        return 1.0 - batch.pgf(service.cdf(t))
    raise DomainError("mode must be 'min' or 'max'")


def tail_curve(model, query, grid=None, method="auto", quad=DEFAULT_QUADRATURE,
               n_samples=DEFAULT_SAMPLES, seed=0):
    """Dispatch to the tail operation matching ``query``."""
    expected = type(query) if isinstance(query, (PairIndividual, PairBatch, TupleQuery)) else None
    if expected is None:
        raise DomainError(f"unsupported query {query!r}")
    return _evaluate(model, query, grid, method, quad, n_samples, seed, expected)


def shared_first_mean_closed_form(model, query):
    """Mean overlap of a first-to-leave tuple with one shared batch size,
    ``(1 / (mu m)) E[B^-1 prod_l L(mu B l)^{gap_l}]``; exponential service only."""
    mu = _exp_rate(model.service)
    if mu is None:
        raise UnsupportedCombination("closed-form mean needs exponential service")
    m = len(query.indices)
    lap = model.interarrival.laplace
    total = 0.0
    for j, p in zip(model.batch.support, model.batch.probs):
        prod = np.prod([lap(mu * j * (l + 1)) ** d for l, d in enumerate(query.gaps)])
        total += p / j * prod
    return float(total / (mu * m))


def overlap_mean(model, query, method="auto", quad=DEFAULT_QUADRATURE,
                 n_samples=DEFAULT_SAMPLES, seed=0):
    """``E[O]`` as the integral of the tail over ``[0, inf)``.

    For first-to-leave tuples under shared semantics with exponential
    service the closed form is attached as ``closed_form``.
    """
    settings = _Settings(quad, int(n_samples), int(seed))
    route = _select(_routes(model, query, settings), method, type(query).__name__)
    value, info = integrate_semiinfinite(route.fn, model.service, quad, full_output=True)
    closed = None
    if (isinstance(query, TupleQuery) and query.mode == "first" and query.semantics == "shared"
            and _exp_rate(model.service) is not None):
        closed = shared_first_mean_closed_form(model, query)
    return MeanResult(value, route.tag, info["error"] + info["tail_bound"], closed,
                      {**route.meta, "truncation": info["truncation"]})
