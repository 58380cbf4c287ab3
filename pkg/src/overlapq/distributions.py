"""Continuous laws for gaps and service times, discrete laws for batch sizes.

Continuous laws live on ``[0, inf)`` and expose ``cdf``, ``tail``, ``pdf``,
``quantile``, ``laplace`` and vectorised sampling. Batch-size laws live on
``{1, 2, ...}`` and expose ``pmf``, ``pgf`` and sampling. Everything is an
immutable dataclass, so instances can be shared and used as cache keys.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import ClassVar

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import DomainError, ModelSpecError
from .numerics import (DEFAULT_QUADRATURE, adaptive_simpson, grid_convolve,
                       integrate_semiinfinite, trapezoid_mass)

BATCH_TAIL_CUTOFF = 1e-12


# --------------------------------------------------------------------------
# continuous laws
# --------------------------------------------------------------------------


class ContinuousDist:
    """Base class; subclasses implement ``_cdf``/``_sf`` for ``x >= 0``."""

    family: ClassVar[str] = ""
    atoms: ClassVar[tuple] = ()
    laplace_closed: ClassVar[bool] = True

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return self._split(x)[0]

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return self._split(x)[1]

    def _split(self, x):
        # compute whichever of cdf/tail is below 1/2 accurately and derive the
        # other one from it, so that cdf + tail == 1 holds exactly
        xp = np.maximum(x, 0.0)
        c = np.asarray(self._cdf(xp), dtype=float)
        s = np.asarray(self._sf(xp), dtype=float)
        lower = c < 0.5
        cdf = np.where(lower, c, 1.0 - s)
        tail = np.where(lower, 1.0 - c, s)
        neg = x < 0
        cdf = np.where(neg, 0.0, cdf)
        tail = np.where(neg, 1.0, tail)
        if cdf.ndim == 0:
            return float(cdf), float(tail)
        return cdf, tail

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, self._pdf(np.maximum(x, 0.0)))
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        """Smallest ``x`` with ``cdf(x) >= p`` (bisection unless overridden)."""
        p = float(p)
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        if p == 0.0:
            return 0.0
        hi = max(1.0, self.mean())
        while self.cdf(hi) < p:
            hi *= 2.0
        return brentq(lambda x: self.cdf(x) - p, 0.0, hi, xtol=1e-14, rtol=1e-14)

    def laplace(self, s):
        """``E[exp(-s X)]`` for ``s >= 0``."""
        s = float(s)
        if s < 0:
            raise DomainError("Laplace transform argument must be >= 0")
        if s == 0.0:
            return 1.0
        return self._laplace(s)

    def _laplace(self, s):
        upper = self.quantile(DEFAULT_QUADRATURE.truncation_quantile)
        value, _ = adaptive_simpson(lambda x: np.exp(-s * x) * self._pdf(x), 0.0, upper,
                                    atol=1e-13, rtol=1e-11)
        return value

    def sample(self, rng, size=None):
        raise NotImplementedError

    def sample_sum(self, rng, k, size):
        """Draws of the sum of ``k`` independent copies."""
        out = np.zeros(size)
        for _ in range(int(k)):
            out += self.sample(rng, size)
        return out

    def mean(self):
        raise NotImplementedError

    def resolution(self):
        """Length scale the density varies on; sets grid steps for convolution."""
        return self.quantile(0.5) - self.quantile(0.05)

    def to_dict(self):
        return {"family": self.family, **asdict(self)}


@dataclass(frozen=True)
class Exponential(ContinuousDist):
    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        _positive(self.rate, "rate")

    def _cdf(self, x):
        return -np.expm1(-self.rate * x)

    def _sf(self, x):
        return np.exp(-self.rate * x)

    def _pdf(self, x):
        return self.rate * np.exp(-self.rate * x)

    def quantile(self, p):
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        return float(-math.log1p(-p) / self.rate)

    def _laplace(self, s):
        return self.rate / (self.rate + s)

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def sample_sum(self, rng, k, size):
        return rng.gamma(k, 1.0 / self.rate, size)

    def mean(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Erlang(ContinuousDist):
    shape: int
    rate: float
    family: ClassVar[str] = "erlang"

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise DomainError("shape must be a positive integer")
        object.__setattr__(self, "shape", int(self.shape))
        _positive(self.rate, "rate")

    def _cdf(self, x):
        return special.gammainc(self.shape, self.rate * x)

    def _sf(self, x):
        return special.gammaincc(self.shape, self.rate * x)

    def _pdf(self, x):
        return gamma_pdf(x, self.shape, self.rate)

    def quantile(self, p):
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        if p > 0.5:
            return float(special.gammainccinv(self.shape, 1.0 - p) / self.rate)
        return float(special.gammaincinv(self.shape, p) / self.rate)

    def _laplace(self, s):
        return (self.rate / (self.rate + s)) ** self.shape

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def sample_sum(self, rng, k, size):
        return rng.gamma(k * self.shape, 1.0 / self.rate, size)

    def mean(self):
        return self.shape / self.rate


@dataclass(frozen=True)
class Deterministic(ContinuousDist):
    value: float
    family: ClassVar[str] = "deterministic"

    def __post_init__(self):
        _positive(self.value, "value")

    @property
    def atoms(self):
        return (self.value,)

    def _cdf(self, x):
        return np.where(x >= self.value, 1.0, 0.0)

    def _sf(self, x):
        return np.where(x >= self.value, 0.0, 1.0)

    def _pdf(self, x):
        # all mass sits in the atom; callers check ``atoms``
        return np.zeros_like(x)

    def quantile(self, p):
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        return 0.0 if p == 0.0 else float(self.value)

    def _laplace(self, s):
        return math.exp(-s * self.value)

    def sample(self, rng, size=None):
        if size is None:
            return float(self.value)
        return np.full(size, float(self.value))

    def sample_sum(self, rng, k, size):
        return np.full(size, k * float(self.value))

    def mean(self):
        return float(self.value)


@dataclass(frozen=True)
class Uniform(ContinuousDist):
    lo: float
    hi: float
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("uniform bounds must be finite")
        if self.lo < 0:
            raise DomainError("lo must be >= 0")
        if self.lo >= self.hi:
            raise DomainError("lo must be < hi")

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _pdf(self, x):
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def quantile(self, p):
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        return float(self.lo + p * (self.hi - self.lo))

    def _laplace(self, s):
        w = self.hi - self.lo
        return math.exp(-s * self.lo) * -math.expm1(-s * w) / (s * w)

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size)

    def mean(self):
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class LogNormal(ContinuousDist):
    log_mean: float
    log_sd: float
    family: ClassVar[str] = "lognormal"
    laplace_closed: ClassVar[bool] = False

    def __post_init__(self):
        if not math.isfinite(self.log_mean):
            raise DomainError("log_mean must be finite")
        _positive(self.log_sd, "log_sd")

    def _z(self, x):
        with np.errstate(divide="ignore"):
            return (np.log(x) - self.log_mean) / self.log_sd

    def _cdf(self, x):
        return special.ndtr(self._z(x))

    def _sf(self, x):
        return special.ndtr(-self._z(x))

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0, x, 1.0)
        z = (np.log(safe) - self.log_mean) / self.log_sd
        dens = np.exp(-0.5 * z * z) / (safe * self.log_sd * math.sqrt(2 * math.pi))
        return np.where(x > 0, dens, 0.0)

    def quantile(self, p):
        if not 0.0 <= p < 1.0:
            raise DomainError("quantile level must lie in [0, 1)")
        if p == 0.0:
            return 0.0
        return float(math.exp(self.log_mean + self.log_sd * special.ndtri(p)))

    def sample(self, rng, size=None):
        return rng.lognormal(self.log_mean, self.log_sd, size)

    def mean(self):
        return math.exp(self.log_mean + 0.5 * self.log_sd**2)


@dataclass(frozen=True)
class HyperExponential(ContinuousDist):
    weights: tuple
    rates: tuple
    family: ClassVar[str] = "hyperexponential"

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        r = tuple(float(v) for v in self.rates)
        if len(w) != len(r) or not w:
            raise DomainError("weights and rates must be non-empty and of equal length")
        if any(v < 0 for v in w) or abs(sum(w) - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")
        if any(not (v > 0 and math.isfinite(v)) for v in r):
            raise DomainError("rates must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rates", r)

    def _mix(self, fn, x):
        x = np.asarray(x, dtype=float)
        return sum(w * fn(r, x) for w, r in zip(self.weights, self.rates))

    def _cdf(self, x):
        return self._mix(lambda r, v: -np.expm1(-r * v), x)

    def _sf(self, x):
        return self._mix(lambda r, v: np.exp(-r * v), x)

    def _pdf(self, x):
        return self._mix(lambda r, v: r * np.exp(-r * v), x)

    def _laplace(self, s):
        return sum(w * r / (r + s) for w, r in zip(self.weights, self.rates))

    def sample(self, rng, size=None):
        phase = rng.choice(len(self.weights), size=size, p=np.asarray(self.weights))
        scale = 1.0 / np.asarray(self.rates)[phase]
        return rng.exponential(scale, size)

    def mean(self):
        return sum(w / r for w, r in zip(self.weights, self.rates))

    def to_dict(self):
        return {"family": self.family, "weights": list(self.weights), "rates": list(self.rates)}


def _positive(value, name):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number")


def gamma_pdf(x, shape, rate):
    """Gamma/Erlang density, computed in log space."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    logp = shape * math.log(rate) + (shape - 1) * np.log(safe) - rate * safe - special.gammaln(shape)
    dens = np.exp(logp)
    at_zero = rate if shape == 1 else 0.0
    return np.where(x > 0, dens, np.where(x == 0, at_zero, 0.0))


# --------------------------------------------------------------------------
# batch-size laws
# --------------------------------------------------------------------------


class BatchDist:
    """Law of the batch size on ``{1, 2, ...}``.

    ``support``/``probs`` hold the (possibly truncated) pmf. Infinite-support
    families stop at the first ``m`` whose remaining tail mass is below
    ``1e-12``; the pmf is not renormalised and ``truncation_bound`` records
    the neglected mass.
    """

    family: ClassVar[str] = ""

    @property
    def support(self):
        return self._table()[0]

    @property
    def probs(self):
        return self._table()[1]

    @property
    def truncation_bound(self):
        return self._table()[2]

    @property
    def max_size(self):
        return int(self.support[-1])

    @property
    def is_degenerate(self):
        return len(self.support) == 1

    def pmf(self, j):
        j = np.asarray(j)
        table = dict(zip(self.support.tolist(), self.probs.tolist()))
        out = np.array([table.get(int(v), 0.0) for v in j.ravel()]).reshape(j.shape)
        return float(out) if out.ndim == 0 else out

    def pgf(self, z):
        """``E[z**B]`` for ``z`` in ``[0, 1]`` (vectorised, Horner scheme)."""
        z = np.asarray(z, dtype=float)
        if np.any((z < 0) | (z > 1)) or np.any(np.isnan(z)):
            raise DomainError("pgf argument must lie in [0, 1]")
        coeffs = np.zeros(self.max_size + 1)
        coeffs[self.support] = self.probs
        acc = np.zeros_like(z)
        for c in coeffs[:0:-1]:
            acc = acc * z + c
        acc = acc * z
        return float(acc) if acc.ndim == 0 else acc

    def mean(self):
        return float(np.dot(self.support, self.probs))

    def sample(self, rng, size=None):
        raise NotImplementedError

    def to_dict(self):
        return {"family": self.family, **asdict(self)}


@dataclass(frozen=True)
class DeterministicBatch(BatchDist):
    b: int
    family: ClassVar[str] = "deterministic"

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise DomainError("b must be a positive integer")
        object.__setattr__(self, "b", int(self.b))

    def _table(self):
        return np.array([self.b]), np.array([1.0]), 0.0

    def sample(self, rng, size=None):
        if size is None:
            return self.b
        return np.full(size, self.b, dtype=np.int64)


@dataclass(frozen=True)
class ExplicitBatch(BatchDist):
    pmf_values: tuple = field(metadata={"key": "pmf"})
    family: ClassVar[str] = "explicit-pmf"

    def __post_init__(self):
        p = tuple(float(v) for v in self.pmf_values)
        if not p or any(not (v >= 0 and math.isfinite(v)) for v in p):
            raise DomainError("pmf entries must be nonnegative")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise DomainError("pmf must sum to 1")
        object.__setattr__(self, "pmf_values", p)

    def _table(self):
        return _explicit_table(self.pmf_values)

    def sample(self, rng, size=None):
        support, probs, _ = self._table()
        return rng.choice(support, size=size, p=probs / probs.sum())

    def to_dict(self):
        return {"family": self.family, "pmf": list(self.pmf_values)}


@dataclass(frozen=True)
class GeometricBatch(BatchDist):
    """``P(B = j) = (1 - p)**(j - 1) * p`` for ``j >= 1``."""

    p: float
    family: ClassVar[str] = "geometric"

    def __post_init__(self):
        if not (0 < self.p <= 1):
            raise DomainError("p must lie in (0, 1]")

    def _table(self):
        return _geometric_table(self.p)

    def sample(self, rng, size=None):
        return rng.geometric(self.p, size)


@dataclass(frozen=True)
class ZeroTruncatedPoisson(BatchDist):
    """Poisson(``mean``) conditioned on being positive."""

    mean_param: float = field(metadata={"key": "mean"})
    family: ClassVar[str] = "zero-truncated-poisson"

    def __post_init__(self):
        _positive(self.mean_param, "mean")

    def _table(self):
        return _ztp_table(self.mean_param)

    def sample(self, rng, size=None):
        scalar = size is None
        n = 1 if scalar else int(np.prod(size))
        out = rng.poisson(self.mean_param, n)
        bad = out == 0
        while bad.any():
            out[bad] = rng.poisson(self.mean_param, int(bad.sum()))
            bad = out == 0
        if scalar:
            return int(out[0])
        return out.reshape(size)

    def to_dict(self):
        return {"family": self.family, "mean": self.mean_param}


@lru_cache(maxsize=None)
def _explicit_table(p):
    support = np.flatnonzero(np.asarray(p) > 0) + 1
    probs = np.asarray(p)[support - 1]
    return support, probs, 0.0


@lru_cache(maxsize=None)
def _geometric_table(p):
    if p == 1.0:
        return np.array([1]), np.array([1.0]), 0.0
    q = 1.0 - p
    m = max(1, math.ceil(math.log(BATCH_TAIL_CUTOFF) / math.log(q)))
    while q**m >= BATCH_TAIL_CUTOFF:
        m += 1
    while m > 1 and q ** (m - 1) < BATCH_TAIL_CUTOFF:
        m -= 1
    j = np.arange(1, m + 1)
    return j, p * q ** (j - 1), q**m


@lru_cache(maxsize=None)
def _ztp_table(lam):
    norm = -math.expm1(-lam)
    m = 1
    while special.pdtrc(m, lam) / norm >= BATCH_TAIL_CUTOFF:
        m += 1
    j = np.arange(1, m + 1)
    logp = j * math.log(lam) - lam - special.gammaln(j + 1) - math.log(norm)
    return j, np.exp(logp), float(special.pdtrc(m, lam) / norm)


# --------------------------------------------------------------------------
# queue model and JSON schema
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QueueModel:
    interarrival: ContinuousDist
    batch: BatchDist
    service: ContinuousDist

    def to_dict(self):
        return {"arrival": self.interarrival.to_dict(), "batch": self.batch.to_dict(),
                "service": self.service.to_dict()}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ModelSpecError("model", "expected a JSON object")
        for key in ("arrival", "batch", "service"):
            if key not in data:
                raise ModelSpecError(key, "missing")
        extra = set(data) - {"arrival", "batch", "service"}
        if extra:
            raise ModelSpecError(sorted(extra)[0], "unknown key")
        return cls(continuous_from_dict(data["arrival"], "arrival"),
                   batch_from_dict(data["batch"], "batch"),
                   continuous_from_dict(data["service"], "service"))


_CONTINUOUS = {
    "exponential": (Exponential, {"rate": "rate"}),
    "erlang": (Erlang, {"shape": "shape", "rate": "rate"}),
    "deterministic": (Deterministic, {"value": "value"}),
    "uniform": (Uniform, {"lo": "lo", "hi": "hi"}),
    "lognormal": (LogNormal, {"log_mean": "log_mean", "log_sd": "log_sd"}),
    "hyperexponential": (HyperExponential, {"weights": "weights", "rates": "rates"}),
}

_BATCH = {
    "deterministic": (DeterministicBatch, {"b": "b"}),
    "explicit-pmf": (ExplicitBatch, {"pmf": "pmf_values"}),
    "geometric": (GeometricBatch, {"p": "p"}),
    "zero-truncated-poisson": (ZeroTruncatedPoisson, {"mean": "mean_param"}),
}


def _build(data, where, table):
    if not isinstance(data, dict):
        raise ModelSpecError(where, "expected a JSON object")
    family = data.get("family")
    if family is None:
        raise ModelSpecError(f"{where}.family", "missing")
    if family not in table:
        raise ModelSpecError(f"{where}.family", f"unknown family {family!r}")
    ctor, params = table[family]
    extra = set(data) - {"family", *params}
    if extra:
        raise ModelSpecError(f"{where}.{sorted(extra)[0]}", "unknown parameter")
    kwargs = {}
    for key, attr in params.items():
        if key not in data:
            raise ModelSpecError(f"{where}.{key}", "missing")
        value = data[key]
        ok = (isinstance(value, (int, float)) and not isinstance(value, bool)) or (
            isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                            for v in value))
        if not ok:
            raise ModelSpecError(f"{where}.{key}", "expected a number or list of numbers")
        kwargs[attr] = tuple(value) if isinstance(value, list) else value
    try:
        return ctor(**kwargs)
    except (DomainError, TypeError) as exc:
        bad = next((k for k in params if k in str(exc)), next(iter(params)))
        raise ModelSpecError(f"{where}.{bad}", str(exc)) from None


def continuous_from_dict(data, where="dist"):
    return _build(data, where, _CONTINUOUS)


def batch_from_dict(data, where="batch"):
    return _build(data, where, _BATCH)


# --------------------------------------------------------------------------
# k-fold sums of inter-arrival times
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KFoldDensity:
    """Density of a sum of ``k`` i.i.d. copies evaluated on a grid.

    For atomic laws ``values`` is all zeros and ``atom`` holds the location
    of the point mass.
    """

    values: np.ndarray
    atom: float | None
    method: str


def kfold_density(d, k, grid):
    """Density ``h_k`` of the sum of ``k`` i.i.d. draws from ``d`` on ``grid``."""
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be nonnegative and strictly increasing")
    block = BlockSum(d, int(k))
    if block.kind == "atom":
        return KFoldDensity(np.zeros_like(grid), block.atom, "atom")
    if block.kind == "gamma":
        return KFoldDensity(gamma_pdf(grid, block.gamma.shape, block.gamma.rate), None, "closed-form")
    work, dens = block.grid_density()
    return KFoldDensity(np.interp(grid, work, dens, right=0.0), None, "grid-convolution")


def base_density_on_grid(d, h, n):
    """Cell-averaged density of ``d`` on ``0, h, ..., (n-1) h``.

    Each value is the mass of the surrounding cell divided by its weight
    under the trapezoid rule, so trapezoid integration recovers the
    probability exactly up to the grid end even when the density jumps.
    """
    x = np.arange(n) * h
    upper = d.cdf(x + 0.5 * h)
    lower = d.cdf(np.maximum(x - 0.5 * h, 0.0))
    vals = (upper - lower) / h
    vals[0] = 2.0 * d.cdf(0.5 * h) / h
    return x, vals


_MAX_GRID = 1 << 22


@lru_cache(maxsize=32)
def _grid_kfold(d, k):
    upper = k * d.quantile(1.0 - 1e-12 / k)
    h = d.resolution() / 2000.0
    n = int(math.ceil(upper / h)) + 4
    if n > _MAX_GRID:
        n = _MAX_GRID
        h = upper / (n - 1)
    x, base = base_density_on_grid(d, h, n)
    dens = base
    for _ in range(k - 1):
        dens = grid_convolve(dens, base, x)
    x.setflags(write=False)
    dens.setflags(write=False)
    return x, dens


class BlockSum:
    """The sum ``A_k`` of ``k`` i.i.d. inter-arrival times.

    ``kind`` picks the arithmetic: ``"atom"`` for deterministic laws (exact
    point mass), ``"gamma"`` when the sum is Erlang (exponential and Erlang
    inter-arrivals), ``"grid"`` otherwise (iterated trapezoid convolution).
    """

    def __init__(self, d, k):
        self.d = d
        self.k = int(k)
        self.atom = None
        self.gamma = None
        if self.k == 0:
            self.kind, self.atom = "atom", 0.0
        elif isinstance(d, Deterministic):
            self.kind, self.atom = "atom", self.k * d.value
        elif isinstance(d, Exponential):
            self.kind, self.gamma = "gamma", Erlang(self.k, d.rate)
        elif isinstance(d, Erlang):
            self.kind, self.gamma = "gamma", Erlang(self.k * d.shape, d.rate)
        else:
            self.kind = "grid"

    @property
    def exact(self):
        return self.kind != "grid"

    def grid_density(self):
        return _grid_kfold(self.d, self.k)

    def expect(self, phi, quad=DEFAULT_QUADRATURE, breakpoints=()):
        """``E[phi(A_k)]`` for a vectorised ``phi``."""
        if self.kind == "atom":
            return float(np.asarray(phi(np.array([self.atom])))[0])
        if self.kind == "gamma":
            g = self.gamma
            return integrate_semiinfinite(lambda x: phi(x) * gamma_pdf(x, g.shape, g.rate),
                                          g, quad, breakpoints)
        x, dens = self.grid_density()
        return trapezoid_mass(phi(x) * dens, x[1] - x[0])

    def prob_below(self, x):
        """``P(A_k < x)``; only for the exact kinds."""
        x = np.asarray(x, dtype=float)
        if self.kind == "atom":
            out = np.where(self.atom < x, 1.0, 0.0)
        elif self.kind == "gamma":
            out = self.gamma.cdf(x)
        else:
            raise DomainError("no closed-form cdf for this inter-arrival law")
        return float(out) if out.ndim == 0 else out

    def laplace(self, s):
        return self.d.laplace(s) ** self.k

    def sample(self, rng, size):
        if self.k == 0:
            return np.zeros(size)
        return self.d.sample_sum(rng, self.k, size)
