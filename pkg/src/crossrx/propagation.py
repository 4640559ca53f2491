"""Path loss and fading: transforms, sampling, and the Erlang fit.

Fading distributions are unit-scale power gains. Erlang(k, theta) covers
the analytically tractable family (k = 1 being exponential / Rayleigh
power fading); LogNormal is sampler-only and must be approximated by
:func:`erlang_fit` before entering any Laplace-transform pipeline.

The Erlang Laplace transform is (1 + s*theta)^(-k). The exponent is
negative: a Laplace transform of a nonnegative random variable cannot
exceed one, and the exponential special case 1/(1 + s) confirms the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from .model import Erlang, FadingSpec, LogNormal, PathLossSpec, Position, distance

# ln(10)/10: converts a dB-domain sigma to the sigma of ln(gain).
_DB_TO_LN = math.log(10.0) / 10.0

# Fixed fallback seed so erlang_fit without an explicit stream is still
# deterministic run to run.
_DEFAULT_FIT_SEED = 0x5EED_F17


class DegenerateGeometry(ValueError):
    """Transmitter and receiver coincide; the loss model diverges."""


class UnsupportedDistribution(TypeError):
    """Operation needs a closed-form law that this distribution lacks."""


class FitDegenerate(RuntimeError):
    """MLE shape search terminated on the boundary of the search range."""


def path_loss(spec: PathLossSpec, tx: Position, rx: Position) -> float:
    """Mean power gain A * dist^(-alpha) under ``spec.norm``."""

    d = distance(tx, rx, spec.norm)
    if d == 0.0:
        raise DegenerateGeometry(f"tx and rx coincide at {tx}; path loss diverges")
    return spec.amplitude_a * d ** (-spec.alpha)


@dataclass(frozen=True)
class FadingLT:
    """Laplace transform s -> E[exp(-s S)] of an Erlang fading gain."""

    k: int
    theta: float

    def __call__(self, s: float) -> float:
        return (1.0 + s * self.theta) ** (-float(self.k))


def fading_lt(f: FadingSpec) -> FadingLT:
    if isinstance(f, Erlang):
        return FadingLT(k=f.k, theta=f.theta)
    raise UnsupportedDistribution(
        f"no closed-form Laplace transform for {f!r}; approximate it with "
        "erlang_fit first"
    )


def fading_ccdf(f: FadingSpec, s: float) -> float:
    """P(S > s) for an Erlang gain: e^(-s/theta) * sum_{i<k} (s/theta)^i / i!."""

    if not isinstance(f, Erlang):
        raise UnsupportedDistribution(f"no closed-form CCDF for {f!r}")
    if s < 0:
        raise ValueError(f"CCDF argument must be >= 0, got {s}")
    u = s / f.theta
    acc = 0.0
    term = 1.0
    for i in range(f.k):
        if i > 0:
            term *= u / i
        acc += term
    return math.exp(-u) * acc


def fading_sample(f: FadingSpec, rng: np.random.Generator) -> float:
    """One fading draw. Erlang is built as a sum of k exponentials."""

    if isinstance(f, Erlang):
        return float(rng.standard_exponential(f.k).sum() * f.theta)
    if isinstance(f, LogNormal):
        return float(math.exp(rng.standard_normal() * f.sigma_db * _DB_TO_LN))
    raise UnsupportedDistribution(f"cannot sample {f!r}")


def sample_fading_array(f: FadingSpec, rng: np.random.Generator,
                        shape: tuple[int, ...]) -> np.ndarray:
    """Vectorized fading draws (same laws as fading_sample).

    Erlang uses the gamma sampler directly rather than materializing k
    exponentials per cell; the law is identical.
    """

    if isinstance(f, Erlang):
        return rng.standard_gamma(float(f.k), size=shape) * f.theta
    if isinstance(f, LogNormal):
        return np.exp(rng.standard_normal(size=shape) * (f.sigma_db * _DB_TO_LN))
    raise UnsupportedDistribution(f"cannot sample {f!r}")


_K_SEARCH_MAX = 50


def erlang_fit(sigma_db: float, sample_count: int = 1_000_000,
               rng: np.random.Generator | None = None) -> Erlang:
    """Fit an Erlang law to unit-median log-normal shadowing by sampled MLE.

    Draws ``sample_count`` log-normal gains, then maximizes the Erlang
    log-likelihood over integer shapes k in [1, 50] with the scale at its
    conditional MLE theta = mean/k. The integer search keeps the result
    inside the family the analytic pipeline can actually use.

    Raises FitDegenerate if the best k sits at the top of the search
    range (the fit wants a shape this family cannot represent). k = 1 is
    a legitimate answer, not a degeneracy: wide dB spreads genuinely fit
    best as exponential.
    """

    if not sigma_db > 0:
        raise ValueError(f"sigma_db must be positive, got {sigma_db}")
    if sample_count < 100_000:
        raise ValueError(
            f"sample_count must be at least 1e5 for a stable fit, got {sample_count}"
        )
    if rng is None:
        rng = np.random.Generator(np.random.Philox(key=_DEFAULT_FIT_SEED))

    x = np.exp(rng.standard_normal(sample_count) * (sigma_db * _DB_TO_LN))
    mean = float(x.mean())
    mean_log = float(np.log(x).mean())

    ks = np.arange(1, _K_SEARCH_MAX + 1, dtype=float)
    # Per-sample log-likelihood at theta = mean/k:
    #   (k-1) E[ln x] - k - k ln(mean/k) - ln Gamma(k)
    ll = (ks - 1.0) * mean_log - ks - ks * np.log(mean / ks) - scipy.special.gammaln(ks)
    k_best = int(np.argmax(ll)) + 1
    if k_best == _K_SEARCH_MAX:
        raise FitDegenerate(
            f"MLE shape search hit the k = {_K_SEARCH_MAX} bound for "
            f"sigma_db = {sigma_db}; the distribution is too concentrated for "
            "this family"
        )
    return Erlang(k=k_best, theta=mean / k_best)
