import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crossrx import (DegenerateGeometry, Erlang, Exponential, FitDegenerate,
                     LogNormal, Position, UnsupportedDistribution,
                     derivative_n, erlang_fit, fading_ccdf, fading_lt,
                     fading_sample, path_loss, sample_fading_array)

from conftest import CANYON, LOS

# frozen against 40-digit arithmetic
LT_2_066_AT_1 = 0.36289737262302224      # (1 + 0.66)^-2
CCDF_2_066_AT_1 = 0.5527671302218204     # e^(-1/0.66) (1 + 1/0.66)


def test_path_loss_los():
    assert np.isclose(path_loss(LOS, Position(0, 0), Position(100, 0)),
                      3e-5 / 100 ** 2, rtol=1e-15)


def test_path_loss_canyon_uses_l1():
    got = path_loss(CANYON, Position(0, 50), Position(60, 0))
    assert np.isclose(got, 3e-5 / 110 ** 2, rtol=1e-15)


def test_path_loss_degenerate():
    with pytest.raises(DegenerateGeometry):
        path_loss(LOS, Position(5, 0), Position(5, 0))


def test_fading_lt_frozen_value():
    lt = fading_lt(Erlang(2, 0.66))
    assert np.isclose(lt(1.0), LT_2_066_AT_1, rtol=1e-14)


def test_fading_lt_exponential():
    lt = fading_lt(Exponential())
    assert lt(0.0) == 1.0
    assert np.isclose(lt(3.0), 0.25, rtol=1e-14)


def test_fading_lt_monotone():
    lt = fading_lt(Erlang(3, 0.5))
    values = [lt(s) for s in (0.0, 0.5, 1.0, 2.0, 10.0)]
    assert values == sorted(values, reverse=True)
    assert values[0] == 1.0


def test_fading_lt_mean_via_derivative():
    # -LT'(0) is the mean k*theta
    lt = fading_lt(Erlang(2, 0.66))
    assert np.isclose(-derivative_n(lt, 0.0, 1), 1.32, rtol=1e-9)


def test_fading_ccdf_frozen_value():
    assert np.isclose(fading_ccdf(Erlang(2, 0.66), 1.0), CCDF_2_066_AT_1,
                      rtol=1e-12)


def test_fading_ccdf_exponential():
    assert np.isclose(fading_ccdf(Exponential(2.0), 3.0), math.exp(-1.5),
                      rtol=1e-14)


def test_fading_ccdf_edges():
    assert fading_ccdf(Erlang(4, 1.0), 0.0) == 1.0
    with pytest.raises(ValueError):
        fading_ccdf(Erlang(2, 1.0), -0.1)


def test_fading_lt_rejects_lognormal():
    with pytest.raises(UnsupportedDistribution):
        fading_lt(LogNormal(3.2))
    with pytest.raises(UnsupportedDistribution):
        fading_ccdf(LogNormal(3.2), 1.0)


def test_fading_sample_erlang_moments():
    rng = np.random.default_rng(42)
    draws = np.array([fading_sample(Erlang(3, 0.5), rng) for _ in range(20000)])
    assert abs(draws.mean() - 1.5) < 0.03            # 4 sigma
    assert abs(draws.var() - 0.75) < 0.06
    assert (draws > 0).all()


def test_fading_sample_lognormal_is_unit_median():
    rng = np.random.default_rng(42)
    draws = np.array([fading_sample(LogNormal(3.2), rng)
                      for _ in range(20000)])
    sigma_ln = 3.2 * math.log(10) / 10
    assert abs(np.log(draws).mean()) < 4 * sigma_ln / math.sqrt(20000)
    assert abs(np.log(draws).std() - sigma_ln) < 0.01


def test_sample_fading_array_matches_scalar_law():
    rng = np.random.default_rng(7)
    arr = sample_fading_array(Erlang(2, 0.66), rng, (400, 50))
    assert arr.shape == (400, 50)
    assert abs(arr.mean() - 1.32) < 0.05
    rng2 = np.random.default_rng(7)
    arr2 = sample_fading_array(LogNormal(3.2), rng2, (10,))
    assert arr2.shape == (10,) and (arr2 > 0).all()


def test_erlang_fit_reference_spread():
    fit = erlang_fit(3.2, sample_count=200_000)
    assert fit.k == 2
    assert 0.60 <= fit.theta <= 0.72


def test_erlang_fit_wide_spread_gives_k1():
    fit = erlang_fit(4.5, sample_count=200_000)
    assert fit.k == 1


def test_erlang_fit_narrow_spread_degenerates():
    with pytest.raises(FitDegenerate):
        erlang_fit(0.3, sample_count=200_000)


def test_erlang_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        erlang_fit(0.0)
    with pytest.raises(ValueError):
        erlang_fit(3.2, sample_count=999)


def test_erlang_fit_deterministic_default_stream():
    assert erlang_fit(3.2, 200_000) == erlang_fit(3.2, 200_000)


@given(k=st.integers(min_value=1, max_value=8),
       theta=st.floats(min_value=0.05, max_value=5.0),
       s=st.floats(min_value=0.0, max_value=50.0))
@settings(max_examples=60)
def test_lt_and_ccdf_stay_in_unit_interval(k, theta, s):
    f = Erlang(k, theta)
    assert 0.0 < fading_lt(f)(s) <= 1.0
    assert 0.0 <= fading_ccdf(f, s) <= 1.0
