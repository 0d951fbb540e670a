import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrdentropy import (
    ARFIMA,
    FGN,
    HALF_LOG_2PI_E,
    LevinsonError,
    SeriesStatus,
    autocovariance,
    conditional_entropy_sequence,
    excess_entropy_partial_sum,
    levinson,
    strong_szego_E,
    szego_limit_G,
)
from oracles import cholesky_innovations, dense_log_det_ratios, reflection_product_gap

LOG_4_3 = math.log(4 / 3)
SIX_SPECS = [ARFIMA(0.0, (0.5,)), ARFIMA(0.0, (0.4,), (0.3,)), FGN(0.3), ARFIMA(-0.3), FGN(0.8), ARFIMA(0.3)]


def test_white_noise():
    lev = levinson(np.r_[1.0, np.zeros(20)])
    assert np.all(lev.innovation_variances == 1.0) and np.all(lev.reflection_coeffs == 0.0)


def test_ar1():
    lev = levinson(autocovariance(ARFIMA(0.0, (0.5,)), 40))
    assert lev.reflection_coeffs[0] == pytest.approx(0.5, abs=1e-15)
    assert np.max(np.abs(lev.reflection_coeffs[1:])) < 1e-14
    assert lev.innovation_variances[0] == pytest.approx(4 / 3, rel=1e-14)
    assert np.allclose(lev.innovation_variances[1:], 1.0, rtol=1e-14)


@pytest.mark.parametrize("spec", SIX_SPECS, ids=repr)
def test_determinant_ratios_match_dense_oracle(spec):
    g = autocovariance(spec, 64).gamma
    v = levinson(g).innovation_variances[:64]
    assert np.allclose(np.log(v), dense_log_det_ratios(g, 64), rtol=0, atol=1e-9)
    assert np.allclose(v, cholesky_innovations(g, 64), rtol=1e-9)


def test_arfima_reflection_coefficients():
    d = 0.3
    alpha = levinson(autocovariance(ARFIMA(d), 32)).reflection_coeffs
    k = np.arange(1, 33)
    assert np.max(np.abs(alpha - d / (k - d))) < 1e-10


def test_levinson_reports_indefinite_matrix():
    with pytest.raises(LevinsonError) as info:
        levinson([1.0, 0.9, 0.0])  # 3x3 Toeplitz with these entries is indefinite
    assert info.value.k == 3
    with pytest.raises(LevinsonError):
        levinson([0.0, 0.0])


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-0.45, max_value=0.45), st.floats(min_value=-0.9, max_value=0.9),
       st.floats(min_value=-0.9, max_value=0.9))
def test_levinson_invariants(d, phi, psi):
    g = autocovariance(ARFIMA(d, (phi,), (psi,)), 48).gamma
    lev = levinson(g)
    v, a = lev.innovation_variances, lev.reflection_coeffs
    assert np.all(v > 0)
    assert np.all(np.diff(v) <= 1e-12 * v[:-1])
    assert np.allclose(v[1:], v[:-1] * (1 - a**2), rtol=1e-12)
    assert np.allclose(v, cholesky_innovations(g, 49), rtol=1e-8)
    assert np.allclose(lev.log_determinants(), np.cumsum(dense_log_det_ratios(g, 49)), atol=1e-8)


def test_conditional_entropy_white_noise_and_ar1():
    wn = conditional_entropy_sequence(ARFIMA(0.0, innovation_variance=2.0), 64)
    assert np.allclose(wn.h_e, 0.5 * math.log(2 * math.pi * math.e * 2.0), atol=1e-15)
    assert np.all(np.abs(wn.gap) < 1e-15)
    ar = conditional_entropy_sequence(ARFIMA(0.0, (0.5,)), 64)
    assert ar.at(1) == pytest.approx(0.5 * LOG_4_3, abs=1e-14)
    assert np.max(np.abs(ar.gap[1:])) < 1e-14


def test_conditional_entropy_arfima_against_reflection_product():
    s = conditional_entropy_sequence(ARFIMA(0.3), 4096)
    assert np.all(s.gap > 0) and np.all(np.diff(s.gap) < 0)
    assert s.at(4096) < s.at(1024)
    for n in (16, 256, 4096):
        assert s.at(n) == pytest.approx(reflection_product_gap(0.3, n), rel=1e-6)


@pytest.mark.parametrize("spec", SIX_SPECS + [ARFIMA(0.0, (), (0.5,))], ids=repr)
def test_monotone_conditioning_and_nonnegative_gap(spec):
    s = conditional_entropy_sequence(spec, 2048)
    assert np.all(np.diff(s.h_e) <= 1e-12)
    assert np.all(s.gap >= -1e-12)


@pytest.mark.parametrize("spec", [ARFIMA(0.0, (0.5,)), ARFIMA(0.0, (), (0.5,)), ARFIMA(0.0, (0.4,), (0.3,))],
                         ids=repr)
def test_geometric_mean_of_determinant_matches_v_n(spec):
    lev = levinson(autocovariance(spec, 4095))
    geo = math.exp(lev.log_determinants()[-1] / lev.n)
    assert geo == pytest.approx(lev.innovation_variances[-1], rel=0.01)


def test_excess_entropy():
    assert excess_entropy_partial_sum(ARFIMA(0.0), 100) == 0.0
    assert excess_entropy_partial_sum(ARFIMA(0.0, (0.5,)), 64) == pytest.approx(0.5 * LOG_4_3, abs=1e-12)
    sums = [excess_entropy_partial_sum(ARFIMA(0.3), m) for m in (2**8, 2**10, 2**12)]
    assert sums[0] < sums[1] < sums[2]
    # increments per factor of 4 stay roughly constant (d^2/2 log 4 ~ 0.062): no convergence
    assert (sums[2] - sums[1]) > 0.9 * (sums[1] - sums[0])


def test_szego_G():
    assert szego_limit_G(ARFIMA(0.0)) == pytest.approx(1.0, abs=1e-12)
    assert szego_limit_G(ARFIMA(0.3)) == pytest.approx(1.0, abs=1e-10)
    assert szego_limit_G(ARFIMA(0.3, (0.5,), (), 2.5)) == pytest.approx(2.5, rel=1e-10)


def test_strong_szego_examples():
    wn = strong_szego_E(ARFIMA(0.0), 256)
    assert wn.status is SeriesStatus.CONVERGED and wn.value == pytest.approx(1.0, abs=1e-12)
    ar = strong_szego_E(ARFIMA(0.0, (0.5,)), 1024)
    assert ar.status is SeriesStatus.CONVERGED
    assert ar.value == pytest.approx(4 / 3, abs=1e-8)
    assert math.exp(ar.log_cepstrum) == pytest.approx(4 / 3, abs=1e-8)
    lrd = strong_szego_E(ARFIMA(0.3), 4096)
    assert lrd.status is SeriesStatus.DIVERGENT and lrd.value is None


@pytest.mark.parametrize("spec", [ARFIMA(0.0, (), (0.5,)), ARFIMA(0.0, (0.4,), (0.3,)),
                                  ARFIMA(0.0, (0.5, -0.3), (0.2,), 3.0)], ids=repr)
def test_strong_szego_two_routes_agree_for_srd(spec):
    res = strong_szego_E(spec, 1024)
    assert res.status is SeriesStatus.CONVERGED
    assert res.log_product == pytest.approx(res.log_cepstrum, abs=1e-6)


def test_h_e_uses_conditional_entropy_formula():
    s = conditional_entropy_sequence(FGN(0.7), 32)
    assert np.allclose(s.h_e, HALF_LOG_2PI_E + 0.5 * np.log(s.levinson.innovation_variances))
