import math

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from rieszcap import specfun
from rieszcap.specfun import (
    EULER_GAMMA,
    appell_f1_euler,
    beta_inc,
    beta_inc_reg,
    digamma,
    hyp2f1,
    hyp2f1_regularized,
    log_gamma,
    pochhammer,
)

mp.mp.dps = 40


# ---------------------------------------------------------------------------
# log_gamma


def gamma_by_quadrature(x):
    """Independent Gamma oracle: defining integral, recursion kept out."""
    val, err = integrate.quad(lambda t: t ** (x - 1.0) * math.exp(-t), 0.0, np.inf,
                              epsabs=1e-14, epsrel=1e-13, limit=400)
    assert err < 1e-11 * val
    return val


def test_log_gamma_trivial_points():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)


def test_log_gamma_7_3_against_product_recursion():
    # Gamma(7.3) = 6.3 * 5.3 * ... * 1.3 * Gamma(1.3), base value by quadrature
    base = gamma_by_quadrature(1.3)
    expected = math.log(base) + sum(math.log(1.3 + k) for k in range(6))
    assert log_gamma(7.3) == pytest.approx(expected, abs=5e-12)


def test_log_gamma_contract_on_range():
    # relative error of exp(result) against Gamma(x) below 1e-13 on [1e-3, 170]
    rng = np.random.default_rng(42)
    xs = np.concatenate([[1e-3, 0.01, 0.5, 1.0, 2.0, 12.999, 13.0, 99.5, 170.0],
                         rng.uniform(1e-3, 170.0, size=300)])
    for x in xs:
        ref = mp.loggamma(mp.mpf(float(x)))
        rel = abs(mp.exp(mp.mpf(log_gamma(float(x))) - ref) - 1)
        assert rel < 1e-13, f"x={x}: exp-relative error {rel}"


def test_log_gamma_domain():
    for x in (0.0, -1.0, -0.5):
        with pytest.raises(ValueError):
            log_gamma(x)


# ---------------------------------------------------------------------------
# digamma


def test_digamma_known_values():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-13)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-13)
    # recurrence psi(x+1) = psi(x) + 1/x from psi(1)
    assert digamma(5.0) == pytest.approx(-EULER_GAMMA + 1.0 + 0.5 + 1.0 / 3.0 + 0.25,
                                         abs=1e-13)


def test_digamma_absolute_error():
    rng = np.random.default_rng(7)
    for x in rng.uniform(1e-3, 60.0, size=200):
        assert abs(digamma(float(x)) - float(mp.digamma(float(x)))) < 1e-12


def test_digamma_domain():
    with pytest.raises(ValueError):
        digamma(0.0)
    with pytest.raises(ValueError):
        digamma(-2.5)


# ---------------------------------------------------------------------------
# pochhammer


def test_pochhammer_recurrence():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = float(rng.uniform(-5.0, 5.0))
        n = int(rng.integers(0, 51))
        assert_allclose(pochhammer(a, n + 1), pochhammer(a, n) * (a + n), rtol=1e-13)
    assert pochhammer(3.7, 0) == 1.0


# ---------------------------------------------------------------------------
# hyp2f1


def series_200(a, b, c, z):
    """Direct 200-term Gauss series, the bare-hands oracle."""
    total, term = 1.0, 1.0
    for n in range(200):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
    return total


def test_hyp2f1_empty_series():
    assert hyp2f1(0.3, 2.2, 1.7, 0.0) == 1.0


def test_hyp2f1_log_identity():
    # 2F1(1,1;2;z) = -log(1-z)/z
    assert hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(2.0 * math.log(2.0), rel=1e-13)


def test_hyp2f1_against_series_oracle():
    assert hyp2f1(0.5, 1.0, 1.5, 0.25) == pytest.approx(series_200(0.5, 1.0, 1.5, 0.25),
                                                        rel=1e-13)


def test_hyp2f1_transformation_consistency():
    # direct summation still converges above the 0.7 switch point; the
    # transformed evaluation must agree with brute force
    for (a, b, c) in [(0.5, 1.0, 2.0), (1.25, 1.0, 1.5), (0.5, 1.5, 3.0), (1.5, 1.0, 1.5)]:
        for z in (0.72, 0.8, 0.85):
            brute, term = 1.0, 1.0
            for n in range(4000):
                term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
                brute += term
            assert hyp2f1(a, b, c, z) == pytest.approx(brute, rel=1e-11)


def test_hyp2f1_negative_argument():
    a, b, c = 0.7, 1.3, 2.1
    for z in (-0.9, -0.75, -0.3):
        assert hyp2f1(a, b, c, z) == pytest.approx(series_200(a, b, c, z), rel=1e-12)


def test_hyp2f1_gauss_summation_trend():
    # 2F1(a,b;c;1-eps) -> Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b)) for c-a-b > 0
    a, b, c = 0.4, 0.7, 2.0
    limit = math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))
    errs = [abs(hyp2f1(a, b, c, 1.0 - eps) - limit) for eps in (1e-2, 1e-4, 1e-6)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4  # convergence rate is O(eps^{c-a-b}) = O(eps^0.9)


def test_hyp2f1_domain_errors():
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, 1.0)
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, -1.2)
    with pytest.raises(ValueError, match="regularized"):
        hyp2f1(0.5, 0.5, 0.0, 0.3)
    with pytest.raises(ValueError, match="regularized"):
        hyp2f1(0.5, 0.5, -2.0, 0.3)


def test_hyp2f1_polynomial_case():
    # negative-integer a terminates: valid even at |z| > 1
    assert hyp2f1(-2.0, 1.5, 0.5, 3.0) == pytest.approx(
        1.0 + (-2.0) * 1.5 / 0.5 * 3.0 + ((-2.0) * (-1.0) * 1.5 * 2.5 / (0.5 * 1.5) / 2.0) * 9.0)


# ---------------------------------------------------------------------------
# hyp2f1_regularized


def reg_series_oracle(a, b, c, z, nterms=400):
    """Term-by-term summation with explicit pole skipping, in mp arithmetic."""
    total = mp.mpf(0)
    for n in range(nterms):
        if c + n <= 0 and abs((c + n) - round(c + n)) < 1e-12:
            continue  # 1/Gamma at a pole: the term vanishes
        total += (mp.rf(a, n) * mp.rf(b, n) / mp.factorial(n)
                  * mp.rgamma(c + n) * mp.mpf(z) ** n)
    return float(total)


def test_regularized_trivial():
    assert hyp2f1_regularized(0.9, 2.0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_regularized_nonpositive_c():
    # c = 0: the n = 0 term vanishes and the sum starts at n = 1
    got = hyp2f1_regularized(1.0, 2.0, 0.0, 0.3)
    assert got == pytest.approx(reg_series_oracle(1.0, 2.0, 0.0, 0.3), rel=1e-12)
    got = hyp2f1_regularized(0.7, 1.1, -2.0, 0.4)
    assert got == pytest.approx(reg_series_oracle(0.7, 1.1, -2.0, 0.4), rel=1e-12)


def test_regularized_matches_unregularized():
    c = 1.5
    expected = hyp2f1(0.5, 1.0, c, 0.25) / math.gamma(c)
    assert hyp2f1_regularized(0.5, 1.0, c, 0.25) == pytest.approx(expected, rel=1e-12)


def test_regularized_vectorized():
    z = np.array([0.0, 0.1, 0.55, -0.3, 0.9])
    vec = hyp2f1_regularized(1.0, 1.5, 0.5, z)
    scal = [hyp2f1_regularized(1.0, 1.5, 0.5, float(zi)) for zi in z]
    assert_allclose(vec, scal, rtol=1e-13)


def test_regularized_domain():
    with pytest.raises(ValueError):
        hyp2f1_regularized(1.0, 1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# incomplete beta


def test_beta_inc_reg_endpoints_and_uniform():
    assert beta_inc_reg(0.0, 2.3, 4.5) == 0.0
    assert beta_inc_reg(1.0, 2.3, 4.5) == 1.0
    assert beta_inc_reg(0.5, 1.0, 1.0) == pytest.approx(0.5, rel=1e-14)


def test_beta_inc_reg_functional_equation():
    rng = np.random.default_rng(11)
    for _ in range(60):
        a, b = rng.uniform(0.1, 8.0, size=2)
        x = float(rng.uniform(0.0, 1.0))
        lhs = beta_inc_reg(x, float(a), float(b))
        rhs = 1.0 - beta_inc_reg(1.0 - x, float(b), float(a))
        assert abs(lhs - rhs) < 1e-12


def test_beta_inc_reg_against_quadrature():
    rng = np.random.default_rng(13)
    for _ in range(25):
        a, b = (float(v) for v in rng.uniform(0.2, 6.0, size=2))
        x = float(rng.uniform(0.05, 0.95))
        num, err = integrate.quad(lambda v: v ** (a - 1.0) * (1.0 - v) ** (b - 1.0), 0.0, x,
                                  epsabs=1e-13, epsrel=1e-12)
        den = math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))
        assert beta_inc_reg(x, a, b) == pytest.approx(num / den, rel=2e-11, abs=1e-13)
        assert beta_inc(x, a, b) == pytest.approx(num, rel=2e-11, abs=1e-13)


def test_beta_inc_reg_monotone():
    xs = np.linspace(0.0, 1.0, 101)
    vals = [beta_inc_reg(float(x), 0.7, 2.4) for x in xs]
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
    assert vals[0] == 0.0 and vals[-1] == 1.0


def test_beta_inc_reg_domain():
    with pytest.raises(ValueError):
        beta_inc_reg(-0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        beta_inc_reg(0.5, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Appell F1 Euler integral


def euler_lhs(alpha, beta, gam, x, y):
    """Left-hand integral, evaluated directly by adaptive quadrature."""

    def f(u):
        return (u ** (beta - 1.0) * (x - u) ** (gam - 1.0) * (1.0 - u) ** (-alpha)
                * hyp2f1_regularized(alpha, beta, gam, y * (x - u) / (1.0 - u)))

    val, err = integrate.quad(f, 0.0, x, epsabs=1e-12, epsrel=1e-11, limit=300)
    assert err < 1e-8 * max(1.0, abs(val))
    return val


def test_appell_specific_tuple():
    lhs = euler_lhs(0.7, 1.2, 0.9, 0.4, 0.3)
    assert appell_f1_euler(0.7, 1.2, 0.9, 0.4, 0.3) == pytest.approx(lhs, abs=1e-8)


def test_appell_y_zero_degeneracy():
    # at y = 0 the 2F1 factor collapses to 1/Gamma(gam) on the left side
    alpha, beta, gam, x = 0.8, 1.4, 1.1, 0.35
    direct, err = integrate.quad(
        lambda u: u ** (beta - 1.0) * (x - u) ** (gam - 1.0) * (1.0 - u) ** (-alpha),
        0.0, x, epsabs=1e-13, epsrel=1e-12)
    assert err < 1e-9
    assert appell_f1_euler(alpha, beta, gam, x, 0.0) == pytest.approx(
        direct / math.gamma(gam), rel=1e-9)


def test_appell_small_x_beta_scaling():
    # as x -> 0 both sides behave like x^{beta+gam-1} Gamma(beta)/Gamma(beta+gam)
    alpha, beta, gam, y = 0.6, 1.3, 0.8, 0.25
    x = 1e-5
    leading = x ** (beta + gam - 1.0) * math.gamma(beta) / math.gamma(beta + gam)
    assert appell_f1_euler(alpha, beta, gam, x, y) == pytest.approx(leading, rel=1e-3)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_appell_identity_random_tuples():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 20:
        alpha, beta, gam = (float(v) for v in rng.uniform(0.2, 1.8, size=3))
        if beta + gam <= alpha + 0.05:
            continue
        x = float(rng.uniform(0.05, 0.9))
        y = float(rng.uniform(-0.9, 0.9))
        lhs = euler_lhs(alpha, beta, gam, x, y)
        rhs = appell_f1_euler(alpha, beta, gam, x, y)
        assert abs(lhs - rhs) < 1e-8, (alpha, beta, gam, x, y)
        checked += 1


def test_appell_domain():
    with pytest.raises(ValueError):
        appell_f1_euler(2.0, 0.5, 0.5, 0.4, 0.3)  # beta+gamma <= alpha
    with pytest.raises(ValueError):
        appell_f1_euler(0.5, 0.5, 0.5, 1.5, 0.3)


# ---------------------------------------------------------------------------
# convergence failure is reported, not silent


def test_convergence_error_type_exists():
    assert issubclass(specfun.ConvergenceError, RuntimeError)
