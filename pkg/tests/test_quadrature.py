import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critdebt.asymptotics import small_b_summand
from critdebt.errors import InputError, NoConvergence, NoRoot, QuadratureFailure
from critdebt.quadrature import euler_maclaurin_integral, integrate
from critdebt.solvers import SolveConfig, bisect, fixed_point

# mpmath, 200 digits: sum_{j=1}^{100} of the small-b terms at B = 4, kappa = 1, b = 0.1
SMALL_B_SUM = 41.959111713956585426
B_SMALL = 0.1


def test_constant_integrand_is_exact():
    assert integrate(lambda x: np.ones_like(x), 0.0, 1.0) == 1.0


@pytest.mark.parametrize("k", [10, 1e3, 1e6, 1e8])
def test_reciprocal_gives_log(k):
    assert integrate(lambda x: 1 / x, 1.0, k) == pytest.approx(math.log(k), abs=1e-10)


def test_reversed_and_empty_intervals():
    f = lambda x: x**2  # noqa: E731
    assert integrate(f, 2.0, 0.0) == pytest.approx(-8 / 3, rel=1e-14)
    assert integrate(f, 1.0, 1.0) == 0.0


def test_narrow_peak_on_wide_interval():
    # mass concentrated near x = 1e-3 * 1e8 inside [1, 1e8]
    f = lambda x: np.exp(-((x - 1e5) / 50.0) ** 2)  # noqa: E731
    assert integrate(f, 1.0, 1e8, points=[1e5]) == pytest.approx(50 * math.sqrt(math.pi), rel=1e-10)


def test_panel_limit_raises():
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: np.sin(1 / x), 1e-9, 1.0, max_intervals=20)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.0, 3.0))
def test_polynomial_exact(a, width):
    # GK15 integrates degree <= 22 polynomials exactly
    f = lambda x: 3 * x**5 - x**2 + 7  # noqa: E731
    F = lambda x: x**6 / 2 - x**3 / 3 + 7 * x  # noqa: E731
    b = a + width
    assert integrate(f, a, b) == pytest.approx(F(b) - F(a), rel=1e-13, abs=1e-12)


def test_euler_maclaurin_orders_approach_the_sum():
    B, kappa, k = 4.0, 1.0, 100
    f = small_b_summand(B, kappa)
    errs = [abs(euler_maclaurin_integral(f, 1.0, k, order=o) - B_SMALL * SMALL_B_SUM) for o in (0, 1, 2)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_euler_maclaurin_polynomial_sum_exact():
    # sum_{j=1}^{10} j^2 = 385; EM with two terms is exact for quadratics
    f = lambda x: x**2  # noqa: E731
    assert euler_maclaurin_integral(f, 1, 10, order=2, fprime=lambda x: 2 * x) == pytest.approx(385, rel=1e-14)
    assert euler_maclaurin_integral(f, 1, 10, order=2) == pytest.approx(385, rel=1e-10)


def test_euler_maclaurin_rejects_order():
    with pytest.raises(ValueError):
        euler_maclaurin_integral(lambda x: x, 0, 1, order=3)


def test_fixed_point_cosine():
    x = fixed_point(math.cos, 1.0, SolveConfig(tol=1e-14))
    assert x == pytest.approx(0.7390851332151607, abs=1e-13)


def test_fixed_point_damping_tames_oscillation():
    # slope 0.2 - x ~ -1.78 at the root: plain iteration oscillates away
    g = lambda x: 3 - x * x / 2 + x / 5  # noqa: E731
    root = -0.8 + math.sqrt(0.64 + 6)  # x^2 / 2 + 0.8 x - 3 = 0
    with pytest.raises(NoConvergence):
        fixed_point(g, 1.5, SolveConfig(max_iter=500))
    x = fixed_point(g, 1.5, SolveConfig(damping=0.4, tol=1e-13))
    assert x == pytest.approx(root, rel=1e-11)


def test_fixed_point_non_finite():
    with pytest.raises(NoConvergence) as info:
        fixed_point(lambda x: x * x + 10, 2.0)
    assert info.value.last is not None


def test_solve_config_validation():
    with pytest.raises(InputError):
        SolveConfig(tol=0)
    with pytest.raises(InputError):
        SolveConfig(max_iter=0)
    with pytest.raises(InputError):
        SolveConfig(damping=1.5)


def test_bisect():
    assert bisect(lambda x: x**3 - 2, 0, 2) == pytest.approx(2 ** (1 / 3), rel=1e-12)
    with pytest.raises(NoRoot):
        bisect(lambda x: x * x + 1, -1, 1)
