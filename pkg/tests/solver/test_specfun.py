"""Tests for Legendre tables, angular functions and radial functions."""

import math

import numpy as np
import pytest
from numpy.polynomial import legendre

from layered_gsm.solver.exceptions import (
    LegendreOverflowError,
    SpecialFunctionDomainError,
)
from layered_gsm.solver.specfun import (
    RadialKind,
    angular_functions,
    branch_sqrt,
    gauss_legendre,
    legendre_table,
    spherical_bessel,
)

REFERENCE_RTOL = 1e-10
ORTHONORMAL_ATOL = 1e-12
DERIVATIVE_RTOL = 1e-6
FINITE_DIFFERENCE_STEP = 1e-6
IMAGINARY_ARGUMENT = 1.31j
HIGH_DEGREE = 17
QUADRATURE_ORDER = 40


def reference_legendre(u: complex, l: int, m: int) -> complex:  # noqa: E741
    """Unit-norm Condon-Shortley Legendre function from Legendre series."""
    coefficients = np.zeros(l + 1)
    coefficients[l] = 1.0
    derivative = legendre.legval(u, legendre.legder(coefficients, m))
    s = complex(branch_sqrt(1.0 - u * u))
    norm = math.sqrt(
        (2 * l + 1) / 2 * math.factorial(l - m) / math.factorial(l + m)
    )
    return complex((-1) ** m * norm * s**m * derivative)


def test_branch_sqrt_takes_negative_imaginary_root() -> None:
    """Test that the branch cut gives sqrt(-1) = -j."""
    assert complex(branch_sqrt(-1.0)) == -1j
    assert complex(branch_sqrt(4.0)) == 2.0
    roots = branch_sqrt(np.array([-4.0 + 1e-3j, -4.0 - 1e-3j, 3.0j]))
    assert np.all(roots.imag <= 0)


def test_table_size() -> None:
    """Test that a table holds (L+1)(L+2)/2 entries per kind."""
    table = legendre_table(0.3, 5)
    assert table.size == 21
    assert table.values.shape[:2] == (6, 6)


def test_endpoint_values() -> None:
    """Test the normalized values at u = 1."""
    table = legendre_table(1.0, 2)
    assert table.value(1, 0) == pytest.approx(math.sqrt(1.5))
    assert table.value(2, 0) == pytest.approx(math.sqrt(2.5))
    for l in (1, 2):  # noqa: E741
        for m in range(1, l + 1):
            assert table.value(l, m) == 0


def test_condon_shortley_sign_at_origin() -> None:
    """Test P~_1^0(0) = 0 and P~_1^1(0) = -sqrt(3)/2."""
    table = legendre_table(0.0, 1)
    assert abs(table.value(1, 0)) < ORTHONORMAL_ATOL
    assert table.value(1, 1) == pytest.approx(-math.sqrt(3.0) / 2.0)


def test_real_argument_gives_real_values() -> None:
    """Test that values inside (-1, 1) are real."""
    table = legendre_table(np.linspace(-0.99, 0.99, 11), 8)
    assert np.all(table.values.imag == 0)


def test_orthonormality() -> None:
    """Test the unit norm and orthogonality on [-1, 1] by quadrature."""
    nodes, weights = gauss_legendre(QUADRATURE_ORDER)
    table = legendre_table(nodes, 10)
    for m in range(4):
        for l in range(max(m, 1), 11):  # noqa: E741
            for l2 in range(max(m, 1), 11):
                overlap = np.sum(
                    weights * table.values[l, m] * table.values[l2, m]
                )
                expected = 1.0 if l == l2 else 0.0
                assert abs(overlap - expected) < ORTHONORMAL_ATOL


def test_imaginary_argument_matches_series_reference() -> None:
    """Test the table at u = 1.31j against a Legendre-series reference."""
    table = legendre_table(IMAGINARY_ARGUMENT, HIGH_DEGREE)
    for l in range(HIGH_DEGREE + 1):  # noqa: E741
        for m in range(l + 1):
            expected = reference_legendre(IMAGINARY_ARGUMENT, l, m)
            assert complex(table.value(l, m)) == pytest.approx(
                expected, rel=REFERENCE_RTOL
            )


def test_derivative_matches_finite_difference() -> None:
    """Test dP~/du at a complex argument."""
    u = 0.3 + 0.2j
    step = FINITE_DIFFERENCE_STEP
    table = legendre_table(u, 6)
    upper = legendre_table(u + step, 6)
    lower = legendre_table(u - step, 6)
    for l in range(7):  # noqa: E741
        for m in range(l + 1):
            estimate = (upper.value(l, m) - lower.value(l, m)) / (2 * step)
            assert complex(table.derivative(l, m)) == pytest.approx(
                complex(estimate), rel=DERIVATIVE_RTOL, abs=1e-9
            )


def test_invalid_arguments() -> None:
    """Test the argument checks of legendre_table."""
    with pytest.raises(ValueError, match="l_max"):
        _ = legendre_table(0.5, 0)
    with pytest.raises(ValueError, match=r"\|u\| <= 1"):
        _ = legendre_table(1.5, 3)
    with pytest.raises(ValueError, match="finite"):
        _ = legendre_table(complex(np.nan, 0.0), 3)
    with pytest.raises(ValueError, match="degree/order"):
        _ = legendre_table(0.5, 3).value(2, 3)


def test_overflow_guard_names_degree_and_order() -> None:
    """Test that the magnitude cap raises with the offending (l, m)."""
    with pytest.raises(LegendreOverflowError, match=r"l=\d+, m=\d+") as info:
        _ = legendre_table(1000j, 64, overflow_cap=1e100)
    assert info.value.u == 1000j


def test_pi_vanishes_for_zero_order() -> None:
    """Test pi_l^0 = 0 at real and complex arguments."""
    for u in (0.4, 2.0j, 1.0):
        angular = angular_functions(legendre_table(u, 8))
        assert np.all(angular.pi_fn[:, 0] == 0)


def test_angular_functions_finite_at_poles() -> None:
    """Test that Delta and pi stay finite at u = +-1."""
    for u in (1.0, -1.0):
        angular = angular_functions(legendre_table(u, 10))
        assert np.all(np.isfinite(angular.delta))
        assert np.all(np.isfinite(angular.pi_fn))
        nonzero_orders = {
            m
            for l in range(1, 11)  # noqa: E741
            for m in range(l + 1)
            if abs(angular.pi_fn[l, m]) > 0 or abs(angular.delta[l, m]) > 0
        }
        assert nonzero_orders == {1}


def test_angular_functions_match_definition() -> None:
    """Test Delta = -(s/L) dP/du and pi = -m P / (L s) away from the poles."""
    u = 0.37
    table = legendre_table(u, 7)
    angular = angular_functions(table)
    s = math.sqrt(1.0 - u * u)
    for l in range(1, 8):  # noqa: E741
        norm = math.sqrt(l * (l + 1))
        for m in range(l + 1):
            delta = -s / norm * table.derivative(l, m)
            pi_fn = -m * table.value(l, m) / (norm * s)
            assert complex(angular.delta[l, m]) == pytest.approx(
                complex(delta), abs=1e-12
            )
            assert complex(angular.pi_fn[l, m]) == pytest.approx(
                complex(pi_fn), abs=1e-12
            )


def test_real_argument_gives_real_angular_functions() -> None:
    """Test that Delta and pi are real for real arguments."""
    angular = angular_functions(legendre_table(np.linspace(-1, 1, 9), 6))
    assert np.all(angular.delta.imag == 0)
    assert np.all(angular.pi_fn.imag == 0)


def test_outgoing_hankel_closed_form() -> None:
    """Test h_0^(2)(x) = j e^(-jx) / x and j_0(0) = 1."""
    x = 2.7
    outgoing = spherical_bessel(RadialKind.OUTGOING, 2, x)
    assert complex(outgoing[0]) == pytest.approx(1j * np.exp(-1j * x) / x)
    regular = spherical_bessel(RadialKind.REGULAR, 2, 0.0)
    assert np.allclose(regular, [1.0, 0.0, 0.0])


def test_outgoing_hankel_at_origin_raises() -> None:
    """Test that the outgoing kind refuses x = 0."""
    with pytest.raises(SpecialFunctionDomainError, match="singular"):
        _ = spherical_bessel(RadialKind.OUTGOING, 3, np.array([0.0, 1.0]))


def test_gauss_legendre_integrates_polynomials() -> None:
    """Test exactness for degree 2n-1 and the order bounds."""
    nodes, weights = gauss_legendre(5)
    assert np.sum(weights * nodes**8) == pytest.approx(2.0 / 9.0)
    with pytest.raises(ValueError, match="Quadrature order"):
        _ = gauss_legendre(0)


def test_angular_parity_under_reflection() -> None:
    """Test Delta and pi against their values at -u on a real grid."""
    u = np.linspace(-0.95, 0.95, 13)
    forward = angular_functions(legendre_table(u, HIGH_DEGREE))
    mirrored = angular_functions(legendre_table(-u, HIGH_DEGREE))
    for l in range(1, HIGH_DEGREE + 1):  # noqa: E741
        for m in range(l + 1):
            sign = (-1) ** (l + m)
            assert np.allclose(
                mirrored.delta[l, m], -sign * forward.delta[l, m], atol=1e-12
            )
            assert np.allclose(
                mirrored.pi_fn[l, m], sign * forward.pi_fn[l, m], atol=1e-12
            )


@pytest.mark.parametrize("x", [0.5, 5.0, 20.0])
def test_bessel_wronskian(x: float) -> None:
    """Test j_l h_l^(2)' - j_l' h_l^(2) = -j / x^2 for l <= 17."""
    regular = spherical_bessel(RadialKind.REGULAR, HIGH_DEGREE, x)
    regular_prime = spherical_bessel(
        RadialKind.REGULAR, HIGH_DEGREE, x, derivative=True
    )
    outgoing = spherical_bessel(RadialKind.OUTGOING, HIGH_DEGREE, x)
    outgoing_prime = spherical_bessel(
        RadialKind.OUTGOING, HIGH_DEGREE, x, derivative=True
    )
    wronskian = regular * outgoing_prime - regular_prime * outgoing
    expected = -1j / x**2
    assert np.allclose(wronskian, expected, rtol=REFERENCE_RTOL, atol=0.0)
