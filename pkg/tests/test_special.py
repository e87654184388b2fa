"""Scalar special functions: frozen reference values and identities.

Frozen literals were computed with an arbitrary-precision library at build
time and rounded to float64; see test_oracle_crosscheck for live re-checks.
"""

import cmath
import math

import pytest

from hardyz.special import (
    ConfigurationError,
    DomainError,
    PrecisionError,
    PrecisionPolicy,
    digamma,
    lambert_w0,
    log_gamma,
    phase_gap,
    psi_rs,
    theta,
    theta_prime,
)


def _close_c(a: complex, b: complex, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


class TestLogGamma:
    def test_frozen_values(self):
        assert _close_c(log_gamma(0.25 + 209j),
                        complex(-328.71307715106578, 907.1552094194738), 1e-12)
        assert _close_c(log_gamma(-3.7 + 2.1j),
                        complex(-6.9927710082527355, -10.095443779952702), 1e-12)
        assert _close_c(log_gamma(0.25 + 10j),
                        complex(-15.36459276029524, 12.634193666938486), 1e-12)

    def test_real_positive_matches_lgamma(self):
        for x in (0.5, 1.0, 2.0, 3.7, 12.3, 150.0):
            ref = math.lgamma(x)
            assert abs(log_gamma(x).real - ref) <= 1e-13 * max(1.0, abs(ref))
            assert log_gamma(x).imag == 0.0

    def test_conjugate_symmetry(self):
        for z in (0.25 + 5j, 3.0 + 40j, -2.3 + 0.7j, 0.1 + 123.4j):
            assert _close_c(log_gamma(z.conjugate()),
                            log_gamma(z).conjugate(), 1e-13)

    def test_recurrence(self):
        # exp(log G(z+1) - log G(z)) = z, branch-insensitive form
        for z in (0.25 + 3j, 1.5 + 25j, -4.2 + 1.1j):
            assert _close_c(cmath.exp(log_gamma(z + 1) - log_gamma(z)), z, 1e-12)

    def test_poles(self):
        for z in (0.0, -1.0, -5.0):
            with pytest.raises(DomainError):
                log_gamma(z)


class TestDigamma:
    def test_recurrence_identity(self):
        for z in (0.3 + 2j, 5.0 + 0.5j, -2.6 + 1.3j, 0.25 + 100j):
            assert _close_c(digamma(z + 1), digamma(z) + 1.0 / z, 1e-12)

    def test_matches_log_gamma_derivative(self):
        h = 1e-6
        for z in (1.5 + 4j, 0.25 + 30j, 8.0 - 2.0j):
            fd = (log_gamma(z + h) - log_gamma(z - h)) / (2.0 * h)
            assert _close_c(digamma(z), fd, 1e-6)

    def test_poles(self):
        with pytest.raises(DomainError):
            digamma(0.0)
        with pytest.raises(DomainError):
            digamma(-2.0)


class TestTheta:
    def test_frozen_values(self):
        # contract: absolute phase error <= 1e-8 on |t| <= 1e6
        assert abs(theta(418.0) - 667.90666327694915) <= 1e-8
        assert abs(theta(1000.0) - 2034.5464280380316) <= 1e-8
        assert abs(theta(7005.0) - 21072.406933139438) <= 1e-8
        assert abs(theta(100000.0) - 433752.02722917078) <= 1e-8

    def test_derivative_frozen_and_monotone(self):
        assert abs(theta_prime(418.0) - 2.0988020638219153) <= 1e-10
        assert theta_prime(100.0) < theta_prime(1000.0) < theta_prime(100000.0)

    def test_odd_in_t(self):
        for t in (17.0, 418.0, 9999.5):
            assert abs(theta(-t) + theta(t)) <= 1e-9

    def test_minimum_region(self):
        # single interior minimum: derivative changes sign near t ~ 6.29
        assert theta_prime(6.0) < 0.0 < theta_prime(6.6)
        assert abs(theta(6.2898) - (-3.530972829)) <= 1e-6

    def test_policy_bound(self):
        with pytest.raises(PrecisionError):
            theta(1.5e6)
        wide = PrecisionPolicy(max_t=2e6)
        assert math.isfinite(theta(1.5e6, wide))

    def test_complex_conjugate_symmetry(self):
        for t in (418.0 + 0.05j, 1000.0 + 0.3j):
            assert _close_c(theta(t.conjugate()), theta(t).conjugate(), 1e-12)
            assert _close_c(theta_prime(t.conjugate()),
                            theta_prime(t).conjugate(), 1e-12)


class TestLambertW:
    def test_frozen_values(self):
        assert abs(lambert_w0(1.0) - 0.5671432904097838) <= 1e-13
        assert abs(lambert_w0(10.0) - 1.7455280027406994) <= 1e-13
        assert abs(lambert_w0(-0.25) - (-0.3574029561813889)) <= 1e-13
        assert abs(lambert_w0(1e6) - 11.383358086140053) <= 1e-12

    def test_residual_contract(self):
        xs = [-0.35, -0.2, -0.05, 0.0, 1e-6, 0.5, 1.0, 10.0, 1e3, 1e6, 1e9, 1e12]
        for x in xs:
            w = lambert_w0(x)
            assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))

    def test_domain(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)
        # the branch point itself maps to -1
        assert abs(lambert_w0(-1.0 / math.e) - (-1.0)) <= 1e-6


class TestPhaseGap:
    def test_frozen_value(self):
        assert abs(phase_gap(418.0) - (-4.9840527006603e-5)) <= 1e-12

    def test_matches_direct_subtraction_at_moderate_t(self):
        # at t ~ 100 the direct difference still has ~1e-11 of float64 headroom
        for t in (100.0, 418.0, 1000.0):
            direct = (t / 2.0) * math.log(t / (2.0 * math.pi)) - t / 2.0 \
                - math.pi / 8.0 - theta(t)
            assert abs(phase_gap(t) - direct) <= 1e-10

    def test_decays(self):
        assert abs(phase_gap(1e5)) < abs(phase_gap(1e3)) < abs(phase_gap(20.0))


class TestPsi:
    def test_reduced_forms_at_quarters(self):
        assert psi_rs(0.25) == 0.5
        assert psi_rs(0.75) == 0.5

    def test_direct_formula_away_from_quarters(self):
        for p in (0.05, 0.1, 0.5, 0.62, 0.9):
            ref = math.cos(2.0 * math.pi * (p * p - p - 1.0 / 16.0)) \
                / math.cos(2.0 * math.pi * p)
            assert abs(psi_rs(p) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_continuity_across_switch(self):
        # the reduced form hands over to the direct one at |p - 1/4| = 1e-3
        for c in (0.25, 0.75):
            inner = psi_rs(c + 1e-3 - 1e-9)
            outer = psi_rs(c + 1e-3 + 1e-9)
            assert abs(inner - outer) <= 1e-6
            inner = psi_rs(c - 1e-3 + 1e-9)
            outer = psi_rs(c - 1e-3 - 1e-9)
            assert abs(inner - outer) <= 1e-6

    def test_first_derivative_matches_fd(self):
        h = 1e-5
        for p in (0.1, 0.5, 0.62):
            fd = (psi_rs(p + h) - psi_rs(p - h)) / (2.0 * h)
            assert abs(psi_rs(p, 1) - fd) <= 1e-5 * max(1.0, abs(fd))

    def test_domain_and_order_validation(self):
        with pytest.raises(DomainError):
            psi_rs(1.0)
        with pytest.raises(DomainError):
            psi_rs(-0.1)
        with pytest.raises(ConfigurationError):
            psi_rs(0.5, -1)
        with pytest.raises(ConfigurationError):
            psi_rs(0.5, 9)
