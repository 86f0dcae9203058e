"""Test functions, phi evaluation, identity term.

Frozen expected values were produced by an independent trapezoid oracle
(spectrally accurate here: every derivative of the mollifier transform
vanishes at both endpoints of its support), which is also run inline for
one configuration.
"""

import numpy as np
import pytest

from tracebench.analysis import (
    PlancherelModel,
    TestFunction,
    fourier_roundtrip,
    identity_term,
    mollifier_family,
    phi_at,
    plancherel_density,
)
from tracebench.errors import ArgumentOutOfStrip, QuadratureNotConverged


def _oracle_phi(T, k, lams):
    t = np.linspace(0, T, 4001)
    with np.errstate(divide="ignore"):
        expo = -k * T * T / np.maximum(T * T - t * t, 1e-300)
    hat = np.exp(expo)
    hat[-1] = 0.0
    out = np.trapezoid(hat[None, :] * np.cos(t[None, :] * lams[:, None]), t, axis=1)
    return 2 * out / np.sqrt(2 * np.pi)


def test_mollifier_shape():
    f = mollifier_family(2.0, 2)
    assert f.hat(2.0) == 0.0
    assert f.hat(-2.0) == 0.0
    assert f.hat(5.0) == 0.0
    assert f.hat(0.0) == pytest.approx(np.exp(-2.0), rel=1e-15)
    assert f.hat(0.6) == f.hat(-0.6)
    with pytest.raises(ValueError):
        mollifier_family(-1.0, 2)
    with pytest.raises(ValueError):
        mollifier_family(2.0, 0)
    with pytest.raises(ValueError):
        TestFunction(T=2.0, family="sinc")


def test_phi_matches_oracle():
    lams = np.linspace(0.0, 6.0, 13)
    for T, k in ((2.0, 1), (4.0, 2)):
        f = mollifier_family(T, k)
        want = _oracle_phi(T, k, lams)
        got = np.array([phi_at(f, x).real for x in lams])
        assert np.max(np.abs(got - want)) < 1e-12


def test_phi_even_complex(rng):
    f = mollifier_family(2.0, 2)
    for _ in range(100):
        lam = complex(rng.uniform(-5, 5), rng.uniform(-20, 20))
        assert abs(phi_at(f, lam) - phi_at(f, -lam)) <= 1e-12 * max(
            1.0, abs(phi_at(f, lam))
        )


def test_phi_real_on_axes(rng):
    f = mollifier_family(2.0, 2)
    for _ in range(20):
        v = phi_at(f, rng.uniform(-4, 4))
        assert abs(v.imag) <= 1e-12 * abs(v) + 1e-300
        w = phi_at(f, 1j * rng.uniform(-20, 20))
        assert abs(w.imag) <= 1e-12 * abs(w) + 1e-300
    assert phi_at(f, 0.5j).real > 0


def test_phi_peak_at_zero():
    f = mollifier_family(2.0, 1)
    p0 = phi_at(f, 0.0).real
    for x in np.linspace(0.05, 8.0, 40):
        assert abs(phi_at(f, x)) <= p0 + 1e-15


def test_paley_wiener_bound():
    f = mollifier_family(2.0, 2)
    t = np.linspace(0, f.T, 4001)
    hat_l1 = 2 * np.trapezoid(f.hat(t), t)
    rng = np.random.default_rng(3)
    for _ in range(30):
        lam = complex(rng.uniform(-6, 6), rng.uniform(-24, 24))
        bound = hat_l1 / np.sqrt(2 * np.pi) * np.exp(f.T * abs(lam.imag))
        assert abs(phi_at(f, lam)) <= bound * (1 + 1e-10)


def test_strip_guard():
    f = mollifier_family(2.0, 2)
    with pytest.raises(ArgumentOutOfStrip):
        phi_at(f, 1.0 + 26.0j)
    # right at the boundary is fine
    phi_at(f, 1.0 + 24.9j)


def test_plancherel_density_basics():
    assert plancherel_density(0.0) == 0.0
    lam = np.linspace(-8, 8, 41)
    vals = plancherel_density(lam)
    assert np.all(vals >= 0)
    assert np.allclose(vals, plancherel_density(-lam))
    model = PlancherelModel()
    assert model.rho == 0.5
    assert model.beta(1.3) == plancherel_density(1.3)


def test_identity_term_frozen_values():
    vol = 4 * np.pi
    # values pinned from two independent quadratures agreeing to ~1e-10
    assert identity_term(mollifier_family(2, 2), 1, vol) == pytest.approx(
        0.2917478748, abs=2e-9
    )
    assert identity_term(mollifier_family(4, 2), 1, vol) == pytest.approx(
        0.1348439029, abs=2e-9
    )
    assert identity_term(mollifier_family(2, 1), 1, vol) == pytest.approx(
        0.596514428, abs=3e-8
    )


def test_identity_term_linearity():
    f = mollifier_family(2, 2)
    base = identity_term(f, 1, 4 * np.pi)
    assert identity_term(f, 3, 4 * np.pi) == pytest.approx(3 * base, rel=1e-13)
    assert identity_term(f, 1, 8 * np.pi) == pytest.approx(2 * base, rel=1e-13)
    with pytest.raises(ValueError):
        identity_term(f, 0, 4 * np.pi)
    with pytest.raises(ValueError):
        identity_term(f, 1, -1.0)


def test_identity_term_oracle_and_diagnostics():
    T, k = 2.0, 2
    f = mollifier_family(T, k)
    lam = np.linspace(0, 200, 100001)
    phis = np.empty_like(lam)
    for i in range(0, lam.size, 1000):
        phis[i : i + 1000] = _oracle_phi(T, k, lam[i : i + 1000])
    oracle = 4 * np.pi * np.trapezoid(phis * plancherel_density(lam), lam)
    diag = {}
    mine = identity_term(f, 1, 4 * np.pi, diagnostics=diag)
    assert mine == pytest.approx(oracle, rel=1e-8)
    assert diag["lambda_max"] > 20
    assert diag["tail_estimate"] <= 1e-9 * abs(mine)


def test_fourier_roundtrip():
    assert fourier_roundtrip(mollifier_family(2, 1)) <= 1e-8
    assert fourier_roundtrip(mollifier_family(4, 2)) <= 1e-8


def test_fourier_roundtrip_zero_function():
    class ZeroHat:
        T = 2.0
        quad_order = 32

        def hat(self, t):
            return np.zeros_like(np.asarray(t, dtype=float))

    assert fourier_roundtrip(ZeroHat()) == 0.0


def test_quadrature_guard_on_rough_integrand():
    class RoughHat:
        # aliasing noise that panel refinement can never settle
        T = 2.0
        quad_order = 8

        def hat(self, t):
            t = np.asarray(t, dtype=float)
            return np.cos(1.7e7 * t) ** 2

    with pytest.raises(QuadratureNotConverged):
        phi_at(RoughHat(), 1.0)
