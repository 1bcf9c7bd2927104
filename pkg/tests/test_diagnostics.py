import numpy as np
import pytest
from hypothesis import given, strategies as st

from marcus_csf.diagnostics import (
    C1_DEFAULT,
    DiagnosticsSeries,
    FitError,
    SeriesRecorder,
    energy_residual,
    fit_decay,
    h_decay_bound,
    k1_rate,
    v_monotone,
    w21_budget,
)
from marcus_csf.spectral import SpectralField, norm_H2, norm_L1_dx


def series(t, H2, V2, diss=None, trunc=None, **kw):
    n = len(t)
    z = np.zeros(n)
    return DiagnosticsSeries(t, H2, V2, z if diss is None else diss, z if trunc is None else trunc,
                             np.zeros(n, dtype=int), **kw)


def test_isometric_series_has_zero_residual():
    t = np.linspace(0, 1, 11)
    s = series(t, np.full(11, 2.0), np.full(11, 3.0))
    assert energy_residual(s) == 0.0


def test_residual_is_max_abs():
    t = np.linspace(0, 1, 3)
    s = series(t, np.ones(3), np.array([1.0, 0.7, 0.5]), diss=np.array([0.0, 0.3, 0.4]), trunc=np.array([0, 0, 0.05]))
    assert energy_residual(s) == pytest.approx(0.05)


def test_k1_rate():
    assert k1_rate(0.0) == 4.0
    assert k1_rate(3.0, C1=1.0) == 0.25
    assert C1_DEFAULT == 0.5


def test_h_decay_bound_pass_and_fail():
    V0 = 1.0
    k1 = k1_rate(V0)
    t = np.linspace(0, 2, 21)
    ok = series(t, np.exp(-k1 * t), np.full(21, V0))
    assert h_decay_bound(ok, V0)
    bad_H = np.exp(-k1 * t)
    bad_H[7] *= 1.01
    res = h_decay_bound(series(t, bad_H, np.full(21, V0)), V0)
    assert not res and res.first_violation == t[7]
    assert res.lhs > res.rhs


def test_h_decay_bound_slack():
    t = np.array([0.0, 1.0])
    k1 = k1_rate(1.0)
    H = np.array([1.0, np.exp(-k1) * (1 + 5e-7)])
    assert h_decay_bound(series(t, H, np.ones(2)), 1.0)
    H[1] = np.exp(-k1) * (1 + 2e-6)
    assert not h_decay_bound(series(t, H, np.ones(2)), 1.0)


def test_v_monotone():
    t = np.arange(4.0)
    assert v_monotone(series(t, np.ones(4), np.array([1.0, 0.9, 0.9 + 5e-9, 0.5])))
    r = v_monotone(series(t, np.ones(4), np.array([1.0, 0.9, 0.9 + 2e-8, 0.5])))
    assert not r and r.first_violation == 2.0


def test_fit_recovers_exact_exponential():
    t = np.linspace(0, 3, 301)
    s = series(t, np.ones(301), 2.5 * np.exp(-7.25 * t))
    fit = fit_decay(s)
    assert abs(fit.k0_hat - 7.25) <= 1e-9 * 7.25
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert fit.window == (1.5, 3.0)
    assert fit.k0_sufficient == pytest.approx(k1_rate(2.5) / 4)


def test_fit_errors():
    t = np.linspace(0, 1, 8)
    with pytest.raises(FitError):
        fit_decay(series(t, np.ones(8), np.exp(-t)))
    t = np.linspace(0, 1, 50)
    with pytest.raises(FitError):
        fit_decay(series(t, np.ones(50), np.where(t > 0.8, 0.0, 1.0)))
    with pytest.raises(FitError, match="not positive"):
        fit_decay(series(t, np.ones(50), np.exp(t)), require_positive=True)


def test_w21_budget():
    t = np.linspace(0, 1, 11)
    s = series(t, np.ones(11), np.ones(11), L1dx=np.ones(11), L1dxx=np.ones(11))
    r = w21_budget(s, 1.0)
    assert r and r.lhs == pytest.approx(1.0) and r.rhs == 2.0
    assert not w21_budget(s, 0.5)
    with pytest.raises(ValueError):
        w21_budget(series(t, np.ones(11), np.ones(11)), 1.0)


def test_recorder_and_take():
    rec = SeriesRecorder(with_l1=True)
    for i in range(5):
        rec.append(float(i), 1.0, 2.0, 0.0, 0.0, i, 0.5, 0.25)
    s = rec.finish()
    assert len(s) == 5 and s.has_l1 and s.columns[-2:] == ("L1dx", "L1dxx")
    sub = s.take([0, 2, 4])
    assert list(sub.t) == [0.0, 2.0, 4.0] and sub.n_jumps.dtype == np.int64
    assert len(SeriesRecorder(False).finish()) == 0


def test_length_mismatch():
    with pytest.raises(ValueError):
        DiagnosticsSeries([0, 1], [1], [1, 1], [0, 0], [0, 0], [0, 0])


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 24), decay=st.floats(0.0, 3.0))
def test_poincare_constant(seed, n, decay):
    # ||v||_L2 <= C1 ||v'||_L1 for mean-zero periodic v with C1 = 1/2
    rng = np.random.default_rng(seed)
    k = np.arange(1, n + 1, dtype=float)
    f = SpectralField((rng.standard_normal(n) + 1j * rng.standard_normal(n)) * k**-decay)
    assert np.sqrt(norm_H2(f)) <= C1_DEFAULT * norm_L1_dx(f) * (1 + 1e-9)


def test_zero_trajectory():
    t = np.linspace(0, 1, 20)
    z = np.zeros(20)
    s = series(t, z, z, L1dx=z, L1dxx=z)
    assert energy_residual(s) == 0.0
    assert h_decay_bound(s, 0.0)
    assert w21_budget(s, 0.0)


@given(seed=st.integers(0, 2**32 - 1), stride=st.integers(1, 7))
def test_decay_bound_decimation(seed, stride):
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(0, 2, 40))
    t[0] = 0.0
    V0 = 0.5
    H = np.exp(-k1_rate(V0) * t) * rng.uniform(0.98, 1.0, 40)
    H[0] = 1.0
    s = series(t, H, np.full(40, V0))
    full = h_decay_bound(s, V0)
    sub = h_decay_bound(s.take(np.arange(0, 40, stride)), V0)
    assert full.passed <= sub.passed
