import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from marcus_csf.levy import (
    JumpEvent,
    LevyMeasureSpec,
    MeasureError,
    PowerLawDensity,
    sample_jumps,
    small_moments,
    total_rate,
    validate,
)

SYM = LevyMeasureSpec(atoms=((0.3, 2.0), (-0.3, 2.0)))
DENS = LevyMeasureSpec(density=PowerLawDensity(c=0.5, alpha=1.2, z_max=0.8))


def test_validate_accepts():
    validate(SYM)
    validate(DENS)
    validate(LevyMeasureSpec())


@pytest.mark.parametrize(
    "m, msg",
    [
        (LevyMeasureSpec(atoms=((0.0, 1.0),)), "atom at zero"),
        (LevyMeasureSpec(atoms=((0.2, 0.0),)), "nonpositive rate"),
        (LevyMeasureSpec(atoms=((0.2, -1.0),)), "nonpositive rate"),
        (LevyMeasureSpec(density=PowerLawDensity(1.0, 2.5)), "second-moment condition"),
        (LevyMeasureSpec(density=PowerLawDensity(1.0, 0.0)), "second-moment condition"),
        (LevyMeasureSpec(density=PowerLawDensity(-1.0, 1.0)), "scale c"),
        (LevyMeasureSpec(density=PowerLawDensity(1.0, 1.0, sides="up")), "sides"),
    ],
)
def test_validate_rejects(m, msg):
    with pytest.raises(MeasureError, match=msg):
        validate(m)


def test_symmetry():
    assert SYM.is_symmetric
    assert DENS.is_symmetric
    assert not LevyMeasureSpec(atoms=((0.3, 2.0),)).is_symmetric
    assert not LevyMeasureSpec(density=PowerLawDensity(1.0, 1.0, sides="positive")).is_symmetric


def test_total_rate():
    assert total_rate(SYM, 0.1) == 4.0
    assert total_rate(SYM, 0.3) == 0.0
    d = DENS.density
    expect = 2 * 0.5 * (0.1**-1.2 - 0.8**-1.2) / 1.2
    assert total_rate(DENS, 0.1) == pytest.approx(expect, rel=1e-14)
    with pytest.raises(ValueError, match="infinite rate"):
        total_rate(DENS, 0.0)
    assert d.mass_above(0.9) == 0.0


def test_small_moments_atoms():
    m = LevyMeasureSpec(atoms=((0.5, 1.0), (0.05, 3.0), (2.0, 1.0)))
    b, s2 = small_moments(m, 0.1)
    assert b == 0.5  # the atom beyond 1 is not compensated
    assert s2 == pytest.approx(3.0 * 0.05**2)


def test_small_moments_density_quadrature():
    from scipy.integrate import quad

    d = PowerLawDensity(c=0.7, alpha=0.6, z_max=0.5, sides="positive")
    b, s2 = small_moments(LevyMeasureSpec(density=d), 0.2)
    nu = lambda z: 0.7 * z**-1.6
    assert b == pytest.approx(quad(lambda z: z * nu(z), 0.2, 0.5)[0], rel=1e-12)
    assert s2 == pytest.approx(quad(lambda z: z * z * nu(z), 0, 0.2)[0], rel=1e-10)


def test_alpha_one_first_moment():
    d = PowerLawDensity(c=1.0, alpha=1.0)
    assert d.first_moment(0.1, 1.0) == pytest.approx(np.log(10.0), rel=1e-14)


def test_jump_event_order():
    evs = sorted([JumpEvent(0.3, 1.0), JumpEvent(0.1, -1.0)])
    assert [e.t for e in evs] == [0.1, 0.3]


def test_no_jumps_when_all_below_threshold():
    assert sample_jumps(SYM, 0.5, 10.0, 1) == []
    assert sample_jumps(LevyMeasureSpec(), 0.1, 10.0, 1) == []


def test_sampling_is_deterministic():
    a = sample_jumps(DENS, 0.05, 3.0, 42)
    b = sample_jumps(DENS, 0.05, 3.0, 42)
    assert [(e.t, e.z) for e in a] == [(e.t, e.z) for e in b]
    c = sample_jumps(DENS, 0.05, 3.0, 43)
    assert [(e.t, e.z) for e in a] != [(e.t, e.z) for e in c]


@given(
    seed=st.integers(0, 2**64 - 1),
    T=st.floats(0.01, 20.0),
    delta=st.floats(0.02, 0.7),
)
def test_sample_invariants(seed, T, delta):
    m = LevyMeasureSpec(atoms=((0.9, 1.5), (-0.04, 2.0)), density=DENS.density)
    evs = sample_jumps(m, delta, T, seed)
    t = np.array([e.t for e in evs])
    z = np.array([e.z for e in evs])
    assert np.all(np.diff(t) >= 0)
    assert np.all((t >= 0) & (t <= T))
    assert np.all(z != 0) and np.all(np.abs(z) > delta)


@given(seed=st.integers(0, 2**32 - 1), T=st.floats(0.1, 5.0))
def test_longer_horizon_extends_prefix(seed, T):
    a = sample_jumps(DENS, 0.05, T, seed)
    b = sample_jumps(DENS, 0.05, 2.5 * T, seed)
    assert [(e.t, e.z) for e in b[: len(a)]] == [(e.t, e.z) for e in a]
    assert len(b) == len(a) or b[len(a)].t > T


def test_count_is_poisson():
    m = LevyMeasureSpec(atoms=((0.5, 3.0), (-0.2, 2.0)))
    counts = np.array([len(sample_jumps(m, 0.1, 2.0, s)) for s in range(3000)])
    # mean 10 and variance 10; 3000 samples give a standard error of ~0.058
    assert abs(counts.mean() - 10.0) < 4 * np.sqrt(10.0 / 3000)
    assert abs(counts.var() / 10.0 - 1.0) < 0.1


def test_atom_proportions():
    m = LevyMeasureSpec(atoms=((0.5, 3.0), (-0.2, 1.0)))
    z = np.array([e.z for e in sample_jumps(m, 0.1, 5000.0, 9)])
    p = np.mean(z == 0.5)
    assert abs(p - 0.75) < 4 * np.sqrt(0.75 * 0.25 / z.size)


def test_density_sizes_follow_truncated_power_law():
    d = PowerLawDensity(c=1.0, alpha=1.5, z_max=0.6)
    m = LevyMeasureSpec(density=d)
    delta = 0.05
    z = np.array([e.z for e in sample_jumps(m, delta, 200.0, 5)])
    assert abs(np.mean(z > 0) - 0.5) < 0.02
    a = np.abs(z)
    assert a.min() > delta and a.max() <= 0.6

    def cdf(x):
        x = np.clip(x, delta, 0.6)
        return (delta**-1.5 - x**-1.5) / (delta**-1.5 - 0.6**-1.5)

    assert stats.kstest(a, cdf).pvalue > 1e-3
