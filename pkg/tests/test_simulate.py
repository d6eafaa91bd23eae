import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavestab.core import (
    Field,
    Gaussian,
    Grid1D,
    RandomIC,
    RunConfig,
    Scheme,
    SineMode,
    Stencil,
    build_stencil,
    initial_field,
    l2_norm,
    linf_norm,
)
from wavestab.simulate import (
    apply_step,
    dft_coefficient,
    empirical_amplification,
    error_evolution,
    evolve_error,
    exact_solution,
    mode_ratios,
    run_simulation,
)
from wavestab.von_neumann import ModeSpec, amplification_factor, max_amplification


def brute_step(values, stencil):
    """Loop oracle with explicit modular indexing."""
    n = len(values)
    return np.array(
        [sum(c * values[(i + j) % n] for j, c in stencil.as_dict().items()) for i in range(n)]
    )


@pytest.mark.parametrize("scheme", list(Scheme))
def test_constant_field_is_preserved(scheme):
    f = Field(np.full(9, 2.5))
    out = apply_step(f, build_stencil(scheme, 0.7))
    np.testing.assert_allclose(out.values, 2.5, rtol=1e-15)
    assert out.time_level == 1


def test_ftbs_unit_courant_shifts_right():
    v = np.random.default_rng(3).normal(size=17)
    out = apply_step(Field(v), build_stencil(Scheme.FT_BS, 1.0))
    np.testing.assert_array_equal(out.values, np.roll(v, 1))


def test_ftcs_spike_by_hand():
    out = apply_step(Field([1.0, 0, 0, 0]), build_stencil(Scheme.FT_CS, 0.5))
    np.testing.assert_array_equal(out.values, [1.0, 0.25, 0.0, -0.25])


@pytest.mark.parametrize("scheme", list(Scheme))
def test_matches_loop_oracle(scheme):
    v = np.random.default_rng(7).uniform(-1, 1, 12)
    s = build_stencil(scheme, 0.63)
    np.testing.assert_allclose(apply_step(Field(v), s).values, brute_step(v, s), atol=1e-15)


def test_apply_step_does_not_alias():
    f = Field(np.arange(5.0))
    before = f.values.copy()
    out = apply_step(f, build_stencil(Scheme.FT_BS, 0.5))
    np.testing.assert_array_equal(f.values, before)
    assert out.values is not f.values


def test_apply_step_flags_divergence():
    out = apply_step(Field([1e308, 1e308, 1e308]), Stencil((0, 1), (10.0, -9.0), 0.0))
    assert out.diverged


@settings(max_examples=100)
@given(
    coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=4),
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(3, 50),
)
def test_mass_conservation(coeffs, seed, n):
    # make the stencil consistent by adjusting the centre weight
    offsets = list(range(-1, -1 + len(coeffs)))
    coeffs = list(coeffs)
    coeffs[offsets.index(0) if 0 in offsets else 0] += 1 - math.fsum(coeffs)
    s = Stencil(tuple(offsets), tuple(coeffs), 0.0)
    v = np.random.default_rng(seed).uniform(-1, 1, n)
    out = apply_step(Field(v), s)
    scale = np.abs(v).sum() * sum(abs(c) for c in coeffs)
    assert abs(out.values.sum() - v.sum()) <= 1e-13 * max(scale, 1.0)


@settings(max_examples=100)
@given(seed=st.integers(0, 2**32 - 1), C=st.floats(-2, 2), scheme=st.sampled_from(list(Scheme)))
def test_linearity(seed, C, scheme):
    rng = np.random.default_rng(seed)
    E = rng.normal(size=32)
    eps = 1e-10 * rng.normal(size=32)
    s = build_stencil(scheme, C)
    lhs = apply_step(Field(E + eps), s).values - apply_step(Field(E), s).values - apply_step(Field(eps), s).values
    assert linf_norm(lhs) <= 1e-12 * (linf_norm(E) + linf_norm(eps))


def test_run_simulation_ftbs_stable():
    cfg = RunConfig(a=1.0, dx=1 / 200, courant=0.9, n_cells=200, n_steps=400, ic=Gaussian())
    rec = run_simulation(cfg, Scheme.FT_BS)
    assert rec.diverged_at is None
    assert len(rec.per_step_l2) == 401
    assert np.all(rec.l2_ratios <= 1 + 1e-12)


def test_run_simulation_ftcs_growth_rate():
    n = 64
    cfg = RunConfig(a=1.0, dx=1 / n, courant=0.5, n_cells=n, n_steps=50, ic=SineMode(n // 4))
    rec = run_simulation(cfg, Scheme.FT_CS)
    assert rec.growth_rate_estimate == pytest.approx(math.sqrt(1.25), abs=1e-3)


@pytest.mark.parametrize("scheme", [Scheme.FT_CS, Scheme.FT_FS, Scheme.FT_BS])
def test_identity_run_keeps_norms(scheme):
    cfg = RunConfig(courant=0.0, n_cells=50, n_steps=20, ic=Gaussian())
    rec = run_simulation(cfg, scheme)
    np.testing.assert_array_equal(rec.per_step_l2, rec.per_step_l2[0])
    np.testing.assert_array_equal(rec.per_step_linf, rec.per_step_linf[0])


def test_divergence_is_recorded_not_raised():
    cfg = RunConfig(courant=1.5, n_cells=64, n_steps=5000, ic=RandomIC(1.0, 5))
    rec = run_simulation(cfg, Scheme.FT_FS)
    assert rec.diverged_at is not None
    assert len(rec.per_step_l2) == rec.diverged_at
    assert np.all(np.isfinite(rec.per_step_l2))
    assert rec.final_field.diverged


def test_exact_solution_at_zero_matches_ic():
    grid = Grid1D(40, 0.05)
    for ic in (Gaussian(), SineMode(3)):
        np.testing.assert_array_equal(exact_solution(ic, 1.3, 0.0, grid).values, initial_field(ic, grid).values)


def test_exact_solution_full_period():
    grid = Grid1D(40, 0.05)
    for ic in (Gaussian(), SineMode(3)):
        a = 0.7
        t = grid.length / a
        np.testing.assert_allclose(
            exact_solution(ic, a, t, grid).values, initial_field(ic, grid).values, atol=1e-12
        )


def test_exact_solution_quarter_period():
    grid = Grid1D(20, 0.1)
    L = grid.length
    x = (np.arange(20) + 0.5) * 0.1
    got = exact_solution(SineMode(1), 1.0, L / 4, grid).values
    np.testing.assert_allclose(got, np.cos(2 * np.pi * (x - L / 4) / L), atol=1e-14)


def test_exact_solution_rejects_random():
    with pytest.raises(ValueError):
        exact_solution(RandomIC(), 1.0, 0.0, Grid1D(10))


def test_dft_coefficient_against_fft():
    v = np.random.default_rng(11).normal(size=30)
    ref = np.fft.fft(v) / 30
    for n in range(16):
        assert dft_coefficient(v, n) == pytest.approx(ref[n], abs=1e-14)


def test_empirical_exact_shift():
    for n in (1, 5, 9):
        mode = ModeSpec(n, 32)
        g = empirical_amplification(Scheme.FT_BS, 1.0, mode, 32)
        assert abs(g - np.exp(-1j * mode.theta)) <= 1e-12


def test_empirical_ftcs_quarter():
    g = empirical_amplification(Scheme.FT_CS, 0.5, ModeSpec(16, 64), 64)
    assert abs(g - (1 - 0.5j)) <= 1e-10


def test_empirical_lax_third():
    # theta = pi/3 -> n = N/6
    g = empirical_amplification(Scheme.LAX_CD, 0.8, ModeSpec(10, 60), 60)
    expected = math.cos(math.pi / 3) - 0.8j * math.sin(math.pi / 3)
    assert abs(g - expected) <= 1e-10


def test_mode_ratio_constant_over_steps():
    s = build_stencil(Scheme.LAX_CD, 0.6)
    ratios = mode_ratios(s, ModeSpec(3, 64), 20)
    assert len(ratios) == 20
    np.testing.assert_allclose(ratios, ratios[0], atol=1e-12)


def test_mode_ratio_rejects_edge_modes():
    with pytest.raises(ValueError):
        mode_ratios(build_stencil(Scheme.FT_BS, 0.5), ModeSpec(0, 64))
    with pytest.raises(ValueError):
        mode_ratios(build_stencil(Scheme.FT_BS, 0.5), ModeSpec(32, 64))


def test_evolve_zero_error():
    rec = evolve_error(Field(np.zeros(16)), build_stencil(Scheme.FT_CS, 0.5), 50)
    assert np.all(rec.per_step_l2 == 0)
    assert rec.growth_rate_estimate is None


def test_evolve_error_ftbs_bounded():
    seed = initial_field(RandomIC(1e-10, 42), Grid1D(200))
    rec = evolve_error(seed, build_stencil(Scheme.FT_BS, 0.9), 200)
    assert rec.per_step_l2.max() <= rec.per_step_l2[0] * (1 + 1e-12) ** 200


def test_evolve_error_ftcs_grows():
    seed = initial_field(RandomIC(1e-10, 42), Grid1D(200))
    rec = evolve_error(seed, build_stencil(Scheme.FT_CS, 0.5), 200)
    growth = rec.per_step_l2[-1] / rec.per_step_l2[0]
    assert growth >= 10
    # oracle: evolve each DFT mode by its analytic G and recombine
    hat = np.fft.fft(seed.values)
    theta = 2 * np.pi * np.fft.fftfreq(200)
    G = amplification_factor(build_stencil(Scheme.FT_CS, 0.5), theta)
    final = np.fft.ifft(hat * G**200).real
    assert l2_norm(rec.final_field) == pytest.approx(l2_norm(final), rel=1e-8)


def test_error_evolution_tracks_difference():
    grid = Grid1D(64, 1 / 64)
    E = initial_field(Gaussian(), grid)
    eps = initial_field(RandomIC(1e-10, 1), grid)
    evo = error_evolution(E, eps, build_stencil(Scheme.LAX_CD, 0.8), 100)
    assert evo.residual <= 1e-12 * (linf_norm(evo.exact) + linf_norm(evo.error))


@settings(max_examples=60)
@given(seed=st.integers(0, 2**32 - 1), C=st.floats(-1.5, 1.5), scheme=st.sampled_from(list(Scheme)))
def test_spectral_bound(seed, C, scheme):
    s = build_stencil(scheme, C)
    gmax, _ = max_amplification(s)
    v = np.random.default_rng(seed).normal(size=48)
    rec = evolve_error(Field(v), s, 30)
    assert np.all(rec.l2_ratios <= gmax + 1e-10)
