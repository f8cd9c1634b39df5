import numpy as np
import pytest

from reactions.config import get_flow_config, update_flow_config
from reactions.factory import build_model, load_callable
from reactions.flow import FlowConfig, nonlinear_flow, pointwise_flow
from reactions.models import (
    CustomModel,
    FisherModel,
    FitzHughNagumoModel,
    GinzburgLandauModel,
    PopulationModel,
    evaluate_F,
)
from utils.data_models import Field, GridSpec
from utils.errors import BlowUpError, ConfigError, DataError, ParameterError


def fisher_exact(z0, chi, t):
    growth = np.exp(chi * t)
    return z0 * growth / (1 - z0 + z0 * growth)


def population_kernels():
    return (
        lambda theta: 1 + 0.5 * np.sin(2 * np.pi * theta),
        lambda theta, vartheta: 0.2 * np.exp(-(theta - vartheta) ** 2 / 0.02),
        lambda theta, vartheta: 1 + 0.5 * np.cos(np.pi * (theta - vartheta)),
    )


@pytest.mark.parametrize("z0", [0.1, 0.5, 0.9, 1.3])
def test_fisher_matches_closed_form(z0):
    fine = FlowConfig(substeps_per_unit_time=512)
    z = nonlinear_flow(FisherModel(chi=1.0), 0.0, 1.5, z0, factor=1, cfg=fine)
    assert z[0] == pytest.approx(fisher_exact(z0, 1.0, 1.5), abs=1e-10)


def test_doubled_flow_runs_twice_as_fast():
    cfg = FlowConfig(substeps_per_unit_time=256)
    model = FisherModel(chi=0.7)
    z = nonlinear_flow(model, 0.25, 0.75, 0.2, factor=2, cfg=cfg)
    assert z[0] == pytest.approx(fisher_exact(0.2, 0.7, 1.0), abs=cfg.atol)


@pytest.mark.parametrize("h", [0.1, 0.125])
@pytest.mark.parametrize("z0", [0.2, 0.9])
def test_doubled_half_period_matches_full_period_at_default_resolution(h, z0):
    model = FisherModel(chi=1.0)
    t0 = 3 * h
    doubled = nonlinear_flow(model, t0 + h / 2, t0 + h, z0, factor=2)
    plain = nonlinear_flow(model, t0, t0 + h, z0, factor=1)
    assert doubled[0] == pytest.approx(plain[0], abs=1e-10)


@pytest.mark.parametrize("h", [0.25, 0.5, 1.0])
def test_doubled_half_period_matches_full_period_when_resolved(h):
    cfg = FlowConfig(substeps_per_unit_time=256)
    assert cfg.step_count(h / 2) * 2 == cfg.step_count(h)
    for model, z0 in [(FisherModel(chi=1.0), 0.5), (FitzHughNagumoModel(), [0.3, -0.2])]:
        doubled = nonlinear_flow(model, h / 2, h, z0, factor=2, cfg=cfg)
        plain = nonlinear_flow(model, 0.0, h, z0, factor=1, cfg=cfg)
        np.testing.assert_allclose(doubled, plain, rtol=0, atol=1e-10)


def test_zero_elapsed_time_returns_initial_state():
    z = nonlinear_flow(FisherModel(), 1.0, 1.0, 0.3)
    np.testing.assert_array_equal(z, [0.3])


def test_rk4_is_fourth_order():
    model = FisherModel(chi=1.0)
    exact = fisher_exact(0.1, 1.0, 1.0)
    coarse = abs(nonlinear_flow(model, 0.0, 1.0, 0.1, cfg=FlowConfig(substeps_per_unit_time=4))[0] - exact)
    fine = abs(nonlinear_flow(model, 0.0, 1.0, 0.1, cfg=FlowConfig(substeps_per_unit_time=8))[0] - exact)
    assert coarse / fine >= 12


def test_step_count_absorbs_round_off():
    cfg = FlowConfig(substeps_per_unit_time=64)
    assert cfg.step_count(0.1 * 3 / 0.3 * 0.5) == 32
    assert cfg.step_count(0.0) == 1
    assert cfg.step_count(1.0 / 64 + 1e-6) == 2


def test_flow_config_updates_are_copies():
    settings = update_flow_config({"substeps_per_unit_time": 128, "blowup_threshold": 50.0})
    cfg = FlowConfig(substeps_per_unit_time=settings["substeps_per_unit_time"],
                     blowup_threshold=settings["blowup_threshold"])
    assert cfg.step_count(1.0) == 128
    assert get_flow_config()["substeps_per_unit_time"] == 64
    assert FlowConfig().atol == get_flow_config()["closed_form_atol"]
    with pytest.raises(BlowUpError):
        nonlinear_flow(CustomModel(lambda t, z: z ** 2), 0.0, 1.0, 1.0, cfg=cfg)


def test_ginzburg_landau_modulus_is_logistic():
    """With f_R(η) = 1 - η, η = |u|² solves η' = 2η(1 - η)."""
    model = GinzburgLandauModel(a=0.5, b=-1.0)
    u0 = 0.3 * np.exp(0.4j)
    u = nonlinear_flow(model, 0.0, 1.0, u0, cfg=FlowConfig(substeps_per_unit_time=256))
    assert np.abs(u[0]) ** 2 == pytest.approx(fisher_exact(0.09, 2.0, 1.0), abs=1e-8)


def test_ginzburg_landau_rotates_unit_circle():
    a, b, t = 0.5, -1.0, 0.8
    model = GinzburgLandauModel(a=a, b=b)
    u0 = np.exp(0.3j)
    u = nonlinear_flow(model, 0.0, t, u0, cfg=FlowConfig(substeps_per_unit_time=256))
    assert u[0] == pytest.approx(np.exp(1j * (a - b) * t) * u0, abs=1e-8)


def test_ginzburg_landau_custom_nonlinearity():
    model = GinzburgLandauModel(f_real=lambda eta: -np.ones_like(eta), f_imag=lambda eta: np.zeros_like(eta))
    u = nonlinear_flow(model, 0.0, 1.0, 2.0 + 0j, cfg=FlowConfig(substeps_per_unit_time=256))
    assert u[0] == pytest.approx(2 * np.exp(-1.0), abs=1e-9)
    assert model.parameters()["custom_nonlinearity"] is True


def test_fitzhugh_nagumo_origin_is_fixed():
    model = FitzHughNagumoModel(a=0.5, e=1.0, b=1.0)
    np.testing.assert_array_equal(nonlinear_flow(model, 0.0, 3.0, [0.0, 0.0]), [0.0, 0.0])
    np.testing.assert_allclose(evaluate_F(model, 0.0, [1.0, 0.5]), [-0.5, 0.5])


def test_fitzhugh_nagumo_parameter_checks():
    with pytest.raises(ParameterError):
        FitzHughNagumoModel(a=1.5)
    with pytest.raises(ParameterError):
        FitzHughNagumoModel(e=0.0)
    with pytest.raises(ParameterError):
        FitzHughNagumoModel(b=-1.0)


def test_population_uniform_state_is_logistic():
    """For constant kernels a uniform state solves w' = (κ + μ)w - c w²."""
    kappa, mu, c = 1.0, 0.2, 1.5
    model = PopulationModel.uniform(kappa, np.full((32, 32), mu), np.full((32, 32), c), n_nodes=32)
    z = nonlinear_flow(model, 0.0, 1.0, np.full(32, 0.3), cfg=FlowConfig(substeps_per_unit_time=256))
    rate = kappa + mu
    carrying = rate / c
    expected = carrying * 0.3 * np.exp(rate) / (carrying + 0.3 * (np.exp(rate) - 1))
    np.testing.assert_allclose(z, expected, atol=1e-9)


def test_population_growth_bounds():
    model = PopulationModel(
        nodes=[0.25, 0.75],
        weights=[0.5, 0.5],
        growth=[1.5, 0.5],
        mutation=[[0.0, 0.2], [0.4, 0.0]],
        competition=[[1.0, 2.0], [3.0, 4.0]],
    )
    k_plus, c_minus = model.growth_bounds(0.0)
    assert k_plus == pytest.approx(1.7)
    assert c_minus == 1.0
    assert model.mass(np.array([2.0, -4.0])) == pytest.approx(3.0)


def test_population_piecewise_constant_rows():
    model = PopulationModel(
        nodes=[0.25, 0.75],
        weights=[0.5, 0.5],
        growth=[[2.0, 2.0], [3.0, 3.0]],
        mutation=np.zeros((2, 2)),
        competition=np.ones((2, 2)),
        times=[0.0, 1.0],
    )
    assert not model.autonomous
    ones = np.ones(2)
    np.testing.assert_allclose(evaluate_F(model, -1.0, ones), [1.0, 1.0])
    np.testing.assert_allclose(evaluate_F(model, 0.5, ones), [1.0, 1.0])
    np.testing.assert_allclose(evaluate_F(model, 1.0, ones), [2.0, 2.0])
    assert model.growth_bounds(0.5) == (2.0, 1.0)
    assert model.growth_bounds(2.0) == (3.0, 1.0)


def test_population_parameter_checks():
    with pytest.raises(ParameterError):
        PopulationModel([0.5], [0.5], [1.0], [[0.0]], [[1.0]])
    with pytest.raises(ParameterError):
        PopulationModel([0.5], [1.0], [1.0], [[-0.1]], [[1.0]])
    with pytest.raises(ParameterError):
        PopulationModel([0.5], [1.0], [1.0], [[0.0]], [[0.0]])
    with pytest.raises(ParameterError):
        PopulationModel([0.5], [1.0], [[1.0], [2.0]], [[0.0]], [[1.0]], times=[1.0, 0.5])


def test_population_stays_nonnegative_and_below_lambda(rng):
    model = PopulationModel.uniform(*population_kernels(), n_nodes=32)
    k_plus, c_minus = model.growth_bounds(1.0)
    for _ in range(5):
        z0 = rng.uniform(0.0, 3.0, 32)
        z0[rng.integers(0, 32, 4)] = 0.0
        lam = max(k_plus / c_minus, float(model.mass(z0)))
        z = nonlinear_flow(model, 0.0, 1.0, z0)
        assert z.min() >= -1e-9 * np.max(np.abs(z0))
        assert float(model.mass(z)) <= lam + 1e-8


def test_blow_up_is_reported():
    model = CustomModel(lambda t, z: z ** 2)
    with pytest.raises(BlowUpError) as info:
        nonlinear_flow(model, 0.0, 2.0, 1.0)
    assert 0.5 < info.value.last_finite_time < 2.0
    assert info.value.index is None


def test_pointwise_blow_up_names_grid_point():
    grid = GridSpec.uniform(1.0, 8)
    values = np.zeros(8)
    values[5] = 1.0
    with pytest.raises(BlowUpError) as info:
        pointwise_flow(Field(grid, values), CustomModel(lambda t, z: z ** 2), 0.0, 2.0)
    assert info.value.index == (5,)


def test_pointwise_flow_matches_single_state(smooth_field):
    model = FisherModel(chi=1.0)
    out = pointwise_flow(smooth_field, model, 0.0, 0.5, factor=2)
    for i in (0, 17, 128, 255):
        expected = nonlinear_flow(model, 0.0, 0.5, smooth_field.values[i], factor=2)
        np.testing.assert_allclose(out.values[i], expected, rtol=0, atol=1e-15)


def test_pointwise_flow_threads_do_not_change_result(smooth_field):
    model = FisherModel(chi=1.0)
    serial = pointwise_flow(smooth_field, model, 0.0, 0.5, cfg=FlowConfig(threads=1))
    threaded = pointwise_flow(smooth_field, model, 0.0, 0.5, cfg=FlowConfig(threads=4))
    np.testing.assert_array_equal(serial.values, threaded.values)


def test_flow_argument_validation(smooth_field):
    model = FisherModel()
    with pytest.raises(ParameterError):
        nonlinear_flow(model, 0.0, 1.0, 0.5, factor=3)
    with pytest.raises(ParameterError):
        nonlinear_flow(model, 1.0, 0.5, 0.5)
    with pytest.raises(DataError):
        nonlinear_flow(model, 0.0, 1.0, np.nan)
    with pytest.raises(DataError):
        pointwise_flow(smooth_field, FitzHughNagumoModel(), 0.0, 1.0)
    with pytest.raises(ParameterError):
        FlowConfig(substeps_per_unit_time=0)


def test_evaluate_F_checks_states():
    with pytest.raises(DataError):
        evaluate_F(FitzHughNagumoModel(), 0.0, [1.0, 2.0, 3.0])
    with pytest.raises(DataError):
        evaluate_F(FisherModel(), 0.0, 0.5 + 1j)
    assert evaluate_F(FisherModel(chi=2.0), 0.0, 0.5)[0] == pytest.approx(0.5)


def test_factory_builds_variants():
    assert isinstance(build_model("fisher", {"chi": 2.0}), FisherModel)
    assert build_model("cgl", {"a": 1.0, "b": 2.0}).is_complex
    assert build_model("fhn", {"a": 0.25}).state_dim == 2
    population = build_model("population", {"trait_nodes": 8, "growth": 1.0, "mutation": 0.1, "competition": 2.0})
    assert population.state_dim == 8
    linear = build_model("custom", {"name": "linear", "options": {"rate": 2.0}})
    np.testing.assert_allclose(evaluate_F(linear, 0.0, 1.5), [-3.0])
    imported = build_model("custom", {"name": "operator:sub"})
    np.testing.assert_allclose(evaluate_F(imported, 0.0, 1.5), [-1.5])


def test_factory_errors():
    with pytest.raises(ConfigError):
        build_model("brusselator")
    with pytest.raises(ConfigError):
        build_model("fisher", {"chi": -1.0})
    with pytest.raises(ConfigError):
        build_model("custom", {"name": "no_such_module_here:f"})
    with pytest.raises(ConfigError):
        load_callable("missing_colon")
