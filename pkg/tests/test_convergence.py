import numpy as np
import pytest

from reactions.models import CustomModel, FisherModel, GinzburgLandauModel
from splitting.convergence import self_convergence
from utils.data_models import Field, KernelSpec
from utils.errors import ParameterError

SPEC = KernelSpec(sigma=1.0, beta=0.75)
H_LIST = [1 / 8, 1 / 16, 1 / 32]


def check_first_order(table):
    errors = table["sup_error"].to_numpy()
    assert np.all(np.diff(errors) < 0)
    assert 0.8 <= table["order_estimate"].iloc[1] <= 1.2
    assert 0.8 <= table["difference_order"].iloc[2] <= 1.2


@pytest.mark.slow
def test_fisher_converges_at_first_order(smooth_field):
    table = self_convergence(smooth_field, FisherModel(chi=1.0), SPEC, 1.0, H_LIST)
    assert list(table.columns) == ["h", "sup_error", "order_estimate", "difference_order"]
    assert np.isnan(table["order_estimate"].iloc[0])
    check_first_order(table)


@pytest.mark.slow
def test_ginzburg_landau_converges_at_first_order(wide_grid):
    x = wide_grid.axis(0)
    phase = 2 * np.sin(2 * np.pi * x / 40.0)
    modulus = 0.5 + 0.3 * np.cos(4 * np.pi * x / 40.0)
    u0 = Field(grid=wide_grid, values=modulus * np.exp(1j * phase))
    table = self_convergence(u0, GinzburgLandauModel(a=0.5, b=-1.0), SPEC, 1.0, H_LIST, threads=2)
    check_first_order(table)


def test_pure_diffusion_has_no_splitting_error(smooth_field):
    zero = CustomModel(lambda t, z: np.zeros_like(z), name="zero")
    table = self_convergence(smooth_field, zero, SPEC, 1.0, H_LIST)
    assert table["sup_error"].max() <= 1e-12


def test_convergence_arguments(smooth_field):
    model = FisherModel()
    with pytest.raises(ParameterError):
        self_convergence(smooth_field, model, SPEC, 1.0, [0.5, 0.25])
    with pytest.raises(ParameterError):
        self_convergence(smooth_field, model, SPEC, 1.0, [0.25, 0.5, 0.125])
    with pytest.raises(ParameterError):
        self_convergence(smooth_field, model, SPEC, 1.0, [0.3, 0.2, 0.1])
