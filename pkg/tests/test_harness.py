import copy
import json
import os

import numpy as np
import pandas as pd
import pytest

from harness.config import InitialConditionConfig, parse_run_config
from harness.initial_conditions import build_initial_condition
from harness.runner import build_problem, run_converge, run_kernel_table, run_simulate
from harness.serialization import read_snapshot, read_trajectory, write_snapshot
from main import main
from reactions.models import FisherModel, GinzburgLandauModel
from utils.data_models import Field, GridSpec
from utils.errors import ConfigError

FISHER_RUN = {
    "grid": {"extent": 40.0, "points": 128, "dim": 1},
    "kernels": [{"sigma": 1.0, "beta": 0.75}],
    "model": {"variant": "fisher", "params": {"chi": 1.0}},
    "schedule": {"h": 0.25, "total_time": 2.0},
    "initial_condition": {"kind": "random_smooth", "low": 0.2, "high": 0.9, "modes": 3},
    "monitors": {"sup_norm": True, "region": {"kind": "fisher", "fatal": True, "params": {"a0": 0.15}}},
    "seed": 11,
}


def run_document(**changes):
    document = copy.deepcopy(FISHER_RUN)
    for key, value in changes.items():
        document[key] = value
    return document


def write_config(directory, document, name="run.json"):
    path = os.path.join(str(directory), name)
    with open(path, "w") as f:
        json.dump(document, f)
    return path


def fisher_exact(z0, t):
    growth = np.exp(t)
    return z0 * growth / (1 - z0 + z0 * growth)


def test_simulate_writes_artifacts(tmp_path):
    config_path = write_config(tmp_path, FISHER_RUN)
    out = tmp_path / "run"
    assert main(["simulate", "--config", config_path, "--out", str(out)]) == 0

    with open(out / "metadata.json") as f:
        metadata = json.load(f)
    assert metadata["complete"] is True
    assert metadata["schedule"] == {"h": 0.25, "n": 8, "total_time": 2.0}
    assert metadata["grid"] == {"extent": [40.0], "points": [128]}
    assert metadata["dtype"] == "<f8"
    assert metadata["seed"] == 11
    assert len(metadata["snapshots"]) == 9
    for entry in metadata["snapshots"]:
        assert (out / entry["file"]).stat().st_size == 128 * 8
    assert set(metadata["monitors"]) == {"sup_norm", "region"}

    with open(out / "audit.json") as f:
        audit = json.load(f)
    assert audit["pass"] is True
    assert len(audit["snapshots"]) == 9

    sup = pd.read_csv(out / "monitor_sup_norm.csv")
    assert list(sup["step"]) == list(range(9))


def test_trajectory_round_trip(tmp_path):
    config = parse_run_config(run_document())
    result = run_simulate(config, str(tmp_path))
    traj = read_trajectory(str(tmp_path))
    assert traj.times == result.trajectory.times
    for stored, original in zip(traj.snapshots, result.trajectory.snapshots):
        np.testing.assert_array_equal(stored.values, original.values)
    np.testing.assert_allclose(traj.monitor_frame("sup_norm")["sup_norm"], result.trajectory.monitor_frame("sup_norm")["sup_norm"],
                               rtol=1e-15)


def test_complex_snapshot_round_trip(tmp_path, rng):
    grid = GridSpec.uniform(1.0, 8)
    field = Field(grid=grid, values=rng.normal(size=(8, 1)) + 1j * rng.normal(size=(8, 1)))
    path = str(tmp_path / "u.bin")
    write_snapshot(path, field)
    assert os.path.getsize(path) == 8 * 16
    np.testing.assert_array_equal(read_snapshot(path, grid, 1, is_complex=True).values, field.values)


def test_runs_are_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    run_simulate(parse_run_config(run_document()), str(first), threads=1)
    run_simulate(parse_run_config(run_document()), str(second), threads=3)
    names = sorted(os.listdir(first))
    assert names == sorted(os.listdir(second))
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_seed_changes_random_data():
    a = run_simulate(parse_run_config(run_document(seed=1))).trajectory.snapshots[0].values
    b = run_simulate(parse_run_config(run_document(seed=2))).trajectory.snapshots[0].values
    assert not np.array_equal(a, b)


def test_fhn_diffusion_pair_sets_the_kernels():
    document = run_document(
        grid={"extent": 20.0, "points": 32, "dim": 1},
        kernels=[{"sigma": 1.0, "beta": 0.8}],
        model={"variant": "fhn", "params": {"a": 0.25, "sigma_u": 0.0, "sigma_v": 0.5}},
        schedule={"h": 0.25, "total_time": 0.5},
        initial_condition={"kind": "random_smooth", "low": -0.5, "high": 0.5, "modes": 2},
        monitors={"sup_norm": True},
    )
    problem = build_problem(parse_run_config(document))
    assert [(spec.sigma, spec.beta) for spec in problem.specs] == [(0.0, 0.8), (0.5, 0.8)]
    traj = run_simulate(parse_run_config(document)).trajectory
    assert [kernel["sigma"] for kernel in traj.kernels] == [0.0, 0.5]


def test_period_must_divide_final_time(tmp_path):
    document = run_document(schedule={"h": 0.3, "total_time": 1.0})
    assert main(["simulate", "--config", write_config(tmp_path, document), "--out", str(tmp_path / "o")]) == 2


def test_invalid_documents_exit_with_config_code(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    bad_schedule = run_document(schedule={"h": 0.25, "n": 3, "total_time": 2.0})
    assert main(["simulate", "--config", write_config(tmp_path, bad_schedule)]) == 2
    too_many_kernels = run_document(kernels=[{"sigma": 1.0, "beta": 0.5}] * 3)
    assert main(["simulate", "--config", write_config(tmp_path, too_many_kernels)]) == 2
    bad_beta = run_document(kernels=[{"sigma": 1.0, "beta": 1.5}])
    assert main(["simulate", "--config", write_config(tmp_path, bad_beta)]) == 2


def test_blow_up_exit_code_and_partial_artifacts(tmp_path):
    document = run_document(
        model={"variant": "custom", "params": {"name": "linear", "options": {"rate": -50.0}}},
        monitors={"sup_norm": True},
    )
    out = tmp_path / "run"
    assert main(["simulate", "--config", write_config(tmp_path, document), "--out", str(out)]) == 3
    with open(out / "metadata.json") as f:
        metadata = json.load(f)
    assert metadata["complete"] is False
    assert metadata["blow_up"]["step"] == len(metadata["snapshots"]) - 1


def test_fatal_region_violation_exit_code(tmp_path):
    document = run_document(monitors={
        "region": {"kind": "interval", "fatal": True, "params": {"lower": 0.3, "upper": 1.0}},
    })
    out = tmp_path / "run"
    assert main(["simulate", "--config", write_config(tmp_path, document), "--out", str(out)]) == 4
    with open(out / "audit.json") as f:
        audit = json.load(f)
    assert audit["pass"] is False
    assert audit["snapshots"][0]["pass"] is False


def test_non_fatal_region_violation_is_reported_only(tmp_path):
    document = run_document(monitors={
        "region": {"kind": "interval", "fatal": False, "params": {"lower": 0.3, "upper": 1.0}},
    })
    result = run_simulate(parse_run_config(document), str(tmp_path))
    assert not result.audit.passed


def test_invariant_audit_of_existing_run(tmp_path):
    config_path = write_config(tmp_path, FISHER_RUN)
    run_dir = tmp_path / "run"
    assert main(["simulate", "--config", config_path, "--out", str(run_dir)]) == 0
    audit_dir = tmp_path / "audit"
    assert main(["invariant-audit", "--config", config_path, "--trajectory", str(run_dir),
                 "--out", str(audit_dir)]) == 0
    assert (audit_dir / "audit.json").exists()


def test_zero_diffusion_matches_the_ode():
    document = run_document(
        kernels=[{"sigma": 0.0, "beta": 0.75}],
        flow={"substeps_per_unit_time": 256},
    )
    result = run_simulate(parse_run_config(document))
    u0 = result.trajectory.snapshots[0].values
    np.testing.assert_allclose(result.trajectory.final.values, fisher_exact(u0, 2.0), atol=1e-8)


def test_converge_writes_table(tmp_path):
    document = run_document(
        grid={"extent": 40.0, "points": 64, "dim": 1},
        schedule={"h": 0.25, "total_time": 1.0},
        h_list=[0.25, 0.125, 0.0625],
    )
    out = tmp_path / "conv"
    assert main(["converge", "--config", write_config(tmp_path, document), "--out", str(out)]) == 0
    table = pd.read_csv(out / "convergence.csv")
    assert list(table.columns) == ["h", "sup_error", "order_estimate", "difference_order"]
    assert table["h"].tolist() == [0.25, 0.125, 0.0625]
    assert (table["sup_error"].diff().dropna() < 0).all()


def test_converge_defaults_to_halving_the_period():
    document = run_document(grid={"extent": 40.0, "points": 64, "dim": 1}, schedule={"h": 0.25, "n": 4})
    table = run_converge(parse_run_config(document))
    assert table["h"].tolist() == [0.25, 0.125, 0.0625]


def test_asymptote_subcommand(tmp_path):
    document = {
        "grid": {"extent": 40.0, "points": 256, "dim": 1},
        "kernels": [{"sigma": 1.0, "beta": 0.75}],
        "model": {"variant": "fisher"},
        "schedule": {"h": 0.125, "n": 4},
        "initial_condition": {"kind": "bump", "background": 0.2, "amplitude": 0.6, "width": 2.0},
        "monitors": {"asymptote": {"band": 0.05}},
    }
    out = tmp_path / "asym"
    assert main(["asymptote", "--config", write_config(tmp_path, document), "--out", str(out)]) == 0
    series = pd.read_csv(out / "asymptote.csv")
    assert len(series) == 5
    assert series["band_max_dev"].iloc[0] == pytest.approx(0.0, abs=1e-15)
    boundary = pd.read_csv(out / "monitor_boundary.csv")
    assert set(boundary.columns) == {"step", "time", "left", "right"}


def test_kernel_table_closed_forms():
    x = np.linspace(-10.0, 10.0, 201)
    gauss = run_kernel_table(1.0, 1.0, 1, 1.0, (-10.0, 10.0), 201)
    assert gauss["x"].dtype == np.float64
    values = gauss["g_beta"].to_numpy()
    np.testing.assert_allclose(values, np.exp(-x ** 2 / 4) / np.sqrt(4 * np.pi), rtol=0, atol=1e-12)
    np.testing.assert_allclose(gauss["G"].to_numpy(), values, rtol=0, atol=1e-12)
    assert set(gauss.attrs["mass"]) == {"g_beta", "G"}

    poisson = run_kernel_table(0.5, 2.0, 1, 0.5, (-10.0, 10.0), 201)
    np.testing.assert_allclose(poisson["g_beta"].to_numpy(), 1 / (np.pi * (1 + x ** 2)), rtol=0, atol=1e-10)
    assert poisson.attrs["mass"]["G"] == pytest.approx(1.0, abs=1e-5)


def test_kernel_table_file_keeps_full_precision(tmp_path):
    out = tmp_path / "kernel.csv"
    table = run_kernel_table(1.0, 1.0, 1, 1.0, (-1.0, 1.0), 4, out_path=str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "x,g_beta,G"
    assert len(lines) == 6
    assert lines[2].split(",")[0] == "%.17g" % table["x"].iloc[1]
    footer = lines[-1].split(",")
    assert footer[0] == "mass"
    assert float(footer[1]) == table.attrs["mass"]["g_beta"]


def test_kernel_table_on_stdout_is_plain_csv(capsys):
    assert main(["kernel-table", "--beta", "1", "--samples", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,g_beta,G"
    assert len(lines) == 7
    assert lines[-1].startswith("mass,")
    for line in lines[1:-1]:
        assert len([float(value) for value in line.split(",")]) == 3


@pytest.mark.slow
def test_kernel_table_mass_footer(tmp_path):
    out = tmp_path / "kernel.csv"
    assert main(["kernel-table", "--beta", "0.75", "--range", "-40", "40", "--samples", "4001",
                 "--out", str(out)]) == 0
    table = pd.read_csv(out)
    footer = table.iloc[-1]
    assert footer["x"] == "mass"
    assert float(footer["g_beta"]) == pytest.approx(1.0, abs=1e-6)
    assert float(footer["G"]) == pytest.approx(1.0, abs=1e-6)


def test_kernel_table_arguments():
    assert main(["kernel-table", "--beta", "1.5"]) == 2
    assert main(["kernel-table", "--beta", "0.5", "--range", "1", "-1"]) == 2
    assert main(["kernel-table", "--beta", "0.5", "--dim", "2", "--range", "-1", "1"]) == 2


def test_initial_condition_kinds():
    grid = GridSpec.uniform(10.0, 64)
    x = grid.axis(0)
    fisher, cgl = FisherModel(), GinzburgLandauModel()

    constant = build_initial_condition(InitialConditionConfig(kind="constant", background=0.4), grid, fisher)
    np.testing.assert_array_equal(constant.values, 0.4)

    cosine = build_initial_condition(
        InitialConditionConfig(kind="cosine", background=0.5, amplitude=0.25, mode=2), grid, fisher)
    np.testing.assert_allclose(cosine.values[:, 0], 0.5 + 0.25 * np.cos(4 * np.pi * x / 10.0))

    front = build_initial_condition(InitialConditionConfig(kind="logistic_front", slope=2.0), grid, fisher)
    assert np.all(np.diff(front.values[:, 0]) < 0)

    bump = build_initial_condition(
        InitialConditionConfig(kind="bump", background=0.2, amplitude=0.6, width=2.0), grid, fisher)
    assert bump.values.max() == pytest.approx(0.8)
    assert bump.values[0, 0] == 0.2

    smooth = build_initial_condition(
        InitialConditionConfig(kind="random_smooth", low=-1.0, high=1.0), grid, fisher, seed=3)
    assert smooth.values.min() == pytest.approx(-1.0) and smooth.values.max() == pytest.approx(1.0)
    again = build_initial_condition(
        InitialConditionConfig(kind="random_smooth", low=-1.0, high=1.0), grid, fisher, seed=3)
    np.testing.assert_array_equal(smooth.values, again.values)

    phase = build_initial_condition(InitialConditionConfig(kind="random_phase", amplitude=0.5), grid, cgl)
    assert phase.is_complex
    np.testing.assert_allclose(np.abs(phase.values), 0.5)
    with pytest.raises(ConfigError):
        build_initial_condition(InitialConditionConfig(kind="random_phase"), grid, fisher)


def test_initial_condition_from_file(tmp_path):
    grid = GridSpec.uniform(10.0, 16)
    values = np.linspace(0.0, 1.0, 16)[:, np.newaxis]
    np.save(tmp_path / "u0.npy", values)
    write_snapshot(str(tmp_path / "u0.bin"), Field(grid=grid, values=values))
    for name in ("u0.npy", "u0.bin"):
        cfg = InitialConditionConfig(kind="file", path=name)
        u0 = build_initial_condition(cfg, grid, FisherModel(), base_dir=str(tmp_path))
        np.testing.assert_array_equal(u0.values, values)


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        parse_run_config({"grid": {"extent": 1.0, "points": 8}})
    document = run_document(initial_condition={"kind": "file", "path": "nowhere.bin"})
    document["base_dir"] = str(tmp_path)
    with pytest.raises(ConfigError):
        parse_run_config(document)
    with pytest.raises(ConfigError):
        build_problem(parse_run_config(run_document(grid={"extent": 10.0, "points": 7, "dim": 1})))
