import json
import math
import os
import subprocess

import numpy as np
import pytest

import kbsyk


@pytest.fixture(scope="module")
def lattice():
    return kbsyk.TimeLattice(10.0, 0.1)


@pytest.fixture(scope="module")
def thermal(lattice):
    state = kbsyk.solve_equilibrium(kbsyk.EquilibriumParams.for_lattice(1.0, 0.5, lattice))
    return state, kbsyk.lay_initial_condition(state, lattice)


def test_lattice_layout(lattice):
    assert lattice.n_points == 200
    assert lattice.time(lattice.zero_index) == 0.0
    with pytest.raises(kbsyk.DomainError):
        kbsyk.TimeLattice(10.0, 0.3)


def test_equilibrium(thermal):
    state, green = thermal
    assert abs(state.sum_rule() - 1.0) < 1e-3
    assert state.kms_residual() < 1e-9
    assert min(state.spectral) > -1e-6
    g = green.greater
    assert g.dtype == np.complex128
    assert np.allclose(np.diag(g), -0.5j)
    assert green.antisymmetry_residual() < 1e-12


def test_effective_temperature(thermal):
    _, green = thermal
    assert kbsyk.effective_beta_fdt(green, -2.0).beta == pytest.approx(1.0, rel=0.02)
    assert kbsyk.total_energy(green, 0.5, 0.0) < 0.0


def test_error_mapping(lattice):
    free = kbsyk.ContourGreen(lattice, np.full((200, 200), -0.5j))
    with pytest.raises(kbsyk.UndefinedTemperatureError):
        kbsyk.effective_beta_corner(free, 0.0)
    with pytest.raises(kbsyk.Error):
        kbsyk.solve_equilibrium(kbsyk.EquilibriumParams(-1.0))


def test_quench_and_lindblad_agree_without_coupling(lattice, thermal):
    system = kbsyk.EquilibriumParams.for_lattice(1.0, 0.5, lattice)
    iso = kbsyk.evolve_quench(system, lattice, [{"beta": 0.5, "v": 0.0}], method="causal")
    lind = kbsyk.evolve_lindblad(system, lattice, 0.0, method="causal")
    assert np.max(np.abs(iso.greater - lind.greater)) < 1e-8
    assert np.max(np.abs(iso.greater - thermal[1].greater)) < 1e-3


def test_crossings_from_dicts():
    t = [0.1 * k for k in range(1, 101)]
    a = {"t": t, "beta_fdt": [x - 5.0 for x in t]}
    b = {"t": t, "beta_fdt": [0.0] * len(t)}
    report = kbsyk.detect_crossings(a, b, deadband=0.01)
    assert report["parity"] == 1
    assert report["crossings"][0]["time"] == pytest.approx(5.0)


def test_run_and_snapshot(tmp_path):
    out = tmp_path / "q"
    summary = kbsyk.run({
        "scenario": "quench", "j": 0.5, "beta_init": 2.4, "baths": ["beta=0.5,v=0.4,n=3"],
        "lambda_t": 5.0, "dt": 0.1, "method": "causal", "out": str(out),
    })
    assert summary["propagation"]["final_update"] < 1e-9
    g = kbsyk.read_snapshot(str(out / "greater.snap"))
    assert g.lattice.n_points == 100
    header = (out / "trace.csv").read_text().splitlines()[0]
    assert header == "t,beta_fdt,beta_corner,energy,fit_quality,reliable"
    with pytest.raises(kbsyk.ConfigError):
        kbsyk.run({"scenario": "quench"})


@pytest.mark.skipif("KBSYK_CLI" not in os.environ, reason="command-line binary not provided")
def test_cli_equilibrium(tmp_path):
    out = tmp_path / "eq"
    subprocess.run([os.environ["KBSYK_CLI"], "equilibrium", "--beta", "2.4", "--out", str(out)], check=True,
                   capture_output=True)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["beta"] == 2.4
    assert math.isclose(manifest["summary"]["sum_rule"], 1.0, abs_tol=1e-3)
