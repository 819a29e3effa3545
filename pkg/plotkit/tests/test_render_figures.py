"""End-to-end checks for the artifact-to-SVG renderer.

Fixture data comes from the installed ``simulate`` command line tool on
reduced grids; the renderer itself is exercised both through the Python
entry points and the ``render_figures`` CLI.
"""

import json
import subprocess
import sys

import pytest

from plotkit import (
    FIGURES,
    DataError,
    SchemaError,
    load_table,
    render_figure,
)
from plotkit.cli import main

SODIUM_DECAYS = {"12": 1.0, "23": 1.0, "34": 0.005 / 9.0}
SODIUM_ETA = {"12": 12.0, "23": 16.0, "34": 0.2}
RUBIDIUM_A = (
    {"12": 5.0, "23": 11.0, "24": 0.97},
    {"12": 88.0, "23": 1.5, "24": 8.8},
)
RUBIDIUM_B = (
    {"12": 6.0, "23": 0.97, "24": 1.1},
    {"12": 87.0, "23": 14.0, "24": 10.0},
)


def _doc(kind, scheme, decays, eta, drives, grid=None, cavity=None):
    doc = {
        "units": "gamma",
        "kind": kind,
        "scheme": scheme,
        "decays": decays,
        "drives": drives,
        "medium": {"length": 1.0, "eta": eta, "steps": 100},
    }
    if grid is not None:
        doc["grid"] = grid
    if cavity is not None:
        doc["cavity"] = cavity
    return doc


def _simulate(kind, out_dir, config=None, preset=None, extra=()):
    argv = [sys.executable, "-m", "fourlevel.cli", kind, "--out", str(out_dir)]
    if config is not None:
        path = out_dir.parent / f"{out_dir.name}-config.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(config), encoding="utf-8")
        argv += ["--config", str(path)]
    else:
        argv += ["--preset", preset]
    argv += list(extra)
    proc = subprocess.run(argv, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


@pytest.fixture(scope="session")
def artifact_tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("figure-data")
    spectrum_grid = {"start": -30.0, "stop": 30.0, "count": 41}
    for g2 in (1.0, 3.0):
        _simulate(
            "spectrum",
            root / "fig2a" / f"g2-{g2:g}",
            config=_doc(
                "spectrum", "ladder4", SODIUM_DECAYS, SODIUM_ETA,
                {"coupling": 10.0, "probe": g2}, grid=spectrum_grid,
            ),
        )
    _simulate(
        "spectrum",
        root / "fig2b",
        config=_doc(
            "spectrum", "ladder4", SODIUM_DECAYS, SODIUM_ETA,
            {"coupling": 10.0, "probe": 1.0, "control": 10.0}, grid=spectrum_grid,
        ),
    )
    for g1 in (3.0, 10.0):
        _simulate(
            "switch",
            root / "fig3" / f"g1-{g1:g}",
            config=_doc(
                "switch", "ladder4", SODIUM_DECAYS, SODIUM_ETA,
                {"coupling": g1, "probe": 0.01},
                grid={"start": 0.0, "stop": 120.0, "count": 41},
            ),
        )
    for preset in ("fig4a", "fig4b"):
        _simulate("pulse", root / preset, preset=preset, extra=["--steps", "120"])
    cavity_grid = {"start": 1e-3, "stop": 1e2, "count": 40, "spacing": "log"}
    for g1 in (3.0, 5.0):
        _simulate(
            "cavity",
            root / "fig6a" / f"g1-{g1:g}",
            config=_doc(
                "cavity", "ladder4", SODIUM_DECAYS, SODIUM_ETA,
                {"coupling": g1, "probe": 1.0},
                grid=cavity_grid, cavity={"cooperation": 400.0},
            ),
        )
    _simulate(
        "cavity",
        root / "fig6b",
        config=_doc(
            "cavity", "ladder4", SODIUM_DECAYS, SODIUM_ETA,
            {"coupling": 5.0, "probe": 1.0, "control": 5.0},
            grid=cavity_grid, cavity={"cooperation": 400.0},
        ),
    )
    sa_grid = {"start": 1e-2, "stop": 1e3, "count": 21, "spacing": "log"}
    for name, (decays, eta) in (("fig8a", RUBIDIUM_A), ("fig8b", RUBIDIUM_B)):
        _simulate(
            "sa-rsa",
            root / name,
            config=_doc(
                "sa-rsa", "ypsilon4", decays, eta,
                {"probe": 1.0, "control": 20.0}, grid=sa_grid,
            ),
        )
    return root


def test_render_all_produces_every_figure(artifact_tree, tmp_path):
    out = tmp_path / "svg"
    assert main(["all", "--data", str(artifact_tree), "--out", str(out)]) == 0
    for figure_id in FIGURES:
        target = out / f"{figure_id}.svg"
        assert target.is_file(), f"missing {target}"
        content = target.read_text(encoding="utf-8")
        assert len(content) > 1000
        assert "<svg" in content


def test_axis_labels_and_series_legends(artifact_tree, tmp_path):
    def rendered(figure_id):
        path = render_figure(figure_id, artifact_tree, tmp_path)
        return path.read_text(encoding="utf-8")

    spectrum = rendered("fig2a")
    assert "Δ₂/γ" in spectrum
    assert "T₂" in spectrum
    assert "G2 = 1" in spectrum and "G2 = 3" in spectrum

    switch = rendered("fig3")
    assert "|G|²/γ²" in switch
    assert "G1 = 3" in switch and "G1 = 10" in switch

    pulse = rendered("fig4a")
    assert "τ (μs)" in pulse
    assert "normalized intensity" in pulse
    assert "vacuum" in pulse and "medium" in pulse

    cavity = rendered("fig6a")
    assert "input intensity (γ²)" in cavity
    assert "output intensity (γ²)" in cavity
    assert "G1 = 3" in cavity and "G1 = 5" in cavity

    sa_rsa = rendered("fig8a")
    assert "|g(0)|²/γ²" in sa_rsa
    assert "control off" in sa_rsa and "control on" in sa_rsa


def test_inputs_untouched_and_output_deterministic(artifact_tree, tmp_path):
    inputs = {
        path: path.read_bytes()
        for path in sorted(artifact_tree.rglob("*"))
        if path.is_file()
    }
    first = render_figure("fig2a", artifact_tree, tmp_path / "one")
    second = render_figure("fig2a", artifact_tree, tmp_path / "two")
    assert first.read_bytes() == second.read_bytes()
    for path, before in inputs.items():
        assert path.read_bytes() == before, f"input modified: {path}"


def test_missing_column_is_schema_error(tmp_path, capsys):
    figure_dir = tmp_path / "data" / "fig2a"
    figure_dir.mkdir(parents=True)
    csv_path = figure_dir / "spectrum.csv"
    csv_path.write_text("delta2_over_gamma,transmission\n0.0,0.5\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="T2"):
        load_table(csv_path, FIGURES["fig2a"].columns)
    code = main(["fig2a", "--data", str(tmp_path / "data"), "--out", str(tmp_path / "svg")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_empty_artifact_is_data_error(tmp_path):
    figure_dir = tmp_path / "fig2a"
    figure_dir.mkdir()
    csv_path = figure_dir / "spectrum.csv"
    csv_path.write_text("delta2_over_gamma,T2\n", encoding="utf-8")
    with pytest.raises(DataError, match="no data rows"):
        render_figure("fig2a", tmp_path, tmp_path / "svg")
    csv_path.write_text("", encoding="utf-8")
    with pytest.raises(DataError, match="empty"):
        render_figure("fig2a", tmp_path, tmp_path / "svg")
    with pytest.raises(DataError, match="no data for fig3"):
        render_figure("fig3", tmp_path, tmp_path / "svg")
    with pytest.raises(ValueError, match="unknown figure id"):
        render_figure("fig9", tmp_path, tmp_path / "svg")


def test_single_run_figures_reject_series_stacks(tmp_path):
    rows = "probe_intensity_over_gamma2,T_off,T_on\n0.01,0.1,0.8\n1.0,0.3,0.7\n"
    for series in ("run-a", "run-b"):
        series_dir = tmp_path / "fig8a" / series
        series_dir.mkdir(parents=True)
        (series_dir / "sa_rsa.csv").write_text(rows, encoding="utf-8")
    with pytest.raises(DataError, match="single run"):
        render_figure("fig8a", tmp_path, tmp_path / "svg")


def test_cli_entrypoint_and_usage(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.1.0"

    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "fig9",
         "--data", str(tmp_path), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2  # argparse usage error

    figure_dir = tmp_path / "fig8b"
    figure_dir.mkdir()
    (figure_dir / "sa_rsa.csv").write_text(
        "probe_intensity_over_gamma2,T_off,T_on\n0.01,0.1,0.8\n1.0,0.3,0.7\n",
        encoding="utf-8",
    )
    out = tmp_path / "svg"
    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "fig8b",
         "--data", str(tmp_path), "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "fig8b.svg").is_file()
