import json

import pytest

from facepnp.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from facepnp.infrastructure.utils.consts import (
    BLOBS_FILE,
    MANIFEST_FILE,
    PCA_MODEL_FILE,
    SAMPLES_FILE,
    SHAPES_DIR,
)

from tests.conftest import SMALL_SCENE


@pytest.fixture(scope="module")
def scene_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "scene.json"
    path.write_text(json.dumps({**SMALL_SCENE, "n_samples": 4}))
    return path


@pytest.fixture(scope="module")
def generated(tmp_path_factory, scene_file):
    out = tmp_path_factory.mktemp("data") / "ds"
    assert main(["synth-gen", "--config", str(scene_file), "--out", str(out)]) == EXIT_OK
    return out


class TestSynthGen:
    def test_writes_dataset_shapes_and_model(self, generated):
        for name in (MANIFEST_FILE, SAMPLES_FILE, BLOBS_FILE, PCA_MODEL_FILE):
            assert (generated / name).is_file()
        assert (generated / SHAPES_DIR).is_dir()
        manifest = json.loads((generated / MANIFEST_FILE).read_text())
        assert manifest["counts"]["samples"] == 4

    def test_rerun_is_byte_identical(self, generated, scene_file, tmp_path):
        assert main(["synth-gen", "--config", str(scene_file), "--out", str(tmp_path)]) == EXIT_OK
        for name in (MANIFEST_FILE, SAMPLES_FILE, BLOBS_FILE, PCA_MODEL_FILE):
            assert (tmp_path / name).read_bytes() == (generated / name).read_bytes()

    def test_invalid_config(self, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"n_shapes": 5, "k": 5}))
        assert main(["synth-gen", "--config", str(config), "--out", str(tmp_path / "out")]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["synth-gen", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == EXIT_USAGE


class TestEvalCommands:
    def test_solve_prints_rows_then_report(self, generated, capsys):
        assert main(["solve", "--dataset", str(generated)]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5
        assert [json.loads(line)["sample_id"] for line in lines[:4]] == [0, 1, 2, 3]
        assert json.loads(lines[-1])["sample_count"] == 4

    def test_eval_writes_json_and_csv(self, generated, tmp_path):
        out, csv = tmp_path / "report.json", tmp_path / "report.csv"
        assert main(["eval", "--dataset", str(generated), "--out", str(out), "--csv", str(csv)]) == EXIT_OK
        report = json.loads(out.read_text())
        header, row = csv.read_text().strip().splitlines()
        assert header.split(",") == list(report)
        assert float(row.split(",")[2]) == report["add"]

    def test_weighting_flags(self, generated, capsys):
        reports = {}
        for flag in ("--weighted", "--unweighted"):
            assert main(["solve", "--dataset", str(generated), flag]) == EXIT_OK
            reports[flag] = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert main(["solve", "--dataset", str(generated)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out.strip().splitlines()[-1]) == reports["--weighted"]
        assert reports["--weighted"]["add"] != reports["--unweighted"]["add"]

    def test_weighting_flags_are_exclusive(self, generated):
        assert main(["solve", "--dataset", str(generated), "--weighted", "--unweighted"]) == EXIT_USAGE

    def test_missing_dataset(self, tmp_path):
        assert main(["eval", "--dataset", str(tmp_path / "missing"), "--out", str(tmp_path / "r.json")]) == EXIT_DATA

    def test_recon_eval(self, generated, tmp_path):
        out = tmp_path / "recon.json"
        assert main(["recon-eval", "--dataset", str(generated), "--noise", "1.0", "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["pca_mean"] <= report["direct_mean"]

    def test_negative_noise(self, generated, tmp_path):
        out = tmp_path / "recon.json"
        assert main(["recon-eval", "--dataset", str(generated), "--noise", "-1", "--out", str(out)]) == EXIT_USAGE


class TestPcaBuild:
    def test_builds_from_shapes(self, generated, tmp_path):
        out = tmp_path / "models" / "pca.bin"
        args = ["pca-build", "--meshes", str(generated / SHAPES_DIR), "--k", "30", "--out", str(out)]
        assert main(args) == EXIT_OK
        assert out.read_bytes() == (generated / PCA_MODEL_FILE).read_bytes()

    def test_too_many_components(self, generated, tmp_path):
        args = ["pca-build", "--meshes", str(generated / SHAPES_DIR), "--k", "31", "--out", str(tmp_path / "p.bin")]
        assert main(args) != EXIT_OK


class TestFinetuneBench:
    def test_writes_result(self, generated, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text(json.dumps({"seed": 1, "trials": 2, "steps": 3}))
        out = tmp_path / "bench_out.json"
        args = ["finetune-bench", "--dataset", str(generated), "--config", str(config), "--out", str(out)]
        assert main(args) == EXIT_OK
        result = json.loads(out.read_text())
        assert len(result["trials"]) == 2


class TestGradCheck:
    def test_empty_audit_passes(self, capsys):
        assert main(["grad-check", "--n", "0", "--assert"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["rows"] == []


class TestUsage:
    @pytest.mark.parametrize("argv", [[], ["unknown"], ["eval", "--dataset", "x"], ["grad-check", "--n", "many"]])
    def test_bad_arguments(self, argv):
        assert main(argv) == EXIT_USAGE
