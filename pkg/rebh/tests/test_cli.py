import json

import pytest

from rebh.cli import Procedure, main, read_values
from rebh.sim.experiment import SWEEP_COLUMNS
from rebh.utils import UniformSource


def write_values(path, values, header=None):
    lines = ([header] if header is not None else []) + [str(v) for v in values]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def run_json(argv, capsys):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def evalues_file(tmp_path):
    return write_values(tmp_path / "evalues.txt", [9, 5, 1, 1], header="evalue")


@pytest.fixture
def pvalues_file(tmp_path):
    return write_values(tmp_path / "pvalues.txt", [0.05, 0.15, 0.9])


class TestReadValues:
    def test_header_blank_lines_and_inf(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("e\n1.5\n\ninf\n0\n")
        assert read_values(str(path)).tolist() == [1.5, float("inf"), 0.0]

    @pytest.mark.parametrize("text, match", [
        ("", "no values"),
        ("header\n", "no values"),
        ("1.0\nabc\n", ":2: cannot parse"),
        ("1.0\nnan\n", ":2: NaN"),
        ("x\n1.0\n-2\n", ":3: negative"),
        ("1,2\n3,4\n", "single column"),
    ], ids=["empty", "only-header", "bad-line", "nan", "negative", "two-columns"])
    def test_invalid(self, tmp_path, text, match):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ValueError, match=match):
            read_values(str(path))


class TestApply:
    def test_ebh(self, evalues_file, capsys):
        out = run_json(["apply", "ebh", evalues_file, "--alpha", "0.5"], capsys)
        assert out["rejected"] == [0, 1] and out["k_star"] == 2 and out["K"] == 4
        assert out["threshold"] == pytest.approx(8 / 3)
        assert out["u"] is None
        assert out["manifest"]["u_source"] == "none" and out["manifest"]["seed"] is None
        assert out["manifest"]["input_digest"].startswith("sha256:")

    def test_one_based(self, evalues_file, capsys):
        out = run_json(["apply", "ebh", evalues_file, "--alpha", "0.5", "--one-based"], capsys)
        assert out["rejected"] == [1, 2] and out["one_based"]

    def test_explicit_uniform(self, evalues_file, capsys):
        out = run_json(["apply", "u-ebh", evalues_file, "--alpha", "0.5", "--u", "0.5"], capsys)
        assert out["rejected"] == [0, 1, 2, 3]
        assert out["u"] == 0.5
        assert out["manifest"]["u_source"] == "explicit" and out["manifest"]["seed"] is None

    def test_seeded_uniform(self, evalues_file, capsys):
        out = run_json(["apply", "u-ebh", evalues_file, "--alpha", "0.5", "--seed", "7"], capsys)
        assert out["u"] == UniformSource(7).substream(0).uniform()
        assert out["manifest"]["seed"] == 7 and out["manifest"]["u_source"] == "seed"
        assert out == run_json(["apply", "u-ebh", evalues_file, "--alpha", "0.5", "--seed", "7"], capsys)

    def test_fresh_seed_is_reported_and_replays(self, tmp_path, evalues_file, capsys):
        manifest_path = tmp_path / "manifest.json"
        first = run_json(["apply", "rboth-ebh", evalues_file, "--alpha", "0.5", "--manifest",
                          str(manifest_path)], capsys)
        manifest = json.loads(manifest_path.read_text())
        assert manifest["seed"] is not None and manifest["outputs"] == [str(manifest_path)]
        assert len(manifest["u_draws"]) == 4 and len(manifest["u_adapt_draws"]) == 4

        by_seed = run_json(["apply", "rboth-ebh", evalues_file, "--alpha", "0.5", "--seed",
                            str(manifest["seed"])], capsys)
        assert by_seed["rejected"] == first["rejected"] and by_seed["u"] == first["u"]

        explicit = run_json(["apply", "rboth-ebh", evalues_file, "--alpha", "0.5",
                             "--u", ",".join(map(repr, manifest["u_draws"])),
                             "--u-adapt", ",".join(map(repr, manifest["u_adapt_draws"]))], capsys)
        assert explicit["rejected"] == first["rejected"]
        assert explicit["manifest"]["u_source"] == "explicit"

    def test_output_file(self, tmp_path, pvalues_file, capsys):
        out_path = tmp_path / "out.json"
        assert main(["apply", "by", pvalues_file, "--alpha", "0.55", "--output", str(out_path)]) == 0
        assert capsys.readouterr().out == ""
        out = json.loads(out_path.read_text())
        assert out["rejected"] == [0, 1] and out["threshold"] == pytest.approx(0.2)

    def test_pe_ebh(self, evalues_file, tmp_path, capsys):
        pvals = write_values(tmp_path / "indep.txt", [0.5, 0.5, 0.5, 0.5])
        out = run_json(["apply", "pe-ebh", evalues_file, "--alpha", "0.5", "--pvals", pvals], capsys)
        assert set(out["rejected"]) >= {0, 1}

    @pytest.mark.parametrize("extra", [
        ["ebh", "--u", "0.5"],
        ["r1-ebh", "--u", "0.5,0.5"],
        ["u-ebh", "--u", "0.5,0.5"],
        ["u-ebh", "--u", "0.0"],
        ["pe-ebh"],
        ["ebh", "--u-adapt", "0.5,0.5,0.5,0.5"],
    ], ids=["unused-uniform", "short-vector", "too-many-uniforms", "zero-uniform", "missing-pvalues",
            "unused-adaptive-uniforms"])
    def test_invalid_arguments(self, evalues_file, capsys, extra):
        argv = ["apply", extra[0], evalues_file, "--alpha", "0.5"] + extra[1:]
        assert main(argv) == 2
        assert capsys.readouterr().err.startswith("error:")

    @pytest.mark.parametrize("procedure,u,expected", [
        ("u-by", "0.5", [0, 1]),
        ("by", None, [0]),
    ], ids=["u-by", "by"])
    def test_options_before_input(self, tmp_path, capsys, procedure, u, expected):
        path = write_values(tmp_path / "pvals.txt", [0.05, 0.25, 0.9])
        argv = ["apply", procedure, "--alpha", "0.55"] + (["--u", u] if u is not None else []) + [path]
        assert run_json(argv, capsys)["rejected"] == expected

    @pytest.mark.parametrize("procedure", ["r1-ebh", "j-ebh"])
    def test_vector_uniforms_before_input(self, evalues_file, capsys, procedure):
        u = "0.1,0.2,0.3,0.4"
        before = run_json(["apply", procedure, "--alpha", "0.5", "--u", u, evalues_file], capsys)
        after = run_json(["apply", procedure, evalues_file, "--alpha", "0.5", "--u", u], capsys)
        assert before == after
        assert before["u"] == [0.1, 0.2, 0.3, 0.4]
        assert set(before["rejected"]) >= {0, 1}

    def test_malformed_uniforms_exit(self, evalues_file):
        with pytest.raises(SystemExit):
            main(["apply", "j-ebh", evalues_file, "--alpha", "0.5", "--u", "0.1,x,0.3,0.4"])

    def test_bad_input_reports_line(self, tmp_path, capsys):
        path = write_values(tmp_path / "bad.txt", ["1.0", "2.0", "oops"])
        assert main(["apply", "ebh", path, "--alpha", "0.1"]) == 2
        assert ":3:" in capsys.readouterr().err

    def test_empty_file(self, tmp_path, capsys):
        path = tmp_path / "empty.txt"
        path.write_text("")
        assert main(["apply", "ebh", str(path), "--alpha", "0.1"]) == 2

    def test_missing_file(self, tmp_path, capsys):
        assert main(["apply", "ebh", str(tmp_path / "nope.txt"), "--alpha", "0.1"]) == 2

    def test_unknown_procedure_exits(self, evalues_file):
        with pytest.raises(SystemExit):
            main(["apply", "storey", evalues_file, "--alpha", "0.1"])

    def test_uniform_kinds(self):
        assert Procedure.U_BY.uniforms == "single" and Procedure.U_BY.takes_pvalues
        assert Procedure.J_EBH.uniforms == "vector"
        assert Procedure.PE_EBH.uniforms == "none"


class TestMerge:
    def test_hommel(self, pvalues_file, capsys):
        out = run_json(["merge", "hommel", pvalues_file], capsys)
        assert out["value"] == pytest.approx(0.275)
        assert not out["randomized"] and out["u"] is None

    def test_u_hommel(self, pvalues_file, capsys):
        out = run_json(["merge", "u-hommel", pvalues_file, "--u", "0.5"], capsys)
        assert out["value"] == pytest.approx(0.1375)
        assert out["randomized"] and out["u"] == 0.5
        assert out["manifest"]["u_source"] == "explicit"

    def test_u_hommel_uniform_before_input(self, pvalues_file, capsys):
        out = run_json(["merge", "u-hommel", "--u", "0.5", pvalues_file], capsys)
        assert out["value"] == pytest.approx(0.1375)

    def test_u_hommel_seeded(self, pvalues_file, capsys):
        out = run_json(["merge", "u-hommel", pvalues_file, "--seed", "3"], capsys)
        assert out["u"] == UniformSource(3).substream(0).uniform()
        assert out["manifest"]["seed"] == 3

    def test_grid_harmonic(self, pvalues_file, capsys):
        out = run_json(["merge", "grid-harmonic", pvalues_file], capsys)
        assert out["value"] == pytest.approx(0.275, abs=1e-9)
        randomized = run_json(["merge", "grid-harmonic", pvalues_file, "--u", "0.4"], capsys)
        assert randomized["randomized"] and randomized["value"] <= out["value"]

    def test_single_value(self, tmp_path, capsys):
        path = write_values(tmp_path / "one.txt", [0.37])
        assert run_json(["merge", "hommel", path], capsys)["value"] == 0.37

    def test_hommel_with_uniform(self, pvalues_file, capsys):
        assert main(["merge", "hommel", pvalues_file, "--u", "0.5"]) == 2


class TestSimulate:
    @pytest.fixture
    def config_file(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({
            "K": 12, "mus": [1.0, 3.0], "rhos": [0.0, 0.5], "trials": 10, "seed": 4,
            "procedures": ["ebh", "u-ebh", "u-by"],
        }))
        return path

    def test_csv(self, config_file, capsys):
        assert main(["simulate", str(config_file)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        assert len(lines) == 1 + 2 * 2 * 3
        assert lines[1].startswith("ebh,1,0,") or lines[1].startswith("ebh,1.0,0.0,")

    def test_identical_across_workers(self, tmp_path, config_file):
        raw = json.loads(config_file.read_text())
        outputs = []
        for workers in (1, 3):
            cfg = tmp_path / ("sweep%d.json" % (workers))
            cfg.write_text(json.dumps(dict(raw, num_workers=workers)))
            out = tmp_path / ("out%d.csv" % (workers))
            assert main(["simulate", str(cfg), "--output", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    @pytest.mark.parametrize("changes", [
        {"procedures": ["ebh", "storey"]},
        {"procedures": []},
        {"mus": None},
        {"colour": "red"},
        {"rhos": [1.5]},
        {"u_mode": "antithetic"},
    ], ids=["unknown-procedure", "no-procedures", "missing-mus", "unknown-key", "bad-rho", "bad-u-mode"])
    def test_invalid(self, tmp_path, config_file, capsys, changes):
        raw = json.loads(config_file.read_text())
        raw.update(changes)
        raw = {k: v for k, v in raw.items() if v is not None}
        config_file.write_text(json.dumps(raw))
        assert main(["simulate", str(config_file)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        assert main(["simulate", str(path)]) == 2
