import json
import sys

import pytest

from approxtree import cli, rtl
from conftest import DATA_DIR


def run_cli(monkeypatch, *args):
    monkeypatch.setattr(sys, "argv", ["approxtree", *map(str, args)])
    return cli.entry()


COMMON = ["--dataset", DATA_DIR / "coarse2.csv", "--label-col", "side", "--seed", "5"]


@pytest.fixture
def trained(tmp_path, monkeypatch):
    out = tmp_path / "run"
    code = run_cli(monkeypatch, "train", "--out", out, *COMMON)
    assert code == 0
    return out


@pytest.fixture
def optimized(trained, monkeypatch):
    code = run_cli(monkeypatch, "optimize", "--out", trained, "--pop", "16", "--gens", "8")
    assert code == 0
    return trained


class TestTrain:
    def test_outputs(self, trained):
        assert (trained / "tree.json").exists()
        base = json.loads((trained / "baseline.json").read_text())
        assert base["comparators"] >= 1
        assert 0.0 <= base["float_test_accuracy"] <= 1.0
        assert base["baseline_area"] > 0

    def test_missing_dataset_exit_2(self, tmp_path, monkeypatch, capsys):
        code = run_cli(
            monkeypatch, "train", "--out", tmp_path / "x",
            "--dataset", tmp_path / "nope.csv", "--label-col", "0",
        )
        assert code == 2
        assert "nope.csv" in capsys.readouterr().err

    def test_pure_dataset_exit_2(self, tmp_path, monkeypatch, capsys):
        # identical rows with conflicting labels: training yields a single leaf
        data = tmp_path / "pure.csv"
        data.write_text("x,cls\n0.5,a\n0.5,b\n0.5,a\n0.5,b\n")
        code = run_cli(monkeypatch, "train", "--out", tmp_path / "x",
                       "--dataset", data, "--label-col", "cls")
        assert code == 2
        assert "no comparators" in capsys.readouterr().err


class TestOptimize:
    def test_outputs(self, optimized):
        doc = json.loads((optimized / "pareto.json").read_text())
        assert doc["members"]
        assert any(m["area"] <= doc["baseline"]["area"] for m in doc["members"])
        history = (optimized / "history.csv").read_text().splitlines()
        assert history[0].startswith("# approxtree=")
        assert history[1] == "generation,best_error,min_area,front_size,hypervolume"
        assert len(history) == 2 + 8 + 1  # header rows + generations 0..8

    def test_requires_trained_tree(self, tmp_path, monkeypatch, capsys):
        code = run_cli(monkeypatch, "optimize", "--out", tmp_path / "empty", *COMMON)
        assert code == 2
        assert "train" in capsys.readouterr().err

    def test_norm_area_of_baseline_member_is_one(self, optimized):
        doc = json.loads((optimized / "pareto.json").read_text())
        base_area = doc["baseline"]["area"]
        for m in doc["members"]:
            assert m["norm_area"] == pytest.approx(m["area"] / base_area)


class TestEmit:
    def test_emit_best_area_within(self, optimized, monkeypatch):
        code = run_cli(monkeypatch, "emit", "--out", optimized,
                       "--select", "best-area-within 0.05")
        assert code == 0
        text = (optimized / "design.v").read_text()
        assert "module tree_classifier (" in text
        design = json.loads((optimized / "design.json").read_text())
        assert any(n.get("precision") for n in design["nodes"])

    def test_index_selector(self, optimized, monkeypatch):
        assert run_cli(monkeypatch, "emit", "--out", optimized, "--select", "0") == 0

    def test_index_out_of_range_exit_2(self, optimized, monkeypatch, capsys):
        code = run_cli(monkeypatch, "emit", "--out", optimized, "--select", "999")
        assert code == 2
        assert "out of range" in capsys.readouterr().err

    def test_bad_selector_exit_2(self, optimized, monkeypatch):
        assert run_cli(monkeypatch, "emit", "--out", optimized, "--select", "wat?") == 2

    def test_equivalence_gate_blocks_bad_netlist(self, optimized, monkeypatch, capsys):
        original = rtl.build_netlist

        def corrupted(qtree):
            net = original(qtree)
            bad = list(net.leaf_terms)
            # flip every leaf class: netlist no longer matches the tree
            bad = [
                rtl.LeafTerm(
                    leaf_id=t.leaf_id,
                    class_label=(t.class_label + 1) % net.class_count,
                    path=t.path,
                )
                for t in bad
            ]
            return rtl.Netlist(
                feature_bits=net.feature_bits,
                comparators=net.comparators,
                leaf_terms=tuple(bad),
                class_count=net.class_count,
            )

        monkeypatch.setattr(cli.rtl, "build_netlist", corrupted)
        code = run_cli(monkeypatch, "emit", "--out", optimized, "--select", "0")
        assert code == 3
        assert "disagrees" in capsys.readouterr().err
        assert not (optimized / "design.v").exists()


class TestReport:
    def test_summary_and_plot_files(self, optimized, tmp_path, monkeypatch, capsys):
        rep = tmp_path / "rep"
        code = run_cli(monkeypatch, "report", optimized, "--out", rep,
                       "--select", "best-area-within 0.05")
        assert code == 0
        lines = (rep / "report.csv").read_text().splitlines()
        assert lines[0].startswith("run,dataset,")
        assert len(lines) == 2
        plot = (rep / f"plot_{optimized.name}.csv").read_text().splitlines()
        assert plot[0] == "accuracy,norm_area"
        assert len(plot) >= 2

    def test_incomplete_run_exit_2(self, tmp_path, monkeypatch):
        empty = tmp_path / "void"
        empty.mkdir()
        assert run_cli(monkeypatch, "report", empty, "--out", tmp_path / "r") == 2


class TestConfigFile:
    def test_toml_config_with_flag_override(self, tmp_path, monkeypatch):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            f'dataset = "{DATA_DIR / "coarse2.csv"}"\n'
            'label_col = "side"\n'
            "seed = 9\n"
            "pop = 16\n"
            "gens = 4\n"
        )
        out = tmp_path / "run"
        assert run_cli(monkeypatch, "train", "--config", cfg, "--out", out) == 0
        assert run_cli(monkeypatch, "optimize", "--config", cfg, "--out", out,
                       "--gens", "2") == 0
        run_cfg = json.loads((out / "run.json").read_text())["config"]
        assert run_cfg["seed"] == 9
        assert run_cfg["gens"] == 2  # flag wins over file

    def test_unknown_key_rejected(self, tmp_path, monkeypatch, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text("whatever = 1\n")
        code = run_cli(monkeypatch, "train", "--config", cfg, "--out", tmp_path / "o",
                       *COMMON)
        assert code == 2
        assert "unknown config" in capsys.readouterr().err


class TestDeterminism:
    def test_pipeline_reproducible(self, tmp_path, monkeypatch):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli(monkeypatch, "train", "--out", out, *COMMON) == 0
            assert run_cli(monkeypatch, "optimize", "--out", out,
                           "--pop", "12", "--gens", "5") == 0
            assert run_cli(monkeypatch, "emit", "--out", out, "--select", "0") == 0
            outputs.append(
                {
                    f: (out / f).read_bytes()
                    for f in ("pareto.csv", "history.csv", "design.v", "tree.json")
                }
            )
        assert outputs[0] == outputs[1]
