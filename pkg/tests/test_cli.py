import json

import pytest

from neelwall.cli import main


def run_cli(args):
    return main(args)


class TestSelftest:
    def test_fresh_checkout_passes(self, capsys):
        assert run_cli(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "lorentzian_double" in out

    def test_perturbed_spectral_constant_fails(self):
        assert run_cli(["selftest", "--spectral-scale", "1.05"]) == 3


class TestMinimize:
    def test_valid_config_writes_files_and_exits_zero(self, tmp_path):
        out = tmp_path / "run"
        code = run_cli([
            "minimize",
            "--set", "grid.N=513", "--set", "grid.L=40.0",
            "--set", "field.h=0.9",
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "profile.csv").exists()
        payload = json.loads((out / "minimize.json").read_text())
        assert payload["result"]["converged"] is True
        assert payload["config"]["grid"]["N"] == 513
        assert payload["result"]["breakdown"]["total"] >= 0.01

    def test_even_n_rejected_with_named_constraint(self, capsys, tmp_path):
        code = run_cli(["minimize", "--set", "grid.N=512", "--out", str(tmp_path)])
        assert code == 1
        assert "grid.N" in capsys.readouterr().err

    def test_all_violations_listed(self, capsys, tmp_path):
        code = run_cli([
            "minimize",
            "--set", "grid.N=512", "--set", "field.h=2.0",
            "--set", "degree.offset=bogus",
            "--out", str(tmp_path),
        ])
        assert code == 1
        err = capsys.readouterr().err
        assert "grid.N" in err
        assert "field.h" in err
        assert "degree.offset" in err

    def test_forced_nonconvergence_exits_2_with_partial_result(self, tmp_path):
        out = tmp_path / "hard"
        code = run_cli([
            "minimize",
            "--set", "grid.N=513", "--set", "grid.L=60.0",
            "--set", "field.h=0.99",
            "--set", "degree.k=2", "--set", "degree.offset=minus",
            "--set", "solver.max_iters=2",
            "--out", str(out),
        ])
        assert code == 2
        payload = json.loads((out / "minimize.json").read_text())
        assert payload["result"]["converged"] is False
        assert (out / "profile.csv").exists()

    def test_config_file_plus_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "grid": {"L": 40.0, "N": 513},
            "field": {"h": 0.95},
        }))
        out = tmp_path / "out"
        code = run_cli([
            "minimize", "--config", str(cfg),
            "--set", "field.h=0.9",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads((out / "minimize.json").read_text())
        assert payload["config"]["field"]["h"] == 0.9


class TestExperimentCommand:
    def test_unknown_name_lists_valid(self, capsys):
        assert run_cli(["experiment", "bogus"]) == 1
        err = capsys.readouterr().err
        assert "appendix" in err and "table" in err

    def test_appendix_writes_report_pair(self, tmp_path):
        out = tmp_path / "rep"
        code = run_cli(["experiment", "appendix", "--out", str(out)])
        assert code == 0
        assert (out / "appendix.csv").exists()
        payload = json.loads((out / "appendix.verdicts.json").read_text())
        assert payload["all_ok"] is True
        assert all("claim" in v for v in payload["verdicts"])

    def test_split_requires_partition(self, capsys, tmp_path):
        code = run_cli(["experiment", "split", "--out", str(tmp_path)])
        assert code == 1
        assert "partition" in capsys.readouterr().err

    def test_table_shape_and_exit(self, tmp_path):
        out = tmp_path / "table"
        code = run_cli([
            "experiment", "table",
            "--set", "grid.N=513", "--set", "grid.L=40.0",
            "--set", 'experiment.degrees=[{"k":0,"offset":"plus"},'
                     '{"k":1,"offset":"minus"}]',
            "--set", "experiment.h_set=[0.9]",
            "--set", "solver.grad_tol=1e-6",
            "--out", str(out),
            "--jobs", "1",
        ])
        assert code == 0
        rows = (out / "table.csv").read_text().splitlines()
        assert rows[0].startswith("h,degree,d_value,energy")
        assert len(rows) == 3

    def test_r_exceeding_half_width_rejected(self, capsys, tmp_path):
        code = run_cli([
            "experiment", "split",
            "--set", "grid.L=40.0", "--set", "grid.N=513",
            "--set", 'experiment.partition=[{"k":1,"offset":"zero"},'
                     '{"k":1,"offset":"minus"}]',
            "--set", "experiment.R_list=[30.0]",
            "--out", str(tmp_path),
        ])
        assert code == 1
        assert "L/2" in capsys.readouterr().err

    def test_failing_verdict_exits_3(self, tmp_path, monkeypatch):
        import neelwall.cli as cli
        from neelwall.reports import ExperimentReport

        def corrupted(name, cfg, jobs):
            rep = ExperimentReport(name=name, parameters={}, columns=["x"])
            rep.add_row(x=0.0)
            rep.add_verdict("injected", False, -1.0, "corrupted profile input")
            return rep

        monkeypatch.setattr(cli, "_run_experiment", corrupted)
        code = run_cli(["experiment", "structure", "--out", str(tmp_path)])
        assert code == 3
        payload = json.loads((tmp_path / "structure.verdicts.json").read_text())
        assert payload["all_ok"] is False


class TestConfigParsing:
    def test_set_needs_equals(self):
        assert run_cli(["minimize", "--set", "grid.N_513"]) == 1

    def test_missing_config_file(self):
        assert run_cli(["minimize", "--config", "/nonexistent.json"]) == 1
