import json
import shutil
import subprocess
from pathlib import Path

import pytest

from negpell_lab.harness import (
    BlockCache,
    ExperimentConfig,
    Report,
    Table,
    load_thresholds,
    read_csv,
    run_experiment,
    write_csv,
)
from negpell_lab.harness.cli import main
from negpell_lab.harness.config import CACHE_ENV, DEFAULT_THRESHOLDS, resolve_cache
from negpell_lab.harness.experiments import density_checkpoints, total_variation

# small limits that keep every experiment under a few seconds
SMALL = {
    "density_scan": 20000,
    "rank_distribution": 20000,
    "markov_check": 20000,
    "oracle_crosscheck": 20000,
    "redei_fuzz": 40,
    "combi_suite": 200,
    "equidist": 4,
    "model": 12,
}


def _run_cli(tmp_path, name, *extra, limit=None):
    out = tmp_path / name
    code = main([name, "--limit", str(limit or SMALL[name]), "--out", str(out), *extra])
    return code, out


def _results(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if not p.name.endswith(".timing.json")}


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig.make("density_scan")
        assert cfg.limit == 10**6 and cfg.thresholds == DEFAULT_THRESHOLDS

    @pytest.mark.parametrize(
        "kw",
        [dict(name="nope", limit=10), dict(name="model", limit=1), dict(name="model", limit=5, threads=0),
         dict(name="model", limit=5, thresholds={"rk4_tv": 0}), dict(name="model", limit=5, ordering="x")],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_manifest_view_excludes_threads(self):
        a = ExperimentConfig.make("model", 5, threads=1)
        b = ExperimentConfig.make("model", 5, threads=3, out=Path("x"))
        assert a.manifest_view() == b.manifest_view()

    def test_threshold_file(self, tmp_path):
        p = tmp_path / "th.json"
        p.write_text(json.dumps({"rk4_tv": 0.5}))
        assert load_thresholds(p)["rk4_tv"] == 0.5
        p.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(ValueError):
            load_thresholds(p)

    def test_cache_resolution(self, tmp_path, monkeypatch):
        monkeypatch.delenv(CACHE_ENV, raising=False)
        assert resolve_cache(None) is None
        monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env"))
        assert resolve_cache(None) == tmp_path / "env"
        assert resolve_cache(tmp_path / "flag") == tmp_path / "flag"


class TestIO:
    def test_csv_roundtrip(self, tmp_path):
        t = Table(("a", "b", "c"))
        t.add(1, 0.1 + 0.2, True)
        t.add("x,y", -3, False)
        t.add('quote "q"', 1e-300, 7)
        write_csv(tmp_path / "t.csv", t)
        assert read_csv(tmp_path / "t.csv") == t
        with pytest.raises(ValueError):
            t.add(1, 2)

    def test_block_cache_resumes(self, tmp_path):
        path = tmp_path / "c.jsonl"
        c = BlockCache(path)
        c.put("0-100", [1, 2])
        c.put("100-200", [3, 4])
        with open(path, "a") as fh:
            fh.write('{"key": "200-3')  # torn write
        again = BlockCache(path)
        assert len(again) == 2 and again.get("100-200") == [3, 4] and "200-300" not in again
        assert BlockCache(None).get("x") is None


class TestReport:
    def test_exit_codes(self):
        r = Report("x")
        r.hard("h", True)
        r.soft("s", None)
        assert r.exit_code() == 0
        r.soft("s2", False)
        assert r.exit_code() == 2
        r.hard("h2", False)
        assert r.exit_code() == 1
        assert r.check("s").as_dict()["status"] == "n/a"

    def test_total_variation(self):
        from fractions import Fraction as F

        assert total_variation([F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]) == 0
        assert total_variation([F(1)], [F(0), F(1)]) == 1

    def test_checkpoints(self):
        assert density_checkpoints(10**6) == [10**4, 10**5, 10**6]
        assert density_checkpoints(12345) == [10**4, 12345]
        assert density_checkpoints(500) == [500]


class TestExperiments:
    def test_density_small_exact(self):
        rep = run_experiment(ExperimentConfig.make("density_scan", 100))
        row = read_rows(rep, "density_scan")[-1]
        from negpell_lab.arith import family_members
        from negpell_lab.pell import neg_pell_soluble

        ds = family_members(100).tolist()
        assert int(row["X"]) == 100 and int(row["count_D"]) == len(ds)
        assert int(row["count_D_minus"]) == sum(neg_pell_soluble(d) for d in ds)

    def test_degenerate_density_rejected(self, tmp_path):
        code, _ = _run_cli(tmp_path, "density_scan", limit=2)
        assert code == 1

    def test_rank_frequencies_sum_to_one(self):
        rep = run_experiment(ExperimentConfig.make("rank_distribution", 20000))
        assert rep.check("frequencies_sum_to_one").passed

    @pytest.mark.parametrize("name", sorted(SMALL))
    def test_hard_checks_pass(self, name):
        th = dict(DEFAULT_THRESHOLDS, art2_delta=20000)
        rep = run_experiment(ExperimentConfig.make(name, SMALL[name], thresholds=th))
        assert rep.hard_ok, [c for c in rep.checks if c.hard and not c.passed]
        assert rep.tables

    def test_markov_rows_sum_to_one(self):
        rep = run_experiment(ExperimentConfig.make("markov_check", 30000))
        by_row: dict[tuple[str, str], int] = {}
        for row in read_rows(rep, "markov_check"):
            key = (row["m"], row["n"])
            by_row[key] = by_row.get(key, 0) + int(row["count"])
            assert int(row["total"]) >= int(row["count"])
        totals = {(r["m"], r["n"]): int(r["total"]) for r in read_rows(rep, "markov_check")}
        assert by_row == totals
        # n = 0 always stays at 0
        assert all(r["j"] == "0" for r in read_rows(rep, "markov_check") if r["n"] == "0")


def read_rows(rep, table):
    t = rep.tables[table]
    return [dict(zip(t.header, row)) for row in t.rows]


class TestCLI:
    def test_outputs_and_manifest(self, tmp_path):
        code, out = _run_cli(tmp_path, "model")
        assert code == 0
        man = json.loads((out / "model.manifest.json").read_text())
        assert man["exit_code"] == 0 and man["config"]["limit"] == 12
        assert "numpy" in man["versions"] and man["outputs"] == ["model.csv"]
        assert (out / "model.timing.json").exists()

    def test_soft_breach_exit_two(self, tmp_path):
        th = tmp_path / "th.json"
        th.write_text(json.dumps({"rk4_at": 10000, "rk4_tv": 1e-6}))
        code, out = _run_cli(tmp_path, "rank_distribution", "--threshold-file", str(th))
        assert code == 2
        man = json.loads((out / "rank_distribution.manifest.json").read_text())
        assert man["config"]["thresholds"]["rk4_tv"] == 1e-6

    def test_bad_threshold_file_is_error(self, tmp_path):
        th = tmp_path / "th.json"
        th.write_text(json.dumps({"nope": 1}))
        code, _ = _run_cli(tmp_path, "model", "--threshold-file", str(th))
        assert code == 1

    def test_entry_point(self, tmp_path):
        exe = shutil.which("negpell-lab")
        if exe is None:
            pytest.skip("console script not installed")
        proc = subprocess.run([exe, "model", "--limit", "3", "--out", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0 and "pell_recursion" in proc.stdout

    def test_cache_env_used(self, tmp_path, monkeypatch):
        cache = tmp_path / "cache"
        monkeypatch.setenv(CACHE_ENV, str(cache))
        code, out1 = _run_cli(tmp_path, "density_scan")
        assert code in (0, 2) and any(cache.iterdir())
        code2 = main(["density_scan", "--limit", str(SMALL["density_scan"]), "--out", str(tmp_path / "again")])
        assert code2 == code
        assert _results(out1) == _results(tmp_path / "again")


class TestDeterminism:
    @pytest.mark.parametrize("name", sorted(SMALL))
    def test_rerun_identical(self, tmp_path, name):
        _, a = _run_cli(tmp_path / "a", name)
        _, b = _run_cli(tmp_path / "b", name, "--threads", "2")
        assert _results(a) == _results(b)

    def test_seed_changes_random_experiments(self, tmp_path):
        _, a = _run_cli(tmp_path / "a", "combi_suite", "--seed", "1")
        _, b = _run_cli(tmp_path / "b", "combi_suite", "--seed", "2")
        assert _results(a)["combi_systems.csv"] != _results(b)["combi_systems.csv"]
