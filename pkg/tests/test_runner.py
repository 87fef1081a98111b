"""Config validation, manifests, scenario drivers and the ``lab`` command line."""

import json
from importlib import resources

import numpy as np
import pytest
import tomli

from eulerlab import io
from eulerlab.runner import (
    DESCRIPTIONS,
    RUNNERS,
    ConfigError,
    CriterionResult,
    dumps,
    load,
    make_rng,
    output_root,
    parse_text,
    resolve,
)
from eulerlab.runner import cli, criteria
from eulerlab.runner.config import SCHEMAS
from eulerlab.runner.scenarios import channel_perturbation

SMALL = {
    "euler2d": '[grid]\nn = 16\n[solver]\ndt = 0.01\nend_time = 0.05\n[initial]\nkind = "random"\n',
    "channel-growth": ("[grid]\nnx = 32\nny = 16\n[solver]\ndt = 0.05\nend_time = 7.0\nsnapshot_every = 5\n"
                       "[perturbation]\nmargin = 0.1\n[curves]\nmarkers = 101\n"),
    "model1d": '[model]\nvariant = "projection_a"\nend_time = 0.2\n',
    "fundamental": "[fundamental]\nend_time = 0.2\n",
    "selfsimilar": "",
    "bsalpha": "[bsalpha]\nalphas = [0.5]\ntrials = 2\n",
    "pressureless": "[pressureless]\ndims = [3]\nsamples = 200\n",
    "geometry": '[geometry]\npsi = "cellular"\nlevels = [0.5]\naction_trials = 0\n',
}


def write_cfg(tmp_path, scenario, body="", name=None, seed=0):
    head = f'[run]\nscenario = "{scenario}"\nseed = {seed}\n'
    if name:
        head += f'name = "{name}"\n'
    p = tmp_path / f"{name or scenario}.cfg"
    p.write_text(head + body)
    return p


def shipped(name):
    return resources.files("eulerlab") / "configs" / name


class TestConfig:
    def test_defaults_filled(self):
        cfg = parse_text('[run]\nscenario = "euler2d"\n', "demo")
        assert cfg["run"]["name"] == "demo"
        assert cfg["grid"]["n"] == 64
        assert cfg["solver"]["dt"] == 1e-3

    def test_all_errors_listed(self):
        text = '[run]\nscenario = "euler2d"\nbogus = 1\n[grid]\nn = "x"\nsize = 3\n[wat]\na = 1\n'
        with pytest.raises(ConfigError) as exc:
            parse_text(text)
        errs = exc.value.errors
        assert len(errs) == 4
        assert any("bogus" in e for e in errs)
        assert any("size" in e for e in errs)
        assert any("[wat]" in e for e in errs)
        assert any("n must be int" in e for e in errs)

    @pytest.mark.parametrize("text", [
        "[grid]\nn = 64\n",
        '[run]\nscenario = "nope"\n',
        '[run]\nscenario = "euler2d"\n[grid]\nn = 7\n',
        '[run]\nscenario = "euler2d"\n[solver]\ndt = -1.0\n',
        '[run]\nscenario = "euler2d"\n[initial]\nkind = "vortex"\n',
        '[run]\nscenario = "euler2d"\nseed = true\n',
        "[run\n",
    ])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load(tmp_path / "absent.cfg")

    def test_int_accepted_for_float(self):
        cfg = parse_text('[run]\nscenario = "euler2d"\n[solver]\ndt = 1\n')
        assert isinstance(cfg["solver"]["dt"], float)

    @pytest.mark.parametrize("scenario", sorted(SCHEMAS))
    def test_manifest_round_trip(self, scenario):
        cfg = parse_text(f'[run]\nscenario = "{scenario}"\n', scenario)
        assert resolve(tomli.loads(dumps(cfg))) == cfg

    def test_output_root(self, monkeypatch, tmp_path):
        cfg = parse_text('[run]\nscenario = "euler2d"\n')
        monkeypatch.delenv("LAB_OUTPUT_DIR", raising=False)
        assert str(output_root(cfg)) == "lab_output"
        monkeypatch.setenv("LAB_OUTPUT_DIR", str(tmp_path))
        assert output_root(cfg) == tmp_path
        cfg["run"]["output_dir"] = "elsewhere"
        assert str(output_root(cfg)) == "elsewhere"

    def test_shipped_configs_valid(self):
        for name in ("cellular_steady.cfg", "fig7_spiral.cfg"):
            cfg = load(shipped(name))
            assert cfg["run"]["scenario"] == "euler2d"


class TestRng:
    def test_philox_reproducible(self):
        a = make_rng(7).standard_normal(5)
        b = make_rng(7).standard_normal(5)
        assert np.array_equal(a, b)
        assert type(make_rng(7).bit_generator).__name__ == "Philox"
        assert not np.array_equal(a, make_rng(8).standard_normal(5))


class TestScenarios:
    def test_every_scenario_described(self):
        assert set(DESCRIPTIONS) == set(RUNNERS) == set(SCHEMAS)

    @pytest.mark.parametrize("scenario", sorted(SMALL))
    def test_small_runs(self, scenario, tmp_path, monkeypatch):
        monkeypatch.setenv("LAB_OUTPUT_DIR", str(tmp_path / "out"))
        cfg_path = write_cfg(tmp_path, scenario, SMALL[scenario])
        assert cli.main(["run", str(cfg_path)]) == 0
        out = tmp_path / "out" / scenario
        summary = json.loads((out / "summary.json").read_text())
        assert summary["scenario"] == scenario
        for f in summary["files"]:
            assert (out / f).exists()
        manifest = tomli.loads((out / "manifest.toml").read_text())
        assert manifest == load(cfg_path)

    @pytest.mark.parametrize("scenario", ["euler2d", "bsalpha", "geometry"])
    def test_deterministic_csv(self, scenario, tmp_path):
        cfg_path = write_cfg(tmp_path, scenario, SMALL[scenario], seed=11)
        blobs = []
        for k in range(2):
            out = tmp_path / f"o{k}"
            assert cli.main(["run", str(cfg_path), "--output-dir", str(out)]) == 0
            blobs.append({p.name: p.read_bytes() for p in sorted((out / scenario).glob("*.csv"))})
        assert blobs[0] and blobs[0] == blobs[1]

    def test_seed_changes_random_data(self, tmp_path):
        rows = []
        for seed in (1, 2):
            cfg_path = write_cfg(tmp_path, "euler2d", SMALL["euler2d"], name=f"s{seed}", seed=seed)
            cli.main(["run", str(cfg_path), "--output-dir", str(tmp_path / "o")])
            rows.append((tmp_path / "o" / f"s{seed}" / "diagnostics.csv").read_text())
        assert rows[0] != rows[1]


class TestChannelData:
    def test_zero_on_walls(self):
        x = np.linspace(0, 2 * np.pi, 9)
        for m in (0.0, 0.2):
            assert np.allclose(channel_perturbation(x, 0.0 * x, m), 0.0)
            assert np.allclose(channel_perturbation(x, 1.0 + 0.0 * x, m), 0.0)

    def test_margin_gives_compact_support(self):
        y = np.linspace(0, 1, 101)
        h = channel_perturbation(np.full_like(y, 1.5 * np.pi), y, 0.2)
        assert np.all(h[(y <= 0.2) | (y >= 0.8)] == 0.0)
        assert h[50] == pytest.approx(0.5)


class TestShippedRuns:
    def test_cellular_steady(self, tmp_path):
        assert cli.main(["run", str(shipped("cellular_steady.cfg")), "--output-dir", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "cellular_steady" / "summary.json").read_text())
        assert summary["max_tendency_norm"] < 1e-10

    def test_spiral_figure(self, tmp_path):
        assert cli.main(["run", str(shipped("fig7_spiral.cfg")), "--output-dir", str(tmp_path)]) == 0
        out = tmp_path / "fig7_spiral"
        summary = json.loads((out / "summary.json").read_text())
        assert summary["enstrophy_monotone_decreasing"]
        heat = sorted(out.glob("heatmap_*.pgm"))
        assert len(heat) >= 2
        img, lo, hi = io.read_pgm(heat[0])
        assert img.shape == (256, 256) and lo < hi
        snap = sorted(out.glob("snapshot_*.fld"))[-1]
        assert cli.main(["render", str(snap), "--out", str(tmp_path / "last.pgm")]) == 0
        assert io.read_pgm(tmp_path / "last.pgm")[0].shape == (256, 256)


class TestCli:
    def test_list_scenarios(self, capsys):
        assert cli.main(["list-scenarios"]) == 0
        out = capsys.readouterr().out
        for name in RUNNERS:
            assert name in out

    def test_validation_exit(self, tmp_path, capsys):
        p = tmp_path / "bad.cfg"
        p.write_text('[run]\nscenario = "euler2d"\nbogus = 1\n[grid]\nn = "x"\n')
        assert cli.main(["run", str(p)]) == 1
        err = capsys.readouterr().err
        assert "bogus" in err and "n must be int" in err

    def test_usage_exit(self, capsys):
        assert cli.main([]) == 1
        assert cli.main(["verify", "everything"]) == 1
        assert cli.main(["render", "x.fld"]) == 1

    def test_runtime_exit(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        cfg = write_cfg(tmp_path, "selfsimilar")
        assert cli.main(["run", str(cfg), "--output-dir", str(blocker)]) == 2

    def test_render_polar(self, tmp_path):
        cfg = write_cfg(tmp_path, "fundamental",
                        '[fundamental]\nsolver = "polar"\nn_radial = 32\nend_time = 0.05\n')
        assert cli.main(["run", str(cfg), "--output-dir", str(tmp_path)]) == 0
        assert cli.main(["render", str(tmp_path / "fundamental" / "final.pol"), "--out", str(tmp_path / "p.pgm")]) == 0
        assert (tmp_path / "p.pgm").read_bytes()[:2] == b"P5"

    def test_render_bad_inputs(self, tmp_path):
        junk = tmp_path / "junk.fld"
        junk.write_bytes(b"NOPE1234")
        assert cli.main(["render", str(junk), "--out", str(tmp_path / "j.pgm")]) == 1
        assert cli.main(["render", str(tmp_path / "absent.fld"), "--out", str(tmp_path / "j.pgm")]) == 1
        snap = tmp_path / "ok.fld"
        io.write_snapshot(snap, np.zeros((8, 8)), "torus", 0.0)
        truncated = tmp_path / "cut.fld"
        truncated.write_bytes(snap.read_bytes()[:20])
        assert cli.main(["render", str(truncated), "--out", str(tmp_path / "j.pgm")]) == 1
        assert cli.main(["render", str(snap), "--out", str(tmp_path / "no" / "dir" / "j.pgm")]) == 2

    @pytest.mark.parametrize("passed,code", [(True, 0), (False, 3)])
    def test_verify_exit(self, monkeypatch, capsys, passed, code):
        fake = CriterionResult(99, "stub", 0.0, 1.0, passed, "", 0.0)

        def run_suite(name, report=print):
            report(fake.line())
            return [fake]

        monkeypatch.setattr(criteria, "run_suite", run_suite)
        assert cli.main(["verify", "bounds"]) == code
        assert ("PASS" if passed else "FAIL") in capsys.readouterr().out

    def test_suites_partition_criteria(self):
        ids = sorted(i for s in criteria.SUITES.values() for i in s)
        assert ids == list(range(1, 18))
        assert sorted(criteria.CRITERIA) == ids
