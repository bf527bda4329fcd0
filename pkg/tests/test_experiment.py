import json
import math

import numpy as np
import pytest

from crossgram import cli, experiment
from crossgram.benchmark import BenchmarkSpec, GeneratedSystem
from crossgram.errors import ConfigError
from crossgram.experiment import ExperimentConfig, parse_orders
from crossgram.metrics import REPORT_HEADER, ErrorReport
from crossgram.system import TimeGrid


def small_config(tmp_path, **kw):
    base = dict(spec=BenchmarkSpec(N=16, M=2, a=0.5, b=5.0, seed=3),
                grid=TimeGrid(0.01, 200), orders=list(range(1, 17)),
                output_dir=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


def test_parse_orders():
    assert parse_orders("1..4") == [1, 2, 3, 4]
    assert parse_orders("2, 4,8") == [2, 4, 8]
    assert parse_orders(5) == [5]
    assert parse_orders([3, 1]) == [3, 1]


@pytest.mark.parametrize("kw", [dict(gramians=("bogus",)), dict(projection="qr"),
                                dict(orders=[0, 1]), dict(substeps=-1),
                                dict(quadrature="simpson"), dict(centering="median")])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_config_json_roundtrip(tmp_path):
    cfg = small_config(tmp_path, gramians=("sylvester",), centering="none")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json(path) == cfg


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_overrides_leave_original_untouched():
    cfg = ExperimentConfig()
    new = experiment.with_overrides(cfg, N=40, seed=None, orders="1..5")
    assert new.spec.N == 40 and new.orders == [1, 2, 3, 4, 5]
    assert cfg.spec.N == 1000 and len(cfg.orders) == 100
    with pytest.raises(ConfigError):
        experiment.with_overrides(cfg, N=0)


def test_full_order_recovers_output(tmp_path):
    cfg = small_config(tmp_path, orders=[16])
    result = experiment.run_experiment(cfg, write=False)
    for method, rep in result.reports.items():
        assert max(rep.l1_rel[0], rep.l2_rel[0], rep.linf_rel[0]) <= 1e-8, method
        assert rep.unstable == [False]


def test_orders_beyond_dimension_are_skipped(tmp_path):
    cfg = small_config(tmp_path, gramians=("sylvester",), orders=[1, 15, 16, 17, 40])
    rep = experiment.run_experiment(cfg, write=False).reports["sylvester"]
    assert rep.orders == [1, 15, 16]


def test_artifacts_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    experiment.run_experiment(small_config(a))
    experiment.run_experiment(small_config(b))
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    for name in ("config.json", "input.csv", "fom_output.csv", "report_sylvester.csv",
                 "report_empirical.csv", "report_empirical-linear.csv", "fig_l2.dat",
                 "fig_hinf.svg", "system/A.csv", "gramian_sylvester.csv",
                 "gramian_sylvester.json"):
        assert any(str(f) == name for f in files), name
    for f in files:
        if f.suffix == ".csv":
            assert (a / f).read_bytes() == (b / f).read_bytes(), f
    lines = (a / "report_sylvester.csv").read_text().splitlines()
    assert lines[0] == REPORT_HEADER and len(lines) == 17


def test_emit_plot_data_empty(tmp_path):
    with pytest.warns(UserWarning):
        assert experiment.emit_plot_data({}, tmp_path) == []
    assert list(tmp_path.iterdir()) == []


def test_emit_plot_data_rows(tmp_path):
    reps = {}
    for m in ("sylvester", "empirical"):
        rep = ErrorReport(m)
        for n in range(1, 101):
            v = 10.0 ** (-n / 10)
            rep.add(n, (v, v, v), (v, v, v), v, v, False)
        reps[m] = rep
    written = experiment.emit_plot_data(reps, tmp_path)
    assert len(written) == 2 * len(experiment.FIGURES)
    lines = (tmp_path / "fig_l2.dat").read_text().splitlines()
    assert lines[0] == "# n sylvester empirical" and len(lines) == 101
    svg = (tmp_path / "fig_l2.svg").read_text()
    assert svg.count(">1e") == 17  # one tick label per decade from 1e-16 to 1e0


def test_svg_handles_non_finite():
    out = experiment.svg_chart([1, 2, 3], {"x": [1.0, math.nan, math.inf]})
    assert out.startswith("<svg") and "nan" not in out


# -- command line ----------------------------------------------------------

def test_cli_generate(tmp_path, capsys):
    out = tmp_path / "sys"
    assert cli.main(["generate", "--order-dim", "8", "--inputs", "2", "--seed", "4",
                     "--out", str(out)]) == 0
    gen = GeneratedSystem.load(out)
    assert gen.sys.N == 8 and gen.spec.seed == 4
    assert "N=8" in capsys.readouterr().out


def test_cli_run_sweep_plot(tmp_path):
    common = ["--orders", "1..6", "--tmax", "1", "--gramian", "sylvester,empirical-linear"]
    assert cli.main(["generate", "--order-dim", "6", "--out", str(tmp_path / "sys")]) == 0
    assert cli.main(["sweep", str(tmp_path / "sys"), "--out", str(tmp_path / "sw")]
                    + common) == 0
    assert cli.main(["run", "--order-dim", "6", "--out", str(tmp_path / "run")] + common) == 0
    a = (tmp_path / "sw" / "report_sylvester.csv").read_bytes()
    assert a == (tmp_path / "run" / "report_sylvester.csv").read_bytes()
    assert cli.main(["plot", str(tmp_path / "run"), "--out", str(tmp_path / "p"),
                     "--no-svg"]) == 0
    assert sorted(p.name for p in (tmp_path / "p").iterdir()) == sorted(
        f"fig_{f}.dat" for f, _ in experiment.FIGURES)


def test_cli_config_file(tmp_path):
    cfg = small_config(tmp_path / "out", gramians=("sylvester",), orders=[1, 2])
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert cli.main(["run", "--config", str(path), "--orders", "3"]) == 0
    rep = ErrorReport.from_csv(tmp_path / "out" / "report_sylvester.csv")
    assert rep.orders == [3]


@pytest.mark.parametrize("argv, code", [
    (["run", "--order-dim", "0"], 2),
    (["run", "--gramian", "bogus"], 2),
    (["run", "--dt", "-1"], 2),
    (["plot", "/nonexistent/dir"], 2),
    (["run", "--order-dim", "12", "--inputs", "12", "--dt", "1", "--tmax", "200",
      "--substeps", "1", "--orders", "1", "--gramian", "sylvester"], 3),
])
def test_cli_exit_codes(tmp_path, argv, code, capsys):
    assert cli.main(argv + (["--out", str(tmp_path)] if argv[0] == "run" else [])) == code
    assert "error" in capsys.readouterr().err


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    argv = ["run", "--order-dim", "4", "--orders", "1", "--tmax", "0.5",
            "--gramian", "sylvester", "--out", str(blocker / "sub")]
    assert cli.main(argv) == 4


def test_cli_missing_system(tmp_path):
    assert cli.main(["sweep", str(tmp_path / "none"), "--out", str(tmp_path)]) == 4


def test_fom_input_is_seeded(tmp_path):
    r1 = experiment.run_experiment(small_config(tmp_path, gramians=("sylvester",), orders=[1],
                                                noise_seed=1), write=False)
    r2 = experiment.run_experiment(small_config(tmp_path, gramians=("sylvester",), orders=[1],
                                                noise_seed=2), write=False)
    assert not np.array_equal(r1.noise, r2.noise)
    assert r1.noise.shape == (200, 2)
