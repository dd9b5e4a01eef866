import dataclasses
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hitstats.cli import main
from hitstats.compound import Poisson, PolyaAeppli
from hitstats.harness import (
    KEYS,
    PRESETS,
    ConfigError,
    ExperimentConfig,
    UnknownFormat,
    apply_overrides,
    build_map,
    config_echo,
    emit,
    parse_config,
    predict,
    predicted_law,
    preset_config,
    run_preset,
    sweep,
    validate,
)
from hitstats.measure import ExactLebesgue

SMALL = {"run.trials": "5000", "run.lambda_trials": "20000", "run.hit_trials": "20000", "run.k_max": "12"}


@pytest.mark.parametrize("name", list(PRESETS))
def test_echo_roundtrip_presets(name):
    cfg = preset_config(name)
    assert parse_config(config_echo(cfg)) == cfg


@given(
    st.floats(1e-9, 0.5, allow_nan=False),
    st.floats(0.01, 10.0),
    st.integers(1, 1 << 20),
    st.lists(st.floats(0.0, 1.0), min_size=1, max_size=4),
    st.booleans(),
)
def test_echo_roundtrip_random(rho, t, L, centers, wrap):
    cfg = dataclasses.replace(
        ExperimentConfig(), target_rho=rho, t=t, L=L, target_centers=tuple(centers), target_wrap=wrap
    )
    assert parse_config(config_echo(cfg)) == cfg


def test_config_grammar():
    cfg = parse_config("preset=parabolic\nmap.alpha=0.5  # comment\ntarget.rho=2^-10\ntarget.centers=1/3,0.5\n")
    assert cfg.map_alpha == 0.5 and cfg.target_rho == 2.0**-10 and cfg.target_centers == (1 / 3, 0.5)
    assert cfg.target_kind == "parabolic"
    with pytest.raises(ConfigError):
        parse_config("no.such.key=1")
    with pytest.raises(ConfigError):
        parse_config("run.trials=many")
    assert set(KEYS) >= {"map.family", "scaling.rule", "parabolic.K_exponent", "sweep.n"}


def test_predicted_laws_from_first_principles():
    d = ExactLebesgue()
    cfg = apply_overrides(preset_config("periodic_single"), {"scaling.t": "1"})
    law = predicted_law(predict(cfg, build_map(cfg), d), cfg)
    assert isinstance(law, PolyaAeppli) and law.t == 1.0 and law.theta == pytest.approx(0.25)
    cfg = preset_config("nonperiodic")
    assert predicted_law(predict(cfg, build_map(cfg), d), cfg) == Poisson(1.0)
    cfg = preset_config("parabolic")
    pred = predict(cfg, build_map(cfg), None)
    assert predicted_law(pred, cfg) == Poisson(1.0)
    assert pred.spectrum.lam(1) == 1.0 and pred.spectrum.lam(2) == 0.0


def test_kac_rate_is_alpha1_t():
    cfg = apply_overrides(preset_config("periodic_single"), {"scaling.rule": "kac"})
    law = predicted_law(predict(cfg, build_map(cfg), ExactLebesgue()), cfg)
    assert law == PolyaAeppli(pytest.approx(0.75), pytest.approx(0.25))


def test_finite_set_prediction():
    cfg = preset_config("finite_periodic_set")
    pred = predict(cfg, build_map(cfg), ExactLebesgue())
    assert pred.extremal_index == pytest.approx(5 / 8)
    assert pred.spectrum.lam(1) == pytest.approx(0.65)


def test_validation():
    with pytest.raises(ConfigError):
        sweep(apply_overrides(preset_config("periodic_single"), {"sweep.rho": "2^-10"}))
    with pytest.raises(ConfigError):
        validate(apply_overrides(preset_config("periodic_single"), {"sweep.rho": "2^-10,2^-12,2^-11"}))
    with pytest.raises(ConfigError):
        validate(apply_overrides(preset_config("periodic_single"), {"scaling.rule": "magic"}))
    with pytest.warns(UserWarning, match="L \\* mu"):
        validate(apply_overrides(preset_config("periodic_single"), {"target.rho": "2^-8"}), ExactLebesgue())


def test_report_and_emit(tmp_path):
    r = run_preset("nonperiodic", SMALL, seed=3)
    assert r.law == Poisson(1.0)
    assert all(c.tolerance for c in r.checks)
    files = emit(r, tmp_path / "a")
    assert {f.name for f in files} == {"distributions.csv", "estimators.csv", "summary.txt", "meta.txt"}
    rows = (tmp_path / "a" / "distributions.csv").read_text().splitlines()
    assert len(rows) - 1 == r.config.k_max + 2
    meta = (tmp_path / "a" / "meta.txt").read_text()
    echo = "".join(l + "\n" for l in meta.splitlines() if not l.startswith("meta."))
    assert parse_config(echo) == r.config
    with pytest.raises(UnknownFormat):
        emit(r, tmp_path / "b", "xml")


def test_rerun_byte_identical_and_thread_independent(tmp_path):
    a = run_preset("periodic_single", SMALL, seed=5, threads=1)
    b = run_preset("periodic_single", SMALL, seed=5, threads=4)
    emit(a, tmp_path / "a")
    emit(b, tmp_path / "b")
    for name in ("distributions.csv", "estimators.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_periodic_sweep_tv_trend():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg = apply_overrides(
            preset_config("periodic_single"),
            {"sweep.rho": "2^-8,2^-10,2^-12", "run.trials": "50000", "run.lambda_trials": "20000"},
        )
        res = sweep(cfg)
    assert res.tv_nonincreasing


def test_parabolic_sweep_slope():
    cfg = apply_overrides(
        preset_config("parabolic"),
        {
            "map.alpha": "0.5",
            "sweep.n": "500,1000,2000,4000",
            "run.W": "false",
            "run.lambda_trials": "20000",
            "run.hit_trials": "50000",
            "density.orbit_length": "1000000",
        },
    )
    res = sweep(cfg)
    assert res.slope == pytest.approx(2.0, abs=0.3)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["pmf", "polya-aeppli", "--t", "1", "--theta", "0.25", "--k-max", "2"]) == 0
    assert "0.2759095808" in capsys.readouterr().out
    assert main(["run", "nonperiodic", "--format", "xml"]) == 2
    assert main(["run", "no-such-preset-or-file"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["pmf", "compound-poisson"]) == 2
    cfg = tmp_path / "c.txt"
    cfg.write_text("preset=nonperiodic\nrun.trials=2000\nrun.lambda_trials=2000\nrun.hit_trials=2000\nrun.W=false\n")
    code = main(["run", str(cfg), "--seed", "1", "--out", str(tmp_path / "o")])
    assert code in (0, 1)
    assert (tmp_path / "o" / "summary.txt").exists()
    # a runtime failure inside the pipeline maps to exit code 3
    cfg.write_text("preset=nonperiodic\ntarget.rho=1e-12\nscaling.L=2\nrun.hit_trials=1000\nrun.lambda_trials=1000\n")
    assert main(["run", str(cfg)]) == 3


def test_cli_density(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["density", "pm", "--alpha", "0.5", "--length", "200000", "--out", str(out)]) == 0
    assert out.read_text().startswith("bin_left,bin_right,mass")
