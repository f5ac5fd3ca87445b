import pytest

from cocount.cli import EXIT_CAP, EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK, main
from cocount.config import ConfigError, parse_config


MINIMAL = "n=2 family=full ordering=disc command=count X=1e4\n"


def test_parse_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.command == "count"
    assert cfg.n == 2
    assert cfg.x_max == 10**4
    assert cfg.family.name == "full-2"
    assert cfg.ordering.kind == "disc"


def test_parse_sectioned_config():
    cfg = parse_config(
        """
        [run]
        command = poisson-check
        n = 2
        truncation = 50

        [family]
        generic = unramified
        at_3 = full
        at_inf = full

        [ordering]
        kind = radical
        """
    )
    assert cfg.truncation == 50
    assert cfg.ordering.kind == "radical"
    assert cfg.family.instantiate(3) == frozenset(
        {(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)}
    )


def test_parse_custom_family_and_ordering():
    cfg = parse_config(
        """
        [run]
        command = invariants
        n = 2
        [family]
        modulus = 4
        class_1 = 0:0, 1:0, 0:1
        class_3 = 0:0, 1:0, 1:1
        at_2 = unramified
        at_inf = full
        [ordering]
        kind = custom
        modulus = 4
        rule = 1:1:0:2; 3:1:0:1
        """
    )
    assert cfg.family.generic.modulus == 4
    from cocount.families import a_invariant

    assert a_invariant(cfg.family, cfg.ordering) == 1


def test_round_trip_is_stable():
    cfg1 = parse_config(MINIMAL)
    cfg2 = parse_config(MINIMAL)
    assert cfg1.family.generic.class_sets == cfg2.family.generic.class_sets
    assert cfg1.ordering == cfg2.ordering


def test_rejections():
    with pytest.raises(ConfigError, match="n must be at least 2"):
        parse_config("n=1 family=full ordering=disc command=count X=100")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("n=2 family=full ordering=disc command=count X=100 zz=1")
    with pytest.raises(ConfigError, match="command"):
        parse_config("n=2 family=full ordering=disc command=frobnicate X=100")
    with pytest.raises(ConfigError, match="identity"):
        parse_config(
            "[run]\ncommand=count\nn=2\nx=100\n[family]\nmodulus=2\nclass_1 = 1:0, 0:1\n"
        )
    with pytest.raises(ConfigError, match="admissible"):
        parse_config(
            "[run]\ncommand=count\nn=2\nx=100\n[family]\nname=full\n"
            "[ordering]\nkind=custom\nmodulus=2\nrule = 1:1:0:0\n"
        )
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[run]\ncommand=count\nnonsense line\n")


def _run_cli(tmp_path, text, *extra):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    out = tmp_path / "out.txt"
    code = main(["--config", str(cfg), "--out", str(out)] + list(extra))
    return code, out.read_text() if out.exists() else ""


def test_cli_count(tmp_path):
    code, text = _run_cli(tmp_path, MINIMAL)
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "X,N"
    assert lines[-1].startswith("10000,")


def test_cli_poisson_and_determinism(tmp_path):
    config = (
        "[run]\ncommand = poisson-check\nn = 2\ntruncation = 60\n"
        "[family]\ngeneric = unramified\nat_3 = full\nat_inf = full\n"
        "[ordering]\nkind = disc\n"
    )
    code1, text1 = _run_cli(tmp_path, config)
    code2, text2 = _run_cli(tmp_path, config)
    assert code1 == code2 == EXIT_OK
    assert text1 == text2
    assert "verified=1" in text1


def test_cli_gw(tmp_path):
    config = (
        "[run]\ncommand = gw-check\nn = 3\nrandom_boxes = 4\nseed = 5\n"
        "[family]\nname = full\n[ordering]\nkind = disc\n"
    )
    code, text = _run_cli(tmp_path, config)
    assert code == EXIT_OK
    assert text.count("equal=1") == 4
    code2, text2 = _run_cli(tmp_path, config)
    assert text == text2


def test_cli_invariants_example(tmp_path):
    config = (
        "[run]\ncommand = invariants\nn = 2\n"
        "[family]\nname = example-d1mod4\n[ordering]\nkind = disc\n"
    )
    code, text = _run_cli(tmp_path, config)
    assert code == EXIT_OK
    assert "a=1" in text
    assert "b=1/2" in text
    assert "t_prime_order=2" in text
    assert "classification=nonperiodic-eligible" in text


def test_cli_example_suite_small(tmp_path):
    config = (
        "[run]\ncommand = example-d1mod4\nn = 2\ntruncation = 120\n"
        "x_max = 20000\ngrid_min = 50\ngrid_points = 10\n"
        "[family]\nname = example-d1mod4\n[ordering]\nkind = disc\n"
    )
    code, text = _run_cli(tmp_path, config)
    assert code == EXIT_OK
    assert "coefficient_identity_verified=1" in text


def test_cli_fit(tmp_path):
    config = (
        "[run]\ncommand = fit\nn = 2\nx_max = 200000\ngrid_min = 1000\ngrid_points = 12\n"
        "[family]\nname = full\n[ordering]\nkind = disc\n"
    )
    code, text = _run_cli(tmp_path, config)
    assert code == EXIT_OK
    assert "alpha=" in text and "residual=" in text


def test_cli_cap_exceeded(tmp_path):
    config = (
        "[run]\ncommand = poisson-check\nn = 2\ntruncation = 200\nmax_truncation = 50\n"
        "[family]\nname = unramified\n[ordering]\nkind = disc\n"
    )
    code, _ = _run_cli(tmp_path, config)
    assert code == EXIT_CAP


def test_cli_config_error(tmp_path):
    code, _ = _run_cli(tmp_path, "n=1 family=full ordering=disc command=count X=10")
    assert code == EXIT_CONFIG


def test_cli_usage_error():
    assert main(["--config", "/nonexistent/definitely/missing.cfg"]) == 1


def test_cli_mismatch_exit_code(tmp_path, monkeypatch):
    """Exit code 3 is wired to a failed identity report."""
    import cocount.cli as cli_mod

    class FakeReport:
        truncation = 2
        scalar_ratio = 1
        verified = False

        def render(self):
            return "index,direct,dual,match\n1,1,0,0"

    monkeypatch.setattr(cli_mod, "poisson_check", lambda *a, **k: FakeReport())
    config = (
        "[run]\ncommand = poisson-check\nn = 2\ntruncation = 2\n"
        "[family]\nname = unramified\n[ordering]\nkind = disc\n"
    )
    cfg = tmp_path / "c.cfg"
    cfg.write_text(config)
    from cocount.config import parse_config as pc

    code = cli_mod.run(pc(config))
    assert code == EXIT_MISMATCH


def test_cli_threads_flag(tmp_path):
    config = (
        "[run]\ncommand = poisson-check\nn = 2\ntruncation = 80\n"
        "[family]\ngeneric = unramified\nat_3 = full\nat_5 = full\nat_inf = full\n"
        "[ordering]\nkind = disc\n"
    )
    code1, text1 = _run_cli(tmp_path, config)
    code2, text2 = _run_cli(tmp_path, config, "--threads", "2")
    assert code1 == code2 == EXIT_OK
    assert text1 == text2


GOLDEN_CASES = [
    "count_full2",
    "poisson_box35",
    "gw_fixed",
    "invariants_example",
    "invariants_full4_radical",
]


@pytest.mark.parametrize("case", GOLDEN_CASES)
def test_golden_outputs(case, tmp_path):
    import pathlib

    here = pathlib.Path(__file__).parent
    out = tmp_path / "out.txt"
    code = main([
        "--config", str(here / "configs" / f"{case}.cfg"),
        "--out", str(out),
    ])
    assert code == EXIT_OK
    assert out.read_text() == (here / "golden" / f"{case}.txt").read_text()


@pytest.mark.parametrize("case", ["example_small", "fit_full2"])
def test_remaining_corpus_configs_run(case, tmp_path):
    import pathlib

    here = pathlib.Path(__file__).parent
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    cfg = str(here / "configs" / f"{case}.cfg")
    assert main(["--config", cfg, "--out", str(out1)]) == EXIT_OK
    assert main(["--config", cfg, "--out", str(out2)]) == EXIT_OK
    assert out1.read_text() == out2.read_text()


def test_config_render_round_trip():
    from cocount.config import render_config

    for text in [
        MINIMAL,
        "[run]\ncommand = poisson-check\nn = 3\ntruncation = 70\n"
        "[family]\nname = full\n[ordering]\nkind = radical\n",
        "[run]\ncommand = invariants\nn = 2\n[family]\nname = example-d1mod4\n"
        "[ordering]\nkind = custom\nmodulus = 4\nrule = 1:1:0:2; 3:1:0:1\n",
        "[run]\ncommand = gw-check\nn = 2\n[family]\nname = full\n"
        "[ordering]\nkind = disc\n[gw]\nat_5 = full\nat_inf = zero\n",
    ]:
        cfg = parse_config(text)
        again = parse_config(render_config(cfg))
        assert again == cfg
