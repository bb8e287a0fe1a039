import json

import pytest

from leaderless_crn import __version__
from leaderless_crn.cli import main
from leaderless_crn.compiler import compile_predicate
from leaderless_crn.crn import serialize_crn
from leaderless_crn.semilinear import parse_formula


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("LEADERLESS_CRN_OUT", str(tmp_path))
    return tmp_path


def test_simulate_intro(out, capsys):
    assert main(["simulate", "intro", "--in", "X=5", "--stop", "quiescence"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "outputs: Y=6"
    csv = (out / "intro.seed0.csv").read_text()
    assert csv.startswith(f"# leaderless_crn {__version__}\n# seed=0")
    assert "time,reaction,B,K,X,Y" in csv


def test_same_seed_same_csv(out):
    for name in ("a", "b"):
        main(["simulate", "intro", "--in", "X=20", "--seed", "4", "-o", str(out / "run.csv")])
        (out / "run.csv").rename(out / f"{name}.csv")
    assert (out / "a.csv").read_text() == (out / "b.csv").read_text()


def test_horizon(out, capsys):
    assert main(["simulate", "intro", "--in", "X=200", "--stop", "horizon=0.05"]) == 0
    assert "status: horizon" in capsys.readouterr().out


def test_event_cap_exit(out, capsys):
    assert main(["simulate", "intro", "--in", "X=200", "--stop", "events=5"]) == 4


def test_record_modes(out):
    main(["simulate", "intro", "--in", "X=3", "--record", "sparse", "-o", str(out / "s.csv")])
    assert "time,reaction,species,delta" in (out / "s.csv").read_text()
    main(["simulate", "intro", "--in", "X=3", "--record", "final", "-o", str(out / "f.csv")])
    rows = [l for l in (out / "f.csv").read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 2


def test_check_exit_codes(capsys):
    assert main(["check", "intro", "--in", "X=3", "--expect", "Y=4"]) == 0
    assert main(["check", "intro", "--in", "X=3", "--expect", "Y=5"]) == 5
    assert "witness:" in capsys.readouterr().out
    assert main(["check", "intro", "--in", "X=300", "--expect", "Y=301", "--budget", "500"]) == 6


def test_check_decider(tmp_path, capsys):
    pred = compile_predicate(parse_formula("(mod 1 2 0)"), 1, 1)
    path = tmp_path / "parity.crn"
    path.write_text(serialize_crn(pred.crn))
    alias = pred.input_aliases[0]
    assert main(["check", str(path), "--in", f"{alias}=4", "--expect", "yes"]) == 0
    assert main(["check", str(path), "--in", f"{alias}=3", "--expect", "yes"]) == 5
    assert main(["check", "intro", "--in", "X=1", "--expect", "yes"]) == 1


def test_compile_then_simulate(out, capsys):
    assert main(["compile", "increment"]) == 0
    text = capsys.readouterr().out
    meta = json.loads((out / "increment.meta.json").read_text())
    assert f"reactions: {meta['reactions']}" in text and f"gamma: {meta['gamma']}" in text
    assert meta["species"] == 19 and meta["reactions"] == 25
    crn_text = (out / "increment.crn").read_text()
    assert crn_text.startswith("# leaderless_crn")
    assert main(["simulate", str(out / "increment.crn"), "--in", "X1=6", "--seed", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "outputs: Y1=7"
    assert main(["check", str(out / "increment.crn"), "--in", "X1=2", "--expect", "Y1=3"]) == 0


def test_compile_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.fnspec"
    bad.write_text('{"arity_in": 1,\n"arity_out": 1,\n"pieces": [}\n')
    assert main(["compile", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_compile_validation_error(tmp_path, capsys):
    gap = tmp_path / "gap.fnspec"
    gap.write_text(json.dumps({"arity_in": 1, "arity_out": 1, "pieces": [
        {"coeff": [[1]], "denom": [1], "b": [0], "c": [0], "domain": "(ge 1 1)"}]}))
    assert main(["compile", str(gap), "--out-dir", str(tmp_path)]) == 3
    assert "x=(0,)" in capsys.readouterr().err


def test_crn_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.crn"
    bad.write_text("inputs: A\noutputs: B\n3A -> B\n")
    assert main(["simulate", str(bad), "--in", "A=3"]) == 2
    assert "line 3" in capsys.readouterr().err


def test_bad_inputs(capsys):
    assert main(["simulate", "intro", "--in", "Q=1"]) == 1
    assert main(["simulate", "intro", "--in", "X=-1"]) == 1
    assert main(["simulate", "intro", "--in", "X"]) == 1


@pytest.mark.parametrize("pattern", ["unimolecular", "leader_election", "catalytic"])
def test_bench_patterns(out, capsys, pattern):
    assert main(["bench", pattern, "--sizes", "100", "--trials", "300", "--seed", "1"]) == 0
    summary = json.loads((out / f"bench_{pattern}.json").read_text())
    assert summary["ok"] and summary["seed"] == 1
    assert "argv" in summary["meta"]
    assert (out / f"bench_{pattern}.csv").exists() and (out / f"bench_{pattern}.dat").exists()


def test_bench_band_violation(out):
    # 2x needs no leader election, so its time grows like log n, not n
    spec = out / "double.fnspec"
    spec.write_text(json.dumps({"arity_in": 1, "arity_out": 1, "pieces": [
        {"coeff": [[2]], "denom": [1], "b": [0], "c": [0], "domain": "(ge 1 0)"}]}))
    assert main(["bench", str(spec), "--sizes", "50,200,800", "--trials", "30"]) == 7
    summary = json.loads((out / "bench_double.json").read_text())
    assert summary["ok"] is False and summary["slope"] < 0.7


def test_help_documents_grammars(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    text = capsys.readouterr().out
    for needle in ("yesvoters:", "(ge a_1..a_k t)", "(mod a_1..a_k m r)", "spawn_key", "LEADERLESS_CRN_OUT"):
        assert needle in text
