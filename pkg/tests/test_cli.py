"""Command-line behavior: outputs, exit codes, diagnostics, reproducibility.

Everything drives cli.main directly with argv lists; stdout and stderr are
captured through capsys.  Exit code 2 paths must leave stdout empty.
"""

import json

import pytest

from ctxembed import cli
from ctxembed.syntax import parse_strategy, parse_term, print_strategy
from ctxembed.engine import unify
from ctxembed.terms import App


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# apply
# ---------------------------------------------------------------------------


def test_apply_insertion_at_root(capsys):
    code, out, _ = run(
        capsys,
        "apply",
        "--term", "var(x, reg(omega, one))",
        "--strategy", "ins <list([], i)>",
    )
    assert code == 0
    assert parse_term(out.strip()) == parse_term("list(var(x, reg(omega, one)), i)")


def test_apply_failure_prints_fail_and_exits_1(capsys):
    code, out, _ = run(capsys, "apply", "--term", "a", "--strategy", "fail")
    assert code == 1
    assert out == "FAIL\n"


def test_apply_reads_files(tmp_path, capsys):
    term = tmp_path / "t.term"
    term.write_text("g(a, b)")
    code, out, _ = run(capsys, "apply", "--term", str(term), "--strategy", "ins <f([])>")
    assert code == 0
    assert parse_term(out.strip()) == App("f", (parse_term("g(a,b)"),))


def test_apply_parse_error_is_located_and_silent_on_stdout(capsys):
    code, out, err = run(capsys, "apply", "--term", "g(a", "--strategy", "fail")
    assert code == 2
    assert out == ""
    assert err.startswith("<term>:1:")


def test_parse_error_in_file_names_the_file(tmp_path, capsys):
    bad = tmp_path / "bad.ces"
    bad.write_text("mu X.\n@1.)")
    code, out, err = run(capsys, "apply", "--term", "a", "--strategy", str(bad))
    assert code == 2
    assert out == ""
    assert err.startswith(f"{bad}:2:")


def test_inconsistent_arities_are_rejected(capsys):
    code, out, err = run(
        capsys, "apply", "--term", "g(a)", "--strategy", "g(?x, ?y) ; ins <[]>"
    )
    assert code == 2
    assert out == ""
    assert "arities" in err


def test_signature_file_constrains_inputs(tmp_path, capsys):
    sigfile = tmp_path / "sig"
    sigfile.write_text("a/0\nf/1\n")
    code, out, _ = run(
        capsys, "apply", "--term", "f(a)", "--strategy", "ins <f([])>",
        "--signature", str(sigfile),
    )
    assert code == 0 and out.strip() == "f(f(a))"
    code, out, err = run(
        capsys, "apply", "--term", "g(a, a)", "--strategy", "ins <f([])>",
        "--signature", str(sigfile),
    )
    assert code == 2
    assert out == "" and "not in the signature" in err


def test_malformed_signature_file(tmp_path, capsys):
    sigfile = tmp_path / "sig"
    sigfile.write_text("a/0\nnonsense\n")
    code, out, err = run(capsys, "apply", "--term", "a", "--strategy", "fail",
                         "--signature", str(sigfile))
    assert code == 2
    assert out == "" and err.startswith(f"{sigfile}:2:")


# ---------------------------------------------------------------------------
# unify / combine
# ---------------------------------------------------------------------------


def test_unify_of_the_stored_pair_reaches_the_normal_form(capsys):
    code, out, _ = run(
        capsys, "unify", "--left", "tests/data/s.ces", "--right", "tests/data/sprime.ces"
    )
    assert code == 0
    left = parse_strategy(open("tests/data/s.ces").read())
    right = parse_strategy(open("tests/data/sprime.ces").read())
    assert parse_strategy(out.strip()) == unify(left, right)
    assert out.startswith("mu Z. ")


def test_unify_json_round_trips(capsys):
    code, out, _ = run(
        capsys, "unify",
        "--left", "ins <list([], i)>", "--right", "ins <list([], j)>", "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["text"] == "ins <list(list([],j),i)>"
    assert doc["strategy"] == {"kind": "ins", "ctx": "list(list([],j),i)"}


def test_unify_left_project_keeps_the_left_context(capsys):
    code, out, _ = run(
        capsys, "unify", "--left", "ins <list([], i)>", "--right", "ins <list([], j)>",
        "--merge", "leftproject",
    )
    assert code == 0
    assert out.strip() == "ins <list([],i)>"


def test_trace_goes_to_stderr(capsys):
    code, out, err = run(
        capsys, "unify", "--left", "a ; ins <[]>", "--right", "ins <f([])>", "--trace"
    )
    assert code == 0
    assert parse_strategy(out.strip()) is not None
    assert "lambda=" in err


def test_combine_falls_back_to_either_side(capsys):
    code, out, _ = run(
        capsys, "combine", "--left", "a ; ins <f([])>", "--right", "b ; ins <f([])>"
    )
    assert code == 0
    got = parse_strategy(out.strip())
    from ctxembed.strategy import eval_strategy
    assert eval_strategy(got, App("a")) == App("f", (App("a"),))
    assert eval_strategy(got, App("b")) == App("f", (App("b"),))


def test_open_input_is_a_usage_error(capsys):
    code, out, err = run(capsys, "unify", "--left", "X", "--right", "fail")
    assert code == 2
    assert out == "" and "open" in err


# ---------------------------------------------------------------------------
# psi / check / unfold
# ---------------------------------------------------------------------------


def test_psi_prints_the_position_map(capsys):
    code, out, _ = run(
        capsys, "psi", "--term", "g(a, b)", "--strategy", "most(ins <f([])>)"
    )
    assert code == 0
    assert out.strip() == "[@1.<f([])>, @2.<f([])>]"


def test_psi_of_a_failing_strategy(capsys):
    code, out, _ = run(capsys, "psi", "--term", "a", "--strategy", "b ; ins <[]>")
    assert code == 0
    assert out.strip() == "fail"


def test_check_reports_ok_for_an_admissible_strategy(capsys):
    code, out, _ = run(capsys, "check", "--strategy", "mu X. a ; ins <[]> + @1.X")
    assert code == 0
    assert out.count(": ok") == 5


def test_check_flags_an_open_strategy(capsys):
    code, out, _ = run(capsys, "check", "--strategy", "@1.X")
    assert code == 1
    assert "closed: violated" in out


def test_unfold_uniform_count(capsys):
    code, out, _ = run(
        capsys, "unfold", "--strategy", "mu X. (a ; ins <[]>) + @1.X", "--n", "1"
    )
    assert code == 0
    assert out.strip() == "a ; ins <[]> + @1.fail"


def test_unfold_zero_is_fail(capsys):
    code, out, _ = run(
        capsys, "unfold", "--strategy", "mu X. (a ; ins <[]>) + @1.X", "--n", "0"
    )
    assert code == 0
    assert out.strip() == "fail"


def test_unfold_per_binder_map(capsys):
    code, out, _ = run(
        capsys, "unfold",
        "--strategy", "mu X. [@1.mu Y. ins <[]> + @1.Y, @2.X]",
        "--map", "X=1,Y=2",
    )
    assert code == 0
    got = parse_strategy(out.strip())
    from ctxembed.strategy import bound_vars
    assert bound_vars(got) == set()


def test_unfold_map_must_cover_all_binders(capsys):
    code, out, err = run(
        capsys, "unfold", "--strategy", "mu X. a ; ins <[]> + @1.X", "--map", "Y=2"
    )
    assert code == 2
    assert out == "" and "no count for binder" in err


def test_unfold_rejects_negative_counts(capsys):
    code, out, err = run(
        capsys, "unfold", "--strategy", "mu X. a ; ins <[]> + @1.X", "--n", "-1"
    )
    assert code == 2
    assert out == "" and "non-negative" in err


def test_unfold_needs_exactly_one_count_source(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["unfold", "--strategy", "fail", "--n", "1", "--map", "X=1"])
    assert exc.value.code == 2
    captured = capsys.readouterr()
    assert captured.out == ""


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_reports_are_byte_identical_for_equal_seeds(capsys):
    code1, out1, err1 = run(capsys, "verify", "--suite", "homomorphism", "--cases", "25")
    code2, out2, _ = run(capsys, "verify", "--suite", "homomorphism", "--cases", "25")
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc == {"suite": "homomorphism", "seed": 0, "cases": 25, "failures": []}
    assert "25 cases" in err1  # timing stays off the report


def test_verify_seed_changes_the_sample(capsys):
    _, out0, _ = run(capsys, "verify", "--suite", "theorem1", "--cases", "5")
    _, out7, _ = run(capsys, "verify", "--suite", "theorem1", "--cases", "5",
                     "--seed", "7")
    assert json.loads(out0)["seed"] == 0
    assert json.loads(out7)["seed"] == 7


def test_verify_exits_1_when_a_suite_reports_failures(capsys, monkeypatch):
    monkeypatch.setitem(
        cli._SUITES, "homomorphism",
        lambda cfg: {"suite": "homomorphism", "seed": cfg.seed, "cases": cfg.cases,
                     "failures": [{"index": 0}]},
    )
    code, out, _ = run(capsys, "verify", "--suite", "homomorphism", "--cases", "1")
    assert code == 1
    assert json.loads(out)["failures"]


def test_verify_signature_needs_a_constant(tmp_path, capsys):
    sigfile = tmp_path / "sig"
    sigfile.write_text("f/1\n")
    code, out, err = run(capsys, "verify", "--suite", "algebra", "--cases", "1",
                         "--signature", str(sigfile))
    assert code == 2
    assert out == "" and "constant" in err


def test_unknown_command_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""
