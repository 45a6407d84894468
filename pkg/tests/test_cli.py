import io
import json
import sys

import pytest
from hypothesis import given, settings, strategies as st

from reesmult import cli, clear_caches
from reesmult.errors import DuplicateIdealName, ParseError, UnknownVariable
from reesmult.formulas import FormulaReport

RING2 = {"dim": 2, "vars": ["x", "y"]}


def job(ideals, command=None, args=None, options=None, ring=RING2):
    doc = {"ring": ring, "ideals": ideals}
    if command:
        doc["command"] = command
    if args:
        doc["args"] = args
    if options:
        doc["options"] = options
    return json.dumps(doc)


def run_main(argv, stdin_text, monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin_text.encode())))
    status = cli.main(argv)
    return status, capsys.readouterr().out


def test_parse_valid_job():
    spec = cli.parse_job(job({"I": ["x^2", "y^3"]}))
    assert spec.dim == 2 and spec.ideal("I") == spec.ctx.ideal("x^2", "y^3")


def test_parse_errors():
    with pytest.raises(UnknownVariable):
        cli.parse_job(job({"I": ["z^2"]}))
    with pytest.raises(ParseError):
        cli.parse_job(job({"I": ["x^-1"]}))
    with pytest.raises(DuplicateIdealName):
        cli.parse_job('{"ring": {"dim": 1, "vars": ["x"]}, "ideals": {"I": ["x"], "I": ["x^2"]}}')
    with pytest.raises(ParseError) as info:
        cli.parse_job('{"ring": {"dim": 1,\n "vars": ["x"]')
    assert info.value.line == 2
    with pytest.raises(ParseError):
        cli.parse_job(job({"I": ["x"]}, options={"colour": 1}))
    with pytest.raises(ParseError):
        cli.parse_job(job({"I": ["x"]}, command="rees-mult", args={"ideals": ["J"]}))
    with pytest.raises(ParseError):
        cli.parse_job(job({"I": ["x"]}, ring={"dim": 2, "vars": ["x"]}))


names = st.sampled_from(["I", "J", "K", "I1"])
monomials = st.sampled_from(["1", "x", "y", "x^2", "x*y", "y^3", "x^4*y^2"])


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(names, st.lists(monomials, min_size=1, max_size=4), min_size=1),
       st.sampled_from([None] + list(cli.COMMANDS)),
       st.fixed_dictionaries({}, optional={"offset": st.integers(0, 9), "workers": st.integers(1, 4),
                                           "format": st.sampled_from(cli.FORMATS)}))
def test_render_round_trip(ideals, command, options):
    spec = cli.parse_job(job(ideals, command, options=options))
    again = cli.parse_job(cli.render_job(spec))
    assert again == spec
    assert cli.render_job(again) == cli.render_job(spec)


def test_ext_rees_verify(monkeypatch, capsys):
    status, out = run_main(["ext-rees-mult", "--verify"], job({"I": ["x", "y"]}), monkeypatch, capsys)
    report = json.loads(out)
    assert status == 0
    assert (report["formula"], report["oracle"], report["agree"]) == ("1", "1", True)


def test_formula_only_d1(monkeypatch, capsys):
    text = job({"I": ["x^2"]}, ring={"dim": 1, "vars": ["x"]})
    status, out = run_main(["ext-rees-mult", "--formula"], text, monkeypatch, capsys)
    report = json.loads(out)
    assert status == 0 and report["formula"] == "2" and "oracle" not in report


def test_job_file_and_table_format(tmp_path, capsys):
    path = tmp_path / "job.json"
    path.write_text(job({"I": ["x^2", "x*y", "y^3"]}, command="colength"))
    assert cli.main(["run", str(path), "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["colength.I", "4"]


def test_mixed_mult_command(monkeypatch, capsys):
    text = job({"M": ["x", "y"], "M2": ["x^2", "x*y", "y^2"]}, args={"ideals": ["M", "M2"]})
    status, out = run_main(["mixed-mult"], text, monkeypatch, capsys)
    assert status == 0 and json.loads(out)["table"] == {"0,1": "2", "1,0": "1"}


def test_identity_check_gate(monkeypatch, capsys):
    text = job({"J": ["x^2", "y^2"], "I": ["x^3", "y^3"], "J1": ["x", "y"]},
               args={"kind": "prop_l4", "J": "J", "I": "I", "I1": "I", "J1": "J1"})
    status, out = run_main(["identity-check"], text, monkeypatch, capsys)
    assert status == 1
    assert json.loads(out)["error"]["code"] == "HypothesisViolated"


def test_identity_check_kind_flag(monkeypatch, capsys):
    text = job({"M": ["x", "y"]}, args={"J": "M", "I": "M", "I1": "M"})
    status, out = run_main(["identity-check", "--kind", "cor_extra1"], text, monkeypatch, capsys)
    assert status == 0 and json.loads(out)["agree"] is True


def test_disagreement_exits_two(monkeypatch, capsys):
    def wrong(*ideals, options=None):
        return FormulaReport("rigged", "", 99)

    monkeypatch.setattr(cli, "rees_multiplicity_formula", wrong)
    status, out = run_main(["rees-mult"], job({"I": ["x", "y"]}), monkeypatch, capsys)
    assert status == 2 and json.loads(out)["agree"] is False


def test_command_mismatch_is_error(monkeypatch, capsys):
    status, out = run_main(["rees-mult"], job({"I": ["x"]}, command="colength"), monkeypatch, capsys)
    assert status == 1 and json.loads(out)["error"]["code"] == "ParseError"


def test_infinite_length_error(monkeypatch, capsys):
    status, out = run_main(["colength"], job({"I": ["x"]}), monkeypatch, capsys)
    assert status == 1 and json.loads(out)["error"]["code"] == "InfiniteLength"


def test_worker_precedence(monkeypatch):
    spec = cli.parse_job(job({"I": ["x"]}, options={"workers": 3}))
    monkeypatch.delenv("REESMULT_WORKERS", raising=False)
    assert cli._resolve_workers(None, spec) == 3
    monkeypatch.setenv("REESMULT_WORKERS", "2")
    assert cli._resolve_workers(None, spec) == 2
    assert cli._resolve_workers(5, spec) == 5


@pytest.mark.parametrize("command,ideals,args", [
    ("ext-rees-mult", {"A": ["x^2", "y^3"]}, None),
    ("katz-verma", {"J": ["x", "y"], "I": ["x^2", "y^3"]}, None),
    ("identity-check", {"M": ["x", "y"]}, {"kind": "cor_l5", "J": "M", "I": "M", "companions": ["M"]}),
])
def test_reports_identical_across_worker_counts(command, ideals, args, monkeypatch, capsys):
    text = job(ideals, args=args)
    outputs = []
    for workers in ("1", "4"):
        clear_caches()
        status, out = run_main([command, "--workers", workers], text, monkeypatch, capsys)
        assert status == 0
        outputs.append(out.encode())
    assert outputs[0] == outputs[1]
