import json

import pytest

import cli
from completion.errors import NoStabilization, UnresolvedExtension
from completion.abelian import TameGroup


@pytest.fixture(autouse=True)
def testing_config(monkeypatch):
    monkeypatch.setenv('PADIC_CONFIG', 'testing')


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------- Commands ----------
def test_li_prints_both_derived_functors(capsys):
    code, out, _ = run(capsys, "li", "--prime", "2", "Prufer(2)")
    assert code == cli.EXIT_OK
    assert "l0: 0" in out
    assert "l1: Zp(2)" in out


def test_em_shifts_prufer_factor(capsys):
    code, out, _ = run(capsys, "em", "K(Prufer(2), 3)")
    assert code == cli.EXIT_OK
    assert "completion: K(Zp(2), 4)" in out


def test_peq_scalar_map(capsys):
    code, out, _ = run(capsys, "peq", "--prime", "2", "--map", "3: Z -> Z")
    assert code == cli.EXIT_OK
    assert "p_equivalence: True" in out
    code, out, _ = run(capsys, "peq", "--prime", "3", "--map", "3: Z -> Z")
    assert code == cli.EXIT_OK
    assert "p_equivalence: False" in out


def test_complete_reports_engine_and_oracle(capsys):
    code, out, _ = run(capsys, "complete", "--format", "json", "degrees 0..1; rank 0 = 1; rank 1 = 1; d 1 = [12];")
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report['engine'] == {'0': 'Z/4'}
    assert report['oracle'] == report['engine']


def test_ses_on_spectrum_prints_records(capsys):
    code, out, _ = run(capsys, "ses", "0: Prufer(2); 1: Z")
    assert code == cli.EXIT_OK
    assert "pi_1^p: 0 -> Zp(2) -> ? (unresolved) -> Zp(2) -> 0" in out


def test_expression_from_file(capsys, tmp_path):
    path = tmp_path / "group.txt"
    path.write_text("Z + Z/4\n", encoding='utf-8')
    code, out, _ = run(capsys, "li", "--input", str(path))
    assert code == cli.EXIT_OK
    assert "l0: Z/4 + Zp(2)" in out


# ---------- Exit codes ----------
def test_parse_error_exits_2(capsys):
    code, _, err = run(capsys, "li", "Z +")
    assert code == cli.EXIT_PARSE
    assert "parse_error" in err


def test_parse_error_json_carries_position(capsys):
    code, out, _ = run(capsys, "li", "--format", "json", "Prufer(4)")
    assert code == cli.EXIT_PARSE
    assert json.loads(out)['position'] == 7


def test_missing_expression_exits_2(capsys):
    code, _, err = run(capsys, "li")
    assert code == cli.EXIT_PARSE
    assert "needs an expression" in err


def test_unresolved_space_exits_4(capsys):
    code, _, err = run(capsys, "space", "K(Prufer(2), 2) x K(Z, 3)")
    assert code == cli.EXIT_UNRESOLVED
    assert "unresolved" in err


def test_no_stabilization_exits_3(capsys, monkeypatch):
    def short_budget(*args):
        raise NoStabilization(0, 3)

    monkeypatch.setattr(cli.CompletionService, 'complete', staticmethod(short_budget))
    code, _, _ = run(capsys, "complete", "--stages", "3", "degrees 0..0; rank 0 = 1;")
    assert code == cli.EXIT_NO_STABILIZATION


def test_stage_budget_below_three_is_rejected(capsys):
    with pytest.raises(SystemExit):
        cli.main(["complete", "--stages", "2", "degrees 0..0; rank 0 = 1;"])


def test_non_prime_is_rejected(capsys):
    with pytest.raises(SystemExit):
        cli.main(["li", "--prime", "4", "Z"])


def test_exit_code_table():
    assert cli.exit_code_for(UnresolvedExtension(1, TameGroup.zero(), TameGroup.zero())) == cli.EXIT_UNRESOLVED
    assert cli.exit_code_for(NoStabilization(0, 3)) == cli.EXIT_NO_STABILIZATION


# ---------- Suite ----------
def test_suite_is_deterministic(capsys):
    first = run(capsys, "suite", "--seed", "7", "--format", "json")
    second = run(capsys, "suite", "--seed", "7", "--format", "json")
    assert first == second
    rows = [json.loads(line) for line in first[1].splitlines()]
    assert rows[-1]['command'] == 'suite' and rows[-1]['seed'] == 7
    assert {row['name'] for row in rows[:-1]} >= {'oracle_equivalence', 'prufer_shift', 'postnikov_limit'}


def test_suite_text_summary(capsys):
    code, out, _ = run(capsys, "suite", "--seed", "3")
    assert "Property suite (seed 3)" in out
    assert "✅ prufer_shift" in out
    assert code in (cli.EXIT_OK, cli.EXIT_CHECK_FAILED)
