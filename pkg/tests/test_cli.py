import json
from collections import Counter

import pytest

from crysred.cli import main, parse_slope
from crysred.errors import DomainError
from crysred.report import (
    CSV_COLUMNS,
    ReportRecord,
    factors_from_str,
    factors_to_str,
    structure_report,
)
from crysred.symrep import JHLabel


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSlopeParsing:
    def test_fraction_ok(self):
        assert parse_slope("3/2") == parse_slope("6/4")

    def test_float_rejected(self):
        with pytest.raises(DomainError):
            parse_slope("1.5")
        with pytest.raises(DomainError):
            parse_slope("1e0")

    def test_malformed_rejected(self):
        with pytest.raises(DomainError):
            parse_slope("3/0")
        with pytest.raises(DomainError):
            parse_slope("three halves")


class TestClassify:
    def test_text(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "7", "--k", "22",
                           "--slope", "3/2", "--hyp-star", "holds")
        assert code == 0 and out.strip() == "ind(w2^3)"

    def test_r_flag(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "5", "--r", "23",
                           "--slope", "3/2", "--hyp-star", "unknown")
        assert code == 0 and out.startswith("undetermined{") and out.count(";") == 3

    def test_json_roundtrip(self, capsys):
        code, out, _ = run(capsys, "classify", "--p", "5", "--k", "32",
                           "--slope", "5/4", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload == json.loads(json.dumps(payload))
        assert payload["result"] == "ind(w2^7)"

    def test_domain_exit(self, capsys):
        code, _, err = run(capsys, "classify", "--p", "5", "--k", "11", "--slope", "3/2")
        assert code == 2 and "2p+2" in err
        code, _, err = run(capsys, "classify", "--p", "5", "--k", "30", "--slope", "5/2")
        assert code == 2

    def test_both_k_and_r_rejected(self, capsys):
        code, _, err = run(capsys, "classify", "--p", "5", "--k", "30", "--r", "28",
                           "--slope", "3/2")
        assert code == 2


class TestStructure:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "structure", "--p", "5", "--r", "25")
        assert code == 0 and "pass: True" in out

    def test_dimension_bound_exit(self, capsys):
        code, _, err = run(capsys, "structure", "--p", "5", "--r", "2500")
        assert code == 3

    def test_json(self, capsys):
        code, out, _ = run(capsys, "structure", "--p", "5", "--r", "11",
                           "--format", "json")
        rec = ReportRecord.from_dict(json.loads(out))
        assert rec.passed and rec.dim_computed == 6


class TestSweep:
    def test_csv_columns_and_rows(self, capsys):
        code, out, _ = run(capsys, "sweep", "--p", "5", "--r-from", "11",
                           "--r-to", "20", "--check", "all", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 11

    def test_dim_check_row_count(self, capsys):
        code, out, _ = run(capsys, "sweep", "--p", "5", "--r-from", "11",
                           "--r-to", "75", "--check", "dim", "--format", "csv")
        assert code == 0
        assert len(out.strip().splitlines()) == 66  # header + 65 rows

    def test_parallel_determinism(self, capsys):
        args = ["sweep", "--p", "5", "--r-from", "11", "--r-to", "30",
                "--check", "all", "--format", "csv"]
        code1, out1, _ = run(capsys, *args, "--jobs", "1")
        code2, out2, _ = run(capsys, *args, "--jobs", "3")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_lemma_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--p", "11", "--check", "lemmas",
                           "--r-to", "150")
        assert code == 0 and "0 failures" in out

    def test_range_validation(self, capsys):
        code, _, err = run(capsys, "sweep", "--p", "5", "--r-from", "3",
                           "--r-to", "20")
        assert code == 2


class TestWitnessCommand:
    def test_ok_case(self, capsys):
        code, out, _ = run(capsys, "witness", "--case", "T8.2", "--p", "5",
                           "--r", "19", "--slope", "5/4")
        assert code == 0 and "verdict: ok" in out

    def test_json(self, capsys):
        code, out, _ = run(capsys, "witness", "--case", "T9.2", "--p", "3",
                           "--r", "21", "--slope", "4/3", "--format", "json")
        payload = json.loads(out)
        assert code == 0 and payload["ok"] and payload["factorization"] == "T^2+1"

    def test_hypothesis_exit(self, capsys):
        code, _, err = run(capsys, "witness", "--case", "T8.7-low", "--p", "5",
                           "--r", "23", "--slope", "3/2")
        assert code == 4 and "genericity" in err

    def test_concrete_ubar_refusal(self, capsys):
        code, _, err = run(capsys, "witness", "--case", "T9.2", "--p", "3",
                           "--r", "21", "--slope", "3/2", "--ubar", "1")
        assert code == 4

    def test_precision_env_abort(self, capsys, monkeypatch):
        monkeypatch.setenv("CRYSRED_PRECISION", "4")
        code, _, err = run(capsys, "witness", "--case", "T8.7-high", "--p", "5",
                           "--r", "23", "--slope", "7/4")
        assert code == 5 and "precision" in err

    def test_precision_env_validation(self, capsys, monkeypatch):
        monkeypatch.setenv("CRYSRED_PRECISION", "two")
        code, _, err = run(capsys, "witness", "--case", "T8.2", "--p", "5",
                           "--r", "19", "--slope", "5/4")
        assert code == 2


class TestVerifyLemmas:
    def test_runs_clean(self, capsys):
        code, out, _ = run(capsys, "verify-lemmas", "--p", "5", "--r-to", "120")
        assert code == 0 and "failures: 0" in out


class TestRecordCodecs:
    def test_report_record_roundtrip(self):
        rec = structure_report(5, 23)
        again = ReportRecord.from_dict(json.loads(json.dumps(rec.to_dict())))
        assert again == rec

    def test_factor_string_roundtrip(self):
        for factors in [
            Counter(),
            Counter({JHLabel(3, 2): 1}),
            Counter({JHLabel(1, 0): 2, JHLabel(3, 1): 1}),
        ]:
            assert factors_from_str(factors_to_str(factors)) == factors
