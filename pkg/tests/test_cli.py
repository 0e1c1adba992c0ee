import io
import json
import math
from fractions import Fraction

import pytest

from dyadiff.cli import (
    DEFAULT_DIGITS,
    EXIT_CAP,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_RANGE,
    EXIT_VERIFY,
    main,
    parse_point,
)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == EXIT_OK, text
    return json.loads(text)


class TestParsePoint:
    def test_exact_dyadic_no_rounding(self):
        point, rounding = parse_point("0.75", DEFAULT_DIGITS)
        assert point.value == Fraction(3, 4)
        assert rounding == 0

    def test_non_dyadic_rounded_and_reported(self):
        point, rounding = parse_point("0.1", DEFAULT_DIGITS)
        assert rounding != 0
        assert abs(rounding) <= Fraction(1, 2**DEFAULT_DIGITS)
        assert abs(point.value - Fraction(1, 10)) == abs(rounding)

    def test_fraction_syntax(self):
        point, rounding = parse_point("3/8", DEFAULT_DIGITS)
        assert point.value == Fraction(3, 8) and rounding == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            parse_point("-0.5", DEFAULT_DIGITS)


class TestDelta:
    def test_quarter_three_quarters(self):
        doc = run_json("delta", "0.25", "0.75")
        assert doc["delta"] == "1"
        assert doc["interval"]["level"] == 0
        assert doc["interval"]["index"] == 0

    def test_equal_points(self):
        doc = run_json("delta", "0.5", "0.5")
        assert doc["delta"] == "0"
        assert doc["interval"] == "point"

    def test_across_integer_boundary(self):
        doc = run_json("delta", "0.9", "1.1")
        assert doc["delta"] == "2"
        assert doc["interval"]["lower"] == "0"
        assert doc["interval"]["upper"] == "2"

    def test_rounding_echoed(self):
        doc = run_json("delta", "0.1", "0.25")
        assert float(doc["x"]["rounding_applied"]) != 0.0
        assert float(doc["y"]["rounding_applied"]) == 0.0

    def test_negative_input_is_range_error(self):
        code, _ = run("delta", "--", "-1", "0.5")
        assert code == EXIT_RANGE

    def test_unparseable_input_is_parse_error(self):
        code, _ = run("delta", "zebra", "0.5")
        assert code == EXIT_PARSE


class TestDistance:
    def test_both_routes_agree(self):
        doc = run_json(
            "distance", "0.25", "0.75", "--s", "1", "--t", "1", "--method", "both"
        )
        assert float(doc["discrepancy"]) < 1e-10
        assert float(doc["closed"]) > 0

    def test_coincident_points_zero(self):
        doc = run_json(
            "distance", "0.5", "0.5", "--s", "1", "--t", "1", "--method", "both"
        )
        assert float(doc["closed"]) == 0.0
        assert float(doc["spectral"]) == 0.0

    def test_larger_time_gives_smaller_distance(self):
        d1 = float(
            run_json("distance", "0.25", "0.75", "--s", "1", "--t", "1")["closed"]
        )
        d10 = float(
            run_json("distance", "0.25", "0.75", "--s", "1", "--t", "10")["closed"]
        )
        assert d10 < d1

    def test_bad_params_range_error(self):
        code, _ = run("distance", "0.25", "0.75", "--s", "0", "--t", "1")
        assert code == EXIT_RANGE
        code, _ = run("distance", "0.25", "0.75", "--s", "1", "--t", "-2")
        assert code == EXIT_RANGE

    def test_missing_flags_parse_error(self):
        code, _ = run("distance", "0.25", "0.75")
        assert code == EXIT_PARSE


class TestBall:
    def test_interval_contains_center(self):
        doc = run_json("ball", "0.3125", "0.5", "--s", "1", "--t", "1")
        ball = doc["ball"]
        assert ball != "whole_space"
        assert float(ball["lower"]) <= 0.3125 < float(ball["upper"])

    def test_huge_radius_whole_space(self):
        doc = run_json("ball", "0.5", "1e9", "--s", "1", "--t", "1")
        assert doc["ball"] == "whole_space"

    def test_nonpositive_radius_range_error(self):
        code, _ = run("ball", "0.5", "0", "--s", "1", "--t", "1")
        assert code == EXIT_RANGE


class TestProfile:
    def run_rows(self, *extra):
        code, text = run("profile", "--s", "1", "--t", "1", *extra)
        assert code == EXIT_OK
        rows = []
        footer = {}
        for line in text.splitlines():
            if line.startswith("#"):
                fields = line[1:].split()
                if len(fields) == 2:
                    footer[fields[0]] = float(fields[1])
                continue
            i, lam, psi = line.split()
            rows.append((int(i), float(lam), float(psi)))
        return rows, footer

    def test_monotone_psi_column(self):
        # the table is computed by truncated summation, so monotonicity is
        # only asserted up to the series tail tolerance; the exact strict
        # version is covered by the closed-form increment tests
        rows, _ = self.run_rows("--i-min", "-20", "--i-max", "20")
        psis = [r[2] for r in rows]
        assert all(b >= a - 1e-10 for a, b in zip(psis, psis[1:]))
        resolvable = [p for p in psis if p > 0.0]
        assert all(b > a for a, b in zip(resolvable, resolvable[1:]))

    def test_last_row_within_sandwich(self):
        rows, footer = self.run_rows("--i-min", "0", "--i-max", "40")
        assert footer["sandwich_lower"] < footer["psi_infinity"] < footer["sandwich_upper"]
        assert rows[-1][2] < footer["psi_infinity"] + 1e-9
        assert footer["sandwich_lower"] < rows[-1][2]

    def test_first_rows_vanish_at_deep_negative_levels(self):
        rows, _ = self.run_rows("--i-min", "-60", "--i-max", "-55")
        assert rows[0][2] < 1e-8

    def test_inverted_range_rejected(self):
        code, _ = run("profile", "--s", "1", "--t", "1", "--i-min", "3", "--i-max", "1")
        assert code == EXIT_RANGE


class TestEvolve:
    def write_expansion(self, tmp_path, text="0 0 1.0\n"):
        path = tmp_path / "expansion.txt"
        path.write_text(text)
        return str(path)

    def test_time_zero_identity(self, tmp_path):
        src = self.write_expansion(tmp_path, "0 0 1.0\n2 5 -0.5\n")
        code, text = run("evolve", src, "--s", "1", "--t", "0")
        assert code == EXIT_OK
        records = [
            line.split() for line in text.splitlines() if not line.startswith("#")
        ]
        assert [r[:2] for r in records] == [["0", "0"], ["2", "5"]]
        assert [float(r[2]) for r in records] == [1.0, -0.5]

    def test_single_coefficient_multiplier(self, tmp_path):
        src = self.write_expansion(tmp_path)
        code, text = run("evolve", src, "--s", "1", "--t", "1")
        assert code == EXIT_OK
        record = next(l for l in text.splitlines() if not l.startswith("#"))
        assert float(record.split()[2]) == pytest.approx(math.exp(-1.0), abs=0)

    def test_query_routes_agree(self, tmp_path):
        src = self.write_expansion(tmp_path, "0 0 1.0\n1 1 0.25\n")
        code, text = run(
            "evolve", src, "--s", "0.5", "--t", "2", "--query", "0.125", "0.625"
        )
        assert code == EXIT_OK
        rows = [
            line.split()
            for line in text.splitlines()
            if line and not line.startswith("#") and len(line.split()) == 4
        ]
        assert len(rows) == 2
        for row in rows:
            assert float(row[3]) < 1e-12

    def test_output_file_round_trips(self, tmp_path):
        src = self.write_expansion(tmp_path, "0 0 0.5\n")
        dst = tmp_path / "evolved.txt"
        code, _ = run("evolve", src, "--s", "1", "--t", "1", "--out", str(dst))
        assert code == EXIT_OK
        code2, text2 = run("evolve", str(dst), "--s", "1", "--t", "0")
        assert code2 == EXIT_OK
        record = next(l for l in text2.splitlines() if not l.startswith("#"))
        assert float(record.split()[2]) == pytest.approx(0.5 * math.exp(-1.0), abs=0)

    def test_bad_record_parse_error_with_line(self, tmp_path, capsys):
        src = self.write_expansion(tmp_path, "0 0 1.0\nnot a number here\n")
        code, _ = run("evolve", src, "--s", "1", "--t", "1")
        assert code == EXIT_PARSE
        assert "line 2" in capsys.readouterr().err

    def test_missing_file_parse_error(self, tmp_path):
        code, _ = run("evolve", str(tmp_path / "nope.txt"), "--s", "1", "--t", "1")
        assert code == EXIT_PARSE


class TestVerify:
    def test_all_suites_pass(self):
        code, text = run("verify", "all")
        assert code == EXIT_OK
        assert "FAIL" not in text
        assert "[PASS]" in text

    def test_single_suite(self):
        code, text = run("verify", "dyadic")
        assert code == EXIT_OK
        assert all(
            line.split()[1].rstrip(":") == "dyadic"
            for line in text.splitlines()
            if line.startswith("[")
        )

    def test_unknown_suite_parse_error(self):
        code, _ = run("verify", "bogus")
        assert code == EXIT_PARSE


class TestTruncationOverrides:
    def test_env_tail_tol_respected(self, monkeypatch):
        monkeypatch.setenv("DYADIFF_TAIL_TOL", "1e-6")
        doc = run_json(
            "distance", "0.25", "0.75", "--s", "1", "--t", "1", "--method", "both"
        )
        assert float(doc["discrepancy"]) < 1e-5

    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("DYADIFF_TAIL_TOL", "1e-2")
        doc = run_json(
            "distance",
            "0.25",
            "0.75",
            "--s",
            "1",
            "--t",
            "1",
            "--method",
            "both",
            "--tail-tol",
            "1e-12",
        )
        assert float(doc["discrepancy"]) < 1e-10
