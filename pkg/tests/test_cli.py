import io
import json
import subprocess
import sys

import pytest

from gridbook.cli import ReplState, main, new_session, repl_eval, run_script


def run_cli(*argv):
    """Run main() in-process, capturing stdout."""
    import contextlib
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestExerciseCommand:
    def test_exercise_all_exits_zero(self):
        code, out = run_cli("exercise", "all")
        assert code == 0
        assert "step10: PASS" in out

    def test_single_exercise(self):
        code, out = run_cli("exercise", "step3")
        assert code == 0
        assert "step3: PASS" in out

    def test_unknown_exercise_fails(self):
        code, _ = run_cli("exercise", "step99")
        assert code != 0

    def test_subprocess_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "gridbook",
                               "exercise", "all"],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0


class TestExplainCommand:
    def test_coercion(self):
        code, out = run_cli("explain", "12/3")
        assert code == 0
        assert "FIRED" in out

    def test_formula(self):
        code, out = run_cli("explain", "=C2-B2")
        assert code == 0
        assert "SHAPE" in out


class TestImportCommand:
    def test_import_reports_count(self, tmp_path):
        src = tmp_path / "data.csv"
        src.write_text("1;2\n3;4\n")
        code, out = run_cli("import", str(src))
        assert code == 0
        assert "4 cell(s)" in out

    def test_import_save_round_trip(self, tmp_path):
        src = tmp_path / "data.csv"
        src.write_text("x;1,5\n")
        saved = tmp_path / "wb.json"
        code, _ = run_cli("import", str(src), "--anchor", "B2",
                          "--save", str(saved))
        assert code == 0
        doc = json.loads(saved.read_text())
        assert doc["sheets"][0]["cells"]["B2"]["entry"] == "x"

    def test_unbalanced_quote_fails_cleanly(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text('"oops\n')
        code, out = run_cli("import", str(src))
        assert code != 0


class TestChartCommand:
    def test_chart_writes_svg(self, tmp_path):
        wb_path = tmp_path / "wb.json"
        session = new_session()
        for i, v in enumerate([30, 45, 40, 10], start=1):
            session.dispatch({"id": str(i), "verb": "SetEntry",
                              "params": {"addr": f"B{i}", "text": str(v)}})
        session.dispatch({"id": "s", "verb": "Save",
                          "params": {"path": str(wb_path)}})
        spec = tmp_path / "chart.json"
        spec.write_text(json.dumps({
            "workbook": "wb.json",
            "spec": {"kind": "bar",
                     "series": [{"name": "q", "range": "B1:B4"}]}}))
        out_svg = tmp_path / "out.svg"
        code, out = run_cli("chart", str(spec), "--out", str(out_svg))
        assert code == 0
        svg = out_svg.read_text()
        assert svg.startswith("<svg")
        assert svg.count("<rect") == 4


class TestReplScripting:
    def script(self, tmp_path, lines):
        path = tmp_path / "script.txt"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_run_script_replays(self, tmp_path):
        path = self.script(tmp_path, [
            "set 33%",
            "goto A2",
            "set 70%",
            "goto A3",
            "=A2-A1",
            "show A3",
        ])
        out = io.StringIO()
        code = run_script(ReplState(new_session()), str(path), out)
        assert code == 0
        assert "37%" in out.getvalue()

    def test_transcript_is_deterministic(self, tmp_path):
        path = self.script(tmp_path, [
            "goto B1",
            "8:20",
            "goto B2",
            "8:30",
            "fill B1:B2 B1:B4",
            "show B4",
        ])
        out1, out2 = io.StringIO(), io.StringIO()
        run_script(ReplState(new_session()), str(path), out1)
        run_script(ReplState(new_session()), str(path), out2)
        assert out1.getvalue() == out2.getvalue()

    def test_failing_line_sets_exit_code(self, tmp_path):
        path = self.script(tmp_path, ["copy NOPE also-nope"])
        out = io.StringIO()
        assert run_script(ReplState(new_session()), str(path), out) != 0


class TestTodayOverride:
    def test_env_var_changes_pinned_today(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRIDBOOK_TODAY", "1999-06-15")
        code, out = run_cli("explain", "1/2")
        assert code == 0
        assert "1999" in out

    def test_bad_env_var_exits(self, monkeypatch):
        monkeypatch.setenv("GRIDBOOK_TODAY", "not-a-date")
        with pytest.raises(SystemExit):
            run_cli("explain", "1/2")

    def test_default_today_is_pinned(self, monkeypatch):
        monkeypatch.delenv("GRIDBOOK_TODAY", raising=False)
        code, out = run_cli("explain", "1/2")
        assert code == 0
        assert "2004" in out
