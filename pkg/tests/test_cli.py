import subprocess
import sys

import pytest

from cli_cases import CASES, golden_path, run_case


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    _, expected = CASES[name]
    code, out, err = run_case(name)
    assert code == expected, err.decode()
    with open(golden_path(name), "rb") as fh:
        assert out == fh.read()
    if code != 0:
        assert err.strip(), "errors must be reported on stderr"


@pytest.mark.parametrize("name", ["laws_lc", "translate_if_normalize", "subst_worked"])
def test_repeat_runs_identical(name):
    assert run_case(name) == run_case(name)


def test_type_error_reports_path():
    code, _, err = run_case("translate_type_error")
    assert code == 1 and b"at " in err


def test_console_entry_point_matches_module():
    out = subprocess.run([sys.executable, "-c", "from binders.cli import main; raise SystemExit(main(['--version']))"],
                         capture_output=True)
    assert out.returncode == 0 and out.stdout == b"binders 0.1.0\n"
