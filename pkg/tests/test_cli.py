import json
import subprocess
import sys

import pytest

from conftest import CORPUS, ROOT
from fimod import cli, io
from fimod import module as md
from fimod.scalars import QQ

K0 = str(CORPUS[0].parent / "k_at_0.fi")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out


@pytest.mark.parametrize("command", ["validate", "invariants", "homology", "is-filtered",
                                     "filtration", "pd", "shift", "derivative",
                                     "nagpal-complex", "regularity-check"])
def test_commands_emit_json(capsys, command):
    code, out = run(capsys, command, K0, "--json", "-")
    data = json.loads(out.out)
    assert data["command"] == command and data["input"] == K0
    assert code == {"ok": 0, "violation": 2, "uncertified": 3}[data["status"]]
    assert "seconds" not in data


def test_exit_zero_on_success(capsys):
    code, out = run(capsys, "homology", K0, "--oracle", "--json", "-")
    assert code == 0
    assert json.loads(out.out)["result"]["oracle"]["mismatches"] == []


def test_exit_three_when_window_limited(capsys):
    code, out = run(capsys, "homology", K0, "--smax", "9")
    assert code == 3


def test_exit_two_on_certified_failure(capsys, tmp_path):
    v = md.free_module(QQ, [1], 3)
    incl = [v.incl(n).copy() for n in range(3)]
    incl[1][0, 0] = incl[1][0, 0] + 1
    broken = md.FIModule(QQ, 3, v.dims, incl, [[v.sym(n, i) for i in range(1, n)] for n in range(4)])
    p = tmp_path / "broken.txt"
    p.write_text(io.serialize_explicit(broken))
    code, _ = run(capsys, "validate", str(p))
    assert code == 2


def test_exit_one_on_bad_input(capsys, tmp_path):
    p = tmp_path / "bad.fi"
    p.write_text("field Q\nwindow 3\ngen a 1\nrel r : 1->2:(1) zz\n")
    code, out = run(capsys, "validate", str(p))
    assert code == 1 and "line 4" in out.err
    code, out = run(capsys, "validate", str(tmp_path / "missing.fi"))
    assert code == 1


def test_shift_writes_module(capsys, tmp_path):
    target = tmp_path / "shifted.txt"
    code, _ = run(capsys, "shift", str(CORPUS[0].parent / "free_m1.fi"), "-d", "2", "-o", str(target))
    assert code == 0
    w, _ = io.load_module(target)
    assert w.dims[:3] == (2, 3, 4)


def test_timing_only_on_request(capsys):
    code, out = run(capsys, "invariants", K0, "--json", "-", "--timing")
    assert "seconds" in json.loads(out.out)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fimod.cli", "--help"], capture_output=True,
                          text=True, cwd=ROOT)
    assert proc.returncode == 0 and "nagpal-complex" in proc.stdout
