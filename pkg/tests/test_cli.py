import json
import subprocess
import sys

import pytest

BASE = [sys.executable, "-m", "affloop.cli"]


def run(*args, check=False):
    proc = subprocess.run(BASE + list(args), capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(proc.stderr + proc.stdout)
    return proc


def test_construct_a2_case1():
    proc = run("construct", "--type", "A2", "--case", "1", check=True)
    blob = json.loads(proc.stdout)
    assert blob["realization"]["A"] == [[2, -1], [-4, 2]]
    assert blob["realization"]["T"] == 2
    assert blob["validation"]["marks"] == [1, 2]
    assert blob["schema"] == 1


def test_construct_d4_case5():
    proc = run("construct", "--type", "D4", "--case", "5", check=True)
    blob = json.loads(proc.stdout)
    assert blob["realization"]["r"] == 3 and blob["realization"]["T"] == 3


def test_construct_untwisted_a1():
    proc = run("construct", "--type", "A1", "--untwisted", check=True)
    blob = json.loads(proc.stdout)
    assert blob["realization"]["A"] == [[2, -2], [-2, 2]]


def test_invalid_config_exit_2():
    proc = run("construct", "--type", "A3", "--case", "1")
    assert proc.returncode == 2
    proc = run("characters", "--type", "A1", "--untwisted", "--weight",
               "1,2,3", "-D", "1")
    assert proc.returncode == 2


def test_characters_table():
    proc = run("characters", "--type", "A1", "--untwisted", "-k", "1",
               "--weight", "1,0", "-D", "2", "--format", "tsv", check=True)
    lines = proc.stdout.strip().splitlines()
    assert lines[0].startswith("#")
    # dim_M/dim_M1 depend on the weight window; dim_L is window-complete
    dims_L = [r.split("\t")[3] for r in lines[1:]]
    assert dims_L == ["1", "3", "4"]
    assert lines[1].split("\t")[0] == "0/1"
    assert all(r.split("\t")[4] == "true" for r in lines[1:])


def test_characters_verma_only_nondominant():
    proc = run("characters", "--type", "A1", "--untwisted", "-k", "1",
               "--weight", "2,-1", "-D", "1", "--verma-only", check=True)
    blob = json.loads(proc.stdout)
    assert blob["mode"] == "verma-only"


def test_verify_heisenberg():
    proc = run("verify", "heisenberg", "-m", "8", check=True)
    blob = json.loads(proc.stdout)
    assert blob["status"] == "pass"
    assert all(v["member"] for v in blob["results"].values())


def test_verify_delta():
    proc = run("verify", "delta", "--type", "A1", "--untwisted", "-k", "1",
               "-D", "3", check=True)
    blob = json.loads(proc.stdout)
    assert blob["report"]["invertible"]


def test_verify_annihilate_small():
    proc = run("verify", "annihilate", "--type", "A1", "--untwisted",
               "-k", "1", "--weight", "1,0", "-D", "2", check=True)
    blob = json.loads(proc.stdout)
    assert blob["status"] == "pass"
    assert blob["fingerprint"]


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("type=A1\nuntwisted=true\nlevel=1\nweight=1,0\ndepth=2\n")
    a = run("verify", "annihilate", "--config", str(cfg), check=True)
    # flags win over the file
    b = run("verify", "annihilate", "--config", str(cfg), "-D", "1",
            check=True)
    assert json.loads(a.stdout)["report"]["depth_q"] == 2
    assert json.loads(b.stdout)["report"]["depth_q"] == 1


def test_determinism_byte_identical():
    args = ("characters", "--type", "A1", "--untwisted", "-k", "1",
            "--weight", "1,0", "-D", "2", "--seed", "7")
    assert run(*args, check=True).stdout == run(*args, check=True).stdout


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    run("construct", "--type", "A2", "--case", "1", "--out", str(out),
        check=True)
    blob = json.loads(out.read_text())
    assert blob["fingerprint"]
