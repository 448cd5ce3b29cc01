import csv
import io
import math
import subprocess
import sys

import pytest

from skolemcount.cli import main
from skolemcount.formula import to_qdimacs
from skolemcount.instances import factorization_spec, or_spec, random_spec, unsat_spec, xor_spec


def parse_kv(text):
    return dict(line.split(" ", 1) for line in text.splitlines() if line and not line.startswith("c "))


@pytest.fixture
def fact_file(write):
    return write("factorization5.qdimacs", to_qdimacs(factorization_spec(5)))


def test_count(fact_file, capsys):
    assert main(["count", str(fact_file), "--epsilon", "0.8", "--delta", "0.4", "--seed", "1"]) == 0
    out = parse_kv(capsys.readouterr().out)
    assert out["s"] == "ok"
    ln = float(out["estimate_ln"])
    assert 0.2 * math.log(288) <= ln <= 1.8 * math.log(288)
    assert float(out["estimate_log2"]) == pytest.approx(ln / math.log(2))
    assert int(out["count_calls"]) == int(out["t"]) + 1


def test_count_log_base_two(fact_file, capsys):
    main(["count", str(fact_file), "--log-base", "2"])
    out = parse_kv(capsys.readouterr().out)
    assert out["estimate"] == out["estimate_log2"]


def test_count_unsat(write, capsys):
    path = write("unsat.qdimacs", to_qdimacs(unsat_spec()))
    assert main(["count", str(path)]) == 0
    assert float(parse_kv(capsys.readouterr().out)["estimate_ln"]) == 0.0


def test_malformed_file_exits_1(write, capsys):
    path = write("bad.qdimacs", "p cnf x 1\n")
    assert main(["count", str(path)]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["baseline", "/does/not/exist"]) == 1


def test_baseline(fact_file, capsys):
    assert main(["baseline", str(fact_file)]) == 0
    out = parse_kv(capsys.readouterr().out)
    assert out["exact_count"] == "288"
    assert float(out["estimate_ln"]) == pytest.approx(5.662960, abs=1e-6)


def test_baseline_cap_exits_3(fact_file, capsys):
    assert main(["baseline", str(fact_file), "--max-models", "3"]) == 3
    out = parse_kv(capsys.readouterr().out)
    assert out["s"] == "limit" and int(out["sat_calls"]) > 0


def test_sat_call_cap_exits_3(fact_file, capsys):
    assert main(["count", str(fact_file), "--max-sat-calls", "5"]) == 3


def test_brute(fact_file, capsys):
    assert main(["brute", str(fact_file)]) == 0
    assert parse_kv(capsys.readouterr().out)["exact_count"] == "288"


def test_abort_exit_code(fact_file, capsys, monkeypatch):
    from skolemcount import harness
    from skolemcount.counting import CountResult, ExactCounter
    from skolemcount.estimator import EPS_C

    class Loose(ExactCounter):
        def count(self, pf, epsilon=0.0, delta=0.0, seed=0, budget=None, assumptions=()):
            if len(pf.projection) == 5:
                return super().count(pf, budget=budget)
            return CountResult(2, EPS_C, delta, 1)

    monkeypatch.setattr(harness, "make_oracles", lambda o, s=None: (Loose(), None))
    assert main(["count", str(fact_file)]) == 2
    assert parse_kv(capsys.readouterr().out)["s"] == "abort"


def make_panel(directory):
    import random
    rng = random.Random(11)
    specs = {"factorization5": factorization_spec(5), "xor": xor_spec(), "unsat": unsat_spec(), "or": or_spec()}
    for i in range(6):
        specs[f"random{i}"] = random_spec(rng, 3, 3, 6)
    for name, spec in specs.items():
        (directory / f"{name}.qdimacs").write_text(to_qdimacs(spec))
    (directory / "notes.txt").write_text("ignored")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bench_both_modes(tmp_path):
    inst = tmp_path / "inst"
    inst.mkdir()
    make_panel(inst)
    out = tmp_path / "a.csv"
    assert main(["bench", str(inst), "--mode", "both", "--output", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 20
    assert {r["status"] for r in rows} <= {"ok", "abort", "limit"}
    assert list(rows[0]) == ["instance", "mode", "status", "estimate_ln", "estimate_log2", "t", "sat_calls",
                             "count_calls", "sample_calls", "wall_time_s", "seed"]
    # determinism apart from wall time
    out2 = tmp_path / "b.csv"
    main(["bench", str(inst), "--mode", "both", "--output", str(out2)])
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]
    assert strip(rows) == strip(read_csv(out2))


def test_bench_records_failures_as_rows(tmp_path, capsys):
    (tmp_path / "bad.qdimacs").write_text("nonsense\n")
    (tmp_path / "or.qdimacs").write_text(to_qdimacs(or_spec()))
    assert main(["bench", str(tmp_path), "--mode", "skolemfc"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [(r["instance"], r["status"]) for r in rows] == [("bad.qdimacs", "error"), ("or.qdimacs", "ok")]


def test_bench_empty_directory(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "instance,mode,status,estimate_ln,estimate_log2,t,sat_calls,count_calls,sample_calls,wall_time_s,seed"]


def test_bench_parallel_matches_serial(tmp_path):
    inst = tmp_path / "inst"
    inst.mkdir()
    make_panel(inst)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", str(inst), "--mode", "skolemfc", "-o", str(a)])
    main(["bench", str(inst), "--mode", "skolemfc", "--jobs", "2", "-o", str(b)])
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]
    assert strip(read_csv(a)) == strip(read_csv(b))


def test_module_entry_point(fact_file):
    proc = subprocess.run([sys.executable, "-m", "skolemcount", "baseline", str(fact_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "exact_count 288" in proc.stdout


def test_solve_exit_codes(write):
    sat = write("s.cnf", "p cnf 2 1\n1 -2 0\n")
    unsat = write("u.cnf", "p cnf 1 2\n1 0\n-1 0\n")
    run = lambda p: subprocess.run([sys.executable, "-m", "skolemcount", "solve", str(p)], capture_output=True, text=True)
    r = run(sat)
    assert r.returncode == 10 and r.stdout.startswith("s SATISFIABLE")
    assert run(unsat).returncode == 20


def test_external_oracle_on_tiny_instance_aborts(write, capsys):
    # an external counter only promises the requested cofactor tolerance, which
    # on a one-input instance swamps the estimate
    path = write("or.qdimacs", to_qdimacs(or_spec()))
    cmd = f"external:{sys.executable} -m skolemcount mc"
    assert main(["count", str(path), "--epsilon", "2", "--oracle", cmd, "--sampler", "exact"]) == 2
    out = parse_kv(capsys.readouterr().out)
    assert out["s"] == "abort" and int(out["count_calls"]) == int(out["t"]) + 1
