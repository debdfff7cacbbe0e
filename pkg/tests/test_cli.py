import json

from crossopt.cli import main
from crossopt.instances import dump_instance
from crossopt.randgen import random_lattice_instance, random_mcst_instance
import random


def run_cli(*argv):
    return main(list(argv))


def test_gen_solve_verify_pipeline(tmp_path):
    inst = tmp_path / "ec.json"
    report = tmp_path / "report.json"
    assert run_cli("gen", "edge-cover", "--n", "1", "--out", str(inst)) == 0
    assert (
        run_cli(
            "solve-intersection",
            "--in",
            str(inst),
            "--verify",
            "--report",
            str(report),
        )
        == 0
    )
    body = json.loads(report.read_text())
    assert body["outcome"] == "ok"
    assert body["lp_optimum"]["rational"] == "2/1"
    # the degree clause is met with equality in the tight example
    bound_checks = [c for c in body["checks"] if c["name"].startswith("bound")]
    assert all(c["achieved"] == "2" for c in bound_checks)


def test_missing_file_is_usage_error(tmp_path):
    assert run_cli("solve-mcst", "--in", str(tmp_path / "absent.json")) == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert run_cli("frobnicate") == 2
    capsys.readouterr()


def test_reports_are_byte_identical(tmp_path):
    inst = tmp_path / "inst.json"
    dump_instance(random_mcst_instance(random.Random(3)), inst)
    r1 = tmp_path / "a.json"
    r2 = tmp_path / "b.json"
    assert run_cli("solve-mcst", "--in", str(inst), "--verify", "--report", str(r1)) == 0
    assert run_cli("solve-mcst", "--in", str(inst), "--verify", "--report", str(r2)) == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_solve_mcst_trace_and_verify_subcommand(tmp_path):
    inst_path = tmp_path / "inst.json"
    dump_instance(random_mcst_instance(random.Random(5)), inst_path)
    trace = tmp_path / "trace.jsonl"
    solution = tmp_path / "sol.json"
    assert (
        run_cli(
            "solve-mcst",
            "--in",
            str(inst_path),
            "--trace",
            str(trace),
            "--solution",
            str(solution),
            "--verify",
        )
        == 0
    )
    assert (
        run_cli(
            "verify",
            "--in",
            str(inst_path),
            "--solution",
            str(solution),
            "--trace",
            str(trace),
        )
        == 0
    )
    # verifying an mcst run without the trace is a usage error
    assert (
        run_cli("verify", "--in", str(inst_path), "--solution", str(solution)) == 2
    )


def test_solve_lattice_variant_flag(tmp_path):
    inst_path = tmp_path / "lat.json"
    dump_instance(
        random_lattice_instance(random.Random(8), variant="inclusion"), inst_path
    )
    assert run_cli("solve-lattice", "--in", str(inst_path), "--verify") == 0
    assert (
        run_cli(
            "solve-lattice",
            "--in",
            str(inst_path),
            "--variant",
            "general",
            "--verify",
        )
        == 0
    )


def test_gen_gap_reports(tmp_path):
    out = tmp_path / "gap.json"
    rep = tmp_path / "gapreport.json"
    assert (
        run_cli(
            "gen", "planar-gap", "--k", "2", "--out", str(out), "--report", str(rep)
        )
        == 0
    )
    body = json.loads(rep.read_text())
    assert body["claim_ok"] is True
    assert body["integral_min_violation"] == 1

    inst_body = json.loads(out.read_text())
    assert inst_body["schema"] == 1 and inst_body["type"] == "lattice"


def test_gen_reduction_with_bounds(tmp_path):
    out = tmp_path / "red.json"
    assert (
        run_cli(
            "gen",
            "reduction",
            "--e",
            "3",
            "--t",
            "2",
            "--bounds",
            "[[[0,1],1]]",
            "--out",
            str(out),
        )
        == 0
    )
    body = json.loads(out.read_text())
    assert body["type"] == "general-mcst"
    assert len(body["bounds"]) == 2  # the input bound plus the special bound


def test_selftest_quick():
    assert run_cli("selftest", "--runs", "2") == 0


def test_pipe_through_stdin(tmp_path, monkeypatch, capsys):
    import io
    import sys as _sys

    from crossopt.instances import canonical_json
    from crossopt.generators import gen_edge_cover_tight

    body = canonical_json(gen_edge_cover_tight(1).to_json())
    monkeypatch.setattr(_sys, "stdin", io.StringIO(body))
    assert run_cli("solve-intersection", "--in", "-", "--verify") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["outcome"] == "ok"


def test_internal_invariant_maps_to_exit_3(tmp_path, monkeypatch):
    from crossopt import cli as cli_module
    from crossopt.errors import InternalCheckError

    inst = tmp_path / "inst.json"
    dump_instance(random_mcst_instance(random.Random(3)), inst)

    def boom(instance):
        raise InternalCheckError("synthetic")

    monkeypatch.setattr(cli_module, "run_mcst", boom)
    assert run_cli("solve-mcst", "--in", str(inst)) == 3


def test_timing_field_is_opt_in(tmp_path):
    inst = tmp_path / "inst.json"
    dump_instance(random_mcst_instance(random.Random(3)), inst)
    plain = tmp_path / "p.json"
    timed = tmp_path / "t.json"
    run_cli("solve-mcst", "--in", str(inst), "--report", str(plain))
    run_cli("solve-mcst", "--in", str(inst), "--timing", "--report", str(timed))
    assert "timing_seconds" not in json.loads(plain.read_text())
    assert "timing_seconds" in json.loads(timed.read_text())
