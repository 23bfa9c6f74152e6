import os
import subprocess
import sys

import pytest

from tabsynth import cli


def run_cli(args):
    return cli.main(args)


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run_cli(["synth", "--preset", "so",
                    "-o", str(d / "so.calc")]) == 0
    assert run_cli(["synth", "--preset", "ipc",
                    "-o", str(d / "ipc.calc")]) == 0
    presets = os.path.join(os.path.dirname(cli.__file__), "presets")
    assert run_cli(["refine", "--calc", str(d / "so.calc"),
                    "--refine-script", os.path.join(presets, "so.refine"),
                    "--ctx", os.path.join(presets, "so.ctx"),
                    "-o", str(d / "so_refined.calc")]) == 0
    assert run_cli(["refine", "--calc", str(d / "ipc.calc"),
                    "--refine-script", os.path.join(presets, "ipc.refine"),
                    "-o", str(d / "ipc_refined.calc")]) == 0
    return d


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return str(path)


def test_exit_code_unsat(work):
    prob = _write(work / "p1.txt",
                  "exists(r0, exists(r0, p0))\nnot(exists(r0, p0))\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", "--ub", prob])
    assert code == 20


def test_exit_code_sat_with_model(work):
    prob = _write(work / "p2.txt", "exists(r0, p0)\n")
    model = str(work / "m.txt")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", "--ub", "--model", model, prob])
    assert code == 0
    text = open(model).read()
    assert text.startswith("domain:")
    assert "nu1 p0:" in text


def test_exit_code_unknown_on_budget(work):
    prob = _write(work / "p3.txt", "exists(r0, p0)\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", "--ub", "--budget-nodes", "2", prob])
    assert code == 30


def test_exit_code_malformed_problem(work):
    prob = _write(work / "p4.txt", "or(p0\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", prob])
    assert code == 2


def test_exit_code_empty_problem(work):
    prob = _write(work / "p5.txt", "# nothing here\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"), prob])
    assert code == 2


def test_exit_code_broken_spec(tmp_path):
    spec = _write(tmp_path / "broken.spec", "sorts 2\nvars 1 p\ndefine junk\n")
    assert run_cli(["synth", "--spec", spec]) == 1


def test_refine_missing_rule(tmp_path, work):
    script = _write(tmp_path / "bad.refine", "rf nosuch fold 0\n")
    code = run_cli(["refine", "--calc", str(work / "so.calc"),
                    "--refine-script", script])
    assert code == 1


def test_refine_unsafe_needs_flag(tmp_path, work):
    script = _write(tmp_path / "ke.refine", "rf or_pos fold 0 drop-dp\n")
    out = str(tmp_path / "ke.calc")
    assert run_cli(["refine", "--calc", str(work / "so.calc"),
                    "--refine-script", script, "-o", out]) == 1
    assert run_cli(["refine", "--calc", str(work / "so.calc"),
                    "--refine-script", script, "--unsafe-refine",
                    "-o", out]) == 0


def test_synth_deterministic_bytes(work, tmp_path):
    out2 = str(tmp_path / "so2.calc")
    assert run_cli(["synth", "--preset", "so", "-o", out2]) == 0
    assert open(out2, "rb").read() == open(work / "so.calc", "rb").read()


def test_ipc_validity_pipeline(work):
    prob = _write(work / "p6.txt", "not(impl(p0, p0))\n")
    code = run_cli(["prove", "--calc", str(work / "ipc_refined.calc"),
                    "--preset", "ipc", "--ub", prob])
    assert code == 20


def test_oracle_exit_codes(work):
    prob = _write(work / "p7.txt", "p0\nnot(p0)\n")
    assert run_cli(["oracle", "--preset", "so", "--max-size", "3", prob]) == 20
    prob2 = _write(work / "p8.txt", "p0\n")
    assert run_cli(["oracle", "--preset", "so", "--max-size", "3",
                    prob2]) == 0
    assert run_cli(["oracle", "--preset", "so", "--max-size", "3",
                    str(work / "p4.txt")]) == 2


def test_checkwd_writes_files(work, tmp_path):
    outdir = str(tmp_path / "wd")
    assert run_cli(["check-wd", "--preset", "ipc", "--outdir", outdir]) == 0
    names = sorted(os.listdir(outdir))
    assert names == ["wd1.p", "wd3_and.p", "wd3_bot.p", "wd3_impl.p",
                     "wd3_or.p"]


def test_checkwd_unwritable_outdir(work):
    assert run_cli(["check-wd", "--preset", "so",
                    "--outdir", "/proc/nonexistent/wd"]) == 1


def test_trace_written_and_replayable(work, tmp_path):
    prob = _write(work / "p9.txt", "exists(r0, p0)\n")
    trace = str(tmp_path / "run.trace")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", "--ub", "--trace", trace, prob])
    assert code == 0
    from tabsynth import calcfile, engine, parser, refine, synth
    calc = calcfile.parse_calculus(open(work / "so_refined.calc").read())
    calc = refine.attach_ub(calc, synth.UbConfig(True, 0))
    c = parser.parse_lexpr(calc.signature, "exists(r0, p0)", 1)
    steps = engine.replay_trace(calc, [c], open(trace).read())
    assert steps > 0


def test_console_entry_point(work):
    proc = subprocess.run(
        [sys.executable, "-m", "tabsynth.cli", "synth", "--preset", "so"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "rule or_pos" in proc.stdout
    assert "decomposition: 8" in proc.stderr


def test_time_budget_gives_unknown(work):
    prob = _write(work / "p10.txt", "exists(r0, p0)\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--preset", "so", "--ub", "--budget-secs", "0", prob])
    assert code == 30


def test_model_requires_spec(work, tmp_path):
    prob = _write(work / "p11.txt", "p0\n")
    code = run_cli(["prove", "--calc", str(work / "so_refined.calc"),
                    "--model", str(tmp_path / "m.txt"), prob])
    assert code == 1
