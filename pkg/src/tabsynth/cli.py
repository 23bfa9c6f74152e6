"""Command line driver: synthesis, refinement, proving, obligation export
and the brute-force oracle.

Exit codes are a fixed contract: 0 satisfiable (or plain success), 20
unsatisfiable, 30 unknown / resource limit, 1 pipeline error, 2 malformed
input.
"""

from __future__ import annotations

import argparse
import shutil
import subprocess
import sys

from . import calcfile, engine, models, normalize, refine, specfile, synth, tptp
from . import syntax as sx
from .parser import SpecSyntaxError, TreeParser, tokenize, Elaborator

EXIT_SAT = 0
EXIT_OK = 0
EXIT_UNSAT = 20
EXIT_UNKNOWN = 30
EXIT_ERROR = 1
EXIT_BAD_INPUT = 2


def _load_spec(args):
    if getattr(args, "preset", None):
        return specfile.preset(args.preset)
    if getattr(args, "spec", None):
        with open(args.spec, encoding="utf-8") as fh:
            return specfile.parse_spec(fh.read(), name=args.spec)
    return None


def _load_problem(sig, skolems, path):
    """One concept per line; a not(...) line whose not is no connective of
    the signature roots the negated literal instead."""
    inputs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            el = Elaborator(sig, skolems)
            tp = TreeParser(tokenize(line, lineno))
            tree = tp.tree()
            if not tp.at_end():
                raise SpecSyntaxError("trailing input", lineno)
            if tree[0] == "app" and tree[1] == "not" \
                    and "not" not in sig.conns and len(tree[2]) == 1:
                inputs.append((el.lexpr(tree[2][0], 1), False))
            else:
                inputs.append((el.lexpr(tree, 1), True))
    return inputs


def cmd_synth(args):
    try:
        spec = _load_spec(args)
        if spec is None:
            print("synth needs --preset or --spec", file=sys.stderr)
            return EXIT_ERROR
        ns = normalize.normalize(spec)
        calc = synth.synthesize(ns, assume_well_founded=args.assume_well_founded)
    except sx.TabError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_ERROR
    text = calcfile.print_calculus(calc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for kind, n in sorted(calc.counts_by_kind().items()):
        print("%s: %d" % (kind, n), file=sys.stderr)
    return EXIT_OK


def cmd_refine(args):
    try:
        with open(args.calc, encoding="utf-8") as fh:
            calc = calcfile.parse_calculus(fh.read())
        with open(args.refine_script, encoding="utf-8") as fh:
            steps = refine.parse_script(fh.read())
        ctx = None
        if args.ctx:
            ctx = refine.load_context(args.ctx, calc.signature, calc.skolems)
        calc, log = refine.apply_script(calc, steps, ctx=ctx,
                                        unsafe=args.unsafe_refine)
    except sx.TabError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_ERROR
    warning = getattr(calc, "completeness_warning", None)
    if warning:
        print("warning: %s" % warning, file=sys.stderr)
    for entry in log:
        print(entry, file=sys.stderr)
    text = calcfile.print_calculus(calc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_prove(args):
    try:
        with open(args.calc, encoding="utf-8") as fh:
            calc = calcfile.parse_calculus(fh.read())
    except (OSError, sx.TabError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_ERROR
    try:
        spec = _load_spec(args)
        ns = normalize.normalize(spec) if spec else None
        inputs = _load_problem(calc.signature, calc.skolems, args.problem)
        if not inputs:
            raise engine.EmptyInput("empty problem")
    except (OSError, sx.TabError) as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.ub:
        calc = refine.attach_ub(calc, synth.UbConfig(True, args.ub_depth))
    eng = engine.Engine(calc, ns=ns, node_budget=args.budget_nodes,
                        time_budget=args.budget_secs, search=args.search,
                        trace=bool(args.trace))
    try:
        tab = eng.init(inputs)
    except sx.TabError as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_BAD_INPUT
    verdict = eng.expand(tab)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(eng.trace) + "\n")
    if verdict.kind == "unsat":
        print("UNSAT")
        return EXIT_UNSAT
    if verdict.kind == "limit":
        print("UNKNOWN")
        return EXIT_UNKNOWN
    print("SAT")
    if args.model:
        if ns is None:
            print("error: --model needs --spec or --preset", file=sys.stderr)
            return EXIT_ERROR
        m = models.extract_model(verdict.branch, ns, ctx=calc.ctx,
                                 skolems=calc.skolems)
        with open(args.model, "w", encoding="utf-8") as fh:
            fh.write(m.format())
    return EXIT_SAT


def cmd_checkwd(args):
    try:
        spec = _load_spec(args)
        if spec is None:
            print("check-wd needs --preset or --spec", file=sys.stderr)
            return EXIT_ERROR
        ns = normalize.normalize(spec)
        obligations = normalize.emit_wd_obligations(ns)
        paths = tptp.write_obligations(obligations, spec.signature, args.outdir)
    except (OSError, sx.TabError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_ERROR
    for ob, path in zip(obligations, paths):
        note = " (%s)" % ob.status if ob.status else ""
        print("wrote %s%s" % (path, note))
    if args.prover:
        prog = args.prover.split()[0]
        if shutil.which(prog) is None:
            print("prover %r not found; obligations left for later" % prog,
                  file=sys.stderr)
            return EXIT_OK
        for ob, path in zip(obligations, paths):
            cmd = args.prover.split() + [path]
            try:
                res = subprocess.run(cmd, capture_output=True, text=True,
                                     timeout=args.prover_timeout)
                out = res.stdout + res.stderr
                if "Theorem" in out or "Unsatisfiable" in out:
                    print("%s: proved" % ob.name)
                else:
                    print("%s: not proved (exit %d)" % (ob.name, res.returncode))
            except subprocess.TimeoutExpired:
                print("%s: prover timeout" % ob.name)
    return EXIT_OK


def cmd_oracle(args):
    try:
        spec = _load_spec(args)
        if spec is None:
            print("oracle needs --preset or --spec", file=sys.stderr)
            return EXIT_ERROR
        ns = normalize.normalize(spec)
        inputs = _load_problem(spec.signature, {}, args.problem)
        if not inputs:
            raise engine.EmptyInput("empty problem")
    except (OSError, sx.TabError) as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        res, m = models.brute_force_sat(ns, inputs, args.max_size)
    except models.CarrierTooLarge as e:
        print("UNKNOWN")
        print("carrier too large: %s" % e, file=sys.stderr)
        return EXIT_UNKNOWN
    if res == "sat":
        print("SAT")
        if args.model:
            with open(args.model, "w", encoding="utf-8") as fh:
                fh.write(m.format())
        return EXIT_SAT
    print("UNSAT")
    return EXIT_UNSAT


def _add_spec_opts(p):
    p.add_argument("--preset", help="bundled specification (so, ipc)")
    p.add_argument("--spec", help="specification file")


def build_parser():
    ap = argparse.ArgumentParser(prog="tabsynth",
                                 description="tableau calculus synthesis and "
                                             "generic tableau proving")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="compile a specification to a calculus")
    _add_spec_opts(p)
    p.add_argument("-o", "--out", help="output .calc path (default stdout)")
    p.add_argument("--assume-well-founded", action="store_true")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("refine", help="apply a refinement script")
    p.add_argument("--calc", required=True)
    p.add_argument("--refine-script", required=True)
    p.add_argument("--ctx", help="rewrite context for tr steps")
    p.add_argument("--unsafe-refine", action="store_true",
                   help="acknowledge folds outside the admissible whitelist")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("prove", help="decide satisfiability of a problem")
    p.add_argument("--calc", required=True)
    _add_spec_opts(p)
    p.add_argument("--ub", action="store_true", help="attach the blocking rule")
    p.add_argument("--ub-depth", type=int, default=0, metavar="D")
    p.add_argument("--search", choices=("dfs", "bfs"), default="dfs")
    p.add_argument("--budget-nodes", type=int, default=10 ** 6)
    p.add_argument("--budget-secs", type=float, default=None)
    p.add_argument("--model", help="write the extracted model here on SAT")
    p.add_argument("--trace", help="write a replayable derivation trace here")
    p.add_argument("problem", help="file with one concept per line")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check-wd", help="export well-definedness obligations")
    _add_spec_opts(p)
    p.add_argument("--outdir", default="wd")
    p.add_argument("--prover", help="external first-order prover command")
    p.add_argument("--prover-timeout", type=float, default=30.0)
    p.set_defaults(fn=cmd_checkwd)

    p = sub.add_parser("oracle", help="brute-force finite-model search")
    _add_spec_opts(p)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--model", help="write the found model here on SAT")
    p.add_argument("problem")
    p.set_defaults(fn=cmd_oracle)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
