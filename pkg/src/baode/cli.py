"""Command-line front end.

    baode <command> [args] [--out DIR] [--seed N] [--verify-all-rho] [--max-atoms N] [-w DIR]

Arguments name a binding from a ``-w/--workspace`` directory or a JSON
file.  With ``--out`` the result is written there and a summary printed;
without it the result JSON goes to stdout and the summary to stderr.
Exit status: 0 all checks pass, 1 some check fails, 2 bad input.
"""

import argparse
import json
import sys
from pathlib import Path

from . import io
from .amalgam import AmalgamationInstance, superamalgamate, verify_supap
from .bao import FiniteBao, Morphism
from .campaigns import run_campaign
from .errors import BaodeError, ParseError
from .frames import Frame, FrameMorphism, atom_structure, complex_algebra, dual_morphism, insep, is_zigzag_product
from .schema import Schema, check_schema

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(BaodeError):
    pass


class Context:
    def __init__(self, args):
        self.args = args
        self.ws = io.Workspace()
        for d in args.workspace or []:
            self.ws.load_dir(d)

    def get(self, ref, *types):
        obj = self.ws.resolve(ref)
        if types and not isinstance(obj, types):
            want = " or ".join(t.__name__ for t in types)
            raise InputError(f"{ref!r} is a {type(obj).__name__}, expected {want}")
        self._check_size(ref, obj)
        return obj

    def _check_size(self, ref, obj):
        cap = self.args.max_atoms
        if cap is None:
            return
        sizes = []
        if isinstance(obj, FiniteBao):
            sizes = [obj.n]
        elif isinstance(obj, Frame):
            sizes = [obj.n]
        elif isinstance(obj, (Morphism, FrameMorphism)):
            sizes = [obj.source.n, obj.target.n]
        elif isinstance(obj, AmalgamationInstance):
            sizes = [obj.base.n, obj.left.n, obj.right.n]
        if any(s > cap for s in sizes):
            raise InputError(f"{ref!r} has {max(sizes)} atoms, over --max-atoms {cap}")

    def emit(self, data, filename, summary):
        text = json.dumps(data, indent=1, sort_keys=True) + "\n"
        if self.args.out:
            out = Path(self.args.out)
            out.mkdir(parents=True, exist_ok=True)
            path = out / filename
            path.write_text(text, encoding="utf-8")
            print(summary)
            print(f"wrote {path}")
        else:
            sys.stdout.write(text)
            print(summary, file=sys.stderr)


def _stem(ref):
    return Path(ref).stem if ref.endswith(".json") else ref


def cmd_cm(ctx, args):
    F = ctx.get(args.frame, Frame)
    a = complex_algebra(F, name=_stem(args.frame) + "-cm")
    ctx.emit(io.bao_to_dict(a), f"{_stem(args.frame)}.cm.json", f"complex algebra: {a.n} atoms, {a.dim} dimensions")
    return EXIT_OK


def cmd_at(ctx, args):
    a = ctx.get(args.algebra, FiniteBao)
    F = atom_structure(a)
    ctx.emit(io.frame_to_dict(F, _stem(args.algebra) + "-at"), f"{_stem(args.algebra)}.at.json", f"atom structure: {F.n} points")
    return EXIT_OK


def _frame_map(ctx, ref):
    m = ctx.get(ref, Morphism, FrameMorphism)
    return dual_morphism(m) if isinstance(m, Morphism) else m


def cmd_zigzag(ctx, args):
    f = _frame_map(ctx, args.f)
    h = _frame_map(ctx, args.h)
    pb = insep(f, h)
    zz = bool(pb.frame.n) and is_zigzag_product(pb.frame, [f.source, h.source])
    data = io.frame_to_dict(pb.frame, "insep")
    data["checks"] = {"zigzag": zz, "commutes": pb.commutes}
    ok = zz and pb.commutes
    summary = f"INSEP: {pb.frame.n} points; zigzag {'PASS' if zz else 'FAIL'}; commutes {'PASS' if pb.commutes else 'FAIL'}"
    ctx.emit(data, f"{_stem(args.f)}-{_stem(args.h)}.insep.json", summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_amalgamate(ctx, args):
    inst = ctx.get(args.instance, AmalgamationInstance)
    cert = superamalgamate(inst)
    rep = verify_supap(inst, cert)
    data = {
        "kind": "certificate",
        "amalgam": io.bao_to_dict(cert.amalgam),
        "g": [io.atoms_of(v) for v in cert.g.atom_images],
        "k": [io.atoms_of(v) for v in cert.k.atom_images],
        "pullback_labels": [list(p) for p in cert.pullback.frame.labels],
        "construction": cert.report.as_dict(),
        "verification": rep.as_dict(),
        "passed": cert.report.passed and rep.passed,
    }
    summary = "construction:\n" + cert.report.summary() + "\nverification:\n" + rep.summary()
    ctx.emit(data, f"{_stem(args.instance)}.certificate.json", summary)
    return EXIT_OK if data["passed"] else EXIT_FAIL


def cmd_check(ctx, args):
    a = ctx.get(args.algebra, FiniteBao, Frame)
    if isinstance(a, Frame):
        a = complex_algebra(a)
    schema = ctx.get(args.schema, Schema)
    rep = check_schema(a, schema, args.small_dim)
    rows = [
        {"equation": inst.label, "passed": r.valid, "counterexample": r.counterexample, "assignments": r.assignments}
        for inst, r in rep.results
    ]
    lines = [f"{'PASS' if r['passed'] else 'FAIL'} {r['equation']}" + ("" if r["passed"] else f" at {r['counterexample']}") for r in rows]
    data = {"kind": "check-report", "algebra": _stem(args.algebra), "schema": schema.name, "passed": rep.valid, "results": rows}
    ctx.emit(data, f"{_stem(args.algebra)}.check.json", "\n".join(lines))
    return EXIT_OK if rep.valid else EXIT_FAIL


def cmd_property(ctx, args):
    campaign = ctx.get(args.campaign)
    if not isinstance(campaign, dict) or campaign.get("kind") != "campaign":
        raise InputError(f"{args.campaign!r} is not a campaign")
    report = run_campaign(campaign, args.seed, args.verify_all_rho, args.max_atoms)
    lines = [
        f"{'PASS' if r['passed'] else 'FAIL'} {r['property']}: {r['trials']} trials, {r['failure_count']} failures"
        for r in report["results"]
    ]
    ctx.emit(report, f"{report['campaign']}.report.json", "\n".join(lines))
    return EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {
    "cm": (cmd_cm, "complex algebra of a frame", [("frame", "frame name or file")]),
    "at": (cmd_at, "atom structure of an algebra", [("algebra", "algebra name or file")]),
    "zigzag": (cmd_zigzag, "INSEP pullback of two maps into a common frame", [("f", "first map"), ("h", "second map")]),
    "amalgamate": (cmd_amalgamate, "superamalgam with a verified certificate", [("instance", "instance name or file")]),
    "check": (cmd_check, "check an algebra (or a frame's complex algebra) against a schema", [("algebra", "algebra or frame"), ("schema", "schema")]),
    "property": (cmd_property, "run a randomized property campaign", [("campaign", "campaign name or file")]),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="directory for result files")
    common.add_argument("--seed", type=int, default=0, help="campaign seed (default 0)")
    common.add_argument("--verify-all-rho", action="store_true", help="check every admissible rho and presentation")
    common.add_argument("--max-atoms", type=int, help="reject inputs and cap generated structures above this size")
    common.add_argument("-w", "--workspace", action="append", help="directory of named JSON artifacts")
    p = argparse.ArgumentParser(prog="baode", description="Finite Boolean algebras with operators: duality, amalgams, dilations.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_, pos) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, parents=[common])
        for arg, h in pos:
            sp.add_argument(arg, help=h)
        if name == "check":
            sp.add_argument("--small-dim", type=int, help="small dimension for schema parameters")
    return p


def _report_error(exc):
    print(f"error: {exc}", file=sys.stderr)
    if isinstance(exc, ParseError) and exc.source is not None and exc.position is not None:
        src = exc.source
        start = src.rfind("\n", 0, exc.position) + 1
        end = src.find("\n", exc.position)
        line = src[start : end if end >= 0 else len(src)]
        print("  " + line, file=sys.stderr)
        print("  " + " " * (exc.position - start) + "^", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        ctx = Context(args)
        return COMMANDS[args.command][0](ctx, args)
    except (BaodeError, OSError, ValueError) as exc:
        _report_error(exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
