"""Command-line front end.

Every subcommand reads JSON (``--input`` file, or stdin when a document is
required and no file is given) and writes JSON or a plain table.  Exit
status: 0 on success, 1 on a domain error (the error code is printed on
stderr, for example ``trace-minus-two``), 2 on malformed input.

Randomness comes from numpy's PCG64 generator seeded through
``numpy.random.SeedSequence(--seed)``; suites split that sequence per
criterion and per trial, so output depends only on the arguments.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import jsonio
from .characters import chi, commutator, commute, dchi_surjective, kappa
from .classify import NF_TOL, classify_minus, normal_form
from .errors import DomainError
from .jsonio import MalformedInput
from .path_connect import DEFAULT_BUDGET, MAX_STEP, Status, connect, verify_path
from .rep_variety import (
    ACCEPT_TOL, NODE_TOL, canonical_rep, census, relator, sample_component, sw,
)
from .square_map import fiber, fiber_sample, q, sqrt_plus, trace
from .suite import run_suite

SCHEMAS = """\
input schemas:
  Mat2             [[[re, im], [re, im]], [[re, im], [re, im]]]   (row-major)
  ExtIsom          {"m": Mat2, "eps": 1 | -1}
  Representation   {"genus": k, "gens": [ExtIsom, ...]}
  classify         Mat2, or ExtIsom (eps = -1 also reports the isometry type)
  square           ExtIsom
  sqrt, fiber      Mat2
  chi              {"a": Mat2, "b": Mat2}
  rep check|sw     Representation
  connect          {"start": Representation, "end": Representation}
  verify-path      PathResult as written by connect
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n{SCHEMAS}")
        sys.exit(2)


def _bits(text: str) -> tuple:
    if not text or any(c not in "01" for c in text):
        raise argparse.ArgumentTypeError("w1 is a string of 0/1 digits, e.g. 101")
    return tuple(int(c) for c in text)


def _read_input(args):
    path = getattr(args, "input", None)
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise MalformedInput(f"cannot read {path}: {err.strerror}") from None
    return jsonio.parse(text)


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(args.seed))


def _sw_doc(inv) -> dict:
    return jsonio.sw_to_json(inv)


# -- subcommands: each returns (document, exit code) ---------------------------

def cmd_classify(args):
    doc = _read_input(args)
    minus_type = None
    if isinstance(doc, dict):
        a = jsonio.ext_from_json(doc)
        m = a.m
        if a.eps == -1:
            minus_type = classify_minus(a, args.tol).value
    else:
        m = jsonio.mat_from_json(doc)
    nf = normal_form(m, args.tol)
    return {
        "kind": nf.kind.value,
        "lambda": None if nf.lam is None else jsonio.complex_to_json(nf.lam),
        "conjugator": jsonio.mat_to_json(nf.conjugator),
        "minus_type": minus_type,
    }, 0


def cmd_square(args):
    a = jsonio.ext_from_json(_read_input(args))
    b = q(a)
    return {"q": jsonio.mat_to_json(b), "trace": jsonio.complex_to_json(trace(b))}, 0


def cmd_sqrt(args):
    b = jsonio.mat_from_json(_read_input(args))
    return jsonio.ext_to_json(sqrt_plus(b, args.tol)), 0


def cmd_fiber(args):
    b = jsonio.mat_from_json(_read_input(args))
    f = fiber(b, args.tol)
    doc = {
        "case": f.case.value,
        "dim": f.dim,
        "params": dict(f.params),
        "conjugator": jsonio.mat_to_json(f.conjugator),
    }
    if args.samples:
        doc["samples"] = [jsonio.ext_to_json(a) for a in fiber_sample(f, args.samples, _rng(args))]
    return doc, 0


def cmd_chi(args):
    doc = _read_input(args)
    if not isinstance(doc, dict) or "a" not in doc or "b" not in doc:
        raise MalformedInput('chi expects {"a": Mat2, "b": Mat2}')
    a, b = jsonio.mat_from_json(doc["a"]), jsonio.mat_from_json(doc["b"])
    t = chi(a, b)
    return {
        "x": jsonio.complex_to_json(t.x),
        "y": jsonio.complex_to_json(t.y),
        "z": jsonio.complex_to_json(t.z),
        "kappa": jsonio.complex_to_json(kappa(t)),
        "commutator_trace": jsonio.complex_to_json(trace(commutator(a, b))),
        "commute": commute(a, b),
        "dchi_surjective": dchi_surjective(a, b),
    }, 0


def cmd_rep(args):
    if args.action == "new":
        if len(args.w1) != args.genus:
            raise MalformedInput("w1 must have one digit per generator")
        return jsonio.rep_to_json(canonical_rep(args.genus, args.w1, args.w2)), 0
    if args.action == "sample":
        if len(args.w1) != args.genus:
            raise MalformedInput("w1 must have one digit per generator")
        rep = sample_component(args.genus, args.w1, args.w2, _rng(args), steps=args.steps)
        return jsonio.rep_to_json(rep), 0
    rep = jsonio.rep_from_json(_read_input(args))
    if args.action == "check":
        res, lift = relator(rep)
        return {"relator_residual": res, "lifted_product": jsonio.mat_to_json(lift),
                "ok": res <= args.tol}, 0 if res <= args.tol else 1
    return _sw_doc(sw(rep, args.tol)), 0


def cmd_census(args):
    rows = [{"w1": "".join(map(str, w1)), "w2": w2, "rep": jsonio.rep_to_json(rep)}
            for w1, w2, rep in census(args.genus)]
    return {"genus": args.genus, "count": len(rows), "rows": rows}, 0


def cmd_connect(args):
    doc = _read_input(args)
    if not isinstance(doc, dict):
        raise MalformedInput('connect expects {"start": Representation, "end": Representation}')
    r0 = jsonio.rep_from_json(jsonio._field(doc, "start"))
    r1 = jsonio.rep_from_json(jsonio._field(doc, "end"))
    res = connect(r0, r1, budget=args.budget, rng=_rng(args))
    return jsonio.path_to_json(res, args.thin), 0 if res.status is Status.CONNECTED else 1


def cmd_verify_path(args):
    res, thin = jsonio.path_from_json(_read_input(args))
    # thinned files cannot certify the step bound; everything else is re-checked
    max_step = MAX_STEP if thin == 1 else float("inf")
    report = verify_path(res.nodes, tol=args.tol, max_step=max_step)
    doc = {"ok": report.ok, "reasons": report.reasons, "nodes": len(res.nodes),
           "step_check": thin == 1, "recorded_status": res.status.value}
    return doc, 0 if report.ok else 1


def cmd_suite(args):
    results = run_suite(args.seed, args.criteria, args.scale)
    doc = {
        "seed": args.seed,
        "scale": args.scale,
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                      "detail": r.detail} for r in results],
    }
    return doc, 0 if doc["passed"] else 1


# -- table output --------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return jsonio.emit(v, indent=0).replace("\n", "")
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def to_table(command: str, doc: dict) -> str:
    if command == "census":
        lines = ["w1\tw2"] + [f"{r['w1']}\t{r['w2']}" for r in doc["rows"]]
    elif command == "suite":
        lines = [f"criterion {c['number']} ({c['title']}): {'PASS' if c['passed'] else 'FAIL'}"
                 for c in doc["criteria"]]
    else:
        lines = [f"{k}\t{_cell(v)}" for k, v in doc.items()]
    return "\n".join(lines) + "\n"


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="numerical tolerance")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="connect step budget")
    common.add_argument("--output", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "table"), default="json")

    with_input = argparse.ArgumentParser(add_help=False, parents=[common])
    with_input.add_argument("--input", default="-", help="input JSON file (default stdin)")

    p = _Parser(prog="isomh3", description=__doc__.splitlines()[0], epilog=SCHEMAS,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, tol in (("classify", cmd_classify, NF_TOL), ("square", cmd_square, None),
                          ("sqrt", cmd_sqrt, 1e-9), ("fiber", cmd_fiber, 1e-8),
                          ("chi", cmd_chi, None)):
        sp = sub.add_parser(name, parents=[with_input])
        sp.set_defaults(func=fn, default_tol=tol)
        if name == "fiber":
            sp.add_argument("--samples", type=int, default=0, help="number of fiber samples")

    sp = sub.add_parser("rep", parents=[with_input])
    sp.add_argument("action", choices=("new", "check", "sw", "sample"))
    sp.add_argument("--genus", type=int, default=None)
    sp.add_argument("--w1", type=_bits, default=None)
    sp.add_argument("--w2", type=int, choices=(0, 1), default=0)
    sp.add_argument("--steps", type=int, default=10)
    sp.set_defaults(func=cmd_rep, default_tol=ACCEPT_TOL)

    sp = sub.add_parser("census", parents=[common])
    sp.add_argument("--genus", type=int, required=True)
    sp.set_defaults(func=cmd_census, default_tol=None)

    sp = sub.add_parser("connect", parents=[with_input])
    sp.add_argument("--thin", type=int, default=1, help="keep every m-th node")
    sp.set_defaults(func=cmd_connect, default_tol=None)

    sp = sub.add_parser("verify-path", parents=[with_input])
    sp.set_defaults(func=cmd_verify_path, default_tol=NODE_TOL)

    sp = sub.add_parser("suite", parents=[common])
    sp.add_argument("--criteria", type=int, nargs="*", choices=range(1, 9), default=None)
    sp.add_argument("--scale", type=float, default=1.0, help="trial count multiplier")
    sp.set_defaults(func=cmd_suite, default_tol=None)
    return p


def _validate(args, parser):
    if args.command == "rep" and args.action in ("new", "sample"):
        if args.genus is None or args.w1 is None:
            parser.error("rep new/sample need --genus and --w1")
    if getattr(args, "genus", None) is not None and args.genus < 1:
        parser.error("--genus must be at least 1")
    if getattr(args, "thin", 1) < 1:
        parser.error("--thin must be positive")
    if args.seed < 0:
        parser.error("--seed must be non-negative")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(args, parser)
    if args.tol is None:
        args.tol = args.default_tol if args.default_tol is not None else NF_TOL
    try:
        doc, code = args.func(args)
    except MalformedInput as err:
        sys.stderr.write(f"error: malformed-input: {err}\n\n{SCHEMAS}")
        return 2
    except DomainError as err:
        sys.stderr.write(f"error: {err.code}: {err}\n")
        return 1
    text = to_table(args.command, doc) if args.format == "table" else jsonio.emit(doc)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
