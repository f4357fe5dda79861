"""``cohn <session-file> <command> [args] [--json out.json]``.

Exit status: 0 on success, 1 when ``eq`` or ``check-witness`` returns a false
verdict, 2 on any input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .addcat import Matrix
from .coeff import DomainError, PreconditionError, Unsupported
from .complexes import BoundedComplex, ChainMap, cone
from .equality import (FactorizationWitness, Inapplicable, NotFoundWithinCap, check_factorization,
                       check_malcolmson, decide_equal_oracle, factorization_failures,
                       fraction_oracle_map, malcolmson_from_factorization, search_equal)
from .localization import LocTriple, evaluate_functor, triple_add, triple_compose, triple_dsum
from .session import Session, SessionError, evaluate, expr_zigzag, parse_expr, parse_session
from .triangular import TriangularCert, check_factor, factor_elementary, factor_product
from .weights import heart_hom, negativity_check, weak_weight_decompose, weight_decompose, weight_range

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# JSON encoders


def mat_json(m: Matrix) -> list[list[str]]:
    return m.to_lists()


def cert_json(sess: Session, c: TriangularCert) -> dict:
    return {
        "diagonal": [sess.sset.name(v) if k == "S" else f"id{v}" for k, v in c.diagonal],
        "below": {f"{k},{l}": mat_json(m) for (k, l), m in sorted(c.below.items())},
    }


def cx_json(C: BoundedComplex) -> dict:
    return {
        "ranks": {str(n): r for n, r in C.ranks.items()},
        "d": {str(n): mat_json(m) for n, m in C.diffs.items()},
    }


def map_json(f: ChainMap) -> dict:
    return {str(n): mat_json(m) for n, m in sorted(f.comps.items())}


def oracle_value(t: LocTriple):
    F = fraction_oracle_map(t.sset)
    if isinstance(F, Inapplicable):
        return None
    return mat_json(evaluate_functor(t, F))


def triple_json(sess: Session, t: LocTriple) -> dict:
    return {
        "source": t.source,
        "target": t.target,
        "g": mat_json(t.g),
        "s": mat_json(t.s),
        "i": mat_json(t.i),
        "canonical_i": t.canonical_i,
        "certificate": cert_json(sess, t.cert),
        "certificate_verified": t.cert.certifies(t.s),
        "fraction_value": oracle_value(t),
    }


def fwitness_json(sess: Session, w: FactorizationWitness) -> dict:
    out = {k: mat_json(m) for k, m in w.blocks().items()}
    out.update({"Z": w.Z, "Zp": w.Zp, "T1": w.T1, "T2": w.T2,
                "k1_certificate": cert_json(sess, w.k1_cert),
                "k2_certificate": cert_json(sess, w.k2_cert)})
    return out


def render_matrix(m: Matrix) -> str:
    if m.nrows == 0 or m.ncols == 0:
        return f"[] ({m.nrows}x{m.ncols})"
    return "[" + ", ".join("[" + ", ".join(r) + "]" for r in m.to_lists()) + "]"


# --------------------------------------------------------------------------
# commands


def _triple(sess: Session, text: str) -> LocTriple:
    try:
        return evaluate(sess, text)
    except SessionError as e:
        raise InputError(f"expression {text!r}: {e}") from e


def _need(table: dict, name: str, what: str):
    if name not in table:
        raise InputError(f"unknown {what} {name!r}")
    return table[name]


def cmd_normalize(sess, args):
    t = _triple(sess, args.args[0])
    text = [f"g = {render_matrix(t.g)}", f"s = {render_matrix(t.s)}", f"i = {render_matrix(t.i)}",
            "certificate: " + ", ".join(cert_json(sess, t.cert)["diagonal"])]
    return {"expression": args.args[0]}, {"triple": triple_json(sess, t)}, [], text, EXIT_OK


def _binary(op):
    def run(sess, args):
        if len(args.args) != 2:
            raise InputError("expected two expressions")
        a, b = (_triple(sess, x) for x in args.args)
        try:
            t = op(a, b)
        except DomainError as e:
            raise InputError(str(e)) from e
        text = [f"g = {render_matrix(t.g)}", f"s = {render_matrix(t.s)}", f"i = {render_matrix(t.i)}"]
        return {"left": args.args[0], "right": args.args[1]}, {"triple": triple_json(sess, t)}, [], text, EXIT_OK
    return run


def cmd_eq(sess, args):
    if len(args.args) != 2:
        raise InputError("eq needs two expressions")
    t1, t2 = (_triple(sess, x) for x in args.args)
    if (t1.source, t1.target) != (t2.source, t2.target):
        raise InputError("expressions have different source or target")
    inputs = {"left": args.args[0], "right": args.args[1], "mode": args.mode}
    witnesses = []
    if args.mode == "oracle":
        v = decide_equal_oracle(t1, t2)
        if isinstance(v, Inapplicable):
            return inputs, {"verdict": "inapplicable", "reason": v.reason}, [], [f"inapplicable: {v.reason}"], EXIT_OK
        return inputs, {"verdict": v}, [], [f"equal: {str(v).lower()}"], EXIT_OK if v else EXIT_FALSE
    if args.mode == "witness":
        if not args.witness:
            raise InputError("--mode witness needs --witness NAME")
        inputs["witness"] = args.witness
        w = _need(sess.witnesses, args.witness, "witness")
        ok = check_factorization(t1, t2, w)
        return inputs, {"verdict": ok}, [], [f"witness verifies: {str(ok).lower()}"], EXIT_OK if ok else EXIT_FALSE
    # search
    inputs["cap"] = args.cap
    try:
        r = search_equal(t1, t2, cap=args.cap)
    except Unsupported as e:
        return inputs, {"verdict": "unsupported", "reason": str(e)}, [], [f"unsupported: {e}"], EXIT_OK
    if isinstance(r, NotFoundWithinCap):
        res = {"verdict": "not-found-within-cap", "candidates": r.candidates}
        return inputs, res, [], [f"no witness within cap {args.cap} ({r.candidates} candidates)"], EXIT_OK
    if not check_factorization(t1, t2, r):
        raise AssertionError("search returned an unverified witness")
    mw = malcolmson_from_factorization(t1, t2, r)
    witnesses.append({"kind": "factorization", "verified": True, "blocks": fwitness_json(sess, r)})
    witnesses.append({"kind": "malcolmson", "verified": check_malcolmson(t1, t2, mw),
                      "blocks": {k: mat_json(m) for k, m in mw.blocks().items()}})
    text = [f"equal: true (witness with Z={r.Z} Z'={r.Zp} T1={r.T1} T2={r.T2})"]
    return inputs, {"verdict": True}, witnesses, text, EXIT_OK


def cmd_check_witness(sess, args):
    if len(args.args) != 3:
        raise InputError("check-witness needs WITNESS LEFT RIGHT")
    w = _need(sess.witnesses, args.args[0], "witness")
    t1, t2 = (_triple(sess, x) for x in args.args[1:])
    try:
        fails = factorization_failures(t1, t2, w)
    except DomainError as e:
        fails = [f"shape: {e}"]
    inputs = {"witness": args.args[0], "left": args.args[1], "right": args.args[2]}
    res = {"verdict": not fails, "failing": fails}
    witnesses = []
    if not fails:
        mw = malcolmson_from_factorization(t1, t2, w)
        res["malcolmson_verified"] = check_malcolmson(t1, t2, mw)
        witnesses.append({"kind": "factorization", "verified": True, "blocks": fwitness_json(sess, w)})
    text = ["verdict: true"] if not fails else ["verdict: false"] + [f"  fails: {f}" for f in fails]
    return inputs, res, witnesses, text, EXIT_OK if not fails else EXIT_FALSE


def cmd_factor(sess, args):
    c = _need(sess.certs, args.args[0], "certificate")
    try:
        fs = factor_elementary(c)
    except PreconditionError as e:
        raise InputError(str(e)) from e
    prod = factor_product(fs, sess.ring, c.assembled.ncols)
    ok = prod == c.assembled and all(check_factor(f, sess.sset) for f in fs)
    factors = [{"kind": f.kind, "matrix": mat_json(f.matrix),
                "inverse": None if f.inverse is None else mat_json(f.inverse)} for f in fs]
    text = [f"{f.kind}: {render_matrix(f.matrix)}" for f in fs] + [f"product = {render_matrix(prod)}",
                                                                    f"verified: {str(ok).lower()}"]
    res = {"factors": factors, "product": mat_json(prod), "assembled": mat_json(c.assembled), "verified": ok}
    return {"certificate": args.args[0]}, res, [], text, EXIT_OK


def cmd_cone(sess, args):
    f = _need(sess.matrices, args.args[0], "matrix")
    R = sess.ring
    src, tgt = BoundedComplex.single(R, f.ncols), BoundedComplex.single(R, f.nrows)
    K = cone(ChainMap(src, tgt, {0: f}))
    return {"matrix": args.args[0]}, {"cone": cx_json(K.complex)}, [], [repr(K.complex)], EXIT_OK


def cmd_wdecomp(sess, args):
    name = args.args[0]
    if args.weak:
        T = _need(sess.towers, name, "tower")
        w = weak_weight_decompose(T)
        res = {"X": cx_json(w.X.total), "Y": cx_json(w.Y.total), "X_shifts": w.X.shifts,
               "Y_shifts": w.Y.shifts, "connecting": map_json(w.connecting), "verified": w.verify()}
        return {"tower": name, "weak": True}, res, [], [f"X shifts {w.X.shifts}, Y shifts {w.Y.shifts}"], EXIT_OK
    C = _need(sess.complexes, name, "complex")
    n = int(args.args[1]) if len(args.args) > 1 else 0
    w = weight_decompose(C, n)
    t = w.truncation
    res = {"X": cx_json(t.X), "Y": cx_json(t.Y), "connecting": map_json(t.connecting),
           "cone_to_Y": map_json(t.cone_to_y), "Y_to_cone": map_json(t.y_to_cone),
           "cone_homotopy": {str(k): mat_json(m) for k, m in sorted(t.cone_homotopy.comps.items())},
           "verified": w.verify()}
    return {"complex": name, "n": n}, res, [], [f"X = {t.X!r}", f"Y = {t.Y!r}"], EXIT_OK


def cmd_wrange(sess, args):
    C = _need(sess.complexes, args.args[0], "complex")
    try:
        r = weight_range(C)
    except Unsupported as e:
        return {"complex": args.args[0]}, {"range": "unsupported", "reason": str(e)}, [], [str(e)], EXIT_OK
    text = ["empty"] if r.empty else [f"weights [{r.lo}, {r.hi}]"]
    return {"complex": args.args[0]}, {"range": r.as_json()}, [], text, EXIT_OK


def cmd_heart(sess, args):
    if len(args.args) < 3:
        raise InputError("heart needs SOURCE_RANK TARGET_RANK PROBE...")
    src, tgt = int(args.args[0]), int(args.args[1])
    probes = []
    for text in args.args[2:]:
        try:
            z = expr_zigzag(sess, parse_expr(text))
        except SessionError as e:
            raise InputError(f"probe {text!r}: {e}") from e
        if z is None:
            raise InputError(f"probe {text!r} is not a product of matrices and inverses")
        probes.append(z)
    try:
        rep = heart_hom(sess.sset, src, tgt, probes)
    except DomainError as e:
        raise InputError(str(e)) from e
    res = {"mode": rep.mode, "classes": rep.classes,
           "representatives": [triple_json(sess, t) for t in rep.representatives]}
    if rep.inapplicable_reason:
        res["reason"] = rep.inapplicable_reason
    return {"source": src, "target": tgt, "probes": args.args[2:]}, res, [], [f"{len(rep.classes)} classes: {rep.classes}"], EXIT_OK


def cmd_negativity(sess, args):
    objs = [_need(sess.complexes, n, "complex") for n in args.args]
    shifts = [int(x) for x in args.shifts.split(",")]
    try:
        rep = negativity_check(objs, shifts)
    except Unsupported as e:
        return {"complexes": args.args, "shifts": shifts}, {"negative": "unsupported", "reason": str(e)}, [], [str(e)], EXIT_OK
    viol = [{"source": args.args[v.source], "target": args.args[v.target], "shift": v.shift,
             "chain_map": map_json(v.chain_map)} for v in rep.violations]
    res = {"negative": rep.negative, "pairs_checked": rep.pairs_checked, "violations": viol}
    return {"complexes": args.args, "shifts": shifts}, res, [], [f"negative: {str(rep.negative).lower()}"], EXIT_OK


COMMANDS = {
    "normalize": cmd_normalize,
    "compose": _binary(triple_compose),
    "add": _binary(triple_add),
    "dsum": _binary(triple_dsum),
    "eq": cmd_eq,
    "factor": cmd_factor,
    "cone": cmd_cone,
    "wdecomp": cmd_wdecomp,
    "wrange": cmd_wrange,
    "heart": cmd_heart,
    "negativity": cmd_negativity,
    "check-witness": cmd_check_witness,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohn", description="Exact computations in additive localizations.")
    p.add_argument("session", help="session file")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("args", nargs="*", help="command arguments")
    p.add_argument("--json", dest="json_out", help="write the JSON report here")
    p.add_argument("--mode", choices=["oracle", "witness", "search"], default="oracle")
    p.add_argument("--witness", help="witness name for --mode witness")
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--weak", action="store_true", help="wdecomp on a tower")
    p.add_argument("--shifts", default="1", help="comma-separated shifts for negativity")
    return p


def run(argv: Sequence[str]) -> tuple[int, dict | None, list[str]]:
    args = build_parser().parse_args(argv)
    try:
        with open(args.session, encoding="utf-8") as fh:
            sess = parse_session(fh.read())
    except OSError as e:
        return EXIT_INPUT, None, [f"error: {e}"]
    except SessionError as e:
        return EXIT_INPUT, None, [f"error: {args.session}: {e}"]
    start = time.perf_counter()
    try:
        if not args.args:
            raise InputError(f"{args.command} needs arguments")
        inputs, result, witnesses, text, code = COMMANDS[args.command](sess, args)
    except (InputError, DomainError, ValueError) as e:
        return EXIT_INPUT, None, [f"error: {e}"]
    report = {
        "command": args.command,
        "inputs": inputs,
        "result": result,
        "witnesses": witnesses,
        "timing": {"seconds": round(time.perf_counter() - start, 6)},
    }
    return code, report, text


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report, text = run(argv)
    for line in text:
        print(line, file=sys.stderr if report is None else sys.stdout)
    if report is not None:
        args = build_parser().parse_args(argv)
        if args.json_out:
            with open(args.json_out, "w", encoding="utf-8") as fh:
                fh.write(dump_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
