"""Command-line front end: ``rowchain <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .boolean import BooleanChainSpec, cutoff_rows
from .chains import (ideal_lattice_probs, rowmotion_chain_distributive,
                     rowmotion_chain_semidistrim, stationary_closed_form)
from .errors import InvalidInput, InvalidProbability, RowchainError
from .lattice import hexx, ideal_lattice, lattice_from_dict
from .markov import (chain_from_dict, communicating_classes, coupling_bound,
                     empirical_distribution, mixing_time, refined_coupling_bound,
                     simulate, simulate_replicas, stationary, tv_distance)
from .poset import antichains, bits, generate, order_ideals, poset_from_dict, width
from .probability import format_scalar, parse_probability
from .semidistrim import SemidistrimStructure, independence_number, is_semidistrim
from .toggle import (build_toggle_chain, family_from_dict, graph_from_dict, ideal_family,
                     independent_sets_family, interval_closed_family, order_from_labels)
from .verify import SUITES, run_suite, sandwich


class _Warnings:
    def __init__(self):
        self.decimal = False

    def note_decimal(self):
        if not self.decimal:
            print("warning: decimal probabilities given; using the float backend",
                  file=sys.stderr)
        self.decimal = True


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc.msg}", path=str(path)) from None


def _probability(text, warn: _Warnings):
    value = parse_probability(text)
    if isinstance(value, float):
        warn.note_decimal()
    return value


def parse_probs(text: str, warn: _Warnings, aliases: dict | None = None):
    """``1/2`` (uniform) or ``x=1/2,y=1/3`` (per element)."""
    if text is None:
        raise InvalidInput("a probability assignment (--p) is required")
    if "=" not in text:
        return _probability(text, warn)
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise InvalidProbability(f"cannot parse assignment {part!r}")
        key, value = (s.strip() for s in part.split("=", 1))
        if aliases:
            key = aliases.get(key, key)
        out[key] = _probability(value, warn)
    return out


def _hexx_aliases(a: int, b: int) -> dict:
    alias = {f"q{i}": f"x{i}" for i in range(1, a + 1)}
    alias.update({f"r{i}": f"y{i}" for i in range(1, b + 1)})
    return alias


def _parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInput(f"expected 'a,b', got {text!r}") from None
    return a, b


def _parse_eps(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"cannot parse number {text!r}") from None


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_backend(args, chain):
    return chain.to_float() if args.backend == "float" else chain


# -- poset ---------------------------------------------------------------------------

def cmd_poset(args, warn):
    if args.action == "generate":
        P = generate(args.kind, args.n, args.seed)
        return _emit(args, P.to_json() + "\n")
    if args.action == "info":
        P = poset_from_dict(_read_json(args.file))
        ideals = order_ideals(P)
        info = {"elements": list(P.elements), "n": P.n,
                "covers": P.to_dict()["covers"], "width": width(P),
                "antichains": sum(1 for _ in antichains(P)), "order_ideals": len(ideals),
                "linear_extension": [P.elements[i] for i in P.linear_extension()]}
        return _emit(args, json.dumps(info, sort_keys=True) + "\n")
    if args.action == "ideals":
        P = poset_from_dict(_read_json(args.file))
        return _emit(args, "".join(P.format_subset(I) + "\n" for I in order_ideals(P)))
    if args.action == "semidistrim":
        L = _load_lattice(args)
        verdict = is_semidistrim(L)
        out = {"semidistrim": verdict.ok, "reason": verdict.reason, "size": L.n}
        if args.certificate and verdict.certificate is not None:
            out["certificate"] = verdict.certificate
        _emit(args, json.dumps(out, sort_keys=True) + "\n")
        return 0 if verdict.ok else 1
    raise InvalidInput(f"unknown poset action {args.action!r}")


def _load_lattice(args):
    if getattr(args, "hexx", None):
        return hexx(*_parse_pair(args.hexx))
    if getattr(args, "lattice", None):
        return lattice_from_dict(_read_json(args.lattice))
    if getattr(args, "file", None):
        return lattice_from_dict(_read_json(args.file))
    if getattr(args, "poset", None):
        return ideal_lattice(poset_from_dict(_read_json(args.poset)))
    raise InvalidInput("a lattice is required (--hexx, --lattice or --poset)")


# -- build ---------------------------------------------------------------------------

def _build_family(args):
    kind = args.family
    if kind == "ideals":
        if not args.poset:
            raise InvalidInput("--family ideals needs --poset")
        return ideal_family(poset_from_dict(_read_json(args.poset)))
    if kind == "indsets":
        if not args.graph:
            raise InvalidInput("--family indsets needs --graph")
        vertices, edges = graph_from_dict(_read_json(args.graph))
        return independent_sets_family(vertices, edges)
    if kind == "convex":
        if not args.poset:
            raise InvalidInput("--family convex needs --poset")
        return interval_closed_family(poset_from_dict(_read_json(args.poset)))
    if kind == "file":
        if not args.family_file:
            raise InvalidInput("--family file needs --family-file")
        return family_from_dict(_read_json(args.family_file))
    raise InvalidInput(f"unknown family {kind!r}")


def build_chain(args, warn):
    if args.kind == "ideal":
        if not args.poset:
            raise InvalidInput("--kind ideal needs --poset")
        P = poset_from_dict(_read_json(args.poset))
        return rowmotion_chain_distributive(P, parse_probs(args.p, warn)).chain
    if args.kind == "semidistrim":
        if args.hexx:
            a, b = _parse_pair(args.hexx)
            probs = parse_probs(args.p, warn, _hexx_aliases(a, b))
            chain = rowmotion_chain_semidistrim(hexx(a, b), probs, method=args.method).chain
            chain.meta["hexx"] = [a, b]
            return chain
        if args.poset and not args.lattice:
            L = ideal_lattice(poset_from_dict(_read_json(args.poset)))
            probs = ideal_lattice_probs(L, parse_probs(args.p, warn))
            return rowmotion_chain_semidistrim(L, probs, method=args.method).chain
        L = _load_lattice(args)
        return rowmotion_chain_semidistrim(L, parse_probs(args.p, warn), method=args.method).chain
    if args.kind == "toggle":
        K = _build_family(args)
        order = order_from_labels(K, args.order.split(",")) if args.order else list(range(K.n))
        probs = parse_probs(args.p, warn)
        chain = build_toggle_chain(K, order, probs)
        if isinstance(probs, dict):
            chain.meta["probs"] = {x: format_scalar(probs[x]) for x in K.ground}
        else:
            chain.meta["probs"] = {x: format_scalar(probs) for x in K.ground}
        return chain
    raise InvalidInput(f"unknown chain kind {args.kind!r}")


def cmd_build(args, warn):
    chain = _apply_backend(args, build_chain(args, warn))
    _emit(args, chain.to_json() + "\n")


# -- analyze ------------------------------------------------------------------------

def _meta_probs(meta) -> dict:
    return {k: parse_probability(v) for k, v in meta.get("probs", {}).items()}


def closed_form_for(chain):
    """Closed-form stationary distribution when the provenance admits one, else None."""
    meta = chain.meta
    kind = meta.get("kind")
    probs = _meta_probs(meta)
    if kind == "ideal":
        return stationary_closed_form("distributive", poset_from_dict(meta["poset"]), probs)
    if kind == "toggle":
        return stationary_closed_form("toggle", family_from_dict(meta["family"]), probs)
    if kind == "semidistrim" and "hexx" in meta:
        return stationary_closed_form("hexx", tuple(meta["hexx"]), probs)
    return None


def _matches(pi, closed, exact: bool) -> bool:
    if closed is None or set(pi.states) != set(closed.states):
        return False
    want = closed.as_dict()
    if exact:
        return all(v == want[s] for s, v in zip(pi.states, pi.values))
    return all(math.isclose(float(v), float(want[s]), rel_tol=1e-9, abs_tol=1e-12)
               for s, v in zip(pi.states, pi.values))


def _stationary_report(chain) -> str:
    pi = stationary(chain)
    values = ", ".join(format_scalar(v) for v in pi.values)
    try:
        closed = closed_form_for(chain)
    except RowchainError as exc:
        return f"{values}; closed-form: N/A ({exc})", pi
    if closed is None:
        return f"{values}; closed-form: N/A", pi
    verdict = "MATCH" if _matches(pi, closed, chain.backend == "rational") else "MISMATCH"
    return f"{values}; closed-form: {verdict}", pi


def _bound_inputs(chain):
    """(size, family of label lists) for the coupling bounds, or None."""
    meta = chain.meta
    if meta.get("kind") == "ideal":
        P = poset_from_dict(meta["poset"])
        family = [[P.elements[i] for i in bits(A)] for A in antichains(P)]
        return width(P), family
    if meta.get("kind") == "semidistrim":
        S = SemidistrimStructure(lattice_from_dict(meta["lattice"]))
        L = S.lattice
        family = [[L.label(j) for j in sorted(I)] for I in S.graph.independent_sets]
        return independence_number(S.graph), family
    return None


def _mixing_report(chain, eps) -> str:
    t = mixing_time(chain, eps)
    parts = [f"t_mix={t}"]
    inputs = _bound_inputs(chain)
    probs = _meta_probs(chain.meta)
    if inputs is None or not probs or not all(0 < v < 1 for v in probs.values()):
        parts.append("bound=N/A")
        return ", ".join(parts)
    size, family = inputs
    plain = coupling_bound(eps, max(probs.values()), size)
    refined = refined_coupling_bound(eps, probs, family)
    parts += [f"bound={plain}", f"refined={refined}",
              f"t_mix <= bound: {'OK' if t <= plain and t <= refined else 'FAIL'}"]
    return ", ".join(parts)


def cmd_analyze(args, warn):
    chain = _apply_backend(args, chain_from_dict(_read_json(args.chain)))
    if args.what == "stationary":
        line, pi = _stationary_report(chain)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(pi.to_csv())
        sys.stdout.write(line + "\n")
        return 0 if "MISMATCH" not in line else 1
    if args.what == "mixing":
        eps = _parse_eps(args.eps)
        line = _mixing_report(chain, eps)
        _emit(args, line + "\n")
        return 1 if "FAIL" in line else 0
    if args.what == "classes":
        classes = [[chain.states[i] for i in c] for c in communicating_classes(chain)]
        out = {"classes": classes, "count": len(classes), "irreducible": len(classes) == 1}
        _emit(args, json.dumps(out, sort_keys=True) + "\n")
        return 0
    raise InvalidInput(f"unknown analysis {args.what!r}")


# -- verify / cutoff ------------------------------------------------------------------

def _csv_rows(rows, exact: bool) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "p", "t", "tv_exact", "upper_bound", "lower_bound", "c"])
    for r in rows:
        tv = format_scalar(r["tv_exact"]) if exact else repr(float(r["tv_exact"]))
        w.writerow([r["n"], format_scalar(r["p"]), r["t"], tv,
                    "" if r["upper_bound"] is None else repr(r["upper_bound"]),
                    "" if r["lower_bound"] is None else repr(r["lower_bound"]),
                    repr(float(r["c"]))])
    return buf.getvalue()


def cmd_verify(args, warn):
    if args.suite == "cutoff" and args.n is not None:
        p = _probability(args.p or "1/2", warn)
        ok, detail, rows = sandwich(args.n, p)
        text = _csv_rows(rows, exact=False)
        text += json.dumps({"suite": "cutoff", "check": f"sandwich-n{args.n}", "ok": ok,
                            "detail": detail}, sort_keys=True) + "\n"
        _emit(args, text)
        return 0 if ok else 1
    lines = []
    all_ok = True
    for check in run_suite(args.suite, args.seed if args.seed is not None else 0):
        all_ok &= check.ok
        line = check.to_json()
        lines.append(line)
        if not args.out:
            print(line, flush=True)
    if args.out:
        _emit(args, "".join(line + "\n" for line in lines))
    return 0 if all_ok else 1


def cmd_cutoff_curve(args, warn):
    p = _probability(args.p, warn)
    spec = BooleanChainSpec(args.n, p)
    t_max = args.t_max if args.t_max is not None else math.ceil(spec.log_scale) + 6
    rows = cutoff_rows(spec, t_max, args.start, args.mode)
    _emit(args, _csv_rows(rows, args.exact))


# -- simulate ------------------------------------------------------------------------

def cmd_simulate(args, warn):
    if args.seed is None:
        raise InvalidInput("simulate needs --seed")
    chain = chain_from_dict(_read_json(args.chain)).to_float()
    start = chain.index.get(args.start, None) if args.start is not None else 0
    if start is None:
        raise InvalidInput(f"unknown start state {args.start!r}", state=args.start)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.replicas <= 1:
        path = simulate(chain, start, args.steps, args.seed)
        w.writerow(["step", "state"])
        for t, x in enumerate(path):
            w.writerow([t, chain.states[x]])
        return _emit(args, buf.getvalue())
    finals = simulate_replicas(chain, start, args.steps, args.replicas, args.seed)
    emp = empirical_distribution(chain, finals)
    w.writerow(["state", "probability"])
    for s, v in zip(emp.states, emp.values):
        w.writerow([s, repr(v)])
    text = buf.getvalue()
    if len(communicating_classes(chain)) == 1:
        tv = tv_distance(np.array(emp.values), np.array(stationary(chain).values))
        text += f"# tv_to_stationary={float(tv)!r}\n"
    _emit(args, text)


# -- parser --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are reported as JSON like every other failure."""

    def error(self, message):
        print(json.dumps({"error": "usage", "message": message}, sort_keys=True), file=sys.stderr)
        self.exit(2)


def _globals(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--backend", choices=["rational", "float"], default=d(None),
                        help="scalar backend (default: rational unless decimals are given)")
    parser.add_argument("--seed", type=int, default=d(None))
    parser.add_argument("--out", default=d(None), help="write the result here instead of stdout")
    parser.add_argument("--eps", default=d("1/4"), help="mixing threshold (default 1/4)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rowchain", description="Random rowmotion Markov chains, exactly.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("poset", help="generate or inspect posets and lattices")
    _globals(ps, suppress=True)
    pact = ps.add_subparsers(dest="action", required=True, parser_class=_Parser)
    g = pact.add_parser("generate")
    _globals(g, suppress=True)
    g.add_argument("--kind", choices=["chain", "antichain", "random"], required=True)
    g.add_argument("--n", type=int, required=True)
    for name in ("info", "ideals"):
        a = pact.add_parser(name)
        _globals(a, suppress=True)
        a.add_argument("file")
    s = pact.add_parser("semidistrim", help="decide whether a lattice is semidistrim")
    _globals(s, suppress=True)
    s.add_argument("file", nargs="?")
    s.add_argument("--hexx")
    s.add_argument("--poset", help="use the lattice of order ideals of this poset")
    s.add_argument("--certificate", action="store_true", help="include the dismantling tree")

    b = sub.add_parser("build", help="build a chain and write its JSON")
    _globals(b, suppress=True)
    b.add_argument("--kind", choices=["ideal", "semidistrim", "toggle"], required=True)
    b.add_argument("--poset")
    b.add_argument("--lattice")
    b.add_argument("--hexx", help="a,b for hexx(a,b)")
    b.add_argument("--family", choices=["ideals", "indsets", "convex", "file"], default="ideals")
    b.add_argument("--graph")
    b.add_argument("--family-file")
    b.add_argument("--order", help="comma-separated toggle order")
    b.add_argument("--p", help="1/2 or x=1/2,y=1/3")
    b.add_argument("--method", choices=["formula", "meet"], default="formula")

    an = sub.add_parser("analyze", help="stationary distribution, mixing time or classes")
    _globals(an, suppress=True)
    an.add_argument("what", choices=["stationary", "mixing", "classes"])
    an.add_argument("chain")

    v = sub.add_parser("verify", help="run a verification suite")
    _globals(v, suppress=True)
    v.add_argument("suite", choices=["all", *SUITES])
    v.add_argument("--n", type=int)
    v.add_argument("--p")

    c = sub.add_parser("cutoff-curve", help="exact TV curve of the Boolean chain with bounds")
    _globals(c, suppress=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", required=True)
    c.add_argument("--t-max", type=int)
    c.add_argument("--start", choices=["empty", "full"], default="empty")
    c.add_argument("--mode", choices=["lumped", "full", "product"], default="lumped")
    c.add_argument("--exact", action="store_true", help="print TV as a fraction")

    sm = sub.add_parser("simulate", help="seeded Monte Carlo trajectories")
    _globals(sm, suppress=True)
    sm.add_argument("chain")
    sm.add_argument("--start")
    sm.add_argument("--steps", type=int, default=10)
    sm.add_argument("--replicas", type=int, default=1)
    return parser


COMMANDS = {
    "poset": cmd_poset,
    "build": cmd_build,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "cutoff-curve": cmd_cutoff_curve,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    warn = _Warnings()
    try:
        code = COMMANDS[args.command](args, warn)
    except RowchainError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io_error", "message": str(exc)}, sort_keys=True),
              file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
