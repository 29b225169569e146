"""Verification suites: each check is an exact or bound-based assertion over a batch."""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .boolean import (BooleanChainSpec, cutoff_lower, cutoff_upper, exact_tv_curve,
                      l2_bound, lower_applies, moment_check, upper_applies, verify_spectrum,
                      worst_start_tv)
from .chains import (hexx_stationary_kappa_form, hexx_transition_table, ideal_lattice_probs,
                     row_permutation_distributive, rowmotion_chain_distributive,
                     rowmotion_chain_semidistrim, stationary_closed_form)
from .errors import RowchainError
from .lattice import hexx, ideal_lattice, interval, m3, raised_m3
from .markov import (communicating_classes, coupling_bound, is_irreducible, mixing_time,
                     refined_coupling_bound, stationary)
from .poset import all_posets, antichains, bits, width
from .probability import format_scalar, random_assignment
from .semidistrim import SemidistrimStructure, independence_number, is_semidistrim
from .toggle import build_toggle_chain, hypercube_connected, ideal_family, random_family


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "check": self.name, "ok": self.ok,
                "detail": self.detail}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Tally:
    """Counts cases and keeps the first few failures as witnesses."""

    def __init__(self, keep: int = 5):
        self.cases = 0
        self.failures: list = []
        self.failed = 0
        self.keep = keep

    def record(self, ok: bool, witness=None):
        self.cases += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < self.keep:
                self.failures.append(witness)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.cases > 0

    def detail(self, **extra) -> dict:
        out = {"cases": self.cases, "failed": self.failed}
        if self.failures:
            out["witnesses"] = self.failures
        out.update(extra)
        return out


def _timed(suite: str, name: str, body: Callable[[], tuple[bool, dict]]) -> Check:
    start = time.perf_counter()
    try:
        ok, detail = body()
    except RowchainError as exc:
        ok, detail = False, exc.to_json()
    return Check(suite, name, ok, detail, time.perf_counter() - start)


def _fmt_probs(probs: dict) -> dict:
    return {k: format_scalar(v) for k, v in probs.items()}


def _connected_family(rng: random.Random, max_n: int):
    while True:
        n = rng.randint(1, max_n)
        K = random_family(n, rng, rng.uniform(0.3, 0.9))
        if hypercube_connected(K)[0]:
            return K


# -- toggle --------------------------------------------------------------------------

def toggle_stationary(rng: random.Random, instances: int = 200, max_n: int = 5):
    tally = _Tally()
    for _ in range(instances):
        K = _connected_family(rng, max_n)
        order = list(range(K.n))
        rng.shuffle(order)
        probs = random_assignment(K.ground, rng)
        T = build_toggle_chain(K, order, probs)
        pi = stationary(T)
        closed = stationary_closed_form("toggle", K, probs)
        tally.record(pi.values == closed.values,
                     {"family": K.to_dict(), "order": order, "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


def toggle_irreducibility(rng: random.Random, families: int = 500, max_n: int = 5):
    tally = _Tally()
    connected = 0
    for _ in range(families):
        n = rng.randint(1, max_n)
        K = random_family(n, rng, rng.uniform(0.2, 0.9))
        conn = hypercube_connected(K)[0]
        connected += conn
        order = list(range(n))
        rng.shuffle(order)
        T = build_toggle_chain(K, order, random_assignment(K.ground, rng))
        tally.record(is_irreducible(T) == conn, {"family": K.to_dict(), "connected": conn})
    return tally.ok, tally.detail(connected=connected)


# -- distributive ------------------------------------------------------------------

def distributive_stationary(rng: random.Random, max_n: int = 5, vectors: int = 10):
    tally = _Tally()
    for n in range(1, max_n + 1):
        for P in all_posets(n):
            for _ in range(vectors):
                probs = random_assignment(P.elements, rng)
                M = rowmotion_chain_distributive(P, probs).chain
                closed = stationary_closed_form("distributive", P, probs)
                tally.record(stationary(M).values == closed.values,
                             {"poset": P.to_dict(), "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


def _permutation_matches(chain, perm) -> bool:
    return all(chain.matrix[i, j] == (1 if perm[i] == j else 0)
               for i in range(chain.n) for j in range(chain.n))


def cross_construction(rng: random.Random, max_n: int = 4, vectors: int = 3):
    """Direct formula = toggles along a linear extension = semidistrim chain of J(P)."""
    tally = _Tally()
    for n in range(1, max_n + 1):
        for P in all_posets(n):
            K = ideal_family(P)
            L = ideal_lattice(P)
            S = SemidistrimStructure(L)
            assignments = [random_assignment(P.elements, rng) for _ in range(vectors)]
            assignments.append({x: Fraction(1) for x in P.elements})
            for probs in assignments:
                M = rowmotion_chain_distributive(P, probs).chain
                T = build_toggle_chain(K, P.linear_extension(), probs)
                R = rowmotion_chain_semidistrim(L, ideal_lattice_probs(L, probs), structure=S).chain
                ok = M.same_matrix(T) and M.same_matrix(R)
                if all(v == 1 for v in probs.values()):
                    perm = row_permutation_distributive(P)
                    ok = ok and _permutation_matches(M, perm) and tuple(perm) == S.row
                tally.record(ok, {"poset": P.to_dict(), "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


# -- hexx ------------------------------------------------------------------------

def _hexx_labels(a: int, b: int) -> list[str]:
    return [f"x{i}" for i in range(1, a + 1)] + [f"y{i}" for i in range(1, b + 1)]


def hexx_closed_form(rng: random.Random, max_ab: int = 4, vectors: int = 20):
    tally = _Tally()
    for a in range(1, max_ab + 1):
        for b in range(1, max_ab + 1):
            S = SemidistrimStructure(hexx(a, b))
            for _ in range(vectors):
                probs = random_assignment(_hexx_labels(a, b), rng)
                M = rowmotion_chain_semidistrim(S.lattice, probs, structure=S).chain
                pi = stationary(M).values
                closed = stationary_closed_form("hexx", (a, b), probs).values
                kform = hexx_stationary_kappa_form(a, b, probs, structure=S).values
                tally.record(pi == closed == kform,
                             {"a": a, "b": b, "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


def hexx_table(rng: random.Random, shapes=((2, 1), (3, 2)), vectors: int = 5):
    tally = _Tally()
    for a, b in shapes:
        S = SemidistrimStructure(hexx(a, b))
        for _ in range(vectors):
            probs = random_assignment(_hexx_labels(a, b), rng)
            M = rowmotion_chain_semidistrim(S.lattice, probs, structure=S).chain
            table = hexx_transition_table(a, b, probs)
            ok = all(M.matrix[i, j] == table.get((u, v), 0)
                     for i, u in enumerate(M.states) for j, v in enumerate(M.states))
            tally.record(ok, {"a": a, "b": b, "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


# -- semidistrim ------------------------------------------------------------------

def semidistrim_corpus(max_ab: int = 4, max_n: int = 5):
    out = [(f"hexx({a},{b})", hexx(a, b))
           for a in range(1, max_ab + 1) for b in range(1, max_ab + 1)]
    for n in range(1, max_n + 1):
        for k, P in enumerate(all_posets(n)):
            out.append((f"J(P{n}.{k})", ideal_lattice(P)))
    return out


def semidistrim_irreducibility(rng: random.Random, intervals: int = 50, vectors: int = 5):
    tally = _Tally()
    corpus = semidistrim_corpus()
    pool = list(corpus)
    for _ in range(intervals):
        name, L = rng.choice(corpus)
        u = rng.randrange(L.n)
        above = [v for v in range(L.n) if L.leq(u, v)]
        v = rng.choice(above)
        pool.append((f"{name}[{L.label(u)},{L.label(v)}]", interval(L, u, v)))
    for name, L in pool:
        verdict = is_semidistrim(L)
        if not verdict:
            tally.record(False, {"lattice": name, "reason": verdict.reason})
            continue
        S = SemidistrimStructure(L, verify=False)
        labels = [L.label(j) for j in S.join_irreducibles]
        for _ in range(vectors):
            probs = random_assignment(labels, rng)
            M = rowmotion_chain_semidistrim(L, probs, structure=S).chain
            meet = rowmotion_chain_semidistrim(L, probs, method="meet", structure=S).chain
            tally.record(len(communicating_classes(M)) == 1 and M.same_matrix(meet),
                         {"lattice": name, "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail(lattices=len(pool))


def semidistrim_negatives():
    """Lattices that must be rejected, with the expected reason."""
    expected = [("M3", m3(), "pairing not unique"), ("raised M3", raised_m3(), "pairing not unique")]
    tally = _Tally()
    for name, L, reason in expected:
        verdict = is_semidistrim(L)
        tally.record(not verdict and verdict.reason == reason,
                     {"lattice": name, "reason": verdict.reason})
    return tally.ok, tally.detail()


# -- mixing -------------------------------------------------------------------------

EPS = Fraction(1, 4)
MIXING_PS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def _bound_case(M, eps, p_max, size, probs, family, tally, witness):
    t = mixing_time(M, eps)
    plain = coupling_bound(eps, p_max, size)
    refined = refined_coupling_bound(eps, probs, family)
    tally.record(t <= refined <= plain, dict(witness, t_mix=t, bound=plain, refined=refined))


def mixing_bounds(rng: random.Random, max_n: int = 4, max_ab: int = 3, random_vectors: int = 1):
    tally = _Tally()
    eps = EPS
    for n in range(1, max_n + 1):
        for P in all_posets(n):
            w = width(P)
            family = [[P.elements[i] for i in bits(A)] for A in antichains(P)]
            cases = [{x: p for x in P.elements} for p in MIXING_PS]
            cases += [{x: rng.choice(MIXING_PS) for x in P.elements} for _ in range(random_vectors)]
            for probs in cases:
                M = rowmotion_chain_distributive(P, probs).chain
                _bound_case(M, eps, max(probs.values()), w, probs, family, tally,
                            {"poset": P.to_dict(), "probs": _fmt_probs(probs)})
    for a in range(1, max_ab + 1):
        for b in range(1, max_ab + 1):
            S = SemidistrimStructure(hexx(a, b))
            L = S.lattice
            alpha = independence_number(S.graph)
            family = [[L.label(j) for j in sorted(I)] for I in S.graph.independent_sets]
            labels = [L.label(j) for j in S.join_irreducibles]
            cases = [{x: p for x in labels} for p in MIXING_PS]
            cases += [{x: rng.choice(MIXING_PS) for x in labels} for _ in range(random_vectors)]
            for probs in cases:
                M = rowmotion_chain_semidistrim(L, probs, structure=S).chain
                _bound_case(M, eps, max(probs.values()), alpha, probs, family, tally,
                            {"a": a, "b": b, "probs": _fmt_probs(probs)})
    return tally.ok, tally.detail()


# -- Boolean chain -------------------------------------------------------------------

SPECTRAL_PS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def spectrum(max_n: int = 8, ps=SPECTRAL_PS):
    tally = _Tally()
    for n in range(1, max_n + 1):
        for p in ps:
            try:
                verify_spectrum(BooleanChainSpec(n, p))
                tally.record(True)
            except RowchainError as exc:
                tally.record(False, {"n": n, "p": format_scalar(p), "error": exc.to_json()})
    return tally.ok, tally.detail()


def moments(ns=(2, 4, 16, 64), ps=(Fraction(1, 4), Fraction(1, 2)), t_max: int = 20):
    tally = _Tally()
    for n in ns:
        for p in ps:
            try:
                moment_check(BooleanChainSpec(n, p), t_max)
                tally.record(True)
            except RowchainError as exc:
                tally.record(False, {"n": n, "p": format_scalar(p), "error": exc.to_json()})
    return tally.ok, tally.detail()


def l2_chain(max_n: int = 10, ps=SPECTRAL_PS, t_max: int = 20):
    tally = _Tally()
    for n in range(1, max_n + 1):
        for p in ps:
            spec = BooleanChainSpec(n, p)
            for start, size in (("empty", 0), ("full", n)):
                for t, tv in exact_tv_curve(spec, t_max, start):
                    tally.record(4 * tv * tv <= l2_bound(spec, t, size),
                                 {"n": n, "p": format_scalar(p), "t": t, "start": start})
    return tally.ok, tally.detail()


def lumping(max_n: int = 10, ps=(Fraction(1, 4), Fraction(1, 2)), t_max: int = 30):
    tally = _Tally()
    for n in range(1, max_n + 1):
        for p in ps:
            spec = BooleanChainSpec(n, p)
            for start in ("empty", "full"):
                lumped = exact_tv_curve(spec, t_max, start, "lumped")
                full = exact_tv_curve(spec, t_max, start, "full")
                oracle = exact_tv_curve(spec, t_max, start, "product")
                tally.record(lumped == full == oracle,
                             {"n": n, "p": format_scalar(p), "start": start})
    return tally.ok, tally.detail()


UPPER_TARGET = 0.0899
LOWER_TARGET = 0.90625


def sandwich(n: int, p=Fraction(1, 2), worst_start_limit: int = 64, extra: int = 6):
    """Exact TV against both cutoff bounds along the curve, plus the two fixed points.

    Returns (ok, detail, rows); rows carry the data for the CSV export.
    """
    spec = BooleanChainSpec(n, p)
    ls = spec.log_scale
    t_max = math.ceil(ls) + extra
    from_empty = exact_tv_curve(spec, t_max, "empty")
    from_full = exact_tv_curve(spec, t_max, "full")
    tally = _Tally()
    rows = []
    for (t, tv), (_, tv_full) in zip(from_empty, from_full):
        upper = cutoff_upper(spec, t - ls) if upper_applies(spec, t) else None
        lower = cutoff_lower(spec, ls - t) if lower_applies(spec, t) else None
        if upper is not None:
            worst = max(tv, tv_full)
            if n <= worst_start_limit:
                worst = max(worst, worst_start_tv(spec, t))
            tally.record(worst <= upper, {"t": t, "tv": float(worst), "upper": upper})
        if lower is not None:
            tally.record(tv >= lower, {"t": t, "tv": float(tv), "lower": lower})
        rows.append({"n": n, "p": p, "t": t, "tv_exact": tv, "upper_bound": upper,
                     "lower_bound": lower, "c": t - ls})
    points = {}
    if float(ls).is_integer():
        hi, lo = int(ls) + 3, int(ls) - 3
        points["tv_plus3"] = float(from_empty[hi][1])
        tally.record(from_empty[hi][1] <= UPPER_TARGET, {"t": hi, "tv": points["tv_plus3"]})
        if lo >= 0:
            points["tv_minus3"] = float(from_empty[lo][1])
            tally.record(from_empty[lo][1] >= LOWER_TARGET, {"t": lo, "tv": points["tv_minus3"]})
    return tally.ok, tally.detail(n=n, p=format_scalar(p), **points), rows


# -- suites --------------------------------------------------------------------------

def _run(suite: str, name: str, fn, *args, **kw) -> Check:
    return _timed(suite, name, lambda: fn(*args, **kw))


def suite_toggle(seed: int) -> Iterator[Check]:
    yield _run("toggle", "stationary-product-formula", toggle_stationary, random.Random(seed))
    yield _run("toggle", "irreducible-iff-connected", toggle_irreducibility, random.Random(seed + 1))


def suite_distributive(seed: int) -> Iterator[Check]:
    yield _run("distributive", "stationary-closed-form", distributive_stationary, random.Random(seed))
    yield _run("distributive", "cross-construction", cross_construction, random.Random(seed + 1))


def suite_hexx(seed: int) -> Iterator[Check]:
    yield _run("hexx", "stationary-closed-form", hexx_closed_form, random.Random(seed))
    yield _run("hexx", "transition-table", hexx_table, random.Random(seed + 1))


def suite_semidistrim(seed: int) -> Iterator[Check]:
    yield _run("semidistrim", "irreducible", semidistrim_irreducibility, random.Random(seed))
    yield _run("semidistrim", "rejections", semidistrim_negatives)


def suite_mixing(seed: int) -> Iterator[Check]:
    yield _run("mixing", "coupling-bounds", mixing_bounds, random.Random(seed))


def suite_spectral(seed: int) -> Iterator[Check]:
    yield _run("spectral", "eigenbasis", spectrum)
    yield _run("spectral", "moments", moments)
    yield _run("spectral", "l2-bound", l2_chain)


def suite_cutoff(seed: int, ns=(64, 256, 1024), p=Fraction(1, 2)) -> Iterator[Check]:
    for n in ns:
        yield _timed("cutoff", f"sandwich-n{n}", lambda n=n: sandwich(n, p)[:2])
    yield _run("cutoff", "lumping", lumping)


SUITES = {
    "toggle": suite_toggle,
    "distributive": suite_distributive,
    "hexx": suite_hexx,
    "semidistrim": suite_semidistrim,
    "mixing": suite_mixing,
    "spectral": suite_spectral,
    "cutoff": suite_cutoff,
}


def run_suite(name: str, seed: int = 0) -> Iterator[Check]:
    if name == "all":
        for key in SUITES:
            yield from SUITES[key](seed)
        return
    if name not in SUITES:
        raise KeyError(name)
    yield from SUITES[name](seed)

