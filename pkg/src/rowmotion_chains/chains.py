"""Rowmotion Markov chains on J(P) and on semidistrim lattices, with closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InvalidInput, InvalidProbability
from .lattice import Lattice, hexx
from .markov import Distribution, MarkovChain
from .poset import Poset, bits, extremal, order_ideals, submasks
from .probability import format_scalar, probability_vector
from .semidistrim import SemidistrimStructure
from .toggle import SetFamily


@dataclass(frozen=True)
class RowmotionChain:
    chain: MarkovChain
    provenance: tuple     # state index -> ideal mask (distributive) or lattice element index
    probs: dict           # label -> probability

    @property
    def matrix(self):
        return self.chain.matrix

    @property
    def states(self):
        return self.chain.states


def _scalars(values):
    exact = all(isinstance(v, (Fraction, int)) for v in values)
    return (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)


def _meta_probs(labels, values) -> dict:
    return {x: format_scalar(v) for x, v in zip(labels, values)}


def rowmotion_chain_distributive(P: Poset, probs) -> RowmotionChain:
    """M_{J(P)} from the direct transition formula.

    P(I -> I') = prod_{min(P - I')} p * prod_{max(I) - min(P - I')} (1 - p)
    when min(P - I') is contained in max(I), and 0 otherwise.
    """
    p = probability_vector(P.elements, probs)
    one, zero = _scalars(p)
    ideals = order_ideals(P)
    tops = [extremal(P, I, "max") for I in ideals]
    bottoms = [extremal(P, P.full & ~I, "min") for I in ideals]
    rows = []
    for mx in tops:
        row = []
        for mn in bottoms:
            if mn & ~mx:
                row.append(zero)
                continue
            w = one
            for x in bits(mn):
                w *= p[x]
            for x in bits(mx & ~mn):
                w *= 1 - p[x]
            row.append(w)
        rows.append(row)
    meta = {"kind": "ideal", "poset": P.to_dict(), "probs": _meta_probs(P.elements, p)}
    chain = MarkovChain([P.format_subset(I) for I in ideals], rows, meta)
    return RowmotionChain(chain, tuple(ideals), dict(zip(P.elements, p)))


def row_permutation_distributive(P: Poset) -> list[int]:
    """Row(I) = P - up-closure(max I), as a permutation of ideal positions."""
    ideals = order_ideals(P)
    pos = {m: i for i, m in enumerate(ideals)}
    out = []
    for I in ideals:
        up = 0
        for x in bits(extremal(P, I, "max")):
            up |= P.up[x]
        out.append(pos[P.full & ~up])
    return out


def semidistrim_probability_vector(S: SemidistrimStructure, probs) -> dict:
    """Map ``probs`` (scalar, label mapping or sequence) onto join-irreducible indices."""
    L = S.lattice
    js = S.join_irreducibles
    values = probability_vector([L.label(j) for j in js], probs)
    return dict(zip(js, values))


def ideal_lattice_probs(L: Lattice, probs) -> dict:
    """Translate probabilities on P to the join-irreducibles Delta(x) of J(P)."""
    P = L.ground
    if P is None:
        raise InvalidInput("lattice was not built by ideal_lattice")
    p = probability_vector(P.elements, probs)
    pos = {m: i for i, m in enumerate(L.ideal_masks)}
    return {L.label(pos[P.down[x]]): p[x] for x in range(P.n)}


def rowmotion_chain_semidistrim(L: Lattice, probs, method: str = "formula",
                                structure: Optional[SemidistrimStructure] = None) -> RowmotionChain:
    """M_L for a semidistrim lattice.

    ``method="formula"``: P(u' -> u) = prod_{U(u)} p * prod_{D(u') - U(u)} (1 - p)
    when U(u) is contained in D(u'), else 0.
    ``method="meet"``: sample S within D(u') and move to the meet of kappa(S).
    """
    S = structure or SemidistrimStructure(L)
    p = semidistrim_probability_vector(S, probs)
    one, zero = _scalars(p.values())
    D, U = S.labeling.down, S.labeling.up
    rows = [[zero] * L.n for _ in range(L.n)]
    if method == "formula":
        for src in range(L.n):
            for dst in range(L.n):
                if not U[dst] <= D[src]:
                    continue
                w = one
                for j in U[dst]:
                    w *= p[j]
                for j in D[src] - U[dst]:
                    w *= 1 - p[j]
                rows[src][dst] = w
    elif method == "meet":
        for src in range(L.n):
            labels = sorted(D[src])
            for choice in submasks((1 << len(labels)) - 1):
                chosen = [labels[k] for k in range(len(labels)) if choice >> k & 1]
                w = one
                for k, j in enumerate(labels):
                    w *= p[j] if choice >> k & 1 else 1 - p[j]
                dst = L.meet_all(S.kappa[j] for j in chosen)
                rows[src][dst] += w
    else:
        raise InvalidInput(f"unknown construction method {method!r}")
    meta = {"kind": "semidistrim", "lattice": L.to_dict(),
            "probs": {L.label(j): format_scalar(v) for j, v in p.items()}}
    chain = MarkovChain(list(L.elements), rows, meta)
    return RowmotionChain(chain, tuple(range(L.n)), {L.label(j): v for j, v in p.items()})


# -- closed-form stationary distributions ----------------------------------------------

def _normalize(states, weights) -> Distribution:
    total = sum(weights)
    return Distribution(tuple(states), tuple(w / total for w in weights))


def _inverse_product_weights(members, p):
    out = []
    for A in members:
        w = Fraction(1) if all(isinstance(v, (Fraction, int)) for v in p) else 1.0
        for x in bits(A):
            if p[x] == 0:
                raise InvalidProbability("closed form needs every probability to be positive")
            w /= p[x]
        out.append(w)
    return out


def hexx_stationary(a: int, b: int, probs) -> Distribution:
    """Unnormalized stationary masses of M_hexx(a,b) in the q/r expanded form, normalized.

    q_i = p_{x_i}, r_i = p_{y_i}.
    """
    L = hexx(a, b)
    xs = [f"x{i}" for i in range(1, a + 1)]
    ys = [f"y{i}" for i in range(1, b + 1)]
    values = probability_vector(xs + ys, probs)
    for v in values:
        if not 0 < v < 1:
            raise InvalidProbability("hexx closed form needs probabilities in (0, 1)")
    q = [None, *values[:a]]
    r = [None, *values[a:]]
    one, _ = _scalars(values)

    def prod(seq):
        out = one
        for v in seq:
            out *= v
        return out

    Q = prod(q[1:])
    R = prod(r[1:])
    top = 1 - Q * R
    mu = {"b": q[1] * r[1] * top, "t": top}
    for i in range(1, a + 1):
        tail = prod(q[i + 1:])
        mu[f"x{i}"] = (1 - q[1]) * r[1] * tail + q[1] * (1 - r[1]) * tail * R
    for i in range(1, b + 1):
        tail = prod(r[i + 1:])
        mu[f"y{i}"] = q[1] * (1 - r[1]) * tail + (1 - q[1]) * r[1] * Q * tail
    return _normalize(L.elements, [mu[e] for e in L.elements])


def hexx_stationary_kappa_form(a: int, b: int, probs,
                               structure: Optional[SemidistrimStructure] = None) -> Distribution:
    """The same distribution written through kappa: products over kappa(j) >= z and kappa(j) not < z."""
    S = structure or SemidistrimStructure(hexx(a, b))
    L = S.lattice
    p = semidistrim_probability_vector(S, probs)
    one, _ = _scalars(p.values())
    x1, y1 = L.index["x1"], L.index["y1"]
    everything = one
    for v in p.values():
        everything *= v
    mu = {L.bottom: p[x1] * p[y1] * (1 - everything), L.top: 1 - everything}

    def prod_where(cond):
        out = one
        for j, v in p.items():
            if cond(S.kappa[j]):
                out *= v
        return out

    for z in range(L.n):
        if z in (L.bottom, L.top):
            continue
        ge = prod_where(lambda m: L.leq(z, m))
        not_lt = prod_where(lambda m: not (L.leq(m, z) and m != z))
        first, second = (p[x1], p[y1]) if L.label(z).startswith("x") else (p[y1], p[x1])
        mu[z] = (1 - first) * ge + (1 - second) * not_lt
    return _normalize(L.elements, [mu[z] for z in range(L.n)])


def hexx_transition_table(a: int, b: int, probs) -> dict:
    """Nonzero transition probabilities of M_hexx(a,b), entry by entry, keyed by labels."""
    xs = [f"x{i}" for i in range(1, a + 1)]
    ys = [f"y{i}" for i in range(1, b + 1)]
    values = probability_vector(xs + ys, probs)
    q = [None, *values[:a]]
    r = [None, *values[a:]]
    one, _ = _scalars(values)
    table = {
        ("t", "b"): q[1] * r[1],
        ("t", "t"): (1 - q[1]) * (1 - r[1]),
        ("t", f"x{a}"): (1 - q[1]) * r[1],
        ("t", f"y{b}"): q[1] * (1 - r[1]),
        ("b", "t"): one,
        ("x1", f"y{b}"): q[1],
        ("y1", f"x{a}"): r[1],
    }
    for i in range(1, a):
        table[(f"x{i + 1}", f"x{i}")] = q[i + 1]
    for i in range(1, b):
        table[(f"y{i + 1}", f"y{i}")] = r[i + 1]
    for i in range(1, a + 1):
        table[(f"x{i}", "t")] = 1 - q[i]
    for i in range(1, b + 1):
        table[(f"y{i}", "t")] = 1 - r[i]
    return table


def stationary_closed_form(kind: str, instance, probs) -> Distribution:
    """Closed-form stationary distribution.

    ``kind="distributive"`` takes a Poset, ``"toggle"`` a SetFamily (both give
    weight prod_{x in A} 1/p_x), ``"hexx"`` an ``(a, b)`` pair or hexx lattice.
    """
    if kind == "distributive":
        P: Poset = instance
        p = probability_vector(P.elements, probs)
        ideals = order_ideals(P)
        return _normalize([P.format_subset(I) for I in ideals], _inverse_product_weights(ideals, p))
    if kind == "toggle":
        K: SetFamily = instance
        p = probability_vector(K.ground, probs)
        return _normalize([K.format(A) for A in K.members], _inverse_product_weights(K.members, p))
    if kind == "hexx":
        if isinstance(instance, Lattice):
            a = sum(1 for e in instance.elements if e.startswith("x"))
            b = sum(1 for e in instance.elements if e.startswith("y"))
        else:
            a, b = instance
        return hexx_stationary(a, b, probs)
    raise InvalidInput(f"no closed form for kind {kind!r}")
