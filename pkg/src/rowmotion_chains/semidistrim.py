"""Pairings, Galois graphs, edge labels and semidistrim verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .errors import LabelNotUnique, LimitExceeded, NotBijective, NotSemidistrim
from .lattice import Lattice, interval, irreducibles

SEMIDISTRIM_LIMIT = 200

Pairing = dict  # join-irreducible index -> meet-irreducible index


def pairings(L: Lattice, limit: Optional[int] = None) -> list[Pairing]:
    """Bijections kappa: J -> M with kappa(j) ^ j = j_* and kappa(j) v j = kappa(j)^*.

    Stops after ``limit`` pairings when given (``limit=2`` decides uniqueness).
    """
    irr = irreducibles(L)
    joins, meets = irr.joins, irr.meets
    if len(joins) != len(meets):
        return []
    cands = {
        j: [m for m in meets if L.meet[m][j] == j_low and L.join[m][j] == meets[m]]
        for j, j_low in joins.items()
    }
    order = sorted(joins, key=lambda j: (len(cands[j]), j))
    found: list[Pairing] = []
    used: set[int] = set()
    current: dict[int, int] = {}

    def rec(k):
        if limit is not None and len(found) >= limit:
            return
        if k == len(order):
            found.append({j: current[j] for j in sorted(current)})
            return
        j = order[k]
        for m in cands[j]:
            if m not in used:
                used.add(m)
                current[j] = m
                rec(k + 1)
                del current[j]
                used.discard(m)

    rec(0)
    return found


def unique_pairing(L: Lattice) -> Optional[Pairing]:
    found = pairings(L, limit=2)
    return found[0] if len(found) == 1 else None


@dataclass(frozen=True)
class GaloisGraph:
    vertices: tuple[int, ...]
    arrows: frozenset  # of (j, j') with j != j'

    def has_arrow(self, j: int, k: int) -> bool:
        return (j, k) in self.arrows

    def is_independent(self, S) -> bool:
        S = list(S)
        return not any((a, b) in self.arrows for a in S for b in S)

    @cached_property
    def independent_sets(self) -> tuple[frozenset, ...]:
        verts = self.vertices
        blocked = {v: {w for w in verts if (v, w) in self.arrows or (w, v) in self.arrows}
                   for v in verts}
        out = []

        def rec(i, chosen, forbidden):
            if i == len(verts):
                out.append(frozenset(chosen))
                return
            rec(i + 1, chosen, forbidden)
            v = verts[i]
            if v not in forbidden:
                chosen.append(v)
                rec(i + 1, chosen, forbidden | blocked[v])
                chosen.pop()

        rec(0, [], frozenset())
        return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))


def galois_graph(L: Lattice, kappa: Pairing) -> GaloisGraph:
    """Arrow j -> j' exactly when j is not below kappa(j')."""
    verts = tuple(sorted(kappa))
    arrows = frozenset((j, k) for j in verts for k in verts
                       if j != k and not L.leq(j, kappa[k]))
    return GaloisGraph(verts, arrows)


def independence_number(G: GaloisGraph) -> int:
    return max(len(s) for s in G.independent_sets)


def max_down_degree(L: Lattice) -> int:
    return max(L.ddeg(u) for u in range(L.n))


@dataclass(frozen=True)
class EdgeLabeling:
    labels: dict          # (u, v) cover -> join-irreducible j_uv
    down: tuple           # w -> frozenset of labels of covers u <. w
    up: tuple             # w -> frozenset of labels of covers w <. v


def edge_labels(L: Lattice, kappa: Pairing) -> EdgeLabeling:
    """Label each cover u <. v by the unique j with j <= v and kappa(j) >= u."""
    labels = {}
    down = [set() for _ in range(L.n)]
    up = [set() for _ in range(L.n)]
    for u, v in L.poset.covers:
        hits = [j for j, m in kappa.items() if L.leq(j, v) and L.leq(u, m)]
        if len(hits) != 1:
            raise LabelNotUnique(
                f"cover {L.label(u)} <. {L.label(v)} has {len(hits)} candidate labels",
                u=L.label(u), v=L.label(v), candidates=[L.label(j) for j in hits])
        labels[(u, v)] = hits[0]
        down[v].add(hits[0])
        up[u].add(hits[0])
    return EdgeLabeling(labels, tuple(map(frozenset, down)), tuple(map(frozenset, up)))


def rowmotion_map(L: Lattice, labeling: EdgeLabeling, graph: GaloisGraph | None = None) -> tuple:
    """Row = U^{-1} o D as a permutation of element indices."""
    D, U = labeling.down, labeling.up
    if len(set(D)) != L.n or len(set(U)) != L.n or set(D) != set(U):
        raise NotBijective("downward/upward label sets are not bijective onto a common family")
    if graph is not None and set(D) != set(graph.independent_sets):
        raise NotBijective("label sets do not biject onto the independent sets of the Galois graph")
    inverse_up = {s: w for w, s in enumerate(U)}
    return tuple(inverse_up[D[w]] for w in range(L.n))


def rowmotion(L: Lattice, labeling: EdgeLabeling, w: int, graph: GaloisGraph | None = None) -> int:
    return rowmotion_map(L, labeling, graph)[w]


def prime_pairs(L: Lattice) -> list[tuple[int, int]]:
    """Pairs (j0, m0) with L = [j0, top] disjoint union [bottom, m0]."""
    irr = irreducibles(L)
    full = L.poset.full
    out = []
    for j in irr.joins:
        for m in irr.meets:
            a, b = L.poset.up[j], L.poset.down[m]
            if a & b == 0 and a | b == full:
                out.append((j, m))
    return out


@dataclass
class Verdict:
    ok: bool
    reason: Optional[str] = None
    certificate: Optional[dict] = None

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"semidistrim": self.ok, "reason": self.reason, "certificate": self.certificate}


@dataclass
class _Dismantler:
    memo: dict = field(default_factory=dict)

    def run(self, L: Lattice):
        """Return (certificate, kappa) for a compatibly dismantlable L, else (None, kappa|None)."""
        key = frozenset(L.root_indices)
        if key not in self.memo:
            self.memo[key] = self._compute(L)
        return self.memo[key]

    def _compute(self, L: Lattice):
        kappa = unique_pairing(L)
        if kappa is None:
            return None, None
        if L.n == 1:
            return {"leaf": L.label(0)}, kappa
        up_mask, down_mask = L.poset.up, L.poset.down
        for j0, m0 in prime_pairs(L):
            upper = interval(L, j0, L.top)
            cert_u, kappa_u = self.run(upper)
            if cert_u is None or not _alpha_ok(L, kappa, j0, upper, kappa_u, up_mask):
                continue
            lower = interval(L, L.bottom, m0)
            cert_l, kappa_l = self.run(lower)
            if cert_l is None or not _beta_ok(L, kappa, m0, lower, kappa_l, down_mask):
                continue
            cert = {"pair": [L.label(j0), L.label(m0)], "upper": cert_u, "lower": cert_l}
            return cert, kappa
        return None, kappa


def _alpha_ok(L, kappa, j0, upper, kappa_u, up_mask) -> bool:
    # alpha(j) = j0 v j on M_L(j0) must biject onto J_[j0,1] and commute with kappa.
    to_local = {x: i for i, x in enumerate(upper.embedding)}
    domain = [j for j in kappa if up_mask[j0] >> kappa[j] & 1]
    image = [to_local[L.join[j0][j]] for j in domain]
    if len(set(image)) != len(image) or set(image) != set(kappa_u):
        return False
    return all(upper.embedding[kappa_u[a]] == kappa[j] for j, a in zip(domain, image))


def _beta_ok(L, kappa, m0, lower, kappa_l, down_mask) -> bool:
    # beta(m) = m0 ^ m on kappa(J_L(m0)) must biject onto M_[0,m0] and commute with kappa.
    to_local = {x: i for i, x in enumerate(lower.embedding)}
    js = [j for j in kappa if down_mask[m0] >> j & 1]
    domain = [kappa[j] for j in js]
    image = [to_local[L.meet[m0][m]] for m in domain]
    if len(set(image)) != len(image) or set(image) != set(kappa_l.values()):
        return False
    return all(image[k] == kappa_l[to_local[j]] for k, j in enumerate(js))


def is_semidistrim(L: Lattice, limit: int = SEMIDISTRIM_LIMIT) -> Verdict:
    """Decide semidistrim-ness; on success the certificate is the dismantling tree."""
    if L.n > limit:
        raise LimitExceeded(f"semidistrim check limited to {limit} elements, got {L.n}",
                            limit=limit, size=L.n)
    found = pairings(L, limit=2)
    if not found:
        return Verdict(False, "no pairing")
    if len(found) > 1:
        return Verdict(False, "pairing not unique")
    cert, kappa = _Dismantler().run(L)
    if cert is None:
        return Verdict(False, "not compatibly dismantlable")
    try:
        labeling = edge_labels(L, kappa)
    except LabelNotUnique as exc:
        return Verdict(False, f"edge label not unique: {exc}")
    G = galois_graph(L, kappa)
    for w in range(L.n):
        if not G.is_independent(labeling.down[w]):
            return Verdict(False, f"downward label set of {L.label(w)} is not independent")
        if not G.is_independent(labeling.up[w]):
            return Verdict(False, f"upward label set of {L.label(w)} is not independent")
    return Verdict(True, None, cert)


class SemidistrimStructure:
    """Everything the rowmotion chain of a semidistrim lattice needs, checked once."""

    def __init__(self, L: Lattice, verify: bool = True):
        if verify:
            verdict = is_semidistrim(L)
            if not verdict:
                raise NotSemidistrim(f"lattice is not semidistrim: {verdict.reason}",
                                     reason=verdict.reason)
            self.verdict = verdict
        else:
            self.verdict = None
        kappa = unique_pairing(L)
        if kappa is None:
            raise NotSemidistrim("lattice is not uniquely paired")
        self.lattice = L
        self.kappa = kappa
        self.graph = galois_graph(L, kappa)
        self.labeling = edge_labels(L, kappa)
        self.row = rowmotion_map(L, self.labeling, self.graph)

    @property
    def join_irreducibles(self) -> list[int]:
        return sorted(self.kappa)

    def down(self, w: int) -> frozenset:
        return self.labeling.down[w]

    def up(self, w: int) -> frozenset:
        return self.labeling.up[w]
