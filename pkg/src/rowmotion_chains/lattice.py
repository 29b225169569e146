"""Finite lattices with full meet/join tables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidSize, NotALattice, NotComparable, InvalidInput
from .poset import IDEAL_LIMIT, Poset, antichain, bits, build_poset, order_ideals, poset_from_dict


class Lattice:
    """A finite lattice: a poset plus its meet and join tables.

    ``embedding`` maps the local element indices of a sublattice (interval) to
    indices of ``parent``; ``ideal_masks``/``ground`` are set by
    :func:`ideal_lattice` and record which order ideal each element is.
    """

    def __init__(self, poset: Poset, meet, join, *, parent=None, embedding=None,
                 ground: Poset | None = None, ideal_masks: Sequence[int] | None = None):
        self.poset = poset
        self.n = poset.n
        self.elements = poset.elements
        self.index = poset.index
        self.meet = meet
        self.join = join
        self.bottom = next(i for i in range(self.n) if poset.down[i] == 1 << i)
        self.top = next(i for i in range(self.n) if poset.up[i] == 1 << i)
        self.parent = parent
        self.embedding = tuple(embedding) if embedding is not None else None
        self.ground = ground
        self.ideal_masks = tuple(ideal_masks) if ideal_masks is not None else None
        self.lower_covers = tuple(tuple(poset.lower_covers(v)) for v in range(self.n))
        self.upper_covers = tuple(tuple(poset.upper_covers(v)) for v in range(self.n))

    def leq(self, u: int, v: int) -> bool:
        return self.poset.leq(u, v)

    def meet_all(self, items: Iterable[int]) -> int:
        out = self.top
        for x in items:
            out = self.meet[out][x]
        return out

    def join_all(self, items: Iterable[int]) -> int:
        out = self.bottom
        for x in items:
            out = self.join[out][x]
        return out

    def ddeg(self, u: int) -> int:
        return len(self.lower_covers[u])

    def atoms(self) -> list[int]:
        return list(self.upper_covers[self.bottom])

    @property
    def root_indices(self) -> tuple[int, ...]:
        """Indices of this lattice's elements in the outermost parent."""
        idx = tuple(range(self.n))
        lat = self
        while lat.embedding is not None:
            idx = tuple(lat.embedding[i] for i in idx)
            lat = lat.parent
        return idx

    def label(self, u: int) -> str:
        return self.elements[u]

    def to_dict(self) -> dict:
        d = self.poset.to_dict()
        d["lattice"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        return f"Lattice(n={self.n}, elements={list(self.elements)})"


@dataclass(frozen=True)
class IrreducibleIndex:
    joins: dict   # j -> j_*
    meets: dict   # m -> m^*

    @property
    def join_list(self) -> list[int]:
        return list(self.joins)

    @property
    def meet_list(self) -> list[int]:
        return list(self.meets)


def build_lattice(P: Poset, **extra) -> Lattice:
    """Verify ``P`` is a lattice and tabulate meets and joins."""
    n = P.n
    if n == 0:
        raise NotALattice("the empty poset is not a lattice")
    by_down = {P.down[i]: i for i in range(n)}
    by_up = {P.up[i]: i for i in range(n)}
    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(u, n):
            m = by_down.get(P.down[u] & P.down[v])
            if m is None:
                raise NotALattice(f"{P.elements[u]!r} and {P.elements[v]!r} have no meet",
                                  u=P.elements[u], v=P.elements[v], missing="meet")
            j = by_up.get(P.up[u] & P.up[v])
            if j is None:
                raise NotALattice(f"{P.elements[u]!r} and {P.elements[v]!r} have no join",
                                  u=P.elements[u], v=P.elements[v], missing="join")
            meet[u][v] = meet[v][u] = m
            join[u][v] = join[v][u] = j
    return Lattice(P, tuple(map(tuple, meet)), tuple(map(tuple, join)), **extra)


def irreducibles(L: Lattice) -> IrreducibleIndex:
    joins = {j: L.lower_covers[j][0] for j in range(L.n) if len(L.lower_covers[j]) == 1}
    meets = {m: L.upper_covers[m][0] for m in range(L.n) if len(L.upper_covers[m]) == 1}
    return IrreducibleIndex(joins, meets)


def ideal_lattice(P: Poset, limit: int = IDEAL_LIMIT) -> Lattice:
    """J(P) ordered by inclusion; element ``i`` is the ``i``-th ideal by mask."""
    ideals = order_ideals(P, limit)
    pos = {m: i for i, m in enumerate(ideals)}
    rel = []
    for i, m in enumerate(ideals):
        for z in range(P.n):
            bigger = m | 1 << z
            if bigger != m and bigger in pos:
                rel.append((i, pos[bigger]))
    labels = [P.format_subset(m) for m in ideals]
    return build_lattice(Poset(labels, rel), ground=P, ideal_masks=ideals)


def boolean_lattice(n: int) -> Lattice:
    return ideal_lattice(antichain(n))


def hexx(a: int, b: int) -> Lattice:
    """Bottom ``b`` and top ``t`` joined by the chains x1<...<xa and y1<...<yb."""
    if a < 1 or b < 1:
        raise InvalidSize(f"hexx needs a, b >= 1, got ({a}, {b})", a=a, b=b)
    xs = [f"x{i}" for i in range(1, a + 1)]
    ys = [f"y{i}" for i in range(1, b + 1)]
    covers = []
    for side in (xs, ys):
        path = ["b", *side, "t"]
        covers += list(zip(path, path[1:]))
    return build_lattice(build_poset(["b", *xs, *ys, "t"], covers))


def interval(L: Lattice, u: int, v: int) -> Lattice:
    """The sublattice [u, v], remembering its embedding into ``L``."""
    if not L.leq(u, v):
        raise NotComparable(f"{L.label(u)!r} is not below {L.label(v)!r}",
                            u=L.label(u), v=L.label(v))
    mask = L.poset.up[u] & L.poset.down[v]
    members = list(bits(mask))
    local = {x: i for i, x in enumerate(members)}
    rel = [(local[a], local[b]) for a, b in L.poset.covers if a in local and b in local]
    sub = Poset([L.elements[x] for x in members], rel)
    return build_lattice(sub, parent=L, embedding=members)


def m3() -> Lattice:
    return build_lattice(build_poset(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")]))


def raised_m3() -> Lattice:
    """Six elements: 0 < z < {a, b, c} < 1. Has two pairings, so it is not semidistrim."""
    return build_lattice(build_poset(
        ["0", "z", "a", "b", "c", "1"],
        [("0", "z"), ("z", "a"), ("z", "b"), ("z", "c"), ("a", "1"), ("b", "1"), ("c", "1")]))


def lattice_from_dict(data: dict) -> Lattice:
    if not data.get("lattice", True):
        raise InvalidInput("JSON object is not flagged as a lattice")
    return build_lattice(poset_from_dict(data))
