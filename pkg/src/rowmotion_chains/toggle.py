"""Generalized toggles over set families and the toggle Markov chain."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput, NotInFamily, UnknownLabel
from .markov import MarkovChain
from .poset import Poset, bits, order_ideals, popcount, submasks
from .probability import probability_vector


class SetFamily:
    """A collection of subsets (bit masks) of a labelled ground set."""

    def __init__(self, ground: Sequence[str], members: Iterable[int]):
        self.ground = tuple(str(g) for g in ground)
        self.n = len(self.ground)
        self.index = {g: i for i, g in enumerate(self.ground)}
        full = (1 << self.n) - 1
        ms = sorted(set(members))
        for m in ms:
            if m < 0 or m & ~full:
                raise InvalidInput(f"member mask {m} exceeds the ground set")
        self.members = tuple(ms)
        self.position = {m: i for i, m in enumerate(self.members)}

    def __contains__(self, mask: int) -> bool:
        return mask in self.position

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def mask(self, labels: Iterable[str]) -> int:
        m = 0
        for x in labels:
            if x not in self.index:
                raise UnknownLabel(f"unknown ground element {x!r}", label=x)
            m |= 1 << self.index[x]
        return m

    def format(self, mask: int) -> str:
        return "{" + ",".join(self.ground[i] for i in bits(mask)) + "}"

    def to_dict(self) -> dict:
        return {"ground": list(self.ground),
                "members": [[self.ground[i] for i in bits(m)] for m in self.members]}

    def __eq__(self, other):
        return (isinstance(other, SetFamily) and self.ground == other.ground
                and self.members == other.members)

    def __repr__(self):
        return f"SetFamily({list(self.ground)}, {[self.format(m) for m in self.members]})"


def family_from_dict(data: dict) -> SetFamily:
    try:
        ground = [str(g) for g in data["ground"]]
        index = {g: i for i, g in enumerate(ground)}
        members = []
        for member in data["members"]:
            m = 0
            for x in member:
                if str(x) not in index:
                    raise UnknownLabel(f"member uses unknown element {x!r}", label=x)
                m |= 1 << index[str(x)]
            members.append(m)
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed set family JSON: {exc}") from None
    return SetFamily(ground, members)


def load_family(path) -> SetFamily:
    with open(path) as fh:
        return family_from_dict(json.load(fh))


# -- family generators -------------------------------------------------------------

def ideal_family(P: Poset) -> SetFamily:
    return SetFamily(P.elements, order_ideals(P))


def independent_sets_family(vertices: Sequence[str], edges: Iterable[Sequence[str]]) -> SetFamily:
    index = {v: i for i, v in enumerate(vertices)}
    adj = [0] * len(vertices)
    for a, b in edges:
        for x in (a, b):
            if x not in index:
                raise UnknownLabel(f"edge uses unknown vertex {x!r}", label=x)
        adj[index[a]] |= 1 << index[b]
        adj[index[b]] |= 1 << index[a]
    members = [m for m in range(1 << len(vertices))
               if all(not (adj[i] & m) for i in bits(m))]
    return SetFamily(vertices, members)


def graph_from_dict(data) -> tuple[list[str], list[tuple[str, str]]]:
    """Edge-list JSON: ``{"vertices": [...], "edges": [[a, b], ...]}`` or a bare edge list."""
    if isinstance(data, list):
        edges = [tuple(map(str, e)) for e in data]
        vertices = []
        for e in edges:
            for v in e:
                if v not in vertices:
                    vertices.append(v)
        return vertices, edges
    edges = [tuple(map(str, e)) for e in data.get("edges", [])]
    return [str(v) for v in data["vertices"]], edges


def interval_closed_family(P: Poset) -> SetFamily:
    """Convex subsets: x, z in S and x <= y <= z force y in S."""
    members = []
    for m in range(1 << P.n):
        hull = 0
        for x in bits(m):
            hull |= P.up[x]
        below = 0
        for z in bits(m):
            below |= P.down[z]
        if hull & below == m:
            members.append(m)
    return SetFamily(P.elements, members)


def size_at_most_family(ground: Sequence[str], k: int) -> SetFamily:
    return SetFamily(ground, [m for m in range(1 << len(ground)) if popcount(m) <= k])


def size_at_least_family(ground: Sequence[str], k: int) -> SetFamily:
    return SetFamily(ground, [m for m in range(1 << len(ground)) if popcount(m) >= k])


def random_family(n: int, rng: random.Random, density: float = 0.5) -> SetFamily:
    """Each subset of an ``n``-set kept independently; never empty."""
    members = [m for m in range(1 << n) if rng.random() < density]
    if not members:
        members = [rng.randrange(1 << n)]
    return SetFamily([str(i + 1) for i in range(n)], members)


# -- toggles --------------------------------------------------------------------------

def _check_order(K: SetFamily, order: Sequence[int]) -> list[int]:
    order = list(order)
    if sorted(order) != list(range(K.n)):
        raise InvalidInput(f"toggle order {order} is not a permutation of the ground set")
    return order


def order_from_labels(K: SetFamily, labels: Sequence[str]) -> list[int]:
    try:
        return _check_order(K, [K.index[x] for x in labels])
    except KeyError as exc:
        raise UnknownLabel(f"unknown ground element {exc.args[0]!r}") from None


def toggle(K: SetFamily, x: int, A: int) -> int:
    """A with x flipped when the result stays in K; otherwise A."""
    if A not in K:
        raise NotInFamily(f"{K.format(A)} is not a member of the family")
    B = A ^ (1 << x)
    return B if B in K else A


def toggle_sequence(K: SetFamily, order: Sequence[int], Y: int, A: int) -> int:
    """Apply the toggles of the elements of Y, in the order they occur in ``order``."""
    if A not in K:
        raise NotInFamily(f"{K.format(A)} is not a member of the family")
    pos = K.position
    for x in order:
        if Y >> x & 1:
            B = A ^ (1 << x)
            if B in pos:
                A = B
    return A


def hypercube_connected(K: SetFamily) -> tuple[bool, list[list[int]]]:
    """Connectivity of the hypercube graph restricted to K, with its components."""
    parent = {m: m for m in K.members}

    def find(m):
        while parent[m] != m:
            parent[m] = parent[parent[m]]
            m = parent[m]
        return m

    for m in K.members:
        for i in range(K.n):
            other = m ^ (1 << i)
            if other in parent:
                ra, rb = find(m), find(other)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for m in K.members:
        groups.setdefault(find(m), []).append(m)
    comps = sorted(groups.values())
    return len(comps) <= 1, comps


def build_toggle_chain(K: SetFamily, order: Sequence[int], probs) -> MarkovChain:
    """The toggle Markov chain T(K, order).

    From A, every element outside A is toggled; an element of A is toggled with
    its probability and skipped otherwise. Summing over the skip set U of A,
    the move A -> tau_{ground - U}(A) carries weight
    prod_{A - U} p * prod_U (1 - p).
    """
    order = _check_order(K, order)
    p = probability_vector(K.ground, probs)
    exact = all(isinstance(v, (Fraction, int)) for v in p)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    full = (1 << K.n) - 1
    rows = []
    for A in K.members:
        row = [zero] * len(K)
        for U in submasks(A):
            w = one
            for y in bits(A):
                w *= (1 - p[y]) if U >> y & 1 else p[y]
            if w == 0:
                continue
            B = toggle_sequence(K, order, full & ~U, A)
            row[K.position[B]] += w
        rows.append(row)
    return MarkovChain([K.format(m) for m in K.members], rows,
                       meta={"kind": "toggle", "family": K.to_dict(),
                             "order": [K.ground[i] for i in order]})
