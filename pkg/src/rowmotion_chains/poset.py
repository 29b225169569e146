"""Finite posets on bit-mask subsets.

Elements are indexed ``0..n-1`` in the order given; a subset of a poset is an
``int`` whose bit ``i`` marks element ``i``. Canonical subset order is
ascending mask value.
"""

from __future__ import annotations

import itertools
import json
import random
from typing import Iterable, Iterator, Sequence

from .errors import CycleDetected, DuplicateLabel, LimitExceeded, UnknownLabel, InvalidInput

IDEAL_LIMIT = 24
WIDTH_ENUMERATION_LIMIT = 20


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Poset:
    """An immutable finite poset.

    Parameters
    ----------
    elements : sequence of str
        Distinct labels; element ``i`` is ``elements[i]``.
    relations : iterable of (int, int)
        Index pairs ``(a, b)`` meaning ``a < b``. Any generating set works; the
        transitive closure is taken and the covers are recovered from it.
    """

    def __init__(self, elements: Sequence[str], relations: Iterable[tuple[int, int]] = ()):
        self.elements = tuple(str(e) for e in elements)
        n = self.n = len(self.elements)
        if len(set(self.elements)) != n:
            dup = next(e for e in self.elements if self.elements.count(e) > 1)
            raise DuplicateLabel(f"duplicate element label {dup!r}", label=dup)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.full = (1 << n) - 1

        succ = [0] * n
        for a, b in relations:
            if a == b:
                raise CycleDetected(f"self-relation on {self.elements[a]!r}",
                                    cycle=[self.elements[a]])
            succ[a] |= 1 << b
        order = _topological_order(succ, self.elements)
        self.topological_order = tuple(order)

        down = [1 << i for i in range(n)]
        pred = [0] * n
        for a in range(n):
            for b in bits(succ[a]):
                pred[b] |= 1 << a
        for v in order:
            for u in bits(pred[v]):
                down[v] |= down[u]
        up = [0] * n
        for v in range(n):
            for u in bits(down[v]):
                up[u] |= 1 << v
        self.down = tuple(down)
        self.up = tuple(up)

        covers = []
        lower = [0] * n
        upper = [0] * n
        for a in range(n):
            strict_up = up[a] & ~(1 << a)
            for b in bits(strict_up):
                between = strict_up & down[b] & ~(1 << b)
                if not between:
                    covers.append((a, b))
                    lower[b] |= 1 << a
                    upper[a] |= 1 << b
        self.covers = tuple(sorted(covers))
        self.lower_cover_mask = tuple(lower)
        self.upper_cover_mask = tuple(upper)

    # -- order relation ---------------------------------------------------
    def leq(self, a: int, b: int) -> bool:
        return bool(self.down[b] >> a & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def lower_covers(self, v: int) -> list[int]:
        return list(bits(self.lower_cover_mask[v]))

    def upper_covers(self, v: int) -> list[int]:
        return list(bits(self.upper_cover_mask[v]))

    def incomparable_mask(self, a: int) -> int:
        return self.full & ~(self.down[a] | self.up[a])

    # -- subsets ------------------------------------------------------------
    def mask(self, labels: Iterable[str]) -> int:
        m = 0
        for x in labels:
            if x not in self.index:
                raise UnknownLabel(f"unknown element {x!r}", label=x)
            m |= 1 << self.index[x]
        return m

    def labels(self, mask: int) -> list[str]:
        return [self.elements[i] for i in bits(mask)]

    def format_subset(self, mask: int) -> str:
        return "{" + ",".join(self.labels(mask)) + "}"

    def is_antichain(self, mask: int) -> bool:
        return all(self.down[i] & mask == 1 << i for i in bits(mask))

    def is_order_ideal(self, mask: int) -> bool:
        return closure(self, mask, "down") == mask

    def linear_extension(self) -> list[int]:
        return list(self.topological_order)

    def dual(self) -> "Poset":
        return Poset(self.elements, [(b, a) for a, b in self.covers])

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        covers = sorted([self.elements[a], self.elements[b]] for a, b in self.covers)
        return {"elements": list(self.elements), "covers": covers}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other):
        return (isinstance(other, Poset) and self.elements == other.elements
                and self.covers == other.covers)

    def __hash__(self):
        return hash((self.elements, self.covers))

    def __repr__(self):
        return f"Poset({list(self.elements)}, covers={self.to_dict()['covers']})"


def _topological_order(succ: list[int], labels) -> list[int]:
    n = len(succ)
    indeg = [0] * n
    for a in range(n):
        for b in bits(succ[a]):
            indeg[b] += 1
    ready = [v for v in range(n) if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in bits(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) < n:
        stuck = [labels[v] for v in range(n) if indeg[v] > 0]
        raise CycleDetected(f"cover relation has a cycle through {stuck}", cycle=stuck)
    return order


def build_poset(elements: Sequence[str], cover_pairs: Iterable[Sequence[str]] = ()) -> Poset:
    """Build a poset from labels and (smaller, larger) label pairs.

    Redundant pairs are absorbed by transitive reduction.
    """
    elements = [str(e) for e in elements]
    seen = set()
    for e in elements:
        if e in seen:
            raise DuplicateLabel(f"duplicate element label {e!r}", label=e)
        seen.add(e)
    index = {e: i for i, e in enumerate(elements)}
    rel = []
    for pair in cover_pairs:
        if len(pair) != 2:
            raise InvalidInput(f"cover pair {pair!r} must have two entries")
        a, b = (str(x) for x in pair)
        for x in (a, b):
            if x not in index:
                raise UnknownLabel(f"cover references unknown element {x!r}", label=x)
        rel.append((index[a], index[b]))
    return Poset(elements, rel)


def poset_from_dict(data: dict) -> Poset:
    try:
        return build_poset(data["elements"], data.get("covers", []))
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed poset JSON: {exc}") from None


def load_poset(path) -> Poset:
    with open(path) as fh:
        return poset_from_dict(json.load(fh))


def chain(n: int, labels: Sequence[str] | None = None) -> Poset:
    labels = labels or [str(i + 1) for i in range(n)]
    return Poset(labels, [(i, i + 1) for i in range(n - 1)])


def antichain(n: int, labels: Sequence[str] | None = None) -> Poset:
    return Poset(labels or [str(i + 1) for i in range(n)])


def v_poset() -> Poset:
    """x below both y and z."""
    return build_poset(["x", "y", "z"], [("x", "y"), ("x", "z")])


def lambda_poset() -> Poset:
    """x and y both below z."""
    return build_poset(["x", "y", "z"], [("x", "z"), ("y", "z")])


def generate(kind: str, n: int, seed: int | None = None, density: float = 0.5) -> Poset:
    """Test-corpus posets: ``chain``, ``antichain`` or ``random``.

    ``random`` keeps each relation ``i < j`` (``i < j`` as indices) with
    probability ``density`` and closes transitively.
    """
    if n < 1:
        raise InvalidInput("poset size must be at least 1")
    if kind == "chain":
        return chain(n)
    if kind == "antichain":
        return antichain(n)
    if kind == "random":
        if seed is None:
            raise InvalidInput("random poset generation requires a seed")
        rng = random.Random(seed)
        rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
        return Poset([str(i + 1) for i in range(n)], rel)
    raise InvalidInput(f"unknown poset kind {kind!r}")


def closure(P: Poset, S: int, direction: str = "down") -> int:
    """Down-closure (``"down"``) or up-closure (``"up"``) of the subset ``S``."""
    table = P.down if direction == "down" else P.up
    if direction not in ("down", "up"):
        raise InvalidInput(f"direction must be 'down' or 'up', got {direction!r}")
    out = 0
    for i in bits(S):
        out |= table[i]
    return out


def extremal(P: Poset, S: int, which: str = "max") -> int:
    """Maximal (``"max"``) or minimal (``"min"``) elements of ``S``."""
    if which not in ("min", "max"):
        raise InvalidInput(f"which must be 'min' or 'max', got {which!r}")
    table = P.up if which == "max" else P.down
    out = 0
    for i in bits(S):
        if table[i] & S == 1 << i:
            out |= 1 << i
    return out


def order_ideals(P: Poset, limit: int = IDEAL_LIMIT) -> list[int]:
    """All order ideals of ``P`` as masks, ascending."""
    if P.n > limit:
        raise LimitExceeded(f"order ideal enumeration limited to {limit} elements, got {P.n}",
                            limit=limit, size=P.n)
    ideals = [0]
    for v in P.topological_order:
        need = P.lower_cover_mask[v]
        bit = 1 << v
        ideals += [m | bit for m in ideals if m & need == need]
    ideals.sort()
    return ideals


def antichains(P: Poset) -> Iterator[int]:
    """Every antichain of ``P`` (including the empty one)."""
    def rec(i, chosen, allowed):
        if i == P.n:
            yield chosen
            return
        yield from rec(i + 1, chosen, allowed)
        if allowed >> i & 1:
            yield from rec(i + 1, chosen | 1 << i, allowed & P.incomparable_mask(i))
    yield from rec(0, 0, P.full)


def width(P: Poset) -> int:
    """Size of a largest antichain."""
    if P.n == 0:
        return 0
    if P.n <= WIDTH_ENUMERATION_LIMIT:
        return _max_antichain_search(P)
    return P.n - _max_comparability_matching(P)


def _max_antichain_search(P: Poset) -> int:
    best = 0
    incomp = [P.incomparable_mask(i) for i in range(P.n)]

    def rec(size, cand):
        nonlocal best
        if size + popcount(cand) <= best:
            return
        if not cand:
            best = size
            return
        i = (cand & -cand).bit_length() - 1
        rec(size + 1, cand & incomp[i])
        rec(size, cand & ~(1 << i))

    rec(0, P.full)
    return best


def _max_comparability_matching(P: Poset) -> int:
    # Dilworth: width = n - maximum matching in the strict-order bipartite graph.
    match_right = [-1] * P.n
    for a in range(P.n):
        visited = [False] * P.n

        def augment(u):
            for v in bits(P.up[u] & ~(1 << u)):
                if visited[v]:
                    continue
                visited[v] = True
                if match_right[v] == -1 or augment(match_right[v]):
                    match_right[v] = u
                    return True
            return False

        augment(a)
    return sum(1 for v in match_right if v != -1)


def _canonical_relation(n: int, rel: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in rel))
        if best is None or key < best:
            best = key
    return best


def all_posets(n: int) -> list[Poset]:
    """One representative of every isomorphism class of ``n``-element posets.

    Brute force over naturally labelled strict orders; fine for ``n <= 6``.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = {}
    for choice in range(1 << len(pairs)):
        rel = {pairs[k] for k in bits(choice)}
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2):
            continue
        key = _canonical_relation(n, frozenset(rel))
        if key not in seen:
            seen[key] = Poset([str(i + 1) for i in range(n)], key)
    return list(seen.values())
