import itertools
import random

import pytest
from hypothesis import given, settings

from rowmotion_chains.errors import CycleDetected, DuplicateLabel, LimitExceeded, UnknownLabel
from rowmotion_chains.poset import (_max_antichain_search, _max_comparability_matching,
                                    all_posets, antichain, antichains, build_poset, chain,
                                    closure, extremal, generate, lambda_poset, order_ideals,
                                    poset_from_dict, v_poset, width)

from conftest import posets


def test_singleton_and_chain_closure():
    P = build_poset(["x"])
    assert P.n == 1 and not P.covers
    C = build_poset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    assert C.leq(0, 2) and not C.leq(2, 0)


def test_transitive_reduction():
    P = build_poset(["x", "y", "z"], [("x", "y"), ("y", "z"), ("x", "z")])
    assert sorted(P.covers) == [(0, 1), (1, 2)]


def test_build_errors():
    with pytest.raises(CycleDetected):
        build_poset(["x", "y"], [("x", "y"), ("y", "x")])
    with pytest.raises(DuplicateLabel):
        build_poset(["x", "x"])
    with pytest.raises(UnknownLabel):
        build_poset(["x"], [("x", "q")])


def test_closures():
    C = build_poset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    V = v_poset()
    assert closure(C, 0, "down") == 0 and closure(C, 0, "up") == 0
    assert C.labels(closure(C, C.mask(["y"]), "down")) == ["x", "y"]
    assert V.labels(closure(V, V.mask(["x"]), "up")) == ["x", "y", "z"]


def test_extremal():
    C = build_poset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    V = v_poset()
    assert extremal(C, 0, "max") == 0
    assert C.labels(extremal(C, C.mask(["x", "y"]), "max")) == ["y"]
    assert V.labels(extremal(V, V.full, "max")) == ["y", "z"]


def test_order_ideal_counts():
    A = antichain(2)
    assert [A.format_subset(m) for m in order_ideals(A)] == ["{}", "{1}", "{2}", "{1,2}"]
    assert len(order_ideals(chain(3))) == 4
    assert len(order_ideals(v_poset())) == 5
    assert len(order_ideals(lambda_poset())) == 5
    for n in range(1, 7):
        assert len(order_ideals(antichain(n))) == 2 ** n
        assert len(order_ideals(chain(n))) == n + 1


def test_ideal_limit():
    with pytest.raises(LimitExceeded):
        order_ideals(antichain(25))


def test_width_examples():
    assert width(chain(5)) == 1
    assert width(antichain(4)) == 4
    assert width(v_poset()) == 2


def test_width_methods_agree():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 8)
        P = generate("random", n, rng.randrange(10 ** 6), density=rng.random())
        brute = max(bin(m).count("1") for m in range(1 << n) if P.is_antichain(m))
        assert width(P) == brute == _max_antichain_search(P) == n - _max_comparability_matching(P)


def test_width_large_uses_matching():
    P = antichain(30)
    assert width(P) == 30
    assert width(chain(25)) == 1


def test_generate():
    assert not generate("antichain", 3).covers
    C = generate("chain", 3)
    assert [(C.elements[a], C.elements[b]) for a, b in C.covers] == [("1", "2"), ("2", "3")]
    assert generate("random", 5, 7).to_dict() == generate("random", 5, 7).to_dict()


def test_json_roundtrip():
    P = v_poset()
    Q = poset_from_dict(P.to_dict())
    assert Q.to_dict() == P.to_dict()
    assert P.to_dict() == {"elements": ["x", "y", "z"], "covers": [["x", "y"], ["x", "z"]]}


def test_all_posets_counts():
    assert [len(all_posets(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]


@settings(max_examples=60, deadline=None)
@given(posets(max_n=6))
def test_closure_idempotent_monotone(P):
    for S in range(1 << P.n):
        for d in ("down", "up"):
            c = closure(P, S, d)
            assert c & S == S
            assert closure(P, c, d) == c
    subsets = list(range(1 << P.n))
    for S, T in itertools.product(subsets[:16], repeat=2):
        if S & T == S:
            assert closure(P, S, "down") & closure(P, T, "down") == closure(P, S, "down")


@settings(max_examples=60, deadline=None)
@given(posets(max_n=6))
def test_ideals_are_down_closed(P):
    ideals = order_ideals(P)
    assert ideals == sorted(ideals)
    assert 0 in ideals and P.full in ideals
    brute = [m for m in range(1 << P.n) if closure(P, m, "down") == m]
    assert ideals == brute
    for I in ideals:
        assert P.is_antichain(extremal(P, I, "max"))
    assert sorted(antichains(P)) == sorted(extremal(P, I, "max") for I in ideals)
