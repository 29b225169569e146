import random

import pytest

from rowmotion_chains.errors import LimitExceeded, NotSemidistrim
from rowmotion_chains.lattice import (boolean_lattice, build_lattice, hexx, ideal_lattice,
                                      interval, m3, raised_m3)
from rowmotion_chains.poset import (all_posets, antichain, bits, build_poset, chain, closure,
                                    extremal, width)
from rowmotion_chains.semidistrim import (SemidistrimStructure, edge_labels, galois_graph,
                                          independence_number, is_semidistrim, max_down_degree,
                                          pairings, prime_pairs, rowmotion_map, unique_pairing)


def _lab(L, d):
    return {L.label(k): L.label(v) for k, v in d.items()}


def test_chain_pairing_unique():
    L = build_lattice(chain(3))
    found = pairings(L)
    assert len(found) == 1
    assert _lab(L, found[0]) == {"2": "1", "3": "2"}


def test_hexx32_pairing():
    L = hexx(3, 2)
    k = _lab(L, unique_pairing(L))
    assert k == {"x1": "y2", "x2": "x1", "x3": "x2", "y1": "x3", "y2": "y1"}


def test_boolean_pairing_is_complement_of_up_closure():
    P = antichain(2)
    L = ideal_lattice(P)
    kappa = unique_pairing(L)
    pos = {m: i for i, m in enumerate(L.ideal_masks)}
    for x in range(P.n):
        j = pos[closure(P, 1 << x, "down")]
        assert kappa[j] == pos[P.full & ~closure(P, 1 << x, "up")]


def test_distributive_pairing_formula():
    for n in range(1, 5):
        for P in all_posets(n):
            L = ideal_lattice(P)
            kappa = unique_pairing(L)
            pos = {m: i for i, m in enumerate(L.ideal_masks)}
            for x in range(P.n):
                assert kappa[pos[P.down[x]]] == pos[P.full & ~P.up[x]]


def test_galois_graph_examples():
    G = galois_graph(boolean_lattice(3), unique_pairing(boolean_lattice(3)))
    assert len(G.vertices) == 3 and not G.arrows
    assert independence_number(G) == 3
    L = ideal_lattice(chain(2))
    G = galois_graph(L, unique_pairing(L))
    # the join-irreducibles are {1} and {1,2}: the arrow points from the larger
    assert {(L.label(a), L.label(b)) for a, b in G.arrows} == {("{1,2}", "{1}")}
    D = hexx(1, 1)
    G = galois_graph(D, unique_pairing(D))
    assert G.arrows == frozenset()


def test_distributive_edge_labels():
    for n in range(1, 5):
        for P in all_posets(n):
            L = ideal_lattice(P)
            kappa = unique_pairing(L)
            lab = edge_labels(L, kappa)
            pos = {m: i for i, m in enumerate(L.ideal_masks)}
            for (u, v), j in lab.labels.items():
                z = (L.ideal_masks[v] & ~L.ideal_masks[u]).bit_length() - 1
                assert j == pos[P.down[z]]
            for w, I in enumerate(L.ideal_masks):
                assert lab.down[w] == {pos[P.down[x]] for x in bits(extremal(P, I, "max"))}
                assert lab.up[w] == {pos[P.down[x]] for x in bits(extremal(P, P.full & ~I, "min"))}


def test_rowmotion_examples():
    for n in range(1, 6):
        L = boolean_lattice(n)
        S = SemidistrimStructure(L)
        for w, m in enumerate(L.ideal_masks):
            assert L.ideal_masks[S.row[w]] == ((1 << n) - 1) & ~m
    L = ideal_lattice(chain(2))
    S = SemidistrimStructure(L)
    orbit = [L.top]
    for _ in range(3):
        orbit.append(S.row[orbit[-1]])
    assert [L.label(x) for x in orbit] == ["{1,2}", "{1}", "{}", "{1,2}"]
    for L in (hexx(2, 3), boolean_lattice(3), ideal_lattice(chain(4))):
        assert SemidistrimStructure(L).row[L.bottom] == L.top


def test_prime_pairs():
    for n in range(1, 5):
        for P in all_posets(n):
            L = ideal_lattice(P)
            pos = {m: i for i, m in enumerate(L.ideal_masks)}
            pairs = set(prime_pairs(L))
            for x in range(P.n):
                assert (pos[P.down[x]], pos[P.full & ~P.up[x]]) in pairs
    D = hexx(1, 1)
    got = {(D.label(j), D.label(m)) for j, m in prime_pairs(D)}
    assert got == {("x1", "y1"), ("y1", "x1")}


def test_pentagon():
    N5 = build_lattice(build_poset(["0", "a", "b", "c", "1"],
                                   [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")]))
    assert prime_pairs(N5)
    assert is_semidistrim(N5)  # N5 = hexx(2, 1)


def test_semidistrim_corpus():
    for n in range(1, 6):
        for P in all_posets(n):
            assert is_semidistrim(ideal_lattice(P))
    for a in range(1, 5):
        for b in range(1, 5):
            v = is_semidistrim(hexx(a, b))
            assert v and v.certificate is not None


def test_rejections():
    for L in (m3(), raised_m3()):
        v = is_semidistrim(L)
        assert not v and v.reason == "pairing not unique"
        with pytest.raises(NotSemidistrim):
            SemidistrimStructure(L)
    assert len(pairings(raised_m3())) == 2


def test_limit():
    with pytest.raises(LimitExceeded):
        is_semidistrim(boolean_lattice(3), limit=4)


def test_certificate_is_deterministic():
    assert is_semidistrim(hexx(3, 2)).to_dict() == is_semidistrim(hexx(3, 2)).to_dict()


def _corpus():
    out = [hexx(a, b) for a in range(1, 5) for b in range(1, 5)]
    out += [ideal_lattice(P) for n in range(1, 6) for P in all_posets(n)]
    return out


def test_independence_number_identities():
    for n in range(1, 6):
        for P in all_posets(n):
            L = ideal_lattice(P)
            S = SemidistrimStructure(L)
            assert independence_number(S.graph) == width(P) == max_down_degree(L)
    for a in range(1, 5):
        for b in range(1, 5):
            S = SemidistrimStructure(hexx(a, b))
            assert independence_number(S.graph) == max_down_degree(S.lattice) == 2


def test_label_sets_biject_onto_independent_sets():
    for L in _corpus():
        S = SemidistrimStructure(L, verify=False)
        ind = set(S.graph.independent_sets)
        assert set(S.labeling.down) == ind == set(S.labeling.up)
        assert len(set(S.labeling.down)) == L.n
        for u in range(L.n):
            assert L.join_all(S.down(u)) == u
            assert L.meet_all(S.kappa[j] for j in S.up(u)) == u
        for I in ind:
            top = L.join_all(I)
            bottom = L.meet_all(S.kappa[j] for j in I)
            assert S.down(top) == I and S.up(bottom) == I
        assert sorted(S.row) == list(range(L.n))
        assert rowmotion_map(L, S.labeling, S.graph) == S.row


def test_intervals_are_semidistrim():
    rng = random.Random(5)
    corpus = [L for L in _corpus() if L.n <= 64]
    for _ in range(60):
        L = rng.choice(corpus)
        u = rng.randrange(L.n)
        v = rng.choice([w for w in range(L.n) if L.leq(u, w)])
        assert is_semidistrim(interval(L, u, v))


def test_hexx_every_interval():
    for a in range(1, 4):
        for b in range(1, 4):
            L = hexx(a, b)
            for u in range(L.n):
                for v in range(L.n):
                    if L.leq(u, v):
                        assert is_semidistrim(interval(L, u, v))
