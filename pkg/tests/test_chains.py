import random
from fractions import Fraction as F

import pytest

from rowmotion_chains.chains import (hexx_stationary, hexx_stationary_kappa_form,
                                     hexx_transition_table, ideal_lattice_probs,
                                     row_permutation_distributive, rowmotion_chain_distributive,
                                     rowmotion_chain_semidistrim, semidistrim_probability_vector,
                                     stationary_closed_form)
from rowmotion_chains.errors import InvalidInput, InvalidProbability
from rowmotion_chains.lattice import hexx, ideal_lattice
from rowmotion_chains.markov import is_irreducible, stationary
from rowmotion_chains.poset import all_posets, antichain, chain, generate, order_ideals, popcount
from rowmotion_chains.probability import random_assignment
from rowmotion_chains.semidistrim import SemidistrimStructure


def entry(M, a, b):
    return M.matrix[M.index[a], M.index[b]]


def test_two_chain_transitions():
    M = rowmotion_chain_distributive(chain(2), F(1, 2)).chain
    x1, top = "{" + chain(2).elements[0] + "}", M.states[-1]
    assert entry(M, x1, "{}") == F(1, 2)
    assert entry(M, x1, top) == F(1, 2)
    assert entry(M, "{}", top) == 1


def test_rows_sum_to_one():
    rng = random.Random(0)
    for _ in range(20):
        P = generate("random", rng.randint(1, 5), rng.randrange(100))
        M = rowmotion_chain_distributive(P, random_assignment(P.elements, rng)).chain
        assert all(sum(M.matrix[i]) == 1 for i in range(M.n))


def test_all_ones_is_rowmotion():
    for n in range(1, 5):
        for P in all_posets(n):
            M = rowmotion_chain_distributive(P, 1).chain
            perm = row_permutation_distributive(P)
            for i in range(M.n):
                assert [int(v) for v in M.matrix[i]] == [int(j == perm[i]) for j in range(M.n)]


def test_all_zeros_collapse_to_top():
    P = generate("random", 4, 5)
    M = rowmotion_chain_distributive(P, 0).chain
    top = M.n - 1
    assert order_ideals(P)[top] == P.full
    assert all(M.matrix[i, top] == 1 for i in range(M.n))


def test_boolean_row_is_complement():
    P = antichain(3)
    ideals = order_ideals(P)
    perm = row_permutation_distributive(P)
    assert all(ideals[perm[i]] == P.full & ~I for i, I in enumerate(ideals))


def test_distributive_stationary_exhaustive():
    rng = random.Random(21)
    for n in range(1, 6):
        for P in all_posets(n):
            for _ in range(20):
                probs = random_assignment(P.elements, rng)
                M = rowmotion_chain_distributive(P, probs).chain
                assert stationary(M).values == stationary_closed_form("distributive", P, probs).values


def test_closed_form_examples():
    assert stationary_closed_form("distributive", chain(2), F(1, 2)).values == (F(1, 7), F(2, 7), F(4, 7))
    d = stationary_closed_form("distributive", antichain(3), F(1, 3))
    total = sum(3 ** k * c for k, c in zip(range(4), (1, 3, 3, 1)))
    for I, v in zip(order_ideals(antichain(3)), d.values):
        assert v == F(3 ** popcount(I), total)
    h = stationary_closed_form("hexx", (1, 1), F(1, 2))
    assert h.as_dict() == {"b": F(1, 9), "x1": F(2, 9), "y1": F(2, 9), "t": F(4, 9)}
    assert stationary_closed_form("hexx", hexx(1, 1), F(1, 2)).values == h.values
    with pytest.raises(InvalidProbability):
        stationary_closed_form("distributive", chain(2), 0)
    with pytest.raises(InvalidInput):
        stationary_closed_form("lattice", chain(2), F(1, 2))


def test_ideal_lattice_chain_matches():
    rng = random.Random(13)
    for n in range(1, 6):
        for P in all_posets(n):
            L = ideal_lattice(P)
            probs = random_assignment(P.elements, rng)
            R = rowmotion_chain_semidistrim(L, ideal_lattice_probs(L, probs)).chain
            assert R.same_matrix(rowmotion_chain_distributive(P, probs).chain)


def test_meet_construction_agrees():
    rng = random.Random(17)
    for a in range(1, 4):
        for b in range(1, 4):
            S = SemidistrimStructure(hexx(a, b))
            probs = random_assignment([S.lattice.label(j) for j in S.join_irreducibles], rng)
            f = rowmotion_chain_semidistrim(S.lattice, probs, structure=S).chain
            m = rowmotion_chain_semidistrim(S.lattice, probs, method="meet", structure=S).chain
            assert f.same_matrix(m) and is_irreducible(f)
    with pytest.raises(InvalidInput):
        rowmotion_chain_semidistrim(hexx(1, 1), F(1, 2), method="other")


def test_hexx21_entries():
    probs = {"x1": F(1, 3), "x2": F(2, 7), "y1": F(3, 5)}
    M = rowmotion_chain_semidistrim(hexx(2, 1), probs).chain
    assert M.n == 5
    assert entry(M, "x2", "x1") == probs["x2"]
    assert entry(M, "y1", "x2") == probs["y1"]
    assert entry(M, "t", "b") == probs["x1"] * probs["y1"]
    table = hexx_transition_table(2, 1, probs)
    for u in M.states:
        for v in M.states:
            assert entry(M, u, v) == table.get((u, v), 0)


def test_semidistrim_all_ones_is_row():
    for L in (hexx(3, 2), hexx(2, 2), ideal_lattice(generate("random", 4, 1))):
        S = SemidistrimStructure(L)
        M = rowmotion_chain_semidistrim(L, 1, structure=S).chain
        for w in range(L.n):
            assert M.matrix[w, S.row[w]] == 1


def test_hexx_forms_agree():
    rng = random.Random(31)
    for a, b in [(1, 1), (2, 3), (4, 1), (3, 3)]:
        S = SemidistrimStructure(hexx(a, b))
        for _ in range(5):
            probs = random_assignment([f"x{i}" for i in range(1, a + 1)]
                                      + [f"y{i}" for i in range(1, b + 1)], rng)
            M = rowmotion_chain_semidistrim(S.lattice, probs, structure=S).chain
            pi = stationary(M).values
            assert hexx_stationary(a, b, probs).values == pi
            assert hexx_stationary_kappa_form(a, b, probs, structure=S).values == pi


def test_hexx_closed_form_needs_open_interval():
    with pytest.raises(InvalidProbability):
        hexx_stationary(2, 1, {"x1": 1, "x2": F(1, 2), "y1": F(1, 2)})


def test_probability_vector_labels():
    S = SemidistrimStructure(hexx(2, 1))
    p = semidistrim_probability_vector(S, {"x1": F(1, 2), "x2": F(1, 3), "y1": F(1, 4)})
    assert sorted(p.values()) == [F(1, 4), F(1, 3), F(1, 2)]
    with pytest.raises(InvalidProbability):
        semidistrim_probability_vector(S, {"x1": F(1, 2), "x2": F(1, 3), "z": F(1, 4)})


def test_float_backend_chain():
    M = rowmotion_chain_distributive(chain(3), 0.5).chain
    assert M.backend == "float"
    assert abs(M.matrix.sum(axis=1) - 1).max() < 1e-12


def test_meta_records_instance():
    M = rowmotion_chain_distributive(chain(2), F(1, 3)).chain
    assert M.meta["kind"] == "ideal" and set(M.meta["probs"].values()) == {"1/3"}
    H = rowmotion_chain_semidistrim(hexx(1, 1), F(1, 2)).chain
    assert H.meta["kind"] == "semidistrim"
