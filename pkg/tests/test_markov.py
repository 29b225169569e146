import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rowmotion_chains.chains import rowmotion_chain_distributive, rowmotion_chain_semidistrim
from rowmotion_chains.errors import (DimensionMismatch, InvalidChain, InvalidProbability,
                                     LimitExceeded, NotIrreducible)
from rowmotion_chains.lattice import hexx
from rowmotion_chains.linalg import bareiss_solve, rank
from rowmotion_chains.markov import (Distribution, MarkovChain, chain_from_dict,
                                     communicating_classes, coupling_bound, distribution_after,
                                     empirical_distribution, is_irreducible, is_stationary,
                                     mixing_time, refined_coupling_bound, simulate,
                                     simulate_replicas, stationary, tv_distance,
                                     tv_distance_events, worst_tv_curve)
from rowmotion_chains.poset import antichain, chain, generate


def two_state():
    # states {} and {1} of the one-element rowmotion chain at p = 1/2
    return rowmotion_chain_distributive(antichain(1), F(1, 2)).chain


def _random_chain(rng, n, density):
    rows = []
    for _ in range(n):
        w = [rng.randint(1, 4) if rng.random() < density else 0 for _ in range(n)]
        if not any(w):
            w[rng.randrange(n)] = 1
        s = sum(w)
        rows.append([F(x, s) for x in w])
    return MarkovChain([str(i) for i in range(n)], rows)


def _reachable(M):
    n = M.n
    reach = []
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in M.successors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach.append(seen)
    return reach


def test_identity_classes():
    M = MarkovChain(list("abc"), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(communicating_classes(M)) == 3


def test_rowmotion_chain_classes():
    P = generate("random", 4, 11)
    assert is_irreducible(rowmotion_chain_distributive(P, F(1, 3)).chain)
    M = rowmotion_chain_distributive(chain(3), 0).chain
    assert len(communicating_classes(M)) == 4


def test_scc_matches_reachability():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(1, 64)
        M = _random_chain(rng, n, rng.choice([0.02, 0.05, 0.2]))
        reach = _reachable(M)
        classes = communicating_classes(M)
        assert sorted(x for c in classes for x in c) == list(range(n))
        for c in classes:
            for a in c:
                for b in c:
                    assert b in reach[a]
        label = {x: k for k, c in enumerate(classes) for x in c}
        for a in range(n):
            for b in reach[a]:
                if a in reach[b]:
                    assert label[a] == label[b]
        assert is_irreducible(M) == all(len(r) == n for r in reach)


def test_stationary_examples():
    pi = stationary(rowmotion_chain_distributive(chain(2), F(1, 2)).chain)
    assert pi.values == (F(1, 7), F(2, 7), F(4, 7))
    ds = MarkovChain(list("abc"), [[F(1, 2), F(1, 2), 0], [0, F(1, 2), F(1, 2)],
                                   [F(1, 2), 0, F(1, 2)]])
    assert stationary(ds).values == (F(1, 3),) * 3
    H = rowmotion_chain_semidistrim(hexx(1, 1), F(1, 2)).chain
    assert stationary(H).as_dict() == {"b": F(1, 9), "x1": F(2, 9), "y1": F(2, 9), "t": F(4, 9)}


def test_stationary_requires_irreducible():
    with pytest.raises(NotIrreducible):
        stationary(rowmotion_chain_distributive(chain(3), 0).chain)


def test_stationary_float_backend():
    M = rowmotion_chain_distributive(generate("random", 5, 2), F(2, 5)).chain
    exact = stationary(M).values
    approx = stationary(M.to_float()).values
    assert np.allclose(np.array(exact, dtype=float), approx, atol=1e-12)
    assert is_stationary(M.to_float(), approx)


def test_stationary_is_fixed_random():
    rng = random.Random(4)
    for _ in range(30):
        M = _random_chain(rng, rng.randint(1, 12), 0.7)
        if is_irreducible(M):
            pi = stationary(M)
            assert sum(pi.values) == 1 and is_stationary(M, pi.values)


def test_tv_examples():
    mu = (F(1, 3), F(2, 3))
    assert tv_distance(mu, mu) == 0
    assert tv_distance((1, 0, 0), (0, 0, 1)) == 1
    assert tv_distance((F(1, 2), F(1, 2)), (1, 0)) == F(1, 2)
    with pytest.raises(DimensionMismatch):
        tv_distance((1, 0), (1, 0, 0))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=7), st.data())
def test_tv_event_form(a, data):
    b = data.draw(st.lists(st.integers(0, 9), min_size=len(a), max_size=len(a)))
    if sum(a) == 0 or sum(b) == 0:
        return
    mu = [F(x, sum(a)) for x in a]
    nu = [F(x, sum(b)) for x in b]
    assert tv_distance(mu, nu) == tv_distance_events(mu, nu)


def test_mixing_time_two_state():
    M = two_state()
    assert mixing_time(M, F(1, 4)) == 2
    # at t = 2 the start {} sits at exactly 1/6, which does not count as below
    assert mixing_time(M, F(1, 6)) == 3
    assert worst_tv_curve(M, 3) == [F(2, 3), F(1, 3), F(1, 6), F(1, 12)]


def test_mixing_time_identical_rows():
    row = [F(1, 4), F(3, 4)]
    M = MarkovChain(["a", "b"], [row, row])
    assert mixing_time(M, F(1, 4)) == 1
    assert mixing_time(M, F(4, 5)) == 0


def test_mixing_float_agrees():
    M = rowmotion_chain_distributive(generate("random", 4, 3), F(1, 2)).chain
    assert mixing_time(M, F(1, 4)) == mixing_time(M.to_float(), 0.25)


def test_worst_curve_non_increasing():
    rng = random.Random(1)
    for _ in range(20):
        P = generate("random", rng.randint(1, 4), rng.randrange(1000))
        M = rowmotion_chain_distributive(P, F(rng.randint(1, 3), 4)).chain
        curve = worst_tv_curve(M, 12)
        assert all(a >= b for a, b in zip(curve, curve[1:]))


def test_mixing_limit():
    M = two_state()
    with pytest.raises(LimitExceeded):
        mixing_time(M, F(1, 4), limit=1)


def test_coupling_bound_examples():
    assert coupling_bound(F(1, 4), F(1, 2), 2) == 5
    probs = {"a": F(1, 2), "b": F(1, 2)}
    family = [[], ["a"], ["b"], ["a", "b"]]
    assert refined_coupling_bound(F(1, 4), probs, family) == coupling_bound(F(1, 4), F(1, 2), 2)
    vals = [coupling_bound(F(k, 100), F(1, 3), 2) for k in range(1, 100)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert coupling_bound(F(99, 100), F(1, 3), 2) in (0, 1)
    with pytest.raises(InvalidProbability):
        coupling_bound(F(1, 4), 1, 2)
    with pytest.raises(InvalidProbability):
        coupling_bound(0, F(1, 2), 2)


def test_coupling_bound_exact_boundary():
    # (1 - rate)^k = eps exactly at k = 2: the bound is ceil(2) = 2, not 3
    assert coupling_bound(F(1, 4), F(1, 2), 1) == 2


def test_simulation():
    M = two_state().to_float()
    assert simulate(M, 0, 0, seed=1) == [0]
    assert simulate(M, 1, 50, seed=5) == simulate(M, 1, 50, seed=5)
    D = rowmotion_chain_distributive(generate("random", 4, 8), 1).chain.to_float()
    path = simulate(D, 0, 12, seed=2)
    for a, b in zip(path, path[1:]):
        assert D.matrix[a, b] == 1


def test_replica_empirical_distribution():
    M = rowmotion_chain_distributive(antichain(4), F(1, 2)).chain
    finals = simulate_replicas(M.to_float(), 0, 20, 100_000, seed=7)
    emp = empirical_distribution(M, finals)
    pi = stationary(M)
    assert tv_distance(emp.values, [float(v) for v in pi.values]) < 0.02
    again = simulate_replicas(M.to_float(), 0, 20, 100_000, seed=7)
    assert np.array_equal(finals, again)


def test_distribution_after():
    M = two_state()
    assert distribution_after(M, 0, 2) == (F(1, 2), F(1, 2))


def test_chain_validation():
    with pytest.raises(InvalidChain):
        MarkovChain(["a", "b"], [[F(1, 2), F(1, 3)], [0, 1]])
    with pytest.raises(InvalidChain):
        MarkovChain(["a"], [[1, 0]])


def test_chain_json_roundtrip():
    M = rowmotion_chain_distributive(chain(2), F(1, 3)).chain
    back = chain_from_dict(M.to_dict())
    assert back.same_matrix(M) and back.meta == M.meta
    assert M.to_json() == back.to_json()


def test_distribution_csv():
    d = Distribution(("a", "b"), (F(1, 3), F(2, 3)))
    assert d.to_csv() == "state,probability\na,1/3\nb,2/3\n"
    with pytest.raises(DimensionMismatch):
        Distribution(("a",), (1, 0))


def test_bareiss_against_fractions():
    rng = random.Random(12)
    for _ in range(40):
        n = rng.randint(1, 7)
        while True:
            A = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
            if rank(A) == n:
                break
        x = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
        b_frac = [sum(A[i][j] * x[j] for j in range(n)) for i in range(n)]
        d = 1
        for v in b_frac:
            d = d * v.denominator // np.gcd(d, v.denominator)
        assert bareiss_solve([[a * d for a in row] for row in A],
                             [int(v * d) for v in b_frac]) == x


def test_rank():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[0, 0], [0, 0]]) == 0
    assert rank([[F(1, 2), 1], [1, 0]]) == 2
