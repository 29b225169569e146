"""Finite Markov chains: validation, classes, stationarity, TV distance, mixing.

Two scalar backends share one API: ``"rational"`` (entries are
:class:`fractions.Fraction`, every identity is checked exactly) and ``"float"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import (DimensionMismatch, InvalidChain, InvalidInput, InvalidProbability,
                     LimitExceeded, NotIrreducible)
from .linalg import bareiss_solve, integer_rows
from .probability import format_scalar, parse_probability

EXACT_POWER_LIMIT = 4096
FLOAT_TOL = 1e-12


class MarkovChain:
    """States plus a row-stochastic transition matrix.

    Parameters
    ----------
    states : sequence of str
        Opaque state labels; row/column ``i`` belongs to ``states[i]``.
    matrix : 2-d array-like
        Fractions (rational backend) or floats.
    meta : dict, optional
        Provenance carried into the JSON export.
    """

    def __init__(self, states: Sequence[str], matrix, meta: dict | None = None):
        self.states = tuple(str(s) for s in states)
        n = len(self.states)
        first = None
        for row in matrix:
            for x in row:
                first = x
                break
            break
        exact = first is None or isinstance(first, (Fraction, int))
        if exact:
            self.matrix = np.array([[Fraction(x) for x in row] for row in matrix], dtype=object)
            self.backend = "rational"
        else:
            self.matrix = np.asarray(matrix, dtype=float)
            self.backend = "float"
        if self.matrix.shape != (n, n):
            raise InvalidChain(f"matrix shape {self.matrix.shape} does not match {n} states")
        self.meta = dict(meta or {})
        self.index = {s: i for i, s in enumerate(self.states)}
        self._validate()

    def _validate(self):
        for i, row in enumerate(self.matrix):
            if any(x < 0 or x > 1 for x in row):
                raise InvalidChain(f"row {self.states[i]!r} has an entry outside [0, 1]")
            total = sum(row)
            ok = total == 1 if self.backend == "rational" else abs(total - 1) <= FLOAT_TOL
            if not ok:
                raise InvalidChain(f"row {self.states[i]!r} sums to {total}", row=self.states[i])

    @property
    def n(self) -> int:
        return len(self.states)

    def __len__(self):
        return self.n

    def successors(self, i: int) -> list[int]:
        return [j for j, q in enumerate(self.matrix[i]) if q != 0]

    def to_float(self) -> "MarkovChain":
        if self.backend == "float":
            return self
        return MarkovChain(self.states, self.matrix.astype(float), self.meta)

    def same_matrix(self, other: "MarkovChain") -> bool:
        return self.states == other.states and bool(np.all(self.matrix == other.matrix))

    def to_dict(self) -> dict:
        triplets = [[i, j, format_scalar(q)]
                    for i, row in enumerate(self.matrix) for j, q in enumerate(row) if q != 0]
        out = {"states": list(self.states), "backend": self.backend, "triplets": triplets}
        if self.meta:
            out["meta"] = self.meta
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def __repr__(self):
        return f"MarkovChain({self.n} states, backend={self.backend})"


def chain_from_dict(data: dict) -> MarkovChain:
    try:
        states = data["states"]
        n = len(states)
        vals = {(int(i), int(j)): parse_probability(q) for i, j, q in data["triplets"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed chain JSON: {exc}") from None
    exact = all(isinstance(v, Fraction) for v in vals.values())
    zero = Fraction(0) if exact else 0.0
    rows = [[vals.get((i, j), zero) for j in range(n)] for i in range(n)]
    if not exact:
        rows = [[float(x) for x in row] for row in rows]
    return MarkovChain(states, rows, data.get("meta"))


def load_chain(path) -> MarkovChain:
    with open(path) as fh:
        return chain_from_dict(json.load(fh))


@dataclass(frozen=True)
class Distribution:
    states: tuple
    values: tuple

    def __post_init__(self):
        if len(self.states) != len(self.values):
            raise DimensionMismatch("distribution length does not match its states")

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def prob(self, state: str):
        return self.values[self.states.index(state)]

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "probability"])
        for s, v in zip(self.states, self.values):
            w.writerow([s, format_scalar(v)])
        return buf.getvalue()


# -- communicating classes ------------------------------------------------------

def _tarjan(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return sorted(comps)


def communicating_classes(M: MarkovChain) -> list[list[int]]:
    """Strongly connected components of the positive-probability digraph."""
    return _tarjan(M.n, [M.successors(i) for i in range(M.n)])


def is_irreducible(M: MarkovChain) -> bool:
    return len(communicating_classes(M)) == 1


def _require_irreducible(M: MarkovChain):
    classes = communicating_classes(M)
    if len(classes) != 1:
        raise NotIrreducible(f"chain has {len(classes)} communicating classes",
                             classes=[[M.states[i] for i in c] for c in classes])


# -- stationary distribution -----------------------------------------------------

def stationary(M: MarkovChain) -> Distribution:
    """The unique stationary distribution of an irreducible chain."""
    _require_irreducible(M)
    n = M.n
    if M.backend == "rational":
        rows = [[M.matrix[s][i] - (1 if s == i else 0) for s in range(n)] for i in range(n - 1)]
        rows.append([Fraction(1)] * n)
        A = integer_rows(rows)
        b = [0] * (n - 1) + [1]
        pi = bareiss_solve(A, b)
        return Distribution(M.states, tuple(pi))
    A = M.matrix.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    x = np.linalg.solve(A, b)
    for _ in range(3):
        r = b - A @ x
        x = x + np.linalg.solve(A, r)
    x = np.clip(x, 0.0, None)
    return Distribution(M.states, tuple(float(v) for v in x / x.sum()))


def is_stationary(M: MarkovChain, pi: Sequence) -> bool:
    vec = np.array(list(pi), dtype=object if M.backend == "rational" else float)
    out = vec.dot(M.matrix)
    if M.backend == "rational":
        return all(a == b for a, b in zip(out, vec))
    return bool(np.allclose(out, vec, atol=1e-12))


# -- total variation -------------------------------------------------------------

def tv_distance(mu, nu):
    """Half the L1 distance between two aligned distributions."""
    mu, nu = list(mu), list(nu)
    if len(mu) != len(nu):
        raise DimensionMismatch(f"distributions of length {len(mu)} and {len(nu)}")
    return sum(abs(a - b) for a, b in zip(mu, nu)) / 2


def tv_distance_events(mu, nu):
    """max over events A of |mu(A) - nu(A)|, by brute force over all events."""
    mu, nu = list(mu), list(nu)
    if len(mu) != len(nu):
        raise DimensionMismatch(f"distributions of length {len(mu)} and {len(nu)}")
    best = 0
    for event in range(1 << len(mu)):
        d = abs(sum(mu[i] - nu[i] for i in range(len(mu)) if event >> i & 1))
        best = max(best, d)
    return best


def distribution_after(M: MarkovChain, start: int, steps: int) -> tuple:
    """Row ``start`` of Q^steps."""
    row = np.zeros(M.n, dtype=object if M.backend == "rational" else float)
    row[:] = Fraction(0) if M.backend == "rational" else 0.0
    row[start] = Fraction(1) if M.backend == "rational" else 1.0
    for _ in range(steps):
        row = row.dot(M.matrix)
    return tuple(row)


class _ExactPowers:
    """Q^t held as an integer matrix over the denominator d^t."""

    def __init__(self, M: MarkovChain, pi: Distribution):
        self.d = lcm(*(q.denominator for q in M.matrix.flat))
        self.N = np.array([[int(q * self.d) for q in row] for row in M.matrix], dtype=object)
        self.e = lcm(*(Fraction(v).denominator for v in pi.values))
        self.pi_num = [int(Fraction(v) * self.e) for v in pi.values]
        self.D = np.identity(M.n, dtype=int).astype(object)
        self.scale = 1  # d^t
        self.t = 0

    def step(self):
        self.D = self.D.dot(self.N)
        self.scale *= self.d
        self.t += 1

    def row_excess(self, x: int) -> int:
        """2 * TV(row x, pi) * d^t * e, an integer."""
        e, sc = self.e, self.scale
        return sum(abs(int(a) * e - b * sc) for a, b in zip(self.D[x], self.pi_num))

    def worst_tv(self) -> Fraction:
        worst = max(self.row_excess(x) for x in range(len(self.pi_num)))
        return Fraction(worst, 2 * self.scale * self.e)


def worst_tv_curve(M: MarkovChain, t_max: int) -> list:
    """max_x d_TV(Q^t(x, .), pi) for t = 0..t_max."""
    pi = stationary(M)
    if M.backend == "rational":
        pw = _ExactPowers(M, pi)
        out = [pw.worst_tv()]
        for _ in range(t_max):
            pw.step()
            out.append(pw.worst_tv())
        return out
    pivec = np.array(pi.values)
    D = np.eye(M.n)
    out = []
    for t in range(t_max + 1):
        if t:
            D = D @ M.matrix
        out.append(float(np.max(0.5 * np.abs(D - pivec).sum(axis=1))))
    return out


def mixing_time(M: MarkovChain, eps, limit: int = EXACT_POWER_LIMIT,
                max_steps: int = 100_000) -> int:
    """Smallest t with d_TV(Q^t(x, .), pi) < eps for every start x."""
    if M.n > limit:
        raise LimitExceeded(f"exact mixing time limited to {limit} states, got {M.n}",
                            limit=limit, size=M.n)
    pi = stationary(M)
    if M.backend == "rational":
        eps = Fraction(eps)
        pw = _ExactPowers(M, pi)
        while True:
            bound = 2 * eps.numerator * pw.scale * pw.e
            if all(pw.row_excess(x) * eps.denominator < bound for x in range(M.n)):
                return pw.t
            if pw.t >= max_steps:
                break
            pw.step()
    else:
        pivec = np.array(pi.values)
        D = np.eye(M.n)
        for t in range(max_steps + 1):
            if np.max(0.5 * np.abs(D - pivec).sum(axis=1)) < eps:
                return t
            D = D @ M.matrix
    raise LimitExceeded(f"chain did not mix within {max_steps} steps", max_steps=max_steps)


# -- coupling bounds ---------------------------------------------------------------

def _steps_until_below(rate, eps) -> int:
    """ceil(log eps / log(1 - rate)): the least k with (1 - rate)^k <= eps, decided exactly."""
    base = 1 - Fraction(rate)
    eps = Fraction(eps)
    if eps >= 1:
        return 0
    k = max(0, math.ceil(math.log(eps) / math.log(base)) - 2)
    power = base ** k
    while power > eps:
        power *= base
        k += 1
    while k > 0 and power / base <= eps:
        power /= base
        k -= 1
    return k


def _check_eps(eps):
    if not (isinstance(eps, (Fraction, int, float)) and 0 < eps < 1):
        raise InvalidProbability(f"epsilon must lie in (0, 1), got {eps!r}")


def coupling_bound(eps, p_max, size: int) -> int:
    """ceil(log eps / log(1 - (1 - p_max)^size)); size is a width or an independence number."""
    _check_eps(eps)
    if not 0 < p_max < 1:
        raise InvalidProbability(f"maximum probability must lie in (0, 1), got {p_max!r}")
    return _steps_until_below((1 - p_max) ** size, eps)


def refined_coupling_bound(eps, probs: dict, family: Iterable[Iterable]) -> int:
    """As :func:`coupling_bound` with the rate min over the family of prod (1 - p)."""
    _check_eps(eps)
    rates = []
    for members in family:
        r = 1
        for x in members:
            if not 0 < probs[x] < 1:
                raise InvalidProbability(f"probability of {x!r} must lie in (0, 1)")
            r *= 1 - probs[x]
        rates.append(r)
    return _steps_until_below(min(rates), eps)


# -- simulation ---------------------------------------------------------------------

def _cumulative(M: MarkovChain) -> np.ndarray:
    cdf = np.cumsum(M.matrix.astype(float), axis=1)
    cdf[:, -1] = np.inf
    return cdf


def simulate(M: MarkovChain, start: int, steps: int, seed: int, replica: int = 0) -> list[int]:
    """One trajectory by inverse-CDF sampling; the stream is derived from (seed, replica)."""
    rng = np.random.default_rng([seed, replica])
    cdf = _cumulative(M)
    path = [start]
    x = start
    for u in rng.random(steps):
        x = int(np.searchsorted(cdf[x], u, side="right"))
        path.append(x)
    return path


def simulate_replicas(M: MarkovChain, start: int, steps: int, replicas: int, seed: int) -> np.ndarray:
    """Final states of independent replicas, advanced together from one seeded stream."""
    rng = np.random.default_rng([seed, 0x5EED])
    cdf = _cumulative(M)
    x = np.full(replicas, start, dtype=np.int64)
    for _ in range(steps):
        u = rng.random(replicas)
        rows = cdf[x]
        x = (rows <= u[:, None]).sum(axis=1)
    return x


def empirical_distribution(M: MarkovChain, finals: Iterable[int]) -> Distribution:
    counts = np.bincount(np.asarray(list(finals), dtype=np.int64), minlength=M.n)
    total = int(counts.sum())
    return Distribution(M.states, tuple(int(c) / total for c in counts))
