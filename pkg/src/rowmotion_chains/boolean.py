"""The rowmotion chain of the Boolean lattice with a single probability p.

P is an n-element antichain, so J(P) is the Boolean lattice and each step
keeps every element of I with probability 1 - p, drops it with probability
p, and adds every element outside I. The chain is therefore a product of n
two-state chains, which gives the eigenbasis, the moment identities and an
independent product-Binomial oracle for the total variation curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .chains import rowmotion_chain_distributive, stationary_closed_form
from .errors import (InvalidC, InvalidInput, InvalidProbability, InvalidSize,
                     LimitExceeded, MomentMismatch, SpectrumMismatch)
from .markov import MarkovChain, stationary
from .poset import antichain, popcount

LUMPED_LIMIT = 4096
FULL_STATE_LIMIT = 14
SPECTRUM_LIMIT = 8


@dataclass(frozen=True)
class BooleanChainSpec:
    n: int
    p: object  # Fraction or float

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidSize(f"n must be a positive integer, got {self.n!r}")
        if not 0 < self.p < 1:
            raise InvalidProbability(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def exact(self) -> bool:
        return isinstance(self.p, (Fraction, int))

    def ratio(self) -> tuple[int, int]:
        """p = a / b in lowest terms."""
        if not self.exact:
            raise InvalidInput("exact computation needs a rational p")
        q = Fraction(self.p)
        return q.numerator, q.denominator

    @property
    def log_scale(self) -> float:
        """1/2 log_{1/p} n, the cutoff location."""
        return 0.5 * math.log(self.n) / math.log(1 / float(self.p))


def boolean_chain(spec: BooleanChainSpec) -> MarkovChain:
    """The full 2^n-state chain M_{J(antichain(n))}."""
    if spec.n > FULL_STATE_LIMIT:
        raise LimitExceeded(f"full-state chain limited to n <= {FULL_STATE_LIMIT}",
                            limit=FULL_STATE_LIMIT, size=spec.n)
    return _boolean_chain(spec.n, spec.p)


@lru_cache(maxsize=8)
def _boolean_chain(n: int, p) -> MarkovChain:
    return rowmotion_chain_distributive(antichain(n), p).chain


# -- eigenbasis --------------------------------------------------------------------

def _rational_sqrt(q: Fraction):
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def scaled_eigenfunction(spec: BooleanChainSpec, I: int, A: int):
    """f_I(A) * p^{|I|/2} = (-p)^{|I & A|}; always rational for rational p."""
    return (-spec.p) ** popcount(I & A)


def eigenfunction(spec: BooleanChainSpec, I: int, A: int):
    """f_I(A) = p^{-|I|/2} (-p)^{|I & A|}, exact when the square root is rational."""
    k = popcount(I)
    scaled = scaled_eigenfunction(spec, I, A)
    if spec.exact:
        p = Fraction(spec.p)
        if k % 2 == 0:
            return scaled / p ** (k // 2)
        root = _rational_sqrt(p)
        if root is not None:
            return scaled / root ** k
    return float(scaled) * float(spec.p) ** (-k / 2)


@dataclass
class SpectrumReport:
    n: int
    p: Fraction
    multiplicities: dict          # k -> number of I with eigenvalue (-p)^k
    eigen_checks: int
    orthogonality_checks: int

    def eigenvalues(self) -> list:
        out = []
        for k, mult in sorted(self.multiplicities.items()):
            out.extend([(-self.p) ** k] * mult)
        return out


def _int_matrix(values, n_bound_bits: int):
    dtype = np.int64 if n_bound_bits < 62 else object
    return np.array(values, dtype=dtype)


def verify_spectrum(spec: BooleanChainSpec) -> SpectrumReport:
    """Check Q f_I = (-p)^{|I|} f_I and pi-orthonormality of the f_I exactly.

    With p = a/b everything is cleared to integers:
    Q b^n has entries a^{n-|A'|} (b-a)^{|A & A'|} b^{n-|A|},
    G_I(A) = b^n f_I(A) p^{|I|/2} = (-a)^{|I & A|} b^{n-|I & A|},
    W(A) = (a+b)^n pi(A) = b^{|A|} a^{n-|A|}.
    """
    n = spec.n
    if n > SPECTRUM_LIMIT:
        raise LimitExceeded(f"spectrum verification limited to n <= {SPECTRUM_LIMIT}",
                            limit=SPECTRUM_LIMIT, size=n)
    a, b = spec.ratio()
    N = 1 << n
    full = N - 1
    pc = [popcount(m) for m in range(N)]
    big = max(a, b)
    # largest intermediate: |G|^2 * W summed over 2^n states
    bits = 3 * n * big.bit_length() + n + 2
    Q = [[a ** (n - pc[B]) * (b - a) ** pc[A & B] * b ** (n - pc[A]) if (full & ~B) & ~A == 0 else 0
          for B in range(N)] for A in range(N)]
    G = [[(-a) ** pc[I & A] * b ** (n - pc[I & A]) for A in range(N)] for I in range(N)]
    W = [b ** pc[A] * a ** (n - pc[A]) for A in range(N)]
    Qm, Gm, Wv = _int_matrix(Q, bits), _int_matrix(G, bits), _int_matrix(W, bits)
    QG = Qm.dot(Gm.T)  # column I is Q applied to G_I
    for I in range(N):
        k = pc[I]
        scale = (-a) ** k * b ** (n - k)
        if not all(int(QG[A, I]) == scale * G[I][A] for A in range(N)):
            raise SpectrumMismatch(f"eigen relation fails for I={I:b}", witness=I)
    gram = (Gm * Wv).dot(Gm.T)
    for I in range(N):
        for J in range(N):
            want = a ** pc[I] * b ** (2 * n - pc[I]) * (a + b) ** n if I == J else 0
            if int(gram[I, J]) != want:
                raise SpectrumMismatch(f"orthonormality fails for I={I:b}, J={J:b}",
                                       witness=[I, J])
    mult = {}
    for I in range(N):
        mult[pc[I]] = mult.get(pc[I], 0) + 1
    for k, m in mult.items():
        if m != comb(n, k):
            raise SpectrumMismatch(f"multiplicity of (-p)^{k} is {m}, expected {comb(n, k)}",
                                   witness=k)
    return SpectrumReport(n, Fraction(a, b), mult, N * N, N * N)


# -- cutoff bounds -------------------------------------------------------------------

def cutoff_upper(spec: BooleanChainSpec, c) -> float:
    """Upper bound at t = 1/2 log_{1/p} n + c: (1/2) sqrt(exp(p^{2c-1}) - 1); needs c > 1/2."""
    if not c > 0.5:
        raise InvalidC(f"upper bound needs c > 1/2, got {c!r}", c=c)
    return 0.5 * math.sqrt(math.expm1(float(spec.p) ** (2 * float(c) - 1)))


def cutoff_lower(spec: BooleanChainSpec, c) -> float:
    """Lower bound at t = 1/2 log_{1/p} n - c: 1 - 4 p^{2c+1} - 4 p^{2c}; needs 0 < c < 1/2 log_{1/p} n.

    Small c gives a negative, vacuous, value; it is returned unclamped.
    """
    if not 0 < c < spec.log_scale:
        raise InvalidC(f"lower bound needs 0 < c < {spec.log_scale:g}, got {c!r}", c=c)
    p = float(spec.p)
    return 1 - 4 * p ** (2 * float(c) + 1) - 4 * p ** (2 * float(c))


def upper_applies(spec: BooleanChainSpec, t: int) -> bool:
    return t - spec.log_scale > 0.5


def lower_applies(spec: BooleanChainSpec, t: int) -> bool:
    return 0 < spec.log_scale - t < spec.log_scale


# -- the lumped size chain ---------------------------------------------------------

def lumped_transition(spec: BooleanChainSpec) -> list[list]:
    """From size s the new size is n - s + Binomial(s, 1 - p)."""
    n, p = spec.n, spec.p
    one = Fraction(1) if spec.exact else 1.0
    rows = []
    for s in range(n + 1):
        row = [one * 0] * (n + 1)
        for k in range(s + 1):
            row[n - s + k] = comb(s, k) * (one - p) ** k * (one * p) ** (s - k)
        rows.append(row)
    return rows


def lumped_chain(spec: BooleanChainSpec) -> MarkovChain:
    if spec.n > LUMPED_LIMIT:
        raise LimitExceeded(f"lumped chain limited to n <= {LUMPED_LIMIT}",
                            limit=LUMPED_LIMIT, size=spec.n)
    return MarkovChain([str(s) for s in range(spec.n + 1)], lumped_transition(spec),
                       meta={"kind": "boolean-lumped", "n": spec.n})


def _moment_polys(spec: BooleanChainSpec):
    """Coefficient lists (constant first) of f and g."""
    n, p = spec.n, Fraction(spec.p)
    f = [Fraction(1), -(1 + p) / n]
    g = [-Fraction(n - 1) / (p + 1), (p + 2 * n - 1) / n, -(p + 1) / n]
    return f, g


def _poly_eval(coeffs, x):
    return sum(c * x ** i for i, c in enumerate(coeffs))


def _poly_mul(u, v):
    out = [Fraction(0)] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            out[i + j] += x * y
    return out


def _poly_add(*polys):
    out = [Fraction(0)] * max(len(q) for q in polys)
    for q in polys:
        for i, c in enumerate(q):
            out[i] += c
    return out


@dataclass
class MomentReport:
    n: int
    p: Fraction
    t_max: int
    checks: list = field(default_factory=list)  # (name, detail) pairs that passed


def moment_check(spec: BooleanChainSpec, t_max: int = 20) -> MomentReport:
    """Verify the four moment identities on the lumped chain, exactly.

    (i) E[f(X')|X] = -p f(X) and E[g(X')|X] = p^2 g(X);
    (ii) f^2 = -(1+p)/n g + (1-p)/n f + p/n as polynomials;
    (iii) Var(f(X_t) | X_0 = 0) = p/n - p^{2t}/n + ((1-p)/n)(-p)^t;
    (iv) at stationarity E f = E g = 0 and Var f = p/n.
    """
    if not spec.exact:
        raise InvalidInput("moment identities are checked with a rational p")
    n, p = spec.n, Fraction(spec.p)
    T = lumped_transition(spec)
    f, g = _moment_polys(spec)
    fv = [_poly_eval(f, x) for x in range(n + 1)]
    gv = [_poly_eval(g, x) for x in range(n + 1)]
    report = MomentReport(n, p, t_max)

    for s in range(n + 1):
        ef = sum(T[s][x] * fv[x] for x in range(n + 1))
        if ef != -p * fv[s]:
            raise MomentMismatch(f"E[f(X')|X={s}] != -p f({s})", identity="f-step", state=s)
        eg = sum(T[s][x] * gv[x] for x in range(n + 1))
        if eg != p * p * gv[s]:
            raise MomentMismatch(f"E[g(X')|X={s}] != p^2 g({s})", identity="g-step", state=s)
    report.checks.append(("one-step f and g", n + 1))

    lhs = _poly_mul(f, f)
    rhs = _poly_add([c * (-(1 + p) / n) for c in g], [c * (1 - p) / n for c in f], [p / n])
    if _poly_add(lhs, [-c for c in rhs]) != [0] * len(rhs):
        raise MomentMismatch("polynomial identity for f^2 fails", identity="f-squared")
    report.checks.append(("f^2 polynomial identity", len(rhs)))

    dist = [Fraction(0)] * (n + 1)
    dist[0] = Fraction(1)
    for t in range(t_max + 1):
        if t:
            new = [Fraction(0)] * (n + 1)
            for s, w in enumerate(dist):
                if w:
                    row = T[s]
                    for x in range(n - s, n + 1):
                        new[x] += w * row[x]
            dist = new
        mean = sum(w * v for w, v in zip(dist, fv))
        var = sum(w * v * v for w, v in zip(dist, fv)) - mean * mean
        want = p / n - p ** (2 * t) / n + (1 - p) / n * (-p) ** t
        if var != want:
            raise MomentMismatch(f"Var(f(X_{t})) = {var}, expected {want}",
                                 identity="variance", t=t)
    report.checks.append(("variance from 0", t_max + 1))

    pi = stationary(lumped_chain(spec)).values
    ef = sum(w * v for w, v in zip(pi, fv))
    eg = sum(w * v for w, v in zip(pi, gv))
    vf = sum(w * v * v for w, v in zip(pi, fv)) - ef * ef
    if ef != 0 or eg != 0 or vf != p / n:
        raise MomentMismatch("stationary moments differ", identity="stationary",
                             mean_f=str(ef), mean_g=str(eg), var_f=str(vf))
    report.checks.append(("stationary moments", 3))
    return report


# -- exact TV curves ---------------------------------------------------------------

def _start_mask(spec: BooleanChainSpec, start: str) -> int:
    if start == "empty":
        return 0
    if start == "full":
        return (1 << spec.n) - 1
    raise InvalidInput(f"start must be 'empty' or 'full', got {start!r}")


def _lumped_step(D: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """One step on integer size weights; the common denominator grows by b^n.

    New generating function: sum_s D_s (a + (b-a) z)^s (b z)^{n-s}, by Horner.
    """
    c = b - a
    S = np.array([D[n]], dtype=object)
    bpow = 1
    for k in range(1, n + 1):
        T = np.empty(k + 1, dtype=object)
        T[:k] = S if a == 1 else S * a
        T[k] = 0
        T[1:] += S if c == 1 else S * c
        bpow *= b
        T[k] += D[n - k] * bpow
        S = T
    return S


def _stationary_weights(n: int, a: int, b: int) -> list[int]:
    """(a+b)^n * pi(size s) = C(n,s) b^s a^{n-s}."""
    return [comb(n, s) * b ** s * a ** (n - s) for s in range(n + 1)]


def _tv_from_weights(D, scale: int, piw, pscale: int) -> Fraction:
    diff = sum(abs(int(d) * pscale - w * scale) for d, w in zip(D, piw))
    return Fraction(diff, 2 * scale * pscale)


def _curve_lumped(spec: BooleanChainSpec, t_max: int, start: str) -> list:
    n = spec.n
    if n > LUMPED_LIMIT:
        raise LimitExceeded(f"lumped TV limited to n <= {LUMPED_LIMIT}",
                            limit=LUMPED_LIMIT, size=n)
    a, b = spec.ratio()
    D = np.zeros(n + 1, dtype=object)
    D[:] = 0
    D[popcount(_start_mask(spec, start))] = 1
    piw, pscale = _stationary_weights(n, a, b), (a + b) ** n
    scale, step_scale = 1, b ** n
    out = [(0, _tv_from_weights(D, scale, piw, pscale))]
    for t in range(1, t_max + 1):
        D = _lumped_step(D, n, a, b)
        scale *= step_scale
        out.append((t, _tv_from_weights(D, scale, piw, pscale)))
    return out


def _curve_full(spec: BooleanChainSpec, t_max: int, start: str) -> list:
    if spec.n > FULL_STATE_LIMIT:
        raise LimitExceeded(f"full-state TV limited to n <= {FULL_STATE_LIMIT}",
                            limit=FULL_STATE_LIMIT, size=spec.n)
    M = boolean_chain(spec)
    # the closed form is checked against the exact solve elsewhere; solving 2^n states is not cheap
    pi = stationary_closed_form("distributive", antichain(spec.n), spec.p).values
    d = math.lcm(*(q.denominator for q in M.matrix.flat))
    succ = [[(j, int(M.matrix[i, j] * d)) for j in M.successors(i)] for i in range(M.n)]
    e = math.lcm(*(q.denominator for q in pi))
    pi_num = [int(q * e) for q in pi]
    # states are order ideals in ascending mask order, i.e. index == mask
    D = [0] * M.n
    D[_start_mask(spec, start)] = 1
    scale = 1
    out = [(0, _tv_from_weights(D, scale, pi_num, e))]
    for t in range(1, t_max + 1):
        new = [0] * M.n
        for i, w in enumerate(D):
            if w:
                for j, q in succ[i]:
                    new[j] += w * q
        D, scale = new, scale * d
        out.append((t, _tv_from_weights(D, scale, pi_num, e)))
    return out


def _q_in(spec_p: Fraction, t: int, start_in: bool) -> Fraction:
    """P(a fixed coordinate is in at time t); the coordinates evolve independently."""
    pi = 1 / (1 + spec_p)
    q0 = Fraction(1 if start_in else 0)
    return pi + (-spec_p) ** t * (q0 - pi)


def tv_product(spec: BooleanChainSpec, t: int, start_size: int) -> Fraction:
    """TV from a start of size m via the product structure, in O(n^2) exact terms.

    A state is summarized by (k in the start set, l outside it); both the law
    at time t and pi are constant on these classes.
    """
    n, m = spec.n, start_size
    if not 0 <= m <= n:
        raise InvalidInput(f"start size must lie in 0..{n}, got {m}")
    a, b = spec.ratio()
    p = Fraction(a, b)
    W = (a + b) * b ** t  # common denominator of q1, q0 and pi
    u1 = int(_q_in(p, t, True) * W)
    u0 = int(_q_in(p, t, False) * W)
    pin, pout = b ** (t + 1), a * b ** t
    inside = [comb(m, k) * u1 ** k * (W - u1) ** (m - k) for k in range(m + 1)]
    outside = [comb(n - m, l) * u0 ** l * (W - u0) ** (n - m - l) for l in range(n - m + 1)]
    total = 0
    for k in range(m + 1):
        ck = comb(m, k)
        for l in range(n - m + 1):
            target = ck * comb(n - m, l) * pin ** (k + l) * pout ** (n - k - l)
            total += abs(inside[k] * outside[l] - target)
    return Fraction(total, 2 * W ** n)


def _curve_product(spec: BooleanChainSpec, t_max: int, start: str) -> list:
    """Size at time t is Binomial(n, q_t); summed with integer numerators for speed."""
    n = spec.n
    a, b = spec.ratio()
    p = Fraction(a, b)
    start_in = start == "full"
    _start_mask(spec, start)
    piw, pscale = _stationary_weights(n, a, b), (a + b) ** n
    out = []
    for t in range(t_max + 1):
        q = _q_in(p, t, start_in)
        u, w = q.numerator, q.denominator
        D = [comb(n, s) * u ** s * (w - u) ** (n - s) for s in range(n + 1)]
        out.append((t, _tv_from_weights(D, w ** n, piw, pscale)))
    return out


def exact_tv_curve(spec: BooleanChainSpec, t_max: int, start: str = "empty",
                   mode: str = "lumped") -> list:
    """[(t, d_TV(Q^t(start, .), pi))] for t = 0..t_max, exact.

    ``mode="lumped"`` propagates the size distribution (the start matters only
    through its size), ``"full"`` propagates over all 2^n states, ``"product"``
    uses the closed Binomial form of each coordinate.
    """
    if t_max < 0:
        raise InvalidInput("t_max must be non-negative")
    runner = {"lumped": _curve_lumped, "full": _curve_full, "product": _curve_product}.get(mode)
    if runner is None:
        raise InvalidInput(f"unknown curve mode {mode!r}")
    return runner(spec, t_max, start)


def worst_start_tv(spec: BooleanChainSpec, t: int) -> Fraction:
    """max over all starts; by symmetry only the start size matters."""
    return max(tv_product(spec, t, m) for m in range(spec.n + 1))


def l2_bound(spec: BooleanChainSpec, t: int, start_size: int) -> Fraction:
    """sum_{I != empty} f_I(x)^2 p^{2|I|t} for |x| = m, which bounds 4 d_TV^2.

    The sum factors over coordinates: (1 + p^{2t+1})^m (1 + p^{2t-1})^{n-m} - 1.
    """
    p = Fraction(spec.p) if spec.exact else spec.p
    m = start_size
    return (1 + p ** (2 * t + 1)) ** m * (1 + p ** (2 * t - 1)) ** (spec.n - m) - 1


def cutoff_rows(spec: BooleanChainSpec, t_max: int, start: str = "empty",
                mode: str = "lumped") -> list[dict]:
    """One row per t with the exact TV and whichever bounds apply at that t."""
    rows = []
    ls = spec.log_scale
    for t, tv in exact_tv_curve(spec, t_max, start, mode):
        c = t - ls
        upper = cutoff_upper(spec, c) if upper_applies(spec, t) else None
        lower = cutoff_lower(spec, ls - t) if lower_applies(spec, t) else None
        rows.append({"n": spec.n, "p": spec.p, "t": t, "tv_exact": tv,
                     "upper_bound": upper, "lower_bound": lower, "c": c})
    return rows
