"""Probability assignments: parsing, validation and random rational draws."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import InvalidProbability

Scalar = Union[Fraction, float]

_FRACTION_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+)?\s*$")


def parse_probability(text) -> Scalar:
    """Parse ``"3/4"`` or ``"1"`` exactly; decimals such as ``"0.25"`` become floats."""
    if isinstance(text, (Fraction, int)):
        value = Fraction(text)
    elif isinstance(text, float):
        value = text
    else:
        s = str(text).strip()
        if _FRACTION_RE.match(s):
            value = Fraction(s.replace(" ", ""))
        else:
            try:
                value = float(s)
            except ValueError:
                raise InvalidProbability(f"cannot parse probability {text!r}") from None
    if not 0 <= value <= 1:
        raise InvalidProbability(f"probability {text!r} outside [0, 1]")
    return value


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, int))


def probability_vector(labels: Sequence[str], probs) -> list:
    """Align a probability assignment with ``labels``.

    ``probs`` may be a single scalar (uniform), a mapping label -> value, or a
    sequence aligned with ``labels``. Every label must receive exactly one value.
    """
    if isinstance(probs, Mapping):
        extra = set(probs) - set(labels)
        if extra:
            raise InvalidProbability(f"probabilities given for unknown elements {sorted(extra)}")
        missing = [x for x in labels if x not in probs]
        if missing:
            raise InvalidProbability(f"no probability for elements {missing}")
        values = [parse_probability(probs[x]) for x in labels]
    elif isinstance(probs, (str, int, float, Fraction)):
        values = [parse_probability(probs)] * len(labels)
    else:
        values = [parse_probability(v) for v in probs]
        if len(values) != len(labels):
            raise InvalidProbability(
                f"expected {len(labels)} probabilities, got {len(values)}")
    return values


def uniform(labels: Sequence[str], p) -> dict:
    p = parse_probability(p)
    return {x: p for x in labels}


def random_rational(rng, max_den: int = 9) -> Fraction:
    """A random rational strictly inside (0, 1) with denominator at most ``max_den``."""
    den = rng.randint(2, max_den)
    return Fraction(rng.randint(1, den - 1), den)


def random_assignment(labels: Sequence[str], rng, max_den: int = 9) -> dict:
    return {x: random_rational(rng, max_den) for x in labels}


def format_scalar(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return repr(float(value))
