import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from rowmotion_chains.poset import Poset


@pytest.fixture
def rng():
    return random.Random(20240607)


@st.composite
def posets(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Poset([str(i + 1) for i in range(n)], chosen)


rationals = st.builds(lambda d, k: Fraction(k % (d - 1) + 1, d),
                      st.integers(2, 9), st.integers(0, 100))
