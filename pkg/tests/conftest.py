from fractions import Fraction
from itertools import product

import hypothesis
import pytest
from hypothesis import strategies as st

from sumquot.ratcore import RatSet

hypothesis.settings.register_profile("ci", deadline=None, max_examples=60)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("ci")

positive_rationals = st.builds(Fraction, st.integers(1, 60), st.integers(1, 12))


@st.composite
def positive_sets(draw, min_size=1, max_size=8):
    return RatSet(draw(st.lists(positive_rationals, min_size=min_size, max_size=max_size, unique=True)))


def brute_quotient(A):
    """(a+b)/(c+d) over every quadruple; independent of the sumset route."""
    A = list(A)
    return {Fraction(a + b) / (c + d) for a, b, c, d in product(A, repeat=4) if c + d != 0}


@pytest.fixture
def small_gp():
    return RatSet([1, 2, 4, 8])
