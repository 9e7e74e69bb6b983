from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ubacheck import generators
from ubacheck.automata import Alphabet
from ubacheck.markov import DtmcError, DtmcParseError, parse_dtmc, serialize_dtmc, uniform_chain

ONE_STATE = """dtmc 1 0
init 0 1
label 0 -
trans 0 0 1
"""

COUNTER = """# two-state chain with all probabilities 1/2
dtmc 2 1
ap a
init 0 1/2
init 1 1/2
label 0 a
label 1 -
trans 0 0 1/2
trans 0 1 1/2
trans 1 0 1/2
trans 1 1 1/2
"""


def test_one_state():
    m = parse_dtmc(ONE_STATE)
    assert m.n_states == 1
    assert m.labels == (frozenset(),)


def test_fractions_are_exact():
    m = parse_dtmc(COUNTER)
    assert m.exact
    assert m.trans[0] == ((0, Fraction(1, 2)), (1, Fraction(1, 2)))
    assert m.labels[0] == frozenset({"a"})


def test_decimal_rows():
    m = parse_dtmc(COUNTER.replace("1/2", "0.5"))
    assert not m.exact


def test_row_sum_violation_names_state():
    bad = COUNTER.replace("trans 1 1 1/2", "trans 1 1 0.4")
    with pytest.raises(DtmcParseError, match="state 1"):
        parse_dtmc(bad)


def test_negative_probability():
    with pytest.raises(DtmcParseError):
        parse_dtmc(COUNTER.replace("trans 1 1 1/2", "trans 1 1 -1/2"))


def test_unknown_state():
    with pytest.raises(DtmcParseError):
        parse_dtmc(COUNTER.replace("trans 1 1 1/2", "trans 1 7 1/2"))


def test_missing_label():
    with pytest.raises(DtmcParseError, match="label"):
        parse_dtmc(COUNTER.replace("label 1 -\n", ""))


def test_undeclared_proposition():
    with pytest.raises(DtmcParseError):
        parse_dtmc(COUNTER.replace("label 1 -", "label 1 zz"))


def test_roundtrip_fixtures():
    for text in (ONE_STATE, COUNTER):
        m = parse_dtmc(text)
        assert parse_dtmc(serialize_dtmc(m)) == m
    chain = generators.blw13()[1]
    back = parse_dtmc(serialize_dtmc(chain))
    assert back.trans == chain.trans and back.labels == chain.labels


@given(st.integers(1, 6), st.data())
def test_roundtrip_random(n, data):
    rows = []
    for _ in range(n):
        weights = data.draw(st.lists(st.integers(0, 5), min_size=n, max_size=n))
        if sum(weights) == 0:
            weights[0] = 1
        total = sum(weights)
        rows.append(tuple((t, Fraction(w, total)) for t, w in enumerate(weights) if w))
    text = [f"dtmc {n} 1", "ap p", "init 0 1"]
    for s in range(n):
        text.append(f"label {s} {'p' if s % 2 else '-'}")
        text += [f"trans {s} {t} {p.numerator}/{p.denominator}" for t, p in rows[s]]
    m = parse_dtmc("\n".join(text))
    assert parse_dtmc(serialize_dtmc(m)) == m


def test_uniform_chain():
    m = uniform_chain(Alphabet.plain(["a", "b"]))
    assert m.n_states == 2
    assert all(p == Fraction(1, 2) for row in m.trans for _, p in row)
    m3 = uniform_chain(["a", "b", "c"])
    assert all(len(row) == 3 and all(p == Fraction(1, 3) for _, p in row) for row in m3.trans)
    assert sorted(m3.labels) == ["a", "b", "c"]


def test_uniform_chain_too_small():
    with pytest.raises(DtmcError):
        uniform_chain(["a"])
