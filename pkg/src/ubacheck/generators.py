"""Fixture and benchmark automata (and the one fixture chain).

Families over AP valuations use one-hot alphabets where the intended
alphabet is a set of letters, so ``{a,b,c}`` means the three valuations in
which exactly one of ``a``, ``b``, ``c`` holds.
"""

from fractions import Fraction

from .automata import Alphabet, Nba
from .markov import Dtmc

FAMILIES = ("complete", "nearly-complete", "fig1-left", "fig1-right", "blw13")
MAX_K = 12


def letters(*names):
    """One-hot valuation alphabet, one symbol per letter."""
    return Alphabet.from_aps(names, [1 << i for i in range(len(names))])


def _bit_alphabet():
    return Alphabet.from_aps(("p",))


def _check_k(k, lo=1, hi=MAX_K):
    if not isinstance(k, int) or not lo <= k <= hi:
        raise ValueError(f"k must be an integer in [{lo}, {hi}], got {k!r}")


def _gadget_automaton(k, complete):
    """Shared construction of the complete and nearly complete automata.

    State 0 is initial and final and moves on any symbol to one of ``2**k``
    branch states ``b_w``. Each branch moves on any symbol into its gadget,
    a path of ``k`` states that reads the bits of ``w`` (most significant
    first, bit 1 = ``p`` holds) and returns to state 0. In the nearly
    complete variant the last state of the all-zero gadget loops on 0
    instead of returning.
    """
    _check_k(k)
    alphabet = _bit_alphabet()
    zero, one = alphabet.symbols
    m = 1 << k
    n = 1 + m + m * k
    trans = []
    names = ["q0"] + [f"b{w:0{k}b}" for w in range(m)]
    names += [f"g{w:0{k}b}_{i}" for w in range(m) for i in range(1, k + 1)]

    def gadget(w, i):
        return 1 + m + w * k + (i - 1)

    for w in range(m):
        for sym in (zero, one):
            trans.append((0, sym, 1 + w))
            trans.append((1 + w, sym, gadget(w, 1)))
        for i in range(1, k + 1):
            bit = w >> (k - i) & 1
            sym = one if bit else zero
            if i < k:
                dst = gadget(w, i + 1)
            elif complete or w != 0:
                dst = 0
            else:
                dst = gadget(w, k)
            trans.append((gadget(w, i), sym, dst))
    return Nba.build(alphabet, n, trans, [0], [0], names)


def complete(k):
    """``1 + (k+1) * 2**k`` states; its language is all of ``Sigma^omega``."""
    return _gadget_automaton(k, True)


def nearly_complete(k):
    return _gadget_automaton(k, False)


def fig1_left(k):
    """First ``b`` occurs, with an ``a`` exactly ``k`` positions before it.

    States ``q0..qk`` and the accepting sink ``f`` (``k + 2`` states).
    """
    _check_k(k, 1, 64)
    alphabet = letters("a", "b", "c")
    a, b, c = alphabet.symbols
    f = k + 1
    trans = [(0, a, 0), (0, c, 0), (0, a, 1)]
    for i in range(1, k):
        trans += [(i, a, i + 1), (i, c, i + 1)]
    trans.append((k, b, f))
    trans += [(f, sym, f) for sym in (a, b, c)]
    names = [f"q{i}" for i in range(k + 1)] + ["f"]
    return Nba.build(alphabet, k + 2, trans, [0], [f], names)


def fig1_right():
    alphabet = letters("a", "b")
    a, b = alphabet.symbols
    trans = [(0, a, 0), (0, a, 1), (1, b, 0), (1, b, 1)]
    return Nba.build(alphabet, 2, trans, [0, 1], [0, 1], ["qa", "qb"])


def blw13():
    """UBA for ``((dab) + (dac))^omega`` together with its four-state chain."""
    alphabet = letters("a", "b", "c", "d")
    a, b, c, d = alphabet.symbols
    # states: qb (initial), qd (final), qab, qac, qc
    trans = [
        (0, d, 1),
        (4, d, 1),
        (1, a, 2),
        (1, a, 3),
        (2, b, 0),
        (3, c, 4),
    ]
    nba = Nba.build(alphabet, 5, trans, [0], [1], ["qb", "qd", "qab", "qac", "qc"])
    half = Fraction(1, 2)
    one = Fraction(1)
    # chain states: d, a, b, c
    chain = Dtmc(
        trans=(((1, one),), ((2, half), (3, half)), ((0, one),), ((0, one),)),
        initial=((0, one),),
        labels=(d, a, b, c),
        ap_names=alphabet.ap_names,
        names=("d", "a", "b", "c"),
    )
    return nba, chain


def generate(family, k=None):
    """Automaton (and chain, for ``blw13``) of a named family."""
    if family == "complete":
        return complete(k)
    if family == "nearly-complete":
        return nearly_complete(k)
    if family == "fig1-left":
        return fig1_left(k)
    if family == "fig1-right":
        return fig1_right()
    if family == "blw13":
        return blw13()
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def random_nba(rng, n_states, alphabet=("a", "b"), density=0.25, p_final=0.3, n_initial=1):
    """Random automaton; ``rng`` is a ``numpy.random.Generator``.

    Each potential transition is present independently with probability
    ``density``; at least one final state is always chosen.
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.plain(alphabet)
    trans = []
    for q in range(n_states):
        for sym in alphabet.symbols:
            for p in range(n_states):
                if rng.random() < density:
                    trans.append((q, sym, p))
    final = [q for q in range(n_states) if rng.random() < p_final]
    if not final:
        final = [int(rng.integers(n_states))]
    initial = sorted(set(int(x) for x in rng.choice(n_states, size=n_initial, replace=False)))
    return Nba.build(alphabet, n_states, trans, initial, final)


def random_codeterministic(rng, n_states, alphabet=("a", "b"), p_final=0.3, n_initial=1):
    """Random automaton in which every state has exactly one predecessor per symbol.

    With a single initial state such automata are unambiguous, and under the
    uniform measure their transition matrix is column-stochastic, so their
    SCCs tend to be positive. Useful for exercising cut generation.
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.plain(alphabet)
    trans = []
    for p in range(n_states):
        for sym in alphabet.symbols:
            trans.append((int(rng.integers(n_states)), sym, p))
    final = [q for q in range(n_states) if rng.random() < p_final]
    if not final:
        final = [int(rng.integers(n_states))]
    initial = sorted(set(int(x) for x in rng.choice(n_states, size=n_initial, replace=False)))
    return Nba.build(alphabet, n_states, trans, initial, final)
