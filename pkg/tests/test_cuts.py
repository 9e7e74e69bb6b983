import itertools

import pytest

from conftest import uba_corpus
from ubacheck import generators
from ubacheck.automata import Alphabet, Nba, with_initial
from ubacheck.cuts import (
    Cut,
    CutError,
    _chain_succ,
    cosafety_shortcut,
    delta_c,
    find_extension,
    generate_pure_cut,
    separated_shortcut,
)
from ubacheck.digraph import tarjan
from ubacheck.markov import Dtmc, uniform_chain
from ubacheck.oracle import powerset_absorption_oracle
from ubacheck.product import build_product


def uniform_product(nba):
    return build_product(uniform_chain(nba.alphabet), nba)


def whole(prod):
    comps = tarjan(len(prod), prod.succ)
    assert len(comps) == 1
    return comps[0]


def test_ca2_first_extension_and_cut():
    prod = uniform_product(generators.complete(2))
    comp = whole(prod)
    anchor = comp[0]
    frontier = {v: frozenset([v]) for v in comp if prod.nodes[v][0] == prod.nodes[anchor][0]}
    ext = find_extension(prod, comp, anchor, frontier)
    assert ext is not None and ext.partner != anchor
    assert len(generate_pure_cut(prod, comp)) == 4


def test_fig1_right_cut():
    prod = uniform_product(generators.fig1_right())
    comp = whole(prod)
    cut = generate_pure_cut(prod, comp)
    assert len(cut) == 2
    assert {prod.nodes[v] for v in cut.members} == {(0, 0), (0, 1)}
    # no further extension once the cut is reached
    frontier = {v: frozenset() for v in comp if prod.nodes[v][0] == 0}
    frontier[cut.anchor] = cut.members
    assert find_extension(prod, comp, cut.anchor, frontier) is None


def test_no_extension_when_partners_blocked():
    prod = uniform_product(generators.fig1_right())
    comp = whole(prod)
    frontier = {v: frozenset() for v in comp}
    frontier[comp[0]] = frozenset([comp[0]])
    assert find_extension(prod, comp, comp[0], frontier) is None


def test_ca5_cut():
    prod = uniform_product(generators.complete(5))
    cut = generate_pure_cut(prod, whole(prod))
    assert len(cut) == 32
    assert cut.rounds == 2
    assert cut.extensions <= prod.nba.n_states


def test_single_node_self_loop():
    alph = Alphabet.plain("ab")
    nba = Nba.build(alph, 1, [(0, "a", 0), (0, "b", 0)], [0], [0])
    one = __import__("fractions").Fraction(1)
    chain = Dtmc((((0, one),),), ((0, one),), ("a",))
    prod = build_product(chain, nba)
    cut = generate_pure_cut(prod, [0])
    assert cut.members == {0} and cut.word == (0,) and cut.extensions == 0


def test_growth_guard_on_non_positive_component():
    # an ambiguous duplicate makes the frontier "grow" without bound only via the guard
    alph = Alphabet.plain("ab")
    nba = Nba.build(alph, 2, [(0, "a", 0), (0, "a", 1), (1, "a", 1), (1, "a", 0)], [0], [0])
    one = __import__("fractions").Fraction(1)
    chain = Dtmc((((0, one),),), ((0, one),), ("a",))
    prod = build_product(chain, nba)
    with pytest.raises(CutError):
        generate_pure_cut(prod, whole(prod))


def _strong_fixtures():
    out = [generators.fig1_right(), generators.complete(2), generators.complete(3)]
    for nba in uba_corpus(41, 60, n_max=6):
        prod = uniform_product(nba)
        if prod.nodes and len(tarjan(len(prod), prod.succ)) == 1 and any(prod.final):
            out.append(nba)
    return out


STRONG = _strong_fixtures()


def _positive(prod, comp):
    from ubacheck.linalg import positivity_rank, scc_matrix

    return positivity_rank(scc_matrix(prod, comp))


@pytest.mark.parametrize("nba", STRONG)
def test_strict_growth_and_length_bound(nba):
    prod = uniform_product(nba)
    comp = whole(prod)
    if not _positive(prod, comp):
        pytest.skip("zero component")
    anchor = comp[0]
    succ = _chain_succ(prod, comp)
    frontier = {v: frozenset([v]) for v in comp if prod.nodes[v][0] == prod.nodes[anchor][0]}
    sizes = [1]
    while True:
        ext = find_extension(prod, comp, anchor, frontier, succ)
        if ext is None:
            break
        assert len(ext.word) <= len(comp) ** 2
        assert ext.word[-1] == prod.nodes[anchor][0]
        reached = delta_c(prod, comp, [anchor], ext.word, succ)
        assert {anchor, ext.partner} <= reached
        frontier = {
            v: frozenset().union(*[frontier[r] for r in delta_c(prod, comp, [v], ext.word, succ)])
            for v in frontier
        }
        sizes.append(len(frontier[anchor]))
    assert all(a < b for a, b in zip(sizes, sizes[1:]))
    assert len(sizes) - 1 <= nba.n_states


@pytest.mark.parametrize("nba", STRONG)
def test_cut_is_almost_universal(nba):
    prod = uniform_product(nba)
    comp = whole(prod)
    if not _positive(prod, comp):
        pytest.skip("zero component")
    cut = generate_pure_cut(prod, comp)
    s = prod.nodes[cut.anchor][0]
    qs = [prod.nodes[v][1] for v in cut.members]
    assert all(prod.nodes[v][0] == s for v in cut.members)
    chain = uniform_chain(nba.alphabet)
    start = Dtmc(chain.trans, chain.trans[s], chain.labels, chain.ap_names)
    assert powerset_absorption_oracle(with_initial(nba, qs), start, check=False) == 1


@pytest.mark.parametrize("nba", STRONG[:12])
def test_cut_members_pairwise_disjoint(nba):
    prod = uniform_product(nba)
    comp = whole(prod)
    if not _positive(prod, comp):
        pytest.skip("zero component")
    cut = generate_pure_cut(prod, comp)
    succ = _chain_succ(prod, comp)
    k = prod.dtmc.n_states
    members = sorted(cut.members)
    for n in range(1, 9 if k == 2 else 6):
        for word in itertools.product(range(k), repeat=n):
            for u, v in itertools.combinations(members, 2):
                a = delta_c(prod, comp, [u], word, succ)
                b = delta_c(prod, comp, [v], word, succ)
                assert not (a & b)


def test_separated_shortcut():
    assert separated_shortcut(generators.fig1_right()) == {0, 1}
    assert separated_shortcut(generators.fig1_left(1)) is None
    alph = Alphabet.plain("ab")
    one = Nba.build(alph, 1, [(0, "a", 0), (0, "b", 0)], [0], [0])
    assert separated_shortcut(one) == {0}


def test_separated_shortcut_needs_separation():
    # count matches |Sigma||Q| but both states accept everything
    alph = Alphabet.plain("ab")
    nba = Nba.build(alph, 2, [(0, "a", 1), (0, "b", 1), (1, "a", 0), (1, "b", 0)], [0], [0, 1])
    assert separated_shortcut(nba, check_separated=False) == {0, 1}
    assert separated_shortcut(nba) is None


def test_cosafety_shortcut():
    assert cosafety_shortcut(generators.fig1_left(1))
    assert not cosafety_shortcut(generators.fig1_right())
    alph = Alphabet.plain("ab")
    assert cosafety_shortcut(Nba.build(alph, 1, [(0, "a", 0)], [0], []))


def test_cut_dataclass():
    c = Cut(0, (1,), frozenset({0, 2}), 1)
    assert len(c) == 2 and c.rounds == 2
