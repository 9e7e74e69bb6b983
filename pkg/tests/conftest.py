import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ubacheck import generators
from ubacheck.automata import Alphabet, Nba, verify_unambiguous

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def fig1_right():
    return generators.fig1_right()


@pytest.fixture
def blw13():
    return generators.blw13()


def random_uba(rng, n_max=10, alphabet=("a", "b"), tries=10_000, codeterministic=False):
    """Rejection-sample an unambiguous automaton with 1..n_max states."""
    for _ in range(tries):
        n = int(rng.integers(1, n_max + 1))
        if codeterministic:
            nba = generators.random_codeterministic(rng, n, alphabet)
        else:
            density = float(rng.uniform(0.1, 0.45))
            nba = generators.random_nba(rng, n, alphabet, density=density)
        if verify_unambiguous(nba).unambiguous:
            return nba
    raise RuntimeError("no unambiguous automaton found")


def uba_corpus(seed, count, n_max=10):
    """Alternating sparse random and co-deterministic unambiguous automata."""
    rng = np.random.default_rng(seed)
    return [random_uba(rng, n_max, codeterministic=bool(i % 2)) for i in range(count)]


def two_copies():
    """Two initial states with a-self-loops, both final: ambiguous on a^omega."""
    alphabet = Alphabet.plain(["a", "b"])
    return Nba.build(alphabet, 2, [(0, "a", 0), (1, "a", 1)], [0, 1], [0, 1])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
