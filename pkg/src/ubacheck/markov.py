"""Finite discrete-time Markov chains with state labels.

Text format (``#`` starts a comment)::

    dtmc <nstates> <naps>
    ap <name> ...
    init <state> <prob>
    label <state> <ap,ap,...|->
    trans <src> <dst> <prob>

Probabilities are decimals (stored as floats) or ``p/q`` fractions (stored
exactly as :class:`fractions.Fraction`).
"""

from dataclasses import dataclass
from fractions import Fraction

from .automata import Alphabet

ROW_TOL = 1e-12


class DtmcError(ValueError):
    pass


class DtmcParseError(DtmcError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


def _is_exact(x):
    return isinstance(x, (int, Fraction))


def _check_distribution(entries, what):
    probs = [p for _, p in entries]
    if any(p < 0 for p in probs):
        raise DtmcError(f"{what}: negative probability")
    if all(_is_exact(p) for p in probs):
        ok = sum(probs, Fraction(0)) == 1
    else:
        ok = abs(float(sum(float(p) for p in probs)) - 1.0) <= ROW_TOL
    if not ok:
        total = sum(float(p) for p in probs)
        raise DtmcError(f"{what}: probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class Dtmc:
    """``trans[s]`` is a tuple of ``(t, P(s,t))`` with ``P(s,t) > 0``.

    ``labels[s]`` is the alphabet symbol observed in state ``s``; for AP
    chains that is the frozenset of propositions holding in ``s``.
    """

    trans: tuple
    initial: tuple
    labels: tuple
    ap_names: tuple = None
    names: tuple = None

    def __post_init__(self):
        n = len(self.trans)
        if len(self.labels) != n:
            raise DtmcError("one label per state expected")
        for s, row in enumerate(self.trans):
            seen = set()
            for t, _ in row:
                if not 0 <= t < n:
                    raise DtmcError(f"state {s}: transition to unknown state {t}")
                if t in seen:
                    raise DtmcError(f"state {s}: duplicate transition to {t}")
                seen.add(t)
            _check_distribution(row, f"state {s}")
        for s, _ in self.initial:
            if not 0 <= s < n:
                raise DtmcError(f"initial distribution mentions unknown state {s}")
        _check_distribution(self.initial, "initial distribution")

    @property
    def n_states(self):
        return len(self.trans)

    @property
    def exact(self):
        """True when every probability is a rational number."""
        return all(_is_exact(p) for row in self.trans for _, p in row) and all(
            _is_exact(p) for _, p in self.initial
        )

    def state_name(self, s):
        return self.names[s] if self.names is not None else str(s)


def _parse_prob(text, line):
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise DtmcParseError(f"bad probability {text!r}", line) from None


def parse_dtmc(text):
    n = n_aps = None
    ap_names = None
    init = {}
    labels = {}
    rows = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if n is None:
            if key != "dtmc" or len(parts) != 3:
                raise DtmcParseError("expected header 'dtmc <nstates> <naps>'", lineno)
            try:
                n, n_aps = int(parts[1]), int(parts[2])
            except ValueError:
                raise DtmcParseError("bad header", lineno) from None
            rows = [dict() for _ in range(n)]
            continue

        def state(tok):
            try:
                s = int(tok)
            except ValueError:
                raise DtmcParseError(f"bad state id {tok!r}", lineno) from None
            if not 0 <= s < n:
                raise DtmcParseError(f"unknown state {s}", lineno)
            return s

        if key == "ap":
            ap_names = tuple(parts[1:])
            if len(ap_names) != n_aps:
                raise DtmcParseError(f"expected {n_aps} atomic propositions", lineno)
            if len(set(ap_names)) != len(ap_names):
                raise DtmcParseError("duplicate atomic proposition", lineno)
        elif key == "init":
            if len(parts) != 3:
                raise DtmcParseError("expected 'init <state> <prob>'", lineno)
            s = state(parts[1])
            if s in init:
                raise DtmcParseError(f"duplicate init for state {s}", lineno)
            init[s] = _parse_prob(parts[2], lineno)
        elif key == "label":
            if len(parts) not in (2, 3):
                raise DtmcParseError("expected 'label <state> <aps|->'", lineno)
            s = state(parts[1])
            if s in labels:
                raise DtmcParseError(f"duplicate label for state {s}", lineno)
            aps = parts[2] if len(parts) == 3 else "-"
            names = frozenset() if aps == "-" else frozenset(aps.split(","))
            if ap_names is None and n_aps:
                raise DtmcParseError("label before 'ap' declaration", lineno)
            unknown = names - set(ap_names or ())
            if unknown:
                raise DtmcParseError(f"undeclared proposition(s) {sorted(unknown)}", lineno)
            labels[s] = names
        elif key == "trans":
            if len(parts) != 4:
                raise DtmcParseError("expected 'trans <src> <dst> <prob>'", lineno)
            s, t = state(parts[1]), state(parts[2])
            if t in rows[s]:
                raise DtmcParseError(f"duplicate transition {s} -> {t}", lineno)
            p = _parse_prob(parts[3], lineno)
            if p < 0:
                raise DtmcParseError(f"negative probability on {s} -> {t}", lineno)
            rows[s][t] = p
        else:
            raise DtmcParseError(f"unknown directive {key!r}", lineno)
    if n is None:
        raise DtmcParseError("empty input")
    if n_aps and ap_names is None:
        raise DtmcParseError("missing 'ap' line")
    missing = [s for s in range(n) if s not in labels]
    if missing:
        raise DtmcParseError(f"missing label for state {missing[0]}")
    trans = tuple(tuple((t, p) for t, p in sorted(r.items()) if p != 0) for r in rows)
    try:
        return Dtmc(
            trans=trans,
            initial=tuple((s, p) for s, p in sorted(init.items()) if p != 0),
            labels=tuple(labels[s] for s in range(n)),
            ap_names=ap_names if ap_names is not None else (),
        )
    except DtmcError as e:
        raise DtmcParseError(str(e)) from None


def _fmt(p):
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    if isinstance(p, int):
        return str(p)
    return repr(float(p))


def serialize_dtmc(dtmc):
    """Inverse of :func:`parse_dtmc` for chains whose labels are AP sets."""
    aps = tuple(dtmc.ap_names or ())
    lines = [f"dtmc {dtmc.n_states} {len(aps)}"]
    if aps:
        lines.append("ap " + " ".join(aps))
    for s, p in dtmc.initial:
        lines.append(f"init {s} {_fmt(p)}")
    for s, lab in enumerate(dtmc.labels):
        text = ",".join(ap for ap in aps if ap in lab) or "-"
        lines.append(f"label {s} {text}")
    for s, row in enumerate(dtmc.trans):
        for t, p in row:
            lines.append(f"trans {s} {t} {_fmt(p)}")
    return "\n".join(lines) + "\n"


def uniform_chain(alphabet):
    """Chain whose label sequence is uniformly distributed over ``alphabet``.

    One state per symbol, labelled with that symbol; every row and the
    initial distribution are uniform.
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = tuple(alphabet)
        if len(alphabet) < 2:
            raise DtmcError("the uniform chain needs an alphabet of at least two symbols")
        alphabet = Alphabet.plain(alphabet)
    k = len(alphabet)
    p = Fraction(1, k)
    row = tuple((t, p) for t in range(k))
    return Dtmc(
        trans=(row,) * k,
        initial=row,
        labels=tuple(alphabet.symbols),
        ap_names=alphabet.ap_names,
        names=tuple(alphabet.name(s) for s in alphabet.symbols),
    )
