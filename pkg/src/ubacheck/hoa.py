"""Reading and writing the state-based Büchi subset of HOA v1.

Supported: ``Acceptance: 1 Inf(0)`` (or ``acc-name: Buchi``), explicit or
implicit edge labels, state labels, label aliases, and the Boolean
connectives ``! & |`` with ``t``/``f``. Anything that changes the
acceptance semantics (transition marks, several acceptance sets,
alternation) is rejected.

One extension: an optional ``valuations: <n> <mask>...`` header restricts
the alphabet to the listed AP valuations (bit i of a mask is AP i). Tools
that do not know it may ignore it, as with any lower-case HOA header.
"""

import re

from .automata import MAX_APS, Alphabet, AutomatonError, Nba
from .digraph import bits


class HoaError(ValueError):
    pass


class HoaSyntaxError(HoaError):
    def __init__(self, msg, line, col):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


class HoaUnsupportedError(HoaError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>/\*)
  | (?P<marker>--(?:BODY|END|ABORT)--)
  | (?P<header>[A-Za-z_][A-Za-z0-9_-]*:)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>\d+)
  | (?P<alias>@[A-Za-z0-9_-]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<punct>[\[\](){}!&|])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text}"


def _tokenize(text):
    toks = []
    pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise HoaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "comment":
            depth, end = 1, m.end()
            while depth:
                nxt = re.compile(r"/\*|\*/").search(text, end)
                if nxt is None:
                    raise HoaSyntaxError("unterminated comment", line, col)
                depth += 1 if nxt.group() == "/*" else -1
                end = nxt.end()
            chunk = text[pos:end]
        else:
            chunk = m.group()
            end = m.end()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, col))
            if kind == "marker" and chunk == "--END--":
                break
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = end
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            raise HoaSyntaxError(msg + " (at end of input)", last.line if last else 1, last.col if last else 1)
        raise HoaSyntaxError(msg, tok.line, tok.col)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, kind, text=None):
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            self.error(f"expected {text or kind}, found {tok.text!r}", tok)
        return tok

    def accept(self, kind, text=None):
        tok = self.peek()
        if tok is not None and tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None


class _LabelContext:
    """Evaluates label expressions to bitsets over alphabet indices."""

    def __init__(self, alphabet, aliases):
        self.full = (1 << len(alphabet)) - 1
        self.ap_masks = []
        for i, ap in enumerate(alphabet.ap_names):
            self.ap_masks.append(sum(1 << a for a, sym in enumerate(alphabet.symbols) if ap in sym))
        self.aliases = aliases


def _parse_label(p, ctx):
    def disj():
        m = conj()
        while p.accept("punct", "|"):
            m |= conj()
        return m

    def conj():
        m = atom()
        while p.accept("punct", "&"):
            m &= atom()
        return m

    def atom():
        tok = p.next()
        if tok.kind == "punct" and tok.text == "!":
            return ctx.full & ~atom()
        if tok.kind == "punct" and tok.text == "(":
            m = disj()
            p.expect("punct", ")")
            return m
        if tok.kind == "ident" and tok.text in ("t", "f"):
            return ctx.full if tok.text == "t" else 0
        if tok.kind == "int":
            k = int(tok.text)
            if k >= len(ctx.ap_masks):
                p.error(f"atomic proposition {k} is not declared", tok)
            return ctx.ap_masks[k]
        if tok.kind == "alias":
            if tok.text not in ctx.aliases:
                p.error(f"undefined alias {tok.text}", tok)
            return ctx.aliases[tok.text]
        p.error(f"unexpected {tok.text!r} in label expression", tok)

    return disj()


def _parse_alias_raw(p):
    """Skip over one label expression in the header, returning its tokens."""
    start = p.i
    depth = 0
    while True:
        tok = p.peek()
        if tok is None or tok.kind in ("header", "marker"):
            break
        if tok.kind == "punct" and tok.text == "(":
            depth += 1
        elif tok.kind == "punct" and tok.text == ")":
            depth -= 1
        p.i += 1
    if depth:
        p.error("unbalanced parentheses in alias")
    return p.toks[start:p.i]


def parse_hoa(text):
    """Parse one HOA automaton. Text after ``--END--`` is ignored."""
    p = _Parser(_tokenize(text))
    p.expect("header", "HOA:")
    version = p.expect("ident")
    if version.text != "v1":
        p.error(f"unsupported HOA version {version.text}", version)

    n_states = None
    starts = []
    ap_names = None
    valuations = None
    alias_toks = []
    acceptance_ok = False
    acc_name = None

    while True:
        tok = p.peek()
        if tok is None:
            p.error("missing --BODY--")
        if tok.kind == "marker":
            if tok.text != "--BODY--":
                p.error(f"unexpected {tok.text}")
            p.next()
            break
        head = p.expect("header")
        name = head.text[:-1]
        if name == "States":
            n_states = int(p.expect("int").text)
        elif name == "Start":
            starts.append(int(p.expect("int").text))
            if p.accept("punct", "&"):
                raise HoaUnsupportedError("conjunctive initial states (alternation) are not supported")
        elif name == "AP":
            count = int(p.expect("int").text)
            if count > MAX_APS:
                raise HoaUnsupportedError(f"at most {MAX_APS} atomic propositions are supported")
            ap_names = []
            for _ in range(count):
                s = p.expect("string").text
                ap_names.append(s[1:-1].replace('\\"', '"').replace("\\\\", "\\"))
            if len(set(ap_names)) != len(ap_names):
                p.error("duplicate atomic proposition names", head)
        elif name == "Alias":
            a = p.expect("alias")
            alias_toks.append((a.text, _parse_alias_raw(p)))
        elif name == "Acceptance":
            sets = int(p.expect("int").text)
            body = []
            while p.peek() is not None and p.peek().kind not in ("header", "marker"):
                body.append(p.next().text)
            if sets != 1 or body != ["Inf", "(", "0", ")"]:
                raise HoaUnsupportedError(
                    f"unsupported acceptance condition: {sets} {' '.join(body)}; only Büchi (1 Inf(0)) is handled"
                )
            acceptance_ok = True
        elif name == "acc-name":
            acc_name = p.expect("ident").text
            while p.peek() is not None and p.peek().kind == "int":
                p.next()
            if acc_name != "Buchi":
                raise HoaUnsupportedError(f"unsupported acceptance {acc_name}; only Buchi is handled")
        elif name == "valuations":
            count = int(p.expect("int").text)
            valuations = [int(p.expect("int").text) for _ in range(count)]
        else:
            if name[0].isupper() and name not in ("HOA",):
                raise HoaUnsupportedError(f"unsupported header {name}")
            while p.peek() is not None and p.peek().kind not in ("header", "marker"):
                p.next()

    if not acceptance_ok:
        if acc_name == "Buchi":
            acceptance_ok = True
        else:
            raise HoaUnsupportedError("missing Acceptance: 1 Inf(0)")
    if ap_names is None:
        ap_names = []
    if valuations is not None:
        limit = 1 << len(ap_names)
        if any(not 0 <= v < limit for v in valuations) or len(set(valuations)) != len(valuations):
            raise HoaError("valuations header lists invalid or duplicate valuations")
    try:
        alphabet = Alphabet.from_aps(ap_names, valuations)
    except AutomatonError as e:
        raise HoaError(str(e)) from None

    ctx = _LabelContext(alphabet, {})
    for alias, toks in alias_toks:
        sub = _Parser(toks)
        ctx.aliases[alias] = _parse_label(sub, ctx)
        if sub.peek() is not None:
            sub.error("trailing tokens in alias")

    transitions = {}
    final = set()
    names = {}
    state_seen = set()
    implicit_vals = list(range(len(alphabet)))

    while True:
        tok = p.peek()
        if tok is None:
            p.error("missing --END--")
        if tok.kind == "marker":
            if tok.text == "--ABORT--":
                raise HoaError("automaton aborted by producer")
            p.expect("marker", "--END--")
            break
        p.expect("header", "State:")
        state_label = None
        if p.accept("punct", "["):
            state_label = _parse_label(p, ctx)
            p.expect("punct", "]")
        num_tok = p.expect("int")
        q = int(num_tok.text)
        if q in state_seen:
            p.error(f"state {q} defined twice", num_tok)
        state_seen.add(q)
        s = p.accept("string")
        if s is not None:
            names[q] = s.text[1:-1]
        if p.accept("punct", "{"):
            marks = []
            while not p.accept("punct", "}"):
                marks.append(int(p.expect("int").text))
            if any(m != 0 for m in marks):
                p.error("acceptance mark other than 0", num_tok)
            if marks:
                final.add(q)
        edges = []
        labelled = None
        while True:
            tok = p.peek()
            if tok is None or tok.kind in ("header", "marker"):
                break
            lab = None
            if p.accept("punct", "["):
                if state_label is not None:
                    p.error("edge label on a labelled state")
                lab = _parse_label(p, ctx)
                p.expect("punct", "]")
            has_label = lab is not None
            if labelled is None:
                labelled = has_label
            elif labelled != has_label:
                p.error("mixing labelled and unlabelled edges")
            dst = int(p.expect("int").text)
            if p.accept("punct", "&"):
                raise HoaUnsupportedError("universal branching (alternation) is not supported")
            if p.accept("punct", "{"):
                raise HoaUnsupportedError("transition-based acceptance is not supported")
            edges.append((lab, dst))
        if edges and not labelled:
            if state_label is not None:
                edges = [(state_label, d) for _, d in edges]
            else:
                if len(edges) != len(alphabet):
                    p.error(f"state {q}: implicit labels need exactly {len(alphabet)} edges", num_tok)
                edges = [(1 << implicit_vals[i], d) for i, (_, d) in enumerate(edges)]
        transitions[q] = edges

    if n_states is None:
        mentioned = set(state_seen) | set(starts)
        for edges in transitions.values():
            mentioned.update(d for _, d in edges)
        n_states = max(mentioned) + 1 if mentioned else 0
    for q in list(state_seen) + starts:
        if q >= n_states:
            raise HoaError(f"state {q} exceeds States: {n_states}")
    table = [[0] * len(alphabet) for _ in range(n_states)]
    for q, edges in transitions.items():
        for lab, dst in edges:
            if dst >= n_states:
                raise HoaError(f"edge to state {dst} exceeds States: {n_states}")
            for a in bits(lab):
                table[q][a] |= 1 << dst
    state_names = None
    if names:
        state_names = tuple(names.get(q, str(q)) for q in range(n_states))
    init = 0
    for q in starts:
        init |= 1 << q
    fin = 0
    for q in final:
        fin |= 1 << q
    return Nba(alphabet, tuple(tuple(r) for r in table), init, fin, state_names)


def _cube(valuation, n_aps):
    if n_aps == 0:
        return "t"
    return "&".join(str(i) if valuation >> i & 1 else f"!{i}" for i in range(n_aps))


def to_hoa(nba, name=None):
    """Render ``nba`` as HOA with explicit labels.

    Plain (non-valuation) alphabets are encoded one-hot: one AP per symbol
    plus a ``valuations`` header listing the one-hot masks.
    """
    alphabet = nba.alphabet
    if alphabet.ap_names is not None:
        ap_names = list(alphabet.ap_names)
        vals = [alphabet.valuation(s) for s in alphabet.symbols]
    else:
        ap_names = [str(s) for s in alphabet.symbols]
        vals = [1 << i for i in range(len(alphabet))]
    restricted = sorted(vals) != list(range(1 << len(ap_names)))
    out = ["HOA: v1"]
    if name:
        out.append(f'name: "{name}"')
    out.append(f"States: {nba.n_states}")
    for q in bits(nba.initial):
        out.append(f"Start: {q}")
    out.append(f"AP: {len(ap_names)}" + "".join(f' "{ap}"' for ap in ap_names))
    if restricted:
        out.append(f"valuations: {len(vals)} " + " ".join(str(v) for v in vals))
    out.append("acc-name: Buchi")
    out.append("Acceptance: 1 Inf(0)")
    out.append("properties: explicit-labels state-acc")
    out.append("--BODY--")
    for q in range(nba.n_states):
        head = f"State: {q}"
        if nba.names is not None:
            head += f' "{nba.names[q]}"'
        if nba.final >> q & 1:
            head += " {0}"
        out.append(head)
        by_dst = {}
        for a, m in enumerate(nba.delta[q]):
            for dst in bits(m):
                by_dst.setdefault(dst, []).append(a)
        for dst in sorted(by_dst):
            syms = by_dst[dst]
            if len(syms) == len(alphabet):
                label = "t"
            else:
                label = " | ".join(_cube(vals[a], len(ap_names)) for a in syms)
            out.append(f"  [{label}] {dst}")
    out.append("--END--")
    return "\n".join(out) + "\n"
