"""Labeled transition systems: states, labeled edges, state sets, label expressions, file I/O.

The graph is the shared substrate of every check in this package: states are
dense indices 0..n-1, edges carry interned text labels, and `t` is reserved
for the tick of the logical clock while `z` marks silent internal steps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from ._scan import Cursor, ParseError, tokenize

TICK_LABEL = "t"
SILENT_LABEL = "z"

# "T" is the all-labels constant of the expression language and may never be
# used as a transition label.
_FORBIDDEN_LABEL = "T"


# ---------------------------------------------------------------------------
# Label expressions


class LabelExpr:
    """Boolean expression denoting a set of transition labels."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(LabelExpr):
    name: str


@dataclass(frozen=True)
class Top(LabelExpr):
    pass


@dataclass(frozen=True)
class Not(LabelExpr):
    arg: LabelExpr


@dataclass(frozen=True)
class And(LabelExpr):
    left: LabelExpr
    right: LabelExpr


@dataclass(frozen=True)
class Or(LabelExpr):
    left: LabelExpr
    right: LabelExpr


TOP = Top()


def eval_label_expr(expr: LabelExpr, label: str) -> bool:
    """Decide whether `label` belongs to the set denoted by `expr`."""
    if type(expr) is Atom:
        return expr.name == label
    if type(expr) is Top:
        return True
    if type(expr) is Not:
        return not eval_label_expr(expr.arg, label)
    if type(expr) is And:
        return eval_label_expr(expr.left, label) and eval_label_expr(expr.right, label)
    if type(expr) is Or:
        return eval_label_expr(expr.left, label) or eval_label_expr(expr.right, label)
    raise TypeError(f"not a label expression: {expr!r}")


def parse_label_expr_at(cur: Cursor) -> LabelExpr:
    """Parse a label expression from an open cursor (used by embedding parsers)."""
    return _parse_or(cur)


def _parse_or(cur: Cursor) -> LabelExpr:
    expr = _parse_and(cur)
    while cur.take("\\/"):
        expr = Or(expr, _parse_and(cur))
    return expr


def _parse_and(cur: Cursor) -> LabelExpr:
    expr = _parse_unary(cur)
    while cur.take("/\\"):
        expr = And(expr, _parse_unary(cur))
    return expr


def _parse_unary(cur: Cursor) -> LabelExpr:
    if cur.take("-"):
        return Not(_parse_unary(cur))
    if cur.take("("):
        expr = _parse_or(cur)
        cur.expect(")")
        return expr
    tok = cur.peek()
    if tok.kind == "ident":
        cur.advance()
        if tok.text == "T":
            return TOP
        return Atom(tok.text)
    raise ParseError(f"expected a label, found {tok.text or 'end of input'!r}", tok.pos)


def parse_label_expr(text: str) -> LabelExpr:
    """Parse the concrete syntax: `-` binds tighter than `/\\` tighter than `\\/`."""
    if not text.strip():
        raise ParseError("empty label expression", 0)
    cur = Cursor(tokenize(text))
    expr = _parse_or(cur)
    cur.expect_end()
    return expr


def format_label_expr(expr: LabelExpr) -> str:
    """Print an expression so that parse_label_expr round-trips it."""
    return _fmt(expr, 0)


_LEVEL = {Or: 1, And: 2, Not: 3, Atom: 4, Top: 4}


def _fmt(expr: LabelExpr, need: int) -> str:
    level = _LEVEL[type(expr)]
    if type(expr) is Atom:
        out = expr.name
    elif type(expr) is Top:
        out = "T"
    elif type(expr) is Not:
        out = "-" + _fmt(expr.arg, 3)
    elif type(expr) is And:
        out = _fmt(expr.left, 2) + " /\\ " + _fmt(expr.right, 3)
    else:
        out = _fmt(expr.left, 1) + " \\/ " + _fmt(expr.right, 2)
    if level < need:
        return "(" + out + ")"
    return out


# ---------------------------------------------------------------------------
# State sets


@dataclass(frozen=True)
class StateSet:
    """Subset of the states of one graph, as a fixed-width bit vector."""

    width: int
    bits: int = 0

    def __post_init__(self):
        if self.bits >> self.width:
            raise ValueError("bit vector wider than the graph it belongs to")

    @classmethod
    def empty(cls, width: int) -> "StateSet":
        return cls(width, 0)

    @classmethod
    def full(cls, width: int) -> "StateSet":
        return cls(width, (1 << width) - 1)

    @classmethod
    def of(cls, width: int, states: Iterable[int]) -> "StateSet":
        bits = 0
        for s in states:
            if not 0 <= s < width:
                raise ValueError(f"state {s} out of range 0..{width - 1}")
            bits |= 1 << s
        return cls(width, bits)

    def _check(self, other: "StateSet") -> None:
        if self.width != other.width:
            raise ValueError("state sets belong to different graphs")

    def union(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.width, self.bits | other.bits)

    def intersect(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.width, self.bits & other.bits)

    def difference(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.width, self.bits & ~other.bits)

    def complement(self) -> "StateSet":
        return StateSet(self.width, self.bits ^ ((1 << self.width) - 1))

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def __contains__(self, state: int) -> bool:
        return 0 <= state < self.width and (self.bits >> state) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_all(self) -> bool:
        return self.bits == (1 << self.width) - 1

    def issubset(self, other: "StateSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __repr__(self):
        return f"StateSet({self.width}, {{{', '.join(map(str, self))}}})"


# ---------------------------------------------------------------------------
# The transition system


class Lts:
    """Finite labeled transition graph with a distinguished initial state.

    Immutable after construction; exact duplicate transitions are dropped
    silently, labels are interned, and `T` is rejected as a transition label.
    """

    def __init__(
        self,
        num_states: int,
        initial: int,
        transitions: Iterable[tuple[int, str, int]],
        extra_labels: Iterable[str] = (),
    ):
        if num_states < 1:
            raise ValueError("a graph needs at least one state")
        if not 0 <= initial < num_states:
            raise ValueError(f"initial state {initial} out of range 0..{num_states - 1}")
        self._n = num_states
        self._initial = initial
        interned: dict[str, str] = {}
        label_order: list[str] = []

        def intern(text: str) -> str:
            if text == _FORBIDDEN_LABEL:
                raise ValueError("'T' is reserved for label expressions, not transitions")
            got = interned.get(text)
            if got is None:
                interned[text] = got = text
                label_order.append(text)
            return got

        seen: set[tuple[int, str, int]] = set()
        cleaned: list[tuple[int, str, int]] = []
        for src, label, dst in transitions:
            if not (0 <= src < num_states and 0 <= dst < num_states):
                raise ValueError(f"transition ({src}, {label!r}, {dst}) leaves the state range")
            triple = (src, intern(label), dst)
            if triple not in seen:
                seen.add(triple)
                cleaned.append(triple)
        for text in extra_labels:
            intern(text)
        self._transitions = tuple(cleaned)
        self._labels = tuple(label_order)
        self._fwd: dict[str, list[int]] = {}
        self._bwd: dict[str, list[int]] = {}
        self._out: list[tuple[tuple[str, int], ...]] | None = None

    @property
    def num_states(self) -> int:
        return self._n

    @property
    def initial(self) -> int:
        return self._initial

    @property
    def transitions(self) -> tuple[tuple[int, str, int], ...]:
        return self._transitions

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def __eq__(self, other):
        if not isinstance(other, Lts):
            return NotImplemented
        return (
            self._n == other._n
            and self._initial == other._initial
            and set(self._transitions) == set(other._transitions)
        )

    def __hash__(self):
        return hash((self._n, self._initial, frozenset(self._transitions)))

    def __repr__(self):
        return f"Lts(states={self._n}, initial={self._initial}, transitions={len(self._transitions)})"

    # -- set constructors tied to this graph

    def empty_set(self) -> StateSet:
        return StateSet.empty(self._n)

    def all_states(self) -> StateSet:
        return StateSet.full(self._n)

    def set_of(self, states: Iterable[int]) -> StateSet:
        return StateSet.of(self._n, states)

    # -- adjacency

    def out_edges(self, state: int) -> tuple[tuple[str, int], ...]:
        if self._out is None:
            out: list[list[tuple[str, int]]] = [[] for _ in range(self._n)]
            for src, label, dst in self._transitions:
                out[src].append((label, dst))
            self._out = [tuple(edges) for edges in out]
        return self._out[state]

    def _fwd_masks(self, label: str) -> list[int]:
        masks = self._fwd.get(label)
        if masks is None:
            masks = [0] * self._n
            for src, lab, dst in self._transitions:
                if lab == label:
                    masks[src] |= 1 << dst
            self._fwd[label] = masks
        return masks

    def _bwd_masks(self, label: str) -> list[int]:
        masks = self._bwd.get(label)
        if masks is None:
            masks = [0] * self._n
            for src, lab, dst in self._transitions:
                if lab == label:
                    masks[dst] |= 1 << src
            self._bwd[label] = masks
        return masks

    def post_bits(self, bits: int, expr: LabelExpr) -> int:
        """Successors (as a bit mask) of the states in `bits` along matching labels."""
        out = 0
        for label in self._labels:
            if eval_label_expr(expr, label):
                masks = self._fwd_masks(label)
                m = bits
                while m:
                    low = m & -m
                    out |= masks[low.bit_length() - 1]
                    m ^= low
        return out

    def pre_bits(self, bits: int, expr: LabelExpr) -> int:
        """Predecessors (as a bit mask) of the states in `bits` along matching labels."""
        out = 0
        for label in self._labels:
            if eval_label_expr(expr, label):
                masks = self._bwd_masks(label)
                m = bits
                while m:
                    low = m & -m
                    out |= masks[low.bit_length() - 1]
                    m ^= low
        return out

    def post(self, s: StateSet, expr: LabelExpr) -> StateSet:
        """{ q' | some q in s has an edge q -l-> q' with l matching expr }."""
        if s.width != self._n:
            raise ValueError("state set belongs to a different graph")
        return StateSet(self._n, self.post_bits(s.bits, expr))

    def pre(self, s: StateSet, expr: LabelExpr) -> StateSet:
        """{ q | some q' in s has an edge q -l-> q' with l matching expr }."""
        if s.width != self._n:
            raise ValueError("state set belongs to a different graph")
        return StateSet(self._n, self.pre_bits(s.bits, expr))


def post(g: Lts, s: StateSet, expr: LabelExpr) -> StateSet:
    return g.post(s, expr)


def pre(g: Lts, s: StateSet, expr: LabelExpr) -> StateSet:
    return g.pre(s, expr)


# ---------------------------------------------------------------------------
# .aut interchange format (Aldebaran style)

_HEADER_RE = re.compile(r"^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_TRANS_RE = re.compile(r'^\(\s*(\d+)\s*,\s*"([^"]*)"\s*,\s*(\d+)\s*\)\s*$')


def load_aut(text: str) -> Lts:
    """Parse `des (<init>, <#transitions>, <#states>)` plus one edge per line."""
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
    lines = [(no, line) for no, line in lines if line]
    if not lines:
        raise ValueError("empty .aut input")
    no, header = lines[0]
    m = _HEADER_RE.match(header)
    if m is None:
        raise ValueError(f"line {no}: malformed header {header!r}")
    initial, count, num_states = (int(g) for g in m.groups())
    body = lines[1:]
    if len(body) != count:
        raise ValueError(f"header declares {count} transitions but {len(body)} lines follow")
    transitions = []
    for no, line in body:
        m = _TRANS_RE.match(line)
        if m is None:
            raise ValueError(f"line {no}: malformed transition {line!r}")
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if not label:
            raise ValueError(f"line {no}: empty transition label")
        if src >= num_states or dst >= num_states:
            raise ValueError(f"line {no}: state index out of range 0..{num_states - 1}")
        transitions.append((src, label, dst))
    if initial >= num_states:
        raise ValueError(f"initial state {initial} out of range 0..{num_states - 1}")
    return Lts(num_states, initial, transitions)


def save_aut(g: Lts) -> str:
    """Canonical text: transitions sorted by (source, label text, target)."""
    lines = [f"des ({g.initial}, {len(g.transitions)}, {g.num_states})"]
    for src, label, dst in sorted(g.transitions):
        lines.append(f'({src}, "{label}", {dst})')
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT rendering (text only; drawing is left to external viewers)


def _dot_quote(text: str) -> str:
    if text.isidentifier():
        return text
    return '"' + text.replace('"', '\\"') + '"'


def to_dot(g: Lts, highlight: StateSet | None = None) -> str:
    """Graphviz digraph; the initial state is double-circled, highlights filled."""
    if highlight is not None and highlight.width != g.num_states:
        raise ValueError("highlight set belongs to a different graph")
    lines = ["digraph lts {", "  rankdir=LR;", "  node [shape=circle];"]
    for state in range(g.num_states):
        attrs = []
        if state == g.initial:
            attrs.append("shape=doublecircle")
        if highlight is not None and state in highlight:
            attrs.append("style=filled")
        if attrs:
            lines.append(f"  {state} [{', '.join(attrs)}];")
    for src, label, dst in sorted(g.transitions):
        lines.append(f"  {src} -> {dst} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
