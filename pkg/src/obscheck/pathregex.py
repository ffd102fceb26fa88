"""Regular path expressions over label expressions, with a Tick macro.

The grammar is deliberately restricted to the shapes the formula compiler
can handle: single steps, stars over label expressions (never over
sequences), the Tick macro `t . (-t)*`, union, and the empty word `eps`.

Besides the matcher, this module carries the brute-force oracles used to
cross-validate the compiler: NFA x graph product reachability, with no
mu-calculus involved.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._scan import Cursor, ParseError, tokenize
from .lts import Atom, LabelExpr, Lts, StateSet, Top, eval_label_expr, parse_label_expr_at
from .lts import Not as LabelNot

Word = tuple[str, ...]


class PathRegex:
    __slots__ = ()


class Step:
    __slots__ = ()


@dataclass(frozen=True)
class Eps(PathRegex):
    pass


@dataclass(frozen=True)
class Seq(PathRegex):
    head: PathRegex
    step: Step


@dataclass(frozen=True)
class Union(PathRegex):
    left: PathRegex
    right: PathRegex


@dataclass(frozen=True)
class One(Step):
    label: LabelExpr


@dataclass(frozen=True)
class Star(Step):
    label: LabelExpr


@dataclass(frozen=True)
class Tick(Step):
    pass


EPS = Eps()
TICK = Tick()


def seq_of(steps: Iterable[Step]) -> PathRegex:
    """Left-nested sequence starting from the empty word."""
    regex: PathRegex = EPS
    for step in steps:
        regex = Seq(regex, step)
    return regex


# ---------------------------------------------------------------------------
# Parsing
#
# regex  := seq ('\/' seq)*          union is n-ary, binarized left to right
# seq    := ('eps' | step) ('.' step)*
# step   := 'Tick' | operand '*'?
# operand:= IDENT | 'T' | '-' operand | '(' labelexpr ')'


def parse_regex(text: str) -> PathRegex:
    if not text.strip():
        raise ParseError("empty path expression", 0)
    cur = Cursor(tokenize(text))
    regex = _parse_union(cur)
    cur.expect_end()
    return regex


def _parse_union(cur: Cursor) -> PathRegex:
    regex = _parse_seq(cur)
    while cur.take("\\/"):
        regex = Union(regex, _parse_seq(cur))
    return regex


def _parse_seq(cur: Cursor) -> PathRegex:
    regex: PathRegex = EPS
    if cur.at_ident("eps"):
        cur.advance()
    else:
        regex = Seq(regex, _parse_step(cur))
    while cur.take("."):
        regex = Seq(regex, _parse_step(cur))
    return regex


def _parse_step(cur: Cursor) -> Step:
    if cur.at_ident("Tick"):
        cur.advance()
        return TICK
    label = _parse_operand(cur)
    if cur.take("*"):
        return Star(label)
    return One(label)


def _parse_operand(cur: Cursor) -> LabelExpr:
    if cur.at("("):
        mark = cur.mark()
        cur.advance()
        try:
            label = parse_label_expr_at(cur)
            cur.expect(")")
            return label
        except ParseError as err:
            # Distinguish a star over a parenthesized sub-regex, which the
            # restricted grammar rejects, from a plain syntax error.
            cur.reset(mark)
            cur.advance()
            try:
                _parse_union(cur)
                closed = cur.take(")")
            except ParseError:
                raise err from None
            if closed and cur.at("*"):
                raise ParseError(
                    "'*' applies only to label expressions, not to sequences or unions",
                    cur.peek().pos,
                ) from None
            raise ParseError(
                "parenthesized sub-expressions must be label expressions",
                cur.peek().pos,
            ) from None
    if cur.take("-"):
        return LabelNot(_parse_operand(cur))
    tok = cur.peek()
    if tok.kind == "ident":
        cur.advance()
        if tok.text == "T":
            return Top()
        return Atom(tok.text)
    raise ParseError(f"expected a label or 'Tick', found {tok.text or 'end of input'!r}", tok.pos)


# ---------------------------------------------------------------------------
# Tick expansion and word matching


def expand_tick(regex: PathRegex) -> PathRegex:
    """Replace every Tick step by `t` followed by `(-t)*`."""
    if type(regex) is Eps:
        return regex
    if type(regex) is Union:
        return Union(expand_tick(regex.left), expand_tick(regex.right))
    head = expand_tick(regex.head)
    if type(regex.step) is Tick:
        return Seq(Seq(head, One(Atom("t"))), Star(LabelNot(Atom("t"))))
    return Seq(head, regex.step)


# Caches keyed by object identity; entries keep their key alive so ids are
# never recycled under us.
_COMPILED: dict[int, tuple[PathRegex, tuple]] = {}
_SYMBOL_ROWS: dict[tuple[int, str], tuple[int, ...]] = {}
_LABEL_MEMO: dict[tuple[int, str], bool] = {}


def _matches(label: LabelExpr, symbol: str) -> bool:
    key = (id(label), symbol)
    got = _LABEL_MEMO.get(key)
    if got is None:
        got = eval_label_expr(label, symbol)
        _LABEL_MEMO[key] = got
    return got


_ONE, _STAR = 0, 1


def _compile_branches(regex: PathRegex):
    """(branches, labels): each branch is a step list of (opcode, label index)
    over a deduplicated table of the label expressions involved."""
    got = _COMPILED.get(id(regex))
    if got is not None:
        return got[1]
    labels: list[LabelExpr] = []
    index: dict[LabelExpr, int] = {}

    def label_id(e: LabelExpr) -> int:
        i = index.get(e)
        if i is None:
            index[e] = i = len(labels)
            labels.append(e)
        return i

    def branches(node: PathRegex) -> list[tuple]:
        if type(node) is Union:
            return branches(node.left) + branches(node.right)
        steps: list[tuple[int, int]] = []
        while type(node) is Seq:
            step = node.step
            if type(step) is One:
                steps.append((_ONE, label_id(step.label)))
            else:
                steps.append((_STAR, label_id(step.label)))
            node = node.head
        if type(node) is not Eps:
            # A union under a sequence: fall back to cross products.
            prefixes = branches(node)
            steps.reverse()
            return [tuple(p) + tuple(steps) for p in prefixes]
        steps.reverse()
        return [tuple(steps)]

    compiled = (tuple(branches(expand_tick(regex))), tuple(labels))
    _COMPILED[id(regex)] = (regex, compiled)
    return compiled


def match_word(regex: PathRegex, word: Sequence[str]) -> bool:
    """Word membership, decided directly on the expression (no automaton).

    Each branch is folded over a bit mask of reachable end positions in the
    word; a star closes the position set under its matching symbols.
    """
    branches, labels = _compile_branches(regex)
    # Mask of word positions each label expression matches.
    masks = [0] * len(labels)
    key_base = id(regex)
    for i, symbol in enumerate(word):
        row = _SYMBOL_ROWS.get((key_base, symbol))
        if row is None:
            row = tuple(j for j, e in enumerate(labels) if _matches(e, symbol))
            _SYMBOL_ROWS[(key_base, symbol)] = row
        bit = 1 << i
        for j in row:
            masks[j] |= bit
    accept = 1 << len(word)
    for branch in branches:
        pos = 1
        for opcode, j in branch:
            if opcode == _ONE:
                pos = (pos & masks[j]) << 1
                if not pos:
                    break
            else:
                mask = masks[j]
                while True:
                    grown = pos | ((pos & mask) << 1)
                    if grown == pos:
                        break
                    pos = grown
        if pos & accept:
            return True
    return False


# ---------------------------------------------------------------------------
# NFA compilation (the independent route exercised against match_word)


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton whose edges carry label expressions."""

    num_states: int
    initial: int
    accepting: frozenset[int]
    edges: tuple[tuple[tuple[LabelExpr, int], ...], ...]

    def accepts(self, word: Sequence[str]) -> bool:
        current = {self.initial}
        for symbol in word:
            nxt = set()
            for q in current:
                for label, q2 in self.edges[q]:
                    if eval_label_expr(label, symbol):
                        nxt.add(q2)
            if not nxt:
                return False
            current = nxt
        return bool(current & self.accepting)


def build_nfa(regex: PathRegex) -> Nfa:
    """Compile to an automaton accepting exactly the word language.

    All branches share the single initial state 0; the restricted grammar
    needs no epsilon edges.
    """
    edges: list[list[tuple[LabelExpr, int]]] = [[]]

    def fresh() -> int:
        edges.append([])
        return len(edges) - 1

    def go(node: PathRegex) -> frozenset[int]:
        if type(node) is Eps:
            return frozenset((0,))
        if type(node) is Union:
            return go(node.left) | go(node.right)
        ends = go(node.head)
        step = node.step
        if type(step) is One:
            q = fresh()
            for f in ends:
                edges[f].append((step.label, q))
            return frozenset((q,))
        if type(step) is Star:
            q = fresh()
            for f in ends:
                edges[f].append((step.label, q))
            edges[q].append((step.label, q))
            return ends | {q}
        raise AssertionError("Tick must be expanded before compilation")

    accepting = go(expand_tick(regex))
    return Nfa(len(edges), 0, accepting, tuple(tuple(e) for e in edges))


# ---------------------------------------------------------------------------
# Product oracles


def _product_end_bits(g: Lts, nfa: Nfa) -> int:
    """States of g reachable from the initial state along a word the NFA accepts."""
    start = (g.initial, nfa.initial)
    seen = {start}
    queue = deque((start,))
    out = 0
    if nfa.initial in nfa.accepting:
        out |= 1 << g.initial
    while queue:
        s, q = queue.popleft()
        nfa_edges = nfa.edges[q]
        for label, dst in g.out_edges(s):
            for expr, q2 in nfa_edges:
                if eval_label_expr(expr, label):
                    pair = (dst, q2)
                    if pair not in seen:
                        seen.add(pair)
                        queue.append(pair)
                        if q2 in nfa.accepting:
                            out |= 1 << dst
    return out


def oracle_end_states(g: Lts, regex: PathRegex) -> StateSet:
    """States reachable from the initial state after firing a matching word."""
    return StateSet(g.num_states, _product_end_bits(g, build_nfa(regex)))


def oracle_visited_states(g: Lts, regex: PathRegex) -> StateSet:
    """States reachable while firing a matching word: the union of the end
    states over every syntactic prefix of the (left-nested) expression."""
    if type(regex) is Eps:
        return StateSet(g.num_states, 1 << g.initial)
    if type(regex) is Union:
        return oracle_visited_states(g, regex.left) | oracle_visited_states(g, regex.right)
    return oracle_visited_states(g, regex.head) | oracle_end_states(g, regex)
