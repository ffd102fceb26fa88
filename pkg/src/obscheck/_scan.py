"""Shared tokenizer for the small expression languages (labels, path regexes, formulas)."""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(ValueError):
    """Malformed concrete syntax. Carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "init", "eof", or the punctuation text itself
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""\s+
      | `0
      | [A-Za-z_][A-Za-z0-9_]*
      | <=> | => | /\\ | \\/
      | [()<>*.|-]
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        chunk = m.group(0)
        if not chunk.isspace():
            if chunk == "`0":
                tokens.append(Token("init", chunk, pos))
            elif chunk[0].isalpha() or chunk[0] == "_":
                tokens.append(Token("ident", chunk, pos))
            else:
                tokens.append(Token(chunk, chunk, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class Cursor:
    """A stream of tokens with one-token lookahead."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._i = 0

    def peek(self) -> Token:
        return self._tokens[self._i]

    def advance(self) -> Token:
        tok = self._tokens[self._i]
        if tok.kind != "eof":
            self._i += 1
        return tok

    def at(self, kind: str) -> bool:
        return self._tokens[self._i].kind == kind

    def at_ident(self, text: str) -> bool:
        tok = self._tokens[self._i]
        return tok.kind == "ident" and tok.text == text

    def take(self, kind: str) -> bool:
        if self.at(kind):
            self._i += 1
            return True
        return False

    def expect(self, kind: str) -> Token:
        tok = self._tokens[self._i]
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def expect_end(self) -> None:
        tok = self._tokens[self._i]
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)

    def mark(self) -> int:
        return self._i

    def reset(self, mark: int) -> None:
        self._i = mark
