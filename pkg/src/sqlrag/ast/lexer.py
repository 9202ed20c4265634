"""Tokenizer for the supported SQLite SELECT subset."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from ..errors import ParseError


class TokenType(Enum):
    KEYWORD = auto()
    IDENT = auto()
    NUMBER = auto()
    STRING = auto()
    SYMBOL = auto()
    EOF = auto()


KEYWORDS = {
    "SELECT", "DISTINCT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER",
    "LIMIT", "AS", "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS",
    "ON", "AND", "OR", "NOT", "IN", "LIKE", "BETWEEN", "IS", "NULL", "EXISTS",
    "UNION", "INTERSECT", "EXCEPT", "ALL", "ASC", "DESC",
    # Statement heads outside the subset; recognized so the parser can reject
    # them as unsupported rather than as generic syntax errors.
    "INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "ALTER", "REPLACE",
    "PRAGMA", "WITH",
}

# Two-character symbols first so "<=" is not split into "<", "=".
SYMBOLS = ("<>", "!=", "<=", ">=", "=", "<", ">", "(", ")", ",", ".", "*",
           "+", "-", "/", ";")


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: str
    offset: int  # byte offset of the first character in the utf-8 input


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0  # character index
        self.byte = 0  # byte offset of self.i

    def peek(self, ahead: int = 0) -> str:
        j = self.i + ahead
        return self.text[j] if j < len(self.text) else ""

    def advance(self, count: int = 1) -> str:
        consumed = self.text[self.i:self.i + count]
        self.i += len(consumed)
        self.byte += len(consumed.encode("utf-8"))
        return consumed


def tokenize(text: str) -> list[Token]:
    sc = _Scanner(text)
    tokens: list[Token] = []
    while sc.i < len(text):
        ch = sc.peek()
        if ch.isspace():
            sc.advance()
            continue
        start = sc.byte
        if ch in ("'", '"', "`"):
            value = _scan_quoted(sc)
            if ch == "`":
                tokens.append(Token(TokenType.IDENT, value, start))
            else:
                # Spider uses both quote styles for string values.
                tokens.append(Token(TokenType.STRING, f"'{value}'", start))
            continue
        if ch.isdigit():
            tokens.append(Token(TokenType.NUMBER, _scan_number(sc), start))
            continue
        if ch.isalpha() or ch == "_":
            word = _scan_word(sc)
            if word.upper() in KEYWORDS:
                tokens.append(Token(TokenType.KEYWORD, word.upper(), start))
            else:
                tokens.append(Token(TokenType.IDENT, word, start))
            continue
        for sym in SYMBOLS:
            if sc.text.startswith(sym, sc.i):
                sc.advance(len(sym))
                tokens.append(Token(TokenType.SYMBOL, sym, start))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", sc.byte)
    tokens.append(Token(TokenType.EOF, "", sc.byte))
    return tokens


def _scan_word(sc: _Scanner) -> str:
    out = []
    while sc.peek().isalnum() or sc.peek() == "_":
        out.append(sc.advance())
    return "".join(out)


def _scan_number(sc: _Scanner) -> str:
    out = []
    seen_dot = False
    while True:
        ch = sc.peek()
        if ch.isdigit():
            out.append(sc.advance())
        elif ch == "." and not seen_dot and sc.peek(1).isdigit():
            seen_dot = True
            out.append(sc.advance())
        else:
            return "".join(out)


def _scan_quoted(sc: _Scanner) -> str:
    start = sc.byte
    quote = sc.advance()
    out: list[str] = []
    while sc.i < len(sc.text):
        ch = sc.advance()
        if ch == quote:
            if sc.peek() == quote:  # doubled quote escape
                out.append(sc.advance())
                continue
            return "".join(out)
        out.append(ch)
    raise ParseError("unterminated quoted token", start)
