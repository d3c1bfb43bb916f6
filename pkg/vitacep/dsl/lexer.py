"""
VITACEP - Event-Pattern Lexer

Splits definition text into positioned tokens. ASCII and Unicode operator
spellings map to the same token kinds.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from vitacep.core.errors import PatternSyntaxError


class TokenKind(Enum):
    IDENT = "identifier"
    NUMBER = "number"
    DEFINE = ":="
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    EQUALS = "="
    OP = "comparison operator"
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    DELAY = "DELAY"
    EOF = "end of input"


KEYWORDS = {
    "AND": TokenKind.AND,
    "OR": TokenKind.OR,
    "NOT": TokenKind.NOT,
    "DELAY": TokenKind.DELAY,
}

SYMBOLS = {
    ":=": (TokenKind.DEFINE, ":="),
    ">=": (TokenKind.OP, ">="),
    "<=": (TokenKind.OP, "<="),
    "≥": (TokenKind.OP, ">="),
    "≤": (TokenKind.OP, "<="),
    ">": (TokenKind.OP, ">"),
    "<": (TokenKind.OP, "<"),
    "(": (TokenKind.LPAREN, "("),
    ")": (TokenKind.RPAREN, ")"),
    ",": (TokenKind.COMMA, ","),
    "=": (TokenKind.EQUALS, "="),
    "∧": (TokenKind.AND, "AND"),
    "∨": (TokenKind.OR, "OR"),
    "¬": (TokenKind.NOT, "NOT"),
}

# "PM2.5" style names are accepted and normalized by dropping the dots
IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*(?:\.[0-9]+[A-Za-z0-9_]*)*")
NUMBER_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int
    adjacent: bool = False  # no whitespace between this token and the previous one
    value: Optional[float] = None

    def describe(self) -> str:
        return "end of input" if self.kind is TokenKind.EOF else self.text


def tokenize(text: str) -> List[Token]:
    """
    Tokenize definition text.

    Raises:
        PatternSyntaxError: On a character that starts no token
    """
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    adjacent = False

    while pos < len(text):
        ch = text[pos]
        column = pos - line_start + 1

        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            adjacent = False
            continue
        if ch.isspace():
            pos += 1
            adjacent = False
            continue
        if ch == "#":
            while pos < len(text) and text[pos] != "\n":
                pos += 1
            adjacent = False
            continue

        match = NUMBER_RE.match(text, pos)
        if match and (ch.isdigit() or ch == "." or _signed_number_allowed(tokens)):
            raw = match.group()
            tokens.append(Token(TokenKind.NUMBER, raw, line, column, adjacent, float(raw)))
            pos = match.end()
            adjacent = True
            continue

        match = IDENT_RE.match(text, pos)
        if match:
            raw = match.group()
            kind = KEYWORDS.get(raw, TokenKind.IDENT)
            name = raw.replace(".", "") if kind is TokenKind.IDENT else raw
            tokens.append(Token(kind, name, line, column, adjacent))
            pos = match.end()
            adjacent = True
            continue

        for symbol, (kind, canonical) in SYMBOLS.items():
            if text.startswith(symbol, pos):
                tokens.append(Token(kind, canonical, line, column, adjacent))
                pos += len(symbol)
                adjacent = True
                break
        else:
            raise PatternSyntaxError(line, column, ch, ["a token"])

    tokens.append(Token(TokenKind.EOF, "", line, pos - line_start + 1, adjacent))
    return tokens


def _signed_number_allowed(tokens: List[Token]) -> bool:
    # A leading sign only starts a number where a value is expected
    if not tokens:
        return False
    return tokens[-1].kind in (TokenKind.OP, TokenKind.EQUALS, TokenKind.COMMA)
