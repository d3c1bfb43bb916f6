"""
VITACEP - Event-Pattern Parser

Recursive-descent parser for definition files:

    file        := definition+
    definition  := IDENT ":=" or_expr
    or_expr     := and_expr (("OR"|"∨") and_expr)*
    and_expr    := unary (("AND"|"∧") unary)*
    unary       := ("NOT"|"¬") unary | "DELAY" "(" or_expr "," DURATION ")" | primary
    primary     := "(" or_expr ")" | comparison | detector_call | IDENT
    comparison  := IDENT (">"|">="|"<"|"<=") NUMBER [unit]
    detector_call := DETECTOR_IDENT "(" IDENT ("," IDENT "=" NUMBER)* ")"
    DURATION    := NUMBER ("s"|"m"|"h"|"d")

Chains of AND/OR at one level become one n-ary node; parenthesized
sub-expressions stay nested so that formatting and re-parsing agree.
"""

import logging
import math
from typing import Iterable, List, Optional, Set

from vitacep.core.errors import DuplicateDefinitionError, PatternSyntaxError, UnknownDetectorError
from vitacep.core.utils import DURATION_UNITS
from vitacep.dsl.ast import (
    And,
    Comparison,
    Definition,
    Delay,
    DetectorCall,
    EventRef,
    Node,
    Not,
    Or,
)
from vitacep.dsl.lexer import Token, TokenKind, tokenize

logger = logging.getLogger(__name__)

PRIMARY_START = {"NOT", "DELAY", "(", "identifier"}


class Parser:
    """Parser over one token list; use parse() rather than this class directly."""

    def __init__(self, text: str, detector_names: Iterable[str]):
        self.tokens = tokenize(text)
        self.pos = 0
        self.detector_names = set(detector_names)

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def _advance(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def _error(self, expected: Iterable[str], token: Optional[Token] = None) -> PatternSyntaxError:
        token = token or self.current
        return PatternSyntaxError(token.line, token.column, token.describe(), expected)

    def _expect(self, kind: TokenKind) -> Token:
        if self.current.kind is not kind:
            raise self._error([kind.value])
        return self._advance()

    def parse_file(self) -> List[Definition]:
        definitions: List[Definition] = []
        seen: Set[str] = set()
        while True:
            definition = self.parse_definition()
            if definition.name in seen:
                raise DuplicateDefinitionError(definition.name)
            seen.add(definition.name)
            definitions.append(definition)
            if self.current.kind is TokenKind.EOF:
                return definitions
            if self.current.kind is not TokenKind.IDENT:
                raise self._error(["AND", "OR", "identifier", "end of input"])

    def parse_definition(self) -> Definition:
        name = self.current
        if name.kind is not TokenKind.IDENT or "-" in name.text:
            raise self._error(["identifier"])
        self._advance()
        self._expect(TokenKind.DEFINE)
        return Definition(name=name.text, body=self.parse_or())

    def parse_or(self) -> Node:
        children = [self.parse_and()]
        while self.current.kind is TokenKind.OR:
            self._advance()
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_and(self) -> Node:
        children = [self.parse_unary()]
        while self.current.kind is TokenKind.AND:
            self._advance()
            children.append(self.parse_unary())
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_unary(self) -> Node:
        token = self.current
        if token.kind is TokenKind.NOT:
            self._advance()
            return Not(self.parse_unary())
        if token.kind is TokenKind.DELAY:
            self._advance()
            self._expect(TokenKind.LPAREN)
            child = self.parse_or()
            self._expect(TokenKind.COMMA)
            duration = self.parse_duration()
            self._expect(TokenKind.RPAREN)
            return Delay(child, duration)
        return self.parse_primary()

    def parse_primary(self) -> Node:
        token = self.current
        if token.kind is TokenKind.LPAREN:
            self._advance()
            node = self.parse_or()
            self._expect(TokenKind.RPAREN)
            return node
        if token.kind is not TokenKind.IDENT:
            raise self._error(PRIMARY_START)

        following = self._peek()
        if following.kind is TokenKind.LPAREN:
            return self.parse_detector_call()
        if "-" in token.text:
            raise self._error(["("], following)
        self._advance()
        if following.kind is TokenKind.OP:
            return self.parse_comparison(token.text)
        if following.kind is TokenKind.DEFINE:
            # the previous definition ended without a body operand
            raise self._error(PRIMARY_START, token)
        return EventRef(token.text)

    def parse_comparison(self, stream: str) -> Comparison:
        op = self._advance().text
        value = self._expect(TokenKind.NUMBER).value
        unit = None
        # A trailing identifier is a unit unless it starts the next definition
        if self.current.kind is TokenKind.IDENT and self._peek().kind is not TokenKind.DEFINE:
            unit = self._advance().text
        return Comparison(stream=stream, op=op, value=float(value), unit=unit)

    def parse_detector_call(self) -> DetectorCall:
        name = self._advance()
        if name.text not in self.detector_names:
            raise UnknownDetectorError(name.text, self.detector_names)
        self._expect(TokenKind.LPAREN)
        stream = self._expect(TokenKind.IDENT).text
        kwargs = []
        while self.current.kind is TokenKind.COMMA:
            self._advance()
            key = self._expect(TokenKind.IDENT).text
            self._expect(TokenKind.EQUALS)
            value = self._expect(TokenKind.NUMBER).value
            kwargs.append((key, float(value)))
        self._expect(TokenKind.RPAREN)
        return DetectorCall(name=name.text, stream=stream, kwargs=tuple(kwargs))

    def parse_duration(self) -> int:
        number = self._expect(TokenKind.NUMBER)
        unit = self.current
        if unit.kind is not TokenKind.IDENT or not unit.adjacent or unit.text not in DURATION_UNITS:
            raise self._error(["duration unit (s, m, h, d)"])
        self._advance()
        seconds = number.value * DURATION_UNITS[unit.text]
        if seconds <= 0 or not math.isfinite(seconds) or not float(seconds).is_integer():
            raise self._error(["positive whole number of seconds"], number)
        return int(seconds)


def parse(text: str, detector_names: Optional[Iterable[str]] = None) -> List[Definition]:
    """
    Parse definition text into Definitions.

    Args:
        text: One or more "Name := expression" definitions
        detector_names: Names accepted in detector calls (default: registered detectors)

    Returns:
        Definitions in file order

    Raises:
        PatternSyntaxError: With line, column and expected tokens
        DuplicateDefinitionError: If a name is defined twice
        UnknownDetectorError: If a detector call names no registered detector
    """
    if detector_names is None:
        from vitacep.detectors import create_registry

        detector_names = create_registry().list_detectors()
    definitions = Parser(text, detector_names).parse_file()
    logger.debug(f"Parsed {len(definitions)} definitions")
    return definitions
