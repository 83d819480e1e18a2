"""
Construct detection over a token stream.

Each feature is counted by a token rule plus a little syntactic context
(bracket kinds, aggregate bodies, typedef names). The rules favour
undercounting over false positives where C is ambiguous without a parser,
most visibly for the comma operator.
"""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .catalog import FEATURE_COUNT, FEATURE_NAMES, FeatureVector
from .lexer import SourceError, Token, TokenKind, strip_comments, tokenize

logger = logging.getLogger(__name__)

TYPE_KEYWORDS = frozenset(
    {
        "void", "char", "short", "int", "long", "float", "double", "signed",
        "unsigned", "_Bool", "_Complex", "__int128", "__signed__",
    }
)
CONST_WORDS = frozenset({"const", "__const", "__const__"})
VOLATILE_WORDS = frozenset({"volatile", "__volatile", "__volatile__"})
QUALIFIERS = CONST_WORDS | VOLATILE_WORDS | {"restrict", "__restrict", "__restrict__", "_Atomic"}
INLINE_WORDS = frozenset({"inline", "__inline", "__inline__"})
ATTRIBUTE_WORDS = frozenset({"__attribute__", "__attribute"})
TAG_WORDS = frozenset({"struct", "union", "enum"})
COMPOUND_ASSIGNMENTS = frozenset({"+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="})
PACKED_WORDS = frozenset({"packed", "__packed__"})
OPENERS = {"(": ")", "[": "]", "{": "}"}
CLOSERS = {")": "(", "]": "[", "}": "{"}

_DIRECTIVE = re.compile(r"^\s*#")
_PRAGMA_PACK = re.compile(r"^\s*#\s*pragma\s+pack\b")
_INDEX = {name: index for index, name in enumerate(FEATURE_NAMES)}


@dataclass(frozen=True)
class SourceUnit:
    """
    A C file as text.

    ``text`` is the file's bytes decoded as UTF-8 with invalid sequences
    replaced. ``stripped_text`` raises ``UnterminatedComment`` for sources
    whose comments never close.
    """

    path: str
    text: str

    @classmethod
    def from_bytes(cls, path: str, data: bytes) -> "SourceUnit":
        return cls(path, data.decode("utf-8", errors="replace"))

    @classmethod
    def read(cls, path: Path, name: str | None = None) -> "SourceUnit":
        return cls.from_bytes(name or str(path), path.read_bytes())

    @cached_property
    def stripped_text(self) -> str:
        return strip_comments(self.text, splice=True)


@dataclass(frozen=True)
class MatchSite:
    feature: str
    line: int
    column: int


@dataclass(frozen=True)
class ExtractionResult:
    vector: FeatureVector | None
    parsable: bool
    diagnostics: tuple[MatchSite, ...] = ()
    error: str | None = None


def drop_directives(stripped: str) -> tuple[str, list[int]]:
    """
    Blank out preprocessor lines, keeping the line count.

    Returns the remaining text and the line numbers of ``#pragma pack``
    directives, which are the only directives the detectors care about.
    """
    lines = stripped.split("\n")
    pragma_lines: list[int] = []
    number = 0
    while number < len(lines):
        if not _DIRECTIVE.match(lines[number]):
            number += 1
            continue
        first = number
        logical: list[str] = []
        # a directive continues while its lines end in a backslash
        while True:
            continued = lines[number].endswith("\\")
            logical.append(lines[number][:-1] if continued else lines[number])
            lines[number] = ""
            number += 1
            if not continued or number >= len(lines):
                break
        if _PRAGMA_PACK.match("".join(logical)):
            pragma_lines.append(first + 1)
    return "\n".join(lines), pragma_lines


class _Analysis:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.counts = [0] * FEATURE_COUNT
        self.sites: list[MatchSite] = []
        self.match = self._match_brackets()
        self.in_attribute = self._attribute_mask()
        self.tag_names, self.aggregate_opens = self._aggregates()
        self.type_names = self._typedef_names()
        self.declarator_stars: set[int] = set()
        self.postfix_ops: set[int] = set()

    # Structure

    def _match_brackets(self) -> dict[int, int]:
        match: dict[int, int] = {}
        stack: list[int] = []
        for index, token in enumerate(self.tokens):
            if token.kind is not TokenKind.PUNCTUATOR:
                continue
            if token.lexeme in OPENERS:
                stack.append(index)
            elif token.lexeme in CLOSERS and stack:
                if self.tokens[stack[-1]].lexeme == CLOSERS[token.lexeme]:
                    opened = stack.pop()
                    match[opened] = index
                    match[index] = opened
        return match

    def _attribute_mask(self) -> list[bool]:
        mask = [False] * len(self.tokens)
        for index, token in enumerate(self.tokens):
            if not token.is_keyword(*ATTRIBUTE_WORDS):
                continue
            mask[index] = True
            following = index + 1
            if following < len(self.tokens) and self.tokens[following].is_punct("("):
                end = self.match.get(following, len(self.tokens) - 1)
                for inside in range(following, end + 1):
                    mask[inside] = True
        return mask

    def _skip_attributes(self, index: int) -> int:
        while index < len(self.tokens) and self.in_attribute[index]:
            index += 1
        return index

    def _aggregates(self) -> tuple[set[int], dict[int, str]]:
        tags: set[int] = set()
        opens: dict[int, str] = {}
        for index, token in enumerate(self.tokens):
            if not token.is_keyword(*TAG_WORDS):
                continue
            cursor = self._skip_attributes(index + 1)
            if cursor < len(self.tokens) and self.tokens[cursor].kind is TokenKind.IDENTIFIER:
                tags.add(cursor)
                cursor = self._skip_attributes(cursor + 1)
            if cursor < len(self.tokens) and self.tokens[cursor].is_punct("{"):
                opens[cursor] = token.lexeme
        return tags, opens

    def _typedef_names(self) -> set[str]:
        names: set[str] = set()
        terminators = {";", ",", "[", ")"}
        for index, token in enumerate(self.tokens):
            if not token.is_keyword("typedef"):
                continue
            cursor = index + 1
            while cursor < len(self.tokens):
                current = self.tokens[cursor]
                if current.is_punct("{") and cursor in self.match:
                    cursor = self.match[cursor] + 1
                    continue
                if current.is_punct(";"):
                    break
                if (
                    current.kind is TokenKind.IDENTIFIER
                    and cursor not in self.tag_names
                    and not self.in_attribute[cursor]
                    and cursor + 1 < len(self.tokens)
                ):
                    following = self.tokens[cursor + 1]
                    if (
                        following.kind is TokenKind.PUNCTUATOR and following.lexeme in terminators
                    ) or following.is_keyword(*ATTRIBUTE_WORDS):
                        names.add(current.lexeme)
                cursor += 1
        return names

    def is_type_name(self, index: int) -> bool:
        token = self.tokens[index]
        if token.kind is not TokenKind.IDENTIFIER:
            return False
        return (
            index in self.tag_names
            or token.lexeme in self.type_names
            or token.lexeme.endswith("_t")
            or token.lexeme == "FILE"
        )

    def _is_type_word(self, index: int) -> bool:
        token = self.tokens[index]
        if token.kind is TokenKind.KEYWORD:
            return token.lexeme in TYPE_KEYWORDS or token.lexeme in QUALIFIERS
        return self.is_type_name(index)

    def ends_operand(self, index: int) -> bool:
        """True when the token at ``index`` can end an operand (so an operator after it is binary)."""
        if index < 0:
            return False
        token = self.tokens[index]
        if token.kind in (TokenKind.IDENTIFIER, TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR):
            return True
        if token.is_punct(")", "]"):
            return True
        return index in self.postfix_ops

    def _opens_expression(self, index: int) -> bool:
        if index < 0:
            return True
        token = self.tokens[index]
        if token.kind is TokenKind.PUNCTUATOR:
            return token.lexeme not in (")", "]")
        return token.is_keyword("return")

    def _classify_stars(self) -> None:
        for index, token in enumerate(self.tokens):
            if not token.is_punct("*") or self.in_attribute[index] or index == 0:
                continue
            previous = self.tokens[index - 1]
            if self._is_type_word(index - 1):
                self.declarator_stars.add(index)
            elif previous.is_punct("*") and index - 1 in self.declarator_stars:
                self.declarator_stars.add(index)
            elif previous.is_punct("(") and index >= 2 and self._is_type_word(index - 2):
                self.declarator_stars.add(index)

    # Counting

    def hit(self, feature: str, line: int, column: int) -> None:
        self.counts[_INDEX[feature]] += 1
        self.sites.append(MatchSite(feature, line, column))

    def _hit_token(self, feature: str, token: Token) -> None:
        self.hit(feature, token.line, token.column)

    def _near_declarator_star(self, index: int) -> bool:
        return any(
            other in self.declarator_stars
            for other in range(index - 2, index + 3)
            if other != index
        )

    def run(self) -> None:
        self._classify_stars()
        stack: list[str] = []
        tokens = self.tokens
        for index, token in enumerate(tokens):
            following = tokens[index + 1] if index + 1 < len(tokens) else None
            if self.in_attribute[index]:
                if token.kind is TokenKind.IDENTIFIER and token.lexeme in PACKED_WORDS:
                    self._hit_token("packed-struct", token)
                continue
            if token.kind is TokenKind.PUNCTUATOR:
                self._punctuator(index, token, following, stack)
            elif token.kind is TokenKind.KEYWORD:
                self._keyword(index, token, following)
            elif token.kind is TokenKind.IDENTIFIER:
                self._identifier(index, token, following)
        self._count_globals()

    def _punctuator(self, index: int, token: Token, following: Token | None, stack: list[str]) -> None:
        lexeme = token.lexeme
        if lexeme == "(":
            stack.append("expr" if self._opens_expression(index - 1) else "other")
        elif lexeme == "[":
            stack.append("bracket")
            if index > 0 and (
                self.tokens[index - 1].kind is TokenKind.IDENTIFIER or self.tokens[index - 1].is_punct("]")
            ):
                self._hit_token("arrays", token)
        elif lexeme == "{":
            aggregate = self.aggregate_opens.get(index)
            stack.append("aggregate" if aggregate in ("struct", "union") else "brace")
        elif lexeme in CLOSERS:
            if stack:
                stack.pop()
        elif lexeme == ",":
            if stack and stack[-1] == "expr":
                self._hit_token("comma-operators", token)
        elif lexeme == ":":
            if stack and stack[-1] == "aggregate" and following is not None and following.kind is TokenKind.NUMBER:
                self._hit_token("bitfields", token)
        elif lexeme in COMPOUND_ASSIGNMENTS:
            self._hit_token("compound-assignment", token)
        elif lexeme in ("/", "%"):
            if self.ends_operand(index - 1):
                self._hit_token("divs", token)
        elif lexeme == "*":
            if index in self.declarator_stars:
                self._hit_token("pointers", token)
            elif self.ends_operand(index - 1):
                self._hit_token("muls", token)
        elif lexeme in ("++", "--"):
            previous = self.tokens[index - 1] if index > 0 else None
            postfix = previous is not None and (
                previous.kind is TokenKind.IDENTIFIER or previous.is_punct(")", "]")
            )
            operator = "incr" if lexeme == "++" else "decr"
            if postfix:
                self.postfix_ops.add(index)
                self._hit_token(f"post-{operator}-operator", token)
            else:
                self._hit_token(f"pre-{operator}-operator", token)
        elif lexeme == "+":
            if not self.ends_operand(index - 1):
                self._hit_token("unary-plus-operator", token)
        elif lexeme == "&":
            if not self.ends_operand(index - 1):
                self._hit_token("pointers", token)
        elif lexeme == "->":
            self._hit_token("pointers", token)

    def _keyword(self, index: int, token: Token, following: Token | None) -> None:
        lexeme = token.lexeme
        if lexeme in CONST_WORDS:
            self._hit_token("consts", token)
            if self._near_declarator_star(index):
                self._hit_token("const-pointers", token)
        elif lexeme in VOLATILE_WORDS:
            self._hit_token("volatiles", token)
            if self._near_declarator_star(index):
                self._hit_token("volatile-pointers", token)
        elif lexeme == "goto":
            self._hit_token("jumps", token)
        elif lexeme == "long":
            if following is not None and following.is_keyword("long"):
                previous = self.tokens[index - 1] if index > 0 else None
                if previous is None or not previous.is_keyword("long"):
                    self._hit_token("longlong", token)
        elif lexeme in ("float", "double"):
            self._hit_token("float", token)
        elif lexeme in INLINE_WORDS:
            self._hit_token("inline-function", token)
        elif lexeme == "struct":
            self._hit_token("structs", token)
        elif lexeme == "union":
            self._hit_token("unions", token)

    def _identifier(self, index: int, token: Token, following: Token | None) -> None:
        lexeme = token.lexeme
        if lexeme == "argc":
            self._hit_token("argc", token)
        elif lexeme == "main" and following is not None and following.is_punct("("):
            if self._main_has_parameters(index + 1):
                self._hit_token("argc", token)
        elif lexeme == "int8_t":
            self._hit_token("int8", token)
        elif lexeme == "uint8_t":
            self._hit_token("uint8", token)
        elif lexeme.startswith("__builtin_"):
            self._hit_token("builtins", token)

    def _main_has_parameters(self, open_index: int) -> bool:
        tokens = self.tokens
        first = open_index + 1
        if first >= len(tokens) or tokens[first].is_punct(")"):
            return False
        if tokens[first].is_keyword("void") and first + 1 < len(tokens) and tokens[first + 1].is_punct(")"):
            return False
        return True

    # Globals

    def _count_globals(self) -> None:
        tokens = self.tokens
        start = 0
        index = 0
        while index < len(tokens):
            token = tokens[index]
            if token.is_punct("{"):
                close = self.match.get(index)
                if close is None:
                    return
                initializer = index > 0 and tokens[index - 1].is_punct("=")
                if index in self.aggregate_opens or initializer:
                    index = close + 1
                    continue
                # function body: the declaration so far was a definition
                index = close + 1
                start = index
                continue
            if token.is_punct("(", "[") and index in self.match:
                index = self.match[index] + 1
                continue
            if token.is_punct(";"):
                declarator = self._global_declarator(start, index)
                if declarator is not None:
                    self._hit_token("global-variables", tokens[declarator])
                start = index + 1
            index += 1

    def _global_declarator(self, start: int, end: int) -> int | None:
        """Index of the declared variable's name, or None for functions and type-only declarations."""
        tokens = self.tokens
        if any(tokens[cursor].is_keyword("typedef") for cursor in range(start, end)):
            return None
        candidate: int | None = None
        cursor = start
        while cursor < end:
            token = tokens[cursor]
            if self.in_attribute[cursor]:
                cursor += 1
                continue
            if token.is_punct("{") and cursor in self.match:
                cursor = self.match[cursor] + 1
                continue
            if token.is_punct("=", ",", ";", "["):
                break
            if token.is_punct("("):
                if candidate is not None and candidate == cursor - 1:
                    return None
            elif token.kind is TokenKind.IDENTIFIER and not self.is_type_name(cursor):
                candidate = cursor
            cursor += 1
        return candidate


def extract_text(text: str, path: str = "<memory>") -> ExtractionResult:
    return extract_features(SourceUnit(path, text))


def extract_features(unit: SourceUnit) -> ExtractionResult:
    try:
        source, pragma_lines = drop_directives(unit.stripped_text)
        tokens = tokenize(source)
    except SourceError as exc:
        logger.debug("%s is unparsable: %s", unit.path, exc)
        return ExtractionResult(vector=None, parsable=False, error=str(exc))

    analysis = _Analysis(tokens)
    for line in pragma_lines:
        analysis.hit("packed-struct", line, 1)
    analysis.run()
    return ExtractionResult(
        vector=FeatureVector(tuple(analysis.counts)),
        parsable=True,
        diagnostics=tuple(analysis.sites),
    )
