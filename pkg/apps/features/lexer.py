"""
Comment stripping and tokenization for C sources.

The lexer only needs to be good enough for construct detection: no
preprocessing, no trigraphs or digraphs. Punctuators are matched
longest-first so ``a+++b`` lexes as ``a ++ + b``.
"""

import re
from dataclasses import dataclass
from enum import Enum

from apps.core.errors import LocatedError


class SourceError(LocatedError):
    """The source cannot be lexed; the unit is recorded as unparsable."""


class UnterminatedComment(SourceError):
    pass


class UnterminatedLiteral(SourceError):
    pass


class IllegalCharacter(SourceError):
    pass


class TokenKind(str, Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING = "string"
    CHAR = "char"
    PUNCTUATOR = "punctuator"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    lexeme: str
    line: int
    column: int

    def is_punct(self, *lexemes: str) -> bool:
        return self.kind is TokenKind.PUNCTUATOR and self.lexeme in lexemes

    def is_keyword(self, *lexemes: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme in lexemes


KEYWORDS = frozenset(
    {
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if",
        "inline", "int", "long", "register", "restrict", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
        "unsigned", "void", "volatile", "while",
        "_Alignas", "_Alignof", "_Atomic", "_Bool", "_Complex", "_Generic",
        "_Imaginary", "_Noreturn", "_Static_assert", "_Thread_local",
        # GNU spellings
        "__attribute__", "__attribute", "__inline", "__inline__",
        "__volatile", "__volatile__", "__const", "__const__", "__restrict",
        "__restrict__", "__signed__", "__extension__", "__asm__", "asm",
        "__typeof__", "typeof", "__int128",
    }
)

PUNCTUATORS = (
    "...", "<<=", ">>=",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "*=", "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##",
    "[", "]", "(", ")", "{", "}", ".", "&", "*", "+", "-", "~", "!",
    "/", "%", "<", ">", "^", "|", "?", ":", ";", "=", ",", "#",
)

_LITERAL_PREFIX = r"(?:u8|u|U|L)?"

_TOKEN_RE = re.compile(
    "|".join(
        [
            r"(?P<space>[ \t\r\f\v\n]+|\\\n)",
            rf"(?P<string>{_LITERAL_PREFIX}\"(?:[^\"\\\n]|\\[\s\S])*\")",
            rf"(?P<char>{_LITERAL_PREFIX}'(?:[^'\\\n]|\\[\s\S])*')",
            r"(?P<number>\.?[0-9](?:[eEpP][+-]|[0-9A-Za-z_.])*)",
            r"(?P<identifier>[A-Za-z_$][A-Za-z0-9_$]*)",
            "(?P<punctuator>" + "|".join(re.escape(p) for p in PUNCTUATORS) + ")",
            rf"(?P<open_literal>{_LITERAL_PREFIX}[\"'])",
            r"(?P<illegal>.)",
        ]
    ),
    re.DOTALL,
)

_PLAIN_RUN = re.compile(r"[^\"'/]+|/")


def _line_of(text: str, index: int) -> int:
    return text.count("\n", 0, index) + 1


def _column_of(text: str, index: int) -> int:
    return index - (text.rfind("\n", 0, index) + 1) + 1


def _literal_end(text: str, start: int) -> int:
    """Index just past the literal opened at ``start`` (stops at newline)."""
    quote = text[start]
    index = start + 1
    while index < len(text):
        char = text[index]
        if char == "\\":
            index += 2
            continue
        if char == quote:
            return index + 1
        if char == "\n":
            return index
        index += 1
    return len(text)


def strip_comments(text: str, *, splice: bool = False) -> str:
    """
    Remove ``/* */`` and ``//`` comments outside literals.

    A block comment becomes a single space followed by the newlines it
    contained, so line numbers survive. With ``splice`` those newlines are
    written as backslash-newline, so a directive interrupted by a comment
    stays one logical line. A line comment disappears up to (not including)
    its newline.
    """
    pieces: list[str] = []
    index, length = 0, len(text)
    while index < length:
        char = text[index]
        if char in "\"'":
            end = _literal_end(text, index)
            pieces.append(text[index:end])
            index = end
        elif text.startswith("/*", index):
            close = text.find("*/", index + 2)
            if close == -1:
                raise UnterminatedComment(
                    "unterminated block comment", _line_of(text, index), _column_of(text, index)
                )
            line_break = "\\\n" if splice else "\n"
            pieces.append(" " + line_break * text.count("\n", index, close))
            index = close + 2
        elif text.startswith("//", index):
            newline = text.find("\n", index)
            index = length if newline == -1 else newline
        else:
            match = _PLAIN_RUN.match(text, index)
            pieces.append(match.group())
            index = match.end()
    return "".join(pieces)


def tokenize(stripped: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    position = 0
    while position < len(stripped):
        match = _TOKEN_RE.match(stripped, position)
        kind = match.lastgroup
        lexeme = match.group()
        column = position - line_start + 1
        if kind == "space":
            newlines = lexeme.count("\n")
            if newlines:
                line += newlines
                line_start = position + lexeme.rfind("\n") + 1
        elif kind == "open_literal":
            raise UnterminatedLiteral("unterminated literal", line, column)
        elif kind == "illegal":
            raise IllegalCharacter(f"illegal character {lexeme!r}", line, column)
        else:
            if kind == "identifier" and lexeme in KEYWORDS:
                token_kind = TokenKind.KEYWORD
            else:
                token_kind = TokenKind(kind)
            tokens.append(Token(token_kind, lexeme, line, column))
            if "\n" in lexeme:  # backslash-newline inside a literal
                line += lexeme.count("\n")
                line_start = position + lexeme.rfind("\n") + 1
        position = match.end()
    return tokens
