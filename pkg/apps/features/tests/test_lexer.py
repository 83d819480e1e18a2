from django.test import SimpleTestCase

from apps.features.lexer import (
    IllegalCharacter,
    TokenKind,
    UnterminatedComment,
    UnterminatedLiteral,
    strip_comments,
    tokenize,
)


def lexemes(text):
    return [token.lexeme for token in tokenize(text)]


class StripCommentsTests(SimpleTestCase):
    def test_block_comment_becomes_a_space(self):
        self.assertEqual(strip_comments("int x; /* volatile */"), "int x;  ")

    def test_comment_markers_inside_literals_are_kept(self):
        source = 'char* s = "/* not a comment */";'
        self.assertEqual(strip_comments(source), source)
        self.assertEqual(strip_comments("int c = '/';"), "int c = '/';")

    def test_line_comment_keeps_its_newline(self):
        self.assertEqual(strip_comments("// goto\nint y;"), "\nint y;")

    def test_multiline_block_comment_keeps_line_count(self):
        stripped = strip_comments("a/*\n\n*/b")
        self.assertEqual(stripped, "a \n\nb")

    def test_spliced_block_comment_keeps_line_count(self):
        self.assertEqual(strip_comments("a/*\n\n*/b", splice=True), "a \\\n\\\nb")

    def test_unterminated_comment(self):
        with self.assertRaises(UnterminatedComment) as caught:
            strip_comments("int x;\n/* never closed")
        self.assertEqual(caught.exception.line, 2)

    def test_escaped_quote_does_not_end_literal(self):
        source = 'char *s = "a\\"/*b";'
        self.assertEqual(strip_comments(source), source)


class TokenizeTests(SimpleTestCase):
    def test_maximal_munch(self):
        self.assertEqual(lexemes("a+++b"), ["a", "++", "+", "b"])
        self.assertEqual(lexemes("x<<=2"), ["x", "<<=", "2"])
        self.assertEqual(lexemes("p->q..."), ["p", "->", "q", "..."])

    def test_string_is_one_token(self):
        tokens = tokenize('"++"')
        self.assertEqual(len(tokens), 1)
        self.assertIs(tokens[0].kind, TokenKind.STRING)

    def test_keywords_and_identifiers(self):
        tokens = tokenize("volatile int volatility;")
        self.assertEqual(
            [token.kind for token in tokens],
            [TokenKind.KEYWORD, TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.PUNCTUATOR],
        )

    def test_numbers(self):
        self.assertEqual(lexemes("0x1Fu + 1.5e-3 + 10ULL"), ["0x1Fu", "+", "1.5e-3", "+", "10ULL"])

    def test_prefixed_literals(self):
        tokens = tokenize("L\"wide\" u8'c'")
        self.assertEqual([token.kind for token in tokens], [TokenKind.STRING, TokenKind.CHAR])

    def test_positions(self):
        tokens = tokenize("int a;\n  a = 1;")
        self.assertEqual((tokens[3].line, tokens[3].column), (2, 3))

    def test_unterminated_literal(self):
        with self.assertRaises(UnterminatedLiteral):
            tokenize('char *s = "open;\nint x;')

    def test_illegal_character(self):
        with self.assertRaises(IllegalCharacter):
            tokenize("int @x;")
