"""
Shared tokenizer for the text grammars (groups, complexes, spaces, presheaves)
"""
import re

from completion.errors import ParseError

_INT = re.compile(r'[+-]?\d+')
_COUNT = re.compile(r'\d+')
_IDENT = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')


class Scanner:
    """Whitespace-insensitive cursor over a grammar input."""

    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        # '#' starts a comment running to the end of the line
        if self.pos < len(self.text) and self.text[self.pos] == '#':
            end = self.text.find('\n', self.pos)
            self.pos = len(self.text) if end < 0 else end
            self.skip_ws()

    def at_end(self):
        self.skip_ws()
        return self.pos >= len(self.text)

    def error(self, expected):
        self.skip_ws()
        return ParseError(self.pos, expected, self.text)

    def peek(self, literal):
        self.skip_ws()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal):
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal):
        if not self.accept(literal):
            raise self.error(repr(literal))

    def peek_keyword(self, word):
        """Like peek, but the word may not run on into further letters."""
        if not self.peek(word):
            return False
        nxt = self.pos + len(word)
        return nxt >= len(self.text) or not (self.text[nxt].isalpha() or self.text[nxt] == '_')

    def accept_keyword(self, word):
        if self.peek_keyword(word):
            self.pos += len(word)
            return True
        return False

    def expect_keyword(self, word):
        if not self.accept_keyword(word):
            raise self.error(repr(word))

    def _match(self, pattern, expected):
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise self.error(expected)
        self.pos = m.end()
        return m.group(0)

    def integer(self):
        return int(self._match(_INT, 'integer'))

    def count(self, minimum=0, expected='count'):
        start = self.pos
        value = int(self._match(_COUNT, expected))
        if value < minimum:
            raise ParseError(start, f"{expected} >= {minimum}", self.text)
        return value

    def identifier(self):
        return self._match(_IDENT, 'identifier')

    def finish(self):
        if not self.at_end():
            raise self.error('end of input')
