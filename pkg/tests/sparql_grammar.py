"""A tiny independent recursive-descent validator for the SPARQL subset
used by the country lookup query. Test helper only: it accepts SELECT
queries with VALUES blocks, triple patterns, property lists, UNION
groups and simple FILTER expressions, and raises SyntaxError otherwise.
"""

import re

_TOKEN_RE = re.compile(
    r"""
    (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<pname>[A-Za-z][A-Za-z0-9_\-]*:[A-Za-z][A-Za-z0-9_\-]*)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}().;,=])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)

KEYWORDS = {"SELECT", "DISTINCT", "VALUES", "UNION", "FILTER", "STR", "a"}


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise SyntaxError(f"bad character at {pos}: {text[pos:pos + 10]!r}")
        pos = match.end()
        kind = match.lastgroup
        if kind == "ws":
            continue
        value = match.group()
        if kind == "word" and value not in KEYWORDS:
            raise SyntaxError(f"unknown bare word {value!r}")
        tokens.append((kind, value))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        actual_kind, actual_value = self.peek()
        if actual_kind is None:
            raise SyntaxError("unexpected end of query")
        if kind is not None and actual_kind != kind:
            raise SyntaxError(f"expected {kind}, got {actual_value!r}")
        if value is not None and actual_value != value:
            raise SyntaxError(f"expected {value!r}, got {actual_value!r}")
        self.pos += 1
        return actual_value

    def at(self, kind=None, value=None):
        actual_kind, actual_value = self.peek()
        return (kind is None or actual_kind == kind) and (value is None or actual_value == value)

    # Query := SELECT DISTINCT? Var+ Group
    def query(self):
        self.take("word", "SELECT")
        if self.at("word", "DISTINCT"):
            self.take()
        if not self.at("var"):
            raise SyntaxError("SELECT needs at least one variable")
        while self.at("var"):
            self.take()
        self.group()
        if self.peek()[0] is not None:
            raise SyntaxError(f"trailing tokens: {self.peek()[1]!r}")

    # Group := '{' (Values | Filter | UnionGroup | Triples)* '}'
    def group(self):
        self.take("punct", "{")
        while not self.at("punct", "}"):
            if self.at("word", "VALUES"):
                self.values()
            elif self.at("word", "FILTER"):
                self.filter_()
            elif self.at("punct", "{"):
                self.group()
                while self.at("word", "UNION"):
                    self.take()
                    self.group()
            else:
                self.triples()
        self.take("punct", "}")

    def values(self):
        self.take("word", "VALUES")
        self.take("var")
        self.take("punct", "{")
        while self.at("string"):
            self.take()
        self.take("punct", "}")

    def triples(self):
        self.term()
        self.property_list()
        if self.at("punct", "."):
            self.take()

    def property_list(self):
        self.verb()
        self.object_()
        while self.at("punct", ";"):
            self.take()
            self.verb()
            self.object_()

    def verb(self):
        if self.at("word", "a"):
            self.take()
        elif self.at("pname") or self.at("var"):
            self.take()
        else:
            raise SyntaxError(f"expected predicate, got {self.peek()[1]!r}")

    def term(self):
        if self.at("var") or self.at("pname"):
            self.take()
        else:
            raise SyntaxError(f"expected subject, got {self.peek()[1]!r}")

    def object_(self):
        if self.at("var") or self.at("pname") or self.at("string"):
            self.take()
        else:
            raise SyntaxError(f"expected object, got {self.peek()[1]!r}")

    def filter_(self):
        self.take("word", "FILTER")
        self.take("punct", "(")
        self.primary()
        if self.at("punct", "="):
            self.take()
            self.primary()
        self.take("punct", ")")

    def primary(self):
        if self.at("word", "STR"):
            self.take()
            self.take("punct", "(")
            self.take("var")
            self.take("punct", ")")
        elif self.at("var") or self.at("string"):
            self.take()
        else:
            raise SyntaxError(f"expected expression, got {self.peek()[1]!r}")


def validate_query(text: str) -> None:
    """Raise SyntaxError unless ``text`` is a well-formed query in the
    supported SPARQL subset."""
    _Parser(tokenize(text)).query()
