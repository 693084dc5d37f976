"""Parser for the module-definition language (MDL) and its composition syntax.

A module declares tags, a grammar fragment and semantic roles::

    module rot.Backup {
      tags: task;
      syntax {
        Task <-- "backup" String String;
        Cmd <-- Task;
      }
      role(eval) {
        uses $$FileOp;
      }
    }

Composition files pair modules with roles (slices) and assemble slices
into a product (languages); they are what product generation emits and
what :func:`parse_composition` reads back.  Comments run from ``//`` to
the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MdlSyntaxError

NT_RE = re.compile(r"[A-Z][A-Za-z0-9]*\Z")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SYMBOLS = ("<--", "$$", "=>", "{", "}", "(", ")", ";", ":", ",", ".", "<", ">")


@dataclass(frozen=True)
class Token:
    kind: str  # name | string | symbol | eof
    text: str
    line: int
    col: int


def _tokenize(text: str, source: str | None) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < length and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            i, col = i + 1, col + 1
            chars = []
            while i < length and text[i] != '"':
                if text[i] == "\n":
                    raise MdlSyntaxError(start_line, start_col, "a closing '\"'", "end of line", source)
                if text[i] == "\\" and i + 1 < length:
                    chars.append(text[i + 1])
                    i, col = i + 2, col + 2
                else:
                    chars.append(text[i])
                    i, col = i + 1, col + 1
            if i >= length:
                raise MdlSyntaxError(start_line, start_col, "a closing '\"'", "end of input", source)
            tokens.append(Token("string", "".join(chars), start_line, start_col))
            i, col = i + 1, col + 1
            continue
        match = _NAME_RE.match(text, i)
        if match:
            tokens.append(Token("name", match.group(), line, col))
            col += match.end() - i
            i = match.end()
            continue
        for symbol in _SYMBOLS:
            if text.startswith(symbol, i):
                tokens.append(Token("symbol", symbol, line, col))
                i, col = i + len(symbol), col + len(symbol)
                break
        else:
            raise MdlSyntaxError(line, col, "a token", repr(ch), source)
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[tuple[str, str], ...]  # ("nt", name) or ("terminal", text)
    line: int


@dataclass(frozen=True)
class Role:
    name: str
    uses: tuple[str, ...]
    provides: tuple[tuple[str, str], ...]  # (structure, variant)
    line: int


@dataclass(frozen=True)
class MdlModule:
    name: str
    tags: tuple[str, ...]
    productions: tuple[Production, ...]
    roles: tuple[Role, ...]
    source: str | None = None
    line: int = 1


@dataclass(frozen=True)
class SliceUnit:
    name: str
    syntax_from: str | None
    roles: tuple[tuple[str, str], ...]  # (module, role)


@dataclass(frozen=True)
class LanguageUnit:
    name: str
    slices: tuple[str, ...]
    renames: tuple[tuple[str, str], ...]
    roles: tuple[str, ...]
    visit: str


class _Parser:
    def __init__(self, text: str, source: str | None):
        self.tokens = _tokenize(text, source)
        self.source = source
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def fail(self, expected: str, token: Token | None = None):
        token = token or self.peek()
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise MdlSyntaxError(token.line, token.col, expected, found, self.source)

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token.text != text or token.kind == "string":
            self.fail(repr(text))
        return self.advance()

    def expect_name(self, expected: str = "an identifier") -> Token:
        token = self.peek()
        if token.kind != "name":
            self.fail(expected)
        return self.advance()

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.kind in ("name", "symbol") and token.text == text

    def dotted(self) -> str:
        parts = [self.expect_name("a module name").text]
        while self.at("."):
            self.advance()
            parts.append(self.expect_name("a name segment").text)
        return ".".join(parts)

    def nonterminal(self) -> Token:
        token = self.expect_name("a nonterminal")
        if not NT_RE.match(token.text):
            self.fail("a nonterminal", token)
        return token


def parse_module(text: str, source: str | None = None) -> MdlModule:
    parser = _Parser(text, source)
    module = _module(parser)
    if parser.peek().kind != "eof":
        parser.fail("end of input")
    return module


def _module(p: _Parser) -> MdlModule:
    start = p.expect("module")
    name = p.dotted()
    p.expect("{")
    tags: list[str] = []
    if p.at("tags"):
        p.advance()
        p.expect(":")
        tags.append(p.expect_name("a tag").text)
        while p.at(","):
            p.advance()
            tags.append(p.expect_name("a tag").text)
        p.expect(";")
    productions: list[Production] = []
    if p.at("syntax"):
        p.advance()
        p.expect("{")
        while not p.at("}"):
            lhs = p.nonterminal()
            p.expect("<--")
            rhs: list[tuple[str, str]] = []
            while not p.at(";"):
                token = p.peek()
                if token.kind == "string":
                    rhs.append(("terminal", p.advance().text))
                elif token.kind == "name":
                    rhs.append(("nt", p.nonterminal().text))
                else:
                    p.fail("';'")
            p.expect(";")
            productions.append(Production(lhs.text, tuple(rhs), lhs.line))
        p.expect("}")
    roles: list[Role] = []
    seen_roles: set[str] = set()
    while p.at("role"):
        role = _role(p)
        if role.name in seen_roles:
            raise MdlSyntaxError(role.line, 1, "a distinct role name", repr(role.name), p.source)
        seen_roles.add(role.name)
        roles.append(role)
    p.expect("}")
    return MdlModule(name, tuple(tags), tuple(productions), tuple(roles), p.source, start.line)


def _role(p: _Parser) -> Role:
    start = p.expect("role")
    p.expect("(")
    name = p.expect_name("a role name").text
    p.expect(")")
    p.expect("{")
    uses: list[str] = []
    provides: list[tuple[str, str]] = []
    while not p.at("}"):
        if p.at("uses"):
            p.advance()
            p.expect("$$")
            uses.append(p.expect_name("a structure name").text)
            p.expect(";")
        elif p.at("provides"):
            p.advance()
            p.expect("$$")
            structure = p.expect_name("a structure name").text
            p.expect(":")
            variant = p.expect_name("a variant name").text
            p.expect(";")
            provides.append((structure, variant))
        else:
            p.fail("'uses', 'provides' or '}'")
    p.expect("}")
    return Role(name, tuple(uses), tuple(provides), start.line)


def parse_composition(text: str, source: str | None = None) -> list[SliceUnit | LanguageUnit]:
    """Parse slice and language units, the output shape of product generation."""
    parser = _Parser(text, source)
    units: list[SliceUnit | LanguageUnit] = []
    while parser.peek().kind != "eof":
        if parser.at("slice"):
            units.append(_slice(parser))
        elif parser.at("language"):
            units.append(_language(parser))
        else:
            parser.fail("'slice' or 'language'")
    return units


def _slice(p: _Parser) -> SliceUnit:
    p.expect("slice")
    name = p.expect_name("a slice name").text
    p.expect("{")
    syntax_from: str | None = None
    if p.at("concrete"):
        p.advance()
        p.expect("syntax")
        p.expect("from")
        syntax_from = p.dotted()
    roles: list[tuple[str, str]] = []
    while p.at("module"):
        p.advance()
        module = p.dotted()
        p.expect("with")
        p.expect("role")
        roles.append((module, p.expect_name("a role name").text))
    p.expect("}")
    return SliceUnit(name, syntax_from, tuple(roles))


def _language(p: _Parser) -> LanguageUnit:
    p.expect("language")
    name = p.expect_name("a language name").text
    p.expect("{")
    p.expect("slices")
    slices = [p.expect_name("a slice name").text]
    while p.peek().kind == "name" and not p.at("rename") and not p.at("roles") and not p.at("visit"):
        slices.append(p.advance().text)
    renames: list[tuple[str, str]] = []
    if p.at("rename"):
        p.advance()
        p.expect("{")
        while not p.at("}"):
            old = p.nonterminal().text
            p.expect("=>")
            renames.append((old, p.nonterminal().text))
        p.expect("}")
    roles: list[str] = []
    if p.at("roles"):
        p.advance()
        p.expect("syntax")
        p.expect("<")
        roles.append(p.expect_name("a role name").text)
        while p.at(":"):
            p.advance()
            roles.append(p.expect_name("a role name").text)
        p.expect(">")
    p.expect("visit")
    visit = p.expect_name("a visit kind").text
    p.expect("}")
    return LanguageUnit(name, tuple(slices), tuple(renames), tuple(roles), visit)
