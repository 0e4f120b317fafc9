"""Expression language for building links and knot trees.

Grammar (whitespace is insignificant, integers are signed decimals)::

    expr     := primary [ "." selector ]
    primary  := "O" | "T(" int "," int ")" | "S(" int "," int [ "|" flags ] ")"
              | "H(" int [ ";neg=" int ] ")" | "U(" int ")" | "atom(" name ")"
              | "splice(" expr "," expr ")" | "sum(" expr { "," expr } ")"
              | "cable(" int "," int "," expr ")" | "whitehead(" expr ")"
              | "delete(" expr "," compref ")"
              | "rename(" expr { "," name "->" name } ")"
    flags    := [ "*1" | "*2" { "," "*1" | "*2" } ]
    selector := "fiber[" int "]" | "star1" | "star2" | "key[" int "]" | "keyring"
              | "comp[" name "]"
    compref  := [ "." ] selector | name

A selector names the external component used by ``splice``; it may be
omitted when the operand has a single external label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

from splicegraph import engine
from splicegraph.diagram import SpliceDiagram, delete_component, single_vertex
from splicegraph.errors import ParseError, SpliceError
from splicegraph.links import STAR1, STAR2, KeyChain, SeifertLink, Unlink, atom_ref

if TYPE_CHECKING:
    from splicegraph.atomdb import AtomDatabase


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


_NOPOS = field(default=Pos(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Selector:
    kind: str  # fiber, star1, star2, key, keyring, comp
    arg: str | None = None

    @property
    def external(self) -> str:
        if self.kind in ("fiber", "key"):
            return f"{self.kind}[{self.arg}]"
        if self.kind == "comp":
            return str(self.arg)
        return self.kind

    def text(self) -> str:
        if self.kind in ("fiber", "key", "comp"):
            return f"{self.kind}[{self.arg}]"
        return self.kind


@dataclass(frozen=True)
class Lit:
    kind: str  # O, T, S, H, U
    args: tuple[int, ...] = ()
    flags: tuple[str, ...] = ()
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class AtomLit:
    name: str
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Select:
    expr: "Node"
    sel: Selector
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Splice:
    left: "Node"
    right: "Node"
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Sum:
    items: tuple["Node", ...]
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Cable:
    p: int
    q: int
    expr: "Node"
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Whitehead:
    expr: "Node"
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Delete:
    expr: "Node"
    sel: Selector
    pos: Pos = _NOPOS


@dataclass(frozen=True)
class Rename:
    expr: "Node"
    pairs: tuple[tuple[str, str], ...]
    pos: Pos = _NOPOS


Node = Union[Lit, AtomLit, Select, Splice, Sum, Cable, Whitehead, Delete, Rename]


# ---------------------------------------------------------------------------
# parser

_NAME_STOP = set(",() \t\r\n")


class _Parser:
    def __init__(self, text: str) -> None:
        self.s = text
        self.i = 0

    # -- low level
    def pos(self) -> Pos:
        before = self.s[: self.i]
        line = before.count("\n") + 1
        col = self.i - (before.rfind("\n") + 1) + 1
        return Pos(line, col)

    def error(self, msg: str, code: str = "SYNTAX") -> ParseError:
        p = self.pos()
        return ParseError(code, msg, p.line, p.col)

    def ws(self) -> None:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, tok: str) -> None:
        self.ws()
        if not self.s.startswith(tok, self.i):
            found = self.s[self.i : self.i + 1] or "end of input"
            raise self.error(f"expected {tok!r}, found {found!r}")
        self.i += len(tok)

    def accept(self, tok: str) -> bool:
        self.ws()
        if self.s.startswith(tok, self.i):
            self.i += len(tok)
            return True
        return False

    def ident(self) -> str:
        self.ws()
        j = self.i
        while j < len(self.s) and (self.s[j].isalnum() or self.s[j] == "_"):
            j += 1
        if j == self.i:
            found = self.s[self.i : self.i + 1] or "end of input"
            raise self.error(f"expected a name, found {found!r}")
        word = self.s[self.i : j]
        self.i = j
        return word

    def integer(self) -> int:
        self.ws()
        j = self.i
        if j < len(self.s) and self.s[j] in "+-":
            j += 1
        k = j
        while k < len(self.s) and self.s[k].isdigit():
            k += 1
        if k == j:
            raise self.error("expected an integer")
        value = int(self.s[self.i : k])
        self.i = k
        return value

    def raw_until(self, close: str) -> str:
        """Text up to the matching ``close`` bracket, honouring nesting."""
        self.ws()
        opener = {")": "(", "]": "["}[close]
        depth = 0
        j = self.i
        while j < len(self.s):
            ch = self.s[j]
            if ch == opener:
                depth += 1
            elif ch == close:
                if depth == 0:
                    break
                depth -= 1
            j += 1
        else:
            raise self.error(f"unterminated name, expected {close!r}")
        name = self.s[self.i : j].strip()
        if not name:
            raise self.error("empty name")
        self.i = j
        return name

    def name(self) -> str:
        self.ws()
        j = self.i
        while j < len(self.s) and self.s[j] not in _NAME_STOP and not self.s.startswith("->", j):
            if self.s[j] == "[":
                end = self.s.find("]", j)
                if end < 0:
                    raise self.error("unterminated '['")
                j = end + 1
                continue
            j += 1
        if j == self.i:
            raise self.error("expected a component name")
        name = self.s[self.i : j]
        self.i = j
        return name

    # -- grammar
    def parse(self) -> Node:
        node = self.expr()
        self.ws()
        if self.i != len(self.s):
            raise self.error(f"unexpected trailing input {self.s[self.i:self.i + 10]!r}")
        return node

    def expr(self) -> Node:
        start = self.pos()
        node = self.primary()
        if self.peek() == ".":
            self.i += 1
            sel_pos = self.pos()
            sel = self.selector()
            _static_check(node, sel, sel_pos)
            node = Select(node, sel, start)
        return node

    def selector(self) -> Selector:
        word = self.ident()
        if word in ("fiber", "key"):
            self.expect("[")
            n = self.integer()
            self.expect("]")
            return Selector(word, str(n))
        if word in ("star1", "star2", "keyring"):
            return Selector(word)
        if word == "comp":
            self.expect("[")
            name = self.raw_until("]")
            self.expect("]")
            return Selector("comp", name)
        raise self.error(f"unknown selector {word!r}", "UNKNOWN_SELECTOR")

    def compref(self) -> Selector:
        self.ws()
        if self.accept("."):
            return self.selector()
        save = self.i
        word_end = save
        while word_end < len(self.s) and (self.s[word_end].isalnum() or self.s[word_end] == "_"):
            word_end += 1
        word = self.s[save:word_end]
        if word in ("fiber", "key", "comp") and self.s[word_end : word_end + 1] == "[":
            return self.selector()
        if word in ("star1", "star2", "keyring") and (
            word_end == len(self.s) or self.s[word_end] in _NAME_STOP
        ):
            return self.selector()
        return Selector("comp", self.name())

    def primary(self) -> Node:
        start = self.pos()
        word = self.ident()
        if word == "O":
            return Lit("O", pos=start)
        if word == "T":
            self.expect("(")
            p = self.integer()
            self.expect(",")
            q = self.integer()
            self.expect(")")
            return Lit("T", (p, q), pos=start)
        if word == "S":
            self.expect("(")
            p = self.integer()
            self.expect(",")
            q = self.integer()
            flags: list[str] = []
            if self.accept("|"):
                while self.peek() == "*":
                    if self.accept("*1"):
                        flags.append("*1")
                    elif self.accept("*2"):
                        flags.append("*2")
                    else:
                        raise self.error("expected *1 or *2")
                    if not self.accept(","):
                        break
            self.expect(")")
            if len(set(flags)) != len(flags):
                raise self.error("repeated singular fibre flag")
            return Lit("S", (p, q), tuple(sorted(flags)), pos=start)
        if word == "H":
            self.expect("(")
            p = self.integer()
            neg = 0
            if self.accept(";"):
                kw = self.ident()
                if kw != "neg":
                    raise self.error(f"unknown key-chain option {kw!r}")
                self.expect("=")
                neg = self.integer()
            self.expect(")")
            return Lit("H", (p, neg), pos=start)
        if word == "U":
            self.expect("(")
            n = self.integer()
            self.expect(")")
            return Lit("U", (n,), pos=start)
        if word == "atom":
            self.expect("(")
            name = self.raw_until(")")
            self.expect(")")
            return AtomLit(name, pos=start)
        if word == "splice":
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return Splice(left, right, pos=start)
        if word == "sum":
            self.expect("(")
            items = [self.expr()]
            while self.accept(","):
                items.append(self.expr())
            self.expect(")")
            return Sum(tuple(items), pos=start)
        if word == "cable":
            self.expect("(")
            p = self.integer()
            self.expect(",")
            q = self.integer()
            self.expect(",")
            inner = self.expr()
            self.expect(")")
            return Cable(p, q, inner, pos=start)
        if word == "whitehead":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Whitehead(inner, pos=start)
        if word == "delete":
            self.expect("(")
            inner = self.expr()
            self.expect(",")
            sel = self.compref()
            self.expect(")")
            return Delete(inner, sel, pos=start)
        if word == "rename":
            self.expect("(")
            inner = self.expr()
            pairs: list[tuple[str, str]] = []
            while self.accept(","):
                a = self.name()
                self.expect("->")
                b = self.name()
                pairs.append((a, b))
            self.expect(")")
            if not pairs:
                raise self.error("rename needs at least one a->b pair")
            return Rename(inner, tuple(pairs), pos=start)
        self.i -= len(word)
        raise self.error(f"unknown constructor {word!r}")


def _literal_components(node: Node) -> set[str] | None:
    """External names of a literal, when they are known without a database."""
    if not isinstance(node, Lit):
        return None
    if node.kind in ("O", "T"):
        return {engine.KNOT}
    try:
        if node.kind == "S":
            X = frozenset(STAR1 if f == "*1" else STAR2 for f in node.flags)
            return set(SeifertLink(node.args[0], node.args[1], X).components)
        if node.kind == "H":
            return set(KeyChain(node.args[0], node.args[1]).components)
        if node.kind == "U":
            return set(Unlink(node.args[0]).components)
    except SpliceError:
        return None
    return None


def _static_check(node: Node, sel: Selector, pos: Pos) -> None:
    comps = _literal_components(node)
    if comps is not None and sel.external not in comps:
        raise ParseError(
            "SYNTAX", f"{to_text(node)} has no component {sel.text()}", pos.line, pos.col
        )


def parse(text: str) -> Node:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printer


def to_text(node: Node) -> str:
    if isinstance(node, Lit):
        if node.kind == "O":
            return "O"
        if node.kind == "T":
            return f"T({node.args[0]},{node.args[1]})"
        if node.kind == "S":
            return f"S({node.args[0]},{node.args[1]}|{','.join(node.flags)})"
        if node.kind == "H":
            p, neg = node.args
            return f"H({p})" if not neg else f"H({p};neg={neg})"
        return f"U({node.args[0]})"
    if isinstance(node, AtomLit):
        return f"atom({node.name})"
    if isinstance(node, Select):
        return f"{to_text(node.expr)}.{node.sel.text()}"
    if isinstance(node, Splice):
        return f"splice({to_text(node.left)}, {to_text(node.right)})"
    if isinstance(node, Sum):
        return "sum(" + ", ".join(to_text(x) for x in node.items) + ")"
    if isinstance(node, Cable):
        return f"cable({node.p},{node.q}, {to_text(node.expr)})"
    if isinstance(node, Whitehead):
        return f"whitehead({to_text(node.expr)})"
    if isinstance(node, Delete):
        return f"delete({to_text(node.expr)}, {node.sel.text()})"
    if isinstance(node, Rename):
        pairs = ", ".join(f"{a}->{b}" for a, b in node.pairs)
        return f"rename({to_text(node.expr)}, {pairs})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation


def _at(node: Node, exc: SpliceError) -> SpliceError:
    pos = getattr(node, "pos", Pos(0, 0))
    if isinstance(exc, ParseError) or " (at line " in exc.message:
        return exc
    return SpliceError(exc.code, f"{exc.message} (at line {pos.line}, col {pos.col})")


def _only_external(d: SpliceDiagram, node: Node) -> str:
    if len(d.externals) != 1:
        raise SpliceError(
            "AMBIGUOUS_SELECTOR",
            f"{to_text(node)} has externals {sorted(d.externals)}; select one",
        )
    return next(iter(d.externals))


def _operand(node: Node, db: AtomDatabase | None) -> tuple[SpliceDiagram, str]:
    if isinstance(node, Select):
        d = evaluate(node.expr, db)
        name = node.sel.external
        if name not in d.externals:
            raise _at(node, SpliceError("UNKNOWN_SELECTOR", f"no external {name!r} in {to_text(node.expr)}"))
        return d, name
    d = evaluate(node, db)
    return d, _only_external(d, node)


def _eval_lit(node: Lit) -> SpliceDiagram:
    if node.kind == "O":
        return engine.unknot()
    if node.kind == "T":
        return engine.torus_knot(*node.args)
    if node.kind == "S":
        X = frozenset(STAR1 if f == "*1" else STAR2 for f in node.flags)
        return engine.reduce(single_vertex(SeifertLink(node.args[0], node.args[1], X)))
    if node.kind == "H":
        return engine.reduce(single_vertex(KeyChain(node.args[0], node.args[1])))
    return engine.reduce(single_vertex(Unlink(node.args[0])))


def evaluate(node: Node, db: AtomDatabase | None = None) -> SpliceDiagram:
    """Build the reduced, orientation-derived diagram of ``node``."""
    try:
        if isinstance(node, Lit):
            return _eval_lit(node)
        if isinstance(node, AtomLit):
            lab = atom_ref(node.name, db)
            return single_vertex(lab)
        if isinstance(node, Select):
            return _operand(node, db)[0]
        if isinstance(node, Splice):
            d1, a1 = _operand(node.left, db)
            d2, a2 = _operand(node.right, db)
            return engine.splice(d1, a1, d2, a2, db)
        if isinstance(node, Sum):
            trees = [evaluate(x, db) for x in node.items]
            return engine.connected_sum(*trees, db=db)
        if isinstance(node, Cable):
            if math.gcd(node.p, node.q) != 1:
                raise SpliceError("INVALID_PARAM", f"cable({node.p},{node.q}) needs gcd 1")
            return engine.cable(node.p, node.q, evaluate(node.expr, db), db)
        if isinstance(node, Whitehead):
            return engine.whitehead_double(evaluate(node.expr, db), db)
        if isinstance(node, Delete):
            d = evaluate(node.expr, db)
            return engine.reduce(delete_component(d, node.sel.external, db), db)
        if isinstance(node, Rename):
            return rename_externals(evaluate(node.expr, db), dict(node.pairs))
    except SpliceError as exc:
        raise _at(node, exc) from None
    raise TypeError(f"not an expression node: {node!r}")


def rename_externals(d: SpliceDiagram, mapping: dict[str, str]) -> SpliceDiagram:
    missing = sorted(set(mapping) - set(d.externals))
    if missing:
        raise SpliceError("UNKNOWN_SELECTOR", f"no external labels {missing}")
    exts = {mapping.get(k, k): v for k, v in d.externals.items()}
    if len(exts) != len(d.externals) or set(exts) & set(d.edges):
        raise SpliceError("DUPLICATE_LABEL", "rename would merge or shadow labels")
    return SpliceDiagram(dict(d.vertices), dict(d.edges), exts)


def evaluate_text(text: str, db: AtomDatabase | None = None) -> SpliceDiagram:
    return evaluate(parse(text), db)
