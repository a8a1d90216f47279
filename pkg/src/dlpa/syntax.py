"""Core syntax of the logic.

Formulas are built from atoms with negation, conjunction and the box modality
over programs; programs are assignments, sequential composition, nondeterministic
choice, iteration and tests. Everything else (disjunction, implication,
equivalence, the diamond, top, bot) is concrete-syntax sugar that the parser
desugars into this core.

The module also carries the structural measures used throughout: formula and
program length, the closure and extended closure, the occurring-atom
vocabulary, bounded execution traces, and the star-free check.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional, Union

RESERVED_WORDS = frozenset({"u", "top", "bot"})

# Atom backing the `top` abbreviation. The parser accepts it (round-trips need
# it); formula generators must not emit it.
RESERVED_ATOM = "p0"


class ParseError(Exception):
    """Syntax error carrying position and the token set that was acceptable."""

    def __init__(self, message: str, line: int, col: int,
                 expected: frozenset[str] = frozenset()):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"{line}:{col}: {message}"
        if expected:
            detail += " (expected " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)


class Assignment:
    """A non-empty finite partial map from atoms to truth values.

    Pairs are kept sorted by atom name, which fixes the canonical rendering
    and makes equality and hashing cheap.
    """

    __slots__ = ("pairs", "_hash")

    def __init__(self, mapping: Union[Mapping[str, bool], Iterable[tuple[str, bool]]]):
        items = dict(mapping)
        if not items:
            raise ValueError("assignment must set at least one atom")
        self.pairs: tuple[tuple[str, bool], ...] = tuple(sorted(items.items()))
        self._hash = hash(self.pairs)

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.pairs)

    def value(self, atom: str) -> Optional[bool]:
        for p, sign in self.pairs:
            if p == atom:
                return sign
        return None

    def __contains__(self, atom: str) -> bool:
        return self.value(atom) is not None

    def __iter__(self) -> Iterator[tuple[str, bool]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Assignment) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Assignment({render_assignment(self)!r})"


class Formula:
    """Base class; concrete shapes are Prop, Not, And, Box."""

    __slots__ = ()


class Program:
    """Base class; concrete shapes are Atomic, Seq, Choice, Star, Test."""

    __slots__ = ()


class Prop(Formula):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("Prop", name))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Prop) and self.name == other.name

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Prop({render(self)!r})"


class Not(Formula):
    __slots__ = ("sub", "_hash")

    def __init__(self, sub: Formula):
        self.sub = sub
        self._hash = hash(("Not", sub))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Not) and self._hash == other._hash and self.sub == other.sub

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Not({render(self)!r})"


class And(Formula):
    __slots__ = ("left", "right", "_hash")

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash(("And", left, right))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, And) and self._hash == other._hash
                and self.left == other.left and self.right == other.right)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"And({render(self)!r})"


class Box(Formula):
    __slots__ = ("program", "sub", "_hash")

    def __init__(self, program: Program, sub: Formula):
        self.program = program
        self.sub = sub
        self._hash = hash(("Box", program, sub))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Box) and self._hash == other._hash
                and self.program == other.program and self.sub == other.sub)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Box({render(self)!r})"


class Atomic(Program):
    __slots__ = ("assignment", "_hash")

    def __init__(self, assignment: Assignment):
        self.assignment = assignment
        self._hash = hash(("Atomic", assignment))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Atomic) and self.assignment == other.assignment

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Atomic({render_program(self)!r})"


class Seq(Program):
    __slots__ = ("left", "right", "_hash")

    def __init__(self, left: Program, right: Program):
        self.left = left
        self.right = right
        self._hash = hash(("Seq", left, right))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Seq) and self._hash == other._hash
                and self.left == other.left and self.right == other.right)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Seq({render_program(self)!r})"


class Choice(Program):
    __slots__ = ("left", "right", "_hash")

    def __init__(self, left: Program, right: Program):
        self.left = left
        self.right = right
        self._hash = hash(("Choice", left, right))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Choice) and self._hash == other._hash
                and self.left == other.left and self.right == other.right)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Choice({render_program(self)!r})"


class Star(Program):
    __slots__ = ("sub", "_hash")

    def __init__(self, sub: Program):
        self.sub = sub
        self._hash = hash(("Star", sub))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Star) and self._hash == other._hash and self.sub == other.sub

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Star({render_program(self)!r})"


class Test(Program):
    __slots__ = ("formula", "_hash")

    def __init__(self, formula: Formula):
        self.formula = formula
        self._hash = hash(("Test", formula))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Test) and self._hash == other._hash and self.formula == other.formula

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Test({render_program(self)!r})"


Trace = tuple  # tuple of Assignment


# Derived connectives, desugared to the core.

def or_(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def iff(left: Formula, right: Formula) -> Formula:
    return And(implies(left, right), implies(right, left))


def diamond(program: Program, sub: Formula) -> Formula:
    return Not(Box(program, Not(sub)))


TOP = or_(Prop(RESERVED_ATOM), Not(Prop(RESERVED_ATOM)))
BOT = Not(TOP)


# Tokenizer.

class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"_Token({self.kind!r}, {self.line}:{self.col})"


_PUNCT = "~&[]<>(){}+,;?*|-"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("<->", i):
            tokens.append(_Token("<->", "<->", line, col))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            tokens.append(_Token(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.islower() and c.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in RESERVED_WORDS else "atom"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    """Recursive descent over the token list.

    Formula precedence, tight to loose: ~ and modalities, &, |, -> (right
    associative), <-> (right associative). Program precedence: ?/*, ;, u.
    At a program primary an opening paren is first tried as a parenthesized
    program and reparsed as a test formula on failure; the error that got
    further wins.
    """

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error(f"got {tok.text!r}" if tok.kind != "end" else "got end of input",
                       {kind})
        return self.advance()

    def error(self, message: str, expected: set[str] = frozenset()):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col, frozenset(expected))

    # Formula grammar.

    def formula(self) -> Formula:
        left = self.impl()
        if self.peek().kind == "<->":
            self.advance()
            return iff(left, self.formula())
        return left

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "->":
            self.advance()
            return implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().kind == "|":
            self.advance()
            left = or_(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.advance()
            return Not(self.unary())
        if tok.kind == "[":
            self.advance()
            prog = self.program()
            self.expect("]")
            return Box(prog, self.unary())
        if tok.kind == "<":
            self.advance()
            prog = self.program()
            self.expect(">")
            return diamond(prog, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "top":
            self.advance()
            return TOP
        if tok.kind == "bot":
            self.advance()
            return BOT
        if tok.kind == "atom":
            self.advance()
            return Prop(tok.text)
        self.error(f"expected a formula, got {tok.text!r}" if tok.kind != "end"
                   else "expected a formula, got end of input",
                   {"~", "[", "<", "(", "atom", "top", "bot"})

    # Program grammar. `u` and `|` both act as choice here; `|` only means
    # disjunction once the parser is back in formula position.

    def program(self) -> Program:
        left = self.seq()
        while self.peek().kind in ("u", "|"):
            self.advance()
            left = Choice(left, self.seq())
        return left

    def seq(self) -> Program:
        left = self.postfix()
        while self.peek().kind == ";":
            self.advance()
            left = Seq(left, self.postfix())
        return left

    def postfix(self) -> Program:
        prog = self.prog_primary()
        while self.peek().kind == "*":
            self.advance()
            prog = Star(prog)
        return prog

    def prog_primary(self) -> Program:
        tok = self.peek()
        if tok.kind in ("+", "-"):
            return Atomic(self.singleton())
        if tok.kind == "{":
            return Atomic(self.braces())
        if tok.kind == "(":
            save = self.pos
            try:
                self.advance()
                prog = self.program()
                self.expect(")")
                return prog
            except ParseError as prog_err:
                self.pos = save
                try:
                    return self.test()
                except ParseError as test_err:
                    raise (prog_err if (prog_err.line, prog_err.col)
                           >= (test_err.line, test_err.col) else test_err)
        return self.test()

    def test(self) -> Program:
        f = self.formula()
        self.expect("?")
        return Test(f)

    def singleton(self) -> Assignment:
        sign = self.advance()
        atom = self.expect("atom")
        return Assignment({atom.text: sign.kind == "+"})

    def braces(self) -> Assignment:
        self.advance()
        if self.peek().kind == "}":
            self.error("assignment must set at least one atom", {"+", "-"})
        pairs: dict[str, bool] = {}
        while True:
            sign = self.peek()
            if sign.kind not in ("+", "-"):
                self.error(f"expected a signed atom, got {sign.text!r}", {"+", "-"})
            self.advance()
            atom = self.expect("atom")
            if atom.text in pairs:
                raise ParseError(f"duplicate atom {atom.text!r} in assignment",
                                 atom.line, atom.col)
            pairs[atom.text] = sign.kind == "+"
            if self.peek().kind == ",":
                self.advance()
                continue
            self.expect("}")
            return Assignment(pairs)


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into a core Formula; derived connectives desugar."""
    parser = _Parser(_tokenize(text))
    f = parser.formula()
    if parser.peek().kind != "end":
        parser.error(f"unexpected trailing input {parser.peek().text!r}", {"end"})
    return f


def parse_program(text: str) -> Program:
    """Parse concrete syntax into a core Program."""
    parser = _Parser(_tokenize(text))
    p = parser.program()
    if parser.peek().kind != "end":
        parser.error(f"unexpected trailing input {parser.peek().text!r}", {"end"})
    return p


# Canonical renderer: fully parenthesized, assignments sorted by atom name,
# so parse_formula(render(f)) == f.

def render_assignment(a: Assignment) -> str:
    parts = [("+" if sign else "-") + atom for atom, sign in a.pairs]
    if len(parts) == 1:
        return parts[0]
    return "{" + ",".join(parts) + "}"


def render_program(p: Program) -> str:
    if isinstance(p, Atomic):
        return render_assignment(p.assignment)
    if isinstance(p, Seq):
        return f"({render_program(p.left)} ; {render_program(p.right)})"
    if isinstance(p, Choice):
        return f"({render_program(p.left)} u {render_program(p.right)})"
    if isinstance(p, Star):
        return render_program(p.sub) + "*"
    if isinstance(p, Test):
        return render(p.formula) + "?"
    raise TypeError(f"not a program: {p!r}")


def render(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "~" + render(f.sub)
    if isinstance(f, And):
        return f"({render(f.left)} & {render(f.right)})"
    if isinstance(f, Box):
        return f"[{render_program(f.program)}] {render(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


# Length. Assignments weigh their domain size; every connective weighs one.

def len_formula(f: Formula) -> int:
    if isinstance(f, Prop):
        return 1
    if isinstance(f, Not):
        return 1 + len_formula(f.sub)
    if isinstance(f, And):
        return 1 + len_formula(f.left) + len_formula(f.right)
    if isinstance(f, Box):
        return 1 + len_program(f.program) + len_formula(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def len_program(p: Program) -> int:
    if isinstance(p, Atomic):
        return len(p.assignment)
    if isinstance(p, (Seq, Choice)):
        return 1 + len_program(p.left) + len_program(p.right)
    if isinstance(p, Star):
        return 1 + len_program(p.sub)
    if isinstance(p, Test):
        return 1 + len_formula(p.formula)
    raise TypeError(f"not a program: {p!r}")


# Closure. The box closure decomposes the leading program one step at a time
# and stops at an atomic head. Domain atoms enter as Prop formulas only where
# the closure descends into a box body; adding them for every decomposed head
# would break card(closure(f)) <= len_formula(f) as soon as a choice carries
# assignments to distinct atoms (the heads and their domain atoms then
# outnumber the formula's positions).

def closure(f: Formula) -> frozenset[Formula]:
    acc: set[Formula] = set()
    _cl(f, acc)
    return frozenset(acc)


def _cl(f: Formula, acc: set[Formula]) -> None:
    if f in acc:
        return
    if isinstance(f, Prop):
        acc.add(f)
    elif isinstance(f, Not):
        acc.add(f)
        _cl(f.sub, acc)
    elif isinstance(f, And):
        acc.add(f)
        _cl(f.left, acc)
        _cl(f.right, acc)
    elif isinstance(f, Box):
        _cl_box(f, acc)
        if isinstance(f.program, Atomic):
            for atom in f.program.assignment.domain:
                acc.add(Prop(atom))
        _cl(f.sub, acc)
    else:
        raise TypeError(f"not a formula: {f!r}")


def _cl_box(b: Box, acc: set[Formula]) -> None:
    if b in acc:
        return
    acc.add(b)
    prog = b.program
    if isinstance(prog, Atomic):
        pass
    elif isinstance(prog, Seq):
        _cl_box(Box(prog.left, Box(prog.right, b.sub)), acc)
    elif isinstance(prog, Choice):
        _cl_box(Box(prog.left, b.sub), acc)
        _cl_box(Box(prog.right, b.sub), acc)
    elif isinstance(prog, Star):
        _cl_box(Box(prog.sub, b), acc)
    elif isinstance(prog, Test):
        _cl(prog.formula, acc)
    else:
        raise TypeError(f"not a program: {prog!r}")


def extended_closure(f: Formula) -> frozenset[Formula]:
    cl = closure(f)
    return cl | {Not(g) for g in cl}


def vocabulary(f: Formula) -> frozenset[str]:
    """All atoms occurring anywhere in f, including assignment domains and
    atoms inside test formulas."""
    acc: set[str] = set()
    _atoms_formula(f, acc)
    return frozenset(acc)


def program_vocabulary(p: Program) -> frozenset[str]:
    acc: set[str] = set()
    _atoms_program(p, acc)
    return frozenset(acc)


def _atoms_formula(f: Formula, acc: set[str]) -> None:
    if isinstance(f, Prop):
        acc.add(f.name)
    elif isinstance(f, Not):
        _atoms_formula(f.sub, acc)
    elif isinstance(f, And):
        _atoms_formula(f.left, acc)
        _atoms_formula(f.right, acc)
    elif isinstance(f, Box):
        _atoms_program(f.program, acc)
        _atoms_formula(f.sub, acc)
    else:
        raise TypeError(f"not a formula: {f!r}")


def _atoms_program(p: Program, acc: set[str]) -> None:
    if isinstance(p, Atomic):
        acc.update(p.assignment.domain)
    elif isinstance(p, (Seq, Choice)):
        _atoms_program(p.left, acc)
        _atoms_program(p.right, acc)
    elif isinstance(p, Star):
        _atoms_program(p.sub, acc)
    elif isinstance(p, Test):
        _atoms_formula(p.formula, acc)
    else:
        raise TypeError(f"not a program: {p!r}")


# Execution traces. Stars unfold at most star_bound times; for star-free
# programs the result is exact and the bound is irrelevant.

def exe_traces(p: Program, star_bound: int) -> frozenset[Trace]:
    if isinstance(p, Atomic):
        return frozenset({(p.assignment,)})
    if isinstance(p, Seq):
        lefts = exe_traces(p.left, star_bound)
        rights = exe_traces(p.right, star_bound)
        return frozenset(a + b for a in lefts for b in rights)
    if isinstance(p, Choice):
        return exe_traces(p.left, star_bound) | exe_traces(p.right, star_bound)
    if isinstance(p, Star):
        steps = exe_traces(p.sub, star_bound)
        acc: set[Trace] = {()}
        layer: set[Trace] = {()}
        for _ in range(star_bound):
            layer = {a + b for a in layer for b in steps}
            if layer <= acc:
                break
            acc |= layer
        return frozenset(acc)
    if isinstance(p, Test):
        return exe_traces_formula(p.formula, star_bound)
    raise TypeError(f"not a program: {p!r}")


def exe_traces_formula(f: Formula, star_bound: int) -> frozenset[Trace]:
    if isinstance(f, Prop):
        return frozenset({()})
    if isinstance(f, Not):
        return exe_traces_formula(f.sub, star_bound)
    if isinstance(f, And):
        return exe_traces_formula(f.left, star_bound) | exe_traces_formula(f.right, star_bound)
    if isinstance(f, Box):
        return exe_traces(f.program, star_bound) | exe_traces_formula(f.sub, star_bound)
    raise TypeError(f"not a formula: {f!r}")


def is_star_free(f: Formula) -> bool:
    if isinstance(f, Prop):
        return True
    if isinstance(f, Not):
        return is_star_free(f.sub)
    if isinstance(f, And):
        return is_star_free(f.left) and is_star_free(f.right)
    if isinstance(f, Box):
        return program_is_star_free(f.program) and is_star_free(f.sub)
    raise TypeError(f"not a formula: {f!r}")


def program_is_star_free(p: Program) -> bool:
    if isinstance(p, Atomic):
        return True
    if isinstance(p, (Seq, Choice)):
        return program_is_star_free(p.left) and program_is_star_free(p.right)
    if isinstance(p, Star):
        return False
    if isinstance(p, Test):
        return is_star_free(p.formula)
    raise TypeError(f"not a program: {p!r}")
