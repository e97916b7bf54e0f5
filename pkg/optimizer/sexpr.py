"""
Lecture et écriture des programmes en s-expressions.

Exemple ::

    (public n 4)
    (assign z (call zeros (4)))
    (loop i 0 n (assign (idx z i) (mul (idx (priv x (4)) i) (idx (priv y (4)) i))))
    (reveal z)

Une forme de premier niveau par ligne ; ``#`` commente la fin de ligne.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import pyparsing as pp

from .exceptions import ProgramSyntaxError
from .ir import (
    Add,
    Assign,
    At,
    Branch,
    Call,
    Dot,
    Expr,
    Index,
    Literal,
    Loop,
    Mul,
    Pack,
    PrivVar,
    Program,
    PublicConst,
    Reveal,
    Slice,
    Stmt,
    Sub,
    Var,
)

_LPAR, _RPAR = map(pp.Suppress, "()")
_SYMBOL = pp.Word(pp.alphas + "_", pp.alphanums + "_")
_SEXPR = pp.Forward()
_SEXPR <<= pp.Group(_LPAR + pp.ZeroOrMore(pp.common.number | _SYMBOL | _SEXPR) + _RPAR)
_PROGRAM = pp.ZeroOrMore(_SEXPR) + pp.StringEnd()
_PROGRAM.ignore(pp.python_style_comment)
_LITERAL = (pp.common.number | _SEXPR) + pp.StringEnd()

_BINARY = {"sub": Sub, "dot": Dot}
_CHAINS = {"add": Add, "mul": Mul}


def _fail(form: Any, message: str) -> ProgramSyntaxError:
    return ProgramSyntaxError(f"{message} : {_show(form)}")


def _show(form: Any) -> str:
    if isinstance(form, list):
        return "(" + " ".join(_show(f) for f in form) + ")"
    return str(form)


def _symbol(form: Any, what: str) -> str:
    if not isinstance(form, str):
        raise _fail(form, f"{what} attendu")
    return form


def _integer(form: Any, what: str) -> int:
    if isinstance(form, bool) or not isinstance(form, int):
        raise _fail(form, f"{what} entier attendu")
    return form


def _literal(form: Any) -> Literal:
    if isinstance(form, list):
        return tuple(_literal(item) for item in form)
    if isinstance(form, int | float) and not isinstance(form, bool):
        return form
    raise _fail(form, "Constante numérique attendue")


# Expressions --------------------------------------------------------------


def _subscript(form: Any) -> At | Slice:
    if isinstance(form, str):
        return At(form)
    if isinstance(form, int) and not isinstance(form, bool):
        return At(None, form)
    if isinstance(form, list) and len(form) == 3:
        head = form[0]
        if head == "slice":
            return Slice(_integer(form[1], "Début"), _integer(form[2], "Fin"))
        if head in ("add", "sub"):
            offset = _integer(form[2], "Décalage")
            if head == "sub":
                offset = -offset
            return At(_symbol(form[1], "Variable"), offset)
    raise _fail(form, "Indice invalide")


def _index(base: Expr, subscripts: tuple[At | Slice, ...]) -> Index:
    # z[i][j] s'écrit z[i, j] tant que le premier accès n'a que des indices.
    if isinstance(base, Index) and all(isinstance(s, At) for s in base.subscripts):
        return Index(base.base, base.subscripts + subscripts)
    return Index(base, subscripts)


def to_expr(form: Any) -> Expr:
    if isinstance(form, str):
        return Var(form)
    if not isinstance(form, list):
        return PublicConst(_literal(form))
    if not form:
        raise _fail(form, "Expression vide")
    if not isinstance(form[0], str):
        return PublicConst(_literal(form))
    head, args = form[0], form[1:]
    if head == "priv":
        if len(args) != 2 or not isinstance(args[1], list):
            raise _fail(form, "Forme (priv nom (dims...)) attendue")
        dims = tuple(_integer(d, "Dimension") for d in args[1])
        return PrivVar(_symbol(args[0], "Nom"), dims)
    if head == "const":
        if len(args) != 1:
            raise _fail(form, "Forme (const valeur) attendue")
        return PublicConst(_literal(args[0]))
    if head in _CHAINS:
        if len(args) < 2:
            raise _fail(form, f"{head} attend au moins deux opérandes")
        operands = [to_expr(a) for a in args]
        result = operands[0]
        for operand in operands[1:]:
            result = _CHAINS[head](result, operand)
        return result
    if head in _BINARY:
        if len(args) != 2:
            raise _fail(form, f"{head} attend deux opérandes")
        return _BINARY[head](to_expr(args[0]), to_expr(args[1]))
    if head == "pack":
        if not args:
            raise _fail(form, "pack attend au moins un élément")
        return Pack(tuple(to_expr(a) for a in args))
    if head == "idx":
        if len(args) < 2:
            raise _fail(form, "Forme (idx base indices...) attendue")
        return _index(to_expr(args[0]), tuple(_subscript(s) for s in args[1:]))
    if head == "call":
        if not args:
            raise _fail(form, "Forme (call fonction args...) attendue")
        return Call(_symbol(args[0], "Fonction"), tuple(to_expr(a) for a in args[1:]))
    raise _fail(form, "Expression inconnue")


# Instructions -------------------------------------------------------------


class _Builder:
    def __init__(self) -> None:
        self.reveals = 0

    def block(self, forms: list[Any]) -> tuple[Stmt, ...]:
        return tuple(self.statement(form) for form in forms)

    def statement(self, form: Any) -> Stmt:
        if not isinstance(form, list) or not form:
            raise _fail(form, "Instruction attendue")
        head, args = form[0], form[1:]
        if head == "assign":
            if len(args) != 2:
                raise _fail(form, "Forme (assign cible expr) attendue")
            target = to_expr(args[0])
            if not isinstance(target, Var | Index):
                raise _fail(form, "Cible d'affectation invalide")
            return Assign(target, to_expr(args[1]))
        if head == "public":
            if len(args) != 2:
                raise _fail(form, "Forme (public nom valeur) attendue")
            name = _symbol(args[0], "Nom")
            return Assign(Var(name), PublicConst(_literal(args[1]), name))
        if head == "loop":
            if len(args) < 3:
                raise _fail(form, "Forme (loop var début fin instr...) attendue")
            return Loop(
                _symbol(args[0], "Variable"),
                self._bound(args[1]),
                self._bound(args[2]),
                self.block(args[3:]),
            )
        if head == "branch":
            return self._branch(form, args)
        if head == "reveal":
            if len(args) != 1:
                raise _fail(form, "Forme (reveal expr) attendue")
            expr = to_expr(args[0])
            name = expr.name if isinstance(expr, Var) else f"out{self.reveals}"
            self.reveals += 1
            return Reveal(expr, name)
        raise _fail(form, "Instruction inconnue")

    def _bound(self, form: Any) -> int | str:
        if isinstance(form, str):
            return form
        return _integer(form, "Borne")

    def _branch(self, form: list[Any], args: list[Any]) -> Branch:
        if not 2 <= len(args) <= 3:
            raise _fail(form, "Forme (branch cond (then ...) (else ...)) attendue")
        blocks: dict[str, tuple[Stmt, ...]] = {"then": (), "else": ()}
        for part, expected in zip(args[1:], ("then", "else"), strict=False):
            if not isinstance(part, list) or not part or part[0] != expected:
                raise _fail(part, f"Bloc ({expected} ...) attendu")
            blocks[expected] = self.block(part[1:])
        return Branch(to_expr(args[0]), blocks["then"], blocks["else"])


def parse_program(text: str) -> Program:
    """Lit un programme ; ``ProgramSyntaxError`` si la syntaxe est invalide."""
    try:
        forms = _PROGRAM.parse_string(text, parse_all=True).as_list()
    except pp.ParseBaseException as exc:
        raise ProgramSyntaxError(
            f"Ligne {exc.lineno}, colonne {exc.col} : {exc.msg}"
        ) from exc
    return Program(_Builder().block(forms))


def parse_literal(text: str) -> Literal:
    """Lit une constante seule : nombre ou liste entre parenthèses."""
    try:
        form = _LITERAL.parse_string(text.strip(), parse_all=True).as_list()[0]
    except pp.ParseBaseException as exc:
        raise ProgramSyntaxError(f"Constante illisible : {text!r}") from exc
    return _literal(form)


def read_program(path: Path | str) -> Program:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProgramSyntaxError(f"Lecture impossible : {path}") from exc
    return parse_program(text)


# Écriture -----------------------------------------------------------------


def _format_literal(value: Literal) -> str:
    if isinstance(value, tuple):
        return "(" + " ".join(_format_literal(v) for v in value) + ")"
    return repr(value)


def _format_subscript(sub: At | Slice) -> str:
    if isinstance(sub, Slice):
        return f"(slice {sub.start} {sub.stop})"
    if sub.var is None:
        return str(sub.offset)
    if sub.offset > 0:
        return f"(add {sub.var} {sub.offset})"
    if sub.offset < 0:
        return f"(sub {sub.var} {-sub.offset})"
    return sub.var


def format_expr(node: Expr) -> str:
    match node:
        case PublicConst(value=value):
            text = _format_literal(value)
            return f"(const {text})" if isinstance(value, tuple) else text
        case PrivVar(name=name, shape=shape):
            return f"(priv {name} ({' '.join(str(d) for d in shape)}))"
        case Var(name=name):
            return name
        case Add(left=left, right=right):
            return f"(add {format_expr(left)} {format_expr(right)})"
        case Sub(left=left, right=right):
            return f"(sub {format_expr(left)} {format_expr(right)})"
        case Mul(left=left, right=right):
            return f"(mul {format_expr(left)} {format_expr(right)})"
        case Dot(left=left, right=right):
            return f"(dot {format_expr(left)} {format_expr(right)})"
        case Pack(items=items):
            return "(pack " + " ".join(format_expr(i) for i in items) + ")"
        case Index(base=base, subscripts=subs):
            rendered = " ".join(_format_subscript(s) for s in subs)
            return f"(idx {format_expr(base)} {rendered})"
        case Call(fn=fn, args=args):
            return " ".join(["(call", fn, *(format_expr(a) for a in args)]) + ")"
    raise TypeError(f"Nœud inconnu : {node!r}")


def _format_block(stmts: tuple[Stmt, ...]) -> str:
    return "".join(" " + format_statement(s) for s in stmts)


def format_statement(stmt: Stmt) -> str:
    match stmt:
        case Assign(target=Var(name=name), expr=PublicConst() as c) if c.name == name:
            return f"(public {name} {_format_literal(c.value)})"
        case Assign(target=target, expr=expr):
            return f"(assign {format_expr(target)} {format_expr(expr)})"
        case Loop(var=var, start=start, stop=stop, body=body):
            return f"(loop {var} {start} {stop}{_format_block(body)})"
        case Branch(cond=cond, then=then, orelse=orelse):
            parts = [f"(branch {format_expr(cond)}", f"(then{_format_block(then)})"]
            if orelse:
                parts.append(f"(else{_format_block(orelse)})")
            return " ".join(parts) + ")"
        case Reveal(expr=expr):
            return f"(reveal {format_expr(expr)})"
    raise TypeError(f"Instruction inconnue : {stmt!r}")


def format_program(program: Program) -> str:
    return "".join(format_statement(s) + "\n" for s in program.statements)
