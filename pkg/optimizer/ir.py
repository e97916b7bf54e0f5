"""
Représentation intermédiaire des programmes privés.

Les nœuds sont des dataclasses figées : deux programmes structurellement
identiques sont égaux, ce qui rend les passes comparables entre elles.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field, fields, replace
from typing import Any, TypeAlias

Bound: TypeAlias = int | str
Literal: TypeAlias = int | float | tuple[Any, ...]


# Indices ----------------------------------------------------------------


@dataclass(frozen=True)
class At:
    """Un seul indice : ``var + offset`` (``var`` absent pour une constante)."""

    var: str | None
    offset: int = 0


@dataclass(frozen=True)
class Slice:
    """Tranche ``start:stop`` sur un axe."""

    start: int
    stop: int


Subscript: TypeAlias = At | Slice


# Expressions --------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class PublicConst(Expr):
    """Constante publique ; ``name`` la rend surchargeable (``--param``)."""

    value: Literal
    name: str | None = None


@dataclass(frozen=True)
class PrivVar(Expr):
    """Entrée privée fournie par le client, de forme déclarée."""

    name: str
    shape: tuple[int, ...]


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Dot(Expr):
    """Produit matriciel ; entre deux ``Pack``, contraction sur l'axe empilé."""

    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pack(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Index(Expr):
    base: Expr
    subscripts: tuple[Subscript, ...]


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple[Expr, ...] = ()


# Instructions -------------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    target: Var | Index
    expr: Expr


@dataclass(frozen=True)
class Loop(Stmt):
    """``for var in range(start, stop)`` ; la variable n'existe que dans le corps."""

    var: str
    start: Bound
    stop: Bound
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class Branch(Stmt):
    cond: Expr
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class Reveal(Stmt):
    expr: Expr
    name: str


@dataclass(frozen=True)
class Program:
    statements: tuple[Stmt, ...] = field(default=())

    def public_params(self) -> dict[str, Literal]:
        """Constantes publiques nommées, dans l'ordre de déclaration."""
        params: dict[str, Literal] = {}
        for node in walk_program(self):
            if isinstance(node, PublicConst) and node.name is not None:
                params[node.name] = node.value
        return params

    def private_inputs(self) -> dict[str, tuple[int, ...]]:
        """Entrées privées déclarées et leur forme."""
        inputs: dict[str, tuple[int, ...]] = {}
        for node in walk_program(self):
            if isinstance(node, PrivVar):
                declared = inputs.setdefault(node.name, node.shape)
                if declared != node.shape:
                    from .exceptions import ProgramSyntaxError

                    raise ProgramSyntaxError(
                        f"Entrée {node.name} déclarée avec les formes "
                        f"{declared} et {node.shape}"
                    )
        return inputs

    def with_params(self, overrides: Mapping[str, Literal]) -> Program:
        """Copie où les constantes nommées prennent les valeurs données."""
        unknown = set(overrides) - set(self.public_params())
        if unknown:
            from .exceptions import ProgramSyntaxError

            raise ProgramSyntaxError(f"Paramètres inconnus : {sorted(unknown)}")

        def substitute(node: Expr) -> Expr:
            if isinstance(node, PublicConst) and node.name in overrides:
                return replace(node, value=overrides[node.name])
            return node

        return Program(map_statements(self.statements, substitute))


# Parcours -----------------------------------------------------------------


def children(node: Expr) -> Iterator[Expr]:
    for f in fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Expr):
            yield value
        elif isinstance(value, tuple):
            yield from (item for item in value if isinstance(item, Expr))


def walk(node: Expr) -> Iterator[Expr]:
    """Le nœud puis tous ses descendants (préordre)."""
    yield node
    for child in children(node):
        yield from walk(child)


def statement_exprs(stmt: Stmt) -> Iterator[Expr]:
    if isinstance(stmt, Assign):
        yield stmt.target
        yield stmt.expr
    elif isinstance(stmt, Branch):
        yield stmt.cond
    elif isinstance(stmt, Reveal):
        yield stmt.expr


def statement_blocks(stmt: Stmt) -> Iterator[tuple[Stmt, ...]]:
    if isinstance(stmt, Loop):
        yield stmt.body
    elif isinstance(stmt, Branch):
        yield stmt.then
        yield stmt.orelse


def walk_program(program: Program) -> Iterator[Expr]:
    def block(stmts: tuple[Stmt, ...]) -> Iterator[Expr]:
        for stmt in stmts:
            for expr in statement_exprs(stmt):
                yield from walk(expr)
            for inner in statement_blocks(stmt):
                yield from block(inner)

    return block(program.statements)


def map_children(node: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Copie de ``node`` dont chaque enfant direct est remplacé par ``fn(enfant)``."""
    updates: dict[str, Any] = {}
    for f in fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Expr):
            updates[f.name] = fn(value)
        elif isinstance(value, tuple) and any(isinstance(v, Expr) for v in value):
            updates[f.name] = tuple(fn(v) if isinstance(v, Expr) else v for v in value)
    return replace(node, **updates) if updates else node


def map_expr(node: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Réécrit l'arbre de bas en haut ; ``fn`` reçoit des enfants réécrits."""
    return fn(map_children(node, lambda child: map_expr(child, fn)))


def map_statements(
    stmts: tuple[Stmt, ...], fn: Callable[[Expr], Expr]
) -> tuple[Stmt, ...]:
    """Applique ``map_expr`` à toutes les expressions d'un bloc."""
    out: list[Stmt] = []
    for stmt in stmts:
        if isinstance(stmt, Assign):
            target = map_expr(stmt.target, fn)
            assert isinstance(target, Var | Index)
            out.append(Assign(target, map_expr(stmt.expr, fn)))
        elif isinstance(stmt, Loop):
            out.append(replace(stmt, body=map_statements(stmt.body, fn)))
        elif isinstance(stmt, Branch):
            out.append(
                Branch(
                    map_expr(stmt.cond, fn),
                    map_statements(stmt.then, fn),
                    map_statements(stmt.orelse, fn),
                )
            )
        elif isinstance(stmt, Reveal):
            out.append(replace(stmt, expr=map_expr(stmt.expr, fn)))
        else:
            out.append(stmt)
    return tuple(out)


# Sommes et produits ---------------------------------------------------------


def sum_terms(node: Expr) -> list[Expr]:
    """Termes d'une chaîne d'additions (les soustractions restent des termes)."""
    if isinstance(node, Add):
        return sum_terms(node.left) + sum_terms(node.right)
    return [node]


def sum_of(terms: list[Expr]) -> Expr:
    """Chaîne d'additions associée à gauche."""
    result = terms[0]
    for term in terms[1:]:
        result = Add(result, term)
    return result


def base_name(node: Expr) -> str | None:
    """Nom de la variable indexée (ou nommée) par ``node``."""
    while isinstance(node, Index):
        node = node.base
    if isinstance(node, Var | PrivVar):
        return node.name
    return None
