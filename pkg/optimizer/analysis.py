"""
Analyse statique des programmes : formes, propagation du caractère privé et
estimation du coût.

L'analyse suit le programme comme l'interpréteur, mais sur des valeurs
abstraites. Une valeur publique calculable à la compilation (constante,
paramètre) garde sa valeur concrète : bornes de boucle et options d'appel
doivent en être.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import structlog

from tensor.exceptions import ShapeError
from tensor.shape import Shape, broadcast, broadcast_all, size

from .calls import lookup
from .cost import FREE, CostModel, CostReport, dot_cost, mul_cost
from .exceptions import ProgramSyntaxError, RejectionError
from .ir import (
    Add,
    Assign,
    At,
    Branch,
    Call,
    Dot,
    Expr,
    Index,
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
    base_name,
)
from .sexpr import format_expr

logger = structlog.get_logger(__name__)

# Passes à blanc au plus pour stabiliser le caractère privé dans une boucle.
MAX_FIXPOINT_PASSES = 16


@dataclass(frozen=True)
class Abstract:
    """Valeur abstraite : forme, privée ou non, bit partagé, valeur connue."""

    shape: Shape
    private: bool = False
    bit: bool = False
    value: np.ndarray | None = field(default=None, compare=False)

    @property
    def known(self) -> bool:
        return self.value is not None


def _public(value: Any) -> Abstract:
    array = np.asarray(value, dtype=np.float64)
    return Abstract(tuple(array.shape), value=array)


@dataclass
class Analysis:
    cost: CostReport
    outputs: dict[str, Abstract]
    inputs: dict[str, Shape]


def assigned_names(stmts: tuple[Stmt, ...]) -> Iterator[str]:
    """Variables affectées (directement ou par indice) dans un bloc."""
    for stmt in stmts:
        if isinstance(stmt, Assign):
            name = base_name(stmt.target)
            if name is not None:
                yield name
        elif isinstance(stmt, Loop):
            yield from assigned_names(stmt.body)
        elif isinstance(stmt, Branch):
            yield from assigned_names(stmt.then)
            yield from assigned_names(stmt.orelse)


def index_shape(shape: Shape, subscripts: tuple[At | Slice, ...]) -> Shape:
    """Forme de ``x[subscripts]`` : un indice retire l'axe, une tranche le réduit."""
    if len(subscripts) > len(shape):
        raise ShapeError(f"{len(subscripts)} indices pour la forme {shape}")
    out: list[int] = []
    for axis, (sub, dim) in enumerate(zip(subscripts, shape, strict=False)):
        if isinstance(sub, Slice):
            if not 0 <= sub.start <= sub.stop <= dim:
                raise ShapeError(
                    f"Tranche {sub.start}:{sub.stop} hors de l'axe {axis} ({dim})",
                    axis=axis,
                )
            out.append(sub.stop - sub.start)
        elif sub.var is None and not -dim <= sub.offset < dim:
            raise ShapeError(
                f"Indice {sub.offset} hors de l'axe {axis} ({dim})", axis=axis
            )
    return tuple(out) + tuple(shape[len(subscripts) :])


class Analyzer:
    """Évaluateur abstrait ; ``counting`` désactivé pour les passes à blanc."""

    def __init__(self, model: CostModel | None = None) -> None:
        self.model = model or CostModel()
        self.env: dict[str, Abstract] = {}
        self.loop_values: dict[str, int] = {}
        self.outputs: dict[str, Abstract] = {}
        self.inputs: dict[str, Shape] = {}
        self.cost = FREE
        self.counting = True

    def charge(self, report: CostReport) -> None:
        if self.counting:
            self.cost = self.cost + report

    # Expressions ----------------------------------------------------------

    def expr(self, node: Expr) -> Abstract:
        match node:
            case PublicConst(value=value):
                return _public(value)
            case PrivVar(name=name, shape=shape):
                self.inputs[name] = shape
                return Abstract(shape, private=True)
            case Var(name=name):
                if name not in self.env:
                    raise ProgramSyntaxError(f"Variable non définie : {name}")
                return self.env[name]
            case Add() | Sub() | Mul():
                return self._arithmetic(node)
            case Dot(left=Pack(items=lefts), right=Pack(items=rights)):
                return self._contraction(lefts, rights)
            case Dot(left=left, right=right):
                return self._matmul(self.expr(left), self.expr(right))
            case Pack(items=items):
                values = [self._arith_operand(self.expr(i), "pack") for i in items]
                shape = broadcast_all(*(v.shape for v in values))
                if all(v.known for v in values):
                    stacked = [np.broadcast_to(v.value, shape) for v in values]
                    return _public(np.stack(stacked))
                private = any(v.private for v in values)
                return Abstract((len(values), *shape), private=private)
            case Index(base=base, subscripts=subs):
                return self._index(self.expr(base), subs)
            case Call():
                return self._call(node)
        raise ProgramSyntaxError(f"Expression inattendue : {node!r}")

    def _arith_operand(self, value: Abstract, what: str) -> Abstract:
        if value.private and value.bit:
            raise ProgramSyntaxError(
                f"{what} : un bit privé ne s'utilise que dans mux ou reveal"
            )
        return value

    def _arithmetic(self, node: Add | Sub | Mul) -> Abstract:
        op = type(node).__name__.lower()
        left = self._arith_operand(self.expr(node.left), op)
        right = self._arith_operand(self.expr(node.right), op)
        shape = broadcast(left.shape, right.shape)
        if left.known and right.known:
            fn = {"add": np.add, "sub": np.subtract, "mul": np.multiply}[op]
            return _public(fn(left.value, right.value))
        if isinstance(node, Mul) and left.private and right.private:
            self.charge(mul_cost(size(shape)))
        return Abstract(shape, private=left.private or right.private)

    def _contraction(
        self, lefts: tuple[Expr, ...], rights: tuple[Expr, ...]
    ) -> Abstract:
        if len(lefts) != len(rights):
            raise ShapeError(
                f"Contraction de paquets de tailles {len(lefts)} et {len(rights)}"
            )
        shapes: list[Shape] = []
        private = False
        products = 0
        for left_node, right_node in zip(lefts, rights, strict=True):
            left = self._arith_operand(self.expr(left_node), "dot")
            right = self._arith_operand(self.expr(right_node), "dot")
            shapes.append(broadcast(left.shape, right.shape))
            private = private or left.private or right.private
            products += left.private and right.private
        shape = broadcast_all(*shapes)
        if products:
            self.charge(dot_cost(size(shape)))
        return Abstract(shape, private=private)

    def _matmul(self, left: Abstract, right: Abstract) -> Abstract:
        self._arith_operand(left, "dot")
        self._arith_operand(right, "dot")
        if not left.shape or not right.shape:
            raise ShapeError("dot n'accepte pas de scalaire ; utiliser mul")
        try:
            shape = np.matmul(np.ones(left.shape), np.ones(right.shape)).shape
        except ValueError as exc:
            raise ShapeError(
                f"Dimensions internes incompatibles : {left.shape} et {right.shape}"
            ) from exc
        if left.known and right.known:
            return _public(np.matmul(left.value, right.value))
        if left.private or right.private:
            self.charge(dot_cost(size(shape)))
        return Abstract(shape, private=left.private or right.private)

    def _index(self, base: Abstract, subs: tuple[At | Slice, ...]) -> Abstract:
        for sub in subs:
            if isinstance(sub, At) and sub.var is not None:
                self._loop_variable(sub.var)
        shape = index_shape(base.shape, subs)
        if base.known and all(isinstance(s, Slice) or s.var is None for s in subs):
            key = tuple(
                slice(s.start, s.stop) if isinstance(s, Slice) else s.offset
                for s in subs
            )
            return _public(np.asarray(base.value)[key])
        return replace(base, shape=shape, value=None)

    def _loop_variable(self, name: str) -> None:
        value = self.env.get(name)
        if value is None:
            raise ProgramSyntaxError(f"Variable d'indice non définie : {name}")
        if value.private:
            raise RejectionError(f"Indice privé : {name}", node=Var(name))
        if value.shape:
            raise ProgramSyntaxError(f"L'indice {name} doit être un scalaire")

    def _call(self, node: Call) -> Abstract:
        spec = lookup(node.fn)
        spec.check_arity(node.fn, len(node.args))
        operands = [self.expr(a) for a in node.args[: spec.operands]]
        options: list[Any] = []
        for arg in node.args[spec.operands :]:
            option = self.expr(arg)
            if not option.known:
                raise ProgramSyntaxError(
                    f"{node.fn} : option non publique ou inconnue "
                    f"à la compilation : {format_expr(arg)}"
                )
            options.append(option.value)
        for position, operand in enumerate(operands):
            if not operand.private:
                continue
            wants_bit = position in spec.bit_operands
            if operand.bit != wants_bit:
                kind = "un bit" if wants_bit else "une valeur arithmétique"
                raise ProgramSyntaxError(
                    f"{node.fn} : l'opérande {position} doit être {kind}"
                )
        try:
            dummy = spec.public(*(np.ones(o.shape) for o in operands), *options)
        except (ValueError, IndexError, TypeError) as exc:
            raise ShapeError(f"{node.fn} : {exc}") from exc
        shape = tuple(np.shape(dummy))
        if not any(o.private for o in operands):
            if all(o.known for o in operands):
                values = [o.value for o in operands]
                return _public(spec.public(*values, *options))
            return Abstract(shape)
        self.charge(
            spec.cost(self.model, [o.shape for o in operands], shape, tuple(options))
        )
        return Abstract(shape, private=True, bit=spec.bit_result)

    # Instructions ---------------------------------------------------------

    def block(self, stmts: tuple[Stmt, ...]) -> None:
        for stmt in stmts:
            self.statement(stmt)

    def statement(self, stmt: Stmt) -> None:
        match stmt:
            case Assign(target=Var(name=name), expr=expr):
                self.env[name] = self.expr(expr)
            case Assign(target=Index() as target, expr=expr):
                self._assign_index(target, self.expr(expr))
            case Loop():
                self._loop(stmt)
            case Branch():
                self._branch(stmt)
            case Reveal(expr=expr, name=name):
                self.outputs[name] = self.expr(expr)
            case _:
                raise ProgramSyntaxError(f"Instruction inattendue : {stmt!r}")

    def _assign_index(self, target: Index, value: Abstract) -> None:
        if not isinstance(target.base, Var):
            raise ProgramSyntaxError(
                f"Cible indexée invalide : {format_expr(target)}"
            )
        name = target.base.name
        if name not in self.env:
            raise ProgramSyntaxError(
                f"{name} doit être défini avant une affectation indexée"
            )
        base = self.env[name]
        slot = self._index(base, target.subscripts)
        if broadcast(slot.shape, value.shape) != slot.shape:
            raise ShapeError(
                f"Impossible d'affecter une valeur {value.shape} "
                f"à {format_expr(target)} {slot.shape}"
            )
        if value.private and value.bit != base.bit:
            raise ProgramSyntaxError(
                f"Types de partage incompatibles dans {format_expr(target)}"
            )
        self.env[name] = Abstract(
            base.shape, private=base.private or value.private, bit=base.bit or value.bit
        )

    def bound(self, bound: int | str) -> int:
        if isinstance(bound, int):
            return bound
        value = self.env.get(bound)
        if value is not None and value.private:
            raise RejectionError(f"Borne de boucle privée : {bound}", node=Var(bound))
        if value is None or not value.known:
            raise ProgramSyntaxError(
                f"Borne de boucle non publique ou inconnue : {bound}"
            )
        return int(np.asarray(value.value).reshape(-1)[0])

    def _taint(self) -> dict[str, tuple[Shape, bool, bool]]:
        return {k: (v.shape, v.private, v.bit) for k, v in self.env.items()}

    def _loop(self, loop: Loop) -> None:
        trips = max(self.bound(loop.stop) - self.bound(loop.start), 0)
        outer = self.env.get(loop.var)
        for name in set(assigned_names(loop.body)) & set(self.env):
            self.env[name] = replace(self.env[name], value=None)
        counting, self.counting = self.counting, False
        for _ in range(MAX_FIXPOINT_PASSES):
            before = self._taint()
            self.env[loop.var] = Abstract(())
            self.block(loop.body)
            if self._taint() == before:
                break
        self.counting = counting
        saved = self.cost
        self.cost = FREE
        self.env[loop.var] = Abstract(())
        self.block(loop.body)
        body_cost, self.cost = self.cost, saved
        self.charge(body_cost.scaled(trips))
        if outer is None:
            self.env.pop(loop.var, None)
        else:
            self.env[loop.var] = outer

    def _branch(self, branch: Branch) -> None:
        cond = self.expr(branch.cond)
        if cond.private:
            raise RejectionError(
                f"Branche sur une condition privée : {format_expr(branch.cond)}",
                node=branch.cond,
            )
        if size(cond.shape) != 1:
            raise ProgramSyntaxError(
                f"La condition doit être un scalaire : {format_expr(branch.cond)}"
            )
        start_env, start_cost = dict(self.env), self.cost
        arms: list[tuple[dict[str, Abstract], CostReport]] = []
        for arm in (branch.then, branch.orelse):
            self.env, self.cost = dict(start_env), FREE
            self.block(arm)
            arms.append((self.env, self.cost))
        self.cost = start_cost
        (then_env, then_cost), (else_env, else_cost) = arms
        if cond.known:
            taken = bool(np.asarray(cond.value).reshape(-1)[0])
            self.env, arm_cost = arms[0] if taken else arms[1]
            self.charge(arm_cost)
            return
        self.env = self.merge_envs(then_env, else_env)
        self.charge(then_cost.maximum(else_cost))

    @staticmethod
    def merge_envs(
        then_env: dict[str, Abstract], else_env: dict[str, Abstract]
    ) -> dict[str, Abstract]:
        merged: dict[str, Abstract] = {}
        for name in then_env.keys() | else_env.keys():
            a, b = then_env.get(name), else_env.get(name)
            if a is None or b is None:
                only = a if a is not None else b
                assert only is not None
                merged[name] = replace(only, value=None)
                continue
            if a.shape != b.shape:
                raise ShapeError(
                    f"{name} a la forme {a.shape} ou {b.shape} selon la branche"
                )
            same = a.known and b.known and np.array_equal(a.value, b.value)
            merged[name] = Abstract(
                a.shape,
                private=a.private or b.private,
                bit=a.bit or b.bit,
                value=a.value if same else None,
            )
        return merged


def analyze(program: Program, model: CostModel | None = None) -> Analysis:
    analyzer = Analyzer(model)
    analyzer.block(program.statements)
    return Analysis(analyzer.cost, analyzer.outputs, analyzer.inputs)


def check_reject(program: Program) -> None:
    """Refuse le programme (``RejectionError``) s'il branche sur une valeur privée.

    Le caractère privé se propage à travers toutes les opérations, les
    affectations indexées et les itérations de boucle.
    """
    analyze(program)


def estimate_cost(program: Program, model: CostModel | None = None) -> CostReport:
    report = analyze(program, model).cost
    logger.debug("optimizer.cost", **report.as_dict())
    return report
