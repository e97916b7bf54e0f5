"""
Exécution d'un programme sur l'engine.

Quatre étapes : les clients partagent leurs entrées, les serveurs calculent,
puis les sorties demandées sont révélées au client 0. Les valeurs publiques
restent des tableaux numpy ; elles ne deviennent des partages que lorsqu'un
protocole l'exige.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

import numpy as np
import structlog

from netsim.stats import NetStats, stats_diff
from protocols.multiplication import mul_sum
from sharing.engine import Engine
from sharing.parties import ClientId
from sharing.shares import ShareKind
from tensor import ops
from tensor.exceptions import ShapeError
from tensor.share_tensor import ShareTensor

from .analysis import check_reject
from .calls import lookup
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
)
from .sexpr import format_expr

logger = structlog.get_logger(__name__)


class Interpreter:
    """État d'une exécution : environnement, entrées partagées, sorties.

    ``phases`` garde le trafic de chaque étape (``share``, ``compute``,
    ``reveal``).
    """

    def __init__(self, engine: Engine | None = None) -> None:
        self.engine = engine or Engine.from_settings()
        self.env: dict[str, Any] = {}
        self.inputs: dict[str, ShareTensor] = {}
        self.outputs: dict[str, Any] = {}
        self.phases: dict[str, NetStats] = {}

    def _phase(self, name: str, before: NetStats) -> None:
        self.phases[name] = stats_diff(before, self.engine.stats_snapshot())
        logger.debug(
            "interpreter.phase",
            phase=name,
            rounds=self.phases[name].total_rounds,
        )

    # Étapes ---------------------------------------------------------------

    def share_inputs(self, program: Program, bindings: Mapping[str, Any]) -> None:
        """Chaque entrée privée est partagée par son propre client."""
        before = self.engine.stats_snapshot()
        declared = program.private_inputs()
        missing = sorted(set(declared) - set(bindings))
        if missing:
            raise ProgramSyntaxError(f"Entrées privées manquantes : {missing}")
        for number, (name, shape) in enumerate(declared.items()):
            values = np.asarray(bindings[name], dtype=np.float64)
            if values.shape != shape:
                raise ShapeError(
                    f"Entrée {name} : forme {values.shape}, {shape} attendue"
                )
            self.inputs[name] = self.engine.ss(values, client=ClientId(number))
        self._phase("share", before)

    def execute(self, program: Program) -> None:
        before = self.engine.stats_snapshot()
        self.block(program.statements)
        self._phase("compute", before)

    def reveal_outputs(self) -> dict[str, np.ndarray]:
        before = self.engine.stats_snapshot()
        revealed: dict[str, np.ndarray] = {}
        for name, value in self.outputs.items():
            if isinstance(value, ShareTensor):
                revealed[name] = self.engine.reveal(value)
            else:
                revealed[name] = np.asarray(value, dtype=np.float64)
        self._phase("reveal", before)
        return revealed

    # Instructions ---------------------------------------------------------

    def block(self, stmts: tuple[Stmt, ...]) -> None:
        for stmt in stmts:
            self.statement(stmt)

    def statement(self, stmt: Stmt) -> None:
        match stmt:
            case Assign(target=Var(name=name), expr=expr):
                self.env[name] = self.expr(expr)
            case Assign(target=Index(base=Var(name=name), subscripts=subs), expr=expr):
                self.env[name] = self._store(self.env[name], self._key(subs), expr)
            case Loop(var=var, start=start, stop=stop, body=body):
                outer = self.env.get(var)
                for i in range(self._bound(start), self._bound(stop)):
                    self.env[var] = i
                    self.block(body)
                if outer is None:
                    self.env.pop(var, None)
                else:
                    self.env[var] = outer
            case Branch(cond=cond, then=then, orelse=orelse):
                value = self.expr(cond)
                if isinstance(value, ShareTensor):
                    raise RejectionError(
                        f"Branche sur une condition privée : {format_expr(cond)}",
                        node=cond,
                    )
                self.block(then if bool(np.asarray(value).reshape(-1)[0]) else orelse)
            case Reveal(expr=expr, name=name):
                self.outputs[name] = self.expr(expr)
            case _:
                raise ProgramSyntaxError(f"Instruction non exécutable : {stmt!r}")

    def _bound(self, bound: int | str) -> int:
        if isinstance(bound, int):
            return bound
        return int(np.asarray(self.env[bound]).reshape(-1)[0])

    def _store(self, base: Any, key: tuple[Any, ...], expr: Expr) -> Any:
        value = self.expr(expr)
        if isinstance(value, ShareTensor) and not isinstance(base, ShareTensor):
            base = self.engine.public(base, value.kind)
        if isinstance(base, ShareTensor):
            return ops.set_item(base, key, value)
        updated = np.array(base, dtype=np.float64)
        updated[key] = value
        return updated

    # Expressions ----------------------------------------------------------

    def _key(self, subs: tuple[At | Slice, ...]) -> tuple[Any, ...]:
        key: list[Any] = []
        for sub in subs:
            if isinstance(sub, Slice):
                key.append(slice(sub.start, sub.stop))
            elif sub.var is None:
                key.append(sub.offset)
            else:
                key.append(int(self.env[sub.var]) + sub.offset)
        return tuple(key)

    def share(self, value: Any, kind: ShareKind = ShareKind.ARITHMETIC) -> ShareTensor:
        if isinstance(value, ShareTensor):
            return value
        return self.engine.public(np.asarray(value), kind)

    def expr(self, node: Expr) -> Any:
        match node:
            case PublicConst(value=value):
                return np.asarray(value, dtype=np.float64)
            case PrivVar(name=name):
                return self.inputs[name]
            case Var(name=name):
                if name not in self.env:
                    raise ProgramSyntaxError(f"Variable non définie : {name}")
                return self.env[name]
            case Add(left=left, right=right):
                return self.expr(left) + self.expr(right)
            case Sub(left=left, right=right):
                return self.expr(left) - self.expr(right)
            case Mul(left=left, right=right):
                return self.expr(left) * self.expr(right)
            case Dot(left=Pack(items=lefts), right=Pack(items=rights)):
                return self._contraction(lefts, rights)
            case Dot(left=left, right=right):
                a, b = self.expr(left), self.expr(right)
                if isinstance(a, ShareTensor) or isinstance(b, ShareTensor):
                    return ops.dot(self.share(a), self.share(b))
                return np.matmul(a, b)
            case Pack(items=items):
                return self._pack([self.expr(item) for item in items])
            case Index(base=base, subscripts=subs):
                value, key = self.expr(base), self._key(subs)
                if isinstance(value, ShareTensor):
                    return ops.getitem(value, key)
                return np.asarray(np.asarray(value)[key])
            case Call():
                return self._call(node)
        raise ProgramSyntaxError(f"Expression non exécutable : {node!r}")

    def _contraction(self, lefts: tuple[Expr, ...], rights: tuple[Expr, ...]) -> Any:
        """Σ gauche·droite : les produits privés partagent un seul repartage."""
        private: list[tuple[ShareTensor, ShareTensor]] = []
        total: Any = None
        for left, right in zip(lefts, rights, strict=True):
            a, b = self.expr(left), self.expr(right)
            if isinstance(a, ShareTensor) and isinstance(b, ShareTensor):
                private.append((a, b))
                continue
            term = a * b
            total = term if total is None else total + term
        if private:
            product = mul_sum(private)
            total = product if total is None else product + total
        return total

    def _pack(self, values: list[Any]) -> Any:
        shape = np.broadcast_shapes(*(np.shape(v) for v in values))
        if not any(isinstance(v, ShareTensor) for v in values):
            return np.stack([np.broadcast_to(v, shape) for v in values])
        return ops.stack([ops.broadcast_to(self.share(v), shape) for v in values])

    def _call(self, node: Call) -> Any:
        spec = lookup(node.fn)
        spec.check_arity(node.fn, len(node.args))
        operands = [self.expr(arg) for arg in node.args[: spec.operands]]
        options = [self.expr(arg) for arg in node.args[spec.operands :]]
        if not any(isinstance(o, ShareTensor) for o in operands):
            return np.asarray(spec.public(*operands, *options))
        assert spec.private is not None
        shared = []
        for position, operand in enumerate(operands):
            bit = position in spec.bit_operands
            kind = ShareKind.BIT if bit else ShareKind.ARITHMETIC
            shared.append(self.share(operand, kind))
        return spec.private(*shared, *options)


def interpret(
    program: Program, bindings: Mapping[str, Any], engine: Engine | None = None
) -> dict[str, np.ndarray]:
    """Exécute ``program`` et renvoie les sorties révélées, par nom."""
    check_reject(program)
    interpreter = Interpreter(engine)
    interpreter.share_inputs(program, bindings)
    interpreter.execute(program)
    return interpreter.reveal_outputs()
