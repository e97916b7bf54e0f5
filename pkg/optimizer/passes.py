"""
Passes de réécriture : vectorisation des boucles, mise en facteur commun et
vectorisation des sommes de produits.

Chaque passe est une fonction pure ``Program -> Program`` ; appliquée deux
fois, elle rend le même programme qu'appliquée une fois. L'ordre fixé par
``optimize`` est : refus, boucles, facteurs communs, produits.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from dataclasses import replace

import structlog

from ring.exceptions import EngineError
from tensor.exceptions import ShapeError

from .analysis import Abstract, Analyzer, check_reject, index_shape
from .calls import ELEMENTWISE, lookup
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
    children,
    map_children,
    sum_of,
    sum_terms,
)

logger = structlog.get_logger(__name__)


class ProgramRewriter:
    """Parcourt un programme en tenant à jour formes et caractère privé.

    Les sous-classes redéfinissent ``expr`` et ``loop`` ; l'analyseur voit
    les instructions réécrites, au fur et à mesure.
    """

    def __init__(self) -> None:
        self.analyzer = Analyzer()
        self.analyzer.counting = False

    def observe(self, stmt: Stmt) -> None:
        """Fait suivre ``stmt`` à l'analyseur ; un programme incomplet
        (variable inconnue, forme invalide) est réécrit sans ces informations."""
        try:
            self.analyzer.statement(stmt)
        except EngineError as exc:
            logger.debug("optimizer.analysis_skipped", error=str(exc))

    def run(self, program: Program) -> Program:
        return Program(self.block(program.statements))

    def block(self, stmts: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        for stmt in stmts:
            out.extend(self.statement(stmt))
        return tuple(out)

    def statement(self, stmt: Stmt) -> tuple[Stmt, ...]:
        if isinstance(stmt, Loop):
            return self.loop(stmt)
        if isinstance(stmt, Branch):
            return (self.branch(stmt),)
        if isinstance(stmt, Assign):
            stmt = replace(stmt, expr=self.expr(stmt.expr))
        elif isinstance(stmt, Reveal):
            stmt = replace(stmt, expr=self.expr(stmt.expr))
        self.observe(stmt)
        return (stmt,)

    def expr(self, node: Expr) -> Expr:
        return node

    def branch(self, branch: Branch) -> Branch:
        analyzer = self.analyzer
        start = dict(analyzer.env)
        then = self.block(branch.then)
        then_env, analyzer.env = analyzer.env, dict(start)
        orelse = self.block(branch.orelse)
        analyzer.env = analyzer.merge_envs(then_env, analyzer.env)
        return Branch(self.expr(branch.cond), then, orelse)

    def loop_body(self, loop: Loop) -> tuple[Stmt, ...]:
        """Réécrit le corps avec l'environnement stabilisé de la boucle."""
        analyzer = self.analyzer
        outer = analyzer.env.get(loop.var)
        self.observe(loop)
        analyzer.env[loop.var] = Abstract(())
        body = self.block(loop.body)
        if outer is None:
            analyzer.env.pop(loop.var, None)
        else:
            analyzer.env[loop.var] = outer
        return body

    def loop(self, loop: Loop) -> tuple[Stmt, ...]:
        return (replace(loop, body=self.loop_body(loop)),)


def rewrite_sums(node: Expr, on_sum: Callable[[Add, list[Expr]], Expr]) -> Expr:
    """Réécriture descendante : ``on_sum`` reçoit chaque chaîne d'additions
    entière, termes déjà réécrits."""
    if isinstance(node, Add):
        terms = [rewrite_sums(t, on_sum) for t in sum_terms(node)]
        return on_sum(node, terms)
    return map_children(node, lambda child: rewrite_sums(child, on_sum))


# Vectorisation des boucles --------------------------------------------------


def _var_subscripts(subs: tuple[At | Slice, ...], var: str) -> list[int]:
    return [p for p, s in enumerate(subs) if isinstance(s, At) and s.var == var]


def _loop_axis(subs: tuple[At | Slice, ...], position: int) -> int:
    """Position de l'axe de boucle dans le résultat vectorisé."""
    return sum(isinstance(s, Slice) for s in subs[:position])


class _LoopVectorizer(ProgramRewriter):
    def loop(self, loop: Loop) -> tuple[Stmt, ...]:
        try:
            start = self.analyzer.bound(loop.start)
            stop = self.analyzer.bound(loop.stop)
        except EngineError:
            start = stop = 0
        candidate = replace(loop, body=self.loop_body(loop))
        if stop <= start:
            return (candidate,)
        vectorized = _Vectorization(self.analyzer, candidate, start, stop).rewrite()
        if vectorized is None:
            return (candidate,)
        logger.debug("optimizer.vectorize_loop", var=loop.var, trips=stop - start)
        for stmt in vectorized:
            self.observe(stmt)
        return vectorized


class _Vectorization:
    """Une tentative sur une boucle dont le corps est déjà réécrit."""

    def __init__(self, analyzer: Analyzer, loop: Loop, start: int, stop: int) -> None:
        self.analyzer = analyzer
        self.loop = loop
        self.var = loop.var
        self.start = start
        self.stop = stop
        self.written: dict[str, Index] = {}
        self.slot: tuple[int, ...] | None = None
        self.axis = 0

    def rewrite(self) -> tuple[Stmt, ...] | None:
        body = self.loop.body
        if not body or not all(isinstance(s, Assign) for s in body):
            return None
        assigns = [s for s in body if isinstance(s, Assign)]
        for stmt in assigns:
            target = stmt.target
            if not isinstance(target, Index) or not isinstance(target.base, Var):
                return None
            if target.base.name in self.written:
                return None
            self.written[target.base.name] = target
        for stmt in assigns:
            assert isinstance(stmt.target, Index)
            if not self._check_target(stmt.target):
                return None
            if not self._check_expr(stmt.expr):
                return None
        out: list[Stmt] = []
        for stmt in assigns:
            target = self._slice(stmt.target)
            assert isinstance(target, Index)
            out.append(Assign(target, self._slice(stmt.expr)))
        return tuple(out)

    def _shape(self, base: Expr) -> tuple[int, ...] | None:
        if isinstance(base, PrivVar):
            return base.shape
        if isinstance(base, Var) and base.name in self.analyzer.env:
            return self.analyzer.env[base.name].shape
        return None

    def _dependent(self, leaf: Index) -> tuple[tuple[int, ...], int] | None:
        """Forme par itération et axe de boucle d'une feuille indexée par la
        variable, ou ``None`` si la feuille ne se vectorise pas."""
        positions = _var_subscripts(leaf.subscripts, self.var)
        shape = self._shape(leaf.base)
        if len(positions) != 1 or shape is None:
            return None
        position = positions[0]
        sub = leaf.subscripts[position]
        assert isinstance(sub, At)
        if position >= len(shape):
            return None
        if self.start + sub.offset < 0 or self.stop + sub.offset > shape[position]:
            return None
        try:
            per_iteration = index_shape(shape, leaf.subscripts)
        except ShapeError:
            return None
        return per_iteration, _loop_axis(leaf.subscripts, position)

    def _check_target(self, target: Index) -> bool:
        positions = _var_subscripts(target.subscripts, self.var)
        if len(positions) != 1:
            return False
        sub = target.subscripts[positions[0]]
        assert isinstance(sub, At)
        if sub.offset != 0:
            return False
        found = self._dependent(target)
        if found is None:
            return False
        slot, axis = found
        if self.slot is not None and (slot, axis) != (self.slot, self.axis):
            return False
        self.slot, self.axis = slot, axis
        return True

    def _mentions_var(self, node: Expr) -> bool:
        if isinstance(node, Var):
            return node.name == self.var
        if isinstance(node, Index):
            if _var_subscripts(node.subscripts, self.var):
                return True
            return self._mentions_var(node.base)
        return any(self._mentions_var(child) for child in children(node))

    def _scalar_invariant(self, node: Expr) -> bool:
        if self._mentions_var(node) or self._reads_written(node):
            return False
        try:
            return self.analyzer.expr(node).shape == ()
        except EngineError:
            return False

    def _reads_written(self, node: Expr) -> bool:
        if isinstance(node, Var):
            return node.name in self.written
        return any(self._reads_written(child) for child in children(node))

    def _check_expr(self, node: Expr) -> bool:
        match node:
            case Add() | Sub() | Mul():
                return self._check_expr(node.left) and self._check_expr(node.right)
            case Call(fn=fn, args=args) if fn in ELEMENTWISE:
                operands = lookup(fn).operands
                return all(self._check_expr(a) for a in args[:operands]) and not any(
                    self._mentions_var(a) or self._reads_written(a)
                    for a in args[operands:]
                )
            case Index(base=Var(name=name) | PrivVar(name=name)) if _var_subscripts(
                node.subscripts, self.var
            ):
                if name in self.written and node != self.written[name]:
                    return False
                found = self._dependent(node)
                return found is not None and found == (self.slot, self.axis)
            case PublicConst() | Var() | PrivVar() | Index() | Call():
                return self._scalar_invariant(node)
        return False

    def _slice(self, node: Expr) -> Expr:
        if isinstance(node, Index):
            subs = tuple(
                Slice(self.start + s.offset, self.stop + s.offset)
                if isinstance(s, At) and s.var == self.var
                else s
                for s in node.subscripts
            )
            return Index(self._slice(node.base), subs)
        return map_children(node, self._slice)


def pass_vectorize_loops(program: Program) -> Program:
    """Remplace les boucles élément par élément par une opération sur tranches.

    Le corps doit n'affecter que ``z[..., i, ...]`` (une cible par variable,
    sans décalage) à partir de lectures ``x[..., i + k, ...]`` de même forme
    par itération, de scalaires invariants et d'opérations élément par
    élément. Une boucle qui lit une cible ailleurs qu'à l'indice courant
    (dépendance entre itérations) reste telle quelle.
    """
    return _LoopVectorizer().run(program)


# Mise en facteur commun -----------------------------------------------------


def _factor_terms(terms: list[Expr]) -> list[Expr] | None:
    counts: Counter[Expr] = Counter()
    order: dict[Expr, int] = {}
    for term in terms:
        if isinstance(term, Mul):
            for factor in dict.fromkeys((term.left, term.right)):
                counts[factor] += 1
                order.setdefault(factor, len(order))
    shared = [f for f, c in counts.items() if c >= 2]
    if not shared:
        return None
    best = min(shared, key=lambda f: (-counts[f], order[f]))
    rest: list[Expr] = []
    cofactors: list[Expr] = []
    position = -1
    on_left = True
    for term in terms:
        if isinstance(term, Mul) and best in (term.left, term.right):
            if position < 0:
                position = len(rest)
                on_left = term.left == best
            cofactors.append(term.right if term.left == best else term.left)
        else:
            rest.append(term)
    inner = _factor_sum(cofactors)
    grouped = Mul(best, inner) if on_left else Mul(inner, best)
    rest.insert(position, grouped)
    return rest


def _factor_sum(terms: list[Expr]) -> Expr:
    while (factored := _factor_terms(terms)) is not None:
        terms = factored
    return sum_of(terms)


def _common_factor(node: Add, terms: list[Expr]) -> Expr:
    if _factor_terms(terms) is None:
        return sum_of(terms) if terms != sum_terms(node) else node
    return _factor_sum(terms)


class _CommonFactor(ProgramRewriter):
    def expr(self, node: Expr) -> Expr:
        return rewrite_sums(node, _common_factor)


def pass_common_factor(program: Program) -> Program:
    """x·y1 + x·y2 + ... + x·yn devient x·(y1 + y2 + ... + yn).

    Seules les chaînes d'additions sont réassociées ; un terme soustrait
    n'est jamais mis en facteur.
    """
    return _CommonFactor().run(program)


# Vectorisation des sommes de produits ---------------------------------------


class _ProductSums(ProgramRewriter):
    def _private(self, node: Expr) -> bool:
        try:
            return self.analyzer.expr(node).private
        except EngineError:
            return False

    def _private_product(self, term: Expr) -> bool:
        return (
            isinstance(term, Mul)
            and self._private(term.left)
            and self._private(term.right)
        )

    def _pack(self, node: Add, terms: list[Expr]) -> Expr:
        products = [t for t in terms if self._private_product(t)]
        if len(products) < 2:
            return sum_of(terms) if terms != sum_terms(node) else node
        lefts = tuple(p.left for p in products if isinstance(p, Mul))
        rights = tuple(p.right for p in products if isinstance(p, Mul))
        contraction: Expr = Dot(Pack(lefts), Pack(rights))
        out: list[Expr] = []
        for term in terms:
            if term is products[0]:
                out.append(contraction)
            elif term not in products:
                out.append(term)
        logger.debug("optimizer.vectorize_expr", products=len(products))
        return sum_of(out)

    def expr(self, node: Expr) -> Expr:
        return rewrite_sums(node, self._pack)


def pass_vectorize_expr(program: Program) -> Program:
    """Σ xi·yi (au moins deux produits privés) devient un seul produit
    scalaire entre deux paquets, de formes éventuellement différentes."""
    return _ProductSums().run(program)


PASSES: tuple[Callable[[Program], Program], ...] = (
    pass_vectorize_loops,
    pass_common_factor,
    pass_vectorize_expr,
)


def optimize(program: Program) -> Program:
    """Refus des constructions non prises en charge, puis les trois passes."""
    check_reject(program)
    for rewrite in PASSES:
        program = rewrite(program)
        logger.debug("optimizer.pass", name=rewrite.__name__)
    return program
