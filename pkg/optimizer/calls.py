"""
Fonctions appelables depuis un programme : ``(call nom opérandes... options...)``.

Les premiers arguments sont des opérandes, privés ou publics ; les suivants
sont des options publiques connues à la compilation (axe, forme, bornes,
paramètres d'itération). Chaque fonction a une version privée, une version
en clair et une estimation de coût.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace
from functools import partial
from typing import Any

import numpy as np

from derived import activations, kernels, numerics, selection
from derived.params import EXP, LOG, LOGISTIC, RECIPROCAL, SQRT, IterParams
from protocols.comparison import clip, greater_than, less_than
from protocols.ot import mux
from tensor import ops
from tensor.shape import Shape, size

from .cost import (
    FREE,
    CostModel,
    CostReport,
    compare_cost,
    kernel_cost,
    mul_cost,
    ot_cost,
    tournament_cost,
)
from .exceptions import ProgramSyntaxError

CostFn = Callable[[CostModel, list[Shape], Shape, tuple[Any, ...]], CostReport]

ITERATION_OPTIONS = ("iter_cnt", "lower", "upper")


@dataclass(frozen=True)
class CallSpec:
    """``required`` options obligatoires parmi ``options`` (en tête)."""

    operands: int
    private: Callable[..., Any] | None
    public: Callable[..., Any]
    cost: CostFn
    options: tuple[str, ...] = ()
    required: int = 0
    bit_result: bool = False
    bit_operands: tuple[int, ...] = ()

    def check_arity(self, name: str, count: int) -> None:
        low = self.operands + self.required
        high = self.operands + len(self.options)
        if not low <= count <= high:
            expected = str(low) if low == high else f"{low} à {high}"
            raise ProgramSyntaxError(
                f"{name} attend {expected} arguments, pas {count}"
            )


# Options ----------------------------------------------------------------


def _axis(value: Any = None) -> int | None:
    return None if value is None else int(np.asarray(value))


def _dims(value: Any) -> tuple[int, ...]:
    return tuple(int(v) for v in np.asarray(value).reshape(-1))


def iter_params(defaults: IterParams, *options: Any) -> IterParams:
    """Paramètres par défaut surchargés par les options ``iter_cnt lower upper``."""
    updates = dict(zip(ITERATION_OPTIONS, options, strict=False))
    if "iter_cnt" in updates:
        updates["iter_cnt"] = int(updates["iter_cnt"])
    for bound in ("lower", "upper"):
        if bound in updates:
            updates[bound] = float(updates[bound])
    return replace(defaults, **updates)


# Versions en clair ----------------------------------------------------------


def _logistic(x: np.ndarray, *options: Any) -> np.ndarray:
    params = iter_params(LOGISTIC, *options)
    return np.asarray(1.0 / (1.0 + np.exp(-np.clip(x, params.lower, params.upper))))


def _max_pool2d(x: np.ndarray, window: Any = (2, 2)) -> np.ndarray:
    kh, kw = _dims(window)
    *lead, h, w = x.shape
    if h % kh or w % kw:
        raise ValueError(f"max_pool2d : {h}x{w} non divisible par {kh}x{kw}")
    blocks = x.reshape(*lead, h // kh, kh, w // kw, kw)
    return np.asarray(blocks.max(axis=(-3, -1)))


def _arg(fn: Callable[..., Any]) -> Callable[..., np.ndarray]:
    def public(x: np.ndarray, axis: Any = None) -> np.ndarray:
        return np.asarray(fn(x, axis=_axis(axis)), dtype=np.float64)

    return public


def _bit(fn: Callable[..., Any]) -> Callable[..., np.ndarray]:
    def public(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.asarray(fn(x, y), dtype=np.float64)

    return public


# Coûts ------------------------------------------------------------------


def _free(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return FREE


def _compare(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return compare_cost(model, size(out))


def _select(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return ot_cost(size(out))


def _compare_select(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return compare_cost(model, size(out)) + ot_cost(size(out))


def _clamp(model: CostModel, elements: int) -> CostReport:
    # Deux comparaisons dans une extraction, deux corrections dans un OT.
    return compare_cost(model, 2 * elements) + ot_cost(2 * elements)


def _clip(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return _clamp(model, size(out))


def _product(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    return mul_cost(size(out))


def _iterative(
    kernel: Callable[..., Any], defaults: IterParams, clamped: bool = False
) -> CostFn:
    def cost(
        model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
    ) -> CostReport:
        params = iter_params(defaults, *opts)
        total = kernel_cost(partial(kernel, params=params), size(out))
        return _clamp(model, size(out)) + total if clamped else total

    return cost


def _exp(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    squarings = iter_params(EXP, *opts).iter_cnt
    return kernel_cost(
        partial(kernels.exp_by_squaring, squarings=squarings), size(out)
    )


def _divide(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    inverse = _iterative(kernels.newton_reciprocal, RECIPROCAL)
    return inverse(model, ins, out, opts) + mul_cost(size(out))


def _tournament(with_index: bool) -> CostFn:
    def cost(
        model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
    ) -> CostReport:
        axis = _axis(*opts[:1])
        length = size(ins[0]) if axis is None else ins[0][axis]
        return tournament_cost(model, length, size(out), with_index)

    return cost


def _pool(
    model: CostModel, ins: list[Shape], out: Shape, opts: tuple[Any, ...]
) -> CostReport:
    kh, kw = _dims(opts[0]) if opts else (2, 2)
    return tournament_cost(model, kh * kw, size(out), False)


# Table ------------------------------------------------------------------


CALLS: dict[str, CallSpec] = {
    "relu": CallSpec(
        1, activations.relu, lambda x: np.maximum(x, 0.0), _compare_select
    ),
    "abs": CallSpec(1, activations.abs_, np.abs, _compare_select),
    "logistic": CallSpec(
        1,
        lambda x, *o: activations.logistic(x, iter_params(LOGISTIC, *o)),
        _logistic,
        _iterative(kernels.euler_logistic, LOGISTIC, clamped=True),
        ITERATION_OPTIONS,
    ),
    "logistic_piecewise": CallSpec(
        1,
        activations.logistic_piecewise,
        lambda x: np.clip(x + 0.5, 0.0, 1.0),
        _clip,
    ),
    "reciprocal": CallSpec(
        1,
        lambda x, *o: numerics.reciprocal(x, iter_params(RECIPROCAL, *o)),
        lambda x, *o: 1.0 / x,
        _iterative(kernels.newton_reciprocal, RECIPROCAL),
        ITERATION_OPTIONS,
    ),
    "divide": CallSpec(
        2,
        lambda y, x, *o: numerics.divide(y, x, iter_params(RECIPROCAL, *o)),
        lambda y, x, *o: y / x,
        _divide,
        ITERATION_OPTIONS,
    ),
    "sqrt": CallSpec(
        1,
        lambda x, *o: numerics.sqrt(x, iter_params(SQRT, *o)),
        lambda x, *o: np.sqrt(x),
        _iterative(kernels.newton_sqrt, SQRT),
        ITERATION_OPTIONS,
    ),
    "exp": CallSpec(
        1,
        lambda x, *o: numerics.exp(x, iter_params(EXP, *o)),
        lambda x, *o: np.exp(x),
        _exp,
        ITERATION_OPTIONS,
    ),
    "log": CallSpec(
        1,
        lambda x, *o: numerics.log(x, iter_params(LOG, *o)),
        lambda x, *o: np.log(x),
        _iterative(kernels.newton_log, LOG),
        ITERATION_OPTIONS,
    ),
    "lt": CallSpec(2, less_than, _bit(np.less), _compare, bit_result=True),
    "gt": CallSpec(2, greater_than, _bit(np.greater), _compare, bit_result=True),
    "mux": CallSpec(
        3, mux, lambda c, x, y: np.where(c, x, y), _select, bit_operands=(0,)
    ),
    "clip": CallSpec(
        1,
        lambda x, lo, hi: clip(x, float(lo), float(hi)),
        lambda x, lo, hi: np.clip(x, float(lo), float(hi)),
        _clip,
        ("lower", "upper"),
        required=2,
    ),
    "max": CallSpec(
        1,
        lambda x, axis=None: selection.max_(x, _axis(axis)),
        lambda x, axis=None: np.max(x, axis=_axis(axis)),
        _tournament(False),
        ("axis",),
    ),
    "min": CallSpec(
        1,
        lambda x, axis=None: selection.min_(x, _axis(axis)),
        lambda x, axis=None: np.min(x, axis=_axis(axis)),
        _tournament(False),
        ("axis",),
    ),
    "argmax": CallSpec(
        1,
        lambda x, axis=None: selection.argmax(x, _axis(axis)),
        _arg(np.argmax),
        _tournament(True),
        ("axis",),
    ),
    "argmin": CallSpec(
        1,
        lambda x, axis=None: selection.argmin(x, _axis(axis)),
        _arg(np.argmin),
        _tournament(True),
        ("axis",),
    ),
    "max_pool2d": CallSpec(
        1,
        lambda x, window=(2, 2): selection.max_pool2d(x, _dims(window)),
        _max_pool2d,
        _pool,
        ("size",),
    ),
    "sum": CallSpec(
        1,
        lambda x, axis=None: ops.sum_(x, _axis(axis)),
        lambda x, axis=None: np.sum(x, axis=_axis(axis)),
        _free,
        ("axis",),
    ),
    "mean": CallSpec(
        1,
        lambda x, axis=None: ops.mean(x, _axis(axis)),
        lambda x, axis=None: np.mean(x, axis=_axis(axis)),
        _free,
        ("axis",),
    ),
    "transpose": CallSpec(1, ops.transpose, np.transpose, _free),
    "flatten": CallSpec(1, ops.flatten, np.ravel, _free),
    "reshape": CallSpec(
        1,
        lambda x, shape: ops.reshape(x, _dims(shape)),
        lambda x, shape: np.reshape(x, _dims(shape)),
        _free,
        ("shape",),
        required=1,
    ),
    "outer": CallSpec(2, ops.outer, np.outer, _product),
    "zeros": CallSpec(
        0, None, lambda shape: np.zeros(_dims(shape)), _free, ("shape",), required=1
    ),
    "ones": CallSpec(
        0, None, lambda shape: np.ones(_dims(shape)), _free, ("shape",), required=1
    ),
}

# Fonctions appliquées élément par élément : vectorisables sur une tranche.
ELEMENTWISE = frozenset(
    {
        "relu",
        "abs",
        "logistic",
        "logistic_piecewise",
        "reciprocal",
        "sqrt",
        "exp",
        "log",
        "clip",
    }
)


def lookup(name: str) -> CallSpec:
    try:
        return CALLS[name]
    except KeyError:
        raise ProgramSyntaxError(f"Fonction inconnue : {name}") from None
