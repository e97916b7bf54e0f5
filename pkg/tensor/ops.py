"""
Opérations de tenseurs : réindexations gratuites, réductions, produits.

Les réindexations (``reshape``, ``transpose``, ``getitem``...) appliquent la
même transformation numpy aux deux composantes de chaque serveur et
n'envoient aucun message.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING, Any

import numpy as np

from ring.arithmetic import reduce
from sharing.algebra import public, public_raw
from sharing.oracle import private_operation
from sharing.parties import Server
from sharing.shares import PUBLIC_SLOTS, LocalShare, ShareKind

from .exceptions import EmptyAxisError, ShapeError
from .shape import Shape, as_shape, broadcast, normalize_axis

if TYPE_CHECKING:
    from sharing.engine import Engine

    from .share_tensor import ShareTensor


def _result_shape(fn: Callable[..., np.ndarray], *shapes: Shape) -> Shape:
    """Forme produite par ``fn`` sur des tableaux factices."""
    try:
        return tuple(np.shape(fn(*(np.zeros(s, dtype=object) for s in shapes))))
    except (ValueError, IndexError) as exc:
        raise ShapeError(str(exc)) from exc


def _apply(tensor: ShareTensor, fn: Callable[[np.ndarray], np.ndarray]) -> ShareTensor:
    shape = _result_shape(fn, tensor.shape)

    def local(pid: Server, x: LocalShare) -> LocalShare:
        return x.map(fn)

    return tensor.engine.local(local, (tensor,), shape, tensor.kind)


# Réindexations ------------------------------------------------------------


def reshape(tensor: ShareTensor, shape: Any) -> ShareTensor:
    target = (shape,) if isinstance(shape, int) else tuple(int(d) for d in shape)
    return _apply(tensor, lambda a: np.reshape(a, target))


def flatten(tensor: ShareTensor) -> ShareTensor:
    return _apply(tensor, lambda a: np.reshape(a, (-1,)))


def transpose(tensor: ShareTensor, axes: Sequence[int] | None = None) -> ShareTensor:
    return _apply(tensor, lambda a: np.transpose(a, axes))


def repeat(tensor: ShareTensor, repeats: int, axis: int | None = None) -> ShareTensor:
    return _apply(tensor, lambda a: np.repeat(a, repeats, axis=axis))


def tile(tensor: ShareTensor, reps: Any) -> ShareTensor:
    return _apply(tensor, lambda a: np.tile(a, reps))


def broadcast_to(tensor: ShareTensor, shape: Shape) -> ShareTensor:
    target = broadcast(tensor.shape, shape)
    if target != tuple(shape):
        raise ShapeError(f"Impossible de diffuser {tensor.shape} vers {shape}")
    return _apply(tensor, lambda a: np.broadcast_to(a, target))


def _check_public_key(key: Any) -> None:
    from .share_tensor import ShareTensor

    items = key if isinstance(key, tuple) else (key,)
    if any(isinstance(k, ShareTensor) for k in items):
        raise TypeError("L'indexation par un indice privé n'est pas prise en charge")


def getitem(tensor: ShareTensor, key: Any) -> ShareTensor:
    _check_public_key(key)
    return _apply(tensor, lambda a: np.asarray(a[key], dtype=a.dtype))


def set_item(tensor: ShareTensor, key: Any, value: Any) -> ShareTensor:
    """Copie de ``tensor`` où ``tensor[key]`` est remplacé par ``value``."""
    from .share_tensor import ShareTensor

    _check_public_key(key)
    engine, kind = tensor.engine, tensor.kind
    if isinstance(value, ShareTensor):

        def assign(pid: Server, x: LocalShare, v: LocalShare) -> LocalShare:
            first, second = np.array(x.first), np.array(x.second)
            first[key] = v.first
            second[key] = v.second
            return LocalShare(first, second)

        return engine.local(assign, (tensor, value), tensor.shape, kind)

    raw = public_raw(engine, value, kind)

    def assign_public(pid: Server, x: LocalShare) -> LocalShare:
        slots = PUBLIC_SLOTS[pid]
        parts = []
        for component, slot in zip((x.first, x.second), slots, strict=True):
            updated = np.array(component)
            updated[key] = raw if slot else 0
            parts.append(updated)
        return LocalShare(*parts)

    return engine.local(assign_public, (tensor,), tensor.shape, kind)


def _check_same(tensors: Sequence[ShareTensor]) -> tuple[Engine, ShareKind]:
    if not tensors:
        raise ShapeError("Au moins un tenseur est requis")
    engine, kind = tensors[0].engine, tensors[0].kind
    for t in tensors[1:]:
        if t.engine is not engine or t.kind is not kind:
            raise TypeError("Tenseurs d'engines ou de natures différents")
    return engine, kind


def concatenate(tensors: Sequence[ShareTensor], axis: int = 0) -> ShareTensor:
    engine, kind = _check_same(tensors)
    shape = _result_shape(
        lambda *arrays: np.concatenate(arrays, axis=axis), *(t.shape for t in tensors)
    )

    def local(pid: Server, *xs: LocalShare) -> LocalShare:
        return LocalShare(
            np.concatenate([x.first for x in xs], axis=axis),
            np.concatenate([x.second for x in xs], axis=axis),
        )

    return engine.local(local, tuple(tensors), shape, kind)


def stack(tensors: Sequence[ShareTensor], axis: int = 0) -> ShareTensor:
    engine, kind = _check_same(tensors)
    shape = _result_shape(
        lambda *arrays: np.stack(arrays, axis=axis), *(t.shape for t in tensors)
    )

    def local(pid: Server, *xs: LocalShare) -> LocalShare:
        return LocalShare(
            np.stack([x.first for x in xs], axis=axis),
            np.stack([x.second for x in xs], axis=axis),
        )

    return engine.local(local, tuple(tensors), shape, kind)


def _fill_dtype(kind: ShareKind) -> Any:
    return np.uint8 if kind is ShareKind.BIT else np.float64


def zeros(
    engine: Engine, shape: Any, kind: ShareKind = ShareKind.ARITHMETIC
) -> ShareTensor:
    fill = np.zeros(as_shape(shape), dtype=_fill_dtype(kind))
    return public(engine, fill, kind)


def ones(
    engine: Engine, shape: Any, kind: ShareKind = ShareKind.ARITHMETIC
) -> ShareTensor:
    fill = np.ones(as_shape(shape), dtype=_fill_dtype(kind))
    return public(engine, fill, kind)


# Réductions ---------------------------------------------------------------


def _reduced_length(tensor: ShareTensor, axis: int | None) -> int:
    if axis is None:
        return tensor.size
    return tensor.shape[normalize_axis(axis, tensor.ndim)]


@private_operation("sum")
def sum_(tensor: ShareTensor, axis: int | None = None) -> ShareTensor:
    """Somme gratuite (XOR pour les bits)."""
    cfg, kind = tensor.config, tensor.kind
    if axis is not None:
        axis = normalize_axis(axis, tensor.ndim)

    def total(a: np.ndarray) -> np.ndarray:
        if kind is ShareKind.BIT:
            if axis is None:
                return np.asarray(np.bitwise_xor.reduce(np.ravel(a)), dtype=np.uint8)
            return np.asarray(np.bitwise_xor.reduce(a, axis=axis), dtype=np.uint8)
        return reduce(np.asarray(np.sum(a, axis=axis), dtype=object), cfg)

    return _apply(tensor, total)


@private_operation("mean")
def mean(tensor: ShareTensor, axis: int | None = None) -> ShareTensor:
    """Moyenne : somme gratuite puis multiplication par 1/n publique."""
    from protocols.multiplication import mul_public

    count = _reduced_length(tensor, axis)
    if count == 0:
        raise EmptyAxisError("Moyenne sur un axe vide")
    return mul_public(sum_(tensor, axis), 1.0 / count)


# Produits -----------------------------------------------------------------


@private_operation("dot")
def dot(a: ShareTensor, b: ShareTensor) -> ShareTensor:
    """Produit matriciel : une seule troncature par élément de sortie, 1 ronde."""
    from protocols.multiplication import product_round

    if a.ndim == 0 or b.ndim == 0:
        raise ShapeError("dot n'accepte pas de scalaire ; utiliser *")
    inner_b = b.shape[0] if b.ndim == 1 else b.shape[-2]
    if a.shape[-1] != inner_b:
        raise ShapeError(
            f"Dimensions internes incompatibles : {a.shape} et {b.shape}",
            axis=a.ndim - 1,
        )
    shape = _result_shape(np.matmul, a.shape, b.shape)
    return product_round(
        (a, b),
        lambda x, y: (np.matmul(x.first, y.second), np.matmul(x.second, y.first)),
        shape,
        op="dot",
    )


@private_operation("outer")
def outer(u: ShareTensor, v: ShareTensor) -> ShareTensor:
    """Produit extérieur de deux vecteurs (coût d'un produit élémentaire)."""
    from protocols.multiplication import product_round

    if u.ndim != 1 or v.ndim != 1:
        raise ShapeError("outer attend deux vecteurs")
    return product_round(
        (u, v),
        lambda x, y: (
            np.multiply.outer(x.first, y.second),
            np.multiply.outer(x.second, y.first),
        ),
        (u.shape[0], v.shape[0]),
        op="outer",
    )


def elementwise(op: str, a: ShareTensor, b: Any, c: Any = None) -> ShareTensor:
    """Aiguillage des opérations élément par élément (+, -, *, <, >, mux)."""
    from protocols.comparison import greater_than, less_than
    from protocols.ot import mux

    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "<":
        return less_than(a, b)
    if op == ">":
        return greater_than(a, b)
    if op == "mux":
        return mux(a, b, c)
    raise ValueError(f"Opération inconnue : {op}")
