"""
Import/export de tenseurs en clair côté client.

CSV : une ligne d'en-tête ``shape: d1,d2,...`` puis les réels en ordre
ligne par ligne, une ligne par élément du premier axe.

QSTN : ``QSTN``, rang en u32, dimensions en u64, puis les éléments bruts de
l'anneau sur ``ceil(n/8)`` octets, le tout en little-endian.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Any

import numpy as np

from ring.arithmetic import RingConfig, decode_array, encode_array
from sharing.codec import decode_ring, encode_ring

from .exceptions import TensorIOError
from .shape import Shape

MAGIC = b"QSTN"
SHAPE_PREFIX = "shape:"


# CSV ---------------------------------------------------------------------


def write_csv(path: Path | str, values: Any) -> None:
    arr = np.asarray(values, dtype=np.float64)
    header = SHAPE_PREFIX + " " + ",".join(str(d) for d in arr.shape)
    if arr.ndim:
        rows = arr.reshape(arr.shape[0], math.prod(arr.shape[1:]))
    else:
        rows = arr.reshape(1, 1)
    buffer = io.StringIO()
    np.savetxt(buffer, rows, delimiter=",", fmt="%.17g")
    try:
        Path(path).write_text(header + "\n" + buffer.getvalue())
    except OSError as exc:
        raise TensorIOError(f"Écriture impossible : {path}") from exc


def _parse_shape(line: str, path: Path | str) -> Shape:
    if not line.startswith(SHAPE_PREFIX):
        raise TensorIOError(f"{path} : en-tête « {SHAPE_PREFIX} » manquant")
    dims = line[len(SHAPE_PREFIX) :].strip()
    try:
        return tuple(int(d) for d in dims.split(",")) if dims else ()
    except ValueError as exc:
        raise TensorIOError(f"{path} : forme illisible « {dims} »") from exc


def read_csv(path: Path | str) -> np.ndarray:
    try:
        header, _, body = Path(path).read_text().partition("\n")
    except OSError as exc:
        raise TensorIOError(f"Lecture impossible : {path}") from exc
    shape = _parse_shape(header.strip(), path)
    count = math.prod(shape)
    try:
        flat = (
            np.loadtxt(io.StringIO(body), delimiter=",", ndmin=1).ravel()
            if count
            else np.empty(0)
        )
    except ValueError as exc:
        raise TensorIOError(f"{path} : valeur non numérique") from exc
    if flat.size != count:
        raise TensorIOError(f"{path} : {flat.size} valeurs pour la forme {shape}")
    return flat.reshape(shape)


# QSTN --------------------------------------------------------------------


def write_qstn(path: Path | str, raw: np.ndarray, cfg: RingConfig) -> None:
    """Écrit des éléments bruts de l'anneau."""
    arr = np.asarray(raw, dtype=object)
    header = (
        MAGIC
        + np.uint32(arr.ndim).astype("<u4").tobytes()
        + np.asarray(arr.shape, dtype="<u8").tobytes()
    )
    try:
        Path(path).write_bytes(header + encode_ring(arr, cfg))
    except OSError as exc:
        raise TensorIOError(f"Écriture impossible : {path}") from exc


def read_qstn(path: Path | str, cfg: RingConfig) -> np.ndarray:
    try:
        payload = Path(path).read_bytes()
    except OSError as exc:
        raise TensorIOError(f"Lecture impossible : {path}") from exc
    if payload[:4] != MAGIC or len(payload) < 8:
        raise TensorIOError(f"{path} n'est pas un fichier QSTN")
    rank = int(np.frombuffer(payload[4:8], dtype="<u4")[0])
    body = 8 + 8 * rank
    if len(payload) < body:
        raise TensorIOError(f"{path} : en-tête tronqué")
    shape = tuple(int(d) for d in np.frombuffer(payload[8:body], dtype="<u8"))
    try:
        return decode_ring(payload[body:], cfg, shape)
    except ValueError as exc:
        raise TensorIOError(f"{path} : {exc}") from exc


# Réels -------------------------------------------------------------------


def load_values(path: Path | str, cfg: RingConfig) -> np.ndarray:
    """Lit des réels depuis un CSV ou un QSTN (décodé en virgule fixe)."""
    if Path(path).suffix.lower() == ".qstn":
        return decode_array(read_qstn(path, cfg), cfg)
    return read_csv(path)


def save_values(path: Path | str, values: Any, cfg: RingConfig) -> None:
    if Path(path).suffix.lower() == ".qstn":
        write_qstn(path, encode_array(values, cfg), cfg)
    else:
        write_csv(path, values)
