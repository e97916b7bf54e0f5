"""
Sérialisation des partages pour le transport.

Éléments de l'anneau : ``ceil(n/8)`` octets little-endian par élément.
Bits : 8 bits par octet, ordre little-endian.
"""

from __future__ import annotations

import math

import numpy as np

from ring.arithmetic import RingConfig


def encode_ring(values: np.ndarray, cfg: RingConfig) -> bytes:
    width = cfg.element_bytes
    return b"".join(int(v).to_bytes(width, "little") for v in np.ravel(values))


def decode_ring(payload: bytes, cfg: RingConfig, shape: tuple[int, ...]) -> np.ndarray:
    width = cfg.element_bytes
    count = math.prod(shape)
    if len(payload) != count * width:
        raise ValueError(
            f"Charge de {len(payload)} octets, attendu {count} éléments "
            f"de {width} octets"
        )
    flat = np.empty(count, dtype=object)
    for i in range(count):
        flat[i] = int.from_bytes(payload[i * width : (i + 1) * width], "little")
    return flat.reshape(shape)


def encode_bits(bits: np.ndarray) -> tuple[bytes, int]:
    """Retourne la charge compactée et son nombre de bits utiles."""
    flat = np.asarray(bits, dtype=np.uint8).ravel()
    return np.packbits(flat, bitorder="little").tobytes(), int(flat.size)


def decode_bits(payload: bytes, shape: tuple[int, ...]) -> np.ndarray:
    count = math.prod(shape)
    if len(payload) != (count + 7) // 8:
        raise ValueError(f"Charge de {len(payload)} octets pour {count} bits")
    packed = np.frombuffer(payload, dtype=np.uint8)
    return np.unpackbits(packed, count=count, bitorder="little").reshape(shape)
