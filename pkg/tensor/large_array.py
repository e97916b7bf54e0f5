"""
Tableaux de partages adossés au disque.

Chaque serveur écrit ses propres composantes dans son fichier : pour chaque
élément, ``first`` puis ``second`` sur ``ceil(n/8)`` octets little-endian,
en ordre ligne par ligne, sans en-tête. La forme et l'anneau sont décrits
par un fichier ``<nom>.json`` à côté.
"""

from __future__ import annotations

import json
import math
import time
from collections import OrderedDict
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from ring.arithmetic import RingConfig
from sharing.codec import decode_ring, encode_ring
from sharing.context import ServerContext
from sharing.parties import SERVERS, Server
from sharing.shares import LocalShare, ShareKind

from .exceptions import ShapeError, TensorIOError
from .shape import Shape, size

if TYPE_CHECKING:
    from sharing.engine import Engine

    from .share_tensor import ShareTensor

logger = structlog.get_logger(__name__)


def _defaults() -> tuple[int, int]:
    from config.defaults import engine_defaults

    defaults = engine_defaults()
    return defaults.large_array_chunk_bytes, defaults.large_array_cache_chunks


class LargeArray:
    """Tableau partagé dont les lignes (premier axe) restent sur disque.

    Les lectures se font par blocs de ``chunk_bytes`` ; au plus
    ``cache_chunks`` blocs par serveur restent en mémoire. Le temps passé
    en entrées/sorties est cumulé dans ``io_seconds``, à part du temps de
    calcul et de communication.
    """

    def __init__(
        self,
        engine: Engine,
        directory: Path | str,
        name: str,
        shape: Shape,
        *,
        chunk_bytes: int | None = None,
        cache_chunks: int | None = None,
    ) -> None:
        if not shape:
            raise ShapeError("Un LargeArray a au moins une dimension")
        if chunk_bytes is None or cache_chunks is None:
            default_chunk, default_cache = _defaults()
            chunk_bytes = default_chunk if chunk_bytes is None else chunk_bytes
            cache_chunks = default_cache if cache_chunks is None else cache_chunks
        if chunk_bytes < 1 or cache_chunks < 1:
            raise ValueError("chunk_bytes et cache_chunks doivent être positifs")
        self.engine = engine
        self.directory = Path(directory)
        self.name = name
        self.shape = tuple(shape)
        self.chunk_bytes = chunk_bytes
        self.cache_chunks = cache_chunks
        self.io_seconds = 0.0
        self.chunks_read = 0
        self._cache: dict[Server, OrderedDict[int, LocalShare]] = {
            pid: OrderedDict() for pid in SERVERS
        }

    # Géométrie ------------------------------------------------------------

    @property
    def config(self) -> RingConfig:
        return self.engine.config

    @property
    def record_bytes(self) -> int:
        """Octets d'un élément chez un serveur (ses deux composantes)."""
        return 2 * self.config.element_bytes

    @property
    def row_shape(self) -> Shape:
        return self.shape[1:]

    @property
    def row_bytes(self) -> int:
        return size(self.row_shape) * self.record_bytes

    @property
    def chunk_rows(self) -> int:
        return max(1, self.chunk_bytes // max(1, self.row_bytes))

    @property
    def chunk_count(self) -> int:
        return math.ceil(self.shape[0] / self.chunk_rows)

    def path(self, pid: Server) -> Path:
        return self.directory / f"{self.name}.{pid}.bin"

    @property
    def meta_path(self) -> Path:
        return self.directory / f"{self.name}.json"

    def __len__(self) -> int:
        return self.shape[0]

    def __repr__(self) -> str:
        return f"LargeArray({self.name!r}, shape={self.shape})"

    @contextmanager
    def _timed(self) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        except OSError as exc:
            raise TensorIOError(f"{self.name} : {exc}") from exc
        finally:
            self.io_seconds += time.perf_counter() - started

    # Création et ouverture ------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: Path | str,
        name: str,
        tensor: ShareTensor,
        **options: Any,
    ) -> LargeArray:
        """Écrit ``tensor`` sur disque, chaque serveur dans son fichier."""
        if tensor.kind is not ShareKind.ARITHMETIC:
            raise TypeError("LargeArray ne stocke que des partages arithmétiques")
        array = cls(tensor.engine, directory, name, tensor.shape, **options)
        cfg = array.config

        def write(ctx: ServerContext) -> None:
            pid = Server(ctx.pid)
            share = ctx.load(tensor)
            pairs = np.stack([share.first, share.second], axis=-1)
            with array._timed():
                array.path(pid).write_bytes(encode_ring(pairs, cfg))

        with array._timed():
            array.directory.mkdir(parents=True, exist_ok=True)
            meta = {"shape": list(array.shape), "n": cfg.n, "d": cfg.d}
            array.meta_path.write_text(json.dumps(meta))
        tensor.engine.each_server(write)
        logger.info(
            "large_array.created",
            name=name,
            shape=array.shape,
            bytes_per_server=array.shape[0] * array.row_bytes,
        )
        return array

    @classmethod
    def open(
        cls, engine: Engine, directory: Path | str, name: str, **options: Any
    ) -> LargeArray:
        meta_path = Path(directory) / f"{name}.json"
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, ValueError) as exc:
            raise TensorIOError(f"Métadonnées illisibles : {meta_path}") from exc
        if (meta["n"], meta["d"]) != (engine.config.n, engine.config.d):
            raise TensorIOError(
                f"{name} a été écrit pour n={meta['n']}, d={meta['d']}, "
                f"pas pour {engine.config}"
            )
        array = cls(engine, directory, name, tuple(meta["shape"]), **options)
        expected = array.shape[0] * array.row_bytes
        for pid in SERVERS:
            path = array.path(pid)
            if not path.exists() or path.stat().st_size != expected:
                raise TensorIOError(f"{path} absent ou de taille inattendue")
        return array

    # Lecture --------------------------------------------------------------

    def _load_chunk(self, pid: Server, chunk: int) -> LocalShare:
        cache = self._cache[pid]
        if chunk in cache:
            cache.move_to_end(chunk)
            return cache[chunk]
        first_row = chunk * self.chunk_rows
        rows = min(self.chunk_rows, self.shape[0] - first_row)
        with self._timed(), self.path(pid).open("rb") as handle:
            handle.seek(first_row * self.row_bytes)
            payload = handle.read(rows * self.row_bytes)
        pairs = decode_ring(payload, self.config, (rows, *self.row_shape, 2))
        share = LocalShare(pairs[..., 0], pairs[..., 1])
        cache[chunk] = share
        self.chunks_read += 1
        if len(cache) > self.cache_chunks:
            cache.popitem(last=False)
        return share

    def get_batch(self, indices: Sequence[int] | np.ndarray) -> ShareTensor:
        """Lignes ``indices`` (dans cet ordre) sous forme de ShareTensor."""
        rows = np.asarray(indices, dtype=np.int64).reshape(-1)
        if rows.size and (rows.min() < -len(self) or rows.max() >= len(self)):
            raise IndexError(f"Indices hors de [0, {len(self)}) pour {self.name}")
        rows = rows % len(self) if rows.size else rows
        # Parcours séquentiel des blocs concernés, dans l'ordre du fichier.
        wanted: dict[int, list[tuple[int, int]]] = {}
        for out_row, row in enumerate(rows):
            chunk, offset = divmod(int(row), self.chunk_rows)
            wanted.setdefault(chunk, []).append((out_row, offset))
        chunks = sorted(wanted)
        shape = (int(rows.size), *self.row_shape)
        before = self.io_seconds

        def gather(pid: Server) -> LocalShare:
            first = np.empty(shape, dtype=object)
            second = np.empty(shape, dtype=object)
            for chunk in chunks:
                share = self._load_chunk(pid, chunk)
                for out_row, offset in wanted[chunk]:
                    first[out_row] = share.first[offset]
                    second[out_row] = share.second[offset]
            return LocalShare(first, second)

        batch = self.engine.local(gather, (), shape)
        logger.debug(
            "large_array.batch",
            name=self.name,
            rows=int(rows.size),
            chunks=len(chunks),
            io_seconds=self.io_seconds - before,
        )
        return batch

    def iter_chunks(self) -> Iterator[ShareTensor]:
        """Parcourt tout le tableau bloc par bloc."""
        for chunk in range(self.chunk_count):
            start = chunk * self.chunk_rows
            stop = min(start + self.chunk_rows, self.shape[0])
            yield self.get_batch(np.arange(start, stop))


def large_get_batch(
    array: LargeArray, indices: Sequence[int] | np.ndarray
) -> ShareTensor:
    return array.get_batch(indices)
