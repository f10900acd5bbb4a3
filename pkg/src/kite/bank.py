"""Embedding bank container and file ingestion (CSV and kitebin formats).

kitebin layout (little-endian, normative):
    bytes 0..3   magic "KITE" (0x4B 0x49 0x54 0x45)
    bytes 4..7   u32 rows
    bytes 8..11  u32 cols
    bytes 12..   rows*cols IEEE-754 f64 values, row-major
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ParseError

MAGIC = b"KITE"
HEADER = struct.Struct("<4sII")


@dataclass
class EmbeddingBank:
    """Immutable n x d matrix of candidate vectors with optional string ids."""

    vectors: np.ndarray
    ids: list[str] = field(default_factory=list)
    source_path: str | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vectors, dtype=np.float64))
        if v.ndim != 2:
            raise InvalidArgumentError(f"bank vectors must be 2-D, got shape {v.shape}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise InvalidArgumentError(f"bank must be non-empty, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v).all(axis=1))[0])
            raise InvalidArgumentError(f"bank row {bad} contains non-finite values")
        v.setflags(write=False)
        self.vectors = v
        if not self.ids:
            self.ids = [str(i) for i in range(v.shape[0])]
        elif len(self.ids) != v.shape[0]:
            raise InvalidArgumentError(
                f"got {len(self.ids)} ids for {v.shape[0]} rows"
            )

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _parse_csv(text: str, path: str) -> EmbeddingBank:
    rows, ids = [], []
    has_ids = None
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if has_ids is None:
            try:
                float(fields[0])
                has_ids = False
            except ValueError:
                has_ids = True
        row_id = None
        if has_ids:
            row_id, fields = fields[0], fields[1:]
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"{path}: line {lineno}: expected {width} values, got {len(values)}"
            )
        if not all(math.isfinite(v) for v in values):
            raise ParseError(f"{path}: line {lineno}: non-finite value")
        rows.append(values)
        if has_ids:
            ids.append(row_id)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return EmbeddingBank(np.array(rows, dtype=np.float64), ids=ids, source_path=path)


def _parse_kitebin(data: bytes, path: str) -> EmbeddingBank:
    if len(data) < HEADER.size:
        raise ParseError(f"{path}: truncated header, got {len(data)} bytes")
    magic, rows, cols = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError(f"{path}: bad magic {magic!r} at offset 0")
    expected = HEADER.size + rows * cols * 8
    if len(data) != expected:
        raise ParseError(
            f"{path}: payload is {len(data)} bytes, expected {expected} "
            f"for {rows}x{cols} at offset {HEADER.size}"
        )
    if rows == 0 or cols == 0:
        raise ParseError(f"{path}: empty bank ({rows}x{cols})")
    values = np.frombuffer(data, dtype="<f8", offset=HEADER.size)
    mat = values.reshape(rows, cols).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(mat).reshape(-1))
    if bad.size:
        off = HEADER.size + int(bad[0]) * 8
        raise ParseError(f"{path}: non-finite value at offset {off}")
    return EmbeddingBank(mat, source_path=path)


def load_bank(path, format: str = "auto") -> EmbeddingBank:
    """Read an embedding bank from `path`.

    `format` is one of "csv", "kitebin", or "auto" (sniff the magic bytes).
    """
    path = str(path)
    if format not in ("csv", "kitebin", "auto"):
        raise InvalidArgumentError(f"unknown bank format {format!r}")
    with open(path, "rb") as fh:
        data = fh.read()
    if format == "auto":
        format = "kitebin" if data[:4] == MAGIC else "csv"
    if format == "kitebin":
        return _parse_kitebin(data, path)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8 text: {exc}") from exc
    return _parse_csv(text, path)


def save_bank(bank: EmbeddingBank, path, format: str = "kitebin") -> None:
    """Write `bank` to `path`; kitebin round-trips bit-identically."""
    path = str(path)
    if format == "kitebin":
        n, d = bank.vectors.shape
        with open(path, "wb") as fh:
            fh.write(HEADER.pack(MAGIC, n, d))
            fh.write(np.ascontiguousarray(bank.vectors, dtype="<f8").tobytes())
        return
    if format == "csv":
        default_ids = bank.ids == [str(i) for i in range(bank.n)]
        with open(path, "w", encoding="utf-8") as fh:
            for i, row in enumerate(bank.vectors):
                cells = [repr(float(v)) for v in row]
                if not default_ids:
                    cells.insert(0, bank.ids[i])
                fh.write(",".join(cells) + "\n")
        return
    raise InvalidArgumentError(f"unknown bank format {format!r}")
