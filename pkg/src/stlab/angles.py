"""Normalised Frobenius angles x_k and the on-disk trace cache.

Cache layout (little-endian):

    magic     6 bytes  b"STLAB1"
    label_len u16, label utf-8 bytes
    curve_fp  u64      CRC-64 of the curve's coefficients and conductor
    count     u64
    crc       u64      CRC-64/XZ of the record payload
    records   count x (k u32, p u64, a i32, flag u8)

Angles are not stored; they are recomputed from (p, a, flag) on load.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from .curves import RationalCurve, Reduction
from .errors import CacheCorruptionError, DomainError
from .primes import first_primes
from .trace import DEFAULT_THRESHOLDS, Thresholds, TraceRecord, trace_array

log = logging.getLogger(__name__)

MAGIC = b"STLAB1"
RECORD_DTYPE = np.dtype([("k", "<u4"), ("p", "<u8"), ("a", "<i4"), ("flag", "u1")])
FLAG_GOOD, FLAG_BAD = 0, 1


def _crc64_table():
    poly = 0xC96C5795D7870F42
    table = np.zeros(256, dtype=np.uint64)
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ poly if c & 1 else c >> 1
        table[i] = c
    return table


_CRC_TABLE = _crc64_table()


@njit(cache=True)
def _crc64_update(crc, data, table):
    for b in data:
        crc = table[(crc ^ np.uint64(b)) & np.uint64(0xFF)] ^ (crc >> np.uint64(8))
    return crc


def crc64(data: bytes | np.ndarray) -> int:
    """CRC-64/XZ (ECMA-182 polynomial, reflected, all-ones init and xorout)."""
    buf = np.frombuffer(bytes(data), dtype=np.uint8) if not isinstance(data, np.ndarray) \
        else data.view(np.uint8).ravel()
    crc = _crc64_update(np.uint64(0xFFFFFFFFFFFFFFFF), buf, _CRC_TABLE)
    return int(crc) ^ 0xFFFFFFFFFFFFFFFF


def curve_fingerprint(curve: RationalCurve) -> int:
    return crc64(f"{list(curve.a)};{curve.conductor}".encode())


def angle_of(record: TraceRecord) -> float:
    if record.flag is Reduction.BAD:
        return 0.5
    return float(angles_from(np.array([record.p]), np.array([record.a]),
                             np.array([False]))[0])


def angles_from(primes: np.ndarray, a: np.ndarray, bad: np.ndarray) -> np.ndarray:
    c = a / (2.0 * np.sqrt(primes.astype(float)))
    x = np.arccos(np.clip(c, -1.0, 1.0)) / np.pi
    return np.where(bad, 0.5, x)


@dataclass(frozen=True)
class AngleSequence:
    curve_label: str
    primes: np.ndarray
    traces: np.ndarray
    bad: np.ndarray
    angles: np.ndarray

    @property
    def length(self) -> int:
        return int(self.angles.size)

    def __len__(self):
        return self.length

    def record(self, k: int) -> TraceRecord:
        """The trace record for the 1-based index k."""
        i = k - 1
        flag = Reduction.BAD if self.bad[i] else Reduction.GOOD
        return TraceRecord(k, int(self.primes[i]), int(self.traces[i]), flag)

    @property
    def records(self):
        return [self.record(k) for k in range(1, self.length + 1)]

    def prefix(self, n: int) -> "AngleSequence":
        if n > self.length:
            raise DomainError(f"sequence has only {self.length} terms")
        return AngleSequence(self.curve_label, self.primes[:n], self.traces[:n],
                             self.bad[:n], self.angles[:n])

    def to_records_array(self) -> np.ndarray:
        rec = np.empty(self.length, dtype=RECORD_DTYPE)
        rec["k"] = np.arange(1, self.length + 1)
        rec["p"] = self.primes
        rec["a"] = self.traces
        rec["flag"] = np.where(self.bad, FLAG_BAD, FLAG_GOOD)
        return rec

    @classmethod
    def from_records_array(cls, label: str, rec: np.ndarray) -> "AngleSequence":
        primes = rec["p"].astype(np.int64)
        a = rec["a"].astype(np.int64)
        bad = rec["flag"] == FLAG_BAD
        return cls(label, primes, a, bad, angles_from(primes, a, bad))


def _freeze(*arrays):
    for arr in arrays:
        arr.flags.writeable = False


def compute_sequence(curve: RationalCurve, length: int, start: int = 0,
                     thresholds: Thresholds = DEFAULT_THRESHOLDS,
                     threads: int = 1) -> AngleSequence:
    """Angles for indices start+1 .. length, computed from scratch."""
    primes = first_primes(length).primes[start:]
    a, bad = trace_array(curve, primes, thresholds, threads=threads)
    return AngleSequence(curve.label, primes, a, bad, angles_from(primes, a, bad))


# ----------------------------------------------------------------- caching


def cache_path(cache_dir: os.PathLike | str, label: str) -> Path:
    return Path(cache_dir) / f"{label}.trc"


def save_cache(path: os.PathLike | str, curve: RationalCurve, seq: AngleSequence):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = seq.to_records_array()
    label = curve.label.encode("utf-8")
    header = MAGIC + struct.pack("<H", len(label)) + label + struct.pack(
        "<QQQ", curve_fingerprint(curve), payload.size, crc64(payload))
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload.tobytes())
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_cache(path: os.PathLike | str, curve: RationalCurve | None = None):
    """Read a cache file; returns None if the curve fingerprint disagrees."""
    raw = Path(path).read_bytes()
    if raw[:6] != MAGIC:
        raise CacheCorruptionError(f"{path}: bad magic")
    try:
        (n,) = struct.unpack_from("<H", raw, 6)
        label = raw[8 : 8 + n].decode("utf-8")
        fp, count, crc = struct.unpack_from("<QQQ", raw, 8 + n)
    except (struct.error, UnicodeDecodeError) as exc:
        raise CacheCorruptionError(f"{path}: truncated header") from exc
    body = raw[8 + n + 24 :]
    if len(body) != count * RECORD_DTYPE.itemsize:
        raise CacheCorruptionError(f"{path}: payload size mismatch")
    rec = np.frombuffer(body, dtype=RECORD_DTYPE)
    if crc64(rec) != crc:
        raise CacheCorruptionError(f"{path}: checksum mismatch")
    if curve is not None:
        if label != curve.label:
            raise CacheCorruptionError(f"{path}: holds curve {label!r}, not {curve.label!r}")
        if fp != curve_fingerprint(curve):
            log.warning("%s: cached for a different model of %s; recomputing", path, label)
            return None
    return AngleSequence.from_records_array(label, rec)


def build_sequence(curve: RationalCurve, length: int,
                   cache_dir: os.PathLike | str | None = None,
                   thresholds: Thresholds = DEFAULT_THRESHOLDS,
                   threads: int = 1) -> AngleSequence:
    """Angles x_1 .. x_length, reusing and extending the cache if given."""
    if length < 1:
        raise DomainError("length must be >= 1")
    cached = None
    path = None
    if cache_dir is not None:
        path = cache_path(cache_dir, curve.label)
        if path.exists():
            cached = load_cache(path, curve)
    if cached is not None and cached.length >= length:
        seq = cached.prefix(length)
    else:
        start = 0 if cached is None else cached.length
        log.info("computing traces of %s for k = %d..%d", curve.label, start + 1, length)
        tail = compute_sequence(curve, length, start, thresholds, threads)
        if cached is not None:
            seq = AngleSequence(
                curve.label,
                *(np.concatenate([getattr(cached, f), getattr(tail, f)])
                  for f in ("primes", "traces", "bad", "angles")))
        else:
            seq = tail
        if path is not None:
            save_cache(path, curve, seq)
    _freeze(seq.primes, seq.traces, seq.bad, seq.angles)
    return seq


def export_csv(seq: AngleSequence, out=None) -> str | None:
    """Write k,p,a,flag,x rows; returns the text when `out` is None."""
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "p", "a", "flag", "x"])
    for i in range(seq.length):
        w.writerow([i + 1, int(seq.primes[i]), int(seq.traces[i]),
                    "bad" if seq.bad[i] else "good", format(float(seq.angles[i]), ".17g")])
    return buf.getvalue() if out is None else None
