"""Binary segment cache.

Layout (little-endian):

    offset  size  field
    0       4     magic b"LMSG"
    4       1     version (1)
    5       8     start   (u64)
    13      8     len     (u64)
    21      8     w       (u64, 0 when no squarefree_w array)
    29      ...   λ bits  ceil(len / 8) bytes
            ...   μ bits  ceil(2 len / 8) bytes
            ...   μ²_w bits ceil(len / 8) bytes, only when w != 0
"""

import hashlib
import logging
import os
import struct
from pathlib import Path

import numpy as np

from chowla.errors import CacheFormatError
from chowla.export import atomic_write_bytes
from chowla.sieve.segment import SieveSegment, sieve_range

logger = logging.getLogger(__name__)

MAGIC = b"LMSG"
VERSION = 1
HEADER = struct.Struct("<4sBQQQ")
CACHE_ENV = "CHOWLA_CACHE_DIR"


def encode_segment(segment: SieveSegment) -> bytes:
    w = segment.w if segment.sqf_bits is not None else 0
    parts = [
        HEADER.pack(MAGIC, VERSION, segment.start, segment.length, w),
        segment.lam_bits.tobytes(),
        segment.mu_bits.tobytes(),
    ]
    if w:
        parts.append(segment.sqf_bits.tobytes())
    return b"".join(parts)


def decode_segment(data: bytes) -> SieveSegment:
    if len(data) < HEADER.size:
        raise CacheFormatError(f"cache file truncated: {len(data)} bytes")
    magic, version, start, length, w = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CacheFormatError(f"unsupported cache version {version}")

    lam_size = (length + 7) // 8
    mu_size = (2 * length + 7) // 8
    sqf_size = lam_size if w else 0
    expected = HEADER.size + lam_size + mu_size + sqf_size
    if len(data) != expected:
        raise CacheFormatError(f"expected {expected} bytes, found {len(data)}")

    buf = np.frombuffer(data, dtype=np.uint8, offset=HEADER.size)
    return SieveSegment(
        start=start,
        length=length,
        lam_bits=buf[:lam_size].copy(),
        mu_bits=buf[lam_size : lam_size + mu_size].copy(),
        sqf_bits=buf[lam_size + mu_size :].copy() if w else None,
        w=w or None,
    )


def write_segment(segment: SieveSegment, path: str | Path) -> str:
    """Write the segment atomically and return its SHA-256 hex digest."""
    data = encode_segment(segment)
    atomic_write_bytes(path, data)
    logger.info("Cached segment [%d, %d) to %s", segment.start, segment.stop, path)
    return hashlib.sha256(data).hexdigest()


def read_segment(path: str | Path) -> SieveSegment:
    return decode_segment(Path(path).read_bytes())


def segment_checksum(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cache_dir(default: str | Path | None = None) -> Path:
    """The cache directory: $CHOWLA_CACHE_DIR, else ``default``, else ./chowla-cache."""
    return Path(os.environ.get(CACHE_ENV) or default or "./chowla-cache").resolve()


def cache_path(directory: str | Path, start: int, length: int, w: int | None) -> Path:
    return Path(directory) / f"seg_{start}_{length}_w{w or 0}.lmsg"


def load_or_sieve(
    start: int,
    length: int,
    w: int | None = None,
    *,
    directory: str | Path,
    workers: int = 1,
) -> tuple[SieveSegment, str]:
    """Return the cached segment when present, else sieve and cache it."""
    path = cache_path(directory, start, length, w)
    if path.exists():
        try:
            segment = read_segment(path)
            logger.info("Loaded cached segment %s", path)
            return segment, segment_checksum(path)
        except CacheFormatError as e:
            logger.warning("Ignoring corrupt cache %s: %s", path, e)
    segment = sieve_range(start, length, w, workers=workers)
    return segment, write_segment(segment, path)
