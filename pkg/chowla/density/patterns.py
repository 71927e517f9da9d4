"""Sign patterns and pattern matching over sieved segments.

A pattern is a string over {+, -, *} (plus 0 for μ-valued sources) with a
marker '^' placed before the symbol that sits at n. The symbols before the
marker constrain n-k, ..., n-1, the ones after it constrain n+1, ..., n+l,
and a match additionally requires n > k.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from chowla.errors import ParameterError
from chowla.sieve.segment import SieveSegment

logger = logging.getLogger(__name__)

MAX_PATTERN_LENGTH = 8
SOURCES = ("lambda", "mu", "mu2", "mu2w")

_NORMALIZE = {"−": "-", "∗": "*", "∨": "^", "+": "+", "-": "-", "*": "*", "0": "0", "^": "^"}
_SYMBOL_VALUE = {"+": 1, "-": -1, "0": 0}
_ALPHABET = {
    "lambda": {"+", "-"},
    "mu": {"+", "-", "0"},
    "mu2": {"+", "0"},
    "mu2w": {"+", "0"},
}


@dataclass(frozen=True)
class SignPattern:
    symbols: str
    marker_offset: int = 0

    def __post_init__(self):
        if not self.symbols:
            raise ParameterError("pattern must have at least one symbol")
        if not 0 <= self.marker_offset < len(self.symbols):
            raise ParameterError(
                f"marker offset {self.marker_offset} outside pattern of length {len(self.symbols)}"
            )
        bad = set(self.symbols) - {"+", "-", "*", "0"}
        if bad:
            raise ParameterError(f"unknown pattern symbols {sorted(bad)}")

    @classmethod
    def parse(cls, text: str, *, max_length: int = MAX_PATTERN_LENGTH) -> "SignPattern":
        """Parse the textual form, e.g. "^+-+" or "−∗∨+"."""
        chars = []
        for ch in text.strip():
            if ch.isspace():
                continue
            if ch not in _NORMALIZE:
                raise ParameterError(f"unknown pattern character {ch!r} in {text!r}")
            chars.append(_NORMALIZE[ch])

        markers = [i for i, ch in enumerate(chars) if ch == "^"]
        if len(markers) > 1:
            raise ParameterError(f"pattern {text!r} has more than one marker")
        marker = markers[0] if markers else 0
        symbols = "".join(ch for ch in chars if ch != "^")
        if markers and marker >= len(symbols):
            raise ParameterError(f"marker in {text!r} is not followed by a symbol")
        if len(symbols) > max_length:
            raise ParameterError(
                f"pattern {text!r} longer than {max_length} symbols"
            )
        return cls(symbols, marker)

    @classmethod
    def run(cls, half_width: int) -> "SignPattern":
        """The all-plus pattern constraining n-h, ..., n+h."""
        return cls("+" * (2 * half_width + 1), half_width)

    @property
    def k(self) -> int:
        return self.marker_offset

    @property
    def l(self) -> int:
        return len(self.symbols) - self.marker_offset - 1

    @property
    def width(self) -> int:
        return len(self.symbols)

    def constraints(self) -> list[tuple[int, int]]:
        """(offset relative to n, required value) for every non-* symbol."""
        return [
            (i - self.marker_offset, _SYMBOL_VALUE[s])
            for i, s in enumerate(self.symbols)
            if s != "*"
        ]

    def check_source(self, which: str) -> None:
        if which not in SOURCES:
            raise ParameterError(f"unknown source {which!r}; expected one of {SOURCES}")
        bad = set(self.symbols) - _ALPHABET[which] - {"*"}
        if bad:
            raise ParameterError(f"symbols {sorted(bad)} not valid for source {which!r}")

    def __str__(self) -> str:
        return self.symbols[: self.marker_offset] + "^" + self.symbols[self.marker_offset :]


def all_patterns(length: int, marker_offset: int = 0) -> list[SignPattern]:
    """The 2^length λ-patterns with no wildcard."""
    return [
        SignPattern("".join(signs), marker_offset)
        for signs in itertools.product("+-", repeat=length)
    ]


def source_values(segment: SieveSegment, which: str) -> np.ndarray:
    """Decoded values of the chosen arithmetic function as int8."""
    if which == "lambda":
        return segment.lambda_values()
    if which == "mu":
        return segment.mu_values()
    if which == "mu2":
        return (segment.mu_values() != 0).astype(np.int8)
    if which == "mu2w":
        return segment.squarefree_w_values().astype(np.int8)
    raise ParameterError(f"unknown source {which!r}; expected one of {SOURCES}")


def match_mask(values: np.ndarray, pattern: SignPattern) -> np.ndarray:
    """mask[i] is True when the pattern window starting at values[i] matches.

    ``values[i]`` plays the role of n - k; the mask has
    ``len(values) - width + 1`` entries.
    """
    count = len(values) - pattern.width + 1
    if count <= 0:
        return np.zeros(0, dtype=bool)
    mask = np.ones(count, dtype=bool)
    for offset, value in pattern.constraints():
        i = offset + pattern.k
        mask &= values[i : i + count] == value
    return mask


def match_pattern(
    segment: SieveSegment,
    pattern: SignPattern,
    which: str = "lambda",
    window: tuple[int, int] | None = None,
) -> np.ndarray:
    """All n in ``window`` (default: every n whose pattern fits) matching the pattern.

    Only n > k are returned. The segment must cover [lo - k, hi + l].
    """
    pattern.check_source(which)
    if segment.length < pattern.width:
        raise ParameterError(
            f"segment of length {segment.length} narrower than pattern width {pattern.width}"
        )

    first = segment.start + pattern.k
    last = segment.stop - 1 - pattern.l
    if window is None:
        lo, hi = first, last
    else:
        lo, hi = window
        if lo < first or hi > last:
            raise ParameterError(
                f"window [{lo}, {hi}] plus pattern width not covered by "
                f"segment [{segment.start}, {segment.stop})"
            )
    lo = max(lo, pattern.k + 1)
    if hi < lo:
        return np.empty(0, dtype=np.int64)

    values = source_values(segment, which)
    a = lo - pattern.k - segment.start
    b = hi + pattern.l - segment.start + 1
    mask = match_mask(values[a:b], pattern)
    return np.flatnonzero(mask).astype(np.int64) + lo


def naive_match(values: dict[int, int], pattern: SignPattern, n: int) -> bool:
    """Scalar reference matcher over a dict n -> value."""
    if n <= pattern.k:
        return False
    return all(values[n + off] == v for off, v in pattern.constraints())
