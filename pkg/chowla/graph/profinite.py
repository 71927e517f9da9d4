"""Random profinite integers: a residue of n mod p for every prime p <= P,
plus residues mod p² for p <= w.

Each (seed, trial) pair owns independent Philox streams. The residue of the
i-th prime is drawn from position i of the residue stream, so a sample with a
larger P extends the one with a smaller P instead of reshuffling it.
"""

import logging
from dataclasses import dataclass

import numpy as np

from chowla.errors import ParameterError
from chowla.sieve.oracle import factor_oracle
from chowla.sieve.primes import primes_upto
from chowla.sieve.segment import sieve_range

logger = logging.getLogger(__name__)

RESIDUE_STREAM = 0
SQUARE_STREAM = 1
INTEGER_STREAM = 2
WALK_STREAM = 3

MODES = ("profinite", "integer")


def trial_rng(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, stream])))


@dataclass(eq=False)
class ProfiniteSample:
    P: int
    w: int
    primes: np.ndarray
    residues: np.ndarray
    square_residues: np.ndarray
    seed: int | None = None
    trial: int = 0
    n0: int | None = None

    @property
    def mode(self) -> str:
        return "profinite" if self.n0 is None else "integer"

    @property
    def square_primes(self) -> np.ndarray:
        return self.primes[: self.square_residues.size]

    def _index(self, p: int) -> int:
        idx = int(np.searchsorted(self.primes, p))
        if idx >= self.primes.size or self.primes[idx] != p:
            raise ParameterError(f"{p} is not a sampled prime (P = {self.P})")
        return idx

    def residue(self, p: int) -> int:
        """n mod p."""
        return int(self.residues[self._index(p)])

    def square_residue(self, p: int) -> int:
        """n mod p², for p <= w."""
        idx = self._index(p)
        if idx >= self.square_residues.size:
            raise ParameterError(f"no square residue for {p} > w = {self.w}")
        return int(self.square_residues[idx])

    def residues_of(self, ps: np.ndarray) -> np.ndarray:
        """Vectorised residue lookup for an array of sampled primes."""
        idx = np.searchsorted(self.primes, ps)
        if np.any(idx >= self.primes.size) or np.any(self.primes[np.minimum(idx, self.primes.size - 1)] != ps):
            raise ParameterError(f"primes above P = {self.P} requested")
        return self.residues[idx]

    def divides(self, q: int, a: int) -> bool:
        """Whether q | n + a."""
        return (self.residue(q) + a) % q == 0

    def is_vertex(self, a: int) -> bool:
        """μ²(n + a) = 1: the w-truncated condition in profinite mode, the true one for integers."""
        if self.n0 is not None:
            if self.n0 + a < 1:
                raise ParameterError(f"n0 + a = {self.n0 + a} is not a positive integer")
            return factor_oracle(self.n0 + a).is_squarefree
        sq = self.square_primes ** 2
        return bool(np.all((self.square_residues + a) % sq != 0))

    def vertex_mask(self, lo: int, hi: int) -> np.ndarray:
        """Boolean mask over a in [lo, hi] of is_vertex(a)."""
        if hi < lo:
            return np.zeros(0, dtype=bool)
        if self.n0 is not None:
            if self.n0 + lo < 1:
                raise ParameterError(f"window starts at n0 + {lo} < 1")
            return sieve_range(self.n0 + lo, hi - lo + 1).mu_values() != 0
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p, s in zip(self.square_primes.tolist(), self.square_residues.tolist()):
            p2 = p * p
            mask[(-s - lo) % p2 :: p2] = False
        return mask

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "P": self.P,
            "w": self.w,
            "seed": self.seed,
            "trial": self.trial,
            "n0": self.n0,
        }


def _check_bounds(P: int, w: int) -> None:
    if P < 2:
        raise ParameterError(f"P must be >= 2, got {P}")
    if w < 1 or w > P:
        raise ParameterError(f"need 1 <= w <= P, got w = {w}, P = {P}")


def sample_profinite(P: int, w: int, seed: int, trial: int = 0) -> ProfiniteSample:
    """Independent uniform residues mod p for p <= P, lifted mod p² for p <= w."""
    _check_bounds(P, w)
    primes = primes_upto(P)
    u = trial_rng(seed, trial, RESIDUE_STREAM).random(primes.size)
    residues = np.floor(u * primes).astype(np.int64)
    nsq = int(np.searchsorted(primes, w, side="right"))
    small = primes[:nsq]
    lifts = np.floor(trial_rng(seed, trial, SQUARE_STREAM).random(nsq) * small).astype(np.int64)
    square_residues = residues[:nsq] + small * lifts
    logger.debug("Sampled profinite integer P=%d w=%d seed=%d trial=%d", P, w, seed, trial)
    return ProfiniteSample(P, w, primes, residues, square_residues, seed=seed, trial=trial)


def integer_sample(n0: int, P: int, w: int) -> ProfiniteSample:
    """The residues of a concrete integer n0; vertices use true squarefreeness."""
    _check_bounds(P, w)
    if n0 < 1:
        raise ParameterError(f"n0 must be positive, got {n0}")
    primes = primes_upto(P)
    residues = np.array([n0 % p for p in primes.tolist()], dtype=np.int64)
    nsq = int(np.searchsorted(primes, w, side="right"))
    square_residues = np.array([n0 % (p * p) for p in primes[:nsq].tolist()], dtype=np.int64)
    return ProfiniteSample(P, w, primes, residues, square_residues, n0=n0)


def integer_trial(base: int, P: int, w: int, seed: int, trial: int = 0) -> ProfiniteSample:
    """integer_sample at n0 drawn uniformly from [base, 2·base)."""
    if base < 1:
        raise ParameterError(f"base must be positive, got {base}")
    n0 = int(trial_rng(seed, trial, INTEGER_STREAM).integers(base, 2 * base))
    sample = integer_sample(n0, P, w)
    sample.seed, sample.trial = seed, trial
    return sample


def draw_sample(
    mode: str, P: int, w: int, seed: int, trial: int = 0, *, base: int | None = None
) -> ProfiniteSample:
    if mode == "profinite":
        return sample_profinite(P, w, seed, trial)
    if mode == "integer":
        if base is None:
            raise ParameterError("integer mode needs a base for n0")
        return integer_trial(base, P, w, seed, trial)
    raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
