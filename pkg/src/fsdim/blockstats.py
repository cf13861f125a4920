"""Block frequencies, Shannon entropy, and finite-scale dimension estimates.

The dimension of a digit sequence is approximated on a finite (l, n) grid of
normalized block entropies: for block length l and block count n, the entry is
H(empirical distribution of the first n aligned l-blocks) / (l * log2 k),
always in [0, 1].  Estimates take the infimum over l of a tail window in n,
which mirrors the liminf/limsup structure of the limiting quantities while
staying honest about finite scale.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .digitseq import Alphabet, DigitSequence, InsufficientDigitsError, int_to_digits


@dataclass
class BlockDistribution:
    """Empirical distribution of the first n aligned l-blocks of a sequence.

    counts maps each observed block (raw digit bytes) to its occurrence
    count; counts always sum to exactly n, so the derived probabilities are
    exact rationals summing to 1.
    """

    alphabet: Alphabet
    l: int
    n: int
    counts: Dict[bytes, int]

    def __post_init__(self):
        if self.l < 1 or self.n < 1:
            raise ValueError("block length and block count must be positive")
        total = sum(self.counts.values())
        if total != self.n:
            raise ValueError(f"counts sum to {total}, expected n={self.n}")

    def probability(self, w: bytes) -> Fraction:
        return Fraction(self.counts.get(bytes(w), 0), self.n)

    def probabilities(self) -> Dict[bytes, Fraction]:
        return {w: Fraction(c, self.n) for w, c in self.counts.items()}


def block_frequencies(seq: DigitSequence, l: int, n: int) -> BlockDistribution:
    """Count the first n aligned l-blocks of `seq`.

    Block j is seq[j*l : (j+1)*l]; the distribution needs n*l digits.
    """
    if l < 1 or n < 1:
        raise ValueError("need l >= 1 and n >= 1")
    k = seq.alphabet.k
    digits = seq.prefix_array(n * l)
    if l * math.log2(k) <= 62:
        # encode each block as a base-k integer and count distinct codes
        arr = digits[: n * l].reshape(n, l).astype(np.int64)
        powers = k ** np.arange(l - 1, -1, -1, dtype=np.int64)
        codes = arr @ powers
        values, cnts = np.unique(codes, return_counts=True)
        counts = {bytes(int_to_digits(int(v), k, l)): int(c) for v, c in zip(values, cnts)}
    else:
        raw = bytes(digits)
        counts = Counter(raw[j * l:(j + 1) * l] for j in range(n))
        counts = dict(counts)
    return BlockDistribution(seq.alphabet, l, n, counts)


def _entropy_from_counts(counts: Sequence[int], n: int) -> float:
    # H = sum (c/n) * (log2 n - log2 c); identical counts are grouped so the
    # number of log evaluations is O(sqrt(n)) and fsum keeps the sum exact.
    # The per-group form makes point masses exactly 0.0 and bounds the total
    # rounding error by a few ulps of H, far below the 2^-40 budget.
    if n <= 0:
        raise ValueError("empty distribution")
    groups = Counter(c for c in counts if c > 0)
    if sum(c * mult for c, mult in groups.items()) != n:
        raise ValueError("counts do not sum to n")
    log_n = math.log2(n)
    h = math.fsum((mult * c / n) * (log_n - math.log2(c)) for c, mult in groups.items())
    return max(h, 0.0)


def shannon_entropy(dist) -> float:
    """Shannon entropy in bits, with the 0*log(1/0) = 0 convention.

    Accepts a :class:`BlockDistribution`, anything with exact rational
    entries under a ``p`` attribute, or a bare probability vector
    (fractions or floats).  Probabilities must sum to 1: exactly for exact
    inputs, within 1e-9 for floats.
    """
    if isinstance(dist, BlockDistribution):
        return _entropy_from_counts(list(dist.counts.values()), dist.n)
    probs = list(dist.p) if hasattr(dist, "p") else list(dist)
    if all(isinstance(p, (Fraction, int)) for p in probs):
        total = sum(probs)
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, expected exactly 1")
    else:
        probs = [float(p) for p in probs]
        if abs(math.fsum(probs) - 1.0) > 1e-9:
            raise ValueError("probabilities do not sum to 1")
    if any(p < 0 for p in probs):
        raise ValueError("negative probability")
    return max(math.fsum(-float(p) * math.log2(float(p)) for p in probs if p > 0), 0.0)


@dataclass
class GridEntry:
    l: int
    n: int
    h: float  # normalized block entropy in [0, 1]


@dataclass
class DimensionEstimateGrid:
    """Normalized block entropies over a rectangular (l, n) grid.

    `clipped` flags that some requested cells were dropped because the
    source sequence was too short; the emitted entries always cover the
    largest feasible sub-grid.
    """

    alphabet: Alphabet
    max_block_len: int
    n_schedule: Tuple[int, ...]
    entries: List[GridEntry] = field(default_factory=list)
    clipped: bool = False

    def row(self, l: int) -> List[GridEntry]:
        return [e for e in self.entries if e.l == l]


def entropy_rate_grid(seq: DigitSequence, max_block_len: int,
                      n_schedule: Sequence[int]) -> DimensionEstimateGrid:
    """Normalized block entropy H(pi_l_n) / (l * log2 k) for each grid cell.

    Cells whose n*l digits are unavailable are skipped and the grid is
    flagged clipped instead of failing, so partial sources still produce the
    largest feasible grid.
    """
    if max_block_len < 1:
        raise ValueError("max_block_len must be >= 1")
    schedule = sorted(set(int(n) for n in n_schedule))
    if not schedule or schedule[0] < 1:
        raise ValueError("n_schedule must be nonempty with positive entries")
    k = seq.alphabet.k
    avail = seq.length_available
    grid = DimensionEstimateGrid(seq.alphabet, max_block_len, tuple(schedule))
    for l in range(1, max_block_len + 1):
        denom = l * math.log2(k)
        for n in schedule:
            if n * l > avail:
                grid.clipped = True
                continue
            dist = block_frequencies(seq, l, n)
            h = _entropy_from_counts(list(dist.counts.values()), n) / denom
            grid.entries.append(GridEntry(l, n, min(h, 1.0)))
    if not grid.entries:
        raise InsufficientDigitsError("sequence too short for any grid cell")
    return grid


def dim_estimates(grid: DimensionEstimateGrid, tail_fraction: float = 0.5) -> Tuple[float, float]:
    """Finite-scale (lower, upper) dimension estimates from a grid.

    For each block length the tail window is the last `tail_fraction` of the
    available n values; the lower estimate takes the window minimum and the
    upper estimate the window maximum, then both take the minimum over block
    lengths.  The lower estimate never exceeds the upper one.
    """
    if not grid.entries:
        raise ValueError("empty grid")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    lower = math.inf
    upper = math.inf
    for l in range(1, grid.max_block_len + 1):
        row = sorted(grid.row(l), key=lambda e: e.n)
        if not row:
            continue
        window = max(1, int(len(row) * tail_fraction))
        tail = row[-window:]
        lower = min(lower, min(e.h for e in tail))
        upper = min(upper, max(e.h for e in tail))
    return lower, upper


def sliding_frequency(seq: DigitSequence, w, n: int) -> Fraction:
    """Frequency of `w` at arbitrary offsets among the first n positions.

    Counts offsets i < n with seq[i : i+|w|] == w, divided by n; this is the
    occurrence notion under which normal sequences hit k^(-|w|) in the limit.
    """
    w = _as_block(seq.alphabet, w)
    if len(w) < 1:
        raise ValueError("w must be nonempty")
    if n < 1:
        raise ValueError("n must be positive")
    text = seq.prefix(n + len(w))
    count = 0
    start = text.find(w)
    while 0 <= start < n:
        count += 1
        start = text.find(w, start + 1)
    return Fraction(count, n)


def normality_deviation(seq: DigitSequence, w_max_len: int, n: int) -> Fraction:
    """Worst sliding-frequency deviation max_w |freq(w) - k^(-|w|)|.

    The maximum ranges over every nonempty w of length up to w_max_len;
    blocks that never occur contribute deviation k^(-|w|) exactly.
    """
    if w_max_len < 1:
        raise ValueError("w_max_len must be >= 1")
    k = seq.alphabet.k
    worst = Fraction(0)
    text = seq.prefix(n + w_max_len)
    for l in range(1, w_max_len + 1):
        target = Fraction(1, k ** l)
        counts = Counter(text[i:i + l] for i in range(n))
        for c in counts.values():
            worst = max(worst, abs(Fraction(c, n) - target))
        if len(counts) < k ** l:
            worst = max(worst, target)
    return worst


def _as_block(alphabet: Alphabet, w) -> bytes:
    if isinstance(w, str):
        return bytes(alphabet.char_digit(ch) for ch in w)
    return bytes(w)
