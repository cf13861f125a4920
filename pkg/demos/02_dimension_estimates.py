"""Finite-state dimension estimates from block-entropy grids.

The estimate of a sequence's dimension is built from the normalized Shannon
entropies of its aligned block statistics: for block length l and block
count n, entry(l, n) = H(empirical l-block distribution) / (l log2 k).
The lower/upper estimates take a tail window in n and the minimum over l,
mirroring the liminf/limsup-then-infimum structure of the limit quantities.

Run:  python demos/02_dimension_estimates.py
"""

from fsdim import (Alphabet, DigitSequence, dim_estimates, entropy_rate_grid,
                   gen_champernowne, gen_dilution, normality_deviation)

alphabet = Alphabet(2)
N = 100_000
schedule = [1562, 3125, 6250, 12500]

# A normal sequence estimates near 1.
champ = gen_champernowne(alphabet, N)
grid = entropy_rate_grid(champ, 8, schedule)
print("Champernowne grid row l=8:",
      [(entry.n, round(entry.h, 4)) for entry in grid.row(8)])
print("Champernowne estimates   :", tuple(round(x, 4) for x in dim_estimates(grid)))

# The all-zeros sequence estimates exactly (0, 0) ...
zeros = DigitSequence(alphabet, bytes(N))
print("zeros estimates          :", dim_estimates(entropy_rate_grid(zeros, 8, schedule)))

# ... and so does (01)^inf once blocks of length 2 are in play: a single
# repeating block has entropy zero.
alternating = DigitSequence(alphabet, bytes([0, 1] * (N // 2)))
print("(01)^inf estimates       :", dim_estimates(entropy_rate_grid(alternating, 2, schedule)))

# Interleaving with zeros halves the estimate.
diluted = gen_dilution(champ, N)
print("diluted estimates        :",
      tuple(round(x, 4) for x in dim_estimates(entropy_rate_grid(diluted, 8, schedule))))

# Normality deviation: worst gap between sliding frequencies and the ideal
# k^-|w| over all short strings w. Small for Champernowne, large for zeros.
print("normality deviation champ:", float(normality_deviation(champ, 4, 50_000)))
print("normality deviation zeros:", float(normality_deviation(zeros, 4, 50_000)))
