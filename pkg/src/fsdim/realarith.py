"""Certified exact arithmetic on fractional digit streams.

Operations map the digit stream of a real alpha in [0, 1) to certified digits
of frac(m*alpha), frac(alpha/b), frac(q+alpha), frac(|q|*alpha) and so on.
Certification works by exact rational interval enclosure: an N-digit prefix
pins alpha inside [P/k^N, (P+1)/k^N]; the affine image of that interval is
computed exactly and digits are emitted only where both endpoints agree.
The lookahead N grows geometrically until the digits resolve or a cap is
reached.  Streams carrying an exact rational value skip the enclosure and
emit digits by exact long division, which also resolves results that sit
exactly on k-adic points (undetectable from any finite stream prefix).

The carry/advice decomposition shows why multiplication by a positive
integer m is a finite-state-friendly operation: each output block is a
function of the matching input block, a carry bounded by the digit sum of m,
and the next floor(log_k m) incoming digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from .digitseq import (Alphabet, DigitSequence, InsufficientDigitsError,
                       digits_to_int, int_to_digits)

DEFAULT_LOOKAHEAD_CAP = 4096


class UnresolvedCarryError(RuntimeError):
    """A trailing carry could not be resolved within the lookahead cap."""


@dataclass
class CertifiedDigitResult:
    """Digits of an arithmetic result together with their certification.

    The first `certified_count` digits of `digits` are exactly the digits of
    the true result (terminating expansion preferred).  `unresolved` is set
    when the enclosure still straddles a k-adic boundary at the lookahead
    cap, in which case fewer digits than requested are certified.
    """

    digits: DigitSequence
    certified_count: int
    lookahead_used: int
    unresolved: bool


@dataclass
class TraceEntry:
    j: int
    block: bytes       # j-th l-block of the input stream
    carry: int         # bounded by the base-k digit sum of the multiplier
    shift_in: bytes    # next floor(log_k m) digits entering from the right
    out_block: bytes   # j-th l-block of the product stream


@dataclass
class CarryAdviceTrace:
    """Per-block carry/advice decomposition of multiplication by m."""

    m: int
    l: int
    r: int  # floor(log_k m): digits shifted in from the right per block
    s: int  # base-k digit sum of m: inclusive upper bound for every carry
    entries: List[TraceEntry]


def _rational_prefix_digits(value: Fraction, k: int, count: int) -> bytearray:
    # canonical (terminating) expansion: digits of floor(value * k^count)
    assert 0 <= value < 1
    return int_to_digits((value.numerator * k ** count) // value.denominator, k, count)


def _certified_affine(seq: DigitSequence, coef: Fraction, offset: Fraction,
                      count: int, lookahead_cap: int) -> CertifiedDigitResult:
    """Certified digits of frac(coef * alpha + offset) for the stream's alpha."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if coef == 0:
        raise ValueError("coefficient must be nonzero")
    if lookahead_cap < 1:
        raise ValueError("lookahead_cap must be positive")
    k = seq.alphabet.k

    if seq.exact_value is not None:
        value = coef * seq.exact_value + offset
        frac_part = value - math.floor(value)
        digits = _rational_prefix_digits(frac_part, k, count)
        out = DigitSequence(seq.alphabet, digits, exact_value=frac_part)
        return CertifiedDigitResult(out, count, 0, False)

    kc = k ** count
    avail = seq.length_available
    max_read = min(count + lookahead_cap, avail if avail != math.inf else count + lookahead_cap)
    max_read = int(max_read)
    guard = 8
    while True:
        n_read = min(count + guard, max_read)
        prefix_value = seq.prefix_int(n_read)
        scale = k ** n_read
        e1 = coef * Fraction(prefix_value, scale) + offset
        e2 = coef * Fraction(prefix_value + 1, scale) + offset
        lo, hi = (e1, e2) if coef > 0 else (e2, e1)
        a = math.floor(lo * kc)
        b = math.floor(hi * kc)
        if a == b:
            digits = int_to_digits(a % kc, k, count)
            return CertifiedDigitResult(DigitSequence(seq.alphabet, digits),
                                        count, n_read - count, False)
        if n_read >= max_read:
            certified = _common_prefix_len(a, b, k, count)
            value = (a // k ** (count - certified)) % (k ** certified)
            digits = int_to_digits(value, k, certified)
            return CertifiedDigitResult(DigitSequence(seq.alphabet, digits),
                                        certified, n_read - count, True)
        guard *= 2


def _common_prefix_len(a: int, b: int, k: int, count: int) -> int:
    # largest t <= count with a // k^(count-t) == b // k^(count-t);
    # the predicate is monotone in t so binary search applies
    lo, hi = 0, count
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a // k ** (count - mid) == b // k ** (count - mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def mul_int_mod1(seq: DigitSequence, m: int, count: int,
                 lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CertifiedDigitResult:
    """Certified digits of frac(m * alpha) for a positive integer m."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return _certified_affine(seq, Fraction(m), Fraction(0), count, lookahead_cap)


def div_int(seq: DigitSequence, b: int, count: int,
            lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CertifiedDigitResult:
    """Certified digits of alpha / b for a positive integer b."""
    if b < 1:
        raise ValueError("b must be a positive integer")
    return _certified_affine(seq, Fraction(1, b), Fraction(0), count, lookahead_cap)


def add_rational_mod1(seq: DigitSequence, q, count: int,
                      lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CertifiedDigitResult:
    """Certified digits of frac(q + alpha); q is any nonzero rational."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    return _certified_affine(seq, Fraction(1), q, count, lookahead_cap)


def mul_rational_mod1(seq: DigitSequence, q, count: int,
                      lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CertifiedDigitResult:
    """Certified digits of frac(|q| * alpha) for nonzero rational q.

    Sign is dropped up front (negation preserves all the block statistics of
    interest), and numerator and denominator act on a single enclosure
    rather than as two lossy digit-stream passes.
    """
    q = Fraction(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    return _certified_affine(seq, abs(q), Fraction(0), count, lookahead_cap)


def negate_mod1(seq: DigitSequence, count: int,
                lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CertifiedDigitResult:
    """Certified digits of frac(-alpha)."""
    return _certified_affine(seq, Fraction(-1), Fraction(0), count, lookahead_cap)


def _multiplier_shape(m: int, k: int):
    # r = floor(log_k m), base-k digits of m (least significant first), digit sum
    r = 0
    while k ** (r + 1) <= m:
        r += 1
    m_digits = [(m // k ** i) % k for i in range(r + 1)]
    return r, m_digits, sum(m_digits)


def block_image(x, c: int, z, m: int, alphabet: Alphabet) -> bytes:
    """Output block of multiplication by m from (input block, carry, shift-in).

    For an l-digit block x with integer value v, carry c, and the next r
    digits z entering from the right, the product stream's matching block is
    the l-digit numeral of (m*v + c + sum_i m_i * (z[0] + z[1]*k + ... +
    z[i-1]*k^(i-1))) mod k^l, where m = sum_i m_i k^i in base k.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    k = alphabet.k
    x = _coerce_block(alphabet, x)
    z = _coerce_block(alphabet, z)
    r, m_digits, s = _multiplier_shape(m, k)
    if len(z) != r:
        raise ValueError(f"shift-in must have length {r}, got {len(z)}")
    if not 0 <= c <= s:
        raise ValueError(f"carry {c} outside [0, {s}]")
    l = len(x)
    if l < 1:
        raise ValueError("block must be nonempty")
    shift = 0
    for i in range(r + 1):
        inner = 0
        for t in range(i):
            inner += z[t] * k ** t
        shift += m_digits[i] * inner
    value = (m * digits_to_int(x, k) + c + shift) % (k ** l)
    return bytes(int_to_digits(value, k, l))


def _coerce_block(alphabet: Alphabet, w) -> bytes:
    if isinstance(w, str):
        return bytes(alphabet.char_digit(ch) for ch in w)
    return bytes(w)


def carry_advice_trace(seq: DigitSequence, m: int, l: int, n_blocks: int,
                       lookahead_cap: int = DEFAULT_LOOKAHEAD_CAP) -> CarryAdviceTrace:
    """Exact per-block carries, shift-in digits, and output blocks under *m.

    The carry after block j is floor(k^((j+1)l) * tau_j) where tau_j sums the
    tails of the m_i-weighted shifted copies of alpha beyond that block; it
    always lies in [0, s].  For streams with an exact rational value the
    carries are computed by modular arithmetic; otherwise they are certified
    from a finite window, growing up to the lookahead cap.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if l < 1 or n_blocks < 1:
        raise ValueError("need l >= 1 and n_blocks >= 1")
    k = seq.alphabet.k
    r, m_digits, s = _multiplier_shape(m, k)
    need = n_blocks * l + r
    if need > seq.length_available:
        raise InsufficientDigitsError(
            f"trace of {n_blocks} blocks needs {need} digits, "
            f"only {seq.length_available} available")
    text = seq.prefix(need)

    entries = []
    for j in range(n_blocks):
        block = text[j * l:(j + 1) * l]
        shift_in = text[(j + 1) * l:(j + 1) * l + r]
        carry = _carry_after(seq, m_digits, (j + 1) * l, lookahead_cap)
        if not 0 <= carry <= s:
            raise AssertionError(f"carry {carry} escaped [0, {s}] at block {j}")
        out = block_image(block, carry, shift_in, m, seq.alphabet)
        entries.append(TraceEntry(j, bytes(block), carry, bytes(shift_in), out))
    return CarryAdviceTrace(m, l, r, s, entries)


def _carry_after(seq: DigitSequence, m_digits: List[int], position: int,
                 lookahead_cap: int) -> int:
    """floor of the scaled tail sum sum_i m_i * k^i * (alpha - trunc_(pos+i))."""
    k = seq.alphabet.k
    if seq.exact_value is not None:
        num, den = seq.exact_value.numerator, seq.exact_value.denominator
        # tail of the i-shifted copy after `position` digits is
        # (k^(position+i) * alpha mod 1) = (k^(position+i)*num mod den)/den
        total = sum(mi * ((pow(k, position + i, den) * num) % den)
                    for i, mi in enumerate(m_digits))
        return total // den
    m = sum(mi * k ** i for i, mi in enumerate(m_digits))
    r = len(m_digits) - 1
    avail = seq.length_available
    max_read = min(position + r + lookahead_cap,
                   avail if avail != math.inf else position + r + lookahead_cap)
    max_read = int(max_read)
    window = 16
    while True:
        n_read = max(min(position + r + window, max_read), position + r)
        text = seq.prefix(n_read)
        lo = Fraction(0)
        width = Fraction(0)
        for i, mi in enumerate(m_digits):
            if mi == 0:
                continue
            tail_digits = text[position + i:n_read]
            lo += mi * Fraction(digits_to_int(tail_digits, k), k ** len(tail_digits))
            width += mi * Fraction(1, k ** len(tail_digits))
        c_lo = math.floor(lo)
        c_hi = math.floor(lo + width)
        if c_lo == c_hi:
            return c_lo
        if n_read >= max_read:
            raise UnresolvedCarryError(
                f"carry at position {position} unresolved after {n_read - position} digits")
        window *= 2
