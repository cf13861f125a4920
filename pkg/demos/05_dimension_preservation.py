"""End-to-end: rational arithmetic preserves dimension, selection does not.

Two finite-scale verification scenarios:

* For q = a/b, the streams of alpha, q+alpha, q*alpha are tied together by
  integer-multiplication legs (alpha -> |a| alpha, q alpha -> |a| alpha, and
  the addition chain through b(q+alpha)).  Each leg carries a coupling
  certificate between block statistics whose sparsity bounds the entropy
  difference by log2(g(s+1)m) bits, a constant in block length, which is
  exactly why the dimensions agree in the limit.

* Interleaving a normal sequence with zeros drops its dimension estimate to
  about one half, while selecting the even or odd positions recovers
  dimension ~1 and exactly 0: selection along progressions does not
  preserve dimension.

Run:  python demos/05_dimension_preservation.py  (about half a minute)
"""

from fractions import Fraction

from fsdim import (Alphabet, gen_champernowne, verify_contractivity_suite,
                   verify_dilution_counterexample, verify_pseudometric_suite,
                   verify_rational_arithmetic)

champ10 = gen_champernowne(Alphabet(10), 40_000)
report = verify_rational_arithmetic(champ10, Fraction(1, 3), 4, [1000, 3000, 6000])
print("== q = 1/3 on Champernowne base 10 ==")
print("certificate records:", len(report.records), " all pass:", report.passes)
worst = max(report.records, key=lambda rec: rec["delta_h"])
print(f"largest entropy gap {worst['delta_h']:.4f} bits vs bound {worst['bound_bits']:.2f}"
      f" (leg {worst['leg']}, l={worst['l']}, n={worst['n']})")
estimates = report.details["estimates"]
for name, est in estimates.items():
    print(f"  {name:13s} dim estimates ({est['lower']:.4f}, {est['upper']:.4f})")

print()
print("== dilution counterexample ==")
report = verify_dilution_counterexample(2 ** 16)
for record in report.records:
    print(f"  {record['stream']:14s} ({record['lower']:.4f}, {record['upper']:.4f})")
print("passes:", report.passes)

print()
print("== dispersion axiom suites (seeded) ==")
pseudo = verify_pseudometric_suite(sample_count=60, n_max=4, seed=1)
contract = verify_contractivity_suite(sample_count=60, n_max=4, seed=1)
print("pseudometric violations  :", len(pseudo.violations))
print("contractivity violations :", len(contract.violations))
