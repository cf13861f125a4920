"""End-to-end verification harness with structured, reproducible reports.

Three kinds of finite-scale evidence are produced for the dimension
preservation results:

* exact certificate inequalities: for every integer-multiplication leg of
  the q+alpha / q*alpha reduction chain, the coupling certificate between
  block statistics bounds the entropy difference by log2(g*(s+1)*m) bits,
  capped by log2(m^2 (s+1)) independently of block and prefix length;
* bounded estimate gaps: dimension estimates of alpha and its images agree
  within an empirically pinned tolerance at fixed grid scale;
* axiom suites: pseudometric axioms and entropy contractivity of the exact
  dispersion solver on seeded random rational vectors, including the banded
  worst-case majorization chain.

Reports serialize to JSON deterministically: same seed and inputs give
byte-identical output (timing is kept out of the canonical form).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .blockstats import (dim_estimates, entropy_rate_grid, normality_deviation,
                         shannon_entropy)
from .digitseq import Alphabet, DigitSequence, gen_champernowne, gen_dilution, select_progression
from .dispersion import (ProbabilityVector, block_distribution_as_code_vector,
                         build_banded_worst_case, certificate_bound_bits,
                         compose_certificates, delta_exact, integer_multiple_certificate,
                         majorizes, reverse_certificate, validate_certificate)
from .realarith import (UnresolvedCarryError, add_rational_mod1, mul_int_mod1,
                        mul_rational_mod1, _multiplier_shape)

ENTROPY_SLACK = 2.0 ** -30


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


@dataclass
class VerificationReport:
    """Structured result of one verification scenario.

    `records` carries the per-cell or per-sample checks, `details` the
    scenario-level numbers, and `violations` one message per failed check.
    `elapsed_seconds` is informational and excluded from canonical JSON so
    reruns with the same inputs serialize identically.
    """

    scenario: str
    inputs: Dict
    records: List[Dict] = field(default_factory=list)
    details: Dict = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    passes: bool = True
    elapsed_seconds: Optional[float] = None

    def to_dict(self, include_timing: bool = False) -> Dict:
        out = {
            "scenario": self.scenario,
            "inputs": _jsonable(self.inputs),
            "records": _jsonable(self.records),
            "details": _jsonable(self.details),
            "violations": list(self.violations),
            "passes": self.passes,
        }
        if include_timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)


def _default_schedule(total_digits: int, max_block_len: int, points: int = 5) -> List[int]:
    top = max(1, total_digits // max_block_len)
    schedule = sorted({max(1, top // 2 ** i) for i in range(points)})
    return schedule


def _certificate_records(leg: str, seq: DigitSequence, m: int, max_block_len: int,
                         n_schedule: Sequence[int], lookahead_cap: int):
    """Certificate checks for one multiplication leg over the (l, n) grid."""
    k = seq.alphabet.k
    records = []
    violations = []
    skipped = []
    _, _, s = _multiplier_shape(m, k)
    # one multiplication covers every (l, n) cell of this leg
    avail = seq.length_available
    max_digits = max(n * l for l in range(1, max_block_len + 1) for n in n_schedule)
    max_digits = int(min(max_digits, avail)) if avail != math.inf else max_digits
    product = mul_int_mod1(seq, m, max_digits, lookahead_cap)
    for l in range(1, max_block_len + 1):
        g = math.gcd(m, k ** l)
        bound = certificate_bound_bits(m, k, l)
        for n in n_schedule:
            if n * l > seq.length_available or n * l > product.certified_count:
                skipped.append({"leg": leg, "l": l, "n": n,
                                "reason": "insufficient certified digits"})
                continue
            try:
                cert, dist_a, dist_b = integer_multiple_certificate(
                    seq, m, l, n, lookahead_cap, product_digits=product.digits)
            except UnresolvedCarryError as exc:
                skipped.append({"leg": leg, "l": l, "n": n, "reason": str(exc)})
                continue
            outcome = validate_certificate(cert,
                                           block_distribution_as_code_vector(dist_a),
                                           block_distribution_as_code_vector(dist_b))
            rows, cols = cert.support_counts()
            col_support = max(cols.values(), default=0)
            row_support = max(rows.values(), default=0)
            h_a = shannon_entropy(dist_a)
            h_b = shannon_entropy(dist_b)
            delta_h = abs(h_a - h_b)
            ok = (outcome.ok and delta_h <= bound + ENTROPY_SLACK
                  and col_support <= (s + 1) * m and row_support <= g * (s + 1) * m)
            records.append({
                "leg": leg, "m": m, "l": l, "n": n,
                "h_source": h_a, "h_image": h_b, "delta_h": delta_h,
                "bound_bits": bound,
                "col_support": col_support, "col_bound": (s + 1) * m,
                "row_support": row_support, "row_bound": g * (s + 1) * m,
                "valid": outcome.ok, "passed": ok,
            })
            if not ok:
                detail = outcome.detail if not outcome.ok else f"|dH|={delta_h} > {bound}"
                violations.append(f"{leg} l={l} n={n}: {detail}")
    return records, violations, skipped


def verify_rational_arithmetic(seq_alpha: DigitSequence, q, max_block_len: int,
                               n_schedule: Sequence[int], tail_fraction: float = 0.5,
                               lookahead_cap: int = 4096,
                               normality_w_len: int = 3) -> VerificationReport:
    """Finite-scale check that q+alpha and q*alpha carry alpha's dimension.

    Computes both derived digit streams, builds coupling certificates for
    every integer-multiplication leg of the reduction chain (alpha -> |a|*alpha
    and q*alpha -> |a|*alpha for multiplication; alpha -> b*alpha and
    (q+alpha) -> b*alpha for addition, with q = a/b), and reports dimension
    estimates, estimate gaps, and normality deviations for all streams.
    Unresolved carries shorten the usable prefix and are reported rather
    than fatal.
    """
    start = time.monotonic()
    q = Fraction(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    a, b = q.numerator, q.denominator
    k = seq_alpha.alphabet.k
    schedule = sorted(set(int(n) for n in n_schedule))
    # derived streams get guard digits beyond the largest grid cell so the
    # certificate multiplications have lookahead room at the tail
    target = max_block_len * schedule[-1] + 256
    avail = seq_alpha.length_available
    if avail != math.inf:
        target = min(target, int(avail))

    sum_result = add_rational_mod1(seq_alpha, q, target, lookahead_cap)
    prod_result = mul_rational_mod1(seq_alpha, q, target, lookahead_cap)

    report = VerificationReport(
        scenario="rational-arithmetic-preservation",
        inputs={"k": k, "q": q, "max_block_len": max_block_len,
                "n_schedule": schedule, "tail_fraction": tail_fraction,
                "digits_used": target},
    )
    if sum_result.unresolved:
        report.details["sum_certified"] = sum_result.certified_count
    if prod_result.unresolved:
        report.details["product_certified"] = prod_result.certified_count

    legs = [
        ("alpha-times-|a|", seq_alpha, abs(a)),
        ("q-alpha-times-b", prod_result.digits, b),
        ("alpha-times-b", seq_alpha, b),
        ("q-plus-alpha-times-b", sum_result.digits, b),
    ]
    skipped_cells = []
    for leg, stream, m in legs:
        records, violations, skipped = _certificate_records(leg, stream, m, max_block_len,
                                                            schedule, lookahead_cap)
        report.records.extend(records)
        report.violations.extend(violations)
        skipped_cells.extend(skipped)
    if skipped_cells:
        report.details["skipped_cells"] = skipped_cells

    streams = {"alpha": seq_alpha, "q-alpha": prod_result.digits, "q-plus-alpha": sum_result.digits}
    estimates = {}
    for name, stream in streams.items():
        grid = entropy_rate_grid(stream, max_block_len, schedule)
        lo, hi = dim_estimates(grid, tail_fraction)
        estimates[name] = {"lower": lo, "upper": hi, "clipped": grid.clipped}
    report.details["estimates"] = estimates
    report.details["estimate_gaps"] = {
        name: {"lower": abs(estimates["alpha"]["lower"] - estimates[name]["lower"]),
               "upper": abs(estimates["alpha"]["upper"] - estimates[name]["upper"])}
        for name in ("q-alpha", "q-plus-alpha")
    }

    norm_n = min(10_000, target - normality_w_len)
    if norm_n >= 1:
        report.details["normality_deviation"] = {
            name: float(normality_deviation(stream, normality_w_len, norm_n))
            for name, stream in streams.items()
        }

    if b == 1 and a >= 1:
        # integer shifts leave the fractional digits untouched
        n_cmp = sum_result.certified_count
        identical = sum_result.digits.prefix(n_cmp) == seq_alpha.prefix(n_cmp)
        report.details["sum_digits_identical"] = identical
        if not identical:
            report.violations.append("integer addition changed fractional digits")

    report.passes = not report.violations
    report.elapsed_seconds = time.monotonic() - start
    return report


def verify_dilution_counterexample(total_digits: int, max_block_len: int = 8,
                                   n_schedule: Optional[Sequence[int]] = None,
                                   tail_fraction: float = 0.5,
                                   diluted_band: Tuple[float, float] = (0.40, 0.65),
                                   dense_floor: float = 0.80) -> VerificationReport:
    """Selection along arithmetic progressions does not preserve dimension.

    Interleaving a normal binary sequence with zeros halves its dimension at
    desk scale, while the two progression selections of the interleaving
    recover the normal sequence and the zero sequence: one estimate stays
    high, the other is exactly zero, so neither matches the interleaved
    sequence's own estimate.
    """
    if total_digits < 2 ** 12:
        raise ValueError("need at least 2^12 digits for a meaningful run")
    start = time.monotonic()
    alphabet = Alphabet(2)
    half = (total_digits + 1) // 2
    source = gen_champernowne(alphabet, half)
    diluted = gen_dilution(source, total_digits)
    zeros = DigitSequence(alphabet, bytes(total_digits))
    sel_even = select_progression(diluted, 0, 2, half)
    sel_odd = select_progression(diluted, 1, 2, total_digits // 2)
    schedule = list(n_schedule) if n_schedule else _default_schedule(total_digits, max_block_len)

    report = VerificationReport(
        scenario="dilution-counterexample",
        inputs={"k": 2, "total_digits": total_digits, "max_block_len": max_block_len,
                "n_schedule": schedule, "tail_fraction": tail_fraction,
                "diluted_band": list(diluted_band), "dense_floor": dense_floor},
    )
    streams = {"source": source, "diluted": diluted, "zeros": zeros,
               "selection-even": sel_even, "selection-odd": sel_odd}
    estimates = {}
    for name, stream in streams.items():
        grid = entropy_rate_grid(stream, max_block_len, schedule)
        lo, hi = dim_estimates(grid, tail_fraction)
        estimates[name] = {"lower": lo, "upper": hi}
        report.records.append({"stream": name, "lower": lo, "upper": hi})
    report.details["estimates"] = estimates

    lo_band, hi_band = diluted_band
    checks = [
        ("zeros estimates exactly (0, 0)",
         estimates["zeros"]["lower"] == 0.0 and estimates["zeros"]["upper"] == 0.0),
        (f"diluted estimates within [{lo_band}, {hi_band}]",
         lo_band <= estimates["diluted"]["lower"] and estimates["diluted"]["upper"] <= hi_band),
        (f"even selection estimates >= {dense_floor}",
         estimates["selection-even"]["lower"] >= dense_floor),
        ("odd selection estimates exactly (0, 0)",
         estimates["selection-odd"]["lower"] == 0.0 and estimates["selection-odd"]["upper"] == 0.0),
    ]
    for label, ok in checks:
        if not ok:
            report.violations.append(label)
    report.passes = not report.violations
    report.elapsed_seconds = time.monotonic() - start
    return report


def _random_rational_vector(rng: random.Random, n: int) -> ProbabilityVector:
    # denominator <= 64; uniform weak composition via stars and bars
    d = rng.randint(1, 64)
    if n == 1:
        parts = [d]
    else:
        cuts = sorted(rng.sample(range(d + n - 1), n - 1))
        parts = []
        prev = -1
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(d + n - 2 - prev)
    return ProbabilityVector(tuple(Fraction(x, d) for x in parts))


def _sample_triples(sample_count: int, n_max: int, seed: int):
    """Seeded (pi, mu, nu) triples cycling dimensions 2..n_max.

    Every tenth mu is a shuffle of pi, so zero-dispersion pairs with unequal
    vectors are always exercised.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rng = random.Random(seed)
    triples = []
    for i in range(sample_count):
        n = 2 + i % (n_max - 1)
        pi = _random_rational_vector(rng, n)
        if i % 10 == 9:
            perm = list(pi.p)
            rng.shuffle(perm)
            mu = ProbabilityVector(tuple(perm))
        else:
            mu = _random_rational_vector(rng, n)
        nu = _random_rational_vector(rng, n)
        triples.append((n, pi, mu, nu))
    return triples


class _DeltaCache:
    def __init__(self, n_cap: int, time_budget: float):
        self.n_cap = n_cap
        self.time_budget = time_budget
        self._cache = {}

    def __call__(self, pi: ProbabilityVector, mu: ProbabilityVector):
        key = (pi.p, mu.p)
        if key not in self._cache:
            self._cache[key] = delta_exact(pi, mu, self.n_cap, self.time_budget)
        return self._cache[key]


def verify_pseudometric_suite(sample_count: int = 200, n_max: int = 4, seed: int = 0,
                              n_cap: int = 6, time_budget: float = 10.0) -> VerificationReport:
    """Pseudometric axioms of the exact dispersion on seeded random triples.

    Checks nonnegativity, identity, symmetry, and the triangle inequality
    (in exact integer form m13 <= m12 * m23), and re-validates the reversal
    and composition constructions on the solver witnesses.
    """
    start = time.monotonic()
    report = VerificationReport(
        scenario="pseudometric-suite",
        inputs={"sample_count": sample_count, "n_max": n_max, "seed": seed},
    )
    solve = _DeltaCache(n_cap, time_budget)
    for idx, (n, pi, mu, nu) in enumerate(_sample_triples(sample_count, n_max, seed)):
        results = {
            "identity": solve(pi, pi),
            "pi_mu": solve(pi, mu),
            "mu_pi": solve(mu, pi),
            "mu_nu": solve(mu, nu),
            "pi_nu": solve(pi, nu),
        }
        for name, res in results.items():
            if res.method != "exact-search":
                report.violations.append(f"triple {idx}: {name} hit the budget")
        checks = [
            ("nonnegativity", all(r.m_star >= 1 for r in results.values())),
            ("identity", results["identity"].m_star == 1),
            ("symmetry", results["pi_mu"].m_star == results["mu_pi"].m_star),
            ("triangle", results["pi_nu"].m_star
             <= results["pi_mu"].m_star * results["mu_nu"].m_star),
        ]
        try:
            rev = reverse_certificate(results["mu_pi"].witness, mu, pi)
            checks.append(("reverse-validates", validate_certificate(rev, pi, mu).ok))
            comp = compose_certificates(results["mu_nu"].witness,
                                        results["pi_mu"].witness, pi, mu, nu)
            checks.append(("compose-validates", validate_certificate(comp, pi, nu).ok))
        except (ValueError, AssertionError) as exc:
            checks.append((f"construction-error: {exc}", False))
        failed = [label for label, ok in checks if not ok]
        report.records.append({
            "triple": idx, "n": n,
            "m": {name: res.m_star for name, res in results.items()},
            "failed": failed,
        })
        for label in failed:
            report.violations.append(f"triple {idx} (n={n}): {label}")
    report.details["triples_checked"] = sample_count
    report.passes = not report.violations
    report.elapsed_seconds = time.monotonic() - start
    return report


def verify_contractivity_suite(sample_count: int = 200, n_max: int = 4, seed: int = 0,
                               n_cap: int = 6, time_budget: float = 10.0) -> VerificationReport:
    """Entropy contractivity and the banded worst-case chain, same pairs.

    For each seeded pair: |H(pi) - H(mu)| <= log2(m*); and with B the banded
    matrix for m*, r = B * (pi sorted descending) majorizes mu sorted
    descending, H(r) <= H(mu), and H(pi) <= H(r) + log2(m*).
    """
    start = time.monotonic()
    report = VerificationReport(
        scenario="contractivity-suite",
        inputs={"sample_count": sample_count, "n_max": n_max, "seed": seed},
    )
    solve = _DeltaCache(n_cap, time_budget)
    for idx, (n, pi, mu, _nu) in enumerate(_sample_triples(sample_count, n_max, seed)):
        res = solve(pi, mu)
        if res.method != "exact-search":
            report.violations.append(f"pair {idx}: solver hit the budget")
        m = res.m_star
        delta_bits = res.delta_bits
        h_pi = shannon_entropy(pi)
        h_mu = shannon_entropy(mu)

        pi_sorted = sorted(pi.p, reverse=True)
        banded = build_banded_worst_case(n, m)
        spread = banded.apply(list(pi_sorted))
        r_vec = tuple(spread.get(i, Fraction(0)) for i in range(n))
        h_r = shannon_entropy(ProbabilityVector(r_vec))

        checks = [
            ("contractive", abs(h_pi - h_mu) <= delta_bits + ENTROPY_SLACK),
            ("banded-majorizes", majorizes(r_vec, mu.p)),
            ("H(r) <= H(mu)", h_r <= h_mu + ENTROPY_SLACK),
            ("H(pi) <= H(r) + log2(m)", h_pi <= h_r + math.log2(m) + ENTROPY_SLACK),
        ]
        failed = [label for label, ok in checks if not ok]
        report.records.append({
            "pair": idx, "n": n, "m": m,
            "h_pi": h_pi, "h_mu": h_mu, "h_spread": h_r,
            "failed": failed,
        })
        for label in failed:
            report.violations.append(f"pair {idx} (n={n}): {label}")
    report.details["pairs_checked"] = sample_count
    report.passes = not report.violations
    report.elapsed_seconds = time.monotonic() - start
    return report
