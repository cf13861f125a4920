"""Logarithmic dispersion between probability vectors, with certificates.

The dispersion between pi and mu is log2 of the least m admitting a
column-stochastic nonnegative matrix A with A*pi = mu and at most m nonzero
entries in every row and column.  Any valid matrix certifies an upper bound;
the exact solver proves minimality by exhausting m-1.

The solver reduces the problem to coupling feasibility: scaling column j of
A by pi(j) turns conditions (i)+(ii) into "nonnegative matrix with column
sums pi and row sums mu" (a transportation plan) whose support degrees match
A's on positive-mass columns.  Every feasible plan has a vertex of its
support polytope whose support is a forest, so it suffices to search acyclic
support structures; values on a forest are forced by leaf peeling, making
feasibility an exact integer check.  Columns with pi(j) = 0 never constrain
feasibility (a single free entry placed in any row with slack keeps the
bound; enough slack always exists), so they are completed greedily.

Everything is exact rational arithmetic; entropies alone are floats.
"""

from __future__ import annotations

import math
import time
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .blockstats import BlockDistribution, block_frequencies
from .digitseq import DigitSequence, digits_to_int
from .realarith import UnresolvedCarryError, mul_int_mod1, _multiplier_shape

# materialized certificates index blocks by integer code; larger block spaces
# would need an implicit-identity representation beyond what callers use
MAX_CERTIFICATE_DIMENSION = 16_777_216


@dataclass(frozen=True)
class ProbabilityVector:
    """Exact rational probability vector: entries >= 0 summing to exactly 1."""

    p: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(Fraction(x) for x in self.p))
        if any(x < 0 for x in self.p):
            raise ValueError("negative probability")
        if sum(self.p) != 1:
            raise ValueError(f"entries sum to {sum(self.p)}, expected exactly 1")

    @property
    def n(self) -> int:
        return len(self.p)

    def __getitem__(self, j: int) -> Fraction:
        return self.p[j]


@dataclass
class SparseStochasticCertificate:
    """Column-stochastic nonnegative matrix in sparse (row, col) -> value form.

    `identity_columns` compactly encodes columns that hold a single 1 on the
    diagonal (used for zero-mass columns of large block-indexed matrices);
    they are disjoint from the columns of explicit entries.  `declared_m`
    is the sparsity bound the certificate claims for every row and column.
    """

    n: int
    entries: Dict[Tuple[int, int], Fraction]
    declared_m: int
    identity_columns: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 1 or self.declared_m < 1:
            raise ValueError("dimension and declared_m must be positive")
        explicit_cols = {j for (_, j) in self.entries}
        if explicit_cols & self.identity_columns:
            raise ValueError("identity columns collide with explicit entries")
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"entry index ({i}, {j}) outside dimension {self.n}")
            if v <= 0:
                raise ValueError(f"entry ({i}, {j}) must be positive, got {v}")
        if self.identity_columns and not (0 <= min(self.identity_columns)
                                          and max(self.identity_columns) < self.n):
            raise ValueError("identity column outside dimension")

    def triples(self) -> Iterable[Tuple[int, int, Fraction]]:
        """All nonzero entries as (row, col, value), identity columns included."""
        one = Fraction(1)
        for (i, j), v in self.entries.items():
            yield i, j, v
        for j in self.identity_columns:
            yield j, j, one

    def explicit_column_sums(self) -> Dict[int, Fraction]:
        """Column sums over explicit entries; identity columns sum to 1."""
        sums: Dict[int, Fraction] = defaultdict(Fraction)
        for (_, j), v in self.entries.items():
            sums[j] += v
        return dict(sums)

    def support_counts(self) -> Tuple[Counter, Counter]:
        rows: Counter = Counter()
        cols: Counter = Counter()
        rows.update(i for (i, _) in self.entries)
        cols.update(j for (_, j) in self.entries)
        if self.identity_columns:
            rows.update(self.identity_columns)
            cols.update(self.identity_columns)
        return rows, cols

    def max_support(self) -> int:
        rows, cols = self.support_counts()
        row_max = max(rows.values(), default=0)
        col_max = max(cols.values(), default=0)
        return max(row_max, col_max)

    def apply(self, pi) -> Dict[int, Fraction]:
        """Sparse product A*pi as {row: value}, zero rows omitted."""
        out: Dict[int, Fraction] = defaultdict(Fraction)
        for (i, j), v in self.entries.items():
            pj = _vec_get(pi, j)
            if pj:
                out[i] += v * pj
        if self.identity_columns:
            if isinstance(pi, dict):
                hits = self.identity_columns & pi.keys()
            else:
                hits = (j for j in self.identity_columns if pi[j])
            for j in hits:
                pj = _vec_get(pi, j)
                if pj:
                    out[j] += pj
        return {i: v for i, v in out.items() if v != 0}


@dataclass
class ValidationOutcome:
    ok: bool
    violation: Optional[str] = None  # "stochastic-columns" | "marginal-map" | "support-bound"
    detail: str = ""


@dataclass
class DispersionResult:
    m_star: int
    delta_bits: float
    witness: SparseStochasticCertificate
    method: str  # "exact-search" | "certificate-upper-bound"


_ZERO = Fraction(0)


def _vec_get(vec, j: int) -> Fraction:
    if isinstance(vec, dict):
        return vec.get(j, _ZERO)
    return vec[j] if isinstance(vec, ProbabilityVector) else Fraction(vec[j])


def _vec_items(vec, n: int):
    if isinstance(vec, dict):
        return vec.items()
    return ((j, Fraction(vec[j])) for j in range(n))


def validate_certificate(cert: SparseStochasticCertificate, pi, mu) -> ValidationOutcome:
    """Check conditions (i) columns stochastic, (ii) A*pi = mu, (iii) sparsity.

    `pi` and `mu` may be :class:`ProbabilityVector` or sparse {index: value}
    dicts (missing indices are zero).  A passing outcome certifies
    dispersion(pi, mu) <= log2(declared_m).  The first violated condition is
    reported; structurally malformed certificates raise instead.
    """
    n = cert.n
    for vec in (pi, mu):
        if not isinstance(vec, dict) and len(vec.p if hasattr(vec, "p") else vec) != n:
            raise ValueError("vector dimension does not match certificate")

    sums = cert.explicit_column_sums()
    # identity columns sum to 1 by construction and are disjoint from
    # explicit columns, so coverage is a counting argument
    if len(sums) + len(cert.identity_columns) != n:
        covered = set(sums) | cert.identity_columns
        missing = next(j for j in range(n) if j not in covered)
        return ValidationOutcome(False, "stochastic-columns",
                                 f"column {missing} has no entries")
    for j, total in sums.items():
        if total != 1:
            return ValidationOutcome(False, "stochastic-columns",
                                     f"column {j} sums to {total}")

    product = cert.apply(pi)
    target = {j: v for j, v in _vec_items(mu, n) if v != 0}
    if product != target:
        bad = next(iter(set(product) ^ set(target)), None)
        if bad is None:
            bad = next(i for i in product if product[i] != target[i])
        return ValidationOutcome(False, "marginal-map",
                                 f"(A*pi)[{bad}] = {product.get(bad, 0)} != {target.get(bad, 0)}")

    rows, cols = cert.support_counts()
    for i, c in rows.items():
        if c > cert.declared_m:
            return ValidationOutcome(False, "support-bound",
                                     f"row {i} has {c} > {cert.declared_m} entries")
    for j, c in cols.items():
        if c > cert.declared_m:
            return ValidationOutcome(False, "support-bound",
                                     f"column {j} has {c} > {cert.declared_m} entries")
    return ValidationOutcome(True)


class _BudgetExceeded(Exception):
    pass


def _coupling_with_degree_bound(col_mass: List[int], row_mass: List[int], m: int,
                                deadline: Optional[float]) -> Optional[Dict[Tuple[int, int], int]]:
    """A coupling of positive integer masses with support degrees <= m, or None.

    Runs leaf peeling forward: every support forest can be built by
    repeatedly picking an edge (col j, row i) carrying the smaller
    endpoint's full remaining mass, which closes that endpoint (both on a
    tie: a tied partner with other positive edges is impossible in a
    support forest).  Depth-first search over those moves with per-node
    degree budgets is therefore complete.  Failures memoize on the
    canonical state (sorted multisets of open (mass, remaining degree)
    profiles) and branching collapses nodes with identical profiles, which
    keeps dimension-6 instances tractable.
    """
    open_cols = {j: (col_mass[j], m) for j in range(len(col_mass))}
    open_rows = {i: (row_mass[i], m) for i in range(len(row_mass))}
    edges: Dict[Tuple[int, int], int] = {}
    failed: set = set()

    def canonical():
        return (tuple(sorted(open_cols.values())), tuple(sorted(open_rows.values())))

    def rec() -> bool:
        if deadline is not None and time.monotonic() > deadline:
            raise _BudgetExceeded
        if not open_cols and not open_rows:
            return True
        if not open_cols or not open_rows:
            return False  # leftover mass with no partners
        # a node that may take no more edges but still has mass is stuck
        if any(d == 0 for (_, d) in open_cols.values()) or \
           any(d == 0 for (_, d) in open_rows.values()):
            return False
        key = canonical()
        if key in failed:
            return False
        # branch on one representative per (mass, degrees-left) profile
        col_reps = {}
        for j, prof in open_cols.items():
            col_reps.setdefault(prof, j)
        row_reps = {}
        for i, prof in open_rows.items():
            row_reps.setdefault(prof, i)
        for (cmass, cdeg), j in col_reps.items():
            for (rmass, rdeg), i in row_reps.items():
                flow = min(cmass, rmass)
                edges[(j, i)] = flow
                del open_cols[j]
                del open_rows[i]
                if cmass > rmass:
                    open_cols[j] = (cmass - flow, cdeg - 1)
                elif rmass > cmass:
                    open_rows[i] = (rmass - flow, rdeg - 1)
                if rec():
                    return True
                open_cols[j] = (cmass, cdeg)
                open_rows[i] = (rmass, rdeg)
                del edges[(j, i)]
        failed.add(key)
        return False

    if rec():
        return dict(edges)
    return None


def _staircase_coupling(col_mass: List[int], row_mass: List[int]) -> Dict[Tuple[int, int], int]:
    """Northwest-corner transportation plan; always feasible, support acyclic."""
    coupling: Dict[Tuple[int, int], int] = {}
    rc, rr = list(col_mass), list(row_mass)
    ci = ri = 0
    while ci < len(rc) and ri < len(rr):
        f = min(rc[ci], rr[ri])
        if f > 0:
            coupling[(ci, ri)] = f
        rc[ci] -= f
        rr[ri] -= f
        if rc[ci] == 0:
            ci += 1
        if ri < len(rr) and rr[ri] == 0:
            ri += 1
    return coupling


def _certificate_from_coupling(coupling: Dict[Tuple[int, int], int], scale: int,
                               pi: ProbabilityVector, declared_m: Optional[int]) -> SparseStochasticCertificate:
    """Turn an integer coupling (column j -> row i flows over `scale`) into A.

    Columns with positive mass get a_ij = b_ij / pi(j); zero-mass columns
    each get a single 1 in a row with minimal current support.
    """
    n = pi.n
    entries: Dict[Tuple[int, int], Fraction] = {}
    for (j, i), flow in coupling.items():
        if flow:
            entries[(i, j)] = Fraction(flow, pi[j].numerator * (scale // pi[j].denominator))
    row_support = Counter(i for (i, _) in entries)
    for j in range(n):
        if pi[j] == 0:
            target = min(range(n), key=lambda i: row_support[i])
            entries[(target, j)] = Fraction(1)
            row_support[target] += 1
    if declared_m is None:
        rows = Counter(i for (i, _) in entries)
        cols = Counter(j for (_, j) in entries)
        declared_m = max(max(rows.values()), max(cols.values()))
    return SparseStochasticCertificate(n, entries, declared_m)


def delta_exact(pi, mu, n_cap: int = 6, time_budget: float = 10.0) -> DispersionResult:
    """Exact log-dispersion with a validating witness.

    Searches m = 1, 2, ... for a coupling with support degrees <= m; the
    first hit gives delta = log2(m) with the derived matrix as witness.
    m = n is always feasible (the product coupling), so the search ends.
    If the time budget runs out first, the northwest-corner staircase gives
    an upper-bound certificate and the result is flagged accordingly.
    """
    pi = pi if isinstance(pi, ProbabilityVector) else ProbabilityVector(tuple(pi))
    mu = mu if isinstance(mu, ProbabilityVector) else ProbabilityVector(tuple(mu))
    if pi.n != mu.n:
        raise ValueError(f"dimension mismatch: {pi.n} vs {mu.n}")
    n = pi.n
    if n > n_cap:
        raise ValueError(f"dimension {n} exceeds exact-solver cap {n_cap}")
    deadline = time.monotonic() + time_budget if time_budget else None

    scale = math.lcm(*(x.denominator for x in pi.p), *(x.denominator for x in mu.p))
    cols_pos = [j for j in range(n) if pi[j] > 0]
    rows_pos = [i for i in range(n) if mu[i] > 0]
    col_mass = [int(pi[j] * scale) for j in cols_pos]
    row_mass = [int(mu[i] * scale) for i in rows_pos]

    for m in range(1, n + 1):
        if m == n:
            # the product coupling b_ij = mu_i * pi_j always works; reaching
            # this branch means no sparser coupling exists, so its support
            # degree equals n
            flows = {(j, i): col_mass[j] * row_mass[i]
                     for j in range(len(cols_pos)) for i in range(len(rows_pos))}
            coupling = {(cols_pos[j], rows_pos[i]): f for (j, i), f in flows.items()}
            witness = _certificate_from_coupling(coupling, scale * scale, pi, None)
            witness.declared_m = max(witness.declared_m, witness.max_support())
            outcome = validate_certificate(witness, pi, mu)
            if not outcome.ok:
                raise AssertionError(f"solver produced invalid witness: {outcome.detail}")
            return DispersionResult(m, math.log2(m), witness, "exact-search")
        try:
            flows = _coupling_with_degree_bound(col_mass, row_mass, m, deadline)
        except _BudgetExceeded:
            coupling = {(cols_pos[j], rows_pos[i]): f
                        for (j, i), f in _staircase_coupling(col_mass, row_mass).items()}
            witness = _certificate_from_coupling(coupling, scale, pi, None)
            m_ub = witness.max_support()
            witness.declared_m = m_ub
            return DispersionResult(m_ub, math.log2(m_ub), witness, "certificate-upper-bound")
        if flows is not None:
            coupling = {(cols_pos[j], rows_pos[i]): f for (j, i), f in flows.items()}
            witness = _certificate_from_coupling(coupling, scale, pi, m)
            outcome = validate_certificate(witness, pi, mu)
            if not outcome.ok:
                raise AssertionError(f"solver produced invalid witness: {outcome.detail}")
            return DispersionResult(m, math.log2(m), witness, "exact-search")
    raise AssertionError("unreachable: m = n is always feasible")


def reverse_certificate(cert: SparseStochasticCertificate, mu, pi) -> SparseStochasticCertificate:
    """Certificate for (pi -> mu) from one for (mu -> pi), same sparsity bound.

    Entries transpose with reweighting: a'_ij = a_ji * mu(i) / pi(j) where
    pi(j) > 0, and a'_ij = a_ji / (row j sum of A) where pi(j) = 0.  A
    zero row of A (possible only when pi(j) = 0) leaves column j of A'
    empty; it is completed with a single 1 in a row with slack, which always
    exists within the bound.
    """
    outcome = validate_certificate(cert, mu, pi)
    if not outcome.ok:
        raise ValueError(f"input certificate invalid: {outcome.violation} ({outcome.detail})")
    n = cert.n
    row_sums: Dict[int, Fraction] = defaultdict(Fraction)
    for i, j, v in cert.triples():
        row_sums[i] += v
    entries: Dict[Tuple[int, int], Fraction] = {}
    for i, j, v in cert.triples():
        # A entry a_ij contributes to A' entry a'_{ji}
        pj = _vec_get(pi, i)
        w = v * _vec_get(mu, j) / pj if pj > 0 else v / row_sums[i]
        if w != 0:
            entries[(j, i)] = entries.get((j, i), Fraction(0)) + w
    covered = {j for (_, j) in entries}
    row_support = Counter(i for (i, _) in entries)
    for j in range(n):
        if j not in covered:
            target = min(range(n), key=lambda i: row_support[i])
            entries[(target, j)] = Fraction(1)
            row_support[target] += 1
    reversed_cert = SparseStochasticCertificate(n, entries, cert.declared_m)
    check = validate_certificate(reversed_cert, pi, mu)
    if not check.ok:
        raise AssertionError(f"reversed certificate invalid: {check.detail}")
    return reversed_cert


def compose_certificates(outer: SparseStochasticCertificate, inner: SparseStochasticCertificate,
                         pi, mu, nu) -> SparseStochasticCertificate:
    """Matrix product outer*inner as a certificate pi -> nu, bound m1*m2.

    `inner` must validate pi -> mu and `outer` mu -> nu; the product's
    support can be smaller than the declared m1*m2 but never larger.
    """
    if inner.n != outer.n:
        raise ValueError("inner dimension mismatch")
    for cert, src, dst, name in ((inner, pi, mu, "inner"), (outer, mu, nu, "outer")):
        outcome = validate_certificate(cert, src, dst)
        if not outcome.ok:
            raise ValueError(f"{name} certificate invalid: {outcome.violation} ({outcome.detail})")
    by_col: Dict[int, List[Tuple[int, Fraction]]] = defaultdict(list)
    for i, j, v in outer.triples():
        by_col[j].append((i, v))
    entries: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for t, j, v1 in inner.triples():
        for i, v2 in by_col.get(t, ()):
            entries[(i, j)] += v2 * v1
    entries = {key: v for key, v in entries.items() if v != 0}
    product = SparseStochasticCertificate(inner.n, entries,
                                          inner.declared_m * outer.declared_m)
    check = validate_certificate(product, pi, nu)
    if not check.ok:
        raise AssertionError(f"composed certificate invalid: {check.detail}")
    return product


def build_banded_worst_case(n: int, m: int) -> SparseStochasticCertificate:
    """The banded 0/1 matrix spreading mass as unevenly as m-sparsity allows.

    Row i (0-based) holds 1s in columns i*m .. min((i+1)m, n)-1: applied to a
    nonincreasing vector it concentrates mass fastest among all matrices with
    at most m nonzero entries per row and column, which is what makes it the
    extremal case in the entropy-contractivity argument.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    one = Fraction(1)
    entries = {}
    for i in range(n):
        for j in range(i * m, min((i + 1) * m, n)):
            entries[(i, j)] = one
    return SparseStochasticCertificate(n, entries, m)


def majorizes(x, y) -> bool:
    """True iff sorted-descending x weakly dominates y with equal totals."""
    xs = sorted((Fraction(v) for v in x), reverse=True)
    ys = sorted((Fraction(v) for v in y), reverse=True)
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if sum(xs) != sum(ys):
        return False
    total_x = Fraction(0)
    total_y = Fraction(0)
    for a, b in zip(xs, ys):
        total_x += a
        total_y += b
        if total_x < total_y:
            return False
    return True


def certificate_bound_bits(m: int, k: int, l: int) -> float:
    """log2(g*(s+1)*m) with g = gcd(m, k^l) and s the base-k digit sum of m."""
    _, _, s = _multiplier_shape(m, k)
    g = math.gcd(m, k ** l)
    return math.log2(g * (s + 1) * m)


def certificate_to_json_dict(cert: SparseStochasticCertificate) -> Dict:
    """JSON-ready form: sparse [row, col, "num/den"] triplets.

    Identity columns are listed separately to keep block-indexed
    certificates compact.
    """
    return {
        "n": cert.n,
        "declared_m": cert.declared_m,
        "entries": [[i, j, f"{v.numerator}/{v.denominator}"]
                    for (i, j), v in sorted(cert.entries.items())],
        "identity_columns": sorted(cert.identity_columns),
    }


def certificate_from_json_dict(data: Dict) -> SparseStochasticCertificate:
    entries = {(int(i), int(j)): Fraction(v) for i, j, v in data["entries"]}
    return SparseStochasticCertificate(
        int(data["n"]), entries, int(data["declared_m"]),
        frozenset(int(j) for j in data.get("identity_columns", ())))


def block_distribution_as_code_vector(dist: BlockDistribution) -> Dict[int, Fraction]:
    """Sparse {block code: probability} view of a block distribution."""
    k = dist.alphabet.k
    return {digits_to_int(w, k): Fraction(c, dist.n) for w, c in dist.counts.items()}


def integer_multiple_certificate(seq: DigitSequence, m: int, l: int, n: int,
                                 lookahead_cap: int = 4096,
                                 product_digits: Optional[DigitSequence] = None):
    """Coupling certificate between block statistics of alpha and m*alpha.

    Builds the k^l x k^l matrix whose column x distributes the observed
    l-blocks of alpha equal to x over the aligned blocks of frac(m*alpha)
    they produce: a_{y,x} = #{j < n : block_j(alpha) = x, block_j(m*alpha) = y}
    / #{j < n : block_j(alpha) = x}, with identity columns where x never
    occurs.  The result is stochastic, maps the block distribution of alpha
    exactly onto that of m*alpha, and has column support at most (s+1)*m and
    row support at most g*(s+1)*m for g = gcd(m, k^l), so it certifies a
    dispersion bound independent of l and n.

    `product_digits` may pass a precomputed certified stream of frac(m*alpha)
    covering at least n*l digits, saving the multiplication when many (l, n)
    cells are built from one stream.

    Returns (certificate, block distribution of alpha, of m*alpha).
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if l < 1 or n < 1:
        raise ValueError("need l >= 1 and n >= 1")
    k = seq.alphabet.k
    dimension = k ** l
    if dimension > MAX_CERTIFICATE_DIMENSION:
        raise ValueError(f"block space k^l = {dimension} too large to materialize")

    dist_alpha = block_frequencies(seq, l, n)
    if product_digits is None:
        product = mul_int_mod1(seq, m, n * l, lookahead_cap)
        if product.certified_count < n * l:
            raise UnresolvedCarryError(
                f"only {product.certified_count} of {n * l} product digits certified")
        product_digits = product.digits
    elif product_digits.length_available < n * l:
        raise UnresolvedCarryError(
            f"precomputed product covers {product_digits.length_available} "
            f"of {n * l} digits")
    dist_product = block_frequencies(product_digits, l, n)

    src = seq.prefix(n * l)
    dst = product_digits.prefix(n * l)
    pair_counts: Counter = Counter()
    for j in range(n):
        pair_counts[(src[j * l:(j + 1) * l], dst[j * l:(j + 1) * l])] += 1

    entries: Dict[Tuple[int, int], Fraction] = {}
    for (x, y), cnt in pair_counts.items():
        x_code = digits_to_int(x, k)
        y_code = digits_to_int(y, k)
        entries[(y_code, x_code)] = Fraction(cnt, dist_alpha.counts[x])

    observed = {digits_to_int(x, k) for x in dist_alpha.counts}
    identity_cols = frozenset(set(range(dimension)) - observed)

    _, _, s = _multiplier_shape(m, k)
    g = math.gcd(m, dimension)
    declared = min(g * (s + 1) * m, dimension)
    cert = SparseStochasticCertificate(dimension, entries, declared, identity_cols)
    return cert, dist_alpha, dist_product
