import math
import random
from fractions import Fraction

import pytest

from fsdim import (Alphabet, DigitSequence, ProbabilityVector, SparseStochasticCertificate,
                   block_distribution_as_code_vector, build_banded_worst_case,
                   certificate_bound_bits, compose_certificates, delta_exact,
                   gen_champernowne, gen_rational_expansion, integer_multiple_certificate,
                   majorizes, reverse_certificate, shannon_entropy, validate_certificate)

from oracles import dispersion_m_bruteforce

F = Fraction


def vec(*entries):
    return ProbabilityVector(tuple(F(e) for e in entries))


def random_vector(rng, n):
    d = rng.randint(1, 64)
    cuts = sorted(rng.sample(range(d + n - 1), n - 1)) if n > 1 else []
    parts, prev = [], -1
    for c in cuts:
        parts.append(c - prev - 1)
        prev = c
    parts.append(d + n - 2 - prev if n > 1 else d)
    return ProbabilityVector(tuple(F(x, d) for x in parts))


class TestProbabilityVector:
    def test_validates(self):
        vec(F(1, 2), F(1, 2))
        with pytest.raises(ValueError):
            vec(F(1, 2), F(1, 3))
        with pytest.raises(ValueError):
            vec(F(3, 2), F(-1, 2))


class TestValidateCertificate:
    def test_identity_on_any_vector(self):
        pi = vec(F(2, 3), F(1, 3))
        ident = SparseStochasticCertificate(2, {(0, 0): F(1), (1, 1): F(1)}, 1)
        assert validate_certificate(ident, pi, pi).ok

    def test_permutation_gives_zero_bound(self):
        pi = vec(F(2, 3), F(1, 3))
        mu = vec(F(1, 3), F(2, 3))
        perm = SparseStochasticCertificate(2, {(1, 0): F(1), (0, 1): F(1)}, 1)
        out = validate_certificate(perm, pi, mu)
        assert out.ok  # certifies dispersion 0 although pi != mu

    def test_reports_first_violation(self):
        pi = vec(F(1, 2), F(1, 2))
        bad = SparseStochasticCertificate(2, {(0, 0): F(1, 2), (0, 1): F(1)}, 2)
        out = validate_certificate(bad, pi, pi)
        assert not out.ok and out.violation == "stochastic-columns"

        not_marginal = SparseStochasticCertificate(2, {(0, 0): F(1), (0, 1): F(1)}, 2)
        out = validate_certificate(not_marginal, pi, vec(F(1, 2), F(1, 2)))
        assert not out.ok and out.violation == "marginal-map"

        overfull = SparseStochasticCertificate(
            2, {(0, 0): F(1, 2), (1, 0): F(1, 2), (0, 1): F(1, 2), (1, 1): F(1, 2)}, 1)
        out = validate_certificate(overfull, pi, pi)
        assert not out.ok and out.violation == "support-bound"


class TestDeltaExact:
    def test_identity_is_zero(self):
        pi = vec(F(1, 2), F(1, 4), F(1, 4))
        res = delta_exact(pi, pi)
        assert res.m_star == 1 and res.delta_bits == 0.0
        assert res.method == "exact-search"

    def test_point_to_uniform(self):
        res = delta_exact(vec(1, 0), vec(F(1, 2), F(1, 2)))
        assert res.m_star == 2 and res.delta_bits == 1.0

    def test_three_dim_example(self):
        res = delta_exact(vec(F(1, 2), F(1, 2), 0), vec(F(1, 2), F(1, 4), F(1, 4)))
        assert res.m_star == 2 and res.delta_bits == 1.0

    def test_witness_always_validates(self):
        rng = random.Random(100)
        for i in range(60):
            n = 2 + i % 3
            pi, mu = random_vector(rng, n), random_vector(rng, n)
            res = delta_exact(pi, mu)
            out = validate_certificate(res.witness, pi, mu)
            assert out.ok, out.detail
            assert res.witness.max_support() <= res.witness.declared_m

    def test_matches_bruteforce_oracle(self):
        rng = random.Random(200)
        for i in range(25):
            n = 2 + i % 2  # oracle is exponential; keep it tiny
            pi, mu = random_vector(rng, n), random_vector(rng, n)
            res = delta_exact(pi, mu)
            expected = dispersion_m_bruteforce([pi[j] for j in range(n)],
                                               [mu[i2] for i2 in range(n)])
            assert res.m_star == expected, (pi.p, mu.p)

    def test_matches_bruteforce_oracle_n4(self):
        rng = random.Random(300)
        for _ in range(3):
            pi, mu = random_vector(rng, 4), random_vector(rng, 4)
            res = delta_exact(pi, mu)
            expected = dispersion_m_bruteforce([pi[j] for j in range(4)],
                                               [mu[i] for i in range(4)])
            assert res.m_star == expected

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            delta_exact(vec(*([F(1, 7)] * 7)), vec(*([F(1, 7)] * 7)), n_cap=6)

    def test_budget_fallback_is_flagged_upper_bound(self):
        pi = vec(F(1, 6), F(1, 6), F(1, 6), F(1, 6), F(1, 6), F(1, 6))
        mu = vec(F(1, 2), F(1, 10), F(1, 10), F(1, 10), F(1, 10), F(1, 10))
        res = delta_exact(pi, mu, n_cap=6, time_budget=1e-9)
        assert res.method == "certificate-upper-bound"
        assert validate_certificate(res.witness, pi, mu).ok
        exact = delta_exact(pi, mu, n_cap=6, time_budget=30.0)
        assert exact.method == "exact-search"
        assert exact.m_star <= res.m_star


class TestPseudometricAxioms:
    def test_axioms_on_random_small_vectors(self):
        rng = random.Random(400)
        for i in range(40):
            n = 2 + i % 3
            pi, mu, nu = (random_vector(rng, n) for _ in range(3))
            d_pm = delta_exact(pi, mu).m_star
            d_mp = delta_exact(mu, pi).m_star
            d_mn = delta_exact(mu, nu).m_star
            d_pn = delta_exact(pi, nu).m_star
            assert d_pm == d_mp
            assert d_pn <= d_pm * d_mn
            assert delta_exact(pi, pi).m_star == 1

    def test_contractivity_on_random_small_vectors(self):
        rng = random.Random(500)
        for i in range(40):
            n = 2 + i % 3
            pi, mu = random_vector(rng, n), random_vector(rng, n)
            res = delta_exact(pi, mu)
            assert abs(shannon_entropy(pi) - shannon_entropy(mu)) <= res.delta_bits + 2 ** -30

    def test_point_mass_versus_uniform_is_tight(self):
        pi = vec(1, 0)
        mu = vec(F(1, 2), F(1, 2))
        res = delta_exact(pi, mu)
        assert res.delta_bits == 1.0
        assert abs(shannon_entropy(pi) - shannon_entropy(mu)) == 1.0


class TestReverseCertificate:
    def test_identity_reverses_to_identity(self):
        pi = vec(F(1, 2), F(1, 2))
        ident = SparseStochasticCertificate(2, {(0, 0): F(1), (1, 1): F(1)}, 1)
        rev = reverse_certificate(ident, pi, pi)
        assert rev.entries == {(0, 0): F(1), (1, 1): F(1)}

    def test_worked_example(self):
        pi = vec(F(1, 2), F(1, 2))
        mu = vec(1, 0)
        cert = SparseStochasticCertificate(2, {(0, 0): F(1, 2), (1, 0): F(1, 2), (1, 1): F(1)}, 2)
        assert validate_certificate(cert, mu, pi).ok
        rev = reverse_certificate(cert, mu, pi)
        assert rev.entries == {(0, 0): F(1), (0, 1): F(1)}
        assert validate_certificate(rev, pi, mu).ok

    def test_sparsity_preserved_on_random_witnesses(self):
        rng = random.Random(600)
        for i in range(30):
            n = 2 + i % 3
            pi, mu = random_vector(rng, n), random_vector(rng, n)
            res = delta_exact(mu, pi)  # witness maps mu -> pi
            rev = reverse_certificate(res.witness, mu, pi)
            assert validate_certificate(rev, pi, mu).ok
            assert rev.max_support() <= res.witness.declared_m

    def test_rejects_invalid_input(self):
        pi = vec(F(1, 2), F(1, 2))
        bad = SparseStochasticCertificate(2, {(0, 0): F(1, 2), (1, 1): F(1)}, 1)
        with pytest.raises(ValueError):
            reverse_certificate(bad, pi, pi)


class TestComposeCertificates:
    def test_identity_composition(self):
        pi = vec(F(1, 3), F(2, 3))
        ident = SparseStochasticCertificate(2, {(0, 0): F(1), (1, 1): F(1)}, 1)
        comp = compose_certificates(ident, ident, pi, pi, pi)
        assert comp.declared_m == 1
        assert validate_certificate(comp, pi, pi).ok

    def test_permutations_compose_to_permutation(self):
        pi = vec(F(1, 2), F(1, 3), F(1, 6))
        swap01 = SparseStochasticCertificate(3, {(1, 0): F(1), (0, 1): F(1), (2, 2): F(1)}, 1)
        mu = vec(F(1, 3), F(1, 2), F(1, 6))
        swap12 = SparseStochasticCertificate(3, {(0, 0): F(1), (2, 1): F(1), (1, 2): F(1)}, 1)
        nu = vec(F(1, 3), F(1, 6), F(1, 2))
        comp = compose_certificates(swap12, swap01, pi, mu, nu)
        assert comp.declared_m == 1
        assert validate_certificate(comp, pi, nu).ok

    def test_random_composition_validates_with_product_bound(self):
        rng = random.Random(700)
        for i in range(20):
            n = 2 + i % 3
            pi, mu, nu = (random_vector(rng, n) for _ in range(3))
            r1 = delta_exact(pi, mu)
            r2 = delta_exact(mu, nu)
            comp = compose_certificates(r2.witness, r1.witness, pi, mu, nu)
            assert validate_certificate(comp, pi, nu).ok
            assert comp.max_support() <= r1.m_star * r2.m_star


class TestBandedWorstCase:
    def test_shape_n4_m2(self):
        banded = build_banded_worst_case(4, 2)
        assert sorted(banded.entries) == [(0, 0), (0, 1), (1, 2), (1, 3)]

    def test_block_sums(self):
        banded = build_banded_worst_case(4, 2)
        out = banded.apply([F(2, 5), F(3, 10), F(1, 5), F(1, 10)])
        assert out == {0: F(7, 10), 1: F(3, 10)}

    def test_m1_is_identity(self):
        banded = build_banded_worst_case(3, 1)
        assert sorted(banded.entries) == [(0, 0), (1, 1), (2, 2)]

    def test_majorization_chain_on_random_pairs(self):
        # the spread of the sorted source majorizes the sorted image, and
        # entropies fall accordingly, for every exact-solver witness
        rng = random.Random(800)
        for i in range(30):
            n = 2 + i % 3
            pi, mu = random_vector(rng, n), random_vector(rng, n)
            res = delta_exact(pi, mu)
            banded = build_banded_worst_case(n, res.m_star)
            spread = banded.apply(sorted(pi.p, reverse=True))
            r_vec = tuple(spread.get(i2, F(0)) for i2 in range(n))
            assert majorizes(r_vec, mu.p)
            assert shannon_entropy(ProbabilityVector(r_vec)) <= shannon_entropy(mu) + 2 ** -30
            assert shannon_entropy(pi) <= shannon_entropy(ProbabilityVector(r_vec)) \
                + math.log2(res.m_star) + 2 ** -30


class TestMajorizes:
    def test_examples(self):
        assert majorizes([F(1), F(0)], [F(1, 2), F(1, 2)])
        assert not majorizes([F(1, 2), F(1, 2)], [F(3, 5), F(2, 5)])
        assert majorizes([F(1, 3), F(1, 3), F(1, 3)], [F(1, 3), F(1, 3), F(1, 3)])

    def test_sorts_internally(self):
        assert majorizes([F(0), F(1)], [F(1, 2), F(1, 2)])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            majorizes([F(1)], [F(1, 2), F(1, 2)])

    def test_unequal_totals(self):
        assert not majorizes([F(1, 2), F(1, 4)], [F(1, 2), F(1, 2)])


class TestIntegerMultipleCertificate:
    def test_point_mass_stream(self):
        seq = gen_rational_expansion(F(1, 3), Alphabet(10), 300)
        cert, da, db = integer_multiple_certificate(seq, 2, 1, 100)
        assert da.counts == {bytes([3]): 100}
        assert db.counts == {bytes([6]): 100}
        assert cert.entries == {(6, 3): F(1)}
        assert 3 not in cert.identity_columns and 6 in cert.identity_columns

    def test_identity_multiplier_is_subpermutation(self):
        seq = gen_champernowne(Alphabet(2), 1000)
        cert, da, db = integer_multiple_certificate(seq, 1, 3, 200)
        assert da.counts == db.counts
        rows, cols = cert.support_counts()
        assert max(rows.values()) == 1 and max(cols.values()) == 1
        assert certificate_bound_bits(1, 2, 3) == 1.0  # log2(1*(1+1)*1)

    def test_champernowne_supports_within_bounds(self):
        seq = gen_champernowne(Alphabet(2), 4300)
        cert, da, db = integer_multiple_certificate(seq, 3, 4, 1000)
        outcome = validate_certificate(cert,
                                       block_distribution_as_code_vector(da),
                                       block_distribution_as_code_vector(db))
        assert outcome.ok
        rows, cols = cert.support_counts()
        assert max(cols.values()) <= 9   # (s+1)*m = 3*3
        assert max(rows.values()) <= 9   # g*(s+1)*m with g = gcd(3, 16) = 1

    def test_entropy_gap_within_bound_and_constant_in_l_and_n(self):
        seq = gen_champernowne(Alphabet(2), 9000)
        bounds = set()
        for l in (1, 2, 3):
            bound = certificate_bound_bits(5, 2, l)
            assert bound <= math.log2(5 * 5 * (2 + 1))  # log2(m^2 (s+1))
            bounds.add(round(bound, 12))
            for n in (500, 1500):
                cert, da, db = integer_multiple_certificate(seq, 5, l, n)
                gap = abs(shannon_entropy(da) - shannon_entropy(db))
                assert gap <= bound + 2 ** -30
        assert len(bounds) == 1  # gcd(5, 2^l) = 1 for every l: bound constant

    def test_precomputed_product_matches(self):
        from fsdim import mul_int_mod1
        seq = gen_champernowne(Alphabet(10), 2000)
        product = mul_int_mod1(seq, 7, 1500)
        c1, da1, db1 = integer_multiple_certificate(seq, 7, 2, 700)
        c2, da2, db2 = integer_multiple_certificate(seq, 7, 2, 700,
                                                    product_digits=product.digits)
        assert c1.entries == c2.entries
        assert da1.counts == da2.counts and db1.counts == db2.counts


def test_certificate_soundness_bounds_exact_solution():
    # any validating certificate upper-bounds the exact least m: check on
    # solver witnesses, their reversals, and compositions
    rng = random.Random(900)
    for i in range(20):
        n = 2 + i % 3
        pi, mu, nu = (random_vector(rng, n) for _ in range(3))
        direct = delta_exact(pi, mu)
        assert direct.m_star <= direct.witness.declared_m
        rev_input = delta_exact(mu, pi)
        rev = reverse_certificate(rev_input.witness, mu, pi)
        assert validate_certificate(rev, pi, mu).ok
        assert direct.m_star <= rev.declared_m
        comp = compose_certificates(delta_exact(mu, nu).witness, direct.witness,
                                    pi, mu, nu)
        assert validate_certificate(comp, pi, nu).ok
        assert delta_exact(pi, nu).m_star <= comp.declared_m


def test_certificate_json_roundtrip():
    import json
    from fsdim import certificate_from_json_dict, certificate_to_json_dict
    seq = gen_champernowne(Alphabet(2), 2000)
    cert, da, db = integer_multiple_certificate(seq, 3, 3, 600)
    data = json.loads(json.dumps(certificate_to_json_dict(cert)))
    back = certificate_from_json_dict(data)
    assert back.n == cert.n and back.declared_m == cert.declared_m
    assert back.entries == cert.entries
    assert back.identity_columns == cert.identity_columns
    assert validate_certificate(back,
                                block_distribution_as_code_vector(da),
                                block_distribution_as_code_vector(db)).ok
