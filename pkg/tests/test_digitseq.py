import math
import random
from fractions import Fraction

import pytest

from fsdim import (Alphabet, DigitFileError, DigitSequence, InsufficientDigitsError,
                   gen_champernowne, gen_dilution, gen_rational_expansion,
                   read_digit_file, select_progression, write_digit_file)
from fsdim.digitseq import digits_to_int, int_to_digits

from oracles import long_division_digits


def test_alphabet_bounds():
    Alphabet(2)
    Alphabet(36)
    with pytest.raises(ValueError):
        Alphabet(1)
    with pytest.raises(ValueError):
        Alphabet(37)


def test_digit_int_conversions_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        k = rng.randint(2, 36)
        width = rng.randint(1, 300)
        v = rng.randrange(k ** width)
        digits = int_to_digits(v, k, width)
        assert len(digits) == width
        assert digits_to_int(digits, k) == v


def test_champernowne_binary_prefix():
    seq = gen_champernowne(Alphabet(2), 25)
    assert seq.prefix_str(25) == "0100011011000001010011100"


def test_champernowne_integer_variant():
    assert gen_champernowne(Alphabet(10), 11, order="integers").prefix_str(11) == "12345678910"
    assert list(gen_champernowne(Alphabet(3), 8, order="integers").prefix(8)) == [1, 2, 1, 0, 1, 1, 1, 2]


def test_champernowne_deterministic_replay():
    a = gen_champernowne(Alphabet(2), 5000)
    b = gen_champernowne(Alphabet(2), 5000)
    assert a.prefix(5000) == b.prefix(5000)
    # reading twice from the same object gives the same digits
    assert a.prefix(1234) == a.prefix(5000)[:1234]


def test_rational_expansion_examples():
    assert list(gen_rational_expansion(Fraction(1, 3), Alphabet(10), 5).prefix(5)) == [3] * 5
    assert list(gen_rational_expansion(Fraction(1, 2), Alphabet(2), 4).prefix(4)) == [1, 0, 0, 0]
    assert list(gen_rational_expansion(Fraction(22, 101), Alphabet(10), 8).prefix(8)) == [2, 1, 7, 8, 2, 1, 7, 8]


def test_rational_expansion_matches_long_division():
    rng = random.Random(11)
    for _ in range(40):
        k = rng.choice([2, 3, 10, 16])
        den = rng.randint(1, 5000)
        num = rng.randrange(den)
        q = Fraction(num, den)
        count = rng.randint(1, 120)
        assert gen_rational_expansion(q, Alphabet(k), count).prefix(count) == \
            long_division_digits(q, k, count)


def test_rational_expansion_reconstructs_value():
    rng = random.Random(12)
    for _ in range(30):
        k = rng.choice([2, 10])
        den = rng.randint(1, 4000)
        q = Fraction(rng.randrange(den), den)
        n = rng.randint(1, 80)
        digits = gen_rational_expansion(q, Alphabet(k), n).prefix(n)
        partial = sum(Fraction(d, k ** (i + 1)) for i, d in enumerate(digits))
        assert partial <= q < partial + Fraction(1, k ** n)


def test_rational_expansion_rejects_out_of_range():
    with pytest.raises(ValueError):
        gen_rational_expansion(Fraction(3, 2), Alphabet(10), 4)
    with pytest.raises(ValueError):
        gen_rational_expansion(Fraction(-1, 2), Alphabet(10), 4)


def test_dilution_examples():
    src = DigitSequence(Alphabet(2), bytes([1, 1, 0]))
    assert list(gen_dilution(src, 6).prefix(6)) == [1, 0, 1, 0, 0, 0]
    zeros = DigitSequence(Alphabet(2), bytes(4))
    assert list(gen_dilution(zeros, 4).prefix(4)) == [0, 0, 0, 0]
    champ = gen_champernowne(Alphabet(2), 5)
    assert list(gen_dilution(champ, 10).prefix(10)) == [0, 0, 1, 0, 0, 0, 0, 0, 0, 0]


def test_dilution_halves_density():
    src = gen_champernowne(Alphabet(2), 600)
    for n in (10, 100, 300):
        diluted = gen_dilution(src, 2 * n)
        assert sum(diluted.prefix(2 * n)) == sum(src.prefix(n))


def test_dilution_insufficient_source():
    src = DigitSequence(Alphabet(2), bytes([1, 0]))
    with pytest.raises(InsufficientDigitsError):
        gen_dilution(src, 10)


def test_select_progression():
    seq = DigitSequence(Alphabet(10), bytes(range(10)))
    assert list(select_progression(seq, 0, 2, 5).prefix(5)) == [0, 2, 4, 6, 8]
    assert list(select_progression(seq, 1, 3, 3).prefix(3)) == [1, 4, 7]


def test_generator_backed_sequence_is_buffered():
    def gen():
        yield from [1, 0, 1, 1, 0]
    seq = DigitSequence(Alphabet(2), generator=gen())
    assert seq.length_available == math.inf
    assert seq.digit(3) == 1
    assert seq.prefix(4) == bytes([1, 0, 1, 1])
    with pytest.raises(InsufficientDigitsError):
        seq.prefix(6)
    assert seq.length_available == 5


@pytest.mark.parametrize("binary", [False, True])
def test_digit_file_roundtrip(tmp_path, binary):
    seq = gen_champernowne(Alphabet(2), 1000)
    path = tmp_path / ("seq.bin" if binary else "seq.txt")
    write_digit_file(seq, 1000, path, binary=binary)
    back = read_digit_file(path)
    assert back.alphabet.k == 2
    assert back.prefix(1000) == seq.prefix(1000)


def test_ascii_digit_file_format(tmp_path):
    path = tmp_path / "digits.txt"
    path.write_text("k=2\n0100\n")
    assert list(read_digit_file(path).prefix(4)) == [0, 1, 0, 0]
    # case-insensitive letters, whitespace ignored
    path.write_text("k=16\n a B\nf\n")
    assert list(read_digit_file(path).prefix(3)) == [10, 11, 15]


def test_digit_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("base=2\n0100\n")
    with pytest.raises(DigitFileError):
        read_digit_file(path)
    path.write_text("k=5\n7\n")
    with pytest.raises(DigitFileError):
        read_digit_file(path)
    binpath = tmp_path / "bad.bin"
    binpath.write_bytes(b"FSD1")  # truncated before the base byte
    with pytest.raises(DigitFileError):
        read_digit_file(binpath)
    binpath.write_bytes(b"FSD1" + bytes([5]) + bytes([7]))  # digit >= base
    with pytest.raises(DigitFileError):
        read_digit_file(binpath)


def test_rational_sequences_carry_exact_value():
    q = Fraction(22, 101)
    seq = gen_rational_expansion(q, Alphabet(10), 50)
    assert seq.exact_value == q
    # a materialized copy keeps it; a bare buffer does not
    assert seq.materialize(10).exact_value == q
    assert DigitSequence(Alphabet(10), seq.prefix(10)).exact_value is None
