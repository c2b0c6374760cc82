import random
from fractions import Fraction

import pytest

from contactkit.errors import VariantError
from contactkit.scalars import QC


def test_construction_and_parts():
    q = QC(Fraction(1, 2), -3)
    assert q.re == Fraction(1, 2)
    assert q.im == Fraction(-3)
    assert QC("2/7").re == Fraction(2, 7)


def test_float_parts_rejected():
    with pytest.raises(VariantError):
        QC(0.5)
    with pytest.raises(VariantError):
        QC(0, 1.25)


def test_mixed_arithmetic_rejected():
    q = QC(1, 1)
    with pytest.raises(VariantError):
        q + 0.5
    with pytest.raises(VariantError):
        q * (1 + 2j)


def test_field_axioms_random():
    rng = random.Random(11)

    def rand():
        return QC(Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
                  Fraction(rng.randint(-20, 20), rng.randint(1, 9)))

    for _ in range(200):
        a, b, c = rand(), rand(), rand()
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        if not a.is_zero:
            assert a * a.inverse() == QC(1)
            assert (b / a) * a == b


def test_conjugation_and_abs2():
    q = QC(3, -4)
    assert q.conj() == QC(3, 4)
    assert q.abs2() == Fraction(25)
    assert q * q.conj() == QC(q.abs2())


def test_integer_powers():
    q = QC(1, 1)
    assert q ** 2 == QC(0, 2)
    assert q ** 0 == QC(1)
    assert q ** -2 == QC(0, 2).inverse()
    with pytest.raises(ZeroDivisionError):
        QC(0).inverse()


def test_complex_conversion():
    assert complex(QC(Fraction(1, 4), -2)) == 0.25 - 2j


def test_part_strings_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        q = QC(Fraction(rng.randint(-999, 999), rng.randint(1, 64)),
               Fraction(rng.randint(-999, 999), rng.randint(1, 64)))
        re, im = q.part_strings()
        assert QC.from_part_strings(re, im) == q


def test_hash_matches_equality():
    assert hash(QC(2, 0)) == hash(QC(Fraction(4, 2), Fraction(0)))
    assert QC(1, 2) != QC(1, 3)
    assert bool(QC(0, 0)) is False
