import random
from fractions import Fraction

import pytest

from aligned_xai.core import ConstantOne, FeatureSubset
from aligned_xai.generators import random_bits, random_perceptron, random_subset
from aligned_xai.linear import (
    Perceptron,
    perceptron_constant_one,
    perceptron_contrastive_check,
    perceptron_indicator,
    perceptron_min_change_misaligned,
    perceptron_negate,
    perceptron_sufficiency_check,
    to_fraction,
)

from helpers import bv, cube, fs, naive_contrastive, naive_minimum, naive_sufficient, truth


def test_evaluate_examples():
    assert Perceptron((1, -1), 0).evaluate(bv("11")) == 0
    assert Perceptron((3, -2, 1), -1).evaluate(bv("111")) == 1
    p = Perceptron((1, 1, -1, 1, -1), Fraction(-5, 2))
    assert p.evaluate(bv("11010")) == 1
    assert p.evaluate(bv("11011")) == 0


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        Perceptron((0.5,), 0)


def test_negate_examples():
    g = perceptron_negate(Perceptron((1, -1), 0))
    assert g.weights == (-1, 1) and g.bias == Fraction(1, 2)
    assert truth(g, 2) == [1 - v for v in truth(Perceptron((1, -1), 0), 2)]
    g = perceptron_negate(Perceptron((Fraction(1, 2),), 0))
    assert g.evaluate(bv("1")) == 0 and g.evaluate(bv("0")) == 1
    assert truth(perceptron_negate(perceptron_constant_one(2)), 2) == [0] * 4


def test_indicator_examples():
    p = perceptron_indicator(bv("11010"), 1, -1)
    assert p.weights == (1, 1, -1, 1, -1) and p.bias == Fraction(-5, 2)
    assert truth(perceptron_indicator(bv("1")), 1) == [0, 1]
    assert truth(perceptron_indicator(bv("000"), 2, -3), 3) == [1] + [0] * 7
    with pytest.raises(ValueError):
        perceptron_indicator(bv("10"), 0, -1)
    with pytest.raises(ValueError):
        perceptron_indicator(bv("10"), 1, 1)


def test_indicator_small_weights():
    # the fixed +1/2 margin would accept extra points here
    p = perceptron_indicator(bv("101"), Fraction(1, 4), Fraction(-1, 5))
    assert sum(truth(p, 3)) == 1 and p.evaluate(bv("101")) == 1


def test_contrastive_and_sufficiency_examples():
    f = Perceptron((1, -1), 0)
    assert perceptron_contrastive_check(f, bv("11"), fs("{2}", 2))
    assert not perceptron_contrastive_check(f, bv("11"), fs("{1}", 2))
    assert not perceptron_contrastive_check(f, bv("11"), fs("{}", 2))
    g = Perceptron((3, 1, 1), -2)
    assert perceptron_sufficiency_check(g, bv("111"), fs("{1}", 3))
    assert perceptron_sufficiency_check(f, bv("11"), FeatureSubset.full(2))
    assert not perceptron_sufficiency_check(f, bv("11"), fs("{1}", 2))


def test_min_change_examples():
    assert perceptron_min_change_misaligned(Perceptron((3, -2, 1), -1), bv("111")) == (1, fs("{1}", 3))
    assert perceptron_min_change_misaligned(Perceptron((1, 1), -3), bv("00")) is None
    assert perceptron_min_change_misaligned(Perceptron((1, -1), 0), bv("11")) == (1, fs("{2}", 2))


def test_against_naive_random():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 7)
        f = random_perceptron(rng, n)
        x, s = random_bits(rng, n), random_subset(rng, n)
        one = ConstantOne(n)
        assert perceptron_contrastive_check(f, x, s) == naive_contrastive(f, one, x, s)
        assert perceptron_sufficiency_check(f, x, s) == naive_sufficient(f, one, x, s)
        assert perceptron_min_change_misaligned(f, x) == naive_minimum(naive_contrastive, f, one, x)
        g = perceptron_negate(f)
        assert truth(g, n) == [1 - v for v in truth(f, n)]
        assert truth(perceptron_negate(g), n) == truth(f, n)
        assert all(g.score(z) != 0 for z in cube(n))


def test_indicator_random():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(1, 8)
        x = random_bits(rng, n)
        wp = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        wm = -Fraction(rng.randint(1, 8), rng.randint(1, 4))
        p = perceptron_indicator(x, wp, wm)
        assert [z for z in cube(n) if p.evaluate(z)] == [x]


def test_boundary_scores():
    f = Perceptron((Fraction(1, 3), Fraction(2, 3)), -1)
    assert f.evaluate(bv("11")) == 0  # score exactly 0
    assert perceptron_negate(f).evaluate(bv("11")) == 1
