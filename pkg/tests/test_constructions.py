import random
from fractions import Fraction

import pytest

from aligned_xai.constructions import (
    SspInstance,
    embed_misaligned,
    indicator_reduction,
    self_align,
    ssp_solve,
    ssp_to_mcr,
)
from aligned_xai.core import ConstantOne
from aligned_xai.errors import ConstructionError, NotSelfAlignedError
from aligned_xai.fbdd import Fbdd, fbdd_indicator, path_audit
from aligned_xai.generators import random_bits, random_fbdd, random_mlp, random_perceptron
from aligned_xai.linear import Perceptron, perceptron_indicator
from aligned_xai.mlp import AND, BooleanCircuit, Gate, Mlp, circuit_to_mlp
from aligned_xai.queries import mcr_decide
from aligned_xai.verify import answer_table, tables_equal

from helpers import bv, fbdd_and2, fbdd_var, truth


def mlp_and2():
    return circuit_to_mlp(BooleanCircuit(2, [Gate(AND, (("x", 1), ("x", 2)))], ("g", 0)))


def mlp_var(n, i):
    return circuit_to_mlp(BooleanCircuit(n, [Gate(AND, (("x", i),))], ("g", 0)))


def test_ssp_solve_examples():
    assert ssp_solve(SspInstance((1, 2, 3), 2, 3))
    assert not ssp_solve(SspInstance((1, 2, 3), 2, 7))
    assert ssp_solve(SspInstance((4, 5), 0, 0))
    with pytest.raises(ValueError):
        SspInstance((0, 1), 1, 1)
    with pytest.raises(ValueError):
        SspInstance((1, 2), 3, 1)


def test_ssp_solve_exhaustive():
    from itertools import combinations

    rng = random.Random(41)
    for _ in range(200):
        m = rng.randint(1, 7)
        z = tuple(rng.randint(1, 9) for _ in range(m))
        k, T = rng.randint(0, m), rng.randint(-1, sum(z) + 1)
        want = any(sum(c) == T for c in combinations(z, k))
        assert ssp_solve(SspInstance(z, k, T)) == want


def _mcr(red):
    return mcr_decide(red.model, red.indicator, red.input, red.param, mode="brute").answer


def test_ssp_reduction_examples():
    red = ssp_to_mcr(SspInstance((1, 2, 3), 2, 3))
    assert _mcr(red) and red.input == bv("111") and red.param == 2
    assert not _mcr(ssp_to_mcr(SspInstance((2, 2), 1, 5)))
    dummy = ssp_to_mcr(SspInstance((1, 1), 2, 2))
    assert dummy.model == Perceptron((1, -1), 0) and dummy.indicator == Perceptron((1, 1), 1)
    assert _mcr(dummy)
    assert not _mcr(ssp_to_mcr(SspInstance((1, 1), 2, 3)))


def test_ssp_paper_variant_parameters():
    red = ssp_to_mcr(SspInstance((1, 2, 3), 2, 3), variant="paper")
    assert red.model == Perceptron((-1, -2, -3), Fraction(13, 4))
    assert red.indicator == Perceptron((1, 2, 3), -3)
    assert red.provenance["variant"] == "paper"
    # model and indicator are complementary, so no in-context flip exists
    assert all(a != b for a, b in zip(truth(red.model, 3), truth(red.indicator, 3)))
    assert not _mcr(red)


def test_ssp_reduction_random():
    rng = random.Random(43)
    for _ in range(60):
        m = rng.randint(1, 8)
        z = tuple(rng.randint(1, 20) for _ in range(m))
        k = rng.randint(0, m)
        T = sum(rng.sample(z, k)) if rng.random() < 0.5 else rng.randint(0, sum(z))
        inst = SspInstance(z, k, T)
        assert _mcr(ssp_to_mcr(inst)) == ssp_solve(inst)


def test_embed_examples():
    f = fbdd_and2()
    red = embed_misaligned(f, bv("11"), 1)
    assert isinstance(red.indicator, Fbdd) and truth(red.indicator, 2) == [1] * 4
    assert red.provenance["reduction"] == "embed_misaligned"
    red = embed_misaligned(f, bv("11"), 1, indicator_class="perceptron")
    assert isinstance(red.indicator, Perceptron)


def test_indicator_reduction_examples():
    f1 = Perceptron((1, -1), 0)
    red = indicator_reduction(f1, bv("10"), 1)
    assert red.model == perceptron_indicator(bv("10"))
    assert truth(red.indicator, 2) == [1 - v for v in truth(f1, 2)]
    assert tables_equal(answer_table(f1, ConstantOne(2), bv("10")),
                        answer_table(red.model, red.indicator, bv("10")))
    red = indicator_reduction(fbdd_and2(), bv("00"))
    assert red.indicator is not None and truth(red.indicator, 2) == truth(fbdd_and2(), 2)
    assert truth(red.model, 2) == truth(fbdd_indicator(bv("00")), 2)
    with pytest.raises(ConstructionError):
        indicator_reduction(ConstantOne(2), bv("00"))


def test_indicator_reduction_constant_model():
    one = Perceptron((0, 0), 1)
    red = indicator_reduction(one, bv("01"))
    assert truth(red.indicator, 2) == [0] * 4
    for k in (1, 2):
        assert not mcr_decide(red.model, red.indicator, red.input, k).answer


def test_self_align_examples():
    g = self_align(fbdd_var(2, 1), fbdd_var(2, 2), bv("11"))
    assert truth(g, 2) == [1, 0, 1, 1] and path_audit(g)
    g = self_align(mlp_and2(), mlp_var(2, 1), bv("01"))
    assert isinstance(g, Mlp) and truth(g, 2) == [0, 0, 0, 1]
    with pytest.raises(NotSelfAlignedError):
        self_align(Perceptron((1, 0), 0), Perceptron((0, 1), 0), bv("11"))
    with pytest.raises(ConstructionError):
        self_align(fbdd_var(2, 1), mlp_var(2, 1), bv("11"))


def test_reductions_random_equivalence():
    rng = random.Random(47)
    makers = (random_fbdd, random_perceptron, random_mlp)
    for t in range(45):
        n = rng.randint(1, 5)
        f = makers[t % 3](rng, n)
        x = random_bits(rng, n)
        base = answer_table(f, ConstantOne(n), x)
        red = embed_misaligned(f, x)
        assert tables_equal(base, answer_table(red.model, red.indicator, x))
        red = indicator_reduction(f, x)
        assert tables_equal(base, answer_table(red.model, red.indicator, x))


def test_self_align_random_equivalence():
    rng = random.Random(53)
    for t in range(40):
        n = rng.randint(1, 5)
        if t % 2:
            f, pi = random_fbdd(rng, n), random_fbdd(rng, n)
        else:
            f, pi = random_mlp(rng, n), random_mlp(rng, n)
        x = random_bits(rng, n)
        g = self_align(f, pi, x)
        assert g.evaluate(x) == f.evaluate(x)
        assert tables_equal(answer_table(f, pi, x), answer_table(g, ConstantOne(n), x))
        if isinstance(g, Fbdd):
            assert path_audit(g)
