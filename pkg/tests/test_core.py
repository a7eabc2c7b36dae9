import numpy as np
import pytest
from hypothesis import given, strategies as st

from aligned_xai.core import (
    BitVector,
    ConstantOne,
    FeatureSubset,
    completion_codes,
    cube_values,
    enumerate_completions,
    evaluate,
    splice,
    xor_permute,
)
from aligned_xai.errors import DimensionError, EnumerationLimitError
from aligned_xai.linear import Perceptron

from helpers import bv, fbdd_and2, fs


@pytest.mark.parametrize("s, want", [("{1}", "110"), ("{1,2,3}", "101"), ("{}", "010")])
def test_splice_examples(s, want):
    assert str(splice(bv("101"), bv("010"), fs(s, 3))) == want


def test_splice_arity():
    with pytest.raises(DimensionError):
        splice(bv("10"), bv("010"), fs("{1}", 3))


def test_evaluate_examples():
    assert evaluate(ConstantOne(4), bv("0110")) == 1
    assert evaluate(Perceptron((1, -1), 0), bv("11")) == 0
    assert evaluate(fbdd_and2(), bv("10")) == 0
    with pytest.raises(DimensionError):
        evaluate(ConstantOne(3), bv("01"))


def test_completion_examples():
    assert [str(z) for z in enumerate_completions(bv("11"), fs("{1}", 2))] == ["10", "11"]
    assert [str(z) for z in enumerate_completions(bv("11"), fs("{1,2}", 2))] == ["11"]
    assert [str(z) for z in enumerate_completions(bv("00"), fs("{}", 2))] == ["00", "01", "10", "11"]


def test_completion_cap():
    with pytest.raises(EnumerationLimitError):
        list(enumerate_completions(bv("0" * 6), FeatureSubset.empty(6), cap=32))


def test_cap_env(monkeypatch):
    monkeypatch.setenv("ALIGNED_XAI_CAP", "8")
    with pytest.raises(EnumerationLimitError):
        completion_codes(bv("0000"), FeatureSubset.empty(4))


def test_text_forms():
    assert str(FeatureSubset.parse("{ 3, 1 }", 4)) == "{1,3}"
    assert FeatureSubset.parse("{1,3}", 4).complement().members == (2, 4)
    for bad in ("1,3", "{1,,3}", "{1,1}"):
        with pytest.raises(ValueError):
            FeatureSubset.parse(bad, 4)
    with pytest.raises(DimensionError):
        FeatureSubset.parse("{5}", 4)
    with pytest.raises(ValueError):
        BitVector.parse("10a")


bits = st.integers(1, 10).flatmap(
    lambda n: st.tuples(*[st.lists(st.integers(0, 1), min_size=n, max_size=n)] * 2,
                        st.sets(st.integers(1, n)), st.just(n))
)


@given(bits)
def test_splice_properties(case):
    xb, zb, s, n = case
    x, z, sub = BitVector(tuple(xb)), BitVector(tuple(zb)), FeatureSubset(n, tuple(s))
    assert splice(x, x, sub) == x
    assert splice(x, z, sub) == splice(z, x, sub.complement())


@given(bits)
def test_completions_properties(case):
    xb, _, s, n = case
    x, fixed = BitVector(tuple(xb)), FeatureSubset(n, tuple(s))
    pts = list(enumerate_completions(x, fixed))
    assert len(pts) == len(set(pts)) == 2 ** (n - len(fixed))
    assert all(z.bit(i) == x.bit(i) for z in pts for i in fixed)
    assert [z.code for z in pts] == sorted(z.code for z in pts)
    assert list(completion_codes(x, fixed)) == [z.code for z in pts]


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
def test_code_roundtrip_and_xor(case):
    n, code = case
    assert BitVector.from_code(code, n).code == code
    assert FeatureSubset.from_mask(code, n).mask == code
    table = np.arange(1 << n)
    assert list(xor_permute(table, n, code)) == [d ^ code for d in range(1 << n)]


def test_cube_values_threads_match():
    f = Perceptron((1, -2, 3, 1, -1, 2, 1, 1, -3, 2, 1, 1, -1, 1, 2, -2, 1, 1, 1), -3)
    one = cube_values(f, threads=1)
    assert np.array_equal(one, cube_values(f, threads=4))
    assert one[bv("1" * 19).code] == f.evaluate(bv("1" * 19))
