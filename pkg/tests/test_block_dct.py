import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dctpipe.block_dct import basis_matrix, dct2, idct2, inverse_zigzag_order, zigzag_order

from oracles import naive_dct2_loops, naive_dct2_stack, naive_idct2_loops, zigzag_by_diagonal_walk


def test_constant_block_has_only_dc():
    d = dct2(np.ones((2, 2)))
    assert d[0, 0] == pytest.approx(2.0, abs=1e-12)
    off = d.copy()
    off[0, 0] = 0.0
    assert np.abs(off).max() < 1e-12


@pytest.mark.parametrize("b", [2, 4, 8])
def test_matches_naive_quadruple_loop(rng, b):
    block = rng.normal(size=(b, b))
    assert np.abs(dct2(block) - naive_dct2_loops(block)).max() < 1e-9
    coeffs = rng.normal(size=(b, b))
    assert np.abs(idct2(coeffs) - naive_idct2_loops(coeffs)).max() < 1e-9


def test_stack_oracle_agrees_with_loops(rng):
    blocks = rng.normal(size=(3, 4, 4))
    stacked = naive_dct2_stack(blocks)
    for i in range(3):
        assert np.abs(stacked[i] - naive_dct2_loops(blocks[i])).max() < 1e-12


def test_identity_coeffs_match_oracle(rng):
    d = np.eye(8)
    assert np.abs(idct2(d) - naive_idct2_loops(d)).max() < 1e-9


@pytest.mark.parametrize("b", [2, 4, 8])
def test_dc_only_coeffs_give_constant_block(b):
    c = 3.75
    d = np.zeros((b, b))
    d[0, 0] = b * c
    assert np.abs(idct2(d) - c).max() < 1e-12


@pytest.mark.parametrize("b", [2, 4, 8, 16])
def test_roundtrip_and_parseval(rng, b):
    blocks = rng.normal(size=(50, b, b))
    coeffs = dct2(blocks)
    assert np.abs(idct2(coeffs) - blocks).max() < 1e-9
    assert np.abs((coeffs**2).sum(axis=(1, 2)) - (blocks**2).sum(axis=(1, 2))).max() < 1e-9


def test_linearity(rng):
    a, c = rng.normal(size=(2, 8, 8))
    alpha, beta = 0.37, -2.5
    lhs = dct2(alpha * a + beta * c)
    rhs = alpha * dct2(a) + beta * dct2(c)
    assert np.abs(lhs - rhs).max() < 1e-9


@pytest.mark.parametrize("b", [2, 3, 4, 8, 16])
def test_orthonormality(b):
    t = basis_matrix(b)
    assert np.abs(t.T @ t - np.eye(b)).max() < 1e-9


def test_non_square_rejected():
    with pytest.raises(ValueError):
        dct2(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        idct2(np.zeros((4, 2)))


def test_zigzag_b2():
    assert zigzag_order(2).tolist() == [0, 1, 2, 3]


def test_zigzag_b3_hand_enumeration():
    coords = [(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2), (1, 2), (2, 1), (2, 2)]
    assert zigzag_order(3).tolist() == [r * 3 + c for r, c in coords]


def test_zigzag_b8_jpeg_prefix():
    assert zigzag_order(8)[:10].tolist() == [0, 1, 8, 16, 9, 2, 3, 10, 17, 24]


@given(st.integers(min_value=1, max_value=16))
@settings(max_examples=16, deadline=None)
def test_zigzag_properties(b):
    perm = zigzag_order(b)
    assert sorted(perm.tolist()) == list(range(b * b))
    assert perm[0] == 0
    walk = zigzag_by_diagonal_walk(b)
    assert perm.tolist() == [r * b + c for r, c in walk]
    diag = [(idx // b) + (idx % b) for idx in perm]
    assert diag == sorted(diag)
    inv = inverse_zigzag_order(b)
    assert np.array_equal(inv[perm], np.arange(b * b))
