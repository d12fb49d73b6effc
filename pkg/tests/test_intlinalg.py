import pytest
from hypothesis import assume, given, strategies as st

from completion.abelian import TameGroup
from completion.intlinalg import (
    IntMatrix, cokernel_invariants, image_invariants, kernel_basis, smith_normal_form,
)
from tests.oracles import expected_counts, sympy_cokernel, torsion_counts

entries = st.integers(min_value=-9, max_value=9)


@st.composite
def matrices(draw, max_dim=5):
    r = draw(st.integers(min_value=0, max_value=max_dim))
    c = draw(st.integers(min_value=0, max_value=max_dim))
    rows = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    return IntMatrix.from_rows(rows, c)


@st.composite
def square_matrices(draw, max_dim=3):
    n = draw(st.integers(min_value=1, max_value=max_dim))
    rows = draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n))
    return IntMatrix.from_rows(rows, n)


# ---------- IntMatrix ----------
def test_rejects_non_integer_entries():
    with pytest.raises(TypeError):
        IntMatrix.from_rows([[1, 2.5]])
    with pytest.raises(TypeError):
        IntMatrix.from_rows([[True]])


def test_rejects_ragged_rows():
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2], [3]])


def test_matmul_handles_empty_dimensions():
    a = IntMatrix.zeros(3, 0)
    b = IntMatrix.zeros(0, 2)
    assert (a @ b) == IntMatrix.zeros(3, 2)


def test_block_assembly():
    a = IntMatrix.from_rows([[1]])
    b = IntMatrix.from_rows([[2, 3]])
    c = IntMatrix.zeros(1, 1)
    d = IntMatrix.from_rows([[4, 5]])
    assert IntMatrix.block([[a, b], [c, d]]).to_rows() == [[1, 2, 3], [0, 4, 5]]


def test_determinant_examples():
    assert IntMatrix.from_rows([[2, 1], [1, 3]]).determinant() == 5
    assert IntMatrix.from_rows([[0, 1], [1, 0]]).determinant() == -1
    assert IntMatrix.from_rows([[1, 2], [2, 4]]).determinant() == 0
    assert IntMatrix.identity(0).determinant() == 1


def test_str_uses_matrix_literal():
    assert str(IntMatrix.from_rows([[1, -2], [0, 3]])) == '[1, -2; 0, 3]'


# ---------- Smith normal form ----------
def test_snf_of_zero_scalar():
    snf = smith_normal_form(IntMatrix.from_rows([[0]]))
    assert snf.d.to_rows() == [[0]]
    assert snf.u.to_rows() == [[1]]
    assert snf.v.to_rows() == [[1]]


def test_snf_of_coprime_diagonal():
    snf = smith_normal_form(IntMatrix.diagonal([2, 3]))
    assert snf.diagonal == [1, 6]


def test_snf_of_identity():
    snf = smith_normal_form(IntMatrix.identity(3))
    assert snf.diagonal == [1, 1, 1]


@given(matrices())
def test_snf_decomposition_is_exact(m):
    snf = smith_normal_form(m)
    assert snf.u @ m @ snf.v == snf.d
    assert snf.u @ snf.u_inv == IntMatrix.identity(m.rows)
    assert snf.v @ snf.v_inv == IntMatrix.identity(m.cols)
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j:
                assert snf.d[i, j] == 0
    diagonal = snf.diagonal
    assert all(x >= 0 for x in diagonal)
    nonzero = [x for x in diagonal if x]
    assert diagonal[:len(nonzero)] == nonzero
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0


@given(matrices(max_dim=4))
def test_transforms_are_unimodular(m):
    snf = smith_normal_form(m)
    if m.rows:
        assert abs(snf.u.determinant()) == 1
    if m.cols:
        assert abs(snf.v.determinant()) == 1


# ---------- Cokernels and kernels ----------
def test_cokernel_examples():
    assert cokernel_invariants(IntMatrix.from_rows([[2, 0], [0, 3]])) == ((6,), 0)
    assert cokernel_invariants(IntMatrix.from_rows([[0, 0]])) == ((), 1)
    assert cokernel_invariants(IntMatrix.from_rows([[4]])).order == 4
    assert cokernel_invariants(IntMatrix.zeros(2, 0)).free_rank == 2


@given(matrices())
def test_cokernel_agrees_with_sympy(m):
    ours = cokernel_invariants(m)
    assert TameGroup.from_invariants(ours.torsion, ours.free_rank) == \
        sympy_cokernel(m.to_rows(), m.rows, m.cols)


@given(square_matrices())
def test_cokernel_agrees_with_enumeration(m):
    counts = torsion_counts(m.to_rows())
    assume(counts is not None)
    ours = cokernel_invariants(m)
    assert ours.free_rank == 0
    assert counts == expected_counts(ours.torsion, ours.order)


@given(matrices())
def test_kernel_basis_spans_kernel(m):
    k = kernel_basis(m)
    assert k.rows == m.cols
    assert (m @ k).is_zero()
    assert k.cols == m.cols - smith_normal_form(m).rank
    # saturated: the basis completes to a basis of Z^cols
    if k.cols:
        assert cokernel_invariants(k).torsion == ()


# ---------- Images in finite groups ----------
def test_image_of_two_in_z8():
    assert image_invariants(IntMatrix.from_rows([[2]]), [8]) == ((4,), 0)


def test_image_of_diagonal_in_z2_plus_z4():
    assert image_invariants(IntMatrix.from_rows([[1], [1]]), [2, 4]) == ((4,), 0)


def test_image_with_free_row():
    assert image_invariants(IntMatrix.from_rows([[3]]), [0]) == ((), 1)


def test_image_of_empty_target():
    assert image_invariants(IntMatrix.zeros(0, 2), []) == ((), 0)


def test_image_requires_one_modulus_per_row():
    with pytest.raises(ValueError):
        image_invariants(IntMatrix.from_rows([[1], [1]]), [2])


@given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=3),
       st.data())
def test_image_order_matches_enumeration(moduli, data):
    k = len(moduli)
    gens = data.draw(st.lists(st.lists(entries, min_size=k, max_size=k), min_size=1, max_size=3))
    phi = IntMatrix.from_rows([[g[i] for g in gens] for i in range(k)], len(gens))
    seen = {tuple([0] * k)}
    frontier = list(seen)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % m for a, b, m in zip(x, g, moduli))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    inv = image_invariants(phi, moduli)
    assert inv.free_rank == 0
    assert inv.order == len(seen)
