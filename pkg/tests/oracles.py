"""
Independent brute-force oracles used by the tests
"""
from itertools import product
from math import gcd

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from completion.abelian import TameGroup


def subgroup_closure(generators, modulus, dim):
    """Subgroup of (Z/modulus)^dim generated by the given vectors."""
    zero = (0,) * dim
    seen = {zero}
    frontier = [zero]
    gens = [tuple(x % modulus for x in g) for g in generators]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % modulus for a, b in zip(x, g))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def torsion_counts(m_rows, size_limit=20000):
    """|G[d]| for every d dividing |G|, G = Z^r / columns of a square nonsingular matrix.

    Returns None when the enumeration would be too large.
    """
    m = Matrix(m_rows)
    det = abs(int(m.det()))
    r = m.rows
    if det == 0 or det ** r > size_limit:
        return None
    columns = [[int(m[i, j]) for i in range(r)] for j in range(m.cols)]
    subgroup = subgroup_closure(columns, det, r)
    counts = {}
    for d in range(1, det + 1):
        if det % d:
            continue
        killed = sum(1 for x in product(range(det), repeat=r)
                     if tuple(d * a % det for a in x) in subgroup)
        counts[d] = killed // len(subgroup)
    return counts


def expected_counts(torsion, order):
    """|G[d]| for G = (+) Z/d_i, over the divisors d of order."""
    out = {}
    for d in range(1, order + 1):
        if order % d == 0:
            value = 1
            for t in torsion:
                value *= gcd(d, t)
            out[d] = value
    return out


def sympy_cokernel(m_rows, rows, cols):
    """Cokernel of an integer matrix via the sympy Smith normal form, as a TameGroup."""
    if rows == 0:
        return TameGroup.zero()
    if cols == 0:
        return TameGroup.free(rows)
    d = sympy_snf(Matrix(m_rows), domain=ZZ)
    diagonal = [abs(int(d[i, i])) for i in range(min(rows, cols))]
    nonzero = [x for x in diagonal if x]
    torsion = [x for x in nonzero if x > 1]
    return TameGroup.from_invariants(torsion, rows - len(nonzero))


def sympy_homology(c, n):
    """H_n from rational ranks and sympy elementary divisors of d_{n+1}."""
    r = c.rank(n)
    if r == 0:
        return TameGroup.zero()
    out = c.diff(n)
    incoming = c.diff(n + 1)
    rank_out = Matrix(out.to_rows()).rank() if out.rows and out.cols else 0
    coker = sympy_cokernel(incoming.to_rows(), incoming.rows, incoming.cols)
    torsion = [a for a in coker if a.kind == 'cyclic']
    return TameGroup(torsion) + TameGroup.free(coker.free_rank() - rank_out)


def prufer_torsion_count(p, k, depth=8):
    """Elements x of Z[1/p]/Z with denominator <= p^depth and p^k x = 0."""
    base = p ** depth
    return sum(1 for num in range(base) if (p ** k * num) % base == 0)


def cyclic_torsion_count(m, d):
    return sum(1 for x in range(m) if d * x % m == 0)
