"""
Seeded random instances for the property suite and the tests
"""
import random

from completion.abelian import Atom, TameGroup
from completion.complexes import FreeComplex
from completion.intlinalg import IntMatrix
from completion.presheaf import FinitePoset, SpectralPresheaf
from completion.tstructure import Comparison, FormalSpectrum
from completion.unstable import FormalSpace

DEGREE_RANGE = (-2, 4)
MAX_RANK = 6
ENTRY_BOUND = 9
PRIMES = (2, 3, 5)
CYCLIC_PRIMES = (2, 3, 5, 7)


def make_rng(seed):
    return random.Random(seed)


# ---------- Complexes ----------
def random_complex(rng, degree_range=DEGREE_RANGE, max_rank=MAX_RANK, bound=ENTRY_BOUND):
    """Either a scrambled cell complex or one with raw bounded differentials."""
    if rng.random() < 0.5:
        return random_raw_complex(rng, degree_range, max_rank, bound)
    return random_cell_complex(rng, degree_range, max_rank, bound)


def _degree_span(rng, degree_range):
    lo_bound, hi_bound = degree_range
    lo = rng.randint(lo_bound, hi_bound - 1)
    return lo, rng.randint(lo + 1, min(hi_bound, lo + 4))


def random_raw_complex(rng, degree_range=DEGREE_RANGE, max_rank=MAX_RANK, bound=ENTRY_BOUND):
    """Uniform entries in [-bound, bound] on every other differential; the rest are zero."""
    lo, hi = _degree_span(rng, degree_range)
    ranks = {n: rng.randint(0, max_rank) for n in range(lo, hi + 1)}
    first = lo + 1 + rng.randrange(2)
    diffs = {}
    for n in range(first, hi + 1, 2):
        rows = [[rng.randint(-bound, bound) for _ in range(ranks[n])] for _ in range(ranks[n - 1])]
        diffs[n] = IntMatrix.from_rows(rows, ranks[n])
    return FreeComplex.build(lo, hi, ranks, diffs)


def random_cell_complex(rng, degree_range=DEGREE_RANGE, max_rank=MAX_RANK, bound=ENTRY_BOUND):
    """Sum of sphere and Moore cells, scrambled by bounded elementary basis changes."""
    lo, hi = _degree_span(rng, degree_range)
    ranks = {n: 0 for n in range(lo, hi + 1)}
    moore_cells = []  # (degree of the target, modulus, target index, source index)
    for _ in range(rng.randint(1, 6)):
        n = rng.randint(lo, hi)
        if n < hi and rng.random() < 0.6:
            if ranks[n] < max_rank and ranks[n + 1] < max_rank:
                m = rng.choice([1, 2, 2, 3, 4, 4, 5, 6, 8, 9])
                moore_cells.append((n, m, ranks[n], ranks[n + 1]))
                ranks[n] += 1
                ranks[n + 1] += 1
        elif ranks[n] < max_rank:
            ranks[n] += 1
    rows = {n: [[0] * ranks[n] for _ in range(ranks[n - 1])] for n in range(lo + 1, hi + 1)}
    for n, m, target, source in moore_cells:
        rows[n + 1][target][source] = m
    for _ in range(3 * sum(ranks.values())):
        n = rng.randint(lo, hi)
        if ranks[n] < 2:
            continue
        i, j = rng.sample(range(ranks[n]), 2)
        q = rng.choice([-2, -1, 1, 2])
        _basis_change(rows, n, i, j, q, bound)
    diffs = {n: IntMatrix.from_rows(r, ranks[n]) for n, r in rows.items()}
    return FreeComplex.build(lo, hi, ranks, diffs)


def _basis_change(rows, n, i, j, q, bound):
    """Replace e_j by e_j + q e_i in degree n, unless an entry would exceed the bound.

    d_n loses q * column i from column j; d_{n+1} gains q * row j in row i.
    """
    outgoing = rows.get(n)
    incoming = rows.get(n + 1)
    new_out = [r[:] for r in outgoing] if outgoing is not None else None
    new_in = [r[:] for r in incoming] if incoming is not None else None
    if new_out is not None:
        for r in new_out:
            r[j] -= q * r[i]
    if new_in is not None:
        new_in[i] = [a + q * b for a, b in zip(new_in[i], new_in[j])]
    for m in (new_out, new_in):
        if m is not None and any(abs(x) > bound for r in m for x in r):
            return
    if new_out is not None:
        rows[n] = new_out
    if new_in is not None:
        rows[n + 1] = new_in


# ---------- Groups ----------
def random_atom(rng, primes=CYCLIC_PRIMES):
    kind = rng.randrange(6)
    q = rng.choice(primes)
    if kind == 0:
        return Atom.free()
    if kind == 1:
        return Atom.cyclic(q, rng.randint(1, 3))
    if kind == 2:
        return Atom.prufer(q)
    if kind == 3:
        return Atom.rationals()
    if kind == 4:
        return Atom.padic(q)
    return Atom.inverted(q)


def random_tame_group(rng, max_atoms=5, primes=CYCLIC_PRIMES):
    return TameGroup([random_atom(rng, primes) for _ in range(rng.randint(0, max_atoms))])


def random_formal_space(rng, stages=3, degrees=(2, 6), max_atoms=2):
    """Product of `stages` EM factors in distinct degrees."""
    chosen = rng.sample(range(degrees[0], degrees[1] + 1), stages)
    x = FormalSpace.point()
    for n in sorted(chosen):
        x = x * FormalSpace.em(random_tame_group(rng, max_atoms, PRIMES), n)
    return x


# ---------- Presheaves ----------
def random_poset(rng, size=4, density=0.4):
    names = [chr(ord('a') + i) for i in range(size)]
    edges = [(names[i], names[j]) for i in range(size) for j in range(i + 1, size)
             if rng.random() < density]
    return FinitePoset.from_edges(names, edges)


def _atom_family(rng, p):
    """Atoms between which every restriction is admissible."""
    choice = rng.randrange(6)
    if choice == 0:
        return lambda: Atom.free()
    if choice == 1:
        return lambda: Atom.cyclic(p, rng.randint(1, 3))
    if choice == 2:
        return lambda: Atom.prufer(p)
    if choice == 3:
        q = rng.choice([r for r in PRIMES if r != p])
        return lambda: Atom.prufer(q)
    if choice == 4:
        return lambda: Atom.padic(p)
    return lambda: Atom.rationals()


def random_presheaf(rng, poset, p, max_labels=3):
    """Degree-0 presheaf built from labelled atom families on down-closed supports."""
    subsets = [s for s in poset.down_closed_subsets() if s]
    labels = []
    for _ in range(rng.randint(0, max_labels)):
        family = _atom_family(rng, p)
        support = rng.choice(subsets)
        labels.append({u: family() for u in support})
    positions = {}
    sections = {}
    for u in poset.elements:
        entries = [(label[u], k) for k, label in enumerate(labels) if u in label]
        entries.sort(key=lambda entry: entry[0].sort_key())
        positions[u] = {k: pos for pos, (_, k) in enumerate(entries)}
        sections[u] = FormalSpectrum.concentrated(TameGroup(a for a, _ in entries))
    restrictions = {}
    for v, u in poset.strict_pairs():
        pairs = [(positions[v][k], positions[u][k]) for k in range(len(labels))
                 if k in positions[v] and k in positions[u]]
        restrictions[(v, u)] = Comparison({0: pairs})
    return SpectralPresheaf(poset, sections, restrictions)
