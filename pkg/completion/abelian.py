"""
Tame abelian groups and their derived p-completion

A tame group is a formal finite direct sum of atoms:
    Z, Z/q^e, Prufer(q), Q, Zp(q), Z[1/q]
Every functor below is additive, so it is computed atom by atom.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from math import prod
from typing import NamedTuple

from sympy import factorint, isprime

from completion.errors import NotTame, ParseError, VerificationFailure
from completion.parsing import Scanner

logger = logging.getLogger(__name__)

# ---------- Atoms ----------
FREE = 'free'
CYCLIC = 'cyclic'
PRUFER = 'prufer'
RATIONALS = 'rationals'
PADIC = 'padic'
INVERTED = 'inverted'

KIND_ORDER = {FREE: 0, CYCLIC: 1, PRUFER: 2, RATIONALS: 3, PADIC: 4, INVERTED: 5}
PRIME_INDEXED = (PRUFER, PADIC, INVERTED)


def check_prime(p):
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


@dataclass(frozen=True)
class Atom:
    """One indecomposable summand. Cyclic atoms are always prime powers."""

    kind: str
    prime: int = 0
    exponent: int = 0

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == CYCLIC:
            check_prime(self.prime)
            if self.exponent < 1:
                raise ValueError("cyclic atoms need exponent >= 1")
        elif self.kind in PRIME_INDEXED:
            check_prime(self.prime)

    @classmethod
    def free(cls):
        return cls(FREE)

    @classmethod
    def cyclic(cls, prime, exponent=1):
        return cls(CYCLIC, prime, exponent)

    @classmethod
    def prufer(cls, prime):
        return cls(PRUFER, prime)

    @classmethod
    def rationals(cls):
        return cls(RATIONALS)

    @classmethod
    def padic(cls, prime):
        return cls(PADIC, prime)

    @classmethod
    def inverted(cls, prime):
        return cls(INVERTED, prime)

    @property
    def modulus(self):
        return self.prime ** self.exponent if self.kind == CYCLIC else 0

    def sort_key(self):
        if self.kind == CYCLIC:
            return (KIND_ORDER[CYCLIC], self.modulus, self.prime)
        return (KIND_ORDER[self.kind], self.prime, 0)

    def __str__(self):
        if self.kind == FREE:
            return 'Z'
        if self.kind == CYCLIC:
            return f'Z/{self.modulus}'
        if self.kind == PRUFER:
            return f'Prufer({self.prime})'
        if self.kind == RATIONALS:
            return 'Q'
        if self.kind == PADIC:
            return f'Zp({self.prime})'
        return f'Z[1/{self.prime}]'


def cyclic_atoms(m):
    """Split Z/m into its prime-power atoms."""
    if m < 2:
        raise ValueError(f"cyclic modulus must be >= 2, got {m}")
    return [Atom.cyclic(q, e) for q, e in sorted(factorint(m).items())]


# ---------- Groups ----------
class TameGroup:
    """Immutable finite direct sum of atoms, kept in canonical order."""

    __slots__ = ('summands',)

    def __init__(self, summands=()):
        atoms = tuple(sorted(summands, key=Atom.sort_key))
        for a in atoms:
            if not isinstance(a, Atom):
                raise TypeError(f"not an atom: {a!r}")
        object.__setattr__(self, 'summands', atoms)

    def __setattr__(self, name, value):
        raise AttributeError("TameGroup is immutable")

    # ----- constructors -----
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def of(cls, *atoms):
        return cls(atoms)

    @classmethod
    def free(cls, rank=1):
        return cls([Atom.free()] * rank)

    @classmethod
    def cyclic(cls, m):
        return cls(cyclic_atoms(m))

    @classmethod
    def from_invariants(cls, torsion=(), free_rank=0):
        atoms = [Atom.free()] * free_rank
        for d in torsion:
            atoms.extend(cyclic_atoms(d))
        return cls(atoms)

    # ----- structure -----
    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)

    def __eq__(self, other):
        return isinstance(other, TameGroup) and self.summands == other.summands

    def __hash__(self):
        return hash(self.summands)

    def __add__(self, other):
        return TameGroup(self.summands + other.summands)

    def __mul__(self, k):
        return TameGroup(self.summands * k)

    def minus(self, other):
        """Remove the summands of other; they must all occur in self."""
        rest = Counter(self.summands)
        rest.subtract(other.summands)
        if any(k < 0 for k in rest.values()):
            raise ValueError(f"{other} is not a summand of {self}")
        return TameGroup(rest.elements())

    def __bool__(self):
        return bool(self.summands)

    def is_zero(self):
        return not self.summands

    def counts(self):
        return Counter(self.summands)

    def free_rank(self):
        return sum(1 for a in self.summands if a.kind == FREE)

    def padic_rank(self, p):
        return sum(1 for a in self.summands if a.kind == PADIC and a.prime == p)

    def is_finitely_generated(self):
        return all(a.kind in (FREE, CYCLIC) for a in self.summands)

    def is_finite(self):
        return all(a.kind == CYCLIC for a in self.summands)

    def order(self):
        """Number of elements, or None for an infinite group."""
        if not self.is_finite():
            return None
        return prod(a.modulus for a in self.summands)

    def invariant_factors(self):
        """Torsion invariant factors d_1 | d_2 | ... of a finitely generated group."""
        if not self.is_finitely_generated():
            raise ValueError(f"{self} is not finitely generated")
        by_prime = {}
        for a in self.summands:
            if a.kind == CYCLIC:
                by_prime.setdefault(a.prime, []).append(a.modulus)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for powers in by_prime.values():
            powers.sort(reverse=True)
            for i, q in enumerate(powers):
                factors[length - 1 - i] *= q
        return tuple(factors)

    def __repr__(self):
        return f"TameGroup({str(self)!r})"

    def __str__(self):
        if not self.summands:
            return '0'
        terms = []
        for atom, k in _runs(self.summands):
            terms.append(str(atom) if k == 1 else f'{atom}^{k}')
        return ' + '.join(terms)


def _runs(atoms):
    out = []
    for a in atoms:
        if out and out[-1][0] == a:
            out[-1][1] += 1
        else:
            out.append([a, 1])
    return [(a, k) for a, k in out]


def direct_sum(groups):
    atoms = []
    for g in groups:
        atoms.extend(g.summands)
    return TameGroup(atoms)


# ---------- Torsion, quotients, Tate module ----------
def _torsion_atom(atom, p, n):
    if atom.kind == PRUFER and atom.prime == p:
        return [Atom.cyclic(p, n)]
    if atom.kind == CYCLIC and atom.prime == p:
        return [Atom.cyclic(p, min(atom.exponent, n))]
    return []


def _quotient_atom(atom, p, n):
    if atom.kind == FREE:
        return [Atom.cyclic(p, n)]
    if atom.kind == CYCLIC and atom.prime == p:
        return [Atom.cyclic(p, min(atom.exponent, n))]
    if atom.kind == PADIC and atom.prime == p:
        return [Atom.cyclic(p, n)]
    if atom.kind == INVERTED and atom.prime != p:
        return [Atom.cyclic(p, n)]
    return []


def torsion_part(a: TameGroup, p: int, n: int) -> TameGroup:
    """A[p^n], the kernel of multiplication by p^n."""
    check_prime(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    return TameGroup([b for atom in a for b in _torsion_atom(atom, p, n)])


def mod_p_power(a: TameGroup, p: int, n: int) -> TameGroup:
    """A/p^n, the cokernel of multiplication by p^n."""
    check_prime(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    return TameGroup([b for atom in a for b in _quotient_atom(atom, p, n)])


def tate_module(a: TameGroup, p: int) -> TameGroup:
    """lim A[p^n] along multiplication by p; only Prufer(p) survives, as Zp(p)."""
    check_prime(p)
    return TameGroup([Atom.padic(p) for atom in a if atom.kind == PRUFER and atom.prime == p])


# ---------- Symbolic towers ----------
REDUCTION = 'reduction'
MULTIPLICATION = 'multiplication'


class Tower(NamedTuple):
    """Inverse system Z/p^{a_1} <- Z/p^{a_2} <- ... of cyclic p-groups.

    Transitions are the canonical reductions (for A/p^n) or multiplication
    by p (for A[p^n]).
    """

    prime: int
    kind: str
    exponents: tuple

    def transition_surjective(self, n):
        """Whether stage n+1 -> stage n is onto (stages are 1-based)."""
        if self.kind == REDUCTION:
            return True
        a, b = self.exponents[n - 1], self.exponents[n]
        return a == 0 or b == a + 1

    def __str__(self):
        return ' <- '.join(f'Z/{self.prime}^{e}' if e else '0' for e in self.exponents)


def atom_tower(atom: Atom, p: int, kind: str, depth: int) -> Tower:
    """Stages 1..depth of A/p^n (kind REDUCTION) or A[p^n] (kind MULTIPLICATION)."""
    stage = _quotient_atom if kind == REDUCTION else _torsion_atom
    exps = []
    for n in range(1, depth + 1):
        parts = stage(atom, p, n)
        exps.append(parts[0].exponent if parts else 0)
    return Tower(p, kind, tuple(exps))


def is_mittag_leffler(tower: Tower) -> bool:
    """Images of the tail stabilize: always true for reductions; for
    multiplication towers either every tail transition is onto or the tail
    is constant (so iterated images die)."""
    if tower.kind == REDUCTION:
        return True
    tail = tower.exponents[-3:]
    if len(set(tail)) == 1:
        return True
    depth = len(tower.exponents)
    return all(tower.transition_surjective(n) for n in range(depth - 2, depth))


def tower_limit(tower: Tower) -> TameGroup:
    """Pattern-detected limit of a tame tower; anything else raises NotTame."""
    if len(tower.exponents) < 3:
        raise NotTame(f"tower too short to read a limit: {tower}")
    e1, e2, e3 = tower.exponents[-3:]
    depth = len(tower.exponents)
    p = tower.prime
    if e1 == e2 == e3:
        if tower.kind == REDUCTION and e1:
            return TameGroup.of(Atom.cyclic(p, e1))
        # constant multiplication-by-p tower is pro-zero
        return TameGroup.zero()
    if e2 == e1 + 1 and e3 == e2 + 1 and all(
            tower.transition_surjective(n) for n in range(depth - 2, depth)):
        return TameGroup.of(Atom.padic(p))
    raise NotTame(f"no tame limit pattern in {tower}")


def tower_depth(a: TameGroup, p: int) -> int:
    """Enough stages for every atom tower of a to show its tail pattern."""
    return max((atom.exponent for atom in a if atom.kind == CYCLIC and atom.prime == p), default=0) + 3


# ---------- Derived completion ----------
class DerivedCompletion(NamedTuple):
    l0: TameGroup
    l1: TameGroup


def derived_completion(a: TameGroup, p: int) -> DerivedCompletion:
    """(L0 A, L1 A) with L0 = lim A/p^n and L1 the Tate module.

    lim^1 vanishes because every tame tower is Mittag-Leffler, which is
    asserted stage by stage.
    """
    check_prime(p)
    depth = tower_depth(a, p)
    l0 = []
    for atom in a:
        tower = atom_tower(atom, p, REDUCTION, depth)
        if not is_mittag_leffler(tower):
            raise VerificationFailure(f"tower of {atom} is not Mittag-Leffler")
        l0.append(tower_limit(tower))
    result = DerivedCompletion(direct_sum(l0), tate_module(a, p))
    logger.debug("derived completion of %s at %d: L0=%s L1=%s", a, p, result.l0, result.l1)
    return result


# ---------- Divisibility ----------
class DivisibilityProfile(NamedTuple):
    uniquely_p_divisible: bool
    p_divisible: bool
    bounded_p_divisibility: bool
    p_complete: bool


def _atom_profile(atom, p):
    # (uniquely p-divisible, p-divisible, bounded, p-complete)
    at_p = atom.prime == p
    if atom.kind == FREE:
        return (False, False, True, False)
    if atom.kind == CYCLIC:
        # Z/q^e with q != p is itself p-divisible, so it is not bounded
        return (False, False, True, True) if at_p else (True, True, False, False)
    if atom.kind == PRUFER:
        return (False, True, False, False) if at_p else (True, True, False, False)
    if atom.kind == RATIONALS:
        return (True, True, False, False)
    if atom.kind == PADIC:
        return (False, False, True, True) if at_p else (True, True, False, False)
    # Z[1/q]: p invertible when q == p; otherwise p-adically separated like Z
    return (True, True, False, False) if at_p else (False, False, True, False)


def divisibility_profile(a: TameGroup, p: int) -> DivisibilityProfile:
    check_prime(p)
    flags = [True, True, True, True]
    for atom in a:
        for i, flag in enumerate(_atom_profile(atom, p)):
            flags[i] = flags[i] and flag
    return DivisibilityProfile(*flags)


def is_uniquely_p_divisible(a, p):
    return divisibility_profile(a, p).uniquely_p_divisible


def is_p_divisible(a, p):
    return divisibility_profile(a, p).p_divisible


# ---------- L1 mod p ----------
class SesWitness(NamedTuple):
    """0 -> left -> middle -> right -> 0 with bookkeeping already verified."""

    left: TameGroup
    middle: TameGroup
    right: TameGroup

    def p_ranks(self):
        return tuple(len(g) for g in (self.left, self.middle, self.right))


def check_ses_orders(left, middle, right, where=''):
    """Order product for finite groups; rank additivity otherwise."""
    orders = [g.order() for g in (left, middle, right)]
    if None not in orders:
        if orders[1] != orders[0] * orders[2]:
            raise VerificationFailure(
                f"{where}order mismatch: |{middle}| != |{left}| * |{right}|")
        return
    ranks = [g.free_rank() for g in (left, middle, right)]
    if ranks[1] != ranks[0] + ranks[2]:
        raise VerificationFailure(f"{where}rank mismatch in 0 -> {left} -> {middle} -> {right} -> 0")


def l1_mod_p_sequence(a: TameGroup, p: int) -> SesWitness:
    """0 -> (L1 A)/p -> A[p] -> (L0 A)[p] -> 0"""
    completion = derived_completion(a, p)
    witness = SesWitness(
        left=mod_p_power(completion.l1, p, 1),
        middle=torsion_part(a, p, 1),
        right=torsion_part(completion.l0, p, 1),
    )
    check_ses_orders(*witness, where=f"L1 mod {p} sequence of {a}: ")
    lr, mr, rr = witness.p_ranks()
    if mr != lr + rr:
        raise VerificationFailure(f"p-rank mismatch in L1 mod {p} sequence of {a}")
    return witness


# ---------- Grammar ----------
def read_atoms(sc: Scanner):
    """atom := "Z" | "Z/" int | "Prufer(" prime ")" | "Q" | "Zp(" prime ")" | "Z[1/" prime "]" """
    if sc.accept('Prufer'):
        return [Atom.prufer(_read_prime(sc))]
    if sc.accept('Zp'):
        return [Atom.padic(_read_prime(sc))]
    if sc.accept_keyword('Q'):
        return [Atom.rationals()]
    if sc.accept('Z'):
        if sc.accept('/'):
            return cyclic_atoms(sc.count(2, 'modulus'))
        if sc.accept('['):
            sc.expect('1')
            sc.expect('/')
            p = _read_bare_prime(sc)
            sc.expect(']')
            return [Atom.inverted(p)]
        return [Atom.free()]
    raise sc.error('group atom')


def _read_bare_prime(sc):
    sc.skip_ws()
    start = sc.pos
    p = sc.count(0, 'prime')
    if not isprime(p):
        raise ParseError(start, 'prime', sc.text)
    return p


def _read_prime(sc):
    sc.expect('(')
    p = _read_bare_prime(sc)
    sc.expect(')')
    return p


def read_group(sc: Scanner) -> TameGroup:
    """group := term ("+" term)* | "0";  term := atom ("^" count)?"""
    if sc.peek('0'):
        sc.accept('0')
        return TameGroup.zero()
    atoms = []
    while True:
        term = read_atoms(sc)
        if sc.accept('^'):
            k = sc.count(1, 'positive count')
            term = term * k
        atoms.extend(term)
        if not sc.accept('+'):
            break
    return TameGroup(atoms)


def parse_group(text: str) -> TameGroup:
    sc = Scanner(text)
    group = read_group(sc)
    sc.finish()
    return group
