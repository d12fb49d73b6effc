"""
The p-adic t-structure on formal spectra

A formal spectrum is determined by its graded tame homotopy groups. The
p-adic homotopy object in degree n sits in

    0 -> L0 pi_n -> pi_n^p -> L1 pi_{n-1} -> 0

and the middle is only reported when a split criterion applies.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from completion.abelian import (
    CYCLIC, FREE, INVERTED, PADIC, PRUFER, RATIONALS,
    TameGroup, check_prime, derived_completion, divisibility_profile, read_group,
)
from completion.complexes import GradedTame, homology_groups
from completion.errors import InvalidComparison, UnresolvedExtension
from completion.parsing import Scanner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormalSpectrum:
    homotopy: GradedTame = field(default_factory=GradedTame)

    @classmethod
    def from_groups(cls, groups):
        return cls(GradedTame(groups))

    @classmethod
    def concentrated(cls, group, n=0):
        return cls(GradedTame({n: group}))

    @classmethod
    def from_complex(cls, c):
        """The homology spectrum of a FreeComplex."""
        return cls(homology_groups(c))

    def __getitem__(self, n):
        return self.homotopy[n]

    def support(self):
        return self.homotopy.support()

    def is_zero(self):
        return self.homotopy.is_zero()

    def truncate_above(self, k):
        return FormalSpectrum.from_groups({n: g for n, g in self.homotopy.items() if n <= k})

    def __str__(self):
        return str(self.homotopy)


# ---------- Membership ----------
def is_p_connective(e: FormalSpectrum, p: int, i: int) -> bool:
    """pi_j uniquely p-divisible for j < i-1 and pi_{i-1} p-divisible."""
    check_prime(p)
    for n, g in e.homotopy.items():
        profile = divisibility_profile(g, p)
        if n < i - 1 and not profile.uniquely_p_divisible:
            return False
        if n == i - 1 and not profile.p_divisible:
            return False
    return True


def is_p_coconnective(e: FormalSpectrum, p: int, i: int) -> bool:
    """i-truncated, p-complete in every degree, and pi_i of bounded p-divisibility."""
    check_prime(p)
    if any(n > i for n in e.support()):
        return False
    if not all(divisibility_profile(g, p).p_complete for _, g in e.homotopy.items()):
        return False
    return divisibility_profile(e[i], p).bounded_p_divisibility


def is_in_p_heart(e: FormalSpectrum, p: int) -> bool:
    return is_p_connective(e, p, 0) and is_p_coconnective(e, p, 0)


# ---------- p-adic homotopy ----------
class SesRecord(NamedTuple):
    degree: int
    left: TameGroup
    right: TameGroup
    middle: Optional[TameGroup] = None

    @property
    def resolved(self):
        return self.middle is not None

    def is_zero(self):
        return self.left.is_zero() and self.right.is_zero()

    def require_middle(self):
        if self.middle is None:
            raise UnresolvedExtension(self.degree, self.left, self.right)
        return self.middle

    def to_dict(self):
        return {
            'degree': self.degree,
            'left': str(self.left),
            'right': str(self.right),
            'middle': None if self.middle is None else str(self.middle),
        }


def resolve_extension(left: TameGroup, right: TameGroup) -> Optional[TameGroup]:
    """Middle of 0 -> left -> ? -> right -> 0 when a split criterion applies.

    right is always a sum of Zp(p) here, so a finite left splits off.
    """
    if right.is_zero():
        return left
    if left.is_zero():
        return right
    if left.is_finite():
        return left + right
    return None


def pi_p(e: FormalSpectrum, p: int, n: int) -> SesRecord:
    check_prime(p)
    left = derived_completion(e[n], p).l0
    right = derived_completion(e[n - 1], p).l1
    return SesRecord(n, left, right, resolve_extension(left, right))


def p_homotopy(e: FormalSpectrum, p: int):
    """Nonzero SES records, ordered by degree."""
    degrees = sorted(set(e.support()) | {n + 1 for n in e.support()})
    records = [pi_p(e, p, n) for n in degrees]
    return [r for r in records if not r.is_zero()]


def complete_spectrum(e: FormalSpectrum, p: int) -> FormalSpectrum:
    """The completed spectrum; every extension has to resolve."""
    return FormalSpectrum.from_groups({r.degree: r.require_middle() for r in p_homotopy(e, p)})


class Decomposition(NamedTuple):
    shifted_l1: TameGroup
    l0: TameGroup

    def as_graded(self):
        return GradedTame({1: self.shifted_l1, 0: self.l0})


def decomposition(a: TameGroup, p: int) -> Decomposition:
    """Sigma L1 A -> A^ -> L0 A: degree 1 carries L1 A, degree 0 carries L0 A."""
    completion = derived_completion(a, p)
    return Decomposition(completion.l1, completion.l0)


# ---------- Comparisons ----------
def admits_nonzero_hom(source, target) -> bool:
    """Whether Hom(source atom, target atom) is nonzero."""
    sk, tk = source.kind, target.kind
    if sk == FREE:
        return True
    if sk == CYCLIC:
        return tk in (CYCLIC, PRUFER) and target.prime == source.prime
    if sk == PRUFER:
        return tk == PRUFER and target.prime == source.prime
    if sk == RATIONALS:
        return tk in (RATIONALS, PRUFER)
    if sk == PADIC:
        if tk in (PADIC, CYCLIC):
            return target.prime == source.prime
        return tk in (PRUFER, RATIONALS)
    if sk == INVERTED:
        if tk == INVERTED:
            return target.prime == source.prime
        if tk in (CYCLIC, PADIC):
            return target.prime != source.prime
        return tk in (RATIONALS, PRUFER)
    return False


@dataclass(frozen=True)
class Comparison:
    """Degreewise correspondence between summand indices of two spectra."""

    pairs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(n): tuple(sorted((int(i), int(j)) for i, j in ps))
                 for n, ps in self.pairs.items() if ps}
        object.__setattr__(self, 'pairs', clean)

    def __eq__(self, other):
        return isinstance(other, Comparison) and self.pairs == other.pairs

    def __hash__(self):
        return hash(tuple(sorted(self.pairs.items())))

    def at(self, n):
        return self.pairs.get(n, ())

    def validate(self, source: FormalSpectrum, target: FormalSpectrum):
        for n, ps in self.pairs.items():
            src, tgt = source[n].summands, target[n].summands
            seen_src, seen_tgt = set(), set()
            for i, j in ps:
                if not (0 <= i < len(src) and 0 <= j < len(tgt)):
                    raise InvalidComparison(f"degree {n}: pair ({i}, {j}) is out of range")
                if i in seen_src or j in seen_tgt:
                    raise InvalidComparison(f"degree {n}: pair ({i}, {j}) reuses a summand")
                seen_src.add(i)
                seen_tgt.add(j)
                if not admits_nonzero_hom(src[i], tgt[j]):
                    raise InvalidComparison(f"degree {n}: no nonzero map {src[i]} -> {tgt[j]}")
        return self

    @classmethod
    def identity(cls, e: FormalSpectrum):
        return cls({n: [(i, i) for i in range(len(g))] for n, g in e.homotopy.items()})

    @classmethod
    def greedy(cls, source: FormalSpectrum, target: FormalSpectrum):
        """Match equal atoms first, then any admissible one, in index order."""
        pairs = {}
        for n in sorted(set(source.support()) & set(target.support())):
            src, tgt = source[n].summands, target[n].summands
            used, chosen = set(), []
            for exact in (True, False):
                for i, a in enumerate(src):
                    if any(i == k for k, _ in chosen):
                        continue
                    for j, b in enumerate(tgt):
                        if j in used:
                            continue
                        if (a == b) if exact else admits_nonzero_hom(a, b):
                            chosen.append((i, j))
                            used.add(j)
                            break
            pairs[n] = chosen
        return cls(pairs)

    def compose(self, other: 'Comparison') -> 'Comparison':
        """self: e -> f followed by other: f -> g."""
        out = {}
        for n, ps in self.pairs.items():
            forward = dict(other.at(n))
            out[n] = [(i, forward[j]) for i, j in ps if j in forward]
        return Comparison(out)

    def to_dict(self):
        return {str(n): [list(pair) for pair in ps] for n, ps in self.pairs.items()}


def _li_atom(atom, p, i):
    completion = derived_completion(TameGroup.of(atom), p)
    return completion.l0 if i == 0 else completion.l1


def recognize_p_equivalence(e: FormalSpectrum, f: FormalSpectrum, comparison: Comparison, p: int) -> bool:
    """The comparison is a p-equivalence iff it matches L0 and L1 summand by summand."""
    check_prime(p)
    comparison.validate(e, f)
    for n in sorted(set(e.support()) | set(f.support())):
        src, tgt = e[n].summands, f[n].summands
        pairs = comparison.at(n)
        paired_src = {i for i, _ in pairs}
        paired_tgt = {j for _, j in pairs}
        for i in (0, 1):
            if any(_li_atom(src[a], p, i) != _li_atom(tgt[b], p, i) for a, b in pairs):
                return False
            unpaired = [src[a] for a in range(len(src)) if a not in paired_src]
            unpaired += [tgt[b] for b in range(len(tgt)) if b not in paired_tgt]
            if any(not _li_atom(atom, p, i).is_zero() for atom in unpaired):
                return False
    return True


def p_equivalence_by_homotopy(e: FormalSpectrum, f: FormalSpectrum, comparison: Comparison, p: int) -> bool:
    """Both SES ends agree in every degree, and the middles wherever both resolve."""
    comparison.validate(e, f)
    degrees = set(e.support()) | set(f.support())
    for n in sorted(degrees | {d + 1 for d in degrees}):
        a, b = pi_p(e, p, n), pi_p(f, p, n)
        if a.left != b.left or a.right != b.right:
            return False
        if a.resolved and b.resolved and a.middle != b.middle:
            return False
    return True


def _completed_origins(e, p, n):
    """Origins of the atoms of pi_n^p in the stable order of its middle."""
    entries = []
    for i, atom in enumerate(e[n].summands):
        for b in _li_atom(atom, p, 0):
            entries.append((b, ('l0', i)))
    for i, atom in enumerate(e[n - 1].summands):
        for b in _li_atom(atom, p, 1):
            entries.append((b, ('l1', i)))
    entries.sort(key=lambda entry: entry[0].sort_key())
    return {origin: pos for pos, (_, origin) in enumerate(entries)}


def transport(comparison: Comparison, source: FormalSpectrum, target: FormalSpectrum, p: int) -> Comparison:
    """The correspondence induced on completed homotopy: L0 in degree n, L1 in degree n+1."""
    out = {}
    degrees = set(source.support()) | {n + 1 for n in source.support()}
    for n in sorted(degrees):
        src_pos = _completed_origins(source, p, n)
        tgt_pos = _completed_origins(target, p, n)
        pairs = []
        for part, d in (('l0', n), ('l1', n - 1)):
            for i, j in comparison.at(d):
                if (part, i) in src_pos and (part, j) in tgt_pos:
                    pairs.append((src_pos[(part, i)], tgt_pos[(part, j)]))
        out[n] = pairs
    return Comparison(out)


# ---------- Grammar ----------
def read_spectrum(sc: Scanner) -> FormalSpectrum:
    """spectrum := "0" | n ":" group (("," | ";") n ":" group)*"""
    groups = {}
    while True:
        n = sc.integer()
        if not groups and not sc.peek(':'):
            if n != 0:
                raise sc.error("':'")
            return FormalSpectrum()
        sc.expect(':')
        if n in groups:
            raise sc.error(f'a degree other than {n}')
        groups[n] = read_group(sc)
        if not (sc.accept(',') or sc.accept(';')) or sc.at_end():
            break
    return FormalSpectrum.from_groups(groups)


def parse_spectrum(text: str) -> FormalSpectrum:
    sc = Scanner(text)
    e = read_spectrum(sc)
    sc.finish()
    return e
