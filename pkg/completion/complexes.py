"""
Bounded chain complexes of free lattices as desk models of spectra

Differential d_n goes from degree n to degree n-1 and is stored as a
rank(n-1) x rank(n) IntMatrix. Mapping cones use

    Cone(f)_n = D_n + C_{n-1},    d = [[dD_n, f_{n-1}], [0, -dC_{n-1}]]

and E//k is the cone of multiplication by k.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field

from completion.abelian import (
    Atom, TameGroup, check_prime, cyclic_atoms, derived_completion,
    direct_sum, divisibility_profile, mod_p_power, torsion_part,
)
from completion.errors import InvalidComplex, NoStabilization, VerificationFailure
from completion.intlinalg import IntMatrix, image_invariants, smith_normal_form
from completion.parsing import Scanner

logger = logging.getLogger(__name__)

DEFAULT_STAGES = 12
MIN_STAGES = 3


# ---------- Graded groups ----------
class GradedTame:
    """Finitely supported degree -> TameGroup; zero degrees are not stored."""

    __slots__ = ('_groups',)

    def __init__(self, groups=None):
        groups = dict(groups or {})
        self._groups = {int(n): g for n, g in sorted(groups.items()) if not g.is_zero()}

    def __getitem__(self, n):
        return self._groups.get(n, TameGroup.zero())

    def items(self):
        return self._groups.items()

    def support(self):
        return sorted(self._groups)

    def is_zero(self):
        return not self._groups

    def __eq__(self, other):
        return isinstance(other, GradedTame) and self._groups == other._groups

    def __hash__(self):
        return hash(tuple(self._groups.items()))

    def __add__(self, other):
        degrees = set(self._groups) | set(other._groups)
        return GradedTame({n: self[n] + other[n] for n in degrees})

    def shift(self, k):
        return GradedTame({n + k: g for n, g in self._groups.items()})

    def to_dict(self):
        return {str(n): str(g) for n, g in self._groups.items()}

    def __repr__(self):
        return f"GradedTame({self.to_dict()!r})"

    def __str__(self):
        if not self._groups:
            return '0'
        return ', '.join(f'{n}: {g}' for n, g in self._groups.items())


# ---------- Complexes ----------
@dataclass(frozen=True)
class FreeComplex:
    lo: int
    hi: int
    ranks: tuple
    diffs: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidComplex(f"empty degree range {self.lo}..{self.hi}")
        if len(self.ranks) != self.hi - self.lo + 1:
            raise InvalidComplex("one rank per degree is required")
        full = {}
        for n in range(self.lo + 1, self.hi + 1):
            expected = (self.rank(n - 1), self.rank(n))
            d = self.diffs.get(n)
            if d is None:
                d = IntMatrix.zeros(*expected)
            elif d.shape != expected:
                raise InvalidComplex(
                    f"d{n} has shape {d.shape[0]}x{d.shape[1]}, expected {expected[0]}x{expected[1]}",
                    degree=n,
                )
            full[n] = d
        stray = set(self.diffs) - set(full)
        for n in stray:
            if not self.diffs[n].is_zero():
                raise InvalidComplex(f"d{n} lies outside {self.lo}..{self.hi}", degree=n)
        object.__setattr__(self, 'diffs', full)
        for n in range(self.lo + 2, self.hi + 1):
            if not (full[n - 1] @ full[n]).is_zero():
                raise InvalidComplex(f"d{n - 1} * d{n} != 0", degree=n)

    @classmethod
    def build(cls, lo, hi, ranks, diffs=None):
        """ranks and diffs are dicts keyed by degree; missing entries are zero."""
        return cls(lo, hi, tuple(ranks.get(n, 0) for n in range(lo, hi + 1)), dict(diffs or {}))

    def rank(self, n):
        if self.lo <= n <= self.hi:
            return self.ranks[n - self.lo]
        return 0

    def diff(self, n):
        if n in self.diffs:
            return self.diffs[n]
        return IntMatrix.zeros(self.rank(n - 1), self.rank(n))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def support(self):
        return [n for n in self.degrees() if self.rank(n)]

    def __eq__(self, other):
        if not isinstance(other, FreeComplex):
            return NotImplemented
        span = range(min(self.lo, other.lo), max(self.hi, other.hi) + 2)
        return all(self.rank(n) == other.rank(n) for n in span) and all(
            self.diff(n) == other.diff(n) for n in span)

    def __hash__(self):
        return hash(tuple((n, self.rank(n)) for n in self.support()))

    def __str__(self):
        parts = [f'degrees {self.lo}..{self.hi};']
        parts += [f'rank {n} = {self.rank(n)};' for n in self.degrees() if self.rank(n)]
        for n in range(self.lo + 1, self.hi + 1):
            d = self.diffs[n]
            if d.rows and d.cols and not d.is_zero():
                parts.append(f'd {n} = {d};')
        return ' '.join(parts)


def sphere(n=0):
    """S^n: Z in degree n."""
    return FreeComplex(n, n, (1,))


def moore(m, n=0):
    """Z --m--> Z in degrees n+1 -> n, homology Z/m in degree n."""
    return FreeComplex(n, n + 1, (1, 1), {n + 1: IntMatrix.from_rows([[m]])})


# ---------- Chain maps ----------
@dataclass(frozen=True)
class ChainMap:
    source: FreeComplex
    target: FreeComplex
    components: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        full = {}
        for n in range(lo, hi + 1):
            expected = (self.target.rank(n), self.source.rank(n))
            f = self.components.get(n)
            if f is None:
                f = IntMatrix.zeros(*expected)
            elif f.shape != expected:
                raise InvalidComplex(f"f{n} has shape {f.shape}, expected {expected}", degree=n)
            full[n] = f
        object.__setattr__(self, 'components', full)
        for n in range(lo + 1, hi + 1):
            left = self.target.diff(n) @ full[n]
            right = full[n - 1] @ self.source.diff(n)
            if left != right:
                raise InvalidComplex(f"chain map does not commute with d{n}", degree=n)

    def component(self, n):
        if n in self.components:
            return self.components[n]
        return IntMatrix.zeros(self.target.rank(n), self.source.rank(n))

    @classmethod
    def scalar(cls, c, k):
        return cls(c, c, {n: IntMatrix.identity(c.rank(n)).scale(k) for n in c.degrees()})

    @classmethod
    def identity(cls, c):
        return cls.scalar(c, 1)

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, {})


def cone_map(f: ChainMap) -> FreeComplex:
    c, d = f.source, f.target
    lo = min(d.lo, c.lo + 1)
    hi = max(d.hi, c.hi + 1)
    ranks = {n: d.rank(n) + c.rank(n - 1) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        diffs[n] = IntMatrix.block([
            [d.diff(n), f.component(n - 1)],
            [IntMatrix.zeros(c.rank(n - 2), d.rank(n)), -c.diff(n - 1)],
        ])
    return FreeComplex.build(lo, hi, ranks, diffs)


def cone_mult(c: FreeComplex, k: int) -> FreeComplex:
    """E//k, the cofiber of multiplication by k."""
    return cone_map(ChainMap.scalar(c, k))


# ---------- Homology ----------
def homology(c: FreeComplex, n: int) -> TameGroup:
    """H_n = ker d_n / im d_{n+1}; torsion comes from coker d_{n+1} since ker d_n is saturated."""
    r = c.rank(n)
    if r == 0:
        return TameGroup.zero()
    rank_out = smith_normal_form(c.diff(n)).rank
    incoming = smith_normal_form(c.diff(n + 1))
    torsion = [d for d in incoming.diagonal if d >= 2]
    return TameGroup.from_invariants(torsion, r - rank_out - incoming.rank)


def homology_groups(c: FreeComplex) -> GradedTame:
    return GradedTame({n: homology(c, n) for n in c.degrees()})


@dataclass(frozen=True)
class HomologyPresentation:
    """H_n as (+) Z/moduli[i] (modulus 0 is Z) with explicit cycle representatives.

    coordinates: h x rank(n), sends a cycle to its class coordinates
    generators:  rank(n) x h, columns are cycles representing the generators
    """

    degree: int
    moduli: tuple
    coordinates: IntMatrix
    generators: IntMatrix

    @property
    def group(self):
        atoms = []
        for m in self.moduli:
            atoms.extend([Atom.free()] if m == 0 else cyclic_atoms(m))
        return TameGroup(atoms)

    def reduce(self, m: IntMatrix) -> IntMatrix:
        return m.reduce_rows(self.moduli)


def homology_presentation(c: FreeComplex, n: int) -> HomologyPresentation:
    r = c.rank(n)
    out = smith_normal_form(c.diff(n))
    s = out.rank
    kernel = out.v.select_cols(range(s, r))
    to_kernel = out.v_inv.select_rows(range(s, r))
    boundaries = to_kernel @ c.diff(n + 1)
    snf = smith_normal_form(boundaries)
    k = r - s
    diagonal = snf.diagonal
    moduli, keep = [], []
    for i in range(k):
        m = diagonal[i] if i < len(diagonal) else 0
        if m != 1:
            moduli.append(m)
            keep.append(i)
    coordinates = (snf.u @ to_kernel).select_rows(keep)
    generators = (kernel @ snf.u_inv).select_cols(keep)
    return HomologyPresentation(n, tuple(moduli), coordinates, generators)


def induced_map(f: ChainMap, n: int, source=None, target=None) -> IntMatrix:
    """H_n(f) in the bases of the two presentations, reduced modulo the target moduli."""
    source = source or homology_presentation(f.source, n)
    target = target or homology_presentation(f.target, n)
    return target.reduce(target.coordinates @ f.component(n) @ source.generators)


# ---------- Completion ----------
def complete(c: FreeComplex, p: int) -> GradedTame:
    """pi_n of the p-completion: L0 H_n + L1 H_{n-1}, degreewise."""
    check_prime(p)
    hom = {n: homology(c, n) for n in c.degrees()}
    out = {}
    for n in range(c.lo, c.hi + 2):
        here = derived_completion(hom.get(n, TameGroup.zero()), p)
        below = derived_completion(hom.get(n - 1, TameGroup.zero()), p)
        out[n] = here.l0 + below.l1
    return GradedTame(out)


def _stage_transition(c: FreeComplex, p: int, src: FreeComplex, tgt: FreeComplex) -> ChainMap:
    """Cone(p^{k+1}) -> Cone(p^k), diag(1, p) on C_n + C_{n-1}."""
    components = {}
    for n in range(src.lo, src.hi + 1):
        components[n] = IntMatrix.diagonal([1] * c.rank(n) + [p] * c.rank(n - 1))
    return ChainMap(src, tgt, components)


class _TowerCache:
    """Stage complexes, transitions and presentations, built on demand."""

    def __init__(self, c, p):
        self.c, self.p = c, p
        self._cones = {}
        self._maps = {}
        self._pres = {}

    def cone(self, k):
        if k not in self._cones:
            self._cones[k] = cone_mult(self.c, self.p ** k)
        return self._cones[k]

    def transition(self, k):
        if k not in self._maps:
            self._maps[k] = _stage_transition(self.c, self.p, self.cone(k + 1), self.cone(k))
        return self._maps[k]

    def presentation(self, k, n):
        key = (k, n)
        if key not in self._pres:
            self._pres[key] = homology_presentation(self.cone(k), n)
        return self._pres[key]

    def step(self, k, n):
        """Induced map H_n(stage k+1) -> H_n(stage k)."""
        return induced_map(self.transition(k), n, self.presentation(k + 1, n), self.presentation(k, n))


def _exponents(p, orders):
    exps = []
    for d in orders:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e:
            exps.append(e)
    return Counter(exps)


def _image_exponents(p, composite, moduli):
    inv = image_invariants(composite, moduli)
    if inv.free_rank:
        raise VerificationFailure("stage homology of a tower must be finite")
    return _exponents(p, inv.torsion)


def _truncate(exps, k):
    """Exponents of A / p^k for a group A with the given exponents."""
    out = Counter()
    for e, mult in exps.items():
        out[min(e, k)] += mult
    return out


def _oracle_degree(cache, n, stages):
    p = cache.p
    # images of stage `stages` and of stage `stages - 1` in the current stage
    from_top = from_next = None
    images = {}
    for k in range(stages - 1, 0, -1):
        here = cache.presentation(k, n)
        step = cache.step(k, n)
        if from_top is None:
            from_top, from_next = step, IntMatrix.identity(len(here.moduli))
        else:
            from_top = here.reduce(step @ from_top)
            from_next = here.reduce(step @ from_next)
        img_top = _image_exponents(p, from_top, here.moduli)
        stable = img_top == _image_exponents(p, from_next, here.moduli)
        images[k] = img_top if stable else None
    # the stable stages form an initial run 1..level, each the reduction of the next
    level = 0
    for k in range(1, stages):
        img = images[k]
        if img is None or any(images[j] != _truncate(img, j) for j in range(1, k)):
            break
        level = k
    if not level:
        raise NoStabilization(n, stages)
    top = _exponents(p, cache.presentation(stages, n).moduli)
    return _read_limit(p, n, level, images[level], stages, top)


def _read_limit(p, n, level, image, stages, top):
    """Split the stable image at `level` into Zp summands and finite ones.

    Exponents below `level` are finite summands. Exponent `level` is shared
    by the Zp summands and the finite summands of order >= p^level; the
    top stage separates them, since Zp reaches exponent `stages` there and
    the lower homology only reaches exponents <= stages - 1 - level.
    """
    shared = image.get(level, 0)
    rank = top.get(stages, 0)
    if rank > shared:
        raise NoStabilization(n, stages)
    atoms = [Atom.padic(p)] * rank
    for e, mult in image.items():
        if e < level:
            atoms.extend([Atom.cyclic(p, e)] * mult)
    if shared > rank:
        if stages - 1 - level >= level:
            raise NoStabilization(n, stages)
        late = Counter({e: m for e, m in top.items() if level <= e < stages})
        if sum(late.values()) != shared - rank:
            raise NoStabilization(n, stages)
        for e, mult in late.items():
            atoms.extend([Atom.cyclic(p, e)] * mult)
    logger.debug("tower in degree %d stable through stage %d of %d", n, level, stages)
    return TameGroup(atoms)


def tower_oracle(c: FreeComplex, p: int, stages: int = DEFAULT_STAGES) -> GradedTame:
    """lim_k H_n(E//p^k), read off the stable images of the explicit tower.

    Stage k is stable when the images of stages `stages` and `stages - 1`
    in it coincide. Below the highest stable stage every image must be the
    reduction of the one above it; exponents that keep pace with the stage
    are Zp summands, the others are finite.
    """
    check_prime(p)
    if stages < MIN_STAGES:
        raise ValueError(f"stage budget must be >= {MIN_STAGES}")
    cache = _TowerCache(c, p)
    out = {}
    for n in range(c.lo, c.hi + 2):
        if c.rank(n) == 0 and c.rank(n - 1) == 0:
            continue
        try:
            out[n] = _oracle_degree(cache, n, stages)
        except NoStabilization as exc:
            raise NoStabilization(n, stages) from exc
    return GradedTame(out)


# ---------- Zero completion and p-equivalences ----------
def completion_vanishes(c: FreeComplex, p: int) -> bool:
    return complete(c, p).is_zero()


def mod_p_acyclic(c: FreeComplex, p: int) -> bool:
    reduced = cone_mult(c, p)
    return all(homology(reduced, n).is_zero() for n in reduced.degrees())


def homology_uniquely_p_divisible(c: FreeComplex, p: int) -> bool:
    return all(divisibility_profile(homology(c, n), p).uniquely_p_divisible for n in c.degrees())


def is_p_equivalence(f: ChainMap, p: int) -> bool:
    """f//p is an equivalence, i.e. the cone of f reduced mod p is acyclic."""
    check_prime(p)
    return mod_p_acyclic(cone_map(f), p)


def p_equivalence_via_completion(f: ChainMap, p: int) -> bool:
    return completion_vanishes(cone_map(f), p)


def is_p_connective_mod_p(c: FreeComplex, p: int, i: int) -> bool:
    """E is p-adically i-connective iff E//p has no homology below i."""
    reduced = cone_mult(c, p)
    return all(homology(reduced, n).is_zero() for n in reduced.degrees() if n < i)


def mod_power_orders(c: FreeComplex, p: int, k: int, n: int):
    """(|H_n(E//p^k)|, |H_n/p^k| * |H_{n-1}[p^k]|) for complexes with finite homology."""
    lhs = homology(cone_mult(c, p ** k), n).order()
    rhs_groups = [mod_p_power(homology(c, n), p, k), torsion_part(homology(c, n - 1), p, k)]
    return lhs, direct_sum(rhs_groups).order()


# ---------- Grammar ----------
def read_matrix(sc: Scanner, shape=None):
    """matrix := "[" row (";" row)* "]",  row := int ("," int)*"""
    sc.expect('[')
    rows = []
    while True:
        row = [sc.integer()]
        while sc.accept(','):
            row.append(sc.integer())
        if rows and len(row) != len(rows[0]):
            raise sc.error(f'{len(rows[0])} entries in row')
        rows.append(row)
        if not sc.accept(';'):
            break
    sc.expect(']')
    return IntMatrix.from_rows(rows)


def read_complex(sc: Scanner) -> FreeComplex:
    """complex := "degrees" lo ".." hi ";" ("rank" n "=" r ";")* ("d" n "=" matrix ";")*"""
    sc.expect_keyword('degrees')
    lo = sc.integer()
    sc.expect('..')
    hi = sc.integer()
    if hi < lo:
        raise sc.error(f'upper degree >= {lo}')
    sc.expect(';')
    ranks, diffs = {}, {}
    while sc.accept_keyword('rank'):
        n = sc.integer()
        sc.expect('=')
        ranks[n] = sc.count(0, 'rank')
        sc.expect(';')
    while sc.accept_keyword('d'):
        n = sc.integer()
        sc.expect('=')
        diffs[n] = read_matrix(sc)
        sc.expect(';')
    for n in ranks:
        if not lo <= n <= hi and ranks[n]:
            raise InvalidComplex(f"rank given in degree {n} outside {lo}..{hi}", degree=n)
    ranks = {n: r for n, r in ranks.items() if lo <= n <= hi}
    return FreeComplex.build(lo, hi, ranks, diffs)


def parse_complex(text: str) -> FreeComplex:
    sc = Scanner(text)
    c = read_complex(sc)
    sc.finish()
    return c


def _read_model(sc):
    """M := "Z" | "Z/" m, the sphere or Moore model in degree 0."""
    sc.expect('Z')
    if sc.accept('/'):
        return moore(sc.count(2, 'modulus'))
    return sphere(0)


def parse_chain_map(text: str) -> ChainMap:
    """`k: M -> M` for a scalar map, or `source: C target: C (f n = matrix;)*`."""
    sc = Scanner(text)
    if sc.accept_keyword('source'):
        sc.expect(':')
        source = read_complex(sc)
        sc.expect_keyword('target')
        sc.expect(':')
        target = read_complex(sc)
        components = {}
        while sc.accept_keyword('f'):
            n = sc.integer()
            sc.expect('=')
            components[n] = read_matrix(sc)
            sc.expect(';')
        sc.finish()
        return ChainMap(source, target, components)
    k = sc.integer()
    sc.expect(':')
    source = _read_model(sc)
    sc.expect('->')
    target = _read_model(sc)
    sc.finish()
    if source != target:
        raise InvalidComplex("scalar maps need equal source and target models")
    return ChainMap.scalar(source, k)
