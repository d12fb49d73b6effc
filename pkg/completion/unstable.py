"""
Unstable completion of simply connected formal spaces

A formal space is a finite product of Eilenberg-MacLane spaces K(A, n),
n >= 2, i.e. a Postnikov system with trivial k-invariants.
"""
import logging
from dataclasses import dataclass, field

from completion.abelian import TameGroup, check_prime, derived_completion, read_group
from completion.complexes import GradedTame
from completion.parsing import Scanner
from completion.tstructure import FormalSpectrum, p_homotopy

logger = logging.getLogger(__name__)

MIN_DEGREE = 2


@dataclass(frozen=True)
class FormalSpace:
    homotopy: GradedTame = field(default_factory=GradedTame)

    def __post_init__(self):
        low = [n for n in self.homotopy.support() if n < MIN_DEGREE]
        if low:
            raise ValueError(f"formal spaces are simply connected; got homotopy in degree {low[0]}")

    @classmethod
    def point(cls):
        return cls()

    @classmethod
    def em(cls, a: TameGroup, n: int):
        """K(a, n)"""
        if n < MIN_DEGREE:
            raise ValueError(f"K(A, n) needs n >= {MIN_DEGREE}")
        return cls(GradedTame({n: a}))

    @classmethod
    def from_groups(cls, groups):
        return cls(GradedTame(groups))

    def __getitem__(self, n):
        return self.homotopy[n]

    def __mul__(self, other):
        return FormalSpace(self.homotopy + other.homotopy)

    def support(self):
        return self.homotopy.support()

    def is_point(self):
        return self.homotopy.is_zero()

    def truncate(self, k):
        """tau_{<=k}: drop homotopy above degree k."""
        return FormalSpace.from_groups({n: g for n, g in self.homotopy.items() if n <= k})

    def fiber(self, a: TameGroup, n: int):
        """Fiber of the projection onto a K(a, n) factor."""
        groups = dict(self.homotopy.items())
        groups[n] = self[n].minus(a)
        return FormalSpace.from_groups(groups)

    def __str__(self):
        if self.is_point():
            return 'point'
        return ' x '.join(f'K({g}, {n})' for n, g in self.homotopy.items())


def complete_em(a: TameGroup, n: int, p: int) -> FormalSpace:
    """K(A, n)^ has L0 A in degree n and L1 A in degree n+1."""
    check_prime(p)
    if n < MIN_DEGREE:
        raise ValueError(f"K(A, n) needs n >= {MIN_DEGREE}")
    completion = derived_completion(a, p)
    return FormalSpace.from_groups({n: completion.l0, n + 1: completion.l1})


def complete_space(x: FormalSpace, p: int) -> FormalSpace:
    """Degreewise middle of 0 -> L0 pi_n -> pi_n(X^) -> L1 pi_{n-1} -> 0.

    Raises UnresolvedExtension when both ends are nonzero and no split
    criterion applies.
    """
    check_prime(p)
    records = p_homotopy(FormalSpectrum(x.homotopy), p)
    return FormalSpace.from_groups({r.degree: r.require_middle() for r in records})


def is_p_complete(x: FormalSpace, p: int) -> bool:
    return complete_space(x, p) == x


def product_check(x: FormalSpace, y: FormalSpace, p: int) -> bool:
    return complete_space(x * y, p) == complete_space(x, p) * complete_space(y, p)


def postnikov_limit_check(x: FormalSpace, p: int) -> bool:
    """X^ against the degreewise eventual value of (tau_{<=k} X)^."""
    top = max(x.support(), default=MIN_DEGREE)
    stages = {k: complete_space(x.truncate(k), p) for k in range(MIN_DEGREE, top + 2)}
    direct = complete_space(x, p)
    degrees = set(direct.support())
    for stage in stages.values():
        degrees |= set(stage.support())
    limit = {}
    for m in sorted(degrees):
        # degree m of the completion only sees pi_m and pi_{m-1}
        values = {stages[k][m] for k in stages if k >= m}
        if len(values) > 1:
            logger.debug("degree %d of the Postnikov tower does not stabilize: %s", m, values)
            return False
        limit[m] = values.pop() if values else stages[top + 1][m]
    return FormalSpace.from_groups(limit) == direct


def fiber_completion_check(base: FormalSpace, a: TameGroup, n: int, p: int) -> bool:
    """Complete base x K(a, n+1), take the fiber over K(a, n+1)^, compare with base^."""
    if n + 1 < MIN_DEGREE:
        raise ValueError(f"the EM factor needs degree >= {MIN_DEGREE}")
    total = complete_space(base * FormalSpace.em(a, n + 1), p)
    factor = complete_em(a, n + 1, p)
    try:
        fiber = FormalSpace.from_groups({m: total[m].minus(factor[m]) for m in
                                         set(total.support()) | set(factor.support())})
    except ValueError:
        return False
    return fiber == complete_space(base, p)


# ---------- Grammar ----------
def read_space(sc: Scanner) -> FormalSpace:
    """space := "point" | "K(" group "," n ")" ("x" "K(" group "," n ")")*"""
    if sc.accept_keyword('point'):
        return FormalSpace.point()
    x = FormalSpace.point()
    while True:
        sc.expect('K')
        sc.expect('(')
        g = read_group(sc)
        sc.expect(',')
        n = sc.count(MIN_DEGREE, 'degree')
        sc.expect(')')
        x = x * FormalSpace.em(g, n)
        if not sc.accept_keyword('x'):
            return x


def parse_space(text: str) -> FormalSpace:
    sc = Scanner(text)
    x = read_space(sc)
    sc.finish()
    return x
