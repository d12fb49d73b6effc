"""
Seeded property suite over random complexes, groups, spaces and presheaves
"""
import logging

from completion.abelian import Atom, TameGroup, l1_mod_p_sequence
from completion.complexes import (
    GradedTame, complete, completion_vanishes, homology_uniquely_p_divisible, mod_p_acyclic,
)
from completion.errors import CompletionError, NoStabilization, UnresolvedExtension
from completion.presheaf import complete_sectionwise, li_sectionwise_check
from completion.sampling import (
    PRIMES, make_rng, random_complex, random_formal_space, random_poset,
    random_presheaf, random_tame_group,
)
from completion.tstructure import FormalSpectrum, is_in_p_heart, p_homotopy
from completion.unstable import FormalSpace, complete_em, postnikov_limit_check

from app.services.completion_service import oracle_with_retry

logger = logging.getLogger(__name__)

MAX_DETAILS = 5


class CheckResult:
    """Tally for one suite row."""

    def __init__(self, name):
        self.name = name
        self.total = 0
        self.failures = 0
        self.skipped = 0
        self.details = []
        self.extra = {}

    def record(self, ok, detail=None):
        self.total += 1
        if not ok:
            self.failures += 1
            if detail and len(self.details) < MAX_DETAILS:
                self.details.append(detail)

    def skip(self, detail=None):
        self.skipped += 1
        if detail and len(self.details) < MAX_DETAILS:
            self.details.append(detail)

    @property
    def passed(self):
        return self.failures == 0 and self.extra.get('floor_met', True)

    def to_dict(self):
        row = {
            'name': self.name,
            'passed': self.passed,
            'total': self.total,
            'failures': self.failures,
            'skipped': self.skipped,
            'details': list(self.details),
        }
        row.update(self.extra)
        return row


def _atom_families(p):
    q = next(r for r in (2, 3, 5, 7) if r != p)
    return [
        Atom.free(), Atom.cyclic(p, 2), Atom.cyclic(q, 1), Atom.prufer(p), Atom.prufer(q),
        Atom.rationals(), Atom.padic(p), Atom.padic(q), Atom.inverted(p), Atom.inverted(q),
    ]


class SuiteService:
    """Runs every property check from a single seed."""

    @staticmethod
    def run(seed, settings):
        rng = make_rng(seed)
        stages = settings['STAGE_BUDGET']
        rows = []
        rows.extend(SuiteService._complex_checks(rng, settings['SUITE_COMPLEXES'], stages))
        rows.append(SuiteService._l1_mod_p_check(rng, settings['SUITE_TAME_SUMS']))
        rows.append(SuiteService._prufer_shift_check())
        rows.append(SuiteService._postnikov_check(
            rng, settings['SUITE_SPACES'], settings['SUITE_RESOLVABLE_FLOOR']))
        rows.append(SuiteService._heart_check(rng, settings['SUITE_COMPLEXES']))
        rows.append(SuiteService._presheaf_check(rng, settings['SUITE_PRESHEAVES']))
        table = [row.to_dict() for row in rows]
        return {
            'command': 'suite',
            'seed': seed,
            'checks': table,
            'passed': all(row['passed'] for row in table),
        }

    @staticmethod
    def _complex_checks(rng, count, stages):
        oracle = CheckResult('oracle_equivalence')
        zero = CheckResult('zero_completion_equivalence')
        ses = CheckResult('ses_consistency')
        truncation = CheckResult('truncatedness')
        for index in range(count):
            p = PRIMES[index % len(PRIMES)]
            c = random_complex(rng)
            engine = complete(c, p)
            try:
                tower, _ = oracle_with_retry(c, p, stages)
                oracle.record(engine == tower, f"#{index} p={p}: engine {engine} vs oracle {tower}")
            except NoStabilization as exc:
                oracle.record(False, f"#{index} p={p}: {exc}")
            flags = (completion_vanishes(c, p), mod_p_acyclic(c, p),
                     homology_uniquely_p_divisible(c, p))
            zero.record(len(set(flags)) == 1, f"#{index} p={p}: {flags}")
            records = p_homotopy(FormalSpectrum.from_complex(c), p)
            middles = GradedTame({r.degree: r.middle for r in records if r.resolved})
            ses.record(all(r.resolved for r in records) and middles == engine,
                       f"#{index} p={p}: {middles} vs {engine}")
            support = c.support()
            if support:
                k = max(support)
                truncation.record(all(n <= k + 1 for n in engine.support()),
                                  f"#{index} p={p}: support {engine.support()} above {k + 1}")
            if index % 50 == 49:
                logger.debug("suite: %d complexes done", index + 1)
        return [oracle, zero, ses, truncation]

    @staticmethod
    def _l1_mod_p_check(rng, count):
        result = CheckResult('l1_mod_p_sequence')
        for p in PRIMES:
            for atom in _atom_families(p):
                result.record(SuiteService._l1_ok(TameGroup.of(atom), p), f"{atom} at {p}")
        for index in range(count):
            p = PRIMES[index % len(PRIMES)]
            a = random_tame_group(rng)
            result.record(SuiteService._l1_ok(a, p), f"#{index}: {a} at {p}")
        return result

    @staticmethod
    def _l1_ok(a, p):
        try:
            l1_mod_p_sequence(a, p)
        except CompletionError:
            return False
        return True

    @staticmethod
    def _prufer_shift_check():
        result = CheckResult('prufer_shift')
        for p in (2, 3):
            for n in (2, 3, 4):
                shifted = complete_em(TameGroup.of(Atom.prufer(p)), n, p)
                expected = FormalSpace.em(TameGroup.of(Atom.padic(p)), n + 1)
                result.record(shifted == expected, f"K(Prufer({p}), {n}) -> {shifted}")
                rational = complete_em(TameGroup.of(Atom.rationals()), n, p)
                result.record(rational.is_point(), f"K(Q, {n}) -> {rational}")
        return result

    @staticmethod
    def _postnikov_check(rng, count, floor):
        result = CheckResult('postnikov_limit')
        for index in range(count):
            p = PRIMES[index % len(PRIMES)]
            x = random_formal_space(rng)
            try:
                result.record(postnikov_limit_check(x, p), f"#{index} p={p}: {x}")
            except UnresolvedExtension as exc:
                result.skip(f"#{index} p={p}: {exc}")
        share = result.total / count if count else 1.0
        result.extra = {'resolvable_share': round(share, 4), 'floor_met': share >= floor}
        return result

    @staticmethod
    def _heart_check(rng, count):
        result = CheckResult('heart_predicates')
        for index in range(count):
            p = PRIMES[index % len(PRIMES)]
            e = FormalSpectrum.from_groups({0: random_tame_group(rng), 1: random_tame_group(rng)})
            for record in p_homotopy(e, p):
                if record.resolved:
                    result.record(is_in_p_heart(FormalSpectrum.concentrated(record.middle), p),
                                  f"#{index} p={p}: {record.middle}")
        for p in PRIMES:
            for atom in (Atom.free(), Atom.rationals(), Atom.prufer(p)):
                e = FormalSpectrum.concentrated(TameGroup.of(atom))
                result.record(not is_in_p_heart(e, p), f"{atom} at {p} lies in the heart")
        return result

    @staticmethod
    def _presheaf_check(rng, count):
        result = CheckResult('sectionwise_completion')
        for index in range(count):
            p = PRIMES[index % len(PRIMES)]
            poset = random_poset(rng)
            f = random_presheaf(rng, poset, p)
            completed = complete_sectionwise(f, p)
            ok = all(
                complete_sectionwise(f.restrict(s), p) == completed.restrict(s)
                for s in poset.down_closed_subsets()
            )
            ok = ok and li_sectionwise_check(f, p, 0) and li_sectionwise_check(f, p, 1)
            result.record(ok, f"#{index} p={p}:\n{f}")
        return result
