"""
Completion service: parse inputs, run the engine, build report records
"""
from completion.abelian import (
    divisibility_profile, l1_mod_p_sequence, parse_group, derived_completion,
)
from completion.complexes import (
    DEFAULT_STAGES, complete, completion_vanishes, cone_map, homology_groups,
    is_p_equivalence, mod_p_acyclic, homology_uniquely_p_divisible,
    p_equivalence_via_completion, parse_chain_map, parse_complex, tower_oracle,
)
from completion.errors import NoStabilization
from completion.presheaf import (
    CoproductPresheaf, complete_sectionwise, li_sectionwise_check,
    parse_presheaf, product_preservation_check,
)
from completion.tstructure import FormalSpectrum, p_homotopy, parse_spectrum, pi_p
from completion.unstable import (
    FormalSpace, complete_em, complete_space, is_p_complete, parse_space,
    postnikov_limit_check,
)


def _spectrum_from_text(text):
    """A spectrum is given either by its homotopy or by a complex."""
    if text.lstrip().startswith('degrees'):
        return FormalSpectrum.from_complex(parse_complex(text)), 'complex'
    return parse_spectrum(text), 'homotopy'


def oracle_with_retry(c, p, stages):
    """Tower oracle at the given budget, retried once at twice the budget."""
    try:
        return tower_oracle(c, p, stages), stages
    except NoStabilization:
        return tower_oracle(c, p, 2 * stages), 2 * stages


class CompletionService:
    """Report builders shared by the command line and the HTTP API."""

    @staticmethod
    def li(group_text, p):
        a = parse_group(group_text)
        completion = derived_completion(a, p)
        profile = divisibility_profile(a, p)
        witness = l1_mod_p_sequence(a, p)
        return {
            'command': 'li',
            'input': str(a),
            'prime': p,
            'provenance': 'engine',
            'l0': str(completion.l0),
            'l1': str(completion.l1),
            'profile': profile._asdict(),
            'l1_mod_p': {
                'left': str(witness.left),
                'middle': str(witness.middle),
                'right': str(witness.right),
            },
            'passed': True,
        }

    @staticmethod
    def complete(complex_text, p, stages=DEFAULT_STAGES):
        c = parse_complex(complex_text)
        engine = complete(c, p)
        oracle, used = oracle_with_retry(c, p, stages)
        return {
            'command': 'complete',
            'input': str(c),
            'prime': p,
            'homology': homology_groups(c).to_dict(),
            'engine': engine.to_dict(),
            'oracle': oracle.to_dict(),
            'oracle_stages': used,
            'zero_completion': {
                'completion_vanishes': completion_vanishes(c, p),
                'mod_p_acyclic': mod_p_acyclic(c, p),
                'homology_uniquely_p_divisible': homology_uniquely_p_divisible(c, p),
            },
            'passed': engine == oracle,
        }

    @staticmethod
    def ses(spectrum_text, p, degree=None):
        e, source = _spectrum_from_text(spectrum_text)
        records = [pi_p(e, p, degree)] if degree is not None else p_homotopy(e, p)
        return {
            'command': 'ses',
            'input': str(e),
            'input_kind': source,
            'prime': p,
            'provenance': 'engine',
            'records': [r.to_dict() for r in records],
            'unresolved': [r.degree for r in records if not r.resolved],
            'passed': True,
        }

    @staticmethod
    def peq(map_text, p):
        f = parse_chain_map(map_text)
        direct = is_p_equivalence(f, p)
        via_completion = p_equivalence_via_completion(f, p)
        return {
            'command': 'peq',
            'input': map_text.strip(),
            'prime': p,
            'cone_homology': homology_groups(cone_map(f)).to_dict(),
            'p_equivalence': direct,
            'via_completion': via_completion,
            'passed': direct == via_completion,
        }

    @staticmethod
    def em(space_text, p):
        x = parse_space(space_text)
        result = FormalSpace.point()
        for n, a in x.homotopy.items():
            result = result * complete_em(a, n, p)
        return {
            'command': 'em',
            'input': str(x),
            'prime': p,
            'provenance': 'engine',
            'completion': str(result),
            'passed': True,
        }

    @staticmethod
    def space(space_text, p):
        x = parse_space(space_text)
        records = p_homotopy(FormalSpectrum(x.homotopy), p)
        completion = complete_space(x, p)
        return {
            'command': 'space',
            'input': str(x),
            'prime': p,
            'records': [r.to_dict() for r in records],
            'completion': str(completion),
            'p_complete': is_p_complete(x, p),
            'passed': True,
        }

    @staticmethod
    def postnikov_check(space_text, p):
        x = parse_space(space_text)
        passed = postnikov_limit_check(x, p)
        return {
            'command': 'postnikov-check',
            'input': str(x),
            'prime': p,
            'completion': str(complete_space(x, p)),
            'passed': passed,
        }

    @staticmethod
    def presheaf(presheaf_text, p):
        f = parse_presheaf(presheaf_text)
        completed = complete_sectionwise(f, p)
        checks = {}
        if f.is_heart_valued():
            checks['l0_sectionwise'] = li_sectionwise_check(f, p, 0)
            checks['l1_sectionwise'] = li_sectionwise_check(f, p, 1)
        checks['product_preservation'] = product_preservation_check(CoproductPresheaf(f), p)
        restriction_ok = all(
            complete_sectionwise(f.restrict(s), p) == completed.restrict(s)
            for s in f.poset.down_closed_subsets()
        )
        checks['commutes_with_restriction'] = restriction_ok
        return {
            'command': 'presheaf',
            'input': str(f),
            'prime': p,
            'sections': {u: str(completed.section(u)) for u in f.poset.elements},
            'checks': checks,
            'passed': all(checks.values()),
        }
