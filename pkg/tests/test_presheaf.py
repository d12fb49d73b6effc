import pytest
from hypothesis import assume, given, strategies as st

from completion.abelian import TameGroup, derived_completion
from completion.errors import InvalidComparison, ParseError
from completion.presheaf import (
    CoproductPresheaf, FinitePoset, SpectralPresheaf, complete_sectionwise,
    li_sectionwise_check, parse_presheaf, product_preservation_check,
    sectionwise_p_equivalence,
)
from completion.sampling import make_rng, random_poset, random_presheaf
from completion.tstructure import Comparison, parse_spectrum

primes = st.sampled_from([2, 3, 5])
seeds = st.integers(min_value=0, max_value=2 ** 32)


def chain(*names):
    return FinitePoset.from_edges(names, list(zip(names, names[1:])))


def constant(poset, text):
    return SpectralPresheaf(poset, {u: parse_spectrum(text) for u in poset.elements})


# ---------- Posets ----------
def test_from_edges_closes_the_relation():
    poset = chain('a', 'b', 'c')
    assert poset.le('a', 'c')
    assert not poset.le('c', 'a')
    assert poset.between('a', 'c') == ['b']
    assert poset.strict_pairs() == [('b', 'a'), ('c', 'a'), ('c', 'b')]


def test_poset_axioms():
    with pytest.raises(ValueError):
        FinitePoset(('a',), frozenset())
    with pytest.raises(ValueError):
        FinitePoset(('a', 'b'), frozenset({('a', 'a'), ('b', 'b'), ('a', 'b'), ('b', 'a')}))
    with pytest.raises(ValueError):
        FinitePoset(('a', 'a'), frozenset({('a', 'a')}))
    with pytest.raises(ValueError):
        FinitePoset.from_edges(['a'], [('a', 'z')])


def test_down_closed_subsets():
    assert chain('a', 'b').down_closed_subsets() == [(), ('a',), ('a', 'b')]
    assert len(FinitePoset.discrete(['u', 'v', 'w']).down_closed_subsets()) == 8


@given(seeds)
def test_random_posets_are_partial_orders(seed):
    poset = random_poset(make_rng(seed))
    for u, v in poset.leq:
        for w in poset.elements:
            if poset.le(v, w):
                assert poset.le(u, w)


# ---------- Presheaves ----------
def test_restrictions_must_follow_the_order():
    poset = chain('a', 'b')
    sections = {u: parse_spectrum("0: Z") for u in poset.elements}
    with pytest.raises(InvalidComparison):
        SpectralPresheaf(poset, sections, {('a', 'b'): Comparison({0: [(0, 0)]})})


def test_missing_section_is_rejected():
    with pytest.raises(ValueError):
        SpectralPresheaf(chain('a', 'b'), {'a': parse_spectrum("0")})


def test_functoriality_violation():
    poset = chain('a', 'b', 'c')
    sections = {u: parse_spectrum("0: Z/4 + Z/4") for u in poset.elements}
    straight = Comparison({0: [(0, 0), (1, 1)]})
    with pytest.raises(InvalidComparison):
        SpectralPresheaf(poset, sections, {
            ('c', 'b'): straight,
            ('b', 'a'): straight,
            ('c', 'a'): Comparison({0: [(0, 1), (1, 0)]}),
        })


def test_default_restriction_is_the_composite():
    poset = chain('a', 'b', 'c')
    sections = {u: parse_spectrum("0: Z/4 + Z/4") for u in poset.elements}
    swap = Comparison({0: [(0, 1), (1, 0)]})
    f = SpectralPresheaf(poset, sections, {('c', 'b'): swap, ('b', 'a'): swap})
    assert f.restriction('c', 'a') == Comparison.identity(sections['a'])


def test_restrict_needs_down_closed_subset():
    f = constant(chain('a', 'b'), "0: Z")
    assert f.restrict(['a']).poset.elements == ('a',)
    with pytest.raises(ValueError):
        f.restrict(['b'])


# ---------- Sectionwise completion ----------
def test_constant_presheaf_completes_sectionwise():
    completed = complete_sectionwise(constant(chain('a', 'b'), "0: Z"), 2)
    for u in ('a', 'b'):
        assert completed.section(u) == parse_spectrum("0: Zp(2)")
    assert completed.restriction('b', 'a') == Comparison({0: [(0, 0)]})


def test_discrete_presheaf_completes_sectionwise():
    poset = FinitePoset.discrete(['u', 'v'])
    f = SpectralPresheaf(poset, {'u': parse_spectrum("0: Z"), 'v': parse_spectrum("0: Prufer(2)")})
    completed = complete_sectionwise(f, 2)
    assert completed.section('u') == parse_spectrum("0: Zp(2)")
    assert completed.section('v') == parse_spectrum("1: Zp(2)")


def test_zero_presheaf_completes_to_zero():
    completed = complete_sectionwise(constant(chain('a', 'b', 'c'), "0"), 3)
    assert all(completed.section(u).is_zero() for u in ('a', 'b', 'c'))


@given(seeds, primes)
def test_completion_commutes_with_restriction(seed, p):
    rng = make_rng(seed)
    poset = random_poset(rng)
    f = random_presheaf(rng, poset, p)
    completed = complete_sectionwise(f, p)
    for subset in poset.down_closed_subsets():
        assert complete_sectionwise(f.restrict(subset), p) == completed.restrict(subset)


# ---------- L0 and L1 ----------
def test_li_sectionwise_on_reduction():
    poset = chain('a', 'b')
    f = SpectralPresheaf(poset, {'a': parse_spectrum("0: Z/2"), 'b': parse_spectrum("0: Z/4")})
    assert f.restriction('b', 'a') == Comparison({0: [(0, 0)]})
    assert li_sectionwise_check(f, 2, 0)
    assert li_sectionwise_check(f, 2, 1)


def test_li_sectionwise_arguments():
    f = constant(chain('a', 'b'), "0: Z")
    with pytest.raises(ValueError):
        li_sectionwise_check(f, 2, 2)
    with pytest.raises(ValueError):
        li_sectionwise_check(constant(chain('a', 'b'), "1: Z"), 2, 0)


@given(seeds, primes)
def test_li_sectionwise_on_random_presheaves(seed, p):
    rng = make_rng(seed)
    f = random_presheaf(rng, random_poset(rng), p)
    assert li_sectionwise_check(f, p, 0)
    assert li_sectionwise_check(f, p, 1)


# ---------- Coproducts ----------
def test_product_preservation_examples():
    single = FinitePoset.discrete(['u'])
    f = SpectralPresheaf(single, {'u': parse_spectrum("0: Prufer(2) + Z")})
    assert product_preservation_check(CoproductPresheaf(f), 2)
    unresolved = SpectralPresheaf(single, {'u': parse_spectrum("0: Prufer(2); 1: Z")})
    assert product_preservation_check(CoproductPresheaf(unresolved), 2)


def test_empty_coproduct_is_zero():
    f = constant(chain('a', 'b'), "0: Z")
    coproducts = CoproductPresheaf(f)
    assert () in coproducts.objects()
    assert coproducts.section(()).is_zero()
    assert coproducts.section(('a', 'a', 'b')) == parse_spectrum("0: Z^3")


@given(seeds, primes)
def test_product_preservation_on_random_presheaves(seed, p):
    rng = make_rng(seed)
    f = random_presheaf(rng, random_poset(rng, size=3), p)
    assert product_preservation_check(CoproductPresheaf(f, max_size=2), p)


# ---------- p-equivalences ----------
def test_sectionwise_p_equivalence():
    single = FinitePoset.discrete(['u'])
    f = SpectralPresheaf(single, {'u': parse_spectrum("0: Z + Z/3")})
    g = SpectralPresheaf(single, {'u': parse_spectrum("0: Zp(2)")})
    comparisons = {'u': Comparison({0: [(0, 0)]})}
    assert sectionwise_p_equivalence(f, g, comparisons, 2)
    assert not sectionwise_p_equivalence(f, g, comparisons, 3)
    other = SpectralPresheaf(FinitePoset.discrete(['w']), {'w': parse_spectrum("0: Zp(2)")})
    assert not sectionwise_p_equivalence(f, other, comparisons, 2)


@given(seeds, primes)
def test_identity_is_a_sectionwise_p_equivalence(seed, p):
    rng = make_rng(seed)
    f = random_presheaf(rng, random_poset(rng), p)
    identities = {u: Comparison.identity(f.section(u)) for u in f.poset.elements}
    assert sectionwise_p_equivalence(f, f, identities, p)


def test_sectionwise_p_equivalent_presheaves_have_equal_completions():
    single = FinitePoset.discrete(['u'])
    f = SpectralPresheaf(single, {'u': parse_spectrum("0: Z + Z/3")})
    g = SpectralPresheaf(single, {'u': parse_spectrum("0: Zp(2)")})
    assert sectionwise_p_equivalence(f, g, {'u': Comparison({0: [(0, 0)]})}, 2)
    assert complete_sectionwise(f, 2).section('u') == complete_sectionwise(g, 2).section('u')
    assert complete_sectionwise(f, 2).section('u') == parse_spectrum("0: Zp(2)")


def completion_unit(section, completed, p):
    """Pair each atom in degree 0 with the copy of its L0 in the completed section."""
    targets = completed[0].summands
    used, pairs = set(), []
    for i, atom in enumerate(section[0].summands):
        for b in derived_completion(TameGroup.of(atom), p).l0:
            j = next(k for k, t in enumerate(targets) if t == b and k not in used)
            used.add(j)
            pairs.append((i, j))
    return Comparison({0: pairs})


@given(seeds, primes)
def test_presheaf_and_its_completion_complete_alike(seed, p):
    rng = make_rng(seed)
    f = random_presheaf(rng, random_poset(rng), p)
    # a summand with nonzero L1 moves up a degree, which a degree-0 comparison cannot pair
    assume(all(derived_completion(s[0], p).l1.is_zero() for s in f.sections.values()))
    g = complete_sectionwise(f, p)
    unit = {u: completion_unit(f.section(u), g.section(u), p) for u in f.poset.elements}
    assert sectionwise_p_equivalence(f, g, unit, p)
    once, twice = complete_sectionwise(f, p), complete_sectionwise(g, p)
    assert all(once.section(u) == twice.section(u) for u in f.poset.elements)
    assert once.restrictions == twice.restrictions


# ---------- Grammar ----------
def test_parse_presheaf():
    f = parse_presheaf("""
        poset a, b;
        le a b;
        section a = Z/2;
        section b = Z/4;
        section b @ 1 = Prufer(3);
        restrict b a = Z/4 -> Z/2;
    """)
    assert f.poset.le('a', 'b')
    assert f.section("b") == parse_spectrum("0: Z/4; 1: Prufer(3)")
    assert f.restriction('b', 'a') == Comparison({0: [(0, 0)]})


def test_presheaf_str_round_trips_sections():
    f = parse_presheaf("poset a, b, c; le a b; le a c; section b = Z + Q; section c @ 2 = Zp(5);")
    again = parse_presheaf(str(f))
    assert again.poset == f.poset
    assert again.sections == f.sections


def test_parse_presheaf_errors():
    with pytest.raises(ParseError) as info:
        parse_presheaf("poset a, b; le a c;")
    assert info.value.position == 17
    with pytest.raises(ParseError):
        parse_presheaf("poset a, b; le a b; section a = Z; section b = Z; restrict b a = Z -> Z/2;")
    with pytest.raises(InvalidComparison):
        parse_presheaf("poset a; section a = Z; restrict a a = Z -> Z;")
    with pytest.raises(ParseError):
        parse_presheaf("poset a, b; le a b; section a = Z; restrict b a = Z -> Z;")
    with pytest.raises(ParseError):
        parse_presheaf("poset a; frobnicate a;")
