"""
Presheaves of formal spectra on a finite poset, completed section by section
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from completion.abelian import TameGroup, derived_completion, read_atoms, read_group
from completion.errors import InvalidComparison
from completion.parsing import Scanner
from completion.tstructure import (
    Comparison, FormalSpectrum, complete_spectrum, p_homotopy,
    recognize_p_equivalence, transport,
)

logger = logging.getLogger(__name__)

MAX_COPRODUCT = 3


# ---------- Posets ----------
@dataclass(frozen=True)
class FinitePoset:
    elements: tuple
    leq: frozenset

    def __post_init__(self):
        elements = tuple(self.elements)
        if len(set(elements)) != len(elements):
            raise ValueError("poset elements must be distinct")
        object.__setattr__(self, 'elements', elements)
        rel = frozenset(self.leq)
        object.__setattr__(self, 'leq', rel)
        names = set(elements)
        for u, v in rel:
            if u not in names or v not in names:
                raise ValueError(f"relation {u} <= {v} mentions an unknown element")
        for u in elements:
            if (u, u) not in rel:
                raise ValueError(f"relation is not reflexive at {u}")
        for u, v in rel:
            if u != v and (v, u) in rel:
                raise ValueError(f"relation is not antisymmetric: {u} <= {v} <= {u}")
            for w in elements:
                if (v, w) in rel and (u, w) not in rel:
                    raise ValueError(f"relation is not transitive: {u} <= {v} <= {w}")

    @classmethod
    def from_edges(cls, elements, edges):
        """Reflexive-transitive closure of the generating relations u <= v."""
        elements = tuple(elements)
        rel = {(u, u) for u in elements} | set(edges)
        for w in elements:
            for u in elements:
                if (u, w) not in rel:
                    continue
                for v in elements:
                    if (w, v) in rel:
                        rel.add((u, v))
        return cls(elements, frozenset(rel))

    @classmethod
    def discrete(cls, elements):
        return cls.from_edges(elements, ())

    def le(self, u, v):
        return (u, v) in self.leq

    def strict_pairs(self):
        """(v, u) with u < v, in a deterministic order."""
        order = {e: i for i, e in enumerate(self.elements)}
        pairs = [(v, u) for u, v in self.leq if u != v]
        return sorted(pairs, key=lambda vu: (order[vu[0]], order[vu[1]]))

    def between(self, u, v):
        """Elements strictly between u and v."""
        return [w for w in self.elements if w not in (u, v) and self.le(u, w) and self.le(w, v)]

    def is_down_closed(self, subset):
        subset = set(subset)
        return all(u in subset for u, v in self.leq if v in subset)

    def restrict(self, subset):
        keep = [e for e in self.elements if e in set(subset)]
        return FinitePoset(tuple(keep), frozenset((u, v) for u, v in self.leq if u in keep and v in keep))

    def down_closed_subsets(self):
        out = []
        for mask in range(1 << len(self.elements)):
            subset = [e for i, e in enumerate(self.elements) if mask >> i & 1]
            if self.is_down_closed(subset):
                out.append(tuple(subset))
        return out


# ---------- Presheaves ----------
@dataclass(frozen=True)
class SpectralPresheaf:
    """Sections F(u) and restriction correspondences F(v) -> F(u) for u < v."""

    poset: FinitePoset
    sections: dict
    restrictions: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [e for e in self.poset.elements if e not in self.sections]
        if missing:
            raise ValueError(f"no section given for {missing[0]}")
        declared = dict(self.restrictions)
        for key in declared:
            v, u = key
            if u == v or not self.poset.le(u, v):
                raise InvalidComparison(f"restriction {v} -> {u} does not follow the order")
        object.__setattr__(self, 'restrictions', _fill_restrictions(self.poset, self.sections, declared))
        for (v, u), comparison in self.restrictions.items():
            comparison.validate(self.sections[v], self.sections[u])
        self._check_functoriality()

    def _check_functoriality(self):
        for (v, u), declared in self.restrictions.items():
            for w in self.poset.between(u, v):
                composite = self.restrictions[(v, w)].compose(self.restrictions[(w, u)])
                if composite != declared:
                    raise InvalidComparison(
                        f"restriction {v} -> {u} is not the composite through {w}")

    def section(self, u):
        return self.sections[u]

    def restriction(self, v, u):
        if u == v:
            return Comparison.identity(self.sections[u])
        return self.restrictions[(v, u)]

    def restrict(self, subset):
        """Restriction to a down-closed sub-poset."""
        if not self.poset.is_down_closed(subset):
            raise ValueError(f"{sorted(subset)} is not down-closed")
        sub = self.poset.restrict(subset)
        keep = set(sub.elements)
        return SpectralPresheaf(
            sub,
            {u: s for u, s in self.sections.items() if u in keep},
            {k: c for k, c in self.restrictions.items() if k[0] in keep and k[1] in keep},
        )

    def is_heart_valued(self):
        return all(set(s.support()) <= {0} for s in self.sections.values())

    def __str__(self):
        lines = [f"poset {', '.join(self.poset.elements)};"]
        for u, v in sorted(self.poset.leq):
            if u != v:
                lines.append(f"le {u} {v};")
        for u in self.poset.elements:
            s = self.sections[u]
            if s.is_zero():
                lines.append(f"section {u} = 0;")
            for n, g in s.homotopy.items():
                lines.append(f"section {u} = {g};" if n == 0 else f"section {u} @ {n} = {g};")
        return '\n'.join(lines)


def _fill_restrictions(poset, sections, declared):
    """Missing restrictions: composite through an intermediate element, else greedy."""
    out = dict(declared)
    pairs = sorted(poset.strict_pairs(), key=lambda vu: len(poset.between(vu[1], vu[0])))
    for v, u in pairs:
        if (v, u) in out:
            continue
        for w in poset.between(u, v):
            if (v, w) in out and (w, u) in out:
                out[(v, u)] = out[(v, w)].compose(out[(w, u)])
                break
        else:
            out[(v, u)] = Comparison.greedy(sections[v], sections[u])
    return out


def complete_sectionwise(f: SpectralPresheaf, p: int) -> SpectralPresheaf:
    """Replace each section by its completion; restrictions are transported."""
    sections = {u: complete_spectrum(s, p) for u, s in f.sections.items()}
    restrictions = {
        (v, u): transport(c, f.sections[v], f.sections[u], p)
        for (v, u), c in f.restrictions.items()
    }
    return SpectralPresheaf(f.poset, sections, restrictions)


def _li_positions(group, p, i):
    entries = []
    for k, atom in enumerate(group.summands):
        completion = derived_completion(TameGroup.of(atom), p)
        for b in (completion.l0 if i == 0 else completion.l1):
            entries.append((b, k))
    entries.sort(key=lambda entry: entry[0].sort_key())
    return {k: pos for pos, (_, k) in enumerate(entries)}


def li_presheaf(f: SpectralPresheaf, p: int, i: int) -> SpectralPresheaf:
    """u -> L_i(F(u)) in degree 0, with the restriction pattern carried along."""
    sections, restrictions = {}, {}
    for u, s in f.sections.items():
        completion = derived_completion(s[0], p)
        sections[u] = FormalSpectrum.concentrated(completion.l0 if i == 0 else completion.l1)
    for (v, u), c in f.restrictions.items():
        src = _li_positions(f.sections[v][0], p, i)
        tgt = _li_positions(f.sections[u][0], p, i)
        restrictions[(v, u)] = Comparison(
            {0: [(src[a], tgt[b]) for a, b in c.at(0) if a in src and b in tgt]})
    return SpectralPresheaf(f.poset, sections, restrictions)


def li_sectionwise_check(f: SpectralPresheaf, p: int, i: int) -> bool:
    """L_i computed section by section is a presheaf and agrees with the completion."""
    if i not in (0, 1):
        raise ValueError("only L0 and L1 can be nonzero")
    if not f.is_heart_valued():
        raise ValueError("li_sectionwise_check needs a presheaf concentrated in degree 0")
    try:
        direct = li_presheaf(f, p, i)
        completed = complete_sectionwise(f, p)
    except InvalidComparison as exc:
        logger.debug("sectionwise L%d is not functorial: %s", i, exc)
        return False
    for u in f.poset.elements:
        if completed.section(u)[i] != direct.section(u)[0]:
            return False
    for key, c in direct.restrictions.items():
        if Comparison({0: completed.restrictions[key].at(i)}) != c:
            return False
    return True


def sectionwise_p_equivalence(f: SpectralPresheaf, g: SpectralPresheaf, comparisons: dict, p: int) -> bool:
    if f.poset != g.poset:
        return False
    return all(
        recognize_p_equivalence(f.section(u), g.section(u), comparisons[u], p)
        for u in f.poset.elements
    )


# ---------- Coproduct completion ----------
@dataclass(frozen=True)
class CoproductPresheaf:
    """Extension to formal coproducts u1 + ... + uk by the product rule."""

    base: SpectralPresheaf
    max_size: int = MAX_COPRODUCT

    def objects(self):
        elements = self.base.poset.elements
        out = [()]
        for k in range(1, self.max_size + 1):
            out.extend(combinations_with_replacement(elements, k))
        return out

    def section(self, obj):
        groups = {}
        for u in obj:
            for n, g in self.base.section(u).homotopy.items():
                groups[n] = groups.get(n, TameGroup.zero()) + g
        return FormalSpectrum.from_groups(groups)

    def satisfies_product_rule(self):
        for obj in self.objects():
            pieces = [self.section((u,)) for u in obj]
            expected = {}
            for s in pieces:
                for n, g in s.homotopy.items():
                    expected[n] = expected.get(n, TameGroup.zero()) + g
            if self.section(obj) != FormalSpectrum.from_groups(expected):
                return False
        return True


def _records_by_degree(e, p):
    return {r.degree: r for r in p_homotopy(e, p)}


def product_preservation_check(f: CoproductPresheaf, p: int) -> bool:
    """The completed presheaf still sends coproducts to products."""
    if not f.satisfies_product_rule():
        return False
    for obj in f.objects():
        whole = _records_by_degree(f.section(obj), p)
        parts = [_records_by_degree(f.section((u,)), p) for u in obj]
        degrees = set(whole)
        for part in parts:
            degrees |= set(part)
        for n in degrees:
            here = [part[n] for part in parts if n in part]
            left = sum((r.left for r in here), TameGroup.zero())
            right = sum((r.right for r in here), TameGroup.zero())
            record = whole.get(n)
            if record is None:
                if not (left.is_zero() and right.is_zero()):
                    return False
                continue
            if record.left != left or record.right != right:
                return False
            if record.resolved and all(r.resolved for r in here):
                if record.middle != sum((r.middle for r in here), TameGroup.zero()):
                    return False
    return True


# ---------- Grammar ----------
def _read_name(sc, known):
    start = sc.pos
    name = sc.identifier()
    if name not in known:
        sc.pos = start
        raise sc.error('poset element')
    return name


def _read_single_atom(sc):
    atoms = read_atoms(sc)
    if len(atoms) != 1:
        raise sc.error('a single prime-power atom')
    return atoms[0]


def _pick_index(summands, atom, used):
    for k, a in enumerate(summands):
        if a == atom and k not in used:
            used.add(k)
            return k
    return None


def parse_presheaf(text: str) -> SpectralPresheaf:
    """Text format:

        poset a, b, c;
        le a b; le b c;
        section a = Z;  section b @ 1 = Prufer(2);
        restrict b a = Z -> Z/4, ...;
    """
    sc = Scanner(text)
    sc.expect_keyword('poset')
    elements = [sc.identifier()]
    while sc.accept(','):
        elements.append(sc.identifier())
    sc.expect(';')
    known = set(elements)
    edges, groups, raw_restrictions = [], {e: {} for e in elements}, []
    while not sc.at_end():
        if sc.accept_keyword('le'):
            u = _read_name(sc, known)
            v = _read_name(sc, known)
            edges.append((u, v))
        elif sc.accept_keyword('section'):
            u = _read_name(sc, known)
            n = sc.integer() if sc.accept('@') else 0
            sc.expect('=')
            g = read_group(sc)
            groups[u][n] = groups[u].get(n, TameGroup.zero()) + g
        elif sc.accept_keyword('restrict'):
            start = sc.pos
            v = _read_name(sc, known)
            u = _read_name(sc, known)
            n = sc.integer() if sc.accept('@') else 0
            sc.expect('=')
            pairs = []
            while True:
                src = _read_single_atom(sc)
                sc.expect('->')
                pairs.append((src, _read_single_atom(sc)))
                if not sc.accept(','):
                    break
            raw_restrictions.append((start, v, u, n, pairs))
        else:
            raise sc.error("'le', 'section' or 'restrict'")
        sc.expect(';')
    poset = FinitePoset.from_edges(elements, edges)
    sections = {u: FormalSpectrum.from_groups(g) for u, g in groups.items()}
    declared = {}
    for start, v, u, n, pairs in raw_restrictions:
        src_used, tgt_used, indices = set(), set(), []
        for a, b in pairs:
            i = _pick_index(sections[v][n].summands, a, src_used)
            j = _pick_index(sections[u][n].summands, b, tgt_used)
            if i is None or j is None:
                sc.pos = start
                raise sc.error(f'atoms of the sections in degree {n}')
            indices.append((i, j))
        pairs_by_degree = dict(declared.get((v, u), Comparison()).pairs)
        pairs_by_degree[n] = indices
        declared[(v, u)] = Comparison(pairs_by_degree)
    return SpectralPresheaf(poset, sections, declared)
