"""Descending chains of finite-index normal subgroups.

The mod-p Frattini step realises K = [H,H]H^p inside the ambient group by
extending the coset table of H with mod-p Schreier coordinates: cosets of K
correspond to pairs (coset of H, vector in the F_p-quotient of H's
abelianisation), and the generator action shifts the vector by the reduced
coordinate of the crossed Schreier generator.  This is exact and needs no
further enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .abelian import AbelianData, abelian_data, quotient_coordinates, relation_matrix
from .coset import (
    CosetTable,
    Limits,
    index_in_quotient,
    is_normal,
    orbit_count,
    schreier_generator_words,
    standardize_rows,
    to_action,
    whole_group_table,
)
from .errors import CapExceededError, DomainError, EmbeddingViolationError, Indeterminate
from .rewriting import reidemeister_schreier, schreier_transversal, tietze_simplify
from .words import GroupPresentation, SubgroupSpec, Word, multiply

DEFAULT_DP_CAP = 14
DEFAULT_DEPTH_CAP = 8
DEFAULT_LEVEL_INDEX_CAP = 1024


@dataclass
class SubgroupRecord:
    """A finite-index subgroup with lazily derived presentation data."""

    table: CosetTable
    normal: bool
    provenance: str
    _raw_presentation: GroupPresentation | None = field(default=None, repr=False)
    _presentation: GroupPresentation | None = field(default=None, repr=False)
    _d_p: dict[int, int] = field(default_factory=dict, repr=False)
    _abelian: AbelianData | None = field(default=None, repr=False)

    @property
    def index(self) -> int:
        return self.table.index

    def raw_presentation(self) -> GroupPresentation:
        """Unsimplified Reidemeister-Schreier presentation."""
        if self._raw_presentation is None:
            self._raw_presentation = reidemeister_schreier(self.table.ambient, self.table)
        return self._raw_presentation

    def presentation(self) -> GroupPresentation:
        """Tietze-simplified subgroup presentation."""
        if self._presentation is None:
            self._presentation = tietze_simplify(self.raw_presentation())
        return self._presentation

    def d_p(self, prime: int) -> int:
        """Exact mod-p rank of the subgroup (cheap: no simplification)."""
        if prime not in self._d_p:
            pres = self.raw_presentation()
            m = relation_matrix(pres)
            from .abelian import rank_mod_p

            rank = rank_mod_p(m, prime) if m else 0
            self._d_p[prime] = pres.n_generators - rank
        return self._d_p[prime]

    def abelian(self, primes: tuple[int, ...] = ()) -> AbelianData:
        """Invariant factors and the certified [d_lower, d_upper] bracket."""
        need = tuple(q for q in primes if self._abelian is None or q not in self._abelian.d_p_by_prime)
        if self._abelian is None or need:
            known = dict(self._abelian.d_p_by_prime) if self._abelian else {}
            known.update({q: self.d_p(q) for q in primes})
            base = abelian_data(self.presentation(), ())
            self._abelian = AbelianData(
                invariant_factors=base.invariant_factors,
                torsion_free_rank=base.torsion_free_rank,
                d_p_by_prime=known,
                d_lower=base.d_lower,
                d_upper=base.d_upper,
            )
        return self._abelian


def whole_group_record(pres: GroupPresentation) -> SubgroupRecord:
    return SubgroupRecord(whole_group_table(pres), normal=True, provenance="whole-group")


ChainKind = Literal["mod_p_frattini", "intersected", "custom", "restricted"]


@dataclass
class ChainRecord:
    """A descending chain of finite-index normal subgroups of one ambient group.

    For mod-p Frattini chains the indices are strictly increasing powers of
    p; restricted chains keep one level per ambient level and may stall.
    ``stabilized`` means the chain provably repeats from its last level on,
    so its infimum is attained among the computed levels.
    """

    ambient: GroupPresentation
    levels: list[SubgroupRecord]
    kind: ChainKind
    prime: int | None = None
    stabilized: bool = False
    truncated_reason: str | None = None

    def validate(self) -> None:
        indices = [rec.index for rec in self.levels]
        strict = self.kind == "mod_p_frattini"
        for a, b in zip(indices, indices[1:]):
            if (b <= a) if strict else (b < a):
                raise DomainError(f"chain indices not descending: {indices}")
        if self.kind == "mod_p_frattini":
            p = self.prime
            for idx in indices:
                k = idx
                while k % p == 0:
                    k //= p
                if k != 1:
                    raise DomainError(f"index {idx} is not a power of {p}")
        for rec in self.levels:
            if not rec.normal:
                raise DomainError("chain level is not normal")
        for upper, lower in zip(self.levels, self.levels[1:]):
            for w in lower.table.subgroup.words:
                if upper.table.trace_word(0, w) != 0:
                    raise DomainError("chain is not descending as subgroups")


def mod_p_frattini_step(
    ambient: GroupPresentation,
    h: SubgroupRecord,
    p: int,
    limits: Limits | None = None,
    dp_cap: int = DEFAULT_DP_CAP,
    index_cap: int = DEFAULT_LEVEL_INDEX_CAP,
) -> SubgroupRecord:
    """Record for K = [H,H]H^p, with [ambient:K] = [ambient:H] * p^{d_p(H)}.

    K is characteristic in H and hence normal in the ambient group.  Raises
    CapExceededError when p^{d_p(H)} or the resulting level index would blow
    past the desk-scale caps.
    """
    if h.table.ambient != ambient:
        raise DomainError("record does not belong to the ambient presentation")
    if not h.normal:
        raise DomainError("mod-p step requires a normal subgroup")
    data = schreier_transversal(h.table)
    rs = h.raw_presentation()
    m = relation_matrix(rs)
    d, reduce_vec = quotient_coordinates(m, rs.n_generators, p)
    if d != h.d_p(p):
        raise DomainError("internal rank mismatch in mod-p step")
    if d > dp_cap:
        raise CapExceededError(
            f"d_p(H) = {d} exceeds the step cap {dp_cap} (index would grow by p^{d})"
        )
    if d == 0:
        return h  # K = H: the chain has stabilised
    if h.table.index * p**d > index_cap:
        raise CapExceededError(
            f"next level index {h.table.index * p ** d} exceeds the cap {index_cap}"
        )

    # coordinate shift per (coset, column) crossing
    index_of = data.generator_index
    n = h.table.index
    ncols = h.table.n_cols
    shift: list[list[tuple[int, ...]]] = [[()] * ncols for _ in range(n)]
    zero = tuple([0] * d)
    for c in range(n):
        for g in range(ncols // 2):
            dpos = h.table.rows[c][2 * g]
            pair = (c, g)
            if pair in index_of:
                vec = reduce_vec({index_of[pair]: 1})
            else:
                vec = zero
            shift[c][2 * g] = vec
            shift[dpos][2 * g + 1] = tuple((-x) % p for x in vec)

    # BFS over (coset, vector) pairs builds the table in canonical order
    start = (0, zero)
    numbering: dict[tuple[int, tuple[int, ...]], int] = {start: 0}
    order = [start]
    rows: list[list[int]] = []
    for state in order:
        c, v = state
        row = []
        for col in range(ncols):
            dvec = shift[c][col]
            nxt = (h.table.rows[c][col], tuple((a + b) % p for a, b in zip(v, dvec)))
            if nxt not in numbering:
                numbering[nxt] = len(order)
                order.append(nxt)
            row.append(numbering[nxt])
        rows.append(row)
    expected = n * p**d
    if len(rows) != expected:
        raise DomainError(f"mod-p step built {len(rows)} cosets, expected {expected}")
    table_rows = tuple(tuple(r) for r in rows)
    spec = SubgroupSpec(schreier_generator_words(table_rows, ambient.alphabet))
    table = CosetTable(ambient, spec, table_rows)
    table.validate()
    if not is_normal(table):
        raise DomainError("mod-p step produced a non-normal table")
    return SubgroupRecord(table, normal=True, provenance=f"frattini(p={p})")


def p_chain(
    ambient: GroupPresentation,
    p: int,
    depth: int,
    limits: Limits | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    dp_cap: int = DEFAULT_DP_CAP,
    index_cap: int = DEFAULT_LEVEL_INDEX_CAP,
) -> ChainRecord:
    """Iterated mod-p Frattini chain H_0 = ambient, H_{k+1} = [H_k,H_k]H_k^p.

    Step failures truncate the chain and record the reason; a step that
    returns its input marks the chain stabilised (all deeper levels equal).
    """
    if depth > depth_cap:
        raise DomainError(f"depth {depth} exceeds the cap {depth_cap}")
    levels = [whole_group_record(ambient)]
    stabilized = False
    reason: str | None = None
    for _ in range(depth):
        try:
            nxt = mod_p_frattini_step(ambient, levels[-1], p, limits, dp_cap, index_cap)
        except CapExceededError as exc:
            reason = str(exc)
            break
        if nxt is levels[-1]:
            stabilized = True
            break
        levels.append(nxt)
    chain = ChainRecord(
        ambient, levels, "mod_p_frattini", prime=p,
        stabilized=stabilized, truncated_reason=reason,
    )
    chain.validate()
    return chain


def intersect(a: SubgroupRecord, b: SubgroupRecord) -> SubgroupRecord:
    """Record for the intersection, via the diagonal action on coset pairs."""
    if a.table.ambient != b.table.ambient:
        raise DomainError("intersection requires a common ambient presentation")
    if not (a.normal and b.normal):
        raise DomainError("intersection is implemented for normal subgroups")
    ra, rb = a.table.rows, b.table.rows
    ncols = a.table.n_cols
    start = (0, 0)
    numbering: dict[tuple[int, int], int] = {start: 0}
    order = [start]
    rows: list[list[int]] = []
    for ca, cb in order:
        row = []
        for col in range(ncols):
            nxt = (ra[ca][col], rb[cb][col])
            if nxt not in numbering:
                numbering[nxt] = len(order)
                order.append(nxt)
            row.append(numbering[nxt])
        rows.append(row)
    table_rows = tuple(tuple(r) for r in rows)
    alphabet = a.table.ambient.alphabet
    spec = SubgroupSpec(schreier_generator_words(table_rows, alphabet))
    table = CosetTable(a.table.ambient, spec, table_rows)
    table.validate()
    return SubgroupRecord(table, normal=True, provenance="intersection")


def substitute_word(w: Word, images: tuple[Word, ...]) -> Word:
    """Image of ``w`` under generator i -> images[i]."""
    if len(images) == 0:
        if w.letters:
            raise DomainError("nontrivial word with no generator images")
        return w
    alphabet = images[0].alphabet
    out = Word((), alphabet)
    for letter in w.letters:
        img = images[abs(letter) - 1]
        if letter < 0:
            from .words import invert

            img = invert(img)
        out = multiply(out, img)
    return out


def restrict_table(
    table: CosetTable, l_words: tuple[Word, ...], l_pres: GroupPresentation
) -> CosetTable:
    """Coset table of (L n H) inside L, from L's action on the H-coset space.

    ``l_words`` give the images in the ambient group of ``l_pres``'s
    generators.  Raises EmbeddingViolationError if an ``l_pres`` relator
    fails to act trivially.
    """
    if len(l_words) != l_pres.n_generators:
        raise DomainError("need one ambient word per subgroup generator")
    act = to_action(table)
    perms = [act.word_image(w) for w in l_words]
    inv_perms = []
    for perm in perms:
        inv = [0] * act.degree
        for x, y in enumerate(perm):
            inv[y] = x
        inv_perms.append(tuple(inv))
    for rel in l_pres.relators:
        image = substitute_word(rel, l_words)
        perm = act.word_image(image)
        if any(perm[x] != x for x in range(act.degree)):
            raise EmbeddingViolationError(
                f"relator {rel} of the subgroup presentation acts nontrivially"
            )
    # orbit of coset 0, numbered in BFS column order
    numbering = {0: 0}
    order = [0]
    rows: list[list[int]] = []
    for point in order:
        row = []
        for g in range(l_pres.n_generators):
            for perm in (perms[g], inv_perms[g]):
                nxt = perm[point]
                if nxt not in numbering:
                    numbering[nxt] = len(order)
                    order.append(nxt)
                row.append(numbering[nxt])
        rows.append(row)
    table_rows = standardize_rows(rows)
    spec = SubgroupSpec(schreier_generator_words(table_rows, l_pres.alphabet))
    out = CosetTable(l_pres, spec, table_rows)
    out.validate()
    return out


def restrict_chain(
    chain: ChainRecord, l_words: tuple[Word, ...], l_pres: GroupPresentation
) -> ChainRecord:
    """The chain {L n H_k} as subgroups of L, one level per ambient level."""
    levels = []
    for rec in chain.levels:
        table = restrict_table(rec.table, l_words, l_pres)
        levels.append(SubgroupRecord(table, normal=True, provenance="restricted"))
    stabilized = chain.stabilized
    if levels and not stabilized:
        # once L n H is trivial in a finite L it can descend no further
        last = levels[-1]
        order = _known_finite_order(l_pres, last.index)
        if order is not None and last.index == order:
            stabilized = True
    out = ChainRecord(
        l_pres, levels, "restricted", prime=chain.prime,
        stabilized=stabilized, truncated_reason=chain.truncated_reason,
    )
    out.validate()
    return out


def _known_finite_order(pres: GroupPresentation, at_least: int) -> int | None:
    """Order of the group when cheaply enumerable, else None."""
    from .coset import todd_coxeter

    budget = Limits(max_cosets=max(4 * at_least + 64, 256), max_steps=1_000_000)
    result = todd_coxeter(pres, SubgroupSpec(), budget)
    if isinstance(result, Indeterminate):
        return None
    return result.index


def chain_level_checks(chain: ChainRecord, l: SubgroupSpec | None = None) -> None:
    """Cross-module consistency checks used by the test battery."""
    for rec in chain.levels:
        if not is_normal(rec.table):
            raise DomainError("chain level fails the normality trace check")
    if l is not None:
        for rec in chain.levels:
            act = to_action(rec.table)
            if orbit_count(act, l) * index_in_quotient(act, l) != rec.index:
                raise DomainError("orbit/index product mismatch on a normal level")
