"""Builders for free products, amalgamated free products, and HNN extensions,
plus per-subgroup decomposition statistics from double-coset counts.

Whether the distinguished subgroup actually embeds in the factors is
undecidable; its order and amenability are user assertions carried into
reports, and only finite-quotient sanity checks are run.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import d_p_of_presentation
from .chains import SubgroupRecord, restrict_table, substitute_word
from .coset import orbit_count, index_in_quotient, to_action
from .errors import DomainError
from .words import (
    GeneratorSymbol,
    GroupPresentation,
    SubgroupSpec,
    Word,
    word,
)

RENAME_BUDGET = 1000


@dataclass(frozen=True)
class AmalgamSpec:
    """Two factor presentations glued along identified word lists.

    ``a_words_left[i]`` and ``a_words_right[i]`` name the same element of
    the common subgroup; ``a_pres``, when given, presents that subgroup
    with generator i mapping to pair i.  ``a_finite_order`` and
    ``a_amenable`` are user assertions.
    """

    left: GroupPresentation
    right: GroupPresentation
    a_words_left: tuple[Word, ...]
    a_words_right: tuple[Word, ...]
    a_pres: GroupPresentation | None = None
    a_finite_order: int | str = "infinite"
    a_amenable: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.a_words_left) != len(self.a_words_right):
            raise DomainError("identification word lists differ in length")
        if self.a_pres is not None and self.a_pres.n_generators != len(self.a_words_left):
            raise DomainError("need one identification pair per subgroup generator")
        for w in self.a_words_left:
            if w.alphabet != self.left.alphabet:
                raise DomainError("left identification word not over the left factor")
        for w in self.a_words_right:
            if w.alphabet != self.right.alphabet:
                raise DomainError("right identification word not over the right factor")
        if isinstance(self.a_finite_order, str) and self.a_finite_order != "infinite":
            raise DomainError("a_finite_order must be a positive int or 'infinite'")
        if isinstance(self.a_finite_order, int) and self.a_finite_order < 1:
            raise DomainError("a_finite_order must be a positive int or 'infinite'")


@dataclass(frozen=True)
class HnnSpec:
    """Base presentation plus a stable letter conjugating a_words to phi_words."""

    base: GroupPresentation
    a_words: tuple[Word, ...]
    phi_words: tuple[Word, ...]
    a_pres: GroupPresentation | None = None
    a_finite_order: int | str = "infinite"
    a_amenable: bool = False
    label: str = ""
    stable_letter: str = "t"

    def __post_init__(self) -> None:
        if len(self.a_words) != len(self.phi_words):
            raise DomainError("a_words and phi_words differ in length")
        if self.a_pres is not None and self.a_pres.n_generators != len(self.a_words):
            raise DomainError("need one conjugation pair per subgroup generator")
        for w in (*self.a_words, *self.phi_words):
            if w.alphabet != self.base.alphabet:
                raise DomainError("conjugation words must be over the base group")
        if isinstance(self.a_finite_order, str) and self.a_finite_order != "infinite":
            raise DomainError("a_finite_order must be a positive int or 'infinite'")
        if isinstance(self.a_finite_order, int) and self.a_finite_order < 1:
            raise DomainError("a_finite_order must be a positive int or 'infinite'")


@dataclass(frozen=True)
class KuroshData:
    """Double-coset statistics of a finite-index normal subgroup.

    ``free_generator_count`` is the stable-letter count of its decomposition
    as an HNN group; ``amalgamation_bound`` bounds how many amalgamations
    the base piece can carry (only the bound is determined).
    """

    double_cosets_a: int
    double_cosets_factors: tuple[int, ...]
    free_generator_count: int
    base_piece_counts: tuple[int, ...]
    amalgamation_bound: int


def _fresh_name(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    for k in range(1, RENAME_BUDGET + 1):
        cand = f"{name}_{k}"
        if cand not in taken:
            return cand
    raise DomainError(f"renaming budget exhausted for generator {name!r}")


def combine_presentations(
    p1: GroupPresentation, p2: GroupPresentation, label: str
) -> tuple[GroupPresentation, tuple[Word, ...], tuple[Word, ...]]:
    """Disjoint union of two presentations plus embeddings of their generators."""
    taken: set[str] = set()
    names: list[str] = []
    for g in p1.generators:
        names.append(_fresh_name(g.name, taken))
        taken.add(names[-1])
    offset = len(names)
    for g in p2.generators:
        names.append(_fresh_name(g.name, taken))
        taken.add(names[-1])
    alphabet = tuple(names)
    rels = [word(r.letters, alphabet) for r in p1.relators]
    for r in p2.relators:
        rels.append(word([x + offset if x > 0 else x - offset for x in r.letters], alphabet))
    gens = tuple(GeneratorSymbol(i, n) for i, n in enumerate(names))
    combined = GroupPresentation(gens, tuple(rels), label)
    left_embed = tuple(word([i + 1], alphabet) for i in range(p1.n_generators))
    right_embed = tuple(
        word([offset + i + 1], alphabet) for i in range(p2.n_generators)
    )
    return combined, left_embed, right_embed


def free_product(p1: GroupPresentation, p2: GroupPresentation) -> GroupPresentation:
    """Free product: generators and relators side by side (renamed on clash)."""
    label = f"{p1.label or 'G1'}*{p2.label or 'G2'}"
    combined, _, _ = combine_presentations(p1, p2, label)
    return combined


def amalgam(spec: AmalgamSpec) -> GroupPresentation:
    """Amalgamated free product: the free product plus u_i = v_i identifications."""
    if not spec.a_words_left and not spec.label:
        return free_product(spec.left, spec.right)
    label = spec.label or f"{spec.left.label or 'G1'}*_A{spec.right.label or 'G2'}"
    combined, le, re = combine_presentations(spec.left, spec.right, label)
    from .words import invert, multiply

    extra = []
    for u, v in zip(spec.a_words_left, spec.a_words_right):
        iu = substitute_word(u, le)
        iv = substitute_word(v, re)
        extra.append(multiply(iu, invert(iv)))
    return GroupPresentation(
        combined.generators, combined.relators + tuple(extra), label
    )


def hnn(spec: HnnSpec) -> GroupPresentation:
    """HNN extension: base plus t with t^-1 a_i t = phi(a_i)."""
    label = spec.label or f"{spec.base.label or 'K'}*_A"
    taken = set(spec.base.alphabet)
    t_name = _fresh_name(spec.stable_letter, taken)
    names = spec.base.alphabet + (t_name,)
    alphabet = names
    t_index = len(names) - 1
    rels = [word(r.letters, alphabet) for r in spec.base.relators]
    from .words import invert, multiply

    t = word([t_index + 1], alphabet)
    for a, b in zip(spec.a_words, spec.phi_words):
        ia = word(a.letters, alphabet)
        ib = word(b.letters, alphabet)
        rels.append(multiply(multiply(multiply(invert(t), ia), t), invert(ib)))
    gens = tuple(GeneratorSymbol(i, n) for i, n in enumerate(names))
    return GroupPresentation(gens, tuple(rels), label)


@dataclass(frozen=True)
class ConstructedGroup:
    """A built amalgam or HNN extension with embeddings for its pieces."""

    presentation: GroupPresentation
    kind: str  # "amalgam" | "hnn"
    a_words: tuple[Word, ...]  # images of the subgroup generators
    factor_words: tuple[tuple[Word, ...], ...]  # generator images per factor
    spec: AmalgamSpec | HnnSpec


def build_amalgam(spec: AmalgamSpec) -> ConstructedGroup:
    label = spec.label or f"{spec.left.label or 'G1'}*_A{spec.right.label or 'G2'}"
    combined, le, re = combine_presentations(spec.left, spec.right, label)
    from .words import invert, multiply

    extra = []
    a_images = []
    for u, v in zip(spec.a_words_left, spec.a_words_right):
        iu = substitute_word(u, le)
        iv = substitute_word(v, re)
        extra.append(multiply(iu, invert(iv)))
        a_images.append(iu)
    pres = GroupPresentation(combined.generators, combined.relators + tuple(extra), label)
    return ConstructedGroup(pres, "amalgam", tuple(a_images), (le, re), spec)


def build_hnn(spec: HnnSpec) -> ConstructedGroup:
    pres = hnn(spec)
    base_embed = tuple(
        word([i + 1], pres.alphabet) for i in range(spec.base.n_generators)
    )
    a_images = tuple(substitute_word(a, base_embed) for a in spec.a_words)
    return ConstructedGroup(pres, "hnn", a_images, (base_embed,), spec)


def kurosh_stats(group: ConstructedGroup, h: SubgroupRecord) -> KuroshData:
    """Double-coset counts of a normal finite-index subgroup of the construction.

    Normality turns each double-coset count |H \\ G / S| into the orbit count
    of S on the coset space of H, so the free-generator count comes out of
    four (or three) independent orbit computations.
    """
    if not h.normal:
        raise DomainError("decomposition statistics require a normal subgroup")
    act = to_action(h.table)
    dc_a = orbit_count(act, SubgroupSpec(group.a_words))
    dc_factors = tuple(
        orbit_count(act, SubgroupSpec(embed)) for embed in group.factor_words
    )
    if group.kind == "amalgam":
        n = dc_a - dc_factors[0] - dc_factors[1] + 1
        bound = dc_factors[0] + dc_factors[1] - 1
    else:
        n = dc_a - dc_factors[0] + 1
        bound = dc_factors[0] - 1
    return KuroshData(
        double_cosets_a=dc_a,
        double_cosets_factors=dc_factors,
        free_generator_count=n,
        base_piece_counts=dc_factors,
        amalgamation_bound=bound,
    )


def embedding_sanity(group: ConstructedGroup, h: SubgroupRecord) -> list[str]:
    """Decidable finite-quotient checks on the user-asserted subgroup data.

    Returns warning strings; an entry marks the construction EmbeddingSuspect.
    """
    warnings: list[str] = []
    act = to_action(h.table)
    a_index = index_in_quotient(act, SubgroupSpec(group.a_words))
    order = group.spec.a_finite_order
    if isinstance(order, int):
        if a_index > order or order % a_index != 0:
            warnings.append(
                f"EmbeddingSuspect: [A : A n H] = {a_index} does not divide the"
                f" asserted |A| = {order}"
            )
    a_pres = group.spec.a_pres
    if a_pres is not None:
        for rel in a_pres.relators:
            image = substitute_word(rel, group.a_words)
            perm = act.word_image(image)
            if any(perm[x] != x for x in range(act.degree)):
                warnings.append(
                    f"EmbeddingSuspect: subgroup relator {rel} acts nontrivially"
                    " in the quotient"
                )
    return warnings


@dataclass(frozen=True)
class DpBoundsReport:
    """Mod-p rank bounds for the construction and one of its normal subgroups."""

    prime: int
    whole_lower: int
    whole_upper: int
    whole_value: int
    whole_holds: bool
    subgroup_index: int
    subgroup_lower: int
    subgroup_upper: int
    subgroup_value: int
    subgroup_holds: bool
    kurosh: KuroshData

    @property
    def holds(self) -> bool:
        return self.whole_holds and self.subgroup_holds


def dp_bounds_check(group: ConstructedGroup, h: SubgroupRecord, p: int) -> DpBoundsReport:
    """Check the splitting bounds on d_p for the whole group and for H.

    Whole group (amalgam): d_p(G1) + d_p(G2) - d_p(A) <= d_p(G) <= d_p(G1) + d_p(G2);
    HNN: d_p(K) - d_p(A) + 1 <= d_p(G) <= d_p(K) + 1.  For H the same bounds
    are stacked along its decomposition: base pieces are the restricted factor
    subgroups, glued over at most ``amalgamation_bound`` copies of A n H, with
    ``free_generator_count`` stable letters.
    """
    spec = group.spec
    if spec.a_pres is None:
        raise DomainError("d_p bounds need a presentation of the distinguished subgroup")
    d_a = d_p_of_presentation(spec.a_pres, p)
    d_g = d_p_of_presentation(group.presentation, p)
    if group.kind == "amalgam":
        d_1 = d_p_of_presentation(spec.left, p)
        d_2 = d_p_of_presentation(spec.right, p)
        whole_lower = d_1 + d_2 - d_a
        whole_upper = d_1 + d_2
    else:
        d_k = d_p_of_presentation(spec.base, p)
        whole_lower = d_k - d_a + 1
        whole_upper = d_k + 1
    stats = kurosh_stats(group, h)
    # restricted pieces: factor n H inside each factor, A n H inside A
    if group.kind == "amalgam":
        factor_pres = (spec.left, spec.right)
    else:
        factor_pres = (spec.base,)
    piece_dp = []
    for pres_i, embed in zip(factor_pres, group.factor_words):
        t = restrict_table(h.table, embed, pres_i)
        rec = SubgroupRecord(t, normal=True, provenance="restricted")
        piece_dp.append(rec.d_p(p))
    t_a = restrict_table(h.table, group.a_words, spec.a_pres)
    rec_a = SubgroupRecord(t_a, normal=True, provenance="restricted")
    d_a_h = rec_a.d_p(p)
    n = stats.free_generator_count
    base_sum = sum(c * d for c, d in zip(stats.base_piece_counts, piece_dp))
    sub_upper = base_sum + n
    sub_lower = base_sum - stats.amalgamation_bound * d_a_h - n * d_a_h + n
    d_h = h.d_p(p)
    return DpBoundsReport(
        prime=p,
        whole_lower=whole_lower,
        whole_upper=whole_upper,
        whole_value=d_g,
        whole_holds=whole_lower <= d_g <= whole_upper,
        subgroup_index=h.index,
        subgroup_lower=sub_lower,
        subgroup_upper=sub_upper,
        subgroup_value=d_h,
        subgroup_holds=sub_lower <= d_h <= sub_upper,
        kurosh=stats,
    )
