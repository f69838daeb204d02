"""Subgroup presentations: Schreier transversals, Reidemeister-Schreier
rewriting, and conservative Tietze simplification.

The rewritten presentation of the coset-0 stabiliser is what the rank and
mod-p rank computations run on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .coset import CosetTable, cols_to_word, word_to_cols
from .words import GeneratorSymbol, GroupPresentation, Word, word

MAX_REWRITTEN_LENGTH = 1 << 16
DEFAULT_TIETZE_EFFORT_PER_GEN = 4


@dataclass(frozen=True)
class SchreierData:
    """A Schreier transversal plus the generator pairs that survive it.

    ``transversal[c]`` is the representative word carrying coset 0 to c;
    ``generators`` lists the (coset, generator) pairs outside the spanning
    tree, each contributing one Schreier generator of the subgroup.
    """

    table: CosetTable
    transversal: tuple[Word, ...]
    tree_pairs: frozenset[tuple[int, int]]
    generators: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.generators)

    @property
    def generator_index(self) -> dict[tuple[int, int], int]:
        cached = getattr(self, "_generator_index", None)
        if cached is None:
            cached = {pair: i for i, pair in enumerate(self.generators)}
            object.__setattr__(self, "_generator_index", cached)
        return cached

    def generator_word(self, pair: tuple[int, int]) -> Word:
        """The Schreier generator u_c g (u_{c.g})^-1 as a word in the ambient group."""
        c, g = pair
        d = self.table.rows[c][2 * g]
        u = self.transversal[c]
        v = self.transversal[d]
        cols = word_to_cols(u) + [2 * g] + [x ^ 1 for x in reversed(word_to_cols(v))]
        out: list[int] = []
        for col in cols:
            if out and out[-1] == col ^ 1:
                out.pop()
            else:
                out.append(col)
        return cols_to_word(out, self.table.ambient.alphabet)


def schreier_transversal(
    t: CosetTable, column_order: Sequence[int] | None = None
) -> SchreierData:
    """BFS-minimal Schreier transversal of a complete table.

    ``column_order`` permutes the edge scan order (used to cross-check that
    derived invariants do not depend on the transversal); default is the
    canonical column order, which yields shortlex representatives on the
    standardized table.
    """
    n = t.index
    ncols = t.n_cols
    order = list(column_order) if column_order is not None else list(range(ncols))
    if sorted(order) != list(range(ncols)):
        raise DomainError("column_order must be a permutation of the columns")
    paths: list[list[int] | None] = [None] * n
    paths[0] = []
    tree_pairs: set[tuple[int, int]] = set()
    queue = [0]
    for c in queue:
        for col in order:
            d = t.rows[c][col]
            if paths[d] is None:
                paths[d] = paths[c] + [col]  # type: ignore[operator]
                queue.append(d)
                if col % 2 == 0:
                    tree_pairs.add((c, col // 2))
                else:
                    tree_pairs.add((d, col // 2))
    transversal = tuple(
        cols_to_word(p, t.ambient.alphabet) for p in paths  # type: ignore[arg-type]
    )
    n_gens = t.ambient.n_generators
    survivors = tuple(
        (c, g) for c in range(n) for g in range(n_gens) if (c, g) not in tree_pairs
    )
    return SchreierData(t, transversal, frozenset(tree_pairs), survivors)


def rewrite_word(data: SchreierData, start: int, w: Word) -> tuple[int, ...]:
    """Rewrite the trace of ``w`` from coset ``start`` into Schreier letters.

    Returns signed letters over the Schreier generators (1-based indices into
    ``data.generators``); tree pairs contribute nothing.
    """
    index_of = data.generator_index
    rows = data.table.rows
    out: list[int] = []
    c = start
    for letter in w.letters:
        g = abs(letter) - 1
        if letter > 0:
            pair = (c, g)
            c = rows[c][2 * g]
            if pair in index_of:
                lt = index_of[pair] + 1
                if out and out[-1] == -lt:
                    out.pop()
                else:
                    out.append(lt)
        else:
            c = rows[c][2 * g + 1]
            pair = (c, g)
            if pair in index_of:
                lt = -(index_of[pair] + 1)
                if out and out[-1] == -lt:
                    out.pop()
                else:
                    out.append(lt)
    return tuple(out)


def _schreier_gen_names(data: SchreierData) -> tuple[str, ...]:
    alphabet = data.table.ambient.alphabet
    return tuple(f"{alphabet[g]}_{c}" for c, g in data.generators)


def reidemeister_schreier(
    p: GroupPresentation, t: CosetTable, data: SchreierData | None = None
) -> GroupPresentation:
    """Presentation of the coset-0 stabiliser on its Schreier generators.

    One rewritten relator per (ambient relator, coset) pair; freely trivial
    and duplicate rewrites are dropped so the result satisfies the
    presentation invariants.
    """
    if t.ambient is not p and t.ambient != p:
        raise DomainError("table does not belong to the given presentation")
    if data is None:
        data = schreier_transversal(t)
    names = _schreier_gen_names(data)
    rel_letters: list[tuple[int, ...]] = []
    for rel in p.relators:
        for c in range(t.index):
            rel_letters.append(rewrite_word(data, c, rel))
    return _build(names, rel_letters, f"{p.label}!sub{t.index}" if p.label else f"sub{t.index}")


def _build(names: Sequence[str], rel_letters: Sequence[Sequence[int]], label: str) -> GroupPresentation:
    gens = tuple(GeneratorSymbol(i, n) for i, n in enumerate(names))
    alphabet = tuple(names)
    rels = tuple(word(r, alphabet) for r in rel_letters)
    return GroupPresentation(gens, rels, label)


def _cyclic_key(letters: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical form of a cyclic word up to rotation and inversion."""
    if not letters:
        return letters
    best = None
    for cand in (letters, tuple(-x for x in reversed(letters))):
        for i in range(len(cand)):
            rot = cand[i:] + cand[:i]
            if best is None or rot < best:
                best = rot
    return best  # type: ignore[return-value]


def _substitute(letters: tuple[int, ...], gen: int, repl: tuple[int, ...]) -> tuple[int, ...]:
    """Replace letters +-(gen+1) by repl / its inverse, freely reducing."""
    target = gen + 1
    repl_inv = tuple(-x for x in reversed(repl))
    out: list[int] = []

    def push(x: int) -> None:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)

    for x in letters:
        if x == target:
            for y in repl:
                push(y)
        elif x == -target:
            for y in repl_inv:
                push(y)
        else:
            push(x)
    return tuple(out)


def _drop_generator(letters: tuple[int, ...], gen: int) -> tuple[int, ...]:
    """Renumber letters after deleting generator ``gen`` (must not occur)."""
    out = []
    for x in letters:
        i = abs(x) - 1
        if i == gen:
            raise DomainError("cannot drop a generator that still occurs")
        j = i - 1 if i > gen else i
        out.append((j + 1) * (1 if x > 0 else -1))
    return tuple(out)


def tietze_simplify(p: GroupPresentation, effort: int | None = None) -> GroupPresentation:
    """Shrink a presentation without changing the group.

    Moves used: free/cyclic reduction, removal of trivial and duplicate
    relators (up to rotation and inversion), and elimination of a generator
    that occurs exactly once in some relator, provided no rewritten relator
    exceeds the length cap.  Deterministic; stops after ``effort`` rounds.
    """
    if effort is None:
        effort = DEFAULT_TIETZE_EFFORT_PER_GEN * p.n_generators + 16
    names = list(p.alphabet)
    relators = [r.letters for r in p.relators]

    def normalise() -> None:
        seen: set[tuple[int, ...]] = set()
        out: list[tuple[int, ...]] = []
        for letters in relators:
            letters = _cyc_reduce(letters)
            if not letters:
                continue
            key = _cyclic_key(letters)
            if key in seen:
                continue
            seen.add(key)
            out.append(letters)
        relators[:] = out

    def _cyc_reduce(letters: tuple[int, ...]) -> tuple[int, ...]:
        ls = list(letters)
        while len(ls) >= 2 and ls[0] == -ls[-1]:
            ls = ls[1:-1]
        return tuple(ls)

    normalise()
    for _ in range(effort):
        # candidates: a relator holding a generator with a single occurrence,
        # shortest defining relator first
        candidates: list[tuple[int, int, int]] = []  # (relator idx, position, gen)
        for ri in sorted_indices(relators):
            rel = relators[ri]
            counts: dict[int, int] = {}
            for x in rel:
                counts[abs(x) - 1] = counts.get(abs(x) - 1, 0) + 1
            for pos, x in enumerate(rel):
                g = abs(x) - 1
                if counts[g] == 1:
                    candidates.append((ri, pos, g))
                    break
        eliminated = False
        for ri, pos, g in candidates:
            rel = relators[ri]
            # rotate so the single occurrence leads, then read off the definition
            rot = rel[pos:] + rel[:pos]
            rest = rot[1:]
            repl = tuple(-x for x in reversed(rest)) if rot[0] > 0 else rest
            new_relators = []
            ok = True
            for rj, other in enumerate(relators):
                if rj == ri:
                    continue
                sub = _substitute(other, g, repl)
                if len(sub) > MAX_REWRITTEN_LENGTH:
                    ok = False  # cap hit: leave this relator alone, try another
                    break
                new_relators.append(sub)
            if not ok:
                continue
            relators[:] = [_drop_generator(x, g) for x in new_relators]
            del names[g]
            normalise()
            eliminated = True
            break
        if not eliminated:
            break
    return _build(names, relators, p.label)


def sorted_indices(relators: list[tuple[int, ...]]) -> list[int]:
    return sorted(range(len(relators)), key=lambda i: (len(relators[i]), i))
