"""Coset enumeration and finite permutation actions.

The table layout: one row per coset, ``2*n_gens`` columns; generator ``i``
acts through column ``2*i`` and its inverse through column ``2*i + 1``.
``-1`` marks an undefined entry.  Complete tables are kept in canonical
first-occurrence BFS numbering, so equal subgroups yield identical rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, Indeterminate
from .words import GroupPresentation, SubgroupSpec, Word, word

UNDEF = -1

DEFAULT_MAX_COSETS = 2_000_000
DEFAULT_MAX_STEPS = 100_000_000
DEFAULT_MAX_INDEX_CAP = 64


@dataclass(frozen=True)
class Limits:
    """Enumeration budgets; exhausting either yields an Indeterminate outcome."""

    max_cosets: int = DEFAULT_MAX_COSETS
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if self.max_cosets <= 0 or self.max_steps <= 0:
            raise DomainError("limits must be positive")


def word_to_cols(w: Word) -> list[int]:
    """Column path of a word: letter ±(i+1) -> column 2i / 2i+1."""
    return [2 * (abs(x) - 1) + (0 if x > 0 else 1) for x in w.letters]


def cols_to_word(cols: Sequence[int], alphabet: tuple[str, ...]) -> Word:
    letters = [(c // 2 + 1) * (1 if c % 2 == 0 else -1) for c in cols]
    return word(letters, alphabet)


def _reduce_cols(cols: list[int]) -> list[int]:
    out: list[int] = []
    for c in cols:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return out


def trace(rows: Sequence[Sequence[int]], start: int, cols: Sequence[int]) -> int:
    """Trace a column path through a complete table."""
    c = start
    for col in cols:
        c = rows[c][col]
    return c


@dataclass(frozen=True)
class CosetTable:
    """Complete right-coset action of the ambient generators on 0..index-1.

    Coset 0 is the subgroup itself.  Rows are canonical (first-occurrence
    BFS numbering), so two tables are equal iff they describe the same
    subgroup of the same presentation.
    """

    ambient: GroupPresentation
    subgroup: SubgroupSpec
    rows: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return 2 * self.ambient.n_generators

    def trace_word(self, start: int, w: Word) -> int:
        return trace(self.rows, start, word_to_cols(w))

    def validate(self) -> None:
        """Machine-checkable closure certificate; raises DomainError on defect."""
        n = self.index
        ncols = self.n_cols
        for row in self.rows:
            if len(row) != ncols or any(not (0 <= v < n) for v in row):
                raise DomainError("coset table has malformed rows")
        for col in range(ncols):
            images = [row[col] for row in self.rows]
            if sorted(images) != list(range(n)):
                raise DomainError(f"column {col} is not a permutation")
            for c in range(n):
                if self.rows[self.rows[c][col]][col ^ 1] != c:
                    raise DomainError(f"column {col} inverse inconsistency at {c}")
        for rel in self.ambient.relators:
            cols = word_to_cols(rel)
            for c in range(n):
                if trace(self.rows, c, cols) != c:
                    raise DomainError(f"relator {rel} does not close at coset {c}")
        for w in self.subgroup.words:
            if self.trace_word(0, w) != 0:
                raise DomainError(f"subgroup word {w} does not fix coset 0")

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "subgroup_words": [str(w) for w in self.subgroup.words],
            "rows": [list(row) for row in self.rows],
        }


@dataclass(frozen=True)
class FiniteAction:
    """Permutation image of the ambient group on {0..degree-1}."""

    degree: int
    perms: tuple[tuple[int, ...], ...]  # one per generator, positive direction
    alphabet: tuple[str, ...]

    def word_image(self, w: Word) -> tuple[int, ...]:
        if w.alphabet != self.alphabet:
            raise DomainError("word over a different alphabet than the action")
        image = list(range(self.degree))
        inverses = [None] * len(self.perms)
        for letter in w.letters:
            i = abs(letter) - 1
            if letter > 0:
                perm = self.perms[i]
            else:
                if inverses[i] is None:
                    inv = [0] * self.degree
                    for a, b in enumerate(self.perms[i]):
                        inv[b] = a
                    inverses[i] = tuple(inv)
                perm = inverses[i]
            image = [perm[x] for x in image]
        return tuple(image)

    def apply(self, point: int, w: Word) -> int:
        return self.word_image(w)[point]


def to_action(t: CosetTable) -> FiniteAction:
    """Permutation per generator; relators act trivially by table closure."""
    perms = tuple(
        tuple(row[2 * i] for row in t.rows) for i in range(t.ambient.n_generators)
    )
    return FiniteAction(t.index, perms, t.ambient.alphabet)


def _orbits_of_perms(degree: int, perms: Sequence[Sequence[int]]) -> list[list[int]]:
    seen = [False] * degree
    orbits: list[list[int]] = []
    for start in range(degree):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        frontier = [start]
        while frontier:
            nxt: list[int] = []
            for p in frontier:
                for perm in perms:
                    q = perm[p]
                    if not seen[q]:
                        seen[q] = True
                        orbit.append(q)
                        nxt.append(q)
            frontier = nxt
        orbits.append(sorted(orbit))
    return orbits


def _subgroup_perms(act: FiniteAction, l: SubgroupSpec) -> list[tuple[int, ...]]:
    perms = [act.word_image(w) for w in l.words]
    # orbits of <l> equal connected components once inverses are included
    inv_perms = []
    for perm in perms:
        inv = [0] * act.degree
        for a, b in enumerate(perm):
            inv[b] = a
        inv_perms.append(tuple(inv))
    return perms + inv_perms


def orbit_count(act: FiniteAction, l: SubgroupSpec) -> int:
    """Number of orbits of the subgroup generated by ``l`` on the action."""
    return len(_orbits_of_perms(act.degree, _subgroup_perms(act, l)))


def orbits(act: FiniteAction, l: SubgroupSpec) -> list[list[int]]:
    return _orbits_of_perms(act.degree, _subgroup_perms(act, l))


def index_in_quotient(act: FiniteAction, l: SubgroupSpec) -> int:
    """Size of the orbit of coset 0 under ``<l>``: equals [L : L n H]."""
    perms = _subgroup_perms(act, l)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for p in frontier:
            for perm in perms:
                q = perm[p]
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(seen)


def is_normal(t: CosetTable) -> bool:
    """True iff the table's subgroup is normal.

    The subgroup equals the stabiliser of coset 0, so it is normal iff each
    of its generator words fixes every coset.
    """
    for w in t.subgroup.words:
        cols = word_to_cols(w)
        for c in range(t.index):
            if trace(t.rows, c, cols) != c:
                return False
    return True


def standardize_rows(rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Renumber a complete table into first-occurrence BFS order from coset 0."""
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    perm = [UNDEF] * n
    perm[0] = 0
    order = [0]
    for c in order:
        for col in range(ncols):
            d = rows[c][col]
            if perm[d] == UNDEF:
                perm[d] = len(order)
                order.append(d)
    if len(order) != n:
        raise DomainError("table is not transitive")
    out = [[0] * ncols for _ in range(n)]
    for c in range(n):
        for col in range(ncols):
            out[perm[c]][col] = perm[rows[c][col]]
    return tuple(tuple(r) for r in out)


def bfs_tree(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], set[tuple[int, int]]]:
    """BFS spanning tree of a complete table, scanning columns in order.

    Returns per-coset column paths from 0 and the set of tree pairs in
    positive-generator form ``(coset, gen_index)``.
    """
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    paths: list[list[int] | None] = [None] * n
    paths[0] = []
    tree_pairs: set[tuple[int, int]] = set()
    order = [0]
    for c in order:
        for col in range(ncols):
            d = rows[c][col]
            if paths[d] is None:
                paths[d] = paths[c] + [col]
                order.append(d)
                if col % 2 == 0:
                    tree_pairs.add((c, col // 2))
                else:
                    tree_pairs.add((d, col // 2))
    return [p for p in paths], tree_pairs  # type: ignore[list-item]


def schreier_generator_words(
    rows: Sequence[Sequence[int]], alphabet: tuple[str, ...]
) -> tuple[Word, ...]:
    """Nontrivial Schreier generators of the stabiliser of coset 0."""
    paths, tree_pairs = bfs_tree(rows)
    n = len(rows)
    n_gens = (len(rows[0]) // 2) if rows and rows[0] else 0
    out: list[Word] = []
    for c in range(n):
        for g in range(n_gens):
            if (c, g) in tree_pairs:
                continue
            d = rows[c][2 * g]
            cols = _reduce_cols(paths[c] + [2 * g] + [x ^ 1 for x in reversed(paths[d])])
            if cols:
                out.append(cols_to_word(cols, alphabet))
    return tuple(out)


class _LimitsExhausted(Exception):
    def __init__(self, outcome: Indeterminate):
        self.outcome = outcome


class _Enumerator:
    """HLT coset enumeration with lookahead-and-compact on the coset limit."""

    def __init__(self, pres: GroupPresentation, sub: SubgroupSpec, limits: Limits):
        sub.validate_over(pres)
        self.pres = pres
        self.sub = sub
        self.ncols = 2 * pres.n_generators
        self.limits = limits
        self.rel_paths = [word_to_cols(r) for r in pres.relators]
        self.sub_paths = [word_to_cols(w) for w in sub.words]
        self.rows: list[list[int]] = [[UNDEF] * self.ncols]
        self.p: list[int] = [0]
        self.live = 1
        self.steps = 0
        self.scan_ptr = 0  # cosets below this have been HLT-processed
        # room to finish the current coset's scans before a compaction point
        slack = sum(map(len, self.rel_paths)) + sum(map(len, self.sub_paths))
        self.hard_cap = limits.max_cosets + slack + self.ncols + 2

    def rep(self, c: int) -> int:
        p = self.p
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def _charge(self, amount: int) -> None:
        self.steps += amount
        if self.steps > self.limits.max_steps:
            raise _LimitsExhausted(
                Indeterminate("step budget exhausted", self.live, self.steps)
            )

    def define(self, c: int, col: int) -> int:
        # compaction happens only between scans (the caller's loop), so a
        # running scan never sees its coset numbers move; the hard cap keeps
        # the table bounded until that safe point
        if self.live >= self.hard_cap:
            raise _LimitsExhausted(
                Indeterminate("coset budget exhausted", self.live, self.steps)
            )
        self._charge(1)
        d = len(self.rows)
        self.rows.append([UNDEF] * self.ncols)
        self.p.append(d)
        self.live += 1
        self.rows[c][col] = d
        self.rows[d][col ^ 1] = c
        return d

    def merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.p[b] = a
        self.live -= 1
        queue.append(b)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self.merge(a, b, queue)
        i = 0
        while i < len(queue):
            dead = queue[i]
            i += 1
            self._charge(self.ncols)
            for col in range(self.ncols):
                d = self.rows[dead][col]
                if d == UNDEF:
                    continue
                self.rows[d][col ^ 1] = UNDEF
                mu = self.rep(dead)
                nu = self.rep(d)
                if self.rows[mu][col] != UNDEF:
                    self.merge(nu, self.rows[mu][col], queue)
                elif self.rows[nu][col ^ 1] != UNDEF:
                    self.merge(mu, self.rows[nu][col ^ 1], queue)
                else:
                    self.rows[mu][col] = nu
                    self.rows[nu][col ^ 1] = mu

    def scan(self, start: int, path: list[int], fill: bool) -> None:
        """Scan a relator/subgroup word at a coset, filling gaps if ``fill``."""
        self._charge(len(path) + 1)
        f = start
        i = 0
        b = start
        j = len(path) - 1
        while True:
            while i <= j and self.rows[f][path[i]] != UNDEF:
                f = self.rows[f][path[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and self.rows[b][path[j] ^ 1] != UNDEF:
                b = self.rows[b][path[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                self.rows[f][path[i]] = b
                self.rows[b][path[i] ^ 1] = f
                return
            if not fill:
                return
            self.define(f, path[i])

    def lookahead_and_compact(self) -> None:
        for c in range(len(self.rows)):
            if self.rep(c) != c:
                continue
            for path in self.rel_paths:
                self.scan(c, path, fill=False)
                if self.rep(c) != c:
                    break
        self.compact()

    def compact(self) -> None:
        remap: dict[int, int] = {}
        new_rows: list[list[int]] = []
        new_ptr = 0
        for c in range(len(self.rows)):
            if self.rep(c) == c:
                if c < self.scan_ptr:
                    new_ptr += 1
                remap[c] = len(new_rows)
                new_rows.append(self.rows[c])
        for row in new_rows:
            for col in range(self.ncols):
                if row[col] != UNDEF:
                    row[col] = remap[self.rep(row[col])]
        self.rows = new_rows
        self.p = list(range(len(new_rows)))
        self.scan_ptr = new_ptr

    def run(self) -> CosetTable:
        for path in self.sub_paths:
            self.scan(0, path, fill=True)
        while self.scan_ptr < len(self.rows):
            if self.live >= self.limits.max_cosets:
                self.lookahead_and_compact()
                if self.live >= self.limits.max_cosets:
                    raise _LimitsExhausted(
                        Indeterminate("coset budget exhausted", self.live, self.steps)
                    )
            alpha = self.scan_ptr
            if self.rep(alpha) != alpha:
                self.scan_ptr += 1
                continue
            for path in self.rel_paths:
                self.scan(alpha, path, fill=True)
                if self.rep(alpha) != alpha:
                    break
            if self.rep(alpha) == alpha:
                for col in range(self.ncols):
                    if self.rows[alpha][col] == UNDEF:
                        self.define(alpha, col)
            self.scan_ptr += 1
        self.compact()
        # Insurance pass: rescan everything on the closed table until stable.
        while True:
            before = len(self.rows)
            for c in range(len(self.rows)):
                if self.rep(c) != c:
                    continue
                for path in self.rel_paths:
                    self.scan(c, path, fill=False)
            for path in self.sub_paths:
                self.scan(self.rep(0), path, fill=False)
            self.compact()
            if len(self.rows) == before:
                break
        return self._finish()

    def _finish(self) -> CosetTable:
        rows = standardize_rows(self.rows)
        table = CosetTable(self.pres, self.sub, rows)
        table.validate()
        return table


def todd_coxeter(
    pres: GroupPresentation, sub: SubgroupSpec, limits: Limits | None = None
) -> CosetTable | Indeterminate:
    """Enumerate the cosets of ``<sub>`` in ``pres``.

    Returns a complete canonical CosetTable on success, or an Indeterminate
    outcome if the budgets ran out (the index may be infinite).  Never
    returns a wrong table.
    """
    limits = limits or Limits()
    enum = _Enumerator(pres, sub, limits)
    try:
        return enum.run()
    except _LimitsExhausted as exc:
        return exc.outcome


def whole_group_table(pres: GroupPresentation) -> CosetTable:
    """The index-1 table: the subgroup is the whole group."""
    rows = (tuple(0 for _ in range(2 * pres.n_generators)),)
    spec = SubgroupSpec(pres.generator_words())
    return CosetTable(pres, spec, rows)


# ---------------------------------------------------------------------------
# Normal subgroups of bounded index
# ---------------------------------------------------------------------------


class _NormalSearch:
    """Backtrack over coset tables of normal subgroups of index <= max_index.

    The table of a normal subgroup is a regular action, so every closed
    path (an element of the subgroup) must act trivially on all cosets.
    Each non-tree edge assignment therefore contributes its cycle word as
    an extra relator, which is both a strong pruning rule and, on complete
    tables, a proof of normality.
    """

    def __init__(self, pres: GroupPresentation, max_index: int, limits: Limits):
        self.pres = pres
        self.max_index = max_index
        self.ncols = 2 * pres.n_generators
        self.limits = limits
        self.static = [word_to_cols(r) for r in pres.relators]
        self.rows: list[list[int]] = [[UNDEF] * self.ncols]
        self.tree: list[list[int]] = [[]]
        self.relators: list[list[int]] = list(self.static)
        self.dyn_seen: set[tuple[int, ...]] = set()
        self.done: set[tuple[int, int]] = set()
        self.trail: list[tuple] = []
        self.steps = 0
        self.found: dict[tuple, CosetTable] = {}

    def _charge(self, amount: int) -> None:
        self.steps += amount
        if self.steps > self.limits.max_steps:
            raise _LimitsExhausted(
                Indeterminate("step budget exhausted", len(self.rows), self.steps)
            )

    # -- trail ----------------------------------------------------------
    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            kind, payload = self.trail.pop()
            if kind == "cell":
                c, col = payload
                self.rows[c][col] = UNDEF
            elif kind == "row":
                self.rows.pop()
                self.tree.pop()
            elif kind == "dyn":
                self.relators.pop()
                self.dyn_seen.discard(payload)
            else:  # done
                self.done.discard(payload)

    def _new_coset(self, parent: int, col: int) -> int:
        if len(self.rows) >= self.limits.max_cosets:
            raise _LimitsExhausted(
                Indeterminate("coset budget exhausted", len(self.rows), self.steps)
            )
        d = len(self.rows)
        self.rows.append([UNDEF] * self.ncols)
        self.tree.append(self.tree[parent] + [col])
        self.trail.append(("row", None))
        return d

    def _assign(self, c: int, col: int, d: int) -> None:
        self._charge(1)
        self.rows[c][col] = d
        self.trail.append(("cell", (c, col)))
        self.rows[d][col ^ 1] = c
        self.trail.append(("cell", (d, col ^ 1)))
        cycle = _reduce_cols(
            self.tree[c] + [col] + [x ^ 1 for x in reversed(self.tree[d])]
        )
        if cycle:
            key = tuple(cycle)
            inv_key = tuple(x ^ 1 for x in reversed(cycle))
            if key not in self.dyn_seen and inv_key not in self.dyn_seen:
                self.dyn_seen.add(key)
                self.relators.append(cycle)
                self.trail.append(("dyn", key))

    # -- propagation -----------------------------------------------------
    def _scan(self, path: list[int], c: int):
        """Returns 'closed', 'open', ('deduce', e, col, f) or 'fail'."""
        rows = self.rows
        f = c
        i = 0
        j = len(path) - 1
        self._charge(2)
        while i <= j and rows[f][path[i]] != UNDEF:
            f = rows[f][path[i]]
            i += 1
        if i > j:
            return "closed" if f == c else "fail"
        b = c
        while j >= i and rows[b][path[j] ^ 1] != UNDEF:
            b = rows[b][path[j] ^ 1]
            j -= 1
        if j < i:
            return "closed" if f == b else "fail"
        if j == i:
            return ("deduce", f, path[i], b)
        return "open"

    def _propagate(self) -> bool:
        progress = True
        while progress:
            progress = False
            ri = 0
            while ri < len(self.relators):
                path = self.relators[ri]
                for c in range(len(self.rows)):
                    key = (ri, c)
                    if key in self.done:
                        continue
                    res = self._scan(path, c)
                    if res == "fail":
                        return False
                    if res == "closed":
                        self.done.add(key)
                        self.trail.append(("done", key))
                    elif res != "open":
                        _, e, col, f = res
                        if self.rows[f][col ^ 1] != UNDEF and self.rows[f][col ^ 1] != e:
                            return False
                        self._assign(e, col, f)
                        progress = True
                ri += 1
        return True

    def _first_undefined(self) -> tuple[int, int] | None:
        for c in range(len(self.rows)):
            row = self.rows[c]
            for col in range(self.ncols):
                if row[col] == UNDEF:
                    return c, col
        return None

    def _record_solution(self) -> None:
        rows = standardize_rows([row[:] for row in self.rows])
        key = rows
        if key in self.found:
            return
        spec = SubgroupSpec(schreier_generator_words(rows, self.pres.alphabet))
        table = CosetTable(self.pres, spec, rows)
        table.validate()
        if not is_normal(table):  # unreachable by construction; defensive
            return
        self.found[key] = table

    def run(self) -> list[CosetTable]:
        if not self._propagate():
            return []
        self._search()
        return [self.found[k] for k in sorted(self.found, key=lambda k: (len(k), k))]

    def _search(self) -> None:
        cell = self._first_undefined()
        if cell is None:
            self._record_solution()
            return
        c, col = cell
        n = len(self.rows)
        candidates = [d for d in range(n) if self.rows[d][col ^ 1] == UNDEF]
        for d in candidates:
            mark = len(self.trail)
            self._assign(c, col, d)
            if self._propagate():
                self._search()
            self._undo_to(mark)
        if n < self.max_index:
            mark = len(self.trail)
            d = self._new_coset(c, col)
            self._assign(c, col, d)
            if self._propagate():
                self._search()
            self._undo_to(mark)


def low_index_normal_subgroups(
    pres: GroupPresentation,
    max_index: int,
    limits: Limits | None = None,
    index_cap: int = DEFAULT_MAX_INDEX_CAP,
) -> list[CosetTable] | Indeterminate:
    """All normal subgroups of index <= max_index, each exactly once.

    Tables come back canonically ordered by (index, rows).  Exhausted
    budgets yield an Indeterminate outcome instead of a partial answer.
    """
    if max_index < 1:
        raise DomainError("max_index must be >= 1")
    if max_index > index_cap:
        raise DomainError(
            f"max_index {max_index} exceeds the configured cap {index_cap}"
        )
    limits = limits or Limits()
    search = _NormalSearch(pres, max_index, limits)
    try:
        return search.run()
    except _LimitsExhausted as exc:
        return exc.outcome
