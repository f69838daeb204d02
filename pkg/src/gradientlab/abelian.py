"""Exact integer linear algebra on relation matrices.

Smith normal form runs over Python's arbitrary-precision integers; entry
growth is expected and must never wrap.  Mod-p ranks are computed by
independent Gaussian elimination so the two routes can cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .words import GroupPresentation


def relation_matrix(p: GroupPresentation) -> list[list[int]]:
    """Exponent-sum matrix: one row per relator, one column per generator."""
    n = p.n_generators
    return [[rel.exponent_sum(g) for g in range(n)] for rel in p.relators]


def matrix_to_json(m: list[list[int]]) -> list[list[str]]:
    """Rows of decimal strings, so arbitrary-precision entries survive JSON."""
    return [[str(x) for x in row] for row in m]


def matrix_from_json(rows: list[list[str]]) -> list[list[int]]:
    return [[int(x) for x in row] for row in rows]


def smith_normal_form(m: list[list[int]]) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    Returns the full diagonal of length min(rows, cols); entries are
    non-negative and form a divisibility chain.
    """
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    size = min(rows, cols)
    diag: list[int] = []
    t = 0
    while t < size:
        # pivot: smallest nonzero absolute value, row-major tiebreak
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v != 0 and (pivot is None or abs(v) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t] != 0:
                        a[t], a[i] = a[i], a[t]
                        if a[t][t] < 0:
                            a[t] = [-x for x in a[t]]
                        dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                    if a[t][j] != 0:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        if a[t][t] < 0:
                            a[t] = [-x for x in a[t]]
                        dirty = True
                        break
            if dirty:
                continue
            # force divisibility of the remaining block by the pivot
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % a[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[offender])]
        diag.append(a[t][t])
        t += 1
    diag.extend(0 for _ in range(size - len(diag)))
    # belt-and-braces: repair any divisibility slack between diagonal entries
    from math import gcd

    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            x, y = diag[i], diag[i + 1]
            if x == 0 and y != 0:
                diag[i], diag[i + 1] = y, 0
                changed = True
            elif x != 0 and y % x != 0:
                g = gcd(x, y)
                diag[i], diag[i + 1] = g, x * y // g
                changed = True
    return diag


def _rows_to_bits(m: list[list[int]]) -> list[int]:
    out = []
    for row in m:
        bits = 0
        for j, x in enumerate(row):
            if x & 1:
                bits |= 1 << j
        out.append(bits)
    return out


def _f2_basis(bit_rows: list[int]) -> dict[int, int]:
    """Reduced xor basis over GF(2): pivot column (lowest set bit) -> row."""
    pivots: dict[int, int] = {}
    for r in bit_rows:
        while r:
            col = (r & -r).bit_length() - 1
            if col in pivots:
                r ^= pivots[col]
            else:
                pivots[col] = r
                break
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        for other in pivots:
            if other != col and (pivots[other] >> col) & 1:
                pivots[other] ^= row
    return pivots


def rank_mod_p(m: list[list[int]], p: int) -> int:
    """Rank over F_p via Gaussian elimination (independent of the SNF route)."""
    if p < 2:
        raise DomainError("p must be a prime >= 2")
    if p == 2:
        return len(_f2_basis(_rows_to_bits(m)))
    a = [[x % p for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    col = 0
    while rank < rows and col < cols:
        pivot = next((i for i in range(rank, rows) if a[i][col]), None)
        if pivot is None:
            col += 1
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = pow(a[rank][col], p - 2, p) if p > 2 else 1
        if inv != 1:
            a[rank] = [(x * inv) % p for x in a[rank]]
        for i in range(rows):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        col += 1
    return rank


def echelon_mod_p(m: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p plus the pivot column list."""
    a = [[x % p for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    rank = 0
    for col in range(cols):
        pivot = next((i for i in range(rank, rows) if a[i][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = pow(a[rank][col], p - 2, p) if p > 2 else 1
        if inv != 1:
            a[rank] = [(x * inv) % p for x in a[rank]]
        for i in range(rows):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        pivots.append(col)
        rank += 1
    return a[:rank], pivots


def quotient_coordinates(m: list[list[int]], n_cols: int, p: int):
    """Coordinates on F_p^n / rowspace(m).

    Returns ``(dim, reduce)`` where ``reduce`` maps a sparse vector
    ``{column: coefficient}`` to its tuple of coordinates on the free
    columns.  GF(2) runs on integer bitmasks.
    """
    if p == 2:
        pivots = _f2_basis(_rows_to_bits(m))
        free_cols = [j for j in range(n_cols) if j not in pivots]
        pos = {j: i for i, j in enumerate(free_cols)}
        dim = len(free_cols)

        def reduce_f2(vec: dict[int, int]) -> tuple[int, ...]:
            v = 0
            for j, x in vec.items():
                if x & 1:
                    v ^= 1 << j
            for col, row in pivots.items():
                if (v >> col) & 1:
                    v ^= row
            out = [0] * dim
            while v:
                j = (v & -v).bit_length() - 1
                v &= v - 1
                out[pos[j]] = 1
            return tuple(out)

        return dim, reduce_f2
    echelon, pivot_cols = echelon_mod_p(m, p)
    pivot_row = {col: row for row, col in enumerate(pivot_cols)}
    free_cols = [j for j in range(n_cols) if j not in pivot_row]
    pos = {j: i for i, j in enumerate(free_cols)}
    dim = len(free_cols)

    def reduce_generic(vec: dict[int, int]) -> tuple[int, ...]:
        work = {j: x % p for j, x in vec.items() if x % p}
        for col in pivot_cols:
            coeff = work.get(col, 0)
            if coeff:
                row = echelon[pivot_row[col]]
                for j, v in enumerate(row):
                    if v:
                        work[j] = (work.get(j, 0) - coeff * v) % p
        out = [0] * dim
        for j, v in work.items():
            if v % p:
                out[pos[j]] = v % p
        return tuple(out)

    return dim, reduce_generic


@dataclass(frozen=True)
class AbelianData:
    """Abelianisation invariants plus the certified bracket for d.

    ``invariant_factors`` is the SNF diagonal padded with zeros to the
    generator count (0 marks a free factor).  ``d_lower`` counts factors
    different from 1 and bounds the minimal generator count from below;
    ``d_upper`` is the generator count of the (simplified) presentation.
    """

    invariant_factors: tuple[int, ...]
    torsion_free_rank: int
    d_p_by_prime: dict[int, int]
    d_lower: int
    d_upper: int

    def __post_init__(self) -> None:
        if self.d_lower > self.d_upper:
            raise DomainError("d_lower exceeds d_upper")

    @property
    def exact_rank(self) -> int | None:
        return self.d_lower if self.d_lower == self.d_upper else None


def abelian_data(p: GroupPresentation, primes: tuple[int, ...] = ()) -> AbelianData:
    """Invariant factors, d_p for each requested prime, and the d bracket."""
    m = relation_matrix(p)
    n = p.n_generators
    factors = smith_normal_form(m) if m else []
    padded = tuple(factors) + (0,) * (n - len(factors))
    d_lower = sum(1 for d in padded if d != 1)
    d_p = {q: n - rank_mod_p(m, q) for q in primes} if m else {q: n for q in primes}
    return AbelianData(
        invariant_factors=padded,
        torsion_free_rank=sum(1 for d in padded if d == 0),
        d_p_by_prime=d_p,
        d_lower=d_lower,
        d_upper=n,
    )


def d_p_of_presentation(p: GroupPresentation, prime: int) -> int:
    """dim over F_p of the largest elementary abelian p-quotient."""
    m = relation_matrix(p)
    if not m:
        return p.n_generators
    return p.n_generators - rank_mod_p(m, prime)
