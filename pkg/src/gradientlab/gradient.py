"""Gradient sequences and formula verdicts, in exact rational arithmetic.

Sequence values are (d - 1) / index with d either an exact mod-p rank or a
certified [d_lower, d_upper] bracket.  A finitely computed chain only ever
certifies an upper bound for its infimum, except when the chain provably
stabilises; verdicts compare intervals and never use floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chains import ChainRecord, SubgroupRecord, p_chain, restrict_chain
from .coset import Limits, low_index_normal_subgroups, todd_coxeter
from .constructions import AmalgamSpec, HnnSpec, build_amalgam, build_hnn
from .errors import DomainError, Indeterminate
from .words import GroupPresentation, SubgroupSpec

HYP_INTERSECTION = "chain intersection trivial (user-asserted)"
HYP_RESIDUAL = "residual finiteness (user-asserted)"


@dataclass(frozen=True)
class Interval:
    """A closed rational interval [lo, hi] containing a true value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def exact(v: Fraction) -> "Interval":
        return Interval(v, v)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def shift(self, c: Fraction) -> "Interval":
        return Interval(self.lo + c, self.hi + c)

    def intersects(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class LevelEntry:
    index: int
    d_lower: int
    d_upper: int
    d_p: int | None
    value: Interval


@dataclass(frozen=True)
class FormulaVerdict:
    """Comparison of two interval estimates of quantities a theorem equates.

    ``violated`` is reserved for exact-rational disjointness in a forbidden
    direction; overlapping intervals are ``consistent``; missing hypotheses
    make the comparison ``inconclusive``.
    """

    formula: str
    lhs: Interval | None
    rhs: Interval | None
    status: str  # consistent | violated | inconclusive
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.status not in ("consistent", "violated", "inconclusive"):
            raise DomainError(f"bad verdict status {self.status}")


def compare_intervals(formula: str, lhs: Interval, rhs: Interval, notes: tuple[str, ...] = ()) -> FormulaVerdict:
    if lhs.intersects(rhs):
        extra = ()
        if lhs.is_exact and rhs.is_exact and lhs.lo == rhs.lo:
            extra = ("exact equality attained",)
        return FormulaVerdict(formula, lhs, rhs, "consistent", notes + extra)
    return FormulaVerdict(formula, lhs, rhs, "violated", notes)


@dataclass
class GradientReport:
    """Per-level gradient values along one chain, plus the running infimum.

    The chain infimum is an upper bound for the true infimum unless the
    chain stabilised (``exact``), and every reported value is >= -1.
    """

    group_label: str
    mode: str  # "rg" | "rgp"
    prime: int | None
    chain_kind: str
    chain_stabilized: bool
    levels: list[LevelEntry]
    running_inf: list[Interval]
    chain_estimate: Interval
    exact: bool
    hypotheses: tuple[str, ...]
    verdicts: list[FormulaVerdict] = field(default_factory=list)
    notes: tuple[str, ...] = ()

    @property
    def values(self) -> list[Interval]:
        return [entry.value for entry in self.levels]

    def is_monotone_nonincreasing(self) -> bool:
        vals = [entry.value for entry in self.levels]
        return all(b.hi <= a.hi and b.lo <= a.lo for a, b in zip(vals, vals[1:]))


def _level_entry(rec: SubgroupRecord, mode: str, prime: int | None) -> LevelEntry:
    idx = rec.index
    if mode == "rgp":
        assert prime is not None
        dp = rec.d_p(prime)
        v = Fraction(dp - 1, idx)
        value = Interval.exact(v)
        entry = LevelEntry(idx, dp, dp, dp, value)
    else:
        ab = rec.abelian(())
        value = Interval(Fraction(ab.d_lower - 1, idx), Fraction(ab.d_upper - 1, idx))
        entry = LevelEntry(idx, ab.d_lower, ab.d_upper, None, value)
    if value.lo < -1:
        raise DomainError("gradient value below -1; implementation defect")
    return entry


def rg_sequence(chain: ChainRecord, mode: str = "rgp") -> GradientReport:
    """Evaluate (d - 1)/index along the chain with a running infimum.

    Mode ``rgp`` uses the exact mod-p rank (requires a mod-p chain); mode
    ``rg`` carries the certified d-bracket per level.  The reported chain
    infimum never claims to be the true infimum unless the chain stabilised.
    """
    if mode not in ("rg", "rgp"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "rgp" and chain.prime is None:
        raise DomainError("rgp mode requires a mod-p chain")
    entries = [_level_entry(rec, mode, chain.prime) for rec in chain.levels]
    running: list[Interval] = []
    for entry in entries:
        if running:
            prev = running[-1]
            running.append(Interval(min(prev.lo, entry.value.lo), min(prev.hi, entry.value.hi)))
        else:
            running.append(entry.value)
    if not entries:
        raise DomainError("empty chain")
    if chain.stabilized:
        estimate = running[-1]
        exact = True
    else:
        estimate = Interval(Fraction(-1), running[-1].hi)
        exact = False
    hyps = [HYP_INTERSECTION]
    if chain.kind == "mod_p_frattini":
        hyps.append(f"residually-{chain.prime} (user-asserted)")
    else:
        hyps.append(HYP_RESIDUAL)
    notes = ()
    if chain.truncated_reason:
        notes = (f"chain truncated: {chain.truncated_reason}",)
    return GradientReport(
        group_label=chain.ambient.label or str(chain.ambient),
        mode=mode,
        prime=chain.prime,
        chain_kind=chain.kind,
        chain_stabilized=chain.stabilized,
        levels=entries,
        running_inf=running,
        chain_estimate=estimate,
        exact=exact,
        hypotheses=tuple(hyps),
        notes=notes,
    )


@dataclass
class AbsoluteGradientResult:
    """Upper bound for the absolute gradient from a finite normal enumeration."""

    interval: Interval
    witness: SubgroupRecord | None
    rows: list[LevelEntry]
    exact: bool
    skipped: int
    notes: tuple[str, ...]


def _maybe_group_order(pres: GroupPresentation, limit: int) -> int | None:
    budget = Limits(max_cosets=max(8 * limit + 64, 512), max_steps=2_000_000)
    result = todd_coxeter(pres, SubgroupSpec(), budget)
    if isinstance(result, Indeterminate):
        return None
    return result.index


def rg_absolute_upper(
    pres: GroupPresentation,
    max_index: int,
    mode: str = "rg",
    prime: int | None = None,
    limits: Limits | None = None,
    index_cap: int = 64,
) -> AbsoluteGradientResult | Indeterminate:
    """Minimum gradient value over all normal subgroups of index <= max_index.

    This is an upper bound for the absolute gradient (the true infimum also
    ranges over non-normal and higher-index subgroups).  It is exact when
    the group is finite with order within reach: the trivial subgroup then
    attains the minimum (rg mode), or the enumeration is exhaustive (rgp).
    """
    if mode == "rgp" and (prime is None or prime < 2):
        raise DomainError("rgp mode requires a prime")
    tables = low_index_normal_subgroups(pres, max_index, limits, index_cap=index_cap)
    if isinstance(tables, Indeterminate):
        return tables
    rows: list[LevelEntry] = []
    best: tuple[Fraction, SubgroupRecord] | None = None
    for t in tables:
        if mode == "rgp":
            k = t.index
            while k % prime == 0:
                k //= prime
            if k != 1:
                continue
        rec = SubgroupRecord(t, normal=True, provenance="low-index")
        entry = _level_entry(rec, mode, prime)
        rows.append(entry)
        if best is None or entry.value.hi < best[0]:
            best = (entry.value.hi, rec)
    if best is None:
        raise DomainError("enumeration produced no subgroups")
    order = _maybe_group_order(pres, max_index)
    exact = order is not None and order <= max_index
    notes = ["upper bound for the absolute gradient (finite normal enumeration)"]
    if exact:
        notes = [f"exact: group is finite of order {order} and the enumeration is exhaustive"]
        interval = Interval.exact(best[0])
    else:
        interval = Interval(Fraction(-1), best[0])
    return AbsoluteGradientResult(
        interval=interval,
        witness=best[1],
        rows=rows,
        exact=exact,
        skipped=0,
        notes=tuple(notes),
    )


def _one_over_a(order: int | str) -> Fraction:
    # convention: 1/|A| = 0 for infinite A
    if order == "infinite":
        return Fraction(0)
    return Fraction(1, order)


def verify_free_product(
    p1: GroupPresentation,
    p2: GroupPresentation,
    mode: str = "rg",
    max_index: int = 8,
    prime: int | None = None,
    depth: int = 4,
    limits: Limits | None = None,
) -> FormulaVerdict:
    """Check gradient additivity-plus-one on a free product.

    rg mode compares absolute-gradient estimates at ``max_index``; rgp mode
    compares mod-p chain estimates at ``depth``.
    """
    from .constructions import free_product

    q = free_product(p1, p2)
    if mode == "rg":
        lhs_res = rg_absolute_upper(q, max_index, "rg", limits=limits)
        r1 = rg_absolute_upper(p1, max_index, "rg", limits=limits)
        r2 = rg_absolute_upper(p2, max_index, "rg", limits=limits)
        for r in (lhs_res, r1, r2):
            if isinstance(r, Indeterminate):
                return FormulaVerdict(
                    "free-product rank gradient", None, None, "inconclusive",
                    (f"enumeration {r}",),
                )
        lhs = lhs_res.interval
        rhs = r1.interval + r2.interval
        rhs = rhs.shift(Fraction(1))
        return compare_intervals("free-product rank gradient", lhs, rhs)
    if prime is None:
        raise DomainError("rgp mode requires a prime")
    lhs_rep = rg_sequence(p_chain(q, prime, depth, limits), "rgp")
    rep1 = rg_sequence(p_chain(p1, prime, depth, limits), "rgp")
    rep2 = rg_sequence(p_chain(p2, prime, depth, limits), "rgp")
    rhs = (rep1.chain_estimate + rep2.chain_estimate).shift(Fraction(1))
    return compare_intervals(
        f"free-product {prime}-gradient", lhs_rep.chain_estimate, rhs
    )


def _restricted_estimate(
    chain: ChainRecord, embed, pres: GroupPresentation, mode: str
) -> Interval:
    restricted = restrict_chain(chain, embed, pres)
    return rg_sequence(restricted, mode).chain_estimate


def verify_amalgam(
    spec: AmalgamSpec,
    mode: str = "rgp",
    prime: int = 2,
    depth: int = 4,
    limits: Limits | None = None,
) -> tuple[FormulaVerdict, GradientReport]:
    """Gradient of an amalgam vs. the sum over its factors plus 1/|A|.

    Valid only under the user-asserted hypotheses (A amenable, trivial chain
    intersection); without amenability the verdict is inconclusive, since
    the subtraction formula genuinely fails over large subgroups (see
    ``example45``).
    """
    group = build_amalgam(spec)
    chain = p_chain(group.presentation, prime, depth, limits)
    report = rg_sequence(chain, mode)
    formula = f"amalgam {'rank' if mode == 'rg' else f'{prime}-'}gradient"
    if not spec.a_amenable:
        verdict = FormulaVerdict(
            formula, report.chain_estimate, None, "inconclusive",
            (
                "amenability of the amalgamated subgroup was not asserted;"
                " the subtraction formula can fail without it (see example45)",
            ),
        )
        report.verdicts.append(verdict)
        return verdict, report
    left_est = _restricted_estimate(chain, group.factor_words[0], spec.left, mode)
    right_est = _restricted_estimate(chain, group.factor_words[1], spec.right, mode)
    rhs = (left_est + right_est).shift(_one_over_a(spec.a_finite_order))
    notes = (f"1/|A| = {_one_over_a(spec.a_finite_order)} (|A| {spec.a_finite_order}, user-asserted)",)
    verdict = compare_intervals(formula, report.chain_estimate, rhs, notes)
    report.verdicts.append(verdict)
    return verdict, report


def verify_hnn(
    spec: HnnSpec,
    mode: str = "rgp",
    prime: int = 2,
    depth: int = 4,
    limits: Limits | None = None,
) -> tuple[FormulaVerdict, GradientReport]:
    """Gradient of an HNN extension vs. the base-group gradient plus 1/|A|."""
    group = build_hnn(spec)
    chain = p_chain(group.presentation, prime, depth, limits)
    report = rg_sequence(chain, mode)
    formula = f"hnn {'rank' if mode == 'rg' else f'{prime}-'}gradient"
    if not spec.a_amenable:
        verdict = FormulaVerdict(
            formula, report.chain_estimate, None, "inconclusive",
            (
                "amenability of the associated subgroup was not asserted;"
                " the additivity formula needs it (see example45)",
            ),
        )
        report.verdicts.append(verdict)
        return verdict, report
    base_est = _restricted_estimate(chain, group.factor_words[0], spec.base, mode)
    rhs = base_est.shift(_one_over_a(spec.a_finite_order))
    notes = (f"1/|A| = {_one_over_a(spec.a_finite_order)} (|A| {spec.a_finite_order}, user-asserted)",)
    verdict = compare_intervals(formula, report.chain_estimate, rhs, notes)
    report.verdicts.append(verdict)
    return verdict, report


@dataclass(frozen=True)
class NaiveAmalgamValue:
    """The would-be subtraction value for the standard counterexample family."""

    r: int
    value: Fraction
    terms: tuple[Fraction, Fraction, Fraction]
    impossible: bool
    note: str


def example45(r: int) -> NaiveAmalgamValue:
    """Naive subtraction value for F_r x Z/2 glued to F_r x Z/3 over F_r.

    The free factor has rank gradient r - 1 and finite index in both
    factors, so the subtraction formula would give (r-1)/2 + (r-1)/3 -
    (r-1) = -(r-1)/6.  Every group has rank gradient >= -1 (and infinite
    groups >= 0), so for r >= 2 the value is impossible; at r = 6k + 1 it
    is the integer -k.
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    rg_a = Fraction(r - 1)
    terms = (rg_a / 2, rg_a / 3, -rg_a)
    value = sum(terms, Fraction(0))
    impossible = r >= 2
    if r == 1:
        note = "degenerate: the free factor is infinite cyclic and amenable; value 0"
    else:
        note = (
            f"naive subtraction value {value} is impossible: every group has"
            " rank gradient >= -1, and an infinite group has >= 0, so the"
            " subtraction formula fails over a non-amenable subgroup"
        )
        if (r - 1) % 6 == 0:
            note += f"; at r = 6k+1 the value is the integer -{(r - 1) // 6}"
    return NaiveAmalgamValue(r, value, terms, impossible, note)
