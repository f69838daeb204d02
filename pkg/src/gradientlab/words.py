"""Free-word algebra: generator symbols, reduced words, group presentations.

Words are stored freely reduced at all times.  A letter is a signed
nonzero integer: ``+(i+1)`` is generator ``i``, ``-(i+1)`` its inverse.
Every word carries the alphabet (tuple of generator names) it is written
over, so mixed-alphabet arithmetic can be rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

MAX_GENERATORS = 4096
MAX_RELATOR_LENGTH = 1 << 20

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class GeneratorSymbol:
    """A generator: dense id within its presentation plus a printable name."""

    id: int
    name: str

    def __post_init__(self) -> None:
        if self.id < 0:
            raise DomainError(f"generator id must be non-negative, got {self.id}")
        if not _NAME_RE.match(self.name):
            raise DomainError(f"invalid generator name {self.name!r}")


def free_reduce_letters(raw: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a sequence of signed letters with a stack scan."""
    out: list[int] = []
    for letter in raw:
        if letter == 0:
            raise DomainError("letter 0 is not a valid signed generator")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word over a fixed alphabet of generator names."""

    letters: tuple[int, ...]
    alphabet: tuple[str, ...]

    def __post_init__(self) -> None:
        n = len(self.alphabet)
        for letter in self.letters:
            if letter == 0 or abs(letter) > n:
                raise DomainError(f"letter {letter} outside alphabet of size {n}")
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise DomainError("word is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def is_identity(self) -> bool:
        return not self.letters

    def exponent_sum(self, gen_index: int) -> int:
        target = gen_index + 1
        return sum(1 if x == target else -1 if x == -target else 0 for x in self.letters)

    def cyclically_reduced(self) -> "Word":
        letters = list(self.letters)
        while len(letters) >= 2 and letters[0] == -letters[-1]:
            letters = letters[1:-1]
        return Word(tuple(letters), self.alphabet)


def word(raw: Sequence[int], alphabet: tuple[str, ...]) -> Word:
    """Build a word from signed letters, reducing eagerly."""
    return Word(free_reduce_letters(raw), alphabet)


def free_reduce(raw: Sequence[int], alphabet: tuple[str, ...]) -> Word:
    """Freely reduce ``raw`` (signed letters) over ``alphabet``."""
    return word(raw, alphabet)


def _check_same_alphabet(u: Word, v: Word) -> None:
    if u.alphabet != v.alphabet:
        raise DomainError(
            f"mixed generator sets: {u.alphabet} vs {v.alphabet}"
        )


def multiply(u: Word, v: Word) -> Word:
    """Group product u*v, freely reduced."""
    _check_same_alphabet(u, v)
    left = list(u.letters)
    i = 0
    vl = v.letters
    while left and i < len(vl) and left[-1] == -vl[i]:
        left.pop()
        i += 1
    return Word(tuple(left) + vl[i:], u.alphabet)


def invert(u: Word) -> Word:
    """Group inverse of u."""
    return Word(tuple(-x for x in reversed(u.letters)), u.alphabet)


def power(u: Word, n: int) -> Word:
    if n < 0:
        return power(invert(u), -n)
    acc = Word((), u.alphabet)
    for _ in range(n):
        acc = multiply(acc, u)
    return acc


def conjugate(u: Word, by: Word) -> Word:
    """by^-1 * u * by."""
    return multiply(multiply(invert(by), u), by)


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u^-1 v^-1 u v."""
    return multiply(multiply(invert(u), invert(v)), multiply(u, v))


def format_word(w: Word) -> str:
    """Render a word in the file format: ``a*b^-1*a^2``; identity is ``1``."""
    if not w.letters:
        return "1"
    parts: list[str] = []
    i = 0
    letters = w.letters
    while i < len(letters):
        letter = letters[i]
        j = i
        while j < len(letters) and letters[j] == letter:
            j += 1
        count = j - i
        name = w.alphabet[abs(letter) - 1]
        exp = count if letter > 0 else -count
        parts.append(name if exp == 1 else f"{name}^{exp}")
        i = j
    return "*".join(parts)


@dataclass(frozen=True)
class GroupPresentation:
    """A finite presentation: generators plus freely+cyclically reduced relators.

    Relators are normalised at construction: freely and cyclically reduced,
    empty relators dropped, exact duplicates dropped.  All relators must be
    written over this presentation's generators.
    """

    generators: tuple[GeneratorSymbol, ...]
    relators: tuple[Word, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.generators) > MAX_GENERATORS:
            raise DomainError(
                f"too many generators ({len(self.generators)} > {MAX_GENERATORS})"
            )
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise DomainError("duplicate generator name")
        for i, g in enumerate(self.generators):
            if g.id != i:
                raise DomainError("generator ids must be dense 0..n-1 in order")
        alphabet = tuple(names)
        normalised: list[Word] = []
        seen: set[tuple[int, ...]] = set()
        for rel in self.relators:
            if rel.alphabet != alphabet:
                raise DomainError(
                    f"relator {rel} not over this presentation's generators"
                )
            if len(rel) > MAX_RELATOR_LENGTH:
                raise DomainError("relator exceeds maximum length")
            rel = rel.cyclically_reduced()
            if rel.is_identity() or rel.letters in seen:
                continue
            seen.add(rel.letters)
            normalised.append(rel)
        object.__setattr__(self, "relators", tuple(normalised))

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    def generator_word(self, i: int) -> Word:
        return Word((i + 1,), self.alphabet)

    def generator_words(self) -> tuple[Word, ...]:
        return tuple(self.generator_word(i) for i in range(len(self.generators)))

    def word(self, raw: Sequence[int]) -> Word:
        return word(raw, self.alphabet)

    def __str__(self) -> str:
        gens = ",".join(self.alphabet)
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"<{gens} | {rels}>"


def presentation(
    names: Sequence[str], relator_letters: Sequence[Sequence[int]] = (), label: str = ""
) -> GroupPresentation:
    """Convenience constructor from generator names and letter sequences."""
    gens = tuple(GeneratorSymbol(i, n) for i, n in enumerate(names))
    alphabet = tuple(names)
    rels = tuple(word(r, alphabet) for r in relator_letters)
    return GroupPresentation(gens, rels, label)


@dataclass(frozen=True)
class SubgroupSpec:
    """A finitely generated subgroup, given by words in the ambient generators.

    The empty spec denotes the trivial subgroup.
    """

    words: tuple[Word, ...] = field(default=())

    def __post_init__(self) -> None:
        alphabets = {w.alphabet for w in self.words}
        if len(alphabets) > 1:
            raise DomainError("subgroup generator words over mixed alphabets")

    def __len__(self) -> int:
        return len(self.words)

    def validate_over(self, pres: GroupPresentation) -> None:
        for w in self.words:
            if w.alphabet != pres.alphabet:
                raise DomainError(f"subgroup word {w} not valid over {pres}")


def letter_from(name_index: int, sign: int) -> int:
    """Signed letter for generator ``name_index`` with sign +1/-1."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    return sign * (name_index + 1)
