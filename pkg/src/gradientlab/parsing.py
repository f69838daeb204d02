"""Parsers and printers for the presentation / subgroup / amalgam / HNN file formats.

Presentation files (``.grp``)::

    # comment
    gens: a,b
    rels: a^2, b^3, a*b^-1 a

Words are products of ``name`` and ``name^k`` (k a possibly negative
integer), joined by ``*`` or whitespace.  ``rels:`` may be empty.
Subgroup files (``.sub``) carry ``sub: word(,word)*`` lines.  Amalgam and
HNN files extend the format with prefixed stanzas; see the README.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .words import (
    GeneratorSymbol,
    GroupPresentation,
    SubgroupSpec,
    Word,
    format_word,
    word,
)


@dataclass
class _Line:
    number: int
    key: str
    value: str
    value_column: int


def _split_lines(text: str) -> list[_Line]:
    """Strip comments, drop blanks, split each line into ``key: value``."""
    out: list[_Line] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        hash_pos = raw.find("#")
        line = raw if hash_pos < 0 else raw[:hash_pos]
        if not line.strip():
            continue
        colon = line.find(":")
        if colon < 0:
            raise ParseError("expected 'key: value'", number, len(line) - len(line.lstrip()) + 1)
        key = line[:colon].strip()
        if not key:
            raise ParseError("empty key before ':'", number, 1)
        out.append(_Line(number, key, line[colon + 1 :], colon + 2))
    return out


def _split_commas(value: str, column0: int) -> list[tuple[str, int]]:
    """Comma-split with 1-based column tracking; blank items dropped."""
    items: list[tuple[str, int]] = []
    start = 0
    for i in range(len(value) + 1):
        if i == len(value) or value[i] == ",":
            chunk = value[start:i]
            stripped = chunk.strip()
            if stripped:
                offset = len(chunk) - len(chunk.lstrip())
                items.append((stripped, column0 + start + offset))
            start = i + 1
    return items


def parse_word_text(text: str, alphabet: tuple[str, ...], line: int, column: int) -> Word:
    """Parse one word (``a*b^-2 c``) over ``alphabet``; ``1`` is the identity."""
    index = {name: i for i, name in enumerate(alphabet)}
    letters: list[int] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace() or ch == "*":
            i += 1
            continue
        if ch == "1" and (i + 1 == n or not (text[i + 1].isalnum() or text[i + 1] == "_")):
            i += 1
            continue
        if not ch.isalpha():
            raise ParseError(f"unexpected character {ch!r} in word", line, column + i)
        j = i
        while j < n and (text[j].isalnum() or text[j] == "_"):
            j += 1
        name = text[i:j]
        if name not in index:
            raise ParseError(f"undeclared generator {name!r}", line, column + i)
        exp = 1
        if j < n and text[j] == "^":
            k = j + 1
            if k < n and text[k] in "+-":
                k += 1
            if k >= n or not text[k].isdigit():
                raise ParseError("expected integer exponent after '^'", line, column + j)
            while k < n and text[k].isdigit():
                k += 1
            exp = int(text[j + 1 : k])
            j = k
        letter = index[name] + 1
        letters.extend([letter if exp > 0 else -letter] * abs(exp))
        i = j
    return word(letters, alphabet)


def _parse_gen_names(value: str, line: int, column: int) -> tuple[str, ...]:
    names: list[str] = []
    for item, col in _split_commas(value, column):
        if not item[0].isalpha() or not all(c.isalnum() or c == "_" for c in item):
            raise ParseError(f"invalid generator name {item!r}", line, col)
        if item in names:
            raise ParseError(f"duplicate generator name {item!r}", line, col)
        names.append(item)
    return tuple(names)


def _parse_word_list(value: str, alphabet: tuple[str, ...], line: int, column: int) -> tuple[Word, ...]:
    return tuple(
        parse_word_text(item, alphabet, line, col)
        for item, col in _split_commas(value, column)
    )


def _build_presentation(names: tuple[str, ...], rels: tuple[Word, ...], label: str) -> GroupPresentation:
    gens = tuple(GeneratorSymbol(i, n) for i, n in enumerate(names))
    return GroupPresentation(gens, rels, label)


def parse_presentation(text: str, label: str = "") -> GroupPresentation:
    """Parse a presentation file into a validated GroupPresentation."""
    lines = _split_lines(text)
    names: tuple[str, ...] | None = None
    rels: tuple[Word, ...] | None = None
    for ln in lines:
        if ln.key == "gens":
            if names is not None:
                raise ParseError("repeated 'gens:' line", ln.number, 1)
            names = _parse_gen_names(ln.value, ln.number, ln.value_column)
        elif ln.key == "rels":
            if names is None:
                raise ParseError("'rels:' before 'gens:'", ln.number, 1)
            if rels is not None:
                raise ParseError("repeated 'rels:' line", ln.number, 1)
            rels = _parse_word_list(ln.value, names, ln.number, ln.value_column)
        else:
            raise ParseError(f"unknown key {ln.key!r} in presentation file", ln.number, 1)
    if names is None:
        raise ParseError("missing 'gens:' line", max((l.number for l in lines), default=1), 1)
    return _build_presentation(names, rels or (), label)


def format_presentation(pres: GroupPresentation) -> str:
    """Canonical text form; ``parse_presentation`` round-trips it."""
    gens = ",".join(pres.alphabet)
    rels = ", ".join(format_word(r) for r in pres.relators)
    return f"gens: {gens}\nrels: {rels}\n"


def parse_subgroup(text: str, pres: GroupPresentation) -> SubgroupSpec:
    """Parse a subgroup file (``sub:`` lines) over ``pres``."""
    words: list[Word] = []
    for ln in _split_lines(text):
        if ln.key != "sub":
            raise ParseError(f"unknown key {ln.key!r} in subgroup file", ln.number, 1)
        words.extend(_parse_word_list(ln.value, pres.alphabet, ln.number, ln.value_column))
    return SubgroupSpec(tuple(words))


def format_subgroup(spec: SubgroupSpec) -> str:
    return "sub: " + ", ".join(format_word(w) for w in spec.words) + "\n"


def _parse_assert(value: str, line: int, column: int) -> dict:
    out: dict = {}
    for item, col in _split_commas(value, column):
        key, _, val = item.partition("=")
        key = key.strip()
        val = val.strip()
        if key == "|A|":
            if val == "infinite":
                out["a_order"] = "infinite"
            elif val.isdigit() and int(val) >= 1:
                out["a_order"] = int(val)
            else:
                raise ParseError("expected '|A|=<positive int>' or '|A|=infinite'", line, col)
        elif key == "amenable":
            if val not in ("true", "false"):
                raise ParseError("expected 'amenable=true|false'", line, col)
            out["amenable"] = val == "true"
        else:
            raise ParseError(f"unknown assertion {key!r}", line, col)
    return out


def _parse_pairs(
    value: str,
    left_alpha: tuple[str, ...],
    right_alpha: tuple[str, ...],
    line: int,
    column: int,
) -> list[tuple[Word, Word]]:
    pairs: list[tuple[Word, Word]] = []
    for item, col in _split_commas(value, column):
        lhs, eq, rhs = item.partition("=")
        if not eq:
            raise ParseError("expected 'word = word' pair", line, col)
        u = parse_word_text(lhs.strip(), left_alpha, line, col)
        v = parse_word_text(rhs.strip(), right_alpha, line, col + len(lhs) + 1)
        pairs.append((u, v))
    return pairs


def parse_amalgam_file(text: str, label: str = ""):
    """Parse an ``.amal`` file into an AmalgamSpec.

    Stanzas: ``left.gens`` / ``left.rels`` / ``right.gens`` / ``right.rels``
    for the factors, ``amalgam: u = v, ...`` identification pairs (u over the
    left factor, v over the right), optional ``a.gens`` / ``a.rels`` for a
    presentation of the amalgamated subgroup (one generator per pair), and
    ``assert: |A|=k|infinite, amenable=true|false``.
    """
    from .constructions import AmalgamSpec

    sections: dict[str, tuple[str, ...]] = {}
    rel_lines: dict[str, tuple[tuple[Word, ...], int]] = {}
    pair_lines: list[tuple[str, int, int]] = []
    asserts: dict = {}
    for ln in _split_lines(text):
        key = ln.key
        if key in ("left.gens", "right.gens", "a.gens"):
            if key in sections:
                raise ParseError(f"repeated {key!r}", ln.number, 1)
            sections[key] = _parse_gen_names(ln.value, ln.number, ln.value_column)
        elif key in ("left.rels", "right.rels", "a.rels"):
            prefix = key.split(".")[0]
            alpha = sections.get(prefix + ".gens")
            if alpha is None:
                raise ParseError(f"'{key}' before '{prefix}.gens'", ln.number, 1)
            rel_lines[key] = (
                _parse_word_list(ln.value, alpha, ln.number, ln.value_column),
                ln.number,
            )
        elif key == "amalgam":
            pair_lines.append((ln.value, ln.number, ln.value_column))
        elif key == "assert":
            asserts.update(_parse_assert(ln.value, ln.number, ln.value_column))
        else:
            raise ParseError(f"unknown key {key!r} in amalgam file", ln.number, 1)
    for side in ("left", "right"):
        if side + ".gens" not in sections:
            raise ParseError(f"missing '{side}.gens' stanza", 1, 1)
    left = _build_presentation(
        sections["left.gens"], rel_lines.get("left.rels", ((), 0))[0], label + ":left"
    )
    right = _build_presentation(
        sections["right.gens"], rel_lines.get("right.rels", ((), 0))[0], label + ":right"
    )
    pairs: list[tuple[Word, Word]] = []
    for value, number, column in pair_lines:
        pairs.extend(_parse_pairs(value, left.alphabet, right.alphabet, number, column))
    a_pres = None
    if "a.gens" in sections:
        a_pres = _build_presentation(
            sections["a.gens"], rel_lines.get("a.rels", ((), 0))[0], label + ":A"
        )
    return AmalgamSpec(
        left=left,
        right=right,
        a_words_left=tuple(u for u, _ in pairs),
        a_words_right=tuple(v for _, v in pairs),
        a_pres=a_pres,
        a_finite_order=asserts.get("a_order", "infinite"),
        a_amenable=asserts.get("amenable", False),
        label=label,
    )


def parse_hnn_file(text: str, label: str = ""):
    """Parse an ``.hnn`` file into an HnnSpec.

    Stanzas: ``base.gens`` / ``base.rels`` for the base group, ``hnn: u = v``
    pairs meaning the stable letter conjugates u to v, optional ``a.gens`` /
    ``a.rels``, and ``assert:`` as for amalgams.
    """
    from .constructions import HnnSpec

    sections: dict[str, tuple[str, ...]] = {}
    rel_lines: dict[str, tuple[tuple[Word, ...], int]] = {}
    pair_lines: list[tuple[str, int, int]] = []
    asserts: dict = {}
    for ln in _split_lines(text):
        key = ln.key
        if key in ("base.gens", "a.gens"):
            if key in sections:
                raise ParseError(f"repeated {key!r}", ln.number, 1)
            sections[key] = _parse_gen_names(ln.value, ln.number, ln.value_column)
        elif key in ("base.rels", "a.rels"):
            prefix = key.split(".")[0]
            alpha = sections.get(prefix + ".gens")
            if alpha is None:
                raise ParseError(f"'{key}' before '{prefix}.gens'", ln.number, 1)
            rel_lines[key] = (
                _parse_word_list(ln.value, alpha, ln.number, ln.value_column),
                ln.number,
            )
        elif key == "hnn":
            pair_lines.append((ln.value, ln.number, ln.value_column))
        elif key == "assert":
            asserts.update(_parse_assert(ln.value, ln.number, ln.value_column))
        else:
            raise ParseError(f"unknown key {key!r} in HNN file", ln.number, 1)
    if "base.gens" not in sections:
        raise ParseError("missing 'base.gens' stanza", 1, 1)
    base = _build_presentation(
        sections["base.gens"], rel_lines.get("base.rels", ((), 0))[0], label + ":base"
    )
    pairs: list[tuple[Word, Word]] = []
    for value, number, column in pair_lines:
        pairs.extend(_parse_pairs(value, base.alphabet, base.alphabet, number, column))
    a_pres = None
    if "a.gens" in sections:
        a_pres = _build_presentation(
            sections["a.gens"], rel_lines.get("a.rels", ((), 0))[0], label + ":A"
        )
    return HnnSpec(
        base=base,
        a_words=tuple(u for u, _ in pairs),
        phi_words=tuple(v for _, v in pairs),
        a_pres=a_pres,
        a_finite_order=asserts.get("a_order", "infinite"),
        a_amenable=asserts.get("amenable", False),
        label=label,
    )
