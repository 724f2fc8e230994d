"""Free-group words in syllable form, and finite presentations.

A word is a tuple of ``(generator, exponent)`` syllables.  Exponents are
Python ints, so powers like ``x^(2^4000)`` cost nothing to store; only
:func:`letters` expands a word letter by letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class WordError(ValueError):
    pass


class UnmappedGenerator(WordError):
    pass


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def _check_name(name: str) -> str:
    if not isinstance(name, str) or not _NAME.match(name):
        raise WordError(f"bad generator name {name!r}")
    return name


@dataclass(frozen=True)
class Word:
    syllables: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        syl = tuple((_check_name(g), int(e)) for g, e in self.syllables)
        for _, e in syl:
            if e == 0:
                raise WordError("zero exponent in syllable")
        object.__setattr__(self, "syllables", syl)

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Word":
        return free_reduce(cls(((name, exp),))) if exp else cls()

    @classmethod
    def parse(cls, text: str, generators: Sequence[str] | None = None) -> "Word":
        return parse_word(text, generators)

    def __mul__(self, other: "Word") -> "Word":
        return free_reduce(Word(self.syllables + other.syllables))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        w = free_reduce(self)
        if n == 0 or not w.syllables:
            return Word()
        if len(w.syllables) == 1:
            g, e = w.syllables[0]
            return Word(((g, e * n),))
        result = Word()
        base = w
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __len__(self) -> int:
        """Letter length (sum of |exponents|)."""
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def is_identity(self) -> bool:
        return not free_reduce(self).syllables

    def generators(self) -> set[str]:
        return {g for g, _ in self.syllables}

    def exponent_sum(self, name: str) -> int:
        return sum(e for g, e in self.syllables if g == name)

    def __str__(self) -> str:
        return format_word(self)


def free_reduce(w: Word) -> Word:
    """Merge equal neighbours and cancel to the freely reduced form."""
    stack: list[list] = []
    for g, e in w.syllables:
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    return Word(tuple((g, e) for g, e in stack))


def cyclic_reduce(w: Word) -> Word:
    syl = list(free_reduce(w).syllables)
    while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        g, e = syl[0][0], syl[0][1] + syl[-1][1]
        syl = ([(g, e)] if e else []) + syl[1:-1]
    return Word(tuple(syl))


def substitute(w: Word, images: Mapping[str, Word]) -> Word:
    """Apply the homomorphism ``g -> images[g]``."""
    out: list[tuple[str, int]] = []
    for g, e in w.syllables:
        if g not in images:
            raise UnmappedGenerator(g)
        out.extend((images[g] ** e).syllables)
    return free_reduce(Word(tuple(out)))


def conjugate(w: Word, by: Word) -> Word:
    """``w^by = by^-1 w by``."""
    return by.inverse() * w * by


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return u.inverse() * v.inverse() * u * v


def conjugation_relator(u: str, p: int, v: str, q: int) -> Word:
    """Relator ``v^-1 u^p v u^-q`` encoding ``(u^p)^v = u^q``."""
    if p == 0 or q == 0:
        raise WordError("exponents must be nonzero")
    return free_reduce(Word(((v, -1), (u, p), (v, 1), (u, -q))))


_SYLLABLE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)(?:\s*\^\s*([+-]?\d+))?\s*")


def parse_word(text: str, generators: Sequence[str] | None = None) -> Word:
    """Parse ``x^2 y^-1 z`` style text.  ``1`` or an empty string is the identity."""
    s = text.strip()
    if s in ("", "1"):
        return Word()
    pos = 0
    out = []
    while pos < len(s):
        m = _SYLLABLE.match(s, pos)
        if not m or m.end() == pos:
            raise WordError(f"cannot parse word at position {pos}: {s[pos:pos + 10]!r}")
        g, e = m.group(1), m.group(2)
        if generators is not None and g not in generators:
            raise WordError(f"undeclared generator {g!r} at position {m.start(1)}")
        e = int(e) if e is not None else 1
        if e:
            out.append((g, e))
        pos = m.end()
    return Word(tuple(out))


def format_word(w: Word) -> str:
    if not w.syllables:
        return "1"
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in w.syllables)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = field(default=())

    def __post_init__(self):
        gens = tuple(_check_name(g) for g in self.generators)
        if len(set(gens)) != len(gens):
            raise WordError("duplicate generator names")
        rels = tuple(self.relators)
        for r in rels:
            extra = r.generators() - set(gens)
            if extra:
                raise WordError(f"relator uses undeclared generators {sorted(extra)}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)

    def with_relators(self, extra: Iterable[Word]) -> "Presentation":
        return Presentation(self.generators, self.relators + tuple(extra))

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.generators)]
        lines += [format_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        gens = None
        rels = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if gens is None:
                if not line.startswith("gens:"):
                    raise WordError(f"line {lineno}: expected 'gens:' header")
                gens = tuple(line[len("gens:"):].split())
                continue
            try:
                rels.append(parse_word(line, gens))
            except WordError as exc:
                raise WordError(f"line {lineno}: {exc}") from None
        if gens is None:
            raise WordError("missing 'gens:' header")
        return cls(gens, tuple(rels))


def letters(w: Word, generators: Sequence[str], max_length: int | None = None) -> np.ndarray:
    """Expand to coset-table columns (``2*i`` for g_i, ``2*i+1`` for its inverse)."""
    index = {g: i for i, g in enumerate(generators)}
    n = len(w)
    if max_length is not None and n > max_length:
        raise WordError(f"word of length {n} exceeds limit {max_length}")
    out = np.empty(n, dtype=np.int32)
    pos = 0
    for g, e in w.syllables:
        if g not in index:
            raise UnmappedGenerator(g)
        col = 2 * index[g] + (0 if e > 0 else 1)
        out[pos:pos + abs(e)] = col
        pos += abs(e)
    return out
