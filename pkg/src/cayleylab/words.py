"""Alphabets and words over inverse-closed generating sets.

A word is stored as ``bytes``: each byte is a letter index into the
alphabet.  Letters come in adjacent inverse pairs, so the formal inverse of
letter ``i`` is ``i ^ 1``.  This keeps words hashable, compact and fast to
compare; byte-wise lexicographic order combined with length gives the
shortlex order used everywhere for canonical choices.

Text syntax: a generator is a single name (``a``), its inverse carries a
``-`` suffix (``a-``).  Words may be written run together (``aba-``) or
space separated (``a b a-``); ``1`` denotes the empty word.
"""

from __future__ import annotations

from .errors import UnsupportedWord

Word = bytes

EMPTY: Word = b""


class Alphabet:
    """Ordered inverse-closed list of generator symbols.

    ``symbols[2k]`` is the k-th generator, ``symbols[2k+1]`` its formal
    inverse.  The involution ``i -> i ^ 1`` pairs each letter with its
    inverse and is its own inverse.
    """

    __slots__ = ("symbols", "generators", "_index")

    def __init__(self, generator_names):
        generator_names = tuple(generator_names)
        if len(set(generator_names)) != len(generator_names):
            raise ValueError(f"duplicate generator names: {generator_names}")
        symbols = []
        for name in generator_names:
            if not name or " " in name or name.endswith("-") or name == "1":
                raise ValueError(f"invalid generator name: {name!r}")
            symbols.append(name)
            symbols.append(name + "-")
        self.symbols = tuple(symbols)
        self.generators = generator_names
        self._index = {s: i for i, s in enumerate(symbols)}

    # -- basic structure ---------------------------------------------------

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({', '.join(self.generators)})"

    @staticmethod
    def inverse(letter: int) -> int:
        return letter ^ 1

    def letters(self):
        return range(len(self.symbols))

    # -- text conversion ---------------------------------------------------

    def letter_index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnsupportedWord(f"unknown letter {symbol!r}") from None

    def parse(self, text: str) -> Word:
        """Parse ``aba-`` / ``a b a-`` / ``1`` into a word.

        A run of k dashes after a generator stands for its inverse repeated
        k times, so ``b--`` is the inverse of b squared.
        """
        text = text.strip()
        if text in ("", "1"):
            return EMPTY
        out = bytearray()
        for chunk in text.split():
            i = 0
            while i < len(chunk):
                # longest-match on generator names, then a dash run
                best = None
                for name in self.generators:
                    if chunk.startswith(name, i) and (best is None or len(name) > len(best)):
                        best = name
                if best is None:
                    raise UnsupportedWord(f"cannot parse {chunk!r} at position {i}")
                i += len(best)
                dashes = 0
                while i < len(chunk) and chunk[i] == "-":
                    dashes += 1
                    i += 1
                if dashes:
                    out.extend([self._index[best + "-"]] * dashes)
                else:
                    out.append(self._index[best])
        return bytes(out)

    def format(self, word: Word) -> str:
        if not word:
            return "1"
        return "".join(self.symbols[b] for b in word)

    def validate(self, word: Word) -> Word:
        if any(b >= len(self.symbols) for b in word):
            raise UnsupportedWord(f"letter index out of range for {self!r}")
        return word


def invert(word: Word) -> Word:
    return bytes(b ^ 1 for b in reversed(word))


def free_reduce(word: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain (stack reducer)."""
    out = bytearray()
    for b in word:
        if out and out[-1] == b ^ 1:
            out.pop()
        else:
            out.append(b)
    return bytes(out)


def is_reduced(word: Word) -> bool:
    return all(word[i] != word[i + 1] ^ 1 for i in range(len(word) - 1))


def shortlex_key(word: Word):
    return (len(word), word)


def shortlex_less(u: Word, v: Word) -> bool:
    return (len(u), u) < (len(v), v)
