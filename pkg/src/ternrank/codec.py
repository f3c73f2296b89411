"""Canonical minimum-redundancy prefix coding over three-character XYZ letters.

Bit strings are plain ``str`` objects of ``'0'`` and ``'1'``; the scoring only
needs their lengths, and the string form keeps encode/decode easy to inspect.
"""

from __future__ import annotations

import csv
import heapq
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ternrank.transform import LETTER_RE

BITS_PER_CHAR = 8
LETTER_WIDTH = 3
BITS_PER_ALPHABET_LETTER = BITS_PER_CHAR * LETTER_WIDTH


class CodecError(ValueError):
    pass


def tokenize(s: str) -> list[str]:
    if len(s) % LETTER_WIDTH:
        raise CodecError("length not multiple of 3")
    letters = [s[i:i + LETTER_WIDTH] for i in range(0, len(s), LETTER_WIDTH)]
    for i, letter in enumerate(letters):
        if not LETTER_RE.fullmatch(letter) or (letter[0] == "~" and letter[1:] != "00"):
            raise CodecError(f"malformed letter {letter!r} at offset {i * LETTER_WIDTH}")
    return letters


def huffman_lengths(counts: dict[str, int]) -> dict[str, int]:
    """Optimal code lengths by repeated merging of the two lightest subtrees.

    Ties are broken by the smallest letter in the subtree so the result only
    depends on the multiset of counts. A one-letter alphabet gets length 1.
    """
    if not counts:
        raise CodecError("empty input")
    if len(counts) == 1:
        return {letter: 1 for letter in counts}
    heap = [(c, letter, (letter,)) for letter, c in sorted(counts.items())]
    heapq.heapify(heap)
    depth = dict.fromkeys(counts, 0)
    while len(heap) > 1:
        wa, ka, a = heapq.heappop(heap)
        wb, kb, b = heapq.heappop(heap)
        for letter in itertools.chain(a, b):
            depth[letter] += 1
        heapq.heappush(heap, (wa + wb, min(ka, kb), a + b))
    return depth


def canonical_codewords(lengths: dict[str, int]) -> dict[str, str]:
    """Assign codewords in (length, letter) order, incrementing within a length."""
    order = sorted(lengths, key=lambda s: (lengths[s], s))
    codes = {}
    code = 0
    prev_len = lengths[order[0]]
    for letter in order:
        n = lengths[letter]
        code <<= n - prev_len
        codes[letter] = format(code, f"0{n}b")
        code += 1
        prev_len = n
    return codes


@dataclass(frozen=True)
class CodecModel:
    alphabet: tuple[str, ...]
    counts: tuple[int, ...]
    code_lengths: tuple[int, ...]
    codewords: tuple[str, ...]
    _encode_table: dict[str, str] = field(init=False, repr=False, compare=False)
    _decode_table: dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_encode_table", dict(zip(self.alphabet, self.codewords)))
        object.__setattr__(self, "_decode_table", dict(zip(self.codewords, self.alphabet)))

    @property
    def kraft_sum(self) -> float:
        return sum(2.0 ** -n for n in self.code_lengths)

    def length_of(self, letter: str) -> int:
        return len(self._encode_table[letter])

    def encoded_length(self) -> int:
        """Bit length of the stream the model was built from."""
        return sum(c * n for c, n in zip(self.counts, self.code_lengths))

    def encode(self, letters: Iterable[str]) -> str:
        table = self._encode_table
        try:
            return "".join([table[x] for x in letters])
        except KeyError as exc:
            raise CodecError(f"letter {exc.args[0]!r} absent from model") from None

    def decode(self, bits: str, count: int) -> list[str]:
        table = self._decode_table
        max_len = max(self.code_lengths)
        out: list[str] = []
        pos, end = 0, len(bits)
        while len(out) < count:
            for n in range(1, max_len + 1):
                if pos + n > end:
                    raise CodecError("unexpected end of stream")
                letter = table.get(bits[pos:pos + n])
                if letter is not None:
                    out.append(letter)
                    pos += n
                    break
            else:
                raise CodecError(f"invalid codeword at bit {pos}")
        if pos != end:
            raise CodecError(f"{end - pos} trailing bits after {count} letters")
        return out

    def to_csv(self) -> str:
        """Debug dump as ``letter,count,length,codeword`` rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("letter", "count", "length", "codeword"))
        for row in zip(self.alphabet, self.counts, self.code_lengths, self.codewords):
            w.writerow(row)
        return buf.getvalue()


def build_model(letters: Sequence[str]) -> CodecModel:
    counts = Counter(letters)
    if not counts:
        raise CodecError("empty input")
    lengths = huffman_lengths(counts)
    codes = canonical_codewords(lengths)
    alphabet = tuple(sorted(counts))
    return CodecModel(
        alphabet=alphabet,
        counts=tuple(counts[a] for a in alphabet),
        code_lengths=tuple(lengths[a] for a in alphabet),
        codewords=tuple(codes[a] for a in alphabet),
    )


def encode(letters: Sequence[str], model: CodecModel) -> str:
    return model.encode(letters)


def decode(bits: str, model: CodecModel, count: int) -> list[str]:
    if count == 0:
        if bits:
            raise CodecError(f"{len(bits)} trailing bits after 0 letters")
        return []
    return model.decode(bits, count)


@dataclass(frozen=True)
class CompressionStats:
    l_src: int
    l_cod: int
    l_abc: int

    @property
    def ratio_percent(self) -> float:
        return (self.l_cod + self.l_abc) / self.l_src * 100


ModelBuilder = Callable[[Sequence[str]], CodecModel]


def compression_stats(s: str, builder: ModelBuilder = build_model) -> CompressionStats:
    """Source, coded and alphabet bit lengths for a letter string.

    ``builder`` lets another coding backend stand in for the default Huffman model;
    it must return an object with ``alphabet`` and ``encode``.
    """
    letters = tokenize(s)
    if not letters:
        raise CodecError("empty input")
    model = builder(letters)
    return CompressionStats(
        l_src=BITS_PER_CHAR * len(s),
        l_cod=len(model.encode(letters)),
        l_abc=BITS_PER_ALPHABET_LETTER * len(model.alphabet),
    )
