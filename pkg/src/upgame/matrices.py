"""Square matrices over a finitely generated ring, and words in elementary matrices.

Everything here is exact: entries are :class:`NcPoly` values and products
respect noncommutativity (row entry times column entry, in that order).
Inverses are never computed in general; they exist only as witnesses
(reversed elementary words, signed-permutation transposes).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .rings import NcPoly, RingMismatchError, RingSpec, parse_poly

__all__ = [
    "DimensionMismatchError",
    "InverseWitnessError",
    "MatR",
    "ElemWord",
    "SignedPermutation",
    "elem_matrix",
    "commutator",
    "conjugate",
    "verify_sharp",
    "swap_word",
    "try_inverse",
    "parse_elem_word",
    "parse_matrix",
]


class DimensionMismatchError(ValueError):
    pass


class InverseWitnessError(ValueError):
    """No inverse witness: supply an elementary word or a signed permutation."""


class MatR:
    """Immutable n-by-n matrix with NcPoly entries (1-based index accessors)."""

    __slots__ = ("n", "ring", "rows")

    def __init__(self, ring: RingSpec, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatchError("matrix must be square")
        for row in rows:
            for entry in row:
                if not isinstance(entry, NcPoly) or entry.ring != ring:
                    raise RingMismatchError("all entries must share the matrix ring")
        self.ring = ring
        self.rows = rows
        self.n = n

    @classmethod
    def identity(cls, n: int, ring: RingSpec) -> "MatR":
        one, zero = NcPoly.one(ring), NcPoly.zero(ring)
        return cls(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> NcPoly:
        return self.rows[i - 1][j - 1]

    def __mul__(self, other: "MatR") -> "MatR":
        if not isinstance(other, MatR):
            return NotImplemented
        if self.n != other.n:
            raise DimensionMismatchError(f"size {self.n} vs {other.n}")
        if self.ring != other.ring:
            raise RingMismatchError("matrix rings differ")
        zero = NcPoly.zero(self.ring)
        rows = []
        for i in range(self.n):
            row = []
            for k in range(self.n):
                acc = zero
                for j in range(self.n):
                    a = self.rows[i][j]
                    b = other.rows[j][k]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return MatR(self.ring, rows)

    def transpose(self) -> "MatR":
        return MatR(self.ring, [[self.rows[j][i] for j in range(self.n)] for i in range(self.n)])

    def is_identity(self) -> bool:
        return self == MatR.identity(self.n, self.ring)

    def __eq__(self, other):
        if not isinstance(other, MatR):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring, self.rows))

    def format(self, compact: bool = False) -> str:
        sep = ";" if compact else "; "
        inner = "," if compact else ", "
        return sep.join(inner.join(e.format(compact=True) for e in row) for row in self.rows)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"MatR(n={self.n}, {self.format(compact=True)!r})"


def parse_matrix(text: str, ring: RingSpec) -> MatR:
    """Parse a matrix literal: rows separated by ';', entries by ','."""
    rows = []
    for row_text in text.strip().split(";"):
        rows.append([parse_poly(cell, ring) for cell in row_text.split(",")])
    return MatR(ring, rows)


def elem_matrix(n: int, i: int, j: int, r: NcPoly) -> MatR:
    """Identity with ``r`` placed at off-diagonal position (i, j)."""
    if i == j:
        raise ValueError("elementary matrices require i != j")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"position ({i},{j}) out of range for n={n}")
    mat = [list(row) for row in MatR.identity(n, r.ring).rows]
    mat[i - 1][j - 1] = r
    return MatR(r.ring, mat)


@dataclass(frozen=True)
class ElemFactor:
    i: int
    j: int
    r: NcPoly

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("elementary factor requires i != j")
        if self.i < 1 or self.j < 1:
            raise ValueError("indices are 1-based")


class ElemWord:
    """A word in elementary matrices; evaluates left-to-right, inverts exactly."""

    __slots__ = ("ring", "factors")

    def __init__(self, ring: RingSpec, factors=()):
        self.ring = ring
        factors = tuple(factors)
        for f in factors:
            if not isinstance(f, ElemFactor):
                raise TypeError("factors must be ElemFactor instances")
            if f.r.ring != ring:
                raise RingMismatchError("factor ring differs from word ring")
        self.factors = factors

    @classmethod
    def single(cls, ring: RingSpec, i: int, j: int, r: NcPoly) -> "ElemWord":
        return cls(ring, [ElemFactor(i, j, r)])

    def __mul__(self, other: "ElemWord") -> "ElemWord":
        if self.ring != other.ring:
            raise RingMismatchError("word rings differ")
        return ElemWord(self.ring, self.factors + other.factors)

    def inverse(self) -> "ElemWord":
        return ElemWord(self.ring, [ElemFactor(f.i, f.j, -f.r) for f in reversed(self.factors)])

    def min_size(self) -> int:
        return max((max(f.i, f.j) for f in self.factors), default=1)

    def evaluate(self, n: int) -> MatR:
        if n < self.min_size():
            raise ValueError(f"word uses indices beyond n={n}")
        result = MatR.identity(n, self.ring)
        for f in self.factors:
            result = result * elem_matrix(n, f.i, f.j, f.r)
        return result

    def __eq__(self, other):
        if not isinstance(other, ElemWord):
            return NotImplemented
        return self.ring == other.ring and self.factors == other.factors

    def __hash__(self):
        return hash((self.ring, self.factors))

    def format(self) -> str:
        return " ".join(f"E({f.i},{f.j};{f.r.format(compact=True)})" for f in self.factors)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"ElemWord({self.format()!r})"


_ELEM = re.compile(r"\s*E\(\s*(\d+)\s*,\s*(\d+)\s*;([^)]*)\)")


def parse_elem_word(text: str, ring: RingSpec) -> ElemWord:
    """Parse whitespace-separated ``E(i,j;expr)`` factors."""
    factors = []
    pos = 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _ELEM.match(text, pos)
        if m is None:
            raise ValueError(f"bad elementary word near {text[pos:pos + 20]!r}")
        i, j = int(m.group(1)), int(m.group(2))
        factors.append(ElemFactor(i, j, parse_poly(m.group(3), ring)))
        pos = m.end()
    return ElemWord(ring, factors)


@dataclass(frozen=True)
class SignedPermutation:
    """A matrix with one nonzero entry (+1 or -1) per row and column.

    ``sigma[l]`` is the 1-based row index of the nonzero entry in column l+1,
    i.e. the matrix sends basis vector l to ``signs[l] * e_{sigma[l]}``.
    """

    sigma: tuple
    signs: tuple

    @property
    def n(self) -> int:
        return len(self.sigma)

    def apply(self, index: int) -> int:
        return self.sigma[index - 1]

    def sign(self, index: int) -> int:
        return self.signs[index - 1]

    def inverse(self) -> "SignedPermutation":
        n = self.n
        sigma = [0] * n
        signs = [0] * n
        for l in range(n):
            sigma[self.sigma[l] - 1] = l + 1
            signs[self.sigma[l] - 1] = self.signs[l]
        return SignedPermutation(tuple(sigma), tuple(signs))

    def to_matrix(self, ring: RingSpec) -> MatR:
        zero = NcPoly.zero(ring)
        rows = [[zero] * self.n for _ in range(self.n)]
        for l in range(self.n):
            rows[self.sigma[l] - 1][l] = NcPoly.constant(ring, self.signs[l])
        return MatR(ring, rows)

    def conjugate_position(self, i: int, j: int):
        """Image of the elementary position (i, j) and the attached sign flip."""
        return self.apply(i), self.apply(j), self.sign(i) * self.sign(j)

    @classmethod
    def from_matrix(cls, mat: MatR) -> "SignedPermutation | None":
        """Recognize a signed permutation matrix; None if the shape does not match."""
        n = mat.n
        modulus = mat.ring.modulus
        sigma = [0] * n
        signs = [0] * n
        seen_rows = set()
        for col in range(1, n + 1):
            hits = []
            for row in range(1, n + 1):
                c = mat.entry(row, col).constant_value()
                if c is None:
                    return None
                if c == 0:
                    continue
                if c == 1 or (modulus is None and c == -1) or (modulus is not None and c == modulus - 1):
                    hits.append((row, 1 if c == 1 else -1))
                else:
                    return None
            if len(hits) != 1:
                return None
            row, sign = hits[0]
            if row in seen_rows:
                return None
            seen_rows.add(row)
            sigma[col - 1] = row
            signs[col - 1] = sign
        return cls(tuple(sigma), tuple(signs))


def try_inverse(mat: MatR) -> MatR | None:
    """Inverse witness for the supported vocabulary: identity, elementary, signed permutation."""
    n = mat.n
    if mat.is_identity():
        return mat
    # identity plus a single off-diagonal entry
    off = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)
           if i != j and not mat.entry(i, j).is_zero()]
    if len(off) == 1:
        i, j = off[0]
        if elem_matrix(n, i, j, mat.entry(i, j)) == mat:
            return elem_matrix(n, i, j, -mat.entry(i, j))
    sp = SignedPermutation.from_matrix(mat)
    if sp is not None:
        return sp.inverse().to_matrix(mat.ring)
    return None


def commutator(a: MatR, b: MatR, a_inv: MatR | None = None, b_inv: MatR | None = None) -> MatR:
    """a b a^-1 b^-1, with inverse witnesses inferred where possible."""
    a_inv = a_inv if a_inv is not None else try_inverse(a)
    b_inv = b_inv if b_inv is not None else try_inverse(b)
    if a_inv is None or b_inv is None:
        raise InverseWitnessError(
            "commutator needs inverse witnesses; supply elementary words or signed permutations")
    if not (a * a_inv).is_identity() or not (b * b_inv).is_identity():
        raise InverseWitnessError("supplied inverse is not a two-sided inverse")
    return a * b * a_inv * b_inv


def conjugate(g: MatR, ginv: MatR, a: MatR) -> MatR:
    """g a g^-1 after verifying that ginv really is a two-sided inverse of g."""
    if not (g * ginv).is_identity() or not (ginv * g).is_identity():
        raise InverseWitnessError("ginv is not a two-sided inverse of g")
    return g * a * ginv


def verify_sharp(n: int, i: int, j: int, k: int, r1: NcPoly, r2: NcPoly) -> bool:
    """Check [e_ij^r1, e_jk^r2] = e_ik^(r1 r2) exactly, for distinct i, j, k."""
    if len({i, j, k}) != 3:
        raise ValueError("indices i, j, k must be pairwise distinct")
    lhs = commutator(elem_matrix(n, i, j, r1), elem_matrix(n, j, k, r2))
    return lhs == elem_matrix(n, i, k, r1 * r2)


def swap_word(n: int, ring: RingSpec) -> ElemWord:
    """The signed-permutation word exchanging coordinates 1 and n.

    Evaluates to a matrix sending e_1 -> e_n, e_n -> e_1, fixing middle
    coordinates up to a single sign flip at coordinate n-1.
    """
    if n < 3:
        raise ValueError("swap word requires n >= 3")
    one = NcPoly.one(ring)
    s = [ElemFactor(n - 1, n, one), ElemFactor(n, n - 1, -one), ElemFactor(n - 1, n, one)]
    t = [ElemFactor(1, n, one), ElemFactor(n, 1, -one), ElemFactor(1, n, one)]
    return ElemWord(ring, s + s + t)
