"""Block-pattern subgroup schemas and a conservative certification algebra.

A pattern denotes the subgroup of E(n, R) generated by full elementary
families e_{i,j}^r at a set of "available" positions: an ANY_RING cell at
(i, j) contributes the family at that position, an E block on an index set
B contributes every family inside B.  Containment, conjugation and join
are computed on these position sets; a positive answer is a certificate,
a negative answer only means "not certified".
"""

from __future__ import annotations

import re
from enum import Enum
from functools import lru_cache

import random

from .matrices import ElemWord, MatR, SignedPermutation
from .rings import NcPoly, RingSpec

__all__ = [
    "BlockTag",
    "PatternError",
    "UnsupportedConjugatorError",
    "PatternSubgroup",
    "builtin_pattern",
    "builtin_names",
    "parse_pattern_ref",
    "pattern_contains",
    "pattern_join",
    "pattern_conjugate",
    "closure_to_full",
    "closure_positions",
    "sample_word",
    "matches_pattern",
    "abelianization_trivial_certificate",
]

MAX_PATTERN_SIZE = 12


class PatternError(ValueError):
    pass


class UnsupportedConjugatorError(PatternError):
    pass


class BlockTag(str, Enum):
    ZERO = "0"
    ONE = "1"
    ANY_RING = "R"
    E_BLOCK = "E"
    ANY_MAT = "*"


# Partial order of the tag lattice: ZERO <= ANY_RING <= ANY_MAT, ONE <= E_BLOCK <= ANY_MAT.
_TAG_LE = {
    (BlockTag.ZERO, BlockTag.ANY_RING),
    (BlockTag.ZERO, BlockTag.ANY_MAT),
    (BlockTag.ANY_RING, BlockTag.ANY_MAT),
    (BlockTag.ONE, BlockTag.E_BLOCK),
    (BlockTag.ONE, BlockTag.ANY_MAT),
    (BlockTag.E_BLOCK, BlockTag.ANY_MAT),
}


def tag_le(a: BlockTag, b: BlockTag) -> bool:
    return a == b or (a, b) in _TAG_LE


def closure_positions(n: int, positions) -> frozenset:
    """Saturate positions under (i,j) and (j,k) with i != k giving (i,k)."""
    pos = set(positions)
    changed = True
    while changed:
        changed = False
        by_row: dict[int, list[int]] = {}
        for i, j in pos:
            by_row.setdefault(i, []).append(j)
        for i, j in list(pos):
            for k in by_row.get(j, ()):
                if i != k and (i, k) not in pos:
                    pos.add((i, k))
                    changed = True
    return frozenset(pos)


def _maximal_blocks(n: int, positions: frozenset) -> list:
    """Disjoint index sets on which every off-diagonal position is available.

    Enumerates complete subsets (n is small by construction), keeps the
    maximal ones, then greedily picks disjoint blocks, largest first.
    """
    complete = []
    for mask in range(1, 1 << n):
        members = [i + 1 for i in range(n) if mask >> i & 1]
        if len(members) < 2:
            continue
        if all((a, b) in positions for a in members for b in members if a != b):
            complete.append(frozenset(members))
    maximal = [s for s in complete if not any(s < t for t in complete)]
    maximal.sort(key=lambda s: (-len(s), sorted(s)))
    chosen: list[frozenset] = []
    used: set[int] = set()
    for block in maximal:
        if not block & used:
            chosen.append(block)
            used |= block
    return chosen


class PatternSubgroup:
    """An n-by-n block-shape schema; equality is by denoted generator positions."""

    __slots__ = ("n", "positions", "star_cells", "name", "_presentation")

    def __init__(self, n: int, positions, star_cells=(), name: str | None = None):
        if n < 3:
            raise PatternError("patterns require n >= 3")
        if n > MAX_PATTERN_SIZE:
            raise PatternError(f"patterns support n <= {MAX_PATTERN_SIZE}")
        for i, j in positions:
            if i == j or not (1 <= i <= n and 1 <= j <= n):
                raise PatternError(f"bad position ({i},{j})")
        self.n = n
        self.positions = frozenset(positions)
        self.star_cells = frozenset(star_cells)
        self.name = name
        self._presentation = None

    # -- semantics ----------------------------------------------------------

    @property
    def availability(self) -> frozenset:
        """Positions whose full elementary family lies in the denoted subgroup."""
        return self.positions | {c for c in self.star_cells if c[0] != c[1]}

    def families(self) -> frozenset:
        """Generator families, defined only for star-free (certifiable) patterns."""
        if self.star_cells:
            raise PatternError("pattern with '*' cells has no certified generator set")
        return self.positions

    def is_exact(self) -> bool:
        return not self.star_cells

    def is_full(self) -> bool:
        return len(self.positions) == self.n * (self.n - 1)

    def is_trivial(self) -> bool:
        return not self.positions and not self.star_cells

    # -- presentation ---------------------------------------------------------

    def _present(self):
        if self._presentation is None:
            blocks = _maximal_blocks(self.n, self.positions)
            in_block = {i: b for b in blocks for i in b}
            cells = []
            for i in range(1, self.n + 1):
                row = []
                for j in range(1, self.n + 1):
                    if (i, j) in self.star_cells:
                        row.append(BlockTag.ANY_MAT)
                    elif i in in_block and in_block.get(j) is in_block[i]:
                        row.append(BlockTag.E_BLOCK)
                    elif i == j:
                        row.append(BlockTag.ONE)
                    elif (i, j) in self.positions:
                        row.append(BlockTag.ANY_RING)
                    else:
                        row.append(BlockTag.ZERO)
                cells.append(tuple(row))
            self._presentation = (tuple(blocks), tuple(cells))
        return self._presentation

    @property
    def blocks(self) -> tuple:
        return self._present()[0]

    @property
    def cells(self) -> tuple:
        return self._present()[1]

    def grid_rows(self) -> list:
        return [[tag.value for tag in row] for row in self.cells]

    def format_grid(self, compact: bool = False) -> str:
        if compact:
            return "/".join("".join(r) for r in self.grid_rows())
        return "\n".join(" ".join(r) for r in self.grid_rows())

    @classmethod
    def from_grid(cls, text_or_rows, name: str | None = None) -> "PatternSubgroup":
        """Parse a grid over {0,1,R,E,*}; E cells must tile complete disjoint blocks."""
        if isinstance(text_or_rows, str):
            text = text_or_rows.strip().replace("/", "\n")
            rows = [list(line.replace(" ", "")) for line in text.splitlines() if line.strip()]
        else:
            rows = [list(r) for r in text_or_rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise PatternError("grid must be square")
        try:
            tags = [[BlockTag(c) for c in row] for row in rows]
        except ValueError as exc:
            raise PatternError(f"bad grid cell: {exc}") from None
        e_indices = {i + 1 for i in range(n) for j in range(n) if BlockTag.E_BLOCK in (tags[i][j], tags[j][i])}
        # union-find over indices linked by E cells
        parent = {i: i for i in e_indices}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j and tags[i - 1][j - 1] is BlockTag.E_BLOCK:
                    parent[find(i)] = find(j)
        groups: dict[int, set] = {}
        for i in e_indices:
            groups.setdefault(find(i), set()).add(i)
        positions = set()
        for block in groups.values():
            if len(block) < 2:
                raise PatternError("an E block needs at least two indices")
            for a in block:
                for b in block:
                    if a != b and tags[a - 1][b - 1] is not BlockTag.E_BLOCK:
                        raise PatternError(f"E cells do not tile a complete block at ({a},{b})")
                    if a != b:
                        positions.add((a, b))
                if tags[a - 1][a - 1] not in (BlockTag.E_BLOCK, BlockTag.ONE):
                    raise PatternError(f"diagonal of E block broken at index {a}")
        star = set()
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                tag = tags[i - 1][j - 1]
                if tag is BlockTag.ANY_RING:
                    if i == j:
                        raise PatternError("R is only valid off the diagonal")
                    positions.add((i, j))
                elif tag is BlockTag.ANY_MAT:
                    star.add((i, j))
                elif tag is BlockTag.ONE and i != j:
                    raise PatternError("1 is only valid on the diagonal")
                elif tag is BlockTag.ZERO and i == j:
                    raise PatternError("diagonal cells cannot be 0")
        return cls(n, positions, star, name=name)

    # -- identity -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PatternSubgroup):
            return NotImplemented
        return (self.n, self.positions, self.star_cells) == (other.n, other.positions, other.star_cells)

    def __hash__(self):
        return hash((self.n, self.positions, self.star_cells))

    def __repr__(self):
        label = self.name or "pattern"
        return f"PatternSubgroup({label}@{self.n}: {self.format_grid(compact=True)})"


# -- builtin vocabulary --------------------------------------------------------

def _builtin_positions(name: str, n: int):
    block = {(i, j) for i in range(1, n) for j in range(1, n) if i != j}
    lower_right = {(i, j) for i in range(2, n + 1) for j in range(2, n + 1) if i != j}
    last_col = {(i, n) for i in range(1, n)}
    last_row = {(n, j) for j in range(1, n)}
    first_row = {(1, j) for j in range(2, n + 1)}
    first_col = {(i, 1) for i in range(2, n + 1)}
    table = {
        "trivial": set(),
        "M": last_col,
        "L": last_row,
        "Q": block,
        "G": {(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j},
        "H1_1": block | last_col,
        "H2_1": block | last_row,
        "wH2w_inv": first_row | lower_right,
        "wH1w_inv": first_col | lower_right,
    }
    if name in table:
        return table[name]
    m = re.fullmatch(r"Gij\((\d+),(\d+)\)", name)
    if m:
        i, j = int(m.group(1)), int(m.group(2))
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise PatternError(f"bad Gij position ({i},{j}) for n={n}")
        return {(i, j)}
    raise PatternError(f"unknown builtin pattern {name!r}")


def builtin_names(n: int) -> list:
    names = ["trivial", "M", "L", "Q", "G", "H1_1", "H2_1", "wH2w_inv", "wH1w_inv"]
    names += [f"Gij({i},{j})" for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return names


@lru_cache(maxsize=None)
def builtin_pattern(name: str, n: int) -> PatternSubgroup:
    if n < 3:
        raise PatternError("builtin patterns require n >= 3")
    return PatternSubgroup(n, frozenset(_builtin_positions(name, n)), name=name)


def parse_pattern_ref(ref: str, n: int | None = None) -> PatternSubgroup:
    """Resolve ``builtin:M@3``, a bare builtin name (with explicit n), or a grid literal."""
    m = re.fullmatch(r"builtin:([\w()+,]+)@(\d+)", ref.strip())
    if m:
        return builtin_pattern(m.group(1), int(m.group(2)))
    if "/" in ref or "\n" in ref:
        return PatternSubgroup.from_grid(ref)
    if n is None:
        raise PatternError("bare pattern name needs an explicit size")
    return builtin_pattern(ref.strip(), n)


def builtin_name_of(p: PatternSubgroup) -> str | None:
    for name in builtin_names(p.n):
        if builtin_pattern(name, p.n) == p:
            return name
    return None


# -- certification algebra ------------------------------------------------------

def pattern_contains(big: PatternSubgroup, small: PatternSubgroup) -> bool:
    """True certifies that the subgroup denoted by small lies in big's.

    False only means "not certified".  Patterns with '*' cells can never be
    certified on the small side.
    """
    if big.n != small.n:
        raise PatternError(f"size mismatch {big.n} vs {small.n}")
    if not small.is_exact():
        return False
    return small.families() <= big.availability


def pattern_join(a: PatternSubgroup, b: PatternSubgroup) -> PatternSubgroup:
    """Pattern of the subgroup generated by both, saturated under the closure rule."""
    if a.n != b.n:
        raise PatternError(f"size mismatch {a.n} vs {b.n}")
    positions = closure_positions(a.n, a.availability | b.availability)
    return PatternSubgroup(a.n, positions)


def closure_to_full(p: PatternSubgroup) -> PatternSubgroup:
    return PatternSubgroup(p.n, closure_positions(p.n, p.availability), p.star_cells)


def _block_partition(conj: PatternSubgroup) -> list:
    """Partition of indices for a block-diagonal schema conjugator; None if unsupported."""
    blocks = list(conj.blocks)
    covered = set().union(*blocks) if blocks else set()
    if not conj.positions <= {(i, j) for b in blocks for i in b for j in b}:
        return None
    for i in range(1, conj.n + 1):
        if i not in covered:
            blocks.append(frozenset([i]))
    return blocks


def pattern_conjugate(p: PatternSubgroup, conj) -> PatternSubgroup:
    """Pattern certified to contain g p g^-1 for every g matching the conjugator.

    Signed permutations conjugate exactly (position relabeling); block-diagonal
    schemas propagate each family to the enclosing block rectangle.
    """
    if isinstance(conj, ElemWord):
        mat = conj.evaluate(p.n)
        sp = SignedPermutation.from_matrix(mat)
        if sp is None:
            raise UnsupportedConjugatorError(
                "elementary-word conjugators must evaluate to signed permutations")
        conj = sp
    if isinstance(conj, MatR):
        sp = SignedPermutation.from_matrix(conj)
        if sp is None:
            raise UnsupportedConjugatorError("matrix conjugators must be signed permutations")
        conj = sp
    if isinstance(conj, SignedPermutation):
        if conj.n != p.n:
            raise PatternError(f"size mismatch {conj.n} vs {p.n}")
        positions = {(conj.apply(i), conj.apply(j)) for i, j in p.positions}
        star = {(conj.apply(i), conj.apply(j)) for i, j in p.star_cells}
        return PatternSubgroup(p.n, positions, star)
    if isinstance(conj, PatternSubgroup):
        if conj.n != p.n:
            raise PatternError(f"size mismatch {conj.n} vs {p.n}")
        partition = _block_partition(conj)
        if partition is None:
            raise UnsupportedConjugatorError(
                "pattern conjugators must be block-diagonal schemas")
        if not p.is_exact():
            raise UnsupportedConjugatorError("cannot conjugate a pattern with '*' cells by a schema")
        home = {i: b for b in partition for i in b}
        positions = set()
        for i, j in p.positions:
            bi, bj = home[i], home[j]
            if bi is bj:
                positions |= {(a, b) for a in bi for b in bi if a != b}
            else:
                positions |= {(a, b) for a in bi for b in bj}
        return PatternSubgroup(p.n, positions)
    raise UnsupportedConjugatorError(f"unsupported conjugator {conj!r}")


# -- concrete witnesses -----------------------------------------------------------

def sample_word(p: PatternSubgroup, ring: RingSpec, seed: int,
                degree_bound: int = 3, length_bound: int = 6) -> ElemWord:
    """Seeded random word in the pattern's generator families (identity word if trivial)."""
    if not p.is_exact():
        raise PatternError("cannot sample from a pattern with '*' cells")
    rng = random.Random(seed)
    positions = sorted(p.positions)
    word = ElemWord(ring)
    if not positions:
        return word
    for _ in range(rng.randint(1, length_bound)):
        i, j = rng.choice(positions)
        word = word * ElemWord.single(ring, i, j, _random_poly(ring, rng, degree_bound))
    return word


def _random_poly(ring: RingSpec, rng: random.Random, degree_bound: int, max_terms: int = 3) -> NcPoly:
    terms: dict[tuple, int] = {}
    for _ in range(rng.randint(1, max_terms)):
        length = rng.randint(0, degree_bound) if ring.num_generators else 0
        word = tuple(rng.randint(1, ring.num_generators) for _ in range(length))
        terms[word] = terms.get(word, 0) + rng.choice([-2, -1, 1, 2])
    return NcPoly(ring, terms)


def matches_pattern(p: PatternSubgroup, mat: MatR, relax_blocks: bool = True) -> bool:
    """Entry-wise necessary condition for membership in the denoted subgroup.

    ZERO cells must be 0 and ONE cells 1; E-block cells are relaxed to
    arbitrary entries unless ``relax_blocks`` is False, in which case the
    diagonal-block shape is still only checked entry-wise.
    """
    if mat.n != p.n:
        raise PatternError(f"size mismatch {mat.n} vs {p.n}")
    for i in range(1, p.n + 1):
        for j in range(1, p.n + 1):
            tag = p.cells[i - 1][j - 1]
            entry = mat.entry(i, j)
            if tag is BlockTag.ZERO and not entry.is_zero():
                return False
            if tag is BlockTag.ONE and not entry.is_one():
                return False
            if tag is BlockTag.E_BLOCK and not relax_blocks and i == j:
                # without relaxation we still cannot decide E-membership; no-op
                pass
    return True


def abelianization_trivial_certificate(n: int) -> bool:
    """Every elementary family is a commutator of two others when a spare index exists."""
    if n < 3:
        raise PatternError("certificate requires n >= 3")
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            if i == k:
                continue
            if not any(j not in (i, k) for j in range(1, n + 1)):
                return False
    return True
