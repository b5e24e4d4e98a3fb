"""Explicit finite matrix groups over Z/m, used as desk-scale stand-ins.

The default model enumerates the full elementary group at size n over Z/m
by closure from the elementary generators; subgroup images of block
patterns are produced the same way, so the symbolic game layer and the
numerical lab talk about the same subgroups.
"""

from __future__ import annotations

from .patterns import PatternSubgroup
from .matrices import ElemWord

__all__ = ["FiniteGroupModel", "elementary_quotient"]

DEFAULT_MAX_ORDER = 200_000


def _mat_mul_mod(a, b, m):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) % m for j in range(n))
        for i in range(n)
    )


def _identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


class FiniteGroupModel:
    """A finite group of n-by-n matrices mod m with a symmetric generating set."""

    def __init__(self, n: int, modulus: int, elements, generator_indices):
        self.n = n
        self.modulus = modulus
        self.elements = tuple(elements)
        self.index = {mat: i for i, mat in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate elements")
        self.identity = self.index[_identity(n)]
        self.generators = tuple(generator_indices)
        self._inverses: dict[int, int] = {}
        self._subgroup_cache: dict[frozenset, frozenset] = {}
        self.rep_cache: dict = {}
        self._validate()

    def _validate(self):
        for g in self.generators:
            for h in range(len(self.elements)):
                prod = _mat_mul_mod(self.elements[g], self.elements[h], self.modulus)
                if prod not in self.index:
                    raise ValueError("element set is not closed under the generators")
        # symmetric generating set
        for g in self.generators:
            if self.inv(g) not in self.generators:
                raise ValueError("generating set is not symmetric")
        if self.subgroup(self.generators) != frozenset(range(len(self.elements))):
            raise ValueError("generators do not generate the element set")

    def __len__(self):
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.index[_mat_mul_mod(self.elements[i], self.elements[j], self.modulus)]

    def inv(self, i: int) -> int:
        cached = self._inverses.get(i)
        if cached is None:
            power, previous = i, self.identity
            while power != self.identity:
                previous, power = power, self.mul(power, i)
            cached = self._inverses[i] = previous
        return cached

    def subgroup(self, generator_indices) -> frozenset:
        """Subgroup generated by the given element indices (closure by products)."""
        key = frozenset(generator_indices)
        cached = self._subgroup_cache.get(key)
        if cached is not None:
            return cached
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            current = frontier.pop()
            for g in key:
                nxt = self.mul(current, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        result = frozenset(seen)
        self._subgroup_cache[key] = result
        return result

    def elementary(self, i: int, j: int, r: int) -> int:
        """Index of the elementary matrix with residue r at position (i, j)."""
        mat = [list(row) for row in _identity(self.n)]
        mat[i - 1][j - 1] = r % self.modulus
        return self.index[tuple(tuple(row) for row in mat)]

    def pattern_generators(self, pattern: PatternSubgroup) -> list:
        """Elementary generators (as element indices) of the pattern's subgroup image."""
        if pattern.n != self.n:
            raise ValueError(f"pattern size {pattern.n} != model size {self.n}")
        gens = []
        for (i, j) in sorted(pattern.families()):
            for r in range(1, self.modulus):
                gens.append(self.elementary(i, j, r))
        return gens

    def pattern_image(self, pattern: PatternSubgroup) -> frozenset:
        return self.subgroup(self.pattern_generators(pattern))

    def word_image(self, word: ElemWord) -> int:
        """Index of an elementary word evaluated mod m (generators specialized to 1)."""
        current = self.identity
        assignment = {i: 1 for i in range(1, word.ring.num_generators + 1)}
        for f in word.factors:
            r = f.r.evaluate(assignment, modulus=self.modulus)
            current = self.mul(current, self.elementary(f.i, f.j, r))
        return current

    def product_set(self, a, b) -> frozenset:
        return frozenset(self.mul(x, y) for x in a for y in b)


def elementary_quotient(n: int, modulus: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroupModel:
    """The full elementary group at size n over Z/m, enumerated by closure."""
    if n < 2 or modulus < 2:
        raise ValueError("need n >= 2 and modulus >= 2")
    gen_mats = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            for r in range(1, modulus):
                mat = [list(row) for row in _identity(n)]
                mat[i - 1][j - 1] = r
                gen_mats.append(tuple(tuple(row) for row in mat))
    elements = [_identity(n)]
    seen = {elements[0]}
    frontier = [elements[0]]
    while frontier:
        current = frontier.pop()
        for g in gen_mats:
            nxt = _mat_mul_mod(current, g, modulus)
            if nxt not in seen:
                if len(seen) >= max_order:
                    raise ValueError(f"group order exceeds cap {max_order}")
                seen.add(nxt)
                elements.append(nxt)
                frontier.append(nxt)
    elements.sort()
    model = FiniteGroupModel.__new__(FiniteGroupModel)
    FiniteGroupModel.__init__(
        model, n, modulus, elements,
        [elements.index(g) for g in sorted(set(gen_mats))])
    return model
