"""Exact arithmetic in finitely generated associative rings.

Elements are integer-coefficient polynomials in k generators that either
commute or are free (noncommuting), with coefficients optionally reduced
mod m.  Monomials are stored as tuples of 1-based generator indices; the
empty tuple is the unit monomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "RingMismatchError",
    "RingSpec",
    "NcPoly",
    "parse_poly",
]

_ALIASES = ("x", "y", "z")


class RingMismatchError(ValueError):
    """Raised when combining elements built over different ring specs."""


@dataclass(frozen=True)
class RingSpec:
    """Shape of the coefficient ring: k generators, commutativity, optional modulus."""

    num_generators: int
    commutative: bool = False
    modulus: int | None = None

    def __post_init__(self):
        if self.num_generators < 0:
            raise ValueError("num_generators must be >= 0")
        if self.modulus is not None and self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if self.num_generators == 0:
            # Z and Z/m are commutative regardless of the flag.
            object.__setattr__(self, "commutative", True)

    def generator_name(self, index: int) -> str:
        if not 1 <= index <= self.num_generators:
            raise ValueError(f"generator index {index} out of range")
        if self.num_generators <= 3:
            return _ALIASES[index - 1]
        return f"x{index}"

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """Parse forms like ``free:2``, ``commutative:3``, ``Z``, ``Z/4``, ``free:2/3``."""
        text = text.strip()
        m = re.fullmatch(r"(Z|free:\d+|comm(?:utative)?:\d+)(?:/(\d+))?", text)
        if m is None:
            raise ValueError(f"unrecognized ring spec {text!r}")
        base, mod = m.group(1), m.group(2)
        modulus = int(mod) if mod else None
        if base == "Z":
            return cls(0, True, modulus)
        kind, k = base.split(":")
        return cls(int(k), kind.startswith("comm"), modulus)

    def __str__(self) -> str:
        suffix = f"/{self.modulus}" if self.modulus else ""
        if self.num_generators == 0:
            return "Z" + suffix
        kind = "commutative" if self.commutative else "free"
        return f"{kind}:{self.num_generators}" + suffix


def _normalize(ring: RingSpec, terms: dict) -> dict:
    """Canonical form: sorted words in commutative mode, reduced nonzero coefficients."""
    out: dict[tuple, int] = {}
    for word, coeff in terms.items():
        if ring.commutative:
            word = tuple(sorted(word))
        out[word] = out.get(word, 0) + coeff
    if ring.modulus is not None:
        out = {w: c % ring.modulus for w, c in out.items()}
    return {w: c for w, c in out.items() if c != 0}


class NcPoly:
    """Immutable polynomial over a :class:`RingSpec`, in canonical term-map form."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: RingSpec, terms: dict | None = None):
        self.ring = ring
        cleaned = _normalize(ring, terms or {})
        for word in cleaned:
            for letter in word:
                if not 1 <= letter <= ring.num_generators:
                    raise ValueError(f"generator index {letter} out of range for {ring}")
        self._terms = cleaned
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring: RingSpec) -> "NcPoly":
        return cls(ring)

    @classmethod
    def one(cls, ring: RingSpec) -> "NcPoly":
        return cls(ring, {(): 1})

    @classmethod
    def constant(cls, ring: RingSpec, value: int) -> "NcPoly":
        return cls(ring, {(): value})

    @classmethod
    def generator(cls, ring: RingSpec, index: int) -> "NcPoly":
        if not 1 <= index <= ring.num_generators:
            raise ValueError(f"generator index {index} out of range for {ring}")
        return cls(ring, {(index,): 1})

    # -- queries -----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {(): 1}

    def constant_value(self) -> int | None:
        """The integer value if this is a constant polynomial, else None."""
        if not self._terms:
            return 0
        if len(self._terms) == 1 and () in self._terms:
            return self._terms[()]
        return None

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "NcPoly":
        if isinstance(other, int):
            return NcPoly.constant(self.ring, other)
        if isinstance(other, NcPoly):
            if other.ring != self.ring:
                raise RingMismatchError(f"cannot combine {self.ring} with {other.ring}")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0) + c
        return NcPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly(self.ring, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict[tuple, int] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                terms[w] = terms.get(w, 0) + c1 * c2
        return NcPoly(self.ring, terms)

    def __rmul__(self, other):
        if isinstance(other, int):
            return NcPoly(self.ring, {w: other * c for w, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = NcPoly.one(self.ring)
        for _ in range(exponent):
            result = result * self
        return result

    def evaluate(self, assignment, modulus: int | None = None) -> int:
        """Specialize generators to integers; a ring homomorphism to Z (or Z/m).

        ``assignment`` maps every generator index 1..k to an integer.  If the
        ring itself has a modulus, it is applied on top of ``modulus``.
        """
        values = {}
        for i in range(1, self.ring.num_generators + 1):
            if i not in assignment:
                raise ValueError(f"assignment missing generator {i}")
            values[i] = assignment[i]
        total = 0
        for word, coeff in self._terms.items():
            prod = coeff
            for letter in word:
                prod *= values[letter]
            total += prod
        if self.ring.modulus is not None:
            total %= self.ring.modulus
        if modulus is not None:
            total %= modulus
        return total

    # -- equality / hashing ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = NcPoly.constant(self.ring, other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- text form ---------------------------------------------------------

    def format(self, compact: bool = False) -> str:
        """Canonical text form, e.g. ``2*x*y - y*x + 1``; round-trips via parse_poly."""
        if not self._terms:
            return "0"
        items = sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        parts = []
        for word, coeff in items:
            factors = [self.ring.generator_name(i) for i in word]
            if not factors:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(coeff))] + factors)
            parts.append(("-" if coeff < 0 else "+", body))
        sep = "" if compact else " "
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f"{sep}{sign}{sep}{body}"
        return text

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"NcPoly({self.ring}, {self.format()!r})"


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[A-Za-z]\d*)|(?P<op>[+*^-]))")


def parse_poly(text: str, ring: RingSpec) -> NcPoly:
    """Parse the textual polynomial form produced by :meth:`NcPoly.format`."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ValueError(f"bad character in polynomial at {text[pos:]!r}")
            break
        pos = m.end()
        if m.group("int") is not None:
            tokens.append(("int", int(m.group("int"))))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("var")))
        else:
            tokens.append(("op", m.group("op")))

    def var_index(name: str) -> int:
        if ring.num_generators <= 3 and name in _ALIASES[: ring.num_generators]:
            return _ALIASES.index(name) + 1
        m = re.fullmatch(r"x(\d+)", name)
        if m and 1 <= int(m.group(1)) <= ring.num_generators:
            return int(m.group(1))
        raise ValueError(f"unknown generator {name!r} for {ring}")

    result = NcPoly.zero(ring)
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i] in (("op", "+"), ("op", "-")):
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise ValueError("dangling sign in polynomial")
        term = NcPoly.constant(ring, sign)
        expect_factor = True
        while i < n:
            kind, value = tokens[i]
            if kind == "op" and value in "+-":
                break
            if kind == "op" and value == "*":
                i += 1
                expect_factor = True
                continue
            if not expect_factor:
                raise ValueError("missing operator between factors")
            if kind == "int":
                factor = NcPoly.constant(ring, value)
                i += 1
            elif kind == "var":
                factor = NcPoly.generator(ring, var_index(value))
                i += 1
            else:
                raise ValueError(f"unexpected token {value!r}")
            if i < n and tokens[i] == ("op", "^"):
                if i + 1 >= n or tokens[i + 1][0] != "int":
                    raise ValueError("exponent must be an integer")
                factor = factor ** tokens[i + 1][1]
                i += 2
            term = term * factor
            expect_factor = False
        if expect_factor:
            raise ValueError("empty term in polynomial")
        result = result + term
    return result
