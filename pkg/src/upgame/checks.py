"""Randomized self-checks of the exact matrix identities.

Each check returns (name, passed, detail); they are wired into the
``verify-identities`` command and reused by the acceptance suite.
"""

from __future__ import annotations

import random

from .matrices import (
    ElemWord,
    MatR,
    SignedPermutation,
    commutator,
    elem_matrix,
    swap_word,
    verify_sharp,
)
from .patterns import _random_poly
from .rings import NcPoly, RingSpec

__all__ = [
    "check_commutator_relation",
    "check_additivity",
    "check_swap_word",
    "check_signed_conjugation",
    "identity_suite",
    "expected_swap_permutation",
]


def check_commutator_relation(trials: int, seed: int, ring: RingSpec,
                              sizes=(3, 4, 5), degree_bound: int = 3):
    """[e_ij^r1, e_jk^r2] = e_ik^(r1 r2) on random instances; exact equality."""
    rng = random.Random(seed)
    for t in range(trials):
        n = rng.choice(list(sizes))
        i, j, k = rng.sample(range(1, n + 1), 3)
        r1 = _random_poly(ring, rng, degree_bound)
        r2 = _random_poly(ring, rng, degree_bound)
        if not verify_sharp(n, i, j, k, r1, r2):
            return ("commutator-relation", False,
                    f"failed at trial {t}: n={n} ({i},{j},{k}) r1={r1} r2={r2}")
    return ("commutator-relation", True, f"{trials} random instances, sizes {list(sizes)}")


def check_additivity(trials: int, seed: int, ring: RingSpec, sizes=(3, 4, 5)):
    """e_ij^r1 e_ij^r2 = e_ij^(r1+r2): each position carries a copy of (R, +)."""
    rng = random.Random(seed + 1)
    for t in range(trials):
        n = rng.choice(list(sizes))
        i, j = rng.sample(range(1, n + 1), 2)
        r1 = _random_poly(ring, rng, 3)
        r2 = _random_poly(ring, rng, 3)
        lhs = elem_matrix(n, i, j, r1) * elem_matrix(n, i, j, r2)
        if lhs != elem_matrix(n, i, j, r1 + r2):
            return ("position-additivity", False, f"failed at trial {t}")
    return ("position-additivity", True, f"{trials} random instances")


def expected_swap_permutation(n: int) -> SignedPermutation:
    """Swap of coordinates 1 and n with a single sign flip at coordinate n-1."""
    sigma = list(range(1, n + 1))
    sigma[0], sigma[n - 1] = n, 1
    signs = [1] * n
    signs[n - 2] = -1
    return SignedPermutation(tuple(sigma), tuple(signs))


def check_swap_word(ring: RingSpec, sizes=(3, 4, 5, 6)):
    """The swap word evaluates to the expected signed permutation and inverts."""
    for n in sizes:
        word = swap_word(n, ring)
        mat = word.evaluate(n)
        found = SignedPermutation.from_matrix(mat)
        if found is None:
            return ("swap-word", False, f"n={n}: not a signed permutation")
        expected = expected_swap_permutation(n)
        if found.sigma != expected.sigma:
            return ("swap-word", False, f"n={n}: permutation {found.sigma} != {expected.sigma}")
        if ring.modulus is None and found.signs != expected.signs:
            return ("swap-word", False, f"n={n}: signs {found.signs} != {expected.signs}")
        if not (mat * word.inverse().evaluate(n)).is_identity():
            return ("swap-word", False, f"n={n}: inverse word does not invert")
    return ("swap-word", True, f"sizes {list(sizes)}")


def check_signed_conjugation(trials: int, seed: int, ring: RingSpec, sizes=(3, 4)):
    """Conjugation by a signed permutation relabels positions and twists the sign."""
    rng = random.Random(seed + 2)
    for t in range(trials):
        n = rng.choice(list(sizes))
        word = swap_word(n, ring)
        mat = word.evaluate(n)
        sp = SignedPermutation.from_matrix(mat)
        inv = word.inverse().evaluate(n)
        i, j = rng.sample(range(1, n + 1), 2)
        r = _random_poly(ring, rng, 3)
        si, sj, sign = sp.conjugate_position(i, j)
        got = mat * elem_matrix(n, i, j, r) * inv
        if got != elem_matrix(n, si, sj, sign * r):
            return ("signed-conjugation", False, f"failed at trial {t}: n={n} ({i},{j})")
    return ("signed-conjugation", True, f"{trials} random instances")


def identity_suite(trials: int = 200, seed: int = 0, ring: RingSpec | None = None,
                   max_size: int = 5):
    """All identity checks; returns a list of (name, passed, detail)."""
    ring = ring or RingSpec.parse("free:2")
    sizes = tuple(range(3, max(max_size, 3) + 1))
    return [
        check_commutator_relation(trials, seed, ring, sizes=sizes),
        check_additivity(trials, seed, ring, sizes=sizes),
        check_swap_word(ring, sizes=sizes if max_size > 3 else (3, 4, 5, 6)),
        check_signed_conjugation(trials, seed, ring, sizes=sizes[:2]),
    ]
