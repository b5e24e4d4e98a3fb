"""Finite-dimensional affine isometric actions and numerical lemma checks.

Actions are stored densely: one orthogonal matrix and one translation
vector per group element.  Fixed-point sets are affine subspaces obtained
from stacked least squares; distances, realizers, angles, displacement and
the trivial/orthogonal splitting are all computed from those.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .finitegroups import FiniteGroupModel, elementary_quotient
from .game import run_standard_strategy
from .matrices import swap_word
from .patterns import builtin_pattern
from .rings import RingSpec

__all__ = [
    "VALIDATION_TOL",
    "SOLVE_TOL",
    "PASS_TOL",
    "ActionValidationError",
    "AffineAction",
    "AffineSubspace",
    "build_action",
    "fixed_affine_set",
    "distance_realizer",
    "alternating_projection_realizer",
    "ParallelogramReport",
    "parallelogram_uniqueness_check",
    "TraceReport",
    "upgrade_trace",
    "strategy_stage_data",
    "cos_angle",
    "displacement",
    "split_trivial_part",
    "default_model",
    "save_bundle",
    "load_bundle",
]

VALIDATION_TOL = 1e-10
SOLVE_TOL = 1e-8
PASS_TOL = 1e-7
_RANK_CUT = 1e-10


class ActionValidationError(ValueError):
    """An action failed one of its defining identities; names the identity."""


_DEFAULT_MODEL: FiniteGroupModel | None = None


def default_model() -> FiniteGroupModel:
    """The standard desk-scale model: the full elementary group at n=3 over Z/2."""
    global _DEFAULT_MODEL
    if _DEFAULT_MODEL is None:
        _DEFAULT_MODEL = elementary_quotient(3, 2)
    return _DEFAULT_MODEL


class AffineAction:
    """An affine isometric action of a finite model: x -> pi(g) x + b(g)."""

    def __init__(self, model: FiniteGroupModel, pis: np.ndarray, bs: np.ndarray,
                 kind: str = "custom", validate: bool = True, seed: int = 0):
        self.model = model
        self.pis = np.asarray(pis, dtype=float)
        self.bs = np.asarray(bs, dtype=float)
        self.kind = kind
        if self.pis.shape[:1] != (len(model),) or self.bs.shape[:1] != (len(model),):
            raise ValueError("need one matrix and one vector per group element")
        self.dim = self.pis.shape[1]
        if validate:
            self.validate(seed=seed)

    def apply(self, g: int, x: np.ndarray) -> np.ndarray:
        return self.pis[g] @ x + self.bs[g]

    def apply_all(self, x: np.ndarray) -> np.ndarray:
        return self.pis @ x + self.bs

    def validate(self, pairs: int = 500, seed: int = 0, linear: bool = True):
        """Check orthogonality (all g), homomorphism and cocycle identity (sampled pairs)."""
        if self.dim == 0:
            return
        if linear:
            eye = np.eye(self.dim)
            for g in range(len(self.model)):
                if np.abs(self.pis[g].T @ self.pis[g] - eye).max() > VALIDATION_TOL:
                    raise ActionValidationError(f"orthogonality fails at element {g}")
        rng = np.random.default_rng(seed)
        order = len(self.model)
        for _ in range(pairs):
            g = int(rng.integers(order))
            h = int(rng.integers(order))
            gh = self.model.mul(g, h)
            if linear and np.abs(self.pis[g] @ self.pis[h] - self.pis[gh]).max() > VALIDATION_TOL:
                raise ActionValidationError(f"homomorphism fails at pair ({g},{h})")
            residual = self.pis[g] @ self.bs[h] + self.bs[g] - self.bs[gh]
            if np.abs(residual).max() > VALIDATION_TOL:
                raise ActionValidationError(f"cocycle identity fails at pair ({g},{h})")


def _regular_rep_minus_invariants(model: FiniteGroupModel) -> np.ndarray:
    """Orthogonal matrices of left translation on the complement of constants."""
    cached = model.rep_cache.get("perm-minus-invariants")
    if cached is not None:
        return cached
    order = len(model)
    ones = np.ones((1, order))
    # orthonormal basis of the complement of the constants
    _, _, vt = np.linalg.svd(ones, full_matrices=True)
    basis = vt[1:].T  # (order, order-1)
    pis = np.empty((order, order - 1, order - 1))
    for g in range(order):
        # left translation permutation: e_x -> e_{g x}; row i of P@basis is basis[g^-1 i]
        ginv = model.inv(g)
        perm = np.array([model.mul(ginv, i) for i in range(order)])
        pis[g] = basis.T @ basis[perm]
    pis[model.identity] = np.eye(order - 1)
    model.rep_cache["perm-minus-invariants"] = pis
    return pis


def build_action(model: FiniteGroupModel, kind: str = "permutation-minus-invariants",
                 cocycle: str = "coboundary", v: np.ndarray | None = None,
                 b: np.ndarray | None = None, seed: int = 0) -> AffineAction:
    """Construct a validated action; coboundary cocycles are b(g) = v - pi(g) v."""
    if kind == "permutation-minus-invariants":
        pis = _regular_rep_minus_invariants(model)
        fresh = "perm-validated" not in model.rep_cache
        if fresh:
            model.rep_cache["perm-validated"] = True
    elif kind == "random-orthogonal":
        base = _regular_rep_minus_invariants(model)
        rng = np.random.default_rng(seed)
        rotation, _ = np.linalg.qr(rng.standard_normal((base.shape[1], base.shape[1])))
        pis = rotation.T @ base @ rotation
        fresh = True
    else:
        raise ValueError(f"unknown action kind {kind!r}")
    dim = pis.shape[1]
    if cocycle == "coboundary":
        if v is None:
            v = np.random.default_rng(seed).standard_normal(dim)
        v = np.asarray(v, dtype=float)
        bs = v[None, :] - pis @ v
    elif cocycle == "custom":
        if b is None:
            raise ValueError("custom cocycle needs b")
        bs = np.asarray(b, dtype=float)
    else:
        raise ValueError(f"unknown cocycle kind {cocycle!r}")
    action = AffineAction(model, pis, bs, kind=kind, validate=False)
    action.validate(seed=seed, linear=fresh)
    if not fresh:
        action.validate(seed=seed, linear=False)
    return action


@dataclass(frozen=True)
class AffineSubspace:
    """point + span(basis columns); basis is orthonormal, possibly zero columns."""

    point: np.ndarray
    basis: np.ndarray
    empty: bool = False

    @property
    def dim(self) -> int:
        return 0 if self.empty else self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        if self.empty:
            raise ValueError("cannot project onto an empty subspace")
        delta = x - self.point
        return self.point + self.basis @ (self.basis.T @ delta)

    def contains(self, x: np.ndarray, tol: float = SOLVE_TOL) -> bool:
        if self.empty:
            return False
        return float(np.linalg.norm(self.project(x) - x)) <= tol * (1 + np.linalg.norm(x))

    @classmethod
    def empty_set(cls, dim: int) -> "AffineSubspace":
        return cls(np.zeros(dim), np.zeros((dim, 0)), empty=True)

    @classmethod
    def whole_space(cls, dim: int) -> "AffineSubspace":
        return cls(np.zeros(dim), np.eye(dim))


def _nullspace(matrix: np.ndarray, cut: float = _RANK_CUT) -> np.ndarray:
    if matrix.size == 0:
        return np.eye(matrix.shape[1])
    _, sv, vt = np.linalg.svd(matrix, full_matrices=True)
    scale = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > cut * max(scale, 1.0)))
    return vt[rank:].T


def fixed_affine_set(action: AffineAction, elements) -> AffineSubspace:
    """Common fixed points of the listed elements (generators of a subgroup suffice)."""
    elements = [g for g in elements if g != action.model.identity]
    if not elements:
        return AffineSubspace.whole_space(action.dim)
    rows = np.concatenate([action.pis[g] - np.eye(action.dim) for g in elements])
    rhs = np.concatenate([-action.bs[g] for g in elements])
    solution, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    residual = float(np.linalg.norm(rows @ solution - rhs))
    if residual > SOLVE_TOL * (1 + np.linalg.norm(rhs)):
        return AffineSubspace.empty_set(action.dim)
    return AffineSubspace(solution, _nullspace(rows))


def distance_realizer(a: AffineSubspace, b: AffineSubspace):
    """Minimum distance between two affine subspaces and a realizing pair.

    Solves one stacked least-squares problem; when minimizers are not
    unique the minimum-norm parameter solution is returned.
    """
    if a.empty or b.empty:
        raise ValueError("distance needs two non-empty subspaces")
    stacked = np.concatenate([a.basis, -b.basis], axis=1)
    rhs = b.point - a.point
    params, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    ra = a.basis.shape[1]
    xi = a.point + a.basis @ params[:ra]
    eta = b.point + b.basis @ params[ra:]
    return float(np.linalg.norm(xi - eta)), xi, eta


def alternating_projection_realizer(a: AffineSubspace, b: AffineSubspace,
                                    start: np.ndarray | None = None,
                                    tol: float = 1e-12, max_iter: int = 50_000):
    """Independent iterative route to the realizer: project back and forth."""
    if a.empty or b.empty:
        raise ValueError("distance needs two non-empty subspaces")
    x = a.point.copy() if start is None else np.asarray(start, dtype=float)
    xi = a.project(x)
    eta = b.project(xi)
    history = [float(np.linalg.norm(xi - eta))]
    for iteration in range(max_iter):
        new_xi = a.project(eta)
        new_eta = b.project(new_xi)
        moved = max(np.linalg.norm(new_xi - xi), np.linalg.norm(new_eta - eta))
        xi, eta = new_xi, new_eta
        history.append(float(np.linalg.norm(xi - eta)))
        if moved < tol:
            break
    return float(np.linalg.norm(xi - eta)), xi, eta, history


def _linear_invariants(action: AffineAction) -> np.ndarray:
    rows = np.concatenate(
        [action.pis[g] - np.eye(action.dim) for g in action.model.generators])
    return _nullspace(rows)


@dataclass
class ParallelogramReport:
    hypothesis_ok: bool
    passed: bool
    max_deviation: float
    distance: float
    midpoint_ok: bool
    realizers: list = field(default_factory=list)
    counterexample: tuple | None = None
    notes: list = field(default_factory=list)

    def lines(self) -> list:
        status = "PASS" if self.passed else "FAIL"
        if not self.hypothesis_ok:
            status = "HYPOTHESIS-FAILED"
        out = [f"parallelogram uniqueness: {status}",
               f"  distance D = {self.distance:.12g}",
               f"  max realizer deviation = {self.max_deviation:.3e}",
               f"  midpoint again realizes D: {'yes' if self.midpoint_ok else 'no'}"]
        out += [f"  {note}" for note in self.notes]
        return out


def parallelogram_uniqueness_check(action: AffineAction, a: AffineSubspace,
                                   b: AffineSubspace, seed: int = 0,
                                   starts: int = 5) -> ParallelogramReport:
    """Multi-start realizer agreement, midpoint re-check, and the hypothesis gate.

    If the linear part has invariant vectors the report exhibits two
    genuinely distinct realizer pairs obtained by translating along one.
    """
    invariants = _linear_invariants(action)
    d0, xi0, eta0 = distance_realizer(a, b)
    if invariants.shape[1] > 0:
        direction = invariants[:, 0]
        shift = 0.2 * direction / np.linalg.norm(direction)
        second = (xi0 + shift, eta0 + shift)
        deviation = float(np.linalg.norm(shift))
        return ParallelogramReport(
            hypothesis_ok=False, passed=False, max_deviation=deviation,
            distance=d0, midpoint_ok=True,
            realizers=[(xi0, eta0), second],
            notes=["hypothesis failed: invariant vectors exist",
                   f"translated realizer pair differs by {deviation:.3g}"])

    rng = np.random.default_rng(seed)
    pairs = [(xi0, eta0)]
    # re-parameterized direct solves: rotate the bases, solve, map back
    for _ in range(max(0, (starts - 1) // 2)):
        rot_a, _ = np.linalg.qr(rng.standard_normal((a.basis.shape[1],) * 2)) \
            if a.basis.shape[1] else (np.zeros((0, 0)), None)
        rot_b, _ = np.linalg.qr(rng.standard_normal((b.basis.shape[1],) * 2)) \
            if b.basis.shape[1] else (np.zeros((0, 0)), None)
        a2 = AffineSubspace(a.point.copy(), a.basis @ rot_a)
        b2 = AffineSubspace(b.point.copy(), b.basis @ rot_b)
        _, xi, eta = distance_realizer(a2, b2)
        pairs.append((xi, eta))
    while len(pairs) < starts:
        start = rng.standard_normal(action.dim)
        _, xi, eta, _ = alternating_projection_realizer(a, b, start=start)
        pairs.append((xi, eta))

    deviation = 0.0
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            deviation = max(deviation,
                            float(np.linalg.norm(pairs[i][0] - pairs[j][0])),
                            float(np.linalg.norm(pairs[i][1] - pairs[j][1])))
    mid1 = (pairs[0][0] + pairs[1][0]) / 2
    mid2 = (pairs[0][1] + pairs[1][1]) / 2
    midpoint_ok = (a.contains(mid1) and b.contains(mid2)
                   and np.linalg.norm(mid1 - mid2) <= d0 + SOLVE_TOL)
    return ParallelogramReport(
        hypothesis_ok=True, passed=deviation <= PASS_TOL,
        max_deviation=deviation, distance=d0, midpoint_ok=midpoint_ok,
        realizers=pairs)


@dataclass
class TraceReport:
    rows: list
    move_rows: list
    passed: bool

    def lines(self) -> list:
        out = [f"upgrade trace: {'PASS' if self.passed else 'FAIL'}"]
        for row in self.rows:
            out.append(
                f"  stage {row['stage']}: disp({row['label1']}, xi) = {row['disp1']:.3e}, "
                f"disp({row['label2']}, eta) = {row['disp2']:.3e} "
                f"[{'PASS' if row['ok'] else 'FAIL'}]")
        for row in self.move_rows:
            out.append(
                f"  move @ stage {row['stage']}: |alpha(w) xi - eta| = {row['delta']:.3e} "
                f"[{'PASS' if row['ok'] else 'FAIL'}]")
        return out


def upgrade_trace(action: AffineAction, stages, xi: np.ndarray, eta: np.ndarray,
                  move_elements=(), tol: float = PASS_TOL) -> TraceReport:
    """Check a realizer pair stays fixed along the game's stage subgroups.

    ``stages`` is a list of (label1, subset1, label2, subset2); the subsets
    are element indices.  ``move_elements`` holds (stage, w_index) pairs for
    swap moves, checked via |alpha(w) xi - eta| <= tol.
    """
    rows = []
    passed = True
    for stage, (label1, subset1, label2, subset2) in enumerate(stages):
        d1 = displacement(action, subset1, xi)
        d2 = displacement(action, subset2, eta)
        ok = d1 <= tol and d2 <= tol
        passed = passed and ok
        rows.append({"stage": stage, "label1": label1, "disp1": d1,
                     "label2": label2, "disp2": d2, "ok": ok})
    move_rows = []
    for stage, w in move_elements:
        delta = float(np.linalg.norm(action.apply(w, xi) - eta))
        ok = delta <= tol
        passed = passed and ok
        move_rows.append({"stage": stage, "delta": delta, "ok": ok})
    return TraceReport(rows, move_rows, passed)


def strategy_stage_data(model: FiniteGroupModel):
    """Stage subgroups of the scripted strategy inside the finite model.

    Returns (stages, moves) ready for :func:`upgrade_trace`: subsets for
    stages 0..2 plus the swap-word element for the stage-2 move.
    """
    ring = RingSpec.parse(f"Z/{model.modulus}")
    final = run_standard_strategy(model.n, ring)
    states = [(builtin_pattern(final.config.m_name, model.n),
               builtin_pattern(final.config.l_name, model.n))]
    from .game import apply_move, new_game  # local import to avoid cycle at module load
    current = new_game(final.config)
    for record in final.history:
        current = apply_move(current, record.move)
        states.append((current.h1, current.h2))
    stages = []
    for idx, (h1, h2) in enumerate(states):
        stages.append((f"H1^({idx})", sorted(model.pattern_image(h1)),
                       f"H2^({idx})", sorted(model.pattern_image(h2))))
    w_index = model.word_image(swap_word(model.n, ring))
    return stages, [(2, w_index)]


def cos_angle(a: AffineSubspace, b: AffineSubspace) -> float:
    """Largest principal cosine between the parallel parts, modulo their intersection.

    Returns 0 when either projected part vanishes (including equal subspaces).
    """
    if a.empty or b.empty:
        raise ValueError("angle needs two non-empty subspaces")
    u1, u2 = a.basis, b.basis
    if u1.shape[1] == 0 or u2.shape[1] == 0:
        return 0.0
    joint = _nullspace(np.concatenate([u1, -u2], axis=1))
    if joint.shape[1]:
        meet_raw = u1 @ joint[:u1.shape[1], :]
        q, sv, _ = np.linalg.svd(meet_raw, full_matrices=False)
        meet = q[:, sv > _RANK_CUT]
    else:
        meet = np.zeros((u1.shape[0], 0))

    def reduce(u):
        residual = u - meet @ (meet.T @ u)
        q, sv, _ = np.linalg.svd(residual, full_matrices=False)
        return q[:, sv > _RANK_CUT]

    v1, v2 = reduce(u1), reduce(u2)
    if v1.shape[1] == 0 or v2.shape[1] == 0:
        return 0.0
    top = float(np.linalg.svd(v1.T @ v2, compute_uv=False)[0])
    return min(1.0, top)


def displacement(action: AffineAction, subset, zeta: np.ndarray) -> float:
    """Largest move of zeta under the listed elements."""
    subset = list(subset)
    if not subset:
        raise ValueError("displacement over an empty subset is undefined")
    moved = action.pis[subset] @ zeta + action.bs[subset]
    return float(np.linalg.norm(moved - zeta[None, :], axis=1).max())


def split_trivial_part(action: AffineAction):
    """Split into the action on the invariant subspace and on its complement."""
    invariants = _linear_invariants(action)
    rows = np.concatenate(
        [action.pis[g] - np.eye(action.dim) for g in action.model.generators])
    if rows.size:
        _, sv, vt = np.linalg.svd(rows, full_matrices=True)
        scale = max(sv[0] if sv.size else 0.0, 1.0)
        rank = int(np.sum(sv > _RANK_CUT * scale))
        complement = vt[:rank].T
    else:
        complement = np.zeros((action.dim, 0))
    parts = []
    for basis, kind in ((invariants, "split-trivial"), (complement, "split-orthogonal")):
        pis = basis.T @ (action.pis @ basis)
        bs = action.bs @ basis
        parts.append(AffineAction(action.model, pis, bs, kind=kind, validate=False))
    trivial, orthogonal = parts
    trivial.validate(linear=True)
    orthogonal.validate(linear=True)
    # on the invariant part the cocycle must be additive (it is, by the identity)
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = int(rng.integers(len(action.model)))
        h = int(rng.integers(len(action.model)))
        gh = action.model.mul(g, h)
        gap = trivial.bs[gh] - trivial.bs[g] - trivial.bs[h]
        if gap.size and np.abs(gap).max() > VALIDATION_TOL:
            raise ActionValidationError("trivial-part cocycle is not additive")
    return trivial, orthogonal


# -- bundle persistence -----------------------------------------------------------

BUNDLE_VERSION = 1


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_bundle(action: AffineAction, directory) -> Path:
    """Persist an action as a directory: element table, generators, pi/b arrays, manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    model = action.model
    element_lines = [" ".join(str(v) for row in mat for v in row) for mat in model.elements]
    (directory / "elements.txt").write_text("\n".join(element_lines) + "\n")
    (directory / "generators.txt").write_text(
        "\n".join(str(g) for g in model.generators) + "\n")
    pi_bytes = action.pis.astype("<f8").tobytes()
    b_bytes = action.bs.astype("<f8").tobytes()
    (directory / "pi.f64").write_bytes(pi_bytes)
    (directory / "b.f64").write_bytes(b_bytes)
    manifest = {
        "version": BUNDLE_VERSION,
        "model": {"n": model.n, "modulus": model.modulus, "order": len(model)},
        "dim": action.dim,
        "kind": action.kind,
        "digests": {"pi": _digest(pi_bytes), "b": _digest(b_bytes)},
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return directory


def load_bundle(directory) -> AffineAction:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    if manifest["version"] != BUNDLE_VERSION:
        raise ValueError(f"unsupported bundle version {manifest['version']}")
    n, modulus = manifest["model"]["n"], manifest["model"]["modulus"]
    elements = []
    for line in (directory / "elements.txt").read_text().splitlines():
        values = [int(v) for v in line.split()]
        elements.append(tuple(tuple(values[i * n:(i + 1) * n]) for i in range(n)))
    generators = [int(v) for v in (directory / "generators.txt").read_text().split()]
    model = FiniteGroupModel(n, modulus, elements, generators)
    pi_bytes = (directory / "pi.f64").read_bytes()
    b_bytes = (directory / "b.f64").read_bytes()
    for name, blob in (("pi", pi_bytes), ("b", b_bytes)):
        if _digest(blob) != manifest["digests"][name]:
            raise ValueError(f"bundle digest mismatch for {name}")
    order, dim = manifest["model"]["order"], manifest["dim"]
    pis = np.frombuffer(pi_bytes, dtype="<f8").reshape(order, dim, dim).copy()
    bs = np.frombuffer(b_bytes, dtype="<f8").reshape(order, dim).copy()
    return AffineAction(model, pis, bs, kind=manifest["kind"], validate=False)
