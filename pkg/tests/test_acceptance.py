"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
and enforcing its stated tolerance and runtime budget."""

import random
import time
from pathlib import Path

import numpy as np
import pytest

from upgame.checks import check_swap_word, expected_swap_permutation
from upgame.enclosing import chebyshev_center, minimal_ball_exact
from upgame.finitegroups import elementary_quotient
from upgame.game import (
    Move,
    MoveKind,
    MoveRejectedError,
    GameConfig,
    TranscriptUnsoundError,
    apply_move,
    audit_state,
    new_game,
    run_standard_strategy,
    transcript_dumps,
    transcript_loads,
)
from upgame.hilbert import (
    AffineAction,
    AffineSubspace,
    build_action,
    cos_angle,
    default_model,
    displacement,
    distance_realizer,
    fixed_affine_set,
    parallelogram_uniqueness_check,
    strategy_stage_data,
    upgrade_trace,
)
from upgame.matrices import SignedPermutation, elem_matrix, swap_word, verify_sharp
from upgame.patterns import (
    _random_poly,
    builtin_pattern,
    matches_pattern,
    pattern_conjugate,
    pattern_contains,
    sample_word,
)
from upgame.rings import RingSpec

DATA = Path(__file__).parent / "data"
FREE2 = RingSpec.parse("free:2")
RING_MODES = ("free:2", "commutative:2", "Z", "Z/4")


def report(name: str, ok: bool, detail: str = ""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name} failed: {detail}"


def test_identity_suite():
    start = time.perf_counter()
    rng = random.Random(100)
    for trial in range(500):
        n = rng.choice((3, 4, 5))
        i, j, k = rng.sample(range(1, n + 1), 3)
        r1 = _random_poly(FREE2, rng, 3)
        r2 = _random_poly(FREE2, rng, 3)
        assert verify_sharp(n, i, j, k, r1, r2), (trial, n, i, j, k)
    for n in (3, 4, 5, 6):
        word = swap_word(n, FREE2)
        found = SignedPermutation.from_matrix(word.evaluate(n))
        assert found == expected_swap_permutation(n), n
    elapsed = time.perf_counter() - start
    report("identity-suite", elapsed < 10.0,
           f"500 commutator instances + swap words n=3..6 in {elapsed:.2f}s")


def test_strategy_replay():
    start = time.perf_counter()
    for ring_text in RING_MODES:
        ring = RingSpec.parse(ring_text)
        for n in (3, 4, 5, 6):
            state = run_standard_strategy(n, ring)
            assert state.stage == 2, (ring_text, n)
            golden = (DATA / f"strategy_n{n}.txt").read_text().splitlines()
            states = [new_game(state.config)]
            for record in state.history:
                states.append(apply_move(states[-1], record.move))
            got = [f"stage {s.stage} {s.h1.format_grid(compact=True)} "
                   f"{s.h2.format_grid(compact=True)}" for s in states]
            assert got == golden, (ring_text, n)
    elapsed = time.perf_counter() - start
    report("strategy-replay", elapsed < 5.0,
           f"2-move wins over {len(RING_MODES)} rings x n=3..6, golden tables, {elapsed:.2f}s")


def test_miracle_conjugation():
    start = time.perf_counter()
    for n in (3, 4):
        w = swap_word(n, FREE2)
        sp = SignedPermutation.from_matrix(w.evaluate(n))
        conj_h2 = pattern_conjugate(builtin_pattern("H2_1", n), w)
        assert conj_h2 == builtin_pattern("wH2w_inv", n)
        assert pattern_contains(conj_h2, builtin_pattern("M", n))
        conj_h1 = pattern_conjugate(builtin_pattern("H1_1", n), w)
        assert conj_h1 == builtin_pattern("wH1w_inv", n)
        assert pattern_contains(conj_h1, builtin_pattern("L", n))
        mat, inv = w.evaluate(n), w.inverse().evaluate(n)
        rng = random.Random(n)
        for seed in range(100):
            sample = sample_word(builtin_pattern("H2_1", n), FREE2, seed * 2 + n)
            assert matches_pattern(conj_h2, mat * sample.evaluate(n) * inv)
            # elementary generators conjugate to the exact predicted elementary
            i, j = rng.choice(sorted(builtin_pattern("H2_1", n).positions))
            r = _random_poly(FREE2, rng, 3)
            si, sj, sign = sp.conjugate_position(i, j)
            assert mat * elem_matrix(n, i, j, r) * inv == elem_matrix(n, si, sj, sign * r)
    elapsed = time.perf_counter() - start
    report("miracle-conjugation", elapsed < 10.0,
           f"pattern = displayed grid, >=M / >=L certified, 200 seeded samples, {elapsed:.2f}s")


def test_illegal_move_soundness():
    state = new_game(GameConfig(3, FREE2))
    rejected = False
    try:
        apply_move(state, Move(MoveKind.TYPE_II_INN, words=(swap_word(3, FREE2),)))
    except MoveRejectedError:
        rejected = True
    assert rejected
    final = run_standard_strategy(3, FREE2)
    audits = audit_state(final, seed=5, samples=50)
    assert audits == [True, True]
    text = transcript_dumps(final)
    tampered = text.replace("state 1 EER/EER/001", "state 1 EEE/EEE/001")
    flagged = False
    try:
        transcript_loads(tampered)
    except TranscriptUnsoundError:
        flagged = True
    report("illegal-move-soundness", rejected and all(audits) and flagged,
           "stage-0 type II rejected, 50-sample audits pass, mutation flagged")


def test_parallelogram_lemma():
    start = time.perf_counter()
    model = default_model()
    m_gens = model.pattern_generators(builtin_pattern("M", 3))
    l_gens = model.pattern_generators(builtin_pattern("L", 3))
    worst = 0.0
    for seed in range(20):
        action = build_action(model, seed=seed)
        fix_m = fixed_affine_set(action, m_gens)
        fix_l = fixed_affine_set(action, l_gens)
        outcome = parallelogram_uniqueness_check(action, fix_m, fix_l, seed=seed)
        assert outcome.hypothesis_ok and outcome.passed, seed
        worst = max(worst, outcome.max_deviation)
    # invariant-vector counterexample: pad one fixed coordinate
    action = build_action(model, seed=99)
    pis = np.zeros((len(model), action.dim + 1, action.dim + 1))
    pis[:, :action.dim, :action.dim] = action.pis
    pis[:, action.dim, action.dim] = 1.0
    bs = np.concatenate([action.bs, np.zeros((len(model), 1))], axis=1)
    padded = AffineAction(model, pis, bs, validate=False)
    counter = parallelogram_uniqueness_check(
        padded, fixed_affine_set(padded, m_gens), fixed_affine_set(padded, l_gens))
    elapsed = time.perf_counter() - start
    report("parallelogram-lemma",
           worst <= 1e-7 and not counter.hypothesis_ok and counter.max_deviation >= 0.1
           and elapsed < 60.0,
           f"20 actions, worst deviation {worst:.2e}; counterexample deviation "
           f"{counter.max_deviation:.2f}; {elapsed:.1f}s")


def test_upgrade_trace_flagship():
    start = time.perf_counter()
    model = default_model()
    m_gens = model.pattern_generators(builtin_pattern("M", 3))
    l_gens = model.pattern_generators(builtin_pattern("L", 3))
    stages, moves = strategy_stage_data(model)
    worst_fix, worst_move = 0.0, 0.0
    for seed in range(10):
        action = build_action(model, seed=seed + 1)
        fix_m = fixed_affine_set(action, m_gens)
        fix_l = fixed_affine_set(action, l_gens)
        _, xi, eta = distance_realizer(fix_m, fix_l)
        trace = upgrade_trace(action, stages, xi, eta, moves)
        assert trace.passed, seed
        worst_fix = max(worst_fix, *(max(r["disp1"], r["disp2"]) for r in trace.rows))
        worst_move = max(worst_move, *(r["delta"] for r in trace.move_rows))
    elapsed = time.perf_counter() - start
    report("upgrade-trace-flagship",
           worst_fix <= 1e-7 and worst_move <= 1e-7 and elapsed < 120.0,
           f"10 actions, stages 0..2: worst fix {worst_fix:.2e}, "
           f"worst |alpha(w)xi - eta| {worst_move:.2e}; {elapsed:.1f}s")


def test_chebyshev_bounded_generation():
    model = default_model()
    # orbit centers are group-fixed
    worst_move = 0.0
    for seed in range(3):
        action = build_action(model, seed=seed + 20)
        zeta = np.random.default_rng(seed).standard_normal(action.dim)
        orbit = action.apply_all(zeta)
        center, _ = chebyshev_center(orbit)
        moved = float(np.linalg.norm(
            action.pis @ center + action.bs - center[None, :], axis=1).max())
        worst_move = max(worst_move, moved)
    # radius matches the exact oracle in low dimension
    rng = np.random.default_rng(7)
    worst_gap = 0.0
    for _ in range(50):
        d = int(rng.integers(1, 4))
        count = int(rng.integers(2, 12))
        points = rng.standard_normal((count, d)) * float(rng.uniform(0.5, 3.0))
        _, fast = chebyshev_center(points, tol=1e-9)
        _, exact = minimal_ball_exact(points)
        worst_gap = max(worst_gap, abs(fast - exact))
    # displacement subadditivity over product sets
    action = build_action(model, seed=23)
    sub_ok = True
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = [int(v) for v in rng.choice(len(model), size=int(rng.integers(1, 10)), replace=False)]
        b = [int(v) for v in rng.choice(len(model), size=int(rng.integers(1, 10)), replace=False)]
        ab = sorted(model.product_set(a, b))
        zeta = rng.standard_normal(action.dim)
        sub_ok = sub_ok and displacement(action, ab, zeta) \
            <= displacement(action, a, zeta) + displacement(action, b, zeta) + 1e-9
    report("chebyshev-bounded-generation",
           worst_move <= 1e-5 and worst_gap <= 1e-6 and sub_ok,
           f"orbit centers moved <= {worst_move:.2e}; radius gap <= {worst_gap:.2e}; "
           f"subadditivity on 100 triples")


def test_cos_angle_criterion():
    e = np.eye(4)
    orth = cos_angle(AffineSubspace(np.zeros(4), e[:, :2]),
                     AffineSubspace(np.zeros(4), e[:, 2:]))
    line_x = AffineSubspace(np.zeros(2), np.array([[1.0], [0.0]]))
    diag = AffineSubspace(np.zeros(2), np.array([[1.0], [1.0]]) / np.sqrt(2))
    forty_five = cos_angle(line_x, diag)
    props_ok = True
    rng = np.random.default_rng(31)
    for _ in range(100):
        d = int(rng.integers(2, 9))
        qa, _ = np.linalg.qr(rng.standard_normal((d, int(rng.integers(1, d)))))
        qb, _ = np.linalg.qr(rng.standard_normal((d, int(rng.integers(1, d)))))
        a = AffineSubspace(rng.standard_normal(d), qa)
        b = AffineSubspace(rng.standard_normal(d), qb)
        value = cos_angle(a, b)
        props_ok = props_ok and 0.0 <= value <= 1.0
        props_ok = props_ok and abs(cos_angle(b, a) - value) <= 1e-10
        rotation, _ = np.linalg.qr(rng.standard_normal((d, d)))
        rotated = cos_angle(AffineSubspace(rotation @ a.point, rotation @ a.basis),
                            AffineSubspace(rotation @ b.point, rotation @ b.basis))
        props_ok = props_ok and abs(rotated - value) <= 1e-10
    report("cos-angle",
           orth <= 1e-12 and abs(forty_five - np.sqrt(2) / 2) <= 1e-12 and props_ok,
           f"orthogonal -> {orth:.1e}, 45 degrees -> {forty_five:.15f}, "
           "symmetry/invariance on 100 instances")
