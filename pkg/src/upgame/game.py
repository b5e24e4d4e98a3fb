"""State machine for the two-subgroup upgrading game.

A game holds a pair of block patterns that only ever grow.  Every move is
validated through the pattern-certification algebra; the validation record
(claims plus a digest) is kept in the history, so transcripts can be
replayed and re-verified from scratch.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum

from .matrices import ElemWord, SignedPermutation, swap_word, parse_elem_word
from .patterns import (
    PatternSubgroup,
    UnsupportedConjugatorError,
    builtin_name_of,
    builtin_pattern,
    closure_to_full,
    matches_pattern,
    pattern_conjugate,
    pattern_contains,
    pattern_join,
    sample_word,
)
from .rings import RingSpec

__all__ = [
    "MoveKind",
    "Move",
    "GameConfig",
    "GameState",
    "MoveRejectedError",
    "TranscriptUnsoundError",
    "new_game",
    "apply_move",
    "is_won",
    "standard_strategy_moves",
    "run_standard_strategy",
    "stage_tables_text",
    "transcript_dumps",
    "transcript_loads",
    "audit_state",
]

TRANSCRIPT_HEADER = "upgrading-game-transcript v1"
_PAYLOAD_SEP = " || "


class MoveRejectedError(ValueError):
    pass


class TranscriptUnsoundError(ValueError):
    pass


class MoveKind(str, Enum):
    TYPE_I = "I"
    TYPE_II_INN = "II_inn"
    LIMIT = "limit"
    # reserved for non-inner conjugation moves; parsing recognizes the tag but
    # applying it is not supported
    TYPE_II_OUT = "II_out"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    patterns: tuple = ()
    words: tuple = ()

    def payload_text(self) -> str:
        items = [f"pattern:{p}" for p in self.patterns]
        items += [f"word:{w.format()}" for w in self.words]
        return _PAYLOAD_SEP.join(items)

    @classmethod
    def parse(cls, kind_text: str, payload: str, ring: RingSpec) -> "Move":
        kind = MoveKind(kind_text)
        patterns = []
        words = []
        for item in filter(None, (s.strip() for s in payload.split(_PAYLOAD_SEP.strip()))):
            if item.startswith("pattern:"):
                patterns.append(item[len("pattern:"):])
            elif item.startswith("word:"):
                words.append(parse_elem_word(item[len("word:"):], ring))
            else:
                raise ValueError(f"bad move payload item {item!r}")
        return cls(kind, tuple(patterns), tuple(words))


@dataclass(frozen=True)
class ContainmentClaim:
    text: str
    conjugated_grid: str
    required_grid: str
    ok: bool


@dataclass(frozen=True)
class Certificate:
    claims: tuple

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        for c in self.claims:
            h.update(f"{c.text}|{c.conjugated_grid}|{c.required_grid}|{c.ok}\n".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class MoveRecord:
    stage: int
    move: Move
    certificate: Certificate
    h1_grid: str
    h2_grid: str


@dataclass(frozen=True)
class GameConfig:
    n: int
    ring: RingSpec
    m_name: str = "M"
    l_name: str = "L"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("the game requires n >= 3")


@dataclass(frozen=True)
class GameState:
    config: GameConfig
    stage: int
    h1: PatternSubgroup
    h2: PatternSubgroup
    history: tuple = field(default_factory=tuple)

    def label(self, which: int) -> str:
        pattern = self.h1 if which == 1 else self.h2
        return builtin_name_of(pattern) or f"H{which}^({self.stage})"


def new_game(config: GameConfig) -> GameState:
    m = builtin_pattern(config.m_name, config.n)
    l = builtin_pattern(config.l_name, config.n)
    if not closure_to_full(pattern_join(m, l)).is_full():
        raise ValueError(f"{config.m_name},{config.l_name} do not generate the full group")
    return GameState(config, 0, m, l)


def is_won(state: GameState) -> bool:
    return closure_to_full(state.h1).is_full() or closure_to_full(state.h2).is_full()


def _as_signed_permutation(word: ElemWord, n: int) -> SignedPermutation:
    sp = SignedPermutation.from_matrix(word.evaluate(n))
    if sp is None:
        raise MoveRejectedError(
            f"unsupported conjugator: word {word.format()} is not a signed permutation")
    return sp


def apply_move(state: GameState, move: Move) -> GameState:
    """Validate and apply one move; raises MoveRejectedError with the failing claim."""
    cfg = state.config
    m = builtin_pattern(cfg.m_name, cfg.n)
    l = builtin_pattern(cfg.l_name, cfg.n)
    h1, h2 = state.h1, state.h2
    name1, name2 = state.label(1), state.label(2)
    claims = []

    if move.kind is MoveKind.LIMIT:
        if move.patterns or move.words:
            raise MoveRejectedError("a limit move carries no payload")
        new_h1, new_h2 = h1, h2
    elif move.kind is MoveKind.TYPE_I:
        if move.words:
            raise MoveRejectedError(
                "unsupported conjugator set for type (I): only block-diagonal pattern names")
        if not move.patterns:
            raise MoveRejectedError("type (I) move needs at least one pattern")
        new_h1, new_h2 = h1, h2
        for pname in move.patterns:
            q = builtin_pattern(pname, cfg.n)
            for required, current, cur_name in ((m, h1, name1), (l, h2, name2)):
                req_name = builtin_name_of(required)
                try:
                    reach = pattern_conjugate(required, q)
                except UnsupportedConjugatorError as exc:
                    raise MoveRejectedError(f"unsupported conjugator {pname}: {exc}") from None
                ok = pattern_contains(current, reach)
                text = f"g*{cur_name}*g^-1 >= {req_name} for all g in {pname}"
                claims.append(ContainmentClaim(
                    text, reach.format_grid(compact=True),
                    required.format_grid(compact=True), ok))
                if not ok:
                    raise MoveRejectedError(f"{text} not certified")
            new_h1 = pattern_join(new_h1, q)
            new_h2 = pattern_join(new_h2, q)
    elif move.kind is MoveKind.TYPE_II_INN:
        if move.patterns:
            raise MoveRejectedError(
                "unsupported conjugator set for type (II): supply elementary words")
        if not move.words:
            raise MoveRejectedError("type (II) move needs at least one word")
        new_h1, new_h2 = h1, h2
        for word in move.words:
            sp = _as_signed_permutation(word, cfg.n)
            for required, source, src_name in ((m, h2, name2), (l, h1, name1)):
                req_name = builtin_name_of(required)
                conjugated = pattern_conjugate(source, sp)
                ok = pattern_contains(conjugated, required)
                text = f"w*{src_name}*w^-1 >= {req_name}"
                claims.append(ContainmentClaim(
                    text, conjugated.format_grid(compact=True),
                    required.format_grid(compact=True), ok))
                if not ok:
                    raise MoveRejectedError(f"{text} not certified")
            inv = sp.inverse()
            new_h1 = pattern_join(new_h1, pattern_conjugate(h2, inv))
            new_h2 = pattern_join(new_h2, pattern_conjugate(h1, inv))
    else:
        raise MoveRejectedError(f"move kind {move.kind.value} is reserved but not supported")

    if not (pattern_contains(new_h1, h1) and pattern_contains(new_h2, h2)):
        raise AssertionError("internal error: move would shrink a subgroup pattern")
    stage = state.stage + 1
    record = MoveRecord(stage, move, Certificate(tuple(claims)),
                        new_h1.format_grid(compact=True), new_h2.format_grid(compact=True))
    return GameState(cfg, stage, new_h1, new_h2, state.history + (record,))


def standard_strategy_moves(n: int, ring: RingSpec) -> list:
    """The two winning moves: absorb the block schema, then swap via the word."""
    return [
        Move(MoveKind.TYPE_I, patterns=("Q",)),
        Move(MoveKind.TYPE_II_INN, words=(swap_word(n, ring),)),
    ]


def run_standard_strategy(n: int, ring: RingSpec) -> GameState:
    state = new_game(GameConfig(n, ring))
    for move in standard_strategy_moves(n, ring):
        state = apply_move(state, move)
    if not is_won(state):
        raise AssertionError("strategy self-test failed: final state not certified as won")
    return state


def stage_tables_text(state: GameState) -> str:
    """All stage tables of the game so far, two grids side by side per stage."""
    cfg = state.config
    states = [new_game(cfg)]
    for record in state.history:
        states.append(apply_move(states[-1], record.move))
    lines = []
    for s in states:
        lines.append(f"== stage {s.stage} ==")
        lines.append(f"H1^({s.stage}) = {s.label(1)} | H2^({s.stage}) = {s.label(2)}")
        g1 = [" ".join(row) for row in s.h1.grid_rows()]
        g2 = [" ".join(row) for row in s.h2.grid_rows()]
        lines += [f"{a} | {b}" for a, b in zip(g1, g2)]
    return "\n".join(lines) + "\n"


# -- transcripts -----------------------------------------------------------------

def transcript_dumps(state: GameState) -> str:
    cfg = state.config
    lines = [
        TRANSCRIPT_HEADER,
        f"config n={cfg.n} ring={cfg.ring} M={cfg.m_name} L={cfg.l_name}",
    ]
    for record in state.history:
        lines.append(f"move {record.stage} {record.move.kind.value} "
                     f"{record.certificate.digest} {record.move.payload_text()}".rstrip())
        lines.append(f"state {record.stage} {record.h1_grid} {record.h2_grid}")
    lines.append(f"end stage={state.stage} won={'true' if is_won(state) else 'false'}")
    return "\n".join(lines) + "\n"


_CONFIG_RE = re.compile(r"config n=(\d+) ring=(\S+) M=(\S+) L=(\S+)")
_MOVE_RE = re.compile(r"move (\d+) (\S+) ([0-9a-f]{16})(?: (.*))?")
_STATE_RE = re.compile(r"state (\d+) (\S+) (\S+)")
_END_RE = re.compile(r"end stage=(\d+) won=(true|false)")


def transcript_loads(text: str) -> GameState:
    """Replay a transcript, re-verifying every move; raises TranscriptUnsoundError."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != TRANSCRIPT_HEADER:
        raise TranscriptUnsoundError("transcript unsound: bad or missing header")
    m = _CONFIG_RE.fullmatch(lines[1]) if len(lines) > 1 else None
    if m is None:
        raise TranscriptUnsoundError("transcript unsound: bad config line")
    try:
        cfg = GameConfig(int(m.group(1)), RingSpec.parse(m.group(2)), m.group(3), m.group(4))
        state = new_game(cfg)
    except ValueError as exc:
        raise TranscriptUnsoundError(f"transcript unsound: {exc}") from None
    i = 2
    while i < len(lines) and lines[i].startswith("move "):
        mv = _MOVE_RE.fullmatch(lines[i])
        st = _STATE_RE.fullmatch(lines[i + 1]) if i + 1 < len(lines) else None
        if mv is None or st is None:
            raise TranscriptUnsoundError("transcript unsound: malformed move/state record")
        try:
            move = Move.parse(mv.group(2), mv.group(4) or "", cfg.ring)
            state = apply_move(state, move)
        except (ValueError, MoveRejectedError) as exc:
            raise TranscriptUnsoundError(f"transcript unsound: {exc}") from None
        record = state.history[-1]
        if state.stage != int(mv.group(1)) or state.stage != int(st.group(1)):
            raise TranscriptUnsoundError("transcript unsound: stage numbering mismatch")
        if record.certificate.digest != mv.group(3):
            raise TranscriptUnsoundError(
                f"transcript unsound: certificate digest mismatch at stage {state.stage}")
        if (record.h1_grid, record.h2_grid) != (st.group(2), st.group(3)):
            raise TranscriptUnsoundError(
                f"transcript unsound: state grids mismatch at stage {state.stage}")
        i += 2
    if i >= len(lines):
        raise TranscriptUnsoundError("transcript unsound: missing end line")
    end = _END_RE.fullmatch(lines[i])
    if end is None:
        raise TranscriptUnsoundError("transcript unsound: bad end line")
    if int(end.group(1)) != state.stage or (end.group(2) == "true") != is_won(state):
        raise TranscriptUnsoundError("transcript unsound: end line contradicts replay")
    return state


# -- randomized soundness audit ----------------------------------------------------

def _audit_claim(required: PatternSubgroup, source: PatternSubgroup,
                 conjugator, ring: RingSpec, n: int, seed: int, samples: int) -> bool:
    """Concrete check of "g*source*g^-1 >= required": sample x in required and
    verify g^-1 x g matches the source pattern entry-wise."""
    for t in range(samples):
        if isinstance(conjugator, PatternSubgroup):
            g_word = sample_word(conjugator, ring, seed * 7919 + 2 * t)
        else:
            g_word = conjugator
        g = g_word.evaluate(n)
        g_inv = g_word.inverse().evaluate(n)
        x = sample_word(required, ring, seed * 7919 + 2 * t + 1).evaluate(n)
        if not matches_pattern(source, g_inv * x * g):
            return False
    return True


def audit_state(state: GameState, seed: int = 0, samples: int = 50) -> list:
    """Re-check every stored certificate with seeded concrete samples.

    Returns one boolean per history record; all True means the audit passed.
    """
    cfg = state.config
    m = builtin_pattern(cfg.m_name, cfg.n)
    l = builtin_pattern(cfg.l_name, cfg.n)
    results = []
    current = new_game(cfg)
    for idx, record in enumerate(state.history):
        move = record.move
        ok = True
        if move.kind is MoveKind.TYPE_I:
            for pname in move.patterns:
                q = builtin_pattern(pname, cfg.n)
                ok = ok and _audit_claim(m, current.h1, q, cfg.ring, cfg.n, seed + idx, samples)
                ok = ok and _audit_claim(l, current.h2, q, cfg.ring, cfg.n, seed + idx + 1, samples)
        elif move.kind is MoveKind.TYPE_II_INN:
            for word in move.words:
                ok = ok and _audit_claim(m, current.h2, word, cfg.ring, cfg.n, seed + idx, samples)
                ok = ok and _audit_claim(l, current.h1, word, cfg.ring, cfg.n, seed + idx + 1, samples)
                # conjugation prediction: samples of the source land in the computed pattern
                sp = _as_signed_permutation(word, cfg.n)
                predicted = pattern_conjugate(current.h2, sp)
                w_mat = word.evaluate(cfg.n)
                w_inv = word.inverse().evaluate(cfg.n)
                for t in range(samples):
                    h = sample_word(current.h2, cfg.ring, seed * 31 + idx * 101 + t).evaluate(cfg.n)
                    if not matches_pattern(predicted, w_mat * h * w_inv):
                        ok = False
                        break
        results.append(ok)
        current = apply_move(current, move)
    return results
