"""Command-line interface: identity checks, strategy runs, an interactive
table, the numerical lab, transcript tooling and the JSON service."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .checks import identity_suite
from .finitegroups import elementary_quotient
from .game import (
    GameConfig,
    Move,
    MoveKind,
    MoveRejectedError,
    TranscriptUnsoundError,
    apply_move,
    audit_state,
    is_won,
    new_game,
    run_standard_strategy,
    stage_tables_text,
    transcript_dumps,
    transcript_loads,
)
from .matrices import parse_elem_word, swap_word
from .patterns import (
    PatternError,
    UnsupportedConjugatorError,
    builtin_names,
    builtin_pattern,
    pattern_conjugate,
    pattern_contains,
)
from .rings import RingSpec

RING_OPTION = click.option("--ring", default="free:2", show_default=True,
                           help="ring spec: free:k, commutative:k, Z, Z/m (optional /m suffix)")


@click.group()
def main():
    """Verified subgroup-upgrading game over elementary groups, plus a numerical lab."""


@main.command("verify-identities")
@click.option("--n", default=4, show_default=True, help="largest matrix size exercised")
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@RING_OPTION
def verify_identities(n, trials, seed, ring):
    """Run the randomized exact-identity suite; exit 1 on any failure."""
    if n < 3:
        raise click.UsageError("--n must be at least 3")
    ring_spec = RingSpec.parse(ring)
    results = identity_suite(trials=trials, seed=seed, ring=ring_spec, max_size=n)
    failed = False
    for name, ok, detail in results:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed = failed or not ok
    sys.exit(1 if failed else 0)


@main.command("run-strategy")
@click.option("--n", default=3, show_default=True)
@RING_OPTION
@click.option("--transcript", "transcript_path", type=click.Path(dir_okay=False),
              default=None, help="write the replayable transcript here")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="write stage tables, TSV and figures to this directory")
def run_strategy(n, ring, transcript_path, out_dir):
    """Play the scripted two-move strategy and print the stage tables."""
    if n < 3:
        raise click.UsageError("--n must be at least 3")
    state = run_standard_strategy(n, RingSpec.parse(ring))
    click.echo(stage_tables_text(state), nl=False)
    click.echo(f"won at stage {state.stage}")
    if transcript_path:
        Path(transcript_path).write_text(transcript_dumps(state))
        click.echo(f"transcript written to {transcript_path}")
    if out_dir:
        from .reports import strategy_report
        for path in strategy_report(state, out_dir):
            click.echo(f"wrote {path}")
    sys.exit(0)


@main.group()
def transcript():
    """Replay and validate game transcripts."""


@transcript.command("replay")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def transcript_replay(path):
    """Re-run a transcript, re-verifying every move certificate."""
    try:
        state = transcript_loads(Path(path).read_text())
    except TranscriptUnsoundError as exc:
        click.echo(str(exc))
        sys.exit(1)
    click.echo(stage_tables_text(state), nl=False)
    click.echo(f"replay sound; stage {state.stage}, won={is_won(state)}")
    sys.exit(0)


@transcript.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--samples", default=50, show_default=True)
def transcript_validate(path, seed, samples):
    """Replay plus a seeded concrete-sample audit of every certificate."""
    try:
        state = transcript_loads(Path(path).read_text())
    except TranscriptUnsoundError as exc:
        click.echo(str(exc))
        sys.exit(1)
    results = audit_state(state, seed=seed, samples=samples)
    for idx, ok in enumerate(results, start=1):
        click.echo(f"[{'PASS' if ok else 'FAIL'}] move {idx}: {samples}-sample audit")
    sys.exit(0 if all(results) else 1)


@main.command("play")
@click.option("--n", default=3, show_default=True)
@RING_OPTION
def play(n, ring):
    """Interactive table: type 'help' for the move syntax."""
    if n < 3:
        raise click.UsageError("--n must be at least 3")
    ring_spec = RingSpec.parse(ring)
    state = new_game(GameConfig(n, ring_spec))
    click.echo(stage_tables_text(state), nl=False)
    click.echo("type 'help' for commands")
    while True:
        try:
            line = input("upgame> ").strip()
        except EOFError:
            break
        if not line:
            continue
        cmd, _, rest = line.partition(" ")
        try:
            if cmd == "quit":
                break
            elif cmd == "help":
                click.echo("commands: show | builtins | I <patterns> | II <w|word literal> | "
                           "limit | whatif <w|word> <pattern> | save <path> | quit")
            elif cmd == "show":
                click.echo(stage_tables_text(state), nl=False)
            elif cmd == "builtins":
                click.echo(" ".join(builtin_names(n)) + " | word: w")
            elif cmd == "I":
                names = [p for p in rest.replace(",", " ").split() if p]
                state = apply_move(state, Move(MoveKind.TYPE_I, patterns=tuple(names)))
                click.echo(stage_tables_text(state), nl=False)
            elif cmd == "II":
                word = swap_word(n, ring_spec) if rest.strip() == "w" \
                    else parse_elem_word(rest, ring_spec)
                state = apply_move(state, Move(MoveKind.TYPE_II_INN, words=(word,)))
                click.echo(stage_tables_text(state), nl=False)
            elif cmd == "limit":
                state = apply_move(state, Move(MoveKind.LIMIT))
                click.echo(f"stage is now {state.stage}")
            elif cmd == "whatif":
                conj_text, _, pat_name = rest.partition(" ")
                word = swap_word(n, ring_spec) if conj_text == "w" \
                    else parse_elem_word(conj_text, ring_spec)
                pattern = builtin_pattern(pat_name.strip(), n)
                conjugated = pattern_conjugate(pattern, word)
                click.echo(conjugated.format_grid())
                click.echo(f">= M: {pattern_contains(conjugated, builtin_pattern('M', n))}   "
                           f">= L: {pattern_contains(conjugated, builtin_pattern('L', n))}")
            elif cmd == "save":
                Path(rest.strip()).write_text(transcript_dumps(state))
                click.echo(f"saved {rest.strip()}")
            else:
                click.echo(f"unknown command {cmd!r}; type 'help'")
        except (MoveRejectedError, PatternError, UnsupportedConjugatorError, ValueError) as exc:
            click.echo(f"rejected: {exc}")
        if is_won(state):
            click.echo("*** the game is won: a subgroup reached the full group ***")
    sys.exit(0)


def _parse_model(text: str):
    if text == "e3z2":
        from .hilbert import default_model
        return default_model()
    import re
    m = re.fullmatch(r"elementary:(\d+)/(\d+)", text)
    if m:
        return elementary_quotient(int(m.group(1)), int(m.group(2)))
    raise click.UsageError(f"unknown model {text!r}; use e3z2 or elementary:n/m")


def _load_or_build(action_dir, model, kind, seed):
    from .hilbert import build_action, load_bundle
    if action_dir:
        return load_bundle(action_dir)
    return build_action(_parse_model(model), kind=kind, seed=seed)


def _lab_common(f):
    f = click.option("--action", "action_dir", type=click.Path(exists=True, file_okay=False),
                     default=None, help="load a persisted action bundle")(f)
    f = click.option("--model", default="e3z2", show_default=True)(f)
    f = click.option("--kind", default="permutation-minus-invariants", show_default=True,
                     type=click.Choice(["permutation-minus-invariants", "random-orthogonal"]))(f)
    f = click.option("--seed", default=0, show_default=True)(f)
    return f


@main.group()
def lab():
    """Numerical lab on finite quotient models (reports include figures + TSV)."""


@lab.command("build-action")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_build_action(action_dir, model, kind, seed, out_dir):
    """Build and validate an affine action; persist it as a bundle directory."""
    from .hilbert import save_bundle
    action = _load_or_build(action_dir, model, kind, seed)
    path = save_bundle(action, out_dir)
    click.echo(f"validated action: dim {action.dim}, {len(action.model)} elements")
    click.echo(f"bundle written to {path}")
    sys.exit(0)


def _run_report(passed, written):
    for path in written:
        click.echo(f"wrote {path}")
    report = next((p for p in written if p.name == "report.txt"), None)
    if report is not None:
        click.echo(report.read_text(), nl=False)
    sys.exit(0 if passed else 1)


@lab.command("realizer")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_realizer(action_dir, model, kind, seed, out_dir):
    """Distance between the two fixed sets, realizer pair, uniqueness check."""
    from .reports import realizer_report
    action = _load_or_build(action_dir, model, kind, seed)
    _run_report(*realizer_report(action, out_dir, seed=seed))


@lab.command("trace")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_trace(action_dir, model, kind, seed, out_dir):
    """Check the realizer stays fixed along the scripted strategy stages."""
    from .reports import trace_report
    action = _load_or_build(action_dir, model, kind, seed)
    _run_report(*trace_report(action, out_dir, seed=seed))


@lab.command("angle")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_angle(action_dir, model, kind, seed, out_dir):
    """Principal angle between the two fixed sets, with spectrum figure."""
    from .reports import angle_report
    action = _load_or_build(action_dir, model, kind, seed)
    _run_report(*angle_report(action, out_dir))


@lab.command("chebyshev")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_chebyshev(action_dir, model, kind, seed, out_dir):
    """Enclosing ball of a random orbit; the center must be group-fixed."""
    from .reports import chebyshev_report
    action = _load_or_build(action_dir, model, kind, seed)
    _run_report(*chebyshev_report(action, out_dir, seed=seed))


@lab.command("split")
@_lab_common
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def lab_split(action_dir, model, kind, seed, out_dir):
    """Split the action into its invariant part and the orthogonal complement."""
    from .reports import split_report
    action = _load_or_build(action_dir, model, kind, seed)
    _run_report(*split_report(action, out_dir))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--state-dir", type=click.Path(file_okay=False), default=None,
              help="persist games as transcripts here; reloaded (and re-verified) on start")
def serve(host, port, state_dir):
    """Run the JSON service consumed by the browser frontend."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(state_dir), host=host, port=port)


if __name__ == "__main__":
    main()
