from pathlib import Path

import pytest
from click.testing import CliRunner

from upgame.cli import main
from upgame.game import transcript_loads


@pytest.fixture()
def runner():
    return CliRunner()


def test_verify_identities(runner):
    result = runner.invoke(main, ["verify-identities", "--n", "4", "--trials", "40", "--seed", "7"])
    assert result.exit_code == 0
    assert result.output.count("[PASS]") == 4
    assert "[FAIL]" not in result.output


def test_verify_identities_usage_error(runner):
    result = runner.invoke(main, ["verify-identities", "--n", "2"])
    assert result.exit_code == 2


def test_run_strategy_prints_tables(runner, tmp_path):
    transcript = tmp_path / "run.transcript"
    result = runner.invoke(main, ["run-strategy", "--n", "3", "--ring", "free:2",
                                  "--transcript", str(transcript)])
    assert result.exit_code == 0
    assert "H1^(1) = H1_1 | H2^(1) = H2_1" in result.output
    assert "E E R | E E 0" in result.output
    assert "won at stage 2" in result.output
    state = transcript_loads(transcript.read_text())
    assert state.stage == 2


def test_run_strategy_report_dir(runner, tmp_path):
    out = tmp_path / "report"
    result = runner.invoke(main, ["run-strategy", "--n", "3", "--out", str(out)])
    assert result.exit_code == 0
    assert (out / "stage_tables.txt").exists()
    assert (out / "stages.tsv").exists()
    assert (out / "stages.png").stat().st_size > 0


def test_transcript_replay_and_validate(runner, tmp_path):
    transcript = tmp_path / "game.transcript"
    runner.invoke(main, ["run-strategy", "--transcript", str(transcript)])
    replay = runner.invoke(main, ["transcript", "replay", str(transcript)])
    assert replay.exit_code == 0
    assert "replay sound" in replay.output
    validate = runner.invoke(main, ["transcript", "validate", str(transcript),
                                    "--samples", "5"])
    assert validate.exit_code == 0
    assert validate.output.count("[PASS]") == 2

    tampered = tmp_path / "bad.transcript"
    tampered.write_text(transcript.read_text().replace("EER", "EEE", 1))
    broken = runner.invoke(main, ["transcript", "replay", str(tampered)])
    assert broken.exit_code == 1
    assert "unsound" in broken.output

    missing = runner.invoke(main, ["transcript", "replay", str(tmp_path / "missing.file")])
    assert missing.exit_code == 2


def test_play_scripted_session(runner):
    script = "\n".join([
        "builtins",
        "whatif w H2_1",
        "I Q",
        "II w",
        "save played.transcript",
        "quit",
    ]) + "\n"
    with runner.isolated_filesystem():
        result = runner.invoke(main, ["play", "--n", "3"], input=script)
        assert result.exit_code == 0
        assert "the game is won" in result.output
        saved = Path("played.transcript").read_text()
        assert transcript_loads(saved).stage == 2
    assert "1 R R" in result.output  # the what-if preview grid


def test_play_rejects_illegal_move(runner):
    result = runner.invoke(main, ["play", "--n", "3"], input="II w\nquit\n")
    assert result.exit_code == 0
    assert "rejected: w*L*w^-1 >= M not certified" in result.output


def test_lab_build_action_and_reports(runner, tmp_path):
    bundle = tmp_path / "bundle"
    built = runner.invoke(main, ["lab", "build-action", "--model", "elementary:2/2",
                                 "--out", str(bundle)])
    assert built.exit_code == 0
    assert (bundle / "manifest.json").exists()
    out = tmp_path / "angle"
    angle = runner.invoke(main, ["lab", "angle", "--out", str(out)])
    assert angle.exit_code == 0
    assert (out / "angle.png").exists()
    assert "cos angle" in (out / "report.txt").read_text()


def test_lab_realizer_and_trace(runner, tmp_path):
    realizer = runner.invoke(main, ["lab", "realizer", "--out", str(tmp_path / "real")])
    assert realizer.exit_code == 0
    text = (tmp_path / "real" / "report.txt").read_text()
    assert "parallelogram uniqueness: PASS" in text
    assert (tmp_path / "real" / "convergence.png").exists()
    assert (tmp_path / "real" / "realizer.tsv").exists()

    trace = runner.invoke(main, ["lab", "trace", "--out", str(tmp_path / "trace")])
    assert trace.exit_code == 0
    assert "upgrade trace: PASS" in (tmp_path / "trace" / "report.txt").read_text()


def test_lab_chebyshev_and_split(runner, tmp_path):
    cheb = runner.invoke(main, ["lab", "chebyshev", "--seed", "3",
                                "--out", str(tmp_path / "cheb")])
    assert cheb.exit_code == 0
    assert "PASS" in (tmp_path / "cheb" / "report.txt").read_text()
    split = runner.invoke(main, ["lab", "split", "--out", str(tmp_path / "split")])
    assert split.exit_code == 0
    assert (tmp_path / "split" / "split.tsv").exists()
