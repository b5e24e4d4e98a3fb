import pytest
from fastapi.testclient import TestClient

from upgame.game import GameConfig, Move, MoveKind, apply_move, new_game, run_standard_strategy
from upgame.matrices import swap_word
from upgame.rings import RingSpec
from upgame.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def _create(client, **overrides):
    payload = {"n": 3, "ring": "free:2"}
    payload.update(overrides)
    response = client.post("/v1/games", json=payload)
    assert response.status_code == 201
    return response.json()


def test_create_and_get_game(client):
    state = _create(client)
    assert state["stage"] == 0 and not state["won"]
    assert state["h1"]["name"] == "M"
    assert state["h1"]["rows"] == [["1", "0", "R"], ["0", "1", "R"], ["0", "0", "1"]]
    fetched = client.get(f"/v1/games/{state['id']}")
    assert fetched.status_code == 200
    assert fetched.json() == state


def test_unknown_game_404(client):
    assert client.get("/v1/games/nope").status_code == 404
    assert client.post("/v1/games/nope/moves", json={"kind": "I", "patterns": ["Q"]}) \
        .status_code == 404


def test_bad_config_422(client):
    response = client.post("/v1/games", json={"n": 3, "ring": "free:2",
                                              "M": "trivial", "L": "trivial"})
    assert response.status_code == 422
    assert "do not generate" in response.json()["detail"]["reason"]


def test_play_strategy_through_api(client):
    state = _create(client)
    gid = state["id"]
    first = client.post(f"/v1/games/{gid}/moves", json={"kind": "I", "patterns": ["Q"]})
    assert first.status_code == 200
    assert first.json()["h1"]["name"] == "H1_1"
    second = client.post(f"/v1/games/{gid}/moves", json={"kind": "II_inn", "words": ["w"]})
    assert second.status_code == 200
    body = second.json()
    assert body["won"] is True
    assert body["h1"]["rows"] == [["E"] * 3] * 3
    assert len(body["history"]) == 2
    assert all(claim["ok"] for record in body["history"] for claim in record["claims"])


def test_illegal_move_names_failing_containment(client):
    state = _create(client)
    response = client.post(f"/v1/games/{state['id']}/moves",
                           json={"kind": "II_inn", "words": ["w"]})
    assert response.status_code == 422
    assert "w*L*w^-1 >= M not certified" in response.json()["detail"]["reason"]
    # the game is unchanged
    assert client.get(f"/v1/games/{state['id']}").json()["stage"] == 0


def test_conflicting_mutation_409(client):
    made = _create(client)
    entry = client.app.state.games[made["id"]]
    entry.lock.acquire()
    try:
        blocked = client.post(f"/v1/games/{made['id']}/moves",
                              json={"kind": "I", "patterns": ["Q"]})
        assert blocked.status_code == 409
    finally:
        entry.lock.release()
    retry = client.post(f"/v1/games/{made['id']}/moves",
                        json={"kind": "I", "patterns": ["Q"]})
    assert retry.status_code == 200


def test_transcript_download(client):
    state = _create(client)
    gid = state["id"]
    client.post(f"/v1/games/{gid}/moves", json={"kind": "I", "patterns": ["Q"]})
    response = client.get(f"/v1/games/{gid}/transcript")
    assert response.status_code == 200
    assert response.text.startswith("upgrading-game-transcript v1")
    assert "pattern:Q" in response.text


def test_builtins_palette(client):
    response = client.get("/v1/builtins", params={"n": 3})
    assert response.status_code == 200
    body = response.json()
    names = {p["name"] for p in body["patterns"]}
    assert {"M", "L", "Q", "G", "H1_1", "H2_1", "wH2w_inv", "wH1w_inv"} <= names
    assert body["words"][0]["name"] == "w"
    assert body["words"][0]["literal"].startswith("E(2,3;1)")
    assert client.get("/v1/builtins", params={"n": 2}).status_code == 422


def test_what_if_conjugation(client):
    response = client.post("/v1/verify/conjugation", json={
        "n": 3, "conjugator": "w", "pattern": "builtin:H2_1@3"})
    assert response.status_code == 200
    body = response.json()
    assert body["conjugated"]["rows"] == [["1", "R", "R"], ["0", "E", "E"], ["0", "E", "E"]]
    assert body["geq_m"] is True and body["geq_l"] is False
    at_stage0 = client.post("/v1/verify/conjugation", json={
        "n": 3, "conjugator": "w", "pattern": "L"})
    assert at_stage0.json()["geq_m"] is False
    identity_case = client.post("/v1/verify/conjugation", json={
        "n": 3, "conjugator": "pattern:Q", "pattern": "M"})
    assert identity_case.json()["conjugated"]["rows"][0] == ["1", "0", "R"]
    unsupported = client.post("/v1/verify/conjugation", json={
        "n": 3, "conjugator": "E(1,2;x)", "pattern": "M"})
    assert unsupported.status_code == 422


def test_what_if_does_not_mutate(client):
    state = _create(client)
    client.post("/v1/verify/conjugation", json={"n": 3, "conjugator": "w", "pattern": "H2_1"})
    assert client.get(f"/v1/games/{state['id']}").json() == state


def test_persistence_across_restart(tmp_path):
    state_dir = tmp_path / "games"
    with TestClient(create_app(state_dir)) as first:
        made = first.post("/v1/games", json={"n": 3, "ring": "free:2"}).json()
        first.post(f"/v1/games/{made['id']}/moves", json={"kind": "I", "patterns": ["Q"]})
    files = list(state_dir.glob("*.transcript"))
    assert len(files) == 1
    with TestClient(create_app(state_dir)) as second:
        reloaded = second.get(f"/v1/games/{made['id']}")
        assert reloaded.status_code == 200
        assert reloaded.json()["stage"] == 1
        assert reloaded.json()["h1"]["name"] == "H1_1"


def test_unsound_stored_state_aborts_startup(tmp_path):
    state_dir = tmp_path / "games"
    with TestClient(create_app(state_dir)) as first:
        made = first.post("/v1/games", json={"n": 3, "ring": "free:2"}).json()
        first.post(f"/v1/games/{made['id']}/moves", json={"kind": "I", "patterns": ["Q"]})
    path = next(state_dir.glob("*.transcript"))
    path.write_text(path.read_text().replace("EER", "EEE", 1))
    with pytest.raises(Exception):
        create_app(state_dir)


def test_api_state_matches_engine_state(client):
    made = _create(client)
    gid = made["id"]
    client.post(f"/v1/games/{gid}/moves", json={"kind": "I", "patterns": ["Q"]})
    client.post(f"/v1/games/{gid}/moves", json={"kind": "II_inn", "words": ["w"]})
    api_state = client.get(f"/v1/games/{gid}").json()

    ring = RingSpec.parse("free:2")
    engine = new_game(GameConfig(3, ring))
    engine = apply_move(engine, Move(MoveKind.TYPE_I, patterns=("Q",)))
    engine = apply_move(engine, Move(MoveKind.TYPE_II_INN, words=(swap_word(3, ring),)))
    assert api_state["h1"]["rows"] == engine.h1.grid_rows()
    assert api_state["h2"]["rows"] == engine.h2.grid_rows()
    assert [r["certificate"] for r in api_state["history"]] \
        == [r.certificate.digest for r in engine.history]
    # and equals the scripted strategy
    assert engine.h1 == run_standard_strategy(3, ring).h1
