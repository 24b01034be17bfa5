"""HTTP session protocol: flows, error codes, hints and concurrency."""

import warnings

import pytest

from thuegames.certificate import write_certificate
from thuegames.games import NoSafeMoveError

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from thuegames import service as service_mod
from thuegames.service import create_app

VIEW_KEYS = {"id", "mode", "k", "word", "turn", "terminal", "lastErased",
             "plyCount"}


@pytest.fixture(scope="module")
def client(cert6, tmp_path_factory):
    path = tmp_path_factory.mktemp("certs") / "hard6.tgc"
    write_certificate(cert6, str(path))
    app = create_app(cert_paths=[str(path)])
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def hard_game(client):
    r = client.post("/v1/games", json={"mode": "hard", "k": 6,
                                       "humanRole": "BEN"})
    assert r.status_code == 201
    sid = r.json()["id"]
    yield sid
    client.delete(f"/v1/games/{sid}")


@pytest.fixture()
def erase_game(client):
    r = client.post("/v1/games",
                    json={"mode": "erase", "k": 3, "humanRole": "ANN",
                          "options": {"benStrategy": "script3"}})
    assert r.status_code == 201
    sid = r.json()["id"]
    yield sid
    client.delete(f"/v1/games/{sid}")


class TestCreate:
    def test_view_shape(self, client, hard_game):
        view = client.get(f"/v1/games/{hard_game}").json()
        assert set(view) == VIEW_KEYS
        assert view["word"] == [] and view["turn"] == "ANN"
        assert view["terminal"] is None and view["plyCount"] == 0

    def test_unknown_mode(self, client):
        r = client.post("/v1/games", json={"mode": "chess", "k": 6})
        assert r.status_code == 400
        assert r.json()["code"] == "UNSUPPORTED"

    def test_bad_k(self, client):
        for k in (1, 17, "six", None):
            r = client.post("/v1/games", json={"mode": "hard", "k": k})
            assert (r.status_code, r.json()["code"]) == (400, "UNSUPPORTED")

    def test_unsupported_engine_ann(self, client):
        r = client.post("/v1/games", json={"mode": "hard", "k": 9,
                                           "humanRole": "BEN"})
        assert r.status_code == 400
        assert "unsupported k" in r.json()["message"]

    def test_script3_needs_erase(self, client):
        r = client.post("/v1/games",
                        json={"mode": "hard", "k": 6, "humanRole": "ANN",
                              "options": {"benStrategy": "script3"}})
        assert (r.status_code, r.json()["code"]) == (400, "UNSUPPORTED")

    def test_bad_role_and_options(self, client):
        r = client.post("/v1/games", json={"mode": "hard", "k": 6,
                                           "humanRole": "ARBITER"})
        assert r.status_code == 400
        r = client.post("/v1/games", json={"mode": "hard", "k": 6,
                                           "options": {"lengthTarget": -1}})
        assert r.status_code == 400
        r = client.post("/v1/games", json={"mode": "hard", "k": 6,
                                           "options": {"lookahead": 99}})
        assert r.status_code == 400

    def test_non_json_body(self, client):
        r = client.post("/v1/games", content=b"not json",
                        headers={"content-type": "application/json"})
        assert (r.status_code, r.json()["code"]) == (400, "UNSUPPORTED")


class TestMoves:
    def test_human_cannot_preempt_engine(self, client, hard_game):
        r = client.post(f"/v1/games/{hard_game}/move", json={"letter": 0})
        assert (r.status_code, r.json()["code"]) == (409, "NOT_YOUR_TURN")

    def test_engine_then_human_flow(self, client, hard_game):
        r = client.post(f"/v1/games/{hard_game}/engine-move")
        assert r.status_code == 200
        body = r.json()
        assert set(body) == {"move", "state"}
        assert body["move"] == {"letter": 0}
        assert body["state"]["turn"] == "BEN"

        r = client.post(f"/v1/games/{hard_game}/engine-move")
        assert (r.status_code, r.json()["code"]) == (409, "NOT_ENGINE_TURN")

        # the hard rule: Ben may not repeat Ann's letter
        r = client.post(f"/v1/games/{hard_game}/move", json={"letter": 0})
        assert (r.status_code, r.json()["code"]) == (422, "ILLEGAL_MOVE")
        assert "not legal" in r.json()["message"]

        r = client.post(f"/v1/games/{hard_game}/move", json={"pass": True})
        assert r.status_code == 200
        assert r.json()["word"] == [0]
        assert r.json()["plyCount"] == 2

    def test_out_of_alphabet(self, client, hard_game):
        client.post(f"/v1/games/{hard_game}/engine-move")
        r = client.post(f"/v1/games/{hard_game}/move", json={"letter": 6})
        assert (r.status_code, r.json()["code"]) == (422, "ILLEGAL_MOVE")
        assert "alphabet" in r.json()["message"]

    def test_malformed_moves(self, client, hard_game):
        client.post(f"/v1/games/{hard_game}/engine-move")
        for body in ({}, {"letter": "one"}, {"letter": True},
                     {"pass": True, "letter": 1}, [1]):
            r = client.post(f"/v1/games/{hard_game}/move", json=body)
            assert (r.status_code, r.json()["code"]) == (422, "ILLEGAL_MOVE")

    def test_unknown_session_everywhere(self, client):
        for method, path in [("get", "/v1/games/nope"),
                             ("post", "/v1/games/nope/move"),
                             ("post", "/v1/games/nope/engine-move"),
                             ("get", "/v1/games/nope/hint"),
                             ("delete", "/v1/games/nope")]:
            r = getattr(client, method)(path, **(
                {"json": {"letter": 0}} if path.endswith("/move") else {}))
            assert (r.status_code, r.json()["code"]) == \
                (404, "UNKNOWN_SESSION"), path

    def test_delete_then_gone(self, client):
        sid = client.post("/v1/games", json={"mode": "hard", "k": 6}).json()["id"]
        assert client.delete(f"/v1/games/{sid}").status_code == 204
        assert client.get(f"/v1/games/{sid}").status_code == 404


class TestEraseFlow:
    def test_human_erase_reported(self, client, erase_game):
        r = client.post(f"/v1/games/{erase_game}/move", json={"letter": 0})
        assert r.status_code == 200 and r.json()["word"] == [0]
        r = client.post(f"/v1/games/{erase_game}/engine-move")
        assert r.json()["state"]["word"] == [0, 1]
        # completing 11 erases one letter straight away
        r = client.post(f"/v1/games/{erase_game}/move", json={"letter": 1})
        body = r.json()
        assert body["word"] == [0, 1]
        assert body["lastErased"] == [[1]]
        assert client.get(f"/v1/games/{erase_game}").json()["lastErased"] \
            == [[1]]

    def test_engine_punishes_period_two(self, client, erase_game):
        client.post(f"/v1/games/{erase_game}/move", json={"letter": 0})
        client.post(f"/v1/games/{erase_game}/engine-move")        # word 01
        client.post(f"/v1/games/{erase_game}/move", json={"letter": 0})
        r = client.post(f"/v1/games/{erase_game}/engine-move")    # punishes 010
        body = r.json()
        assert body["move"] == {"letter": 1}
        assert body["state"]["word"] == [0, 1]
        assert body["state"]["lastErased"] == [[0, 1]]


class TestHints:
    def test_opening_hint_uniform(self, client, hard_game):
        h = client.get(f"/v1/games/{hard_game}/hint").json()
        assert h["turn"] == "ANN"
        assert len(h["moves"]) == 6
        weights = {e["weight"] for e in h["moves"]}
        assert len(weights) == 1            # empty word: all letters alike
        assert all(e["safe"] for e in h["moves"])

    def test_midgame_weights_within_certificate_bounds(self, client, cert6,
                                                       hard_game):
        client.post(f"/v1/games/{hard_game}/engine-move")
        client.post(f"/v1/games/{hard_game}/move", json={"letter": 1})
        client.post(f"/v1/games/{hard_game}/engine-move")
        h = client.get(f"/v1/games/{hard_game}/hint").json()
        assert h["turn"] == "BEN"
        entries = h["moves"]
        assert any("pass" in e["move"] for e in entries)
        for e in entries:
            if e["safe"]:
                assert cert6.m <= e["weight"] <= cert6.M
        ranked = [e for e in entries if e["safe"]]
        assert all(a["weight"] >= b["weight"]
                   for a, b in zip(ranked, ranked[1:]))

    def test_square_completion_flagged(self, client):
        sid = client.post("/v1/games",
                          json={"mode": "nonrep", "k": 4,
                                "humanRole": "BEN"}).json()["id"]
        for _ in range(3):                  # engine walks into 010 territory
            client.post(f"/v1/games/{sid}/engine-move")
            view = client.get(f"/v1/games/{sid}").json()
            if view["turn"] == "BEN":
                break
            client.post(f"/v1/games/{sid}/move", json={"letter": view["word"][-1] + 1})
        view = client.get(f"/v1/games/{sid}").json()
        if view["turn"] == "BEN" and len(view["word"]) >= 3:
            h = client.get(f"/v1/games/{sid}/hint").json()
            unsafe = [e for e in h["moves"] if e["completesSquare"]]
            for e in unsafe:
                assert e["weight"] is None and not e["safe"]
        client.delete(f"/v1/games/{sid}")

    def test_hint_without_certificate_has_null_weights(self, client,
                                                       erase_game):
        h = client.get(f"/v1/games/{erase_game}/hint").json()
        assert all(e["weight"] is None for e in h["moves"])
        assert {tuple(e["move"].items())[0][0] for e in h["moves"]} == {"letter"}


class TestConcurrency:
    def test_busy_while_mutating(self, client, hard_game):
        svc = client.app.state.service
        sess = svc.sessions[hard_game]
        assert sess.lock.acquire(blocking=False)
        try:
            r = client.post(f"/v1/games/{hard_game}/engine-move")
            assert (r.status_code, r.json()["code"]) == (409, "BUSY")
            r = client.post(f"/v1/games/{hard_game}/move", json={"letter": 1})
            assert (r.status_code, r.json()["code"]) == (409, "BUSY")
        finally:
            sess.lock.release()
        assert client.get(f"/v1/games/{hard_game}").status_code == 200

    def test_reads_are_snapshots(self, client, hard_game):
        a = client.get(f"/v1/games/{hard_game}").json()
        b = client.get(f"/v1/games/{hard_game}").json()
        assert a == b


class TestResignation:
    def test_no_safe_move_becomes_terminal(self, client, hard_game,
                                           monkeypatch):
        def explode(*a, **kw):
            raise NoSafeMoveError("forced for the test")

        monkeypatch.setattr(service_mod, "ann_move", explode)
        r = client.post(f"/v1/games/{hard_game}/engine-move")
        assert r.status_code == 200
        body = r.json()
        assert body["move"] is None
        assert body["state"]["terminal"] == "ENGINE_RESIGNED"
        r = client.post(f"/v1/games/{hard_game}/move", json={"letter": 0})
        assert (r.status_code, r.json()["code"]) == (422, "ILLEGAL_MOVE")


class TestRandomInterleavings:
    def test_protocol_never_corrupts_state(self, client):
        """Hammer one session with arbitrary calls; invariants must hold."""
        import random

        rnd = random.Random(99)
        sid = client.post("/v1/games",
                          json={"mode": "hard", "k": 6,
                                "humanRole": "BEN"}).json()["id"]
        for _ in range(120):
            roll = rnd.random()
            if roll < 0.35:
                client.post(f"/v1/games/{sid}/engine-move")
            elif roll < 0.7:
                client.post(f"/v1/games/{sid}/move",
                            json=rnd.choice([{"letter": rnd.randrange(8)},
                                             {"pass": True}, {}]))
            elif roll < 0.9:
                view = client.get(f"/v1/games/{sid}").json()
                assert set(view) == VIEW_KEYS
                assert view["plyCount"] >= 0
            else:
                client.get(f"/v1/games/{sid}/hint")
        view = client.get(f"/v1/games/{sid}").json()
        assert view["terminal"] in (None, "BEN_WON")
        client.delete(f"/v1/games/{sid}")
