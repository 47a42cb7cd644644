import random

import pytest
from fastapi.testclient import TestClient

from aekit.corpus import build_sequences
from aekit.engine import UiDesign, evaluate_leg
from aekit.predictor import (
    BidirectionalPredictor,
    Prediction,
    predict_topk,
    scripted_predictor,
    train_ngram,
)
from aekit.server import Session, create_app
from aekit.tokenizer import train_tokenizer

from conftest import make_corpus


@pytest.fixture(scope="module")
def env():
    corpus = make_corpus()
    vocab = train_tokenizer(
        [r.text for r in corpus.records], vocab_size=400, scheme="bpe"
    )
    seqs = build_sequences(corpus, vocab, "mixed")
    model = train_ngram(seqs, order=3, vocab_size=vocab.size)
    bp = BidirectionalPredictor(mode="mixed", forward=model)
    app = create_app(models={"default": bp}, vocab=vocab, default_k=10)
    return {"vocab": vocab, "bp": bp, "model": model,
            "client": TestClient(app), "corpus": corpus}


def new_session(client, **overrides):
    body = {"design": "digit", "direction": "forward", "k": 10,
            "model_tag": "default"}
    body.update(overrides)
    resp = client.post("/v1/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


def send(client, sid, etype, value=None):
    return client.post(f"/v1/sessions/{sid}/events",
                       json={"type": etype, "value": value})


class TestBasics:
    def test_health(self, env):
        resp = env["client"].get("/v1/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["schema_version"] == 1
        assert "default" in body["models"]

    def test_create_session_fresh_counters(self, env):
        snap = new_session(env["client"])
        assert snap["ledger"] == {"actual": 0, "manual_equivalent": 0, "saved": 0}
        assert snap["text"] == ""
        assert snap["ae_defined"] is False
        assert snap["ae_ratio"] is None

    def test_two_creates_distinct_ids(self, env):
        a = new_session(env["client"])
        b = new_session(env["client"])
        assert a["session_id"] != b["session_id"]

    def test_unknown_model_tag(self, env):
        resp = env["client"].post("/v1/sessions",
                                  json={"model_tag": "nope"})
        assert resp.status_code == 404

    def test_unknown_session(self, env):
        assert env["client"].get("/v1/sessions/zzz").status_code == 404

    def test_bad_design_rejected(self, env):
        resp = env["client"].post("/v1/sessions", json={"design": "voice"})
        assert resp.status_code == 400

    def test_bad_k_rejected(self, env):
        resp = env["client"].post("/v1/sessions", json={"k": 99})
        assert resp.status_code == 400


class TestSuggestions:
    def test_fresh_forward_session_shows_unigram_topk(self, env):
        snap = new_session(env["client"])
        resp = env["client"].get(f"/v1/sessions/{snap['session_id']}/suggestions")
        body = resp.json()
        assert [s["label"] for s in body["suggestions"]] == list(range(10))
        expected = predict_topk(env["model"], [], 10)
        assert [s["id"] for s in body["suggestions"]] == list(expected.ids())

    def test_bigram_context_after_typing(self):
        vocab = train_tokenizer(["a b a b"], scheme="whitespace")
        seq = vocab.encode("a b a b")
        model = train_ngram([seq], order=2, vocab_size=vocab.size)
        bp = BidirectionalPredictor(mode="mixed", forward=model)
        client = TestClient(create_app({"default": bp}, vocab, default_k=2))
        snap = new_session(client, k=2)
        sid = snap["session_id"]
        send(client, sid, "char", "a")
        send(client, sid, "char", " ")
        body = client.get(f"/v1/sessions/{sid}/suggestions").json()
        top = body["suggestions"][0]
        assert top["label"] == 0
        assert top["surface"] == " b"

    def test_backward_direction_previous_token(self, env):
        snap = new_session(env["client"], direction="backward")
        sid = snap["session_id"]
        body = env["client"].get(f"/v1/sessions/{sid}/suggestions").json()
        assert body["direction"] == "backward"
        expected = env["bp"].predict([], "backward", 10)
        assert [s["id"] for s in body["suggestions"]] == list(expected.ids())


class TestEvents:
    def test_digit_commits_and_counts_one(self, env):
        snap = new_session(env["client"])
        sid = snap["session_id"]
        sugg = env["client"].get(f"/v1/sessions/{sid}/suggestions").json()
        choice = sugg["suggestions"][5]
        after = send(env["client"], sid, "digit", 5).json()
        assert after["ledger"]["actual"] == 1
        assert after["text"] == choice["surface"]
        assert after["token_count"] == 1

    def test_digit_out_of_range_is_noop_with_error(self, env):
        vocab = env["vocab"]
        client = env["client"]
        snap = new_session(client, k=4)
        sid = snap["session_id"]
        resp = send(client, sid, "digit", 9)
        assert resp.status_code == 400
        unchanged = client.get(f"/v1/sessions/{sid}").json()
        assert unchanged["ledger"] == {"actual": 0, "manual_equivalent": 0, "saved": 0}

    def test_char_and_whitespace_accounting(self, env):
        client = env["client"]
        sid = new_session(client)["session_id"]
        for c in "cat":
            send(client, sid, "char", c)
        snap = client.get(f"/v1/sessions/{sid}").json()
        assert snap["ledger"] == {"actual": 3, "manual_equivalent": 3, "saved": 0}
        assert snap["pending"] == "cat"
        snap = send(client, sid, "char", " ").json()
        # whitespace costs a keystroke but adds no manual-equivalent value
        assert snap["ledger"] == {"actual": 4, "manual_equivalent": 3, "saved": -1}
        assert snap["pending"] == ""
        assert snap["text"] == "cat"

    def test_backspace(self, env):
        client = env["client"]
        sid = new_session(client)["session_id"]
        send(client, sid, "char", "x")
        snap = send(client, sid, "backspace").json()
        assert snap["pending"] == ""
        assert snap["ledger"] == {"actual": 2, "manual_equivalent": 0, "saved": -2}

    def test_toggle_flips_direction_and_clears_pending(self, env):
        client = env["client"]
        sid = new_session(client)["session_id"]
        send(client, sid, "char", "x")
        snap = send(client, sid, "toggle").json()
        assert snap["direction"] == "backward"
        assert snap["cursor_side"] == "begin"
        assert snap["pending"] == ""

    def test_legacy_design_charges_rank(self, env):
        client = env["client"]
        sid = new_session(client, design="legacy")["session_id"]
        after = send(client, sid, "digit", 5).json()
        assert after["ledger"]["actual"] == 6  # five arrows + tab

    def test_unknown_event_type(self, env):
        client = env["client"]
        sid = new_session(client)["session_id"]
        assert send(client, sid, "hum", None).status_code == 400


class TestSnapshot:
    def test_live_ae_after_one_accept(self):
        # a model whose top suggestion strips to 6 characters
        vocab = train_tokenizer(["device device device x"], scheme="whitespace")
        seq = vocab.encode("device device device x")
        model = train_ngram([seq], order=1, vocab_size=vocab.size)
        bp = BidirectionalPredictor(mode="mixed", forward=model)
        client = TestClient(create_app({"default": bp}, vocab, default_k=2))
        sid = new_session(client, k=2)["session_id"]
        top = client.get(f"/v1/sessions/{sid}/suggestions").json()["suggestions"][0]
        assert len(top["surface"].strip()) == 6
        snap = send(client, sid, "digit", 0).json()
        assert snap["ledger"] == {"actual": 1, "manual_equivalent": 6, "saved": 5}
        assert snap["ae_defined"] is True
        assert abs(snap["ae_ratio"] - 5 / 6) < 1e-12

    def test_all_manual_typing_never_positive(self, env):
        client = env["client"]
        sid = new_session(client)["session_id"]
        for c in "abc":
            send(client, sid, "char", c)
        snap = client.get(f"/v1/sessions/{sid}").json()
        assert snap["ae_ratio"] == 0.0  # no whitespace typed: exactly zero
        snap = send(client, sid, "char", " ").json()
        assert snap["ae_ratio"] < 0  # the separator costs a real keystroke

    def test_empty_session_undefined(self, env):
        snap = new_session(env["client"])
        assert snap["ae_defined"] is False


class TestBackwardComposition:
    def test_prepends_tokens(self, env):
        client = env["client"]
        sid = new_session(client, direction="backward")["session_id"]
        sugg1 = client.get(f"/v1/sessions/{sid}/suggestions").json()
        first = sugg1["suggestions"][0]
        send(client, sid, "digit", 0)
        sugg2 = client.get(f"/v1/sessions/{sid}/suggestions").json()
        second = sugg2["suggestions"][0]
        snap = send(client, sid, "digit", 0).json()
        assert snap["text"] == second["surface"] + first["surface"]

    def test_manual_word_break_respaces_junction(self, env):
        client = env["client"]
        sid = new_session(client, direction="backward")["session_id"]
        # commit a word-initial token, then type a word before it
        send(client, sid, "char", "x")
        send(client, sid, "char", " ")
        snap1 = client.get(f"/v1/sessions/{sid}").json()
        assert snap1["text"] == "x"
        for c in "on":
            send(client, sid, "char", c)
        snap = send(client, sid, "char", " ").json()
        assert snap["text"] == "on x"
        assert snap["ledger"]["manual_equivalent"] == 3


class TestParityWithEngine:
    """Driving a session with the recorded suggestion lists must reproduce
    the batch engine's ledger exactly (plus the seed token's typing)."""

    @pytest.mark.parametrize("design_label", ["digit", "legacy"])
    def test_event_stream_matches_evaluate_leg(self, env, design_label):
        client = env["client"]
        vocab = env["vocab"]
        rng = random.Random(31)
        texts = [r.text for r in env["corpus"].records]
        for text in texts[:3]:
            seq = vocab.encode(text)[:12]
            assert len(seq) >= 3
            sid = new_session(client, design=design_label)["session_id"]
            seed_chars = vocab.token_surface(seq[0])[0].strip()
            for c in seed_chars:
                send(client, sid, "char", c)
            script = {}
            for i in range(1, len(seq)):
                sugg = client.get(
                    f"/v1/sessions/{sid}/suggestions"
                ).json()["suggestions"]
                ids = [s["id"] for s in sugg]
                script[i] = Prediction(
                    candidates=tuple((s["id"], s["score"]) for s in sugg)
                )
                if seq[i] in ids:
                    resp = send(client, sid, "digit", ids.index(seq[i]))
                else:
                    surface = vocab.token_surface(seq[i])[0].strip()
                    for c in surface:
                        resp = send(client, sid, "char", c)
                assert resp.status_code == 200
            snap = client.get(f"/v1/sessions/{sid}").json()
            ledger = evaluate_leg(
                scripted_predictor(script), vocab, seq,
                UiDesign.from_label(design_label), k=10,
            )
            seed_cost = len(seed_chars)
            assert snap["ledger"]["actual"] == ledger.keys_auto + seed_cost
            assert snap["ledger"]["manual_equivalent"] == \
                ledger.keys_manual + seed_cost


class TestEventSourcing:
    def test_replay_reconstructs_state(self, env):
        vocab = env["vocab"]
        session = Session("t1", env["bp"], vocab, UiDesign.DIGIT_KEYS,
                          "forward", k=10)
        events = [
            {"type": "char", "value": "a"},
            {"type": "char", "value": " "},
            {"type": "digit", "value": 2},
            {"type": "toggle", "value": None},
            {"type": "char", "value": "z"},
            {"type": "backspace", "value": None},
            {"type": "digit", "value": 0},
        ]
        for event in events:
            session.apply(event)
        twin = session.replay()
        assert twin.snapshot() == session.snapshot()


class TestStatelessPredict:
    def test_contract(self, env):
        resp = env["client"].post(
            "/v1/predict", json={"context": [], "direction": "forward", "k": 7}
        )
        body = resp.json()
        assert resp.status_code == 200
        assert body["schema_version"] == 1
        assert len(body["candidates"]) == 7
        expected = predict_topk(env["model"], [], 7)
        assert [c["id"] for c in body["candidates"]] == list(expected.ids())

    def test_bad_context_id(self, env):
        resp = env["client"].post(
            "/v1/predict",
            json={"context": [10**6], "direction": "forward", "k": 3},
        )
        assert resp.status_code == 400

    def test_unknown_model(self, env):
        resp = env["client"].post(
            "/v1/predict",
            json={"context": [], "direction": "forward", "k": 3,
                  "model_tag": "ghost"},
        )
        assert resp.status_code == 404


class TestIsolation:
    def test_sessions_do_not_interact(self, env):
        client = env["client"]
        a = new_session(client)["session_id"]
        b = new_session(client)["session_id"]
        send(client, a, "char", "x")
        send(client, b, "digit", 0)
        snap_a = client.get(f"/v1/sessions/{a}").json()
        snap_b = client.get(f"/v1/sessions/{b}").json()
        assert snap_a["pending"] == "x"
        assert snap_b["pending"] == ""
        assert snap_a["ledger"]["actual"] == 1
        assert snap_b["ledger"]["actual"] == 1
        assert snap_b["token_count"] == 1
