import json

import pytest
from fastapi.testclient import TestClient

from entdetect.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def make_session(client, n_qubits=2, **extra):
    response = client.post("/sessions", json={"n_qubits": n_qubits, **extra})
    assert response.status_code == 200
    return response.json()


class TestCreate:
    def test_two_qubit_default(self, client):
        data = make_session(client)
        assert data["first_setting"] == "ZZ"
        assert data["threshold"] == pytest.approx(0.4)
        assert data["v"] == 1

    def test_three_qubit_default_threshold(self, client):
        data = make_session(client, n_qubits=3)
        assert data["first_setting"] == "XXX"
        assert data["threshold"] == pytest.approx(0.5)

    def test_invalid_qubit_count(self, client):
        response = client.post("/sessions", json={"n_qubits": 1})
        assert response.status_code == 422

    def test_invalid_threshold(self, client):
        response = client.post("/sessions", json={"n_qubits": 2, "threshold": 2.0})
        assert response.status_code == 422


class TestRecord:
    def test_singlet_values_reach_verdict(self, client):
        session = make_session(client)
        r1 = client.post(
            f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": -1.0}
        ).json()
        assert r1["status"] == "running"
        assert r1["next_setting"] == "YY"
        r2 = client.post(
            f"/sessions/{session['id']}/record", json={"setting": "YY", "value": -1.0}
        ).json()
        assert r2["status"] == "entangled"
        assert r2["sum"] == pytest.approx(2.0)

    def test_out_of_order_409(self, client):
        session = make_session(client)
        response = client.post(
            f"/sessions/{session['id']}/record", json={"setting": "XX", "value": 0.2}
        )
        assert response.status_code == 409

    def test_out_of_range_422(self, client):
        session = make_session(client)
        response = client.post(
            f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": 1.5}
        )
        assert response.status_code == 422

    def test_unknown_id_404(self, client):
        response = client.get("/sessions/doesnotexist")
        assert response.status_code == 404

    def test_view_history_sums(self, client):
        session = make_session(client)
        client.post(f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": 0.6})
        client.post(
            f"/sessions/{session['id']}/record",
            json={"setting": "YY", "value": 0.5, "stderr": 0.02},
        )
        view = client.get(f"/sessions/{session['id']}").json()
        assert [h["setting"] for h in view["history"]] == ["ZZ", "YY"]
        assert view["history"][0]["sum"] == pytest.approx(0.36)
        assert view["history"][1]["sum"] == pytest.approx(0.61)
        assert view["history"][1]["stderr"] == pytest.approx(0.02)
        assert view["sum"] == pytest.approx(0.61)
        assert view["status"] == "running"


class TestWhatif:
    def test_hypothetical_without_mutation(self, client):
        session = make_session(client)
        client.post(f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": 0.9})
        before = client.get(f"/sessions/{session['id']}").json()
        what = client.get(
            f"/sessions/{session['id']}/whatif", params={"setting": "XY", "value": 0.7}
        ).json()
        assert what["sum"] == pytest.approx(0.81 + 0.49)
        assert what["status"] == "entangled"
        after = client.get(f"/sessions/{session['id']}").json()
        assert after == before

    def test_fresh_session_zero(self, client):
        session = make_session(client)
        what = client.get(
            f"/sessions/{session['id']}/whatif", params={"setting": "ZZ", "value": 0.0}
        ).json()
        assert what["sum"] == pytest.approx(0.0)
        assert what["status"] == "running"

    def test_duplicate_409(self, client):
        session = make_session(client)
        client.post(f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": 0.9})
        response = client.get(
            f"/sessions/{session['id']}/whatif", params={"setting": "ZZ", "value": 0.1}
        )
        assert response.status_code == 409

    def test_bad_value_422(self, client):
        session = make_session(client)
        response = client.get(
            f"/sessions/{session['id']}/whatif", params={"setting": "ZZ", "value": 1.2}
        )
        assert response.status_code == 422


class TestTrees:
    def test_branch_endpoint(self, client):
        data = client.get("/trees/3").json()
        assert data["n"] == 3
        assert data["nodes"][0] == "XXX"

    def test_seeded_branch(self, client):
        data = client.get("/trees/4", params={"seed": "ZZZZ"}).json()
        assert data["nodes"][:2] == ["ZZZZ", "ZZXX"]

    def test_out_of_range(self, client):
        assert client.get("/trees/9").status_code == 422


class TestPersistence:
    def test_write_then_replay_roundtrip(self, tmp_path):
        data_dir = str(tmp_path)
        app = create_app(data_dir=data_dir)
        with TestClient(app) as client:
            session = make_session(client, n_qubits=3)
            client.post(
                f"/sessions/{session['id']}/record", json={"setting": "XXX", "value": 0.9}
            )
            client.post(
                f"/sessions/{session['id']}/record", json={"setting": "XZZ", "value": -0.6}
            )
            original = client.get(f"/sessions/{session['id']}").json()

        replayed_app = create_app(data_dir=data_dir)
        with TestClient(replayed_app) as client:
            restored = client.get(f"/sessions/{session['id']}").json()
        assert restored == original

    def test_truncated_final_line_drops_last_event(self, tmp_path):
        data_dir = str(tmp_path)
        app = create_app(data_dir=data_dir)
        with TestClient(app) as client:
            session = make_session(client)
            client.post(f"/sessions/{session['id']}/record", json={"setting": "ZZ", "value": 0.5})
            client.post(f"/sessions/{session['id']}/record", json={"setting": "YY", "value": 0.4})
        journal = tmp_path / f"{session['id']}.jsonl"
        lines = journal.read_text().splitlines()
        journal.write_text("\n".join(lines[:-1]) + '\n{"event": "recorded", "sett')

        with TestClient(create_app(data_dir=data_dir)) as client:
            restored = client.get(f"/sessions/{session['id']}").json()
        assert [h["setting"] for h in restored["history"]] == ["ZZ"]
        assert restored["sum"] == pytest.approx(0.25)

    def test_many_sessions_replay(self, tmp_path):
        data_dir = str(tmp_path)
        app = create_app(data_dir=data_dir)
        with TestClient(app) as client:
            ids = [make_session(client)["id"] for _ in range(40)]
            for session_id in ids:
                client.post(
                    f"/sessions/{session_id}/record", json={"setting": "ZZ", "value": 0.3}
                )
        with TestClient(create_app(data_dir=data_dir)) as client:
            for session_id in ids:
                view = client.get(f"/sessions/{session_id}").json()
                assert view["sum"] == pytest.approx(0.09)
