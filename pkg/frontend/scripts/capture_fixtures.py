"""Record live-server request/response cassettes for the frontend tests.

Runs the real session service in-process and captures every exchange the
browser model would make, in the exact order it makes them.  Regenerate
with  python frontend/scripts/capture_fixtures.py  from the repo root.
"""

import json
import pathlib
import sys

import numpy as np
from fastapi.testclient import TestClient

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[2] / "src"))

from entdetect.service import create_app  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


class Recorder:
    def __init__(self):
        self.client = TestClient(create_app())
        self.exchanges = []

    def call(self, method, path, body=None):
        if method == "POST":
            response = self.client.post(path, json=body)
        else:
            response = self.client.get(path)
        self.exchanges.append(
            {
                "request": {"method": method, "path": path, "body": body},
                "response": {"status": response.status_code, "json": response.json()},
            }
        )
        return response.json()

    # mirror the browser model's call pattern exactly
    def create(self, n_qubits, threshold=None, mode="manual"):
        body = {"n_qubits": n_qubits, "mode": mode}
        if threshold is not None:
            body["threshold"] = threshold
        created = self.call("POST", "/sessions", body)
        view = self.call("GET", f"/sessions/{created['id']}")
        return created["id"], view

    def record(self, session_id, setting, value, stderr=None):
        body = {"setting": setting, "value": value}
        if stderr is not None:
            body["stderr"] = stderr
        self.call("POST", f"/sessions/{session_id}/record", body)
        return self.call("GET", f"/sessions/{session_id}")

    def whatif(self, session_id, setting, value):
        return self.call(
            "GET", f"/sessions/{session_id}/whatif?setting={setting}&value={value}"
        )


def save(name, recorder, meta=None):
    payload = {"name": name, "exchanges": recorder.exchanges}
    if meta:
        payload["meta"] = meta
    (OUT / f"{name}.json").write_text(json.dumps(payload, indent=1))
    print(f"wrote {name}: {len(recorder.exchanges)} exchanges")


def capture_create_flow():
    r = Recorder()
    r.create(2)
    save("create_two_qubit", r)

    r = Recorder()
    r.create(3)
    save("create_three_qubit", r)


def capture_w_state_run():
    r = Recorder()
    session_id, view = r.create(3)
    view = r.record(session_id, view["next_setting"], -0.882)
    r.record(session_id, view["next_setting"], 0.571)
    save("w_state_run", r)


def capture_whatif_flow():
    r = Recorder()
    session_id, view = r.create(2)
    view = r.record(session_id, view["next_setting"], 0.9, stderr=0.02)
    r.whatif(session_id, view["next_setting"], 0.7)
    r.record(session_id, view["next_setting"], 0.2)
    save("whatif_flow", r)


def capture_error_flow():
    r = Recorder()
    session_id, _ = r.create(2)
    # out-of-order recording surfaces a 409 that the UI shows verbatim
    r.call("POST", f"/sessions/{session_id}/record", {"setting": "XX", "value": 0.5})
    save("error_409", r)


def capture_replays(count=50, seed=97):
    rng = np.random.default_rng(seed)
    for k in range(count):
        r = Recorder()
        n_qubits = int(rng.integers(2, 5))
        session_id, view = r.create(n_qubits)
        steps = int(rng.integers(2, 8))
        for _ in range(steps):
            if view["next_setting"] is None or view["status"] != "running":
                break
            value = float(np.round(rng.uniform(-1, 1), 3))
            view = r.record(session_id, view["next_setting"], value)
        save(f"replay_{k:02d}", r, meta={"n_qubits": n_qubits})


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    capture_create_flow()
    capture_w_state_run()
    capture_whatif_flow()
    capture_error_flow()
    capture_replays()
