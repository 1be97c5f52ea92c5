import numpy as np
import pytest

from entdetect.engine import (
    DecisionPolicy,
    Session,
    SessionError,
    Status,
    default_threshold,
    detection_step,
    priorities,
    random_order_session,
    run_auto,
    two_qubit_tree,
)
from entdetect.states import bell, colored_noise, g_state, product_state, werner
from entdetect.strings import build_branch, relabel

W_CYCLE = {"X": "Z", "Z": "Y", "Y": "X"}


class TestPolicy:
    def test_default_thresholds(self):
        assert default_threshold(2) == pytest.approx(0.4)
        assert default_threshold(3) == pytest.approx(0.5)
        assert DecisionPolicy(2).threshold == pytest.approx(0.4)

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            DecisionPolicy(2, threshold=1.0)

    def test_tree_structure_export(self):
        tree = two_qubit_tree()
        assert tree["nodes"][:3] == ["ZZ", "YY", "XX"]
        assert ["ZZ", "YY"] in tree["solid"]
        assert ["ZZ", "XZ"] in tree["dashed"]
        assert len(tree["nodes"]) == 9


class TestPriorities:
    def test_worked_example(self):
        measured = {"ZZ": 0.7, "YY": 0.6, "XX": 0.1}
        remaining = ["XY", "YX", "XZ", "ZX", "YZ", "ZY"]
        order = priorities(measured, remaining)
        assert order == ["XY", "YX", "XZ", "ZX", "YZ", "ZY"]

    def test_nothing_measured_is_lexicographic(self):
        order = priorities({}, ["ZY", "XZ", "YX", "XY"])
        assert order == ["XY", "XZ", "YX", "ZY"]

    def test_single_big_diagonal(self):
        order = priorities({"ZZ": 1.0}, ["XY", "YX", "XZ", "ZX", "YZ", "ZY"])
        assert set(order[:2]) == {"XY", "YX"}
        assert set(order[2:]) == {"XZ", "YZ", "ZX", "ZY"}


class TestTwoQubitSession:
    def test_starts_with_zz(self):
        session = Session(DecisionPolicy(2))
        assert session.next_setting() == "ZZ"

    def test_singlet_two_steps(self):
        session = run_auto(bell("psi-"))
        assert session.status is Status.ENTANGLED
        assert [w for w, _ in session.log] == ["ZZ", "YY"]
        assert session.running_sum == pytest.approx(2.0)

    def test_werner_08_two_steps(self):
        session = run_auto(werner(0.8))
        assert detection_step(session) == 2
        assert session.running_sum == pytest.approx(1.28)

    def test_werner_06_three_steps(self):
        session = run_auto(werner(0.6))
        assert detection_step(session) == 3
        assert session.running_sum == pytest.approx(1.08)

    def test_colored_noise_two_steps(self):
        session = run_auto(colored_noise(0.3))
        assert detection_step(session) == 2
        assert session.running_sum == pytest.approx(1.09)

    def test_product_state_exhausts_all_nine(self):
        session = run_auto(product_state("00"))
        assert session.status is Status.EXHAUSTED
        assert len(session.log) == 9
        assert session.running_sum == pytest.approx(1.0)

    def test_record_validation(self):
        session = Session(DecisionPolicy(2))
        with pytest.raises(SessionError):
            session.record("YY", 0.5)  # out of order
        session.record("ZZ", 0.9)
        with pytest.raises(SessionError):
            session.record("ZZ", 0.9)  # duplicate
        with pytest.raises(SessionError):
            session.record("YY", 1.5)  # out of range

    def test_terminal_session_rejects_next(self):
        session = Session(DecisionPolicy(2))
        session.record("ZZ", 1.0)
        session.record("YY", -1.0)
        assert session.status is Status.ENTANGLED
        with pytest.raises(SessionError):
            session.next_setting()

    def test_monotone_sum_and_sticky_verdict(self):
        session = Session(DecisionPolicy(2))
        last = 0.0
        for value in (0.9, 0.5, 0.1):
            session.record(session.recommendation(), value)
            assert session.running_sum >= last
            last = session.running_sum
        # crossing happened at step 2; the verdict survives further records
        assert detection_step(session) == 2
        assert session.status is Status.ENTANGLED

    def test_whatif_does_not_mutate(self):
        session = Session(DecisionPolicy(2))
        session.record("ZZ", 0.9)
        before = (list(session.log), session.running_sum, session.status)
        total, status = session.whatif("XY", 0.7)
        assert total == pytest.approx(0.81 + 0.49)
        assert status is Status.ENTANGLED
        assert (list(session.log), session.running_sum, session.status) == before


class TestMultiQubitSession:
    def test_three_qubit_solid_step(self):
        session = Session(DecisionPolicy(3))
        assert session.next_setting() == "XXX"
        session.record("XXX", 0.904)
        assert session.next_setting() == "XZZ"

    def test_three_qubit_dashed_hop(self):
        session = Session(DecisionPolicy(3))
        session.record("XXX", 0.904)
        session.record("XZZ", 0.1)  # small: hop to the alternative at this slot
        assert session.next_setting() == "XZY"

    def test_g_state_two_steps(self):
        session = run_auto(g_state(np.pi / 4), DecisionPolicy(3))
        assert [w for w, _ in session.log] == ["XXX", "XZZ"]
        assert session.status is Status.ENTANGLED
        assert session.running_sum == pytest.approx(1 + 4 / 9)

    def test_w_state_relabeled_branch(self):
        policy = DecisionPolicy(3, branch=relabel(build_branch(3), W_CYCLE))
        session = Session(policy)
        assert session.next_setting() == "ZZZ"
        session.record("ZZZ", -0.882)
        assert session.next_setting() == "ZYY"
        session.record("ZYY", 0.571)
        assert session.status is Status.ENTANGLED
        assert session.running_sum == pytest.approx(1.104, abs=5e-4)

    def test_four_qubit_experimental_prefix(self):
        session = Session(DecisionPolicy(4, branch=build_branch(4, "ZZZZ")))
        session.record("ZZZZ", 0.848)
        session.record("ZZXX", -0.533)
        # already past the threshold, but the run keeps measuring
        assert session.status is Status.ENTANGLED
        assert session.recommendation() == "ZXZX"
        session.record("ZXZX", -0.552)
        assert session.status is Status.ENTANGLED
        assert session.running_sum == pytest.approx(1.3082, abs=5e-4)

    def test_branch_exhaustion_falls_back_to_sweep(self):
        session = Session(DecisionPolicy(3))
        seen = set()
        for _ in range(27):
            setting = session.next_setting()
            assert setting not in seen
            seen.add(setting)
            session.record(setting, 0.0)
        assert session.status is Status.EXHAUSTED
        assert session.next_setting is not None
        assert len(seen) == 27


class TestRandomBaseline:
    def test_singlet_detection_distribution(self):
        # hypergeometric oracle: position of the 2nd of 3 diagonal settings
        # among 9 shuffled has mean 2 * 10 / 4 = 5
        rng = np.random.default_rng(42)
        steps = []
        for _ in range(900):
            session = random_order_session(bell("psi-"), rng)
            steps.append(detection_step(session))
        assert min(steps) >= 2 and max(steps) <= 8
        assert np.mean(steps) == pytest.approx(5.0, abs=0.15)

    def test_product_never_detected(self):
        rng = np.random.default_rng(1)
        session = random_order_session(product_state("10"), rng)
        assert session.status is Status.EXHAUSTED

    def test_multiqubit_pool_starts_with_seed(self):
        rng = np.random.default_rng(2)
        session = random_order_session(g_state(np.pi / 4), rng)
        assert session.log[0][0] == "XXX"


class TestJsonLines:
    def test_session_log_lines(self):
        import json

        session = run_auto(werner(0.8))
        lines = [json.loads(line) for line in session.to_json_lines().splitlines()]
        assert lines[-1]["status"] == "entangled"
        assert lines[-1]["sum"] == pytest.approx(1.28)
        assert list(lines[0]) == ["setting", "value", "sum", "status"]
