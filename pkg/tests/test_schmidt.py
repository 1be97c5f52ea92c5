import numpy as np
import pytest

from entdetect.schmidt import (
    FilterAnnihilatedError,
    SchmidtTranscript,
    VanishingBlochError,
    angles_from_bloch,
    apply_filter,
    filter_operator,
    primed_frame,
    schmidt_protocol,
)
from entdetect.states import QuantumState, bell, partial_trace, product_state, random_pure, werner
from entdetect.tensor import bloch_vector


def schmidt_ket(theta, delta=0.0):
    v = np.zeros(4, dtype=complex)
    v[0] = np.cos(theta)
    v[3] = np.sin(theta) * np.exp(1j * delta)
    return QuantumState.from_vector(v)


def anticommutator(a, b):
    return a @ b + b @ a


class TestAngles:
    def test_z_aligned(self):
        a = angles_from_bloch(np.array([0, 0, 1.0]))
        assert (a.xi, a.phi) == (0.0, 0.0)
        a = angles_from_bloch(np.array([0, 0, -0.3]))
        assert a.xi == pytest.approx(np.pi / 2)

    def test_x_aligned(self):
        a = angles_from_bloch(np.array([1.0, 0, 0]))
        assert a.xi == pytest.approx(np.pi / 4)
        assert a.phi == pytest.approx(0.0)

    def test_basis_orthonormal(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            b = rng.standard_normal(3)
            angles = angles_from_bloch(b)
            u, v = angles.basis()
            assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-10)
            assert np.vdot(u, v) == pytest.approx(0.0, abs=1e-10)

    def test_experimental_filtered_vector(self):
        # the filtered Alice vector reported in the experiment: sigma_z'
        # expectation on the Bloch-reconstructed qubit equals |b|
        from entdetect.pauli import SIGMA

        b = np.array([0.338, -0.186, -0.136])
        frame = primed_frame(b)
        rho = (np.eye(2) + sum(b[i] * SIGMA[c] for i, c in enumerate("XYZ"))) / 2
        assert np.trace(rho @ frame.sz).real == pytest.approx(np.linalg.norm(b), abs=1e-12)

    def test_vanishing_raises(self):
        with pytest.raises(VanishingBlochError):
            angles_from_bloch(np.zeros(3))


class TestPrimedFrame:
    def test_degenerate_branch_returns_standard(self):
        from entdetect.pauli import SIGMA

        frame = primed_frame(np.array([0, 0, 1.0]))
        assert frame.degenerate
        assert np.allclose(frame.sz, SIGMA["Z"])

    def test_x_aligned_swaps_x_and_z(self):
        from entdetect.pauli import SIGMA

        frame = primed_frame(np.array([1.0, 0, 0]))
        assert np.allclose(frame.sz, SIGMA["X"], atol=1e-12)
        assert np.allclose(frame.sx, SIGMA["Z"], atol=1e-12)
        assert np.allclose(frame.sy, -SIGMA["Y"], atol=1e-12)

    def test_random_frames_anticommute_and_square_to_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            alpha = rng.standard_normal(3)
            frame = primed_frame(alpha)
            ops = frame.as_tuple()
            for op in ops:
                assert np.allclose(op @ op, np.eye(2), atol=1e-10)
                assert np.allclose(op, op.conj().T, atol=1e-10)
                assert abs(np.trace(op)) < 1e-10
            for i in range(3):
                for j in range(i + 1, 3):
                    assert np.allclose(
                        anticommutator(ops[i], ops[j]), np.zeros((2, 2)), atol=1e-10
                    )

    def test_z_prime_eigenvector_along_bloch(self):
        rng = np.random.default_rng(6)
        alpha = rng.standard_normal(3)
        alpha /= np.linalg.norm(alpha)
        frame = primed_frame(alpha)
        angles = angles_from_bloch(alpha)
        a, _ = angles.basis()
        assert np.allclose(frame.sz @ a, a, atol=1e-10)


class TestFilter:
    def test_operator_singular_values(self):
        f = filter_operator(0.3)
        assert sorted(np.linalg.svd(f, compute_uv=False)) == pytest.approx([0.3, 1.0])

    def test_success_probability_maximally_entangled(self):
        for eps in (0.0, 0.3, 0.7):
            _, prob = apply_filter(bell("psi-"), 0, eps)
            assert prob == pytest.approx((1 + eps**2) / 2, abs=1e-12)

    def test_bob_bloch_emerges(self):
        # partial-trace oracle: filtered singlet gives |b_B| = (1-e^2)/(1+e^2)
        for eps in (0.2, 0.5, 0.8):
            filtered, _ = apply_filter(bell("psi-"), 0, eps)
            b = bloch_vector(filtered, 1)
            assert np.linalg.norm(b) == pytest.approx(
                (1 - eps**2) / (1 + eps**2), abs=1e-12
            )

    def test_epsilon_zero_projects(self):
        filtered, prob = apply_filter(bell("psi-"), 0, 0.0)
        assert prob == pytest.approx(0.5)
        assert np.linalg.norm(bloch_vector(filtered, 1)) == pytest.approx(1.0, abs=1e-12)
        assert filtered.purity() == pytest.approx(1.0, abs=1e-12)

    def test_product_eigenstate_passes_through(self):
        state = product_state("00")
        filtered, prob = apply_filter(state, 0, 0.5)
        assert prob == pytest.approx(0.25)
        assert np.allclose(filtered.matrix, state.matrix, atol=1e-12)

    def test_annihilation(self):
        with pytest.raises(FilterAnnihilatedError):
            apply_filter(product_state("00"), 0, 0.0)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            apply_filter(bell(), 0, 1.0)


class TestProtocol:
    def test_two_steps_on_real_schmidt_state(self):
        t = schmidt_protocol(schmidt_ket(np.pi / 8))
        assert t.n_correlations() == 2
        assert dict(t.correlations)["z'z'"] == pytest.approx(1.0, abs=1e-9)
        assert abs(dict(t.correlations)["y'y'"]) == pytest.approx(np.sin(np.pi / 4), abs=1e-9)
        assert t.criterion == pytest.approx(1.5, abs=1e-9)
        assert t.entangled

    def test_third_measurement_when_phase_is_quarter_turn(self):
        t = schmidt_protocol(schmidt_ket(np.pi / 8, delta=np.pi / 2))
        assert t.n_correlations() == 3
        assert dict(t.correlations)["y'y'"] == pytest.approx(0.0, abs=1e-9)
        assert abs(dict(t.correlations)["x'y'"]) == pytest.approx(np.sin(np.pi / 4), abs=1e-9)
        assert t.criterion == pytest.approx(1 + np.sin(np.pi / 4) ** 2, abs=1e-9)
        assert t.entangled

    def test_singlet_takes_filter_branch(self):
        t = schmidt_protocol(bell("psi-"))
        kinds = [s["step"] for s in t.steps]
        assert "filter" in kinds
        assert t.n_correlations() == 2
        assert t.entangled
        assert t.criterion == pytest.approx(2.0, abs=1e-9)

    def test_product_state_not_detected(self):
        t = schmidt_protocol(product_state("01"))
        assert not t.entangled
        assert t.criterion == pytest.approx(1.0, abs=1e-9)

    def test_zz_prime_correlation_is_one_for_pure_states(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            state = random_pure(2, rng)
            if np.linalg.norm(bloch_vector(state, 0)) < 1e-6:
                continue
            t = schmidt_protocol(state)
            assert abs(dict(t.correlations)["z'z'"]) == pytest.approx(1.0, abs=1e-9)

    def test_primed_frame_correlation_symmetries(self):
        # T_{x'x'} = -T_{y'y'} and T_{x'y'} = T_{y'x'} for pure states
        rng = np.random.default_rng(10)
        for _ in range(20):
            state = random_pure(2, rng)
            b0, b1 = bloch_vector(state, 0), bloch_vector(state, 1)
            if min(np.linalg.norm(b0), np.linalg.norm(b1)) < 1e-6:
                continue
            fa, fb = primed_frame(b0), primed_frame(b1)
            txx = np.trace(state.matrix @ np.kron(fa.sx, fb.sx)).real
            tyy = np.trace(state.matrix @ np.kron(fa.sy, fb.sy)).real
            txy = np.trace(state.matrix @ np.kron(fa.sx, fb.sy)).real
            tyx = np.trace(state.matrix @ np.kron(fa.sy, fb.sx)).real
            assert txx == pytest.approx(-tyy, abs=1e-9)
            assert txy == pytest.approx(tyx, abs=1e-9)

    def test_filtering_invariance_under_matched_local_unitaries(self):
        # U x U' kappa = kappa: any maximally entangled state still succeeds
        from entdetect.states import apply_local_unitaries, random_local_unitary

        rng = np.random.default_rng(11)
        for _ in range(10):
            u = random_local_unitary(rng)
            state = apply_local_unitaries(bell("psi-"), [u, u.conj()])
            t = schmidt_protocol(state)
            assert t.entangled
            assert t.n_correlations() <= 3

    def test_werner_noise_propagates_vanishing(self):
        with pytest.raises(VanishingBlochError):
            schmidt_protocol(werner(0.0))

    def test_shots_mode_detects_strongly_entangled(self):
        rng = np.random.default_rng(12)
        t = schmidt_protocol(bell("phi+"), shots=4000, rng=rng)
        assert t.entangled

    def test_transcript_roundtrip(self):
        t = schmidt_protocol(schmidt_ket(0.5))
        back = SchmidtTranscript.from_json_lines(t.to_json_lines())
        assert back.correlations == t.correlations
        assert back.criterion == pytest.approx(t.criterion)
        assert back.entangled == t.entangled
