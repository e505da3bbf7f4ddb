import numpy as np
import pytest

from vqalab.circuits import (
    CNOT,
    SubcircuitTemplate,
    apply,
    block_unitary,
    brickwork_pairs,
    build_ansatz,
    dense_unitary,
    random_hea_state,
    random_params,
    single_qubit_gate,
    stage_count,
    zero_params,
)
from vqalab.linalg import Statevector
from vqalab.observables import Observable, expectation

rng = np.random.default_rng(41)


def test_single_qubit_gate_identity_at_zero():
    assert np.max(np.abs(single_qubit_gate(0, 0, 0) - np.eye(2))) < 1e-15


def test_euler_convention_y_angle_is_middle_parameter():
    # (alpha, beta, gamma) = (0, pi, 0) maps |0> to |1> up to phase
    out = single_qubit_gate(0, np.pi, 0) @ np.array([1, 0])
    assert abs(abs(out[0]) - abs(np.cos(np.pi / 2))) < 1e-12
    assert abs(abs(out[1]) - abs(np.sin(np.pi / 2))) < 1e-12


def test_block_unitary_zero_params_is_cnot():
    assert np.max(np.abs(block_unitary(np.zeros(6)) - CNOT)) < 1e-15


def test_brickwork_width2_stacks_blocks():
    assert brickwork_pairs(2, 3) == [(0, 1), (0, 1), (0, 1)]


def test_brickwork_alternation():
    assert brickwork_pairs(4, 2) == [(0, 1), (2, 3), (1, 2)]


def test_template_param_count():
    assert SubcircuitTemplate(2, 4).param_count == 24
    assert SubcircuitTemplate(3, 2).param_count == 6 * (1 + 1)


def test_mps_layout_windows():
    a = build_ansatz("mps", 5, k=3, subcircuit_depth=1)
    assert a.subcircuit_count == 3
    # subcircuit p occupies window start n-k-p+1 (0-based); figure-style cascade
    starts = sorted({b.q0 for b in a.blocks})
    assert starts == [0, 1, 2]
    # application order: topmost window (subcircuit T) first
    assert a.blocks[0].q0 == 0
    assert a.blocks[-1].q0 == 2


def test_mps_full_width_boundary():
    a = build_ansatz("mps", 3, k=3, subcircuit_depth=2)
    assert a.subcircuit_count == 1


def test_mps_invalid_geometry():
    with pytest.raises(ValueError):
        build_ansatz("mps", 3, k=5)
    with pytest.raises(ValueError):
        build_ansatz("qcnn", 6)


def test_qcnn_stage_count():
    a = build_ansatz("qcnn", 8)
    assert stage_count(a) == 3
    # survivors drift to the last qubit
    final_block = a.blocks[-1]
    assert final_block.q1 == 7


def test_param_layout_subcircuit_major():
    a = build_ansatz("mps", 5, k=2, subcircuit_depth=2)
    m = SubcircuitTemplate(2, 2).param_count
    assert a.param_count == m * 4
    assert a.flat_index(1, 0) == 0
    assert a.flat_index(3, 2) == 2 * m + 2
    with pytest.raises(IndexError):
        a.flat_index(2, m)


def test_zero_theta_fixes_all_zeros_state():
    a = build_ansatz("mps", 3, k=2, subcircuit_depth=1)
    psi = apply(a, zero_params(a), Statevector.zero(3))
    assert abs(psi.amps[0] - 1.0) < 1e-12


def test_apply_matches_dense_oracle():
    for kind, kwargs in [
        ("mps", {"k": 2, "subcircuit_depth": 2}),
        ("mps", {"k": 3, "subcircuit_depth": 3}),
        ("hea", {"depth": 3}),
        ("qcnn", {"subcircuit_depth": 1}),
    ]:
        n = 8
        a = build_ansatz(kind, n, **kwargs)
        theta = random_params(a, rng)
        sigma = Statevector.zero(n)
        via_apply = apply(a, theta, sigma).amps
        via_dense = dense_unitary(a, theta) @ sigma.amps
        assert np.max(np.abs(via_apply - via_dense)) < 1e-10, kind


def test_apply_preserves_norm():
    a = build_ansatz("mps", 6, k=2)
    theta = random_params(a, rng)
    psi = apply(a, theta, Statevector.zero(6))
    assert abs(np.linalg.norm(psi.amps) - 1.0) < 1e-10


def test_dense_unitary_is_unitary():
    a = build_ansatz("qcnn", 8, subcircuit_depth=2)
    u = dense_unitary(a, random_params(a, rng))
    assert np.max(np.abs(u.conj().T @ u - np.eye(2**8))) < 1e-10


def test_dense_unitary_composition():
    # two stacked depth-1 blocks on one pair == one depth-2 template
    t1 = SubcircuitTemplate(2, 1)
    t2 = SubcircuitTemplate(2, 2)
    theta = rng.uniform(0, 2 * np.pi, t2.param_count)
    u_two = t1.dense_unitary(theta[6:]) @ t1.dense_unitary(theta[:6])
    assert np.max(np.abs(u_two - t2.dense_unitary(theta))) < 1e-12


def test_application_order_subcircuit_T_first():
    # operator product E_1 ... E_T applied to a state hits E_T (top window) first
    n, k = 3, 2
    a = build_ansatz("mps", n, k=k, subcircuit_depth=1)
    theta = random_params(a, rng)
    m = SubcircuitTemplate(k, 1).param_count
    t1 = SubcircuitTemplate(k, 1)
    u1 = np.kron(np.eye(2), t1.dense_unitary(theta[:m]))  # subcircuit 1, bottom
    u2 = np.kron(t1.dense_unitary(theta[m:]), np.eye(2))  # subcircuit 2, top
    assert np.max(np.abs(dense_unitary(a, theta) - u1 @ u2)) < 1e-12


def test_causal_cone_cancellation():
    # subcircuits below the observable's cone do not move the expectation
    n, k = 6, 2
    a = build_ansatz("mps", n, k=k, subcircuit_depth=2)
    site_left = 1  # 0-based qubit 2; subcircuits p <= n-site-k cancel
    obs = Observable("proj0", n, site=site_left)
    sigma = Statevector.zero(n)
    theta = random_params(a, rng)
    cancels = n - (site_left + 1) - k + 1  # 1-based p = 1..cancels
    zeroed = theta.copy()
    for p in range(1, cancels + 1):
        off, length = a.subcircuit_slices[p - 1]
        zeroed[off : off + length] = 0.0
    assert abs(expectation(sigma, obs, a, theta) - expectation(sigma, obs, a, zeroed)) < 1e-12


def test_unused_axis_stability_at_zero():
    # z-rotations on |0..0> only add phase: global0 expectation is unchanged
    a = build_ansatz("mps", 4, k=2, subcircuit_depth=1)
    theta = zero_params(a)
    obs = Observable("global0", 4)
    base = expectation(Statevector.zero(4), obs, a, theta)
    theta[0] = 1.23  # alpha of the first gate: pure phase on the skeleton
    assert abs(expectation(Statevector.zero(4), obs, a, theta) - base) < 1e-12


def test_random_hea_state_seeded():
    s1 = random_hea_state(5, 2, np.random.default_rng(3))
    s2 = random_hea_state(5, 2, np.random.default_rng(3))
    assert np.array_equal(s1.amps, s2.amps)
    assert abs(np.linalg.norm(s1.amps) - 1) < 1e-10
