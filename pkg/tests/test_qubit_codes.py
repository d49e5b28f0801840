import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecw import core
from qecw import qubit_codes as qc
from qecw.core import I2, X, Z, apply_channel, dm, tensor


def random_amplitudes(rng):
    return core.normalize(rng.normal(size=2) + 1j * rng.normal(size=2))


def single_flip(j):
    return qc.embed(X, j, 3)


# ------------------------------------------------------------ repetition code


def test_encoder_matches_direct_superposition():
    a, b = 0.6, 0.8j
    expected = a * core.basis_state("000") + b * core.basis_state("111")
    assert np.allclose(qc.encode_repetition3(a, b), expected)
    with pytest.raises(ValueError):
        qc.encode_repetition3(1.0, 1.0)


def test_controlled_x_is_cnot():
    assert np.allclose(qc.controlled_x(2, {1: 1}, 2), core.CNOT)


def test_logical_operators():
    code = qc.repetition3_code()
    w0, w1 = code.codewords
    assert np.allclose(qc.XL @ w0, w1)
    assert np.allclose(qc.ZL @ w1, -w1)
    assert np.allclose(qc.XL @ qc.ZL, -qc.ZL @ qc.XL)
    assert np.allclose(qc.YL @ qc.YL, np.eye(8))
    for s in (qc.S1, qc.S2):
        assert np.allclose(core.commutator(s, qc.XL), 0)
        assert np.allclose(core.commutator(s, qc.ZL), 0)


def test_syndrome_table_matches_stabilizer_eigenvalues():
    psi = qc.encode_repetition3(0.6, 0.8)
    rng = np.random.default_rng(0)
    for j in range(3):
        err = single_flip(j) @ psi
        s1 = round(np.vdot(err, qc.S1 @ err).real)
        s2 = round(np.vdot(err, qc.S2 @ err).real)
        assert qc.SYNDROME_TABLE[(s1, s2)] == j + 1
        m1, m2, _ = qc.syndrome_repetition3(err, rng)
        assert (m1, m2) == (s1, s2)


def test_syndrome_order_does_not_matter():
    psi = single_flip(0) @ qc.encode_repetition3(0.6, 0.8)
    a = qc.syndrome_repetition3(psi, np.random.default_rng(0), ("S1", "S2"))
    b = qc.syndrome_repetition3(psi, np.random.default_rng(0), ("S2", "S1"))
    assert a[:2] == b[:2]
    assert np.allclose(a[2], b[2])


@pytest.mark.parametrize("mode", ["measured", "measurement_free"])
def test_single_flips_corrected(mode):
    rng = np.random.default_rng(1)
    for _ in range(5):
        psi = qc.encode_repetition3(*random_amplitudes(rng))
        for err in [np.eye(8)] + [single_flip(j) for j in range(3)]:
            out = qc.correct_repetition3(err @ psi, mode=mode)
            assert core.fidelity(out, psi) > 1 - 1e-10


def test_sampled_measured_correction_returns_ket():
    psi = qc.encode_repetition3(0.6, 0.8)
    out = qc.correct_repetition3(single_flip(2) @ psi, rng=np.random.default_rng(2))
    assert out.ndim == 1
    assert core.state_fidelity(out, psi) > 1 - 1e-10


def test_two_flips_give_logical_error():
    psi = qc.encode_repetition3(1.0, 0.0)
    out = qc.correct_repetition3(single_flip(0) @ single_flip(1) @ psi)
    assert core.fidelity(out, core.basis_state("111")) == pytest.approx(1.0)


def test_modes_agree_as_channels():
    measured = qc.measured_recovery_channel()
    free = qc.measurement_free_channel()
    worst = 0.0
    for i in range(8):
        for j in range(8):
            e = np.zeros((8, 8), dtype=complex)
            e[i, j] = 1
            a = sum(k @ e @ k.conj().T for k in measured.ops)
            b = sum(k @ e @ k.conj().T for k in free.ops)
            worst = max(worst, np.max(np.abs(a - b)))
    assert worst < 1e-9


def test_measurement_free_network_is_permutation():
    u = qc.measurement_free_unitary()
    assert core.is_unitary(u)
    assert set(np.unique(u.real)) <= {0.0, 1.0}


def test_invalid_mode_and_dims():
    with pytest.raises(ValueError):
        qc.correct_repetition3(np.zeros(8), mode="oracle")
    with pytest.raises(core.DimensionError):
        qc.correct_repetition3(np.zeros(4))


def test_coherent_error_statistics():
    theta = 0.3
    rng = np.random.default_rng(3)
    n = 20000
    clean = 0
    for _ in range(n):
        (s1, s2), fid = qc.coherent_error_trial(theta, rng)
        assert fid > 1 - 1e-10
        assert (s1, s2) in ((1, 1), (-1, -1))
        clean += (s1, s2) == (1, 1)
    p = np.cos(theta) ** 2
    assert abs(clean / n - p) < 3 * np.sqrt(p * (1 - p) / n)


def test_bath_branches_factorize():
    res = qc.bath_error_trial(0.3 + 0.2j, np.random.default_rng(0))
    assert set(res.probabilities) == {(1, 1), (-1, -1)}
    assert res.probabilities[(-1, -1)] == pytest.approx(0.13)
    for key, r in res.schmidt_residual.items():
        assert r < 1e-10
        assert res.schmidt_rank[key] == 1
    with pytest.raises(ValueError):
        qc.bath_error_trial(2.0)


# ------------------------------------------------------------------ KL engine


def test_kl_exact_for_bitflips():
    p = 0.05
    rep = qc.kl_check(qc.repetition3_code(), qc.repetition_bitflip_errors(p))
    assert rep.verdict == "exact"
    assert np.allclose(rep.alpha_down, np.diag([1 - 3 * p, p, p, p]), atol=1e-12)
    assert np.allclose(rep.alpha_up, rep.alpha_down, atol=1e-12)
    assert rep.max_cross_block < 1e-12
    assert sorted(rep.beta) == pytest.approx(sorted([1 - 3 * p, p, p, p]))
    d = rep.to_dict()
    assert d["verdict"] == "exact" and len(d["F_labels"]) == 4


def test_kl_fails_for_amplitude_damping_on_repetition():
    rep = qc.kl_check(qc.repetition3_code(), lambda g: qc.amplitude_damping_register(g, 3), order_param=0.05)
    assert rep.verdict == "fail"
    assert rep.scaling_ratio == pytest.approx(2.0, abs=0.2)


def test_kl_needs_param_for_callable():
    with pytest.raises(ValueError):
        qc.kl_check(qc.repetition3_code(), qc.repetition_bitflip_errors)


def test_kl_dimension_mismatch():
    with pytest.raises(core.DimensionError):
        qc.kl_check(qc.repetition3_code(), core.bit_flip_channel(0.1))


def test_leung_code_structure():
    code = qc.leung4_code()
    assert code.host_dim == 16
    rep = qc.kl_check(code, qc.leung4_errors, order_param=0.02)
    assert rep.verdict == "approximate" and rep.order == 2
    assert rep.scaling_ratio == pytest.approx(4.0, abs=1.0)


def test_leung_recovery_quadratic():
    code = qc.leung4_code()
    noise = qc.amplitude_damping_register(0.01, 4)
    rec = qc.leung4_first_order_recovery(0.01)
    assert qc.check_projector_family(rec.error_projectors)
    total = sum(k.conj().T @ k for k in rec.channel.ops)
    assert np.allclose(total, np.eye(16), atol=1e-10)
    inf1 = qc.worst_cardinal_infidelity(rec.channel.compose(noise), code)
    rec2 = qc.leung4_first_order_recovery(0.005)
    inf2 = qc.worst_cardinal_infidelity(rec2.channel.compose(qc.amplitude_damping_register(0.005, 4)), code)
    assert inf1 < 5 * 0.01**2
    assert inf1 / inf2 == pytest.approx(4.0, rel=0.25)
    # bare physical qubit loses p/2 on average over cardinal states, far more
    assert inf1 < 0.01 / 4
    with pytest.raises(ValueError):
        qc.leung4_first_order_recovery(0.6)


def test_leung_exact_limit():
    rec = qc.leung4_first_order_recovery(0.0)
    assert rec.report.verdict == "exact"


def test_recovery_refuses_failed_code():
    with pytest.raises(core.ChannelError):
        qc.build_recovery(qc.repetition3_code(), lambda g: qc.amplitude_damping_register(g, 3), 0.05)


def test_recovery_refuses_approximate_by_default():
    with pytest.raises(core.ChannelError):
        qc.build_recovery(qc.leung4_code(), qc.leung4_errors, 0.01)


@settings(max_examples=15, deadline=None)
@given(p=st.floats(0.0, 0.3), seed=st.integers(0, 2**32 - 1))
def test_bitflip_recovery_restores_any_codeword(p, seed):
    code = qc.repetition3_code()
    noise = qc.repetition_bitflip_errors(p)
    rec = qc.build_recovery(code, noise)
    psi = qc.random_codeword(code, np.random.default_rng(seed))
    out = apply_channel(rec.channel, apply_channel(noise, dm(psi)))
    assert core.fidelity(out, psi) > 1 - 1e-10


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_kl_verdict_invariant_under_kraus_mixing(seed):
    rng = np.random.default_rng(seed)
    noise = qc.repetition_bitflip_errors(0.04)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u, _ = np.linalg.qr(m)
    a = qc.kl_check(qc.repetition3_code(), noise)
    b = qc.kl_check(qc.repetition3_code(), noise.mixed(u))
    assert b.verdict == "exact"
    assert np.allclose(np.sort(a.beta), np.sort(b.beta), atol=1e-12)


def test_code_space_validation():
    with pytest.raises(ValueError):
        qc.CodeSpace((core.ket(0, 2), core.ket(0, 2)))
    with pytest.raises(ValueError):
        qc.CodeSpace((core.ket(0, 2), core.ket(1, 2)), (Z,))
    with pytest.raises(core.DimensionError):
        qc.CodeSpace((core.ket(0, 2), core.ket(1, 3)))


def test_process_fidelity_of_identity():
    code = qc.repetition3_code()
    assert qc.code_process_fidelity(core.identity_channel(8), code) == pytest.approx(1.0)
    flip = core.unitary_channel(tensor(X, I2, I2))
    assert qc.code_process_fidelity(flip, code) == pytest.approx(0.0)
