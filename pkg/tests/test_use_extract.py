import math

import numpy as np
import pytest
from conftest import pure_channels, pure_states, x_states
from hypothesis import given, settings

from xtele import qmath
from xtele.channels import make_pure_channel, make_x_state
from xtele.errors import ExtractionImpossibleError, OrderingError
from xtele.fidelity import fidelity_pure
from xtele.qmath import PureState2
from xtele.teleport import teleport_pure_closed, teleport_x_closed
from xtele.use_extract import (
    build_use_unitaries,
    extraction_probability,
    quasi_extraction_probability,
    use_bruteforce,
    use_pure,
    use_x_closed,
)

KET0 = PureState2(1.0, 0.0)


class TestUnitaries:
    def test_ratio_one_is_identity(self):
        u_bar, u_ddot = build_use_unitaries(1.0)
        np.testing.assert_array_equal(u_bar.matrix, np.eye(4))
        np.testing.assert_array_equal(u_ddot.matrix, np.eye(4))

    def test_ratio_half(self):
        u_bar, _ = build_use_unitaries(0.5)
        u_b = u_bar.matrix[2:, 2:]
        np.testing.assert_allclose(u_b[:, 0], [0.5, -math.sqrt(0.75)])
        np.testing.assert_allclose(u_b[:, 1], [math.sqrt(0.75), 0.5])
        np.testing.assert_array_equal(u_bar.matrix[:2, :2], np.eye(2))

    @pytest.mark.parametrize("ratio", [1e-6, 0.1, 0.5, 0.77, 0.999, 1.0])
    def test_unitary_and_conjugation(self, ratio):
        u_bar, u_ddot = build_use_unitaries(ratio)
        assert qmath.is_unitary(u_bar.matrix, 1e-12)
        assert qmath.is_unitary(u_ddot.matrix, 1e-12)
        sx = qmath.tensor(qmath.SX, qmath.I2)
        np.testing.assert_allclose(u_ddot.matrix, sx @ u_bar.matrix @ sx)

    def test_errors(self):
        with pytest.raises(ExtractionImpossibleError, match="zero ratio"):
            build_use_unitaries(0.0)
        with pytest.raises(OrderingError, match="non-canonical"):
            build_use_unitaries(1.2)


class TestUsePure:
    def test_bell_always_succeeds(self):
        ch = make_pure_channel(1 / math.sqrt(2))
        res = use_pure(PureState2.from_angles(0.3, 1.0), ch, "bar")
        assert res.success_prob == pytest.approx(1.0)
        assert res.failure_prob == 0.0

    def test_extraction_probability(self):
        ch = make_pure_channel(math.sqrt(0.2))
        assert extraction_probability(ch) == pytest.approx(0.4)
        c = 2 * ch.alpha * ch.beta
        assert extraction_probability(ch) == pytest.approx(1 - math.sqrt(1 - c * c))

    def test_failure_states(self):
        ch = make_pure_channel(0.3)
        psi = PureState2.from_angles(0.5, 0.2)
        np.testing.assert_array_equal(use_pure(psi, ch, "bar").failure_state, qmath.P1)
        np.testing.assert_array_equal(use_pure(psi, ch, "ddot").failure_state, qmath.P0)

    def test_product_channel_refused(self):
        with pytest.raises(ExtractionImpossibleError):
            use_pure(KET0, make_pure_channel(0.0), "bar")

    @settings(max_examples=200, deadline=None)
    @given(psi=pure_states(), ch=pure_channels(min_alpha=1e-3))
    def test_recovers_input_and_psi_independent(self, psi, ch):
        pair = teleport_pure_closed(psi, ch)
        bar, ddot = use_pure(psi, ch, "bar"), use_pure(psi, ch, "ddot")
        for res in (bar, ddot):
            assert abs(res.success_prob + res.failure_prob - 1) < 1e-12
            assert abs(fidelity_pure(psi, res.success_state) - 1) < 1e-12
        total = pair.p_bar * bar.success_prob + pair.p_ddot * ddot.success_prob
        assert abs(total - 2 * ch.alpha**2) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(psi=pure_states(), ch=pure_channels(min_alpha=1e-3))
    def test_bruteforce_rank_one(self, psi, ch):
        pair = teleport_pure_closed(psi, ch)
        u_bar, u_ddot = build_use_unitaries(ch.ratio)
        for rho, u, branch in ((pair.rho_bar, u_bar, "bar"), (pair.rho_ddot, u_ddot, "ddot")):
            if qmath.is_null(rho):
                continue
            b = use_bruteforce(rho, u, branch)
            c = use_pure(psi, ch, branch)
            np.testing.assert_allclose(b.success_state, psi.dm(), atol=1e-10)
            assert abs(b.success_prob - c.success_prob) < 1e-12


class TestUseX:
    def test_reference_ket0_bar(self, ref_x):
        res = use_x_closed(KET0, ref_x, "bar")
        assert res.success_prob == pytest.approx((0.3 + 0.6 * 0.15) / 0.45, abs=1e-14)
        np.testing.assert_array_equal(res.failure_state, qmath.P1)

    def test_quasi_extraction_reference(self, ref_x):
        assert quasi_extraction_probability(ref_x) == pytest.approx(0.74, abs=1e-15)

    def test_pure_embedding_reduces(self):
        ch = make_pure_channel(0.45)
        psi = PureState2.from_angles(0.2, 5.0, 1.0)
        for branch in ("bar", "ddot"):
            a = use_pure(psi, ch, branch)
            b = use_x_closed(psi, ch.as_x_state(), branch)
            assert a.success_prob == pytest.approx(b.success_prob, abs=1e-14)
            np.testing.assert_allclose(b.success_state, psi.dm(), atol=1e-14)

    def test_refuses_r11_zero(self):
        x = make_x_state(0.0, 0.3, 0.2, 0.5, 0.0, 0.1)
        with pytest.raises(ExtractionImpossibleError):
            use_x_closed(KET0, x, "bar")
        with pytest.raises(ExtractionImpossibleError):
            quasi_extraction_probability(x)

    def test_identity_unitary_passthrough(self, ref_x):
        rho = teleport_x_closed(PureState2.from_angles(0.3, 1.0), ref_x).rho_bar
        u = build_use_unitaries(1.0)[0]
        res = use_bruteforce(rho, u)
        assert res.success_prob == pytest.approx(1.0)
        np.testing.assert_allclose(res.success_state, rho, atol=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(psi=pure_states(), x=x_states())
    def test_closed_vs_bruteforce(self, psi, x):
        pair = teleport_x_closed(psi, x)
        u_bar, u_ddot = build_use_unitaries(x.ratio)
        for rho, u, branch in ((pair.rho_bar, u_bar, "bar"), (pair.rho_ddot, u_ddot, "ddot")):
            c = use_x_closed(psi, x, branch)
            b = use_bruteforce(rho, u, branch)
            assert abs(c.success_prob + c.failure_prob - 1) < 1e-12
            assert abs(c.success_prob - b.success_prob) < 1e-12
            np.testing.assert_allclose(c.success_state, b.success_state, atol=1e-10)
            if c.failure_prob > 1e-12:
                np.testing.assert_allclose(c.failure_state, b.failure_state, atol=1e-10)
            assert qmath.is_density_matrix(c.success_state)

    @settings(max_examples=200, deadline=None)
    @given(psi=pure_states(), x=x_states())
    def test_quasi_extraction_psi_independent(self, psi, x):
        pair = teleport_x_closed(psi, x)
        u_bar, u_ddot = build_use_unitaries(x.ratio)
        total = pair.p_bar * use_bruteforce(pair.rho_bar, u_bar).success_prob
        total += pair.p_ddot * use_bruteforce(pair.rho_ddot, u_ddot).success_prob
        assert abs(total - quasi_extraction_probability(x)) < 1e-12
