import numpy as np
import pytest

from intertwine import floquet as fl
from intertwine import liouville as lv
from intertwine import models as md
from intertwine.linalg import hs_norm, matexp
from intertwine.models import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z


class TestDimerParams:
    def test_delta_real_branch(self):
        p = md.DimerParams(J=1.0, gamma=0.5)
        assert p.delta == pytest.approx(np.sqrt(0.75))

    def test_delta_imaginary_branch(self):
        p = md.DimerParams(J=1.0, gamma=1.5)
        assert p.delta == pytest.approx(1j * np.sqrt(1.25))

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            md.DimerParams(J=-1.0)
        with pytest.raises(ValueError):
            md.DimerParams(gamma=-0.1)
        with pytest.raises(ValueError):
            md.DimerParams(T=0.0)


class TestBuilders:
    def test_quantum_static_eigenvalues(self):
        sched = md.quantum_dimer(md.DimerParams(J=1.0, gamma=0.5))
        h = sched.events[0].generator
        w = np.sort(np.linalg.eigvals(h).real)
        assert np.allclose(w, [-np.sqrt(0.75), np.sqrt(0.75)], atol=1e-12)

    def test_quantum_hermitian_limit(self):
        p = md.DimerParams(J=1.0, gamma=0.0, T=1.0, waveform=md.Waveform.SQUARE_WAVE)
        gf = fl.propagator(md.quantum_dimer(p)).gf
        assert hs_norm(gf - matexp(-1j * SIGMA_X)) < 1e-12

    def test_quantum_rejects_kicks(self):
        with pytest.raises(ValueError):
            md.quantum_dimer(md.DimerParams(waveform=md.Waveform.DELTA_KICKS))

    def test_classical_rejects_square(self):
        with pytest.raises(ValueError):
            md.classical_dimer(md.DimerParams(waveform=md.Waveform.SQUARE_WAVE))

    def test_classical_hermitian_limit(self):
        p = md.DimerParams(J=1.0, gamma=0.0, T=1.0, waveform=md.Waveform.DELTA_KICKS)
        gf = fl.propagator(md.classical_dimer(p)).gf
        assert hs_norm(gf - matexp(-1j * SIGMA_Y)) < 1e-12

    def test_classical_propagator_is_real(self):
        p = md.DimerParams(J=1.0, gamma=0.5, T=1.0, waveform=md.Waveform.DELTA_KICKS)
        gf = fl.propagator(md.classical_dimer(p)).gf
        assert np.max(np.abs(gf.imag)) < 1e-12


class TestAnalyticEtaPm:
    def test_quantum_values(self):
        p = md.DimerParams(J=1.0, gamma=0.5)
        ep, em, rp, rm = md.analytic_eta_pm(md.Model.QUANTUM, p)
        d = np.sqrt(0.75)
        assert np.allclose(
            ep, [[-0.5 + d * 1j, d - 0.5j], [-d + 0.5j, 1.0]], atol=1e-12
        )
        assert rp == pytest.approx(2j * d)
        assert rm == pytest.approx(-2j * d)

    def test_classical_values(self):
        p = md.DimerParams(J=1.0, gamma=0.5)
        ep, _, _, _ = md.analytic_eta_pm(md.Model.CLASSICAL, p)
        d = np.sqrt(0.75)
        a = 0.5 + 1j * d
        assert np.allclose(ep, [[a * a, -a], [-a, 1.0]], atol=1e-12)

    def test_broken_phase_hermitian(self):
        p = md.DimerParams(J=1.0, gamma=1.5)
        for model in md.Model:
            ep, em, _, _ = md.analytic_eta_pm(model, p)
            assert hs_norm(ep - ep.conj().T) < 1e-12
            assert hs_norm(em - em.conj().T) < 1e-12

    def test_satisfy_rate_equation(self):
        p = md.DimerParams(J=1.0, gamma=0.5)
        h = md.quantum_hamiltonian(1.0, 0.5)
        ep, em, rp, rm = md.analytic_eta_pm(md.Model.QUANTUM, p)
        for eta, rate in ((ep, rp), (em, rm)):
            assert hs_norm(lv.apply_liouvillian(h, eta) - rate * eta) < 1e-12

    def test_rejects_ep(self):
        with pytest.raises(ValueError):
            md.analytic_eta_pm(md.Model.QUANTUM, md.DimerParams(J=1.0, gamma=1.0))


class TestAnalyticCoeffs:
    def test_quantum_reference_values(self):
        p = md.DimerParams(J=1.0, gamma=0.5, T=1.0, waveform=md.Waveform.SQUARE_WAVE)
        c = md.analytic_floquet_coeffs(md.Model.QUANTUM, p)
        assert c.g0 == pytest.approx(0.5306, abs=2e-4)
        assert c.gx == pytest.approx(-0.8796, abs=2e-4)
        assert c.gy == pytest.approx(-0.2347, abs=2e-4)

    def test_classical_reference_values(self):
        p = md.DimerParams(J=1.0, gamma=0.5, T=1.0, waveform=md.Waveform.DELTA_KICKS)
        c = md.analytic_floquet_coeffs(md.Model.CLASSICAL, p)
        assert c.g0 == pytest.approx(0.4156, abs=2e-4)
        assert c.gx == pytest.approx(-0.4945, abs=2e-4)
        assert c.gy == pytest.approx(-1.0700, abs=2e-4)
        assert c.gz == pytest.approx(-0.2701, abs=2e-4)

    def test_quantum_kappa_unit_modulus(self):
        p = md.DimerParams(J=1.0, gamma=0.5, T=1.0, waveform=md.Waveform.SQUARE_WAVE)
        k1, k2 = md.analytic_floquet_coeffs(md.Model.QUANTUM, p).kappa()
        assert k1 == pytest.approx(0.5306 + 0.8477j, abs=2e-4)
        assert abs(k1) == pytest.approx(1.0, abs=1e-12)
        assert abs(k2) == pytest.approx(1.0, abs=1e-12)

    def test_matches_composed_propagator_across_grid(self):
        # includes the broken region and the EP line gamma = J
        for gj in list(np.linspace(0.0, 2.0, 11)) + [1.0]:
            for jt in (0.3, 1.0, 2.2, 3.9):
                p = md.DimerParams(J=1.0, gamma=gj, T=jt, waveform=md.Waveform.SQUARE_WAVE)
                gf = fl.propagator(md.quantum_dimer(p)).gf
                err = hs_norm(gf - md.analytic_floquet_coeffs(md.Model.QUANTUM, p).matrix())
                assert err < 1e-10 * max(1.0, hs_norm(gf))
                p = md.DimerParams(J=1.0, gamma=gj, T=jt, waveform=md.Waveform.DELTA_KICKS)
                gf = fl.propagator(md.classical_dimer(p)).gf
                err = hs_norm(gf - md.analytic_floquet_coeffs(md.Model.CLASSICAL, p).matrix())
                assert err < 1e-10 * max(1.0, hs_norm(gf))

    def test_ep_line_series_values(self):
        # l'Hopital-safe branch at delta = 0
        p = md.DimerParams(J=1.0, gamma=1.0, T=1.0, waveform=md.Waveform.SQUARE_WAVE)
        c = md.analytic_floquet_coeffs(md.Model.QUANTUM, p)
        assert c.g0 == pytest.approx(1.0 - 0.5, abs=1e-12)  # 1 - (gamma T)^2/2
        assert c.gx == pytest.approx(-1.0, abs=1e-12)
        assert c.gy == pytest.approx(-0.5, abs=1e-12)


class TestEPContour:
    def test_classical_matches_tanh_formula(self):
        jt = 1.0
        [(gj, _)] = md.ep_contour(md.Model.CLASSICAL, [jt])
        assert gj * jt == pytest.approx(np.arctanh(np.cos(jt / 2)), abs=1e-8)

    def test_classical_analytic_helper(self):
        assert md.classical_ep_gamma(1.0) == pytest.approx(np.arctanh(np.cos(0.5)), abs=1e-12)

    def test_static_quantum_threshold(self):
        # the static analogue: the PT transition sits at gamma = J
        assert (
            lv.classify_pt_phase(md.quantum_hamiltonian(1.0, 0.999))
            is lv.PTPhase.SYMMETRIC
        )
        assert (
            lv.classify_pt_phase(md.quantum_hamiltonian(1.0, 1.001))
            is lv.PTPhase.BROKEN
        )

    def test_classifier_flips_across_contour(self):
        jt = 1.0
        [(gj, _)] = md.ep_contour(md.Model.CLASSICAL, [jt])
        for eps, want in ((-1e-3, lv.PTPhase.SYMMETRIC), (1e-3, lv.PTPhase.BROKEN)):
            p = md.DimerParams(J=1.0, gamma=gj + eps, T=jt, waveform=md.Waveform.DELTA_KICKS)
            assert fl.propagator(md.classical_dimer(p)).phase is want

    def test_quantum_contour_matches_gx_gy_crossing(self):
        # the quantum model has no EP at small JT; JT = 2 sits inside a tongue
        jt = 2.0
        [(gj, _)] = md.ep_contour(md.Model.QUANTUM, [jt])
        p = md.DimerParams(J=1.0, gamma=gj, T=jt, waveform=md.Waveform.SQUARE_WAVE)
        c = md.analytic_floquet_coeffs(md.Model.QUANTUM, p)
        assert abs(abs(c.gx) - abs(c.gy)) < 1e-8

    def test_numerical_and_analytic_discriminants_agree(self):
        jt = 1.3
        got_num = md.ep_contour(md.Model.CLASSICAL, [jt], use_numerical=True)
        got_ana = md.ep_contour(md.Model.CLASSICAL, [jt])
        assert got_num[0][0] == pytest.approx(got_ana[0][0], abs=1e-8)

    def test_no_sign_change_raises(self):
        with pytest.raises(ValueError):
            md.ep_contour(md.Model.CLASSICAL, [1.0], gamma_bracket=(0.01, 0.02))


class TestBasisRotation:
    def test_models_are_rotations_of_each_other(self):
        for gamma in (0.0, 0.5, 1.5):
            assert md.basis_rotation_check(md.DimerParams(J=1.0, gamma=gamma)) < 1e-14

    def test_rotated_intertwiner_transfers(self):
        r = matexp(-1j * np.pi * SIGMA_Z / 4)
        rinv = matexp(+1j * np.pi * SIGMA_Z / 4)
        h2 = md.classical_hamiltonian(1.0, 0.5)
        # sigma_x intertwines H1; the rotation carries it to an intertwiner of H2
        eta = rinv.conj().T @ SIGMA_X @ rinv
        assert lv.verify_intertwining(eta, h2) < 1e-12

    def test_identity_rotation_is_exact(self):
        h1 = md.quantum_hamiltonian(1.0, 0.5)
        assert hs_norm(ID2 @ h1 @ ID2 - h1) == 0.0
