import math

import numpy as np
import pytest

from bellcert.compile import (CertificateError, SOSCertificate, build_bell,
                              build_tilted, check_cancellation,
                              chsh_certificate, chsh_polynomial,
                              default_certificate, emit, parse, substitute,
                              verify_sos, xz_word)
from bellcert.poly import A0, A1, BellPolynomial, MeasurementAssignment, Monomial
from bellcert.verify import materialize, random_realization

SQRT2 = math.sqrt(2)


def asg_for(n, pairs, mu=math.pi / 4):
    return MeasurementAssignment.build(n, pairs, mu)


class TestSubstitute:
    def test_direct_site(self):
        poly = substitute(xz_word([(2, "Z")]), asg_for(2, set()))
        assert poly.coeff(Monomial.from_dict({2: (A1,)})) == pytest.approx(1.0)
        assert len(poly) == 1

    def test_pair_site_x(self):
        poly = substitute(xz_word([(1, "X")]), asg_for(1, {1}))
        c = 1 / SQRT2
        assert poly.coeff(Monomial.from_dict({1: (A0,)})) == pytest.approx(c)
        assert poly.coeff(Monomial.from_dict({1: (A1,)})) == pytest.approx(c)

    def test_pair_site_xz_product(self):
        # (A0+A1)(A0-A1)/2 reduces to (A1 A0 - A0 A1)/2
        poly = substitute(xz_word([(1, "X"), (1, "Z")]), asg_for(1, {1}))
        assert poly.coeff(Monomial.from_dict({1: (A1, A0)})) == pytest.approx(0.5)
        assert poly.coeff(Monomial.from_dict({1: (A0, A1)})) == pytest.approx(-0.5)
        assert len(poly) == 2

    def test_pair_site_xz_materializes_to_xz(self):
        # cross-check the sign convention against the canonical matrices
        from bellcert.verify import canonical_realization, materialize
        poly = substitute(xz_word([(1, "X"), (1, "Z")]), asg_for(1, {1}))
        h = materialize(poly, canonical_realization(asg_for(1, {1})))
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.diag([1.0, -1.0]).astype(complex)
        assert np.allclose(h, x @ z, atol=1e-12)

    def test_multiplicative(self, rng, five_qubit):
        asg = asg_for(5, {1})
        w1 = xz_word([(1, "X"), (2, "Z")])
        w2 = xz_word([(1, "Z"), (3, "X")])
        combined = substitute(w1 + w2, asg)
        assert combined.allclose(substitute(w1, asg) * substitute(w2, asg), 1e-12)

    def test_out_of_range_site(self):
        with pytest.raises(ValueError):
            substitute(xz_word([(3, "X")]), asg_for(2, set()))


class TestBuildTilted:
    def test_theta_zero_is_logical_z(self, five_qubit):
        asg = asg_for(5, {1})
        from bellcert.compile import xz_word_from_pauli
        tilted = build_tilted(0.0, five_qubit, asg)
        zbar = substitute(xz_word_from_pauli(five_qubit.logical_z), asg)
        assert tilted.allclose(zbar, 1e-12)

    def test_theta_quarter_pi_is_logical_x(self, five_qubit):
        asg = asg_for(5, {1})
        from bellcert.compile import xz_word_from_pauli
        tilted = build_tilted(math.pi / 4, five_qubit, asg)
        xbar = substitute(xz_word_from_pauli(five_qubit.logical_x), asg)
        assert tilted.allclose(xbar, 1e-12)

    def test_term_count_at_intermediate_angle(self, five_qubit):
        tilted = build_tilted(math.pi / 8, five_qubit, asg_for(5, {1}))
        assert len(tilted) == 4  # each logical splits over the pair site

    def test_angle_range_enforced(self, five_qubit):
        with pytest.raises(CertificateError):
            build_tilted(0.9 * math.pi, five_qubit, asg_for(5, {1}))


GOLDEN_I5 = {
    Monomial.from_dict({1: (A0,), 2: (A1,), 3: (A1,), 4: (A0,)}): 2.0,
    Monomial.from_dict({1: (A1,), 2: (A1,), 3: (A1,), 4: (A0,)}): 2.0,
    Monomial.from_dict({2: (A0,), 3: (A1,), 4: (A1,), 5: (A0,)}): 2.0,
    Monomial.from_dict({1: (A0,), 3: (A0,), 4: (A1,), 5: (A1,)}): 2.0,
    Monomial.from_dict({1: (A1,), 3: (A0,), 4: (A1,), 5: (A1,)}): 2.0,
    Monomial.from_dict({1: (A0,), 2: (A0,), 4: (A0,), 5: (A1,)}): 4.0,
    Monomial.from_dict({1: (A1,), 2: (A0,), 4: (A0,), 5: (A1,)}): -4.0,
}


class TestBuildBell:
    def test_five_qubit_golden_polynomial(self, five_qubit):
        cert = default_certificate(five_qubit)
        compiled = build_bell(cert, five_qubit)
        assert compiled.reduced_form
        assert compiled.bound == pytest.approx(2 + 8 * SQRT2, abs=1e-12)
        golden = BellPolynomial(GOLDEN_I5)
        assert compiled.poly.allclose(golden, 1e-12)

    def test_steane_unit_weights_general_form(self, steane):
        cert = default_certificate(steane)
        compiled = build_bell(cert, steane)
        assert not compiled.reduced_form
        assert compiled.bound == pytest.approx(8.0)

    def test_single_direct_operator_reduced(self):
        cert = SOSCertificate(n=2, theta=0.0, alpha0=0.0, alphas=(1.0,),
                              operators=(xz_word([(1, "X"), (2, "Z")]),),
                              pair_sites=frozenset())
        compiled = build_bell(cert)
        # all-direct operators square to 1 identically, so the reduced
        # form 2 S applies with bound alpha0 + 2 sum(alpha)
        assert compiled.reduced_form
        assert compiled.bound == pytest.approx(2.0)
        assert compiled.poly.coeff(
            Monomial.from_dict({1: (A0,), 2: (A1,)})) == pytest.approx(2.0)

    def test_rejects_nonpositive_alpha(self, five_qubit):
        with pytest.raises(CertificateError):
            default_certificate(five_qubit, alphas=(1.0, 0.0, 1.0, 1.0))

    def test_rejects_theta_out_of_range(self, five_qubit):
        with pytest.raises(CertificateError):
            default_certificate(five_qubit, theta=0.9 * math.pi)


class TestCancellation:
    def test_paper_weights_cancel(self, five_qubit):
        ok, residual = check_cancellation(default_certificate(five_qubit))
        assert ok and residual.is_zero(1e-12)

    def test_unit_weights_leave_anticommutator(self, five_qubit):
        cert = default_certificate(five_qubit, alphas=(1, 1, 1, 1))
        ok, residual = check_cancellation(cert)
        assert not ok
        # residual is proportional to {A0^1, A1^1}
        assert residual.coeff(
            Monomial.from_dict({1: (A0, A1)})) == pytest.approx(0.5)
        assert residual.coeff(
            Monomial.from_dict({1: (A1, A0)})) == pytest.approx(0.5)

    def test_all_direct_always_cancels(self):
        cert = SOSCertificate(n=3, theta=0.0, alpha0=0.0, alphas=(2.0, 3.0),
                              operators=(xz_word([(1, "X"), (2, "X")]),
                                         xz_word([(2, "Z"), (3, "Z")])),
                              pair_sites=frozenset())
        ok, _ = check_cancellation(cert)
        assert ok


class TestVerifySOS:
    def test_chsh_fixture(self):
        cert = chsh_certificate()
        compiled = build_bell(cert)
        ok, residual = verify_sos(cert, compiled=compiled)
        assert ok and residual.max_abs_coeff() <= 1e-12
        assert compiled.poly.allclose(chsh_polynomial().scale(SQRT2), 1e-12)

    def test_five_qubit_paper_certificate(self, five_qubit):
        cert = default_certificate(five_qubit)
        ok, residual = verify_sos(cert, five_qubit)
        assert ok and residual.max_abs_coeff() <= 1e-10

    def test_shor_with_ninth_operator(self, shor):
        cert = default_certificate(shor)
        assert len(cert.operators) == 9
        compiled = build_bell(cert, shor)
        ok, residual = verify_sos(cert, shor, compiled=compiled)
        assert ok
        assert compiled.bound == pytest.approx(9.0)

    def test_tilted_certificates(self, five_qubit, steane):
        for code in (five_qubit, steane):
            cert = default_certificate(code, theta=math.pi / 8, alpha0=1.0)
            ok, residual = verify_sos(cert, code)
            assert ok, residual.max_abs_coeff()

    def test_tampered_coefficient_fails(self, five_qubit):
        cert = default_certificate(five_qubit)
        compiled = build_bell(cert, five_qubit)
        tampered = compiled.poly + BellPolynomial(
            {Monomial.from_dict({1: (A0,)}): 0.01})
        bad = type(compiled)(tampered, compiled.bound, compiled.reduced_form,
                             compiled.tilted, compiled.certificate,
                             compiled.assignment)
        ok, residual = verify_sos(cert, five_qubit, compiled=bad)
        assert not ok and residual.max_abs_coeff() > 1e-6


class TestRealizationSoundness:
    def test_sos_bound_holds_for_random_observables(self, five_qubit, rng):
        cert = default_certificate(five_qubit, theta=math.pi / 6, alpha0=1.0)
        compiled = build_bell(cert, five_qubit)
        for _ in range(20):
            real = random_realization(5, rng, dims=(2, 4))
            h = materialize(compiled.poly, real)
            top = np.linalg.eigvalsh(h)[-1]
            assert top <= compiled.bound + 1e-9

    def test_identity_materializes_for_random_observables(self, five_qubit, rng):
        # bound - I' - SOS terms is the zero polynomial; its materialization
        # must vanish for arbitrary +-1 observables
        cert = default_certificate(five_qubit)
        compiled = build_bell(cert, five_qubit)
        ok, residual = verify_sos(cert, five_qubit, compiled=compiled)
        assert ok
        real = random_realization(5, rng, dims=(2,))
        assert np.abs(materialize(residual, real)).max() <= 1e-9


class TestEmit:
    def test_grouped_human_layout_for_five_qubit(self, five_qubit):
        compiled = build_bell(default_certificate(five_qubit), five_qubit)
        text = emit(compiled.poly, "human")
        lines = text.splitlines()
        assert len(lines) == 4
        assert any("(A0^1 + A1^1)" in line for line in lines)
        assert any("(A0^1 - A1^1)" in line for line in lines)

    def test_empty_polynomial(self):
        assert emit(BellPolynomial(), "human") == "0"

    def test_json_roundtrip_random(self, rng):
        for _ in range(25):
            coeffs = {}
            for _ in range(int(rng.integers(1, 8))):
                sites = rng.choice(range(1, 5), size=int(rng.integers(1, 3)),
                                   replace=False)
                mono = Monomial.from_dict(
                    {int(s): tuple(int(v) for v in
                                   rng.integers(0, 2, int(rng.integers(1, 4))))
                     for s in sites})
                coeffs[mono] = float(rng.normal())
            poly = BellPolynomial(coeffs, meta={"n": 4, "pair_sites": [1]})
            again = parse(emit(poly, "json"))
            assert again.allclose(poly, 1e-15)
            assert again.meta == poly.meta

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            emit(BellPolynomial(), "yaml")
