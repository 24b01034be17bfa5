"""Certificates: rational parsing, exact checks, serialization, tamper tests."""

import dataclasses
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thuegames.certificate import (CERT_MAGIC, CertificateFormatError,
                                   JSON_MIRROR_LIMIT, beta_interval,
                                   check_beta, decode, encode, format_rational,
                                   from_json, make_certificate, parse_rational,
                                   read_certificate, to_json,
                                   verify_certificate, write_certificate)
from thuegames.modes import Mode
from thuegames.solver import min_step, sum_step


class TestRationalText:
    def test_parse(self):
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational("5") == 5
        assert parse_rational(" 9/5 ") == Fraction(9, 5)

    def test_round_trip(self):
        for q in (Fraction(3, 7), Fraction(5), Fraction(-2, 9)):
            assert parse_rational(format_rational(q)) == q

    @pytest.mark.parametrize("bad", ["0.5", "1e3", "2,5", "3/0", "", "a/b"])
    def test_rejects_non_rational_text(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)


class TestBetaChecks:
    def test_published_four_letter_constants(self):
        alpha = Fraction(12914, 6541)
        gamma = Fraction(10635, 4441)
        assert check_beta(Mode.NONREPETITIVE, alpha, gamma, 15,
                          Fraction(17, 10)) is False
        # The margin at 9/5 is a small negative rational, so the exact
        # check refuses it; the feasible interval tops out near 1.79.
        assert check_beta(Mode.NONREPETITIVE, alpha, gamma, 15,
                          Fraction(9, 5)) is False
        assert check_beta(Mode.NONREPETITIVE, alpha, gamma, 15,
                          Fraction(44, 25)) is True
        span = beta_interval(Mode.NONREPETITIVE, alpha, gamma, 15)
        assert span == (Fraction(1733, 1000), Fraction(179, 100))

    def test_published_six_letter_constants(self):
        assert check_beta(Mode.HARD, Fraction(27195, 9091),
                          Fraction(11699, 6806), 8, Fraction(5, 2)) is True

    def test_indicator_constants(self):
        assert check_beta(Mode.HARD, Fraction(4), Fraction(1), 4,
                          Fraction(3)) is True
        span = beta_interval(Mode.HARD, Fraction(4), Fraction(1), 4)
        assert span == (Fraction(1247, 500), Fraction(384, 125))

    def test_infeasible_interval_is_none(self):
        assert beta_interval(Mode.HARD, Fraction(1), Fraction(1), 8) is None

    def test_parity_enforced(self):
        with pytest.raises(ValueError):
            check_beta(Mode.NONREPETITIVE, Fraction(3), Fraction(1), 8,
                       Fraction(2))
        with pytest.raises(ValueError):
            check_beta(Mode.HARD, Fraction(3), Fraction(1), 7, Fraction(2))
        with pytest.raises(ValueError):
            check_beta(Mode.ERASE, Fraction(3), Fraction(1), 8, Fraction(2))

    def test_beta_must_exceed_one(self):
        with pytest.raises(ValueError):
            check_beta(Mode.HARD, Fraction(4), Fraction(1), 4, Fraction(1))

    @settings(max_examples=60, deadline=None)
    @given(st.fractions(min_value=Fraction(3, 2), max_value=6),
           st.fractions(min_value=1, max_value=3),
           st.sampled_from([4, 6, 8]))
    def test_interval_endpoints_are_exact(self, alpha, gamma, p):
        res = Fraction(1, 40)
        span = beta_interval(Mode.HARD, alpha, gamma, p, res)
        if span is None:
            return
        lo, hi = span
        assert check_beta(Mode.HARD, alpha, gamma, p, lo)
        assert check_beta(Mode.HARD, alpha, gamma, p, hi)
        if hi + res <= 100:
            assert not check_beta(Mode.HARD, alpha, gamma, p, hi + res)
        if lo - res > 1:
            assert not check_beta(Mode.HARD, alpha, gamma, p, lo - res)


class TestCertificateObject:
    def test_fields(self, cert6, lam6):
        assert cert6.mode is Mode.HARD
        assert cert6.k == 6
        assert (cert6.pmin, cert6.pmax) == (1, 8)
        assert cert6.lambda_count == len(lam6)
        assert cert6.fingerprint == lam6.fingerprint
        assert cert6.alpha == Fraction(20446, 6835)
        assert cert6.gamma == Fraction(5500, 3403)
        assert cert6.rng == lam6.rng

    def test_default_beta_is_interval_middle(self, cert6):
        span = beta_interval(cert6.mode, cert6.alpha, cert6.gamma, cert6.pmax)
        assert cert6.beta == (span[0] + span[1]) / 2
        assert check_beta(cert6.mode, cert6.alpha, cert6.gamma, cert6.pmax,
                          cert6.beta)


class TestVerification:
    def test_passes(self, cert6, lam6):
        report = verify_certificate(cert6, lam6)
        assert report.passed
        assert all(ok for _, ok, _ in report.checks)
        assert "PASSED" in report.render()

    def test_rebuilds_automaton_when_not_given(self, cert6):
        assert verify_certificate(cert6).passed

    def test_tampered_coefficient_fails_growth(self, cert6, lam6):
        coeffs = cert6.coefficients.copy()
        victim = int(np.flatnonzero(coeffs > 0)[5])
        coeffs[victim] = cert6.M          # inflate one weight
        bad = dataclasses.replace(cert6, coefficients=coeffs)
        report = verify_certificate(bad, lam6)
        assert not report.passed
        assert any("growth" in name for name in report.failures())

    def test_wrong_fingerprint_short_circuits(self, cert6, lam6):
        bad = dataclasses.replace(cert6, fingerprint=cert6.fingerprint ^ 1)
        report = verify_certificate(bad, lam6)
        assert not report.passed
        assert len(report.checks) <= 2    # later checks never ran

    def test_out_of_range_value_fails(self, cert6, lam6):
        coeffs = cert6.coefficients.copy()
        victim = int(np.flatnonzero(coeffs > 0)[0])
        coeffs[victim] = 1                # below the claimed minimum
        bad = dataclasses.replace(cert6, coefficients=coeffs)
        report = verify_certificate(bad, lam6)
        assert not report.passed

    def test_exaggerated_alpha_fails(self, cert6, lam6):
        bad = dataclasses.replace(cert6, alpha=cert6.alpha + 1)
        assert not verify_certificate(bad, lam6).passed

    def test_understated_gamma_fails(self, cert6, lam6):
        bad = dataclasses.replace(cert6, gamma=Fraction(1))
        assert not verify_certificate(bad, lam6).passed

    def test_independent_bigint_replay(self, cert6, lam6):
        """Growth inequality recomputed with Fractions only."""
        C = cert6.coefficients
        C1 = min_step(lam6, sum_step(lam6, C), Mode.HARD)
        ratios = [Fraction(int(C1[v]), int(C[v]))
                  for v in range(len(lam6)) if C[v] > 0]
        alpha_re = min(ratios)
        assert alpha_re == cert6.alpha
        assert all(r >= cert6.alpha for r in ratios)


class TestSerialization:
    def test_binary_round_trip(self, cert6, tmp_path):
        path = tmp_path / "six.tgc"
        write_certificate(cert6, str(path))
        blob = path.read_bytes()
        assert blob.startswith(CERT_MAGIC)
        again = read_certificate(str(path))
        assert again == cert6

    def test_json_round_trip(self, cert6, tmp_path):
        text = to_json(cert6)
        doc = json.loads(text)
        assert doc["format"] == "tgcrt-json-1"
        assert doc["alpha"] == "20446/6835"
        assert from_json(text) == cert6
        path = tmp_path / "six.json"
        path.write_text(text)
        assert read_certificate(str(path)) == cert6

    def test_encode_decode(self, cert6):
        assert decode(encode(cert6)) == cert6

    @pytest.mark.parametrize("offset_frac", [0.3, 0.6, 0.95])
    def test_bit_flip_detected(self, cert6, offset_frac):
        blob = bytearray(encode(cert6))
        blob[int(len(blob) * offset_frac)] ^= 0x10
        with pytest.raises(CertificateFormatError):
            decode(bytes(blob))

    def test_truncation_detected(self, cert6):
        blob = encode(cert6)
        with pytest.raises(CertificateFormatError):
            decode(blob[:-7])

    def test_json_mirror_limit(self, cert6):
        huge = dataclasses.replace(
            cert6, lambda_count=JSON_MIRROR_LIMIT,
            coefficients=np.ones(JSON_MIRROR_LIMIT, dtype=np.int64))
        with pytest.raises(CertificateFormatError):
            to_json(huge)

    def test_unparseable_file_reported(self, tmp_path):
        path = tmp_path / "junk.tgc"
        path.write_bytes(b"neither magic nor json")
        with pytest.raises(CertificateFormatError):
            read_certificate(str(path))
