import numpy as np
import pytest

from unistoch.errors import ValidationError
from unistoch.certification import (
    CertOptions,
    Verdict,
    certify_orthostochastic,
    certify_unistochastic,
    chain_condition_3x3,
    optimize_phases,
    phase_objective,
    unitarity_defect,
)
from unistoch.decomposition import build_sigma
from unistoch.linalg import haar_random_unitary
from unistoch.stochastic import random_bistochastic, squared_moduli

# Frobenius defect of the zero-phase circulant fixture: Sigma†Sigma - I
# has six off-diagonal entries of modulus 1/2, so the norm is sqrt(6/4).
CIRCULANT_ZERO_PHASE_DEFECT = np.sqrt(1.5)


def grid_search_defect_3x3(p, coarse_deg=1.0):
    """Brute-force certification oracle, independent of the chain test.

    Gauge-fix row 0 and column 0 real positive; sweep the two free phases
    of row 1 over a coarse_deg-resolution grid, completing row 2 as the
    (unique up to phase) ray orthogonal to rows 0 and 1 via the complex
    cross product. Two local grid refinements around the best coarse
    point push the resolution far below the coarse step. Returns the
    minimum Frobenius defect found.
    """
    amps = np.sqrt(np.asarray(p, dtype=float))

    def sweep(alphas, betas, ctype):
        al, be = np.meshgrid(alphas, betas, indexing="ij")
        al, be = al.ravel(), be.ravel()
        r0 = amps[0].astype(ctype)
        r1 = np.empty((al.size, 3), ctype)
        r1[:, 0] = amps[1, 0]
        r1[:, 1] = amps[1, 1] * np.exp(1j * al).astype(ctype)
        r1[:, 2] = amps[1, 2] * np.exp(1j * be).astype(ctype)
        w = np.empty_like(r1)
        w[:, 0] = np.conj(r0[1] * r1[:, 2] - r0[2] * r1[:, 1])
        w[:, 1] = np.conj(r0[2] * r1[:, 0] - r0[0] * r1[:, 2])
        w[:, 2] = np.conj(r0[0] * r1[:, 1] - r0[1] * r1[:, 0])
        norms = np.linalg.norm(w, axis=1, keepdims=True)
        norms[norms < 1e-30] = 1.0
        w /= norms
        mods = np.abs(w)
        r2 = amps[2] * w / np.where(mods < 1e-30, 1.0, mods)
        # rows have unit norm exactly (bistochastic input), so the defect
        # reduces to the three pairwise row overlaps
        g01 = r1 @ r0.conj()
        g02 = r2 @ r0.conj()
        g12 = np.sum(r1.conj() * r2, axis=1)
        f = 2.0 * (np.abs(g01) ** 2 + np.abs(g02) ** 2 + np.abs(g12) ** 2)
        k = int(np.argmin(f))
        return float(np.sqrt(f[k])), float(al[k]), float(be[k])

    step = np.deg2rad(coarse_deg)
    grid = np.arange(0.0, 2.0 * np.pi, step)
    # single precision suffices for locating the coarse minimum; the
    # refinements re-evaluate in double precision
    best, al, be = sweep(grid, grid, np.complex64)
    for shrink in (1.0, 40.0):
        local = np.linspace(-step / shrink, step / shrink, 81)
        d, al, be = sweep(al + local, be + local, np.complex128)
        best = min(best, d)
    return best


class TestUnitarityDefect:
    def test_identity_is_zero(self):
        assert unitarity_defect(np.eye(4, dtype=complex)) == 0.0

    def test_circulant_zero_phases_frozen_value(self, circulant):
        defect = unitarity_defect(build_sigma(circulant))
        assert abs(defect - CIRCULANT_ZERO_PHASE_DEFECT) < 1e-12

    def test_haar_phases_give_unitary_sigma(self):
        u = np.asarray(haar_random_unitary(4, 2))
        sigma = build_sigma(np.abs(u) ** 2, np.angle(u))
        assert unitarity_defect(sigma) < 1e-12


class TestPhaseObjective:
    def test_matches_defect(self):
        rng = np.random.default_rng(0)
        p = random_bistochastic(4, rng)
        phi = rng.uniform(0, 2 * np.pi, (4, 4))
        f, _ = phase_objective(p, phi)
        assert abs(np.sqrt(f) - unitarity_defect(build_sigma(p, phi))) < 1e-12

    def test_gradient_matches_central_differences(self):
        rng = np.random.default_rng(1)
        p = random_bistochastic(4, rng)
        phi = rng.uniform(0, 2 * np.pi, (4, 4))
        _, grad = phase_objective(p, phi)
        h = 1e-6
        for a in range(4):
            for b in range(4):
                delta = np.zeros((4, 4))
                delta[a, b] = h
                f_plus, _ = phase_objective(p, phi + delta)
                f_minus, _ = phase_objective(p, phi - delta)
                fd = (f_plus - f_minus) / (2 * h)
                assert abs(grad[a, b] - fd) < 1e-6 * max(1.0, abs(fd))


class TestChainCondition:
    def test_circulant_violates_with_expected_links(self, circulant):
        ok, witness = chain_condition_3x3(circulant)
        assert not ok
        assert witness.axis == "rows"
        assert witness.pair == (0, 1)
        np.testing.assert_allclose(witness.links, (0.0, 0.5, 0.0), atol=1e-15)

    def test_identity_all_links_degenerate(self):
        ok, witness = chain_condition_3x3(np.eye(3))
        assert ok and witness is None

    def test_haar_squared_satisfies_necessary_condition(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            ok, _ = chain_condition_3x3(squared_moduli(haar_random_unitary(3, rng)))
            assert ok

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ValidationError):
            chain_condition_3x3(np.eye(4))

    def test_non_bistochastic_rejected(self):
        with pytest.raises(ValidationError):
            chain_condition_3x3([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]])

    def test_agrees_with_grid_search_oracle(self):
        # 500 random bistochastic matrices, fixed corpus; the chain
        # decision must match the independent brute-force phase search at
        # the 1e-3 defect threshold.
        rng = np.random.default_rng(1905)
        for _ in range(500):
            b = random_bistochastic(3, rng)
            exact, _ = chain_condition_3x3(b)
            assert exact == (grid_search_defect_3x3(b) <= 1e-3)


class TestCertifyUnistochastic:
    def test_circulant_refuted_exactly(self, circulant):
        cert = certify_unistochastic(circulant)
        assert cert.verdict is Verdict.REFUTED_EXACT
        assert "links (0, 0.5, 0)" in cert.witness

    def test_haar_five_certified(self):
        p = squared_moduli(haar_random_unitary(5, 77))
        cert = certify_unistochastic(p, CertOptions(seed=7))
        assert cert.verdict is Verdict.CERTIFIED
        assert cert.defect < 1e-9
        # soundness: rebuild Sigma from the returned phases
        assert unitarity_defect(build_sigma(p, cert.phases)) <= 1e-9

    def test_permutation_certified_with_zero_phases(self):
        perm = np.eye(4)[[1, 3, 0, 2]]
        cert = certify_unistochastic(perm)
        assert cert.verdict is Verdict.CERTIFIED
        np.testing.assert_array_equal(cert.phases, np.zeros((4, 4)))

    def test_not_bistochastic_refuted_immediately(self):
        cert = certify_unistochastic([[1.0, 0.0], [0.5, 0.5]])
        assert cert.verdict is Verdict.REFUTED_EXACT
        assert "not bistochastic" in cert.witness

    def test_certified_three_dim_phases_are_sound(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            p = squared_moduli(haar_random_unitary(3, rng))
            cert = certify_unistochastic(p)
            assert cert.verdict is Verdict.CERTIFIED
            assert unitarity_defect(build_sigma(p, cert.phases)) <= 1e-9

    def test_determinism(self, circulant):
        p = squared_moduli(haar_random_unitary(4, 10))
        opts = CertOptions(seed=3)
        a = certify_unistochastic(p, opts)
        b = certify_unistochastic(p, opts)
        assert a.verdict is b.verdict
        assert a.defect == b.defect
        assert a.restarts_used == b.restarts_used
        np.testing.assert_array_equal(a.phases, b.phases)


class TestCertifyOrthostochastic:
    def test_two_dim_symmetric_certified(self):
        p = 0.3
        cert = certify_orthostochastic([[p, 1 - p], [1 - p, p]])
        assert cert.verdict is Verdict.CERTIFIED
        assert cert.defect < 1e-12
        # phases are all 0 or pi
        assert np.all(np.isin(np.round(cert.phases, 12), [0.0, round(np.pi, 12)]))

    def test_circulant_refuted_exactly(self, circulant):
        cert = certify_orthostochastic(circulant)
        assert cert.verdict is Verdict.REFUTED_EXACT

    def test_identity_certified(self):
        cert = certify_orthostochastic(np.eye(5))
        assert cert.verdict is Verdict.CERTIFIED

    def test_rotation_squares_certified_at_n3(self):
        # real orthogonal 3x3 from QR of a random Gaussian matrix
        rng = np.random.default_rng(13)
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diagonal(r))
        cert = certify_orthostochastic(q**2)
        assert cert.verdict is Verdict.CERTIFIED
        assert unitarity_defect(build_sigma(q**2, cert.phases)) <= 1e-9

    def test_ortho_certified_implies_uni_certified(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            q, r = np.linalg.qr(rng.standard_normal((4, 4)))
            q = q * np.sign(np.diagonal(r))
            p = q**2
            ortho = certify_orthostochastic(p, CertOptions(seed=11))
            assert ortho.verdict is Verdict.CERTIFIED
            uni = certify_unistochastic(p, CertOptions(seed=11))
            assert uni.verdict is Verdict.CERTIFIED

    def test_heuristic_path_above_five(self):
        rng = np.random.default_rng(53)
        q, r = np.linalg.qr(rng.standard_normal((6, 6)))
        q = q * np.sign(np.diagonal(r))
        cert = certify_orthostochastic(q**2, CertOptions(seed=5))
        assert cert.verdict is Verdict.CERTIFIED
        assert unitarity_defect(build_sigma(q**2, cert.phases)) <= 1e-9


class TestOptimizePhases:
    def test_circulant_never_certifies(self, circulant):
        result = optimize_phases(circulant, CertOptions(restarts=32, seed=0))
        assert result.defect > 1e-3

    def test_options_validation(self):
        with pytest.raises(ValidationError):
            CertOptions(certify_tolerance=1e-3, refute_threshold=1e-6)
        with pytest.raises(ValidationError):
            CertOptions(restarts=0)

    def test_gauge_of_returned_phases(self):
        p = squared_moduli(haar_random_unitary(4, 19))
        result = optimize_phases(p, CertOptions(seed=2))
        np.testing.assert_allclose(result.phases[0, :], 0.0, atol=1e-12)
        np.testing.assert_allclose(result.phases[:, 0], 0.0, atol=1e-12)
