"""Tight/equiangular frame certificates, covariant generators, Naimark duals."""
import numpy as np
import pytest

from sicladder import frames as fr
from sicladder import ladder as lad
from sicladder.errors import BadCompletion, DimensionMismatch, NotOrthonormal


def basis_vec(d, j):
    e = np.zeros(d, dtype=complex)
    e[j] = 1.0
    return e


class TestCheckTight:
    def test_orthonormal_basis_is_a_trivial_etf(self):
        cert = fr.check_tight(np.eye(3, dtype=complex))
        assert cert.is_tight and cert.is_equiangular
        assert abs(cert.tight_constant - 1.0) < 1e-12
        assert cert.common_overlap_sq < 1e-12

    def test_sic_orbit_is_equiangular_tight(self, f15):
        frame = fr.covariant_generator([f15.vector], 15)
        cert = fr.check_tight(frame)
        assert cert.is_tight and cert.is_equiangular
        assert abs(cert.tight_constant - 15.0) < 1e-8
        assert abs(cert.common_overlap_sq - 1.0 / 16) < 1e-8

    def test_complement_of_lift_is_etf(self, f5):
        blocks = lad.lift_fiducial(f5).blocks
        comp = fr.naimark_complement(blocks, 5)
        assert comp.generator.shape == (10, 25)
        cert = fr.check_tight(comp)
        assert cert.is_tight and cert.is_equiangular
        # (N - r)/(r (N - 1)) at r=10, N=25
        assert abs(cert.common_overlap_sq - 15.0 / 240) < 1e-8

    def test_repeated_block_is_not_tight(self):
        e0 = basis_vec(3, 0)
        cert = fr.check_tight(fr.covariant_generator([e0, e0], 3))
        assert not cert.is_tight

    def test_tight_constant_is_resolution_weight(self, f5):
        # sum of unit-column projectors = (N/r) identity for a tight frame
        blocks = lad.lift_fiducial(f5).blocks
        M = fr.covariant_generator(blocks, 5).generator
        M = M / np.linalg.norm(M, axis=0)
        r, N = M.shape
        assert np.abs(M @ M.conj().T - (N / r) * np.eye(r)).max() < 1e-10


class TestCovariantGenerator:
    def test_orbit_of_basis_vector(self):
        frame = fr.covariant_generator([basis_vec(3, 0)], 3)
        assert frame.generator.shape == (3, 9)
        tau = -np.exp(1j * np.pi / 3)
        for i in range(3):
            for j in range(3):
                col = frame.generator[:, 3 * i + j]
                assert np.sum(np.abs(col) > 1e-12) == 1
                assert abs(col[i] - tau ** (i * j)) < 1e-12

    def test_lifted_blocks_give_tight_frame(self, f5):
        frame = fr.covariant_generator(lad.lift_fiducial(f5).blocks, 5)
        assert frame.generator.shape == (15, 25)
        assert fr.check_tight(frame).is_tight

    def test_wrong_block_length(self):
        with pytest.raises(DimensionMismatch):
            fr.covariant_generator([basis_vec(4, 0)], 3)


class TestTightnessBlockEquivalence:
    @pytest.mark.parametrize("d", (3, 5, 7))
    def test_tight_iff_blocks_orthonormal(self, d):
        rng = np.random.default_rng(40 + d)
        k = (d - 1) // 2
        for trial in range(10):
            raw = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
            if trial % 2 == 0:
                raw, _ = np.linalg.qr(raw)
            else:
                raw /= np.linalg.norm(raw, axis=0)
            blocks = [raw[:, c] for c in range(k)]
            gram_ok = np.abs(raw.conj().T @ raw - np.eye(k)).max() <= 1e-10
            cert = fr.check_tight(fr.covariant_generator(blocks, d))
            assert cert.is_tight == gram_ok


class TestNaimarkComplement:
    def test_basis_blocks_complement_is_leftover_orbit(self):
        comp = fr.naimark_complement([basis_vec(3, 0), basis_vec(3, 1)], 3)
        assert comp.generator.shape == (3, 9)
        # the automatic completion of {e0, e1} is e2 itself
        assert np.abs(comp.generator[:, 0] - basis_vec(3, 2)).max() < 1e-10
        cert = fr.check_tight(comp)
        assert cert.is_tight and not cert.is_equiangular

    def test_gram_duality(self, f5):
        blocks = lad.lift_fiducial(f5).blocks
        orig = fr.covariant_generator(blocks, 5).generator
        comp = fr.naimark_complement(blocks, 5).generator
        G = orig.conj().T @ orig + comp.conj().T @ comp
        assert np.abs(G - 5.0 * np.eye(25)).max() < 1e-10

    def test_completion_freedom(self, f5):
        blocks = lad.lift_fiducial(f5).blocks
        B = np.column_stack(blocks)
        rng = np.random.default_rng(7)
        raw = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        # random orthonormal extension of the same blocks
        proj = np.eye(5) - B @ B.conj().T
        ext, _ = np.linalg.qr(proj @ raw[:, :2])
        manual = fr.naimark_complement(blocks, 5, completion=[ext[:, 0], ext[:, 1]])
        auto = fr.naimark_complement(blocks, 5)
        assert fr.check_tight(manual).is_tight
        # complement Gram matrix is completion-independent
        Ga = auto.generator.conj().T @ auto.generator
        Gm = manual.generator.conj().T @ manual.generator
        assert np.abs(Ga - Gm).max() < 1e-10

    def test_rejects_non_orthonormal_blocks(self):
        e0 = basis_vec(3, 0)
        with pytest.raises(NotOrthonormal):
            fr.naimark_complement([e0, e0], 3)

    def test_rejects_short_completion(self):
        with pytest.raises(BadCompletion):
            fr.naimark_complement([basis_vec(3, 0)], 3, completion=[basis_vec(3, 1)])

    def test_rejects_skew_completion(self):
        v = (basis_vec(3, 0) + basis_vec(3, 1)) / np.sqrt(2)
        with pytest.raises(BadCompletion):
            fr.naimark_complement([basis_vec(3, 0), basis_vec(3, 1)], 3, completion=[v])


class TestGrassmannEquidistance:
    def test_identical_subspaces(self):
        b = np.eye(4)[:, :2]
        eq, dist = fr.grassmann_equidistance([b, b, b])
        assert eq and dist < 1e-12

    def test_coordinate_lines_equidistant(self):
        bases = [np.eye(3)[:, [j]] for j in range(3)]
        eq, dist = fr.grassmann_equidistance(bases)
        assert eq and abs(dist - 1.0) < 1e-12

    def test_translated_etf_spans_equidistant(self, f15):
        bases = lad.translated_subspaces(f15.vector, 5)
        assert len(bases) == 9
        eq, dist = fr.grassmann_equidistance(bases)
        assert eq and dist > 0.1

    def test_generic_triple_not_equidistant(self):
        rng = np.random.default_rng(11)
        bases = []
        for _ in range(3):
            raw = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
            q, _ = np.linalg.qr(raw)
            bases.append(q)
        eq, _ = fr.grassmann_equidistance(bases)
        assert not eq

    def test_rejects_non_orthonormal(self):
        b = np.ones((3, 2), dtype=complex)
        with pytest.raises(NotOrthonormal):
            fr.grassmann_equidistance([b, np.eye(3)[:, :2]])


def test_restrict_to_span_round_trip():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(6, 2)) @ rng.normal(size=(2, 8))
    span, coords = fr.restrict_to_span(M)
    assert span.shape == (6, 2)
    assert np.abs(span.conj().T @ span - np.eye(2)).max() < 1e-10
    assert np.abs(span @ coords - M).max() < 1e-10