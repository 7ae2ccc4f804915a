import numpy as np
import pytest

from cvlearn import diagnostics as dg
from cvlearn import transforms as tr
from cvlearn.errors import ContractError, DataError

from helpers import zero_dc_nyquist


def test_accuracy_all_correct_and_all_wrong():
    logits = np.eye(4) * 5.0
    assert dg.accuracy(logits, np.arange(4)) == 100.0
    assert dg.accuracy(logits, (np.arange(4) + 1) % 4) == 0.0


def test_accuracy_counting():
    logits = np.array([[1, 0], [1, 0], [0, 1], [1, 0]], dtype=float)
    assert dg.accuracy(logits, np.array([0, 0, 1, 1])) == 75.0


def test_accuracy_ties_break_to_lowest_index():
    logits = np.zeros((2, 3))
    assert dg.accuracy(logits, np.array([0, 0])) == 100.0
    assert dg.accuracy(logits, np.array([1, 2])) == 0.0


def test_accuracy_invariant_to_row_shift():
    g = np.random.default_rng(0)
    logits = g.standard_normal((20, 5))
    labels = g.integers(0, 5, 20)
    shifted = logits + g.standard_normal((20, 1))
    assert dg.accuracy(logits, labels) == dg.accuracy(shifted, labels)


def test_mag_phase_zero_error():
    pred = np.array([[1.0, 2.0, 0.5, -0.5]])
    out = dg.mag_phase_mse(pred, pred.copy())
    assert out.mag_mse == 0.0 and out.phase_mse == 0.0


def test_mag_phase_quarter_turn():
    # magnitude preserved, every phase off by pi/2
    target = np.array([[2.0, 0.0]])  # 2 + 0j
    pred = np.array([[0.0, 2.0]])    # 0 + 2j
    out = dg.mag_phase_mse(pred, target)
    assert out.mag_mse == pytest.approx(0.0, abs=1e-15)
    assert out.phase_mse == pytest.approx((np.pi / 2) ** 2, rel=1e-12)


def test_mag_phase_wraps_around_pi():
    theta_hat, theta = np.pi - 0.1, -np.pi + 0.1
    pred = np.array([[np.cos(theta_hat), np.sin(theta_hat)]])
    target = np.array([[np.cos(theta), np.sin(theta)]])
    out = dg.mag_phase_mse(pred, target)
    assert out.phase_mse == pytest.approx(0.2 ** 2, rel=1e-9)


def test_mag_phase_invariant_to_full_turns():
    g = np.random.default_rng(1)
    mags = g.uniform(0.5, 2.0, (10, 1))
    angles = g.uniform(-np.pi, np.pi, (10, 1))
    def encode(m, a):
        return np.concatenate([m * np.cos(a), m * np.sin(a)], axis=1)
    out1 = dg.mag_phase_mse(encode(mags, angles), encode(mags, angles * 0))
    out2 = dg.mag_phase_mse(encode(mags, angles + 2 * np.pi), encode(mags, angles * 0))
    assert out1.phase_mse == pytest.approx(out2.phase_mse, rel=1e-9)


def test_mag_phase_degenerate_tally():
    pred = np.array([[0.0, 0.0], [1.0, 0.0]])
    target = np.array([[1.0, 0.0], [1.0, 0.0]])
    out = dg.mag_phase_mse(pred, target)
    assert out.degenerate_phases == 1


def test_orthogonality_of_hilbert_pairs():
    z_re = zero_dc_nyquist(np.random.default_rng(2).standard_normal((6, 32)))
    z_im = tr.hilbert_rows_array(z_re)
    assert dg.latent_orthogonality(z_re, z_im) <= 1e-9


def test_orthogonality_of_parallel_vectors():
    z = np.random.default_rng(3).standard_normal((4, 8))
    assert dg.latent_orthogonality(z, z) == pytest.approx(1.0)
    assert dg.latent_orthogonality(z, -z) == pytest.approx(1.0)


def test_orthogonality_scaling_invariance():
    g = np.random.default_rng(4)
    a, b = g.standard_normal((5, 8)), g.standard_normal((5, 8))
    scales = g.uniform(0.1, 10.0, (5, 1))
    assert dg.latent_orthogonality(a * scales, b) == \
        pytest.approx(dg.latent_orthogonality(a, b), rel=1e-12)


def test_orthogonality_skips_zero_rows():
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    b = np.array([[1.0, 0.0], [1.0, 1.0]])
    assert dg.latent_orthogonality(a, b) == pytest.approx(1.0)
    counted = dg.latent_orthogonality_counted(a, b)
    assert counted.skipped_rows == 1
    with pytest.raises(DataError):
        dg.latent_orthogonality(np.zeros((2, 2)), b)


def test_lpq_norm_examples():
    assert dg.lpq_norm(np.eye(2), 2, 2) == pytest.approx(np.sqrt(2))
    assert dg.lpq_norm(np.array([[3.0, 4.0], [0.0, 0.0]]), 2, 2) == pytest.approx(5.0)
    assert dg.lpq_norm(np.ones((2, 2)), 1, 2) == pytest.approx(2 * np.sqrt(2))


def test_lpq_norm_frobenius_reduction():
    g = np.random.default_rng(5)
    a = g.standard_normal((6, 9))
    assert dg.lpq_norm(a, 2, 2) == pytest.approx(np.linalg.norm(a), rel=1e-12)


def test_lpq_norm_rejects_p_below_one():
    with pytest.raises(ContractError):
        dg.lpq_norm(np.eye(2), 0.5, 2)
    with pytest.raises(ContractError):
        dg.lpq_norm(np.eye(2), 2, 0.9)


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (3, 1.5)])
def test_lpq_block_zeroing_monotonicity(p, q):
    g = np.random.default_rng(6)
    for _ in range(20):
        a = g.standard_normal((8, 8))
        masked = a.copy()
        masked[:4, 4:] = 0.0
        masked[4:, :4] = 0.0
        assert dg.lpq_norm(a, p, q) >= dg.lpq_norm(masked, p, q) - 1e-12


def test_covariance_blocks_match_numpy_cov():
    g = np.random.default_rng(7)
    z_re, z_im = g.standard_normal((50, 4)), g.standard_normal((50, 4))
    blocks = dg.covariance_blocks(z_re, z_im)
    full = np.cov(np.concatenate([z_re, z_im], axis=1).T)
    assert np.abs(blocks.k_rr - full[:4, :4]).max() < 1e-12
    assert np.abs(blocks.k_ii - full[4:, 4:]).max() < 1e-12
    assert np.abs(blocks.k_ri - full[:4, 4:]).max() < 1e-12


def test_covariance_blocks_symmetric_psd():
    g = np.random.default_rng(8)
    blocks = dg.covariance_blocks(g.standard_normal((40, 6)),
                                  g.standard_normal((40, 6)))
    for mat in (blocks.k_rr, blocks.k_ii):
        assert np.array_equal(mat, mat.T)
        assert np.linalg.eigvalsh(mat).min() >= -1e-9


def test_covariance_comparison_monotone():
    g = np.random.default_rng(9)
    for _ in range(10):
        out = dg.covariance_comparison(g.standard_normal((30, 5)),
                                       g.standard_normal((30, 5)))
        assert out.norm_j >= out.norm_s
        assert out.ratio >= 1.0


def test_covariance_comparison_identical_channels():
    z = np.random.default_rng(10).standard_normal((30, 5))
    out = dg.covariance_comparison(z, z)
    assert out.norm_j > out.norm_s


def test_covariance_comparison_independent_ratio_near_one():
    g = np.random.default_rng(11)
    out = dg.covariance_comparison(g.standard_normal((10_000, 8)),
                                   g.standard_normal((10_000, 8)))
    assert abs(out.ratio - 1.0) <= 0.05


def test_covariance_comparison_degenerate_batch():
    with pytest.raises(DataError):
        dg.covariance_comparison(np.ones((1, 4)), np.ones((1, 4)))
    with pytest.raises(DataError):
        dg.covariance_comparison(np.ones((5, 4)), np.ones((5, 4)))
