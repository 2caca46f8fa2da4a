import numpy as np
import pytest

import kreisslab as kl
from kreisslab.cesaro import rotated_mean_tables


def random_dense(d, seed, real=False):
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((d, d))
    if not real:
        mat = mat + 1j * rng.standard_normal((d, d))
    return kl.Dense(0.5 * mat)


# --- first mean ---


def test_mean_zero_index_is_identity():
    for op in (kl.build_TN(3, 0.3), kl.build_ergces(4), random_dense(5, 1)):
        mean = kl.cesaro_mean(op, 0)
        np.testing.assert_array_equal(mean.matrix, np.eye(kl.dimension(op)))


def test_mean_of_identity():
    for n in (1, 5, 17):
        mean = kl.cesaro_mean(kl.Dense(np.eye(4)), n)
        np.testing.assert_allclose(mean.matrix, np.eye(4), rtol=1e-14)


def test_mean_tn_first_average():
    op = kl.build_TN(2, 0.25)
    mean = kl.cesaro_mean(op, 1)
    oracle = (np.eye(4) + kl.materialize(op)) / 2.0
    np.testing.assert_allclose(mean.matrix, oracle, atol=1e-15)
    assert abs(mean.matrix[1, 0] - 2**0.25 / 2.0) <= 1e-15


# --- second mean ---


def test_second_mean_zero_index():
    mean = kl.cesaro_mean2(kl.build_TN(3, 0.3), 0)
    np.testing.assert_array_equal(mean.matrix, np.eye(6))


def test_second_mean_zero_operator():
    # only the j = 0 term survives: (2/20) * 4 * I
    mean = kl.cesaro_mean2(kl.Dense(np.zeros((3, 3))), 3)
    np.testing.assert_allclose(mean.matrix, 0.4 * np.eye(3), rtol=1e-15)


def test_second_mean_matches_independent_powering():
    op = random_dense(6, 3)
    n = 10
    mat = kl.materialize(op)
    oracle = np.zeros((6, 6), dtype=complex)
    for j in range(n + 1):
        oracle += (n + 1 - j) * np.linalg.matrix_power(mat, j)
    oracle *= 2.0 / ((n + 1) * (n + 2))
    np.testing.assert_allclose(kl.cesaro_mean2(op, n).matrix, oracle, atol=1e-12)


@pytest.mark.parametrize("n", [1, 7, 32])
def test_second_mean_forms_agree_random(n):
    # the builder cross-checks its two forms to 1e-12 internally
    kl.cesaro_mean2(random_dense(8, 40 + n), n)


# --- rotated profile ---


def test_profile_identity_sup_is_one():
    profile = kl.rotated_mean_norm_profile(kl.Dense(np.eye(3)), 12, angle_count=16)
    np.testing.assert_allclose(profile.sup_lambda, np.ones(13), rtol=1e-12)
    np.testing.assert_allclose(profile.norm_m1, np.ones(13), rtol=1e-12)


def test_profile_shift_shortcut_matches_dense_grid():
    op = kl.build_TN(4, 0.3)
    short = kl.rotated_mean_norm_profile(op, 16, angle_count=256)
    assert short.rotation_shortcut
    dense = kl.rotated_mean_norm_profile(kl.Dense(kl.materialize(op)), 16, angle_count=8)
    assert not dense.rotation_shortcut
    np.testing.assert_allclose(short.sup_lambda, dense.sup_lambda, rtol=1e-9)


def test_profile_angle_count_irrelevant_for_shifts():
    op = kl.build_bermbmp_shift(0.45, "forward", 8)
    one = kl.rotated_mean_norm_profile(op, 12, angle_count=1)
    many = kl.rotated_mean_norm_profile(op, 12, angle_count=256)
    np.testing.assert_array_equal(one.sup_lambda, many.sup_lambda)


def test_shift_mean_rotation_invariance_on_dense_grid():
    # defeat the shortcut by materializing, then sweep a 64-angle grid
    for op in (kl.build_TN(4, 0.3), kl.build_bermbmp_shift(0.3, "forward", 8)):
        lams = np.exp(2j * np.pi * np.arange(64) / 64)
        table, _ = rotated_mean_tables(kl.Dense(kl.materialize(op)), 12, lams)
        spread = table.max(axis=0) - table.min(axis=0)
        assert float(spread.max()) <= 1e-9


def test_profile_ergces_even_means_bounded():
    profile = kl.rotated_mean_norm_profile(kl.build_ergces(20), 256, angle_count=1)
    even = profile.norm_m1[2::2]
    assert float(even.max()) <= 1.5 + 1e-6


def test_ergces_even_mean_entry_bound():
    j_max = 20
    mat = kl.materialize(kl.build_ergces(j_max))
    eps = 2.0 ** (-np.arange(1, j_max + 1, dtype=float))
    power = np.eye(j_max + 1, dtype=complex)
    total = np.eye(j_max + 1, dtype=complex)
    for n in range(1, 257):
        power = power @ mat
        total = total + power
        if n % 2 == 0:
            mean = total / (n + 1)
            assert np.all(np.abs(mean[0, 1:]) <= eps / 2.0 + 1e-9)


def test_profile_validation():
    with pytest.raises(kl.ValidationError):
        kl.rotated_mean_norm_profile(kl.build_TN(2, 0.25), 4, angle_count=0)
    with pytest.raises(kl.ValidationError):
        kl.rotated_mean_norm_profile(kl.build_TN(2, 0.25), 4, order=3)


# --- identities ---


def test_identity_check_identity_operator():
    assert kl.cesaro_identity_check(kl.Dense(np.eye(4)), 5) <= 1e-15


def test_identity_check_tn():
    assert kl.cesaro_identity_check(kl.build_TN(8, 0.3), 17) <= 1e-10


def test_identity_check_random_dense():
    assert kl.cesaro_identity_check(random_dense(8, 9), 5) <= 1e-11


def test_identity_check_catalog_sample():
    ops = (
        kl.build_TN(8, 0.3),
        kl.build_shields_counterexample(0.15, 0.45, 4),
        kl.build_bermbmp_shift(0.45, "forward", 16),
        kl.build_ergces(12),
        kl.build_tz_block(16),
    )
    for op in ops:
        for n in (1, 2, 13, 64):
            assert kl.cesaro_identity_check(op, n) <= 1e-10


def test_identity_check_needs_positive_index():
    with pytest.raises(kl.ValidationError):
        kl.cesaro_identity_check(kl.Dense(np.eye(2)), 0)


def test_mean_respects_dense_cap():
    with pytest.raises(kl.SizeError):
        kl.cesaro_mean(kl.build_TN(8, 0.3), 2, cap=10)
    with pytest.raises(kl.SizeError):
        kl.cesaro_mean2(kl.build_TN(8, 0.3), 2, cap=10)


# --- decay ---


def test_mean_difference_identity_operator():
    diffs = kl.mean_difference_decay(kl.Dense(np.eye(3)), (4, 16, 64))
    np.testing.assert_allclose(diffs, 0.0, atol=1e-15)


def test_mean_difference_decay_tn():
    diffs = kl.mean_difference_decay(kl.build_TN(32, 0.45), (64, 512))
    assert diffs[1] < diffs[0]


def test_mean_difference_decay_ergces():
    diffs = kl.mean_difference_decay(kl.build_ergces(20), (64, 256, 512))
    assert diffs[2] < diffs[0]
    # threshold frozen from the dense oracle (observed 0.0623 at n = 256)
    assert diffs[1] <= 0.07


def test_mean_difference_ladder_validation():
    with pytest.raises(kl.ValidationError):
        kl.mean_difference_decay(kl.Dense(np.eye(2)), (8, 4))


# --- ergodic probes ---


def test_probe_zero_operator():
    probe = kl.ergodic_probe(kl.Dense(np.zeros((5, 5))), probes=3)
    assert probe.consistent
    assert np.all(np.diff(probe.gaps, axis=1) < 0)


def test_probe_ergces_positive_verdict():
    probe = kl.ergodic_probe(
        kl.build_ergces(20), probes=8, ladder=(16, 64, 256, 1024, 4096, 8192, 16384)
    )
    assert probe.consistent


def test_probe_tz_coordinates_positive_verdict():
    vecs = []
    for j in (0, 3, 17, 256, 261):
        v = np.zeros(512)
        v[j] = 1.0
        vecs.append(v)
    probe = kl.ergodic_probe(kl.build_tz_block(256), probes=vecs)
    assert probe.consistent
    assert probe.probe_labels == tuple(f"given-{i}" for i in range(5))


def test_probe_validation():
    with pytest.raises(kl.ValidationError):
        kl.ergodic_probe(kl.Dense(np.eye(2)), probes=[np.zeros(2)])
    with pytest.raises(kl.ValidationError):
        kl.ergodic_probe(kl.Dense(np.eye(2)), probes=2, ladder=(8,))
