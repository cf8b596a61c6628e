import numpy as np
import pytest

from unistoch.errors import ValidationError
from unistoch.certification import CertOptions
from unistoch.linalg import haar_random_unitary
from unistoch.stochastic import (
    MatrixClass,
    classify,
    is_bistochastic,
    random_bistochastic,
    random_stochastic,
    squared_moduli,
    validate_stochastic,
)


class TestValidateStochastic:
    def test_identity_is_valid(self):
        p = validate_stochastic(np.eye(3))
        np.testing.assert_array_equal(p, np.eye(3))

    def test_circulant_is_valid_and_bistochastic(self, circulant):
        p = validate_stochastic(circulant)
        assert is_bistochastic(p)

    def test_bad_row_sum_reports_row(self):
        with pytest.raises(ValidationError) as err:
            validate_stochastic([[0.5, 0.6], [0.4, 0.4]])
        assert any("row 0" in v for v in err.value.violations)

    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError) as err:
            validate_stochastic([[-0.2, 1.2], [0.5, 0.5]])
        assert any("negative" in v for v in err.value.violations)

    def test_entry_above_one_rejected(self):
        with pytest.raises(ValidationError):
            validate_stochastic([[1.5, -0.5], [0.5, 0.5]])

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError):
            validate_stochastic([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0]])

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            validate_stochastic([[np.nan, 1.0], [0.5, 0.5]])

    def test_result_read_only(self):
        p = validate_stochastic(np.eye(2))
        with pytest.raises(ValueError):
            p[0, 0] = 0.5


class TestIsBistochastic:
    def test_permutation_matrix(self):
        perm = np.eye(4)[[2, 0, 3, 1]]
        assert is_bistochastic(validate_stochastic(perm))

    def test_circulant(self, circulant):
        assert is_bistochastic(validate_stochastic(circulant))

    def test_column_sums_off(self):
        assert not is_bistochastic(validate_stochastic([[1.0, 0.0], [0.5, 0.5]]))


class TestSquaredModuli:
    def test_identity(self):
        np.testing.assert_array_equal(squared_moduli(np.eye(3, dtype=complex)), np.eye(3))

    @pytest.mark.parametrize("theta", [0.3, np.pi / 4, 1.2])
    def test_rotation(self, theta):
        c, s = np.cos(theta), np.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        expected = np.array([[c**2, s**2], [s**2, c**2]])
        np.testing.assert_allclose(squared_moduli(rot), expected, atol=1e-15)

    def test_haar_rows_and_columns_sum_to_one(self):
        p = squared_moduli(haar_random_unitary(5, 21))
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(p.sum(axis=0), 1.0, atol=1e-12)


class TestRandomSampling:
    def test_random_stochastic_valid(self):
        rng = np.random.default_rng(5)
        for n in range(2, 9):
            p = random_stochastic(n, rng)
            np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_random_bistochastic_valid(self):
        rng = np.random.default_rng(6)
        for n in range(2, 7):
            b = random_bistochastic(n, rng)
            assert is_bistochastic(b)


class TestClassify:
    def test_circulant_is_bistochastic_not_unistochastic(self, circulant):
        result = classify(circulant)
        assert result.label is MatrixClass.BISTOCHASTIC
        assert result.certificate is not None
        assert not result.certificate.certified
        assert not result.inconclusive

    def test_identity_is_orthostochastic(self):
        assert classify(np.eye(4)).label is MatrixClass.ORTHOSTOCHASTIC

    def test_haar_squared_is_unistochastic_with_certificate(self):
        p = squared_moduli(haar_random_unitary(4, 99))
        result = classify(p, CertOptions(seed=1))
        assert result.label is MatrixClass.UNISTOCHASTIC
        assert result.certificate is not None
        assert result.certificate.defect < 1e-9

    def test_plain_stochastic(self):
        result = classify([[1.0, 0.0], [0.5, 0.5]])
        assert result.label is MatrixClass.STOCHASTIC

    def test_nesting_chain_property(self):
        deep = classify(np.eye(3)).label
        assert deep.chain == (
            MatrixClass.STOCHASTIC,
            MatrixClass.BISTOCHASTIC,
            MatrixClass.UNISTOCHASTIC,
            MatrixClass.ORTHOSTOCHASTIC,
        )

    def test_every_two_dim_bistochastic_is_orthostochastic(self):
        # exhaustive over a grid of symmetric 2x2 bistochastic matrices
        for p in np.linspace(0.0, 1.0, 21):
            m = np.array([[p, 1.0 - p], [1.0 - p, p]])
            assert classify(m).label is MatrixClass.ORTHOSTOCHASTIC

    def test_unistochastic_label_implies_bistochastic(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            p = squared_moduli(haar_random_unitary(4, rng))
            result = classify(p, CertOptions(seed=2))
            if result.label in (MatrixClass.UNISTOCHASTIC, MatrixClass.ORTHOSTOCHASTIC):
                assert is_bistochastic(p)
