import numpy as np
import pytest

from gevrey_nse import GridSpec
from gevrey_nse.fieldio import FieldFormatError, read_field, write_field
from gevrey_nse.spectral import SpectralField

from conftest import make_random_field


def test_round_trip(tmp_path):
    u = make_random_field(GridSpec(5, 1.3), seed=1)
    path = tmp_path / "field.txt"
    write_field(path, u)
    v = read_field(path)
    assert v.grid.K == 5 and v.grid.kappa0 == 1.3 and v.reality
    np.testing.assert_array_equal(v.coeffs, u.coeffs)


def test_round_trip_complexified(tmp_path):
    u = make_random_field(GridSpec(3), seed=2, reality=False)
    path = tmp_path / "field.txt"
    write_field(path, u)
    v = read_field(path)
    assert not v.reality
    np.testing.assert_array_equal(v.coeffs, u.coeffs)


def test_rejects_bad_header(tmp_path):
    path = tmp_path / "field.txt"
    path.write_text("# not a field file\n")
    with pytest.raises(FieldFormatError):
        read_field(path)


def test_rejects_divergent_mode(tmp_path):
    path = tmp_path / "field.txt"
    path.write_text("# gevrey-nse field v1 K=2 kappa0=1.0 reality=0\n"
                    "1 0 1.0 0.0 0.0 0.0\n")  # parallel to k
    with pytest.raises(FieldFormatError, match="divergence"):
        read_field(path)


def test_rejects_conjugate_asymmetry(tmp_path):
    path = tmp_path / "field.txt"
    path.write_text("# gevrey-nse field v1 K=2 kappa0=1.0 reality=1\n"
                    "1 0 0.0 0.0 1.0 0.0\n"
                    "-1 0 0.0 0.0 0.5 0.0\n")
    with pytest.raises(FieldFormatError, match="conjugate"):
        read_field(path)


def test_rejects_k_zero(tmp_path):
    path = tmp_path / "field.txt"
    path.write_text("# gevrey-nse field v1 K=2 kappa0=1.0 reality=0\n"
                    "0 0 1.0 0.0 0.0 0.0\n")
    with pytest.raises(FieldFormatError):
        read_field(path)


def test_small_violation_within_tolerance_accepted(tmp_path):
    grid = GridSpec(2)
    c = np.zeros((grid.n, grid.n, 2), complex)
    c[1 + 2, 0 + 2] = (1e-12, 1.0)   # tiny divergence, below 1e-9
    c[-1 + 2, 0 + 2] = (1e-12, 1.0)
    u = SpectralField(grid, c, reality=True, validate=False)
    path = tmp_path / "field.txt"
    write_field(path, u)
    assert read_field(path).norm() > 0
