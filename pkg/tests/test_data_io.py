"""
Tests for CSV I/O and Model Persistence

Parse-error locations, header detection, float round-trips, and the saved
embedding model container.
"""

import json

import numpy as np
import pytest

from src.data_io import load_data, load_square, load_table, write_matrix, write_report
from src.errors import CorruptModel, DataFormatError, VersionMismatch
from src.kernels.embedding import embed_out_of_sample_batch, embed_training, fit, fit_from_data
from src.kernels.kernel_core import gram
from src.persistence import MODEL_FORMAT, load_model, save_model
from src.state import DataMatrix, KernelSpec


class TestLoadTable:
    """Tests for reading numeric CSV tables."""

    def test_header_is_detected(self, tmp_path):
        """Test a non-numeric first row becomes the header."""
        path = tmp_path / "x.csv"
        path.write_text("height,weight\n1.5,60\n1.8,80\n")
        table = load_table(str(path))
        assert table.header == ["height", "weight"]
        np.testing.assert_array_equal(table.values, [[1.5, 60.0], [1.8, 80.0]])

    def test_rows_become_columns(self, tmp_path):
        """Test rows = samples turns into a d×n DataMatrix."""
        path = tmp_path / "x.csv"
        path.write_text("1,2,3\n4,5,6\n")
        X = load_data(str(path))
        assert (X.d, X.n) == (3, 2)
        np.testing.assert_array_equal(X.column(1), [4.0, 5.0, 6.0])

    @pytest.mark.parametrize("text, row, column", [
        ("1,2\n3,abc\n", 2, 2),
        ("a,b\n1,2\n3,nan\n", 3, 2),
        ("1,2\n,4\n", 2, 1),
        ("1,inf\n", 1, 2),
    ], ids=["text", "nan-after-header", "empty", "inf"])
    def test_bad_cell_location(self, tmp_path, text, row, column):
        """Test the first bad cell is reported with its 1-based row and column."""
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(DataFormatError) as exc_info:
            load_table(str(path))
        assert (exc_info.value.row, exc_info.value.column) == (row, column)

    def test_underscore_digits_are_rejected(self, tmp_path):
        """Test a cell like 1_0 is not read as a number."""
        path = tmp_path / "u.csv"
        path.write_text("1_0,2\n")
        with pytest.raises(DataFormatError) as exc_info:
            load_table(str(path))
        assert (exc_info.value.row, exc_info.value.column) == (1, 1)
        assert exc_info.value.to_dict()["exit_code"] == 2

    def test_ragged_rows(self, tmp_path):
        """Test a row with extra fields is a format error naming the line."""
        path = tmp_path / "ragged.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(DataFormatError) as exc_info:
            load_table(str(path))
        assert exc_info.value.row == 2

    def test_empty_file(self, tmp_path):
        """Test an empty file is a format error."""
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DataFormatError):
            load_table(str(path))

    def test_non_square(self, tmp_path):
        """Test load_square rejects a 2×3 table."""
        path = tmp_path / "r.csv"
        path.write_text("1,2,3\n4,5,6\n")
        with pytest.raises(DataFormatError):
            load_square(str(path))


class TestWriters:
    """Tests for matrix and report output."""

    def test_floats_round_trip_exactly(self, tmp_path):
        """Test CSV output preserves every float64 bit."""
        values = np.random.default_rng(400).standard_normal((4, 3)) * 1e-7
        path = tmp_path / "m.csv"
        write_matrix(values, str(path))
        np.testing.assert_array_equal(load_table(str(path)).values, values)

    def test_wide_range_floats_round_trip_exactly(self, tmp_path):
        """Test values spread over many decades reload bit for bit."""
        rng = np.random.default_rng(404)
        values = rng.standard_normal((50, 4)) * 10.0 ** rng.uniform(-300, 300, (50, 4))
        path = tmp_path / "wide.csv"
        write_matrix(values, str(path))
        np.testing.assert_array_equal(load_table(str(path)).values, values)

    def test_vector_is_written_as_column(self, tmp_path):
        """Test a 1-D array becomes one value per line."""
        path = tmp_path / "v.csv"
        write_matrix(np.array([3.0, 1.0]), str(path))
        assert path.read_text() == "3\n1\n"

    def test_report_formats(self, tmp_path):
        """Test reports as key,value CSV and as JSON."""
        report = {"psd": True, "n": 3}
        csv_path, json_path = tmp_path / "r.csv", tmp_path / "r.json"
        write_report(report, str(csv_path))
        write_report(report, str(json_path), "json")
        assert csv_path.read_text() == "key,value\npsd,True\nn,3\n"
        assert json.loads(json_path.read_text()) == report


class TestModelPersistence:
    """Tests for saving and loading embedding models."""

    @pytest.fixture
    def model(self):
        X = DataMatrix(np.random.default_rng(401).standard_normal((3, 9)))
        return fit_from_data(KernelSpec(family="rbf"), X, 3)

    def test_reload_is_bit_exact(self, tmp_path, model):
        """Test a reloaded model reproduces embeddings exactly."""
        path = str(tmp_path / "model.npz")
        save_model(model, path)
        loaded = load_model(path)
        query = DataMatrix(np.random.default_rng(402).standard_normal((3, 4)))
        np.testing.assert_array_equal(embed_training(loaded), embed_training(model))
        np.testing.assert_array_equal(
            embed_out_of_sample_batch(loaded, query), embed_out_of_sample_batch(model, query)
        )
        assert loaded.spec == model.spec

    def test_no_suffix_is_appended(self, tmp_path, model):
        """Test the model is written to exactly the given path."""
        path = tmp_path / "model.bin"
        save_model(model, str(path))
        assert path.exists()
        assert load_model(str(path)).p == model.p

    def test_gram_only_model(self, tmp_path):
        """Test a model fitted from a bare Gram round-trips without training data."""
        K = gram(KernelSpec(family="linear"), DataMatrix(np.random.default_rng(403).standard_normal((2, 5))))
        path = str(tmp_path / "model.npz")
        save_model(fit(K, 2), path)
        loaded = load_model(path)
        assert loaded.training is None
        assert not loaded.supports_out_of_sample

    def test_truncated_file(self, tmp_path, model):
        """Test a truncated container raises CorruptModel."""
        path = tmp_path / "model.npz"
        save_model(model, str(path))
        path.write_bytes(path.read_bytes()[:100])
        with pytest.raises(CorruptModel):
            load_model(str(path))

    def test_unwritable_path(self, tmp_path, model):
        """Test saving into a missing directory raises DataFormatError naming the path."""
        path = str(tmp_path / "missing" / "model.npz")
        with pytest.raises(DataFormatError) as exc_info:
            save_model(model, path)
        assert exc_info.value.path == path

    def test_missing_file(self, tmp_path):
        """Test a nonexistent path raises CorruptModel."""
        with pytest.raises(CorruptModel):
            load_model(str(tmp_path / "absent.npz"))

    def test_wrong_version(self, tmp_path, model):
        """Test an unknown version raises VersionMismatch."""
        path = tmp_path / "model.npz"
        header = {"format": MODEL_FORMAT, "version": 99}
        with open(path, "wb") as handle:
            np.savez(handle, header=np.array(json.dumps(header)), gram=model.gram.values)
        with pytest.raises(VersionMismatch):
            load_model(str(path))

    def test_missing_array(self, tmp_path, model):
        """Test a container without eigenvectors raises CorruptModel."""
        path = tmp_path / "model.npz"
        header = {"format": MODEL_FORMAT, "version": 1}
        with open(path, "wb") as handle:
            np.savez(handle, header=np.array(json.dumps(header)), gram=model.gram.values)
        with pytest.raises(CorruptModel) as exc_info:
            load_model(str(path))
        assert "eigenvectors" in str(exc_info.value)
