"""Tests for the shared CSV / VPRD matrix formats."""

import numpy as np
import pytest

from vpr_consensus.errors import FormatError
from vpr_consensus.export.matrix_io import (
    detect_format, read_index_vector, read_matches, read_matrix,
    write_index_vector, write_matches, write_matrix, VPRD_HEADER
)
from vpr_consensus.models.results import MatchCandidate


def test_detect_format_from_extension():
    assert detect_format("a.csv") == "csv"
    assert detect_format("a.vprd") == "bin"
    assert detect_format("a.BIN") == "bin"
    assert detect_format("a.txt", "csv") == "csv"
    with pytest.raises(FormatError):
        detect_format("a.txt")


def test_csv_values_survive_write_and_read(tmp_path, rng):
    values = rng.random((7, 3))
    path = write_matrix(values, tmp_path / "m.csv")
    assert np.array_equal(read_matrix(path), values)


def test_binary_header_layout(tmp_path):
    values = np.arange(6, dtype=np.float64).reshape(2, 3)
    path = write_matrix(values, tmp_path / "m.vprd")
    data = path.read_bytes()
    assert data[:4] == b"VPRD"
    assert int.from_bytes(data[4:8], "little") == 1
    assert int.from_bytes(data[8:12], "little") == 2
    assert int.from_bytes(data[12:16], "little") == 3
    assert len(data) == VPRD_HEADER.itemsize + 6 * 8


def test_binary_rejects_bad_magic_and_truncation(tmp_path):
    path = write_matrix(np.ones((2, 2)), tmp_path / "m.bin")
    data = path.read_bytes()
    (tmp_path / "magic.bin").write_bytes(b"XXXX" + data[4:])
    (tmp_path / "short.bin").write_bytes(data[:-8])
    with pytest.raises(FormatError, match="magic"):
        read_matrix(tmp_path / "magic.bin")
    with pytest.raises(FormatError, match="bytes"):
        read_matrix(tmp_path / "short.bin")


def test_ragged_row_names_the_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(FormatError) as info:
        read_matrix(path)
    assert info.value.row == 1


def test_bad_token_names_row_and_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,abc\n")
    with pytest.raises(FormatError) as info:
        read_matrix(path)
    assert (info.value.row, info.value.column) == (1, 1)


def test_empty_file_is_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(FormatError):
        read_matrix(path)


def test_missing_file_raises_os_error(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_matrix(tmp_path / "nope.csv")


def test_index_vector_rejects_fractions(tmp_path):
    write_index_vector([3, 1, 4], tmp_path / "gt.csv")
    assert read_index_vector(tmp_path / "gt.csv").tolist() == [3, 1, 4]
    (tmp_path / "frac.csv").write_text("1\n2.5\n")
    with pytest.raises(FormatError) as info:
        read_index_vector(tmp_path / "frac.csv")
    assert info.value.row == 1


def test_matches_file_keeps_accepted_flags(tmp_path):
    matches = [MatchCandidate(0, 4, 0.25), MatchCandidate(1, 5, 0.5)]
    path = write_matches(matches, tmp_path / "matches.csv", accepted=[1, 0])
    rows = read_matches(path)
    assert [(r['query'], r['ref'], r['score'], r['accepted']) for r in rows] == [(0, 4, 0.25, 1), (1, 5, 0.5, 0)]


def test_invalid_utf8_matrix_names_the_row(tmp_path):
    path = tmp_path / "latin.csv"
    path.write_bytes(b"1,0\n\xff,1\n")
    with pytest.raises(FormatError) as info:
        read_matrix(path)
    assert info.value.row == 1
    assert info.value.path == str(path)


def test_invalid_utf8_matches_file_is_a_format_error(tmp_path):
    path = tmp_path / "matches.csv"
    path.write_bytes(b"query,ref,score\n0,1,0.5\n\xff,2,0.25\n")
    with pytest.raises(FormatError) as info:
        read_matches(path)
    assert info.value.row == 1
