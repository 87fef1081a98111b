"""Round trips of the snapshot, graymap and table formats."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eulerlab import io

finite = st.floats(-1e6, 1e6, allow_nan=False)


class TestSnapshot:
    @settings(max_examples=25, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)), elements=finite), finite)
    def test_round_trip_is_exact(self, tmp_path_factory, values, t):
        path = tmp_path_factory.mktemp("fld") / "a.fld"
        io.write_snapshot(path, values, "torus", t)
        back, geom, t2 = io.read_snapshot(path)
        assert geom == "torus" and t2 == t
        assert np.array_equal(back, values)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "c.fld"
        io.write_snapshot(path, np.zeros((3, 5)), "channel", 0.5)
        data = path.read_bytes()
        assert data[:4] == b"FLD1"
        # 4 magic + 4 + 4 + 1 + 8 header bytes, then 15 doubles
        assert len(data) == 21 + 15 * 8

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "t.fld"
        io.write_snapshot(path, np.ones((4, 4)), "torus", 0.0)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="expected"):
            io.read_snapshot(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.fld"
        path.write_bytes(b"NOPE" + bytes(40))
        with pytest.raises(ValueError):
            io.read_snapshot(path)


class TestPolarSnapshot:
    def test_round_trip(self, tmp_path):
        v = np.arange(12.0).reshape(4, 3)
        io.write_polar_snapshot(tmp_path / "p.pol", v, 0.25, "log")
        back, t, kind = io.read_polar_snapshot(tmp_path / "p.pol")
        assert np.array_equal(back, v) and t == 0.25 and kind == "log"


class TestPGM:
    def test_range_comment_and_orientation(self, tmp_path):
        v = np.array([[0.0, 1.0], [2.0, 4.0]])
        io.write_pgm(tmp_path / "a.pgm", v)
        img, lo, hi = io.read_pgm(tmp_path / "a.pgm")
        assert (lo, hi) == (0.0, 4.0)
        # the last data row (largest y) comes first
        assert img.tolist() == [[128, 255], [0, 64]]

    def test_constant_field(self, tmp_path):
        io.write_pgm(tmp_path / "c.pgm", np.full((3, 3), 7.0))
        img, lo, hi = io.read_pgm(tmp_path / "c.pgm")
        assert lo == hi == 7.0 and not img.any()


class TestCSV:
    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.tuples(finite, finite), min_size=1, max_size=20))
    def test_floats_survive_exactly(self, tmp_path_factory, rows):
        path = tmp_path_factory.mktemp("csv") / "t.csv"
        io.write_csv(path, ["a", "b"], rows)
        header, back = io.read_csv(path)
        assert header == ["a", "b"]
        assert np.array_equal(back, np.array(rows))


class TestTruncatedHeaders:
    @pytest.mark.parametrize("magic", [b"FLD1", b"POL1"])
    def test_short_header(self, tmp_path, magic):
        p = tmp_path / "short.bin"
        p.write_bytes(magic + b"\x00" * 6)
        reader = io.read_snapshot if magic == b"FLD1" else io.read_polar_snapshot
        with pytest.raises(ValueError):
            reader(p)
