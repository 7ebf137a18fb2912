import math

import numpy as np
import pytest

from sparserank.bench import BenchRecord
from sparserank.core import DegreeDistribution, WeightedSparseMatrix
from sparserank.errors import FormatError
from sparserank.gen import GenSpec, gen_uniform
from sparserank.io import (
    EDGE_LIST,
    MM_PATTERN,
    MM_REAL,
    append_bench_record,
    detect_format,
    read_degdist,
    read_matrix,
    read_matrix_with_report,
    write_degdist,
    write_matrix,
)

from conftest import ones_matrix, pattern_of


def write_text(path, text):
    path.write_text(text, encoding="ascii")
    return str(path)


class TestMatrixMarketRead:
    def test_basic_real(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n"
            "3 3 2\n"
            "1 1 5.0\n"
            "2 3 -1.0\n",
        )
        m = read_matrix(path)
        assert m.n == 3
        assert m.pattern.entries() == [(0, 0), (1, 2)]
        assert m.values.tolist() == [5.0, -1.0]
        assert m.weight_mode == "external"

    def test_non_square_rejected(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n3 4 1\n1 1 2.0\n",
        )
        with pytest.raises(FormatError, match="non-square"):
            read_matrix(path)

    def test_zero_dropped_and_counted(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 0.0\n",
        )
        m, dropped = read_matrix_with_report(path)
        assert m.nnz == 0
        assert dropped == 1

    def test_symmetric_rejected(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1.0\n",
        )
        with pytest.raises(FormatError, match="general"):
            read_matrix(path)

    def test_malformed_header(self, tmp_path):
        path = write_text(tmp_path / "a.mtx", "%%NotMatrixMarket nothing\n")
        with pytest.raises(FormatError, match="a.mtx:1"):
            read_matrix(path)

    def test_index_out_of_range_with_line(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
        )
        with pytest.raises(FormatError, match="a.mtx:3"):
            read_matrix(path)

    def test_non_numeric_value(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
        )
        with pytest.raises(FormatError, match="non-numeric"):
            read_matrix(path)

    def test_duplicate_coordinate(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 2\n1 1 1.0\n1 1 2.0\n",
        )
        with pytest.raises(FormatError, match="duplicate"):
            read_matrix(path)

    def test_count_mismatch(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        )
        with pytest.raises(FormatError, match="declared"):
            read_matrix(path)

    def test_pattern_reads_all_ones(self, tmp_path):
        path = write_text(
            tmp_path / "a.mtx",
            "%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n2 2\n",
        )
        m = read_matrix(path)
        assert m.weight_mode == "all-ones"
        assert m.values.tolist() == [1.0, 1.0]


class TestWriteMatrix:
    def test_real_round_trip(self, tmp_path):
        m, _ = WeightedSparseMatrix.from_coo(
            3, [0, 1], [0, 2], [5.0, -1.0], "external"
        )
        path = str(tmp_path / "m.mtx")
        write_matrix(m, path, MM_REAL)
        assert read_matrix(path) == m

    def test_empty_matrix(self, tmp_path):
        m, _ = WeightedSparseMatrix.from_coo(5, [], [], [], "external")
        path = str(tmp_path / "m.mtx")
        write_matrix(m, path, MM_REAL)
        assert "5 5 0" in open(path).read()
        assert read_matrix(path) == m

    def test_pattern_discards_values(self, tmp_path):
        m = ones_matrix(pattern_of(2, [(0, 0), (0, 1), (1, 0), (1, 1)]))
        path = str(tmp_path / "m.mtx")
        write_matrix(m, path, MM_PATTERN)
        lines = open(path).read().strip().splitlines()
        assert len(lines) == 6  # header + size + 4 coordinate lines
        assert all(len(line.split()) == 2 for line in lines[2:])
        assert read_matrix(path) == m

    def test_edge_list_round_trip(self, tmp_path):
        m = ones_matrix(pattern_of(4, [(2, 1), (0, 3), (1, 1)]))
        path = str(tmp_path / "m.edges")
        write_matrix(m, path, EDGE_LIST)
        back = read_matrix(path, EDGE_LIST)
        assert back == m

    def test_round_trip_property(self, tmp_path):
        # bit-exact reproduction across formats, 30 seeded matrices here
        # (the acceptance suite runs the full 100)
        for seed in range(30):
            fmt = (MM_REAL, MM_PATTERN, EDGE_LIST)[seed % 3]
            mode = "random-iid" if fmt == MM_REAL else "all-ones"
            spec = GenSpec(n=30, k_avg=2.0, dist="uniform", weight_mode=mode, seed=seed)
            m = gen_uniform(spec)
            path = str(tmp_path / f"m{seed}.any")
            write_matrix(m, path, fmt)
            back = read_matrix(path, fmt)
            assert back.pattern == m.pattern
            assert np.array_equal(back.values, m.values)

    def test_detect_format(self, tmp_path):
        m = ones_matrix(pattern_of(2, [(0, 0)]))
        mtx = str(tmp_path / "x.mtx")
        write_matrix(m, mtx, MM_PATTERN)
        assert detect_format(mtx) == MM_PATTERN
        assert detect_format("whatever.edges") == EDGE_LIST


class TestEdgeListRead:
    def test_missing_n(self, tmp_path):
        path = write_text(tmp_path / "a.edges", "0 1\n")
        with pytest.raises(FormatError, match="n="):
            read_matrix(path, EDGE_LIST)

    def test_edge_direction(self, tmp_path):
        # "src dst" is the edge src -> dst, stored as entry (dst, src)
        path = write_text(tmp_path / "a.edges", "# n=3\n0 2\n")
        m = read_matrix(path, EDGE_LIST)
        assert m.pattern.entries() == [(2, 0)]


class TestDegdist:
    def test_example_means(self, tmp_path):
        path = write_text(
            tmp_path / "d.csv",
            "# n=1000\nkind,degree,frequency\n"
            "in,1,0.5\nin,3,0.5\nout,2,1.0\n",
        )
        p_in, p_out, n = read_degdist(path)
        assert n == 1000
        assert p_in.mean == pytest.approx(2.0)
        assert p_out.mean == pytest.approx(2.0)

    def test_bad_sum(self, tmp_path):
        path = write_text(
            tmp_path / "d.csv",
            "# n=10\nkind,degree,frequency\nin,1,0.5\nin,2,0.3\nout,2,1.0\n",
        )
        with pytest.raises(FormatError, match="sum"):
            read_degdist(path)

    def test_zero_n(self, tmp_path):
        path = write_text(
            tmp_path / "d.csv",
            "# n=0\nkind,degree,frequency\nin,1,1.0\nout,1,1.0\n",
        )
        with pytest.raises(FormatError, match="positive"):
            read_degdist(path)

    def test_negative_degree(self, tmp_path):
        path = write_text(
            tmp_path / "d.csv",
            "# n=10\nkind,degree,frequency\nin,-1,1.0\nout,1,1.0\n",
        )
        with pytest.raises(FormatError, match="negative"):
            read_degdist(path)

    def test_round_trip_bit_exact(self, tmp_path):
        p_in = DegreeDistribution.from_probs({1: 0.25, 2: 0.5, 7: 0.25}, 100, "in")
        p_out = DegreeDistribution.from_probs({3: 1.0}, 100, "out")
        path = str(tmp_path / "d.csv")
        write_degdist(p_in, p_out, 100, path)
        r_in, r_out, n = read_degdist(path)
        assert n == 100
        assert r_in == p_in
        assert r_out == p_out

    def test_empty_support_unconstructible(self):
        with pytest.raises(ValueError):
            DegreeDistribution.from_probs({}, 10, "in")

    def test_large_support_round_trip(self, tmp_path):
        n = 10**6
        ks = np.arange(1, 1001)
        ps = ks**-2.5
        ps /= ps.sum()
        # exact renormalization so construction accepts the float sum
        p_in = DegreeDistribution("in", n, ks, ps)
        p_out = DegreeDistribution("out", n, ks, ps)
        path = str(tmp_path / "d.csv")
        write_degdist(p_in, p_out, n, path)
        r_in, r_out, rn = read_degdist(path)
        assert rn == n
        assert r_in == p_in and r_out == p_out


def make_record(**overrides):
    base = dict(
        experiment="sweep-n",
        method="fer",
        dist="uniform",
        n=100,
        k_avg=2.0,
        gamma=None,
        weight_mode="random-iid",
        seed=1,
        rank=80,
        r_m=0.8,
        t_seconds=0.01,
        converged=True,
    )
    base.update(overrides)
    return BenchRecord(**base)


class TestBenchCsv:
    def test_first_append_creates_header(self, tmp_path):
        path = str(tmp_path / "r.csv")
        append_bench_record(make_record(), path)
        lines = open(path).read().strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("experiment,method,dist,n,k_avg")

    def test_second_append_no_second_header(self, tmp_path):
        path = str(tmp_path / "r.csv")
        append_bench_record(make_record(), path)
        append_bench_record(make_record(seed=2), path)
        lines = open(path).read().strip().splitlines()
        assert len(lines) == 3
        assert sum(1 for ln in lines if ln.startswith("experiment")) == 1

    def test_nan_timing_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            make_record(t_seconds=math.nan)
        rec = make_record()
        object.__setattr__(rec, "t_seconds", math.nan)
        with pytest.raises(ValueError, match="non-finite"):
            append_bench_record(rec, str(tmp_path / "r.csv"))
