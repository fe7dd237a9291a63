import os
import re

import numpy as np
import pytest

from rmatgen import build_variable_table, dump_table, validate
from rmatgen.cli import _write_file, main

SUMMARY_RE = re.compile(
    r"edges=(\d+) seconds=\d+\.\d{3} edges_per_sec=\d+ "
    r"samples=(\d+) samples_per_edge=\d+\.\d{4}"
)
VERIFY_RE = re.compile(
    r"statistic=\d+\.\d{6} dof=(\d+) threshold=\d+\.\d{6} verdict=(pass|fail)"
)


def read_binary(path):
    return np.fromfile(path, dtype="<u8").reshape(-1, 2)


def gen(tmp_path, name, *extra):
    path = tmp_path / name
    rc = main(["generate", "-k", "8", "-m", "1000", "--seed", "5",
               "-o", str(path), *extra])
    assert rc == 0
    return path


# ------------------------------------------------------------------ generate


def test_generate_binary_file_and_summary(tmp_path, capsys):
    path = gen(tmp_path, "edges.bin")
    assert os.path.getsize(path) == 1000 * 16
    match = SUMMARY_RE.search(capsys.readouterr().out)
    assert match and match.group(1) == "1000"


def test_generate_binary_deterministic(tmp_path):
    a = gen(tmp_path, "a.bin")
    b = gen(tmp_path, "b.bin")
    assert a.read_bytes() == b.read_bytes()


def test_generate_text_matches_binary(tmp_path):
    binary = gen(tmp_path, "e.bin")
    text = gen(tmp_path, "e.txt", "--format", "text")
    from_text = np.loadtxt(text, dtype=np.uint64).reshape(-1, 2)
    assert np.array_equal(from_text, read_binary(binary))


def test_generate_format_none_writes_nothing(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = main(["generate", "-k", "6", "-m", "100", "--format", "none"])
    assert rc == 0
    assert SUMMARY_RE.search(capsys.readouterr().out)
    assert list(tmp_path.iterdir()) == []


def test_generate_undirected_canonicalizes(tmp_path):
    path = gen(tmp_path, "u.bin", "--undirected")
    edges = read_binary(path)
    assert np.all(edges[:, 0] >= edges[:, 1])


def test_generate_undirected_warns_on_asymmetric_model(capsys):
    rc = main(["generate", "-k", "4", "-m", "10", "--format", "none",
               "-a", "0.5", "-b", "0.3", "-c", "0.1", "-d", "0.1",
               "--undirected"])
    assert rc == 0
    assert "mirroring" in capsys.readouterr().err


def test_generate_dedup_drops_duplicates(tmp_path, capsys):
    path = tmp_path / "d.bin"
    rc = main(["generate", "-k", "4", "-m", "5000", "--seed", "3",
               "--dedup", "-o", str(path)])
    assert rc == 0
    edges = read_binary(path)
    assert len(edges) < 5000  # 256 cells cannot hold 5000 distinct edges
    cells = (edges[:, 0] << np.uint64(4)) | edges[:, 1]
    assert len(np.unique(cells)) == len(cells)
    match = SUMMARY_RE.search(capsys.readouterr().out)
    assert int(match.group(1)) == len(edges)


def test_generate_scramble_permutes_ids(tmp_path):
    plain = read_binary(gen(tmp_path, "p.bin"))
    scrambled = read_binary(gen(tmp_path, "s.bin", "--scramble"))
    assert len(scrambled) == len(plain)
    assert int(scrambled.max()) < 1 << 8
    assert not np.array_equal(scrambled, plain)


def test_generate_partitioned_parts_sum_to_whole(tmp_path):
    whole = gen(tmp_path, "w.bin", "--tiles", "2")
    pieces = []
    for i in range(4):
        path = gen(tmp_path, f"part{i}.bin", "--tiles", "2",
                   "--parts", "4", "--part", str(i))
        pieces.append(read_binary(path))
    merged = np.concatenate(pieces)
    assert len(merged) == 1000
    pack = lambda e: np.sort((e[:, 0] << np.uint64(8)) | e[:, 1])
    assert np.array_equal(pack(merged), pack(read_binary(whole)))


def test_generate_thread_count_does_not_change_output(tmp_path):
    one = gen(tmp_path, "t1.bin", "--threads", "1")
    four = gen(tmp_path, "t4.bin", "--threads", "4")
    assert one.read_bytes() == four.read_bytes()


# -------------------------------------------------------------------- verify


def test_verify_passes_on_healthy_table(capsys):
    rc = main(["verify", "-k", "4", "-m", "200000", "--seed", "9",
               "--size", "1021"])
    out = capsys.readouterr().out
    match = VERIFY_RE.search(out)
    assert rc == 0 and match and match.group(2) == "pass"


def test_verify_fails_on_perturbed_table(capsys):
    rc = main(["verify", "-k", "4", "-m", "200000", "--seed", "9",
               "--size", "1021", "--noise", "0.5"])
    match = VERIFY_RE.search(capsys.readouterr().out)
    assert rc == 1 and match and match.group(2) == "fail"


def test_verify_rejects_out_of_range_noise(capsys):
    rc = main(["verify", "-k", "4", "-m", "1000", "--noise", "1.5"])
    assert rc == 2
    assert capsys.readouterr().err.startswith("error:")


def test_verify_rejects_unenumerable_k(capsys):
    rc = main(["verify", "-k", "20", "-m", "1000"])
    assert rc == 2
    assert "k must be" in capsys.readouterr().err


# --------------------------------------------------------------- benchmarks


def test_bench_tablesize_fixed_rows(tmp_path):
    path = tmp_path / "sweep.csv"
    rc = main(["bench-tablesize", "-k", "8", "-m", "2000", "--kind", "fixed",
               "--sizes", "4,16,64", "-o", str(path)])
    assert rc == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "size,kind,edges_per_sec,samples_per_edge,expected_depth"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["4", "16", "64"]
    assert all(r[1] == "fixed" for r in rows)
    # uniform-depth tables: samples per edge is exactly k / depth
    assert [float(r[3]) for r in rows] == pytest.approx([8.0, 4.0, 8 / 3])
    assert [float(r[4]) for r in rows] == pytest.approx([1.0, 2.0, 3.0])


def test_bench_tablesize_variable_samples_decrease(capsys):
    rc = main(["bench-tablesize", "-k", "8", "-m", "2000",
               "--sizes", "4,253,1021"])
    assert rc == 0
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
    spe = [float(r[3]) for r in rows]
    assert spe == sorted(spe, reverse=True)
    assert all(r[1] == "variable" for r in rows)
    assert all(float(r[2]) > 0 for r in rows)


def test_bench_tablesize_rejects_non_power_of_four(capsys):
    rc = main(["bench-tablesize", "-k", "4", "-m", "100", "--kind", "fixed",
               "--sizes", "4,20"])
    assert rc == 2
    assert "power-of-4" in capsys.readouterr().err


def test_bench_threads_baseline_speedup(capsys):
    rc = main(["bench-threads", "-k", "8", "-m", "2000",
               "--threads-list", "1,2"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "threads,edges_per_sec,speedup_vs_1"
    rows = {r[0]: r for r in (line.split(",") for line in lines[1:])}
    assert float(rows["1"][2]) == 1.0
    assert float(rows["2"][1]) > 0


# --------------------------------------------------------------- table dump


def test_table_dump_matches_library(capsys):
    rc = main(["table-dump", "-k", "4", "--size", "253"])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    table = build_variable_table(validate(0.57, 0.19, 0.19, 0.05, 4), 253)
    assert out == list(dump_table(table))


# ------------------------------------------------------------ configuration


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "-k", "4", "-m", "10", "--format", "none", "--table", "fixed"],
        ["generate", "-k", "4", "-m", "10", "--format", "none", "--depth", "3"],
        ["generate", "-k", "4", "-m", "10", "--format", "none",
         "--table", "fixed", "--depth", "2", "--size", "100"],
        ["generate", "-k", "4", "-m", "10", "--format", "none",
         "--tiles", "2", "--part", "0"],
        ["generate", "-k", "4", "-m", "10", "--format", "none", "--parts", "2"],
        ["generate", "-k", "4", "-m", "10", "--format", "none",
         "--tiles", "1", "--parts", "2", "--part", "5"],
        ["generate", "-k", "4", "-m", "10", "--format", "none",
         "--tiles", "1", "--parts", "0"],
        ["generate", "-k", "4", "-m", "10", "--format", "none", "--threads", "0"],
        ["generate", "-k", "4", "-m", "-1", "--format", "none"],
        ["generate", "-k", "0", "-m", "10", "--format", "none"],
        ["generate", "-k", "63", "-m", "10", "--format", "none"],
        ["generate", "-k", "4", "-m", "10"],
        ["generate", "-k", "4", "-m", "10", "--format", "none", "-o", "x.bin"],
        ["bench-tablesize", "-k", "4", "-m", "100", "--sizes", "10,4"],
        ["bench-tablesize", "-k", "4", "-m", "100", "--sizes", "4,4"],
        ["bench-tablesize", "-k", "4", "-m", "100", "--sizes", "4", "--reps", "2"],
        ["bench-threads", "-k", "4", "-m", "100", "--threads-list", "2,4"],
        ["bench-threads", "-k", "4", "-m", "100", "--threads-list", "1,0"],
    ],
)
def test_inconsistent_options_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_required_option_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "-k", "4"])
    assert exc.value.code == 2


def test_threads_env_sets_default(tmp_path, monkeypatch):
    monkeypatch.setenv("RMAT_THREADS", "2")
    via_env = gen(tmp_path, "env.bin")
    monkeypatch.delenv("RMAT_THREADS")
    explicit = gen(tmp_path, "flag.bin", "--threads", "2")
    assert via_env.read_bytes() == explicit.read_bytes()


def test_threads_env_rejected_when_invalid(capsys, monkeypatch):
    monkeypatch.setenv("RMAT_THREADS", "0")
    assert main(["generate", "-k", "4", "-m", "10", "--format", "none"]) == 2
    monkeypatch.setenv("RMAT_THREADS", "lots")
    assert main(["generate", "-k", "4", "-m", "10", "--format", "none"]) == 2
    assert "not an integer" in capsys.readouterr().err


def test_flag_overrides_threads_env(monkeypatch):
    monkeypatch.setenv("RMAT_THREADS", "0")
    rc = main(["generate", "-k", "4", "-m", "10", "--format", "none",
               "--threads", "1"])
    assert rc == 0


# ----------------------------------------------------------------- file I/O


def test_write_file_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.bin"

    def body(f):
        f.write(b"partial")
        raise RuntimeError("disk on fire")

    with pytest.raises(RuntimeError):
        _write_file(str(target), body)
    assert list(tmp_path.iterdir()) == []


def test_generate_into_missing_directory_exits_2(tmp_path, capsys):
    rc = main(["generate", "-k", "4", "-m", "10",
               "-o", str(tmp_path / "no" / "such" / "dir" / "x.bin")])
    assert rc == 2
    assert capsys.readouterr().err.startswith("error:")
    assert list(tmp_path.iterdir()) == []
