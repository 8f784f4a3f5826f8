import json
import os
import random
import subprocess
import sys

from pmrc.cli import (
    EXIT_BAD_ARGS,
    EXIT_DECODE,
    EXIT_INFEASIBLE,
    EXIT_IO,
    EXIT_OK,
    main,
)
from pmrc.shards import shard_filename


def write_random_file(path, size, seed=0):
    rng = random.Random(seed)
    data = bytes(rng.randrange(256) for _ in range(size))
    path.write_bytes(data)
    return data


def encode(tmp_path, name="orig.bin", size=3000, mode="mbr", k=3, d=5, n=8, extra=()):
    src = tmp_path / name
    data = write_random_file(src, size)
    out = tmp_path / "shards"
    argv = [
        "encode", str(src), "-o", str(out), "--mode", mode,
        "-k", str(k), "-n", str(n), *extra,
    ]
    if mode == "mbr":
        argv += ["-d", str(d)]
    assert main(argv) == EXIT_OK
    return data, out


def test_encode_reconstruct_round_trip_both_modes(tmp_path):
    for mode in ("msr", "mbr"):
        workdir = tmp_path / mode
        workdir.mkdir()
        data, out = encode(workdir, mode=mode, k=3, d=4, n=7)
        dest = tmp_path / f"back-{mode}.bin"
        assert main(["reconstruct", str(out), "-o", str(dest)]) == EXIT_OK
        assert dest.read_bytes() == data


def test_encode_empty_file(tmp_path):
    src = tmp_path / "empty.bin"
    src.write_bytes(b"")
    out = tmp_path / "sh"
    assert main([
        "encode", str(src), "-o", str(out), "--mode", "mbr",
        "-k", "2", "-d", "3", "-n", "5",
    ]) == EXIT_OK
    shards = sorted(os.listdir(out))
    assert len(shards) == 5
    dest = tmp_path / "back.bin"
    assert main(["reconstruct", str(out), "-o", str(dest)]) == EXIT_OK
    assert dest.read_bytes() == b""


def test_damage_noop_and_round_trip(tmp_path):
    data, out = encode(tmp_path)
    assert main(["damage", str(out)]) == EXIT_OK  # no-op
    assert main(["damage", str(out), "--corrupt", "5", "--seed", "3"]) == EXIT_OK
    dest = tmp_path / "back.bin"
    assert main(["reconstruct", str(out), "-o", str(dest), "-t", "1"]) == EXIT_OK
    assert dest.read_bytes() == data


def test_damage_unknown_node(tmp_path):
    data, out = encode(tmp_path)
    assert main(["damage", str(out), "--erase", "99"]) == EXIT_BAD_ARGS
    assert main(["damage", str(out), "--erase", "2", "--corrupt", "2"]) == EXIT_BAD_ARGS


def test_repair_writes_identical_shard(tmp_path):
    data, out = encode(tmp_path)
    original = (out / shard_filename(2)).read_bytes()
    assert main(["damage", str(out), "--erase", "2"]) == EXIT_OK
    assert main(["repair", str(out), "--node", "2"]) == EXIT_OK
    assert (out / shard_filename(2)).read_bytes() == original


def test_repair_through_corruption(tmp_path):
    data, out = encode(tmp_path)
    original = (out / shard_filename(2)).read_bytes()
    assert main(["damage", str(out), "--erase", "2", "--corrupt", "5"]) == EXIT_OK
    alt = tmp_path / "alt"
    assert main(["repair", str(out), "--node", "2", "-t", "1", "-o", str(alt)]) == EXIT_OK
    assert (alt / shard_filename(2)).read_bytes() == original


def test_repair_infeasible_when_n_is_d_plus_one(tmp_path):
    data, out = encode(tmp_path, mode="mbr", k=2, d=3, n=4)
    assert main(["repair", str(out), "--node", "1", "-t", "1"]) == EXIT_INFEASIBLE


def test_reconstruct_with_too_few_shards(tmp_path):
    data, out = encode(tmp_path, mode="mbr", k=3, d=4, n=5)
    for node in (1, 2, 4):
        os.remove(out / shard_filename(node))
    assert main([
        "reconstruct", str(out), "-o", str(tmp_path / "nope.bin"), "-s", "1",
    ]) == EXIT_INFEASIBLE


def test_reconstruct_beyond_budget_exits_decode_failure(tmp_path):
    data, out = encode(tmp_path)
    assert main(["damage", str(out), "--corrupt", "1,2", "--seed", "1"]) == EXIT_OK
    assert main([
        "reconstruct", str(out), "-o", str(tmp_path / "x.bin"), "-t", "1",
    ]) == EXIT_DECODE


def test_io_error_exit(tmp_path):
    assert main([
        "encode", str(tmp_path / "missing.bin"), "-o", str(tmp_path / "sh"),
        "--mode", "msr", "-k", "3", "-n", "7",
    ]) == EXIT_IO


def test_bad_params_exit(tmp_path):
    src = tmp_path / "f.bin"
    src.write_bytes(b"hi")
    assert main([
        "encode", str(src), "-o", str(tmp_path / "sh"),
        "--mode", "msr", "-k", "3", "-n", "4",  # n < 2k-1
    ]) == EXIT_BAD_ARGS
    assert main([
        "encode", str(src), "-o", str(tmp_path / "sh"),
        "--mode", "msr", "-k", "3", "-n", "7", "--q", "100",
    ]) == EXIT_BAD_ARGS


def test_info_params_output(capsys):
    assert main(["info", "--mode", "msr", "-k", "3", "-n", "7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[7, 3, 4]" in out
    assert "alpha=2 beta=1 B=6" in out
    assert "meets the bound exactly" in out


def test_info_default_n_is_d_plus_one(capsys):
    assert main(["info", "--mode", "msr", "-k", "3", "--json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 5
    assert payload["feasible_budgets"] == [[0, 0]]


def test_info_connectivity_mode(capsys):
    assert main([
        "info", "--alpha", "2", "--beta", "1", "--delta", "5", "--kappa", "4",
        "-s", "0", "-t", "1", "--json",
    ]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["d"] == 3 and payload["k"] == 2
    assert payload["capacity_bound"] == 4


def test_info_shard_dir(tmp_path, capsys):
    data, out = encode(tmp_path, mode="mbr", k=2, d=3, n=5)
    capsys.readouterr()  # drop the encode command's output
    assert main(["info", str(out), "--json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode"] == "mbr"
    assert payload["B"] == 5
    assert payload["shards_present"] == [1, 2, 3, 4, 5]


def test_simulate_command(tmp_path, capsys):
    scenario = {
        "mode": "msr", "k": 3, "n": 7, "q": 29, "seed": 1, "blocks": 1,
        "events": [
            {"op": "fail", "node": 1},
            {"op": "repair", "node": 1, "s": 0, "t": 1, "corrupt": [3]},
            {"op": "reconstruct", "s": 1, "t": 0, "erase": [2]},
        ],
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    assert main(["simulate", str(path)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4  # 3 events + summary
    summary = json.loads(lines[-1])["summary"]
    assert summary["successes"] == 3
    report = tmp_path / "report.jsonl"
    assert main(["simulate", str(path), "-o", str(report)]) == EXIT_OK
    assert len(report.read_text().strip().splitlines()) == 4


def test_damage_matrix_end_to_end(tmp_path):
    """Every feasible (s, t) with randomized damage within budget restores
    exact bytes for both repair and reconstruction."""
    from pmrc import feasible_pairs, mbr_params

    rng = random.Random(21)
    params = mbr_params(k=2, d=3, n=7)
    data, out = encode(tmp_path, size=997, mode="mbr", k=2, d=3, n=7)
    pristine = {i: (out / shard_filename(i)).read_bytes() for i in range(1, 8)}
    for case, (s, t) in enumerate(feasible_pairs(params)):
        work = tmp_path / f"case{case}"
        work.mkdir()
        for i, blob in pristine.items():
            (work / shard_filename(i)).write_bytes(blob)
        # reconstruction reads kappa present shards, so deletions are capped
        # at n - kappa; the (s, t) budget itself is still exercised in full
        n_erase = min(s, params.n - (params.k + s + 2 * t))
        nodes = rng.sample(range(1, 8), n_erase + t)
        erase, corrupt = nodes[:n_erase], nodes[n_erase:]
        argv = ["damage", str(work), "--seed", str(case)]
        if erase:
            argv += ["--erase", ",".join(map(str, erase))]
        if corrupt:
            argv += ["--corrupt", ",".join(map(str, corrupt))]
        assert main(argv) == EXIT_OK
        dest = work / "back.bin"
        assert main([
            "reconstruct", str(work), "-o", str(dest), "-s", str(s), "-t", str(t),
        ]) == EXIT_OK
        assert dest.read_bytes() == data, (s, t)
        target = erase[0] if erase else rng.choice(
            [i for i in range(1, 8) if i not in corrupt]
        )
        alt = work / "repaired"
        assert main([
            "repair", str(work), "--node", str(target),
            "-s", "0", "-t", str(t), "-o", str(alt),
        ]) == EXIT_OK
        assert (alt / shard_filename(target)).read_bytes() == pristine[target], (s, t)


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "pmrc.cli", "info", "--mode", "mbr", "-k", "2", "-d", "3", "-n", "6"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "[6, 2, 3]" in proc.stdout
