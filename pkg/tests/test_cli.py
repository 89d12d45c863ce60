import json

import pytest

from audit_log import recent_events
from cli import EXIT_CAP, EXIT_CONFIG, EXIT_FAILED, EXIT_OK, main
from config import CSV_COLUMNS
from db import get_db
from manifest import check_hashes_txt


def kv_lines(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            out[key] = value
    return out


def test_construct_repetition(tmp_path, capsys):
    out = tmp_path / "rep.txt"
    code = main(["construct", "--construction", "repetition", "--n", "4", "--k", "2",
                 "--delta", "1", "--out", str(out)])
    assert code == EXIT_OK
    meta = kv_lines(capsys.readouterr().out)
    assert (meta["kind"], meta["m"], meta["n"], meta["block"]) == ("repetition", "8", "4", "2")
    hashes = (tmp_path / "rep.txt.sha256").read_text()
    assert check_hashes_txt(hashes, tmp_path) == {"rep.txt": True, "rep.txt.meta": True}


def test_construct_bernoulli_row_count(tmp_path, capsys):
    code = main(["construct", "--construction", "bernoulli", "--n", "100", "--k", "3",
                 "--delta", "4", "--seed", "7", "--out", str(tmp_path / "b.txt")])
    assert code == EXIT_OK
    meta = kv_lines(capsys.readouterr().out)
    assert meta["m"] == "161" and meta["seed"] == "7"


def test_construct_padded(tmp_path, capsys):
    assert main(["construct", "--construction", "padded-ks", "--delta", "1",
                 "--out", str(tmp_path / "p.txt")]) == EXIT_OK
    meta = kv_lines(capsys.readouterr().out)
    assert (meta["m"], meta["n"], meta["q"], meta["k_max"]) == ("56", "25", "13", "2")
    assert (tmp_path / "p.txt.codebook").is_file()


def test_construct_needs_out(capsys):
    assert main(["construct", "--construction", "repetition", "--n", "3"]) == EXIT_CONFIG


def test_trial_is_byte_identical_without_timing(tmp_path):
    args = ["trial", "--construction", "bernoulli", "--n", "12", "--k", "2", "--delta", "2",
            "--trials", "10", "--seed", "3", "--no-timing"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()

    lines = a.read_text().splitlines()
    assert lines[0] == "# rng=numpy.random.PCG64"
    assert lines[1] == ",".join(CSV_COLUMNS)
    assert len(lines) == 12
    rows = [dict(zip(CSV_COLUMNS, line.split(","))) for line in lines[2:]]
    assert [r["trial"] for r in rows] == [str(i) for i in range(10)]
    assert [r["seed"] for r in rows] == [str(3 + i) for i in range(10)]
    assert all(r["time_us"] == "0" and r["success"] in ("0", "1") for r in rows)

    summary = json.loads((tmp_path / "a.csv.summary.json").read_text())
    assert summary["trials"] == 10
    assert summary["successes"] == sum(int(r["success"]) for r in rows)
    assert len(summary["records"]) == 10
    assert all(r["diagnostics"]["runtime_us"] == 0 for r in summary["records"])
    other = json.loads((tmp_path / "b.csv.summary.json").read_text())
    assert other["records"] == summary["records"]


def test_trial_with_zero_trials_writes_header(capsys):
    assert main(["trial", "--construction", "repetition", "--n", "4", "--trials", "0"]) == EXIT_OK
    assert capsys.readouterr().out == "# rng=numpy.random.PCG64\n" + ",".join(CSV_COLUMNS) + "\n"


def test_trial_singleton_decoder(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["trial", "--construction", "saffron", "--n", "16", "--k", "2", "--delta", "1",
                 "--decoder", "singleton", "--trials", "5", "--no-timing", "--out", str(out)]) == EXIT_OK
    summary = json.loads((tmp_path / "s.csv.summary.json").read_text())
    assert all("accepted_blocks" in r["diagnostics"] for r in summary["records"])


def test_trial_on_loaded_scheme(tmp_path, capsys):
    path = tmp_path / "rep.txt"
    main(["construct", "--construction", "repetition", "--n", "4", "--k", "2", "--delta", "2",
          "--out", str(path)])
    capsys.readouterr()
    assert main(["trial", "--scheme", str(path), "--decoder", "repetition",
                 "--adversary", "prefix", "--trials", "6", "--no-timing"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()[2:]
    assert len(rows) == 6
    assert all(row.startswith("repetition,4,12,2,2,") for row in rows)
    assert all(row.split(",")[9] == "1" for row in rows)


def test_tampered_scheme_is_rejected(tmp_path, capsys):
    path = tmp_path / "b.txt"
    main(["construct", "--construction", "bernoulli", "--n", "6", "--out", str(path)])
    path.write_text(path.read_text().replace("1", "0", 1))
    assert main(["trial", "--scheme", str(path)]) == EXIT_CONFIG


def test_incompatible_decoder_is_a_config_error():
    assert main(["trial", "--construction", "saffron", "--decoder", "repetition"]) == EXIT_CONFIG
    assert main(["trial", "--adversary", "bitflip"]) == EXIT_CONFIG


def test_verify_exit_codes(capsys):
    assert main(["verify", "--construction", "repetition", "--n", "4", "--k", "2", "--delta", "2",
                 "--property", "del-separable"]) == EXIT_OK
    assert kv_lines(capsys.readouterr().out)["holds"] == "true"

    assert main(["verify", "--construction", "bernoulli", "--n", "5", "--k", "1", "--delta", "0",
                 "--property", "disjunct"]) == EXIT_FAILED
    report = kv_lines(capsys.readouterr().out)
    assert report["holds"] == "false"
    assert (report["witness.column"], report["witness.others"]) == ("0", "1")


def test_verify_cap_exceeded():
    assert main(["verify", "--construction", "bernoulli", "--n", "12", "--k", "2", "--delta", "2",
                 "--property", "del-disjunct", "--cap", "10"]) == EXIT_CAP


def test_distances(tmp_path, capsys):
    assert main(["distances", "010100", "000110", "--delta", "2", "--t", "1"]) == EXIT_OK
    out = kv_lines(capsys.readouterr().out)
    assert out["lcs"] == "4"
    assert out["deletion_distance"] == "1"
    assert out["adel_at_least"] == "false"
    assert out["check_coverage"] == "false"

    f = tmp_path / "y.txt"
    f.write_text("1110\n")
    assert main(["distances", "110", str(f), "--t", "1"]) == EXIT_OK
    out = kv_lines(capsys.readouterr().out)
    assert out["check_coverage"] == "true"
    assert "deletion_distance" not in out


def test_distances_rejects_bad_vectors():
    assert main(["distances", "01x", "010"]) == EXIT_CONFIG
    assert main(["distances", "0101", "01", "--t", "1"]) == EXIT_CONFIG


def test_config_file_then_flags(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# repetition experiment\nconstruction = repetition\nn = 3\ndelta = 1\n")
    assert main(["construct", "--config", str(cfg), "--n", "5", "--out", str(tmp_path / "m.txt")]) == EXIT_OK
    meta = kv_lines(capsys.readouterr().out)
    assert (meta["n"], meta["m"], meta["delta"]) == ("5", "10", "1")

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["construct", "--config", str(bad), "--out", str(tmp_path / "x.txt")]) == EXIT_CONFIG


def test_vault_records_runs(tmp_path, capsys):
    vault = tmp_path / "runs.db"
    main(["construct", "--construction", "repetition", "--n", "4", "--out", str(tmp_path / "r.txt"),
          "--vault", str(vault)])
    main(["trial", "--construction", "repetition", "--n", "4", "--decoder", "repetition",
          "--trials", "3", "--no-timing", "--vault", str(vault), "--out", str(tmp_path / "t.csv")])
    main(["verify", "--construction", "repetition", "--n", "4", "--k", "1", "--delta", "1",
          "--property", "column-weights", "--vault", str(vault)])
    capsys.readouterr()

    assert main(["runs", "--vault", str(vault)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "run 1 construct" in out and "run 2 trial" in out and "run 3 verify" in out
    assert "trials.csv: hash verified" in out
    assert "hash mismatch" not in out

    con = get_db(vault)
    assert [e["command"] for e in recent_events(con)] == ["verify", "trial", "construct"]
    con.execute("UPDATE artifacts SET content = ? WHERE name = 'trials.csv'", (b"tampered",))
    con.commit()
    con.close()
    assert main(["runs", "--vault", str(vault)]) == EXIT_FAILED
    assert "trials.csv: hash mismatch" in capsys.readouterr().out


def test_runs_needs_vault():
    assert main(["runs"]) == EXIT_CONFIG


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["bogus"])
