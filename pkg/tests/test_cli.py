import json

import pytest

from critlocus.cli import build_parser, main


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, out.read_text()


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["verify", "nonsense"])
    assert exc.value.code == 2


def test_verify_cdga_passes(tmp_path):
    code, text = run(["verify", "cdga", "--n", "1"], tmp_path)
    assert code == 0
    payload = json.loads(text)
    assert payload["ok"] is True
    assert payload["tool"] == "critlocus"
    assert all(c["verdict"] in ("pass", "fail", "warning") for c in payload["checks"])
    assert all("operation" in c and "claim" in c for c in payload["checks"])


def test_text_format(tmp_path):
    out = tmp_path / "report.txt"
    code = main(["partitions", "--n", "3", "--format", "text", "--out", str(out)])
    assert code == 0
    assert "overall: pass" in out.read_text()


def test_ext_report_shape(tmp_path):
    code, text = run(["ext", "--n", "1", "--corpus", "partitions"], tmp_path)
    assert code == 0
    names = [c["name"] for c in json.loads(text)["checks"]]
    assert "ext.oracle_agreement" in names
    assert "ext.serre_pairing" in names
    assert "ext.prime_comparison" in names


def test_toric_chart_round_trip_payload(tmp_path):
    code, text = run(
        [
            "toric",
            "chart",
            "--surface",
            '{"base": "F1"}',
            "--points",
            '[["1", "1", "2", "3"], ["1", "0", "1", "1"]]',
        ],
        tmp_path,
    )
    assert code == 0
    payload = json.loads(text)
    assert len(payload["coordinates"]) == 2
    assert payload["chart"]["surface"] == "F1"


def test_toric_chart_tower_with_exceptional_point(tmp_path):
    code, text = run(
        [
            "toric",
            "chart",
            "--surface",
            '{"base": "P2", "blowups": [0]}',
            "--points",
            '[["1", "2", "3"], {"center": 0, "direction": ["1", "1", "1"]}]',
        ],
        tmp_path,
    )
    assert code == 0
    payload = json.loads(text)
    assert len(payload["coordinates"]) == 2


def test_cover_stats_subcommand(tmp_path):
    code, text = run(
        [
            "toric",
            "cover-stats",
            "--surface",
            '{"base": "P2"}',
            "--trials",
            "10",
            "--seed",
            "3",
        ],
        tmp_path,
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["checks"][0]["details"]["successes"] == 10


def test_all_battery_rank_one(tmp_path):
    code, text = run(["all", "--n", "1", "--samples", "5"], tmp_path)
    assert code == 0
    payload = json.loads(text)
    assert payload["ok"] is True
    # the full battery touches every subsystem
    prefixes = {c["name"].split(".")[0] for c in payload["checks"]}
    assert {
        "cdga",
        "cotangent",
        "superpotential",
        "family",
        "resolution",
        "chainmap",
        "ext",
        "partitions",
        "toric",
    } <= prefixes


def test_corpus_file_round_trip(tmp_path):
    from critlocus.points import (
        enumerate_partitions,
        load_corpus,
        point_from_partition,
        save_corpus,
    )

    pts = [point_from_partition(pp) for pp in enumerate_partitions(3)]
    path = tmp_path / "corpus.json"
    save_corpus(pts, path)
    back = load_corpus(path)
    assert len(back) == len(pts)
    for a, b in zip(pts, back):
        assert a.X == b.X and a.Y == b.Y and a.Z == b.Z and a.v == b.v
        assert b.provenance == "partition"


def test_warning_verdict_supported():
    from critlocus.report import Report

    rep = Report({"n": 1})
    rep.warn("demo", "homology_dims", "prime disagreement is a warning")
    assert rep.ok  # warnings do not fail the run
    assert rep.to_dict()["checks"][0]["verdict"] == "warning"


def test_ext_corpus_file_round_trip(tmp_path):
    corpus = tmp_path / "corpus.json"
    code, _ = run(
        ["ext", "--n", "2", "--corpus", "partitions", "--save-corpus", str(corpus)],
        tmp_path,
        "first.json",
    )
    assert code == 0
    code, text = run(
        ["ext", "--corpus", "none", "--corpus-file", str(corpus)],
        tmp_path,
        "second.json",
    )
    assert code == 0
    payload = json.loads(text)
    agreement = next(
        c for c in payload["checks"] if c["name"] == "ext.oracle_agreement"
    )
    assert agreement["verdict"] == "pass"
    assert agreement["details"]["points"] == 3


def test_ext_report_has_per_point_details(tmp_path):
    code, text = run(["ext", "--n", "2", "--corpus", "partitions"], tmp_path)
    assert code == 0
    payload = json.loads(text)
    agreement = next(
        c for c in payload["checks"] if c["name"] == "ext.oracle_agreement"
    )
    per_point = agreement["details"]["per_point"]
    assert len(per_point) == 3
    for rec in per_point:
        assert rec["provenance"] == "partition"
        assert len(rec["dims"]) == 4
        # perfect pairing: rank equals the paired dimensions
        assert rec["pairing_ranks"] == [rec["dims"][0], rec["dims"][1]]
