import json

import pytest

from dft.cli import main
from dft.sweep import SweepConfig, run_sweep


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_info(capsys):
    code, out = run_cli(capsys, "info", "3^-1")
    assert code == 0
    assert out["order"] == 3 and out["level"] == 3 and out["signature"] == 2
    code, out = run_cli(capsys, "info", "1")
    assert code == 0
    assert (out["order"], out["level"], out["signature"]) == (1, 1, 0)


def test_info_invalid_symbol_exits_2(capsys):
    code, out = run_cli(capsys, "info", "2^+1")
    assert code == 2
    assert out["error"]["type"] == "ValidityError"


def test_syntax_error_exits_2(capsys):
    code, out = run_cli(capsys, "classify", "2_^1")
    assert code == 2
    assert out["error"]["type"] == "SymbolSyntaxError"


def test_classify(capsys):
    code, out = run_cli(capsys, "classify", "2_2^+6")
    assert code == 0 and out["small"] is True
    assert out["rule"].startswith("D3:")
    code, out = run_cli(capsys, "classify", "3^+6")
    assert code == 0 and out["small"] is False
    code, out = run_cli(capsys, "classify", "2_1^+1.3^-1")
    assert out["small"] is True and set(out["per_prime"]) == {"2", "3"}


def test_image(capsys):
    code, out = run_cli(capsys, "image", "2_II^+2", "--witnesses")
    assert code == 0
    assert out["rank"] == 2 and out["full_image"] is False
    assert out["graph_agrees"] is True
    assert [0, 0] in out["witnesses"] and [1, 1] in out["witnesses"]
    code, out = run_cli(capsys, "image", "2_II^-6")
    assert out["rank"] == 64 and out["full_image"] is True


def test_image_per_element(capsys):
    code, out = run_cli(capsys, "image", "2_II^+2", "--per-element")
    assert code == 0
    assert out["members"]["(1, 1)"] is False


def test_bound_exceeded_exits_3(capsys, monkeypatch):
    monkeypatch.setenv("DFT_MAX_SPAN_ORDER", "16")
    code, out = run_cli(capsys, "image", "2_II^+6")
    assert code == 3
    assert out["error"]["type"] == "BoundExceeded"


def test_graph_command(capsys, tmp_path):
    dot = tmp_path / "g.dot"
    code, out = run_cli(capsys, "graph", "2_II^+2", "--dot", str(dot))
    assert code == 0
    assert out["components"] == 2 and out["vertices"] == 4
    assert dot.read_text().startswith("graph isotropy {")


def test_graph_rejects_odd_level(capsys):
    code, out = run_cli(capsys, "graph", "3^-1")
    assert code == 1 and out["error"]["type"] == "NotTwoAdic"


def test_weil_check(capsys):
    code, out = run_cli(capsys, "weil", "2_1^+1", "--check")
    assert code == 0 and out["all_pass"] is True


def test_verify_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


def test_sweep_cli_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    code, summary = run_cli(capsys, "classify-sweep", "--max-order", "27",
                            "--primes", "3", "--out", str(out1))
    assert code == 0
    assert summary["disagreements"] == []
    code, _ = run_cli(capsys, "classify-sweep", "--max-order", "27",
                      "--primes", "3", "--out", str(out2), "--jobs", "3")
    assert code == 0

    def strip_timing(path):
        lines = []
        for line in path.read_text().splitlines():
            rec = json.loads(line)
            rec.pop("elapsed_ms", None)
            lines.append(json.dumps(rec, sort_keys=True))
        return lines

    assert strip_timing(out1) == strip_timing(out2)


def test_sweep_resume_equals_fresh(tmp_path):
    fresh = tmp_path / "fresh.jsonl"
    run_sweep(SweepConfig(max_order=16, primes=(2,), out=str(fresh)))
    partial = tmp_path / "partial.jsonl"
    # seed a partial file: header plus a strict subset of records
    lines = fresh.read_text().splitlines()
    partial.write_text("\n".join(lines[:5]) + "\n")
    reused = []
    summary = run_sweep(SweepConfig(max_order=16, primes=(2,),
                                    out=str(partial), resume=True),
                        log=reused.append)
    assert summary["disagreements"] == []
    assert any("reused 4" in line for line in reused)

    def strip(path):
        out = []
        for line in path.read_text().splitlines():
            rec = json.loads(line)
            rec.pop("elapsed_ms", None)
            out.append(json.dumps(rec, sort_keys=True))
        return out

    assert strip(fresh) == strip(partial)


def test_sweep_resume_config_mismatch(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    run_sweep(SweepConfig(max_order=9, primes=(3,), out=str(out)))
    code, err = run_cli(capsys, "classify-sweep", "--max-order", "27",
                        "--primes", "3", "--out", str(out), "--resume")
    assert code == 2 and err["error"]["type"] == "ConfigError"
