import json

import pytest

from twistlab import cli, heyting


@pytest.fixture()
def three_file(tmp_path, three):
    path = tmp_path / "three.json"
    path.write_text(json.dumps(heyting.heyting_to_json(three)))
    return str(path)


@pytest.fixture()
def kleene_file(tmp_path, three):
    path = tmp_path / "kleene.json"
    data = {"type": "twist", "base": heyting.heyting_to_json(three),
            "nabla": [1, 2], "delta": [0, 1],
            "formulas": ["(p & ~p) -> (q | ~q)"]}
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_validate_ok(capsys, three_file):
    code, out = run(capsys, "validate", three_file)
    assert code == 0 and "ok" in out


def test_validate_violation(capsys, tmp_path, three):
    data = heyting.heyting_to_json(three)
    data["imp"][1][0] = 1  # mid -> bot must be bot
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    code, out = run(capsys, "validate", str(path))
    assert code == 1 and "residuation" in out


def test_validate_missing_file(capsys):
    code, _ = run(capsys, "validate", "/nonexistent/x.json")
    assert code == 2


def test_validate_poset_and_twist(capsys, tmp_path, kleene_file):
    poset = tmp_path / "poset.json"
    poset.write_text(json.dumps(
        {"type": "poset", "size": 2, "le": [[0, 0], [1, 1], [0, 1]]}))
    assert run(capsys, "validate", str(poset))[0] == 0
    assert run(capsys, "validate", kleene_file)[0] == 0


def test_validate_twist_precondition(capsys, tmp_path, three):
    path = tmp_path / "badtwist.json"
    path.write_text(json.dumps(
        {"type": "twist", "base": heyting.heyting_to_json(three),
         "nabla": [2], "delta": [0]}))
    code, out = run(capsys, "validate", str(path))
    assert code == 1 and "dense" in out


def test_check_valid_formula(capsys, kleene_file):
    code, out = run(capsys, "check", kleene_file, "(p & ~p) -> (q | ~q)")
    assert code == 0 and "valid" in out


def test_check_refuted_formula(capsys, kleene_file):
    code, out = run(capsys, "--format", "json", "check", kleene_file,
                    "!!(p & ~p) -> (q | ~q)")
    assert code == 1
    payload = json.loads(out)
    (row,) = payload["result"]
    assert row["witness"]["valuation"] == {"p": [1, 1], "q": [0, 1]}
    assert row["witness"]["value"] == [1, 0]
    assert payload["tool"] == "twistlab"


def test_check_formulas_from_file(capsys, kleene_file):
    code, out = run(capsys, "check", kleene_file)
    assert code == 0 and "valid" in out


def test_check_language_mismatch(capsys, three_file):
    code, _ = run(capsys, "check", three_file, "[]p -> p")
    assert code == 2


def test_check_parse_error(capsys, kleene_file):
    code, _ = run(capsys, "check", kleene_file, "p &")
    assert code == 2


def test_translate_tb_golden(capsys):
    code, out = run(capsys, "translate", "--tb", "(p & ~p) -> (q | ~q)")
    assert code == 0
    assert out.splitlines()[-1] == \
        "[]((([]p) & ([]~p)) -> (([]q) | ([]~q)))"


def test_translate_gt(capsys):
    code, out = run(capsys, "translate", "--gt", "p -> q")
    assert code == 0
    assert out.splitlines()[-1] == "[](([]p) -> ([]q))"


def test_translate_rejects_modal(capsys):
    code, _ = run(capsys, "translate", "--tb", "[]p")
    assert code == 2


def test_companion_pipeline(capsys, tmp_path, three_file):
    corpus = tmp_path / "corpus.json"
    corpus.write_text(json.dumps(
        ["(p & ~p) -> (q | ~q)", "p -> p", "~~p <-> p"]))
    code, out = run(capsys, "--format", "json", "companion", three_file,
                    "--nabla", "1,2", "--delta", "0,1",
                    "--corpus", str(corpus))
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["twtop"]["mismatches"] == 0
    assert payload["result"]["instance"]["tba_size"] == 4


def test_companion_bad_filter(capsys, three_file):
    code, _ = run(capsys, "companion", three_file,
                  "--nabla", "2", "--delta", "0")
    assert code == 2


def test_grz_search_bounded_evidence(capsys):
    code, out = run(capsys, "grz-search",
                    "[](p | q) & (([]p | []<>!p) & ([]q | []<>!q))"
                    " -> ([]p | []q)", "--max-worlds", "3")
    assert code == 0 and "bounded evidence" in out


def test_grz_search_refutation(capsys):
    code, out = run(capsys, "--format", "json", "grz-search",
                    "<>[]p -> []<>p", "--max-worlds", "4")
    assert code == 1
    payload = json.loads(out)
    assert payload["result"]["refuted"] is True
    assert payload["result"]["frame"]["size"] == 3


def test_kleene_demo(capsys):
    code, out = run(capsys, "--format", "json", "kleene-demo")
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["kleene_axiom_valid"] is True
    assert payload["result"]["modified_axiom_refuted"] is True
    assert payload["result"]["scan"]["violations"] == []


def test_kleene_demo_transcript(capsys):
    code, out = run(capsys, "kleene-demo")
    assert code == 0 and "[checked]" in out and "[glue]" in out


def test_enumerate_posets(capsys):
    code, out = run(capsys, "enumerate", "--type", "poset", "--max-size", "2")
    assert code == 0
    assert "count: 4" in out  # one singleton poset plus three on two points
    code2, out2 = run(capsys, "enumerate", "--type", "poset",
                      "--max-size", "2")
    assert out2 == out  # byte-deterministic


def test_enumerate_heyting_json(capsys):
    code, out = run(capsys, "--format", "json", "enumerate", "--type",
                    "heyting", "--max-size", "2")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["result"]) == 4
    assert all(item["type"] == "heyting" for item in payload["result"])


def test_twist_base_by_path(capsys, tmp_path, three):
    base = tmp_path / "base.json"
    base.write_text(json.dumps(heyting.heyting_to_json(three)))
    twist_file = tmp_path / "twist.json"
    twist_file.write_text(json.dumps(
        {"type": "twist", "base": "base.json", "nabla": [1, 2],
         "delta": [0, 1]}))
    code, _ = run(capsys, "validate", str(twist_file))
    assert code == 0
    code, _ = run(capsys, "check", str(twist_file), "(p & ~p) -> (q | ~q)")
    assert code == 0
