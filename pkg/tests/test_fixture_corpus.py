"""Exit-code contract over the shipped fixture corpus."""

import json
from pathlib import Path

import pytest

from unistoch.cli import run

FIXTURES = Path(__file__).parent / "fixtures"

MATRIX_CASES = [
    # (file, subcommand, expected exit code, expected fragment in stdout)
    ("circulant.json", "certify", 0, '"refuted_exact"'),
    ("circulant.json", "classify", 0, '"bistochastic"'),
    ("circulant.json", "decompose", 0, '"singular_values"'),
    ("identity3.json", "classify", 0, '"orthostochastic"'),
    ("permutation4.json", "classify", 0, '"orthostochastic"'),
    ("bistochastic4.json", "classify", 0, '"label"'),
    ("unistochastic4.json", "certify", 0, '"certified"'),
    ("stochastic_only2.json", "classify", 0, '"stochastic"'),
    ("invalid_rowsum.json", "certify", 1, None),
    ("invalid_rowsum.json", "classify", 1, None),
    ("invalid_negative.json", "classify", 1, None),
    ("invalid_nonsquare.json", "classify", 1, None),
    ("invalid_notjson.json", "classify", 1, None),
]


@pytest.mark.parametrize("name,command,code,fragment", MATRIX_CASES)
def test_matrix_corpus_exit_codes(name, command, code, fragment, capsys):
    assert run([command, "--input", str(FIXTURES / name), "--seed", "1"]) == code
    captured = capsys.readouterr()
    if code == 0:
        if fragment is not None:
            assert fragment in captured.out
    else:
        err = json.loads(captured.err)
        assert err["error"]["type"] == "validation"


def test_context_pair_corpus(capsys):
    assert run(["born", "--input", str(FIXTURES / "context_pair3.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["certificate"]["verdict"] == "certified"


def test_context_pair_rejected_by_matrix_commands(capsys):
    assert run(["classify", "--input", str(FIXTURES / "context_pair3.json")]) == 1
    capsys.readouterr()
