import random
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dkpca.corpus import corpus_from_pairs  # noqa: E402

TOY_SENTENCES = [
    "Today is very cold and dark",
    "Dark rooms have generally have mold",
    "Mold can cause sickness",
]

SENSE_WORDS = {
    "1": "bank rate loan percent paid money pay debt credit mortgage".split(),
    "2": "stake company shares owner business equity holder firm".split(),
    "3": "attention curiosity hobby passion reading enjoy music fan".split(),
}


def synthetic_pairs(n_docs=20, seed=0, target="interest"):
    rng = random.Random(seed)
    labels = sorted(SENSE_WORDS)
    noise = [w for ws in SENSE_WORDS.values() for w in ws]
    pairs = []
    for i in range(n_docs):
        lab = labels[i % len(labels)]
        words = rng.sample(SENSE_WORDS[lab], 3) + rng.sample(noise, 2) + [target]
        rng.shuffle(words)
        pairs.append((lab, "the " + " ".join(words) + " ."))
    return pairs


@pytest.fixture
def toy_corpus():
    return corpus_from_pairs("today", [("a", TOY_SENTENCES[0]), ("b", TOY_SENTENCES[1]), ("b", TOY_SENTENCES[2])])


@pytest.fixture
def synthetic_corpus():
    return corpus_from_pairs("interest", synthetic_pairs(20, seed=0))


@pytest.fixture
def write_tsv(tmp_path):
    def _write(pairs, name="interest.tsv"):
        path = tmp_path / name
        path.write_text("".join(f"{lab}\t{text}\n" for lab, text in pairs), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion in the terminal summary
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome
    elif report.when == "setup" and report.skipped and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = "skipped"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE.items():
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{status:<8}{name}")
