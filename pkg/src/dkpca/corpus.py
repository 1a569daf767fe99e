"""Labeled lexical-sample corpora and their bag-of-words matrices.

A dataset is a UTF-8 TSV file with one ``label<TAB>text`` instance per
line.  Text is expected to be pre-tokenized (whitespace separated, as the
SensEval distributions are), so punctuation arrives as separate tokens and
is dropped by the alphabetic filter in :func:`tokenize`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError, ParseError, ResourceError

#: m * N above this raises ResourceError (about 2 GB of float64).
DEFAULT_MAX_CELLS = 250_000_000


@dataclass(frozen=True)
class Instance:
    label: str
    text: str

    def __post_init__(self):
        if not str(self.label).strip():
            raise DatasetError("instance label is empty")
        if not self.text.strip():
            raise DatasetError("instance text is empty")


@dataclass(frozen=True)
class LabeledCorpus:
    """Ordered instances for a single ambiguous target word."""

    target_word: str
    instances: tuple[Instance, ...]
    sense_inventory: frozenset = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        seen = frozenset(inst.label for inst in self.instances)
        if self.sense_inventory is None:
            object.__setattr__(self, "sense_inventory", seen)
        else:
            object.__setattr__(self, "sense_inventory", frozenset(self.sense_inventory))
            unknown = seen - self.sense_inventory
            if unknown:
                raise DatasetError(f"labels outside the sense inventory: {sorted(unknown)}")
        if len(self.instances) < 2:
            raise DatasetError(f"need at least 2 instances, got {len(self.instances)}")
        if len(seen) < 2:
            raise DatasetError(f"need at least 2 distinct senses, got {len(seen)}")

    def __len__(self):
        return len(self.instances)

    @property
    def labels(self) -> list[str]:
        return [inst.label for inst in self.instances]

    @property
    def texts(self) -> list[str]:
        return [inst.text for inst in self.instances]

    def sense_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for inst in self.instances:
            counts[inst.label] = counts.get(inst.label, 0) + 1
        return counts


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        index = {t: i for i, t in enumerate(self.terms)}
        if len(index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DocumentTermMatrix:
    """Raw term-frequency matrix, documents as rows."""

    values: np.ndarray
    vocab: Vocabulary

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(self.vocab):
            raise ValueError(f"matrix shape {values.shape} does not match vocabulary size {len(self.vocab)}")
        if (values < 0).any():
            raise ValueError("term frequencies must be non-negative")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def doc_count(self) -> int:
        return self.values.shape[0]

    @property
    def term_count(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IncidenceMatrix:
    """Binary term-presence matrix; B[i, j] = 1 iff term j occurs in document i."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if not np.isin(values, (0, 1)).all():
            raise ValueError("incidence entries must be 0 or 1")
        object.__setattr__(self, "values", _frozen(values.astype(np.int64)))

    @classmethod
    def from_doc_term(cls, dtm: DocumentTermMatrix) -> "IncidenceMatrix":
        return cls((dtm.values > 0).astype(np.int64))


def load_dataset(path, format: str = "tsv", target_word: str | None = None) -> LabeledCorpus:
    """Read a ``label<TAB>text`` file into a :class:`LabeledCorpus`.

    Blank lines are skipped. The target word defaults to the file stem
    (``interest.tsv`` -> ``interest``).
    """
    if format != "tsv":
        raise DatasetError(f"unsupported dataset format {format!r}")
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    instances = []
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            label, sep, text = line.partition("\t")
            if not sep:
                raise ParseError("expected 'label<TAB>text'", lineno, path)
            label = label.strip()
            if not label:
                raise ParseError("empty label", lineno, path)
            if not text.strip():
                raise ParseError("empty context text", lineno, path)
            instances.append(Instance(label, text))
    if not instances:
        raise DatasetError(f"dataset is empty: {path}")
    try:
        return LabeledCorpus(target_word or path.stem, instances)
    except DatasetError as exc:
        raise DatasetError(f"{path}: {exc}") from None


def load_stopwords(path=None) -> frozenset[str]:
    """Stopword set from a one-word-per-line file; the bundled English list by default."""
    if path is None:
        text = resources.files("dkpca").joinpath("data/stopwords_en.txt").read_text(encoding="utf-8")
    else:
        p = Path(path)
        if not p.is_file():
            raise DatasetError(f"stopword file not found: {p}")
        text = p.read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def tokenize(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    """Lowercase whitespace tokens, keeping purely alphabetic ones that are not stopwords.

    >>> tokenize("Today is very cold and dark", {"is", "very", "and"})
    ['today', 'cold', 'dark']
    """
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [tok for tok in text.lower().split() if tok.isalpha() and tok not in stop]


def target_forms(target_word: str, extra: Iterable[str] = ()) -> frozenset[str]:
    """Surface forms of the target word removed from every context.

    The lowercase lemma and its regular plural are always included.
    """
    lemma = target_word.strip().lower()
    forms = {lemma, lemma + "s"} if lemma else set()
    forms.update(f.strip().lower() for f in extra if f.strip())
    return frozenset(forms)


def build_vocabulary(
    corpus: LabeledCorpus,
    stopwords: Iterable[str] = (),
    forms: Iterable[str] | None = None,
) -> Vocabulary:
    """Vocabulary in first-occurrence order, with the target word removed.

    ``forms`` overrides the removed surface forms; by default they come from
    :func:`target_forms` applied to ``corpus.target_word``.
    """
    stop = frozenset(stopwords)
    drop = target_forms(corpus.target_word) if forms is None else frozenset(f.lower() for f in forms)
    seen: dict[str, None] = {}
    for text in corpus.texts:
        for tok in tokenize(text, stop):
            if tok not in drop:
                seen.setdefault(tok, None)
    if not seen:
        raise DatasetError("vocabulary is empty after stopword and target-word filtering")
    return Vocabulary(tuple(seen))


def build_doc_term_matrix(
    corpus: LabeledCorpus,
    vocab: Vocabulary,
    stopwords: Iterable[str] = (),
    max_cells: int = DEFAULT_MAX_CELLS,
) -> tuple[DocumentTermMatrix, IncidenceMatrix]:
    m, n = len(corpus), len(vocab)
    if m * n > max_cells:
        raise ResourceError(f"{m} x {n} document-term matrix exceeds the {max_cells} cell cap")
    stop = frozenset(stopwords)
    counts = np.zeros((m, n), dtype=np.float64)
    index = vocab.index
    for i, text in enumerate(corpus.texts):
        for tok in tokenize(text, stop):
            j = index.get(tok)
            if j is not None:
                counts[i, j] += 1.0
    dtm = DocumentTermMatrix(counts, vocab)
    return dtm, IncidenceMatrix.from_doc_term(dtm)


def corpus_from_pairs(target_word: str, pairs: Sequence[tuple[str, str]]) -> LabeledCorpus:
    """Convenience constructor from ``(label, text)`` pairs."""
    return LabeledCorpus(target_word, [Instance(str(lab), text) for lab, text in pairs])
