"""Repeated train/test evaluation of the kernel-PCA + KNN pipeline.

The kernel and its projection are computed once over every instance; only
the classifier sees the split (transductive protocol). Each repeat draws a
fresh uniform split from a PCG64 stream seeded by ``(seed, repeat)``.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import classify, kernels, kpca
from .corpus import LabeledCorpus, build_doc_term_matrix, build_vocabulary, load_stopwords, target_forms
from .errors import ContractViolation, DKPCAError, ParameterError

log = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.05, 0.10, 0.30)
DEFAULT_REPEATS = 10
REPORT_HEADER = ("dataset", "kernel", "ratio", "repeat", "accuracy", "f1_micro", "f1_macro")


class SplitWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SplitPlan:
    ratio: float
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ParameterError(f"labeled ratio must lie in (0, 1), got {self.ratio}")
        if int(self.repeats) != self.repeats or self.repeats < 1:
            raise ParameterError(f"repeats must be a positive integer, got {self.repeats}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    f1_micro: float
    f1_macro: float

    @classmethod
    def mean(cls, sets: Sequence["MetricSet"]) -> "MetricSet":
        if not sets:
            raise ParameterError("cannot average an empty list of metrics")
        return cls(*(math.fsum(getattr(s, f) for s in sets) / len(sets)
                     for f in ("accuracy", "f1_micro", "f1_macro")))


def train_size(corpus_size: int, ratio: float) -> int:
    """``round(ratio * m)`` with halves rounded up."""
    return int(math.floor(ratio * corpus_size + 0.5))


def repeat_rng(seed: int, repeat: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(repeat)])))


def _stratified_train(rng, labels, n_train):
    labels = np.asarray(labels)
    classes = sorted(set(labels.tolist()), key=str)
    members = {c: np.flatnonzero(labels == c) for c in classes}
    m = len(labels)
    quotas = {c: n_train * len(members[c]) / m for c in classes}
    alloc = {c: int(math.floor(q)) for c, q in quotas.items()}
    # largest remainder, ties by class order
    leftover = n_train - sum(alloc.values())
    for c in sorted(classes, key=lambda c: -(quotas[c] - alloc[c]))[:leftover]:
        alloc[c] += 1
    picked = [rng.permutation(members[c])[: alloc[c]] for c in classes]
    return np.concatenate(picked)


def make_splits(corpus_size: int, plan: SplitPlan, labels: Sequence | None = None):
    """``plan.repeats`` random (train, test) index partitions, each sorted ascending.

    ``labels`` is needed for stratified plans and enables the unseen-sense
    warning when the training set is smaller than the number of senses.
    """
    if corpus_size < 2:
        raise ParameterError(f"need at least 2 instances to split, got {corpus_size}")
    n_train = train_size(corpus_size, plan.ratio)
    if n_train < 1:
        raise ParameterError(f"ratio {plan.ratio} leaves no training instance out of {corpus_size}")
    if n_train >= corpus_size:
        raise ParameterError(f"ratio {plan.ratio} leaves no test instance out of {corpus_size}")
    if labels is not None:
        if len(labels) != corpus_size:
            raise ParameterError(f"{len(labels)} labels for {corpus_size} instances")
        n_classes = len(set(labels))
        if n_train < n_classes:
            warnings.warn(f"training size {n_train} is below the {n_classes} senses; "
                          "some senses cannot be seen in training", SplitWarning, stacklevel=2)
    elif plan.stratified:
        raise ParameterError("stratified splits need the instance labels")

    splits = []
    everything = np.arange(corpus_size)
    for r in range(plan.repeats):
        rng = repeat_rng(plan.seed, r)
        if plan.stratified:
            train = _stratified_train(rng, labels, n_train)
        else:
            train = rng.permutation(corpus_size)[:n_train]
        train = np.sort(train)
        test = np.setdiff1d(everything, train, assume_unique=True)
        splits.append((train, test))
    return splits


def compute_metrics(predictions: Sequence, truth: Sequence, inventory: Iterable | None = None) -> MetricSet:
    """Accuracy with micro- and macro-averaged F1 over the sense inventory.

    Macro-F1 averages over every inventory class; a class with
    precision + recall = 0 (including one absent from both truth and
    predictions) contributes 0.
    """
    predictions = list(predictions)
    truth = list(truth)
    if len(predictions) != len(truth):
        raise ParameterError(f"{len(predictions)} predictions for {len(truth)} true labels")
    if not truth:
        raise ParameterError("cannot score an empty prediction list")
    classes = set(truth) if inventory is None else set(inventory)
    unknown = (set(predictions) | set(truth)) - classes
    if unknown:
        raise ContractViolation(f"labels outside the sense inventory: {sorted(map(str, unknown))}")

    n = len(truth)
    tp = {c: 0 for c in classes}
    fp = dict(tp)
    fn = dict(tp)
    for p, t in zip(predictions, truth):
        if p == t:
            tp[t] += 1
        else:
            fp[p] += 1
            fn[t] += 1
    correct = sum(tp.values())
    accuracy = correct / n
    # pooled counts: sum(fp) == sum(fn) == n - correct
    s_tp, s_fp, s_fn = correct, sum(fp.values()), sum(fn.values())
    f1_micro = 2 * s_tp / (2 * s_tp + s_fp + s_fn)
    per_class = []
    for c in sorted(classes, key=str):
        denom = 2 * tp[c] + fp[c] + fn[c]
        per_class.append(2 * tp[c] / denom if tp[c] else 0.0)
    f1_macro = math.fsum(per_class) / len(per_class)
    return MetricSet(accuracy, f1_micro, f1_macro)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that determines the projection and the classifier."""

    kernel: str = "diffusion"
    sigma: float = 1.0
    degree: int = 3
    lam: float = kernels.DEFAULT_LAMBDA
    steps: int = kernels.DEFAULT_STEPS
    dim: int | None = None
    dim_threshold: float | None = None
    k: int = classify.DEFAULT_K
    rbf_unsquared: bool = False
    g_from_tf: bool = False
    target_forms: tuple[str, ...] = ()
    eigensolver: str = "auto"
    diffusion_route: str = "auto"

    def __post_init__(self):
        if self.kernel not in kernels.KINDS:
            raise ParameterError(f"unknown kernel {self.kernel!r}; expected one of {', '.join(kernels.KINDS)}")
        if self.dim is not None and self.dim_threshold is not None:
            raise ParameterError("dim and dim_threshold are mutually exclusive")
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "target_forms", tuple(self.target_forms))

    def embedding_key(self) -> tuple:
        """Fields that affect the projection (everything except k)."""
        return tuple((f.name, getattr(self, f.name)) for f in dataclasses.fields(self) if f.name != "k")

    def canonical(self) -> dict:
        return dataclasses.asdict(self)


def fingerprint(obj: dict) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Embedding:
    projection: kpca.Projection
    spectrum: kpca.EigenSpectrum
    kernel_kind: str

    @property
    def points(self) -> np.ndarray:
        return self.projection.points


def build_kernel_for(corpus: LabeledCorpus, config: PipelineConfig, stopwords=None) -> kernels.KernelMatrix:
    stop = load_stopwords() if stopwords is None else frozenset(stopwords)
    forms = target_forms(corpus.target_word, config.target_forms)
    vocab = build_vocabulary(corpus, stop, forms)
    dtm, incidence = build_doc_term_matrix(corpus, vocab, stop)
    log.info("%s: %d documents x %d terms", corpus.target_word, dtm.doc_count, dtm.term_count)
    return kernels.build_kernel(
        config.kernel, dtm, incidence,
        sigma=config.sigma, degree=config.degree, lam=config.lam, steps=config.steps,
        rbf_squared=not config.rbf_unsquared, g_from_tf=config.g_from_tf,
        route=config.diffusion_route,
    )


def spectrum_for(corpus: LabeledCorpus, config: PipelineConfig, stopwords=None) -> kpca.EigenSpectrum:
    K = build_kernel_for(corpus, config, stopwords)
    return kpca.symmetric_eigendecomposition(kpca.center_kernel(K), method=config.eigensolver)


def embed(corpus: LabeledCorpus, config: PipelineConfig, stopwords=None) -> Embedding:
    """Kernel, centering, eigendecomposition and projection over the whole corpus."""
    spectrum = spectrum_for(corpus, config, stopwords)
    d = kpca.select_dimension(spectrum, d=config.dim, threshold=config.dim_threshold)
    log.info("projecting to %d of %d positive components", d, spectrum.positive_count)
    return Embedding(kpca.project(spectrum, d), spectrum, config.kernel)


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    kernel: str
    ratio: float
    mean: MetricSet
    per_repeat: tuple[MetricSet, ...]
    fingerprint: str
    group: str = ""
    notes: tuple[str, ...] = ()


@dataclass
class EvaluationReport:
    rows: list[ReportRow] = field(default_factory=list)
    configs: dict = field(default_factory=dict)

    def extend(self, other: "EvaluationReport") -> "EvaluationReport":
        self.rows.extend(other.rows)
        self.configs.update(other.configs)
        return self

    def to_csv(self, path_or_file=None, with_group: bool = False) -> str:
        """Serialize; returns the text and writes it if a destination is given.

        Leading ``#`` lines map each config fingerprint to its canonical
        settings, so the rows are self-describing.
        """
        buf = io.StringIO()
        for fp in sorted(self.configs):
            buf.write(f"# config {fp} {json.dumps(self.configs[fp], sort_keys=True, default=str)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        header = (("combination",) if with_group else ()) + REPORT_HEADER
        writer.writerow(header)
        for row in self.rows:
            lead = (row.group,) if with_group else ()
            entries = [(str(i), s) for i, s in enumerate(row.per_repeat, start=1)] + [("mean", row.mean)]
            for rep, ms in entries:
                writer.writerow(lead + (row.dataset, row.kernel, f"{row.ratio:.4f}", rep,
                                        f"{ms.accuracy:.4f}", f"{ms.f1_micro:.4f}", f"{ms.f1_macro:.4f}"))
        text = buf.getvalue()
        if path_or_file is not None:
            if hasattr(path_or_file, "write"):
                path_or_file.write(text)
            else:
                with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
        return text


def _annotate(exc: Exception, dataset: str, repeat=None) -> Exception:
    where = f"[dataset={dataset}" + (f" repeat={repeat}]" if repeat is not None else "]")
    if exc.args:
        exc.args = (f"{where} {exc.args[0]}",) + exc.args[1:]
    exc.dataset = dataset
    exc.repeat = repeat
    return exc


def evaluate_embedding(embedding: Embedding, labels: Sequence, inventory: Iterable, plan: SplitPlan,
                       k: int, dataset: str = "", fp: str = "", group: str = "") -> ReportRow:
    """Fit and score KNN on each split of ``plan`` over precomputed coordinates."""
    points = embedding.points
    labels = list(labels)
    inventory = frozenset(inventory)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SplitWarning)
        splits = make_splits(len(labels), plan, labels)
    notes = tuple(str(w.message) for w in caught)
    for note in notes:
        log.warning("%s ratio %.2f: %s", dataset, plan.ratio, note)
    per_repeat = []
    for r, (train, test) in enumerate(splits):
        try:
            model = classify.knn_fit(points[train], [labels[i] for i in train], k)
            pred = classify.knn_predict_many(model, points[test])
            per_repeat.append(compute_metrics(pred, [labels[i] for i in test], inventory))
        except DKPCAError as exc:
            raise _annotate(exc, dataset, r) from None
    return ReportRow(dataset, embedding.kernel_kind, plan.ratio, MetricSet.mean(per_repeat),
                     tuple(per_repeat), fp, group, notes)


def run_experiment(corpus: LabeledCorpus, config: PipelineConfig, plan: SplitPlan | Sequence[SplitPlan],
                   stopwords=None, dataset: str | None = None, group: str = "") -> EvaluationReport:
    """Embed the corpus once, then evaluate every plan (one report row per plan)."""
    plans = [plan] if isinstance(plan, SplitPlan) else list(plan)
    dataset = dataset or corpus.target_word
    canon = config.canonical()
    canon["plans"] = [dataclasses.asdict(p) for p in plans]
    fp = fingerprint(canon)
    try:
        emb = embed(corpus, config, stopwords)
    except DKPCAError as exc:
        raise _annotate(exc, dataset) from None
    report = EvaluationReport(configs={fp: canon})
    for p in plans:
        report.rows.append(evaluate_embedding(emb, corpus.labels, corpus.sense_inventory, p,
                                              config.k, dataset, fp, group))
    return report
