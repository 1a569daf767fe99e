"""Command-line front end.

    dkpca run      --dataset interest.tsv --kernel diffusion --dim 1710
    dkpca spectrum --dataset interest.tsv --out spectrum.csv
    dkpca sweep    --dataset interest.tsv --grid lambda=0,0.0039 --grid steps=2,3

Settings may also come from a ``key=value`` file given with ``--config``;
command-line flags take precedence over the file.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import itertools
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from ._threads import thread_limit
from .corpus import load_dataset, load_stopwords
from .errors import DatasetError, DKPCAError, NumericError, ParameterError, ParseError, ResourceError
from .evaluation import (DEFAULT_RATIOS, DEFAULT_REPEATS, EvaluationReport, MetricSet, PipelineConfig,
                         SplitPlan, embed, evaluate_embedding, fingerprint, spectrum_for)
from .kernels import DEFAULT_LAMBDA, DEFAULT_STEPS, KINDS
from .kpca import write_spectrum_csv

log = logging.getLogger("dkpca")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARAMETER = 2
EXIT_DATASET = 3
EXIT_RESOURCE = 4
EXIT_NUMERIC = 5


def _bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text):
    return None if str(text).strip().lower() in ("", "none", "all") else int(text)


def _opt_float(text):
    return None if str(text).strip().lower() in ("", "none") else float(text)


def _float_list(text):
    values = [float(v) for v in str(text).split(",") if v.strip()]
    if not values:
        raise ValueError("empty list")
    return tuple(values)


def _str_list(text):
    return tuple(v.strip() for v in str(text).split(",") if v.strip())


# config key -> (RunConfig field, parser)
KEYS = {
    "dataset": ("dataset", str),
    "kernel": ("kernel", str),
    "sigma": ("sigma", float),
    "degree": ("degree", int),
    "lambda": ("lam", float),
    "steps": ("steps", int),
    "dim": ("dim", _opt_int),
    "dim-threshold": ("dim_threshold", _opt_float),
    "k": ("k", int),
    "ratios": ("ratios", _float_list),
    "repeats": ("repeats", int),
    "seed": ("seed", int),
    "stopwords": ("stopwords", str),
    "out": ("out", str),
    "rbf-unsquared": ("rbf_unsquared", _bool),
    "stratified": ("stratified", _bool),
    "g-from-tf": ("g_from_tf", _bool),
    "target": ("target", str),
    "target-forms": ("target_forms", _str_list),
    "eigensolver": ("eigensolver", str),
}
GRID_KEYS = ("kernel", "sigma", "degree", "lambda", "steps", "dim", "dim-threshold", "k")


@dataclass(frozen=True)
class RunConfig:
    dataset: str | None = None
    kernel: str = "diffusion"
    sigma: float = 1.0
    degree: int = 3
    lam: float = DEFAULT_LAMBDA
    steps: int = DEFAULT_STEPS
    dim: int | None = None
    dim_threshold: float | None = None
    k: int = 6
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    stopwords: str | None = None
    out: str | None = None
    rbf_unsquared: bool = False
    stratified: bool = False
    g_from_tf: bool = False
    target: str | None = None
    target_forms: tuple[str, ...] = ()
    eigensolver: str = "auto"

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(
            kernel=self.kernel, sigma=self.sigma, degree=self.degree, lam=self.lam, steps=self.steps,
            dim=self.dim, dim_threshold=self.dim_threshold, k=self.k, rbf_unsquared=self.rbf_unsquared,
            g_from_tf=self.g_from_tf, target_forms=self.target_forms, eigensolver=self.eigensolver,
        )

    def plans(self) -> list[SplitPlan]:
        return [SplitPlan(r, self.repeats, self.seed, self.stratified) for r in self.ratios]

    def canonical(self) -> dict:
        """Settings that determine the numbers (output path excluded)."""
        d = dataclasses.asdict(self)
        d.pop("out")
        if d["dataset"]:
            d["dataset"] = Path(d["dataset"]).name
        return d


def parse_value(key: str, raw: str):
    if key not in KEYS:
        raise ParameterError(f"unknown config key {key!r}")
    name, parser = KEYS[key]
    try:
        return name, parser(raw)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"config key {key!r}: invalid value {raw!r} ({exc})") from None


def read_config_file(path) -> dict:
    """Parse a ``key=value`` file (``#`` comments, blank lines ignored)."""
    p = Path(path)
    if not p.is_file():
        raise ParameterError(f"config file not found: {p}")
    values = {}
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"{p}:{lineno}: expected key=value, got {raw.strip()!r}")
        key = key.strip().lstrip("-").replace("_", "-")
        name, parsed = parse_value(key, value.strip())
        values[name] = parsed
    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in KEYS:
        raw = getattr(args, key.replace("-", "_"), None)
        if raw is None:
            continue
        if isinstance(raw, bool):
            values[KEYS[key][0]] = raw
        else:
            name, parsed = parse_value(key, raw)
            values[name] = parsed
    cfg = RunConfig(**values)
    if cfg.kernel not in KINDS:
        raise ParameterError(f"config key 'kernel': unknown kernel {cfg.kernel!r}")
    if cfg.dim is not None and cfg.dim_threshold is not None:
        raise ParameterError("config keys 'dim' and 'dim-threshold' are mutually exclusive")
    if not cfg.dataset:
        raise ParameterError("config key 'dataset' is required")
    return cfg


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--dataset", help="TSV file with label<TAB>text lines")
    p.add_argument("--kernel", choices=KINDS)
    p.add_argument("--sigma", help="RBF width (default 1.0)")
    p.add_argument("--degree", help="polynomial degree (default 3)")
    p.add_argument("--lambda", dest="lambda", help=f"diffusion decay (default {DEFAULT_LAMBDA})")
    p.add_argument("--steps", help=f"Taylor truncation order (default {DEFAULT_STEPS})")
    p.add_argument("--dim", help="explicit projection dimension (default: all positive components)")
    p.add_argument("--dim-threshold", help="keep the smallest d reaching this eigenvalue mass share")
    p.add_argument("--k", help="KNN neighbours (default 6)")
    p.add_argument("--ratios", help="comma-separated labeled fractions (default 0.05,0.1,0.3)")
    p.add_argument("--repeats", help=f"random splits per ratio (default {DEFAULT_REPEATS})")
    p.add_argument("--seed", help="64-bit split seed (default 0)")
    p.add_argument("--stopwords", help="stopword file, one word per line (default: bundled list)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--target", help="target word to strip (default: dataset file stem)")
    p.add_argument("--target-forms", help="extra comma-separated surface forms of the target")
    p.add_argument("--eigensolver", choices=("auto", "jacobi", "lapack"))
    p.add_argument("--rbf-unsquared", action="store_true", default=None,
                   help="use the unsquared distance in the RBF exponent")
    p.add_argument("--stratified", action="store_true", default=None, help="stratify splits by sense")
    p.add_argument("--g-from-tf", action="store_true", default=None,
                   help="build term co-occurrence from tf counts instead of 0/1 incidence")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkpca", description="Diffusion kernel PCA word sense disambiguation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="evaluate one configuration at every ratio"))
    _add_common(sub.add_parser("spectrum", help="write the centered-kernel eigenvalue spectrum"))
    sweep = sub.add_parser("sweep", help="evaluate the Cartesian product of parameter grids")
    _add_common(sweep)
    sweep.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2,...",
                       help=f"parameter grid; keys: {', '.join(GRID_KEYS)}")
    return parser


def _load(cfg: RunConfig):
    corpus = load_dataset(cfg.dataset, target_word=cfg.target)
    stop = load_stopwords(cfg.stopwords)
    log.info("loaded %s: %d instances, %d senses", cfg.dataset, len(corpus), len(corpus.sense_inventory))
    return corpus, stop


def _dataset_name(cfg):
    return Path(cfg.dataset).stem


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    tmp = Path(str(out) + ".part")
    tmp.write_text(text, encoding="utf-8", newline="")
    tmp.replace(out)


def _summary(report: EvaluationReport, stream):
    stream.write(f"{'dataset':<12}{'kernel':<11}{'ratio':>7}{'acc':>9}{'f1_mic':>9}{'f1_mac':>9}\n")
    for row in report.rows:
        m: MetricSet = row.mean
        prefix = f"{row.group}  " if row.group else ""
        stream.write(f"{prefix}{row.dataset:<12}{row.kernel:<11}{row.ratio:>7.2f}"
                     f"{m.accuracy:>9.4f}{m.f1_micro:>9.4f}{m.f1_macro:>9.4f}\n")


def cmd_run(cfg: RunConfig) -> EvaluationReport:
    corpus, stop = _load(cfg)
    canon = cfg.canonical()
    fp = fingerprint(canon)
    emb = embed(corpus, cfg.pipeline(), stop)
    report = EvaluationReport(configs={fp: canon})
    for plan in cfg.plans():
        report.rows.append(evaluate_embedding(emb, corpus.labels, corpus.sense_inventory, plan,
                                              cfg.k, _dataset_name(cfg), fp))
    _emit(report.to_csv(), cfg.out)
    _summary(report, sys.stderr if cfg.out is None else sys.stdout)
    return report


def cmd_spectrum(cfg: RunConfig):
    corpus, stop = _load(cfg)
    spectrum = spectrum_for(corpus, cfg.pipeline(), stop)
    buf = io.StringIO()
    write_spectrum_csv(spectrum, buf)
    _emit(buf.getvalue(), cfg.out)
    return spectrum


def parse_grid(specs) -> list[tuple[str, list]]:
    if not specs:
        raise ParameterError("sweep needs at least one --grid KEY=V1,V2,...")
    grid = []
    for spec in specs:
        key, sep, raw = spec.partition("=")
        key = key.strip()
        if not sep or key not in GRID_KEYS:
            raise ParameterError(f"bad grid entry {spec!r}; keys: {', '.join(GRID_KEYS)}")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        if not values:
            raise ParameterError(f"grid list for {key!r} is empty")
        grid.append((key, [parse_value(key, v)[1] for v in values]))
    return grid


def cmd_sweep(cfg: RunConfig, grid_specs) -> EvaluationReport:
    grid = parse_grid(grid_specs)
    corpus, stop = _load(cfg)
    report = EvaluationReport()
    cache = {}
    keys = [k for k, _ in grid]
    for combo in itertools.product(*(vals for _, vals in grid)):
        overrides = {KEYS[k][0]: v for k, v in zip(keys, combo)}
        # a gridded dimension policy replaces the other one from the base config
        if "dim" in overrides and "dim_threshold" not in overrides:
            overrides["dim_threshold"] = None
        elif "dim_threshold" in overrides and "dim" not in overrides:
            overrides["dim"] = None
        run = dataclasses.replace(cfg, **overrides)
        pipe = run.pipeline()
        label = ";".join(f"{k}={v}" for k, v in zip(keys, combo))
        canon = run.canonical()
        fp = fingerprint(canon)
        report.configs[fp] = dict(canon, combination=label)
        key = pipe.embedding_key()
        if key not in cache:
            log.info("embedding for %s", label)
            cache[key] = embed(corpus, pipe, stop)
        for plan in run.plans():
            report.rows.append(evaluate_embedding(cache[key], corpus.labels, corpus.sense_inventory, plan,
                                                  run.k, _dataset_name(run), fp, label))
    _emit(report.to_csv(with_group=True), cfg.out)
    _summary(report, sys.stderr if cfg.out is None else sys.stdout)
    return report


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, DatasetError):
        return EXIT_DATASET
    if isinstance(exc, ParameterError):
        return EXIT_PARAMETER
    if isinstance(exc, ResourceError):
        return EXIT_RESOURCE
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    return EXIT_FAILURE


_LABELS = {EXIT_DATASET: "dataset error", EXIT_PARAMETER: "parameter error",
           EXIT_RESOURCE: "resource error", EXIT_NUMERIC: "numeric error", EXIT_FAILURE: "error"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = build_run_config(args)
        with thread_limit():
            if args.command == "run":
                cmd_run(cfg)
            elif args.command == "spectrum":
                cmd_spectrum(cfg)
            else:
                cmd_sweep(cfg, args.grid)
    except (DKPCAError, ParseError) as exc:
        code = _exit_code(exc)
        print(f"dkpca: {_LABELS[code]}: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:  # e.g. a malformed DKPCA_THREADS
        print(f"dkpca: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
