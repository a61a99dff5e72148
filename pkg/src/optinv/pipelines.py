"""Experiment pipelines composing the toolkit into reproducible runs.

Three pipelines:

* ``trpe-attack``  known-plaintext attack on the phase-encryption system
  via complex-valued regression from ciphertext to plaintext vectors
* ``spi-blind``    two-step blind single-pixel reconstruction: regress the
  illumination patterns from training pairs, then TV compressive sensing
  with the estimated patterns
* ``spi-known``    same reconstruction with the true patterns (upper-bound
  baseline isolating the compressive-sensing step)

Every run derives all randomness from one master seed, writes a one-row
``result.csv`` plus a resolved-config echo, dumps the first few
reference/recovered image pairs as PGM, and saves the learned weight
matrix. ``run_sweep`` executes a grid of such runs with per-cell seeds
hashed from (master seed, cell index) and is resumable.
"""

import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import load_experiment_corpus, split
from .fields import vectorize
from .metrics import QualityReport, evaluate_corpus
from .pgm import write_pgm
from .regression import TrainingConfig, predict, save_weights, train_complex, train_real
from .spi import gen_patterns, measure
from .trpe import encrypt, gen_phase_mask_triple
from .tvrecon import TVSolverParams, TVSystem

PIPELINES = ("trpe-attack", "spi-blind", "spi-known")
DATASETS = ("mnist", "fashion-mnist", "cifar100", "synthetic")

CSV_HEADER = ("pipeline,dataset,k,s,lr,epochs,seed,mean_psnr_db,std_psnr_db,"
              "train_s,infer_s_per_image,status")


@dataclass
class ExperimentConfig:
    pipeline: str
    dataset: str = "mnist"
    data_path: str | None = None
    image_size: int = 32
    k: int = 100
    s: float = 1.0
    lr: float = 0.01
    epochs: int = 300
    num_test: int = 200
    seed: int = 0
    out: str = "results"
    workers: int = 1
    dump_images: int = 8
    solver: TVSolverParams = field(default_factory=TVSolverParams)

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ValueError(f"pipeline must be one of {PIPELINES}")
        if self.dataset not in DATASETS:
            raise ValueError(f"dataset must be one of {DATASETS}")
        if self.k < 1 or self.num_test < 1:
            raise ValueError("k and num_test must be >= 1")
        if not (0.0 < self.s <= 1.0):
            raise ValueError("sampling ratio s must lie in (0, 1]")
        if self.image_size < 1:
            raise ValueError("image_size must be >= 1")


@dataclass
class ResultRecord:
    config: ExperimentConfig
    report: QualityReport
    train_seconds: float
    infer_seconds_per_image: float
    version: str = __version__
    status: str = "ok"

    def csv_row(self) -> str:
        cfg = self.config
        s_field = "" if cfg.pipeline == "trpe-attack" else f"{cfg.s:g}"
        mean = f"{self.report.mean_psnr:.6f}" if self.report else ""
        std = f"{self.report.std_psnr:.6f}" if self.report else ""
        return ",".join([
            cfg.pipeline, cfg.dataset, str(cfg.k), s_field, f"{cfg.lr:g}",
            str(cfg.epochs), str(cfg.seed), mean, std,
            f"{self.train_seconds:.3f}", f"{self.infer_seconds_per_image:.4f}",
            self.status,
        ])


def _derived_seeds(master_seed: int) -> dict:
    """Independent integer seeds for each random subsystem of one run."""
    names = ("corpus", "split", "system", "train")
    children = np.random.SeedSequence(master_seed).spawn(len(names))
    return {name: int(child.generate_state(1)[0])
            for name, child in zip(names, children)}


def _default_data_path(dataset: str) -> str:
    if dataset in ("mnist", "fashion-mnist"):
        return f"data/{dataset}/images-idx3-ubyte.gz"
    return "data/cifar100/train.bin"


def _load_corpus(cfg: ExperimentConfig, corpus_seed: int) -> list[np.ndarray]:
    if cfg.dataset == "synthetic":
        rng = np.random.default_rng(corpus_seed)
        count = cfg.k + cfg.num_test
        return [rng.random((cfg.image_size, cfg.image_size)) for _ in range(count)]
    if cfg.image_size != 32:
        raise ValueError("file-based datasets are fixed at 32x32")
    path = cfg.data_path or _default_data_path(cfg.dataset)
    return load_experiment_corpus(cfg.dataset, path)


def _dump_pairs(out_dir: Path, references, recovered, limit: int):
    for i in range(min(limit, len(references))):
        write_pgm(out_dir / f"ref_{i:02d}.pgm", references[i])
        write_pgm(out_dir / f"rec_{i:02d}.pgm", recovered[i])


def _config_lines(cfg: ExperimentConfig) -> list[str]:
    solver = cfg.solver
    return [
        f"# optinv {__version__}",
        f"pipeline = {cfg.pipeline}",
        f"dataset = {cfg.dataset}",
        f"data_path = {cfg.data_path or _default_data_path(cfg.dataset)}",
        f"image_size = {cfg.image_size}",
        f"k = {cfg.k}",
        f"s = {cfg.s:g}",
        f"lr = {cfg.lr:g}",
        f"epochs = {cfg.epochs}",
        f"num_test = {cfg.num_test}",
        f"seed = {cfg.seed}",
        f"workers = {cfg.workers}",
        f"dump_images = {cfg.dump_images}",
        f"mu = {solver.mu:g}",
        f"beta = {solver.beta:g}",
        f"max_outer = {solver.max_outer}",
        f"max_inner = {solver.max_inner}",
        f"tol = {solver.tol:g}",
        f"nonneg = {str(solver.nonneg).lower()}",
    ]


def _write_run_outputs(out_dir: Path, record: ResultRecord, references, recovered,
                       weights=None):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config_resolved.txt").write_text(
        "\n".join(_config_lines(record.config)) + "\n")
    (out_dir / "result.csv").write_text(CSV_HEADER + "\n" + record.csv_row() + "\n")
    per_image = out_dir / "per_image_psnr.csv"
    lines = ["index,psnr_db"]
    lines += [f"{i},{v:.6f}" for i, v in enumerate(record.report.per_image_psnr)]
    per_image.write_text("\n".join(lines) + "\n")
    _dump_pairs(out_dir, references, recovered, record.config.dump_images)
    if weights is not None:
        save_weights(out_dir / "weights.optw", weights)


def _parallel_map(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_trpe_attack(cfg: ExperimentConfig) -> ResultRecord:
    """Known-plaintext attack: learn ciphertext->plaintext, score on held-out pairs."""
    if cfg.pipeline != "trpe-attack":
        raise ValueError("config pipeline is not trpe-attack")
    seeds = _derived_seeds(cfg.seed)
    corpus = _load_corpus(cfg, seeds["corpus"])
    train_imgs, test_imgs = split(corpus, cfg.k, cfg.num_test, seeds["split"])
    size = train_imgs[0].shape[0]
    key = gen_phase_mask_triple(size, size, seeds["system"])

    inputs = np.stack([vectorize(encrypt(im, key)) for im in train_imgs])
    targets = np.stack([vectorize(im) for im in train_imgs])
    tc = TrainingConfig(cfg.lr, cfg.epochs, init_seed=seeds["train"])
    t0 = time.perf_counter()
    weights = train_complex(inputs, targets, tc)
    train_seconds = time.perf_counter() - t0

    def recover(im):
        pred = predict(weights, vectorize(encrypt(im, key)))
        return np.clip(pred.real, 0.0, 1.0).reshape(size, size)

    t0 = time.perf_counter()
    recovered = _parallel_map(recover, test_imgs, cfg.workers)
    infer = (time.perf_counter() - t0) / len(test_imgs)

    report = evaluate_corpus(test_imgs, recovered)
    record = ResultRecord(cfg, report, train_seconds, infer)
    _write_run_outputs(Path(cfg.out), record, test_imgs, recovered, weights)
    return record


def _spi_common(cfg: ExperimentConfig):
    seeds = _derived_seeds(cfg.seed)
    corpus = _load_corpus(cfg, seeds["corpus"])
    train_imgs, test_imgs = split(corpus, cfg.k, cfg.num_test, seeds["split"])
    size = train_imgs[0].shape[0]
    num_patterns = max(1, int(round(cfg.s * size * size)))
    patterns = gen_patterns(num_patterns, size, size, seeds["system"])
    return seeds, train_imgs, test_imgs, size, patterns


def _reconstruct_corpus(system: TVSystem, patterns, test_imgs, workers: int):
    return _parallel_map(
        lambda im: system.solve(measure(im, patterns)).image, test_imgs, workers)


def run_spi_blind(cfg: ExperimentConfig) -> ResultRecord:
    """Blind reconstruction: regress patterns from training pairs, then TV recon."""
    if cfg.pipeline != "spi-blind":
        raise ValueError("config pipeline is not spi-blind")
    seeds, train_imgs, test_imgs, size, patterns = _spi_common(cfg)

    inputs = np.stack([vectorize(im) for im in train_imgs])
    targets = np.stack([measure(im, patterns) for im in train_imgs])
    tc = TrainingConfig(cfg.lr, cfg.epochs, init_seed=seeds["train"])
    t0 = time.perf_counter()
    estimated = train_real(inputs, targets, tc)
    train_seconds = time.perf_counter() - t0

    system = TVSystem(estimated, cfg.solver, shape=(size, size))
    t0 = time.perf_counter()
    recovered = _reconstruct_corpus(system, patterns, test_imgs, cfg.workers)
    infer = (time.perf_counter() - t0) / len(test_imgs)

    report = evaluate_corpus(test_imgs, recovered)
    record = ResultRecord(cfg, report, train_seconds, infer)
    _write_run_outputs(Path(cfg.out), record, test_imgs, recovered, estimated)
    return record


def run_spi_known(cfg: ExperimentConfig) -> ResultRecord:
    """Known-pattern reconstruction (no training): isolates the TV recon step."""
    if cfg.pipeline != "spi-known":
        raise ValueError("config pipeline is not spi-known")
    _, _, test_imgs, size, patterns = _spi_common(cfg)

    system = TVSystem(patterns, cfg.solver)
    t0 = time.perf_counter()
    recovered = _reconstruct_corpus(system, patterns, test_imgs, cfg.workers)
    infer = (time.perf_counter() - t0) / len(test_imgs)

    report = evaluate_corpus(test_imgs, recovered)
    record = ResultRecord(cfg, report, 0.0, infer)
    _write_run_outputs(Path(cfg.out), record, test_imgs, recovered)
    return record


RUNNERS = {
    "trpe-attack": run_trpe_attack,
    "spi-blind": run_spi_blind,
    "spi-known": run_spi_known,
}


def run_experiment(cfg: ExperimentConfig) -> ResultRecord:
    return RUNNERS[cfg.pipeline](cfg)


def cell_seed(master_seed: int, index: int) -> int:
    """Per-cell seed hashed from the sweep master seed and the cell index."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def _cell_dir_name(index: int, cfg: ExperimentConfig) -> str:
    return f"cell_{index:03d}_{cfg.pipeline}_{cfg.dataset}_k{cfg.k}_s{cfg.s:g}"


def _cached_row(cell_dir: Path, cfg: ExperimentConfig) -> str | None:
    """Reuse a finished cell: config echo must match, result row must parse."""
    result = cell_dir / "result.csv"
    echo = cell_dir / "config_resolved.txt"
    if not (result.exists() and echo.exists()):
        return None
    if echo.read_text() != "\n".join(_config_lines(cfg)) + "\n":
        return None
    lines = result.read_text().splitlines()
    if len(lines) != 2 or lines[0] != CSV_HEADER:
        return None
    row = lines[1]
    if row.count(",") != CSV_HEADER.count(",") or not row.endswith(",ok"):
        return None
    return row


def _run_cell(args) -> str:
    index, cfg = args
    try:
        return run_experiment(cfg).csv_row()
    except Exception as exc:  # noqa: BLE001 - sweep must survive bad cells
        failed = ResultRecord(
            cfg, QualityReport([], float("nan"), float("nan"), 0, 0), 0.0, 0.0,
            status=f"error:{type(exc).__name__}")
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "error.txt").write_text(f"{type(exc).__name__}: {exc}\n")
        return failed.csv_row()


def run_sweep(cells: list[ExperimentConfig], out_dir, workers: int = 1) -> Path:
    """Run every cell of a config grid; write one CSV row per cell.

    Cells get independent seeds derived from their config's master seed and
    position. Finished cells (matching config echo plus a valid result row)
    are skipped on rerun. Failed cells are marked in the status column and
    do not abort the sweep. Returns the summary CSV path.
    """
    if not cells:
        raise ValueError("empty sweep grid")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    prepared = []
    for index, cfg in enumerate(cells):
        cfg = replace(cfg, seed=cell_seed(cfg.seed, index))
        cfg = replace(cfg, out=str(out_dir / _cell_dir_name(index, cfg)))
        prepared.append((index, cfg))

    rows: dict[int, str] = {}
    pending = []
    for index, cfg in prepared:
        cached = _cached_row(Path(cfg.out), cfg)
        if cached is not None:
            rows[index] = cached
        else:
            pending.append((index, cfg))

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (index, _), row in zip(pending, pool.map(_run_cell, pending)):
                rows[index] = row
    else:
        for index, cfg in pending:
            rows[index] = _run_cell((index, cfg))

    csv_path = out_dir / "sweep.csv"
    lines = [CSV_HEADER] + [rows[i] for i, _ in prepared]
    csv_path.write_text("\n".join(lines) + "\n")
    return csv_path
