"""Command line for saliency-guided augmentation and dataset auditing.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
Diagnostics go to stderr; results are only written to files.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from fairlens import __version__
from fairlens.audit import audit_paths, score_table
from fairlens.augops import RandAugPolicy
from fairlens.config import RunConfig, parse_radii
from fairlens.dataset_io import Manifest, Record, load_manifest, undersample_balance, write_manifest
from fairlens.embedding import EmbeddingSpec, FeatureTable, features_from_manifest, load_precomputed, write_features
from fairlens.errors import ConfigError, DataError, GeometryError, NormalizationError
from fairlens.io import IMAGE_SUFFIXES, atomic_write_text, read_image, write_image
from fairlens.metrics import Weights, iias, iss_cross, iss_intra
from fairlens.pipeline import AugmentPart, PipelineConfig, augment_dataset
from fairlens.placement import Placement
from fairlens.report import AuditReport, ReportEntry, write_report
from fairlens.saliency import DEFAULT_THRESHOLD_FRACTION, extract_salient_box, fine_grained_saliency, to_grayscale

log = logging.getLogger("fairlens")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _radii_arg(text):
    try:
        return parse_radii(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_common(p):
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_saliency(p):
    p.add_argument("--radii", type=_radii_arg, help="comma-separated window radii (default 1,2,4,8,16)")
    p.add_argument("--threshold-fraction", type=float,
                   help=f"box threshold as a fraction of the peak (default {DEFAULT_THRESHOLD_FRACTION})")


def _add_embedding(p):
    p.add_argument("--embedding", choices=("saliency", "histogram"),
                   help="built-in extractor for image inputs (default saliency)")
    p.add_argument("--bins", type=int, help="histogram bins per channel (default 16)")
    p.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    _add_saliency(p)


def _add_weights(p):
    p.add_argument("--alpha", type=float, help="within-group weight (default 0.5)")
    p.add_argument("--beta", type=float, help="inter-group weight (default 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairlens", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fairlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("saliency", help="saliency map and salient box of one image")
    p.add_argument("image")
    p.add_argument("--map-out", required=True, help="8-bit grayscale PNG of the map")
    p.add_argument("--box-out", required=True, help="JSON file with {x0,y0,x1,y1,peak}")
    _add_saliency(p)
    _add_common(p)

    p = sub.add_parser("augment", help="keep-original augmentation of a dataset")
    p.add_argument("--in", dest="src", required=True, help="dataset root or TSV manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--placement", choices=[m.value for m in Placement])
    p.add_argument("--part", choices=[m.value for m in AugmentPart])
    p.add_argument("--seed", type=int)
    p.add_argument("--n-ops", type=int)
    p.add_argument("--magnitude", type=int)
    p.add_argument("--workers", type=int)
    _add_saliency(p)
    _add_common(p)

    p = sub.add_parser("features", help="embed a dataset into a feature file")
    p.add_argument("--in", dest="src", required=True, help="dataset root or TSV manifest")
    p.add_argument("--out", required=True)
    _add_embedding(p)
    _add_common(p)

    p = sub.add_parser("balance", help="undersample every group to the smallest group size")
    p.add_argument("--in", dest="src", required=True, help="dataset root or TSV manifest")
    p.add_argument("--out", required=True, help="output TSV manifest")
    p.add_argument("--seed", type=int)
    _add_common(p)

    p = sub.add_parser("metrics", help="within/inter-group diversity and the combined score")
    p.add_argument("--in", dest="src", required=True, help="feature file, dataset root or manifest")
    p.add_argument("--out", required=True, help="report path (.csv or .json)")
    p.add_argument("--dataset", help="dataset name in the report")
    _add_weights(p)
    _add_embedding(p)
    _add_common(p)

    p = sub.add_parser("iss", help="image similarity scores within and across datasets")
    p.add_argument("--in", dest="src", required=True, help="feature file or image directory")
    p.add_argument("--cross", help="second dataset for ISS cross")
    p.add_argument("--out", required=True, help="report path (.csv or .json)")
    _add_embedding(p)
    _add_common(p)

    p = sub.add_parser("iias", help="image-image association score")
    p.add_argument("--concepts", required=True, help="feature file or image directory")
    p.add_argument("--male", required=True, help="feature file or image directory")
    p.add_argument("--female", required=True, help="feature file or image directory")
    p.add_argument("--out", required=True, help="report path (.csv or .json)")
    _add_embedding(p)
    _add_common(p)

    p = sub.add_parser("audit", help="scan, balance, embed and score one or more datasets")
    p.add_argument("--in", dest="src", required=True, action="append",
                   help="dataset root or manifest; repeat for several datasets")
    p.add_argument("--out", required=True, help="report path (.csv or .json)")
    p.add_argument("--balance", action="store_true", help="undersample groups before scoring")
    p.add_argument("--seed", type=int)
    _add_weights(p)
    _add_embedding(p)
    _add_common(p)
    return parser


def _embedding_spec(args, cfg: RunConfig) -> EmbeddingSpec:
    return EmbeddingSpec(
        kind=cfg.get(args.embedding, "embedding", "kind", str, "saliency"),
        bins=cfg.get(args.bins, "embedding", "bins", int, 16),
        radii=cfg.get(args.radii, "saliency", "radii", parse_radii, None),
    )


def _workers(args, cfg: RunConfig) -> int:
    workers = cfg.get(getattr(args, "workers", None), "run", "workers", int, 1)
    if workers < 1:
        raise ConfigError("--workers must be >= 1")
    return workers


def _weights(args, cfg: RunConfig) -> Weights:
    alpha = cfg.get(args.alpha, "metrics", "alpha", float, 0.5)
    beta = cfg.get(args.beta, "metrics", "beta", float, 0.5)
    if not (0 <= alpha <= 0.5 and 0 <= beta <= 0.5):
        raise ConfigError(f"alpha and beta must lie in [0, 0.5], got {alpha}, {beta}")
    if alpha == 0.5 or beta == 0.5:
        log.warning("alpha/beta = 0.5: the combined metric is bounded by 1 inclusively")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Weights(alpha, beta)


def _is_feature_file(path: Path) -> bool:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.readline().startswith("#dim=")
    except (OSError, UnicodeDecodeError):
        return False


def _flat_manifest(root: Path) -> Manifest:
    files = sorted(p for p in root.iterdir()
                   if p.is_file() and not p.name.startswith(".") and p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise DataError(f"{root} contains no images")
    return Manifest(root.name, [Record(str(p), root.name) for p in files])


def load_features(src, spec: EmbeddingSpec, workers: int = 1) -> FeatureTable:
    """Feature file, grouped dataset root, flat image directory or TSV manifest."""
    path = Path(src)
    if path.is_file() and _is_feature_file(path):
        table = load_precomputed(path)
        if len(table) == 0:
            raise DataError(f"{path} contains no vectors")
        return table
    if path.is_dir() and not any(p.is_dir() and not p.name.startswith(".") for p in path.iterdir()):
        manifest = _flat_manifest(path)
    elif path.exists():
        manifest = load_manifest(path)
    else:
        raise DataError(f"{path} does not exist")
    return features_from_manifest(manifest, spec, workers)


def cmd_saliency(args, cfg: RunConfig) -> None:
    radii = cfg.get(args.radii, "saliency", "radii", parse_radii, None)
    frac = cfg.get(args.threshold_fraction, "saliency", "threshold_fraction", float,
                   DEFAULT_THRESHOLD_FRACTION)
    if not 0 <= frac <= 1:
        raise ConfigError("--threshold-fraction must lie in [0, 1]")
    image = read_image(args.image)
    smap = fine_grained_saliency(to_grayscale(image), radii)
    box = extract_salient_box(smap, frac)
    write_image(args.map_out, np.rint(smap * 255).astype(np.uint8))
    atomic_write_text(args.box_out, json.dumps(box.to_dict()) + "\n")


def cmd_augment(args, cfg: RunConfig) -> None:
    seed = cfg.seed(args.seed)
    policy = RandAugPolicy(
        n_ops=cfg.get(args.n_ops, "augment", "n_ops", int, 2),
        magnitude=cfg.get(args.magnitude, "augment", "magnitude", int, 15),
    )
    pcfg = PipelineConfig(
        placement=cfg.get(args.placement, "augment", "placement", Placement, Placement.RANDOM_AREA),
        part=cfg.get(args.part, "augment", "part", AugmentPart, AugmentPart.BOTH),
        policy=policy,
        radii=cfg.get(args.radii, "saliency", "radii", parse_radii, None),
        threshold_fraction=cfg.get(args.threshold_fraction, "saliency", "threshold_fraction",
                                   float, DEFAULT_THRESHOLD_FRACTION),
        master_seed=seed,
    )
    manifest = load_manifest(args.src)
    summary = augment_dataset(manifest, pcfg, args.out, workers=_workers(args, cfg))
    n_fail = len(summary.failures)
    log.info("augmented %d of %d images into %s", len(summary.entries) - n_fail,
             len(summary.entries), args.out)
    if n_fail:
        log.warning("%d image(s) failed; see %s", n_fail, summary.manifest_path)


def cmd_features(args, cfg: RunConfig) -> None:
    spec = _embedding_spec(args, cfg)
    table = features_from_manifest(load_manifest(args.src), spec, _workers(args, cfg))
    write_features(table, args.out)


def cmd_balance(args, cfg: RunConfig) -> None:
    seed = cfg.seed(args.seed)
    m = load_manifest(args.src)
    balanced = undersample_balance(m, seed)
    log.info("group sizes %s -> %s", m.group_sizes(), balanced.group_sizes())
    write_manifest(balanced, args.out)


def cmd_metrics(args, cfg: RunConfig) -> None:
    weights = _weights(args, cfg)
    table = load_features(args.src, _embedding_spec(args, cfg), _workers(args, cfg))
    name = args.dataset or Path(args.src).stem
    write_report(AuditReport([score_table(name, table, weights)]), args.out)


def cmd_iss(args, cfg: RunConfig) -> None:
    spec, workers = _embedding_spec(args, cfg), _workers(args, cfg)
    a = load_features(args.src, spec, workers)
    entry = ReportEntry(Path(args.src).stem, "|".join(a.by_group()))
    if len(a) >= 2:
        entry.ISS_intra = iss_intra(a.vectors)
    elif args.cross is None:
        raise DataError("ISS intra needs at least two vectors")
    if args.cross:
        b = load_features(args.cross, spec, workers)
        entry.ISS_cross = iss_cross(a.vectors, b.vectors)
    write_report(AuditReport([entry]), args.out)


def cmd_iias(args, cfg: RunConfig) -> None:
    spec, workers = _embedding_spec(args, cfg), _workers(args, cfg)
    c = load_features(args.concepts, spec, workers)
    m = load_features(args.male, spec, workers)
    f = load_features(args.female, spec, workers)
    entry = ReportEntry(Path(args.concepts).stem, "male|female",
                        IIAS=iias(c.vectors, m.vectors, f.vectors))
    write_report(AuditReport([entry]), args.out)


def cmd_audit(args, cfg: RunConfig) -> None:
    weights = _weights(args, cfg)
    seed = cfg.seed(args.seed, required=args.balance)
    report = audit_paths(args.src, _embedding_spec(args, cfg), weights,
                         balance_seed=seed if args.balance else None,
                         workers=_workers(args, cfg))
    write_report(report, args.out)


COMMANDS = {
    "saliency": cmd_saliency,
    "augment": cmd_augment,
    "features": cmd_features,
    "balance": cmd_balance,
    "metrics": cmd_metrics,
    "iss": cmd_iss,
    "iias": cmd_iias,
    "audit": cmd_audit,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"fairlens {args.command}: {exc}", file=sys.stderr)
        return 1
    except (DataError, GeometryError, NormalizationError, OSError) as exc:
        print(f"fairlens {args.command}: {exc}", file=sys.stderr)
        return 2
    finally:
        log.removeHandler(handler)
    return 0


def main() -> None:
    sys.exit(run())
