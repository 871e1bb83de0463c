"""Command-line pipeline: ingest, cohort, features, model, topics, synth.

Every stage writes its artifact plus an entry in out/manifest.json holding
the input hashes, the resolved-config hash, the seed and the package
version, so an output directory is reproducible from its manifest alone.
A single JSON config file drives all stages; flags override config
values. Stage seeds are derived from the master seed per stage name, so a
fixed (config, seed) pair yields byte-identical artifacts for any worker
count.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, cohort, model, synth, topics
from .corpus import Corpus, CorpusPaths, load_corpus, record_counts, validate_corpus
from .features import (FeatureMatrix, TOKENIZER_VERSION, default_snapshot,
                       feature_matrix)
from .gbdt import TrainConfig, load_ensemble, save_ensemble
from .lexicon import add_lexicon_features, join_external_features, load_lexicon

logger = logging.getLogger(__name__)

DEFAULT_CURVE_KS = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


def stage_seed(master: int, stage: str) -> int:
    digest = hashlib.sha256(f"{master}:{stage}".encode()).digest()
    return int.from_bytes(digest[:4], "big") & 0x7FFFFFFF


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


@dataclass
class RunConfig:
    corpus_dir: str = ""
    out_dir: str = "out"
    seed: int = 42
    workers: int = 1
    # cohort selection
    l_min: int | None = 25
    s_min: int | None = 4
    max_cov: float = 1.0
    target_size: int | None = None
    threshold_preference: str = "nearest"
    grid_l_axis: list[int] = field(default_factory=lambda: list(cohort.DEFAULT_L_AXIS))
    grid_s_axis: list[int] = field(default_factory=lambda: list(cohort.DEFAULT_S_AXIS))
    # control matching
    control_language: str = "en"
    creation_bucket: str = "quarter"
    # features
    lexicons: list[str] = field(default_factory=list)
    external_features: str | None = None
    # hashtags / topics
    top_hashtags_k: int = 10
    top_nodes_k: int = 50
    # training
    n_trees: int = 200
    max_depth: int = 6
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    k_folds: int = 10
    test_fraction: float = 0.20
    run_cv: bool = False
    curve_ks: list[int] | None = field(default_factory=lambda: list(DEFAULT_CURVE_KS))

    _KEYS = ("corpus_dir out_dir seed workers l_min s_min max_cov target_size "
             "threshold_preference grid_l_axis grid_s_axis control_language "
             "creation_bucket lexicons external_features top_hashtags_k "
             "top_nodes_k n_trees max_depth learning_rate min_samples_leaf "
             "k_folds test_fraction run_cv curve_ks").split()

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise SystemExit(f"config {path}: expected a JSON object")
        errors = [f"unknown config key {k!r}" for k in raw if k not in cls._KEYS]
        config = cls(**{k: v for k, v in raw.items() if k in cls._KEYS})
        errors.extend(config.validation_errors())
        if errors:
            raise SystemExit("config errors:\n  " + "\n  ".join(errors))
        return config

    def validation_errors(self) -> list[str]:
        errors = []
        if self.workers < 1:
            errors.append("workers must be >= 1")
        if self.l_min is not None and self.l_min < 1:
            errors.append("l_min must be >= 1")
        if self.s_min is not None and self.s_min < 1:
            errors.append("s_min must be >= 1")
        if self.max_cov < 0:
            errors.append("max_cov must be >= 0")
        if self.threshold_preference not in ("nearest", "balanced"):
            errors.append("threshold_preference must be nearest or balanced")
        if self.creation_bucket not in ("quarter", "month", "year"):
            errors.append("creation_bucket must be quarter, month or year")
        if not 0.0 < self.test_fraction < 1.0:
            errors.append("test_fraction must be in (0, 1)")
        for name in ("n_trees", "max_depth", "min_samples_leaf",
                     "top_hashtags_k", "top_nodes_k"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            errors.append("learning_rate must be > 0")
        if self.k_folds < 2:
            errors.append("k_folds must be >= 2")
        for name in ("lexicons",):
            for p in getattr(self, name):
                if not Path(p).exists():
                    errors.append(f"lexicon file not found: {p}")
        if self.external_features and not Path(self.external_features).exists():
            errors.append(
                f"external features file not found: {self.external_features}")
        return errors

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self._KEYS}

    def config_hash(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return "sha256:" + hashlib.sha256(blob).hexdigest()

    def train_config(self) -> TrainConfig:
        return TrainConfig(n_trees=self.n_trees, max_depth=self.max_depth,
                           learning_rate=self.learning_rate,
                           min_samples_leaf=self.min_samples_leaf,
                           rng_seed=stage_seed(self.seed, "model"),
                           k_folds=self.k_folds,
                           test_fraction=self.test_fraction)


class Runner:
    """Shared state for stage execution: config, lazily loaded inputs,
    and the output manifest."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self._corpus: Corpus | None = None
        self.manifest_path = self.out / "manifest.json"

    # ---- manifest -------------------------------------------------------
    def record_stage(self, stage: str, inputs: list[Path],
                     outputs: list[Path]) -> None:
        manifest = {"version": __version__, "stages": {}}
        if self.manifest_path.exists():
            with open(self.manifest_path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
        manifest["version"] = __version__
        manifest["config"] = self.config.as_dict()
        manifest.setdefault("stages", {})[stage] = {
            "seed": self.config.seed,
            "config_hash": self.config.config_hash(),
            "version": __version__,
            "inputs": {p.name: file_sha256(p) for p in inputs},
            "outputs": {p.name: file_sha256(p) for p in outputs},
        }
        with open(self.manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")

    # ---- inputs ---------------------------------------------------------
    @property
    def corpus_paths(self) -> CorpusPaths:
        if not self.config.corpus_dir:
            raise StageError("ingest", "no corpus_dir configured")
        return CorpusPaths.in_dir(self.config.corpus_dir)

    def corpus(self) -> Corpus:
        if self._corpus is None:
            paths = self.corpus_paths
            if not Path(paths.users).exists():
                raise StageError("ingest",
                                 f"missing corpus file {paths.users}")
            self._corpus = load_corpus(paths)
        return self._corpus

    def corpus_files(self) -> list[Path]:
        p = self.corpus_paths
        return [Path(x) for x in (p.users, p.tweets, p.likes, p.follows,
                                  p.seeds)]

    def artifact(self, stage: str, name: str) -> Path:
        path = self.out / name
        if not path.exists():
            raise StageError(stage, f"missing upstream artifact {name} "
                                    f"in {self.out}")
        return path

    def load_cohort_ids(self, stage: str, name: str) -> set[str]:
        with open(self.artifact(stage, name), "r", encoding="utf-8") as fh:
            return set(json.load(fh)["user_ids"])

    # ---- stages ---------------------------------------------------------
    def stage_validate(self) -> dict:
        corpus = self.corpus()
        report = validate_corpus(corpus)
        payload = {"counts": record_counts(corpus),
                   "report": report.as_dict(),
                   "consistent": report.is_empty()}
        out = self.out / "validation_report.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        self.record_stage("ingest.validate", self.corpus_files(), [out])
        return payload

    def _filtered_matrix(self):
        corpus = self.corpus()
        matrix = cohort.build_like_matrix(corpus)
        matrix = cohort.filter_follows_seed(matrix, corpus)
        matrix = cohort.filter_cov(matrix, self.config.max_cov)
        return matrix

    def stage_cohort_build(self, write_grid: bool = False) -> set[str]:
        cfg = self.config
        matrix = self._filtered_matrix()
        grid = cohort.threshold_grid(matrix, cfg.grid_l_axis, cfg.grid_s_axis)
        outputs = []
        if write_grid:
            grid_path = self.out / "grid.csv"
            with open(grid_path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["l_min", "s_min", "count"])
                for l in grid.l_axis:
                    for s in grid.s_axis:
                        writer.writerow([l, s, grid.entries[(l, s)]])
            outputs.append(grid_path)
        if cfg.l_min is not None and cfg.s_min is not None:
            l_min, s_min = cfg.l_min, cfg.s_min
        elif cfg.target_size is not None:
            l_min, s_min = cohort.auto_thresholds(
                grid, cfg.target_size, prefer=cfg.threshold_preference)
        else:
            raise StageError("cohort.build",
                             "config needs l_min/s_min or target_size")
        selected = cohort.select_cohort(matrix, l_min, s_min)
        payload = {"label": "conspiracy", "user_ids": sorted(selected),
                   "parameters": {"l_min": l_min, "s_min": s_min,
                                  "max_cov": cfg.max_cov,
                                  "target_size": cfg.target_size,
                                  "threshold_preference": cfg.threshold_preference},
                   "rng_seed": cfg.seed}
        out = self.out / "cohort.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        outputs.insert(0, out)
        self.record_stage("cohort.build", self.corpus_files(), outputs)
        return selected

    def stage_cohort_control(self) -> set[str]:
        cfg = self.config
        corpus = self.corpus()
        engaged = self.load_cohort_ids("cohort.control", "cohort.json")
        likers = cohort.seed_likers(corpus)
        constraints = cohort.ControlConstraints(
            target_language=cfg.control_language,
            creation_bucket=cfg.creation_bucket,
            excluded_users=likers,
            excluded_follow_targets=set(corpus.seeds))
        candidates = set(corpus.users) - engaged
        rng_seed = stage_seed(cfg.seed, "control")
        n = len(engaged)
        eligible = [u for u in candidates
                    if u not in likers
                    and corpus.predominant_language(u) == cfg.control_language]
        seed_set = set(corpus.seeds)
        followers = {f for f, t in corpus.follows if t in seed_set}
        eligible = [u for u in eligible if u not in followers]
        if len(eligible) < n:
            # keep the groups balanced by trimming the engaged cohort
            n = len(eligible)
            if n == 0:
                raise StageError("cohort.control", "no eligible control users")
            logger.warning("only %d eligible controls; trimming cohort from "
                           "%d to %d", n, len(engaged), n)
            trimmed = sorted(random.Random(rng_seed).sample(sorted(engaged), n))
            engaged = set(trimmed)
            with open(self.out / "cohort.json", "r", encoding="utf-8") as fh:
                payload = json.load(fh)
            payload["user_ids"] = trimmed
            payload["parameters"]["trimmed_to_match_controls"] = n
            with open(self.out / "cohort.json", "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
        control = cohort.build_control(corpus, engaged, candidates, n,
                                       constraints, rng_seed)
        payload = {"label": "control", "user_ids": sorted(control),
                   "parameters": {"language": cfg.control_language,
                                  "creation_bucket": cfg.creation_bucket,
                                  "n": n},
                   "rng_seed": rng_seed}
        out = self.out / "control.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        self.record_stage("cohort.control",
                          self.corpus_files() + [self.out / "cohort.json"],
                          [out])
        return control

    def stage_hashtags(self) -> list[tuple[str, int]]:
        engaged = self.load_cohort_ids("hashtags.top", "cohort.json")
        ranked = cohort.top_hashtags(self.corpus(), engaged,
                                     self.config.top_hashtags_k)
        out = self.out / "hashtags.csv"
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["hashtag", "tweet_count"])
            writer.writerows(ranked)
        self.record_stage("hashtags.top",
                          self.corpus_files() + [self.out / "cohort.json"],
                          [out])
        return ranked

    def stage_features(self) -> FeatureMatrix:
        cfg = self.config
        corpus = self.corpus()
        engaged = self.load_cohort_ids("features.extract", "cohort.json")
        control = self.load_cohort_ids("features.extract", "control.json")
        snapshot = default_snapshot(corpus)
        matrix = feature_matrix(corpus, engaged, control, snapshot,
                                workers=cfg.workers)
        if cfg.lexicons:
            lexicons = [load_lexicon(p) for p in cfg.lexicons]
            matrix = add_lexicon_features(matrix, corpus, lexicons)
        if cfg.external_features:
            matrix = join_external_features(matrix, cfg.external_features)
        out = self.out / "features.csv"
        matrix.to_csv(out)
        meta = {"snapshot_as_of": snapshot.as_of,
                "tokenizer_version": TOKENIZER_VERSION,
                "n_rows": matrix.n_rows,
                "columns": matrix.columns}
        meta_path = self.out / "features.meta.json"
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")
        self.record_stage(
            "features.extract",
            self.corpus_files() + [self.out / "cohort.json",
                                   self.out / "control.json"],
            [out, meta_path])
        return matrix

    def _load_features(self, stage: str) -> FeatureMatrix:
        return FeatureMatrix.from_csv(self.artifact(stage, "features.csv"))

    def _split_impute(self, matrix: FeatureMatrix):
        cfg = self.config.train_config()
        train, test = model.stratified_split(matrix, cfg.test_fraction,
                                             cfg.rng_seed)
        return model.impute(train, test)

    def stage_train(self):
        matrix = self._load_features("train")
        train, _ = self._split_impute(matrix)
        ensemble = model.train_on_matrix(train, self.config.train_config())
        out = self.out / "model.json"
        save_ensemble(ensemble, out)
        self.record_stage("train", [self.out / "features.csv"], [out])
        return ensemble

    def stage_evaluate(self) -> dict:
        cfg = self.config
        matrix = self._load_features("evaluate")
        ensemble = load_ensemble(self.artifact("evaluate", "model.json"))
        train, test = self._split_impute(matrix)
        # a single coin-flip predictor is a noisy estimate of chance-level
        # performance; average a batch of draws instead
        draws = [model.baseline_random(test, stage_seed(cfg.seed, f"baseline{i}"))
                 for i in range(25)]
        payload = {
            "model": model.evaluate_model(ensemble, test).as_dict(),
            "baseline_majority": model.baseline_majority(train, test).as_dict(),
            "baseline_random": {
                "precision": sum(d.precision for d in draws) / len(draws),
                "recall": sum(d.recall for d in draws) / len(draws),
                "f1": sum(d.f1 for d in draws) / len(draws),
                "n_draws": len(draws),
            },
            "n_train": train.n_rows,
            "n_test": test.n_rows,
            "seed": cfg.seed,
        }
        if cfg.run_cv:
            folds = model.cross_validate(matrix, cfg.train_config())
            payload["cv"] = {
                "folds": [m.as_dict() for m in folds],
                "mean_f1": sum(m.f1 for m in folds) / len(folds),
            }
        out = self.out / "metrics.json"
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        self.record_stage("evaluate", [self.out / "features.csv",
                                       self.out / "model.json"], [out])
        return payload

    def stage_importance(self) -> list[tuple[str, float]]:
        ensemble = load_ensemble(self.artifact("importance", "model.json"))
        report = model.feature_report(ensemble)
        out = self.out / "importance.csv"
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "importance"])
            for name, share in report:
                writer.writerow([name, repr(share)])
        self.record_stage("importance", [self.out / "model.json"], [out])
        return report

    def stage_curve(self) -> list[tuple[int, float]]:
        cfg = self.config
        matrix = self._load_features("curve")
        ensemble = load_ensemble(self.artifact("curve", "model.json"))
        ranking = model.importance_ranking(ensemble)
        ks = [k for k in (cfg.curve_ks or []) if k <= len(ranking)]
        if not ks:
            ks = list(range(1, len(ranking) + 1))
        if ks[-1] != len(ranking):
            ks.append(len(ranking))
        curve = model.f1_growth_curve(matrix, ranking, cfg.train_config(),
                                      ks=ks)
        out = self.out / "curve.csv"
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "f1"])
            for k, f1 in curve:
                writer.writerow([k, repr(f1)])
        self.record_stage("curve", [self.out / "features.csv",
                                    self.out / "model.json"], [out])
        return curve

    def stage_topics(self) -> None:
        corpus = self.corpus()
        jobs = [("cohort.json", "edges.csv", "nodes.csv")]
        if (self.out / "control.json").exists():
            jobs.append(("control.json", "control_edges.csv",
                         "control_nodes.csv"))
        inputs = list(self.corpus_files())
        outputs = []
        for cohort_file, edges_name, nodes_name in jobs:
            ids = self.load_cohort_ids("topics.graph", cohort_file)
            graph = topics.cooccurrence_graph(corpus, ids)
            graph = topics.top_k_subgraph(graph, self.config.top_nodes_k)
            edges_path = self.out / edges_name
            nodes_path = self.out / nodes_name
            topics.write_edges_csv(graph, edges_path)
            topics.write_nodes_csv(graph, nodes_path)
            inputs.append(self.out / cohort_file)
            outputs.extend([edges_path, nodes_path])
        self.record_stage("topics.graph", inputs, outputs)

    def run_pipeline(self) -> dict:
        report = self.stage_validate()
        if not report["consistent"]:
            logger.warning("corpus has consistency warnings; see "
                           "validation_report.json")
        self.stage_cohort_build(write_grid=True)
        self.stage_cohort_control()
        self.stage_hashtags()
        self.stage_features()
        self.stage_train()
        metrics = self.stage_evaluate()
        self.stage_importance()
        self.stage_curve()
        self.stage_topics()
        return metrics


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run-config file")
    parser.add_argument("--corpus", help="corpus directory (overrides config)")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--workers", type=int,
                        help="intra-stage parallelism (overrides config)")


def _resolve_config(args) -> RunConfig:
    config = (RunConfig.from_file(args.config) if args.config else RunConfig())
    if getattr(args, "corpus", None):
        config.corpus_dir = args.corpus
    if getattr(args, "out", None):
        config.out_dir = args.out
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    errors = config.validation_errors()
    if errors:
        raise SystemExit("config errors:\n  " + "\n  ".join(errors))
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traitline",
        description="Cohort selection and behavioral-trait classification "
                    "over archived social-media corpora.")
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="command", required=True)

    def sub(group, name, **kwargs):
        p = group.add_parser(name, **kwargs)
        _add_common(p)
        return p

    ingest = top.add_parser("ingest").add_subparsers(dest="action",
                                                     required=True)
    sub(ingest, "validate", help="load the corpus and report inconsistencies")

    coh = top.add_parser("cohort").add_subparsers(dest="action", required=True)
    build = sub(coh, "build", help="select the engaged cohort")
    build.add_argument("--grid", action="store_true",
                       help="also write the threshold grid as grid.csv")
    sub(coh, "control", help="build the matched control group")

    tags = top.add_parser("hashtags").add_subparsers(dest="action",
                                                     required=True)
    sub(tags, "top", help="rank hashtags used by the engaged cohort")

    feats = top.add_parser("features").add_subparsers(dest="action",
                                                      required=True)
    sub(feats, "extract", help="extract the behavioral feature matrix")

    for name, help_text in (("train", "fit the boosted-tree model"),
                            ("evaluate", "holdout metrics and baselines"),
                            ("importance", "write the feature ranking"),
                            ("curve", "F1 growth over top-k features")):
        p = top.add_parser(name, help=help_text)
        _add_common(p)

    topg = top.add_parser("topics").add_subparsers(dest="action",
                                                   required=True)
    sub(topg, "graph", help="hashtag co-occurrence graph per cohort")

    syn = top.add_parser("synth").add_subparsers(dest="action", required=True)
    gen = sub(syn, "generate", help="generate a synthetic benchmark corpus")
    gen.add_argument("--n", type=int, default=200, help="users per group")
    gen.add_argument("--n-seeds", type=int, default=26)
    gen.add_argument("--separation", type=float, default=1.0,
                     help="behavioral contrast between groups in [0, 1]")

    pipe = top.add_parser("pipeline").add_subparsers(dest="action",
                                                     required=True)
    sub(pipe, "run", help="run every stage in order")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    config = _resolve_config(args)
    try:
        if args.command == "synth":
            out = Path(config.out_dir)
            engaged, control = synth.default_specs(args.separation)
            synth.generate_corpus(engaged, control, args.n, args.n_seeds,
                                  config.seed, out)
            print(f"synthetic corpus written to {out}")
            return 0
        runner = Runner(config)
        if args.command == "ingest":
            payload = runner.stage_validate()
            print(json.dumps(payload["counts"]))
            print("consistent" if payload["consistent"]
                  else "inconsistencies found; see validation_report.json")
        elif args.command == "cohort" and args.action == "build":
            selected = runner.stage_cohort_build(write_grid=args.grid)
            print(f"cohort: {len(selected)} users -> cohort.json")
        elif args.command == "cohort" and args.action == "control":
            control = runner.stage_cohort_control()
            print(f"control: {len(control)} users -> control.json")
        elif args.command == "hashtags":
            for tag, count in runner.stage_hashtags():
                print(f"{tag}\t{count}")
        elif args.command == "features":
            matrix = runner.stage_features()
            print(f"features: {matrix.n_rows} rows x "
                  f"{len(matrix.columns)} columns -> features.csv")
        elif args.command == "train":
            ensemble = runner.stage_train()
            print(f"model: {len(ensemble.trees)} trees -> model.json")
        elif args.command == "evaluate":
            payload = runner.stage_evaluate()
            print(json.dumps(payload["model"]))
        elif args.command == "importance":
            for name, share in runner.stage_importance()[:20]:
                print(f"{name}\t{share:.6f}")
        elif args.command == "curve":
            for k, f1 in runner.stage_curve():
                print(f"{k}\t{f1:.6f}")
        elif args.command == "topics":
            runner.stage_topics()
            print("graphs written -> edges.csv / nodes.csv")
        elif args.command == "pipeline":
            metrics = runner.run_pipeline()
            print(json.dumps({"f1": metrics["model"]["f1"],
                              "out": str(runner.out)}))
        return 0
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
