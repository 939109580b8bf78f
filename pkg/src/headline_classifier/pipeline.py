"""End-to-end run configuration and orchestration.

A run is fully determined by the input CSVs plus a RunConfig: every
randomized stage draws its seed from the master seed, and the resolved
configuration is echoed into the report for provenance.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from functools import partial
from pathlib import Path

from . import baselines, nn
from .corpus import Corpus, Source, dedupe, ingest, split, write_jsonl
from .errors import ConfigError, DimensionError, ModelFormatError, PipelineError
from .evaluation import EvalReport, compare, write_report
from .figures import render_report_figures
from .textprep import TokenizedDoc, preprocess
from .vectorize import (
    build_vocabulary,
    load_vocabulary,
    save_vocabulary,
    transform,
    transform_matrix,
    write_features,
    write_labels,
)

log = logging.getLogger(__name__)

DISPLAY_NAMES = {"nn": "NN", "tree": "Decision Tree", "forest": "Random Forest", "svm": "SVC"}


@dataclass
class RunConfig:
    """Defaults for every stage; flags > config file > these values."""

    million: str | None = None
    fakereal: str | None = None
    gettingreal: str | None = None
    out_dir: str = "artifacts"
    train_fraction: float = 0.8
    seed: int = 42
    dedupe: bool = True
    stem: bool = True
    stopwords: bool = True
    min_df: int = 2
    max_terms: int = 10000
    hidden: tuple[int, ...] = (128, 64)
    epochs: int = 50
    batch_size: int = 512
    learning_rate: float = 1e-4
    threshold: float = 0.5
    tree_max_depth: int = 32
    tree_min_leaf: int = 2
    forest_trees: int = 101
    forest_max_depth: int = 32
    svm_lambda: float = 1e-4
    svm_epochs: int = 5

    def __post_init__(self):
        if isinstance(self.hidden, str):
            parts = [p for p in self.hidden.split(",") if p.strip()]
            self.hidden = tuple(int(p) for p in parts)
        else:
            self.hidden = tuple(int(h) for h in self.hidden)

    def seeds(self) -> dict[str, int]:
        """Per-stage seeds derived from the master seed."""
        return {
            "split": self.seed,
            "nn_init": self.seed + 1,
            "nn_shuffle": self.seed + 2,
            "forest": self.seed + 3,
            "svm": self.seed + 4,
        }

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["hidden"] = list(self.hidden)
        out["seeds"] = self.seeds()
        return out

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a flat JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**raw)

    def merged(self, **overrides) -> "RunConfig":
        values = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **values)


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError as exc:
        raise PipelineError(f"[{name}] {exc}") from exc
    except (OSError, ValueError) as exc:
        raise PipelineError(f"[{name}] {exc}") from exc


def _provided_sources(config: RunConfig) -> list[tuple[str, Source]]:
    pairs = [
        (config.million, Source.MILLION),
        (config.fakereal, Source.FAKEREAL),
        (config.gettingreal, Source.GETTINGREAL),
    ]
    return [(p, s) for p, s in pairs if p]


def run_pipeline(config: RunConfig) -> EvalReport:
    """ingest -> preprocess -> vocabulary -> transform -> train -> evaluate.

    Writes every intermediate artifact under ``config.out_dir`` and
    returns the comparison report.  Any stage failure aborts with the
    stage name prefixed to the cause.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = config.seeds()
    provenance: dict = config.to_dict()

    with _stage("ingest"):
        sources = _provided_sources(config)
        if not sources:
            raise ConfigError("no input CSV given (need at least one source)")
        records = []
        source_stats = {}
        for path, source in sources:
            result = ingest(path, source, id_start=len(records))
            records.extend(result.records)
            stats = dataclasses.asdict(result.stats)
            stats["row_errors"] = stats["row_errors"][:10]
            source_stats[source.value] = stats
            log.info(
                "ingested %s: %d rows -> %d records (%d empty, %d malformed, %d non-english)",
                path, result.stats.rows, result.stats.kept, result.stats.skipped_empty,
                result.stats.malformed, result.stats.non_english,
            )
        removed = 0
        if config.dedupe:
            records, removed = dedupe(records)
            log.info("dedupe removed %d duplicate records", removed)
        corpus = Corpus(records, split_seed=seeds["split"], train_fraction=config.train_fraction)
        write_jsonl(records, out / "corpus.jsonl")
        provenance["ingest"] = {
            "sources": source_stats,
            "dedupe_removed": removed,
            "corpus_size": len(records),
        }

    with _stage("preprocess"):
        docs = [
            preprocess(r.text, r.id, use_stopwords=config.stopwords, use_stem=config.stem)
            for r in records
        ]
        with open(out / "tokens.jsonl", "w", encoding="utf-8") as f:
            for doc in docs:
                f.write(json.dumps({"id": doc.doc_id, "tokens": list(doc.tokens)}) + "\n")

    with _stage("split"):
        train_idx, test_idx = split(corpus)
        log.info("split: %d train / %d test", len(train_idx), len(test_idx))

    with _stage("vectorize"):
        train_docs = [docs[i] for i in train_idx]
        test_docs = [docs[i] for i in test_idx]
        vocab = build_vocabulary(train_docs, min_df=config.min_df, max_terms=config.max_terms)
        save_vocabulary(vocab, out / "vocab.json")
        log.info("vocabulary: %d terms over %d training docs", len(vocab), vocab.num_docs)
        x_train = transform_matrix(train_docs, vocab)
        x_test = transform_matrix(test_docs, vocab)
        y_train = [records[i].label for i in train_idx]
        y_test = [records[i].label for i in test_idx]
        write_features(out / "features_train.jsonl", [d.doc_id for d in train_docs], x_train)
        write_features(out / "features_test.jsonl", [d.doc_id for d in test_docs], x_test)
        write_labels(out / "labels_train.csv", [d.doc_id for d in train_docs], y_train)
        write_labels(out / "labels_test.csv", [d.doc_id for d in test_docs], y_test)

    with _stage("train"):
        net = nn.init(len(vocab), list(config.hidden), seed=seeds["nn_init"])
        train_config = nn.TrainConfig(
            epochs=config.epochs,
            batch_size=config.batch_size,
            learning_rate=config.learning_rate,
            shuffle_seed=seeds["nn_shuffle"],
        )
        net, history = nn.train(net, x_train, y_train, train_config)
        log.info("nn loss: first epoch %.4f, last epoch %.4f", history[0], history[-1])
        nn.save_model(net, out / "model_nn.json")

        tree = baselines.train_tree(
            x_train, y_train, max_depth=config.tree_max_depth, min_leaf=config.tree_min_leaf
        )
        baselines.save_baseline(tree, out / "model_tree.json")
        forest = baselines.train_forest(
            x_train, y_train, n_trees=config.forest_trees,
            max_depth=config.forest_max_depth, seed=seeds["forest"],
        )
        baselines.save_baseline(forest, out / "model_forest.json")
        svm = baselines.train_svm(
            x_train, y_train, lam=config.svm_lambda,
            epochs=config.svm_epochs, seed=seeds["svm"],
        )
        baselines.save_baseline(svm, out / "model_svm.json")

    with _stage("evaluate"):
        models = [
            (DISPLAY_NAMES["nn"], partial(nn.predict, net, threshold=config.threshold)),
            (DISPLAY_NAMES["tree"], partial(baselines.tree_predict, tree)),
            (DISPLAY_NAMES["forest"], partial(baselines.forest_predict, forest)),
            (DISPLAY_NAMES["svm"], partial(baselines.svm_predict, svm)),
        ]
        report = compare(models, x_test, y_test)
        write_report(
            report,
            out / "report.json",
            csv_path=out / "report.csv",
            text_path=out / "report.txt",
            config=provenance,
        )
        render_report_figures(report, out / "figures")

    return report


def load_any_model(path: str | Path):
    """Load a model file of any kind; returns (kind, model)."""
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    kind = payload.get("model")
    if kind == "nn":
        return kind, nn.load_model(path)
    if kind in ("tree", "forest", "svm"):
        return kind, baselines.load_baseline(path)
    raise ModelFormatError(f"{path}: missing or unknown 'model' field {kind!r}")


def _model_input_dim(kind: str, model) -> int:
    return model.input_dim if kind == "nn" else model.n_features


@dataclass(frozen=True)
class Prediction:
    label: int
    label_name: str
    score: float


def predict_one(
    model_path: str | Path,
    vocab_path: str | Path,
    text: str,
    threshold: float = 0.5,
    use_stem: bool = True,
    use_stopwords: bool = True,
) -> Prediction:
    """Classify one raw headline with saved model + vocabulary artifacts.

    The score is the model's native quantity: probability for the
    network, vote fraction for trees/forests, margin for the SVM.
    """
    vocab = load_vocabulary(vocab_path)
    kind, model = load_any_model(model_path)
    dim = _model_input_dim(kind, model)
    if dim != len(vocab):
        raise DimensionError(
            f"model expects {dim} features but vocabulary has {len(vocab)} terms; "
            "artifacts come from different runs"
        )
    doc = preprocess(text, 0, use_stopwords=use_stopwords, use_stem=use_stem)
    x = transform(doc, vocab)
    if kind == "nn":
        score = nn.forward(model, x)
        label = int(score >= threshold)
    elif kind == "tree":
        score = baselines.tree_score(model, x)
        label = baselines.tree_predict(model, x)
    elif kind == "forest":
        score = baselines.forest_score(model, x)
        label = baselines.forest_predict(model, x)
    else:
        score = baselines.svm_decision(model, x)
        label = baselines.svm_predict(model, x)
    return Prediction(label=label, label_name="fake" if label else "real", score=float(score))


def tokens_jsonl_to_docs(path: str | Path) -> list[TokenizedDoc]:
    docs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            docs.append(TokenizedDoc(doc_id=int(obj["id"]), tokens=tuple(obj["tokens"])))
    return docs
