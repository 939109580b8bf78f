"""Command-line interface: each pipeline stage plus the full run.

Exit code 0 on success; failures print a stage-tagged message on stderr
and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import baselines, nn
from .corpus import Corpus, Source, dedupe, ingest, read_jsonl, split, write_jsonl
from .errors import PipelineError
from .evaluation import compare, write_report
from .figures import render_report_figures
from .pipeline import (
    DISPLAY_NAMES,
    RunConfig,
    load_any_model,
    predict_one,
    run_pipeline,
    tokens_jsonl_to_docs,
)
from .synthetic import generate_headlines, write_source_csvs
from .textprep import preprocess
from .vectorize import (
    build_vocabulary,
    read_features,
    read_labels,
    save_vocabulary,
    transform_matrix,
    write_features,
    write_labels,
)


def _parse_hidden(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--million", help="million-headlines CSV (real class)")
    p.add_argument("--fakereal", help="fake-and-real CSV (fake class)")
    p.add_argument("--gettingreal", help="getting-real CSV (fake class)")


def _cmd_ingest(args) -> int:
    sources = [
        (args.million, Source.MILLION),
        (args.fakereal, Source.FAKEREAL),
        (args.gettingreal, Source.GETTINGREAL),
    ]
    provided = [(p, s) for p, s in sources if p]
    if not provided:
        raise PipelineError("no input CSV given (need at least one source)")
    records = []
    for path, source in provided:
        result = ingest(path, source, id_start=len(records))
        records.extend(result.records)
        st = result.stats
        logging.info(
            "%s: %d rows -> %d records (%d empty, %d malformed, %d non-english)",
            path, st.rows, st.kept, st.skipped_empty, st.malformed, st.non_english,
        )
        for err in st.row_errors[:5]:
            logging.warning("  %s", err)
    if not args.no_dedupe:
        records, removed = dedupe(records)
        logging.info("dedupe removed %d duplicates, %d records kept", removed, len(records))
    write_jsonl(records, args.out)
    logging.info("wrote %s", args.out)
    return 0


def _cmd_preprocess(args) -> int:
    records = read_jsonl(args.infile)
    with open(args.out, "w", encoding="utf-8") as f:
        for r in records:
            doc = preprocess(
                r.text, r.id, use_stopwords=not args.no_stopwords, use_stem=not args.no_stem
            )
            f.write(json.dumps({"id": doc.doc_id, "tokens": list(doc.tokens)}) + "\n")
    logging.info("preprocessed %d records -> %s", len(records), args.out)
    return 0


def _cmd_vectorize(args) -> int:
    docs = tokens_jsonl_to_docs(args.tokens)
    if args.corpus:
        records = read_jsonl(args.corpus)
        by_id = {d.doc_id: d for d in docs}
        missing = [r.id for r in records if r.id not in by_id]
        if missing:
            raise PipelineError(f"tokens file lacks ids {missing[:5]} present in corpus")
        corpus = Corpus(records, split_seed=args.seed, train_fraction=args.train_fraction)
        train_idx, test_idx = split(corpus)
        train_docs = [by_id[records[i].id] for i in train_idx]
        test_docs = [by_id[records[i].id] for i in test_idx]
        vocab = build_vocabulary(train_docs, min_df=args.min_df, max_terms=args.max_terms)
        save_vocabulary(vocab, args.vocab_out)
        out_dir = Path(args.out_dir) if args.out_dir else Path(args.vocab_out).parent
        out_dir.mkdir(parents=True, exist_ok=True)
        write_features(
            out_dir / "features_train.jsonl",
            [d.doc_id for d in train_docs],
            transform_matrix(train_docs, vocab),
        )
        write_features(
            out_dir / "features_test.jsonl",
            [d.doc_id for d in test_docs],
            transform_matrix(test_docs, vocab),
        )
        write_labels(
            out_dir / "labels_train.csv",
            [d.doc_id for d in train_docs],
            [records[i].label for i in train_idx],
        )
        write_labels(
            out_dir / "labels_test.csv",
            [d.doc_id for d in test_docs],
            [records[i].label for i in test_idx],
        )
        logging.info(
            "vocabulary: %d terms; %d train / %d test feature rows -> %s",
            len(vocab), len(train_docs), len(test_docs), out_dir,
        )
    else:
        vocab = build_vocabulary(docs, min_df=args.min_df, max_terms=args.max_terms)
        save_vocabulary(vocab, args.vocab_out)
        logging.info("vocabulary: %d terms over %d docs", len(vocab), vocab.num_docs)
        if args.features_out:
            write_features(
                args.features_out, [d.doc_id for d in docs], transform_matrix(docs, vocab)
            )
            logging.info("wrote %s", args.features_out)
    return 0


def _load_training_data(features_path, labels_path):
    ids, vectors = read_features(features_path)
    label_ids, labels = read_labels(labels_path)
    if ids != label_ids:
        raise PipelineError("features and labels files disagree on document ids")
    return vectors, labels


def _cmd_train(args) -> int:
    vectors, labels = _load_training_data(args.features, args.labels)
    if not vectors:
        raise PipelineError("empty training set")
    net = nn.init(vectors[0].dim, list(_parse_hidden(args.hidden)), seed=args.seed)
    config = nn.TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        shuffle_seed=args.seed + 1,
    )
    net, history = nn.train(net, vectors, labels, config)
    logging.info("loss: first epoch %.4f, last epoch %.4f", history[0], history[-1])
    nn.save_model(net, args.model_out)
    logging.info("wrote %s", args.model_out)
    return 0


def _cmd_train_baseline(args) -> int:
    vectors, labels = _load_training_data(args.features, args.labels)
    if args.model == "tree":
        model = baselines.train_tree(
            vectors, labels, max_depth=args.max_depth, min_leaf=args.min_leaf
        )
    elif args.model == "forest":
        model = baselines.train_forest(
            vectors, labels, n_trees=args.trees, max_depth=args.max_depth, seed=args.seed
        )
    else:
        model = baselines.train_svm(
            vectors, labels, lam=args.svm_lambda, epochs=args.svm_epochs, seed=args.seed
        )
    baselines.save_baseline(model, args.model_out)
    logging.info("wrote %s", args.model_out)
    return 0


def _predictor_for(kind: str, model, threshold: float):
    if kind == "nn":
        return lambda x: nn.predict(model, x, threshold)
    if kind == "tree":
        return lambda x: baselines.tree_predict(model, x)
    if kind == "forest":
        return lambda x: baselines.forest_predict(model, x)
    return lambda x: baselines.svm_predict(model, x)


def _cmd_evaluate(args) -> int:
    vectors, labels = _load_training_data(args.features, args.labels)
    models = []
    for path in args.models.split(","):
        kind, model = load_any_model(path.strip())
        models.append((DISPLAY_NAMES[kind], _predictor_for(kind, model, args.threshold)))
    report = compare(models, vectors, labels)
    report_path = Path(args.report)
    csv_path = args.csv or report_path.with_suffix(".csv")
    text_path = args.text or report_path.with_suffix(".txt")
    write_report(report, report_path, csv_path=csv_path, text_path=text_path)
    if not args.no_figures:
        figures_dir = args.figures_dir or report_path.parent / "figures"
        paths = render_report_figures(report, figures_dir)
        logging.info("figures: %s", ", ".join(str(p) for p in paths))
    sys.stdout.write(report.to_text_table())
    return 0


def _cmd_run(args) -> int:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    config = config.merged(
        million=args.million,
        fakereal=args.fakereal,
        gettingreal=args.gettingreal,
        out_dir=args.out_dir,
        train_fraction=args.train_fraction,
        seed=args.seed,
        dedupe=False if args.no_dedupe else None,
        stem=False if args.no_stem else None,
        stopwords=False if args.no_stopwords else None,
        min_df=args.min_df,
        max_terms=args.max_terms,
        hidden=_parse_hidden(args.hidden) if args.hidden else None,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        tree_max_depth=args.tree_max_depth,
        forest_trees=args.forest_trees,
        svm_lambda=args.svm_lambda,
        svm_epochs=args.svm_epochs,
    )
    report = run_pipeline(config)
    sys.stdout.write(report.to_text_table())
    return 0


def _cmd_predict(args) -> int:
    prediction = predict_one(
        args.model,
        args.vocab,
        args.headline,
        threshold=args.threshold,
        use_stem=not args.no_stem,
        use_stopwords=not args.no_stopwords,
    )
    print(f"{prediction.label_name}\t{prediction.score!r}")
    return 0


def _cmd_synthesize(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = generate_headlines(n=args.n, seed=args.seed)
    n_real, n_fake = write_source_csvs(
        rows, out_dir / "synthetic_million.csv", out_dir / "synthetic_fakereal.csv"
    )
    logging.info("wrote %d real + %d fake synthetic headlines under %s", n_real, n_fake, out_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="headline-clf",
        description="Fake/real headline classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="unify source CSVs into corpus.jsonl")
    _add_source_args(p)
    p.add_argument("--out", required=True, help="output corpus JSONL path")
    p.add_argument("--no-dedupe", action="store_true", help="keep exact duplicates")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("preprocess", help="tokenize, filter stop words, stem")
    p.add_argument("--in", dest="infile", required=True, help="corpus JSONL")
    p.add_argument("--out", required=True, help="output tokens JSONL")
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--no-stopwords", action="store_true")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("vectorize", help="build vocabulary and TF-IDF features")
    p.add_argument("--tokens", required=True, help="tokens JSONL")
    p.add_argument("--vocab-out", required=True, help="output vocabulary JSON")
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--max-terms", type=int, default=10000)
    p.add_argument("--corpus", help="corpus JSONL; enables split + train/test features")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", help="directory for split features/labels files")
    p.add_argument("--features-out", help="single features file (no --corpus)")
    p.set_defaults(func=_cmd_vectorize)

    p = sub.add_parser("train", help="train the dense network")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--hidden", default="128,64")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("train-baseline", help="train a comparison model")
    p.add_argument("--model", required=True, choices=("tree", "forest", "svc"))
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--max-depth", type=int, default=32)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--trees", type=int, default=101)
    p.add_argument("--svm-lambda", type=float, default=1e-4)
    p.add_argument("--svm-epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=_cmd_train_baseline)

    p = sub.add_parser("evaluate", help="compare saved models on a test set")
    p.add_argument("--models", required=True, help="comma-separated model JSON paths")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--report", required=True, help="output report JSON")
    p.add_argument("--csv", help="report CSV path (default: report path with .csv)")
    p.add_argument("--text", help="report text table path (default: report path with .txt)")
    p.add_argument("--figures-dir", help="where to render figures (default: <report>/figures)")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run", help="full pipeline: ingest through report")
    _add_source_args(p)
    p.add_argument("--out-dir", help="artifact directory (default: artifacts)")
    p.add_argument("--config", help="flat JSON config file; flags override it")
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-dedupe", action="store_true")
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--no-stopwords", action="store_true")
    p.add_argument("--min-df", type=int)
    p.add_argument("--max-terms", type=int)
    p.add_argument("--hidden")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--tree-max-depth", type=int)
    p.add_argument("--forest-trees", type=int)
    p.add_argument("--svm-lambda", type=float)
    p.add_argument("--svm-epochs", type=int)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("predict", help="classify one headline with saved artifacts")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--no-stopwords", action="store_true")
    p.add_argument("headline")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("synthesize", help="generate the separable demo corpus CSVs")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=1234)
    p.set_defaults(func=_cmd_synthesize)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
