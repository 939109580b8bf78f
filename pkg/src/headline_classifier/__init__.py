"""Fake/real news headline classification.

Corpus ingestion, text preprocessing, TF-IDF features, a from-scratch
dense network, three classical baselines, and an accuracy report.
"""

from .corpus import FAKE, REAL, Corpus, HeadlineRecord, Source, dedupe, ingest, split
from .evaluation import ConfusionMatrix, EvalReport, accuracy, compare, confusion
from .nn import DenseNetwork, TrainConfig, forward, init, predict, train
from .pipeline import RunConfig, predict_one, run_pipeline
from .textprep import TokenizedDoc, preprocess, remove_stopwords, tokenize
from .vectorize import SparseVector, Vocabulary, build_vocabulary, transform

__version__ = "0.1.0"

__all__ = [
    "FAKE", "REAL", "Corpus", "HeadlineRecord", "Source", "dedupe", "ingest", "split",
    "ConfusionMatrix", "EvalReport", "accuracy", "compare", "confusion",
    "DenseNetwork", "TrainConfig", "forward", "init", "predict", "train",
    "RunConfig", "predict_one", "run_pipeline",
    "TokenizedDoc", "preprocess", "remove_stopwords", "tokenize",
    "SparseVector", "Vocabulary", "build_vocabulary", "transform",
    "__version__",
]
