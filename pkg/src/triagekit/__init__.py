"""Ticket intelligence for application maintenance.

Ingests incident logs, retrieves similar/duplicate tickets over a TF-IDF
inverted index, recommends assignees and business-process mappings with
feedback-aware classifiers, and mines central problem themes.
"""

__version__ = "0.1.0"

from triagekit.model import Corpus, FieldSchema, TicketRecord, default_schema
from triagekit.search import (
    BandThresholds,
    InvertedIndex,
    Query,
    SearchHit,
    build_index,
    categorize_similarity,
    search,
)
from triagekit.classify import (
    ClassifierModel,
    FeedbackEvent,
    Recommendation,
    TrainConfig,
    apply_feedback,
    predict,
    predict_with_kernel,
    train,
)
from triagekit.themes import ThemeConfig, ThemeReport, mine_themes
from triagekit.ingest import IngestConfig, ingest
from triagekit.store import FeedbackLog, Store

__all__ = [
    "BandThresholds",
    "ClassifierModel",
    "Corpus",
    "FeedbackEvent",
    "FeedbackLog",
    "FieldSchema",
    "IngestConfig",
    "InvertedIndex",
    "Query",
    "Recommendation",
    "SearchHit",
    "Store",
    "ThemeConfig",
    "ThemeReport",
    "TicketRecord",
    "TrainConfig",
    "apply_feedback",
    "build_index",
    "categorize_similarity",
    "default_schema",
    "ingest",
    "mine_themes",
    "predict",
    "predict_with_kernel",
    "search",
    "train",
]
