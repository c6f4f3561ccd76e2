"""Progressive Reed-Solomon error-erasure retrieval for distributed storage."""

from .analytics import AnalyticResult, avg_accesses, pr_success
from .codec import CodeParams, Shard, encode_group, frame_payload, make_shards
from .gf import FieldContext, Poly
from .ird import DecoderState, decoder_init, erasure_decode
from .retrieval import RetrievalReport, progressive_retrieve
from .sim import FailureModel, MonteCarloSummary, run_monte_carlo, run_trial

__version__ = "0.1.0"

__all__ = [
    "AnalyticResult", "avg_accesses", "pr_success",
    "CodeParams", "Shard", "encode_group", "frame_payload", "make_shards",
    "FieldContext", "Poly",
    "DecoderState", "decoder_init", "erasure_decode",
    "RetrievalReport", "progressive_retrieve",
    "FailureModel", "MonteCarloSummary", "run_monte_carlo", "run_trial",
    "__version__",
]
