"""Question answering over document collections.

The package splits into evidence retrieval (rank which documents can
answer a question), answering (extract the answer strings from the
relevant documents), and evaluation (score rankings with mean average
precision and answer lists with a Hungarian-matched similarity metric).

Two retrieval routes are provided: text spotting over OCR tokens
(:mod:`docqakit.textspot`) and structured queries over normalized form
records (:mod:`docqakit.records`).  Answering goes through the record
fields directly or through an external span-extraction adapter speaking
a small JSON protocol (:mod:`docqakit.adapter`).  :mod:`docqakit.pipeline`
wires the stages together and :mod:`docqakit.cli` exposes them as the
``docqakit`` command.
"""

from .adapter import (
    ADAPTER_ENV_VAR,
    AnswerAdapter,
    CallableAdapter,
    EchoStubAdapter,
    HttpAdapter,
    SpanAnswer,
    StdioAdapter,
    answer_documents,
    decode_request,
    decode_response,
    encode_error,
    encode_request,
    encode_response,
    resolve_adapter,
)
from .context import serialize_context
from .dataset_io import (
    Collection,
    GroundTruthEntry,
    Question,
    Submission,
    cross_validate,
    load_collection,
    load_documents,
    load_gt,
    load_questions,
    load_records,
    load_schema,
    load_submissions,
    save_documents,
    save_gt,
    save_questions,
    save_records,
    save_report,
    save_schema,
    save_submissions,
    write_json,
)
from .errors import (
    AdapterError,
    ConfigurationError,
    DocqakitError,
    NoKeywordsError,
    ValidationError,
)
from .fixtures import Fixture, FixtureSpec, generate_fixture, inject_ocr_noise, save_fixture
from .metrics import (
    Assignment,
    MetricReport,
    QuestionScore,
    RankedDoc,
    anlsl,
    average_precision,
    evaluate,
    hungarian_match,
    levenshtein,
    nls,
)
from .pipeline import PIPELINES, PipelineConfig, run_pipeline
from .records import (
    YES_NO,
    Constraint,
    FieldSpec,
    FieldValue,
    RecordDoc,
    Schema,
    StructuredQuery,
    candidate_registration_schema,
    eval_constraint,
    extract_answers,
    normalize_record,
    query_collection,
    validate_query,
)
from .textspot import (
    DocumentOcr,
    Token,
    doc_confidence,
    extract_keywords,
    rank_collection,
    threshold_relevant,
)

__version__ = "0.1.0"

__all__ = [
    "ADAPTER_ENV_VAR",
    "AdapterError",
    "AnswerAdapter",
    "Assignment",
    "CallableAdapter",
    "Collection",
    "ConfigurationError",
    "Constraint",
    "DocqakitError",
    "DocumentOcr",
    "EchoStubAdapter",
    "FieldSpec",
    "FieldValue",
    "Fixture",
    "FixtureSpec",
    "GroundTruthEntry",
    "HttpAdapter",
    "MetricReport",
    "NoKeywordsError",
    "PIPELINES",
    "PipelineConfig",
    "Question",
    "QuestionScore",
    "RankedDoc",
    "RecordDoc",
    "Schema",
    "SpanAnswer",
    "StdioAdapter",
    "StructuredQuery",
    "Submission",
    "Token",
    "ValidationError",
    "YES_NO",
    "anlsl",
    "answer_documents",
    "average_precision",
    "candidate_registration_schema",
    "cross_validate",
    "decode_request",
    "decode_response",
    "doc_confidence",
    "encode_error",
    "encode_request",
    "encode_response",
    "eval_constraint",
    "evaluate",
    "extract_answers",
    "extract_keywords",
    "generate_fixture",
    "hungarian_match",
    "inject_ocr_noise",
    "levenshtein",
    "load_collection",
    "load_documents",
    "load_gt",
    "load_questions",
    "load_records",
    "load_schema",
    "load_submissions",
    "nls",
    "normalize_record",
    "query_collection",
    "rank_collection",
    "resolve_adapter",
    "run_pipeline",
    "save_documents",
    "save_fixture",
    "save_gt",
    "save_questions",
    "save_records",
    "save_report",
    "save_schema",
    "save_submissions",
    "serialize_context",
    "threshold_relevant",
    "validate_query",
    "write_json",
    "__version__",
]
