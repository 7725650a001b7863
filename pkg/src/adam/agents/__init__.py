"""Three coordinated agents: computational, summarization, classification."""

from .computational import (
    TOP_FEATURE_COUNT,
    TOP_TAXA_COUNT,
    ComputationalOutput,
    DeployedModel,
    feature_vector,
    run_computational,
)
from .llm import (
    API_KEY_VARIABLE,
    HttpChatBackend,
    LLMBackend,
    LLMRequest,
    StaticMock,
    ThresholdMockLLM,
    TitleEchoMock,
    estimate_tokens,
    parse_verdict,
    probability_line,
    threshold_line,
)
from .pipeline import (
    CLASSIFICATION_TOKEN_BUDGET,
    DEFAULT_CLASSIFICATION_MODEL,
    DEFAULT_FALLBACK_THRESHOLD,
    DEFAULT_SUMMARIZATION_MODEL,
    NO_HISTORY_MARKER,
    NO_PASSAGES_MARKER,
    SUMMARIZATION_TOKEN_BUDGET,
    AgentContext,
    StageTranscript,
    StepRecord,
    run_classification,
    run_pipeline,
    run_summarization,
)
from .report import (
    NO_ATTRIBUTIONS_MARKER,
    SECTION_TITLES,
    ClassificationReport,
    build_report,
    build_sections,
    format_attribution,
    format_probability,
    render_report,
)
from .steps import (
    CLASSIFICATION_INSTRUCTIONS,
    CLASSIFICATION_PROGRAM,
    CLASSIFICATION_TITLES,
    SUMMARIZATION_INSTRUCTIONS,
    SUMMARIZATION_PROGRAM,
    SUMMARIZATION_TITLES,
    CoTProgram,
)

__all__ = [
    "API_KEY_VARIABLE",
    "CLASSIFICATION_INSTRUCTIONS",
    "CLASSIFICATION_PROGRAM",
    "CLASSIFICATION_TITLES",
    "CLASSIFICATION_TOKEN_BUDGET",
    "DEFAULT_CLASSIFICATION_MODEL",
    "DEFAULT_FALLBACK_THRESHOLD",
    "DEFAULT_SUMMARIZATION_MODEL",
    "NO_ATTRIBUTIONS_MARKER",
    "NO_HISTORY_MARKER",
    "NO_PASSAGES_MARKER",
    "SECTION_TITLES",
    "SUMMARIZATION_INSTRUCTIONS",
    "SUMMARIZATION_PROGRAM",
    "SUMMARIZATION_TITLES",
    "SUMMARIZATION_TOKEN_BUDGET",
    "TOP_FEATURE_COUNT",
    "TOP_TAXA_COUNT",
    "AgentContext",
    "ClassificationReport",
    "ComputationalOutput",
    "CoTProgram",
    "DeployedModel",
    "HttpChatBackend",
    "LLMBackend",
    "LLMRequest",
    "StageTranscript",
    "StaticMock",
    "StepRecord",
    "ThresholdMockLLM",
    "TitleEchoMock",
    "build_report",
    "build_sections",
    "estimate_tokens",
    "feature_vector",
    "format_attribution",
    "format_probability",
    "parse_verdict",
    "probability_line",
    "render_report",
    "run_classification",
    "run_computational",
    "run_pipeline",
    "run_summarization",
    "threshold_line",
]
