"""Two-stage agent pipeline: summarization then classification.

Each stage assembles one prompt in a fixed order (computational output,
patient history, retrieval-augmented reasoning steps, task), enforces a
hard token budget by dropping oldest history first and lowest-similarity
retrieval passages second, and issues exactly one completion. The
classification stage parses a strict verdict line and emits a
ClassificationReport. With deterministic mock backends the whole
pipeline is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import AgentError, BackendError, TokenBudgetError
from .computational import ComputationalOutput
from .llm import (
    LLMBackend,
    LLMRequest,
    estimate_tokens,
    parse_verdict,
    probability_line,
    threshold_line,
)
from .report import (
    ClassificationReport,
    build_sections,
    format_probability,
)
from .steps import CLASSIFICATION_PROGRAM, SUMMARIZATION_PROGRAM, CoTProgram

SUMMARIZATION_TOKEN_BUDGET = 100_000
CLASSIFICATION_TOKEN_BUDGET = 50_000
DEFAULT_FALLBACK_THRESHOLD = 0.5
DEFAULT_SUMMARIZATION_MODEL = "gpt-4o"
DEFAULT_CLASSIFICATION_MODEL = "gpt-4o-mini"
STEP_CONTEXT_CHARS = 500
HIT_EXCERPT_CHARS = 400
NO_HISTORY_MARKER = "No prior visits"
NO_PASSAGES_MARKER = "No passages retrieved above the similarity threshold."

_SYSTEM_PROMPTS = {
    "summarization": (
        "You are the summarization agent of a gut-microbiome Alzheimer's "
        "screening pipeline. Work through the reasoning program step by "
        "step and produce a faithful narrative summary of this visit."
    ),
    "classification": (
        "You are the classification agent of a gut-microbiome Alzheimer's "
        "screening pipeline. Work through the reasoning program step by "
        "step, then answer with a single verdict. The first line of your "
        "answer must be exactly 'Prediction: Yes' or 'Prediction: No'."
    ),
}


@dataclass(frozen=True)
class StepRecord:
    """One reasoning step after retrieval: what was asked and what came back."""

    index: int
    title: str
    query: str
    hits: tuple


@dataclass(frozen=True)
class StageTranscript:
    stage: str
    steps: tuple[StepRecord, ...]
    prompt: str
    response: str
    prompt_tokens: int
    dropped_history: int
    dropped_hits: int


@dataclass
class AgentContext:
    """Mutable per-sample state threaded through the pipeline stages.

    history holds the computational outputs of this participant's prior
    visits in ascending visit order; every entry must strictly precede
    the current visit.
    """

    sample_id: str
    study_id: str
    visit_index: int
    computational: ComputationalOutput
    history: tuple[ComputationalOutput, ...] = ()
    summary: str | None = None
    transcripts: list[StageTranscript] = field(default_factory=list)

    def __post_init__(self):
        self.history = tuple(self.history)
        previous = 0
        for entry in self.history:
            if entry.visit_index <= previous:
                raise ValueError("history must be in ascending visit order")
            previous = entry.visit_index
        if self.history and previous >= self.visit_index:
            raise ValueError("history must strictly precede the current visit")


def _excerpt(text: str, limit: int) -> str:
    return " ".join(text.split())[:limit]


def _computational_block(output: ComputationalOutput) -> str:
    lines = [
        f"Sample {output.sample_id} (study {output.study_id}, "
        f"visit {output.visit_index})",
        probability_line(output.probability),
    ]
    lines.extend(f"{title}: {body}" for title, body in build_sections(output))
    return "\n".join(lines)


def _history_line(entry: ComputationalOutput) -> str:
    leading = ", ".join(name for name, _ in entry.top_features[:3])
    return (
        f"Visit {entry.visit_index}: model probability of AD "
        f"{format_probability(entry.probability)}; Shannon Index: "
        f"{entry.diversity.shannon:.2f}; leading features: "
        f"{leading if leading else 'none'}"
    )


def _context_digest(output: ComputationalOutput) -> str:
    features = ", ".join(name for name, _ in output.top_features[:5])
    taxa = ", ".join(name for name, _ in output.taxa_highlights[:4])
    return (
        f"Alzheimer's disease probability "
        f"{format_probability(output.probability)}; leading features: "
        f"{features if features else 'none'}; dominant taxa: "
        f"{taxa if taxa else 'none'}"
    )


def _step_query(title: str, instruction: str, digest: str) -> str:
    return f"{title}: {_excerpt(f'{instruction} {digest}', STEP_CONTEXT_CHARS)}"


def _hit_line(hit) -> str:
    return (
        f"- {hit.publication_id} segment {hit.segment_index} "
        f"(similarity {hit.similarity:.4f}): "
        f"{_excerpt(hit.text, HIT_EXCERPT_CHARS)}"
    )


def _build_prompt(stage, program, output, history, steps, step_hits,
                  summary, fallback_threshold):
    lines = ["# Computational output", _computational_block(output), ""]
    lines.append("# Patient history")
    if history:
        lines.extend(_history_line(entry) for entry in history)
    else:
        lines.append(NO_HISTORY_MARKER)
    lines.append("")
    if summary is not None:
        lines.extend(["# Current visit summary", summary.rstrip(), ""])
    lines.append("# Reasoning program")
    lines.append("Work through the following steps in order.")
    for (index, title, instruction), hits in zip(steps, step_hits):
        lines.append("")
        lines.append(f"## Step {index}: {title}")
        lines.append(f"Instruction: {instruction}")
        lines.append("Relevant literature:")
        if hits:
            lines.extend(_hit_line(hit) for hit in hits)
        else:
            lines.append(NO_PASSAGES_MARKER)
    lines.extend(["", "# Task"])
    if stage == "summarization":
        lines.append(
            "Produce a comprehensive narrative summary of this visit that "
            "reflects every step of the reasoning program."
        )
    else:
        lines.append(threshold_line(fallback_threshold))
        lines.append(
            "Apply the reasoning program and decide whether this patient "
            "should be classified as having Alzheimer's disease. Answer on "
            "the first line with exactly 'Prediction: Yes' or "
            "'Prediction: No', optionally followed by ' - ' and a brief "
            "justification."
        )
    return "\n".join(lines)


def _drop_weakest_hit(step_hits) -> bool:
    """Remove the globally lowest-similarity hit; later steps lose ties."""
    weakest = None
    for step_index, hits in enumerate(step_hits):
        for position, hit in enumerate(hits):
            key = (hit.similarity, -step_index, -position)
            if weakest is None or key < weakest[0]:
                weakest = (key, step_index, position)
    if weakest is None:
        return False
    step_hits[weakest[1]].pop(weakest[2])
    return True


def _run_stage(ctx, searcher, backend, stage, program, budget, model,
               fallback_threshold=None, summary=None):
    if program.role != stage:
        raise ValueError(f"program role {program.role!r} does not match {stage!r}")
    digest = _context_digest(ctx.computational)
    steps = tuple(program.steps())
    queries = [_step_query(title, instruction, digest)
               for _, title, instruction in steps]
    step_hits = []
    for query in queries:
        hits = tuple(searcher.query(query)) if searcher is not None else ()
        step_hits.append(list(hits))

    history = list(ctx.history)
    dropped_history = 0
    dropped_hits = 0

    def assemble():
        return _build_prompt(stage, program, ctx.computational, history,
                             steps, step_hits, summary, fallback_threshold)

    prompt = assemble()
    while estimate_tokens(prompt) > budget:
        if history:
            history.pop(0)
            dropped_history += 1
        elif _drop_weakest_hit(step_hits):
            dropped_hits += 1
        else:
            raise TokenBudgetError(
                f"{stage} prompt needs {estimate_tokens(prompt)} tokens but "
                f"the budget is {budget} and nothing more can be dropped"
            )
        prompt = assemble()

    records = tuple(
        StepRecord(index=index, title=title, query=query, hits=tuple(hits))
        for (index, title, _), query, hits in zip(steps, queries, step_hits)
    )
    request = LLMRequest(model=model, system=_SYSTEM_PROMPTS[stage], user=prompt)
    try:
        response = backend.complete(request)
    except BackendError as exc:
        step_lines = tuple(
            f"Step {record.index}: {record.title} | query: {record.query} | "
            f"hits: {len(record.hits)}"
            for record in records
        )
        raise AgentError(
            f"{stage} backend failed: {exc}", transcript=step_lines
        ) from exc
    transcript = StageTranscript(
        stage=stage,
        steps=records,
        prompt=prompt,
        response=response,
        prompt_tokens=estimate_tokens(prompt),
        dropped_history=dropped_history,
        dropped_hits=dropped_hits,
    )
    ctx.transcripts.append(transcript)
    return response, transcript


def run_summarization(ctx: AgentContext, searcher, llm: LLMBackend, *,
                      budget: int = SUMMARIZATION_TOKEN_BUDGET,
                      model: str = DEFAULT_SUMMARIZATION_MODEL,
                      program: CoTProgram = SUMMARIZATION_PROGRAM) -> str:
    """Run the summarization stage; stores the summary on the context."""
    response, _ = _run_stage(ctx, searcher, llm, "summarization", program,
                             budget, model)
    ctx.summary = response
    return response


def run_classification(ctx: AgentContext, searcher, llm: LLMBackend, *,
                       budget: int = CLASSIFICATION_TOKEN_BUDGET,
                       fallback_threshold: float = DEFAULT_FALLBACK_THRESHOLD,
                       model: str = DEFAULT_CLASSIFICATION_MODEL,
                       program: CoTProgram = CLASSIFICATION_PROGRAM,
                       ) -> ClassificationReport:
    """Run the classification stage and assemble the final report."""
    if ctx.summary is None:
        raise AgentError("classification requires a summary; run the "
                         "summarization stage first")
    response, transcript = _run_stage(
        ctx, searcher, llm, "classification", program, budget, model,
        fallback_threshold=fallback_threshold, summary=ctx.summary,
    )
    verdict = parse_verdict(response)
    step_lines = tuple(
        f"[{entry.stage}] Step {record.index}: {record.title} | "
        f"query: {record.query} | hits: {len(record.hits)}"
        for entry in ctx.transcripts
        for record in entry.steps
    )
    return ClassificationReport(
        sample_id=ctx.sample_id,
        verdict=verdict,
        probability=ctx.computational.probability,
        sections=build_sections(ctx.computational),
        summary=ctx.summary,
        step_transcripts=step_lines,
    )


def run_pipeline(ctx: AgentContext, searcher, summarizer: LLMBackend,
                 classifier: LLMBackend, *,
                 summarization_budget: int = SUMMARIZATION_TOKEN_BUDGET,
                 classification_budget: int = CLASSIFICATION_TOKEN_BUDGET,
                 fallback_threshold: float = DEFAULT_FALLBACK_THRESHOLD,
                 summarization_model: str = DEFAULT_SUMMARIZATION_MODEL,
                 classification_model: str = DEFAULT_CLASSIFICATION_MODEL,
                 ) -> ClassificationReport:
    """Both stages in their fixed order for one sample."""
    run_summarization(ctx, searcher, summarizer,
                      budget=summarization_budget,
                      model=summarization_model)
    return run_classification(ctx, searcher, classifier,
                              budget=classification_budget,
                              fallback_threshold=fallback_threshold,
                              model=classification_model)
