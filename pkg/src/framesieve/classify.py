"""Query-type identification: global vs localized.

A text LLM walks a four-step analysis and answers with a JSON verdict.
No frames are ever sent; the classifier is text-only.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .chat import ChatEndpoint, RetryPolicy, chat_complete, extract_first_json, text_content, with_retries
from .errors import EmptyQueryError, MissingFieldError, NonBooleanError, ProviderDownError

log = logging.getLogger(__name__)

CLASSIFICATION_PROMPT = """You are a helpful assistant in a video-based question-answering process.

Core Task & Definitions

You will classify the given query into one of two categories:

1. Global Query (isGlobal: true): The query requires going through and understanding the entire video content.

2. Localized Query (isGlobal: false): The query that can be fully answered by extracting and analyzing several specific segments within the video.

Instructions for Analysis and Response

In your analysis, please follow this structured reasoning process to classify the query:

Step 1. Understand the Query: First, read the query to understand its general meaning and core intent.

Step 2. Infer Video Style (Hypothetically): Based on the query's phrasing, make a reasonable inference about the style of the video (e.g., is it a narrative film, an educational lesson, a documentary, etc.)?

Step 3. Identify Referents: Analyze if the query has specific referents. A referent is an entity (person, object), action, event, or even specific piece of information, depending on the type of video you inferred. For instance, in 'What does Professor Smith write about quantum physics?', the referent is 'Professor Smith' and 'quantum physics' since the video style is likely a lesson.

Step 4. Evaluate Referents in Context: Based on the results from step 3 and the criteria below, determine whether the query is Global or Localized.

(i) The query is Global if it meets either condition:
    1. Lacks a specific referent. The examples include: Summary-based: "primary focus," "in summary," "what is the video about?"
    2. Has a referent, but answering still requires a holistic understanding from going through the entire video. The examples include: "what is the boy's overall role?"

(ii) The query is Localized if it has specific referents, and the answer can be found by focusing on specific, related segments where it appears. Here are some examples:
    - Entity-based: "the person in the red shirt," "the black dog," "Professor Smith," "the little girl."
    - Action/Event-based: "what is [X] doing," "how does [X] build,"
    - Temporal/Sequential: "at the beginning," "after the explosion,"

Please provide your answer in the following format:
{{"analysis_step1": str, "analysis_step2": str, "analysis_step3": str, "analysis_step4": str, "isGlobal": true/false}}

User Query: {question}
"""

_ANALYSIS_FIELDS = ("analysis_step1", "analysis_step2", "analysis_step3", "analysis_step4")


class QueryKind(enum.Enum):
    GLOBAL = "global"
    LOCALIZED = "localized"


@dataclass(frozen=True)
class QueryLabel:
    """Classifier verdict; the kind is always present, analysis may not be."""

    kind: QueryKind
    analysis_steps: tuple[str | None, str | None, str | None, str | None] = (None,) * 4
    raw_response: str = ""
    warnings: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "analysis_steps": list(self.analysis_steps),
            "warnings": list(self.warnings),
        }


def build_classification_prompt(query: str) -> str:
    """Render the classification prompt with the user query substituted."""
    if not query or not query.strip():
        raise EmptyQueryError("classification needs a non-empty query")
    return CLASSIFICATION_PROMPT.format(question=query)


def parse_classification(text: str) -> QueryLabel:
    """Read the verdict JSON out of classifier text.

    Raises NoJsonError, MissingFieldError, or NonBooleanError; missing
    analysis fields are tolerated.
    """
    obj = extract_first_json(text)
    if "isGlobal" not in obj:
        raise MissingFieldError("classification JSON lacks 'isGlobal'")
    verdict = obj["isGlobal"]
    if not isinstance(verdict, bool):
        raise NonBooleanError(f"isGlobal is not a boolean: {verdict!r}")
    steps = tuple(
        str(obj[name]) if name in obj and obj[name] is not None else None
        for name in _ANALYSIS_FIELDS
    )
    kind = QueryKind.GLOBAL if verdict else QueryKind.LOCALIZED
    return QueryLabel(kind=kind, analysis_steps=steps, raw_response=text)


def classify_query(
    query: str,
    endpoint: ChatEndpoint,
    policy: RetryPolicy = RetryPolicy(),
    *,
    fail_hard: bool = False,
) -> QueryLabel:
    """Classify a query via the chat endpoint.

    On persistent transport or parse failure the query is treated as
    localized (with a recorded warning): misrouting a global query merely
    costs compute, while misrouting a localized one forfeits the targeted
    pipeline. ``fail_hard`` raises ProviderDownError instead.
    """
    prompt = build_classification_prompt(query)

    def attempt() -> QueryLabel:
        return parse_classification(chat_complete(endpoint, text_content(prompt)))

    try:
        return with_retries(attempt, policy)
    except Exception as exc:  # noqa: BLE001
        if fail_hard:
            raise ProviderDownError(
                f"classifier failed after {policy.attempts} attempts: {exc}"
            ) from exc
        message = (
            f"classifier failed after {policy.attempts} attempts ({exc}); "
            "defaulting to localized"
        )
        log.warning(message)
        return QueryLabel(kind=QueryKind.LOCALIZED, warnings=(message,))
