"""Prompt-driven planner stages and chat-completion backends."""

from mrplan.llm.client import (
    AuthenticationError,
    BackendConfig,
    BackendError,
    ChatClient,
    ScriptedBackend,
    TokenLimitError,
    TransportError,
    complete,
)
from mrplan.llm.pipeline import (
    OracleBackend,
    PipelineResult,
    StageError,
    StageParseError,
    Transcript,
    parse_stage_output,
    run_pipeline,
)
from mrplan.llm.prompts import (
    PromptConfig,
    ablation_configs,
    build_allocation_prompt,
    build_coalition_prompt,
    build_decomposition_prompt,
)

__all__ = [
    "AuthenticationError", "BackendConfig", "BackendError", "ChatClient", "ScriptedBackend",
    "TokenLimitError", "TransportError", "complete",
    "OracleBackend", "PipelineResult", "StageError", "StageParseError", "Transcript",
    "parse_stage_output", "run_pipeline",
    "PromptConfig", "ablation_configs", "build_allocation_prompt", "build_coalition_prompt",
    "build_decomposition_prompt",
]
