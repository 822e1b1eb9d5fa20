"""Lightweight sentence encoder and retrieval benchmark for course syllabi."""

from ._eduembed import (
    EduembedError,
    Encoder,
    Vocabulary,
    build_vocab,
    chunk_document,
    cosine_mse_loss,
    extractive_answer,
    generate_synthetic,
    grade_answer,
    init_encoder,
    load_checkpoint,
    load_vocabulary,
    mnrl_loss,
    normalize_text,
    retrieve,
    run_cli,
    save_checkpoint,
    save_vocabulary,
    tokenize,
)

__all__ = [
    "EduembedError",
    "Encoder",
    "Vocabulary",
    "build_vocab",
    "chunk_document",
    "cosine_mse_loss",
    "extractive_answer",
    "generate_synthetic",
    "grade_answer",
    "init_encoder",
    "load_checkpoint",
    "load_vocabulary",
    "mnrl_loss",
    "normalize_text",
    "retrieve",
    "run_cli",
    "save_checkpoint",
    "save_vocabulary",
    "tokenize",
]
