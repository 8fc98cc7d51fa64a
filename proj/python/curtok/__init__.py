"""Corpus curation and tokenizer optimization toolkit."""

from curtok._core import (
    LangId,
    Tokenizer,
    allocate_characters,
    byte_fallback,
    codemath,
    dedup_exact,
    dedup_near,
    exact_jaccard,
    fertility,
    judge_decision,
    judge_prompt,
    mean_word_length,
    minhash_jaccard,
    momentum_update,
    nfc,
    normalized_deficit,
    parse_judge_line,
    pii_spans,
    pretokenize,
    redact,
    reformat,
    registered_stages,
    run_pipeline,
    sample_characters,
    serialize_judge_line,
    shingles,
    target_shares,
    train_bpe,
    word_count,
)

__all__ = [
    "LangId",
    "Tokenizer",
    "allocate_characters",
    "byte_fallback",
    "codemath",
    "dedup_exact",
    "dedup_near",
    "exact_jaccard",
    "fertility",
    "judge_decision",
    "judge_prompt",
    "mean_word_length",
    "minhash_jaccard",
    "momentum_update",
    "nfc",
    "normalized_deficit",
    "parse_judge_line",
    "pii_spans",
    "pretokenize",
    "redact",
    "reformat",
    "registered_stages",
    "run_pipeline",
    "sample_characters",
    "serialize_judge_line",
    "shingles",
    "target_shares",
    "train_bpe",
    "word_count",
]
