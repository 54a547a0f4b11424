"""Speculative decoding from LRU n-gram cache tables.

Draft trees are grown by recursive cache queries, verified in parallel with
an ancestor-only attention mask against a deterministic greedy verifier, and
the dynamic table is refreshed with a sliding window over accepted tokens.
Output is always token-identical to plain greedy decoding.
"""

from .cache_table import (
    CacheTableConfig,
    EvictedFollower,
    EvictedLeader,
    Eviction,
    Follower,
    Leader,
    LruCacheTable,
    TokenId,
    max_retained_tokens,
)
from .decode_loop import (
    DecodeState,
    KGramVerifier,
    ReplayOracle,
    RunMetrics,
    StepMetrics,
    Verifier,
    decode_step,
    greedy_decode,
    init_from_prompt,
    reset,
    run_decode,
    update_tables,
    verify_tree,
)
from .draft_tree import (
    DraftConfig,
    DraftNode,
    DraftTree,
    attention_mask,
    branches,
    build_draft_tree,
    linearize,
    longest_branch_len,
)
from .frozen_table import (
    FrozenTable,
    FrozenTableLoadError,
    NGramCounts,
    build_frozen,
    count_ngrams,
)

__all__ = [
    "CacheTableConfig",
    "DecodeState",
    "DraftConfig",
    "DraftNode",
    "DraftTree",
    "EvictedFollower",
    "EvictedLeader",
    "Eviction",
    "Follower",
    "FrozenTable",
    "FrozenTableLoadError",
    "KGramVerifier",
    "Leader",
    "LruCacheTable",
    "NGramCounts",
    "ReplayOracle",
    "RunMetrics",
    "StepMetrics",
    "TokenId",
    "Verifier",
    "attention_mask",
    "branches",
    "build_draft_tree",
    "build_frozen",
    "count_ngrams",
    "decode_step",
    "greedy_decode",
    "init_from_prompt",
    "linearize",
    "longest_branch_len",
    "max_retained_tokens",
    "reset",
    "run_decode",
    "update_tables",
    "verify_tree",
]
