"""The speculative decoding loop: draft, verify, accept, update.

Each step drafts a tree from the cache tables, asks the verifier for its
greedy next token along every node path, accepts the tree path that matches
the greedy walk plus one bonus token, and then slides an n-gram window over
the new tokens to update the dynamic table.  Output is token-identical to
plain one-by-one greedy decoding with the same verifier; speculation only
changes how many steps that takes.

Verifiers are deterministic next-token oracles standing in for a language
model forward pass: a replay oracle for exact-continuation tests and a
k-gram frequency model for desk-scale benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .cache_table import CacheTableConfig, LruCacheTable
from .draft_tree import (
    DraftConfig,
    DraftTree,
    build_draft_tree,
    longest_branch_len,
)
from .frozen_table import FrozenTable


class Verifier(Protocol):
    """Deterministic greedy next-token oracle: same prefix, same token."""

    eos_token: int | None
    vocab_size: int | None

    def greedy_next(self, prefix: Sequence[int]) -> int: ...


class ReplayOracle:
    """Replays a fixed continuation: the token at position n is always
    ``continuation[n - prompt_len]``, and EOS once the reference runs out."""

    def __init__(self, prompt_len: int, continuation: Sequence[int], eos_token: int) -> None:
        if prompt_len < 0:
            raise ValueError("prompt_len must be non-negative")
        self.prompt_len = prompt_len
        self.continuation = tuple(continuation)
        self.eos_token = eos_token
        self.vocab_size: int | None = None

    def greedy_next(self, prefix: Sequence[int]) -> int:
        at = len(prefix) - self.prompt_len
        if at < 0:
            raise ValueError(f"prefix shorter than the replayed prompt ({len(prefix)} < {self.prompt_len})")
        if at >= len(self.continuation):
            return self.eos_token
        return self.continuation[at]


class KGramVerifier:
    """Greedy k-gram frequency model trained on tokenized documents.

    The next token is the most frequent continuation of the last ``order``
    tokens; ties break by ascending token id.  Prefixes with no counted
    continuation (including prefixes shorter than ``order``) fall back to the
    globally most frequent token.
    """

    def __init__(
        self,
        order: int,
        docs: Iterable[Sequence[int]],
        eos_token: int | None = None,
    ) -> None:
        if order < 1:
            raise ValueError("order must be at least 1")
        self.order = order
        self.eos_token = eos_token
        table: dict[tuple[int, ...], dict[int, int]] = {}
        global_counts: dict[int, int] = {}
        for doc in docs:
            tokens = tuple(doc)
            for token in tokens:
                global_counts[token] = global_counts.get(token, 0) + 1
            for i in range(len(tokens) - order):
                key = tokens[i : i + order]
                nxt = tokens[i + order]
                slot = table.setdefault(key, {})
                slot[nxt] = slot.get(nxt, 0) + 1
        if not global_counts:
            raise ValueError("training corpus contains no tokens")
        # Freeze the argmax per context so lookups are O(1) and total.
        self._best = {
            key: min(slot.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            for key, slot in table.items()
        }
        self._fallback = min(global_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        self.vocab_size: int | None = max(global_counts) + 1

    def greedy_next(self, prefix: Sequence[int]) -> int:
        if len(prefix) >= self.order:
            hit = self._best.get(tuple(prefix[-self.order :]))
            if hit is not None:
                return hit
        return self._fallback


@dataclass(frozen=True)
class StepMetrics:
    """One decoding step: nodes drafted, draft tokens accepted, tokens
    emitted (accepted + bonus, truncated at EOS), and the step tree's
    longest branch."""

    drafted: int
    accepted: int
    emitted: int
    longest_branch: int


@dataclass(frozen=True)
class RunMetrics:
    """Whole-run acceptance statistics; ``mat`` is emitted tokens per step."""

    steps: int
    total_emitted: int
    step_log: tuple[StepMetrics, ...]

    @property
    def mat(self) -> float:
        return self.total_emitted / self.steps if self.steps else 0.0


@dataclass
class DecodeState:
    """Mutable per-task state: tables, committed tokens, pending count.

    ``pending_len`` counts tokens emitted last step that no forward pass has
    consumed yet; they spend budget out of ``draft_config.tdl``.  With
    ``dynamic_enabled`` False the dynamic table stays empty (frozen-only
    wiring for ablations).
    """

    table_config: CacheTableConfig
    draft_config: DraftConfig
    dynamic: LruCacheTable
    frozen: FrozenTable | None = None
    committed: list[int] = field(default_factory=list)
    pending_len: int = 0
    step_log: list[StepMetrics] = field(default_factory=list)
    dynamic_enabled: bool = True

    @classmethod
    def fresh(
        cls,
        table_config: CacheTableConfig,
        draft_config: DraftConfig,
        frozen: FrozenTable | None = None,
        dynamic_enabled: bool = True,
    ) -> "DecodeState":
        return cls(
            table_config=table_config,
            draft_config=draft_config,
            dynamic=LruCacheTable(table_config),
            frozen=frozen,
            dynamic_enabled=dynamic_enabled,
        )


def _children(tree: DraftTree) -> tuple[list[int], list[list[int]]]:
    roots: list[int] = []
    children: list[list[int]] = [[] for _ in tree.nodes]
    for i, node in enumerate(tree.nodes):
        if node.parent is None:
            roots.append(i)
        else:
            children[node.parent].append(i)
    return roots, children


def verify_tree(
    tree: DraftTree,
    predictions: Sequence[int],
    anchor_prediction: int,
) -> tuple[list[int], int]:
    """Greedy acceptance walk over a drafted tree.

    ``predictions[i]`` must be the verifier's greedy next token given node
    i's full ancestor path; ``anchor_prediction`` the greedy next token of
    the bare context.  Starting at the anchor, descend into the child whose
    token equals the current prediction (earliest-inserted child on duplicate
    first tokens) until no child matches.  Returns the accepted node indices
    and the bonus token, i.e. the prediction at the last accepted node (the
    anchor prediction if nothing matched).
    """
    if len(predictions) != len(tree.nodes):
        raise ValueError(
            f"got {len(predictions)} predictions for {len(tree.nodes)} nodes"
        )
    roots, children = _children(tree)
    accepted: list[int] = []
    candidates = roots
    expect = anchor_prediction
    while True:
        match = next((i for i in candidates if tree.nodes[i].token == expect), None)
        if match is None:
            return accepted, expect
        accepted.append(match)
        expect = predictions[match]
        candidates = children[match]


def _node_predictions(
    tree: DraftTree, committed: Sequence[int], verifier: Verifier
) -> list[int]:
    """Verifier's greedy next token per node, fed each node's ancestor path.

    Depth-first with a shared prefix buffer, so evaluating a node costs one
    ``greedy_next`` call plus O(1) bookkeeping.
    """
    roots, children = _children(tree)
    predictions = [0] * len(tree.nodes)
    prefix = list(committed)
    stack: list[tuple[int, bool]] = [(i, False) for i in reversed(roots)]
    while stack:
        i, done = stack.pop()
        if done:
            prefix.pop()
            continue
        prefix.append(tree.nodes[i].token)
        predictions[i] = verifier.greedy_next(prefix)
        stack.append((i, True))
        stack.extend((c, False) for c in reversed(children[i]))
    return predictions


def update_tables(state: DecodeState, window_source: Sequence[int]) -> None:
    """Slide an ``ll + fl`` window over ``window_source`` one token at a time
    and insert each (leader, follower) pair into the dynamic table.

    The source is the last ``ll + fl - 1`` tokens preceding an emission plus
    the newly emitted tokens, so each new token terminates exactly one full
    window.  The frozen table is never written.
    """
    if not state.dynamic_enabled:
        return
    ll, fl = state.table_config.ll, state.table_config.fl
    width = ll + fl
    src = tuple(window_source)
    for i in range(len(src) - width + 1):
        state.dynamic.insert(src[i : i + ll], src[i + ll : i + width])


def init_from_prompt(state: DecodeState, prompt: Sequence[int]) -> None:
    """Seed a task: commit the prompt, mark its last token pending, and
    populate the dynamic table by sliding the n-gram window over the prompt."""
    state.committed = list(prompt)
    state.pending_len = min(1, len(prompt))
    if not state.dynamic_enabled:
        return
    ll, fl = state.table_config.ll, state.table_config.fl
    width = ll + fl
    tokens = tuple(prompt)
    for i in range(len(tokens) - width + 1):
        state.dynamic.insert(tokens[i : i + ll], tokens[i + ll : i + width])


def reset(state: DecodeState) -> None:
    """Fresh task on the same state: empty dynamic table, cleared sequence
    and metrics.  The frozen table is retained."""
    state.dynamic = LruCacheTable(state.table_config)
    state.committed = []
    state.pending_len = 0
    state.step_log.clear()


def decode_step(
    state: DecodeState,
    verifier: Verifier,
    dcfg: DraftConfig,
    stop_at_eos: bool = True,
) -> StepMetrics:
    """One draft / verify / accept / update cycle.

    Appends the accepted path plus the bonus token to the committed sequence
    (truncating at the first EOS when ``stop_at_eos``), marks the new tokens
    pending, and feeds them through the sliding-window table update.
    """
    ll, fl = state.table_config.ll, state.table_config.fl
    tree = build_draft_tree(
        state.committed, state.pending_len, state.dynamic, state.frozen, dcfg, state.table_config
    )
    anchor_prediction = verifier.greedy_next(state.committed)
    predictions = _node_predictions(tree, state.committed, verifier)
    accepted, bonus = verify_tree(tree, predictions, anchor_prediction)

    emitted = [tree.nodes[i].token for i in accepted]
    emitted.append(bonus)
    eos = verifier.eos_token
    if stop_at_eos and eos is not None and eos in emitted:
        emitted = emitted[: emitted.index(eos) + 1]

    window_source = state.committed[-(ll + fl - 1) :] + emitted
    state.committed.extend(emitted)
    state.pending_len = len(emitted)
    update_tables(state, window_source)

    metrics = StepMetrics(
        drafted=len(tree.nodes),
        accepted=min(len(accepted), len(emitted)),
        emitted=len(emitted),
        longest_branch=longest_branch_len(tree),
    )
    state.step_log.append(metrics)
    return metrics


def run_decode(
    state: DecodeState,
    prompt: Sequence[int],
    verifier: Verifier,
    max_new_tokens: int,
    stop_at_eos: bool = True,
) -> tuple[list[int], RunMetrics]:
    """Decode a task end to end and report acceptance statistics.

    Steps until ``max_new_tokens`` are produced or EOS is emitted; output
    past ``max_new_tokens`` is truncated, and the run metrics count the
    truncated emission so that ``mat * steps == len(output)`` exactly.
    """
    if max_new_tokens < 1:
        raise ValueError("max_new_tokens must be at least 1")
    init_from_prompt(state, prompt)
    base = len(state.step_log)
    eos = verifier.eos_token
    produced = 0
    while produced < max_new_tokens:
        step = decode_step(state, verifier, state.draft_config, stop_at_eos=stop_at_eos)
        produced += step.emitted
        if stop_at_eos and eos is not None and state.committed[-1] == eos:
            break

    log = list(state.step_log[base:])
    if produced > max_new_tokens:
        overshoot = produced - max_new_tokens
        last = log[-1]
        kept = last.emitted - overshoot
        log[-1] = StepMetrics(
            drafted=last.drafted,
            accepted=min(last.accepted, kept),
            emitted=kept,
            longest_branch=last.longest_branch,
        )
    prompt_len = len(prompt)
    output = state.committed[prompt_len : prompt_len + max_new_tokens]
    metrics = RunMetrics(
        steps=len(log),
        total_emitted=sum(m.emitted for m in log),
        step_log=tuple(log),
    )
    return output, metrics


def greedy_decode(
    prompt: Sequence[int],
    verifier: Verifier,
    max_new_tokens: int,
    stop_at_eos: bool = True,
) -> list[int]:
    """Plain one-token-at-a-time greedy decoding; the baseline speculative
    runs must match token for token."""
    if max_new_tokens < 1:
        raise ValueError("max_new_tokens must be at least 1")
    seq = list(prompt)
    out: list[int] = []
    eos = verifier.eos_token
    for _ in range(max_new_tokens):
        token = verifier.greedy_next(seq)
        seq.append(token)
        out.append(token)
        if stop_at_eos and eos is not None and token == eos:
            break
    return out
