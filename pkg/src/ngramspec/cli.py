"""Command-line harness: frozen-table builds, decode benchmarks, grid sweeps,
and the dual-table ablation.

Benchmarks are model-free: a task document is split in half, the first half
is the prompt, and a deterministic verifier produces the continuation (a
replay oracle replays the second half; a k-gram verifier is trained on the
full task documents).  State is reset between tasks, so every command is
deterministic given its inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .cache_table import CacheTableConfig
from .decode_loop import (
    DecodeState,
    KGramVerifier,
    ReplayOracle,
    RunMetrics,
    Verifier,
    reset,
    run_decode,
)
from .draft_tree import DraftConfig
from .frozen_table import FrozenTable, build_frozen, count_ngrams

# Reserved end-of-sequence id (u32 max); neither tokenizer can produce it.
EOS_TOKEN = 0xFFFF_FFFF

MODES = ("dual", "dynamic", "frozen")


class Vocab:
    """Insertion-ordered word-to-id map for the whitespace tokenizer."""

    def __init__(self, words: Iterable[str] = ()) -> None:
        self._ids: dict[str, int] = {}
        for word in words:
            self.id(word)

    def id(self, word: str) -> int:
        at = self._ids.get(word)
        if at is None:
            at = self._ids[word] = len(self._ids)
        return at

    def encode(self, text: str) -> list[int]:
        return [self.id(word) for word in text.split()]

    def words(self) -> list[str]:
        return list(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.words()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))


def tokenize(text: str, mode: str, vocab: Vocab | None = None) -> list[int]:
    """Token ids for ``text``: raw UTF-8 bytes (ids 0-255) in byte mode, or
    whitespace-split words mapped through an insertion-ordered vocabulary."""
    if mode == "byte":
        return list(text.encode("utf-8"))
    if mode == "whitespace":
        return (vocab if vocab is not None else Vocab()).encode(text)
    raise ValueError(f"unknown tokenizer mode {mode!r}")


def read_documents(paths: Sequence[str | Path], doc_mode: str) -> list[str]:
    """Load corpus documents: one per non-blank line, or one per file."""
    if doc_mode not in ("line", "file"):
        raise ValueError(f"unknown doc mode {doc_mode!r}")
    docs: list[str] = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        if doc_mode == "line":
            docs.extend(line for line in text.splitlines() if line.strip())
        elif text.strip():
            docs.append(text)
    return docs


def sample_documents(docs: Sequence[str], fraction: float, seed: int) -> list[str]:
    """Seeded Bernoulli document sample; ``fraction`` must be in (0, 1]."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"sample fraction must be in (0, 1], got {fraction}")
    if fraction >= 1.0:
        return list(docs)
    rng = random.Random(seed)
    return [doc for doc in docs if rng.random() < fraction]


@dataclass
class RunConfig:
    """Effective benchmark configuration (defaults: the empirically best
    table and budget settings)."""

    ll: int = 1
    fl: int = 3
    lc: int = 2**20
    fc: int = 128
    tdl: int = 96
    crt: int = 16
    tokenizer: str = "whitespace"
    verifier: str = "kgram"
    kgram_order: int = 3
    max_new_tokens: int = 128
    seed: int = 0

    def validate(self) -> None:
        self.table_config()
        self.draft_config()
        if self.tokenizer not in ("whitespace", "byte"):
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")
        if self.verifier not in ("kgram", "replay"):
            raise ValueError(f"unknown verifier {self.verifier!r}")
        if self.kgram_order < 1:
            raise ValueError("kgram order must be at least 1")
        if self.max_new_tokens < 1:
            raise ValueError("max-new-tokens must be at least 1")

    def table_config(self) -> CacheTableConfig:
        return CacheTableConfig(ll=self.ll, fl=self.fl, lc=self.lc, fc=self.fc)

    def draft_config(self) -> DraftConfig:
        return DraftConfig(tdl=self.tdl, crt=self.crt)

    def as_dict(self) -> dict:
        return {
            "ll": self.ll,
            "fl": self.fl,
            "lc": self.lc,
            "fc": self.fc,
            "tdl": self.tdl,
            "crt": self.crt,
            "tokenizer": self.tokenizer,
            "verifier": self.verifier,
            "kgram_order": self.kgram_order,
            "max_new_tokens": self.max_new_tokens,
            "seed": self.seed,
        }


@dataclass
class TaskResult:
    name: str
    steps: int
    emitted: int
    wall_s: float
    metrics: RunMetrics

    @property
    def mat(self) -> float:
        return self.emitted / self.steps if self.steps else 0.0


@dataclass
class BenchReport:
    """Per-task results plus aggregates recomputable from the task rows."""

    config: dict
    mode: str
    tasks: list[TaskResult] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return sum(t.steps for t in self.tasks)

    @property
    def emitted(self) -> int:
        return sum(t.emitted for t in self.tasks)

    @property
    def mat(self) -> float:
        return self.emitted / self.steps if self.steps else 0.0

    @property
    def wall_s(self) -> float:
        return sum(t.wall_s for t in self.tasks)

    @property
    def tokens_per_sec(self) -> float:
        return self.emitted / self.wall_s if self.wall_s > 0 else 0.0

    def to_text(self) -> str:
        lines = [f"# config: {json.dumps(self.config, sort_keys=True)}"]
        lines.append(f"{'task':<24}{'steps':>8}{'tokens':>8}{'mat':>8}{'wall_s':>10}")
        for t in self.tasks:
            lines.append(
                f"{t.name:<24}{t.steps:>8}{t.emitted:>8}{t.mat:>8.3f}{t.wall_s:>10.4f}"
            )
        lines.append(
            f"{'aggregate':<24}{self.steps:>8}{self.emitted:>8}{self.mat:>8.3f}"
            f"{self.wall_s:>10.4f}"
        )
        lines.append(
            f"# mode={self.mode} speedup_proxy={self.mat:.3f} "
            f"tokens_per_sec={self.tokens_per_sec:.1f}"
        )
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"kind": "config", "mode": self.mode, **self.config}, sort_keys=True)]
        for t in self.tasks:
            lines.append(
                json.dumps(
                    {
                        "kind": "task",
                        "task": t.name,
                        "steps": t.steps,
                        "emitted": t.emitted,
                        "mat": t.mat,
                        "wall_s": t.wall_s,
                        "step_log": [
                            {
                                "drafted": m.drafted,
                                "accepted": m.accepted,
                                "emitted": m.emitted,
                                "longest_branch": m.longest_branch,
                            }
                            for m in t.metrics.step_log
                        ],
                    },
                    sort_keys=True,
                )
            )
        lines.append(
            json.dumps(
                {
                    "kind": "aggregate",
                    "steps": self.steps,
                    "emitted": self.emitted,
                    "mat": self.mat,
                    "speedup_proxy": self.mat,
                    "wall_s": self.wall_s,
                    "tokens_per_sec": self.tokens_per_sec,
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["task,steps,emitted,mat,wall_s"]
        for t in self.tasks:
            lines.append(f"{t.name},{t.steps},{t.emitted},{t.mat:.6f},{t.wall_s:.6f}")
        lines.append(f"AGGREGATE,{self.steps},{self.emitted},{self.mat:.6f},{self.wall_s:.6f}")
        return "\n".join(lines)

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "json":
            return self.to_jsonl()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


@dataclass
class SweepRow:
    ll: int
    fl: int
    mat: float
    tokens_per_step: float


@dataclass
class SweepReport:
    config: dict
    rows: list[SweepRow]

    @property
    def ll1_attains_max(self) -> bool:
        if not self.rows:
            return False
        best = max(row.mat for row in self.rows)
        return any(row.ll == 1 and row.mat == best for row in self.rows)

    def to_csv(self) -> str:
        lines = ["ll,fl,mat,tokens_per_step"]
        lines.extend(
            f"{r.ll},{r.fl},{r.mat:.6f},{r.tokens_per_step:.6f}" for r in self.rows
        )
        return "\n".join(lines)

    def to_text(self) -> str:
        lines = [f"# config: {json.dumps(self.config, sort_keys=True)}", self.to_csv()]
        lines.append(f"# ll=1 attains grid max: {self.ll1_attains_max}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"kind": "config", **self.config}, sort_keys=True)]
        for r in self.rows:
            lines.append(
                json.dumps(
                    {
                        "kind": "cell",
                        "ll": r.ll,
                        "fl": r.fl,
                        "mat": r.mat,
                        "tokens_per_step": r.tokens_per_step,
                    },
                    sort_keys=True,
                )
            )
        lines.append(
            json.dumps(
                {"kind": "summary", "ll1_attains_max": self.ll1_attains_max},
                sort_keys=True,
            )
        )
        return "\n".join(lines)

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        if fmt == "json":
            return self.to_jsonl()
        raise ValueError(f"unknown format {fmt!r}")


@dataclass
class AblateReport:
    config: dict
    runs: dict[str, BenchReport]

    def to_text(self) -> str:
        lines = [f"# config: {json.dumps(self.config, sort_keys=True)}"]
        lines.append(f"{'wiring':<16}{'steps':>8}{'tokens':>8}{'mat':>8}{'tok/s':>10}")
        for mode in MODES:
            rep = self.runs[mode]
            lines.append(
                f"{mode:<16}{rep.steps:>8}{rep.emitted:>8}{rep.mat:>8.3f}"
                f"{rep.tokens_per_sec:>10.1f}"
            )
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["wiring,steps,emitted,mat"]
        for mode in MODES:
            rep = self.runs[mode]
            lines.append(f"{mode},{rep.steps},{rep.emitted},{rep.mat:.6f}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"kind": "config", **self.config}, sort_keys=True)]
        for mode in MODES:
            rep = self.runs[mode]
            lines.append(
                json.dumps(
                    {
                        "kind": "wiring",
                        "wiring": mode,
                        "steps": rep.steps,
                        "emitted": rep.emitted,
                        "mat": rep.mat,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines)

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_jsonl()
        raise ValueError(f"unknown format {fmt!r}")


def _split_task(doc: Sequence[int]) -> tuple[list[int], list[int]]:
    # Prompt = first half (at least one token), target = remainder.
    cut = max(1, len(doc) // 2)
    return list(doc[:cut]), list(doc[cut:])


def run_bench(
    cfg: RunConfig,
    docs: Sequence[Sequence[int]],
    frozen: FrozenTable | None = None,
    mode: str = "dual",
    task_names: Sequence[str] | None = None,
) -> BenchReport:
    """Run every task document through the decode loop under one wiring.

    mode selects the table wiring: "dual" (both tables), "dynamic" (no
    frozen), "frozen" (dynamic never seeded or updated).  One state is
    reused and reset between tasks.
    """
    cfg.validate()
    if mode not in MODES:
        raise ValueError(f"unknown wiring mode {mode!r}")
    if mode == "frozen" and frozen is None:
        raise ValueError("frozen-only wiring requires a frozen table")
    docs = [list(d) for d in docs if len(d)]
    if not docs:
        raise ValueError("no non-empty task documents")
    names = list(task_names) if task_names else [f"task-{i:03d}" for i in range(len(docs))]

    shared: Verifier | None = None
    if cfg.verifier == "kgram":
        shared = KGramVerifier(cfg.kgram_order, docs)

    state = DecodeState.fresh(
        cfg.table_config(),
        cfg.draft_config(),
        frozen=frozen if mode in ("dual", "frozen") else None,
        dynamic_enabled=(mode != "frozen"),
    )
    report = BenchReport(config={**cfg.as_dict(), "mode": mode}, mode=mode)
    for name, doc in zip(names, docs):
        prompt, target = _split_task(doc)
        verifier = shared or ReplayOracle(len(prompt), target, EOS_TOKEN)
        reset(state)
        t0 = time.perf_counter()
        _, metrics = run_decode(state, prompt, verifier, cfg.max_new_tokens)
        wall = time.perf_counter() - t0
        report.tasks.append(
            TaskResult(
                name=name,
                steps=metrics.steps,
                emitted=metrics.total_emitted,
                wall_s=wall,
                metrics=metrics,
            )
        )
    return report


def _build_frozen_from_texts(
    texts: Sequence[str], tcfg: CacheTableConfig, tokenizer: str, vocab: Vocab | None
) -> FrozenTable:
    docs = [tokenize(text, tokenizer, vocab) for text in texts]
    return build_frozen(count_ngrams(docs, tcfg), tcfg)


def _vocab_sidecar(path: str | Path) -> Path:
    return Path(str(path) + ".vocab.json")


def cmd_build_table(
    corpus_paths: Sequence[str | Path],
    out: str | Path,
    tcfg: CacheTableConfig,
    tokenizer: str = "whitespace",
    doc_mode: str = "line",
    sample_fraction: float = 1.0,
    seed: int = 0,
) -> Path:
    """Sample the corpus, count n-grams, and write the frozen table.

    Whitespace runs also write the vocabulary next to the table
    (``<out>.vocab.json``) so later benchmarks can share token ids.
    """
    docs = read_documents(corpus_paths, doc_mode)
    sampled = sample_documents(docs, sample_fraction, seed)
    if not sampled:
        print("warning: corpus is empty after sampling; writing an empty table", file=sys.stderr)
    vocab = Vocab() if tokenizer == "whitespace" else None
    table = _build_frozen_from_texts(sampled, tcfg, tokenizer, vocab)
    out = Path(out)
    table.save(out)
    if vocab is not None:
        vocab.save(_vocab_sidecar(out))
    return out


def _load_tables_and_tasks(
    cfg: RunConfig,
    prompt_paths: Sequence[str | Path],
    table_path: str | Path | None,
    corpus_paths: Sequence[str | Path] | None,
    doc_mode: str,
) -> tuple[list[list[int]], FrozenTable | None]:
    """Shared bench/ablate input wiring: frozen table + tokenized tasks."""
    vocab: Vocab | None = None
    frozen: FrozenTable | None = None
    if cfg.tokenizer == "whitespace":
        vocab = Vocab()
    if table_path is not None:
        frozen = FrozenTable.load(table_path)
        if (frozen.config.ll, frozen.config.fl) != (cfg.ll, cfg.fl):
            raise ValueError(
                f"table shape ll={frozen.config.ll},fl={frozen.config.fl} does not "
                f"match configured ll={cfg.ll},fl={cfg.fl}"
            )
        if vocab is not None:
            sidecar = _vocab_sidecar(table_path)
            if sidecar.exists():
                vocab = Vocab.load(sidecar)
            else:
                print(
                    f"warning: no vocabulary sidecar at {sidecar}; "
                    "token ids will not match the table",
                    file=sys.stderr,
                )
    elif corpus_paths:
        corpus_texts = read_documents(corpus_paths, doc_mode)
        frozen = _build_frozen_from_texts(corpus_texts, cfg.table_config(), cfg.tokenizer, vocab)
    docs = [tokenize(text, cfg.tokenizer, vocab) for text in read_documents(prompt_paths, doc_mode)]
    return [d for d in docs if d], frozen


def cmd_bench(
    cfg: RunConfig,
    prompt_paths: Sequence[str | Path],
    table_path: str | Path | None = None,
    corpus_paths: Sequence[str | Path] | None = None,
    doc_mode: str = "line",
) -> BenchReport:
    """Benchmark the decode loop over prompt documents (dual wiring; the
    dynamic table alone when no frozen table is supplied)."""
    cfg.validate()
    docs, frozen = _load_tables_and_tasks(cfg, prompt_paths, table_path, corpus_paths, doc_mode)
    return run_bench(cfg, docs, frozen, mode="dual")


def cmd_sweep(
    cfg: RunConfig,
    ll_values: Sequence[int],
    fl_values: Sequence[int],
    prompt_paths: Sequence[str | Path],
    corpus_paths: Sequence[str | Path] | None = None,
    doc_mode: str = "line",
) -> SweepReport:
    """Benchmark every (ll, fl) grid cell.

    A frozen table is rebuilt from the corpus per cell (a serialized table
    pins one shape, so sweeps take a corpus instead of a table); without a
    corpus the sweep runs on the dynamic table alone.
    """
    if not ll_values or not fl_values:
        raise ValueError("sweep needs at least one ll value and one fl value")
    prompt_texts = read_documents(prompt_paths, doc_mode)
    corpus_texts = read_documents(corpus_paths, doc_mode) if corpus_paths else None
    rows: list[SweepRow] = []
    for ll in ll_values:
        for fl in fl_values:
            cell = replace(cfg, ll=ll, fl=fl)
            cell.validate()
            vocab = Vocab() if cell.tokenizer == "whitespace" else None
            frozen = None
            if corpus_texts is not None:
                frozen = _build_frozen_from_texts(
                    corpus_texts, cell.table_config(), cell.tokenizer, vocab
                )
            docs = [tokenize(text, cell.tokenizer, vocab) for text in prompt_texts]
            rep = run_bench(cell, [d for d in docs if d], frozen, mode="dual")
            rows.append(SweepRow(ll=ll, fl=fl, mat=rep.mat, tokens_per_step=rep.mat))
    return SweepReport(config={**cfg.as_dict(), "ll": list(ll_values), "fl": list(fl_values)}, rows=rows)


def cmd_ablate(
    cfg: RunConfig,
    prompt_paths: Sequence[str | Path],
    table_path: str | Path | None = None,
    corpus_paths: Sequence[str | Path] | None = None,
    doc_mode: str = "line",
) -> AblateReport:
    """Three benchmark runs differing only in table wiring:
    dual, dynamic-only, frozen-only."""
    cfg.validate()
    if table_path is None and not corpus_paths:
        raise ValueError("ablation requires a frozen table (--table or --corpus)")
    docs, frozen = _load_tables_and_tasks(cfg, prompt_paths, table_path, corpus_paths, doc_mode)
    runs = {mode: run_bench(cfg, docs, frozen, mode=mode) for mode in MODES}
    return AblateReport(config=cfg.as_dict(), runs=runs)


def parse_int_list(spec: str) -> list[int]:
    """Parse "1,2,5" and "1-5" (also mixed: "1,3-5") into a list of ints."""
    values: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"empty range {part!r}")
            values.extend(range(lo_i, hi_i + 1))
        else:
            values.append(int(part))
    if not values:
        raise ValueError(f"no values in {spec!r}")
    return values


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _add_table_shape_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ll", type=int, default=1, help="leader length in tokens")
    p.add_argument("--fl", type=int, default=3, help="follower length in tokens")
    p.add_argument("--lc", type=int, default=2**20, help="max leaders per table")
    p.add_argument("--fc", type=int, default=128, help="max followers per leader")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tdl", type=int, default=96, help="total draft length budget")
    p.add_argument("--crt", type=int, default=16, help="tokens reserved for depth >= 2")
    p.add_argument("--verifier", choices=("kgram", "replay"), default="kgram")
    p.add_argument("--kgram-order", type=int, default=3)
    p.add_argument("--max-new-tokens", type=int, default=128)
    p.add_argument("--prompts", nargs="+", required=True, help="prompt document file(s)")
    p.add_argument("--table", default=None, help="frozen table file (CBFT)")
    p.add_argument("--corpus", nargs="*", default=None, help="corpus file(s) to build a frozen table from")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "json", "csv"), default=None)


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tokenizer", choices=("whitespace", "byte"), default="whitespace")
    p.add_argument("--doc-mode", choices=("line", "file"), default="line")
    p.add_argument("--seed", type=int, default=0)


def _config_from_args(args: argparse.Namespace, ll: int | None = None, fl: int | None = None) -> RunConfig:
    cfg = RunConfig(
        ll=ll if ll is not None else args.ll,
        fl=fl if fl is not None else args.fl,
        lc=args.lc,
        fc=args.fc,
        tdl=args.tdl,
        crt=args.crt,
        tokenizer=args.tokenizer,
        verifier=args.verifier,
        kgram_order=args.kgram_order,
        max_new_tokens=args.max_new_tokens,
        seed=args.seed,
    )
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ngramspec",
        description="Speculative decoding from n-gram cache tables: build frozen tables, "
        "benchmark acceptance rates, sweep table shapes, and ablate table wirings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build-table", help="build a frozen table from a corpus")
    p_build.add_argument("corpus", nargs="+", help="corpus text file(s)")
    p_build.add_argument("--out", required=True, help="output table path")
    p_build.add_argument("--sample-fraction", type=float, default=1.0)
    _add_table_shape_args(p_build)
    _add_common_args(p_build)

    p_bench = sub.add_parser("bench", help="run the decode benchmark over prompts")
    _add_table_shape_args(p_bench)
    _add_run_args(p_bench)
    _add_common_args(p_bench)

    p_sweep = sub.add_parser("sweep", help="benchmark a grid of (ll, fl) settings")
    p_sweep.add_argument("--ll", default="1", help="ll values, e.g. 1,2,3")
    p_sweep.add_argument("--fl", default="3", help="fl values, e.g. 1-5")
    p_sweep.add_argument("--lc", type=int, default=2**20)
    p_sweep.add_argument("--fc", type=int, default=128)
    _add_run_args(p_sweep)
    _add_common_args(p_sweep)

    p_ablate = sub.add_parser("ablate", help="compare dual / dynamic-only / frozen-only wirings")
    _add_table_shape_args(p_ablate)
    _add_run_args(p_ablate)
    _add_common_args(p_ablate)

    args = parser.parse_args(argv)
    try:
        if args.command == "build-table":
            tcfg = CacheTableConfig(ll=args.ll, fl=args.fl, lc=args.lc, fc=args.fc)
            out = cmd_build_table(
                args.corpus,
                args.out,
                tcfg,
                tokenizer=args.tokenizer,
                doc_mode=args.doc_mode,
                sample_fraction=args.sample_fraction,
                seed=args.seed,
            )
            print(f"wrote {out}")
        elif args.command == "bench":
            cfg = _config_from_args(args)
            report = cmd_bench(cfg, args.prompts, args.table, args.corpus, args.doc_mode)
            _emit(report.render(args.format or "text"), args.out)
        elif args.command == "sweep":
            ll_values = parse_int_list(args.ll)
            fl_values = parse_int_list(args.fl)
            cfg = _config_from_args(args, ll=ll_values[0], fl=fl_values[0])
            report = cmd_sweep(cfg, ll_values, fl_values, args.prompts, args.corpus, args.doc_mode)
            _emit(report.render(args.format or "csv"), args.out)
        elif args.command == "ablate":
            cfg = _config_from_args(args)
            report = cmd_ablate(cfg, args.prompts, args.table, args.corpus, args.doc_mode)
            _emit(report.render(args.format or "text"), args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
