"""Bounded two-level LRU table mapping leader n-grams to follower n-grams.

Leaders and followers are fixed-length tuples of token ids.  The table holds
at most ``lc`` leaders, each with at most ``fc`` followers.  Leader recency is
refreshed by both queries and inserts; follower recency is refreshed only by
insertion, and a follower's recency is compared only against followers of the
same leader.

Backed by nested ``OrderedDict`` (hash map + doubly linked list), so query,
insert, and eviction are all O(1).
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

TokenId = int
Leader = tuple[int, ...]
Follower = tuple[int, ...]


@dataclass(frozen=True)
class CacheTableConfig:
    """Shape and capacity of a cache table.

    ll / fl are the leader / follower lengths in tokens; lc / fc are the
    maximum number of leaders per table / followers per leader.  All four
    must be strictly positive.
    """

    ll: int
    fl: int
    lc: int
    fc: int

    def __post_init__(self) -> None:
        for name in ("ll", "fl", "lc", "fc"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class EvictedLeader:
    """A leader (and its entire follower list) dropped by the LRU policy."""

    leader: Leader
    followers: tuple[Follower, ...]


@dataclass(frozen=True)
class EvictedFollower:
    """A single follower dropped from one leader's list by the LRU policy."""

    leader: Leader
    follower: Follower


Eviction = EvictedLeader | EvictedFollower


def max_retained_tokens(config: CacheTableConfig) -> int:
    """Upper bound on tokens a fully populated table retains.

    Each resident leader stores ``ll`` tokens plus up to ``fc`` followers of
    ``fl`` tokens each, so the bound is ``lc * (ll + fc * fl)``.  Python
    integers are unbounded, so the arithmetic cannot overflow.
    """
    return config.lc * (config.ll + config.fc * config.fl)


class LruCacheTable:
    """Leader -> followers map with two-level LRU eviction.

    The outer ``OrderedDict`` orders leaders by recency (least recent first);
    each inner ``OrderedDict`` orders one leader's followers by insertion
    recency.  A query returns followers most-recently-inserted first and
    refreshes the leader's recency, but never touches follower recency.

    Single-writer: one decode task owns a table at a time.  Queries mutate
    recency, so concurrent readers are not supported.
    """

    __slots__ = ("config", "_entries", "_ll", "_fl", "_lc", "_fc")

    def __init__(self, config: CacheTableConfig) -> None:
        self.config = config
        # Copies of the config fields keep the per-op attribute chain short.
        self._ll, self._fl = config.ll, config.fl
        self._lc, self._fc = config.lc, config.fc
        self._entries: OrderedDict[Leader, OrderedDict[Follower, None]] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def leader_count(self) -> int:
        """Number of resident leaders."""
        return len(self._entries)

    def query(self, leader: Leader) -> list[Follower]:
        """Return the leader's followers, most recently inserted first.

        Refreshes the leader's recency on a hit.  An absent leader yields an
        empty list and leaves the table untouched.
        """
        if len(leader) != self._ll:
            raise ValueError(
                f"leader length {len(leader)} does not match ll={self._ll}"
            )
        followers = self._entries.get(leader)
        if followers is None:
            return []
        self._entries.move_to_end(leader)
        return list(reversed(followers))

    def insert(self, leader: Leader, follower: Follower) -> Eviction | None:
        """Record that ``follower`` was observed right after ``leader``.

        The follower becomes the leader's most recent entry; re-inserting an
        existing follower moves it to the front without duplication.  Returns
        the eviction forced by the capacity bounds, if any.
        """
        if len(leader) != self._ll:
            raise ValueError(
                f"leader length {len(leader)} does not match ll={self._ll}"
            )
        if len(follower) != self._fl:
            raise ValueError(
                f"follower length {len(follower)} does not match fl={self._fl}"
            )
        followers = self._entries.get(leader)
        if followers is not None:
            self._entries.move_to_end(leader)
            if follower in followers:
                followers.move_to_end(follower)
                return None
            followers[follower] = None
            if len(followers) > self._fc:
                dropped, _ = followers.popitem(last=False)
                return EvictedFollower(leader=leader, follower=dropped)
            return None
        evicted: Eviction | None = None
        if len(self._entries) >= self._lc:
            old_leader, old_followers = self._entries.popitem(last=False)
            evicted = EvictedLeader(leader=old_leader, followers=tuple(old_followers))
        self._entries[leader] = OrderedDict({follower: None})
        return evicted

    def peek(self, leader: Leader) -> list[Follower] | None:
        """Like :meth:`query` but without any recency side effect.

        Returns ``None`` for an absent leader.  Test/inspection helper.
        """
        followers = self._entries.get(leader)
        if followers is None:
            return None
        return list(reversed(followers))

    def snapshot(self) -> list[tuple[Leader, list[Follower]]]:
        """Full observable state without mutation: leaders in LRU-to-MRU
        order, each with its followers most-recently-inserted first."""
        return [(leader, list(reversed(fs))) for leader, fs in self._entries.items()]

    def clear(self) -> None:
        """Drop every entry."""
        self._entries.clear()
