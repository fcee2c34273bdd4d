"""Single-writer, multi-reader publication of graph versions.

Readers ``acquire`` the latest version, query it, and ``release`` it.  The
writer builds a new version functionally from one it acquired and
publishes it with ``set``.  Every critical section is a handful of dict
and attribute operations under one lock, so a reader never waits on a
writer's update work.  Memory for a version goes away once neither the
versioned graph nor any caller references it.  A reader that holds an
old version across many commits keeps all of that version's nodes alive;
releasing promptly is the caller's job.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager

from .errors import ContractViolation
from .graph import GraphVersion


class WriterToken:
    __slots__ = ("open",)

    def __init__(self):
        self.open = True


class VersionedGraph:
    def __init__(self, initial: GraphVersion):
        self._lock = threading.Lock()
        self._latest = GraphVersion(initial.vertex_tree, 0, initial.b)
        # timestamp -> [version, outstanding holds]
        self._live = {0: [self._latest, 0]}
        self._writer: WriterToken | None = None

    @property
    def latest_timestamp(self) -> int:
        return self._latest.timestamp

    def live_timestamps(self) -> list[int]:
        with self._lock:
            return sorted(self._live)

    def acquire(self) -> GraphVersion:
        with self._lock:
            g = self._latest
            self._live[g.timestamp][1] += 1
            return g

    def release(self, g: GraphVersion) -> bool:
        """Drop one hold on ``g``; True when it was the last copy of an old version."""
        with self._lock:
            entry = self._live.get(g.timestamp)
            if entry is None or entry[0] is not g or entry[1] == 0:
                raise ContractViolation(f"version {g.timestamp} released more times than acquired")
            entry[1] -= 1
            if entry[1] == 0 and g is not self._latest:
                del self._live[g.timestamp]
                return True
            return False

    def claim_writer(self) -> WriterToken:
        with self._lock:
            if self._writer is not None:
                raise ContractViolation("a writer already holds this graph")
            self._writer = WriterToken()
            return self._writer

    def close_writer(self, token: WriterToken) -> None:
        with self._lock:
            self._check_token(token)
            token.open = False
            self._writer = None

    @contextmanager
    def writer(self):
        token = self.claim_writer()
        try:
            yield token
        finally:
            self.close_writer(token)

    def _check_token(self, token):
        if token is None or token is not self._writer or not token.open:
            raise ContractViolation("set requires the current writer token")

    def set(self, g: GraphVersion, token: WriterToken) -> GraphVersion:
        """Publish ``g`` as the latest version and return it with its timestamp."""
        with self._lock:
            self._check_token(token)
            old = self._latest
            new = GraphVersion(g.vertex_tree, old.timestamp + 1, g.b)
            self._live[new.timestamp] = [new, 0]
            self._latest = new
            if self._live[old.timestamp][1] == 0:
                del self._live[old.timestamp]
            return new

    def commit(self, update, token: WriterToken) -> GraphVersion:
        """Writer protocol: acquire latest, build ``update(latest)``, set, release."""
        g = self.acquire()
        try:
            return self.set(update(g), token)
        finally:
            self.release(g)

    @contextmanager
    def snapshot(self):
        g = self.acquire()
        try:
            yield g
        finally:
            self.release(g)
