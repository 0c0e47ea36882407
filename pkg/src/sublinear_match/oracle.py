"""Local simulation of randomized greedy maximal matching.

``vertex_oracle(v)`` decides whether ``v`` is matched in GMM(G, pi) by
walking ``v``'s edges in increasing rank and asking the edge oracle about
each. ``edge_oracle(e, u)`` recurses only into lower-rank edges at the entry
endpoint ``u``; the stack of pending edge-oracle calls therefore always
traces a simple path from the root with strictly decreasing ranks.

Both oracles are written against any rank source exposing
``lowest(v, i)``, ``rank_of(e)`` and ``endpoints(e)``, so the same code runs
on explicit ranks, lazily revealed ranks, and the virtual graph of the
matrix-model reduction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .graph import AccessCounter

__all__ = ["InvariantViolation", "OracleSession", "SessionReport"]


class InvariantViolation(AssertionError):
    """A structural guarantee of the oracle recursion failed at run time."""


@dataclass
class SessionReport:
    t: int
    q: dict[int, int]
    max_path: int
    queries: AccessCounter = field(default_factory=AccessCounter)


class _Frame:
    __slots__ = ("edge", "entry", "caller", "j", "rank")

    def __init__(self, edge: int, entry: int, caller: int, rank):
        self.edge = edge
        self.entry = entry
        self.caller = caller
        self.j = 1
        self.rank = rank


class OracleSession:
    """One top-level oracle invocation with its own cache and instrumentation.

    ``t_count`` counts every edge-oracle invocation, cache hits included;
    ``q_count[e]`` splits that count by edge. ``n_vertices`` sets the
    per-edge cap ``2n - 1`` checked when the session ends.
    """

    def __init__(self, ranks, n_vertices: int | None = None,
                 counter: AccessCounter | None = None):
        self.ranks = ranks
        self.n_vertices = ranks.n if n_vertices is None else n_vertices
        self.counter = counter
        self.cache: dict[tuple[int, int], bool] = {}
        self.t_count = 0
        self.q_count: Counter[int] = Counter()
        self.max_path = 0
        self.root: int | None = None
        self.partner: int | None = None
        self._stack: list[_Frame] = []
        self._on_path: set[int] = set()

    def vertex_oracle(self, v: int) -> bool:
        """True iff ``v`` is matched; on success ``partner`` holds its mate."""
        self._claim_root(v)
        lowest = self.ranks.lowest
        j = 1
        matched = False
        while True:
            hit = lowest(v, j)
            if hit is None:
                break
            w, e = hit
            if self._edge_oracle(e, w, v):
                self.partner = w
                matched = True
                break
            j += 1
        self._check_cache_bound()
        return matched

    def edge_oracle(self, e: int, u: int) -> bool:
        """Answer for edge ``e`` entered at endpoint ``u``, as if called from the other endpoint.

        Only lower-rank edges at ``u`` are examined. The answer is the greedy one when the caller
        has no lower-rank matched edge, which is the situation inside a vertex query.
        """
        a, b = self.ranks.endpoints(e)
        if u not in (a, b):
            raise ValueError(f"vertex {u} is not an endpoint of edge {e}")
        caller = b if u == a else a
        self._claim_root(caller)
        answer = self._edge_oracle(e, u, caller)
        self._check_cache_bound()
        return answer

    def report(self) -> SessionReport:
        snap = self.counter.snapshot() if self.counter is not None else AccessCounter()
        return SessionReport(self.t_count, dict(self.q_count), self.max_path, snap)

    # -- machinery ---------------------------------------------------------------

    def _claim_root(self, v: int) -> None:
        if self.root is not None:
            raise RuntimeError("an oracle session answers exactly one top-level query")
        self.root = v
        self._on_path.add(v)

    def _call(self, e: int, u: int, caller: int) -> bool | None:
        """Count one invocation; return the cached answer or push a frame and return None."""
        self.t_count += 1
        self.q_count[e] += 1
        cached = self.cache.get((e, u))
        if cached is not None:
            return cached
        stack = self._stack
        rank = self.ranks.rank_of(e)
        if stack and not rank < stack[-1].rank:
            raise InvariantViolation(f"rank of edge {e} does not decrease along the query path")
        if u in self._on_path:
            raise InvariantViolation(f"query path revisits vertex {u}")
        stack.append(_Frame(e, u, caller, rank))
        self._on_path.add(u)
        if len(stack) > self.max_path:
            self.max_path = len(stack)
        return None

    def _edge_oracle(self, e: int, u: int, caller: int) -> bool:
        answer = self._call(e, u, caller)
        if answer is not None:
            return answer
        stack = self._stack
        lowest = self.ranks.lowest
        while True:
            frame = stack[-1]
            w, f = lowest(frame.entry, frame.j)
            if f == frame.edge:
                # every lower-rank edge at the entry endpoint is unmatched
                answer = True
            else:
                child = self._call(f, w, frame.entry)
                if child is None:
                    continue
                if not child:
                    frame.j += 1
                    continue
                answer = False
            # resolve the top frame and propagate upward while answers are decisive
            while True:
                stack.pop()
                self._on_path.discard(frame.entry)
                self.cache[(frame.edge, frame.entry)] = answer
                if not stack:
                    return answer
                frame = stack[-1]
                if answer:
                    answer = False
                    continue
                frame.j += 1
                break

    def _check_cache_bound(self) -> None:
        cap = 2 * self.n_vertices - 1
        for e, q in self.q_count.items():
            if q > cap:
                raise InvariantViolation(f"edge {e} queried {q} times, above 2n-1 = {cap}")
