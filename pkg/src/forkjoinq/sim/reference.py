"""Readable heap-based discrete-event engine, the semantic reference.

This is the executable specification of the queue dynamics: a single event
heap ordered by (time, kind, sub-queue index) with arrivals before
completions at equal timestamps. The optimized kernels must produce
bit-identical sojourn times; tests enforce that on short traces. Use this
engine for clarity and debugging, the kernels for anything long.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

__all__ = ["EventQueue", "ReferenceTrace", "simulate_reference"]

ARRIVAL = 0
COMPLETION = 1


class EventQueue:
    """Time-ordered pending events with deterministic tie-breaking.

    Entries are (time, kind, queue_index, job_index, epoch); heap order makes
    arrivals (kind 0) precede completions (kind 1) at equal times, then lower
    sub-queue indices. The clock never moves backwards.
    """

    def __init__(self):
        self._heap: list[tuple[float, int, int, int, int]] = []
        self.clock = 0.0

    def push(self, time: float, kind: int, queue: int, job: int, epoch: int = 0) -> None:
        heapq.heappush(self._heap, (time, kind, queue, job, epoch))

    def pop(self) -> tuple[float, int, int, int, int]:
        event = heapq.heappop(self._heap)
        if event[0] < self.clock:
            raise AssertionError(f"event time {event[0]} precedes clock {self.clock}")
        self.clock = event[0]
        return event

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class ReferenceTrace:
    """Per-job sojourns (nan if unfinished) plus per-queue completion order."""

    sojourns: np.ndarray
    completion_order: list[list[int]] = field(default_factory=list)


def simulate_reference(t_arr: np.ndarray, svc: np.ndarray, k: int, variant: str) -> ReferenceTrace:
    """Run every job through the chosen variant; O(jobs * n log) and unoptimized."""
    if variant == "basic":
        k = svc.shape[1]
        variant = "non-purging"
    if variant in ("non-purging", "purging"):
        return _simulate_forkjoin(t_arr, svc, k, purging=(variant == "purging"))
    if variant == "split-merge":
        return _simulate_splitmerge(t_arr, svc, k)
    raise ValueError(f"unknown variant {variant!r}")


def _simulate_forkjoin(t_arr, svc, k, purging: bool) -> ReferenceTrace:
    n_jobs, n = svc.shape
    events = EventQueue()
    for j in range(n_jobs):
        events.push(t_arr[j], ARRIVAL, -1, j)

    fifo: list[list[int]] = [[] for _ in range(n)]
    serving = [-1] * n
    epoch = [0] * n
    done_cnt = np.zeros(n_jobs, dtype=int)
    gone = np.zeros(n_jobs, dtype=bool)
    sojourns = np.full(n_jobs, np.nan)
    completion_order: list[list[int]] = [[] for _ in range(n)]

    def start_next(i: int, now: float) -> None:
        while fifo[i] and gone[fifo[i][0]]:
            fifo[i].pop(0)
        if fifo[i]:
            j = fifo[i].pop(0)
            serving[i] = j
            events.push(now + svc[j, i], COMPLETION, i, j, epoch[i])
        else:
            serving[i] = -1

    while len(events):
        now, kind, i, j, ep = events.pop()
        if kind == ARRIVAL:
            for q in range(n):
                fifo[q].append(j)
                if serving[q] == -1:
                    start_next(q, now)
            continue
        if ep != epoch[i]:
            continue  # preempted service, server already moved on
        serving[i] = -1
        completion_order[i].append(j)
        if not gone[j]:
            done_cnt[j] += 1
            if done_cnt[j] == k:
                sojourns[j] = now - t_arr[j]
                if purging:
                    gone[j] = True
                    for q in range(n):
                        if q != i and serving[q] == j:
                            epoch[q] += 1
                            start_next(q, now)
        start_next(i, now)
    return ReferenceTrace(sojourns=sojourns, completion_order=completion_order)


def _simulate_splitmerge(t_arr, svc, k) -> ReferenceTrace:
    n_jobs, n = svc.shape
    events = EventQueue()
    for j in range(n_jobs):
        events.push(t_arr[j], ARRIVAL, -1, j)

    sojourns = np.full(n_jobs, np.nan)
    current = -1
    next_job = 0
    done_cnt = 0
    epoch = 0

    def start(j: int, now: float) -> None:
        nonlocal current, done_cnt
        current = j
        done_cnt = 0
        for i in range(n):
            events.push(now + svc[j, i], COMPLETION, i, j, epoch)

    while len(events):
        now, kind, i, j, ep = events.pop()
        if kind == ARRIVAL:
            if current == -1 and j == next_job:
                next_job += 1
                start(j, now)
            continue
        if ep != epoch or j != current:
            continue  # discarded straggler of an already-departed job
        done_cnt += 1
        if done_cnt == k:
            sojourns[j] = now - t_arr[j]
            epoch += 1
            current = -1
            if next_job < n_jobs and t_arr[next_job] <= now:
                j2 = next_job
                next_job += 1
                start(j2, now)
    return ReferenceTrace(sojourns=sojourns, completion_order=[])
