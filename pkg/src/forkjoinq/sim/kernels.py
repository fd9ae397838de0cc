"""Hot simulation loops, written to compile under numba's nopython mode.

Each kernel consumes pre-generated arrival times ``t_arr`` (non-decreasing),
a pre-generated service matrix ``svc`` with shape (jobs, sub-queues), and a
per-job ``sample_mask``; it fills caller-allocated output rows for sampled
jobs and stops once the output is full. Returning (written, jobs_done) keeps
the call signature identical across backends.

Event ordering: arrivals are processed before completions that share a
timestamp, and simultaneous completions resolve by ascending sub-queue index.
The heap-based engine in reference.py implements the same rule; tests hold
the two bit-identical.

RNG never runs inside a kernel, so a fixed seed fixes the trace regardless
of backend.
"""

from __future__ import annotations

import numpy as np

__all__ = ["nonpurging_paths", "purging_sojourns", "splitmerge_sojourns"]


def nonpurging_paths(t_arr, svc, sample_mask, out_sorted, out_prefmax):
    """Basic and non-purging queues share sub-queue dynamics for every k.

    Per sub-queue FCFS recursion: completion = max(prev completion, arrival)
    plus service. For each sampled job the row of sub-task sojourns is stored
    twice: sorted ascending (column r-1 is the rank-r job sojourn) and as
    prefix maxima over sub-queue index (column i-1 is the max of the first i
    sub-queues).
    """
    n_jobs, n = svc.shape
    cap = out_sorted.shape[0]
    comp = np.zeros(n)
    buf = np.empty(n)
    written = 0
    for j in range(n_jobs):
        a = t_arr[j]
        for i in range(n):
            c = comp[i]
            if c < a:
                c = a
            c = c + svc[j, i]
            comp[i] = c
            buf[i] = c - a
        if sample_mask[j] and written < cap:
            pm = buf[0]
            out_prefmax[written, 0] = pm
            for i in range(1, n):
                if buf[i] > pm:
                    pm = buf[i]
                out_prefmax[written, i] = pm
            out_sorted[written, :] = np.sort(buf)
            written += 1
            if written == cap:
                return written, j + 1
    return written, n_jobs


def purging_sojourns(t_arr, svc, k, sample_mask, out):
    """Purging (n,k) queue: event-driven with cross-queue purge coupling.

    The pending-event set is always one future arrival plus at most one
    completion per sub-queue, so event selection is an argmin scan rather
    than a heap. Sub-queue FIFOs are implicit: service order within a queue
    is job-index order, so each queue carries only the index of the next
    job it has not started (``nxt``), and purged jobs are skipped on scan.
    At a job's k-th completion the job is removed everywhere; a preempted
    server discards the in-service sub-task at zero cost and immediately
    starts its next available one.
    """
    n_jobs, n = svc.shape
    cap = out.shape[0]
    inf = np.inf
    ct = np.full(n, inf)
    cur = np.full(n, -1, np.int64)
    nxt = np.zeros(n, np.int64)
    done_cnt = np.zeros(n_jobs, np.int32)
    gone = np.zeros(n_jobs, np.bool_)
    next_arr = 0
    written = 0
    completed = 0
    while True:
        t_a = t_arr[next_arr] if next_arr < n_jobs else inf
        t_c = inf
        qmin = -1
        for i in range(n):
            if ct[i] < t_c:
                t_c = ct[i]
                qmin = i
        if t_a == inf and t_c == inf:
            break
        if t_a <= t_c:
            now = t_a
            next_arr += 1
            for i in range(n):
                if cur[i] == -1:
                    jj = nxt[i]
                    while jj < next_arr and gone[jj]:
                        jj += 1
                    nxt[i] = jj
                    if jj < next_arr:
                        cur[i] = jj
                        ct[i] = now + svc[jj, i]
                        nxt[i] = jj + 1
        else:
            now = t_c
            i = qmin
            j = cur[i]
            cur[i] = -1
            ct[i] = inf
            if not gone[j]:
                done_cnt[j] += 1
                if done_cnt[j] == k:
                    gone[j] = True
                    completed += 1
                    if sample_mask[j] and written < cap:
                        out[written] = now - t_arr[j]
                        written += 1
                        if written == cap:
                            return written, completed
                    for m in range(n):
                        if m != i and cur[m] == j:
                            cur[m] = -1
                            ct[m] = inf
                            jj = nxt[m]
                            while jj < next_arr and gone[jj]:
                                jj += 1
                            nxt[m] = jj
                            if jj < next_arr:
                                cur[m] = jj
                                ct[m] = now + svc[jj, m]
                                nxt[m] = jj + 1
            jj = nxt[i]
            while jj < next_arr and gone[jj]:
                jj += 1
            nxt[i] = jj
            if jj < next_arr:
                cur[i] = jj
                ct[i] = now + svc[jj, i]
                nxt[i] = jj + 1
    return written, completed


def splitmerge_sojourns(t_arr, svc, k, sample_mask, out):
    """Split-merge (n,k) queue: all servers bound to the head job.

    The head job starts on every server at max(arrival, previous departure)
    and departs at its k-th smallest service time; the n-k stragglers are
    discarded and all servers turn to the next job together.
    """
    n_jobs, n = svc.shape
    cap = out.shape[0]
    written = 0
    depart = 0.0
    for j in range(n_jobs):
        start = t_arr[j] if t_arr[j] > depart else depart
        row = np.sort(svc[j, :])
        depart = start + row[k - 1]
        if sample_mask[j] and written < cap:
            out[written] = depart - t_arr[j]
            written += 1
            if written == cap:
                return written, j + 1
    return written, n_jobs
