"""Vectorized numpy implementations used by the pure-numpy backend.

The FCFS completion recursion C[j] = max(C[j-1], A[j]) + S[j] unrolls to

    C = cumsum(S) + running-max(A - shifted-cumsum(S))

which turns both the non-purging sub-queue dynamics and the split-merge
head-of-line recursion into two numpy passes. Results agree with the
sequential kernels to floating-point reassociation (see the backend tests);
purging has no such closed form and stays on the scalar kernel.
"""

from __future__ import annotations

import numpy as np

__all__ = ["nonpurging_paths", "splitmerge_sojourns", "fcfs_completions"]


def fcfs_completions(t_arr: np.ndarray, svc_col: np.ndarray) -> np.ndarray:
    """Completion times of one FCFS single-server queue fed at ``t_arr``."""
    p = np.cumsum(svc_col)
    return p + np.maximum.accumulate(t_arr - (p - svc_col))


def _stop_index(sample_mask: np.ndarray, cap: int) -> tuple[np.ndarray, int]:
    """Sampled-job indices truncated to cap, plus jobs processed at the stop."""
    idx = np.flatnonzero(sample_mask)
    if idx.size >= cap:
        idx = idx[:cap]
        return idx, int(idx[-1]) + 1 if cap else 0
    return idx, sample_mask.size


def nonpurging_paths(t_arr, svc, sample_mask, out_sorted, out_prefmax):
    n_jobs, n = svc.shape
    idx, jobs = _stop_index(sample_mask, out_sorted.shape[0])
    soj = np.empty((idx.size, n))
    for i in range(n):
        c = fcfs_completions(t_arr[:jobs], svc[:jobs, i])
        soj[:, i] = c[idx] - t_arr[idx]
    m = idx.size
    out_sorted[:m] = np.sort(soj, axis=1)
    out_prefmax[:m] = np.maximum.accumulate(soj, axis=1)
    return m, jobs


def splitmerge_sojourns(t_arr, svc, k, sample_mask, out):
    idx, jobs = _stop_index(sample_mask, out.shape[0])
    head = np.partition(svc[:jobs], k - 1, axis=1)[:, k - 1]
    depart = fcfs_completions(t_arr[:jobs], head)
    m = idx.size
    out[:m] = depart[idx] - t_arr[idx]
    return m, jobs
