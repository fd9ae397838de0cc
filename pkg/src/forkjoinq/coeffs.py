"""Exact integer weights that express order statistics through maxima.

For n exchangeable random variables, the distribution (and expectation) of the
k-th smallest is an integer-weighted combination of the distributions
(expectations) of prefix maxima:

    F_{n,k}(t) = sum_{i=k..n} W[n,k,i] * P(max(X_1..X_i) <= t)

The weights come in two layers, both exact signed integers:

    A[n,k,i] = 1                                          if i == k
    A[n,k,i] = -sum_{j=1..i-k} C(n-i+j, j) * A[n,k,i-j]   if k < i <= n

    W[n,k,i] = sum_{j=k..i} C(n, j) * A[n,j,i]

Weights grow combinatorially with n (past 1e27 around n = 100), so everything
here is arbitrary-precision. A-rows are memoized per (n, k); a full table for
one n costs O(n^3) big-integer multiply-adds, which is milliseconds for n <= 50.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import IO, Iterator

from .errors import CacheFormatError, DomainError

__all__ = [
    "a_coefficient",
    "w_coefficient",
    "w_table",
    "WTable",
    "save_table",
    "load_table",
]


def _check_indices(n: int, k: int, i: int) -> None:
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 1 <= k <= n:
        raise DomainError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    if not k <= i <= n:
        raise DomainError(f"i must satisfy k <= i <= n, got i={i}, k={k}, n={n}")


@lru_cache(maxsize=None)
def _a_row(n: int, k: int) -> tuple[int, ...]:
    """A[n,k,i] for i = k..n, computed once per (n, k) row."""
    values = [1]
    for i in range(k + 1, n + 1):
        acc = 0
        for j in range(1, i - k + 1):
            acc += math.comb(n - i + j, j) * values[i - j - k]
        values.append(-acc)
    return tuple(values)


def a_coefficient(n: int, k: int, i: int) -> int:
    """Exact A[n,k,i] from the recurrence above.

    Raises DomainError unless 1 <= k <= i <= n.
    """
    _check_indices(n, k, i)
    return _a_row(n, k)[i - k]


def w_coefficient(n: int, k: int, i: int) -> int:
    """Exact W[n,k,i] = sum_{j=k..i} C(n,j) * A[n,j,i].

    Raises DomainError unless 1 <= k <= i <= n.
    """
    _check_indices(n, k, i)
    return sum(math.comb(n, j) * _a_row(n, j)[i - j] for j in range(k, i + 1))


@dataclass
class WTable:
    """Upper-triangular store of W weights for one n.

    ``entries`` maps (k, i) with 1 <= k <= i <= n to the exact integer weight.
    A table loaded from a partial cache file may hold a subset; ``complete``
    tells the two cases apart. ``validate()`` checks the structural invariants
    and, for complete tables, the exact identities

        sum_i W[n,k,i] == 1,   W[n,k,k] == C(n,k),   W[n,1,i] == (-1)^(i+1) C(n,i).
    """

    n: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    def value(self, k: int, i: int) -> int:
        _check_indices(self.n, k, i)
        got = self.entries.get((k, i))
        if got is None:
            raise KeyError(f"W[{self.n},{k},{i}] not present in table")
        return got

    def row(self, k: int) -> list[int]:
        """Weights W[n,k,i] for i = k..n (row must be fully present)."""
        return [self.value(k, i) for i in range(k, self.n + 1)]

    @property
    def complete(self) -> bool:
        want = self.n * (self.n + 1) // 2
        return len(self.entries) == want

    def validate(self) -> None:
        for (k, i) in self.entries:
            _check_indices(self.n, k, i)
        if not self.complete:
            return
        for k in range(1, self.n + 1):
            row = self.row(k)
            if sum(row) != 1:
                raise DomainError(f"row k={k} of n={self.n} does not sum to 1")
            if row[0] != math.comb(self.n, k):
                raise DomainError(f"W[{self.n},{k},{k}] != C({self.n},{k})")
        for i in range(1, self.n + 1):
            if self.entries[(1, i)] != (-1) ** (i + 1) * math.comb(self.n, i):
                raise DomainError(f"W[{self.n},1,{i}] violates the inclusion-exclusion row")

    def __iter__(self) -> Iterator[tuple[int, int, int]]:
        """Yields (k, i, value) in row-major order."""
        for (k, i) in sorted(self.entries):
            yield k, i, self.entries[(k, i)]


def w_table(n: int) -> WTable:
    """Complete table of W weights for fan-out n."""
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    entries = {}
    rows = {j: _a_row(n, j) for j in range(1, n + 1)}
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            entries[(k, i)] = sum(math.comb(n, j) * rows[j][i - j] for j in range(k, i + 1))
    return WTable(n=n, entries=entries)


# Cache file format: UTF-8 text, one "n k i value" entry per line with ASCII
# decimal integers, '#' starts a comment, blank lines and ordering are free.

_ENTRY_RE = re.compile(r"^(-?\d+)\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)$")


def save_table(table: WTable, destination: str | Path | IO[str]) -> None:
    """Write a table in the textual cache format (lossless round-trip)."""
    lines = [f"# W coefficients for n={table.n}\n"]
    lines += [f"{table.n} {k} {i} {v}\n" for k, i, v in table]
    if hasattr(destination, "write"):
        destination.writelines(lines)
    else:
        Path(destination).write_text("".join(lines), encoding="utf-8")


def load_table(source: str | Path | IO[str]) -> WTable:
    """Parse a cache file back into a WTable.

    Raises CacheFormatError (with the offending line number) on syntax errors,
    indices outside the upper triangle, inconsistent n, or conflicting
    duplicate entries. The result may be partial; call ``validate()`` if the
    caller requires a complete, identity-checked table.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")

    n_seen: int | None = None
    entries: dict[tuple[int, int], int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ENTRY_RE.match(line)
        if m is None:
            raise CacheFormatError(f"expected 'n k i value', got {raw!r}", line=ln)
        n, k, i, v = (int(g) for g in m.groups())
        if n < 1:
            raise CacheFormatError(f"n must be positive, got {n}", line=ln)
        if n_seen is None:
            n_seen = n
        elif n != n_seen:
            raise CacheFormatError(f"mixed table sizes: n={n_seen} then n={n}", line=ln)
        if not 1 <= k <= i <= n:
            raise CacheFormatError(f"indices must satisfy 1 <= k <= i <= n, got k={k}, i={i}, n={n}", line=ln)
        if entries.get((k, i), v) != v:
            raise CacheFormatError(f"conflicting duplicate for (k={k}, i={i})", line=ln)
        entries[(k, i)] = v
    if n_seen is None:
        raise CacheFormatError("cache file holds no entries")
    return WTable(n=n_seen, entries=entries)
