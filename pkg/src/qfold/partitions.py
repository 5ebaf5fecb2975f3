"""Partitions under Nandi's difference conditions.

A partition is a weakly decreasing tuple of positive parts.  A window is a
contiguous run of parts; its difference list is ``[l_s - l_{s+1}, ...]``.

Sets (``N``, ``N1``, ``N2``, ``N3``, ``NF1``, ``NF5``):

* ``N``: no window with differences [1], [0,0], [0,2], [2,0] or [0,3]; no
  window of odd weight with differences [3,0], [0,4], [4,0] or
  [3, 2, ..., 2, 3, 0] (any number of 2s, including none).
* ``N1``: N with no part 1.
* ``N2``: N with parts 1, 2, 3 each used at most once.
* ``N3``: N with no 1 or 3, at most one 2, and no window
  (2k+3), 2k, 2k-2, ..., 4, 2 for k >= 1.
* ``NF1``: N with no 1 and parts 2, 3 used at most once.
* ``NF5``: N with part 1 used at most once.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

SETS = ("N", "N1", "N2", "N3", "NF1", "NF5")
MAX_WEIGHT = 120

PLAIN = ((1,), (0, 0), (0, 2), (2, 0), (0, 3))
ODD_ONLY = ((3, 0), (0, 4), (4, 0))

# part -> maximum multiplicity
MULTIPLICITY = {
    "N": {},
    "N1": {1: 0},
    "N2": {1: 1, 2: 1, 3: 1},
    "N3": {1: 0, 2: 1, 3: 0},
    "NF1": {1: 0, 2: 1, 3: 1},
    "NF5": {1: 1},
}


@dataclass(frozen=True)
class Violation:
    kind: str  # "window" or "multiplicity"
    start: int  # 0-based index of the window's first part
    parts: tuple[int, ...]
    detail: str

    def __str__(self):
        if self.kind == "multiplicity":
            return self.detail
        return f"window {'+'.join(map(str, self.parts))} at position {self.start + 1}: {self.detail}"


def _diffs(parts: Sequence[int]) -> list[int]:
    return [parts[i] - parts[i + 1] for i in range(len(parts) - 1)]


def _window_violation(parts: Sequence[int], end: int, shape_rule: bool) -> Violation | None:
    """Forbidden window ending at index ``end`` (inclusive), if any."""
    for pat in PLAIN + ODD_ONLY:
        s = end - len(pat)
        if s < 0:
            continue
        w = parts[s:end + 1]
        if tuple(_diffs(w)) == pat:
            if pat in ODD_ONLY and sum(w) % 2 == 0:
                continue
            tag = " (odd weight)" if pat in ODD_ONLY else ""
            return Violation("window", s, tuple(w), f"differences {list(pat)}{tag}")
    # [3, 2*, 3, 0] with odd weight
    if end >= 3 and parts[end - 1] == parts[end] and parts[end - 2] - parts[end - 1] == 3:
        i = end - 2
        while i >= 1 and parts[i - 1] - parts[i] == 2:
            i -= 1
        if i >= 1 and parts[i - 1] - parts[i] == 3:
            w = parts[i - 1:end + 1]
            if sum(w) % 2 == 1:
                return Violation("window", i - 1, tuple(w), f"differences {_diffs(w)} matching [3,2*,3,0] (odd weight)")
    if shape_rule and parts[end] == 2:
        i = end
        while i >= 1 and parts[i - 1] - parts[i] == 2:
            i -= 1
        if i >= 1 and parts[i - 1] - parts[i] == 3:
            w = parts[i - 1:end + 1]
            k = len(w) - 1
            return Violation("window", i - 1, tuple(w), f"shape (2k+3)+2k+...+2 with k={k}")
    return None


def _check_set(name: str) -> None:
    if name not in SETS:
        raise ValueError(f"unknown partition set {name!r}; expected one of {', '.join(SETS)}")


def admits(parts: Sequence[int], name: str) -> tuple[bool, Violation | None]:
    """Membership test; on failure also returns the first violation found
    scanning windows by their last part."""
    _check_set(name)
    parts = tuple(parts)
    if any(p < 1 for p in parts) or any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValueError("parts must be positive and weakly decreasing")
    limits = MULTIPLICITY[name]
    for part, cap in sorted(limits.items()):
        m = parts.count(part)
        if m > cap:
            return False, Violation("multiplicity", 0, parts, f"m_{part} = {m} exceeds {cap}")
    shape = name == "N3"
    for end in range(len(parts)):
        v = _window_violation(parts, end, shape)
        if v is not None:
            return False, v
    return True, None


def _extend(name: str, prefix: list[int], counts: dict[int, int], weight: int, cap: int,
            tally: dict[int, dict[int, int]]) -> None:
    # every valid prefix is itself a member
    row = tally.setdefault(weight, {})
    row[len(prefix)] = row.get(len(prefix), 0) + 1
    limits = MULTIPLICITY[name]
    shape = name == "N3"
    top = min(prefix[-1] if prefix else cap, cap - weight)
    for p in range(top, 0, -1):
        lim = limits.get(p)
        if lim is not None and counts.get(p, 0) >= lim:
            continue
        prefix.append(p)
        if _window_violation(prefix, len(prefix) - 1, shape) is None:
            counts[p] = counts.get(p, 0) + 1
            _extend(name, prefix, counts, weight + p, cap, tally)
            counts[p] -= 1
        prefix.pop()


def _tally_largest(args) -> dict[int, dict[int, int]]:
    name, largest, cap = args
    tally: dict[int, dict[int, int]] = {}
    limits = MULTIPLICITY[name]
    if limits.get(largest) == 0:
        return tally
    _extend(name, [largest], {largest: 1}, largest, cap, tally)
    return tally


def genfun(name: str, max_weight: int, jobs: int = 1) -> dict[int, dict[int, int]]:
    """``weight -> {length: count}`` for all members of weight <= max_weight."""
    _check_set(name)
    if max_weight > MAX_WEIGHT:
        raise ValueError(f"max weight {max_weight} exceeds enumeration cap {MAX_WEIGHT}")
    if max_weight < 0:
        raise ValueError("max weight must be nonnegative")
    tasks = [(name, p, max_weight) for p in range(1, max_weight + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_tally_largest, tasks))
    else:
        parts = [_tally_largest(t) for t in tasks]
    out: dict[int, dict[int, int]] = {0: {0: 1}}
    for t in parts:
        for w, row in t.items():
            dst = out.setdefault(w, {})
            for length, c in row.items():
                dst[length] = dst.get(length, 0) + c
    for w in range(max_weight + 1):
        out.setdefault(w, {})
    return dict(sorted(out.items()))


def counts(name: str, max_weight: int, jobs: int = 1) -> list[int]:
    """``f(1, q)`` coefficients for weights ``0..max_weight``."""
    g = genfun(name, max_weight, jobs)
    return [sum(g[w].values()) for w in range(max_weight + 1)]


def members(name: str, weight: int) -> Iterator[tuple[int, ...]]:
    """All members of exact ``weight`` in reverse lexicographic order."""
    _check_set(name)
    shape = name == "N3"
    limits = MULTIPLICITY[name]

    def rec(prefix, remaining, cnt):
        if remaining == 0:
            yield tuple(prefix)
            return
        top = min(prefix[-1] if prefix else remaining, remaining)
        for p in range(top, 0, -1):
            lim = limits.get(p)
            if lim is not None and cnt.get(p, 0) >= lim:
                continue
            prefix.append(p)
            if _window_violation(prefix, len(prefix) - 1, shape) is None:
                cnt[p] = cnt.get(p, 0) + 1
                yield from rec(prefix, remaining - p, cnt)
                cnt[p] -= 1
            prefix.pop()

    yield from rec([], weight, {})


def all_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Every partition of ``n`` (no conditions), descending order."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for p in range(min(n, largest), 0, -1):
        for rest in all_partitions(n - p, p):
            yield (p,) + rest


def congruence_count(n: int, modulus: int, residues: Iterable[int]) -> int:
    """Partitions of ``n`` into parts congruent to some residue mod ``modulus``."""
    res = {r % modulus for r in residues}
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        if part % modulus in res:
            for t in range(part, n + 1):
                ways[t] += ways[t - part]
    return ways[n] if n >= 0 else 0


def length_grading(g: dict[int, dict[int, int]]) -> dict[tuple[int, int], int]:
    """``(length, weight) -> count`` view of a genfun table."""
    return {(length, w): c for w, row in g.items() for length, c in row.items() if c}
