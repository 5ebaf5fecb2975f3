"""Small independent reference implementations used by the tests.

Everything here works on plain Python lists of integer coefficients
(index = exponent of q) so it shares no code with the package.
"""

from itertools import product as cartesian


def mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def inv(a, n):
    assert a[0] in (1, -1)
    out = [0] * n
    for k in range(n):
        v = (1 if k == 0 else 0) - sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = v * a[0]
    return out


def one_minus(e, n, c=1):
    """1 - c q^e as a list."""
    out = [0] * n
    out[0] = 1
    if e < n:
        out[e] -= c
    return out


def poch(a, s, count, n, c=1):
    """(c q^a; q^s)_count with a >= 1 (count may be None for infinity)."""
    out = [1] + [0] * (n - 1)
    t = 0
    while count is None or t < count:
        e = a + s * t
        if e >= n:
            if count is None:
                break
            t += 1
            continue
        out = mul(out, one_minus(e, n, c), n)
        t += 1
    return out


def recip_residues(m, residues, n):
    """prod over parts = r mod m of 1/(1 - q^part)."""
    out = [1] + [0] * (n - 1)
    for r in residues:
        out = mul(out, inv(poch(r, m, None, n), n), n)
    return out


def multisum(B, b, bases, n, box):
    """Brute-force sum over the box 0 <= m_i <= box (integer exponents)."""
    d = len(b)
    total = [0] * n
    for m in cartesian(range(box + 1), repeat=d):
        e2 = sum(B[i][j] * m[i] * m[j] for i in range(d) for j in range(d))
        assert e2 % 2 == 0
        e = e2 // 2 + sum(bi * mi for bi, mi in zip(b, m))
        if e >= n:
            continue
        term = [0] * n
        term[e] = 1
        for mi, s in zip(m, bases):
            term = mul(term, inv(poch(s, s, mi, n), n), n)
        total = [x + y for x, y in zip(total, term)]
    return total


def partition_counts(n):
    p = [1] + [0] * n
    for part in range(1, n + 1):
        for t in range(part, n + 1):
            p[t] += p[t - part]
    return p


# -- Nandi's conditions, straight from the definition ----------------------

import re

_PLAIN = [[1], [0, 0], [0, 2], [2, 0], [0, 3]]
_ODD = [[3, 0], [0, 4], [4, 0]]
_SPECIAL = re.compile(r"^3(,2)*,3,0$")


def nandi_ok(parts, name):
    parts = list(parts)
    caps = {
        "N": {}, "N1": {1: 0}, "N2": {1: 1, 2: 1, 3: 1}, "N3": {1: 0, 2: 1, 3: 0},
        "NF1": {1: 0, 2: 1, 3: 1}, "NF5": {1: 1},
    }[name]
    for p, c in caps.items():
        if parts.count(p) > c:
            return False
    L = len(parts)
    for s in range(L):
        for t in range(s + 1, L):
            w = parts[s:t + 1]
            diffs = [w[i] - w[i + 1] for i in range(len(w) - 1)]
            odd = sum(w) % 2 == 1
            if diffs in _PLAIN:
                return False
            if odd and (diffs in _ODD or _SPECIAL.match(",".join(map(str, diffs)))):
                return False
            if name == "N3" and w[-1] == 2 and len(w) >= 2:
                k = len(w) - 1
                if w == [2 * k + 3] + [2 * j for j in range(k, 0, -1)]:
                    return False
    return True


def partitions_of(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for p in range(min(n, largest), 0, -1):
        for rest in partitions_of(n - p, p):
            yield [p] + rest
