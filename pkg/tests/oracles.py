"""Slow independent oracles shared by the test modules.

Everything here recomputes expected values from first principles, without
going through the package's own data structures.
"""

from fractions import Fraction
from itertools import combinations


def echelon_nullity(rows, ncols):
    """Nullity of a sparse rational matrix given as dicts col -> value."""
    pivots = {}
    rank = 0
    for r in rows:
        row = {c: Fraction(v) for c, v in r.items() if v}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                pivots[c] = {cc: vv * inv for cc, vv in row.items()}
                rank += 1
                break
            f = row.pop(c)
            for cc, vv in piv.items():
                if cc == c:
                    continue
                nv = row.get(cc, 0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
    return ncols - rank


def wedge_mono(a, b):
    """Product of two sorted index tuples: (sorted union, sign) or (None, 0)."""
    if set(a) & set(b):
        return None, 0
    seq = list(a) + list(b)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
              if seq[i] > seq[j])
    return tuple(sorted(seq)), (-1) ** inv


def _bump(row, c, v):
    nv = row.get(c, 0) + v
    if nv:
        row[c] = nv
    else:
        row.pop(c, None)


def leibniz_solution_dim(n, mode):
    """Dimension of the space of operators on the rank-n exterior algebra
    solving the Leibniz linear system, set up over the full matrix space.

    mode 'plain' imposes D(ab) = D(a)b + aD(b) with no further constraint;
    'Z2' and 'Z' add parity resp. degree preservation; 'even' and 'odd' are
    the two homogeneous superderivation systems (signed Leibniz for 'odd',
    plus the matching operator-parity constraint).
    """
    monos = [()]
    for k in range(1, n + 1):
        monos.extend(combinations(range(1, n + 1), k))
    idx = {mono: i for i, mono in enumerate(monos)}
    m = len(monos)

    def col(target, source):
        return idx[target] * m + idx[source]

    rows = []
    for A in monos:
        s_a = -1 if (mode == "odd" and len(A) % 2) else 1
        set_a = set(A)
        for B in monos:
            set_b = set(B)
            ab, s_ab = wedge_mono(A, B)
            for C in monos:
                set_c = set(C)
                row = {}
                if ab is not None:
                    _bump(row, col(C, ab), s_ab)
                if set_b <= set_c:
                    k1 = tuple(i for i in C if i not in set_b)
                    _, s1 = wedge_mono(k1, B)
                    _bump(row, col(k1, A), -s1)
                if set_a <= set_c:
                    k2 = tuple(i for i in C if i not in set_a)
                    _, s2 = wedge_mono(A, k2)
                    _bump(row, col(k2, B), -s_a * s2)
                if row:
                    rows.append(row)
    for C in monos:
        for K in monos:
            drop = False
            if mode in ("Z2", "even"):
                drop = (len(C) - len(K)) % 2 == 1
            elif mode == "Z":
                drop = len(C) != len(K)
            elif mode == "odd":
                drop = (len(C) - len(K)) % 2 == 0
            if drop:
                rows.append({col(C, K): 1})
    return echelon_nullity(rows, m * m)
