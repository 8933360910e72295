"""Dense exact linear algebra over the rationals.

Matrices are lists of rows of Fractions (or ints).  Ranks go through a
fraction-free integer Bareiss echelon; solutions and nullspaces go through
a plain rational rref.  Pivoting is always least-index, so reduced forms
and the canonical solutions extracted from them are unique.
"""

from fractions import Fraction
from math import lcm


def _cleared_int_rows(rows):
    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        den = lcm(*(x.denominator for x in fr)) if fr else 1
        out.append([int(x * den) for x in fr])
    return out


def rank(rows):
    """Rank via fraction-free Bareiss elimination on a denominator-cleared copy."""
    m = _cleared_int_rows(rows)
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                # Bareiss: exact integer division by the previous pivot
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nrows:
            break
    return r


def rref(rows):
    """Reduced row echelon form with least-index pivots.  Returns (matrix, pivot_cols)."""
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    if not m:
        return m, pivots
    nrows, ncols = len(m), len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def nullspace(rows, ncols=None):
    """Canonical basis of the right nullspace: one vector per free column,
    with a 1 in that column."""
    if rows:
        ncols = len(rows[0])
    elif ncols is None:
        raise ValueError("ncols needed for an empty matrix")
    R, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """One solution of A x = b with all free variables set to zero
    (the canonical representative).  None if the system is inconsistent."""
    if not rows:
        return [] if not any(rhs) else None
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    R, pivots = rref(aug)
    ncols = len(rows[0])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return x


def sparse_rank(rows):
    """Rank of a sparse matrix given as an iterable of {col: value} dicts.
    Incremental echelon; each incoming row is reduced against the stored
    pivot rows by leading column until it dies or yields a new pivot."""
    pivots = {}
    rank_ = 0
    for r in rows:
        row = {c: Fraction(v) for c, v in r.items() if v}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                pivots[c] = {cc: vv * inv for cc, vv in row.items()}
                rank_ += 1
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
    return rank_


def identity_matrix(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def invert(rows):
    """Inverse of a square rational matrix, or None if singular."""
    n = len(rows)
    aug = [[Fraction(x) for x in row] + identity_matrix(n)[i] for i, row in enumerate(rows)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in R]


def mat_vec(rows, v):
    return [sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in rows]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum((Fraction(x) * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]
