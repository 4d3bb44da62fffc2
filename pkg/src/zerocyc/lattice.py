"""Integer Smith form and a sparse Hermite-reduced lattice.

Everything here works with plain Python ints, so entries never overflow.
Vectors handed to :class:`Lattice` are dicts ``{column: value}``; the leading
column of a vector is its *largest* key.  Callers choose column numbering so
that the columns they want eliminated first carry the largest keys.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [()] * cols
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: list[list[int]], v: list[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


class SmithForm:
    """Result of :func:`smith_form`: ``left @ matrix @ right == diag``."""

    __slots__ = ("diagonal", "left", "right", "right_inv", "nrows", "ncols")

    def __init__(self, diagonal, left, right, right_inv, nrows, ncols):
        self.diagonal = diagonal
        self.left = left
        self.right = right
        self.right_inv = right_inv
        self.nrows = nrows
        self.ncols = ncols

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_form(matrix, ncols: int | None = None) -> SmithForm:
    """Smith normal form with unimodular transforms (and the right inverse).

    Pivot rule: the nonzero entry of least absolute value in the active block,
    ties broken by lowest (row, column).
    """
    A = [[int(x) for x in row] for row in matrix]
    m = len(A)
    if ncols is None:
        ncols = len(A[0]) if m else 0
    n = ncols
    for row in A:
        if len(row) != n:
            raise ValueError("ragged matrix")
    L = identity(m)
    R = identity(n)
    Rinv = identity(n)

    def row_add(i, j, q):  # row_i += q * row_j
        if q:
            Aj, Lj = A[j], L[j]
            A[i] = [x + q * y for x, y in zip(A[i], Aj)]
            L[i] = [x + q * y for x, y in zip(L[i], Lj)]

    def col_add(i, j, q):  # col_i += q * col_j
        if q:
            for row in A:
                row[i] += q * row[j]
            for row in R:
                row[i] += q * row[j]
            Rinv[j] = [x - q * y for x, y in zip(Rinv[j], Rinv[i])]

    def row_swap(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            L[i], L[j] = L[j], L[i]

    def col_swap(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in R:
                row[i], row[j] = row[j], row[i]
            Rinv[i], Rinv[j] = Rinv[j], Rinv[i]

    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i0, j0 = best
        row_swap(t, i0)
        col_swap(t, j0)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if not dirty:
                bad = None
                for i in range(t + 1, m):
                    row = A[i]
                    for j in range(t + 1, n):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_add(t, bad, 1)
                dirty = True
            # move the smallest remaining entry of row/column t onto the diagonal
            cand = [(abs(A[t][t]), 0, t, t)]
            cand += [(abs(A[i][t]), 1, i, t) for i in range(t + 1, m) if A[i][t]]
            cand += [(abs(A[t][j]), 1, t, j) for j in range(t + 1, n) if A[t][j]]
            _, _, i1, j1 = min(cand)
            row_swap(t, i1)
            col_swap(t, j1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            L[t] = [-x for x in L[t]]
        diag.append(A[t][t])
    return SmithForm(diag, L, R, Rinv, m, n)


def snf(matrix, ncols: int | None = None):
    """Return ``(diagonal, left, right)`` with ``left @ matrix @ right`` diagonal."""
    s = smith_form(matrix, ncols)
    return s.diagonal, s.left, s.right


# ---------------------------------------------------------------------------
# sparse lattice


def _axpy(v: dict, q: int, w: dict) -> None:
    """v -= q * w, in place, dropping zeros."""
    for c, x in w.items():
        y = v.get(c, 0) - q * x
        if y:
            v[c] = y
        else:
            v.pop(c, None)


class Lattice:
    """A subgroup of Z^(columns) kept in fully reduced (Hermite) echelon form.

    Each row has a positive entry at its pivot (its largest column); every
    other row has an entry in ``[0, pivot)`` at that column.  Rows whose pivot
    is 1 therefore make their column disappear from all other rows, which is
    what keeps lattices of small index sparse.
    """

    def __init__(self, vectors=()):
        self._rows: dict[int, dict[int, int]] = {}
        self._occ: dict[int, set[int]] = {}
        for v in vectors:
            self.add(v)

    # -- bookkeeping --------------------------------------------------------
    def _occ_add(self, piv, row):
        for c in row:
            if c != piv:
                self._occ.setdefault(c, set()).add(piv)

    def _occ_remove(self, piv, row):
        for c in row:
            if c != piv:
                s = self._occ.get(c)
                if s is not None:
                    s.discard(piv)
                    if not s:
                        del self._occ[c]

    def _reduce_in_place(self, v: dict, skip: int | None = None) -> None:
        rows = self._rows
        heap = [-c for c in v if c in rows and c != skip]
        heapq.heapify(heap)
        done = set()
        while heap:
            c = -heapq.heappop(heap)
            if c in done:
                continue
            done.add(c)
            x = v.get(c)
            if not x:
                continue
            row = rows[c]
            q = x // row[c]
            if q:
                _axpy(v, q, row)
                for d in row:
                    if d != c and d in rows and d != skip and d not in done:
                        heapq.heappush(heap, -d)

    def _install(self, piv: int, row: dict) -> None:
        p = row[piv]
        self._rows[piv] = row
        self._occ_add(piv, row)
        for other in sorted(self._occ.get(piv, ()), reverse=True):
            orow = self._rows[other]
            q = orow[piv] // p
            if q:
                self._occ_remove(other, orow)
                _axpy(orow, q, row)
                self._reduce_in_place(orow, skip=other)
                self._occ_add(other, orow)

    # -- public API ---------------------------------------------------------
    def reduce(self, v: dict) -> dict:
        """Canonical remainder of ``v`` modulo the lattice."""
        v = {c: x for c, x in v.items() if x}
        self._reduce_in_place(v)
        return v

    def __contains__(self, v: dict) -> bool:
        return not self.reduce(v)

    def add(self, v: dict) -> bool:
        """Insert ``v``; return True if the lattice grew."""
        v = self.reduce(v)
        grew = False
        while v:
            grew = True
            c = max(v)
            if v[c] < 0:
                v = {k: -x for k, x in v.items()}
            if c not in self._rows:
                self._reduce_in_place(v, skip=c)
                self._install(c, v)
                return True
            old = self._rows[c]
            p, a = old[c], v[c]
            g, s, t = xgcd(p, a)
            new = {}
            _axpy(new, -s, old)
            _axpy(new, -t, v)
            rest = {}
            _axpy(rest, -(p // g), v)
            _axpy(rest, a // g, old)
            self._occ_remove(c, old)
            del self._rows[c]
            self._reduce_in_place(new, skip=c)
            self._install(c, new)
            v = self.reduce(rest)
        return grew

    def extend(self, vectors) -> None:
        for v in vectors:
            self.add(v)

    def copy(self) -> "Lattice":
        other = Lattice()
        other._rows = {k: dict(r) for k, r in self._rows.items()}
        other._occ = {k: set(s) for k, s in self._occ.items()}
        return other

    @property
    def rank(self) -> int:
        return len(self._rows)

    def pivots(self) -> dict[int, int]:
        return {c: r[c] for c, r in self._rows.items()}

    def rows(self) -> list[dict]:
        return [dict(self._rows[c]) for c in sorted(self._rows)]

    def row(self, pivot: int) -> dict:
        return self._rows[pivot]

    def contains_localized(self, v: dict, m: int) -> bool:
        """True iff ``m**j * v`` lies in the lattice for some ``j >= 0``."""
        if m == 0:
            raise ValueError("localization at m = 0 is undefined")
        v = {c: Fraction(x) for c, x in v.items() if x}
        rows = self._rows
        while v:
            c = max(v)
            row = rows.get(c)
            if row is None:
                return False
            q = v[c] / row[c]
            if not _is_m_smooth(q.denominator, m):
                return False
            for d, x in row.items():
                y = v.get(d, 0) - q * x
                if y:
                    v[d] = y
                else:
                    v.pop(d, None)
        return True

    def __le__(self, other: "Lattice") -> bool:
        return all(r in other for r in self._rows.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self._rows == other._rows

    __hash__ = None


def _is_m_smooth(d: int, m: int) -> bool:
    m = abs(m)
    while d != 1:
        g = gcd(d, m)
        if g == 1:
            return False
        while d % g == 0:
            d //= g
    return True
