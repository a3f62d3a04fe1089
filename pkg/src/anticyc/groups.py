"""Finite abelian groups given by an element list and a multiplication.

The structure is found by adjoining elements one at a time (recording the
relation each new generator satisfies), then diagonalising the relation
matrix with a Smith normal form. Discrete logarithms of every element with
respect to the Smith generators are tabulated.
"""

from fractions import Fraction


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def smith_normal_form(A):
    """Return (D, U, V) with U*A*V = D diagonal, U and V unimodular.

    A is a square integer matrix given as a list of rows. Diagonal entries
    are nonnegative and each divides the next.
    """
    n = len(A)
    A = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(M, i, j, a, b, c, d):
        # rows (i, j) <- (a*ri + b*rj, c*ri + d*rj)
        ri, rj = M[i], M[j]
        M[i] = [a * x + b * y for x, y in zip(ri, rj)]
        M[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def col_op(M, i, j, a, b, c, d):
        for r in M:
            x, y = r[i], r[j]
            r[i], r[j] = a * x + b * y, c * x + d * y

    for t in range(n):
        while True:
            # pivot: smallest nonzero entry in the lower-right block
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return _finish(A, U, V, n)
            i, j = best
            if i != t:
                A[t], A[i] = A[i], A[t]
                U[t], U[i] = U[i], U[t]
            if j != t:
                col_op(A, t, j, 0, 1, 1, 0)
                col_op(V, t, j, 0, 1, 1, 0)
            for i in range(t + 1, n):
                if A[i][t]:
                    g, x, y = _xgcd(A[t][t], A[i][t])
                    a, b = A[t][t] // g, A[i][t] // g
                    row_op(A, t, i, x, y, -b, a)
                    row_op(U, t, i, x, y, -b, a)
            for j in range(t + 1, n):
                if A[t][j]:
                    g, x, y = _xgcd(A[t][t], A[t][j])
                    a, b = A[t][t] // g, A[t][j] // g
                    col_op(A, t, j, x, y, -b, a)
                    col_op(V, t, j, x, y, -b, a)
            if any(A[i][t] for i in range(t + 1, n)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            # divisibility condition
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(A, t, bad, 1, 1, 0, 1)
            row_op(U, t, bad, 1, 1, 0, 1)
    return _finish(A, U, V, n)


def _finish(A, U, V, n):
    for t in range(n):
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V


def _matinv_unimodular(V):
    """Exact inverse of a unimodular integer matrix."""
    n = len(V)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    out = [[M[i][n + j] for j in range(n)] for i in range(n)]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise ArithmeticError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


class FiniteAbelianGroup:
    """Structure of a finite abelian group.

    Parameters
    ----------
    elements : sequence of hashable group elements (the whole group)
    mul : callable (x, y) -> x*y, returning an element equal (==, hash) to a listed one
    identity : the neutral element
    """

    def __init__(self, elements, mul, identity):
        self.elements = list(elements)
        self.mul = mul
        self.identity = identity
        self.order = len(self.elements)
        self._build()

    def _power(self, g, e):
        x = self.identity
        for _ in range(e):
            x = self.mul(x, g)
        return x

    def _build(self):
        table = {self.identity: ()}
        gens, rels = [], []
        for g in self.elements:
            if g in table:
                continue
            x, e = g, 1
            while x not in table:
                x = self.mul(x, g)
                e += 1
            k = len(gens)
            rel = list(table[x]) + [0] * (k - len(table[x]))
            rels.append([-r for r in rel] + [e])
            new = {}
            h = self.identity
            for i in range(e):
                for y, c in table.items():
                    new[self.mul(h, y)] = tuple(list(c) + [0] * (k - len(c))) + (i,)
                h = self.mul(h, g)
            table = new
            gens.append(g)
        if len(table) != self.order:
            raise ArithmeticError("element list is not closed under multiplication")
        n = len(gens)
        R = [r + [0] * (n - len(r)) for r in rels]
        if n == 0:
            self.generators, self.generator_orders = [], []
            self._log = {self.identity: ()}
            return
        # relations are the rows of R; coordinates c transform as c V, and the
        # new generators are the rows of V^-1
        D, U, V = smith_normal_form(R)
        Vinv = _matinv_unimodular(V)
        diag = [D[i][i] for i in range(n)]
        keep = [i for i in range(n) if diag[i] != 1]
        new_gens = []
        for j in keep:
            h = self.identity
            for i in range(n):
                h = self.mul(h, self._power(gens[i], Vinv[j][i] % self.order))
            new_gens.append(h)
        self.generators = new_gens
        self.generator_orders = [diag[j] for j in keep]
        log = {}
        for x, c in table.items():
            c = list(c) + [0] * (n - len(c))
            y = [sum(c[i] * V[i][j] for i in range(n)) for j in range(n)]
            log[x] = tuple(y[j] % diag[j] for j in keep)
        self._log = log

    def dlog(self, x):
        """Exponent vector of x with respect to ``generators``."""
        return self._log[x]

    def from_exponents(self, vec):
        x = self.identity
        for g, e in zip(self.generators, vec):
            x = self.mul(x, self._power(g, e))
        return x

    def character_turns(self):
        """All characters, each as a tuple of turns (Fractions mod 1) on the generators."""
        out = [()]
        for d in self.generator_orders:
            out = [t + (Fraction(a, d),) for t in out for a in range(d)]
        return out

    def evaluate_turn(self, turns, x):
        """Value of the character with generator turns ``turns`` at x, as a turn in [0,1)."""
        s = sum((t * e for t, e in zip(turns, self.dlog(x))), Fraction(0))
        return s - (s.numerator // s.denominator)
