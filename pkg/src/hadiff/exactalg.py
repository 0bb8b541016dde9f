"""Exact arithmetic kernel: multivariate polynomials over Q and dense matrices.

Monomials are plain tuples of non-negative ints.  Polynomials keep a dict
``{exponent tuple: Fraction}`` with no zero coefficients.  Everything is
treated as immutable once built.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(c)


# ---------------------------------------------------------------------------
# monomials


def grevlex_key(e: Sequence[int]):
    """Sort key: larger key means larger monomial in graded reverse lex."""
    return (sum(e), tuple(-a for a in reversed(e)))


def monomials_of_degree(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree d in n variables, grevlex descending."""
    if d < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return out


def monomials_up_to(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponents with total degree 0..d, degree ascending, grevlex descending within."""
    out = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(n, k))
    return out


def mono_factorial(e: Sequence[int]) -> int:
    out = 1
    for a in e:
        out *= math.factorial(a)
    return out


def mono_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_sub(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def mono_add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def mono_binomial(b: Sequence[int], g: Sequence[int]) -> int:
    out = 1
    for x, y in zip(b, g):
        out *= math.comb(x, y)
    return out


def num_monomials(n: int, d: int) -> int:
    if d < 0:
        return 0
    return math.comb(d + n - 1, n - 1)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        else:
            self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    # constructors
    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def const(cls, n, c):
        c = as_fraction(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def one(cls, n):
        return cls.const(n, 1)

    @classmethod
    def var(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, e, c=1):
        c = as_fraction(c)
        return cls._raw(len(e), {tuple(e): c} if c else {})

    @classmethod
    def linear(cls, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = as_fraction(c)
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(n, terms)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, e) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def homogeneous_part(self, d):
        return Polynomial._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # arithmetic
    def _check(self, other):
        if other.nvars != self.nvars:
            raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s += c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = -c
            else:
                s -= c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial._raw(self.nvars, terms)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: c * v for e, v in self.terms.items()})

    def shift(self, e, c=1):
        """Multiply by the monomial c*x^e."""
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(k, e)): c * v for k, v in self.terms.items()},
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        return Polynomial._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    # calculus
    def diff(self, i: int):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Polynomial._raw(self.nvars, out)

    def evaluate(self, point):
        point = [as_fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def substitute(self, images: Sequence["Polynomial"]):
        """Replace x_i by images[i] (all images share one ring)."""
        m = images[0].nvars
        out = Polynomial.zero(m)
        powers: list[dict] = [{0: Polynomial.one(m)} for _ in images]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = pw(i, k - 1) * images[i]
            return cache[k]

        for e, c in self.terms.items():
            t = Polynomial.const(m, c)
            for i, k in enumerate(e):
                if k:
                    t = t * pw(i, k)
            out = out + t
        return out

    # display / io
    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = var_names(self.nvars)
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return {
            "nvars": self.nvars,
            "terms": [{"e": list(e), "c": fraction_str(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj):
        n = obj["nvars"]
        terms = {}
        for t in obj["terms"]:
            e = tuple(int(a) for a in t["e"])
            if len(e) != n:
                raise DimensionError("exponent length does not match nvars")
            terms[e] = terms.get(e, 0) + as_fraction(t["c"])
        return cls(n, terms)


def var_names(n):
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def fraction_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.nvars != b.nvars:
        raise DimensionError("nvars mismatch")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def partial_apply(alpha: Sequence[int], f: Polynomial) -> Polynomial:
    """Return d^alpha * f."""
    out = {}
    for e, c in f.terms.items():
        coef = c
        new = []
        for a, k in zip(alpha, e):
            if a > k:
                break
            if a:
                coef *= math.perm(k, a)
            new.append(k - a)
        else:
            out[tuple(new)] = coef
    return Polynomial._raw(f.nvars, out)


def product(polys: Iterable[Polynomial], n: int) -> Polynomial:
    out = Polynomial.one(n)
    for p in polys:
        out = out * p
    return out


# ---------------------------------------------------------------------------
# division


def divide_by_linear(f: Polynomial, p: Polynomial) -> Polynomial:
    """Exact quotient f / p for a linear form p; raises NotDivisible."""
    n = f.nvars
    if not p.terms or not p.is_homogeneous() or p.degree() != 1:
        raise ValueError("divisor must be a nonzero linear form")
    # eliminate along the last variable with nonzero coefficient
    k = max(e.index(1) for e in p.terms)
    ek = tuple(1 if i == k else 0 for i in range(n))
    ck = p.terms[ek]
    rest = {e: c for e, c in p.terms.items() if e != ek}
    groups: dict[int, dict] = {}
    for e, c in f.terms.items():
        groups.setdefault(e[k], {})[e[:k] + (0,) + e[k + 1:]] = c
    quotient: dict = {}
    top = max(groups) if groups else 0
    for d in range(top, 0, -1):
        g = groups.pop(d, None)
        if not g:
            continue
        lower = groups.setdefault(d - 1, {})
        for e, c in g.items():
            q = c / ck
            qe = e[:k] + (d - 1,) + e[k + 1:]
            quotient[qe] = q
            for re_, rc in rest.items():
                t = tuple(a + b for a, b in zip(e, re_))
                v = lower.get(t, 0) - q * rc
                if v:
                    lower[t] = v
                else:
                    lower.pop(t, None)
    if groups.get(0):
        raise NotDivisible(f"{p} does not divide polynomial")
    return Polynomial._raw(n, quotient)


def exact_divide(f: Polynomial, g) -> Polynomial:
    """Return q with f = q*g or raise NotDivisible.

    g may be a Polynomial or a sequence of linear forms whose product is the
    divisor; the latter divides factor by factor.
    """
    if isinstance(g, Polynomial):
        if g.nvars != f.nvars:
            raise DimensionError("nvars mismatch")
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if g.is_homogeneous() and g.degree() == 1:
            return divide_by_linear(f, g)
        return _divide_general(f, g)
    q = f
    for p in g:
        q = divide_by_linear(q, p)
    return q


def divides(f: Polynomial, g) -> bool:
    try:
        exact_divide(f, g)
    except NotDivisible:
        return False
    return True


def _divide_general(f: Polynomial, g: Polynomial) -> Polynomial:
    # a single polynomial is a Groebner basis of its ideal, so the division
    # remainder vanishes exactly when g | f
    if g.is_constant():
        return f.scale(1 / g.constant_term())
    ge, gc = g.leading_term()
    rem = dict(f.terms)
    quotient = {}
    n = f.nvars
    while rem:
        e = max(rem, key=grevlex_key)
        c = rem[e]
        if not all(a >= b for a, b in zip(e, ge)):
            raise NotDivisible("remainder is nonzero")
        qe = tuple(a - b for a, b in zip(e, ge))
        qc = c / gc
        quotient[qe] = qc
        for te, tc in g.terms.items():
            t = tuple(a + b for a, b in zip(qe, te))
            v = rem.get(t, 0) - qc * tc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return Polynomial._raw(n, quotient)


# ---------------------------------------------------------------------------
# vectors and matrices over Q


def primitive_vector(v: Sequence) -> list[int]:
    """Scale to a primitive integer vector with first nonzero entry positive."""
    v = [as_fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    if g == 0:
        return ints
    ints = [a // g for a in ints]
    for a in ints:
        if a:
            if a < 0:
                ints = [-b for b in ints]
            break
    return ints


def _integer_rows(M):
    rows = []
    for row in M:
        row = [as_fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        rows.append([int(x * den) for x in row])
    return rows


def row_echelon(M: Sequence[Sequence], ncols: int | None = None):
    """Fraction-free (Bareiss) forward elimination.

    Returns (rows, pivot_columns) with rows an integer echelon form.
    """
    rows = _integer_rows(M)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    prev = 1
    nrows = len(rows)
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        a = piv[c]
        for i in range(r + 1, nrows):
            row = rows[i]
            b = row[c]
            if b:
                rows[i] = [(a * row[j] - b * piv[j]) // prev for j in range(ncols)]
            elif a != prev:
                rows[i] = [(a * x) // prev for x in row]
        prev = a
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def rank(M: Sequence[Sequence], ncols: int | None = None) -> int:
    if not M:
        return 0
    return len(row_echelon(M, ncols)[1])


def qmat_rank_nullspace(M: Sequence[Sequence], ncols: int | None = None):
    """Exact rank and a normalized nullspace basis of a rational matrix."""
    if ncols is None:
        ncols = len(M[0]) if M else 0
    if not M:
        basis = []
        for j in range(ncols):
            v = [0] * ncols
            v[j] = 1
            basis.append(v)
        return 0, basis
    rows, pivots = row_echelon(M, ncols)
    rk = len(pivots)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i in range(rk - 1, -1, -1):
            c = pivots[i]
            s = sum(rows[i][j] * v[j] for j in range(c + 1, ncols) if rows[i][j])
            v[c] = Fraction(-s, rows[i][c])
        basis.append(primitive_vector(v))
    return rk, basis


def nullspace(M, ncols=None):
    return qmat_rank_nullspace(M, ncols)[1]


def solve(A: Sequence[Sequence], b: Sequence):
    """Solve A x = b exactly; returns a list of Fractions or None."""
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    aug = [[as_fraction(x) for x in A[i]] + [as_fraction(b[i])] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if aug[i][c]), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][ncols] for i in range(r, nrows)):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return x


def qmat_det(M: Sequence[Sequence]) -> Fraction:
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    A = [[as_fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        piv = A[c][c]
        det *= piv
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / piv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    if any(len(row) != inner for row in A):
        raise DimensionError("incompatible shapes")
    cols = len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(inner)), Fraction(0))
             for j in range(cols)] for i in range(len(A))]


def sparse_rank(nrows: int, ncols: int, entries: dict) -> int:
    """Exact rank of a rational matrix given as {(i, j): value}.

    Rows are cleared of denominators and handed to FLINT's integer rank.
    """
    if not entries or not nrows or not ncols:
        return 0
    import flint

    dens = [1] * nrows
    for (i, _), v in entries.items():
        d = v.denominator if isinstance(v, Fraction) else 1
        if d != 1:
            dens[i] = dens[i] * d // math.gcd(dens[i], d)
    # drop zero rows and columns; they do not change the rank
    used_rows = sorted({i for i, _ in entries})
    used_cols = sorted({j for _, j in entries})
    ri = {i: k for k, i in enumerate(used_rows)}
    ci = {j: k for k, j in enumerate(used_cols)}
    M = flint.fmpz_mat(len(used_rows), len(used_cols))
    for (i, j), v in entries.items():
        M[ri[i], ci[j]] = int(v * dens[i])
    return M.rank()


RANK_PRIME = 2 ** 61 - 1


def sparse_rank_mod(nrows: int, ncols: int, entries: dict, prime: int = RANK_PRIME) -> int:
    """Rank of the reduction mod a prime; never exceeds the rank over Q."""
    if not entries or not nrows or not ncols:
        return 0
    import flint

    used_rows = sorted({i for i, _ in entries})
    used_cols = sorted({j for _, j in entries})
    ri = {i: k for k, i in enumerate(used_rows)}
    ci = {j: k for k, j in enumerate(used_cols)}
    M = flint.nmod_mat(len(used_rows), len(used_cols), prime)
    for (i, j), v in entries.items():
        v = as_fraction(v)
        if v.denominator % prime == 0:
            return sparse_rank(nrows, ncols, entries)
        M[ri[i], ci[j]] = v.numerator * pow(v.denominator, -1, prime) % prime
    return M.rank()


# ---------------------------------------------------------------------------
# polynomial matrices


class PolyMatrix:
    """Dense matrix of Polynomials in a common ring."""

    __slots__ = ("nvars", "rows", "cols", "entries")

    def __init__(self, nvars, entries, rows=None, cols=None):
        self.nvars = nvars
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries) if rows is None else rows
        self.cols = (len(self.entries[0]) if self.entries else 0) if cols is None else cols
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError("entry count must equal rows * cols")

    @classmethod
    def zeros(cls, nvars, rows, cols):
        return cls(nvars, [[Polynomial.zero(nvars) for _ in range(cols)] for _ in range(rows)],
                   rows, cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j):
        return [self.entries[i][j] for i in range(self.rows)]

    def transpose(self):
        return PolyMatrix(self.nvars, [self.column(j) for j in range(self.cols)],
                          self.cols, self.rows)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionError("incompatible shapes")
        n = self.nvars
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Polynomial.zero(n)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a.terms:
                        b = other.entries[k][j]
                        if b.terms:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(n, out, self.rows, other.cols)

    def is_zero(self):
        return all(not e.terms for row in self.entries for e in row)

    def evaluate(self, point):
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    __hash__ = None

    def to_json(self):
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[e.to_json() for e in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj, nvars):
        entries = [[Polynomial.from_json(e) for e in row] for row in obj["entries"]]
        return cls(nvars, entries, obj["rows"], obj["cols"])


def polymat_rank_at_point(M: PolyMatrix, point) -> int:
    if len(point) != M.nvars:
        raise DimensionError("point length must equal nvars")
    if M.rows == 0 or M.cols == 0:
        return 0
    return rank(M.evaluate(point), M.cols)


def column_contents(M: PolyMatrix):
    """Split off a polynomial factor g_j from every column that is g_j times a
    constant vector.  Returns (factors, reduced matrix)."""
    n = M.nvars
    factors = []
    cols = []
    for j in range(M.cols):
        col = M.column(j)
        nz = [p for p in col if p.terms]
        g = None
        if nz and not all(p.is_constant() for p in nz):
            lead = nz[0]
            le, lc = lead.leading_term()
            ratios = []
            for p in col:
                if not p.terms:
                    ratios.append(Fraction(0))
                    continue
                pe, pc = p.leading_term()
                r = pc / lc
                if pe != le or p != lead.scale(r):
                    break
                ratios.append(r)
            else:
                g = lead
                cols.append([Polynomial.const(n, r) for r in ratios])
        if g is None:
            factors.append(Polynomial.one(n))
            cols.append(col)
        else:
            factors.append(g)
    reduced = PolyMatrix(n, [[cols[j][i] for j in range(M.cols)] for i in range(M.rows)],
                         M.rows, M.cols)
    return factors, reduced


def bareiss_det(M: PolyMatrix) -> Polynomial:
    n = M.nvars
    size = M.rows
    if size != M.cols:
        raise DimensionError("determinant of a non-square matrix")
    if size == 0:
        return Polynomial.one(n)
    if all(e.is_constant() for row in M.entries for e in row):
        return Polynomial.const(n, qmat_det([[e.constant_term() for e in row]
                                             for row in M.entries]))
    A = [list(r) for r in M.entries]
    sign = 1
    prev = Polynomial.one(n)
    for k in range(size - 1):
        p = next((i for i in range(k, size) if A[i][k].terms), None)
        if p is None:
            return Polynomial.zero(n)
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, size):
            aik = A[i][k]
            for j in range(k + 1, size):
                num = akk * A[i][j] - aik * A[k][j]
                A[i][j] = exact_divide(num, prev) if prev != 1 else num
            A[i][k] = Polynomial.zero(n)
        prev = akk
    det = A[size - 1][size - 1]
    return det if sign > 0 else -det


def _interpolate_det(M: PolyMatrix) -> Polynomial:
    """Determinant by dense evaluation on a grid and tensor interpolation."""
    n = M.nvars
    size = M.rows
    bound = 0
    for j in range(size):
        bound += max((e.degree() for e in M.column(j)), default=0)
    bound = max(bound, 0)
    pts = list(range(bound + 1))
    import itertools

    values = {}
    for idx in itertools.product(pts, repeat=n):
        values[idx] = qmat_det(M.evaluate(idx))
    # successive univariate interpolation, axis by axis
    for axis in range(n):
        new = {}
        keys = {k[:axis] + k[axis + 1:] for k in values}
        for rest in keys:
            ys = [values[rest[:axis] + (t,) + rest[axis:]] for t in pts]
            coeffs = _newton_to_monomial(pts, ys)
            for d, c in enumerate(coeffs):
                new[rest[:axis] + (d,) + rest[axis:]] = c
        values = new
    return Polynomial(n, {e: c for e, c in values.items() if c and sum(e) <= bound})


def _newton_to_monomial(xs, ys):
    k = len(xs)
    dd = [as_fraction(y) for y in ys]
    for level in range(1, k):
        for i in range(k - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    coeffs = [Fraction(0)] * k
    for i in range(k - 1, -1, -1):
        # coeffs := coeffs * (t - xs[i]) + dd[i]
        shifted = [Fraction(0)] + coeffs[:-1]
        coeffs = [s - xs[i] * c for s, c in zip(shifted, coeffs)]
        coeffs[0] += dd[i]
    return coeffs


INTERPOLATION_THRESHOLD = 20


def polymat_det_factored(M: PolyMatrix, threshold: int = INTERPOLATION_THRESHOLD):
    """Determinant as a list of polynomial factors (product not expanded)."""
    if M.rows != M.cols:
        raise DimensionError("determinant of a non-square matrix")
    factors, reduced = column_contents(M)
    if reduced.rows > threshold and not all(
            e.is_constant() for row in reduced.entries for e in row):
        core = _interpolate_det(reduced)
    else:
        core = bareiss_det(reduced)
    return [f for f in factors if f != 1] + [core]


def polymat_det(M: PolyMatrix, threshold: int = INTERPOLATION_THRESHOLD) -> Polynomial:
    return product(polymat_det_factored(M, threshold), M.nvars)
