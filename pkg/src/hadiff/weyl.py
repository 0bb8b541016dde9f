"""Homogeneous differential operators sum_alpha f_alpha d^alpha of a fixed order."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .exactalg import (
    DimensionError,
    NotDivisible,
    Polynomial,
    as_fraction,
    exact_divide,
    mono_factorial,
    monomials_of_degree,
    partial_apply,
    product,
)


class NotHomogeneous(ValueError):
    pass


class DiffOp:
    """Order-m operator with polynomial coefficients keyed by d-exponents."""

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs=None):
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        for a, f in (coeffs or {}).items():
            a = tuple(a)
            if len(a) != nvars:
                raise DimensionError("multi-index length must equal nvars")
            if sum(a) != order:
                raise ValueError(f"term d^{a} is not of order {order}")
            if f.terms:
                self.coeffs[a] = f

    @classmethod
    def zero(cls, n, order):
        return cls(n, order)

    @classmethod
    def constant(cls, n, order, vec: dict):
        """Constant-coefficient operator from {alpha: scalar}."""
        return cls(n, order, {a: Polynomial.const(n, c) for a, c in vec.items()})

    @classmethod
    def partial(cls, alpha, coeff=1):
        n = len(alpha)
        return cls(n, sum(alpha), {tuple(alpha): Polynomial.const(n, coeff)})

    def is_zero(self):
        return not self.coeffs

    def coeff(self, alpha) -> Polynomial:
        return self.coeffs.get(tuple(alpha), Polynomial.zero(self.nvars))

    # arithmetic
    def _check(self, other):
        if other.nvars != self.nvars or other.order != self.order:
            raise DimensionError("operators live in different spaces")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for a, f in other.coeffs.items():
            out[a] = out[a] + f if a in out else f
        return DiffOp(self.nvars, self.order, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DiffOp(self.nvars, self.order, {a: -f for a, f in self.coeffs.items()})

    def scale(self, c):
        return DiffOp(self.nvars, self.order, {a: f.scale(c) for a, f in self.coeffs.items()})

    def left_mul(self, g: Polynomial):
        """The operator g*theta (coefficients multiplied by g)."""
        return DiffOp(self.nvars, self.order, {a: g * f for a, f in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.nvars, self.order) == (other.nvars, other.order) and \
            self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for a in monomials_of_degree(self.nvars, self.order):
            if a in self.coeffs:
                d = "*".join(f"d{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(a) if k)
                parts.append(f"({self.coeffs[a]})*{d or '1'}")
        return " + ".join(parts)

    def to_json(self):
        return {
            "order": self.order,
            "nvars": self.nvars,
            "terms": [{"dalpha": list(a), "poly": self.coeffs[a].to_json()}
                      for a in monomials_of_degree(self.nvars, self.order) if a in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj):
        terms = {tuple(t["dalpha"]): Polynomial.from_json(t["poly"]) for t in obj["terms"]}
        n = obj.get("nvars")
        if n is None:
            if not terms:
                raise ValueError("nvars needed for an empty operator")
            n = len(next(iter(terms)))
        return cls(n, obj["order"], terms)


def apply(theta: DiffOp, f: Polynomial) -> Polynomial:
    out = Polynomial.zero(f.nvars)
    for a, g in theta.coeffs.items():
        d = partial_apply(a, f)
        if d.terms:
            out = out + g * d
    return out


def pdeg(theta: DiffOp) -> int:
    """Common degree of all coefficients; raises NotHomogeneous."""
    degs = set()
    for f in theta.coeffs.values():
        if not f.is_homogeneous():
            raise NotHomogeneous("coefficient is not homogeneous")
        degs.add(f.degree())
    if len(degs) != 1:
        raise NotHomogeneous(f"coefficient degrees {sorted(degs)}")
    return degs.pop()


def adx(theta: DiffOp, i: int) -> DiffOp:
    """[x_i, theta]; lowers the order by one."""
    out = {}
    for a, f in theta.coeffs.items():
        if a[i]:
            b = list(a)
            b[i] -= 1
            out[tuple(b)] = f.scale(-a[i])
    return DiffOp(theta.nvars, theta.order - 1, out)


def adx_pow(theta: DiffOp, beta: Sequence[int]) -> DiffOp:
    """(ad x)^beta = (ad x_1)^beta_1 o ... o (ad x_n)^beta_n applied to theta."""
    if sum(beta) > theta.order:
        return DiffOp(theta.nvars, theta.order - sum(beta))
    out = theta
    for i in range(theta.nvars - 1, -1, -1):
        for _ in range(beta[i]):
            out = adx(out, i)
    return out


def constant_op_from_linear_product(deltas: Sequence[Sequence]) -> DiffOp:
    """Expand delta_1 ... delta_m (constant derivations) in the d^alpha basis."""
    n = len(deltas[0])
    p = product((Polynomial.linear(d) for d in deltas), n)
    return DiffOp.constant(n, len(deltas), p.terms)


def constant_power(delta: Sequence, m: int) -> dict:
    """Coefficients of (sum c_i d_i)^m: m!/alpha! c^alpha."""
    n = len(delta)
    out = {}
    fm = math.factorial(m)
    for a in monomials_of_degree(n, m):
        c = Fraction(fm, mono_factorial(a))
        for ci, k in zip(delta, a):
            if k:
                c *= as_fraction(ci) ** k
        if c:
            out[a] = c
    return out


def delta_power_op(delta, m: int, coeff: Polynomial | None = None) -> DiffOp:
    n = len(delta)
    op = DiffOp.constant(n, m, constant_power(delta, m))
    return op if coeff is None else op.left_mul(coeff)


def euler(m: int, n: int) -> DiffOp:
    """sum_{|alpha|=m} m!/alpha! x^alpha d^alpha."""
    if m < 1:
        raise ValueError("m >= 1")
    fm = math.factorial(m)
    return DiffOp(n, m, {a: Polynomial.monomial(a, Fraction(fm, mono_factorial(a)))
                         for a in monomials_of_degree(n, m)})


def in_DmA(theta: DiffOp, arr) -> bool:
    """theta * (x^beta Q) is divisible by Q for every |beta| <= m-1."""
    n = arr.n
    m = theta.order
    Q = arr.Q
    forms = arr.linear_forms
    for k in range(max(m, 1)):
        for beta in monomials_of_degree(n, k):
            try:
                exact_divide(apply(theta, Q.shift(beta)), forms)
            except NotDivisible:
                return False
    return True


def falling(r: int, k: int) -> int:
    return math.perm(r, k)


def gamma_k(theta: DiffOp, arr) -> DiffOp:
    """theta - (theta*Q)/Q * eps_k / (r(r-1)...(r-k+1)); result kills Q."""
    k = theta.order
    if k > arr.r:
        raise ValueError("need k <= r")
    try:
        g = exact_divide(apply(theta, arr.Q), arr.linear_forms)
    except NotDivisible as exc:
        raise ValueError("operator is not in D^(k)(A)") from exc
    if not g.terms:
        return theta
    return theta - euler(k, arr.n).left_mul(g.scale(Fraction(1, falling(arr.r, k))))


def gamma_k_inverse(theta: DiffOp, arr) -> DiffOp:
    """theta - (theta*p_1..p_k)/(p_1..p_k) * eps_k / k!."""
    k = theta.order
    forms = arr.linear_forms[:k]
    prod = product(forms, arr.n)
    g = exact_divide(apply(theta, prod), forms)
    if not g.terms:
        return theta
    return theta - euler(k, arr.n).left_mul(g.scale(Fraction(1, math.factorial(k))))


def flatten(theta: DiffOp, degree: int) -> dict:
    """Coordinates of a homogeneous operator as {(alpha, mu): coeff}."""
    out = {}
    for a, f in theta.coeffs.items():
        for e, c in f.terms.items():
            if sum(e) != degree:
                raise NotHomogeneous("unexpected coefficient degree")
            out[(a, e)] = c
    return out


# ---------------------------------------------------------------------------
# identity checks by action on monomials


def random_diffop(n: int, m: int, rng, degree: int = 2, density: float = 0.5) -> DiffOp:
    """Random order-m operator with coefficients of degree <= degree, small integers."""
    from .exactalg import monomials_up_to

    monos = monomials_up_to(n, degree)
    coeffs = {}
    for a in monomials_of_degree(n, m):
        if rng.random() < density:
            terms = {e: rng.randint(-5, 5) for e in rng.sample(monos, min(3, len(monos)))}
            coeffs[a] = Polynomial(n, terms)
    if not any(f.terms for f in coeffs.values()):
        a = rng.choice(monomials_of_degree(n, m))
        coeffs[a] = Polynomial.const(n, rng.choice([-2, -1, 1, 2]))
    return DiffOp(n, m, coeffs)


def adx_identity_holds(alpha, beta) -> bool:
    """(-1)^|beta| (ad x)^beta(d^alpha)/alpha! equals d^{alpha-beta}/(alpha-beta)!,
    or 0 when beta is not below alpha."""
    n = len(alpha)
    lhs = adx_pow(DiffOp.partial(alpha), beta).scale(
        Fraction((-1) ** sum(beta), mono_factorial(alpha)))
    if sum(beta) > sum(alpha):
        return lhs.is_zero()
    if not all(b <= a for a, b in zip(alpha, beta)):
        return lhs.is_zero()
    diff = tuple(a - b for a, b in zip(alpha, beta))
    rhs = DiffOp.partial(diff, Fraction(1, mono_factorial(diff)))
    return lhs == rhs and lhs.nvars == n


def _apply_mixed(ops: list[tuple[Polynomial, DiffOp]], f: Polynomial) -> Polynomial:
    out = Polynomial.zero(f.nvars)
    for g, op in ops:
        out = out + g * apply(op, f)
    return out


def commutation_identity_holds(theta: DiffOp, beta, max_degree: int) -> bool:
    """theta o x^beta = sum_{gamma <= beta} (-1)^|gamma| C(beta, gamma) x^{beta-gamma} (ad x)^gamma(theta)
    on every monomial of degree <= max_degree."""
    from itertools import product as iproduct

    from .exactalg import mono_binomial, monomials_up_to

    n = theta.nvars
    rhs = []
    for gamma in iproduct(*(range(b + 1) for b in beta)):
        if sum(gamma) > theta.order:
            continue
        c = (-1) ** sum(gamma) * mono_binomial(beta, gamma)
        xb = Polynomial.monomial(tuple(b - g for b, g in zip(beta, gamma)), c)
        rhs.append((xb, adx_pow(theta, gamma)))
    xbeta = Polynomial.monomial(tuple(beta))
    for e in monomials_up_to(n, max_degree):
        f = Polynomial.monomial(e)
        if apply(theta, xbeta * f) != _apply_mixed(rhs, f):
            return False
    return True


def euler_product_holds(n: int, m: int, max_degree: int) -> bool:
    """eps_m * f = eps_1(eps_1 - 1)...(eps_1 - m + 1) * f on monomials of degree <= max_degree."""
    from .exactalg import monomials_up_to

    e1 = euler(1, n)
    em = euler(m, n)
    for e in monomials_up_to(n, max_degree):
        f = Polynomial.monomial(e)
        g = f
        for k in reversed(range(m)):
            g = apply(e1, g) - g.scale(k)
        if apply(em, f) != g:
            return False
    return True
