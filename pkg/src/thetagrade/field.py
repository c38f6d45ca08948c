"""Prime fields sized for a graded-algebra session.

A session fixes one odd prime p with p = 1 (mod 2m), so that a primitive
m-th root of unity zeta and a square root xi of zeta both live in F_p,
and p > 2N so that formal derivatives of the invariant polynomials are
faithful and truncated exponentials of nilpotent N x N matrices are
exact.
"""

from __future__ import annotations


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """F_p with a fixed primitive root and a discrete-log table.

    p stays small (a few hundred at most) so the full log table is the
    cheapest correct way to solve multiplicative equations.
    """

    def __init__(self, p: int):
        if not is_prime(p) or p == 2:
            raise FieldError(f"{p} is not an odd prime")
        self.p = p
        self.generator = self._find_generator(p)
        self._dlog = {}
        x = 1
        for k in range(p - 1):
            self._dlog[x] = k
            x = x * self.generator % p

    @staticmethod
    def _find_generator(p):
        factors = []
        m = p - 1
        d = 2
        while d * d <= m:
            if m % d == 0:
                factors.append(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            factors.append(m)
        for g in range(2, p):
            if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
                return g
        raise FieldError(f"no primitive root mod {p}")  # unreachable for prime p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def dlog(self, a: int) -> int:
        """Discrete log base the fixed generator."""
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("dlog of 0")
        return self._dlog[a]

    def element_order(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("order of 0")
        k = self._dlog[a]
        from math import gcd

        return (self.p - 1) // gcd(k, self.p - 1)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


def root_of_unity(F: PrimeField, d: int) -> int:
    """Element of exact multiplicative order d, deterministically
    generator**((p-1)/d)."""
    if d < 1 or (F.p - 1) % d != 0:
        raise FieldError(f"no element of order {d} in F_{F.p}: {d} does not divide {F.p - 1}")
    return pow(F.generator, (F.p - 1) // d, F.p)


SEARCH_CAP = 10**6


def choose_field(group_type, N: int, m: int) -> PrimeField:
    """Smallest prime p with p = 1 (mod 2m), p > 2N, p good for the group
    type, and p not dividing n for SL(n).

    group_type may be a GroupType or one of the family strings.
    """
    family = getattr(group_type, "family", group_type)
    if m < 1 or N < 2:
        raise FieldError("need m >= 1 and N >= 2")
    p = 2 * N + 1
    # align upwards on the residue class 1 mod 2m
    if p % (2 * m) != 1:
        p += (1 - p) % (2 * m)
    if p <= 2 * N:
        p += 2 * m
    while p < SEARCH_CAP:
        if is_prime(p) and p > 2 * N:
            good = p != 2  # p = 2 is bad outside type A; excluded anyway by p > 2N
            if family in ("SL", "GL") and N % p == 0:
                good = False
            if good:
                return PrimeField(p)
        p += 2 * m
    raise FieldError(f"no suitable prime below {SEARCH_CAP} for N={N}, m={m}")
