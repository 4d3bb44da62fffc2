"""Finite-field towers F_q ⊆ F_{q^m} ⊆ F_{q^N} with Frobenius x ↦ x^q.

Field elements are plain ints: the base-p digits of the int are the
coefficients of a polynomial in the generator t, low degree first.
Multiplication goes through discrete log tables built from a primitive
element, which is fine at the sizes the rest of the package can handle.
"""

from __future__ import annotations

from math import gcd


class CapExceeded(ValueError):
    """A size limit of the model was exceeded."""


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n > 1 and prime_factors(n) == [n]


def extension_splitting(d: int, m: int) -> tuple[int, int]:
    """F_{q^d} ⊗ F_{q^m} splits into g copies of a degree-f extension of F_{q^m}."""
    g = gcd(d, m)
    return g, d * m // g // m


# -- polynomials over F_p as coefficient lists, low degree first -------------


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _polymod(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim(list(f))
    dg = len(g) - 1
    inv = pow(g[-1], p - 2, p)
    while len(f) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, a in enumerate(g):
            f[shift + i] = (f[shift + i] - c * a) % p
        _trim(f)
    return f


def _polymulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod(out, f, p)


def _polypowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _polymod(a, f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def _polygcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def is_irreducible(f: list[int], p: int) -> bool:
    """Irreducibility of a polynomial over F_p.

    A degree-D polynomial is reducible iff it has an irreducible factor of
    degree i <= D/2, i.e. iff gcd(f, x^(p^i) - x) is nontrivial for such i.
    """
    D = len(f) - 1
    if D < 1:
        return False
    if D == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(D // 2):
        xp = _polypowmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_polygcd(f, _trim(diff), p)) > 1:
            return False
    return True


def _is_primitive(f: list[int], p: int) -> bool:
    D = len(f) - 1
    order = p**D - 1
    for ell in prime_factors(order):
        if _polypowmod([0, 1], order // ell, f, p) == [1]:
            return False
    return True


def find_modulus(p: int, degree: int, start: int = 0) -> list[int]:
    """First monic primitive polynomial of the given degree in scan order.

    Candidates are the monic polynomials t^D + c_{D-1} t^{D-1} + ... + c_0,
    enumerated by the integer whose base-p digits are c_0, ..., c_{D-1}
    starting from ``start`` and wrapping around.
    """
    total = p**degree
    for k in range(total):
        code = (start + k) % total
        coeffs = [(code // p**i) % p for i in range(degree)] + [1]
        if coeffs[0] == 0 and degree > 1:
            continue
        if is_irreducible(coeffs, p) and _is_primitive(coeffs, p):
            return coeffs
    raise ValueError(f"no primitive polynomial of degree {degree} over F_{p}")


class FieldTower:
    """The universe field U = F_{q^N}, q = p^base_degree, with its subfields.

    Levels are the divisors of N; level m is the fixed field of Frob^m.
    """

    def __init__(self, p: int, base_degree: int = 1, N: int = 1, modulus=None, cap: int = 2**20):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if base_degree < 1 or N < 1:
            raise ValueError("degrees must be positive")
        self.p = p
        self.base_degree = base_degree
        self.N = N
        self.q = p**base_degree
        self.degree = base_degree * N
        self.size = p**self.degree
        if self.size > cap:
            raise CapExceeded(f"universe field has {self.size} elements, cap is {cap}")
        if modulus is None:
            modulus = find_modulus(p, self.degree)
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != self.degree + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {self.degree}")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is not irreducible over F_{p}")
        self.modulus = modulus
        self._build_tables()

    # -- encoding -------------------------------------------------------------
    def coeffs(self, x: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.degree):
            x, c = divmod(x, p)
            out.append(c)
        return out

    def from_coeffs(self, cs) -> int:
        x = 0
        for c in reversed(list(cs)[: self.degree]):
            x = x * self.p + int(c) % self.p
        return x

    def from_int(self, k: int) -> int:
        """Image of the integer k in the prime field."""
        return k % self.p

    def _is_generator(self, cand: int, ells) -> bool:
        cs = _trim(self.coeffs(cand))
        order = self.size - 1
        return all(_polypowmod(cs, order // ell, self.modulus, self.p) != [1] for ell in ells)

    def _build_tables(self) -> None:
        Q, p, D = self.size, self.p, self.degree
        f = self.modulus
        order = Q - 1
        ells = prime_factors(order)
        # prefer t itself (a primitive modulus makes it a generator)
        candidates = ([p] if D >= 2 else []) + list(range(1, Q))
        gen = next(c for c in candidates if self._is_generator(c, ells))
        self.generator = gen
        exp = [0] * order
        log = [-1] * Q
        gcs = _trim(self.coeffs(gen))
        x = [1] + [0] * (D - 1)
        for k in range(order):
            v = self.from_coeffs(x)
            exp[k] = v
            log[v] = k
            if gen == p and D >= 2:
                # multiply by t: shift up and reduce with the monic modulus
                top = x[-1]
                x = [0] + x[:-1]
                if top:
                    x = [(a - top * c) % p for a, c in zip(x, f)]
            else:
                x = _polymulmod(x, gcs, f, p)
                x = x + [0] * (D - len(x))
        if any(log[v] < 0 for v in range(1, Q)):
            raise AssertionError("log table incomplete")
        self._exp = exp
        self._log = log

    # -- arithmetic on ints -------------------------------------------------
    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        out, place = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * place
            place *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        out, place = 0, 1
        while a:
            a, x = divmod(a, p)
            out += ((-x) % p) * place
            place *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.size - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(-self._log[a]) % (self.size - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.size - 1)]

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]

    def sqrt(self, a: int) -> int | None:
        """A square root of ``a`` (the one with even log), or None."""
        if a == 0:
            return 0
        if self.p == 2:
            return self.pow(a, self.size // 2)
        k = self._log[a]
        if k % 2:
            return None
        return self._exp[k // 2]

    def frobenius(self, x: int, times: int = 1) -> int:
        """x ↦ x^(q^times)."""
        if x == 0:
            return 0
        e = pow(self.q, times % self.N, self.size - 1) if self.size > 2 else 1
        return self._exp[(self._log[x] * e) % (self.size - 1)]

    def level_of(self, x: int) -> int:
        for m in divisors(self.N):
            if self.frobenius(x, m) == x:
                return m
        raise AssertionError("frobenius^N is not the identity")

    @property
    def levels(self) -> list[int]:
        return divisors(self.N)

    def fixed_field(self, m: int) -> list[int]:
        """Elements of the level-m subfield F_{q^m}, in increasing encoding."""
        if self.N % m:
            raise ValueError(f"{m} does not divide N = {self.N}")
        Q = self.size
        step = (Q - 1) // (self.q**m - 1)
        return [0] + sorted(self._exp[k] for k in range(0, Q - 1, step))

    def elements(self) -> range:
        return range(self.size)

    def element(self, x) -> "FieldElem":
        if isinstance(x, (list, tuple)):
            x = self.from_coeffs(x)
        return FieldElem(self, int(x))

    def __repr__(self):
        return f"FieldTower(p={self.p}, base_degree={self.base_degree}, N={self.N})"


class FieldElem:
    """A thin operator wrapper around the int encoding."""

    __slots__ = ("tower", "value")

    def __init__(self, tower: FieldTower, value: int):
        self.tower = tower
        self.value = value

    def _wrap(self, v: int) -> "FieldElem":
        return FieldElem(self.tower, v)

    def _other(self, y) -> int:
        if isinstance(y, FieldElem):
            return y.value
        return self.tower.from_int(y)

    def __add__(self, y):
        return self._wrap(self.tower.add(self.value, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return self._wrap(self.tower.sub(self.value, self._other(y)))

    def __rsub__(self, y):
        return self._wrap(self.tower.sub(self._other(y), self.value))

    def __neg__(self):
        return self._wrap(self.tower.neg(self.value))

    def __mul__(self, y):
        return self._wrap(self.tower.mul(self.value, self._other(y)))

    __rmul__ = __mul__

    def __truediv__(self, y):
        return self._wrap(self.tower.mul(self.value, self.tower.inv(self._other(y))))

    def __pow__(self, e: int):
        return self._wrap(self.tower.pow(self.value, e))

    def __eq__(self, y):
        if isinstance(y, FieldElem):
            return self.tower is y.tower and self.value == y.value
        if isinstance(y, int):
            return self.value == self.tower.from_int(y)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    @property
    def coeffs(self) -> list[int]:
        return self.tower.coeffs(self.value)

    def frobenius(self, times: int = 1) -> "FieldElem":
        return self._wrap(self.tower.frobenius(self.value, times))

    @property
    def level(self) -> int:
        return self.tower.level_of(self.value)

    def __repr__(self):
        return f"FieldElem({self.coeffs})"


def frobenius(x: FieldElem, times: int = 1) -> FieldElem:
    return x.frobenius(times)


def level_of(x: FieldElem) -> int:
    return x.level
