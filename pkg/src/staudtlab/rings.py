"""Exact arithmetic for a small tower of concrete unital rings.

Supported kinds: integers mod n, Galois fields GF(p^k) with k <= 4,
rationals, quaternions over a base ring (2 must be a unit there),
full and upper-triangular matrices, dual numbers, and finite direct
sums.  Payloads are canonical hashable values (ints, tuples,
Fractions); all operations are pure and exact, no floating point.

Frozen conventions, relied on by golden tests:
  * GF(p^k) is built modulo the monic irreducible polynomial of degree
    k whose coefficient sequence, read from degree k-1 down to the
    constant term, is lexicographically least.
  * enumerate order: residues ascending; GF elements by the integer
    value of their coefficient vector (constant term least
    significant); composite kinds by the product order of their
    component enumerations, rightmost component varying fastest.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

from gmpy2 import mpq

from .errors import (
    InfiniteRingError,
    NonUnitError,
    RingSemanticError,
    UnsupportedError,
)


def det_mod(rows, p: int) -> int:
    """Determinant of an integer matrix modulo a prime."""
    n = len(rows)
    work = [list(r) for r in rows]
    det = 1
    for col in range(n):
        piv = None
        for r in range(col, n):
            if work[r][col] % p:
                piv = r
                break
        if piv is None:
            return 0
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            det = -det
        det = (det * work[col][col]) % p
        inv = pow(work[col][col], -1, p)
        for r in range(col + 1, n):
            f = (work[r][col] * inv) % p
            if f:
                work[r] = [(x - f * y) % p for x, y in zip(work[r], work[col])]
    return det % p


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Element:
    """A ring element: owning ring plus a canonical payload."""

    __slots__ = ("ring", "value")

    def __init__(self, ring, value):
        self.ring = ring
        self.value = value

    def _coerce(self, other):
        if isinstance(other, Element):
            if other.ring != self.ring:
                raise ValueError("elements belong to different rings")
            return other.value
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Element(self.ring, self.ring.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Element(self.ring, self.ring.sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Element(self.ring, self.ring.sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Element(self.ring, self.ring.mul(self.value, v))

    def __rmul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Element(self.ring, self.ring.mul(v, self.value))

    def __neg__(self):
        return Element(self.ring, self.ring.neg(self.value))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        return Element(self.ring, self.ring.power(self.value, k))

    def inverse(self):
        return Element(self.ring, self.ring.inv(self.value))

    def is_unit(self):
        return self.ring.is_unit(self.value)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int):
            return self.value == self.ring.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.value))

    def __repr__(self):
        return f"<{self.ring.spec_string()}: {self.ring.render(self.value)}>"

    def __str__(self):
        return self.ring.render(self.value)


class Ring:
    """Common behaviour for every ring kind."""

    kind = "abstract"
    commutative = False
    is_division = False

    # -- identity -----------------------------------------------------------

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Ring) and self._key() == other._key()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._key())
            self.__dict__["_hash"] = h
        return h

    def __repr__(self):
        return f"Ring({self.spec_string()})"

    def spec_string(self) -> str:
        raise NotImplementedError

    # -- arithmetic primitives (payload level) ------------------------------

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def power(self, a, k: int):
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def from_int(self, k: int):
        n = self.characteristic
        if n:
            k %= n
        elif k < 0:
            return self.neg(self.from_int(-k))
        result = self.zero
        one = self.one
        if k:
            # binary expansion keeps this cheap for large k
            acc = one
            while k:
                if k & 1:
                    result = self.add(result, acc)
                acc = self.add(acc, acc)
                k >>= 1
        return result

    def from_fraction(self, fr: Fraction):
        raise UnsupportedError(
            f"rational literals are not valid in {self.spec_string()}"
        )

    def canonical(self, raw):
        """Normalize a near-payload into canonical form."""
        raise NotImplementedError

    # -- size and enumeration ------------------------------------------------

    @property
    def cardinality(self):
        """Number of elements, or None when infinite."""
        raise NotImplementedError

    @property
    def characteristic(self) -> int:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.cardinality is not None

    def elements(self):
        """Deterministic, duplicate-free, complete stream of payloads."""
        raise InfiniteRingError(f"{self.spec_string()} is infinite")

    def element_list(self):
        cache = self.__dict__.get("_elements")
        if cache is None:
            cache = tuple(self.elements())
            self.__dict__["_elements"] = cache
        return cache

    def element_index(self, a) -> int:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {e: i for i, e in enumerate(self.element_list())}
            self.__dict__["_index"] = idx
        return idx[a]

    def units(self):
        cache = self.__dict__.get("_units")
        if cache is None:
            cache = tuple(e for e in self.element_list() if self.is_unit(e))
            self.__dict__["_units"] = cache
        return cache

    # -- units ----------------------------------------------------------------

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def _scan_inverse(self, a):
        # generic finite fallback: look for a two-sided partner
        if not self.is_finite:
            raise UnsupportedError(
                f"no unit decision procedure for {self.spec_string()}"
            )
        one = self.one
        for b in self.element_list():
            if self.mul(a, b) == one and self.mul(b, a) == one:
                return b
        return None

    # -- centre ----------------------------------------------------------------

    def central_generators(self):
        """Payloads whose centralizer is the centre (infinite kinds only)."""
        raise UnsupportedError(
            f"no centre procedure for infinite {self.spec_string()}"
        )

    def centre_elements(self):
        if not self.is_finite:
            raise InfiniteRingError(
                f"centre of {self.spec_string()} is not enumerable; "
                "use centre_contains"
            )
        cache = self.__dict__.get("_centre")
        if cache is None:
            elems = self.element_list()
            cache = tuple(
                c
                for c in elems
                if all(self.mul(c, a) == self.mul(a, c) for a in elems)
            )
            self.__dict__["_centre"] = cache
        return cache

    def centre_contains(self, a) -> bool:
        if self.commutative:
            return True
        if self.is_finite:
            return a in set(self.centre_elements())
        return all(
            self.mul(a, g) == self.mul(g, a) for g in self.central_generators()
        )

    # -- index tables -----------------------------------------------------------

    def index_tables(self):
        """(elements, add table, mul table) with entries as indices.

        Built once per ring; intended for exhaustive scans on carriers
        of at most a few hundred elements.
        """
        cache = self.__dict__.get("_tables")
        if cache is None:
            elems = self.element_list()
            index = {e: i for i, e in enumerate(elems)}
            add = [
                [index[self.add(a, b)] for b in elems] for a in elems
            ]
            mul = [
                [index[self.mul(a, b)] for b in elems] for a in elems
            ]
            cache = (elems, add, mul)
            self.__dict__["_tables"] = cache
        return cache

    # -- prime-field structure ----------------------------------------------------

    @property
    def prime_dimension(self):
        """Dimension over the prime field, or None when not applicable."""
        return None

    def flatten(self, a):
        raise UnsupportedError(f"{self.spec_string()} has no prime-field basis")

    def unflatten(self, coords):
        raise UnsupportedError(f"{self.spec_string()} has no prime-field basis")

    # -- literals -----------------------------------------------------------------

    def generator_symbols(self):
        """Names usable as atoms in element expressions over this ring."""
        return {}

    def render(self, a) -> str:
        raise NotImplementedError

    def el(self, raw) -> Element:
        return Element(self, self.canonical(raw))

    def sample(self, rng, bound=10):
        """Random payload for sampled checks; finite rings draw uniformly."""
        if self.is_finite:
            return rng.choice(self.element_list())
        raise UnsupportedError(f"no sampler for {self.spec_string()}")


class ZmodRing(Ring):
    """Integers modulo n, payload the least non-negative residue."""

    kind = "zmod"
    commutative = True

    def __init__(self, n: int):
        if n < 2:
            raise RingSemanticError(f"Z(n) requires n >= 2, got {n}")
        self.n = n
        self.zero = 0
        self.one = 1 % n
        self.is_division = is_prime(n)

    def _key(self):
        return ("zmod", self.n)

    def spec_string(self):
        return f"Z({self.n})"

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def canonical(self, raw):
        return int(raw) % self.n

    @property
    def cardinality(self):
        return self.n

    @property
    def characteristic(self):
        return self.n

    def elements(self):
        return iter(range(self.n))

    def is_unit(self, a):
        return math.gcd(a, self.n) == 1

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitError(self.el(a))
        return pow(a, -1, self.n)

    def render(self, a):
        return str(a)


def _poly_mul_mod(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return out


def _poly_rem(a, m, p):
    # m is monic of degree len(m)-1
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            a[i] = 0
            for j in range(dm):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [c % p for c in a[:dm]]


def _poly_gcd(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]

    def trim(x):
        while x and x[-1] == 0:
            x.pop()
        return x

    a, b = trim(a), trim(b)
    while b:
        inv_lead = pow(b[-1], -1, p)
        monic = [(c * inv_lead) % p for c in b]
        r = a
        while len(r) >= len(monic):
            c = r[-1]
            if c:
                shift = len(r) - len(monic)
                for j in range(len(monic)):
                    r[shift + j] = (r[shift + j] - c * monic[j]) % p
            r.pop()
            r = trim(r)
        a, b = monic, r
    return a


def _poly_is_irreducible(m, p, k):
    # Rabin: x^(p^k) == x mod m, and gcd(x^(p^(k/r)) - x, m) trivial
    # for every prime divisor r of k.
    def xq_pow(e):
        # x^(p^e) mod m by raising to the p-th power e times
        cur = [0, 1]
        for _ in range(e):
            nxt = [1]
            sq = cur
            exp = p
            while exp:
                if exp & 1:
                    nxt = _poly_rem(_poly_mul_mod(nxt, sq, p), m, p)
                sq = _poly_rem(_poly_mul_mod(sq, sq, p), m, p)
                exp >>= 1
            cur = nxt
        return cur

    top = xq_pow(k)
    x = [0, 1, *([0] * (k - 2))] if k >= 2 else [0]
    if [c % p for c in top] != [c % p for c in (x + [0] * (k - len(x)))][:k]:
        return False
    primes = {r for r in range(2, k + 1) if k % r == 0 and is_prime(r)}
    for r in primes:
        sub = xq_pow(k // r)
        diff = [(sub[i] - (1 if i == 1 else 0)) % p for i in range(k)]
        g = _poly_gcd(diff, list(m), p)
        if len(g) > 1:
            return False
    return True


def _least_irreducible(p, k):
    """Monic irreducible of degree k, least by descending-degree coeffs."""
    for high in product(range(p), repeat=k - 1):
        # high = (c_{k-1}, ..., c_1); constant term last
        for c0 in range(p):
            m = [c0, *reversed(high), 1]
            if _poly_is_irreducible(m, p, k):
                return tuple(m)
    raise RingSemanticError(f"no irreducible of degree {k} over GF({p})")


class GFRing(Ring):
    """GF(p^k), elements as coefficient tuples (c0, ..., c_{k-1})."""

    kind = "gf"
    commutative = True
    is_division = True

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise RingSemanticError(f"{p} not prime")
        if not 1 <= k <= 4:
            raise RingSemanticError(f"GF degree must be 1..4, got {k}")
        self.p = p
        self.k = k
        self.q = p**k
        # modulus coefficients c0..c_{k-1} of x^k = -(...), monic part implicit
        self.modulus = _least_irreducible(p, k) if k > 1 else (0, 1)
        self.zero = (0,) * k
        self.one = (1 % p,) + (0,) * (k - 1)

    def _key(self):
        return ("gf", self.p, self.k)

    def spec_string(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return ((a[0] * b[0]) % p,)
        prod_ = _poly_mul_mod(list(a), list(b), p)
        return tuple(_poly_rem(prod_, list(self.modulus[:k]) + [1], p))

    def canonical(self, raw):
        if isinstance(raw, int):
            return (raw % self.p,) + (0,) * (self.k - 1)
        vals = [int(c) % self.p for c in raw]
        if len(vals) > self.k:
            vals = _poly_rem(vals, list(self.modulus[: self.k]) + [1], self.p)
        vals += [0] * (self.k - len(vals))
        return tuple(vals[: self.k])

    @property
    def cardinality(self):
        return self.q

    @property
    def characteristic(self):
        return self.p

    def elements(self):
        p, k = self.p, self.k
        for m in range(self.q):
            digits = []
            v = m
            for _ in range(k):
                digits.append(v % p)
                v //= p
            yield tuple(digits)

    def is_unit(self, a):
        return a != self.zero

    def inv(self, a):
        if a == self.zero:
            raise NonUnitError(self.el(a))
        return self.power(a, self.q - 2)

    def frobenius(self, a, power: int):
        return self.power(a, self.p**power)

    @property
    def prime_dimension(self):
        return self.k

    def flatten(self, a):
        return a

    def unflatten(self, coords):
        return tuple(int(c) % self.p for c in coords)

    def generator_symbols(self):
        if self.k > 1:
            return {"g": (0, 1) + (0,) * (self.k - 2)}
        return {}

    def render(self, a):
        if self.k == 1:
            return str(a[0])
        terms = []
        for d in range(self.k - 1, -1, -1):
            c = a[d]
            if not c:
                continue
            if d == 0:
                terms.append(str(c))
            elif d == 1:
                terms.append("g" if c == 1 else f"{c}*g")
            else:
                terms.append(f"g^{d}" if c == 1 else f"{c}*g^{d}")
        return "+".join(terms) if terms else "0"


class RationalRing(Ring):
    """The rational numbers, exact arbitrary-precision payloads."""

    kind = "rational"
    commutative = True
    is_division = True

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def _key(self):
        return ("rational",)

    def spec_string(self):
        return "Q"

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def canonical(self, raw):
        return mpq(raw)

    def from_int(self, k):
        return mpq(k)

    @property
    def cardinality(self):
        return None

    @property
    def characteristic(self):
        return 0

    def from_fraction(self, fr):
        return mpq(fr.numerator, fr.denominator)

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NonUnitError(self.el(a))
        return 1 / a

    def central_generators(self):
        return ()

    def render(self, a):
        return str(a)

    def sample(self, rng, bound=10):
        return mpq(rng.randint(-bound, bound), rng.randint(1, bound))


class QuatRing(Ring):
    """Quaternions over a base ring in which 2 is a unit.

    Free module with basis 1, i, j, k; i^2 = j^2 = k^2 = -1, ij = k,
    jk = i, ki = j, and the reversed products carry a minus sign.  Over
    a base that is not the rationals this is generally not a division
    ring (over an odd finite field it is isomorphic to the 2x2 matrix
    algebra); it is still a perfectly good ring here.
    """

    kind = "quat"

    def __init__(self, base: Ring):
        two = base.from_int(2)
        if not base.is_unit(two):
            raise RingSemanticError(
                f"quaternions need 2 invertible in the base, not so in "
                f"{base.spec_string()}"
            )
        self.base = base
        self.zero = (base.zero,) * 4
        self.one = (base.one, base.zero, base.zero, base.zero)
        self.is_division = base.kind == "rational"

    def _key(self):
        return ("quat", self.base._key())

    def spec_string(self):
        return f"Quat({self.base.spec_string()})"

    def add(self, a, b):
        add = self.base.add
        return tuple(add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        neg = self.base.neg
        return tuple(neg(x) for x in a)

    def mul(self, a, b):
        B = self.base
        w1, x1, y1, z1 = a
        w2, x2, y2, z2 = b
        m, ad, sb = B.mul, B.add, B.sub
        return (
            sb(sb(sb(m(w1, w2), m(x1, x2)), m(y1, y2)), m(z1, z2)),
            sb(ad(ad(m(w1, x2), m(x1, w2)), m(y1, z2)), m(z1, y2)),
            ad(ad(sb(m(w1, y2), m(x1, z2)), m(y1, w2)), m(z1, x2)),
            ad(sb(ad(m(w1, z2), m(x1, y2)), m(y1, x2)), m(z1, w2)),
        )

    def conj(self, a):
        w, x, y, z = a
        neg = self.base.neg
        return (w, neg(x), neg(y), neg(z))

    def norm(self, a):
        B = self.base
        w, x, y, z = a
        return B.add(
            B.add(B.mul(w, w), B.mul(x, x)), B.add(B.mul(y, y), B.mul(z, z))
        )

    def canonical(self, raw):
        if isinstance(raw, int):
            return self.from_int(raw)
        return tuple(self.base.canonical(c) for c in raw)

    @property
    def cardinality(self):
        c = self.base.cardinality
        return None if c is None else c**4

    @property
    def characteristic(self):
        return self.base.characteristic

    def elements(self):
        base = self.base.element_list()
        return (t for t in product(base, repeat=4))

    def from_fraction(self, fr):
        b = self.base.from_fraction(fr)
        return (b, self.base.zero, self.base.zero, self.base.zero)

    def is_unit(self, a):
        if self.base.commutative:
            return self.base.is_unit(self.norm(a))
        if self.is_finite:
            return self._scan_inverse(a) is not None
        raise UnsupportedError(
            f"no unit decision procedure for {self.spec_string()}"
        )

    def inv(self, a):
        if self.base.commutative:
            n = self.norm(a)
            if not self.base.is_unit(n):
                raise NonUnitError(self.el(a))
            ninv = self.base.inv(n)
            c = self.conj(a)
            return tuple(self.base.mul(x, ninv) for x in c)
        b = self._scan_inverse(a)
        if b is None:
            raise NonUnitError(self.el(a))
        return b

    def central_generators(self):
        z, o = self.base.zero, self.base.one
        gens = [(z, o, z, z), (z, z, o, z)]
        for g in self.base.central_generators():
            gens.append((g, z, z, z))
        return tuple(gens)

    @property
    def prime_dimension(self):
        d = self.base.prime_dimension
        return None if d is None else 4 * d

    def flatten(self, a):
        out = []
        for c in a:
            out.extend(self.base.flatten(c))
        return tuple(out)

    def unflatten(self, coords):
        d = self.base.prime_dimension
        return tuple(
            self.base.unflatten(coords[i * d : (i + 1) * d]) for i in range(4)
        )

    def generator_symbols(self):
        z, o = self.base.zero, self.base.one
        return {
            "i": (z, o, z, z),
            "j": (z, z, o, z),
            "k": (z, z, z, o),
        }

    def render(self, a):
        B = self.base
        parts = []
        for coeff, sym in zip(a, ("", "i", "j", "k")):
            if coeff == B.zero:
                continue
            txt = B.render(coeff)
            if sym:
                if coeff == B.one:
                    txt = sym
                elif txt.startswith("-") and B.neg(coeff) == B.one:
                    txt = f"-{sym}"
                else:
                    txt = f"{txt}*{sym}" if _atomic(txt) else f"({txt})*{sym}"
            parts.append(txt)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def sample(self, rng, bound=10):
        if self.is_finite:
            return rng.choice(self.element_list())
        return tuple(self.base.sample(rng, bound) for _ in range(4))


def _atomic(txt: str) -> bool:
    # safe to use as a factor without parentheses
    return not any(c in txt for c in "+*^") or (
        txt.startswith("-") and not any(c in txt[1:] for c in "+-*^")
    )


class _MatrixOps:
    """Shared matrix machinery for full and triangular kinds."""

    def add(self, a, b):
        add = self.base.add
        return tuple(
            tuple(add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
        )

    def neg(self, a):
        neg = self.base.neg
        return tuple(tuple(neg(x) for x in row) for row in a)

    def mul(self, a, b):
        B = self.base
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = B.zero
                for t in range(n):
                    acc = B.add(acc, B.mul(a[i][t], b[t][j]))
                row.append(acc)
            rows.append(tuple(row))
        return tuple(rows)

    def det(self, a):
        # commutative base only, n <= 3
        B = self.base
        n = self.n
        if n == 1:
            return a[0][0]
        if n == 2:
            return B.sub(B.mul(a[0][0], a[1][1]), B.mul(a[0][1], a[1][0]))
        m = B.mul
        t1 = m(a[0][0], B.sub(m(a[1][1], a[2][2]), m(a[1][2], a[2][1])))
        t2 = m(a[0][1], B.sub(m(a[1][0], a[2][2]), m(a[1][2], a[2][0])))
        t3 = m(a[0][2], B.sub(m(a[1][0], a[2][1]), m(a[1][1], a[2][0])))
        return B.add(B.sub(t1, t2), t3)

    def _adjugate(self, a):
        B = self.base
        n = self.n
        if n == 1:
            return ((B.one,),)
        if n == 2:
            return (
                (a[1][1], B.neg(a[0][1])),
                (B.neg(a[1][0]), a[0][0]),
            )
        m, s = B.mul, B.sub

        def cof(i, j):
            rs = [r for r in range(3) if r != i]
            cs = [c for c in range(3) if c != j]
            minor = s(
                m(a[rs[0]][cs[0]], a[rs[1]][cs[1]]),
                m(a[rs[0]][cs[1]], a[rs[1]][cs[0]]),
            )
            return minor if (i + j) % 2 == 0 else B.neg(minor)

        return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))

    def _row_map_bijective(self, a):
        # invertibility as bijectivity of v -> v.a on the row module
        seen = set()
        B = self.base
        n = self.n
        for v in product(B.element_list(), repeat=n):
            img = tuple(
                _dot_row(B, v, a, j) for j in range(n)
            )
            if img in seen:
                return False
            seen.add(img)
        return True

    def _division_inverse(self, a):
        # Gauss-Jordan over a division base, rows scaled from the left
        B = self.base
        n = self.n
        work = [list(row) for row in a]
        inv_rows = [
            [B.one if i == j else B.zero for j in range(n)] for i in range(n)
        ]
        for col in range(n):
            piv = None
            for r in range(col, n):
                if B.is_unit(work[r][col]):
                    piv = r
                    break
            if piv is None:
                return None
            work[col], work[piv] = work[piv], work[col]
            inv_rows[col], inv_rows[piv] = inv_rows[piv], inv_rows[col]
            pinv = B.inv(work[col][col])
            work[col] = [B.mul(pinv, x) for x in work[col]]
            inv_rows[col] = [B.mul(pinv, x) for x in inv_rows[col]]
            for r in range(n):
                if r == col:
                    continue
                f = work[r][col]
                if f == B.zero:
                    continue
                work[r] = [
                    B.sub(x, B.mul(f, y)) for x, y in zip(work[r], work[col])
                ]
                inv_rows[r] = [
                    B.sub(x, B.mul(f, y))
                    for x, y in zip(inv_rows[r], inv_rows[col])
                ]
        return tuple(tuple(row) for row in inv_rows)

    def canonical(self, raw):
        if isinstance(raw, int):
            return self.from_int(raw)
        return tuple(
            tuple(self.base.canonical(x) for x in row) for row in raw
        )

    @property
    def characteristic(self):
        return self.base.characteristic

    def from_fraction(self, fr):
        b = self.base.from_fraction(fr)
        z = self.base.zero
        return tuple(
            tuple(b if i == j else z for j in range(self.n))
            for i in range(self.n)
        )

    def render(self, a):
        rows = [
            "[" + ",".join(self.base.render(x) for x in row) + "]" for row in a
        ]
        return "[" + ",".join(rows) + "]"

    def flatten(self, a):
        out = []
        for i, j in self._free_positions():
            out.extend(self.base.flatten(a[i][j]))
        return tuple(out)

    def unflatten(self, coords):
        d = self.base.prime_dimension
        z = self.base.zero
        rows = [[z] * self.n for _ in range(self.n)]
        for t, (i, j) in enumerate(self._free_positions()):
            rows[i][j] = self.base.unflatten(coords[t * d : (t + 1) * d])
        return tuple(tuple(row) for row in rows)


def _dot_row(B, v, a, j):
    acc = B.zero
    for t in range(len(v)):
        acc = B.add(acc, B.mul(v[t], a[t][j]))
    return acc


class MatRing(_MatrixOps, Ring):
    """Full n x n matrices over a base ring, n <= 3."""

    kind = "mat"

    def __init__(self, n: int, base: Ring):
        if not 1 <= n <= 3:
            raise RingSemanticError(f"matrix size must be 1..3, got {n}")
        self.n = n
        self.base = base
        z, o = base.zero, base.one
        self.zero = tuple(tuple(z for _ in range(n)) for _ in range(n))
        self.one = tuple(
            tuple(o if i == j else z for j in range(n)) for i in range(n)
        )
        self.commutative = n == 1 and base.commutative
        self.is_division = n == 1 and base.is_division

    def _key(self):
        return ("mat", self.n, self.base._key())

    def spec_string(self):
        return f"M({self.n},{self.base.spec_string()})"

    @property
    def cardinality(self):
        c = self.base.cardinality
        return None if c is None else c ** (self.n * self.n)

    def elements(self):
        base = self.base.element_list()
        n = self.n
        for flat in product(base, repeat=n * n):
            yield tuple(flat[i * n : (i + 1) * n] for i in range(n))

    def _free_positions(self):
        return [(i, j) for i in range(self.n) for j in range(self.n)]

    @property
    def prime_dimension(self):
        d = self.base.prime_dimension
        return None if d is None else self.n * self.n * d

    def is_unit(self, a):
        B = self.base
        if B.commutative:
            return B.is_unit(self.det(a))
        if B.is_division:
            return self._division_inverse(a) is not None
        if B.is_finite:
            return self._row_map_bijective(a)
        raise UnsupportedError(
            f"no unit decision procedure for {self.spec_string()}"
        )

    def inv(self, a):
        B = self.base
        if B.commutative:
            d = self.det(a)
            if not B.is_unit(d):
                raise NonUnitError(self.el(a))
            dinv = B.inv(d)
            adj = self._adjugate(a)
            return tuple(
                tuple(B.mul(x, dinv) for x in row) for row in adj
            )
        if B.is_division:
            out = self._division_inverse(a)
            if out is None:
                raise NonUnitError(self.el(a))
            return out
        if B.is_finite:
            out = self._scan_inverse(a)
            if out is None:
                raise NonUnitError(self.el(a))
            return out
        raise UnsupportedError(
            f"no inverse procedure for {self.spec_string()}"
        )

    def matrix_unit(self, i, j):
        """e_ij with 1-based indices."""
        z, o = self.base.zero, self.base.one
        return tuple(
            tuple(
                o if (r, c) == (i - 1, j - 1) else z for c in range(self.n)
            )
            for r in range(self.n)
        )

    def central_generators(self):
        gens = [
            self.matrix_unit(i + 1, j + 1)
            for i in range(self.n)
            for j in range(self.n)
        ]
        z = self.base.zero
        for g in self.base.central_generators():
            gens.append(
                tuple(
                    tuple(g if i == j else z for j in range(self.n))
                    for i in range(self.n)
                )
            )
        return tuple(gens)


class TriRing(_MatrixOps, Ring):
    """Upper triangular r x r matrices, r in {2, 3}."""

    kind = "tri"

    def __init__(self, r: int, base: Ring):
        if not 2 <= r <= 3:
            raise RingSemanticError(f"triangular size must be 2..3, got {r}")
        self.n = r
        self.base = base
        z, o = base.zero, base.one
        self.zero = tuple(tuple(z for _ in range(r)) for _ in range(r))
        self.one = tuple(
            tuple(o if i == j else z for j in range(r)) for i in range(r)
        )
        self.commutative = False
        self.is_division = False

    def _key(self):
        return ("tri", self.n, self.base._key())

    def spec_string(self):
        return f"T({self.n},{self.base.spec_string()})"

    @property
    def cardinality(self):
        c = self.base.cardinality
        if c is None:
            return None
        return c ** (self.n * (self.n + 1) // 2)

    def elements(self):
        base = self.base.element_list()
        n = self.n
        free = self._free_positions()
        z = self.base.zero
        for vals in product(base, repeat=len(free)):
            rows = [[z] * n for _ in range(n)]
            for v, (i, j) in zip(vals, free):
                rows[i][j] = v
            yield tuple(tuple(row) for row in rows)

    def _free_positions(self):
        return [(i, j) for i in range(self.n) for j in range(i, self.n)]

    @property
    def prime_dimension(self):
        d = self.base.prime_dimension
        if d is None:
            return None
        return self.n * (self.n + 1) // 2 * d

    def canonical(self, raw):
        out = _MatrixOps.canonical(self, raw)
        z = self.base.zero
        for i in range(self.n):
            for j in range(i):
                if out[i][j] != z:
                    raise RingSemanticError(
                        "triangular element has a nonzero entry below the "
                        "diagonal"
                    )
        return out

    def is_unit(self, a):
        # invertible iff every diagonal entry is, over any base
        return all(self.base.is_unit(a[i][i]) for i in range(self.n))

    def inv(self, a):
        B = self.base
        n = self.n
        if not self.is_unit(a):
            raise NonUnitError(self.el(a))
        dinv = [B.inv(a[i][i]) for i in range(n)]
        out = [[B.zero] * n for _ in range(n)]
        for i in range(n):
            out[i][i] = dinv[i]
        # back substitution on the strictly upper entries
        for span in range(1, n):
            for i in range(n - span):
                j = i + span
                acc = B.zero
                for t in range(i + 1, j + 1):
                    acc = B.add(acc, B.mul(a[i][t], out[t][j]))
                out[i][j] = B.neg(B.mul(dinv[i], acc))
        return tuple(tuple(row) for row in out)

    def matrix_unit(self, i, j):
        if j < i:
            raise RingSemanticError("below-diagonal unit in triangular ring")
        z, o = self.base.zero, self.base.one
        return tuple(
            tuple(
                o if (r, c) == (i - 1, j - 1) else z for c in range(self.n)
            )
            for r in range(self.n)
        )

    def central_generators(self):
        gens = [
            self.matrix_unit(i + 1, j + 1)
            for i in range(self.n)
            for j in range(i, self.n)
        ]
        z = self.base.zero
        for g in self.base.central_generators():
            gens.append(
                tuple(
                    tuple(g if i == j else z for j in range(self.n))
                    for i in range(self.n)
                )
            )
        return tuple(gens)


class DualRing(Ring):
    """Dual numbers a + b*eps with eps^2 = 0 over a base ring."""

    kind = "dual"

    def __init__(self, base: Ring):
        self.base = base
        self.zero = (base.zero, base.zero)
        self.one = (base.one, base.zero)
        self.commutative = base.commutative
        self.is_division = False

    def _key(self):
        return ("dual", self.base._key())

    def spec_string(self):
        return f"Dual({self.base.spec_string()})"

    def add(self, a, b):
        return (self.base.add(a[0], b[0]), self.base.add(a[1], b[1]))

    def neg(self, a):
        return (self.base.neg(a[0]), self.base.neg(a[1]))

    def mul(self, a, b):
        B = self.base
        return (
            B.mul(a[0], b[0]),
            B.add(B.mul(a[0], b[1]), B.mul(a[1], b[0])),
        )

    def canonical(self, raw):
        if isinstance(raw, int):
            return self.from_int(raw)
        return (self.base.canonical(raw[0]), self.base.canonical(raw[1]))

    @property
    def cardinality(self):
        c = self.base.cardinality
        return None if c is None else c * c

    @property
    def characteristic(self):
        return self.base.characteristic

    def elements(self):
        base = self.base.element_list()
        return (t for t in product(base, repeat=2))

    def from_fraction(self, fr):
        return (self.base.from_fraction(fr), self.base.zero)

    def is_unit(self, a):
        return self.base.is_unit(a[0])

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitError(self.el(a))
        ia = self.base.inv(a[0])
        return (ia, self.base.neg(self.base.mul(self.base.mul(ia, a[1]), ia)))

    def central_generators(self):
        gens = [(self.base.zero, self.base.one)]
        for g in self.base.central_generators():
            gens.append((g, self.base.zero))
        return tuple(gens)

    @property
    def prime_dimension(self):
        d = self.base.prime_dimension
        return None if d is None else 2 * d

    def flatten(self, a):
        return tuple(self.base.flatten(a[0])) + tuple(self.base.flatten(a[1]))

    def unflatten(self, coords):
        d = self.base.prime_dimension
        return (self.base.unflatten(coords[:d]), self.base.unflatten(coords[d:]))

    def generator_symbols(self):
        return {"eps": (self.base.zero, self.base.one)}

    def render(self, a):
        B = self.base
        re, ep = a
        if ep == B.zero:
            return B.render(re)
        if ep == B.one:
            etxt = "eps"
        else:
            body = B.render(ep)
            etxt = f"{body}*eps" if _atomic(body) else f"({body})*eps"
        if re == B.zero:
            return etxt
        return (
            B.render(re) + etxt
            if etxt.startswith("-")
            else B.render(re) + "+" + etxt
        )

    def sample(self, rng, bound=10):
        if self.is_finite:
            return rng.choice(self.element_list())
        return (self.base.sample(rng, bound), self.base.sample(rng, bound))


class SumRing(Ring):
    """Finite direct sum of rings, componentwise operations."""

    kind = "sum"

    def __init__(self, parts):
        parts = tuple(parts)
        if len(parts) < 2:
            raise RingSemanticError("Sum needs at least two parts")
        self.parts = parts
        self.zero = tuple(p.zero for p in parts)
        self.one = tuple(p.one for p in parts)
        self.commutative = all(p.commutative for p in parts)
        self.is_division = False

    def _key(self):
        return ("sum", tuple(p._key() for p in self.parts))

    def spec_string(self):
        return "Sum(" + ",".join(p.spec_string() for p in self.parts) + ")"

    def add(self, a, b):
        return tuple(p.add(x, y) for p, x, y in zip(self.parts, a, b))

    def neg(self, a):
        return tuple(p.neg(x) for p, x in zip(self.parts, a))

    def mul(self, a, b):
        return tuple(p.mul(x, y) for p, x, y in zip(self.parts, a, b))

    def canonical(self, raw):
        if isinstance(raw, int):
            return self.from_int(raw)
        if len(raw) != len(self.parts):
            raise RingSemanticError("component count mismatch")
        return tuple(p.canonical(x) for p, x in zip(self.parts, raw))

    @property
    def cardinality(self):
        total = 1
        for p in self.parts:
            c = p.cardinality
            if c is None:
                return None
            total *= c
        return total

    @property
    def characteristic(self):
        chars = [p.characteristic for p in self.parts]
        if any(c == 0 for c in chars):
            return 0
        return math.lcm(*chars)

    def elements(self):
        lists = [p.element_list() for p in self.parts]
        return (t for t in product(*lists))

    def is_unit(self, a):
        return all(p.is_unit(x) for p, x in zip(self.parts, a))

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitError(self.el(a))
        return tuple(p.inv(x) for p, x in zip(self.parts, a))

    def centre_contains(self, a):
        return all(
            p.centre_contains(x) for p, x in zip(self.parts, a)
        )

    @property
    def prime_dimension(self):
        dims = [p.prime_dimension for p in self.parts]
        if any(d is None for d in dims):
            return None
        chars = {p.characteristic for p in self.parts}
        if len(chars) != 1:
            return None
        return sum(dims)

    def flatten(self, a):
        out = []
        for p, x in zip(self.parts, a):
            out.extend(p.flatten(x))
        return tuple(out)

    def unflatten(self, coords):
        out = []
        pos = 0
        for p in self.parts:
            d = p.prime_dimension
            out.append(p.unflatten(coords[pos : pos + d]))
            pos += d
        return tuple(out)

    def render(self, a):
        return "(" + ",".join(
            p.render(x) for p, x in zip(self.parts, a)
        ) + ")"

    def sample(self, rng, bound=10):
        return tuple(p.sample(rng, bound) for p in self.parts)


# module-level convenience constructors mirroring the grammar

def Zmod(n):
    return ZmodRing(n)


def GF(p, k=1):
    return GFRing(p, k)


def Rational():
    return RationalRing()


def Quat(base):
    return QuatRing(base)


def Mat(n, base):
    return MatRing(n, base)


def Tri(r, base):
    return TriRing(r, base)


def Dual(base):
    return DualRing(base)


def Sum(*parts):
    return SumRing(parts)
