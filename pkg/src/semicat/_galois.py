"""Finite field arithmetic tables for small prime powers.

Elements of GF(p^k) are encoded as integers 0..q-1 via base-p digits of the
polynomial representative: index = sum(c_i * p**i) with c_0 the constant term.
Index 0 is the additive zero and index 1 the multiplicative one.  The modulus
polynomial is the lexicographically first monic irreducible of degree k, so
the tables are reproducible.
"""

from .errors import UnsupportedCarrier


def factor_prime_power(q):
    """Return (p, k) with q == p**k, or raise if q is not a prime power."""
    if q < 2:
        raise UnsupportedCarrier(f"{q} is not a prime power")
    p = None
    for d in range(2, q + 1):
        if q % d == 0:
            p = d
            break
    k = 0
    n = q
    while n % p == 0:
        n //= p
        k += 1
    if n != 1:
        raise UnsupportedCarrier(f"{q} is not a prime power")
    return p, k


def _digits(index, p, k):
    out = []
    for _ in range(k):
        out.append(index % p)
        index //= p
    return tuple(out)


def _index(digits, p):
    out = 0
    for c in reversed(digits):
        out = out * p + c
    return out


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return out


def _poly_mod(a, m, p):
    # m monic; reduce a modulo m in F_p[x]
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, c in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    while len(a) < dm:
        a.append(0)
    return a


def _is_irreducible(poly, p):
    # poly monic of degree k >= 1; trial division by monic polys of degree <= k//2
    k = len(poly) - 1
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for idx in range(p ** deg):
            divisor = list(_digits(idx, p, deg)) + [1]
            if not any(_poly_mod(poly, divisor, p)):
                return False
    return True


def _first_irreducible(p, k):
    for idx in range(p ** k):
        poly = list(_digits(idx, p, k)) + [1]
        if _is_irreducible(poly, p):
            return poly
    raise UnsupportedCarrier(f"no irreducible polynomial of degree {k} over F_{p}")


def gf_tables(q):
    """Dense add/mul index tables for GF(q); returns (add, mul, p, k)."""
    p, k = factor_prime_power(q)
    if k == 1:
        add = [[(a + b) % p for b in range(p)] for a in range(p)]
        mul = [[(a * b) % p for b in range(p)] for a in range(p)]
        return add, mul, p, k
    modulus = _first_irreducible(p, k)
    add = [[0] * q for _ in range(q)]
    mul = [[0] * q for _ in range(q)]
    for a in range(q):
        da = _digits(a, p, k)
        for b in range(q):
            db = _digits(b, p, k)
            add[a][b] = _index(tuple((x + y) % p for x, y in zip(da, db)), p)
            prod = _poly_mod(_poly_mul(list(da), list(db), p), modulus, p)
            mul[a][b] = _index(tuple(prod), p)
    return add, mul, p, k
