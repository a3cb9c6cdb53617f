"""numba kernels for point counting over F_p.

Arithmetic is int64 throughout; p must stay below 2**31 so that products
of residues fit.
"""
import numpy as np
from numba import njit

P_LIMIT = 1 << 31

# status codes returned alongside counts
OK = 0
NO_MULTIPLE = 1
NOT_UNIQUE = 2


@njit(cache=True)
def powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(cache=True)
def invmod(a, m):
    a %= m
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s0 < 0:
        s0 += m
    return s0


@njit(cache=True)
def isqrt(n):
    r = np.int64(np.sqrt(np.float64(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if powmod(a, (p - 1) // 2, p) == 1 else -1


@njit(cache=True)
def sqrtmod(a, p):
    """Tonelli-Shanks; `a` must be a nonzero square mod odd p."""
    a %= p
    if p % 4 == 3:
        return powmod(a, (p + 1) // 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m = s
    c = powmod(z, q, p)
    t = powmod(a, q, p)
    r = powmod(a, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = b * b % p
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


# ---------------------------------------------------------------- counting


@njit(cache=True)
def count_naive(a1, a2, a3, a4, a6, p):
    """#E(F_p) by enumerating every (x, y) in F_p^2 on the long form."""
    total = 1
    for x in range(p):
        b = (a1 * x + a3) % p
        rhs = (((x + a2) * x + a4) % p * x + a6) % p
        # v(y) = y^2 + b y - rhs, stepped incrementally in y
        v = (p - rhs) % p
        d = (1 + b) % p
        for y in range(p):
            if v == 0:
                total += 1
            v += d
            if v >= p:
                v -= p
            d += 2
            if d >= p:
                d -= p
    return total


@njit(cache=True)
def count_charsum(A, B, p):
    """p + 1 + sum over x of the quadratic character of x^3 + Ax + B."""
    chi = np.full(p, -1, dtype=np.int8)
    chi[0] = 0
    for y in range(1, (p + 1) // 2):
        chi[y * y % p] = 1
    total = p + 1
    for x in range(p):
        total += chi[((x * x % p + A) * x + B) % p]
    return total


# ------------------------------------------------------ short-form group law
# Points are (x, y, inf) with inf = 1 for the point at infinity.


@njit(cache=True)
def ec_add(x1, y1, i1, x2, y2, i2, A, p):
    if i1:
        return x2, y2, i2
    if i2:
        return x1, y1, i1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return 0, 0, 1
        lam = (3 * x1 % p * x1 + A) % p * invmod(2 * y1, p) % p
    else:
        lam = (y2 - y1) % p * invmod((x2 - x1) % p, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * ((x1 - x3) % p) - y1) % p
    return x3, y3, 0


@njit(cache=True)
def ec_mul(k, x, y, inf, A, p):
    rx, ry, ri = 0, 0, 1
    if k < 0:
        k = -k
        y = (p - y) % p
    while k > 0:
        if k & 1:
            rx, ry, ri = ec_add(rx, ry, ri, x, y, inf, A, p)
        x, y, inf = ec_add(x, y, inf, x, y, inf, A, p)
        k >>= 1
    return rx, ry, ri


@njit(cache=True)
def random_point(A, B, p):
    while True:
        x = np.random.randint(0, p)
        r = ((x * x % p + A) * x + B) % p
        if r == 0:
            return x, 0
        if legendre(r, p) == 1:
            y = sqrtmod(r, p)
            if np.random.randint(0, 2) == 1:
                y = (p - y) % p
            return x, y


@njit(cache=True)
def find_multiple(x, y, A, p, lo, width):
    """Some M > 0 with M*P = O, searching M in [lo, lo + width] by BSGS.

    Returns 0 if none is found (which would contradict the Hasse bound).
    """
    m = isqrt(width) + 1
    bx = np.empty(m, dtype=np.int64)
    by = np.empty(m, dtype=np.int64)
    cx, cy, ci = 0, 0, 1
    for j in range(1, m + 1):
        cx, cy, ci = ec_add(cx, cy, ci, x, y, 0, A, p)
        if ci:
            return j  # order of P is at most m
        bx[j - 1] = cx
        by[j - 1] = cy
    order = np.argsort(bx)
    keys = bx[order]
    sx, sy, si = cx, cy, ci  # m*P
    tx, ty, ti = ec_mul(lo, x, y, 0, A, p)
    steps = width // m + 2
    for i in range(steps):
        base = lo + i * m
        if ti:
            return base
        pos = np.searchsorted(keys, tx)
        while pos < m and keys[pos] == tx:
            j = order[pos] + 1
            if by[order[pos]] == ty:
                return base - j
            return base + j
        tx, ty, ti = ec_add(tx, ty, ti, sx, sy, si, A, p)
    return 0


@njit(cache=True)
def trial_factor(n):
    fs = np.empty(64, dtype=np.int64)
    k = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            fs[k] = d
            k += 1
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fs[k] = n
        k += 1
    return fs[:k]


@njit(cache=True)
def point_order(x, y, A, p, multiple):
    n = multiple
    for q in trial_factor(multiple):
        while n % q == 0:
            _, _, inf = ec_mul(n // q, x, y, 0, A, p)
            if not inf:
                break
            n //= q
    return n


@njit(cache=True)
def gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def count_bsgs(A, B, p, seed, max_rounds):
    """#E(F_p) via BSGS on E and its quadratic twist (Mestre).

    Returns (count, status).  Randomness only affects running time.
    """
    np.random.seed(seed)
    h = isqrt(4 * p)
    lo = p + 1 - h
    hi = p + 1 + h
    d = 2
    while legendre(d, p) != -1:
        d += 1
    d2 = d * d % p
    At = A * d2 % p
    Bt = B * (d2 * d % p) % p
    l1 = 1  # lcm of point orders on E
    l2 = 1  # lcm of point orders on the twist
    for rnd in range(max_rounds):
        if rnd % 2 == 0:
            cA, cB = A, B
        else:
            cA, cB = At, Bt
        x, y = random_point(cA, cB, p)
        if y == 0:
            n = 2
        else:
            mult = find_multiple(x, y, cA, p, lo, 2 * h)
            if mult == 0:
                return 0, NO_MULTIPLE
            n = point_order(x, y, cA, p, mult)
        if rnd % 2 == 0:
            l1 = l1 // gcd(l1, n) * n
        else:
            l2 = l2 // gcd(l2, n) * n
        # candidates N with l1 | N and l2 | (2p + 2 - N)
        found = 0
        count = 0
        start = (lo + l1 - 1) // l1 * l1
        for N in range(start, hi + 1, l1):
            if (2 * p + 2 - N) % l2 == 0:
                found += 1
                count = N
                if found > 1:
                    break
        if found == 0:
            return 0, NO_MULTIPLE
        if found == 1:
            return count, OK
    return 0, NOT_UNIQUE


@njit(cache=True, nogil=True)
def count_batch(primes, bad, A, B, a1, a2, a3, a4, a6,
                naive_max, charsum_max, seed_base, max_rounds, out, status):
    """Fill out[i] with #E(F_p) for each good prime (0 for bad ones)."""
    for i in range(primes.size):
        p = primes[i]
        if bad[i]:
            out[i] = 0
            status[i] = OK
            continue
        if p <= naive_max or p <= 3:
            out[i] = count_naive(a1[i], a2[i], a3[i], a4[i], a6[i], p)
            status[i] = OK
        elif p <= charsum_max:
            out[i] = count_charsum(A[i], B[i], p)
            status[i] = OK
        else:
            seed = (seed_base ^ (p * 2654435761)) & 0xFFFFFFFF
            c, st = count_bsgs(A[i], B[i], p, seed, max_rounds)
            out[i] = c
            status[i] = st
