//! Small-integer number theory shared by the finite and analytic layers.

use num_integer::Integer;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a*x + b*y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Least non-negative residue of `a` modulo `m`.
pub fn modp(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n > 2 && is_prime(n)
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| is_p.then_some(k as u64))
        .collect()
}

/// Legendre symbol (a | p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = modp(a, p);
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (d | n) for n > 0.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut result = 1i32;
    for (q, e) in factorize(n) {
        let s = if q == 2 {
            if d % 2 == 0 {
                0
            } else if matches!(d.rem_euclid(8), 1 | 7) {
                1
            } else {
                -1
            }
        } else {
            legendre(d, q)
        };
        result *= s.pow(e);
    }
    result
}

pub fn is_square_mod(a: u64, p: u64) -> bool {
    a % p == 0 || mod_pow(a, (p - 1) / 2, p) == 1
}

/// Smallest square root of `a` modulo the odd prime `p`, if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (0..p).find(|&x| x * x % p == a)
}

/// Smallest positive non-square modulo the odd prime `p`.
pub fn smallest_nonsquare(p: u64) -> u64 {
    (2..p)
        .find(|&e| !is_square_mod(e, p))
        .expect("odd prime has a non-square")
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Fundamental discriminant test for negative `d`.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Number of divisors of n.
pub fn sigma0(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Chinese remainder for coprime moduli, returning the residue modulo the product.
pub fn crt(r1: i128, m1: i128, r2: i128, m2: i128) -> i128 {
    let (g, x, _) = ext_gcd(m1, m2);
    debug_assert_eq!(g, 1);
    let m = m1 * m2;
    let t = ((r2 - r1).rem_euclid(m2) * x.rem_euclid(m2)).rem_euclid(m2);
    (r1 + m1 * t).rem_euclid(m)
}

/// Exponent of the prime `q` in `n`.
pub fn valuation(mut n: i128, q: i128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}
