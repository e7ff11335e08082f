//! Small integer helpers shared by the form and lattice code.

use num_integer::Integer;

pub(crate) fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

/// Returns `(g, u, v, w)` with `u*a + v*b + w*c = g = gcd(a, b, c)`.
pub(crate) fn ext_gcd3(a: i128, b: i128, c: i128) -> (i128, i128, i128, i128) {
    let e1 = a.extended_gcd(&b);
    let e2 = e1.gcd.extended_gcd(&c);
    (e2.gcd, e2.x * e1.x, e2.x * e1.y, e2.y)
}

pub(crate) fn is_squarefree(n: i64) -> bool {
    let mut n = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Negative discriminant test: `d < 0` and `d ≡ 0, 1 (mod 4)`.
pub(crate) fn is_discriminant(d: i64) -> bool {
    d < 0 && matches!(d.rem_euclid(4), 0 | 1)
}

pub(crate) fn is_fundamental(d: i64) -> bool {
    if !is_discriminant(d) {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return is_squarefree(d);
    }
    let m = d / 4;
    matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
}

/// Positive divisors of `n > 0` in increasing order.
pub(crate) fn divisors(n: i64) -> Vec<i64> {
    debug_assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn to_i64(x: i128, what: &'static str) -> crate::Result<i64> {
    i64::try_from(x).map_err(|_| crate::Error::Overflow(what))
}
