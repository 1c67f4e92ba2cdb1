//! Small integer helpers shared across modules.

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

pub fn moebius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: i128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Split n = p^a · m with p ∤ m.
pub fn split_p_part(n: u64, p: u64) -> (u64, u64) {
    let mut pp = 1;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        pp *= p;
    }
    (pp, m)
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Chinese remainder for coprime moduli: x ≡ a mod m, x ≡ b mod n.
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let inv = mod_inverse(m % n, n).expect("coprime moduli");
    let t = ((b as i128 - a as i128).rem_euclid(n as i128) * inv as i128) % n as i128;
    (a as i128 + m as i128 * t) as u64 % (m * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert_eq!(prime_factors(72), vec![2, 3]);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(7), -1);
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(crt(1, 4, 0, 9), 9);
        assert_eq!(split_p_part(36, 3), (9, 4));
        assert_eq!(valuation(-54, 3), Some(3));
    }
}
