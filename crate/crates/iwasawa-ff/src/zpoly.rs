//! Dense polynomials over Z (ascending coefficients), trimmed of trailing zeros.

pub(crate) fn trim(mut a: Vec<i128>) -> Vec<i128> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Exact quotient a/b when b(0) = ±1, or None if b ∤ a.
pub(crate) fn div_exact(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    let b0 = *b.first()?;
    if b0.abs() != 1 {
        return None;
    }
    if a.is_empty() {
        return Some(vec![]);
    }
    if a.len() < b.len() {
        return None;
    }
    let mut rem = a.clone();
    let mut quo = vec![0i128; a.len() - b.len() + 1];
    for i in 0..quo.len() {
        let c = rem[i] * b0;
        quo[i] = c;
        for (j, &y) in b.iter().enumerate() {
            rem[i + j] -= c * y;
        }
    }
    trim(rem).is_empty().then(|| trim(quo))
}

/// 1 − c·u^d.
pub(crate) fn one_minus_monomial(c: i128, d: usize) -> Vec<i128> {
    let mut v = vec![0i128; d + 1];
    v[0] = 1;
    v[d] -= c;
    trim(v)
}
