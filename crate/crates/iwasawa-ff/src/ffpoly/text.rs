use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numtheory::is_prime;

use super::field::{Fq, FqField};
use super::poly::FqPoly;

/// Parse `p^e` (or a bare prime power such as `9`) into (p, e).
pub fn parse_q(s: &str) -> Result<(u32, u32)> {
    let s = s.trim();
    if let Some((p, e)) = s.split_once('^') {
        let p: u32 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime in q = {s}")))?;
        let e: u32 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in q = {s}")))?;
        if !is_prime(p as u64) || e == 0 {
            return Err(Error::Parse(format!("q = {s} is not a prime power")));
        }
        return Ok((p, e));
    }
    let q: u64 = s.parse().map_err(|_| Error::Parse(format!("bad q: {s}")))?;
    for p in 2..=q {
        if q % p == 0 {
            let mut e = 0;
            let mut r = q;
            while r % p == 0 {
                r /= p;
                e += 1;
            }
            if r == 1 && is_prime(p) {
                return Ok((p as u32, e));
            }
            break;
        }
    }
    Err(Error::Parse(format!("q = {s} is not a prime power")))
}

/// Parse a polynomial in θ.
///
/// Accepted forms: the canonical `[c0,c1,...]@q=p^e`, a bare list `[c0,c1,...]`,
/// or a sum of terms such as `1+0x+1x^2`, `theta^2+theta+1`, `2*t^3 + 1`.
/// The variable may be written `x`, `t`, `theta` or `θ`; coefficients are
/// element codes in `0..q` and a leading `-` negates a term.
pub fn parse_poly(field: &Arc<FqField>, s: &str) -> Result<FqPoly> {
    let s = s.trim();
    if s.starts_with('[') {
        let (list, tag) = match s.split_once("]@q=") {
            Some((l, t)) => (l.trim_start_matches('['), Some(t)),
            None => (s.trim_start_matches('[').trim_end_matches(']'), None),
        };
        if let Some(tag) = tag {
            if tag.trim() != field.tag() {
                return Err(Error::FieldMismatch(tag.trim().to_string(), field.tag()));
            }
        }
        let codes = list
            .split(',')
            .filter(|c| !c.trim().is_empty())
            .map(|c| c.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad coefficient '{c}' in {s}"))))
            .collect::<Result<Vec<u32>>>()?;
        return FqPoly::from_codes(field, &codes);
    }
    let normalized = s.replace("theta", "x").replace(['θ', 't'], "x").replace(' ', "");
    if normalized.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in normalized.chars() {
        if ch == '+' || ch == '-' {
            if !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
            } else if ch == '+' && !terms.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s}")));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling sign in {s}")));
    }
    terms.push((neg, cur));

    let mut coeffs: Vec<Fq> = Vec::new();
    for (neg, term) in terms {
        let (coef, deg) = parse_term(&term).ok_or_else(|| Error::Parse(format!("bad term '{term}' in {s}")))?;
        let c = field.elem(coef)?;
        let c = if neg { field.neg(c) } else { c };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Fq::ZERO);
        }
        coeffs[deg] = field.add(coeffs[deg], c);
    }
    Ok(FqPoly::new(field, coeffs))
}

fn parse_term(term: &str) -> Option<(u32, usize)> {
    match term.find('x') {
        None => Some((term.parse().ok()?, 0)),
        Some(pos) => {
            let coef_part = term[..pos].trim_end_matches('*');
            let coef = if coef_part.is_empty() { 1 } else { coef_part.parse().ok()? };
            let rest = &term[pos + 1..];
            let deg = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
            Some((coef, deg))
        }
    }
}

/// Human-friendly ascending form `c0+c1x+c2x^2` (the config-file syntax).
pub fn to_config_string(f: &FqPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() && i > 0 {
            continue;
        }
        parts.push(match i {
            0 => c.0.to_string(),
            1 => format!("{}x", c.0),
            _ => format!("{}x^{}", c.0, i),
        });
    }
    parts.join("+")
}
