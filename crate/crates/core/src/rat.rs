//! Exact rational arithmetic. Densities, thresholds, and energies never
//! touch floating point; `i128` numerators give ample headroom for the
//! structure sizes this crate handles (n ≤ a few thousand).

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rat = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

pub fn rat_abs(x: Rat) -> Rat {
    x.abs()
}

/// ⌈x · m⌉ as usize, for thresholds like "at least an ε-fraction of m".
pub fn ceil_mul(x: Rat, m: usize) -> usize {
    let scaled = x * Rat::from_integer(m as i128);
    let c = scaled.ceil().to_integer();
    assert!(c >= 0, "negative threshold");
    c as usize
}

/// Parses "0.4375", "1/4", "1", "0.5e0"-free plain decimal or fraction
/// strings into an exact rational. Returns None on malformed input.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num.trim().parse().ok()?;
        let d: i128 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => (1i128, s),
    };
    if let Some((int_part, frac_part)) = body.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int_val: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().ok()?
        };
        let frac_val: i128 = frac_part.parse().ok()?;
        let den = 10i128.checked_pow(frac_part.len() as u32)?;
        Some(Ratio::new(sign * (int_val * den + frac_val), den))
    } else {
        let v: i128 = body.parse().ok()?;
        Some(Ratio::from_integer(sign * v))
    }
}

/// Renders a rational as "num/den" (or "num" when integral), the exact
/// form used in reports.
pub fn format_rat(x: Rat) -> alloc::string::String {
    use alloc::format;
    if x.denom() == &1 {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
