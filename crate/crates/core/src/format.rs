//! Fixed-precision number rendering for text outputs.

/// Significant digits written by [`fmt_g9`].
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats like C's `%.9g`, with trailing zeros removed and negative zero
/// written as `0`. Non-finite values render as `nan`, `inf` or `-inf`.
pub fn fmt_g9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        let fixed = strip_zeros(&format!("{v:.decimals$}")).to_string();
        if fixed == "-0" {
            "0".into()
        } else {
            fixed
        }
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
