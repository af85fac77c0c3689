//! Number formatting shared by CSV and JSON emitters.

/// Formats like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// dropped, exponent form outside [1e−5, 10^sig).
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// 15 significant digits, the CSV default.
pub fn fmt15(x: f64) -> String {
    fmt_sig(x, 15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt15(0.25), "0.25");
        assert_eq!(fmt15(1.0), "1");
        assert_eq!(fmt15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(fmt15(1e-7), "1e-07");
        assert_eq!(fmt15(-2.5e20), "-2.5e+20");
        assert_eq!(fmt15(123456.0), "123456");
        assert_eq!(fmt15(0.0001), "0.0001");
        assert_eq!(fmt_sig(9.9999, 3), "10");
        assert_eq!(fmt_sig(999999.0, 3), "1e+06");
    }
}
