//! Deterministic float formatting: 6 significant digits, `%g`-style.

/// Format with 6 significant digits, positional where compact and
/// scientific otherwise, trailing zeros stripped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    // "{:.5e}" gives a correctly rounded 6-digit mantissa like "1.23456e-2".
    let s = format!("{:.5e}", x);
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 6);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..=5).contains(&exp) {
        if exp >= 0 {
            let ip = exp as usize + 1;
            out.push_str(&digits[..ip]);
            let frac = digits[ip..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        out.push_str(&digits[..1]);
        let rest = digits[1..].trim_end_matches('0');
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

/// Round to 6 significant digits (what [`sig6`] prints), for JSON numbers.
pub fn round6(x: f64) -> f64 {
    sig6(x).parse().unwrap_or(x)
}

/// Optional column: empty cell when absent.
pub fn sig6_opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}
