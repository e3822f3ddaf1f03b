//! Number formatting shared by reports and the command line.

/// Twelve significant digits in scientific notation, ties to even. Used in
/// CSV reports, where the value must survive a round trip.
pub fn sci12(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        nonfinite(v).into()
    }
}

/// Fixed notation with twelve fractional digits, ties to even.
pub fn fixed12(v: f64) -> String {
    if !v.is_finite() {
        return nonfinite(v).into();
    }
    let s = format!("{v:.12}");
    // "-0.000000000000" reads as a sign error
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn nonfinite(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(fixed12(2f64.sqrt()), "1.414213562373");
        assert_eq!(fixed12(1.0), "1.000000000000");
        assert_eq!(fixed12(-1e-17), "0.000000000000");
        assert_eq!(sci12(0.5), "5.00000000000e-1");
        assert_eq!(sci12(f64::INFINITY), "inf");
    }
}
