//! Output number formatting: nine significant digits, scientific
//! notation, stable across platforms. This is the CSV contract for every
//! numeric column the binary emits.

pub fn sig9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        format!("{x}")
    }
}

/// RFC 4180 quoting for text fields: rule strings like
/// `rate:a=3,eps=0.2,abs` carry commas and must not break the columns.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.475467958123), "4.75467958e-1");
        assert_eq!(sig9(1.0), "1.00000000e0");
        assert_eq!(sig9(0.0), "0.00000000e0");
        assert_eq!(sig9(-12345.6789), "-1.23456789e4");
        assert_eq!(sig9(f64::NAN), "NaN");
    }

    #[test]
    fn csv_quoting() {
        use super::csv_field;
        assert_eq!(csv_field("fixed:0.3"), "fixed:0.3");
        assert_eq!(
            csv_field("rate:a=3,eps=0.2,abs"),
            "\"rate:a=3,eps=0.2,abs\""
        );
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn round_trips_to_f64() {
        for &x in &[0.1, -3.25e-9, 7.0e12, 0.9999999] {
            let parsed: f64 = sig9(x).parse().unwrap();
            assert!((parsed - x).abs() <= 1e-8 * x.abs());
        }
    }
}
