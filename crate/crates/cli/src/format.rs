//! Number formatting shared by CSV and JSON reports.

/// `%.12g`: 12 significant digits, trailing zeros removed, `.` as separator.
pub fn g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits (for JSON reports).
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        g12(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// JSON number rounded to 12 significant digits; non-finite values become strings.
pub fn json12(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round12(x))
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(g12(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g12(0.25), "0.25");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(-2.5e-7), "-2.5e-07");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(2.0f64.sqrt() - 1.0), "0.414213562373");
        assert_eq!(g12(123456789012.0), "123456789012");
        assert_eq!(g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(g12(0.0001), "0.0001");
        assert_eq!(g12(99999999999.99999), "100000000000");
        assert_eq!(g12(f64::NAN), "nan");
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(f64::INFINITY), f64::INFINITY);
    }
}
