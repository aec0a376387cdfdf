/// Formats like C's `%.{digits}g`: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::format_significant as g;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g(2.0 / 3.0, 15), "0.666666666666667");
        assert_eq!(g(1.5, 15), "1.5");
        assert_eq!(g(100.0, 15), "100");
        assert_eq!(g(0.5614594835668851, 15), "0.561459483566885");
        assert_eq!(g(1.25e-7, 15), "1.25e-07");
        assert_eq!(g(-3.0, 15), "-3");
        assert_eq!(g(9.9999999999999999e5, 3), "1e+06");
        assert_eq!(g(0.0001234, 2), "0.00012");
    }
}
