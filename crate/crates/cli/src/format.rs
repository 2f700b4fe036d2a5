//! Number formatting shared by the reports.

use num_rational::Rational64;

/// `p/q`, or just `p` for integers.
pub fn rational(r: Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Six significant digits without exponent notation for ordinary magnitudes.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(rational(Rational64::new(20, 3)), "20/3");
        assert_eq!(rational(Rational64::new(12, 2)), "6");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(39.863149), "39.8631");
        assert_eq!(sig6(0.00123456789), "0.00123457");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(8.0), "8");
        assert_eq!(sig6(0.0), "0");
    }
}
