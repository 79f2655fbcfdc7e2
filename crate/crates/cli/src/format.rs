//! Number formatting for terminal output.

/// `x` rounded to 12 significant digits, printed without trailing zeros.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let magnitude = rounded.abs();
    if (1e-5..1e15).contains(&magnitude) {
        return format!("{rounded}");
    }
    format!("{rounded:e}")
}

pub fn pm(value: f64, sigma: f64) -> String {
    format!("{} ± {}", sig(value), sig(sigma))
}
