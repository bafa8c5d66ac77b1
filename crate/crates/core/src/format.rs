//! Fixed number formatting shared by every data file the crate emits.

/// Significant digits used in CSV and JSON output.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` in plain decimal notation with [`SIG_DIGITS`] significant
/// digits ('.' radix, no exponent).
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit; re-trim in that case
    let digits = s
        .chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|c| *c == '0')
        .count();
    if digits > SIG_DIGITS && decimals > 0 {
        let d = decimals - 1;
        return format!("{x:.d$}");
    }
    s
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits, for JSON values.
pub fn round_sig(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}
