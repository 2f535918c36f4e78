//! Number formatting shared by file writers and reports.

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// exponent notation outside [1e-4, 1e17). Round-trips every finite f64.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if neg { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let head = if frac.is_empty() { digits[..1].to_string() } else { format!("{}.{}", &digits[..1], frac) };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}e{esign}{:02}", exp.abs());
    }
    let (int, frac) = if exp >= 0 {
        let k = exp as usize + 1;
        (digits[..k].to_string(), digits[k..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), digits))
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
