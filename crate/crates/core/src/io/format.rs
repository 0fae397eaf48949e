/// Fixed-point text with 9 significant digits. Output is a fixed point of
/// parse-then-format, so written tables round-trip byte for byte.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let first = fixed(x);
    let y: f64 = first.parse().unwrap_or(x);
    fixed(y)
}

fn fixed(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.parse::<f64>() == Ok(0.0) {
        "0".to_string()
    } else {
        s
    }
}
