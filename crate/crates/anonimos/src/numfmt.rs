//! Exact decimal rendering of `f64`.

/// Shortest text that parses back to exactly `x`. Plain notation unless that
/// gets long, then scientific.
pub fn shortest(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 21 {
        plain
    } else {
        format!("{x:e}")
    }
}

/// `x` rounded to `digits` significant digits (1..=17), rendered shortest.
/// At 17 digits every finite value survives a parse round trip unchanged.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses");
    shortest(rounded)
}
