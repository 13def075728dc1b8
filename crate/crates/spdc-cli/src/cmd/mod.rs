pub mod counts;
pub mod fit;
pub mod index;
pub mod jsi;
pub mod pm;

/// Evenly spaced grid with both endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|k| a + k as f64 * step).collect();
    out[n - 1] = b;
    out
}

/// clap value parser for `LO,HI` pairs.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got '{s}'"))?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse '{a}' as a number"))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse '{b}' as a number"))?;
    Ok((lo, hi))
}
