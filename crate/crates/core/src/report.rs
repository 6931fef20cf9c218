//! Shared CSV rendering helpers.

use std::io::Write;

/// Renders `v` with 10 significant digits in plain decimal notation.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with("-0.") && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Writes the provenance comment line that precedes every CSV header.
pub fn write_comment<W: Write>(out: &mut W, manifest: &str) -> std::io::Result<()> {
    writeln!(out, "# manifest: {manifest}")
}
