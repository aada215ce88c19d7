//! Plain-text artifact helpers shared by every CSV writer.

/// Formats a float with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Joins already formatted fields into one CSV row terminated by `\n`.
pub fn csv_row<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut line = fields.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}
