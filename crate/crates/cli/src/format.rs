//! Number formatting shared by every output format.

/// Fixed-point rendering of `value` with exactly `sig` significant digits,
/// e.g. `fixed_sig(1.035715, 5) == "1.0357"`.
pub fn fixed_sig(value: f64, sig: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return format!("{:.*}", sig.saturating_sub(1), 0.0);
    }
    // round first so that 9.99996 -> "10.000" gets the decimals of its new magnitude
    let sci = format!("{:.*e}", sig.saturating_sub(1), value);
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{value:.decimals$}")
}

/// `fixed_sig` for optional cells; missing values render as `-`.
pub fn opt_fixed(value: Option<f64>, sig: usize) -> String {
    value.map_or_else(|| "-".to_string(), |v| fixed_sig(v, sig))
}

/// Escapes a CSV field (only quotes when needed).
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields.iter().map(|f| csv_field(f.as_ref())).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn md_row<S: AsRef<str>>(fields: &[S]) -> String {
    let cells: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
    format!("| {} |\n", cells.join(" | "))
}

pub fn md_header(fields: &[&str]) -> String {
    let mut out = md_row(fields);
    out.push_str(&md_row(&fields.iter().map(|_| "---").collect::<Vec<_>>()));
    out
}
