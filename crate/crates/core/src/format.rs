//! Number formatting shared by the CSV and JSON writers.

use serde::Serialize;

/// Formats `x` with nine significant digits and trailing zeros dropped.
///
/// Fixed notation when the decimal exponent lies in `[-5, 9]`, otherwise
/// `1.5e-7` style.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..=9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV document: a `#` line carrying the JSON config, a header, then rows.
pub fn csv_with_config<C: Serialize>(config: &C, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    out.push('#');
    out.push_str(&serde_json::to_string(config).expect("config serializes"));
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}
