//! Output assembly: 12-significant-digit decimal formatting, the CSV
//! document layout (`# config:` provenance line, header, rows) and the JSON
//! envelope used by tabular commands.

use crate::config::RunConfig;

/// Sentinel for thresholds that do not exist because the equilibrium is
/// stable for every delay (or absent altogether).
pub const UNBOUNDED: &str = "unbounded";

/// Decimal rendering with 12 significant digits and trailing zeros trimmed;
/// falls back to scientific notation outside `[1e-4, 1e12)` magnitudes.
pub fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let formatted = format!("{x:.11e}");
        let (mantissa, exponent) = formatted
            .split_once('e')
            .expect("scientific format always contains an exponent");
        format!("{}e{exponent}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A numeric cell that may be absent ("unbounded").
pub fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| UNBOUNDED.to_string(), g12)
}

/// CSV layout: provenance line, header line, then one comma-joined line per
/// row of already-formatted cells.
pub fn csv_document(config: &RunConfig, header: &str, rows: &[Vec<String>]) -> String {
    let config_line = serde_json::to_string(config).expect("config serializes");
    let mut out = format!("# config: {config_line}\n{header}\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON envelope for tabular commands: the resolved config, the column
/// names, and the raw (full-precision) row values.
pub fn json_document(config: &RunConfig, columns: &[&str], rows: Vec<serde_json::Value>) -> String {
    let doc = serde_json::json!({
        "config": config,
        "columns": columns,
        "rows": rows,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_decimals_trim_trailing_zeros() {
        assert_eq!(g12(1.14), "1.14");
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(-0.3), "-0.3");
        assert_eq!(g12(10.0), "10");
    }

    #[test]
    fn twelve_significant_digits_survive() {
        assert_eq!(g12(1.0524097791489255), "1.05240977915");
        assert_eq!(g12(17.697758376758706), "17.6977583768");
        assert_eq!(g12(123456789.0), "123456789");
    }

    #[test]
    fn extreme_magnitudes_switch_to_scientific() {
        assert_eq!(g12(2e-7), "2e-7");
        assert_eq!(g12(-3.25e-9), "-3.25e-9");
        assert_eq!(g12(1.5e13), "1.5e13");
        assert_eq!(g12(4e-4), "0.0004");
    }

    #[test]
    fn absent_cells_use_the_sentinel() {
        assert_eq!(cell(None), "unbounded");
        assert_eq!(cell(Some(0.5)), "0.5");
    }
}
