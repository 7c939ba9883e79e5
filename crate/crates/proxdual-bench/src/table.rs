//! Result rows and table emission. Residuals are printed in scientific
//! notation with two decimals and a two-digit exponent (`9.84e-15` style),
//! iterations as integers, seconds with two decimals. Rows store the values
//! at exactly the emitted precision, so `parse(emit(rows)) == rows`.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => bail!("unknown table format '{other}' (expected csv or markdown)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    pub r_feas: Option<f64>,
    pub r_obj: Option<f64>,
    pub r_sol: Option<f64>,
    pub iter: usize,
    pub time_s: f64,
}

impl TableRow {
    /// Rounds every field to the emitted precision up front.
    pub fn new(
        method: impl Into<String>,
        r_feas: Option<f64>,
        r_obj: Option<f64>,
        r_sol: Option<f64>,
        iter: usize,
        time_s: f64,
    ) -> Self {
        TableRow {
            method: method.into(),
            r_feas: r_feas.map(round_sci),
            r_obj: r_obj.map(round_sci),
            r_sol: r_sol.map(round_sci),
            iter,
            time_s: (time_s * 100.0).round() / 100.0,
        }
    }
}

/// `1.234e-7 -> "1.23e-07"`, `0 -> "0.00e+00"`.
pub fn fmt_sci(x: f64) -> String {
    if x == 0.0 {
        return "0.00e+00".to_string();
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let ax = x.abs();
    let mut exp = ax.log10().floor() as i32;
    let mut mant = ax / 10f64.powi(exp);
    // guard against log/pow rounding at decade boundaries
    if mant >= 10.0 {
        mant /= 10.0;
        exp += 1;
    } else if mant < 1.0 {
        mant *= 10.0;
        exp -= 1;
    }
    mant = (mant * 100.0).round() / 100.0;
    if mant >= 10.0 {
        mant /= 10.0;
        exp += 1;
    }
    let esign = if exp < 0 { '-' } else { '+' };
    format!("{sign}{mant:.2}e{esign}{:02}", exp.abs())
}

/// The value a residual takes after passing through [`fmt_sci`].
pub fn round_sci(x: f64) -> f64 {
    fmt_sci(x).parse().expect("fmt_sci emits a valid float literal")
}

const CSV_HEADER: &str = "method,r_feas,r_obj,r_sol,iter,time_s";

fn opt_sci(v: Option<f64>) -> String {
    v.map(fmt_sci).unwrap_or_default()
}

/// Render rows in the requested format. Empty input is refused.
pub fn emit_table(rows: &[TableRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        bail!("refusing to emit an empty table");
    }
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{:.2}\n",
                    row.method,
                    opt_sci(row.r_feas),
                    opt_sci(row.r_obj),
                    opt_sci(row.r_sol),
                    row.iter,
                    row.time_s
                ));
            }
        }
        TableFormat::Markdown => {
            out.push_str("| Method | R_feas | R_obj | R_sol | Iter | Time (s) |\n");
            out.push_str("|---|---|---|---|---|---|\n");
            for row in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {:.2} |\n",
                    row.method,
                    opt_sci(row.r_feas),
                    opt_sci(row.r_obj),
                    opt_sci(row.r_sol),
                    row.iter,
                    row.time_s
                ));
            }
        }
    }
    Ok(out)
}

/// Parse a CSV document produced by [`emit_table`].
pub fn parse_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty csv document")?;
    if header != CSV_HEADER {
        bail!("unexpected csv header '{header}'");
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            bail!("row {idx}: expected 6 fields, got {}", fields.len());
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse().with_context(|| format!("row {idx}: bad float '{s}'"))?))
            }
        };
        rows.push(TableRow {
            method: fields[0].to_string(),
            r_feas: opt(fields[1])?,
            r_obj: opt(fields[2])?,
            r_sol: opt(fields[3])?,
            iter: fields[4].parse().with_context(|| format!("row {idx}: bad iter"))?,
            time_s: fields[5].parse().with_context(|| format!("row {idx}: bad time"))?,
        });
    }
    Ok(rows)
}

/// One trace file per solver run: `iter,phi,grad_norm,r_feas,elapsed_s`.
pub fn trace_csv(trace: &[proxdual::solvers::TraceRecord]) -> String {
    let mut out = String::from("iter,phi,grad_norm,r_feas,elapsed_s\n");
    for rec in trace {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.6}\n",
            rec.iter, rec.phi, rec.grad_norm, rec.r_feas, rec.elapsed_s
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_formatting_rules() {
        assert_eq!(fmt_sci(1.234e-7), "1.23e-07");
        assert_eq!(fmt_sci(0.0), "0.00e+00");
        assert_eq!(fmt_sci(9.84e-15), "9.84e-15");
        assert_eq!(fmt_sci(-3.44e-4), "-3.44e-04");
        assert_eq!(fmt_sci(238.59), "2.39e+02");
        assert_eq!(fmt_sci(9.996e-1), "1.00e+00"); // mantissa rounds up a decade
        assert_eq!(fmt_sci(1.0), "1.00e+00");
    }

    #[test]
    fn empty_table_is_refused() {
        assert!(emit_table(&[], TableFormat::Csv).is_err());
    }

    #[test]
    fn one_row_roundtrip() {
        let rows = vec![TableRow::new("D-SSN", Some(9.74e-15), Some(0.0), None, 21, 0.034)];
        let text = emit_table(&rows, TableFormat::Csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn markdown_has_one_line_per_row() {
        let rows = vec![
            TableRow::new("D-GD", Some(4.4e-15), None, None, 47, 0.04),
            TableRow::new("P-ADMM", Some(9.31e-15), None, None, 555, 0.18),
        ];
        let text = emit_table(&rows, TableFormat::Markdown).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("| D-GD | 4.40e-15 |"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fmt_sci_parses_back_and_rounding_is_idempotent(
                mant in -9.99f64..9.99,
                exp in -20i32..20,
            ) {
                let x = mant * 10f64.powi(exp);
                let s = fmt_sci(x);
                let parsed: f64 = s.parse().unwrap();
                prop_assert_eq!(round_sci(parsed), parsed);
                // two significant decimals survive the trip
                if x != 0.0 {
                    prop_assert!(((parsed - x) / x).abs() <= 5.1e-3);
                }
            }

            #[test]
            fn csv_roundtrip_is_exact_for_arbitrary_rows(
                feas in proptest::option::of(0.0f64..1.0),
                obj in proptest::option::of(0.0f64..1e-3),
                iter in 0usize..10_000,
                time in 0.0f64..1e4,
            ) {
                let rows = vec![TableRow::new("D-GD", feas, obj, None, iter, time)];
                let text = emit_table(&rows, TableFormat::Csv).unwrap();
                prop_assert_eq!(parse_csv(&text).unwrap(), rows);
            }
        }
    }
}
