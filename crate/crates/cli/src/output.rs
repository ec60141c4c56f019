//! Record emission: newline-delimited JSON or RFC 4180 CSV with a fixed
//! column set, so every command shares one schema.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Model and sampling inputs echoed with each record. Unused ones are null.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub rho: Option<f64>,
    pub a: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub horizon: Option<f64>,
    pub n: Option<u64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub tilt_mu1: Option<f64>,
    pub tilt_mu2: Option<f64>,
}

impl Params {
    fn cells(&self) -> [(&'static str, Cell); 13] {
        [
            ("rho", Cell::Real(self.rho)),
            ("a", Cell::Real(self.a)),
            ("c1", Cell::Real(self.c1)),
            ("c2", Cell::Real(self.c2)),
            ("u", Cell::Real(self.u)),
            ("v", Cell::Real(self.v)),
            ("horizon", Cell::Real(self.horizon)),
            ("n", Cell::Int(self.n)),
            ("grid", Cell::Int(self.grid.map(|g| g as u64))),
            ("seed", Cell::Int(self.seed)),
            ("delta", Cell::Real(self.delta)),
            ("tilt_mu1", Cell::Real(self.tilt_mu1)),
            ("tilt_mu2", Cell::Real(self.tilt_mu2)),
        ]
    }
}

/// One computed quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: &'static str,
    /// What `value` holds, e.g. `ruin_probability_mc` or
    /// `is_weighted_mean` for a raw importance-sampled average.
    pub quantity: String,
    pub params: Params,
    pub regime: Option<String>,
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub amplification: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

impl Record {
    pub fn new(command: &'static str, quantity: &str, params: Params) -> Self {
        Self {
            command,
            quantity: quantity.to_string(),
            params,
            regime: None,
            value: None,
            std_error: None,
            lower: None,
            upper: None,
            amplification: None,
            wall_time_ms: None,
        }
    }
}

const FIELDS: [&str; 6] = [
    "regime",
    "value",
    "std_error",
    "lower",
    "upper",
    "amplification",
];

/// `%.{digits}g` formatting.
pub fn general(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` with `digits` significant digits; 17 round-trips any `f64`.
fn json_real(x: Option<f64>, digits: usize) -> String {
    match x {
        Some(x) if x.is_finite() => format!("{x:.digits$e}", digits = digits - 1),
        _ => "null".into(),
    }
}

fn json_string(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

/// Writes records as NDJSON or CSV.
pub struct Sink {
    out: Box<dyn Write>,
    format: Format,
    timing: bool,
    header: bool,
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format, timing: bool) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self {
            out,
            format,
            timing,
            header: false,
        })
    }

    pub fn write(&mut self, rec: &Record) -> io::Result<()> {
        match self.format {
            Format::Json => {
                let line = self.json_line(rec);
                writeln!(self.out, "{line}")
            }
            Format::Csv => self.csv_row(rec),
        }
    }

    fn json_line(&self, rec: &Record) -> String {
        let params: Vec<String> = rec
            .params
            .cells()
            .iter()
            .map(|(k, c)| format!("{}:{}", json_string(k), c.json_text()))
            .collect();
        let mut fields = vec![
            format!("\"command\":{}", json_string(rec.command)),
            format!("\"quantity\":{}", json_string(&rec.quantity)),
            format!("\"params\":{{{}}}", params.join(",")),
            format!(
                "\"regime\":{}",
                rec.regime.as_deref().map_or("null".into(), json_string)
            ),
        ];
        for (k, v) in [
            ("value", rec.value),
            ("std_error", rec.std_error),
            ("lower", rec.lower),
            ("upper", rec.upper),
            ("amplification", rec.amplification),
        ] {
            fields.push(format!("\"{k}\":{}", json_real(v, 17)));
        }
        if self.timing {
            fields.push(format!(
                "\"wall_time_ms\":{}",
                json_real(rec.wall_time_ms, 17)
            ));
        }
        format!("{{{}}}", fields.join(","))
    }

    fn csv_row(&mut self, rec: &Record) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        if !self.header {
            let mut head: Vec<&str> = vec!["command", "quantity"];
            head.extend(rec.params.cells().iter().map(|(k, _)| *k));
            head.extend(FIELDS);
            if self.timing {
                head.push("wall_time_ms");
            }
            w.write_record(&head).map_err(io::Error::other)?;
            self.header = true;
        }
        let cell = |x: Option<f64>| x.map_or(String::new(), |x| general(x, 12));
        let mut row = vec![rec.command.to_string(), rec.quantity.clone()];
        row.extend(rec.params.cells().iter().map(|(_, c)| c.csv()));
        row.push(rec.regime.clone().unwrap_or_default());
        for v in [
            rec.value,
            rec.std_error,
            rec.lower,
            rec.upper,
            rec.amplification,
        ] {
            row.push(cell(v));
        }
        if self.timing {
            row.push(cell(rec.wall_time_ms));
        }
        w.write_record(&row).map_err(io::Error::other)?;
        self.out.write_all(
            &w.into_inner()
                .map_err(|e| io::Error::other(e.to_string()))?,
        )
    }

    /// A table with its own columns (sweeps).
    pub fn table(&mut self, header: &[&str], rows: &[Vec<Cell>]) -> io::Result<()> {
        self.table_rows(header, rows, true)
    }

    /// Rows of a table written piecemeal; the CSV header goes out with the
    /// first batch.
    pub fn table_rows(
        &mut self,
        header: &[&str],
        rows: &[Vec<Cell>],
        first: bool,
    ) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                if first {
                    w.write_record(header).map_err(io::Error::other)?;
                }
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|c| c.csv()).collect();
                    w.write_record(&cells).map_err(io::Error::other)?;
                }
                self.out.write_all(
                    &w.into_inner()
                        .map_err(|e| io::Error::other(e.to_string()))?,
                )
            }
            Format::Json => {
                for row in rows {
                    let fields: Vec<String> = header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| format!("{}:{}", json_string(k), c.json_text()))
                        .collect();
                    writeln!(self.out, "{{{}}}", fields.join(","))?;
                }
                Ok(())
            }
        }
    }

    pub fn text(&mut self, s: &str) -> io::Result<()> {
        self.out.write_all(s.as_bytes())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(Option<f64>),
    Int(Option<u64>),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => x.map_or(String::new(), |x| general(x, 12)),
            Cell::Int(x) => x.map_or(String::new(), |x| x.to_string()),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Cell::Real(x) => json_real(*x, 17),
            Cell::Int(x) => x.map_or("null".into(), |x| x.to_string()),
            Cell::Text(s) => json_string(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(general(0.5, 12), "0.5");
        assert_eq!(general(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(general(4.0, 12), "4");
        assert_eq!(general(1.5e-7, 12), "1.5e-07");
        assert_eq!(general(-2.5e13, 12), "-2.5e+13");
        assert_eq!(general(123456.789, 12), "123456.789");
    }

    #[test]
    fn json_reals_keep_all_digits() {
        assert_eq!(json_real(Some(1.0 / 3.0), 17), "3.3333333333333331e-1");
        assert_eq!(json_real(Some(f64::NAN), 17), "null");
        assert_eq!(json_real(None, 17), "null");
    }
}
