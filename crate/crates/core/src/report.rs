//! Number formatting and the tradeoff CSV.

use std::io;

use crate::metrics::TradeoffPoint;

pub const CSV_HEADER: [&str; 6] = [
    "phi",
    "fidelity",
    "coherent_info",
    "mutual_info",
    "t_zz",
    "holevo",
];

/// Significant digits written to CSV and tables.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `printf("%.{digits}g")`: shortest of fixed or scientific notation with trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub phi: f64,
    pub fidelity: f64,
    pub coherent_info: f64,
    pub mutual_info: f64,
    pub t_zz: f64,
    pub holevo: f64,
}

impl CsvRow {
    pub fn new(point: &TradeoffPoint, holevo: f64) -> Self {
        Self {
            phi: point.phi,
            fidelity: point.fidelity,
            coherent_info: point.i_c,
            mutual_info: point.i_mutual,
            t_zz: point.t_zz,
            holevo,
        }
    }

    fn fields(&self) -> [f64; 6] {
        [
            self.phi,
            self.fidelity,
            self.coherent_info,
            self.mutual_info,
            self.t_zz,
            self.holevo,
        ]
    }
}

pub fn write_csv<W: io::Write>(rows: &[CsvRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.fields().map(|x| format_sig(x, SIGNIFICANT_DIGITS)))?;
    }
    w.flush()
}

pub fn csv_string(rows: &[CsvRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
}

pub fn parse_csv<R: io::Read>(input: R) -> Result<Vec<CsvRow>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CsvError::Header(header));
    }
    let mut rows = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut v = [0.0; 6];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|e| CsvError::Field {
                row,
                message: format!("{field:?}: {e}"),
            })?;
        }
        if rec.len() != 6 {
            return Err(CsvError::Field {
                row,
                message: format!("{} fields", rec.len()),
            });
        }
        rows.push(CsvRow {
            phi: v[0],
            fidelity: v[1],
            coherent_info: v[2],
            mutual_info: v[3],
            t_zz: v[4],
            holevo: v[5],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.5, "0.5"),
            (0.75, "0.75"),
            (1.0, "1"),
            (5.0 / 6.0, "0.833333333333"),
            (-0.25, "-0.25"),
            (0.0, "0"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (0.0001, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (std::f64::consts::FRAC_PI_4, "0.785398163397"),
            (0.999_999_999_999_9, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig(x, 12), want, "{x}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            CsvRow {
                phi: 0.0,
                fidelity: 0.5,
                coherent_info: 1.0,
                mutual_info: 1.0,
                t_zz: 1.0,
                holevo: 1.0,
            },
            CsvRow {
                phi: std::f64::consts::FRAC_PI_8,
                fidelity: 0.75,
                coherent_info: 0.6008677,
                mutual_info: 0.3991,
                t_zz: std::f64::consts::FRAC_1_SQRT_2,
                holevo: 1.0,
            },
        ];
        let text = csv_string(&rows);
        assert!(text.starts_with("phi,fidelity,coherent_info,mutual_info,t_zz,holevo\n"));
        assert!(text.contains("\n0,0.5,1,1,1,1\n"));
        let back = parse_csv(text.as_bytes()).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            for (x, y) in a.fields().iter().zip(b.fields()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(
            parse_csv("a,b\n1,2\n".as_bytes()),
            Err(CsvError::Header(_))
        ));
    }
}
