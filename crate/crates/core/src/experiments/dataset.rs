//! Comma-separated datasets with `#` metadata lines above a single header row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::channel::WignerGrid;
use crate::error::{Error, Result};

/// Shortest of fixed or exponent notation carrying 12 significant digits,
/// trailing zeros removed (the C `%.12g` convention).
pub fn format_number(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A time series with one or more value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDataset {
    pub label: String,
    pub columns: Vec<String>,
    pub t: Vec<f64>,
    /// One vector per entry of `columns`, each as long as `t`.
    pub values: Vec<Vec<f64>>,
    /// `#`-prefixed lines written above the header.
    pub metadata: String,
}

impl CurveDataset {
    pub fn validate(&self) -> Result<()> {
        if self.columns.len() != self.values.len() || self.values.iter().any(|v| v.len() != self.t.len()) {
            return Err(Error::Shape(format!("dataset {} has ragged columns", self.label)));
        }
        if self.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Numerical(format!("dataset {}: t not strictly increasing", self.label)));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("dataset {}: non-finite value", self.label)));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.values[i].as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.metadata.clone();
        out.push('t');
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (k, t) in self.t.iter().enumerate() {
            out.push_str(&format_number(*t));
            for col in &self.values {
                out.push(',');
                out.push_str(&format_number(col[k]));
            }
            out.push('\n');
        }
        out
    }
}

/// Long-format grid: one `x,y,w` row per sample, `y` outer.
pub fn grid_csv(grid: &WignerGrid, metadata: &str) -> String {
    let spec = grid.spec();
    let mut out = String::with_capacity(metadata.len() + 48 * grid.values().len());
    out.push_str(metadata);
    out.push_str("x,y,w\n");
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let _ = writeln!(
                out,
                "{},{},{}",
                format_number(spec.x(i)),
                format_number(spec.y(j)),
                format_number(grid.get(i, j))
            );
        }
    }
    out
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Parsed form of any dataset written by this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Metadata lines without the leading `# `.
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = vec![];
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => metadata.push(l.trim_start_matches('#').trim_start().to_string()),
                Some(l) => break l,
                None => return Err(Error::Config("dataset has no header line".into())),
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let rows = lines
            .enumerate()
            .map(|(k, l)| {
                let row = l
                    .split(',')
                    .map(|v| v.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Config(format!("data row {}: {e}", k + 1)))?;
                if row.len() != columns.len() {
                    return Err(Error::Config(format!("data row {}: expected {} fields", k + 1, columns.len())));
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Self { metadata, columns, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e5), "66666.6666667");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(1.234e-5), "1.234e-05");
        assert_eq!(format_number(std::f64::consts::PI * 1e13), "3.14159265359e+13");
        assert_eq!(format_number(999_999_999_999.7), "1e+12");
        assert_eq!(format_number(100.0), "100");
        let x = std::f64::consts::E.powi(-25);
        assert!((format_number(x).parse::<f64>().unwrap() / x - 1.0).abs() < 1e-11);
    }

    #[test]
    fn csv_round_trip() {
        let d = CurveDataset {
            label: "x".into(),
            columns: vec!["fidelity".into()],
            t: vec![0.0, 0.5],
            values: vec![vec![1.0, 0.25]],
            metadata: "# a = 1\n".into(),
        };
        d.validate().unwrap();
        let csv = d.to_csv();
        assert_eq!(csv, "# a = 1\nt,fidelity\n0,1\n0.5,0.25\n");
        let table = Table::parse(&csv).unwrap();
        assert_eq!(table.metadata, ["a = 1"]);
        assert_eq!(table.column("fidelity").unwrap(), vec![1.0, 0.25]);
        let bad = CurveDataset { t: vec![0.5, 0.5], ..d };
        assert!(bad.validate().is_err());
    }
}
