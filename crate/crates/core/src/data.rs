//! Plain-text samples: one or more numbers per line, separated by
//! whitespace or commas; `#` starts a comment line.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("dataset has no values".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("value {i} is not finite")));
        }
        Ok(Self {
            name: name.into(),
            values,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Writes one value per line under a `#` name header. Values use the
    /// shortest representation that parses back to the same f64.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = format!("# {}\n", self.name);
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        fs::write(path, out)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Auto,
    Whitespace,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "whitespace" | "ws" | "txt" => Ok(Self::Whitespace),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidParameter(format!("unknown data format '{other}'"))),
        }
    }
}

pub fn parse_dataset(name: &str, text: &str, format: Format) -> Result<Dataset> {
    let format = match format {
        Format::Auto if text.lines().any(|l| !l.trim_start().starts_with('#') && l.contains(',')) => Format::Csv,
        Format::Auto => Format::Whitespace,
        f => f,
    };
    let is_sep = |c: char| c.is_whitespace() || (format == Format::Csv && c == ',');
    let mut values = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut start = None;
        for (col, c) in line.chars().chain(std::iter::once(' ')).enumerate() {
            match (is_sep(c), start) {
                (false, None) => start = Some(col),
                (true, Some(s)) => {
                    let token: String = line.chars().skip(s).take(col - s).collect();
                    let v = token.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                        line: ln + 1,
                        column: s + 1,
                        message: format!("'{token}' is not a finite number"),
                    })?;
                    values.push(v);
                    start = None;
                }
                _ => {}
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no values found".into(),
        });
    }
    Dataset::new(name, values)
}

pub fn load_dataset(path: impl AsRef<Path>, format: Format) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    parse_dataset(&name, &text, format)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Turbocharger,
    Nicotine,
    CarbonFibres,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Turbocharger, Builtin::Nicotine, Builtin::CarbonFibres];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Turbocharger => "turbocharger",
            Builtin::Nicotine => "nicotine",
            Builtin::CarbonFibres => "carbon_fibres",
        }
    }

    fn text(self) -> &'static str {
        match self {
            Builtin::Turbocharger => include_str!("../data/turbocharger.txt"),
            Builtin::Nicotine => include_str!("../data/nicotine.txt"),
            Builtin::CarbonFibres => include_str!("../data/carbon_fibres.txt"),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "turbocharger" => Ok(Self::Turbocharger),
            "nicotine" => Ok(Self::Nicotine),
            "carbon_fibres" | "carbon_fibers" | "carbon" => Ok(Self::CarbonFibres),
            other => Err(Error::InvalidParameter(format!(
                "unknown builtin dataset '{other}' (turbocharger, nicotine, carbon_fibres)"
            ))),
        }
    }
}

pub fn builtin_dataset(which: Builtin) -> Dataset {
    parse_dataset(which.name(), which.text(), Format::Whitespace).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let d = parse_dataset("x", "1.5 2.5\n3.5", Format::Auto).unwrap();
        assert_eq!(d.values, vec![1.5, 2.5, 3.5]);
        let d = parse_dataset("x", "# comment\n1, 2,3\n4", Format::Auto).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 3.0, 4.0]);
        let e = parse_dataset("x", "a,b", Format::Auto).unwrap_err();
        assert_eq!(e, Error::Parse { line: 1, column: 1, message: "'a' is not a finite number".into() });
        let e = parse_dataset("x", "1 2\n3 x4", Format::Whitespace).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 3, .. }));
        assert!(parse_dataset("x", "1,2", Format::Whitespace).is_err());
        assert!(parse_dataset("x", "", Format::Auto).is_err());
        assert!(parse_dataset("x", "# only\n\n", Format::Auto).is_err());
        assert!(parse_dataset("x", "1 NaN", Format::Auto).is_err());
    }

    #[test]
    fn fixtures() {
        let t = builtin_dataset(Builtin::Turbocharger);
        assert_eq!((t.n_obs(), t.min(), t.max()), (40, 1.6, 9.0));
        assert!((t.sum() - 250.1).abs() < 1e-9);
        let n = builtin_dataset(Builtin::Nicotine);
        assert_eq!(n.n_obs(), 346);
        assert!(n.min() >= 0.1 && n.max() <= 2.0);
        assert!((n.sum() - 295.0).abs() < 1e-9);
        let c = builtin_dataset(Builtin::CarbonFibres);
        assert_eq!((c.n_obs(), c.values[0], c.min()), (100, 3.70, 0.39));
        assert!((c.sum() - 262.13).abs() < 1e-9);
        assert_eq!("carbon-fibres".parse::<Builtin>().unwrap(), Builtin::CarbonFibres);
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "# header\n0.5,1.5\n2.5\n").unwrap();
        let d = load_dataset(&p, Format::Auto).unwrap();
        assert_eq!(d.name, "s");
        assert_eq!(d.values, vec![0.5, 1.5, 2.5]);
        assert!(matches!(load_dataset(dir.path().join("missing"), Format::Auto), Err(Error::Io(_))));
    }

    proptest! {
        #[test]
        fn save_load_round_trip(values in prop::collection::vec(-1e12f64..1e12, 1..50)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.txt");
            let d = Dataset::new("r", values.clone()).unwrap();
            d.save(&p).unwrap();
            prop_assert_eq!(load_dataset(&p, Format::Auto).unwrap().values, values);
        }
    }
}
