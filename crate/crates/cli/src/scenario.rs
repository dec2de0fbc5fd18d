//! Flat `key = value` scenario files.
//!
//! ```text
//! name = example1
//! flux = "burgers"            # or "quartic", or "poly" with coeffs = [c0, c1, ...]
//! profile = """
//! x < 0: x + 1.5 ;
//! x >= 0: x^2 - 2*x
//! """
//! domain = [-3, 2]
//! T = 10
//! dt = 1e-3
//! dX = 1e-3
//! reference = 4000
//! phased_step = false
//! emit_multivalue = false
//! ```

use std::path::PathBuf;

use charsweep::{Error as CoreError, FluxModel, PiecewiseProfile};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub flux: FluxModel,
    pub profile_text: String,
    pub domain: Option<(f64, f64)>,
    pub t: f64,
    pub dt: f64,
    pub dx: f64,
    pub reference: Option<usize>,
    pub phased_step: bool,
    pub emit_multivalue: bool,
    pub out: Option<PathBuf>,
    /// Line of the scenario file on which the profile text starts.
    profile_line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse(format!("line {line}: {}", msg.into()))
}

fn number(line: usize, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>().map_err(|_| err(line, format!("expected a number, found '{v}'")))
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x = number(line, v)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(err(line, format!("{key} must be positive, found {v}")));
    }
    Ok(x)
}

fn list(line: usize, v: &str) -> Result<Vec<f64>, CliError> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected [a, b, ...], found '{v}'")))?;
    inner.split(',').map(|s| number(line, s.trim())).collect()
}

fn flag(line: usize, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(err(line, format!("expected true or false, found '{v}'"))),
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let mut name = None;
        let mut flux = None;
        let mut coeffs = None;
        let mut profile = None;
        let mut sc = Scenario {
            name: String::new(),
            flux: FluxModel::Burgers,
            profile_text: String::new(),
            domain: None,
            t: f64::NAN,
            dt: f64::NAN,
            dx: f64::NAN,
            reference: None,
            phased_step: false,
            emit_multivalue: false,
            out: None,
            profile_line: 0,
        };
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let no = i + 1;
            let raw = lines[i];
            i += 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(no, format!("expected key = value, found '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(unquote(value).to_string()),
                "flux" => {
                    let (kind, rest) = match value.split_once(',') {
                        Some((k, r)) => (k.trim(), Some(r.trim())),
                        None => (value, None),
                    };
                    if let Some(rest) = rest {
                        let (k, v) = rest.split_once('=').ok_or_else(|| err(no, "expected coeffs = [...]"))?;
                        if k.trim() != "coeffs" {
                            return Err(err(no, format!("unknown flux option '{}'", k.trim())));
                        }
                        coeffs = Some(list(no, v.trim())?);
                    }
                    flux = Some((no, unquote(kind).to_string()));
                }
                "coeffs" => coeffs = Some(list(no, value)?),
                "profile" => {
                    if let Some(body) = value.strip_prefix("\"\"\"") {
                        if let Some(one) = body.strip_suffix("\"\"\"") {
                            profile = Some((no, one.to_string()));
                            continue;
                        }
                        let mut parts = vec![body.to_string()];
                        loop {
                            let Some(l) = lines.get(i) else {
                                return Err(err(no, "unterminated \"\"\" block"));
                            };
                            i += 1;
                            if let Some(last) = l.trim_end().strip_suffix("\"\"\"") {
                                parts.push(last.to_string());
                                break;
                            }
                            parts.push(l.to_string());
                        }
                        profile = Some((no, parts.join("\n")));
                    } else {
                        profile = Some((no, unquote(value).to_string()));
                    }
                }
                "domain" => {
                    let d = list(no, value)?;
                    if d.len() != 2 || d[0] >= d[1] || d[0].is_nan() || d[1].is_nan() {
                        return Err(err(no, "domain must be [lo, hi] with lo < hi"));
                    }
                    sc.domain = Some((d[0], d[1]));
                }
                "T" => sc.t = positive(no, key, value)?,
                "dt" => sc.dt = positive(no, key, value)?,
                "dX" | "dx" => sc.dx = positive(no, key, value)?,
                "reference" => {
                    let m: usize = value.parse().map_err(|_| err(no, format!("expected a cell count, found '{value}'")))?;
                    sc.reference = (m > 0).then_some(m);
                }
                "phased_step" => sc.phased_step = flag(no, value)?,
                "emit_multivalue" => sc.emit_multivalue = flag(no, value)?,
                "out" => sc.out = Some(PathBuf::from(unquote(value))),
                _ => return Err(err(no, format!("unknown key '{key}'"))),
            }
        }
        sc.name = name.ok_or_else(|| err(lines.len(), "missing name"))?;
        let (pl, text) = profile.ok_or_else(|| err(lines.len(), "missing profile"))?;
        sc.profile_text = text;
        sc.profile_line = pl;
        sc.flux = match flux {
            None => FluxModel::Burgers,
            Some((no, kind)) => match kind.as_str() {
                "burgers" => FluxModel::Burgers,
                "quartic" => FluxModel::PowerQuartic,
                "poly" => {
                    let c = coeffs.ok_or_else(|| err(no, "poly flux needs coeffs"))?;
                    FluxModel::polynomial(c).map_err(|e| err(no, e.to_string()))?
                }
                other => return Err(err(no, format!("unknown flux '{other}'"))),
            },
        };
        for (key, v) in [("T", sc.t), ("dt", sc.dt), ("dX", sc.dx)] {
            if v.is_nan() {
                return Err(err(lines.len(), format!("missing {key}")));
            }
        }
        sc.profile()?;
        Ok(sc)
    }

    /// Parsed profile with the scenario's domain applied.
    pub fn profile(&self) -> Result<PiecewiseProfile, CliError> {
        let p = PiecewiseProfile::parse(&self.profile_text).map_err(|e| match e {
            CoreError::Syntax { pos, msg } => {
                err(self.profile_line + pos.line - 1, format!("column {}: {msg}", pos.column))
            }
            e => err(self.profile_line, e.to_string()),
        })?;
        match self.domain {
            Some((lo, hi)) => p.with_domain(lo, hi).map_err(|e| err(self.profile_line, e.to_string())),
            None => Ok(p),
        }
    }
}
