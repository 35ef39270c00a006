//! Experiment manifests: a TOML table with a command tag, a map, a point and
//! per-command parameters. Every parameter read is recorded so the report
//! can echo the bounds it ran with.

use std::path::{Path, PathBuf};

use orbitlab_core::exactnum::rational::{self, Rational};
use orbitlab_core::exactnum::{AlgebraicNumber, FieldRef, MPoly, NumberField, Poly};
use orbitlab_core::projdyn::map::MapSpecWire;
use orbitlab_core::projdyn::{MapSpec, P1Map, P2Map, ProjPoint, Space};
use serde_json::{json, Map, Value};
use toml::Table;

/// Failures before any module runs.
#[derive(Debug)]
pub enum ManifestError {
    Io(String),
    Malformed(String),
    UnknownCommand(String),
}

pub type MResult<T> = std::result::Result<T, ManifestError>;

fn bad<T>(msg: impl Into<String>) -> MResult<T> {
    Err(ManifestError::Malformed(msg.into()))
}

impl From<orbitlab_core::Error> for ManifestError {
    fn from(e: orbitlab_core::Error) -> Self {
        ManifestError::Malformed(e.to_string())
    }
}

pub const COMMANDS: [&str; 12] = [
    "classify",
    "fixed-points",
    "orbit-closure",
    "dml",
    "polydisk",
    "attractor",
    "adelic",
    "independence",
    "good-fixed-point",
    "invariant-curves",
    "split-structure",
    "preimage-chain",
];

pub struct Manifest {
    pub command: String,
    pub base: PathBuf,
    pub out: Option<PathBuf>,
    pub precision: Option<i64>,
    pub seed: Option<u64>,
    params: Table,
    used: Map<String, Value>,
}

impl Manifest {
    pub fn parse(text: &str, base: &Path) -> MResult<Manifest> {
        let mut params: Table = text.parse().map_err(|e: toml::de::Error| ManifestError::Malformed(e.to_string()))?;
        let command = match params.remove("command") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return bad("'command' must be a string"),
            None => return bad("missing 'command'"),
        };
        if !COMMANDS.contains(&command.as_str()) {
            return Err(ManifestError::UnknownCommand(command));
        }
        let out = match params.remove("out") {
            Some(toml::Value::String(s)) => Some(base.join(s)),
            Some(_) => return bad("'out' must be a string"),
            None => None,
        };
        let precision = match params.remove("precision") {
            Some(toml::Value::Integer(m)) if m > 0 => Some(m),
            Some(_) => return bad("'precision' must be a positive integer"),
            None => None,
        };
        let seed = match params.remove("seed") {
            Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
            Some(_) => return bad("'seed' must be a nonnegative integer"),
            None => None,
        };
        Ok(Manifest { command, base: base.to_path_buf(), out, precision, seed, params, used: Map::new() })
    }

    /// Parameters read so far, for the report.
    pub fn bounds(&self) -> Value {
        Value::Object(self.used.clone())
    }

    /// Reject keys no command step asked for.
    pub fn finish(&self) -> MResult<()> {
        match self.params.keys().find(|k| !self.used.contains_key(*k)) {
            Some(k) => bad(format!("unknown parameter '{k}' for {}", self.command)),
            None => Ok(()),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.params.get(key).cloned()
    }

    fn record(&mut self, key: &str, v: Value) {
        self.used.insert(key.to_string(), v);
    }

    pub fn int(&mut self, key: &str, default: i64) -> MResult<i64> {
        let v = match self.take(key) {
            None => default,
            Some(toml::Value::Integer(n)) => n,
            Some(_) => return bad(format!("'{key}' must be an integer")),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn int_required(&mut self, key: &str) -> MResult<i64> {
        if self.take(key).is_none() {
            return bad(format!("missing '{key}'"));
        }
        self.int(key, 0)
    }

    pub fn uint(&mut self, key: &str, default: u64) -> MResult<u64> {
        let v = self.int(key, default as i64)?;
        if v < 0 {
            return bad(format!("'{key}' must be nonnegative"));
        }
        Ok(v as u64)
    }

    pub fn float(&mut self, key: &str, default: f64) -> MResult<f64> {
        let v = match self.take(key) {
            None => default,
            Some(toml::Value::Float(x)) => x,
            Some(toml::Value::Integer(n)) => n as f64,
            Some(_) => return bad(format!("'{key}' must be a number")),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn flag(&mut self, key: &str, default: bool) -> MResult<bool> {
        let v = match self.take(key) {
            None => default,
            Some(toml::Value::Boolean(b)) => b,
            Some(_) => return bad(format!("'{key}' must be a boolean")),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn string(&mut self, key: &str) -> MResult<Option<String>> {
        let v = match self.take(key) {
            None => return Ok(None),
            Some(toml::Value::String(s)) => s,
            Some(toml::Value::Integer(n)) => n.to_string(),
            Some(_) => return bad(format!("'{key}' must be a string")),
        };
        self.record(key, json!(v));
        Ok(Some(v))
    }

    pub fn string_required(&mut self, key: &str) -> MResult<String> {
        self.string(key)?.map_or_else(|| bad(format!("missing '{key}'")), Ok)
    }

    pub fn rational(&mut self, key: &str, default: Option<&str>) -> MResult<Rational> {
        let s = match (self.string(key)?, default) {
            (Some(s), _) => s,
            (None, Some(d)) => {
                self.record(key, json!(d));
                d.to_string()
            }
            (None, None) => return bad(format!("missing '{key}'")),
        };
        Ok(rational::parse(&s)?)
    }

    pub fn strings(&mut self, key: &str) -> MResult<Option<Vec<String>>> {
        let v = match self.take(key) {
            None => return Ok(None),
            Some(v) => string_list(&v).ok_or_else(|| ManifestError::Malformed(format!("'{key}' must be a list of strings")))?,
        };
        self.record(key, json!(v));
        Ok(Some(v))
    }

    /// A degree bound given as an integer or a list of integers.
    pub fn degrees(&mut self, key: &str, default: u32) -> MResult<Vec<u32>> {
        let v: Vec<u32> = match self.take(key) {
            None => vec![default],
            Some(toml::Value::Integer(n)) if n >= 0 => vec![n as u32],
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|x| x.as_integer().filter(|n| *n >= 0).map(|n| n as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| ManifestError::Malformed(format!("'{key}' must hold nonnegative integers")))?,
            Some(_) => return bad(format!("'{key}' must be an integer or a list of integers")),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    /// Univariate polynomials in x: strings such as "x - 8", or coefficient
    /// lists from the constant term up.
    pub fn polys(&mut self, key: &str) -> MResult<Option<Vec<Poly>>> {
        let Some(v) = self.take(key) else { return Ok(None) };
        let toml::Value::Array(items) = &v else { return bad(format!("'{key}' must be a list")) };
        let mut out = vec![];
        let mut echo = vec![];
        for it in items {
            let p = match it {
                toml::Value::String(s) => parse_poly_in(s, "x")?,
                other => {
                    let c = string_list(other).ok_or_else(|| ManifestError::Malformed(format!("bad entry in '{key}'")))?;
                    Poly::new(c.iter().map(|s| rational::parse(s)).collect::<orbitlab_core::Result<_>>()?)
                }
            };
            echo.push(p.to_string());
            out.push(p);
        }
        self.record(key, json!(echo));
        Ok(Some(out))
    }

    pub fn field(&mut self) -> MResult<Option<FieldRef>> {
        let Some(s) = self.string("field")? else { return Ok(None) };
        let p = parse_poly_in(&s, "t")?;
        Ok(Some(NumberField::new(&p, "t")?))
    }

    pub fn map(&mut self) -> MResult<MapSpec> {
        let table = match (self.params.get("map"), self.params.get("map_file")) {
            (Some(toml::Value::Table(t)), None) => t.clone(),
            (None, Some(toml::Value::String(f))) => {
                let path = self.base.join(f);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| ManifestError::Io(format!("{}: {e}", path.display())))?;
                if path.extension().is_some_and(|e| e == "json") {
                    let v: Value = serde_json::from_str(&text).map_err(|e| ManifestError::Malformed(e.to_string()))?;
                    toml::Table::try_from(v).map_err(|e| ManifestError::Malformed(e.to_string()))?
                } else {
                    text.parse().map_err(|e: toml::de::Error| ManifestError::Malformed(e.to_string()))?
                }
            }
            (Some(_), Some(_)) => return bad("give either 'map' or 'map_file', not both"),
            (Some(_), None) => return bad("'map' must be a table"),
            (None, Some(_)) => return bad("'map_file' must be a string"),
            (None, None) => return bad("missing 'map'"),
        };
        let f = map_from_table(&table)?;
        if let Some(toml::Value::String(file)) = self.params.get("map_file") {
            self.record("map_file", json!(file.clone()));
        }
        self.record("map", serde_json::to_value(MapSpecWire::from_map(&f)).unwrap());
        Ok(f)
    }

    /// The start or fixed point, in the space of `f`.
    pub fn point(&mut self, space: Space, field: Option<&FieldRef>) -> MResult<ProjPoint> {
        let Some(v) = self.take("point") else { return bad("missing 'point'") };
        let p = point_from_value(&v, space, field)?;
        self.record("point", serde_json::to_value(&p).unwrap());
        Ok(p)
    }

    /// An affine tuple of algebraic numbers.
    pub fn numbers(&mut self, key: &str, field: Option<&FieldRef>) -> MResult<Option<Vec<AlgebraicNumber>>> {
        let Some(v) = self.strings(key)? else { return Ok(None) };
        Ok(Some(v.iter().map(|s| number(s, field)).collect::<MResult<_>>()?))
    }

    pub fn number(&mut self, key: &str, field: Option<&FieldRef>) -> MResult<AlgebraicNumber> {
        let s = self.string_required(key)?;
        number(&s, field)
    }
}

fn string_list(v: &toml::Value) -> Option<Vec<String>> {
    let toml::Value::Array(a) = v else { return None };
    a.iter()
        .map(|x| match x {
            toml::Value::String(s) => Some(s.clone()),
            toml::Value::Integer(n) => Some(n.to_string()),
            _ => None,
        })
        .collect()
}

pub fn parse_poly_in(s: &str, var: &str) -> MResult<Poly> {
    let m = MPoly::parse(s, &[var])?;
    Ok(m.to_univariate(0, &[Rational::from_integer(0.into())]))
}

/// A rational, or a polynomial in the field generator t.
pub fn number(s: &str, field: Option<&FieldRef>) -> MResult<AlgebraicNumber> {
    match field {
        Some(k) if s.contains('t') => Ok(AlgebraicNumber::from_poly(k, &parse_poly_in(s, "t")?)),
        Some(k) => Ok(AlgebraicNumber::from_poly(k, &Poly::new(vec![rational::parse(s)?]))),
        None => Ok(AlgebraicNumber::from_q(rational::parse(s)?)),
    }
}

fn lists(t: &Table, key: &str) -> MResult<Vec<Vec<Rational>>> {
    let Some(toml::Value::Array(a)) = t.get(key) else { return bad(format!("map: '{key}' must be a list")) };
    a.iter()
        .map(|x| {
            let s = string_list(x).ok_or_else(|| ManifestError::Malformed(format!("map: bad entry in '{key}'")))?;
            Ok(s.iter().map(|c| rational::parse(c)).collect::<orbitlab_core::Result<Vec<_>>>()?)
        })
        .collect()
}

fn one_list(t: &Table, key: &str) -> MResult<Poly> {
    let Some(v) = t.get(key) else { return bad(format!("map: missing '{key}'")) };
    let s = string_list(v).ok_or_else(|| ManifestError::Malformed(format!("map: '{key}' must be a list")))?;
    Ok(Poly::new(s.iter().map(|c| rational::parse(c)).collect::<orbitlab_core::Result<_>>()?))
}

/// Accepted shapes: the wire form {space, n, coeffs}; {polynomial} or
/// {numerator, denominator} on P1 (coefficients from the constant term up);
/// {polynomials} for split maps; {forms} in X, Y, Z for P2.
pub fn map_from_table(t: &Table) -> MResult<MapSpec> {
    let keys: Vec<&str> = t.keys().map(String::as_str).collect();
    let err = |e: orbitlab_core::Error| ManifestError::Malformed(format!("map: {e}"));
    if keys.contains(&"space") {
        let w: MapSpecWire = t.clone().try_into().map_err(|e: toml::de::Error| ManifestError::Malformed(e.to_string()))?;
        return w.to_map().map_err(err);
    }
    if keys == ["polynomial"] {
        return Ok(MapSpec::P1(P1Map::polynomial(&one_list(t, "polynomial")?).map_err(err)?));
    }
    if keys.len() == 2 && keys.contains(&"numerator") && keys.contains(&"denominator") {
        let (n, d) = (one_list(t, "numerator")?, one_list(t, "denominator")?);
        return Ok(MapSpec::P1(P1Map::rational(&n, &d).map_err(err)?));
    }
    if keys == ["polynomials"] {
        let fs = lists(t, "polynomials")?
            .into_iter()
            .map(|c| P1Map::polynomial(&Poly::new(c)))
            .collect::<orbitlab_core::Result<Vec<_>>>()
            .map_err(err)?;
        return MapSpec::split(fs).map_err(err);
    }
    if keys == ["forms"] {
        let Some(s) = t.get("forms").and_then(string_list).filter(|s| s.len() == 3) else {
            return bad("map: 'forms' must hold three strings");
        };
        let forms: Vec<MPoly> = s.iter().map(|f| MPoly::parse(f, &["X", "Y", "Z"])).collect::<orbitlab_core::Result<_>>()?;
        let d = forms.iter().map(|f| f.total_degree()).max().unwrap_or(0) as usize;
        let forms: [MPoly; 3] = forms.try_into().unwrap();
        return Ok(MapSpec::P2(P2Map::new(forms, d).map_err(err)?));
    }
    bad(format!("map: unrecognized keys {keys:?}"))
}

fn factor(v: &toml::Value, len: usize, field: Option<&FieldRef>) -> MResult<Vec<AlgebraicNumber>> {
    let one = || number("1", field);
    match v {
        toml::Value::String(s) if s == "inf" && len == 2 => Ok(vec![one()?, number("0", field)?]),
        toml::Value::String(_) | toml::Value::Integer(_) if len == 2 => {
            let s = string_list(&toml::Value::Array(vec![v.clone()])).unwrap();
            Ok(vec![number(&s[0], field)?, one()?])
        }
        toml::Value::Array(_) => {
            let s = string_list(v).ok_or_else(|| ManifestError::Malformed("point: coordinates must be strings".into()))?;
            if s.len() != len {
                return bad(format!("point: expected {len} homogeneous coordinates"));
            }
            s.iter().map(|c| number(c, field)).collect()
        }
        _ => bad("point: bad coordinate"),
    }
}

/// P1: ["x"], "inf" or [["X", "Y"]]; P2: ["x", "y"] or [["X", "Y", "Z"]];
/// (P1)^N: one P1 entry per factor.
pub fn point_from_value(v: &toml::Value, space: Space, field: Option<&FieldRef>) -> MResult<ProjPoint> {
    let items: Vec<toml::Value> = match v {
        toml::Value::Array(a) => a.clone(),
        other => vec![other.clone()],
    };
    let factors = match space {
        Space::P1 => {
            if items.len() != 1 {
                return bad("point: P1 takes one coordinate");
            }
            vec![factor(&items[0], 2, field)?]
        }
        Space::P2 => match items.as_slice() {
            [h @ toml::Value::Array(_)] => vec![factor(h, 3, field)?],
            [x, y] => {
                let s = string_list(&toml::Value::Array(vec![x.clone(), y.clone()]))
                    .ok_or_else(|| ManifestError::Malformed("point: coordinates must be strings".into()))?;
                vec![vec![number(&s[0], field)?, number(&s[1], field)?, number("1", field)?]]
            }
            _ => return bad("point: P2 takes two affine or three homogeneous coordinates"),
        },
        Space::P1xN(n) => {
            if items.len() != n {
                return bad(format!("point: expected {n} factors"));
            }
            items.iter().map(|x| factor(x, 2, field)).collect::<MResult<_>>()?
        }
    };
    Ok(ProjPoint::new(space, factors)?)
}
