//! Edge weights `w(y, y±1)` and initial-site weights `v(y)`.
//!
//! Weights are column independent and carry no symmetry: `w(y, y+1)` and
//! `w(y+1, y)` are separate entries. A [`WeightConfig`] is the on-disk form
//! and can describe either a fixed strip (when `L` is given) or a half-plane
//! weight generator whose unspecified entries all take `default`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, ratio, Rational};
use crate::lattice::{OccupationVector, StripGeometry};

/// Parsed weight configuration.
///
/// JSON layout: `{"L": 9, "up": {"0": "2/3"}, "down": {}, "initial": {}, "default": "1"}`.
/// Every key except `up`/`down`/`initial` entries is optional; missing
/// entries take `default`, which itself defaults to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    pub width: Option<i64>,
    /// `w(y, y+1)` keyed by `y`.
    pub up: BTreeMap<i64, Rational>,
    /// `w(y, y-1)` keyed by `y`.
    pub down: BTreeMap<i64, Rational>,
    /// `v(y)` keyed by `y`.
    pub initial: BTreeMap<i64, Rational>,
    pub default: Rational,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            width: None,
            up: BTreeMap::new(),
            down: BTreeMap::new(),
            initial: BTreeMap::new(),
            default: Rational::one(),
        }
    }
}

impl WeightConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(Error::Config("top level must be an object".into()));
        };
        let mut cfg = WeightConfig::default();
        for (key, val) in &obj {
            match key.as_str() {
                "L" => {
                    let w = val
                        .as_i64()
                        .ok_or_else(|| Error::Config("\"L\" must be an integer".into()))?;
                    StripGeometry::new(w)?;
                    cfg.width = Some(w);
                }
                "up" => cfg.up = parse_table(key, val, 0)?,
                "down" => cfg.down = parse_table(key, val, 1)?,
                "initial" => cfg.initial = parse_table(key, val, 0)?,
                "default" => cfg.default = parse_value(key, val)?,
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        if let Some(w) = self.width {
            obj.insert("L".into(), Value::from(w));
        }
        let table = |t: &BTreeMap<i64, Rational>| {
            Value::Object(
                t.iter()
                    .map(|(y, r)| (y.to_string(), Value::String(format_rational(r))))
                    .collect(),
            )
        };
        obj.insert("up".into(), table(&self.up));
        obj.insert("down".into(), table(&self.down));
        obj.insert("initial".into(), table(&self.initial));
        obj.insert(
            "default".into(),
            Value::String(format_rational(&self.default)),
        );
        serde_json::to_string_pretty(&Value::Object(obj)).expect("json of plain values")
    }

    /// Materialises the configuration for the strip it declares.
    pub fn system(&self) -> Result<WeightSystem> {
        let width = self
            .width
            .ok_or_else(|| Error::Config("configuration does not declare \"L\"".into()))?;
        let geom = StripGeometry::new(width)?;
        let out_of_range = |name: &str, t: &BTreeMap<i64, Rational>, lo: i64, hi: i64| match t
            .keys()
            .find(|&&y| y < lo || y > hi)
        {
            Some(y) => Err(Error::Config(format!(
                "{name} entry at height {y} outside {lo}..={hi}"
            ))),
            None => Ok(()),
        };
        out_of_range("up", &self.up, 0, width - 1)?;
        out_of_range("down", &self.down, 1, width)?;
        out_of_range("initial", &self.initial, 0, width)?;
        Ok(self.restrict(geom))
    }

    /// Restricts the configuration to `geom`, dropping entries above the strip.
    /// This is how a half-plane configuration is evaluated in a finite strip.
    pub fn restrict(&self, geom: StripGeometry) -> WeightSystem {
        let w = geom.width();
        let get = |t: &BTreeMap<i64, Rational>, y: i64| {
            t.get(&y).cloned().unwrap_or_else(|| self.default.clone())
        };
        WeightSystem {
            geom,
            up: (0..w).map(|y| get(&self.up, y)).collect(),
            down: (1..=w).map(|y| get(&self.down, y)).collect(),
            initial: (0..=w).map(|y| get(&self.initial, y)).collect(),
        }
    }

    /// Edge weight in the half plane `y >= 0` (no upper wall).
    pub fn half_plane_edge(&self, y: i64, y2: i64) -> Rational {
        let table = match y2 - y {
            1 if y >= 0 => &self.up,
            -1 if y2 >= 0 => &self.down,
            _ => return Rational::zero(),
        };
        table
            .get(&y)
            .cloned()
            .unwrap_or_else(|| self.default.clone())
    }

    pub fn half_plane_initial(&self, y: i64) -> Rational {
        if y < 0 {
            return Rational::zero();
        }
        self.initial
            .get(&y)
            .cloned()
            .unwrap_or_else(|| self.default.clone())
    }

    /// Height above which every entry equals `default`.
    pub fn constant_above(&self) -> i64 {
        [&self.up, &self.down, &self.initial]
            .iter()
            .filter_map(|t| t.keys().next_back().copied())
            .max()
            .unwrap_or(0)
    }
}

fn parse_value(key: &str, val: &Value) -> Result<Rational> {
    match val {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n.as_i64().map(|i| ratio(i, 1)).ok_or_else(|| {
            Error::Config(format!("{key}: {n} is not an integer or \"p/q\" string"))
        }),
        other => Err(Error::Config(format!(
            "{key}: unsupported weight value {other}"
        ))),
    }
}

fn parse_table(name: &str, val: &Value, min: i64) -> Result<BTreeMap<i64, Rational>> {
    let Value::Object(obj) = val else {
        return Err(Error::Config(format!("{name} must be an object")));
    };
    obj.iter()
        .map(|(k, v)| {
            let y: i64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{name}: key {k:?} is not an integer")))?;
            if y < min {
                return Err(Error::Config(format!("{name}: height {y} below {min}")));
            }
            Ok((y, parse_value(name, v)?))
        })
        .collect()
}

/// Weights materialised on a fixed strip.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    geom: StripGeometry,
    up: Vec<Rational>,
    down: Vec<Rational>,
    initial: Vec<Rational>,
}

impl WeightSystem {
    pub fn uniform(geom: StripGeometry) -> Self {
        WeightConfig::default().restrict(geom)
    }

    /// Positive pseudo-random weights `p/q` with `p` in 1..=9 and `q` in 1..=4.
    pub fn random<R: Rng + ?Sized>(geom: StripGeometry, rng: &mut R) -> Self {
        let w = geom.width();
        let mut draw = || ratio(rng.gen_range(1..=9), rng.gen_range(1..=4));
        WeightSystem {
            geom,
            up: (0..w).map(|_| draw()).collect(),
            down: (0..w).map(|_| draw()).collect(),
            initial: (0..=w).map(|_| draw()).collect(),
        }
    }

    pub fn geometry(&self) -> StripGeometry {
        self.geom
    }

    /// `w(y, y2)`; zero unless `|y - y2| = 1` with both ends in the strip.
    pub fn edge(&self, y: i64, y2: i64) -> Rational {
        if !self.geom.contains(y) || !self.geom.contains(y2) {
            return Rational::zero();
        }
        match y2 - y {
            1 => self.up[y as usize].clone(),
            -1 => self.down[(y - 1) as usize].clone(),
            _ => Rational::zero(),
        }
    }

    pub fn initial(&self, y: i64) -> Rational {
        if self.geom.contains(y) {
            self.initial[y as usize].clone()
        } else {
            Rational::zero()
        }
    }

    /// `V(y) = prod v(y_a)`.
    pub fn initial_product(&self, v: &OccupationVector) -> Rational {
        v.heights()
            .iter()
            .fold(Rational::one(), |acc, &y| acc * self.initial(y))
    }

    pub fn set_edge(&mut self, y: i64, y2: i64, value: Rational) -> Result<()> {
        if !self.geom.contains(y) || !self.geom.contains(y2) {
            return Err(Error::Config(format!("edge ({y},{y2}) outside strip")));
        }
        match y2 - y {
            1 => self.up[y as usize] = value,
            -1 => self.down[(y - 1) as usize] = value,
            _ => return Err(Error::Config(format!("({y},{y2}) is not a lattice edge"))),
        }
        Ok(())
    }

    pub fn set_initial(&mut self, y: i64, value: Rational) -> Result<()> {
        if !self.geom.contains(y) {
            return Err(Error::Config(format!("site {y} outside strip")));
        }
        self.initial[y as usize] = value;
        Ok(())
    }

    /// Dense configuration listing every entry explicitly.
    pub fn to_config(&self) -> WeightConfig {
        let w = self.geom.width();
        WeightConfig {
            width: Some(w),
            up: (0..w).zip(self.up.iter().cloned()).collect(),
            down: (1..=w).zip(self.down.iter().cloned()).collect(),
            initial: (0..=w).zip(self.initial.iter().cloned()).collect(),
            default: Rational::one(),
        }
    }
}
