//! JSON scenario files: a torus, optional class, named objects and parameters.
//!
//! ```json
//! {
//!   "torus": {"g": 2, "generators": [[...], [...]]},
//!   "ns_class": [["1", "0"], ["0", "1"]],
//!   "bundles": {"E": {"summands": [...]}},
//!   "representations": {"rho": {"r": 2, "images": [...]}},
//!   "na_bundles": {"b": {"lattice": [...], "H": [...], "r": [...]}},
//!   "na_reps": {"chi": {"r": 1, "characters": [[...]]}},
//!   "parameters": {"bundle": "E", "gamma": [[2, 0], [0, 2]]}
//! }
//! ```
//!
//! A torus given as `{"g", "V"}` is tropical only; commands that need the
//! analytic torus then fail validation.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundle::TropVectorBundle;
use crate::error::{Error, Result};
use crate::lattice::Sublattice;
use crate::na::{NaLineBundle, NaSemisimpleRep};
use crate::ns::{NaTorus, NsClass, TropTorus};
use crate::rational::{Rational, RationalMatrix};
use crate::trop_char::TropRepresentation;

const TOP_LEVEL_KEYS: [&str; 9] = [
    "torus",
    "ns_class",
    "bundles",
    "representations",
    "na_bundles",
    "na_reps",
    "parameters",
    "commands",
    "description",
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default)]
    pub bundle: Option<String>,
    #[serde(default)]
    pub bundles: Vec<String>,
    #[serde(default)]
    pub rep: Option<String>,
    #[serde(default)]
    pub na_bundle: Option<String>,
    #[serde(default)]
    pub na_rep: Option<String>,
    #[serde(default)]
    pub gamma: Option<Sublattice>,
    #[serde(default)]
    pub sublattice: Option<Sublattice>,
    #[serde(default)]
    pub target: Option<Sublattice>,
    #[serde(default)]
    pub point: Option<Vec<Rational>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub bound: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub na_torus: Option<NaTorus>,
    pub torus: TropTorus,
    pub ns_class: Option<NsClass>,
    pub bundles: BTreeMap<String, TropVectorBundle>,
    pub representations: BTreeMap<String, TropRepresentation>,
    pub na_bundles: BTreeMap<String, NaLineBundle>,
    pub na_reps: BTreeMap<String, NaSemisimpleRep>,
    pub parameters: Parameters,
    /// Commands the scenario is meant to be run with, e.g. `"bundle tensor"`.
    pub commands: Vec<String>,
}

fn invalid(path: &str, message: impl ToString) -> Error {
    Error::Validation {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn parse_at<T: DeserializeOwned>(value: &Value, path: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| invalid(path, e))
}

fn at_path<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Validation { .. } => e,
        other => invalid(path, other),
    })
}

fn named<T: DeserializeOwned>(root: &serde_json::Map<String, Value>, key: &str) -> Result<BTreeMap<String, T>> {
    let Some(value) = root.get(key) else {
        return Ok(BTreeMap::new());
    };
    let Value::Object(entries) = value else {
        return Err(invalid(key, "expected an object of named entries"));
    };
    entries
        .iter()
        .map(|(name, v)| Ok((name.clone(), parse_at(v, &format!("{key}.{name}"))?)))
        .collect()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| invalid("$", e))?;
        let Value::Object(root) = root else {
            return Err(invalid("$", "scenario must be a JSON object"));
        };
        if let Some(key) = root.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
            return Err(invalid(key, "unknown field"));
        }
        let torus_value = root.get("torus").ok_or_else(|| invalid("torus", "missing"))?;
        let (na_torus, torus) = match torus_value.get("generators") {
            Some(_) => {
                let t: NaTorus = parse_at(torus_value, "torus")?;
                let trop = t.trop().clone();
                (Some(t), trop)
            }
            None => (None, parse_at::<TropTorus>(torus_value, "torus")?),
        };
        let g = torus.rank();

        let ns_class = match root.get("ns_class") {
            None => None,
            Some(v) => {
                let h: RationalMatrix = parse_at(v, "ns_class")?;
                Some(at_path("ns_class", NsClass::new(h, &torus))?)
            }
        };

        let bundles: BTreeMap<String, TropVectorBundle> = named(&root, "bundles")?;
        for (name, e) in &bundles {
            at_path(&format!("bundles.{name}"), e.validate(&torus))?;
        }
        let representations: BTreeMap<String, TropRepresentation> = named(&root, "representations")?;
        for (name, rho) in &representations {
            if rho.g() != g {
                return Err(invalid(
                    &format!("representations.{name}.images"),
                    format!("expected {g} images, found {}", rho.g()),
                ));
            }
        }
        let na_bundles: BTreeMap<String, NaLineBundle> = named(&root, "na_bundles")?;
        if !na_bundles.is_empty() {
            let t = na_torus
                .as_ref()
                .ok_or_else(|| invalid("na_bundles", "requires an analytic torus"))?;
            for (name, b) in &na_bundles {
                at_path(&format!("na_bundles.{name}"), b.validate(t))?;
            }
        }
        let na_reps: BTreeMap<String, NaSemisimpleRep> = named(&root, "na_reps")?;
        for (name, rho) in &na_reps {
            if rho.g() != g {
                return Err(invalid(
                    &format!("na_reps.{name}.characters"),
                    format!("characters must have {g} values"),
                ));
            }
        }

        let parameters: Parameters = match root.get("parameters") {
            None => Parameters::default(),
            Some(v) => parse_at(v, "parameters")?,
        };
        let commands: Vec<String> = match root.get("commands") {
            None => Vec::new(),
            Some(v) => parse_at(v, "commands")?,
        };

        let scenario = Scenario {
            na_torus,
            torus,
            ns_class,
            bundles,
            representations,
            na_bundles,
            na_reps,
            parameters,
            commands,
        };
        scenario.check_references()?;
        Ok(scenario)
    }

    fn check_references(&self) -> Result<()> {
        let p = &self.parameters;
        let g = self.torus.rank();
        if let Some(name) = &p.bundle {
            self.bundle(name, "parameters.bundle")?;
        }
        for (i, name) in p.bundles.iter().enumerate() {
            self.bundle(name, &format!("parameters.bundles[{i}]"))?;
        }
        if let Some(name) = &p.rep {
            self.representation(name)?;
        }
        if let Some(name) = &p.na_bundle {
            self.na_bundle(name)?;
        }
        if let Some(name) = &p.na_rep {
            self.na_rep(name)?;
        }
        for (key, lat) in [("gamma", &p.gamma), ("sublattice", &p.sublattice), ("target", &p.target)] {
            if let Some(l) = lat {
                if l.rank() != g {
                    return Err(invalid(&format!("parameters.{key}"), format!("expected rank {g}")));
                }
            }
        }
        if let Some(x) = &p.point {
            if x.len() != g {
                return Err(invalid("parameters.point", format!("expected {g} coordinates")));
            }
        }
        Ok(())
    }

    pub fn require_na_torus(&self) -> Result<&NaTorus> {
        self.na_torus
            .as_ref()
            .ok_or_else(|| invalid("torus", "command requires generators of the analytic torus"))
    }

    pub fn require_class(&self) -> Result<&NsClass> {
        self.ns_class
            .as_ref()
            .ok_or_else(|| invalid("ns_class", "missing"))
    }

    pub fn bundle(&self, name: &str, path: &str) -> Result<&TropVectorBundle> {
        self.bundles
            .get(name)
            .ok_or_else(|| invalid(path, format!("no bundle named {name:?}")))
    }

    pub fn representation(&self, name: &str) -> Result<&TropRepresentation> {
        self.representations
            .get(name)
            .ok_or_else(|| invalid("parameters.rep", format!("no representation named {name:?}")))
    }

    pub fn na_bundle(&self, name: &str) -> Result<&NaLineBundle> {
        self.na_bundles
            .get(name)
            .ok_or_else(|| invalid("parameters.na_bundle", format!("no analytic bundle named {name:?}")))
    }

    pub fn na_rep(&self, name: &str) -> Result<&NaSemisimpleRep> {
        self.na_reps
            .get(name)
            .ok_or_else(|| invalid("parameters.na_rep", format!("no analytic representation named {name:?}")))
    }

    /// The single bundle named by `parameters.bundle`.
    pub fn selected_bundle(&self) -> Result<&TropVectorBundle> {
        let name = self
            .parameters
            .bundle
            .as_deref()
            .ok_or_else(|| invalid("parameters.bundle", "missing"))?;
        self.bundle(name, "parameters.bundle")
    }

    /// The bundles named by `parameters.bundles`; at least `min` are required.
    pub fn selected_bundles(&self, min: usize) -> Result<Vec<&TropVectorBundle>> {
        let names = &self.parameters.bundles;
        if names.len() < min {
            return Err(invalid(
                "parameters.bundles",
                format!("expected at least {min} bundle names"),
            ));
        }
        names
            .iter()
            .enumerate()
            .map(|(i, n)| self.bundle(n, &format!("parameters.bundles[{i}]")))
            .collect()
    }
}
