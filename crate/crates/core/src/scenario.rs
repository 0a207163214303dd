//! Scenario files: TOML with exact rationals written as `"p/q"` strings and
//! torus coordinates as `"angle"` or `"angle@radial"`.

use std::path::Path;

use serde::Deserialize;

use crate::bernstein::{BlockSpec, InertialClass, InertialSpec, XGenerator};
use crate::cyclo::{parse_rational, RootOfUnity, Q};
use crate::error::{Error, Result};
use crate::torus::{Coord, TorusPoint};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    name: String,
    #[serde(default)]
    description: String,
    inertial: RawInertial,
    sample: RawSample,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInertial {
    d: u32,
    blocks: Vec<RawBlock>,
    #[serde(default)]
    stab: RawStab,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    m: u32,
    e: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStab {
    #[serde(default)]
    invariants: Vec<usize>,
    #[serde(default)]
    generators: Vec<RawGenerator>,
    #[serde(default)]
    kappa: Vec<Vec<String>>,
    phi: Option<Vec<Vec<String>>>,
    #[serde(default)]
    xl_omega_vmu: Vec<Vec<usize>>,
    xnr_weights: Option<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    block_perm: Vec<usize>,
    shift: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    angle_denominator: u32,
    radial_grid: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub angle_denominator: u32,
    pub radial_grid: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub class: InertialClass,
    pub sample: SampleSpec,
}

fn field<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn matrix(path: &str, m: &[Vec<String>]) -> Result<Vec<Vec<RootOfUnity>>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| field(&format!("{path}[{i}][{j}]"), parse_rational(s).map(RootOfUnity::new)))
                .collect()
        })
        .collect()
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let st = &raw.inertial.stab;
        let generators = st
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let shift = g
                    .shift
                    .iter()
                    .enumerate()
                    .map(|(j, s)| field(&format!("inertial.stab.generators[{i}].shift[{j}]"), Coord::parse(s)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(XGenerator {
                    block_perm: g.block_perm.clone(),
                    shift,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = InertialSpec {
            blocks: raw.inertial.blocks.iter().map(|b| BlockSpec { m: b.m, e: b.e }).collect(),
            d: raw.inertial.d,
            invariants: st.invariants.clone(),
            generators,
            kappa: matrix("inertial.stab.kappa", &st.kappa)?,
            phi: st.phi.as_ref().map(|m| matrix("inertial.stab.phi", m)).transpose()?,
            vmu: st.xl_omega_vmu.clone(),
            xnr_weights: st.xnr_weights.clone(),
        };
        let class = InertialClass::build(spec)?;
        if raw.sample.angle_denominator == 0 {
            return Err(Error::Parse("sample.angle_denominator must be positive".into()));
        }
        let radial_grid = raw
            .sample
            .radial_grid
            .iter()
            .enumerate()
            .map(|(i, s)| field(&format!("sample.radial_grid[{i}]"), parse_rational(s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            name: raw.name,
            description: raw.description,
            class,
            sample: SampleSpec {
                angle_denominator: raw.sample.angle_denominator,
                radial_grid,
            },
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn with_denominator(mut self, den: Option<u32>) -> Self {
        if let Some(d) = den {
            self.sample.angle_denominator = d;
        }
        self
    }

    pub fn points(&self) -> Vec<TorusPoint> {
        self.class.sample(self.sample.angle_denominator, &self.sample.radial_grid)
    }
}
