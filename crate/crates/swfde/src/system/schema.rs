//! On-disk JSON schema for system spec files and its translation into
//! runtime types.
//!
//! A spec file fixes `n`, `h`, and a mode list. Matrices are row-major
//! nested arrays; any coefficient may instead be given as `{times, values}`
//! samples, read as piecewise linear between vertices. Black-box modes name
//! a registered right-hand side and may declare bounding matrices. An
//! optional top-level `phi` embeds the initial history, either as a
//! registered name or as `{thetas, states}` samples.

use super::{
    BlackBoxMode, DelayOperator, DiscreteTerm, InitialHistory, Kernel, LinearDelaySubsystem, Mode,
    RhsFn, SectorSubsystem, SwitchedSystem, TimeVarying,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, MetzlerMatrix, PositiveVector};
use serde::{Deserialize, Serialize};

/// Root of a system spec file.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub h: f64,
    pub modes: Vec<ModeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiFile>,
}

/// One mode entry, discriminated by its `kind` field.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModeFile {
    Linear {
        #[serde(rename = "A")]
        a: TvMatrixFile,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        delays: Vec<DelayFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<KernelFile>,
    },
    Sector {
        #[serde(rename = "P")]
        p: TvMatrixFile,
        delays: Vec<DelayFile>,
        beta: Vec<f64>,
    },
    Blackbox {
        rhs: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<BoundsFile>,
    },
}

/// One discrete delay term.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DelayFile {
    #[serde(rename = "B")]
    pub b: TvMatrixFile,
    pub lag: LagFile,
}

/// Distributed kernel samples on a uniform grid over `[−h, 0]`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub dtheta: f64,
    pub samples: Vec<Vec<Vec<f64>>>,
}

/// Declared bounding matrices for a black-box mode.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    #[serde(rename = "Ahat")]
    pub ahat: Vec<Vec<f64>>,
    #[serde(rename = "Vhat")]
    pub vhat: Vec<Vec<f64>>,
}

/// Matrix coefficient: constant, or sampled piecewise linear.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum TvMatrixFile {
    Constant(Vec<Vec<f64>>),
    Sampled { times: Vec<f64>, values: Vec<Vec<Vec<f64>>> },
}

/// Scalar lag: constant, or sampled piecewise linear.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum LagFile {
    Constant(f64),
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

/// Embedded initial history: a registered name or explicit samples.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum PhiFile {
    Name(String),
    Samples { thetas: Vec<f64>, states: Vec<Vec<f64>> },
}

impl TvMatrixFile {
    fn to_runtime(&self) -> Result<TimeVarying<Matrix>> {
        match self {
            TvMatrixFile::Constant(rows) => Ok(TimeVarying::Constant(Matrix::from_rows(rows)?)),
            TvMatrixFile::Sampled { times, values } => {
                let values = values
                    .iter()
                    .map(|v| Matrix::from_rows(v))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TimeVarying::Sampled { times: times.clone(), values })
            }
        }
    }
}

impl LagFile {
    fn to_runtime(&self) -> TimeVarying<f64> {
        match self {
            LagFile::Constant(v) => TimeVarying::Constant(*v),
            LagFile::Sampled { times, values } => {
                TimeVarying::Sampled { times: times.clone(), values: values.clone() }
            }
        }
    }
}

impl DelayFile {
    fn to_runtime(&self) -> Result<DiscreteTerm> {
        Ok(DiscreteTerm { b: self.b.to_runtime()?, lag: self.lag.to_runtime() })
    }
}

impl KernelFile {
    fn to_runtime(&self) -> Result<Kernel> {
        let samples = self
            .samples
            .iter()
            .map(|s| Matrix::from_rows(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Kernel { dtheta: self.dtheta, samples })
    }
}

impl SystemFile {
    /// Parses a spec file from JSON text.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid system file: {e}")))
    }

    /// Pretty-printed JSON for this file.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema types always serialize")
    }

    /// Builds the runtime system, resolving black-box right-hand sides and
    /// named histories through the given lookups.
    pub fn build(
        &self,
        resolve_rhs: &dyn Fn(&str) -> Option<RhsFn>,
        resolve_phi: &dyn Fn(&str) -> Option<InitialHistory>,
    ) -> Result<(SwitchedSystem, Option<InitialHistory>)> {
        let mut modes = Vec::with_capacity(self.modes.len());
        for (k, mode) in self.modes.iter().enumerate() {
            let built = match mode {
                ModeFile::Linear { a, delays, kernel } => {
                    let terms = delays
                        .iter()
                        .map(DelayFile::to_runtime)
                        .collect::<Result<Vec<_>>>()?;
                    let kernel = kernel.as_ref().map(KernelFile::to_runtime).transpose()?;
                    let op = DelayOperator::new(self.n, self.h, terms, kernel)?;
                    Mode::Linear(LinearDelaySubsystem::new(a.to_runtime()?, op)?)
                }
                ModeFile::Sector { p, delays, beta } => {
                    if delays.len() != 1 {
                        return Err(Error::Argument(format!(
                            "mode {}: sector modes take exactly one delay term, got {}",
                            k + 1,
                            delays.len()
                        )));
                    }
                    let term = delays[0].to_runtime()?;
                    let lag = match term.lag {
                        TimeVarying::Constant(v) => v,
                        TimeVarying::Sampled { .. } => {
                            return Err(Error::Argument(format!(
                                "mode {}: sector delay must be the constant horizon",
                                k + 1
                            )))
                        }
                    };
                    if (lag - self.h).abs() > 1e-12 * self.h.max(1.0) {
                        return Err(Error::Argument(format!(
                            "mode {}: sector delay {lag} must equal the horizon {}",
                            k + 1,
                            self.h
                        )));
                    }
                    let beta = PositiveVector::new(beta.clone())?;
                    Mode::Sector(SectorSubsystem::new(p.to_runtime()?, term.b, self.h, beta)?)
                }
                ModeFile::Blackbox { rhs, bounds } => {
                    let f = resolve_rhs(rhs).ok_or_else(|| {
                        Error::Argument(format!("unknown right-hand side name {rhs:?}"))
                    })?;
                    let bounds = bounds
                        .as_ref()
                        .map(|b| -> Result<_> {
                            let ahat = MetzlerMatrix::new(Matrix::from_rows(&b.ahat)?)?;
                            let vhat = Matrix::from_rows(&b.vhat)?;
                            Ok((ahat, vhat))
                        })
                        .transpose()?;
                    Mode::BlackBox(BlackBoxMode { name: rhs.clone(), f, bounds })
                }
            };
            modes.push(built);
        }
        let system = SwitchedSystem::new(self.n, self.h, modes)?;
        let phi = match &self.phi {
            None => None,
            Some(PhiFile::Name(name)) => Some(resolve_phi(name).ok_or_else(|| {
                Error::Argument(format!("unknown initial history name {name:?}"))
            })?),
            Some(PhiFile::Samples { thetas, states }) => {
                Some(InitialHistory::from_samples(thetas.clone(), states.clone())?)
            }
        };
        if let Some(phi) = &phi {
            if phi.n() != self.n {
                return Err(Error::Dimension(format!(
                    "embedded history has dimension {}, system has {}",
                    phi.n(),
                    self.n
                )));
            }
        }
        Ok((system, phi))
    }
}
