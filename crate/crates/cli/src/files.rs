//! JSON file formats. Complex numbers are always `[re, im]` pairs.

use std::fs;
use std::path::Path;

use dirq_core::estimation::DiscretePrior;
use dirq_core::hilbert::Ket;
use dirq_core::measurement::ProjectiveMeasurement;
use dirq_core::{Direction, Spinor, TwoQubitState, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Complex = [f64; 2];

fn to_pair(z: C64) -> Complex {
    [z.re, z.im]
}

fn from_pair(p: Complex) -> C64 {
    C64::new(p[0], p[1])
}

/// A four-outcome measurement. Rows of `basis` are the basis vectors in the
/// order `|00>, |01>, |10>, |11>`; `guesses[j]` is the direction guessed on
/// outcome `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub label: String,
    pub basis: [[Complex; 4]; 4],
    pub guesses: [[f64; 3]; 4],
}

impl MeasurementFile {
    pub fn from_measurement(m: &ProjectiveMeasurement) -> Self {
        MeasurementFile {
            label: m.label().to_string(),
            basis: m.basis().map(|v| v.amplitudes().map(to_pair)),
            guesses: m.guesses().map(|g| g.to_array()),
        }
    }

    /// Validates normalization, orthonormality and completeness.
    pub fn to_measurement(&self) -> Result<ProjectiveMeasurement, CliError> {
        let mut basis = Vec::with_capacity(4);
        for row in &self.basis {
            basis.push(TwoQubitState::new(row.map(from_pair))?);
        }
        let mut guesses = Vec::with_capacity(4);
        for g in &self.guesses {
            guesses.push(Direction::new(g[0], g[1], g[2])?);
        }
        let basis: [TwoQubitState; 4] = basis.try_into().expect("four rows");
        let guesses: [Direction; 4] = guesses.try_into().expect("four guesses");
        Ok(ProjectiveMeasurement::new(
            basis,
            guesses,
            self.label.clone(),
        )?)
    }
}

/// `{"state": [[re, im] x 4]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitFile {
    pub state: [Complex; 4],
}

impl TwoQubitFile {
    pub fn from_state(psi: &TwoQubitState) -> Self {
        TwoQubitFile {
            state: psi.amplitudes().map(to_pair),
        }
    }

    pub fn to_state(&self) -> Result<TwoQubitState, CliError> {
        Ok(TwoQubitState::new(self.state.map(from_pair))?)
    }
}

/// A bare `[[re, im], [re, im]]` spinor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinorFile(pub [Complex; 2]);

impl SpinorFile {
    pub fn from_spinor(s: &Spinor) -> Self {
        SpinorFile([to_pair(s.a0()), to_pair(s.a1())])
    }

    pub fn to_spinor(&self) -> Result<Spinor, CliError> {
        Ok(Spinor::new(from_pair(self.0[0]), from_pair(self.0[1]))?)
    }
}

/// Anything `ppt` accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum PptInput {
    Measurement(MeasurementFile),
    TwoQubit(TwoQubitFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorPoint {
    pub direction: [f64; 3],
    pub weight: f64,
}

/// `{"points": [{"direction": [x, y, z], "weight": w}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorFile {
    pub points: Vec<PriorPoint>,
}

impl PriorFile {
    pub fn to_prior(&self) -> Result<DiscretePrior, CliError> {
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let [x, y, z] = p.direction;
            points.push((Direction::new(x, y, z)?, p.weight));
        }
        Ok(DiscretePrior::new(points)?)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Schema {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json(value)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
