//! JSON interchange: complex numbers are `[re, im]` pairs, matrices are row-major.

use serde::{Deserialize, Serialize};
use triwit_core::linalg::{CMat, C64};
use triwit_core::tensor::{TriDims, TriOperator, TriVector};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonVector {
    pub dims: [usize; 3],
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonMatrix {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 3]>,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

/// Anything an input file may hold.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum JsonInput {
    Matrix(JsonMatrix),
    Vector(JsonVector),
}

pub fn complex(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn to_complex(data: &[[f64; 2]]) -> Result<Vec<C64>, CliError> {
    data.iter()
        .map(|&[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(C64::new(re, im))
            } else {
                Err(CliError::Input("non-finite number in data".into()))
            }
        })
        .collect()
}

fn dims(d: [usize; 3]) -> Result<TriDims, CliError> {
    TriDims::from_array(d).map_err(|e| CliError::Input(e.to_string()))
}

impl JsonVector {
    pub fn from_vector(xi: &TriVector) -> Self {
        Self {
            dims: xi.dims().as_array(),
            data: xi.data().iter().copied().map(complex).collect(),
        }
    }
}

impl JsonMatrix {
    pub fn from_operator(op: &TriOperator) -> Self {
        let m = op.mat();
        Self {
            dims: Some(op.dims().as_array()),
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().copied().map(complex).collect(),
        }
    }
}

impl JsonInput {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
    }

    /// Reads a vector; `dims` overrides the dims stored in the file.
    pub fn into_vector(self, override_dims: Option<[usize; 3]>) -> Result<TriVector, CliError> {
        match self {
            JsonInput::Vector(v) => {
                let d = dims(override_dims.unwrap_or(v.dims))?;
                TriVector::new(d, to_complex(&v.data)?).map_err(|e| CliError::Input(e.to_string()))
            }
            JsonInput::Matrix(_) => Err(CliError::Input("expected a vector, found a matrix".into())),
        }
    }

    /// Reads an operator; a vector `ξ` is read as the projector `|ξ><ξ|`.
    pub fn into_operator(self, override_dims: Option<[usize; 3]>) -> Result<TriOperator, CliError> {
        match self {
            JsonInput::Matrix(m) => {
                let d = override_dims
                    .or(m.dims)
                    .ok_or_else(|| CliError::Input("matrix has no dims; pass --dims a,b,c".into()))?;
                let mat = CMat::new(m.rows, m.cols, to_complex(&m.data)?).map_err(|e| CliError::Input(e.to_string()))?;
                TriOperator::new(dims(d)?, mat).map_err(|e| CliError::Input(e.to_string()))
            }
            v @ JsonInput::Vector(_) => Ok(v.into_vector(override_dims)?.projector()),
        }
    }
}
