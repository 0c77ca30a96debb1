//! JSON code descriptors, e.g.
//! `{"family":"multiplicity","m":2,"d":2,"s":2,"q":7,"modulus":[0,1]}`.

use serde::{Deserialize, Serialize};

use crate::array_code::{ArrayCode, ArrayCodeParams};
use crate::code::AvailabilityCode;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::multiplicity::{MultCodeParams, MultiplicityCode};
use crate::pir::{BinaryExpansion, Replicated};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Descriptor {
    Multiplicity {
        m: usize,
        d: usize,
        s: usize,
        q: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
    Array {
        r: usize,
        p: usize,
        #[serde(rename = "S")]
        slopes: Vec<usize>,
        #[serde(default)]
        global_parity: bool,
    },
    BinaryExpansion {
        base: Box<Descriptor>,
    },
    Replicated {
        copies: usize,
        base: Box<Descriptor>,
    },
}

impl Descriptor {
    pub fn multiplicity(params: &MultCodeParams) -> Self {
        Descriptor::Multiplicity {
            m: params.m,
            d: params.d,
            s: params.s,
            q: params.q(),
            modulus: Some(params.field.modulus.clone()),
        }
    }

    pub fn array(params: &ArrayCodeParams) -> Self {
        Descriptor::Array {
            r: params.r,
            p: params.p,
            slopes: params.slopes.clone(),
            global_parity: params.global_parity,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("malformed descriptor: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors always serialize")
    }

    pub fn mult_params(&self) -> Option<Result<MultCodeParams>> {
        match self {
            Descriptor::Multiplicity { m, d, s, q, modulus } => Some(mult_params(*m, *d, *s, *q, modulus.as_deref())),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn AvailabilityCode>> {
        Ok(match self {
            Descriptor::Multiplicity { m, d, s, q, modulus } => {
                Box::new(MultiplicityCode::new(mult_params(*m, *d, *s, *q, modulus.as_deref())?)?)
            }
            Descriptor::Array { r, p, slopes, global_parity } => {
                Box::new(ArrayCode::new(ArrayCodeParams::new(*r, *p, slopes.clone(), *global_parity)?)?)
            }
            Descriptor::BinaryExpansion { base } => Box::new(BinaryExpansion::new(base.build()?)?),
            Descriptor::Replicated { copies, base } => Box::new(Replicated::new(base.build()?, *copies)?),
        })
    }
}

fn mult_params(m: usize, d: usize, s: usize, q: u32, modulus: Option<&[u32]>) -> Result<MultCodeParams> {
    let mut field = FieldSpec::with_order(q)?;
    if let Some(modulus) = modulus {
        field.modulus = modulus.to_vec();
        field.validate()?;
    }
    Ok(MultCodeParams { m, d, s, field })
}
