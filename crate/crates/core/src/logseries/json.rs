use serde::{Deserialize, Serialize};

use super::LogPowerSeries;
use crate::error::{Error, Result};
use crate::scalar::{RealRepr, Scalar};

/// Serialized form of a [`LogPowerSeries`]. Exact coefficients are written as
/// `"p/q"` strings, floats as JSON numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpsJson {
    pub variable: String,
    pub bases: Vec<[RealRepr; 2]>,
    pub terms: Vec<TermJson>,
    #[serde(rename = "M_max")]
    pub m_max: u32,
    #[serde(rename = "K_max")]
    pub k_max: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub base: usize,
    pub offset: u32,
    pub logpow: u32,
    pub re: RealRepr,
    pub im: RealRepr,
}

impl<S: Scalar> LogPowerSeries<S> {
    pub fn to_json(&self) -> LpsJson {
        LpsJson {
            variable: self.var.clone(),
            bases: self.bases.iter().map(|b| b.to_repr()).collect(),
            terms: self
                .terms
                .iter()
                .map(|(&(base, offset, logpow), c)| {
                    let [re, im] = c.to_repr();
                    TermJson { base, offset, logpow, re, im }
                })
                .collect(),
            m_max: self.m_max,
            k_max: self.k_max,
            truncated: self.truncated,
        }
    }

    pub fn from_json(doc: &LpsJson) -> Result<Self> {
        let bases = doc.bases.iter().map(S::from_repr).collect::<Result<Vec<S>>>()?;
        let mut raw = Vec::with_capacity(doc.terms.len());
        for t in &doc.terms {
            let base = bases
                .get(t.base)
                .ok_or_else(|| Error::Parse(format!("term refers to missing base {}", t.base)))?;
            if t.offset > doc.m_max || t.logpow > doc.k_max {
                return Err(Error::Parse("term outside the declared caps".into()));
            }
            let c = S::from_repr(&[t.re.clone(), t.im.clone()])?;
            raw.push((base.clone() + S::from_i64(t.offset as i64), t.logpow, c));
        }
        let mut out = Self::from_terms(&doc.variable, raw, doc.m_max, doc.k_max);
        out.truncated |= doc.truncated;
        Ok(out)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("series serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}
