//! JSON interchange: multivectors, spinors, structure data and reports.
//!
//! Multivector wire format:
//! `{"p":int,"q":int,"terms":[{"blade":[ascending 1-based indices],"re":..,"im":..}]}`
//! with the zero multivector encoded as an empty terms list. Spinor format:
//! `{"comps":[{"re":..,"im":..}],"chirality":1|-1|null}`.

use crate::algebra::{C64, Multivector, Signature};
use crate::error::KaError;
use crate::instanton::ConditionReport;
use crate::lowdim::StructureData;
use crate::rep::Spinor;
use crate::square::VerificationReport;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(c: C64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

impl From<ComplexJson> for C64 {
    fn from(c: ComplexJson) -> Self {
        C64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub blade: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultivectorJson {
    pub p: u32,
    pub q: u32,
    pub terms: Vec<TermJson>,
}

impl From<&Multivector> for MultivectorJson {
    fn from(mv: &Multivector) -> Self {
        let mut terms = Vec::new();
        for (mask, c) in mv.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let blade: Vec<u32> = (0..mv.sig.dim())
                .filter(|i| (mask >> i) & 1 == 1)
                .map(|i| i + 1)
                .collect();
            terms.push(TermJson {
                blade,
                re: c.re,
                im: c.im,
            });
        }
        MultivectorJson {
            p: mv.sig.p,
            q: mv.sig.q,
            terms,
        }
    }
}

impl MultivectorJson {
    pub fn to_multivector(&self) -> Result<Multivector, KaError> {
        let sig = Signature::new(self.p, self.q);
        if sig.dim() == 0 || sig.dim() > 12 {
            return Err(KaError::UnsupportedDimension(sig.dim()));
        }
        let mut mv = Multivector::zero(sig);
        for term in &self.terms {
            let mut mask = 0usize;
            let mut prev = 0u32;
            for &i in &term.blade {
                if i == 0 || i > sig.dim() {
                    return Err(KaError::Parse(format!(
                        "blade index {} outside 1..={}",
                        i,
                        sig.dim()
                    )));
                }
                if i <= prev {
                    return Err(KaError::Parse(
                        "blade indices must be strictly ascending".to_string(),
                    ));
                }
                prev = i;
                mask |= 1usize << (i - 1);
            }
            mv.set(mask, mv.coeff(mask) + C64::new(term.re, term.im));
        }
        Ok(mv)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpinorJson {
    pub comps: Vec<ComplexJson>,
    pub chirality: Option<i8>,
}

impl From<&Spinor> for SpinorJson {
    fn from(s: &Spinor) -> Self {
        SpinorJson {
            comps: s.comps.iter().map(|c| ComplexJson::from(*c)).collect(),
            chirality: s.chirality,
        }
    }
}

impl SpinorJson {
    pub fn to_spinor(&self) -> Spinor {
        Spinor {
            comps: DVector::from_vec(self.comps.iter().map(|c| C64::from(c.clone())).collect()),
            chirality: self.chirality,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureDataJson {
    pub p: u32,
    pub q: u32,
    /// µ in even dimensions, ℓ in odd dimensions.
    pub mu: i8,
    pub kind: String,
    pub variant: String,
    pub fields: BTreeMap<String, MultivectorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ComplexJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_sign: Option<i8>,
}

pub fn structure_to_json(
    data: &StructureData,
    sig: Signature,
    mu: i8,
    kind: &str,
) -> StructureDataJson {
    let mut fields = BTreeMap::new();
    let mut lambda = None;
    let mut r_sign = None;
    let variant = match data {
        StructureData::IsoOneForm { theta } => {
            fields.insert("theta".into(), MultivectorJson::from(theta));
            "iso_one_form"
        }
        StructureData::RealOneForm { theta, r_sign: rs } => {
            fields.insert("theta".into(), MultivectorJson::from(theta));
            r_sign = Some(*rs);
            "real_one_form"
        }
        StructureData::Kahler { omega, r_sign: rs } => {
            fields.insert("omega".into(), MultivectorJson::from(omega));
            r_sign = Some(*rs);
            "kahler"
        }
        StructureData::IsoPair { theta1, theta2 } => {
            fields.insert("theta1".into(), MultivectorJson::from(theta1));
            fields.insert("theta2".into(), MultivectorJson::from(theta2));
            "iso_pair"
        }
        StructureData::IsoTriple { thetas } => {
            for (i, t) in thetas.iter().enumerate() {
                fields.insert(format!("theta{}", i + 1), MultivectorJson::from(t));
            }
            "iso_triple"
        }
        StructureData::IsoQuad { thetas } => {
            for (i, t) in thetas.iter().enumerate() {
                fields.insert(format!("theta{}", i + 1), MultivectorJson::from(t));
            }
            "iso_quad"
        }
        StructureData::OmegaTheta { omega, theta4, r_sign: rs } => {
            fields.insert("omega".into(), MultivectorJson::from(omega));
            fields.insert("theta4".into(), MultivectorJson::from(theta4));
            r_sign = Some(*rs);
            "omega_theta"
        }
        StructureData::ComplexFour { lambda: l, omega4 } => {
            fields.insert("omega4".into(), MultivectorJson::from(omega4));
            lambda = Some(ComplexJson::from(*l));
            "complex_four"
        }
        StructureData::LorentzPair { u, omega, v } => {
            fields.insert("u".into(), MultivectorJson::from(u));
            fields.insert("omega".into(), MultivectorJson::from(omega));
            fields.insert("v".into(), MultivectorJson::from(v));
            "lorentz_pair"
        }
    };
    StructureDataJson {
        p: sig.p,
        q: sig.q,
        mu,
        kind: kind.to_string(),
        variant: variant.to_string(),
        fields,
        lambda,
        r_sign,
    }
}

pub fn structure_from_json(json: &StructureDataJson) -> Result<StructureData, KaError> {
    let get = |name: &str| -> Result<Multivector, KaError> {
        json.fields
            .get(name)
            .ok_or_else(|| KaError::Parse(format!("missing structure field `{name}`")))?
            .to_multivector()
    };
    let rs = json.r_sign.unwrap_or(1);
    Ok(match json.variant.as_str() {
        "iso_one_form" => StructureData::IsoOneForm { theta: get("theta")? },
        "real_one_form" => StructureData::RealOneForm {
            theta: get("theta")?,
            r_sign: rs,
        },
        "kahler" => StructureData::Kahler {
            omega: get("omega")?,
            r_sign: rs,
        },
        "iso_pair" => StructureData::IsoPair {
            theta1: get("theta1")?,
            theta2: get("theta2")?,
        },
        "iso_triple" => StructureData::IsoTriple {
            thetas: [get("theta1")?, get("theta2")?, get("theta3")?],
        },
        "iso_quad" => StructureData::IsoQuad {
            thetas: [get("theta1")?, get("theta2")?, get("theta3")?, get("theta4")?],
        },
        "omega_theta" => StructureData::OmegaTheta {
            omega: get("omega")?,
            theta4: get("theta4")?,
            r_sign: rs,
        },
        "complex_four" => StructureData::ComplexFour {
            lambda: json
                .lambda
                .clone()
                .map(C64::from)
                .ok_or_else(|| KaError::Parse("missing lambda".into()))?,
            omega4: get("omega4")?,
        },
        "lorentz_pair" => StructureData::LorentzPair {
            u: get("u")?,
            omega: get("omega")?,
            v: get("v")?,
        },
        other => return Err(KaError::Parse(format!("unknown variant `{other}`"))),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationJson {
    pub passed: bool,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_beta: Option<MultivectorJson>,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        VerificationJson {
            passed: r.passed,
            residuals: r.residuals.clone(),
            witness_beta: r.witness_beta.as_ref().map(MultivectorJson::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionJson {
    pub case: String,
    pub passed: bool,
    pub rows: Vec<ConditionRowJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionRowJson {
    pub name: String,
    pub residual: f64,
}

impl From<&ConditionReport> for ConditionJson {
    fn from(r: &ConditionReport) -> Self {
        ConditionJson {
            case: r.dimension_case.tag().to_string(),
            passed: r.passed,
            rows: r
                .rows
                .iter()
                .map(|(name, residual)| ConditionRowJson {
                    name: name.clone(),
                    residual: *residual,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    #[test]
    fn multivector_roundtrip() {
        let mut rng = sample::sub_rng(37, "json-mv", 0);
        for (p, q) in [(3, 0), (2, 2), (5, 1)] {
            let sig = Signature::new(p, q);
            let mv = sample::random_form(&mut rng, sig, None);
            let json = MultivectorJson::from(&mv);
            let text = serde_json::to_string(&json).unwrap();
            let parsed: MultivectorJson = serde_json::from_str(&text).unwrap();
            let back = parsed.to_multivector().unwrap();
            assert!(back.dist(&mv) < 1e-15);
        }
        // zero multivector: empty terms
        let zero = Multivector::zero(Signature::new(2, 0));
        assert!(MultivectorJson::from(&zero).terms.is_empty());
    }

    #[test]
    fn spinor_roundtrip() {
        let mut rng = sample::sub_rng(37, "json-spinor", 0);
        let sig = Signature::new(4, 0);
        let s = sample::random_spinor(&mut rng, sig);
        let json = SpinorJson::from(&s);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: SpinorJson = serde_json::from_str(&text).unwrap();
        assert!((parsed.to_spinor().comps - s.comps).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_blades() {
        let json = MultivectorJson {
            p: 2,
            q: 0,
            terms: vec![TermJson {
                blade: vec![2, 1],
                re: 1.0,
                im: 0.0,
            }],
        };
        assert!(json.to_multivector().is_err());
        let json = MultivectorJson {
            p: 2,
            q: 0,
            terms: vec![TermJson {
                blade: vec![3],
                re: 1.0,
                im: 0.0,
            }],
        };
        assert!(json.to_multivector().is_err());
    }

    #[test]
    fn structure_roundtrip() {
        let sig = Signature::new(4, 0);
        let e12 = Multivector::basis_one_form(sig, 1)
            .wedge(&Multivector::basis_one_form(sig, 2))
            .unwrap();
        let e34 = Multivector::basis_one_form(sig, 3)
            .wedge(&Multivector::basis_one_form(sig, 4))
            .unwrap();
        let data = StructureData::Kahler {
            omega: e12.add(&e34).unwrap(),
            r_sign: 1,
        };
        let json = structure_to_json(&data, sig, 1, "hermitian");
        let text = serde_json::to_string(&json).unwrap();
        let parsed: StructureDataJson = serde_json::from_str(&text).unwrap();
        match structure_from_json(&parsed).unwrap() {
            StructureData::Kahler { omega, r_sign } => {
                assert_eq!(r_sign, 1);
                assert!(omega.dist(&e12.add(&e34).unwrap()) < 1e-15);
            }
            _ => panic!("wrong variant"),
        }
    }
}
