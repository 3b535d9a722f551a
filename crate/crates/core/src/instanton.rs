//! Spinorial instanton (F·η = 0) and curving (H·η = 0) conditions as
//! degree-separated form equations, plus the Clifford-kernel oracle and the
//! nullspace machinery proving both formulations equivalent.

use crate::algebra::{C64, I_C, Multivector, Signature};
use crate::error::KaError;
use crate::linalg::{nullspace, span_residual, CMat, CVec};
use crate::lowdim::{LorentzFrame, StructureData};
use crate::rep::{CliffordRep, Spinor};

pub const CONDITION_TOL: f64 = 1e-9;
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionCase {
    D2,
    D3,
    D4,
    D5,
    D6,
    D8,
    D6Lorentz,
}

impl ConditionCase {
    pub fn parse(tag: &str) -> Result<Self, KaError> {
        match tag {
            "d2" => Ok(ConditionCase::D2),
            "d3" => Ok(ConditionCase::D3),
            "d4" => Ok(ConditionCase::D4),
            "d5" => Ok(ConditionCase::D5),
            "d6" => Ok(ConditionCase::D6),
            "d8" => Ok(ConditionCase::D8),
            "d6lorentz" => Ok(ConditionCase::D6Lorentz),
            other => Err(KaError::UnknownCase(other.to_string())),
        }
    }

    pub fn signature(&self) -> Signature {
        match self {
            ConditionCase::D2 => Signature::new(2, 0),
            ConditionCase::D3 => Signature::new(3, 0),
            ConditionCase::D4 => Signature::new(4, 0),
            ConditionCase::D5 => Signature::new(5, 0),
            ConditionCase::D6 => Signature::new(6, 0),
            ConditionCase::D8 => Signature::new(8, 0),
            ConditionCase::D6Lorentz => Signature::new(5, 1),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConditionCase::D2 => "d2",
            ConditionCase::D3 => "d3",
            ConditionCase::D4 => "d4",
            ConditionCase::D5 => "d5",
            ConditionCase::D6 => "d6",
            ConditionCase::D8 => "d8",
            ConditionCase::D6Lorentz => "d6lorentz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    Instanton,
    Curving,
}

/// Degree of the form the condition constrains.
pub fn condition_degree(kind: ConditionKind) -> u32 {
    match kind {
        ConditionKind::Instanton => 2,
        ConditionKind::Curving => 3,
    }
}

/// Per-equation residual report for one condition evaluation.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub dimension_case: ConditionCase,
    pub rows: Vec<(String, f64)>,
    pub passed: bool,
}

impl ConditionReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

fn muf(mu: i8) -> C64 {
    C64::new(mu as f64, 0.0)
}

fn data_scale(data: &StructureData) -> f64 {
    match data {
        StructureData::RealOneForm { theta, .. } => 1.0 + theta.norm(),
        StructureData::Kahler { omega, .. } => 1.0 + omega.norm(),
        StructureData::OmegaTheta { omega, theta4, .. } => 1.0 + omega.norm() + theta4.norm(),
        StructureData::LorentzPair { u, omega, .. } => 1.0 + u.norm() + omega.norm(),
        _ => 1.0,
    }
}

fn kahler_parts(data: &StructureData, half: f64) -> Result<(Multivector, C64), KaError> {
    match data {
        StructureData::Kahler { omega, r_sign } => {
            let r = (omega.inner(omega)? / half).sqrt() * (*r_sign as f64);
            Ok((omega.clone(), r))
        }
        _ => Err(KaError::UnknownCase(
            "condition case needs Kahler structure data".into(),
        )),
    }
}

type NamedRows = Vec<(String, Multivector)>;

fn row(name: &str, mv: Multivector) -> (String, Multivector) {
    (name.to_string(), mv)
}

/// The spinorial instanton equations as raw multivector rows; scale factors
/// come from the square data (r = α̂^(0)), not from table typography.
pub fn instanton_rows(
    f: &Multivector,
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
) -> Result<NamedRows, KaError> {
    if !f.is_homogeneous(2, 0.0) {
        return Err(KaError::DegreePrecondition("F must be a two-form"));
    }
    let mu = mu_or_ell;
    match case {
        ConditionCase::D2 => Ok(vec![row("flat", f.clone())]),
        ConditionCase::D3 => {
            let StructureData::RealOneForm { theta, r_sign } = data else {
                return Err(KaError::UnknownCase("d3 needs RealOneForm data".into()));
            };
            let ell = muf(mu);
            let r = theta.inner(theta)?.sqrt() * (*r_sign as f64);
            let star_f = f.hodge();
            Ok(vec![
                row("scalar", Multivector::scalar(f.sig, star_f.inner(theta)?)),
                row(
                    "vector",
                    star_f
                        .scale(r)
                        .sub(&Multivector::interior(theta, f)?.scale(I_C * ell))?,
                ),
            ])
        }
        ConditionCase::D4 => {
            let (omega, r) = kahler_parts(data, 2.0)?;
            Ok(vec![
                row("wedge", f.wedge(&omega)?),
                row(
                    "selfdual",
                    f.scale(r)
                        .add(&f.hodge().scale(r * muf(mu)))?
                        .sub(&f.generalized(&omega, 1)?.scale(I_C))?,
                ),
                row("inner", Multivector::scalar(f.sig, f.inner(&omega)?)),
            ])
        }
        ConditionCase::D5 => {
            let (omega, r) = kahler_parts(data, 2.0)?;
            let ell = muf(mu);
            let theta = omega.wedge(&omega)?.hodge().scale(ell / (r * 2.0));
            Ok(vec![
                row(
                    "two_form",
                    f.scale(r)
                        .add(&f.wedge(&theta)?.hodge().scale(ell))?
                        .sub(&f.generalized(&omega, 1)?.scale(I_C))?,
                ),
                row(
                    "one_form",
                    f.generalized(&theta, 1)?
                        .add(&f.wedge(&omega)?.hodge().scale(I_C * ell))?,
                ),
                row("scalar", Multivector::scalar(f.sig, f.inner(&omega)?)),
            ])
        }
        ConditionCase::D6 => {
            let (omega, r) = kahler_parts(data, 3.0)?;
            Ok(vec![
                row(
                    "four_form",
                    f.hodge()
                        .scale(r * muf(mu))
                        .add(&f.wedge(&omega)?)?
                        .sub(&f.generalized(&omega, 1)?.hodge().scale(I_C * muf(mu)))?,
                ),
                row("scalar", Multivector::scalar(f.sig, f.inner(&omega)?)),
            ])
        }
        ConditionCase::D8 => {
            let StructureData::OmegaTheta { omega, theta4, r_sign } = data else {
                return Err(KaError::UnknownCase("d8 needs OmegaTheta data".into()));
            };
            let r = ((omega.inner(omega)? * 2.0 + theta4.inner(theta4)?) / 14.0).sqrt()
                * (*r_sign as f64);
            Ok(vec![
                row("scalar", Multivector::scalar(f.sig, f.inner(omega)?)),
                row(
                    "two_form",
                    f.scale(r)
                        .sub(&f.generalized(omega, 1)?.scale(I_C))?
                        .sub(&f.generalized(theta4, 2)?)?,
                ),
                row(
                    "four_form",
                    f.wedge(omega)?
                        .add(&f.generalized(theta4, 1)?.scale(I_C))?
                        .add(&f.wedge(omega)?.hodge().scale(muf(mu)))?,
                ),
                row(
                    "six_form",
                    f.hodge()
                        .scale(r)
                        .sub(&f.wedge(theta4)?.scale(muf(mu)))?
                        .sub(&f.generalized(omega, 1)?.hodge().scale(I_C))?,
                ),
            ])
        }
        ConditionCase::D6Lorentz => Err(KaError::UnknownCase(
            "the Lorentzian case is a curving condition; use curving rows".into(),
        )),
    }
}

/// The spinorial curving equations as raw multivector rows.
pub fn curving_rows(
    h: &Multivector,
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
) -> Result<NamedRows, KaError> {
    if !h.is_homogeneous(3, 0.0) {
        return Err(KaError::DegreePrecondition("H must be a three-form"));
    }
    let mu = mu_or_ell;
    match case {
        ConditionCase::D2 => Err(KaError::UnknownCase(
            "no three-form condition in dimension two".into(),
        )),
        ConditionCase::D3 => Ok(vec![row("flat", h.clone())]),
        ConditionCase::D4 => {
            let (omega, r) = kahler_parts(data, 2.0)?;
            Ok(vec![
                row(
                    "three_form",
                    h.scale(r).add(&h.generalized(&omega, 1)?.scale(I_C))?,
                ),
                row(
                    "one_form",
                    h.hodge()
                        .scale(r)
                        .sub(&h.generalized(&omega, 2)?.scale(I_C * muf(mu)))?,
                ),
            ])
        }
        ConditionCase::D5 => {
            let (omega, r) = kahler_parts(data, 2.0)?;
            let ell = muf(mu);
            let theta = omega.wedge(&omega)?.hodge().scale(ell / (r * 2.0));
            let star_h = h.hodge();
            Ok(vec![
                row(
                    "two_form",
                    star_h
                        .scale(r)
                        .add(&h.generalized(&theta, 1)?.scale(ell))?
                        .sub(&star_h.generalized(&omega, 1)?.scale(I_C))?,
                ),
                row(
                    "one_form",
                    h.wedge(&theta)?
                        .hodge()
                        .add(&h.generalized(&omega, 2)?.scale(I_C * ell))?,
                ),
                row("scalar", Multivector::scalar(h.sig, star_h.inner(&omega)?)),
            ])
        }
        ConditionCase::D6 => {
            let (omega, r) = kahler_parts(data, 3.0)?;
            Ok(vec![
                row(
                    "wedge",
                    h.add(&h.hodge().scale(I_C * muf(mu)))?.wedge(&omega)?,
                ),
                row(
                    "main",
                    h.hodge()
                        .scale(r * muf(mu))
                        .add(&h.generalized(&omega, 1)?)?
                        .add(&h.generalized(&omega, 1)?.hodge().scale(I_C * muf(mu)))?
                        .sub(&h.scale(I_C * r))?,
                ),
            ])
        }
        ConditionCase::D8 => {
            let StructureData::OmegaTheta { omega, theta4, r_sign } = data else {
                return Err(KaError::UnknownCase("d8 needs OmegaTheta data".into()));
            };
            let r = ((omega.inner(omega)? * 2.0 + theta4.inner(theta4)?) / 14.0).sqrt()
                * (*r_sign as f64);
            Ok(vec![
                row(
                    "one_form",
                    h.generalized(omega, 2)?
                        .scale(I_C)
                        .add(&h.generalized(theta4, 3)?)?,
                ),
                row(
                    "five_form",
                    h.wedge(theta4)?
                        .sub(&h.generalized(omega, 2)?.hodge().scale(I_C * muf(mu)))?,
                ),
                row(
                    "three_form_a",
                    h.scale(r)
                        .add(&h.generalized(omega, 1)?.scale(I_C))?
                        .sub(&h.generalized(theta4, 2)?)?
                        .add(&h.wedge(omega)?.hodge().scale(I_C * muf(mu)))?,
                ),
                row(
                    "three_form_b",
                    h.hodge()
                        .scale(r * muf(mu))
                        .sub(&h.wedge(omega)?.scale(I_C))?
                        .sub(&h.generalized(theta4, 1)?)?
                        .add(&h.generalized(omega, 1)?.hodge().scale(I_C * muf(mu)))?,
                ),
            ])
        }
        ConditionCase::D6Lorentz => {
            let StructureData::LorentzPair { u, omega, v } = data else {
                return Err(KaError::UnknownCase(
                    "d6lorentz needs LorentzPair data".into(),
                ));
            };
            let frame = LorentzFrame::build(u, v)?;
            let (beta, _chi_u, chi_v, h_perp) = frame.components(h)?;
            Ok(vec![
                row(
                    "current",
                    beta.sub(&frame.star_uv(&h_perp).scale(muf(mu)))?
                        .sub(&h_perp.generalized(omega, 2)?.scale(I_C))?
                        .add(&Multivector::interior(&beta, omega)?.scale(I_C))?,
                ),
                row("transverse_wedge", chi_v.wedge(omega)?),
                row(
                    "transverse_dual",
                    frame
                        .star_uv(&chi_v)
                        .scale(muf(mu))
                        .sub(&chi_v)?
                        .add(&chi_v.generalized(omega, 1)?.scale(I_C))?,
                ),
            ])
        }
    }
}

fn report_from(rows: NamedRows, case: ConditionCase, scale: f64) -> ConditionReport {
    let rows: Vec<(String, f64)> = rows
        .into_iter()
        .map(|(name, mv)| (name, mv.norm() / scale.max(1e-300)))
        .collect();
    let passed = rows.iter().all(|(_, r)| *r < CONDITION_TOL);
    ConditionReport {
        dimension_case: case,
        rows,
        passed,
    }
}

/// Relative per-row residual report of the instanton condition.
pub fn instanton_residual(
    f: &Multivector,
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
) -> Result<ConditionReport, KaError> {
    let rows = instanton_rows(f, data, mu_or_ell, case)?;
    Ok(report_from(rows, case, f.norm() * data_scale(data)))
}

/// Relative per-row residual report of the curving condition.
pub fn curving_residual(
    h: &Multivector,
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
) -> Result<ConditionReport, KaError> {
    let rows = curving_rows(h, data, mu_or_ell, case)?;
    Ok(report_from(rows, case, h.norm() * data_scale(data)))
}

/// Ground truth: ‖quantize(form)·η‖ / (‖form‖·‖η‖).
pub fn clifford_kernel_oracle(form: &Multivector, eta: &Spinor, rep: &CliffordRep) -> f64 {
    let applied = rep.quantize(form) * &eta.comps;
    applied.norm() / (form.norm() * eta.norm()).max(1e-300)
}

fn degree_masks(sig: Signature, degree: u32) -> Vec<usize> {
    (0..sig.blade_count())
        .filter(|m| (*m as u64).count_ones() == degree)
        .collect()
}

/// Matrix of the map (degree-k form) ↦ Ψ(form)·η in the blade basis.
pub fn clifford_kernel_matrix(eta: &Spinor, rep: &CliffordRep, degree: u32) -> CMat {
    let masks = degree_masks(rep.sig, degree);
    let n = rep.dim();
    let blades = rep.blade_ops();
    let mut m = CMat::zeros(n, masks.len());
    for (col, &mask) in masks.iter().enumerate() {
        let v = &blades[mask] * &eta.comps;
        for r in 0..n {
            m[(r, col)] = v[r];
        }
    }
    m
}

/// Complex dimension of {degree-k forms X : X·η = 0}.
pub fn kernel_dimension(eta: &Spinor, rep: &CliffordRep, degree: u32) -> Result<usize, KaError> {
    if eta.norm() == 0.0 {
        return Err(KaError::ZeroSpinor);
    }
    Ok(nullspace(&clifford_kernel_matrix(eta, rep, degree), KERNEL_TOL).len())
}

/// Matrix of the degree-separated row system in the blade basis, optionally
/// excluding named rows (for reduced-system identities).
pub fn row_system_matrix(
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
    kind: ConditionKind,
    exclude_rows: &[&str],
) -> Result<CMat, KaError> {
    let sig = case.signature();
    let degree = condition_degree(kind);
    let masks = degree_masks(sig, degree);
    let blade_rows = sig.blade_count();
    let eval = |form: &Multivector| -> Result<Vec<Multivector>, KaError> {
        let rows = match kind {
            ConditionKind::Instanton => instanton_rows(form, data, mu_or_ell, case)?,
            ConditionKind::Curving => curving_rows(form, data, mu_or_ell, case)?,
        };
        Ok(rows
            .into_iter()
            .filter(|(name, _)| !exclude_rows.contains(&name.as_str()))
            .map(|(_, mv)| mv)
            .collect())
    };
    let probe = eval(&Multivector::blade(sig, masks[0]))?;
    let mut m = CMat::zeros(probe.len() * blade_rows, masks.len());
    for (col, &mask) in masks.iter().enumerate() {
        let outputs = eval(&Multivector::blade(sig, mask))?;
        for (block, mv) in outputs.iter().enumerate() {
            for (idx, &c) in mv.coeffs.iter().enumerate() {
                m[(block * blade_rows + idx, col)] = c;
            }
        }
    }
    Ok(m)
}

/// Outcome of comparing the row-system nullspace with the Clifford kernel.
#[derive(Debug, Clone)]
pub struct KernelEquivalence {
    pub system_dim: usize,
    pub clifford_dim: usize,
    pub max_cross_residual: f64,
}

impl KernelEquivalence {
    pub fn passed(&self) -> bool {
        self.system_dim == self.clifford_dim && self.max_cross_residual < KERNEL_TOL
    }
}

/// Nullspace of the degree-separated system vs. the Clifford kernel of η:
/// dimensions must agree and the bases must mutually contain each other.
pub fn kernel_equivalence(
    eta: &Spinor,
    rep: &CliffordRep,
    data: &StructureData,
    mu_or_ell: i8,
    case: ConditionCase,
    kind: ConditionKind,
) -> Result<KernelEquivalence, KaError> {
    let degree = condition_degree(kind);
    let sys = row_system_matrix(data, mu_or_ell, case, kind, &[])?;
    let sys_null = nullspace(&sys, KERNEL_TOL);
    let cl = clifford_kernel_matrix(eta, rep, degree);
    let cl_null = nullspace(&cl, KERNEL_TOL);
    let max_cross = cross_residual(&sys_null, &cl_null).max(cross_residual(&cl_null, &sys_null));
    Ok(KernelEquivalence {
        system_dim: sys_null.len(),
        clifford_dim: cl_null.len(),
        max_cross_residual: max_cross,
    })
}

fn cross_residual(a: &[CVec], b: &[CVec]) -> f64 {
    a.iter()
        .map(|x| span_residual(x, b))
        .fold(0.0, f64::max)
}
