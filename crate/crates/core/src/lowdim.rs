//! Closed-form constructors and verifiers for the worked dimensions:
//! Euclidean d = 2..6, Euclidean d = 8 chiral (pure and impure) and
//! Lorentzian d = 6 chiral, plus Plücker factorization of decomposable
//! squares and the screen-space machinery for the Lorentzian splitting.

use crate::algebra::{C64, I_C, Multivector, ONE_C, Signature};
use crate::error::KaError;
use crate::linalg::CMat;
use crate::square::VerificationReport;
use std::collections::BTreeMap;

pub const STRUCTURE_TOL: f64 = 1e-9;
pub const DECOMPOSABILITY_TOL: f64 = 1e-8;
/// Pure/impure discrimination threshold for |⟨Ω,Ω⟩| against ‖Ω‖².
pub const PURITY_TOL: f64 = 1e-8;

/// The structure content extracted from (or used to build) a square.
#[derive(Debug, Clone)]
pub enum StructureData {
    /// d=2,3 bilinear: isotropic complex one-form θ.
    IsoOneForm { theta: Multivector },
    /// d=3 Hermitian: real one-form ϑ plus the sign of the scalar part.
    RealOneForm { theta: Multivector, r_sign: i8 },
    /// d=2,4,5,6 Hermitian: real two-form ω (d=2 stores ω = µrν).
    Kahler { omega: Multivector, r_sign: i8 },
    /// d=4,5 bilinear: isotropic orthogonal pair.
    IsoPair { theta1: Multivector, theta2: Multivector },
    /// d=6 bilinear (Euclidean and Lorentzian): isotropic orthogonal triple.
    IsoTriple { thetas: [Multivector; 3] },
    /// d=8 bilinear, pure case: four isotropic orthogonal factors.
    IsoQuad { thetas: [Multivector; 4] },
    /// d=8 Hermitian: real two-form ω and real self-dual four-form Θ.
    OmegaTheta { omega: Multivector, theta4: Multivector, r_sign: i8 },
    /// d=8 bilinear, impure case: λ = α^(0) and the middle four-form Ω.
    ComplexFour { lambda: C64, omega4: Multivector },
    /// (5,1) Hermitian: Dirac current u, screen two-form ω, conjugate v.
    LorentzPair { u: Multivector, omega: Multivector, v: Multivector },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareCase {
    Hermitian,
    Bilinear,
}

fn require(name: &'static str, residual: f64) -> Result<(), KaError> {
    if residual > STRUCTURE_TOL {
        Err(KaError::StructureInvariant { name, residual })
    } else {
        Ok(())
    }
}

fn sqrt_c(x: C64) -> C64 {
    x.sqrt()
}

/// Metric-free coordinate contraction (deletion) with the i-th basis vector.
pub fn contract_coord(a: &Multivector, i: u32) -> Multivector {
    let bit = 1usize << (i - 1);
    let mut out = Multivector::zero(a.sig);
    for (mask, &c) in a.coeffs.iter().enumerate() {
        if c == crate::algebra::ZERO_C || (mask & bit) == 0 {
            continue;
        }
        let below = ((mask & (bit - 1)) as u64).count_ones();
        let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
        out.set(mask & !bit, c * sign);
    }
    out
}

/// Plücker residual max_v ‖(ι_v ρ) ∧ ρ‖ / ‖ρ‖² over coordinate directions.
pub fn plucker_residual(rho: &Multivector) -> f64 {
    let scale = rho.norm().powi(2).max(1e-300);
    let mut worst = 0.0f64;
    for i in 1..=rho.sig.dim() {
        let c = contract_coord(rho, i);
        let w = c.wedge(rho).expect("same signature");
        worst = worst.max(w.norm() / scale);
    }
    worst
}

/// Factor a decomposable k-form into k one-forms whose wedge reproduces it.
/// The factor span is recovered from the right singular vectors of all
/// (k−1)-fold coordinate contractions; factors come back GL-rescaled.
pub fn factor_decomposable(rho: &Multivector, k: u32) -> Result<Vec<Multivector>, KaError> {
    let res = plucker_residual(rho);
    if res > DECOMPOSABILITY_TOL {
        return Err(KaError::NotDecomposable(res));
    }
    let sig = rho.sig;
    let d = sig.dim() as usize;
    if k == 1 {
        return Ok(vec![rho.clone()]);
    }
    // all (k−1)-fold contractions, rows of the span matrix
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut subset = vec![0u32; (k - 1) as usize];
    collect_contractions(rho, &mut subset, 0, 1, &mut rows);
    let m = CMat::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    // the row space of M is spanned by the rows of V^H taken verbatim
    let mut basis: Vec<Multivector> = Vec::new();
    for j in 0..k as usize {
        let row = v_t.row(j);
        let comps: Vec<C64> = (0..d).map(|c| row[c]).collect();
        basis.push(Multivector::one_form(sig, &comps));
    }
    // fit the overall complex scale on the first factor
    let mut wedge = basis[0].clone();
    for b in basis.iter().skip(1) {
        wedge = wedge.wedge(b)?;
    }
    let num: C64 = wedge
        .coeffs
        .iter()
        .zip(rho.coeffs.iter())
        .map(|(t, r)| t.conj() * r)
        .sum();
    let den: f64 = wedge.coeffs.iter().map(|t| t.norm_sqr()).sum();
    if den == 0.0 {
        return Err(KaError::NotDecomposable(1.0));
    }
    let c = num / den;
    let check = wedge.scale(c).dist(rho) / rho.norm().max(1e-300);
    if check > DECOMPOSABILITY_TOL {
        return Err(KaError::NotDecomposable(check));
    }
    basis[0] = basis[0].scale(c);
    Ok(basis)
}

fn collect_contractions(
    rho: &Multivector,
    subset: &mut Vec<u32>,
    depth: usize,
    start: u32,
    rows: &mut Vec<Vec<C64>>,
) {
    if depth == subset.len() {
        let mut cur = rho.clone();
        for &i in subset.iter() {
            cur = contract_coord(&cur, i);
        }
        let d = rho.sig.dim() as usize;
        rows.push((0..d).map(|j| cur.coeff(1usize << j)).collect());
        return;
    }
    for i in start..=rho.sig.dim() {
        subset[depth] = i;
        collect_contractions(rho, subset, depth + 1, i + 1, rows);
    }
}

/// Max |⟨θ_i,θ_j⟩| over all pairs (including i = j): total isotropy defect.
fn isotropy_defect(thetas: &[Multivector]) -> f64 {
    let scale = thetas
        .iter()
        .map(|t| t.norm())
        .fold(0.0f64, f64::max)
        .powi(2)
        .max(1e-300);
    let mut worst = 0.0f64;
    for i in 0..thetas.len() {
        for j in i..thetas.len() {
            let v = thetas[i].inner(&thetas[j]).expect("same signature");
            worst = worst.max(v.norm() / scale);
        }
    }
    worst
}

fn hodge_eigen_defect(a: &Multivector, eigen: C64) -> f64 {
    a.hodge().sub(&a.scale(eigen)).expect("same signature").norm() / a.norm().max(1e-300)
}

fn case_tag(sig: Signature, kind: SquareCase) -> (u32, bool) {
    (sig.dim(), matches!(kind, SquareCase::Bilinear))
}

/// The dimensions and signatures with worked closed forms.
fn check_worked_signature(sig: Signature) -> Result<(), KaError> {
    let euclidean = sig.q == 0 && matches!(sig.dim(), 2..=6 | 8);
    let lorentz = sig.p == 5 && sig.q == 1;
    if euclidean || lorentz {
        Ok(())
    } else {
        Err(KaError::UnknownCase(format!(
            "no worked closed form for signature {}",
            sig
        )))
    }
}

/// Read the structure content off a verified square.
/// `mu_or_ell` is the chirality µ in even d and the module label ℓ in odd d.
pub fn extract_structure(
    square: &Multivector,
    sig: Signature,
    mu_or_ell: i8,
    kind: SquareCase,
) -> Result<StructureData, KaError> {
    check_worked_signature(sig)?;
    let lorentz = sig.q == 1 && sig.dim() == 6;
    let mu = mu_or_ell;
    let muf = C64::new(mu as f64, 0.0);
    match (case_tag(sig, kind), lorentz) {
        ((2, true_bil), false) if true_bil => {
            let theta = square.grade(1);
            require("theta_selfdual", hodge_eigen_defect(&theta, I_C * muf))?;
            Ok(StructureData::IsoOneForm { theta })
        }
        ((3, true_bil), false) if true_bil => {
            let theta = square.grade(1);
            require("theta_isotropic", isotropy_defect(&[theta.clone()]))?;
            Ok(StructureData::IsoOneForm { theta })
        }
        ((2, _), false) => {
            let r = square.scalar_part();
            let omega = square.grade(2).scale(-I_C);
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300))?;
            Ok(StructureData::Kahler {
                omega: omega.real_part(),
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((3, _), false) => {
            let r = square.scalar_part();
            let theta = square.grade(1);
            require("theta_real", theta.imag_norm() / theta.norm().max(1e-300))?;
            let tt = theta.inner(&theta)?;
            require(
                "norm_relation",
                (tt - r * r).norm() / tt.norm().max(1e-300),
            )?;
            Ok(StructureData::RealOneForm {
                theta: theta.real_part(),
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((4, true_bil), false) if true_bil => {
            let omega = square.grade(2);
            require("omega_selfdual", hodge_eigen_defect(&omega, muf))?;
            let f = factor_decomposable(&omega, 2)?;
            require("factors_isotropic", isotropy_defect(&f))?;
            Ok(StructureData::IsoPair {
                theta1: f[0].clone(),
                theta2: f[1].clone(),
            })
        }
        ((4, _), false) => {
            let r = square.scalar_part();
            let omega = square.grade(2).scale(-I_C);
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300))?;
            let omega = omega.real_part();
            require("omega_selfdual", hodge_eigen_defect(&omega, muf))?;
            Ok(StructureData::Kahler {
                omega,
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((5, true_bil), false) if true_bil => {
            let omega = square.grade(2);
            let f = factor_decomposable(&omega, 2)?;
            require("factors_isotropic", isotropy_defect(&f))?;
            Ok(StructureData::IsoPair {
                theta1: f[0].clone(),
                theta2: f[1].clone(),
            })
        }
        ((5, _), false) => {
            let r = square.scalar_part();
            let omega = square.grade(2).scale(-I_C);
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300))?;
            let omega = omega.real_part();
            // ⟨ω,ω⟩ ∗ω = ω ∧ ∗(ω∧ω)
            let ww = omega.inner(&omega)?;
            let lhs = omega.hodge().scale(ww);
            let rhs = omega.wedge(&omega.wedge(&omega)?.hodge())?;
            require("omega_identity", lhs.dist(&rhs) / lhs.norm().max(1e-300))?;
            Ok(StructureData::Kahler {
                omega,
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((6, true_bil), false) if true_bil => {
            let rho = square.grade(3);
            require("rho_selfdual", hodge_eigen_defect(&rho, I_C * muf))?;
            let f = factor_decomposable(&rho, 3)?;
            require("factors_isotropic", isotropy_defect(&f))?;
            Ok(StructureData::IsoTriple {
                thetas: [f[0].clone(), f[1].clone(), f[2].clone()],
            })
        }
        ((6, _), false) => {
            let r = square.scalar_part();
            let omega = square.grade(2).scale(-I_C);
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300))?;
            let omega = omega.real_part();
            // √⟨ω,ω⟩ ∗ω = µ(√3/2) ω∧ω
            let ww = omega.inner(&omega)?;
            let lhs = omega.hodge().scale(sqrt_c(ww));
            let rhs = omega.wedge(&omega)?.scale(muf * (3.0f64.sqrt() / 2.0));
            require("omega_identity", lhs.dist(&rhs) / lhs.norm().max(1e-300))?;
            Ok(StructureData::Kahler {
                omega,
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((8, true_bil), false) if true_bil => {
            let lambda = square.scalar_part();
            let omega4 = square.grade(4);
            let norm2 = omega4.norm().powi(2).max(1e-300);
            if omega4.inner(&omega4)?.norm() < PURITY_TOL * norm2 {
                let f = factor_decomposable(&omega4, 4)?;
                require("factors_isotropic", isotropy_defect(&f))?;
                Ok(StructureData::IsoQuad {
                    thetas: [f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone()],
                })
            } else {
                require("omega4_selfdual", hodge_eigen_defect(&omega4, muf))?;
                Ok(StructureData::ComplexFour { lambda, omega4 })
            }
        }
        ((8, _), false) => {
            let r = square.scalar_part();
            let omega = square.grade(2).scale(-I_C);
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300).max(1.0))?;
            let omega = omega.real_part();
            let theta4 = square.grade(4);
            require("theta_real", theta4.imag_norm() / theta4.norm().max(1e-300))?;
            let theta4 = theta4.real_part();
            require("theta_selfdual", hodge_eigen_defect(&theta4, muf))?;
            Ok(StructureData::OmegaTheta {
                omega,
                theta4,
                r_sign: if r.re >= 0.0 { 1 } else { -1 },
            })
        }
        ((6, true_bil), true) if true_bil => {
            let rho = square.grade(3);
            require("rho_selfdual", hodge_eigen_defect(&rho, muf))?;
            let f = factor_decomposable(&rho, 3)?;
            require("factors_isotropic", isotropy_defect(&f))?;
            Ok(StructureData::IsoTriple {
                thetas: [f[0].clone(), f[1].clone(), f[2].clone()],
            })
        }
        ((6, _), true) => {
            let u = square.grade(1);
            require("u_real", u.imag_norm() / u.norm().max(1e-300))?;
            let u = u.real_part();
            let rho = square.grade(3).scale(-I_C);
            require("rho_real", rho.imag_norm() / rho.norm().max(1e-300))?;
            let rho = rho.real_part();
            let v = conjugate_oneform(&u)?;
            // gauge ω(v♯) = 0: ω = ι_{v♯}(u∧ω)
            let omega = Multivector::interior(&v, &rho)?;
            let rebuilt = u.wedge(&omega)?;
            require("rho_factors", rebuilt.dist(&rho) / rho.norm().max(1e-300))?;
            Ok(StructureData::LorentzPair { u, omega, v })
        }
        _ => Err(KaError::UnknownCase(format!(
            "no worked case for signature {} kind {:?}",
            sig, kind
        ))),
    }
}

/// Rebuild the closed-form square from its structure data, validating the
/// per-variant invariants first (tolerance 1e−9, the failing one named).
pub fn build_square_from_data(
    sig: Signature,
    mu_or_ell: i8,
    data: &StructureData,
    kind: SquareCase,
) -> Result<Multivector, KaError> {
    check_worked_signature(sig)?;
    let mu = mu_or_ell;
    let muf = C64::new(mu as f64, 0.0);
    let lorentz = sig.q == 1 && sig.dim() == 6;
    match data {
        StructureData::IsoOneForm { theta } => {
            if sig.dim() == 2 {
                require("theta_selfdual", hodge_eigen_defect(theta, I_C * muf))?;
            }
            require("theta_isotropic", isotropy_defect(&[theta.clone()]))?;
            let _ = kind;
            Ok(theta.clone())
        }
        StructureData::RealOneForm { theta, r_sign } => {
            require("theta_real", theta.imag_norm() / theta.norm().max(1e-300))?;
            let r = sqrt_c(theta.inner(theta)?) * (*r_sign as f64);
            Ok(Multivector::scalar(sig, r).add(theta)?)
        }
        StructureData::Kahler { omega, r_sign } => {
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300))?;
            let ww = omega.inner(omega)?;
            let rs = *r_sign as f64;
            match sig.dim() {
                2 => {
                    // α̂ = r + iω with ω = µrν
                    let r = sqrt_c(ww) * rs;
                    require(
                        "omega_volume_aligned",
                        omega
                            .dist(&Multivector::volume(sig).scale(r * muf))
                            / omega.norm().max(1e-300),
                    )?;
                    Ok(Multivector::scalar(sig, r).add(&omega.scale(I_C))?)
                }
                4 => {
                    require("omega_selfdual", hodge_eigen_defect(omega, muf))?;
                    let r = sqrt_c(ww / 2.0) * rs;
                    let nu_term = Multivector::volume(sig).scale(-muf * r);
                    Multivector::scalar(sig, r)
                        .add(&omega.scale(I_C))?
                        .add(&nu_term)
                }
                5 => {
                    let lhs = omega.hodge().scale(ww);
                    let rhs = omega.wedge(&omega.wedge(omega)?.hodge())?;
                    require("omega_identity", lhs.dist(&rhs) / lhs.norm().max(1e-300))?;
                    let r = sqrt_c(ww / 2.0) * rs;
                    // θ = (ℓ/2r) ∗(ω∧ω)
                    let ell = C64::new(mu as f64, 0.0);
                    let theta = omega.wedge(omega)?.hodge().scale(ell / (r * 2.0));
                    Multivector::scalar(sig, r)
                        .add(&theta)?
                        .add(&omega.scale(I_C))
                }
                6 => {
                    let lhs = omega.hodge().scale(sqrt_c(ww));
                    let rhs = omega.wedge(omega)?.scale(muf * (3.0f64.sqrt() / 2.0));
                    require("omega_identity", lhs.dist(&rhs) / lhs.norm().max(1e-300))?;
                    let r = sqrt_c(ww / 3.0) * rs;
                    Multivector::scalar(sig, r)
                        .add(&omega.scale(I_C))?
                        .add(&omega.hodge().scale(-muf))?
                        .add(&Multivector::volume(sig).scale(-I_C * muf * r))
                }
                _ => Err(KaError::UnknownCase("Kahler data outside d=2..6".into())),
            }
        }
        StructureData::IsoPair { theta1, theta2 } => {
            require(
                "factors_isotropic",
                isotropy_defect(&[theta1.clone(), theta2.clone()]),
            )?;
            let alpha = theta1.wedge(theta2)?;
            if sig.dim() == 4 {
                require("omega_selfdual", hodge_eigen_defect(&alpha, muf))?;
            }
            Ok(alpha)
        }
        StructureData::IsoTriple { thetas } => {
            require("factors_isotropic", isotropy_defect(thetas))?;
            let alpha = thetas[0].wedge(&thetas[1])?.wedge(&thetas[2])?;
            let eigen = if lorentz { muf } else { I_C * muf };
            require("rho_selfdual", hodge_eigen_defect(&alpha, eigen))?;
            Ok(alpha)
        }
        StructureData::IsoQuad { thetas } => {
            require("factors_isotropic", isotropy_defect(thetas))?;
            let alpha = thetas[0]
                .wedge(&thetas[1])?
                .wedge(&thetas[2])?
                .wedge(&thetas[3])?;
            require("omega4_selfdual", hodge_eigen_defect(&alpha, muf))?;
            Ok(alpha)
        }
        StructureData::OmegaTheta { omega, theta4, r_sign } => {
            require("omega_real", omega.imag_norm() / omega.norm().max(1e-300).max(1.0))?;
            require("theta_real", theta4.imag_norm() / theta4.norm().max(1e-300))?;
            require("theta_selfdual", hodge_eigen_defect(theta4, muf))?;
            let ww = omega.inner(omega)?;
            let tt = theta4.inner(theta4)?;
            let r = sqrt_c((ww * 2.0 + tt) / 14.0) * (*r_sign as f64);
            // the two closed-form constraint systems
            let sys1 = omega
                .wedge(omega)?
                .scale(C64::new(2.0, 0.0))
                .add(&omega.wedge(omega)?.hodge().scale(muf * 2.0))?
                .add(&theta4.generalized(theta4, 2)?)?
                .add(&theta4.scale(r * 12.0))?;
            require(
                "system_four_form",
                sys1.norm() / theta4.norm().powi(2).max(1e-300),
            )?;
            let sys2 = omega
                .wedge(theta4)?
                .add(&omega.hodge().scale(muf * r * 3.0))?;
            require(
                "system_six_form",
                sys2.norm() / (omega.norm() * theta4.norm()).max(1e-300),
            )?;
            Multivector::scalar(sig, r)
                .add(&omega.scale(I_C))?
                .add(theta4)?
                .add(&omega.hodge().scale(-I_C * muf))?
                .add(&Multivector::volume(sig).scale(muf * r))
        }
        StructureData::ComplexFour { lambda, omega4 } => {
            require("omega4_selfdual", hodge_eigen_defect(omega4, muf))?;
            let report = verify_8d_impure(*lambda, omega4, mu)?;
            if !report.passed {
                return Err(KaError::StructureInvariant {
                    name: "spin7_type_system",
                    residual: report.max_residual(),
                });
            }
            Multivector::scalar(sig, *lambda)
                .add(omega4)?
                .add(&Multivector::volume(sig).scale(muf * *lambda))
        }
        StructureData::LorentzPair { u, omega, v } => {
            let report = verify_lorentz6(u, omega, mu)?;
            if !report.passed {
                return Err(KaError::StructureInvariant {
                    name: "lorentz_omega_conditions",
                    residual: report.max_residual(),
                });
            }
            let _ = v;
            // α̂ = u + i u∧ω − µ∗u
            u.add(&u.wedge(omega)?.scale(I_C))?
                .add(&u.hodge().scale(-muf))
        }
    }
}

/// Residuals of the d=8 impure characterization ⟨Ω,Ω⟩ = 14λ²,
/// 12λΩ + Ω△₂Ω = 0, plus the normalized reduction rows when λ ≈ 1.
pub fn verify_8d_impure(
    lambda: C64,
    omega4: &Multivector,
    mu: i8,
) -> Result<VerificationReport, KaError> {
    let mut residuals = BTreeMap::new();
    let scale = omega4.norm().powi(2).max(1e-300);
    residuals.insert(
        "selfdual".to_string(),
        hodge_eigen_defect(omega4, C64::new(mu as f64, 0.0)),
    );
    let norm_eq = (omega4.inner(omega4)? - lambda * lambda * 14.0).norm() / scale;
    residuals.insert("norm_relation".to_string(), norm_eq);
    let quad = omega4
        .generalized(omega4, 2)?
        .add(&omega4.scale(lambda * 12.0))?;
    residuals.insert("quadratic".to_string(), quad.norm() / scale);
    if (lambda - ONE_C).norm() < 1e-9 {
        let or = omega4.real_part();
        let oi = omega4.imag_part();
        let red1 = or
            .generalized(&oi, 2)?
            .add(&oi.scale(C64::new(6.0, 0.0)))?;
        residuals.insert("reduced_imag".to_string(), red1.norm() / scale);
        let red2 = or
            .generalized(&or, 2)?
            .sub(&oi.generalized(&oi, 2)?)?
            .add(&or.scale(C64::new(12.0, 0.0)))?;
        residuals.insert("reduced_real".to_string(), red2.norm() / scale);
    }
    let passed = residuals.values().all(|r| *r < DECOMPOSABILITY_TOL);
    Ok(VerificationReport {
        passed,
        residuals,
        witness_beta: None,
    })
}

/// Deterministic isotropic conjugate to a real isotropic one-form in a
/// mostly-plus Lorentzian signature (q = 1, timelike direction last):
/// v = (a − b e^d)/(2b²) for u = a + b e^d.
pub fn conjugate_oneform(u: &Multivector) -> Result<Multivector, KaError> {
    let sig = u.sig;
    if sig.q != 1 {
        return Err(KaError::UnknownCase(
            "conjugate one-form requires exactly one timelike direction".into(),
        ));
    }
    if !u.is_homogeneous(1, 1e-12 * u.norm()) {
        return Err(KaError::DegreePrecondition("u must be a one-form"));
    }
    if u.imag_norm() > 1e-10 * u.norm() {
        return Err(KaError::DegreePrecondition("u must be real"));
    }
    let d = sig.dim();
    let b = u.coeff(1usize << (d - 1)).re;
    if b.abs() < 1e-12 * u.norm() {
        return Err(KaError::DegreePrecondition(
            "isotropic u must have a timelike component",
        ));
    }
    let mut v = Multivector::zero(sig);
    for i in 1..=d {
        let c = u.coeff(1usize << (i - 1));
        let flipped = if i == d { -c } else { c };
        v.set(1usize << (i - 1), flipped / (2.0 * b * b));
    }
    Ok(v)
}

/// Orthonormal frame of the screen space V_uv = {u,v}^⊥ with the orientation
/// fixed by ν = u ∧ v ∧ ν_uv; carries the induced (Euclidean) Hodge star.
pub struct LorentzFrame {
    pub sig: Signature,
    pub u: Multivector,
    pub v: Multivector,
    pub frame: Vec<Multivector>,
    /// Ambient wedge of frame one-forms per local bitmask.
    frame_blades: Vec<Multivector>,
    local_sig: Signature,
}

impl LorentzFrame {
    pub fn build(u: &Multivector, v: &Multivector) -> Result<Self, KaError> {
        let sig = u.sig;
        let d = sig.dim();
        let mut frame: Vec<Multivector> = Vec::new();
        for i in 1..=d {
            let e = Multivector::basis_one_form(sig, i);
            // remove u,v components: w = e − ⟨e,v⟩u − ⟨e,u⟩v
            let mut w = e
                .sub(&u.scale(e.inner(v)?))?
                .sub(&v.scale(e.inner(u)?))?;
            for f in &frame {
                w = w.sub(&f.scale(w.inner(f)?))?;
            }
            let nn = w.inner(&w)?;
            if nn.re > 1e-12 {
                frame.push(w.scale(ONE_C / sqrt_c(nn)));
            }
            if frame.len() == (d - 2) as usize {
                break;
            }
        }
        if frame.len() != (d - 2) as usize {
            return Err(KaError::DegreePrecondition(
                "could not build a screen-space frame; u,v not independent isotropic pair",
            ));
        }
        // orientation: ν = u∧v∧ν_uv ⟹ ν_uv = −ι_{v♯}ι_{u♯}ν
        let nu_uv = Multivector::interior(v, &Multivector::interior(u, &Multivector::volume(sig))?)?
            .scale(C64::new(-1.0, 0.0));
        let mut wedge = frame[0].clone();
        for f in frame.iter().skip(1) {
            wedge = wedge.wedge(f)?;
        }
        let orient = wedge.inner(&nu_uv)?;
        if orient.re < 0.0 {
            let last = frame.len() - 1;
            frame[last] = frame[last].scale(C64::new(-1.0, 0.0));
        }
        let local_sig = Signature::new(d - 2, 0);
        let mut frame_blades = Vec::with_capacity(1usize << (d - 2));
        for mask in 0..(1usize << (d - 2)) {
            let mut blade = Multivector::one(sig);
            for j in 0..(d - 2) as usize {
                if (mask >> j) & 1 == 1 {
                    blade = blade.wedge(&frame[j])?;
                }
            }
            frame_blades.push(blade);
        }
        Ok(LorentzFrame {
            sig,
            u: u.clone(),
            v: v.clone(),
            frame,
            frame_blades,
            local_sig,
        })
    }

    /// ν_uv as an ambient form.
    pub fn nu_uv(&self) -> Multivector {
        self.frame_blades[self.frame_blades.len() - 1].clone()
    }

    fn to_local(&self, chi: &Multivector) -> Multivector {
        let mut local = Multivector::zero(self.local_sig);
        for (mask, blade) in self.frame_blades.iter().enumerate() {
            local.set(mask, chi.inner(blade).expect("same signature"));
        }
        local
    }

    fn from_local(&self, local: &Multivector) -> Multivector {
        let mut out = Multivector::zero(self.sig);
        for (mask, blade) in self.frame_blades.iter().enumerate() {
            out = out.add(&blade.scale(local.coeff(mask))).expect("same signature");
        }
        out
    }

    /// Residual of χ against ∧V_uv (picked up by the frame expansion).
    pub fn offspan_residual(&self, chi: &Multivector) -> f64 {
        self.from_local(&self.to_local(chi)).dist(chi) / chi.norm().max(1e-300)
    }

    /// Hodge star of the induced metric and orientation on V_uv.
    pub fn star_uv(&self, chi: &Multivector) -> Multivector {
        self.from_local(&self.to_local(chi).hodge())
    }

    /// Split H = u∧v∧β + u∧χ_u + v∧χ_v + H^⊥.
    pub fn components(
        &self,
        h: &Multivector,
    ) -> Result<(Multivector, Multivector, Multivector, Multivector), KaError> {
        let iu = Multivector::interior(&self.u, h)?;
        let iv = Multivector::interior(&self.v, h)?;
        let beta = Multivector::interior(&self.v, &iu)?.scale(C64::new(-1.0, 0.0));
        let chi_v = iu.add(&self.u.wedge(&beta)?)?;
        let chi_u = iv.sub(&self.v.wedge(&beta)?)?;
        let h_perp = h
            .sub(&self.u.wedge(&self.v.wedge(&beta)?)?)?
            .sub(&self.u.wedge(&chi_u)?)?
            .sub(&self.v.wedge(&chi_v)?)?;
        Ok((beta, chi_u, chi_v, h_perp))
    }
}

/// Residuals of the Lorentzian square conditions ⟨u,u⟩ = 0, ω(u♯) = 0,
/// ⟨ω,ω⟩ = 2, 2µ∗u = u∧ω∧ω, plus the screen-space Kähler checks.
pub fn verify_lorentz6(
    u: &Multivector,
    omega: &Multivector,
    mu: i8,
) -> Result<VerificationReport, KaError> {
    if u.is_zero(0.0) {
        return Err(KaError::DegreePrecondition("u must be non-zero"));
    }
    let muf = C64::new(mu as f64, 0.0);
    let mut residuals = BTreeMap::new();
    let un = u.norm().max(1e-300);
    let on = omega.norm().max(1e-300);
    residuals.insert(
        "u_isotropic".to_string(),
        u.inner(u)?.norm() / (un * un),
    );
    residuals.insert(
        "omega_transverse".to_string(),
        Multivector::interior(u, omega)?.norm() / (un * on),
    );
    residuals.insert(
        "omega_norm".to_string(),
        (omega.inner(omega)? - C64::new(2.0, 0.0)).norm() / 2.0,
    );
    let duality = u
        .hodge()
        .scale(muf * 2.0)
        .sub(&u.wedge(omega)?.wedge(omega)?)?;
    residuals.insert("duality".to_string(), duality.norm() / (un * on * on));

    // screen-space Kähler checks through a conjugate v
    let v = conjugate_oneform(u)?;
    let frame = LorentzFrame::build(u, &v)?;
    let omega_uv = Multivector::interior(&v, &u.wedge(omega)?)?;
    residuals.insert(
        "screen_norm".to_string(),
        (omega_uv.inner(&omega_uv)? - C64::new(2.0, 0.0)).norm() / 2.0,
    );
    let kahler = omega_uv
        .wedge(&omega_uv)?
        .add(&frame.nu_uv().scale(muf * 2.0))?;
    residuals.insert("screen_kahler".to_string(), kahler.norm() / (on * on));
    let anti = frame
        .star_uv(&omega_uv)
        .add(&omega_uv.scale(muf))?;
    residuals.insert("screen_antiselfdual".to_string(), anti.norm() / on);

    let passed = residuals.values().all(|r| *r < STRUCTURE_TOL);
    Ok(VerificationReport {
        passed,
        residuals,
        witness_beta: None,
    })
}

/// The five-dimensional SU(2)-structure tuple (ϑ, ϖ₁, ϖ₂, ϖ₃) read off a
/// factorized bilinear square; emitted as-is, the external normalization
/// axioms are not validated here.
pub fn su2_tuple_5d(
    theta1: &Multivector,
    theta2: &Multivector,
) -> Result<(Multivector, Multivector, Multivector, Multivector), KaError> {
    let t1r = theta1.real_part();
    let t1i = theta1.imag_part();
    let t2r = theta2.real_part();
    let t2i = theta2.imag_part();
    let vartheta = t1r.wedge(&t1i)?.wedge(&t2r)?.wedge(&t2i)?.hodge();
    let varpi1 = t1r.wedge(&t1i)?.add(&t2r.wedge(&t2i)?)?;
    let omega = theta1.wedge(theta2)?;
    Ok((vartheta, varpi1, omega.real_part(), omega.imag_part()))
}
