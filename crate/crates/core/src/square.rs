//! Spinor square maps and their verification against the characterization
//! theorems: quadratic/involution/witness residual systems, conjugate-square
//! and compatibility relations, constrained-spinor checks and equivariance.

use crate::algebra::{vee, C64, I_C, Multivector, ONE_C, Signature};
use crate::error::KaError;
use crate::linalg::{dominant_left_singular, CMat};
use crate::pairing::{Pairing, PairingKind};
use crate::rep::{CliffordRep, Spinor};
use std::collections::BTreeMap;

pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareKind {
    Hermitian,
    Bilinear,
}

/// A spinor square: the exterior form plus the data that produced it.
#[derive(Debug, Clone)]
pub struct SquareResult {
    pub alpha: Multivector,
    pub kind: SquareKind,
    /// Unit phase of the Hermitian square map (1 for bilinear squares).
    pub kappa: C64,
    /// Adjoint type of the pairing used.
    pub adjoint: i8,
    /// Symmetry type (bilinear pairings only).
    pub sigma: Option<i8>,
    pub ell: Option<i8>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub passed: bool,
    pub residuals: BTreeMap<String, f64>,
    pub witness_beta: Option<Multivector>,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().cloned().fold(0.0, f64::max)
    }

    fn from_residuals(residuals: BTreeMap<String, f64>, tol: f64) -> Self {
        let passed = residuals.values().all(|r| *r < tol);
        VerificationReport {
            passed,
            residuals,
            witness_beta: None,
        }
    }
}

/// ◇ for even d, ∨ for odd d.
pub fn algebra_product(
    rep: &CliffordRep,
    a: &Multivector,
    b: &Multivector,
) -> Result<Multivector, KaError> {
    if rep.sig.dim() % 2 == 0 {
        a.geo(b)
    } else {
        vee(a, b, rep.ell.unwrap_or(1))
    }
}

fn square_scale(sig: Signature) -> f64 {
    sig.module_dim() as f64
}

fn truncation_degree(sig: Signature) -> u32 {
    let d = sig.dim();
    if d % 2 == 0 {
        d
    } else {
        (d - 1) / 2
    }
}

fn expansion(
    rep: &CliffordRep,
    gram_apply: impl Fn(usize) -> C64,
    prefactor: C64,
) -> Multivector {
    let sig = rep.sig;
    let max_deg = truncation_degree(sig);
    let mut alpha = Multivector::zero(sig);
    let squares = rep.blade_squares();
    for mask in 0..sig.blade_count() {
        if (mask as u64).count_ones() > max_deg {
            continue;
        }
        // (γ_I)⁻¹ = Ψ(e_I)/(e_I◇e_I)
        alpha.set(mask, prefactor * gram_apply(mask) / squares[mask]);
    }
    alpha.prune()
}

/// Hermitian square α̂_η = (κ/2^⌊d/2⌋)[𝒮(η,η) + Σ 𝒮((γ_I)⁻¹η,η) e_I] by the
/// explicit basis expansion; the dequantized rank-one endomorphism is the
/// independent cross-check path (see tests).
pub fn hermitian_square(
    rep: &CliffordRep,
    pairing: &Pairing,
    eta: &Spinor,
    kappa: C64,
) -> Result<SquareResult, KaError> {
    if eta.norm() == 0.0 {
        return Err(KaError::ZeroSpinor);
    }
    if (kappa.norm() - 1.0).abs() > 1e-12 {
        return Err(KaError::DegreePrecondition("κ must be a unit complex number"));
    }
    debug_assert_eq!(pairing.kind, PairingKind::Hermitian);
    let n = square_scale(rep.sig);
    let left = eta.comps.adjoint() * &pairing.gram;
    let blades = rep.blade_ops();
    let alpha = expansion(
        rep,
        |mask| (&left * (&blades[mask] * &eta.comps))[(0, 0)],
        kappa / n,
    );
    Ok(SquareResult {
        alpha,
        kind: SquareKind::Hermitian,
        kappa,
        adjoint: pairing.adjoint,
        sigma: None,
        ell: rep.ell,
    })
}

/// Complex-bilinear square α_η = (1/2^⌊d/2⌋)[ℬ(η,η) + Σ ℬ((γ_I)⁻¹η,η) e_I].
pub fn bilinear_square(
    rep: &CliffordRep,
    pairing: &Pairing,
    eta: &Spinor,
) -> Result<SquareResult, KaError> {
    if eta.norm() == 0.0 {
        return Err(KaError::ZeroSpinor);
    }
    debug_assert_eq!(pairing.kind, PairingKind::Bilinear);
    let n = square_scale(rep.sig);
    let left = eta.comps.transpose() * &pairing.gram;
    let blades = rep.blade_ops();
    let alpha = expansion(
        rep,
        |mask| (&left * (&blades[mask] * &eta.comps))[(0, 0)],
        ONE_C / n,
    );
    Ok(SquareResult {
        alpha,
        kind: SquareKind::Bilinear,
        kappa: ONE_C,
        adjoint: pairing.adjoint,
        sigma: pairing.symmetry,
        ell: rep.ell,
    })
}

/// Rank-one endomorphism of the square map in matrix form (cross-check path).
pub fn square_endomorphism(pairing: &Pairing, eta: &Spinor, kappa: C64) -> CMat {
    match pairing.kind {
        // Ê(χ) = κ 𝒮(χ,η) η  ⟹  E = κ η η† G
        PairingKind::Hermitian => (&eta.comps * eta.comps.adjoint() * &pairing.gram) * kappa,
        // ℰ(χ) = ℬ(χ,η) η  ⟹  E = η ηᵀ G
        PairingKind::Bilinear => &eta.comps * eta.comps.transpose() * &pairing.gram,
    }
}

/// Search β over {1, conj(α), canonical blades by ascending degree} for
/// |(α∘β)^(0)| > 1e−8·‖α‖² (candidates normalized to unit coefficient norm).
pub fn find_witness_beta(alpha: &Multivector, rep: &CliffordRep) -> Result<Multivector, KaError> {
    if alpha.is_zero(0.0) {
        return Err(KaError::NoWitness(0.0));
    }
    let sig = alpha.sig;
    let threshold = 1e-8 * alpha.norm() * alpha.norm();
    let max_deg = truncation_degree(sig);
    let mut candidates: Vec<Multivector> = vec![Multivector::one(sig)];
    let conj = alpha.conj();
    candidates.push(conj.scale(C64::new(1.0 / conj.norm(), 0.0)));
    let mut masks: Vec<usize> = (0..sig.blade_count())
        .filter(|m| (*m as u64).count_ones() <= max_deg)
        .collect();
    masks.sort_by_key(|m| ((*m as u64).count_ones(), *m));
    candidates.extend(masks.into_iter().map(|m| Multivector::blade(sig, m)));

    let mut best = 0.0f64;
    for beta in candidates {
        let s = algebra_product(rep, alpha, &beta)?.scalar_part().norm();
        if s > threshold {
            return Ok(beta);
        }
        best = best.max(s);
    }
    Err(KaError::NoWitness(best))
}

/// Residual system of the characterization theorems for one square.
pub fn verify_square(
    square: &SquareResult,
    rep: &CliffordRep,
    beta: Option<&Multivector>,
    mu: Option<i8>,
    tol: f64,
) -> Result<VerificationReport, KaError> {
    let sig = rep.sig;
    let alpha = &square.alpha;
    let n = square_scale(sig);
    let a_norm = alpha.norm().max(1e-300);
    let mut residuals = BTreeMap::new();

    // quadratic: α∘α = 2^⌊d/2⌋ α^(0) α
    let quad = algebra_product(rep, alpha, alpha)?
        .sub(&alpha.scale(alpha.scalar_part() * n))?;
    residuals.insert("quadratic".to_string(), quad.norm() / (a_norm * a_norm));

    // involution: (π^{(1−s)/2}∘τ)(κ̄α) = κ ᾱ (Hermitian), = σα (bilinear)
    let e = ((1 - square.adjoint) / 2) as u32;
    let invol = match square.kind {
        SquareKind::Hermitian => alpha
            .scale(square.kappa.conj())
            .pi_pow_tau(e)
            .sub(&alpha.conj().scale(square.kappa))?,
        SquareKind::Bilinear => {
            let sigma = square.sigma.ok_or(KaError::DegreePrecondition(
                "bilinear square lacks a symmetry type",
            ))? as f64;
            alpha.pi_pow_tau(e).sub(&alpha.scale(C64::new(sigma, 0.0)))?
        }
    };
    residuals.insert("involution".to_string(), invol.norm() / a_norm);

    // witness: α∘β∘α = 2^⌊d/2⌋ (α∘β)^(0) α
    let beta_owned;
    let beta = match beta {
        Some(b) => b,
        None => {
            beta_owned = find_witness_beta(alpha, rep)?;
            &beta_owned
        }
    };
    let ab = algebra_product(rep, alpha, beta)?;
    let witness = algebra_product(rep, &ab, alpha)?
        .sub(&alpha.scale(ab.scalar_part() * n))?;
    residuals.insert(
        "witness".to_string(),
        witness.norm() / (a_norm * a_norm * beta.norm().max(1e-300)),
    );

    // chirality (even d): i^{q+d/2} ∗(π∘τ)(α) = μα
    if let Some(mu) = mu {
        if sig.dim() % 2 == 0 {
            let lhs = alpha
                .pi_pow_tau(1)
                .hodge()
                .scale(sig.complex_volume_phase());
            let chir = lhs.sub(&alpha.scale(C64::new(mu as f64, 0.0)))?;
            residuals.insert("chirality".to_string(), chir.norm() / a_norm);
        }
    }

    let mut report = VerificationReport::from_residuals(residuals, tol);
    report.witness_beta = Some(beta.clone());
    Ok(report)
}

/// Recover the spinor from its square: the dominant singular vector of the
/// quantized rank-one endomorphism, scaled to reproduce it. Hermitian output
/// carries a free phase, bilinear output a free sign.
pub fn reconstruct_spinor(
    square: &SquareResult,
    rep: &CliffordRep,
    pairing: &Pairing,
) -> Result<Spinor, KaError> {
    let e = rep.quantize(&square.alpha);
    let (u, ratio) = dominant_left_singular(&e);
    if ratio > 1e-9 {
        return Err(KaError::NotRankOne(ratio));
    }
    let candidate = Spinor::new(u);
    let model = square_endomorphism(pairing, &candidate, square.kappa);
    // Frobenius least-squares fit of E against the rank-one model
    let num: C64 = model
        .iter()
        .zip(e.iter())
        .map(|(m, x)| m.conj() * x)
        .sum();
    let den: f64 = model.iter().map(|m| m.norm_sqr()).sum();
    if den == 0.0 {
        return Err(KaError::NotRankOne(1.0));
    }
    let w = num / den;
    let c = match square.kind {
        SquareKind::Hermitian => {
            // E = |c|² κ u u† G: the fit must be positive real
            if w.re <= 0.0 || w.im.abs() > 1e-6 * w.re.abs().max(1e-300) {
                return Err(KaError::NotRankOne(w.im.abs()));
            }
            C64::new(w.re.sqrt(), 0.0)
        }
        SquareKind::Bilinear => w.sqrt(),
    };
    Ok(Spinor::new(&candidate.comps * c))
}

/// Residual of the conjugate-square relation between the squares of η and Kη.
pub fn conjugate_square_check(
    square_eta: &SquareResult,
    square_keta: &SquareResult,
    sig: Signature,
    s: i8,
    kappa: C64,
) -> Result<VerificationReport, KaError> {
    let sign = crate::pairing::expected_conjugation_sign(sig, s) as f64;
    let d_odd = sig.dim() % 2 == 1;
    let r = (sig.p as i64 - sig.q as i64).rem_euclid(8);
    let parity_twist = d_odd && (r == 3 || r == 7);
    let base = square_eta.alpha.conj();
    let base = if parity_twist { base.parity() } else { base };
    let phase = match square_eta.kind {
        SquareKind::Hermitian => kappa / kappa.conj(),
        SquareKind::Bilinear => ONE_C,
    };
    let expected = base.scale(phase * sign);
    let resid = square_keta.alpha.dist(&expected) / square_eta.alpha.norm().max(1e-300);
    let mut residuals = BTreeMap::new();
    residuals.insert("conjugate".to_string(), resid);
    Ok(VerificationReport::from_residuals(residuals, VERIFY_TOL))
}

/// Residuals of the two compatibility identities certifying that a Hermitian
/// and a bilinear square come from the same spinor.
pub fn compatibility_check(
    hermitian_sq: &SquareResult,
    bilinear_sq: &SquareResult,
    bilinear_sq_conj: &SquareResult,
    beta: Option<&Multivector>,
    rep: &CliffordRep,
) -> Result<VerificationReport, KaError> {
    let n = square_scale(rep.sig);
    let ah = &hermitian_sq.alpha;
    let ab = &bilinear_sq.alpha;
    let ak = &bilinear_sq_conj.alpha;
    let beta_owned;
    let beta = match beta {
        Some(b) => b,
        None => {
            beta_owned = find_witness_beta(ah, rep)?;
            &beta_owned
        }
    };
    let scale = (ah.norm() * ab.norm() * beta.norm()).max(1e-300);

    // α̂∘β∘α = 2^⌊d/2⌋ (α̂∘β)^(0) α
    let hb = algebra_product(rep, ah, beta)?;
    let first = algebra_product(rep, &hb, ab)?.sub(&ab.scale(hb.scalar_part() * n))?;

    // α∘β∘α_K = 2^⌊d/2⌋ σ κ̄² (α̂∘(π^{(1−s_B)/2}∘τ)(β))^(0) α̂
    let sigma = bilinear_sq.sigma.ok_or(KaError::DegreePrecondition(
        "bilinear square lacks a symmetry type",
    ))? as f64;
    let e = ((1 - bilinear_sq.adjoint) / 2) as u32;
    let twisted = beta.pi_pow_tau(e);
    let coeff = algebra_product(rep, ah, &twisted)?.scalar_part();
    let kbar2 = hermitian_sq.kappa.conj() * hermitian_sq.kappa.conj();
    let bb = algebra_product(rep, ab, beta)?;
    let second = algebra_product(rep, &bb, ak)?
        .sub(&ah.scale(coeff * kbar2 * C64::new(sigma * n, 0.0)))?;

    let mut residuals = BTreeMap::new();
    residuals.insert("hermitian_bilinear".to_string(), first.norm() / scale);
    residuals.insert("bilinear_conjugate".to_string(), second.norm() / scale);
    let mut report = VerificationReport::from_residuals(residuals, VERIFY_TOL);
    report.witness_beta = Some(beta.clone());
    Ok(report)
}

/// ‖𝔮∘α‖: zero iff the squared spinor lies in the kernel of quantize(q).
/// Full forms are pushed through the truncation first in odd d.
pub fn constrained_check(
    q: &Multivector,
    square: &SquareResult,
    rep: &CliffordRep,
) -> Result<f64, KaError> {
    let q_repr = if rep.sig.dim() % 2 == 1 {
        crate::algebra::push_truncated(q, rep.ell.unwrap_or(1))?
    } else {
        q.clone()
    };
    Ok(algebra_product(rep, &q_repr, &square.alpha)?.norm())
}

/// Equivariance defect of the square map under z·exp(Ψ(b)): the Hermitian
/// square rotates by Ad, the bilinear square additionally picks up z².
pub fn equivariance_check(
    eta: &Spinor,
    bivector: &Multivector,
    z: C64,
    rep: &CliffordRep,
    pairing: &Pairing,
    kind: SquareKind,
    kappa: C64,
) -> Result<f64, KaError> {
    if !bivector.is_homogeneous(2, 0.0) {
        return Err(KaError::DegreePrecondition("group generator must be a bivector"));
    }
    let g = rep.group_element(bivector, z);
    let rotated_eta = Spinor::new(&g * &eta.comps);
    let square = |xi: &Spinor| -> Result<SquareResult, KaError> {
        match kind {
            SquareKind::Hermitian => hermitian_square(rep, pairing, xi, kappa),
            SquareKind::Bilinear => bilinear_square(rep, pairing, xi),
        }
    };
    let sq_rotated = square(&rotated_eta)?;
    let sq_base = square(eta)?;
    // Ad acts on forms by ◇-conjugation with exp_◇(b); degree-preserving, so
    // it restricts to the truncated carrier in odd d.
    let exp_plus = bivector.exp_geo()?;
    let exp_minus = bivector.scale(C64::new(-1.0, 0.0)).exp_geo()?;
    let ad = exp_plus.geo(&sq_base.alpha)?.geo(&exp_minus)?;
    let weight = match kind {
        SquareKind::Hermitian => ONE_C,
        SquareKind::Bilinear => z * z,
    };
    let expected = ad.scale(weight);
    Ok(sq_rotated.alpha.dist(&expected) / sq_base.alpha.norm().max(1e-300))
}

/// Convenience: i^k as a complex phase.
pub fn i_power(k: u32) -> C64 {
    I_C.powu(k % 4)
}
