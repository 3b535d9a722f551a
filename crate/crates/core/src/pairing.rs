//! Admissible Hermitian and complex-bilinear pairings, the anti-linear
//! structures relating them, and classification of adjoint/symmetry types.
//!
//! Construction follows the averaging recipe: start from the identity inner
//! product, average over the finite blade group 𝔎 (the ± sign pairs
//! contribute identically, so the 2^d canonical blades suffice), symmetrize
//! with respect to the anti-linear structure, and twist by the quantized
//! volume forms ν_± with the i-power prefactors fixed by the signature.

use crate::algebra::{C64, I_C, Signature};
use crate::error::KaError;
use crate::linalg::{frobenius, max_abs, nullspace, CMat, CVec};
use crate::rep::CliffordRep;

pub const ADMISSIBILITY_TOL: f64 = 1e-10;
/// Nullspace cut for the anti-linear intertwiner solver.
pub const STRUCTURE_NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingKind {
    Hermitian,
    Bilinear,
}

/// Gram-matrix pairing: Hermitian kind is `S(ξ,χ) = χ† G ξ` (anti-linear in
/// the second slot), bilinear kind is `B(ξ,χ) = χᵀ G ξ`.
#[derive(Debug, Clone)]
pub struct Pairing {
    pub gram: CMat,
    pub kind: PairingKind,
    pub adjoint: i8,
    /// σ with Gᵀ = σG; `None` for the Hermitian kind.
    pub symmetry: Option<i8>,
}

impl Pairing {
    pub fn eval(&self, xi: &CVec, chi: &CVec) -> C64 {
        match self.kind {
            PairingKind::Hermitian => (chi.adjoint() * &self.gram * xi)[(0, 0)],
            PairingKind::Bilinear => (chi.transpose() * &self.gram * xi)[(0, 0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    /// 𝔠, commutes with γ after conjugation, ε = +1.
    Real,
    /// J, commutes with γ after conjugation, ε = −1.
    Quaternionic,
    /// D, intertwines with the parity twist (odd d, p−q ≡₈ 3,7).
    DType,
}

/// Anti-linear map ξ ↦ C·conj(ξ) with (C·conj)² = ε·Id.
#[derive(Debug, Clone)]
pub struct AntiLinearMap {
    pub mat: CMat,
    pub epsilon: i8,
    pub kind: StructureKind,
}

impl AntiLinearMap {
    pub fn apply(&self, xi: &CVec) -> CVec {
        &self.mat * xi.map(|c| c.conj())
    }
}

/// Structure kind and ε forced by p − q mod 8.
pub fn expected_structure(sig: Signature) -> (StructureKind, i8) {
    let r = (sig.p as i64 - sig.q as i64).rem_euclid(8);
    match r {
        0 | 2 => (StructureKind::Real, 1),
        4 | 6 => (StructureKind::Quaternionic, -1),
        1 => (StructureKind::Real, 1),
        5 => (StructureKind::Quaternionic, -1),
        3 => (StructureKind::DType, -1),
        7 => (StructureKind::DType, 1),
        _ => unreachable!(),
    }
}

/// Odd d: the adjoint type of the admissible Hermitian pairing is forced.
pub fn expected_hermitian_adjoint_odd(p: u32) -> i8 {
    if p % 2 == 1 {
        1
    } else {
        -1
    }
}

fn binom2(n: u32) -> u32 {
    n * n.saturating_sub(1) / 2
}

fn sign_pow(exponent: u32) -> i8 {
    if exponent % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Even d: symmetry type of ℬ_s, per the real/quaternionic residue tables.
pub fn expected_bilinear_symmetry_even(sig: Signature, s: i8) -> i8 {
    let d = sig.dim();
    let p = sig.p;
    // (−1)^{C(p,2) + (d/4)(1 + s(−1)^p)}
    let quarter = if s == sign_pow(p) { d / 2 } else { 0 };
    let base = sign_pow(binom2(p) + quarter);
    let (kind, _) = expected_structure(sig);
    match kind {
        StructureKind::Real => base,
        StructureKind::Quaternionic => -base,
        StructureKind::DType => unreachable!("even d is never D type"),
    }
}

/// Odd d: (adjoint, symmetry) of the admissible ℬ per p − q mod 8.
pub fn expected_bilinear_types_odd(sig: Signature) -> (i8, i8) {
    let r = (sig.p as i64 - sig.q as i64).rem_euclid(8);
    let s_herm = expected_hermitian_adjoint_odd(sig.p);
    match r {
        1 => (s_herm, sign_pow(binom2(sig.p))),
        5 => (s_herm, -sign_pow(binom2(sig.p))),
        3 => (-s_herm, -sign_pow(binom2(sig.p + 1))),
        7 => (-s_herm, sign_pow(binom2(sig.p + 1))),
        _ => unreachable!("odd d"),
    }
}

/// Sign of 𝒮(Kξ,Kχ) against conj(𝒮(ξ,χ)) predicted by the compatibility
/// lemmas (even d takes the adjoint type, odd d only the residue class).
pub fn expected_conjugation_sign(sig: Signature, s: i8) -> i8 {
    if sig.dim() % 2 == 0 {
        let quarter = if s == sign_pow(sig.p) { sig.dim() / 2 } else { 0 };
        sign_pow(binom2(sig.p) + quarter)
    } else {
        let r = (sig.p as i64 - sig.q as i64).rem_euclid(8);
        match r {
            1 | 5 => sign_pow(binom2(sig.p)),
            3 | 7 => sign_pow(binom2(sig.p + 1)),
            _ => unreachable!(),
        }
    }
}

/// Everything pairing-related for one representation, built once.
#[derive(Debug, Clone)]
pub struct Pairings {
    /// 𝔎-invariant, structure-symmetrized Hermitian inner product.
    pub inner_gram: CMat,
    pub structure: AntiLinearMap,
    pub hermitian_pos: Option<Pairing>,
    pub hermitian_neg: Option<Pairing>,
    pub bilinear_pos: Option<Pairing>,
    pub bilinear_neg: Option<Pairing>,
    /// K with 𝒮(ξ,χ) = ℬ(ξ,Kχ), per adjoint type where both exist.
    pub compat: AntiLinearMap,
    /// Measured sign of 𝒮(Kξ,Kχ) = c·conj(𝒮(ξ,χ)), per adjoint type.
    pub conj_sign_pos: Option<i8>,
    pub conj_sign_neg: Option<i8>,
}

impl Pairings {
    pub fn hermitian(&self, s: i8) -> Option<&Pairing> {
        if s == 1 {
            self.hermitian_pos.as_ref()
        } else {
            self.hermitian_neg.as_ref()
        }
    }

    pub fn bilinear(&self, s: i8) -> Option<&Pairing> {
        if s == 1 {
            self.bilinear_pos.as_ref()
        } else {
            self.bilinear_neg.as_ref()
        }
    }

    pub fn conj_sign(&self, s: i8) -> Option<i8> {
        if s == 1 {
            self.conj_sign_pos
        } else {
            self.conj_sign_neg
        }
    }
}

/// Cached pairing set for a representation.
pub fn pairings(rep: &CliffordRep) -> Result<&Pairings, KaError> {
    if rep.pairings_cell().get().is_none() {
        let built = build_all(rep)?;
        let _ = rep.pairings_cell().set(Box::new(built));
    }
    Ok(rep.pairings_cell().get().expect("just set"))
}

/// 𝔎-averaged Hermitian inner product (identity seed).
fn averaged_inner(rep: &CliffordRep) -> CMat {
    let n = rep.dim();
    let mut g = CMat::zeros(n, n);
    for m in rep.blade_ops() {
        g += m.adjoint() * m;
    }
    g /= C64::new(rep.sig.blade_count() as f64, 0.0);
    g
}

/// Solve the intertwining system γ^i C = t·C·conj(γ^i) for all generators.
/// In the constructed representation every gamma is purely real or purely
/// imaginary, which diagonalizes the stacked system in the blade-operator
/// basis; when that fails, fall back to the dense stacked nullspace.
fn solve_structure(rep: &CliffordRep, t: i8) -> Result<CMat, KaError> {
    let d = rep.sig.dim() as usize;
    // conj(γ^i) = c_i γ^i purity check
    let mut purity = Vec::with_capacity(d);
    let mut pure = true;
    for g in &rep.gammas {
        let gc = g.map(|c| c.conj());
        let norm = frobenius(g).max(1e-300);
        if frobenius(&(&gc - g)) < 1e-12 * norm {
            purity.push(1i8);
        } else if frobenius(&(&gc + g)) < 1e-12 * norm {
            purity.push(-1i8);
        } else {
            pure = false;
            break;
        }
    }

    let candidates: Vec<CMat> = if pure {
        let mut found = Vec::new();
        for mask in 0..rep.sig.blade_count() {
            let k = (mask as u64).count_ones();
            let ok = (0..d).all(|i| {
                let member = (mask >> i) & 1 == 1;
                let comm = k - if member { 1 } else { 0 };
                let lhs = if comm % 2 == 0 { 1i8 } else { -1 };
                lhs == t * purity[i]
            });
            if ok {
                found.push(rep.blade_ops()[mask].clone());
            }
        }
        found
    } else {
        // dense fallback: vec(C) nullspace of stacked (I⊗γ^i − t·conj(γ^i)ᵀ⊗I)
        let n = rep.dim();
        let id = CMat::identity(n, n);
        let mut stacked = CMat::zeros(d * n * n, n * n);
        for (i, g) in rep.gammas.iter().enumerate() {
            let a = id.kronecker(g);
            let b = g.map(|c| c.conj()).transpose().kronecker(&id)
                * C64::new(t as f64, 0.0);
            let block = a - b;
            stacked.rows_mut(i * n * n, n * n).copy_from(&block);
        }
        nullspace(&stacked, STRUCTURE_NULL_TOL)
            .into_iter()
            .map(|v| CMat::from_column_slice(n, n, v.as_slice()))
            .collect()
    };

    // distinct solutions up to scale
    let n = rep.dim();
    if candidates.is_empty() {
        return Err(KaError::StructureSpaceDimension(0));
    }
    let mut flat = CMat::zeros(n * n, candidates.len());
    for (j, c) in candidates.iter().enumerate() {
        for (idx, val) in c.iter().enumerate() {
            flat[(idx, j)] = *val;
        }
    }
    let dim = crate::linalg::rank(&flat, 1e-8);
    if dim != 1 {
        return Err(KaError::StructureSpaceDimension(dim));
    }
    let c = candidates.into_iter().next().expect("nonempty");

    // verify intertwining numerically
    let mut worst = 0.0f64;
    for g in &rep.gammas {
        let lhs = g * &c;
        let rhs = &c * g.map(|x| x.conj()) * C64::new(t as f64, 0.0);
        worst = worst.max(max_abs(&(lhs - rhs)) / frobenius(&c).max(1e-300));
    }
    if worst > ADMISSIBILITY_TOL {
        return Err(KaError::NotAdmissible(worst));
    }
    Ok(c)
}

/// Normalize C so that (C·conj)² = ±Id exactly in sign; returns (C, ε).
fn normalize_antilinear(c: CMat) -> Result<(CMat, i8), KaError> {
    let n = c.nrows();
    let square = &c * c.map(|x| x.conj());
    let r = square.trace() / C64::new(n as f64, 0.0);
    let off = frobenius(&(&square - CMat::identity(n, n) * r)) / frobenius(&square).max(1e-300);
    if off > 1e-8 {
        return Err(KaError::CompatibilityNotScalar(off));
    }
    if r.im.abs() > 1e-8 * r.norm().max(1e-300) {
        return Err(KaError::CompatibilityNotScalar(r.im.abs()));
    }
    let eps = if r.re >= 0.0 { 1i8 } else { -1 };
    let scale = C64::new(1.0 / r.norm().sqrt(), 0.0);
    Ok((c * scale, eps))
}

/// Construct the real/quaternionic structure or D endomorphism of the module.
pub fn build_structure(rep: &CliffordRep) -> Result<AntiLinearMap, KaError> {
    let (kind, expected_eps) = expected_structure(rep.sig);
    let t = match kind {
        StructureKind::Real | StructureKind::Quaternionic => 1i8,
        StructureKind::DType => -1,
    };
    let raw = solve_structure(rep, t)?;
    let (mat, eps) = normalize_antilinear(raw)?;
    if eps != expected_eps {
        return Err(KaError::StructureEpsilonMismatch {
            expected: expected_eps,
            measured: eps,
        });
    }
    Ok(AntiLinearMap { mat, epsilon: eps, kind })
}

/// Gram of the symmetrized inner product ½(⟨ξ,χ⟩ + conj(⟨Kξ,Kχ⟩)).
fn symmetrize_inner(g: &CMat, k: &AntiLinearMap) -> CMat {
    let twisted = (k.mat.adjoint() * g * &k.mat).map(|c| c.conj());
    (g + twisted) * C64::new(0.5, 0.0)
}

fn normalize_gram(g: CMat) -> CMat {
    let sv = g.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    g / C64::new(smax, 0.0)
}

/// Generator-level admissibility residual: G γ^i = s (γ^i)^adj G.
pub fn admissibility_residual(pairing: &Pairing, rep: &CliffordRep, s: i8) -> f64 {
    let g = &pairing.gram;
    let scale = frobenius(g).max(1e-300);
    let mut worst = 0.0f64;
    for gamma in &rep.gammas {
        let adj = match pairing.kind {
            PairingKind::Hermitian => gamma.adjoint(),
            PairingKind::Bilinear => gamma.transpose(),
        };
        let res = g * gamma - adj * g * C64::new(s as f64, 0.0);
        worst = worst.max(frobenius(&res) / scale);
    }
    worst
}

/// Measure (adjoint, symmetry) of a pairing against a representation.
pub fn classify(pairing: &Pairing, rep: &CliffordRep) -> Result<(i8, Option<i8>), KaError> {
    let res_pos = admissibility_residual(pairing, rep, 1);
    let res_neg = admissibility_residual(pairing, rep, -1);
    let s = if res_pos < ADMISSIBILITY_TOL {
        1i8
    } else if res_neg < ADMISSIBILITY_TOL {
        -1
    } else {
        return Err(KaError::NotAdmissible(res_pos.min(res_neg)));
    };
    let sigma = match pairing.kind {
        PairingKind::Hermitian => None,
        PairingKind::Bilinear => {
            let g = &pairing.gram;
            let scale = frobenius(g).max(1e-300);
            let sym = frobenius(&(g.transpose() - g)) / scale;
            let skew = frobenius(&(g.transpose() + g)) / scale;
            if sym < ADMISSIBILITY_TOL {
                Some(1)
            } else if skew < ADMISSIBILITY_TOL {
                Some(-1)
            } else {
                return Err(KaError::NotAdmissible(sym.min(skew)));
            }
        }
    };
    Ok((s, sigma))
}

fn i_pow(e: u32) -> C64 {
    I_C.powu(e % 4)
}

fn hermitian_gram(rep: &CliffordRep, inner: &CMat, use_nu_plus: bool) -> CMat {
    let sig = rep.sig;
    let nu_plus_mask = (1usize << sig.p) - 1;
    let nu_minus_mask = (sig.blade_count() - 1) & !nu_plus_mask;
    let (mask, phase) = if use_nu_plus {
        (nu_plus_mask, i_pow(binom2(sig.p)))
    } else {
        (nu_minus_mask, i_pow(binom2(sig.q + 1)))
    };
    normalize_gram(inner * &rep.blade_ops()[mask] * phase)
}

fn build_all(rep: &CliffordRep) -> Result<Pairings, KaError> {
    let sig = rep.sig;
    let structure = build_structure(rep)?;
    let inner = normalize_gram(symmetrize_inner(&averaged_inner(rep), &structure));

    let make_pairing = |gram: CMat, kind: PairingKind| -> Result<Pairing, KaError> {
        let mut pairing = Pairing {
            gram,
            kind,
            adjoint: 0,
            symmetry: None,
        };
        let (s, sigma) = classify(&pairing, rep)?;
        pairing.adjoint = s;
        pairing.symmetry = sigma;
        Ok(pairing)
    };

    let (hermitian_pos, hermitian_neg);
    if sig.dim() % 2 == 0 {
        let p_odd = sig.p % 2 == 1;
        let g_plus = hermitian_gram(rep, &inner, true);
        let g_minus = hermitian_gram(rep, &inner, false);
        let (gp, gn) = if p_odd { (g_plus, g_minus) } else { (g_minus, g_plus) };
        let sp = make_pairing(gp, PairingKind::Hermitian)?;
        let sn = make_pairing(gn, PairingKind::Hermitian)?;
        debug_assert_eq!(sp.adjoint, 1);
        debug_assert_eq!(sn.adjoint, -1);
        hermitian_pos = Some(sp);
        hermitian_neg = Some(sn);
    } else {
        let s_forced = expected_hermitian_adjoint_odd(sig.p);
        let pairing = make_pairing(hermitian_gram(rep, &inner, true), PairingKind::Hermitian)?;
        debug_assert_eq!(pairing.adjoint, s_forced);
        if s_forced == 1 {
            hermitian_pos = Some(pairing);
            hermitian_neg = None;
        } else {
            hermitian_pos = None;
            hermitian_neg = Some(pairing);
        }
    }

    // ℬ_s(ξ,χ) = 𝒮_s(ξ, K_struct χ)  ⟹  G_B = C† G_S
    let bilinear_from = |s: &Pairing| -> Result<Pairing, KaError> {
        make_pairing(structure.mat.adjoint() * &s.gram, PairingKind::Bilinear)
    };
    let bilinear_pos_raw = hermitian_pos.as_ref().map(&bilinear_from).transpose()?;
    let bilinear_neg_raw = hermitian_neg.as_ref().map(&bilinear_from).transpose()?;
    // store by the bilinear pairing's own adjoint type (flips for D)
    let mut bilinear_pos = None;
    let mut bilinear_neg = None;
    for b in [bilinear_pos_raw, bilinear_neg_raw].into_iter().flatten() {
        if b.adjoint == 1 {
            bilinear_pos = Some(b);
        } else {
            bilinear_neg = Some(b);
        }
    }

    // compatibility map from the Grams, K = (G_S G_B^{-1})ᵀ
    let some_s = hermitian_pos.as_ref().or(hermitian_neg.as_ref()).expect("one exists");
    let paired_b = match (sig.dim() % 2, some_s.adjoint) {
        (0, s) => if s == 1 { bilinear_pos.as_ref() } else { bilinear_neg.as_ref() },
        (_, _) => bilinear_pos.as_ref().or(bilinear_neg.as_ref()),
    }
    .expect("bilinear exists");
    let compat = compatibility_map(some_s, paired_b)?;

    let conj_sign_of = |s: Option<&Pairing>| -> Result<Option<i8>, KaError> {
        s.map(|p| measure_conjugation_sign(p, &compat)).transpose()
    };
    let conj_sign_pos = conj_sign_of(hermitian_pos.as_ref())?;
    let conj_sign_neg = conj_sign_of(hermitian_neg.as_ref())?;

    Ok(Pairings {
        inner_gram: inner,
        structure,
        hermitian_pos,
        hermitian_neg,
        bilinear_pos,
        bilinear_neg,
        compat,
        conj_sign_pos,
        conj_sign_neg,
    })
}

/// Admissible Hermitian pairing of adjoint type `s`.
pub fn build_hermitian(rep: &CliffordRep, s: i8) -> Result<Pairing, KaError> {
    let set = pairings(rep)?;
    match set.hermitian(s) {
        Some(p) => Ok(p.clone()),
        None => Err(KaError::AdjointTypeForced {
            sig: rep.sig,
            requested: s,
            forced: expected_hermitian_adjoint_odd(rep.sig.p),
        }),
    }
}

/// Admissible complex-bilinear pairing of adjoint type `s`.
pub fn build_bilinear(rep: &CliffordRep, s: i8) -> Result<Pairing, KaError> {
    let set = pairings(rep)?;
    match set.bilinear(s) {
        Some(p) => Ok(p.clone()),
        None => {
            let (forced, _) = expected_bilinear_types_odd(rep.sig);
            Err(KaError::AdjointTypeForced {
                sig: rep.sig,
                requested: s,
                forced,
            })
        }
    }
}

/// Unique anti-linear K with 𝒮(ξ,χ) = ℬ(ξ,Kχ); K² = ε·Id measured.
pub fn compatibility_map(s: &Pairing, b: &Pairing) -> Result<AntiLinearMap, KaError> {
    let b_inv = b
        .gram
        .clone()
        .try_inverse()
        .ok_or(KaError::CompatibilityNotScalar(f64::INFINITY))?;
    let c = (&s.gram * b_inv).transpose();
    let (mat, epsilon) = normalize_antilinear(c)?;
    // kind tag mirrors ε; DType information is not recoverable from K alone
    let kind = if epsilon == 1 {
        StructureKind::Real
    } else {
        StructureKind::Quaternionic
    };
    Ok(AntiLinearMap { mat, epsilon, kind })
}

/// Measured c in 𝒮(Kξ,Kχ) = c·conj(𝒮(ξ,χ)): C†G C = c·conj(G).
pub fn measure_conjugation_sign(s: &Pairing, k: &AntiLinearMap) -> Result<i8, KaError> {
    let lhs = k.mat.adjoint() * &s.gram * &k.mat;
    let rhs = s.gram.map(|c| c.conj());
    let scale = frobenius(&rhs).max(1e-300);
    let plus = frobenius(&(&lhs - &rhs)) / scale;
    let minus = frobenius(&(&lhs + &rhs)) / scale;
    if plus < 1e-8 {
        Ok(1)
    } else if minus < 1e-8 {
        Ok(-1)
    } else {
        Err(KaError::NotAdmissible(plus.min(minus)))
    }
}

/// One row of the measured-type grid emitted by the CLI `tables` command.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TableRow {
    pub p: u32,
    pub q: u32,
    pub d: u32,
    pub pairing: String,
    pub adjoint: i8,
    pub symmetry: Option<i8>,
    pub expected_adjoint: i8,
    pub expected_symmetry: Option<i8>,
    pub matches: bool,
}

/// Measured (s,σ) grid over all signatures with d ≤ max_d.
pub fn measured_table(max_d: u32) -> Result<Vec<TableRow>, KaError> {
    let mut rows = Vec::new();
    for d in 1..=max_d {
        for p in 0..=d {
            let sig = Signature::new(p, d - p);
            let rep = CliffordRep::build(sig, None)?;
            let set = pairings(&rep)?;
            if d % 2 == 0 {
                for s in [1i8, -1] {
                    let b = set.bilinear(s).expect("both types in even d");
                    let expected_sigma = expected_bilinear_symmetry_even(sig, s);
                    rows.push(TableRow {
                        p,
                        q: d - p,
                        d,
                        pairing: format!("B{}", if s == 1 { "+" } else { "-" }),
                        adjoint: b.adjoint,
                        symmetry: b.symmetry,
                        expected_adjoint: s,
                        expected_symmetry: Some(expected_sigma),
                        matches: b.adjoint == s && b.symmetry == Some(expected_sigma),
                    });
                    let herm = set.hermitian(s).expect("both types in even d");
                    rows.push(TableRow {
                        p,
                        q: d - p,
                        d,
                        pairing: format!("S{}", if s == 1 { "+" } else { "-" }),
                        adjoint: herm.adjoint,
                        symmetry: None,
                        expected_adjoint: s,
                        expected_symmetry: None,
                        matches: herm.adjoint == s,
                    });
                }
            } else {
                let s_forced = expected_hermitian_adjoint_odd(p);
                let herm = set
                    .hermitian(s_forced)
                    .expect("forced adjoint type exists");
                rows.push(TableRow {
                    p,
                    q: d - p,
                    d,
                    pairing: "S".to_string(),
                    adjoint: herm.adjoint,
                    symmetry: None,
                    expected_adjoint: s_forced,
                    expected_symmetry: None,
                    matches: herm.adjoint == s_forced,
                });
                let (bs, bsigma) = expected_bilinear_types_odd(sig);
                let b = set.bilinear(bs).expect("forced bilinear type exists");
                rows.push(TableRow {
                    p,
                    q: d - p,
                    d,
                    pairing: "B".to_string(),
                    adjoint: b.adjoint,
                    symmetry: b.symmetry,
                    expected_adjoint: bs,
                    expected_symmetry: Some(bsigma),
                    matches: b.adjoint == bs && b.symmetry == Some(bsigma),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    #[test]
    fn structure_types_match_residues() {
        // (2,0) real ε=+1; (4,0) quaternionic ε=−1; (3,0) D with ε=−1
        let cases = [
            (Signature::new(2, 0), StructureKind::Real, 1i8),
            (Signature::new(4, 0), StructureKind::Quaternionic, -1),
            (Signature::new(3, 0), StructureKind::DType, -1),
            (Signature::new(0, 1), StructureKind::DType, 1),
            (Signature::new(1, 0), StructureKind::Real, 1),
            (Signature::new(1, 4), StructureKind::Quaternionic, -1),
        ];
        for (sig, kind, eps) in cases {
            let rep = CliffordRep::build(sig, None).unwrap();
            let st = build_structure(&rep).unwrap();
            assert_eq!(st.kind, kind, "{}", sig);
            assert_eq!(st.epsilon, eps, "{}", sig);
        }
    }

    #[test]
    fn structure_blade_scan_agrees_with_dense_solver() {
        for sig in [Signature::new(3, 1), Signature::new(2, 1), Signature::new(3, 0)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            let (kind, _) = expected_structure(sig);
            let t = if kind == StructureKind::DType { -1 } else { 1 };
            let fast = solve_structure(&rep, t).unwrap();
            // dense solve of the same stacked system
            let n = rep.dim();
            let id = CMat::identity(n, n);
            let d = sig.dim() as usize;
            let mut stacked = CMat::zeros(d * n * n, n * n);
            for (i, g) in rep.gammas.iter().enumerate() {
                let a = id.kronecker(g);
                let b = g.map(|c| c.conj()).transpose().kronecker(&id) * C64::new(t as f64, 0.0);
                stacked.rows_mut(i * n * n, n * n).copy_from(&(a - b));
            }
            let ns = nullspace(&stacked, STRUCTURE_NULL_TOL);
            assert_eq!(ns.len(), 1, "{}", sig);
            let dense = CMat::from_column_slice(n, n, ns[0].as_slice());
            // proportional up to a complex scalar
            let ratio = {
                let (mut best, mut arg) = (0.0, (0usize, 0usize));
                for r in 0..n {
                    for c in 0..n {
                        if dense[(r, c)].norm() > best {
                            best = dense[(r, c)].norm();
                            arg = (r, c);
                        }
                    }
                }
                fast[arg] / dense[arg]
            };
            assert!(frobenius(&(&fast - dense * ratio)) < 1e-8 * frobenius(&fast));
        }
    }

    #[test]
    fn averaged_inner_is_group_invariant() {
        let mut rng = sample::sub_rng(13, "pairing-avg", 0);
        for sig in [Signature::new(3, 1), Signature::new(2, 3)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            let set = pairings(&rep).unwrap();
            let g = &set.inner_gram;
            // Hermitian positive-definite
            assert!(frobenius(&(g.adjoint() - g)) < 1e-12 * frobenius(g));
            let xi = sample::random_spinor(&mut rng, sig);
            let norm_sq = (xi.comps.adjoint() * g * &xi.comps)[(0, 0)];
            assert!(norm_sq.re > 0.0 && norm_sq.im.abs() < 1e-10 * norm_sq.re);
            // sampled blade elements preserve it
            for mask in [1usize, 3, 5, rep.sig.blade_count() - 1] {
                let m = &rep.blade_ops()[mask % rep.sig.blade_count()];
                let pushed = m.adjoint() * g * m;
                assert!(frobenius(&(pushed - g)) < 1e-10 * frobenius(g), "{}", sig);
            }
        }
    }

    #[test]
    fn admissibility_all_signatures() {
        // odd d ≤ 9, even d ≤ 10
        for d in 1..=10u32 {
            for p in 0..=d {
                let sig = Signature::new(p, d - p);
                let rep = CliffordRep::build(sig, None).unwrap();
                let set = pairings(&rep).unwrap();
                for pairing in [
                    set.hermitian_pos.as_ref(),
                    set.hermitian_neg.as_ref(),
                    set.bilinear_pos.as_ref(),
                    set.bilinear_neg.as_ref(),
                ]
                .into_iter()
                .flatten()
                {
                    let res = admissibility_residual(pairing, &rep, pairing.adjoint);
                    assert!(res < ADMISSIBILITY_TOL, "{} res {}", sig, res);
                }
            }
        }
    }

    #[test]
    fn herm_pairing_examples() {
        // Euclidean even d, s=+1: γ^i self-adjoint w.r.t. 𝒮₊
        let sig = Signature::new(4, 0);
        let rep = CliffordRep::build(sig, None).unwrap();
        let sp = build_hermitian(&rep, 1).unwrap();
        for g in &rep.gammas {
            let res = &sp.gram * g - g.adjoint() * &sp.gram;
            assert!(frobenius(&res) < 1e-12 * frobenius(&sp.gram));
        }
        // S₋ relation to S₊ up to a positive real rescale
        let sn = build_hermitian(&rep, -1).unwrap();
        let phase = i_pow(binom2(sig.p)) * i_pow(binom2(sig.q + 1));
        let nu_op = &rep.blade_ops()[sig.blade_count() - 1];
        let twisted = &sp.gram * nu_op * phase;
        // measure a single positive real ratio
        let (mut best, mut arg) = (0.0, (0usize, 0usize));
        for r in 0..twisted.nrows() {
            for c in 0..twisted.ncols() {
                if twisted[(r, c)].norm() > best {
                    best = twisted[(r, c)].norm();
                    arg = (r, c);
                }
            }
        }
        let ratio = sn.gram[arg] / twisted[arg];
        assert!(ratio.im.abs() < 1e-10 && ratio.re > 0.0, "ratio {}", ratio);
        assert!(frobenius(&(&sn.gram - twisted * ratio)) < 1e-10);
    }

    #[test]
    fn odd_adjoint_forced() {
        // (5,1) is even: both adjoint types exist
        let rep51 = CliffordRep::build(Signature::new(5, 1), None).unwrap();
        assert!(build_hermitian(&rep51, 1).is_ok());
        assert!(build_hermitian(&rep51, -1).is_ok());
        // (3,0): p ≡₄ 3 forces s = +1
        let rep3 = CliffordRep::build(Signature::new(3, 0), None).unwrap();
        assert!(build_hermitian(&rep3, 1).is_ok());
        assert!(matches!(
            build_hermitian(&rep3, -1),
            Err(KaError::AdjointTypeForced { .. })
        ));
    }

    #[test]
    fn bilinear_examples_against_tables() {
        // (6,0), s=+1: σ = −1
        let rep6 = CliffordRep::build(Signature::new(6, 0), None).unwrap();
        let b = build_bilinear(&rep6, 1).unwrap();
        assert_eq!(b.symmetry, Some(-1));
        // (8,0), s=+1: σ = +1
        let rep8 = CliffordRep::build(Signature::new(8, 0), None).unwrap();
        let b8 = build_bilinear(&rep8, 1).unwrap();
        assert_eq!(b8.symmetry, Some(1));
        // (3,0): adjoint −1, σ = −1
        let rep3 = CliffordRep::build(Signature::new(3, 0), None).unwrap();
        let b3 = build_bilinear(&rep3, -1).unwrap();
        assert_eq!(b3.adjoint, -1);
        assert_eq!(b3.symmetry, Some(-1));
    }

    #[test]
    fn full_table_grid_d_le_9() {
        let rows = measured_table(9).unwrap();
        for row in &rows {
            assert!(
                row.matches,
                "table mismatch at ({},{}) {}: measured ({}, {:?}), expected ({}, {:?})",
                row.p, row.q, row.pairing, row.adjoint, row.symmetry,
                row.expected_adjoint, row.expected_symmetry
            );
        }
    }

    #[test]
    fn compatibility_map_matches_structure() {
        let mut rng = sample::sub_rng(13, "pairing-compat", 0);
        for sig in [Signature::new(2, 0), Signature::new(4, 0), Signature::new(3, 0), Signature::new(5, 1)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            let set = pairings(&rep).unwrap();
            let k = &set.compat;
            // ε matches the residue class
            let (_, eps) = expected_structure(sig);
            assert_eq!(k.epsilon, eps, "{}", sig);
            // K agrees with the structure used in building ℬ up to phase
            let c = &set.structure.mat;
            let ratio = {
                let (mut best, mut arg) = (0.0, (0usize, 0usize));
                for r in 0..c.nrows() {
                    for cc in 0..c.ncols() {
                        if c[(r, cc)].norm() > best {
                            best = c[(r, cc)].norm();
                            arg = (r, cc);
                        }
                    }
                }
                k.mat[arg] / c[arg]
            };
            assert!(
                frobenius(&(&k.mat - c * ratio)) < 1e-8 * frobenius(&k.mat),
                "{}",
                sig
            );
            // 𝒮(Kξ,Kχ) = εσ conj(𝒮(ξ,χ)) on random pairs
            let s = set
                .hermitian_pos
                .as_ref()
                .or(set.hermitian_neg.as_ref())
                .unwrap();
            let b = match sig.dim() % 2 {
                0 => set.bilinear(s.adjoint).unwrap(),
                _ => set.bilinear_pos.as_ref().or(set.bilinear_neg.as_ref()).unwrap(),
            };
            let sigma = b.symmetry.unwrap() as f64;
            let epsf = k.epsilon as f64;
            for _ in 0..5 {
                let xi = sample::random_spinor(&mut rng, sig);
                let chi = sample::random_spinor(&mut rng, sig);
                let lhs = s.eval(&k.apply(&xi.comps), &k.apply(&chi.comps));
                let rhs = s.eval(&xi.comps, &chi.comps).conj() * epsf * sigma;
                assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()), "{}", sig);
                // defining relation 𝒮(ξ,χ) = ℬ(ξ,Kχ)
                let direct = s.eval(&xi.comps, &chi.comps);
                let via_b = b.eval(&xi.comps, &k.apply(&chi.comps));
                assert!((direct - via_b).norm() < 1e-9 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn conjugation_sign_matches_formula() {
        for d in 1..=9u32 {
            for p in 0..=d {
                let sig = Signature::new(p, d - p);
                let rep = CliffordRep::build(sig, None).unwrap();
                let set = pairings(&rep).unwrap();
                for s in [1i8, -1] {
                    if let Some(measured) = set.conj_sign(s) {
                        let expected = expected_conjugation_sign(sig, s);
                        assert_eq!(measured, expected, "({},{}) s={}", p, d - p, s);
                    }
                }
            }
        }
    }

    #[test]
    fn chiral_subspace_geometry() {
        let mut rng = sample::sub_rng(13, "pairing-chiral", 0);
        // Euclidean even d: Σ⁺ ⊥ Σ⁻ under 𝒮; under ℬ orthogonal when
        // d ≡ 0 (mod 4) and isotropic when d ≡ 2 (mod 4)
        for d in [2u32, 4, 6, 8] {
            let sig = Signature::new(d, 0);
            let rep = CliffordRep::build(sig, None).unwrap();
            let set = pairings(&rep).unwrap();
            let s = set.hermitian(1).unwrap();
            let b = set.bilinear(1).unwrap();
            let xi = rep.chirality_project(&sample::random_spinor(&mut rng, sig), 1).unwrap();
            let chi_m = rep.chirality_project(&sample::random_spinor(&mut rng, sig), -1).unwrap();
            let chi_p = rep.chirality_project(&sample::random_spinor(&mut rng, sig), 1).unwrap();
            let cross_s = s.eval(&xi.comps, &chi_m.comps).norm();
            assert!(cross_s < 1e-10, "S cross d={} {}", d, cross_s);
            if d % 4 == 0 {
                let cross_b = b.eval(&xi.comps, &chi_m.comps).norm();
                assert!(cross_b < 1e-10, "B cross d={} {}", d, cross_b);
            } else {
                let same_b = b.eval(&xi.comps, &chi_p.comps).norm();
                assert!(same_b < 1e-10, "B isotropy d={} {}", d, same_b);
            }
        }
        // (5,1): the chiral splitting is isotropic for 𝒮
        let sig = Signature::new(5, 1);
        let rep = CliffordRep::build(sig, None).unwrap();
        let set = pairings(&rep).unwrap();
        let s = set.hermitian(1).unwrap();
        let xi = rep.chirality_project(&sample::random_spinor(&mut rng, sig), 1).unwrap();
        let chi = rep.chirality_project(&sample::random_spinor(&mut rng, sig), 1).unwrap();
        assert!(s.eval(&xi.comps, &chi.comps).norm() < 1e-10);
    }

    #[test]
    fn classify_rejects_non_admissible() {
        let sig = Signature::new(3, 1);
        let rep = CliffordRep::build(sig, None).unwrap();
        let mut rng = sample::sub_rng(13, "pairing-reject", 0);
        let n = rep.dim();
        let garbage = CMat::from_fn(n, n, |_, _| sample::random_complex(&mut rng));
        let pairing = Pairing {
            gram: garbage,
            kind: PairingKind::Bilinear,
            adjoint: 0,
            symmetry: None,
        };
        assert!(classify(&pairing, &rep).is_err());
    }
}
