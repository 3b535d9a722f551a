//! Irreducible complex Clifford modules: gamma-matrix construction for any
//! signature, the quantization/dequantization maps, and chirality machinery.

use crate::algebra::{C64, I_C, Multivector, ONE_C, Signature, ZERO_C};
use crate::error::KaError;
use crate::linalg::{expm, CMat, CVec};
use std::sync::OnceLock;

/// Complex spinor with an optional chirality tag (even d only).
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    pub comps: CVec,
    pub chirality: Option<i8>,
}

impl Spinor {
    pub fn new(comps: CVec) -> Self {
        Spinor { comps, chirality: None }
    }

    pub fn with_chirality(comps: CVec, mu: i8) -> Self {
        Spinor { comps, chirality: Some(mu) }
    }

    pub fn norm(&self) -> f64 {
        self.comps.norm()
    }

    pub fn scale(&self, c: C64) -> Self {
        Spinor { comps: &self.comps * c, chirality: self.chirality }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
    Mixed,
}

/// Irreducible complex Clifford module for `sig`: d gamma matrices of size
/// N×N, N = 2^⌊d/2⌋, the quantized complex volume form, and for odd d the
/// module label ℓ with γ_ℓ(ν_ℂ) = ℓ·Id.
pub struct CliffordRep {
    pub sig: Signature,
    pub gammas: Vec<CMat>,
    pub ell: Option<i8>,
    pub volume_op: CMat,
    blades: OnceLock<Vec<CMat>>,
    blade_sq: OnceLock<Vec<C64>>,
    pairings: OnceLock<Box<crate::pairing::Pairings>>,
}

impl CliffordRep {
    /// Build by tensor-product recursion over 2×2 generators; timelike
    /// directions pick up a factor of i. For odd d the even (d−1) set is
    /// extended by a multiple of its volume operator, and ℓ selects the
    /// module (γ^d flips sign between the two).
    pub fn build(sig: Signature, ell: Option<i8>) -> Result<Self, KaError> {
        let d = sig.dim();
        if d == 0 || d > 10 {
            return Err(KaError::UnsupportedDimension(d));
        }
        let ell = if d % 2 == 1 { Some(ell.unwrap_or(1)) } else { None };
        let m = (d / 2) as usize;
        let n = 1usize << m;

        // Euclidean anticommuting set: pairs (σ1, σ2) behind a σ3 chain.
        let s1 = CMat::from_row_slice(2, 2, &[ZERO_C, ONE_C, ONE_C, ZERO_C]);
        let s2 = CMat::from_row_slice(2, 2, &[ZERO_C, -I_C, I_C, ZERO_C]);
        let s3 = CMat::from_row_slice(2, 2, &[ONE_C, ZERO_C, ZERO_C, -ONE_C]);
        let id2 = CMat::identity(2, 2);

        let kron_chain = |slot: usize, mid: &CMat| -> CMat {
            let mut acc = CMat::identity(1, 1);
            for pos in 0..m {
                let factor = if pos < slot {
                    &s3
                } else if pos == slot {
                    mid
                } else {
                    &id2
                };
                acc = acc.kronecker(factor);
            }
            acc
        };

        let mut euclid: Vec<CMat> = Vec::with_capacity(d as usize);
        for j in 0..m {
            euclid.push(kron_chain(j, &s1));
            euclid.push(kron_chain(j, &s2));
        }
        if d % 2 == 1 {
            // γ^d = c · (γ^1 ⋯ γ^{d−1}); the Euclidean product squares to
            // (−1)^{C(d−1,2)}, pick c ∈ {1, i} so the square is +1.
            let mut vol = CMat::identity(n, n);
            for g in &euclid {
                vol = vol * g;
            }
            let k = (d - 1) as u64;
            let c = if (k * k.saturating_sub(1) / 2) % 2 == 0 { ONE_C } else { I_C };
            euclid.push(vol * c);
        }

        // timelike twists per the signature convention (indices > p)
        let mut gammas = euclid;
        for (idx, g) in gammas.iter_mut().enumerate() {
            if (idx as u32) >= sig.p {
                *g *= I_C;
            }
        }

        // volume operator Ψ(ν_ℂ)
        let mut vol = CMat::identity(n, n);
        for g in &gammas {
            vol = vol * g;
        }
        vol *= sig.complex_volume_phase();

        let mut rep = CliffordRep {
            sig,
            gammas,
            ell,
            volume_op: vol,
            blades: OnceLock::new(),
            blade_sq: OnceLock::new(),
            pairings: OnceLock::new(),
        };

        if let Some(l) = ell {
            // γ_ℓ(ν_ℂ) = ℓ·Id; flip γ^d to select the other module.
            let scalar = rep.volume_op[(0, 0)];
            let current = if scalar.re > 0.0 { 1i8 } else { -1 };
            if current != l {
                let last = rep.gammas.len() - 1;
                rep.gammas[last] = -rep.gammas[last].clone();
                rep.volume_op = -rep.volume_op;
            }
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.sig.module_dim()
    }

    /// Blade operator Ψ(e_I) = γ^{i1} ⋯ γ^{ik} for every bitmask, cached.
    pub fn blade_ops(&self) -> &Vec<CMat> {
        self.blades.get_or_init(|| {
            let n = self.dim();
            let count = self.sig.blade_count();
            let mut out = Vec::with_capacity(count);
            out.push(CMat::identity(n, n));
            for mask in 1..count {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                out.push(&self.gammas[low] * &out[rest]);
            }
            out
        })
    }

    /// Scalar value of e_I ◇ e_I (±1), cached; (Ψ(e_I))⁻¹ = Ψ(e_I)/that.
    pub fn blade_squares(&self) -> &Vec<C64> {
        self.blade_sq.get_or_init(|| {
            (0..self.sig.blade_count())
                .map(|mask| {
                    let b = Multivector::blade(self.sig, mask);
                    b.geo(&b).expect("same signature").scalar_part()
                })
                .collect()
        })
    }

    pub(crate) fn pairings_cell(&self) -> &OnceLock<Box<crate::pairing::Pairings>> {
        &self.pairings
    }

    /// Quantization Ψ_γ (even d) / Ψ_ℓ (odd d): Σ_I a_I Ψ(e_I).
    pub fn quantize(&self, a: &Multivector) -> CMat {
        let n = self.dim();
        let blades = self.blade_ops();
        let mut out = CMat::zeros(n, n);
        for (mask, &c) in a.coeffs.iter().enumerate() {
            if c != ZERO_C {
                out += &blades[mask] * c;
            }
        }
        out
    }

    /// Dequantization by trace orthogonality: coefficient of e_I is
    /// Tr(E · Ψ(e_I)⁻¹)/N. For odd d only the truncated blades are used
    /// (degrees ≤ (d−1)/2), inverting Ψ^<_ℓ.
    pub fn dequantize(&self, e: &CMat) -> Multivector {
        let n = self.dim() as f64;
        let d = self.sig.dim();
        let max_deg = if d % 2 == 0 { d } else { (d - 1) / 2 };
        let blades = self.blade_ops();
        let squares = self.blade_squares();
        let mut out = Multivector::zero(self.sig);
        for mask in 0..self.sig.blade_count() {
            if (mask as u64).count_ones() > max_deg {
                continue;
            }
            // Tr(E · M_I) / (s_I · N)
            let m = &blades[mask];
            let mut tr = ZERO_C;
            for r in 0..e.nrows() {
                for c in 0..e.ncols() {
                    tr += e[(r, c)] * m[(c, r)];
                }
            }
            out.set(mask, tr / (squares[mask] * n));
        }
        out.prune()
    }

    pub fn apply(&self, a: &Multivector, xi: &Spinor) -> Spinor {
        Spinor::new(self.quantize(a) * &xi.comps)
    }

    /// Chirality projector ½(Id + μ Ψ(ν_ℂ)) applied to a spinor (even d).
    pub fn chirality_project(&self, xi: &Spinor, mu: i8) -> Result<Spinor, KaError> {
        if self.sig.dim() % 2 == 1 {
            return Err(KaError::ParityPrecondition(
                "chirality projection requires even d",
            ));
        }
        let v = (&xi.comps + &self.volume_op * &xi.comps * C64::new(mu as f64, 0.0))
            * C64::new(0.5, 0.0);
        Ok(Spinor::with_chirality(v, mu))
    }

    pub fn chirality_of(&self, xi: &Spinor) -> Result<Chirality, KaError> {
        if self.sig.dim() % 2 == 1 {
            return Err(KaError::ParityPrecondition("chirality requires even d"));
        }
        let v = &self.volume_op * &xi.comps;
        let n = xi.norm();
        if n == 0.0 {
            return Err(KaError::ZeroSpinor);
        }
        let plus = (&v - &xi.comps).norm();
        let minus = (&v + &xi.comps).norm();
        let tol = 1e-10 * n;
        if plus < tol {
            Ok(Chirality::Plus)
        } else if minus < tol {
            Ok(Chirality::Minus)
        } else {
            Ok(Chirality::Mixed)
        }
    }

    /// Spin^c group element z·exp(Ψ(b)) from a bivector and a unit phase.
    pub fn group_element(&self, bivector: &Multivector, z: C64) -> CMat {
        expm(&self.quantize(bivector)) * z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{vee, Multivector};
    use crate::linalg::{frobenius, max_abs, rank};
    use crate::sample;

    fn all_signatures(max_d: u32) -> Vec<Signature> {
        let mut v = Vec::new();
        for d in 1..=max_d {
            for p in 0..=d {
                v.push(Signature::new(p, d - p));
            }
        }
        v
    }

    #[test]
    fn anticommutation_all_signatures() {
        for sig in all_signatures(10) {
            let rep = CliffordRep::build(sig, None).unwrap();
            let n = rep.dim();
            let id = CMat::identity(n, n);
            let mut worst = 0.0f64;
            for i in 0..sig.dim() as usize {
                for j in 0..sig.dim() as usize {
                    let anti = &rep.gammas[i] * &rep.gammas[j] + &rep.gammas[j] * &rep.gammas[i];
                    let expect = if i == j {
                        &id * C64::new(2.0 * sig.metric(i as u32 + 1), 0.0)
                    } else {
                        CMat::zeros(n, n)
                    };
                    worst = worst.max(max_abs(&(anti - expect)));
                }
            }
            assert!(worst < 1e-12, "{} residual {}", sig, worst);
        }
    }

    #[test]
    fn dimensions_and_volume() {
        let rep = CliffordRep::build(Signature::new(2, 0), None).unwrap();
        assert_eq!(rep.dim(), 2);
        let rep6 = CliffordRep::build(Signature::new(6, 0), None).unwrap();
        assert_eq!(rep6.dim(), 8);
        // even d: Ψ(ν_ℂ)² = Id, anticommutes with each γ^i
        for sig in [Signature::new(4, 0), Signature::new(3, 3), Signature::new(5, 1)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            let n = rep.dim();
            let sq = &rep.volume_op * &rep.volume_op - CMat::identity(n, n);
            assert!(max_abs(&sq) < 1e-12);
            for g in &rep.gammas {
                let anti = g * &rep.volume_op + &rep.volume_op * g;
                assert!(max_abs(&anti) < 1e-12);
            }
        }
    }

    #[test]
    fn odd_module_label_selectable() {
        for sig in [Signature::new(3, 0), Signature::new(2, 3), Signature::new(0, 5)] {
            for l in [1i8, -1] {
                let rep = CliffordRep::build(sig, Some(l)).unwrap();
                let n = rep.dim();
                let diff = &rep.volume_op - CMat::identity(n, n) * C64::new(l as f64, 0.0);
                assert!(max_abs(&diff) < 1e-12, "{} ell={}", sig, l);
            }
        }
    }

    #[test]
    fn out_of_range_dimension() {
        assert!(CliffordRep::build(Signature::new(11, 0), None).is_err());
    }

    #[test]
    fn quantize_basics() {
        let sig = Signature::new(3, 1);
        let rep = CliffordRep::build(sig, None).unwrap();
        let n = rep.dim();
        let id = rep.quantize(&Multivector::one(sig));
        assert!(max_abs(&(id - CMat::identity(n, n))) < 1e-14);
        for i in 1..=sig.dim() {
            let g = rep.quantize(&Multivector::basis_one_form(sig, i));
            assert!(max_abs(&(g - rep.gammas[(i - 1) as usize].clone())) < 1e-14);
        }
    }

    #[test]
    fn trace_matches_ka_trace() {
        let mut rng = sample::sub_rng(11, "rep-trace", 0);
        for sig in [Signature::new(4, 0), Signature::new(2, 2), Signature::new(3, 0)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            for _ in 0..5 {
                let a = sample::random_form(&mut rng, sig, None);
                let tr: C64 = rep.quantize(&a).trace();
                // even d: Tr Ψ(a) = 2^{d/2} a^(0); odd d the same formula
                // holds for truncated input
                let a_for = if sig.dim() % 2 == 1 {
                    a.truncate((sig.dim() - 1) / 2)
                } else {
                    a.clone()
                };
                let tr2: C64 = rep.quantize(&a_for).trace();
                assert!((tr2 - a_for.ka_trace()).norm() < 1e-10 * (1.0 + a.norm()));
                if sig.dim() % 2 == 0 {
                    assert!((tr - a.ka_trace()).norm() < 1e-10 * (1.0 + a.norm()));
                }
            }
        }
    }

    #[test]
    fn quantize_is_algebra_morphism_even() {
        let mut rng = sample::sub_rng(11, "rep-morphism", 0);
        for sig in [Signature::new(4, 0), Signature::new(2, 2), Signature::new(1, 3)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            for _ in 0..6 {
                let a = sample::random_form(&mut rng, sig, None);
                let b = sample::random_form(&mut rng, sig, None);
                let lhs = rep.quantize(&a.geo(&b).unwrap());
                let rhs = rep.quantize(&a) * rep.quantize(&b);
                assert!(frobenius(&(lhs - rhs)) < 1e-10 * (1.0 + a.norm() * b.norm()));
            }
        }
    }

    #[test]
    fn vee_morphism_odd() {
        let mut rng = sample::sub_rng(11, "rep-vee", 0);
        for sig in [Signature::new(3, 0), Signature::new(1, 4), Signature::new(5, 2)] {
            let m = (sig.dim() - 1) / 2;
            for l in [1i8, -1] {
                let rep = CliffordRep::build(sig, Some(l)).unwrap();
                for _ in 0..5 {
                    let a = sample::random_form(&mut rng, sig, None).truncate(m);
                    let b = sample::random_form(&mut rng, sig, None).truncate(m);
                    let lhs = rep.quantize(&vee(&a, &b, l).unwrap());
                    let rhs = rep.quantize(&a) * rep.quantize(&b);
                    assert!(
                        frobenius(&(lhs - rhs)) < 1e-10 * (1.0 + a.norm() * b.norm()),
                        "{} ell={}",
                        sig,
                        l
                    );
                }
            }
        }
    }

    #[test]
    fn dequantize_roundtrip() {
        let mut rng = sample::sub_rng(11, "rep-roundtrip", 0);
        for sig in [Signature::new(4, 0), Signature::new(2, 1), Signature::new(3, 2), Signature::new(2, 4)] {
            let rep = CliffordRep::build(sig, None).unwrap();
            let d = sig.dim();
            for _ in 0..6 {
                let a = if d % 2 == 0 {
                    sample::random_form(&mut rng, sig, None)
                } else {
                    sample::random_form(&mut rng, sig, None).truncate((d - 1) / 2)
                };
                let back = rep.dequantize(&rep.quantize(&a));
                assert!(back.dist(&a) < 1e-10 * (1.0 + a.norm()), "{}", sig);
            }
        }
    }

    #[test]
    fn odd_quantization_factors_through_truncation() {
        // Ψ_ℓ(a) = Ψ^<_ℓ(2𝒫_<(𝒫_ℓ(a))) for arbitrary full forms
        let mut rng = sample::sub_rng(11, "rep-pushthrough", 0);
        for sig in [Signature::new(3, 0), Signature::new(2, 3), Signature::new(7, 0)] {
            for l in [1i8, -1] {
                let rep = CliffordRep::build(sig, Some(l)).unwrap();
                for _ in 0..4 {
                    let a = sample::random_form(&mut rng, sig, None);
                    let pushed = crate::algebra::push_truncated(&a, l).unwrap();
                    let lhs = rep.quantize(&a);
                    let rhs = rep.quantize(&pushed);
                    assert!(
                        frobenius(&(lhs - rhs)) < 1e-10 * (1.0 + a.norm()),
                        "{} ell={}",
                        sig,
                        l
                    );
                }
            }
        }
    }

    #[test]
    fn volume_op_commutation_with_even_odd_forms() {
        let mut rng = sample::sub_rng(11, "rep-volcomm", 0);
        let sig = Signature::new(4, 2);
        let rep = CliffordRep::build(sig, None).unwrap();
        for k in 0..=sig.dim() {
            let b = sample::random_form(&mut rng, sig, Some(k));
            let q = rep.quantize(&b);
            let comm = &q * &rep.volume_op
                - &rep.volume_op * &q * C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            assert!(max_abs(&comm) < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn chirality_projection() {
        let mut rng = sample::sub_rng(11, "rep-chiral", 0);
        let sig = Signature::new(4, 0);
        let rep = CliffordRep::build(sig, None).unwrap();
        let xi = sample::random_spinor(&mut rng, sig);
        for mu in [1i8, -1] {
            let pr = rep.chirality_project(&xi, mu).unwrap();
            let twice = rep.chirality_project(&pr, mu).unwrap();
            assert!((&twice.comps - &pr.comps).norm() < 1e-12);
            let ev = &rep.volume_op * &pr.comps - &pr.comps * C64::new(mu as f64, 0.0);
            assert!(ev.norm() < 1e-12);
            assert_eq!(
                rep.chirality_of(&pr).unwrap(),
                if mu == 1 { Chirality::Plus } else { Chirality::Minus }
            );
        }
        assert_eq!(rep.chirality_of(&xi).unwrap(), Chirality::Mixed);
        // rank of the projector is N/2
        let n = rep.dim();
        let proj = (CMat::identity(n, n) + &rep.volume_op) * C64::new(0.5, 0.0);
        assert_eq!(rank(&proj, 1e-10), n / 2);
        // odd d errors
        let rep3 = CliffordRep::build(Signature::new(3, 0), None).unwrap();
        assert!(rep3.chirality_project(&sample::random_spinor(&mut rng, Signature::new(3, 0)), 1).is_err());
    }
}
