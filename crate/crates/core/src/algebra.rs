//! Complexified exterior algebra of a quadratic space with the geometric
//! product, generalized products, Hodge star, involutions and the
//! Kähler-Atiyah trace.
//!
//! Multivectors are stored densely: coefficient `coeffs[mask]` multiplies the
//! basis blade `e^{i_1} ∧ … ∧ e^{i_k}` where bit `i-1` of `mask` selects
//! `e^i`, indices ascending. The metric is orthonormal with `e^i ◇ e^i = +1`
//! for `i ≤ p` and `−1` for `i > p` (plus convention `v² = h(v,v)`).

use crate::error::KaError;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO_C: C64 = C64::new(0.0, 0.0);
pub const ONE_C: C64 = C64::new(1.0, 0.0);
pub const I_C: C64 = C64::new(0.0, 1.0);

/// Coefficients below `PRUNE_REL * max|coeff|` may be dropped.
pub const PRUNE_REL: f64 = 1e-14;

/// Metric signature (p pluses, q minuses), d = p + q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: u32,
    pub q: u32,
}

impl Signature {
    pub fn new(p: u32, q: u32) -> Self {
        Signature { p, q }
    }

    pub fn dim(&self) -> u32 {
        self.p + self.q
    }

    /// Number of basis blades, 2^d.
    pub fn blade_count(&self) -> usize {
        1usize << self.dim()
    }

    /// h(e_i, e_i) for the 1-based index `i`.
    pub fn metric(&self, i: u32) -> f64 {
        debug_assert!(i >= 1 && i <= self.dim());
        if i <= self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// Metric factor picked up when indices in `mask` are contracted away.
    pub fn metric_of_mask(&self, mask: usize) -> f64 {
        let timelike = (mask >> self.p) as u64;
        if timelike.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// i^{q + ⌊d/2⌋}, the phase of the complex volume form.
    pub fn complex_volume_phase(&self) -> C64 {
        let e = (self.q + self.dim() / 2) % 4;
        I_C.powu(e)
    }

    /// 2^{⌊d/2⌋}, the dimension of the irreducible complex Clifford module.
    pub fn module_dim(&self) -> usize {
        1usize << (self.dim() / 2)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Sign of reordering the concatenation `I, J` into canonical ascending
/// order, counting transpositions by popcount prefixes. O(|J|) per call.
fn reorder_sign(i_mask: usize, j_mask: usize) -> f64 {
    let mut swaps = 0u32;
    let mut j = j_mask;
    while j != 0 {
        let bit = j.trailing_zeros();
        swaps += ((i_mask >> (bit + 1)) as u64).count_ones();
        j &= j - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense complex exterior form on `(V*, h*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    pub sig: Signature,
    pub coeffs: Vec<C64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![ZERO_C; sig.blade_count()],
        }
    }

    pub fn scalar(sig: Signature, c: C64) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[0] = c;
        mv
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, ONE_C)
    }

    /// Basis blade for a bitmask.
    pub fn blade(sig: Signature, mask: usize) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[mask] = ONE_C;
        mv
    }

    /// Basis one-form e^i (1-based).
    pub fn basis_one_form(sig: Signature, i: u32) -> Self {
        Self::blade(sig, 1usize << (i - 1))
    }

    /// One-form with the given components in the orthonormal basis.
    pub fn one_form(sig: Signature, comps: &[C64]) -> Self {
        assert_eq!(comps.len(), sig.dim() as usize);
        let mut mv = Self::zero(sig);
        for (i, &c) in comps.iter().enumerate() {
            mv.coeffs[1usize << i] = c;
        }
        mv
    }

    /// Real volume form ν = e^1 ∧ … ∧ e^d.
    pub fn volume(sig: Signature) -> Self {
        Self::blade(sig, sig.blade_count() - 1)
    }

    /// Complex volume form ν_ℂ = i^{q+⌊d/2⌋} ν; satisfies ν_ℂ ◇ ν_ℂ = 1.
    pub fn complex_volume(sig: Signature) -> Self {
        let mut mv = Self::volume(sig);
        mv.coeffs[sig.blade_count() - 1] = sig.complex_volume_phase();
        mv
    }

    pub fn coeff(&self, mask: usize) -> C64 {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, c: C64) {
        self.coeffs[mask] = c;
    }

    pub fn scalar_part(&self) -> C64 {
        self.coeffs[0]
    }

    /// Degree-k component α^{(k)}.
    pub fn grade(&self, k: u32) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if (mask as u64).count_ones() == k {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    /// Degrees carrying a coefficient above `tol` in magnitude.
    pub fn support_degrees(&self, tol: f64) -> Vec<u32> {
        let mut present = vec![false; self.sig.dim() as usize + 1];
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tol {
                present[(mask as u64).count_ones() as usize] = true;
            }
        }
        (0..=self.sig.dim()).filter(|&k| present[k as usize]).collect()
    }

    /// Restriction to degrees ≤ m (the truncated algebra carrier for odd d).
    pub fn truncate(&self, m: u32) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if (mask as u64).count_ones() <= m {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    pub fn is_homogeneous(&self, k: u32, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(mask, c)| (mask as u64).count_ones() == k || c.norm() <= tol)
    }

    /// Coefficient two-norm (metric-free), used for relative residuals.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    /// Drop coefficients below the relative prune threshold.
    pub fn prune(mut self) -> Self {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let cut = PRUNE_REL * max;
        for c in self.coeffs.iter_mut() {
            if c.norm() < cut {
                *c = ZERO_C;
            }
        }
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Complex conjugation of coefficients.
    pub fn conj(&self) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Real part of every coefficient.
    pub fn real_part(&self) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| C64::new(a.re, 0.0)).collect(),
        }
    }

    /// Imaginary part of every coefficient, as a real form.
    pub fn imag_part(&self) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| C64::new(a.im, 0.0)).collect(),
        }
    }

    /// Largest imaginary coefficient magnitude (reality defect).
    pub fn imag_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Signature automorphism π(α) = (−1)^deg α.
    pub fn parity(&self) -> Self {
        self.degree_sign_map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// Reversion anti-automorphism τ(α) = (−1)^{C(deg,2)} α.
    pub fn reversion(&self) -> Self {
        self.degree_sign_map(|k| if (k * k.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// π^e ∘ τ for e ∈ {0,1}; the adjoint-type twist is e = (1−s)/2.
    pub fn pi_pow_tau(&self, e: u32) -> Self {
        if e % 2 == 0 {
            self.reversion()
        } else {
            self.reversion().parity()
        }
    }

    fn degree_sign_map(&self, sign: impl Fn(u64) -> f64) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            *c *= sign((mask as u64).count_ones() as u64);
        }
        out
    }

    fn check_sig(&self, other: &Self) -> Result<(), KaError> {
        if self.sig != other.sig {
            return Err(KaError::SignatureMismatch {
                left: self.sig,
                right: other.sig,
            });
        }
        Ok(())
    }

    /// Exterior product a ∧ b.
    pub fn wedge(&self, other: &Self) -> Result<Self, KaError> {
        self.check_sig(other)?;
        let mut out = Self::zero(self.sig);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO_C {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == ZERO_C || (i & j) != 0 {
                    continue;
                }
                out.coeffs[i | j] += a * b * reorder_sign(i, j);
            }
        }
        Ok(out.prune())
    }

    /// Geometric product a ◇ b by blade-pair multiplication.
    pub fn geo(&self, other: &Self) -> Result<Self, KaError> {
        self.check_sig(other)?;
        let mut out = Self::zero(self.sig);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO_C {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == ZERO_C {
                    continue;
                }
                let sign = reorder_sign(i, j) * self.sig.metric_of_mask(i & j);
                out.coeffs[i ^ j] += a * b * sign;
            }
        }
        Ok(out.prune())
    }

    /// Interior product ι_{v♯} a with the h-dual of the one-form `v`.
    pub fn interior(v: &Self, a: &Self) -> Result<Self, KaError> {
        v.check_sig(a)?;
        if !v.is_homogeneous(1, 0.0) {
            return Err(KaError::DegreePrecondition(
                "interior product requires a homogeneous degree-1 first argument",
            ));
        }
        let mut out = Self::zero(a.sig);
        for i in 1..=a.sig.dim() {
            let vc = v.coeffs[1usize << (i - 1)];
            if vc == ZERO_C {
                continue;
            }
            let h = a.sig.metric(i);
            let bit = 1usize << (i - 1);
            for (mask, &c) in a.coeffs.iter().enumerate() {
                if c == ZERO_C || (mask & bit) == 0 {
                    continue;
                }
                let below = ((mask & (bit - 1)) as u64).count_ones();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                out.coeffs[mask & !bit] += vc * c * h * sign;
            }
        }
        Ok(out.prune())
    }

    /// Generalized product a △_k b via the metric contraction sum.
    pub fn generalized(&self, other: &Self, k: u32) -> Result<Self, KaError> {
        self.check_sig(other)?;
        let d = self.sig.dim();
        if k > d {
            return Ok(Self::zero(self.sig));
        }
        let mut out = Self::zero(self.sig);
        // Σ over index subsets S with |S| = k of (Π h^{ii}) (ι_S a) ∧ (ι_S b);
        // per-blade: contracting S out of blades I ⊇ S and J ⊇ S.
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO_C {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == ZERO_C {
                    continue;
                }
                let common = i & j;
                if (common as u64).count_ones() < k {
                    continue;
                }
                // iterate k-subsets of `common`
                for s in SubsetIter::new(common, k) {
                    let metric = metric_product(self.sig, s);
                    let si = contraction_sign(i, s);
                    let sj = contraction_sign(j, s);
                    let ii = i & !s;
                    let jj = j & !s;
                    if (ii & jj) != 0 {
                        continue;
                    }
                    out.coeffs[ii | jj] += a * b * metric * si * sj * reorder_sign(ii, jj);
                }
            }
        }
        Ok(out.prune())
    }

    /// Scalar product ⟨a,b⟩ (complex-bilinear, no conjugation): the scalar
    /// part of a △_{deg} b on homogeneous inputs; implemented blade-wise.
    pub fn inner(&self, other: &Self) -> Result<C64, KaError> {
        self.check_sig(other)?;
        let mut acc = ZERO_C;
        for (mask, &a) in self.coeffs.iter().enumerate() {
            let b = other.coeffs[mask];
            if a == ZERO_C || b == ZERO_C {
                continue;
            }
            acc += a * b * self.sig.metric_of_mask(mask);
        }
        Ok(acc)
    }

    /// Hodge star ∗a = τ(a) ◇ ν.
    pub fn hodge(&self) -> Self {
        let nu = Self::volume(self.sig);
        self.reversion().geo(&nu).expect("same signature")
    }

    /// Independent Hodge star by blade complement: ∗e_I is the metric factor
    /// of e_I times the sign ordering e_I ∧ e_{I^c} = ±ν, so α ∧ ∗β = ⟨α,β⟩ν.
    /// Reference path for the volume-form lemma; `hodge` is the product form.
    pub fn hodge_combinatorial(&self) -> Self {
        let full = self.sig.blade_count() - 1;
        let mut out = Self::zero(self.sig);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO_C {
                continue;
            }
            let comp = full & !mask;
            let sign = reorder_sign(mask, comp) * self.sig.metric_of_mask(mask);
            out.coeffs[comp] = c * sign;
        }
        out
    }

    /// Kähler-Atiyah trace 𝒯(a) = 2^{⌊d/2⌋} a^{(0)}.
    pub fn ka_trace(&self) -> C64 {
        self.scalar_part() * (self.sig.module_dim() as f64)
    }

    /// ◇-exponential by scaling and squaring with a truncated series.
    pub fn exp_geo(&self) -> Result<Self, KaError> {
        let norm = self.norm();
        let scalings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let x = self.scale(C64::new(1.0 / f64::powi(2.0, scalings as i32), 0.0));
        let mut term = Multivector::one(self.sig);
        let mut acc = term.clone();
        for n in 1..=24 {
            term = term.geo(&x)?.scale(C64::new(1.0 / n as f64, 0.0));
            acc = acc.add(&term)?;
            if term.norm() < 1e-18 * acc.norm().max(1.0) {
                break;
            }
        }
        for _ in 0..scalings {
            acc = acc.geo(&acc)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self, KaError> {
        self.check_sig(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Multivector { sig: self.sig, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KaError> {
        self.check_sig(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Multivector { sig: self.sig, coeffs })
    }

    /// ‖a − b‖ in the coefficient two-norm.
    pub fn dist(&self, other: &Self) -> f64 {
        self.sub(other).map(|m| m.norm()).unwrap_or(f64::INFINITY)
    }
}

fn metric_product(sig: Signature, mask: usize) -> f64 {
    sig.metric_of_mask(mask)
}

/// Sign of ι_{e_{s_1}} … ι_{e_{s_k}} e_I relative to e_{I∖S}, contracting the
/// subset in descending index order (any fixed order works used consistently
/// on both factors).
fn contraction_sign(i_mask: usize, s_mask: usize) -> f64 {
    let mut sign = 1.0;
    let mut remaining = i_mask;
    let mut s = s_mask;
    // contract highest index first
    while s != 0 {
        let bit = 63 - (s as u64).leading_zeros();
        let below = ((remaining & ((1usize << bit) - 1)) as u64).count_ones();
        if below % 2 == 1 {
            sign = -sign;
        }
        remaining &= !(1usize << bit);
        s &= !(1usize << bit);
    }
    sign
}

/// Iterator over subsets of `mask` with exactly `k` bits.
struct SubsetIter {
    bits: Vec<usize>,
    idx: Vec<usize>,
    k: usize,
    done: bool,
}

impl SubsetIter {
    fn new(mask: usize, k: u32) -> Self {
        let mut bits = Vec::new();
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            bits.push(1usize << b);
            m &= m - 1;
        }
        let k = k as usize;
        let done = bits.len() < k;
        SubsetIter {
            bits,
            idx: (0..k).collect(),
            k,
            done,
        }
    }
}

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.bits[i]).fold(0, |a, b| a | b);
        // advance combination
        let n = self.bits.len();
        let k = self.k;
        if k == 0 {
            self.done = true;
            return Some(out);
        }
        let mut i = k as isize - 1;
        while i >= 0 && self.idx[i as usize] == n - k + i as usize {
            i -= 1;
        }
        if i < 0 {
            self.done = true;
        } else {
            let i = i as usize;
            self.idx[i] += 1;
            for j in i + 1..k {
                self.idx[j] = self.idx[j - 1] + 1;
            }
        }
        Some(out)
    }
}

/// Reference geometric product through the generalized-product expansion
/// α◇β = Σ_k (−1)^{C(k+1,2)+jk} α^{(j)} △_k β. Independent code path kept as
/// the cross-validation oracle for `Multivector::geo`.
pub fn geo_via_generalized(a: &Multivector, b: &Multivector) -> Result<Multivector, KaError> {
    let d = a.sig.dim();
    let mut out = Multivector::zero(a.sig);
    for j in 0..=d {
        let aj = a.grade(j);
        if aj.is_zero(0.0) {
            continue;
        }
        for k in 0..=d {
            let exponent = (k * (k + 1) / 2 + j * k) % 2;
            let sign = if exponent == 0 { 1.0 } else { -1.0 };
            let term = aj.generalized(b, k)?;
            out = out.add(&term.scale(C64::new(sign, 0.0)))?;
        }
    }
    Ok(out.prune())
}

/// Projection 𝒫_ℓ(a) = ½(1 + ℓ ν_ℂ) ◇ a (odd d).
pub fn project_ell(a: &Multivector, ell: i8) -> Result<Multivector, KaError> {
    let nu_c = Multivector::complex_volume(a.sig);
    let twisted = nu_c.geo(a)?.scale(C64::new(ell as f64, 0.0));
    Ok(a.add(&twisted)?.scale(C64::new(0.5, 0.0)))
}

/// 2 𝒫_<(𝒫_ℓ(a)): push an arbitrary form into the truncated algebra (odd d).
pub fn push_truncated(a: &Multivector, ell: i8) -> Result<Multivector, KaError> {
    let d = a.sig.dim();
    if d % 2 == 0 {
        return Err(KaError::ParityPrecondition("truncation requires odd d"));
    }
    let m = (d - 1) / 2;
    Ok(project_ell(a, ell)?.scale(C64::new(2.0, 0.0)).truncate(m))
}

/// Truncated product a ∨ b = 2𝒫_<(𝒫_ℓ(a ◇ b)) on forms of degree ≤ (d−1)/2.
pub fn vee(a: &Multivector, b: &Multivector, ell: i8) -> Result<Multivector, KaError> {
    let d = a.sig.dim();
    if d % 2 == 0 {
        return Err(KaError::ParityPrecondition("∨ product requires odd d"));
    }
    let m = (d - 1) / 2;
    if !(0..=d)
        .filter(|&k| k > m)
        .all(|k| a.grade(k).is_zero(0.0) && b.grade(k).is_zero(0.0))
    {
        return Err(KaError::DegreePrecondition(
            "∨ operands must have degree ≤ (d−1)/2",
        ));
    }
    push_truncated(&a.geo(b)?, ell)
}
