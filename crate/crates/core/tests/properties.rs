//! Property tests over arbitrary inputs: serialization round-trips and the
//! graded-algebra laws that hold for every coefficient vector.

use ka_spinor::algebra::{C64, Multivector, Signature};
use ka_spinor::json::{MultivectorJson, SpinorJson};
use ka_spinor::rep::Spinor;
use nalgebra::DVector;
use proptest::prelude::*;

fn small_complex() -> impl Strategy<Value = C64> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(re, im)| C64::new(re, im))
}

fn arb_signature() -> impl Strategy<Value = Signature> {
    (1u32..=5).prop_flat_map(|d| (0..=d).prop_map(move |p| Signature::new(p, d - p)))
}

fn arb_multivector() -> impl Strategy<Value = Multivector> {
    arb_signature().prop_flat_map(|sig| {
        proptest::collection::vec(small_complex(), sig.blade_count())
            .prop_map(move |coeffs| Multivector { sig, coeffs })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multivector_json_roundtrip(mv in arb_multivector()) {
        let text = serde_json::to_string(&MultivectorJson::from(&mv)).unwrap();
        let parsed: MultivectorJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_multivector().unwrap();
        prop_assert!(back.dist(&mv) < 1e-12);
    }

    #[test]
    fn spinor_json_roundtrip(comps in proptest::collection::vec(small_complex(), 1..16),
                             chir in proptest::option::of(prop_oneof![Just(1i8), Just(-1i8)])) {
        let spinor = Spinor { comps: DVector::from_vec(comps), chirality: chir };
        let text = serde_json::to_string(&SpinorJson::from(&spinor)).unwrap();
        let parsed: SpinorJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_spinor();
        prop_assert!((back.comps - spinor.comps).norm() < 1e-12);
        prop_assert_eq!(back.chirality, chir);
    }

    #[test]
    fn geometric_product_distributes(a in arb_multivector()) {
        // (1 + a) ◇ (1 − a) = 1 − a◇a
        let sig = a.sig;
        let one = Multivector::one(sig);
        let lhs = one.add(&a).unwrap().geo(&one.sub(&a).unwrap()).unwrap();
        let rhs = one.sub(&a.geo(&a).unwrap()).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + a.norm() * a.norm()));
    }

    #[test]
    fn involutions_square_to_identity(a in arb_multivector()) {
        prop_assert!(a.parity().parity().dist(&a) < 1e-12);
        prop_assert!(a.reversion().reversion().dist(&a) < 1e-12);
        // τ is an anti-automorphism: τ(a◇a) = τ(a)◇τ(a)
        let lhs = a.geo(&a).unwrap().reversion();
        let rhs = a.reversion().geo(&a.reversion()).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + a.norm() * a.norm()));
    }

    #[test]
    fn hodge_paths_agree(a in arb_multivector()) {
        prop_assert!(a.hodge().dist(&a.hodge_combinatorial()) < 1e-10 * (1.0 + a.norm()));
    }
}
