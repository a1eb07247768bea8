//! Randomized structural invariants: digit codecs, valuation geometry,
//! kernel normalization, and generator structure under arbitrary admissible
//! parameters.

use proptest::prelude::*;
use ultrawalks::generator::{build_generator, validate_generator_against};
use ultrawalks::kernel::KernelProfile;
use ultrawalks::padic::GroupSpec;

fn small_group() -> impl Strategy<Value = GroupSpec> {
    (prop_oneof![Just(2u32), Just(3), Just(5)], 1u32..=4)
        .prop_map(|(p, l)| GroupSpec::new(p, l).unwrap())
}

/// Positive, bounded away from the singular points 0 and 1.
fn admissible_alpha() -> impl Strategy<Value = f64> {
    (0.05f64..5.0).prop_filter("alpha away from 1", |a| (a - 1.0).abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digits_round_trip(spec in small_group(), raw in 0u64..10_000) {
        let s = spec.state(raw % spec.size() as u64).unwrap();
        let digits = spec.digits(s);
        prop_assert_eq!(digits.len() as u32, spec.level());
        prop_assert_eq!(spec.from_digits(&digits).unwrap(), s);
    }

    #[test]
    fn valuation_is_translation_invariant(spec in small_group(), seed in any::<u64>()) {
        let n = spec.size() as u64;
        let a = spec.state(seed % n).unwrap();
        let b = spec.state((seed / n) % n).unwrap();
        let shift = (seed / n / n) % n;
        let a2 = spec.state((a.value() + shift) % n).unwrap();
        let b2 = spec.state((b.value() + shift) % n).unwrap();
        prop_assert_eq!(
            spec.valuation_of_difference(a, b),
            spec.valuation_of_difference(a2, b2)
        );
    }

    #[test]
    fn kernels_are_normalized(spec in small_group(), alpha in admissible_alpha()) {
        let profile = KernelProfile::bessel(&spec, alpha).unwrap();
        prop_assert!((profile.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(profile.tail_mass() >= 0.0);
        prop_assert!(profile.level_values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn generators_are_structurally_sound(spec in small_group(), alpha in admissible_alpha()) {
        let profile = KernelProfile::bessel(&spec, alpha).unwrap();
        let g = build_generator(&profile);
        let report = validate_generator_against(&g, &profile);
        prop_assert!(report.pass(), "p={} l={} alpha={}: {:?}",
            spec.prime(), spec.level(), alpha, report);
    }

    #[test]
    fn symbol_routes_agree(spec in small_group(), alpha in admissible_alpha()) {
        let profile = KernelProfile::bessel(&spec, alpha).unwrap();
        for j in 0..=spec.level() {
            let direct = ultrawalks::kernel::symbol_from_profile(&profile, j).unwrap();
            let closed = ultrawalks::kernel::bessel_symbol(spec.prime(), alpha, j);
            prop_assert!((direct - closed).abs() < 1e-10);
        }
    }
}
