//! Signature algebra: text round trips, area identities, and Riemann-Hurwitz
//! for the two signature families.

use num::{BigInt, BigRational};
use pgonal::nec::{paper_signature, Family, NecSignature, Sign};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Area as `(numerator, 2 * lcm of all periods)`, computed without the library.
fn area_oracle(s: &NecSignature) -> (i128, i128) {
    let all: Vec<i128> = s
        .proper_periods
        .iter()
        .chain(s.period_cycles.iter().flatten())
        .map(|&m| i128::from(m))
        .collect();
    let den = 2 * all.iter().fold(1i128, |acc, &m| num::integer::lcm(acc, m));
    let eps = match s.sign {
        Sign::Plus => 2,
        Sign::Minus => 1,
    };
    let mut num = (eps * i128::from(s.genus) - 2 + s.period_cycles.len() as i128) * den;
    for &m in &s.proper_periods {
        num += den - den / i128::from(m);
    }
    for &m in s.period_cycles.iter().flatten() {
        num += (den - den / i128::from(m)) / 2;
    }
    (num, den)
}

#[test]
fn area_examples() {
    let s: NecSignature = "(1;-;[3,3,2])".parse().unwrap();
    assert_eq!(s.normalized_area().unwrap(), q(5, 6));
    assert_eq!(s.genus_of_surface_kernel(12).unwrap(), Some(6));
    let t: NecSignature = "(0;+;[2];{(3,2)})".parse().unwrap();
    assert_eq!(t.normalized_area().unwrap(), q(1, 12));
    let e: NecSignature = "(0;+;[2,3])".parse().unwrap();
    assert!(e.is_degenerate().unwrap());
    assert!(e.genus_of_surface_kernel(6).is_err());
}

#[test]
fn family_signatures_reproduce_their_genus() {
    for p in [3u32, 5, 7] {
        for n in (4..=32).step_by(4) {
            for family in Family::ALL {
                for l in 1..=8u64 {
                    // Invert l = 2(g+p-1)/(n(p-1)) or l = 2g/(n(p-1)).
                    let twice = l * u64::from(n) * u64::from(p - 1);
                    if twice % 2 == 1 {
                        continue;
                    }
                    let g = match family {
                        Family::I => (twice / 2).checked_sub(u64::from(p - 1)),
                        Family::II => Some(twice / 2),
                    };
                    let Some(g) = g else { continue };
                    let fs = paper_signature(p, n, g, family)
                        .unwrap()
                        .expect("integral l gives a signature");
                    assert_eq!(u64::from(fs.l), l);
                    let order = u64::from(n * p);
                    assert_eq!(fs.signature.genus_of_surface_kernel(order).unwrap(), Some(g));
                    let (num, den) = area_oracle(&fs.signature);
                    assert_eq!(2 * den * (g as i128 - 1), order as i128 * num);
                }
            }
        }
    }
}

fn any_signature() -> impl Strategy<Value = NecSignature> {
    (
        0u32..5,
        any::<bool>(),
        prop::collection::vec(2u32..40, 0..6),
        prop::collection::vec(prop::collection::vec(2u32..20, 0..4), 0..3),
    )
        .prop_map(|(h, minus, periods, cycles)| {
            if minus {
                NecSignature::new(h.max(1), Sign::Minus, periods, cycles)
            } else {
                NecSignature::new(h, Sign::Plus, periods, cycles)
            }
        })
}

proptest! {
    #[test]
    fn signature_text_round_trips(s in any_signature()) {
        let text = s.to_string();
        let back: NecSignature = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(&back.proper_periods, &s.proper_periods);
        prop_assert_eq!(&back.period_cycles, &s.period_cycles);
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<NecSignature>(&json).unwrap(), s);
    }

    #[test]
    fn area_matches_oracle(s in any_signature()) {
        let (num, den) = area_oracle(&s);
        prop_assert_eq!(s.normalized_area().unwrap(), BigRational::new(num.into(), den.into()));
    }

    #[test]
    fn area_doubles_on_canonical_fuchsian(h in 1u32..5, periods in prop::collection::vec(2u32..40, 0..6)) {
        let s = NecSignature::non_orientable(h, periods);
        let f = s.canonical_fuchsian().unwrap();
        prop_assert_eq!(f.sign, Sign::Plus);
        prop_assert_eq!(f.normalized_area().unwrap(), s.normalized_area().unwrap() * BigInt::from(2));
    }

    #[test]
    fn adding_a_period_increases_area(s in any_signature(), m in 2u32..100) {
        let mut t = s.clone();
        t.proper_periods.push(m);
        prop_assert!(t.normalized_area().unwrap() > s.normalized_area().unwrap());
    }

    #[test]
    fn periods_compare_as_multisets(mut periods in prop::collection::vec(2u32..40, 1..6)) {
        let a = NecSignature::non_orientable(1, periods.clone());
        periods.reverse();
        prop_assert_eq!(a, NecSignature::non_orientable(1, periods));
    }
}

#[test]
fn text_format_details() {
    let s: NecSignature = "(0;+;[2,3];{(2,2),()})".parse().unwrap();
    assert_eq!(s.to_string(), "(0;+;[2,3];{(2,2),()})");
    assert_eq!(s.period_cycles, vec![vec![2, 2], vec![]]);
    let t: NecSignature = "( 1 ; - ; [ 3 , 4 ] ; { } )".parse().unwrap();
    assert_eq!(t.to_string(), "(1;-;[3,4])");
    for bad in ["", "(1;-;[3,4]", "(1;*;[3])", "(1;-;[3,4]) x", "(1;-;[3,,4])", "(99999999999;+;[])"] {
        assert!(bad.parse::<NecSignature>().is_err(), "{bad}");
    }
    let invalid = NecSignature::non_orientable(0, vec![1]);
    assert_eq!(invalid.validate().len(), 2);
}
