use mwrc_core::bounds::dof_upper_bound;
use mwrc_core::dof_catalog::{classify, classify_2x2, classify_symmetric, Regime};
use mwrc_core::model::{NetworkConfig, Optimality};
use num_rational::Rational64;

fn two_by_two(max: usize) -> impl Iterator<Item = NetworkConfig> {
    let mut out = Vec::new();
    for a1 in 1..=max {
        for b1 in 1..=max {
            for a2 in 1..=max {
                for b2 in 1..=max {
                    for n in 1..=(a1 + b1 + a2 + b2 + 1) {
                        out.push(NetworkConfig::new(vec![vec![a1, b1], vec![a2, b2]], n).unwrap());
                    }
                }
            }
        }
    }
    out.into_iter()
}

#[test]
fn every_determinate_2x2_plan_matches_its_value() {
    for c in two_by_two(6) {
        let rep = classify_2x2(&c).unwrap();
        let v = rep.achievable.expect("2x2 tree is total");
        let s = rep.strategy.as_ref().unwrap_or_else(|| panic!("no plan for {c} ({})", rep.regime));
        s.validate(&c).unwrap_or_else(|e| panic!("{c} {}: {e}", rep.regime));
        assert_eq!(s.stream_dof(), v, "{c} {} plan {s}", rep.regime);
        assert!(v <= Rational64::from(dof_upper_bound(&c).bound as i64));
    }
}

#[test]
fn listed_optimal_leaves_meet_the_bound() {
    for c in two_by_two(6) {
        let rep = classify_2x2(&c).unwrap();
        if rep.regime.is_listed_optimal_2x2() {
            assert_eq!(rep.optimality, Optimality::Optimal, "{c} {}", rep.regime);
        }
    }
}

#[test]
fn every_determinate_2x3_plan_matches_its_value() {
    let mut hits = std::collections::BTreeMap::<Regime, usize>::new();
    let r = 1..=5usize;
    for a in r.clone() {
        for b in 1..=a {
            for c3 in 1..=b {
                for d in r.clone() {
                    for e in 1..=d {
                        for f in 1..=e {
                            let tot = a + b + c3 + d + e + f;
                            for n in 1..=tot + 1 {
                                let c = NetworkConfig::new(vec![vec![a, b, c3], vec![d, e, f]], n).unwrap();
                                let rep = classify(&c).unwrap();
                                *hits.entry(rep.regime).or_default() += 1;
                                if let Some(v) = rep.achievable {
                                    let s = rep.strategy.as_ref().unwrap_or_else(|| panic!("no plan {c} {}", rep.regime));
                                    s.validate(&c).unwrap_or_else(|e| panic!("{c} {}: {e}", rep.regime));
                                    assert_eq!(s.stream_dof(), v, "{c} {} plan {s}", rep.regime);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    eprintln!("{hits:?}");
}

#[test]
fn every_symmetric_plan_matches_its_value() {
    for l in 1..=3 {
        for k in 2..=4 {
            for m in 1..=4 {
                for n in 1..=(k * l * m + 1) {
                    let rep = classify_symmetric(l, k, m, n).unwrap();
                    let c = NetworkConfig::symmetric(l, k, m, n).unwrap();
                    if let Some(v) = rep.achievable {
                        let s = rep.strategy.as_ref().unwrap_or_else(|| panic!("no plan {c}"));
                        s.validate(&c).unwrap_or_else(|e| panic!("{c}: {e}"));
                        assert_eq!(s.stream_dof(), v, "{c} {s}");
                    }
                }
            }
        }
    }
}
