use std::time::Instant;

use mwrc_core::dof_catalog::{classify, classify_2x2};
use mwrc_core::model::{sample_channels, NetworkConfig};
use mwrc_core::scheme::{build_scheme, random_symbols, simulate_noiseless};

#[test]
fn one_seed_per_2x2_config() {
    let t = Instant::now();
    let mut fails = Vec::new();
    let mut count = 0;
    for a1 in 1..=6 {
        for b1 in 1..=6 {
            for a2 in 1..=6 {
                for b2 in 1..=6 {
                    for n in 1..=(a1 + b1 + a2 + b2 + 1) {
                        let c = NetworkConfig::new(vec![vec![a1, b1], vec![a2, b2]], n).unwrap();
                        let rep = classify_2x2(&c).unwrap();
                        let s = rep.strategy.unwrap();
                        count += 1;
                        let ch = sample_channels(&c, count as u64).unwrap();
                        match build_scheme(&c, &s, &ch) {
                            Ok(sch) => {
                                assert_eq!(sch.stream_dof(), rep.achievable.unwrap());
                                let out = simulate_noiseless(&sch, &random_symbols(&sch, 1)).unwrap();
                                if !out.passed() || sch.alignment_residual > 1e-8 || sch.filter_residual > 1e-8 {
                                    fails.push(format!("{c} {} res {} {} {}", rep.regime, out.residual, sch.alignment_residual, sch.filter_residual));
                                }
                            }
                            Err(e) => fails.push(format!("{c} {}: {e}", rep.regime)),
                        }
                    }
                }
            }
        }
    }
    eprintln!("{count} configs in {:?}, {} failures", t.elapsed(), fails.len());
    for f in fails.iter().take(30) {
        eprintln!("{f}");
    }
    assert!(fails.is_empty());
}

#[test]
fn one_seed_per_symmetric_and_2x3_config() {
    let t = Instant::now();
    let mut fails = Vec::new();
    let mut count = 0;
    let mut configs = Vec::new();
    for l in 1..=3 {
        for k in 2..=4 {
            for m in 1..=4 {
                for n in 1..=(k * l * m + 1) {
                    configs.push(NetworkConfig::symmetric(l, k, m, n).unwrap());
                }
            }
        }
    }
    for a in 1..=4 { for b in 1..=a { for c3 in 1..=b { for d in 1..=4 { for e in 1..=d { for f in 1..=e {
        for n in 1..=(a + b + c3 + d + e + f + 1) {
            configs.push(NetworkConfig::new(vec![vec![a, b, c3], vec![d, e, f]], n).unwrap());
        }
    }}}}}}
    for c in configs {
        let rep = classify(&c).unwrap();
        let Some(s) = rep.strategy else { continue };
        count += 1;
        let ch = sample_channels(&c, count as u64).unwrap();
        match build_scheme(&c, &s, &ch) {
            Ok(sch) => {
                let out = simulate_noiseless(&sch, &random_symbols(&sch, 1)).unwrap();
                if !out.passed() || sch.alignment_residual > 1e-8 || sch.filter_residual > 1e-8 {
                    fails.push(format!("{c} {} res {} {} {}", rep.regime, out.residual, sch.alignment_residual, sch.filter_residual));
                }
            }
            Err(e) => fails.push(format!("{c} {}: {e}", rep.regime)),
        }
    }
    eprintln!("{count} configs in {:?}, {} failures", t.elapsed(), fails.len());
    for f in fails.iter().take(30) {
        eprintln!("{f}");
    }
    assert!(fails.is_empty());
}

