use mwrc_core::alignment::{numerical_shared_dim, shared_dim};
use mwrc_core::bounds::{cluster_refined_bound, dof_upper_bound, genie_schedule};
use mwrc_core::dof_catalog::{classify, classify_2x2, classify_symmetric};
use mwrc_core::linalg::complex_gaussian;
use mwrc_core::model::{canonicalize, message_universe, sample_channels, CanonMode, NetworkConfig};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> impl Strategy<Value = NetworkConfig> {
    (1usize..=3, 2usize..=4, 1usize..=16)
        .prop_flat_map(|(l, k, n)| {
            (prop::collection::vec(prop::collection::vec(1usize..=8, k), l), Just(n))
        })
        .prop_map(|(c, n)| NetworkConfig::new(c, n).unwrap())
}

proptest! {
    #[test]
    fn more_relay_antennas_never_lower_the_bound(c in config()) {
        let mut bigger = c.clone();
        bigger.relay_antennas += 1;
        prop_assert!(dof_upper_bound(&bigger).bound >= dof_upper_bound(&c).bound);
        prop_assert!(cluster_refined_bound(&bigger) >= cluster_refined_bound(&c));
    }

    #[test]
    fn more_user_antennas_never_lower_the_bound(c in config(), l in 0usize..3, k in 0usize..4) {
        let (l, k) = (l % c.num_clusters(), k % c.users(0));
        let mut bigger = c.clone();
        bigger.clusters[l][k] += 1;
        prop_assert!(dof_upper_bound(&bigger).bound >= dof_upper_bound(&c).bound);
        prop_assert!(cluster_refined_bound(&bigger) >= cluster_refined_bound(&c));
    }

    #[test]
    fn bound_scales_linearly(c in config(), s in 1usize..=4) {
        let mut scaled = c.clone();
        scaled.relay_antennas *= s;
        for cl in &mut scaled.clusters {
            for m in cl.iter_mut() {
                *m *= s;
            }
        }
        prop_assert_eq!(dof_upper_bound(&scaled).bound, s as u64 * dof_upper_bound(&c).bound);
        prop_assert_eq!(cluster_refined_bound(&scaled), s as u64 * cluster_refined_bound(&c));
    }

    #[test]
    fn refined_bound_is_never_looser(c in config()) {
        prop_assert!(cluster_refined_bound(&c) <= dof_upper_bound(&c).bound);
    }

    #[test]
    fn achievable_never_exceeds_bound(c in config()) {
        let rep = classify(&c).unwrap();
        let bound = Rational64::from_integer(dof_upper_bound(&c).bound as i64);
        prop_assert!(rep.upper_bound <= bound);
        if let Some(a) = rep.achievable {
            prop_assert!(a <= rep.upper_bound);
        }
    }

    #[test]
    fn classification_ignores_labelling(c in config(), rot in 0usize..3) {
        let mut relabelled = c.clone();
        let l = relabelled.num_clusters();
        relabelled.clusters.rotate_left(rot % l);
        for cl in &mut relabelled.clusters {
            cl.reverse();
        }
        let (a, b) = (classify(&c).unwrap(), classify(&relabelled).unwrap());
        prop_assert_eq!(a.upper_bound, b.upper_bound);
        prop_assert_eq!(a.achievable, b.achievable);
        prop_assert_eq!(a.optimality, b.optimality);
    }

    #[test]
    fn canonicalize_is_idempotent_and_restorable(c in config()) {
        for mode in [CanonMode::Users, CanonMode::Catalog] {
            let once = canonicalize(&c, mode).unwrap();
            prop_assert!(once.config.is_canonical());
            let twice = canonicalize(&once.config, mode).unwrap();
            prop_assert_eq!(&twice.config, &once.config);
            prop_assert!(twice.permutation.is_identity());
            prop_assert_eq!(once.permutation.restore(&once.config), c.clone());
        }
    }

    #[test]
    fn shared_dim_is_symmetric_and_capped(p in 1usize..=12, q1 in 1usize..=12, q2 in 1usize..=12) {
        let d = shared_dim(p, q1, q2);
        prop_assert_eq!(d, shared_dim(p, q2, q1));
        prop_assert!(d <= p.min(q1).min(q2));
        prop_assert!(shared_dim(p, q1 + 1, q2) >= d);
    }

    #[test]
    fn numerical_dim_matches_law(p in 1usize..=8, q1 in 1usize..=8, q2 in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = complex_gaussian(&mut rng, p, q1);
        let h2 = complex_gaussian(&mut rng, p, q2);
        prop_assert_eq!(numerical_shared_dim(&h1, &h2), shared_dim(p, q1, q2));
        prop_assert_eq!(numerical_shared_dim(&h2, &h1), shared_dim(p, q1, q2));
    }

    #[test]
    fn sampling_is_pure(c in config(), seed in any::<u64>()) {
        let a = sample_channels(&c, seed).unwrap();
        let b = sample_channels(&c, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn genie_sets_partition_the_universe(k in 2usize..=14) {
        let g = genie_schedule(k);
        let mirror = g.mirror();
        prop_assert_eq!(g.decodable.len(), k * (k - 1) / 2);
        prop_assert!(g.decodable.is_disjoint(&mirror));
        let union: std::collections::BTreeSet<_> = g.decodable.union(&mirror).copied().collect();
        prop_assert_eq!(union, g.universe());
        // each step hands out exactly the messages decoded earlier in mirror form
        for step in &g.steps {
            for &(d, s) in &step.genie {
                prop_assert!(g.decodable.contains(&(s, d)));
            }
        }
    }

    #[test]
    fn messages_are_counted_once(c in config()) {
        let u = message_universe(&c);
        let k = c.users(0);
        prop_assert_eq!(u.len(), c.num_clusters() * k * (k - 1));
        prop_assert!(u.iter().all(|m| m.dest != m.src));
    }

    #[test]
    fn symmetric_catalogs_agree(m in 1usize..=12, n in 1usize..=30) {
        let c = NetworkConfig::symmetric(2, 2, m, n).unwrap();
        let (two, sym) = (classify_2x2(&c).unwrap(), classify_symmetric(2, 2, m, n).unwrap());
        if two.is_determinate() && sym.is_determinate() {
            prop_assert_eq!(two.achievable, sym.achievable);
        }
    }
}
