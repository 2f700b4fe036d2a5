//! Closed-form DoF upper bounds and the genie-aided decodable-set schedule
//! behind the `2N` term.

use std::collections::BTreeSet;

use crate::model::NetworkConfig;

/// The three terms of the cluster-agnostic upper bound and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpperBoundBreakdown {
    /// Sum of all user antennas.
    pub term_sum_all: u64,
    /// Twice the antennas of every user except the strongest in its cluster.
    pub term_weak_users: u64,
    /// Twice the relay antennas.
    pub term_relay: u64,
    pub bound: u64,
}

pub fn dof_upper_bound(config: &NetworkConfig) -> UpperBoundBreakdown {
    let term_sum_all = config.total_user_antennas() as u64;
    let term_weak_users = 2 * config.clusters.iter().map(|c| weak_sum(c)).sum::<u64>();
    let term_relay = 2 * config.relay_antennas as u64;
    UpperBoundBreakdown {
        term_sum_all,
        term_weak_users,
        term_relay,
        bound: term_sum_all.min(term_weak_users).min(term_relay),
    }
}

/// Upper bound obtained by applying the per-cluster cut-set caps before
/// summing: `min(2N, sum_l min(sum_k M_k^l, 2 sum_{k>=2} M_k^l))`.
///
/// Never larger than [`dof_upper_bound`]. For two clusters of three users it
/// is exactly the five-term minimum (`2N` and the four mixed sums); for two
/// users per cluster and for symmetric networks the two bounds coincide.
pub fn cluster_refined_bound(config: &NetworkConfig) -> u64 {
    let per_cluster: u64 = config
        .clusters
        .iter()
        .map(|c| (c.iter().sum::<usize>() as u64).min(2 * weak_sum(c)))
        .sum();
    per_cluster.min(2 * config.relay_antennas as u64)
}

/// Sum over users other than the one with the most antennas.
fn weak_sum(cluster: &[usize]) -> u64 {
    let max = cluster.iter().copied().max().unwrap_or(0);
    (cluster.iter().sum::<usize>() - max) as u64
}

/// One cut-set cap on a group of messages of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterCap {
    /// Zero-based index of the user the cap is centred on.
    pub user: usize,
    pub cap: u64,
}

/// Cut-set caps for one cluster of a canonical configuration.
///
/// For the strongest user (index 0) the cap covers the messages it receives
/// from everybody else, `min(M_1, N, sum_{k>=2} M_k)`; for every other user
/// `i` it covers the messages user `i` receives, `min(M_i, N)`.
pub fn cutset_cluster_bounds(config: &NetworkConfig, cluster: usize) -> Vec<ClusterCap> {
    let users = &config.clusters[cluster];
    let n = config.relay_antennas as u64;
    let rest: u64 = users[1..].iter().map(|&m| m as u64).sum();
    let mut caps = vec![ClusterCap {
        user: 0,
        cap: (users[0] as u64).min(n).min(rest),
    }];
    caps.extend(users.iter().enumerate().skip(1).map(|(i, &m)| ClusterCap {
        user: i,
        cap: (m as u64).min(n),
    }));
    caps
}

/// `(dest, src)` pair of zero-based indices inside one cluster.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenieStep {
    /// One-based step index `k`, acting on user `k - 1`.
    pub step: usize,
    /// Messages handed to the receiver before this step.
    pub genie: Vec<Pair>,
    /// Messages that become decodable during this step.
    pub decoded: Vec<Pair>,
}

/// Decodable-set construction for a cluster of `K` users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenieSchedule {
    pub users: usize,
    pub steps: Vec<GenieStep>,
    /// Accumulated decodable set `{(k, i) : k < i}`.
    pub decodable: BTreeSet<Pair>,
}

impl GenieSchedule {
    /// The mirrored set `{(i, k) : k < i}` used by the second half of the
    /// argument, which enhances the weakest user instead of the strongest.
    pub fn mirror(&self) -> BTreeSet<Pair> {
        self.decodable.iter().map(|&(d, s)| (s, d)).collect()
    }

    /// Every ordered `(dest, src)` pair with `dest != src`.
    pub fn universe(&self) -> BTreeSet<Pair> {
        let k = self.users;
        (0..k)
            .flat_map(|d| (0..k).filter(move |&s| s != d).map(move |s| (d, s)))
            .collect()
    }
}

pub fn genie_schedule(users: usize) -> GenieSchedule {
    assert!(users >= 2, "a cluster has at least two users");
    let mut steps = Vec::with_capacity(users - 1);
    let mut decodable = BTreeSet::new();
    for k in 0..users - 1 {
        // step 1 has nothing to hand out: the first user's own messages are
        // already side information
        let genie = if k == 0 {
            Vec::new()
        } else {
            ((k + 1)..users).map(|i| (i, k)).collect()
        };
        let decoded: Vec<Pair> = ((k + 1)..users).map(|i| (k, i)).collect();
        decodable.extend(decoded.iter().copied());
        steps.push(GenieStep {
            step: k + 1,
            genie,
            decoded,
        });
    }
    GenieSchedule {
        users,
        steps,
        decodable,
    }
}
