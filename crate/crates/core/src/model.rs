//! Network configuration, message indexing, channel sampling and the value
//! types shared by the catalogs and the scheme builder.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::shared_dim;
use crate::dof_catalog::Regime;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RANK_TOL};

/// Antenna counts of every user, grouped by cluster, plus the relay.
///
/// Indices are zero-based everywhere in the API; `Display` impls print the
/// one-based labels used in reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub clusters: Vec<Vec<usize>>,
    pub relay_antennas: usize,
}

impl NetworkConfig {
    pub fn new(clusters: Vec<Vec<usize>>, relay_antennas: usize) -> Result<Self> {
        let cfg = NetworkConfig {
            clusters,
            relay_antennas,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// All `L` clusters of `K` users with `M` antennas each.
    pub fn symmetric(clusters: usize, users: usize, antennas: usize, relay: usize) -> Result<Self> {
        Self::new(vec![vec![antennas; users]; clusters], relay)
    }

    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() {
            return Err(Error::config("clusters", "at least one cluster is required"));
        }
        for (l, cluster) in self.clusters.iter().enumerate() {
            if cluster.len() < 2 {
                return Err(Error::config(
                    format!("clusters[{l}]"),
                    format!("a cluster needs at least 2 users, found {}", cluster.len()),
                ));
            }
            if let Some(k) = cluster.iter().position(|&m| m == 0) {
                return Err(Error::config(
                    format!("clusters[{l}][{k}]"),
                    "antenna count must be at least 1",
                ));
            }
        }
        if self.relay_antennas == 0 {
            return Err(Error::config("relay_antennas", "must be at least 1"));
        }
        Ok(())
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn users(&self, cluster: usize) -> usize {
        self.clusters[cluster].len()
    }

    pub fn antennas(&self, cluster: usize, user: usize) -> usize {
        self.clusters[cluster][user]
    }

    /// `(clusters, users per cluster)` when every cluster has the same size.
    pub fn shape(&self) -> Option<(usize, usize)> {
        let k = self.clusters[0].len();
        self.clusters
            .iter()
            .all(|c| c.len() == k)
            .then_some((self.clusters.len(), k))
    }

    /// `(L, K, M)` when every user carries the same antenna count.
    pub fn as_symmetric(&self) -> Option<(usize, usize, usize)> {
        let (l, k) = self.shape()?;
        let m = self.clusters[0][0];
        self.clusters
            .iter()
            .flatten()
            .all(|&x| x == m)
            .then_some((l, k, m))
    }

    pub fn total_user_antennas(&self) -> usize {
        self.clusters.iter().flatten().sum()
    }

    pub fn is_canonical(&self) -> bool {
        self.clusters
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] >= w[1]))
    }

    fn users_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(l, c)| (0..c.len()).map(move |k| (l, k)))
    }
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .clusters
            .iter()
            .map(|c| {
                let v: Vec<String> = c.iter().map(|m| m.to_string()).collect();
                format!("[{}]", v.join(","))
            })
            .collect();
        write!(f, "clusters [{}], N={}", rows.join(","), self.relay_antennas)
    }
}

/// How aggressively [`canonicalize`] reorders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonMode {
    /// Sort users within each cluster only.
    Users,
    /// Additionally order clusters by non-increasing second-user antennas,
    /// breaking ties by the larger first-user count, then by original index.
    Catalog,
}

/// Canonical-to-original index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// `clusters[c]` is the original index of canonical cluster `c`.
    pub clusters: Vec<usize>,
    /// `users[c][k]` is the original index (within its cluster) of canonical
    /// user `k` of canonical cluster `c`.
    pub users: Vec<Vec<usize>>,
}

impl Permutation {
    pub fn identity(config: &NetworkConfig) -> Self {
        Permutation {
            clusters: (0..config.num_clusters()).collect(),
            users: config.clusters.iter().map(|c| (0..c.len()).collect()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.clusters.iter().enumerate().all(|(i, &c)| i == c)
            && self
                .users
                .iter()
                .all(|u| u.iter().enumerate().all(|(i, &k)| i == k))
    }

    /// Original `(cluster, user)` label of a canonical position.
    pub fn to_original(&self, cluster: usize, user: usize) -> (usize, usize) {
        (self.clusters[cluster], self.users[cluster][user])
    }

    /// Rebuilds the original configuration from its canonical form.
    pub fn restore(&self, canonical: &NetworkConfig) -> NetworkConfig {
        let mut clusters = vec![Vec::new(); canonical.num_clusters()];
        for (c, cluster) in canonical.clusters.iter().enumerate() {
            let mut users = vec![0; cluster.len()];
            for (k, &m) in cluster.iter().enumerate() {
                users[self.users[c][k]] = m;
            }
            clusters[self.clusters[c]] = users;
        }
        NetworkConfig {
            clusters,
            relay_antennas: canonical.relay_antennas,
        }
    }

    /// Relabels a strategy computed on the canonical configuration.
    pub fn restore_strategy(&self, s: &StrategyDescriptor) -> StrategyDescriptor {
        let mut out = s.clone();
        out.aligned = s
            .aligned
            .iter()
            .map(|(p, &n)| {
                let (l, a) = self.to_original(p.cluster, p.first);
                let (_, b) = self.to_original(p.cluster, p.second);
                (PairKey::new(l, a, b), n)
            })
            .collect();
        out.mac = s
            .mac
            .iter()
            .map(|(m, &n)| {
                let (l, src) = self.to_original(m.cluster, m.src);
                let (_, dest) = self.to_original(m.cluster, m.dest);
                (MacKey { cluster: l, src, dest }, n)
            })
            .collect();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub config: NetworkConfig,
    pub permutation: Permutation,
    /// Set when two clusters tied on their second-user antenna count and the
    /// order was decided by the first-user count or the original index.
    pub cluster_tie_break: bool,
}

pub fn canonicalize(config: &NetworkConfig, mode: CanonMode) -> Result<Canonical> {
    config.validate()?;
    let mut user_orders = Vec::with_capacity(config.num_clusters());
    let mut sorted_clusters = Vec::with_capacity(config.num_clusters());
    for cluster in &config.clusters {
        let mut order: Vec<usize> = (0..cluster.len()).collect();
        // stable: equal counts keep their original relative order
        order.sort_by(|&a, &b| cluster[b].cmp(&cluster[a]));
        sorted_clusters.push(order.iter().map(|&k| cluster[k]).collect::<Vec<_>>());
        user_orders.push(order);
    }

    let mut cluster_order: Vec<usize> = (0..config.num_clusters()).collect();
    let mut tie = false;
    if mode == CanonMode::Catalog {
        cluster_order.sort_by(|&a, &b| {
            let (ca, cb) = (&sorted_clusters[a], &sorted_clusters[b]);
            cb[1].cmp(&ca[1]).then(cb[0].cmp(&ca[0]))
        });
        for w in cluster_order.windows(2) {
            let (ca, cb) = (&sorted_clusters[w[0]], &sorted_clusters[w[1]]);
            if ca[1] == cb[1] && ca[0] != cb[0] {
                tie = true;
            }
        }
    }

    let clusters = cluster_order.iter().map(|&c| sorted_clusters[c].clone()).collect();
    let users = cluster_order.iter().map(|&c| user_orders[c].clone()).collect();
    Ok(Canonical {
        config: NetworkConfig {
            clusters,
            relay_antennas: config.relay_antennas,
        },
        permutation: Permutation {
            clusters: cluster_order,
            users,
        },
        cluster_tie_break: tie,
    })
}

/// Message `W_{dest,src}` exchanged inside a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId {
    pub cluster: usize,
    pub dest: usize,
    pub src: usize,
}

impl MessageId {
    pub fn new(cluster: usize, dest: usize, src: usize) -> Self {
        assert_ne!(dest, src, "a user does not send messages to itself");
        MessageId { cluster, dest, src }
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[{}]({}<-{})", self.cluster + 1, self.dest + 1, self.src + 1)
    }
}

/// Every ordered `(dest, src)` message, sorted by `(cluster, dest, src)`.
pub fn message_universe(config: &NetworkConfig) -> Vec<MessageId> {
    let mut out = Vec::new();
    for (l, cluster) in config.clusters.iter().enumerate() {
        for dest in 0..cluster.len() {
            for src in 0..cluster.len() {
                if dest != src {
                    out.push(MessageId::new(l, dest, src));
                }
            }
        }
    }
    out
}

/// One channel realization: `uplink[l][k]` is `N x M_k^l`, `downlink[l][k]`
/// is `M_k^l x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub uplink: Vec<Vec<CMat>>,
    pub downlink: Vec<Vec<CMat>>,
    pub seed: u64,
    /// Sub-seed (RNG stream) that produced a full-rank draw.
    pub attempt: u32,
}

impl ChannelSet {
    pub fn uplink(&self, cluster: usize, user: usize) -> &CMat {
        &self.uplink[cluster][user]
    }

    pub fn downlink(&self, cluster: usize, user: usize) -> &CMat {
        &self.downlink[cluster][user]
    }
}

const MAX_SAMPLING_ATTEMPTS: u32 = 16;

/// Draws i.i.d. CN(0,1) uplink and downlink matrices. Pure in
/// `(config, seed)`; a rank-deficient draw is retried on the next RNG stream.
pub fn sample_channels(config: &NetworkConfig, seed: u64) -> Result<ChannelSet> {
    config.validate()?;
    let n = config.relay_antennas;
    for attempt in 0..MAX_SAMPLING_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(attempt));
        let mut uplink: Vec<Vec<CMat>> = config.clusters.iter().map(|_| Vec::new()).collect();
        let mut downlink = uplink.clone();
        for (l, k) in config.users_iter() {
            let m = config.antennas(l, k);
            uplink[l].push(linalg::complex_gaussian(&mut rng, n, m));
            downlink[l].push(linalg::complex_gaussian(&mut rng, m, n));
        }
        let full_rank = uplink
            .iter()
            .chain(downlink.iter())
            .flatten()
            .all(|h| linalg::rank(h, RANK_TOL) == h.nrows().min(h.ncols()));
        if full_rank {
            return Ok(ChannelSet {
                uplink,
                downlink,
                seed,
                attempt,
            });
        }
    }
    Err(Error::DegenerateRng {
        seed,
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

/// Unordered user pair inside a cluster, stored with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub cluster: usize,
    pub first: usize,
    pub second: usize,
}

impl PairKey {
    pub fn new(cluster: usize, a: usize, b: usize) -> Self {
        assert_ne!(a, b);
        PairKey {
            cluster,
            first: a.min(b),
            second: a.max(b),
        }
    }

    pub fn contains(&self, cluster: usize, user: usize) -> bool {
        self.cluster == cluster && (self.first == user || self.second == user)
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}({},{})", self.cluster + 1, self.first + 1, self.second + 1)
    }
}

/// Directed multiple-access flow `src -> dest` inside a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacKey {
    pub cluster: usize,
    pub src: usize,
    pub dest: usize,
}

impl fmt::Display for MacKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}({}->{})", self.cluster + 1, self.src + 1, self.dest + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    /// A single aligned pair; the network collapses to a two-way relay channel.
    TwoWayRelay,
    SignalSpaceAlignment,
    MacBroadcast,
    Hybrid,
    Idle,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::TwoWayRelay => "two-way relay reduction",
            StrategyKind::SignalSpaceAlignment => "signal space alignment",
            StrategyKind::MacBroadcast => "MAC+BC",
            StrategyKind::Hybrid => "SSA + MAC hybrid",
            StrategyKind::Idle => "idle",
        })
    }
}

/// Stream allocation realizing a catalog value.
///
/// All counts live in the (possibly symbol-extended) space: `relay_dims` is
/// the number of relay dimensions used across `extension_factor` channel
/// uses, and per-user budgets are `extension_factor * M_k^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyDescriptor {
    pub relay_antennas_used: usize,
    pub relay_dims: usize,
    pub extension_factor: usize,
    pub aligned: BTreeMap<PairKey, usize>,
    pub mac: BTreeMap<MacKey, usize>,
    /// The construction follows an allocation the source analysis only
    /// sketches (the one-third relay split).
    pub sketched: bool,
}

impl StrategyDescriptor {
    pub fn empty(relay_dims: usize, extension_factor: usize) -> Self {
        StrategyDescriptor {
            relay_antennas_used: relay_dims.div_ceil(extension_factor),
            relay_dims,
            extension_factor,
            aligned: BTreeMap::new(),
            mac: BTreeMap::new(),
            sketched: false,
        }
    }

    pub fn aligned_dims(&self) -> usize {
        self.aligned.values().sum()
    }

    pub fn mac_streams(&self) -> usize {
        self.mac.values().sum()
    }

    /// Relay dimensions occupied: one per aligned pair dimension plus one
    /// per multiple-access stream.
    pub fn relay_dims_used(&self) -> usize {
        self.aligned_dims() + self.mac_streams()
    }

    /// Interference-free message streams per channel use.
    pub fn stream_dof(&self) -> Rational64 {
        let streams = 2 * self.aligned_dims() + self.mac_streams();
        Rational64::new(streams as i64, self.extension_factor as i64)
    }

    pub fn user_tx_streams(&self, cluster: usize, user: usize) -> usize {
        let aligned: usize = self
            .aligned
            .iter()
            .filter(|(p, _)| p.contains(cluster, user))
            .map(|(_, &n)| n)
            .sum();
        let mac: usize = self
            .mac
            .iter()
            .filter(|(m, _)| m.cluster == cluster && m.src == user)
            .map(|(_, &n)| n)
            .sum();
        aligned + mac
    }

    pub fn user_rx_streams(&self, cluster: usize, user: usize) -> usize {
        let aligned: usize = self
            .aligned
            .iter()
            .filter(|(p, _)| p.contains(cluster, user))
            .map(|(_, &n)| n)
            .sum();
        let mac: usize = self
            .mac
            .iter()
            .filter(|(m, _)| m.cluster == cluster && m.dest == user)
            .map(|(_, &n)| n)
            .sum();
        aligned + mac
    }

    /// Multiple-access streams transmitted by each user.
    pub fn mac_streams_per_user(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for (m, &n) in &self.mac {
            *out.entry((m.cluster, m.src)).or_insert(0) += n;
        }
        out
    }

    pub fn kind(&self) -> StrategyKind {
        let pairs = self.aligned.values().filter(|&&n| n > 0).count();
        let mac = self.mac_streams();
        match (pairs, mac) {
            (0, 0) => StrategyKind::Idle,
            (1, 0) => StrategyKind::TwoWayRelay,
            (_, 0) => StrategyKind::SignalSpaceAlignment,
            (0, _) => StrategyKind::MacBroadcast,
            _ => StrategyKind::Hybrid,
        }
    }

    /// Checks every structural invariant against `config`.
    pub fn validate(&self, config: &NetworkConfig) -> Result<()> {
        let e = self.extension_factor;
        if e == 0 {
            return Err(Error::Plan("extension factor must be at least 1".into()));
        }
        if self.relay_antennas_used > config.relay_antennas {
            return Err(Error::Plan(format!(
                "uses {} relay antennas but the relay has {}",
                self.relay_antennas_used, config.relay_antennas
            )));
        }
        if self.relay_dims > self.relay_antennas_used * e {
            return Err(Error::Plan(format!(
                "relay dimension {} exceeds N'*extension = {}",
                self.relay_dims,
                self.relay_antennas_used * e
            )));
        }
        if self.relay_dims_used() > self.relay_dims {
            return Err(Error::Plan(format!(
                "streams occupy {} relay dimensions but only {} are available",
                self.relay_dims_used(),
                self.relay_dims
            )));
        }
        for (p, &n) in &self.aligned {
            if p.cluster >= config.num_clusters() || p.second >= config.users(p.cluster) {
                return Err(Error::Plan(format!("pair {p} is outside the network")));
            }
            let avail = shared_dim(
                self.relay_dims,
                e * config.antennas(p.cluster, p.first),
                e * config.antennas(p.cluster, p.second),
            );
            if n > avail {
                return Err(Error::Plan(format!(
                    "pair {p} asks for {n} aligned dimensions but shares only {avail}"
                )));
            }
        }
        for m in self.mac.keys() {
            if m.cluster >= config.num_clusters()
                || m.src >= config.users(m.cluster)
                || m.dest >= config.users(m.cluster)
                || m.src == m.dest
            {
                return Err(Error::Plan(format!("MAC flow {m} is not a valid message route")));
            }
        }
        for (l, k) in config.users_iter() {
            let budget = e * config.antennas(l, k);
            let tx = self.user_tx_streams(l, k);
            let rx = self.user_rx_streams(l, k);
            if tx > budget || rx > budget {
                return Err(Error::Plan(format!(
                    "user {} of cluster {} carries {tx} transmit / {rx} receive streams with {budget} antenna dimensions",
                    k + 1,
                    l + 1
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StrategyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}; relay dims {} (N'={}, extension {})",
            self.kind(),
            self.relay_dims,
            self.relay_antennas_used,
            self.extension_factor
        )?;
        let aligned: Vec<String> = self
            .aligned
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(p, n)| format!("{p}x{n}"))
            .collect();
        let mac: Vec<String> = self
            .mac
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(m, n)| format!("{m}x{n}"))
            .collect();
        if !aligned.is_empty() {
            write!(f, "; aligned {}", aligned.join(" "))?;
        }
        if !mac.is_empty() {
            write!(f, "; mac {}", mac.join(" "))?;
        }
        if self.sketched {
            f.write_str("; sketched construction")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    Optimal,
    /// Both an achievable value and a strictly larger bound are known and a
    /// matching converse establishes the gap. No catalog currently proves
    /// such a converse, so this state is never produced by `classify`.
    SuboptimalKnownGap,
    Unknown,
}

impl fmt::Display for Optimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimality::Optimal => "OPTIMAL",
            Optimality::SuboptimalKnownGap => "SUBOPTIMAL (known gap)",
            Optimality::Unknown => "UNKNOWN optimality",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoFReport {
    pub upper_bound: Rational64,
    pub achievable: Option<Rational64>,
    pub regime: Regime,
    pub optimality: Optimality,
    pub strategy: Option<StrategyDescriptor>,
}

impl DoFReport {
    /// Builds a report, deriving optimality from `achievable == upper_bound`.
    ///
    /// Panics if `achievable` exceeds `upper_bound`; that would mean a
    /// catalog formula is wrong.
    pub fn new(
        upper_bound: Rational64,
        achievable: Option<Rational64>,
        regime: Regime,
        strategy: Option<StrategyDescriptor>,
    ) -> Self {
        if let Some(a) = achievable {
            assert!(
                a <= upper_bound,
                "achievable {a} exceeds upper bound {upper_bound} in regime {regime}"
            );
        }
        let optimality = match achievable {
            Some(a) if a == upper_bound => Optimality::Optimal,
            _ => Optimality::Unknown,
        };
        DoFReport {
            upper_bound,
            achievable,
            regime,
            optimality,
            strategy,
        }
    }

    pub fn is_determinate(&self) -> bool {
        self.achievable.is_some() && self.strategy.is_some()
    }
}

impl fmt::Display for DoFReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let achievable = self
            .achievable
            .map(|a| a.to_string())
            .unwrap_or_else(|| "none".to_string());
        write!(
            f,
            "bound {}, achievable {}, regime {}, {}",
            self.upper_bound, achievable, self.regime, self.optimality
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(clusters: Vec<Vec<usize>>, n: usize) -> NetworkConfig {
        NetworkConfig::new(clusters, n).unwrap()
    }

    #[test]
    fn sorts_users_within_cluster() {
        let c = canonicalize(&cfg(vec![vec![2, 3], vec![2, 2]], 3), CanonMode::Users).unwrap();
        assert_eq!(c.config.clusters, vec![vec![3, 2], vec![2, 2]]);
        assert_eq!(c.permutation.users[0], vec![1, 0]);
        assert!(!c.permutation.is_identity());
    }

    #[test]
    fn catalog_mode_orders_clusters_by_second_then_first_user() {
        let c = canonicalize(&cfg(vec![vec![2, 2], vec![3, 2]], 3), CanonMode::Catalog).unwrap();
        assert_eq!(c.config.clusters, vec![vec![3, 2], vec![2, 2]]);
        assert_eq!(c.permutation.clusters, vec![1, 0]);
        assert!(c.cluster_tie_break);

        let c = canonicalize(&cfg(vec![vec![2, 2], vec![5, 3]], 3), CanonMode::Catalog).unwrap();
        assert_eq!(c.config.clusters, vec![vec![5, 3], vec![2, 2]]);
        assert!(!c.cluster_tie_break);
    }

    #[test]
    fn canonical_input_is_untouched() {
        let c = canonicalize(&cfg(vec![vec![3, 2], vec![2, 2]], 3), CanonMode::Catalog).unwrap();
        assert_eq!(c.config.clusters, vec![vec![3, 2], vec![2, 2]]);
        assert!(c.permutation.is_identity());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            NetworkConfig::new(vec![], 2),
            Err(Error::InvalidConfig { .. })
        ));
        assert!(matches!(
            NetworkConfig::new(vec![vec![2]], 2),
            Err(Error::InvalidConfig { .. })
        ));
        let err = NetworkConfig::new(vec![vec![2, 0]], 2).unwrap_err();
        assert!(err.to_string().contains("clusters[0][1]"));
        assert!(NetworkConfig::new(vec![vec![2, 2]], 0).is_err());
    }

    #[test]
    fn message_universe_sizes() {
        let u = message_universe(&cfg(vec![vec![1, 1]], 1));
        assert_eq!(u, vec![MessageId::new(0, 0, 1), MessageId::new(0, 1, 0)]);
        assert_eq!(message_universe(&cfg(vec![vec![1, 1], vec![1, 1]], 1)).len(), 4);
        assert_eq!(message_universe(&cfg(vec![vec![1, 1, 1]], 1)).len(), 6);
    }

    #[test]
    fn sampling_is_deterministic_and_shaped() {
        let c = cfg(vec![vec![2, 2], vec![2, 2]], 3);
        let a = sample_channels(&c, 7).unwrap();
        let b = sample_channels(&c, 7).unwrap();
        assert_eq!(a, b);
        let c2 = cfg(vec![vec![3, 2], vec![2, 2]], 3);
        let ch = sample_channels(&c2, 7).unwrap();
        assert_eq!(ch.uplink(0, 1).shape(), (3, 2));
        assert_eq!(ch.downlink(0, 1).shape(), (2, 3));
        assert_ne!(sample_channels(&c, 8).unwrap().uplink, a.uplink);
    }

    #[test]
    fn report_optimality_follows_equality() {
        let r = DoFReport::new(
            Rational64::from(6),
            Some(Rational64::from(6)),
            Regime::T4Ssa,
            None,
        );
        assert_eq!(r.optimality, Optimality::Optimal);
        let r = DoFReport::new(
            Rational64::from(8),
            Some(Rational64::new(20, 3)),
            Regime::T4Ssa,
            None,
        );
        assert_eq!(r.optimality, Optimality::Unknown);
    }

    #[test]
    #[should_panic(expected = "exceeds upper bound")]
    fn report_rejects_achievable_above_bound() {
        DoFReport::new(Rational64::from(4), Some(Rational64::from(5)), Regime::T4Mac, None);
    }
}
