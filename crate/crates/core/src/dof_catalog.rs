//! Regime classification with exact DoF values for the two-cluster
//! two-user tree, the two-cluster three-user optimal regimes and the
//! symmetric L-cluster K-user result, plus the stream allocation that
//! realizes each determinate regime.

use std::fmt;

use num_rational::Rational64;

use crate::alignment::shared_dim;
use crate::bounds::cluster_refined_bound;
use crate::error::{Error, Result};
use crate::model::{
    canonicalize, CanonMode, DoFReport, MacKey, NetworkConfig, PairKey, StrategyDescriptor,
};

macro_rules! regimes {
    ($($variant:ident => $label:literal, $scheme:literal, $summary:literal;)*) => {
        /// Catalog leaf. The label strings are a stable public contract.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Regime {
            $($variant,)*
        }

        impl Regime {
            pub const ALL: &'static [Regime] = &[$(Regime::$variant,)*];

            pub fn label(self) -> &'static str {
                match self {
                    $(Regime::$variant => $label,)*
                }
            }

            /// Whether the catalog gives an achievable value and a scheme.
            pub fn is_constructive(self) -> bool {
                match self {
                    $(Regime::$variant => $scheme,)*
                }
            }

            /// One-line condition summary in canonical notation.
            pub fn summary(self) -> &'static str {
                match self {
                    $(Regime::$variant => $summary,)*
                }
            }
        }
    };
}

regimes! {
    P1iC1 => "P1.i.C1", true, "N <= M2^1: one cluster as a two-way relay, 2N";
    P1iC2Cond1 => "P1.i.C2.cond1", true, "M2^1 < N <= M2^1+M2^2, N <= M1^1, N <= M1^2: 2N";
    P1iC2Cond2_1 => "P1.i.C2.cond2.1", true, "M1^1 < N <= M1^2, M1^1+M2^1+M2^2 >= 2N: 2N";
    P1iC2Cond2_2 => "P1.i.C2.cond2.2", true, "M1^1 < N <= M1^2, M1^1+M2^1+M2^2 < 2N: M1^1+M2^1+M2^2";
    P1iC2Cond3_1 => "P1.i.C2.cond3.1", true, "M1^2 < N <= M1^1, M2^1+M1^2+M2^2 >= 2N: 2N";
    P1iC2Cond3_2 => "P1.i.C2.cond3.2", true, "M1^2 < N <= M1^1, M2^1+M1^2+M2^2 < 2N: max{M2^1+M1^2+M2^2, N+M2^1}";
    P1iC2Cond4_1 => "P1.i.C2.cond4.1", true, "N > M1^1, N > M1^2, total >= 3N: 2N";
    P1iC2Cond4_2 => "P1.i.C2.cond4.2", true, "N > M1^1, N > M1^2, total < 3N: max/min expression with thirds";
    P1iiC1 => "P1.ii.C1", true, "N >= 2(M2^1+M2^2): MAC+BC, 2(M2^1+M2^2)";
    P1iiC2Cond1 => "P1.ii.C2.cond1", true, "M2^1+M2^2 < N < 2(M2^1+M2^2), N <= M1^1, N <= M1^2: 2(M2^1+M2^2)";
    P1iiC2Cond2_1 => "P1.ii.C2.cond2.1", true, "M1^1 < N <= M1^2, N >= 2M2^1+M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond2_2 => "P1.ii.C2.cond2.2", true, "M1^1 < N <= M1^2, M1^1 >= M2^1+M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond2_3 => "P1.ii.C2.cond2.3", true, "M1^1 < N <= M1^2 otherwise: max{N+M2^2, M1^1+M2^1+M2^2}";
    P1iiC2Cond3_1 => "P1.ii.C2.cond3.1", true, "M1^2 < N <= M1^1, N >= M2^1+2M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond3_2 => "P1.ii.C2.cond3.2", true, "M1^2 < N <= M1^1, M1^2 >= M2^1+M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond3_3 => "P1.ii.C2.cond3.3", true, "M1^2 < N <= M1^1 otherwise: max{M2^1+M1^2+M2^2, N+M2^1}";
    P1iiC2Cond4_1 => "P1.ii.C2.cond4.1", true, "N > M1^1, M1^2; M1^1, M1^2 >= M2^1+M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond4_2 => "P1.ii.C2.cond4.2", true, "N > M1^1, M1^2; M1^2 >= 2M2^1+M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond4_3 => "P1.ii.C2.cond4.3", true, "N > M1^1, M1^2; M1^1 >= M2^1+2M2^2: 2(M2^1+M2^2)";
    P1iiC2Cond4_4 => "P1.ii.C2.cond4.4", true, "N > M1^1, M1^2 otherwise: max/min expression with thirds";
    T3Bind2NTwoWay => "T3.bind-2N.two-way", true, "2N binds, N <= max{M2^1, M2^2}: 2N";
    T3Bind2NCond1 => "T3.bind-2N.cond1", true, "2N binds, M1^1 >= N, M1^2 >= N: 2N";
    T3Bind2NCond2 => "T3.bind-2N.cond2", true, "2N binds, M1^1 >= N > M1^2, shared dimensions >= N: 2N";
    T3Bind2NCond3 => "T3.bind-2N.cond3", true, "2N binds, M1^1 < N <= M1^2, shared dimensions >= N: 2N";
    T3Bind2NCond4 => "T3.bind-2N.cond4", true, "2N binds, M1^1, M1^2 < N, shared dimensions >= N: 2N";
    T3Bind2NUnknown => "T3.bind-2N.unknown", false, "2N binds, no listed condition holds";
    T3BindSumMac => "T3.bind-sum.mac", true, "total antennas bind, N >= total: MAC+BC";
    T3BindSumUnknown => "T3.bind-sum.unknown", false, "total antennas bind, N < total";
    T3BindWeakMac => "T3.bind-weak.mac", true, "2(weak users) binds, N >= 2(M2^1+M3^1+M2^2+M3^2): MAC+BC";
    T3BindWeakCond1 => "T3.bind-weak.cond1", true, "2(weak users) binds, M1^1, M1^2 >= M2^1+M3^1+M2^2+M3^2: SSA";
    T3BindWeakCond2 => "T3.bind-weak.cond2", true, "2(weak users) binds, N, M1^2 >= 2(M2^1+M3^1)+M2^2+M3^2: hybrid";
    T3BindWeakCond3 => "T3.bind-weak.cond3", true, "2(weak users) binds, N, M1^1 >= M2^1+M3^1+2(M2^2+M3^2): hybrid";
    T3BindWeakUnknown => "T3.bind-weak.unknown", false, "2(weak users) binds, no listed condition holds";
    T3BindMixed12Mac => "T3.bind-mixed12.mac", true, "cluster-1 total + 2(cluster-2 weak) binds, N at least that: MAC+BC";
    T3BindMixed12Subset => "T3.bind-mixed12.subset", true, "cluster-1 total + 2(cluster-2 weak) binds, relay subset with cluster-2 SSA";
    T3BindMixed12Unknown => "T3.bind-mixed12.unknown", false, "cluster-1 total + 2(cluster-2 weak) binds, no listed condition holds";
    T3BindMixed21Mac => "T3.bind-mixed21.mac", true, "2(cluster-1 weak) + cluster-2 total binds, N at least that: MAC+BC";
    T3BindMixed21Subset => "T3.bind-mixed21.subset", true, "2(cluster-1 weak) + cluster-2 total binds, relay subset with cluster-1 SSA";
    T3BindMixed21Unknown => "T3.bind-mixed21.unknown", false, "2(cluster-1 weak) + cluster-2 total binds, no listed condition holds";
    T4Mac => "T4.mac", true, "symmetric, N >= KLM: MAC+BC, KLM";
    T4Ssa => "T4.ssa", true, "symmetric, (LK(K-1)/2)(2M-N) >= N: pairwise SSA, 2N";
    T4Unknown => "T4.unknown", false, "symmetric, neither condition holds";
    GeneralBoundOnly => "general.bound-only", false, "no catalog covers this shape; bound only";
}

impl Regime {
    pub fn from_label(label: &str) -> Option<Regime> {
        Regime::ALL.iter().copied().find(|r| r.label() == label)
    }

    /// Leaves whose value matches the upper bound by the optimality theorem
    /// for the two-cluster two-user network.
    pub fn is_listed_optimal_2x2(self) -> bool {
        use Regime::*;
        matches!(
            self,
            P1iC1
                | P1iC2Cond1
                | P1iC2Cond2_1
                | P1iC2Cond3_1
                | P1iC2Cond4_1
                | P1iiC1
                | P1iiC2Cond1
                | P1iiC2Cond2_1
                | P1iiC2Cond2_2
                | P1iiC2Cond3_1
                | P1iiC2Cond3_2
                | P1iiC2Cond4_1
                | P1iiC2Cond4_2
                | P1iiC2Cond4_3
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn pos(x: i64) -> i64 {
    x.max(0)
}

/// Canonical antenna counts `(a1, b1, a2, b2, n)` of a 2x2 network.
#[derive(Debug, Clone, Copy)]
struct Two {
    a1: i64,
    b1: i64,
    a2: i64,
    b2: i64,
    n: i64,
}

impl Two {
    fn of(c: &NetworkConfig) -> Two {
        let m = |l: usize, k: usize| c.clusters[l][k] as i64;
        Two {
            a1: m(0, 0),
            b1: m(0, 1),
            a2: m(1, 0),
            b2: m(1, 1),
            n: c.relay_antennas as i64,
        }
    }

    fn total(self) -> i64 {
        self.a1 + self.b1 + self.a2 + self.b2
    }

    /// Shared minimum of thirds appearing in both max expressions.
    fn thirds(self) -> Rational64 {
        let Two { a1, b1, a2, b2, .. } = self;
        let t = self.total();
        let x = Rational64::new(2 * t, 3);
        let y = Rational64::new(4 * (a1 + b1 + b2) - 2 * a2, 3);
        let z = Rational64::new(4 * (b1 + a2 + b2) - 2 * a1, 3);
        x.min(y).min(z)
    }
}

/// Leaf and value of the two-cluster two-user tree for a canonical config.
fn tree_2x2(t: Two) -> (Regime, Rational64) {
    use Regime::*;
    let Two { a1, b1, a2, b2, n } = t;
    if n <= b1 + b2 {
        if n <= b1 {
            return (P1iC1, r(2 * n));
        }
        if n <= a1 && n <= a2 {
            return (P1iC2Cond1, r(2 * n));
        }
        if a1 < n && n <= a2 {
            let s = a1 + b1 + b2;
            return if s >= 2 * n {
                (P1iC2Cond2_1, r(2 * n))
            } else {
                (P1iC2Cond2_2, r(s))
            };
        }
        if a2 < n && n <= a1 {
            let s = b1 + a2 + b2;
            return if s >= 2 * n {
                (P1iC2Cond3_1, r(2 * n))
            } else {
                (P1iC2Cond3_2, r(s.max(n + b1)))
            };
        }
        if t.total() >= 3 * n {
            return (P1iC2Cond4_1, r(2 * n));
        }
        let v = r(pos(a2 + b2 - n) + n).max(r(a1 + b1)).max(t.thirds());
        return (P1iC2Cond4_2, v);
    }

    let weak = 2 * (b1 + b2);
    if n >= weak {
        return (P1iiC1, r(weak));
    }
    if n <= a1 && n <= a2 {
        return (P1iiC2Cond1, r(weak));
    }
    if a1 < n && n <= a2 {
        return if n >= 2 * b1 + b2 {
            (P1iiC2Cond2_1, r(weak))
        } else if a1 >= b1 + b2 {
            (P1iiC2Cond2_2, r(weak))
        } else {
            (P1iiC2Cond2_3, r((n + b2).max(a1 + b1 + b2)))
        };
    }
    if a2 < n && n <= a1 {
        return if n >= b1 + 2 * b2 {
            (P1iiC2Cond3_1, r(weak))
        } else if a2 >= b1 + b2 {
            (P1iiC2Cond3_2, r(weak))
        } else {
            (P1iiC2Cond3_3, r((b1 + a2 + b2).max(n + b1)))
        };
    }
    if a1 >= b1 + b2 && a2 >= b1 + b2 {
        return (P1iiC2Cond4_1, r(weak));
    }
    if a2 >= 2 * b1 + b2 {
        return (P1iiC2Cond4_2, r(weak));
    }
    if a1 >= b1 + 2 * b2 {
        return (P1iiC2Cond4_3, r(weak));
    }
    let v = r(n)
        .max(r(pos(a1 + b1 - n) + n))
        .max(r(pos(a2 + b2 - n) + n))
        .max(t.thirds());
    (P1iiC2Cond4_4, v)
}

fn require_shape(config: &NetworkConfig, clusters: usize, users: usize) -> Result<()> {
    if config.shape() != Some((clusters, users)) {
        let got: Vec<usize> = config.clusters.iter().map(Vec::len).collect();
        return Err(Error::Shape {
            expected: format!("{clusters} clusters of {users} users"),
            got: format!("cluster sizes {got:?}"),
        });
    }
    Ok(())
}

/// Builds the report on the canonical form and relabels the strategy for
/// the caller's original indexing.
fn report_on_canonical(
    config: &NetworkConfig,
    classify: impl Fn(&NetworkConfig) -> (Regime, Option<Rational64>),
) -> Result<DoFReport> {
    let canon = canonicalize(config, CanonMode::Catalog)?;
    let (regime, value) = classify(&canon.config);
    let strategy = value
        .and_then(|_| strategy_for(regime, &canon.config))
        .map(|s| canon.permutation.restore_strategy(&s));
    let bound = r(cluster_refined_bound(&canon.config) as i64);
    Ok(DoFReport::new(bound, value, regime, strategy))
}

/// Two clusters of two users.
pub fn classify_2x2(config: &NetworkConfig) -> Result<DoFReport> {
    require_shape(config, 2, 2)?;
    report_on_canonical(config, |c| {
        let (regime, v) = tree_2x2(Two::of(c));
        (regime, Some(v))
    })
}

/// Canonical antenna counts of a 2x3 network, cluster-major.
#[derive(Debug, Clone, Copy)]
struct Three {
    m: [[i64; 3]; 2],
    n: i64,
}

impl Three {
    fn of(c: &NetworkConfig) -> Three {
        let mut m = [[0; 3]; 2];
        for (l, row) in m.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = c.clusters[l][k] as i64;
            }
        }
        Three {
            m,
            n: c.relay_antennas as i64,
        }
    }

    fn total(self, l: usize) -> i64 {
        self.m[l].iter().sum()
    }

    fn weak(self, l: usize) -> i64 {
        self.m[l][1] + self.m[l][2]
    }

    /// Sum of `(M_i + M_j - N)^+` over the pairs of a cluster whose shared
    /// space is not limited by the relay, as in the 2N-binding conditions.
    fn pair_overlap(self, l: usize) -> i64 {
        let [a, b, c] = self.m[l];
        let n = self.n;
        pos(a + b - n) + pos(a + c - n) + pos(b + c - n)
    }
}

fn tree_2x3(t: Three) -> (Regime, Option<Rational64>) {
    use Regime::*;
    let n = t.n;
    let (a1, a2) = (t.total(0), t.total(1));
    let (w1, w2) = (t.weak(0), t.weak(1));
    let terms = [2 * n, a1 + a2, 2 * (w1 + w2), a1 + 2 * w2, 2 * w1 + a2];
    let bound = *terms.iter().min().expect("five terms");
    let fallback = [
        T3Bind2NUnknown,
        T3BindSumUnknown,
        T3BindWeakUnknown,
        T3BindMixed12Unknown,
        T3BindMixed21Unknown,
    ];
    let mut first_binding = None;

    for (idx, &term) in terms.iter().enumerate() {
        if term != bound {
            continue;
        }
        first_binding.get_or_insert(idx);
        let hit = match idx {
            0 => {
                let (s1, s2) = (t.m[0][1], t.m[1][1]);
                let (m1, m2) = (t.m[0][0], t.m[1][0]);
                if n <= s1.max(s2) {
                    Some(T3Bind2NTwoWay)
                } else if m1 >= n && m2 >= n {
                    Some(T3Bind2NCond1)
                } else if m1 >= n && w1 + pos(w1 - n) + t.pair_overlap(1) >= n {
                    Some(T3Bind2NCond2)
                } else if m1 < n && m2 >= n && t.pair_overlap(0) + w2 + pos(w2 - n) >= n {
                    Some(T3Bind2NCond3)
                } else if m1 < n && m2 < n && t.pair_overlap(0) + t.pair_overlap(1) >= n {
                    Some(T3Bind2NCond4)
                } else {
                    None
                }
            }
            1 => (n >= a1 + a2).then_some(T3BindSumMac),
            2 => {
                let x = w1 + w2;
                if n >= 2 * x {
                    Some(T3BindWeakMac)
                } else if t.m[0][0] >= x && t.m[1][0] >= x {
                    Some(T3BindWeakCond1)
                } else if n >= 2 * w1 + w2 && t.m[1][0] >= 2 * w1 + w2 {
                    Some(T3BindWeakCond2)
                } else if n >= w1 + 2 * w2 && t.m[0][0] >= w1 + 2 * w2 {
                    Some(T3BindWeakCond3)
                } else {
                    None
                }
            }
            3 => {
                if n >= a1 + 2 * w2 {
                    Some(T3BindMixed12Mac)
                } else if n >= a1 + w2 && t.m[1][0] >= a1 + w2 {
                    Some(T3BindMixed12Subset)
                } else {
                    None
                }
            }
            _ => {
                if n >= 2 * w1 + a2 {
                    Some(T3BindMixed21Mac)
                } else if n >= w1 + a2 && t.m[0][0] >= w1 + a2 {
                    Some(T3BindMixed21Subset)
                } else {
                    None
                }
            }
        };
        if let Some(regime) = hit {
            return (regime, Some(r(bound)));
        }
    }
    (fallback[first_binding.expect("some term binds")], None)
}

/// Two clusters of three users; only the regimes with a known optimum are
/// constructive.
pub fn classify_2x3(config: &NetworkConfig) -> Result<DoFReport> {
    require_shape(config, 2, 3)?;
    report_on_canonical(config, |c| tree_2x3(Three::of(c)))
}

fn tree_symmetric(l: i64, k: i64, m: i64, n: i64) -> (Regime, Option<Rational64>) {
    let pairs = l * k * (k - 1) / 2;
    if n >= k * l * m {
        (Regime::T4Mac, Some(r(k * l * m)))
    } else if pairs * (2 * m - n) >= n {
        (Regime::T4Ssa, Some(r(2 * n)))
    } else {
        (Regime::T4Unknown, None)
    }
}

/// `L` clusters of `K` users with `M` antennas each.
pub fn classify_symmetric(l: usize, k: usize, m: usize, n: usize) -> Result<DoFReport> {
    let config = NetworkConfig::symmetric(l, k, m, n)?;
    report_on_canonical(&config, |_| {
        tree_symmetric(l as i64, k as i64, m as i64, n as i64)
    })
}

/// Routes a configuration to the matching catalog.
pub fn classify(config: &NetworkConfig) -> Result<DoFReport> {
    config.validate()?;
    let symmetric = config.as_symmetric();
    let primary = match config.shape() {
        Some((2, 2)) => Some(classify_2x2(config)?),
        Some((2, 3)) => Some(classify_2x3(config)?),
        _ => None,
    };
    match (primary, symmetric) {
        (Some(rep), _) if rep.is_determinate() => Ok(rep),
        (primary, Some((l, k, m))) => {
            let sym = classify_symmetric(l, k, m, config.relay_antennas)?;
            Ok(match primary {
                Some(p) if !sym.is_determinate() => p,
                _ => sym,
            })
        }
        (Some(rep), None) => Ok(rep),
        (None, None) => report_on_canonical(config, |_| (Regime::GeneralBoundOnly, None)),
    }
}

/// Stream allocation for a regime, in the caller's labels.
pub fn regime_strategy(regime: Regime, config: &NetworkConfig) -> Result<Option<StrategyDescriptor>> {
    if !regime.is_constructive() {
        return Ok(None);
    }
    let canon = canonicalize(config, CanonMode::Catalog)?;
    Ok(strategy_for(regime, &canon.config).map(|s| canon.permutation.restore_strategy(&s)))
}

/// Relay dimension choice for a candidate plan.
#[derive(Debug, Clone, Copy)]
enum Relay {
    /// The full relay.
    Full,
    /// `n` relay antennas, no extension.
    Exactly(usize),
    /// Half of the given count, with a two-symbol extension when it is odd.
    Half(usize),
    /// A third of the given count, with a three-symbol extension when it is
    /// not divisible.
    Third(usize),
}

#[derive(Debug, Clone)]
struct Candidate {
    relay: Relay,
    ssa: Vec<usize>,
    mac: Vec<usize>,
}

fn cand(relay: Relay, ssa: &[usize], mac: &[usize]) -> Candidate {
    Candidate {
        relay,
        ssa: ssa.to_vec(),
        mac: mac.to_vec(),
    }
}

fn candidates(regime: Regime, config: &NetworkConfig) -> Vec<Candidate> {
    use Regime::*;
    use Relay::*;
    let m = |l: usize, k: usize| config.clusters[l][k];
    let both = [0, 1];
    match regime {
        P1iC1 | T3Bind2NTwoWay => vec![cand(Full, &[0], &[])],
        P1iC2Cond1 | P1iC2Cond2_1 | P1iC2Cond3_1 | P1iC2Cond4_1 | P1iiC2Cond1 | T3Bind2NCond1
        | T3Bind2NCond2 | T3Bind2NCond3 | T3Bind2NCond4 => vec![cand(Full, &both, &[])],
        P1iC2Cond2_2 => vec![cand(Half(m(0, 0) + m(0, 1) + m(1, 1)), &both, &[])],
        P1iC2Cond3_2 | P1iiC2Cond3_3 => vec![
            cand(Half(m(0, 1) + m(1, 0) + m(1, 1)), &both, &[]),
            cand(Full, &[0], &[1]),
        ],
        P1iC2Cond4_2 => vec![
            cand(Full, &[1], &[0]),
            cand(Full, &[0], &[1]),
            cand(Third(config.total_user_antennas()), &both, &[]),
        ],
        P1iiC1 => vec![cand(Exactly(2 * (m(0, 1) + m(1, 1))), &[], &both)],
        P1iiC2Cond2_1 => vec![cand(Full, &[1], &[0])],
        P1iiC2Cond3_1 => vec![cand(Full, &[0], &[1])],
        P1iiC2Cond2_2 | P1iiC2Cond3_2 | P1iiC2Cond4_1 => {
            vec![cand(Exactly(m(0, 1) + m(1, 1)), &both, &[])]
        }
        P1iiC2Cond2_3 => vec![
            cand(Full, &[1], &[0]),
            cand(Half(m(0, 0) + m(0, 1) + m(1, 1)), &both, &[]),
        ],
        P1iiC2Cond4_2 => vec![cand(Exactly(2 * m(0, 1) + m(1, 1)), &[1], &[0])],
        P1iiC2Cond4_3 => vec![cand(Exactly(m(0, 1) + 2 * m(1, 1)), &[0], &[1])],
        P1iiC2Cond4_4 => vec![
            cand(Full, &[], &both),
            cand(Full, &[0], &[1, 0]),
            cand(Full, &[1], &[0, 1]),
            cand(Third(config.total_user_antennas()), &both, &[]),
        ],
        T3BindSumMac => vec![cand(Exactly(config.total_user_antennas()), &[], &both)],
        T3BindWeakMac => vec![cand(Exactly(2 * (weak(config, 0) + weak(config, 1))), &[], &both)],
        T3BindWeakCond1 => vec![cand(Exactly(weak(config, 0) + weak(config, 1)), &both, &[])],
        T3BindWeakCond2 => vec![cand(
            Exactly(2 * weak(config, 0) + weak(config, 1)),
            &[1],
            &[0],
        )],
        T3BindWeakCond3 => vec![cand(
            Exactly(weak(config, 0) + 2 * weak(config, 1)),
            &[0],
            &[1],
        )],
        T3BindMixed12Mac => vec![cand(
            Exactly(total(config, 0) + 2 * weak(config, 1)),
            &[],
            &both,
        )],
        T3BindMixed12Subset => vec![cand(Exactly(total(config, 0) + weak(config, 1)), &[1], &[0])],
        T3BindMixed21Mac => vec![cand(
            Exactly(2 * weak(config, 0) + total(config, 1)),
            &[],
            &both,
        )],
        T3BindMixed21Subset => vec![cand(Exactly(weak(config, 0) + total(config, 1)), &[0], &[1])],
        T4Mac => {
            let all: Vec<usize> = (0..config.num_clusters()).collect();
            vec![cand(Exactly(config.total_user_antennas()), &[], &all)]
        }
        T4Ssa => Vec::new(),
        T3Bind2NUnknown | T3BindSumUnknown | T3BindWeakUnknown | T3BindMixed12Unknown
        | T3BindMixed21Unknown | T4Unknown | GeneralBoundOnly => Vec::new(),
    }
}

fn weak(config: &NetworkConfig, l: usize) -> usize {
    config.clusters[l][1..].iter().sum()
}

fn total(config: &NetworkConfig, l: usize) -> usize {
    config.clusters[l].iter().sum()
}

/// Stream allocation for a constructive regime on a canonical config. When
/// a value is a maximum over several schemes, every candidate is planned and
/// the one with the most streams is kept.
fn strategy_for(regime: Regime, config: &NetworkConfig) -> Option<StrategyDescriptor> {
    if regime == Regime::T4Ssa {
        return symmetric_ssa(config);
    }
    let mut best: Option<StrategyDescriptor> = None;
    for c in candidates(regime, config) {
        if let Some(s) = plan(config, &c) {
            if best.as_ref().is_none_or(|b| s.stream_dof() > b.stream_dof()) {
                best = Some(s);
            }
        }
    }
    best
}

fn relay_dims(relay: Relay, n: usize) -> (usize, usize) {
    match relay {
        Relay::Full => (n, 1),
        Relay::Exactly(x) => (x, 1),
        Relay::Half(s) if s % 2 == 0 => (s / 2, 1),
        Relay::Half(s) => (s, 2),
        Relay::Third(t) if t % 3 == 0 => (t / 3, 1),
        Relay::Third(t) => (t, 3),
    }
}

fn plan(config: &NetworkConfig, c: &Candidate) -> Option<StrategyDescriptor> {
    let (dims, e) = relay_dims(c.relay, config.relay_antennas);
    if dims == 0 || dims.div_ceil(e) > config.relay_antennas {
        return None;
    }
    let mut s = StrategyDescriptor::empty(dims, e);
    s.sketched = matches!(c.relay, Relay::Third(_));
    let mut left = dims;
    for &l in &c.ssa {
        let alloc = ssa_cluster(config, l, dims, e, left);
        left -= alloc.iter().map(|(_, n)| n).sum::<usize>();
        s.aligned.extend(alloc.into_iter().filter(|&(_, n)| n > 0));
    }
    for &l in &c.mac {
        let flows = mac_cluster(config, &s, l, e, left);
        left -= flows.iter().map(|(_, n)| n).sum::<usize>();
        for (key, n) in flows {
            *s.mac.entry(key).or_insert(0) += n;
        }
    }
    Some(s)
}

fn cluster_pairs(users: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..users {
        for j in (i + 1)..users {
            out.push((i, j));
        }
    }
    out
}

/// Aligned dimensions per pair of one cluster, as many as possible up to
/// `cap`, respecting shared dimensions and per-user antenna budgets.
fn ssa_cluster(
    config: &NetworkConfig,
    l: usize,
    dims: usize,
    e: usize,
    cap: usize,
) -> Vec<(PairKey, usize)> {
    let ant: Vec<usize> = config.clusters[l].iter().map(|&m| e * m).collect();
    let pairs = cluster_pairs(ant.len());
    let limits: Vec<usize> = pairs
        .iter()
        .map(|&(i, j)| shared_dim(dims, ant[i], ant[j]).min(cap))
        .collect();
    let counts = if pairs.len() <= 3 {
        best_pair_counts(&pairs, &limits, &ant, cap)
    } else {
        round_robin_counts(&pairs, &limits, &ant, cap)
    };
    pairs
        .iter()
        .zip(counts)
        .map(|(&(i, j), n)| (PairKey::new(l, i, j), n))
        .collect()
}

/// Exhaustive search over at most three pairs; the first maximizer in
/// descending order of the leading pair wins.
fn best_pair_counts(
    pairs: &[(usize, usize)],
    limits: &[usize],
    budget: &[usize],
    cap: usize,
) -> Vec<usize> {
    fn go(
        idx: usize,
        pairs: &[(usize, usize)],
        limits: &[usize],
        load: &mut Vec<usize>,
        budget: &[usize],
        cur: &mut Vec<usize>,
        sum: usize,
        cap: usize,
        best: &mut (usize, Vec<usize>),
    ) {
        if idx == pairs.len() {
            if sum > best.0 || best.1.is_empty() {
                *best = (sum, cur.clone());
            }
            return;
        }
        let (i, j) = pairs[idx];
        let room = limits[idx]
            .min(budget[i] - load[i])
            .min(budget[j] - load[j])
            .min(cap - sum);
        for x in (0..=room).rev() {
            load[i] += x;
            load[j] += x;
            cur.push(x);
            go(idx + 1, pairs, limits, load, budget, cur, sum + x, cap, best);
            cur.pop();
            load[i] -= x;
            load[j] -= x;
            if best.0 == cap {
                return;
            }
        }
    }
    let mut best = (0, Vec::new());
    let mut load = vec![0; budget.len()];
    go(0, pairs, limits, &mut load, budget, &mut Vec::new(), 0, cap, &mut best);
    best.1
}

/// Adds one dimension at a time to the least-loaded admissible pair.
fn round_robin_counts(
    pairs: &[(usize, usize)],
    limits: &[usize],
    budget: &[usize],
    cap: usize,
) -> Vec<usize> {
    let mut counts = vec![0; pairs.len()];
    let mut load = vec![0; budget.len()];
    for _ in 0..cap {
        let pick = (0..pairs.len())
            .filter(|&p| {
                let (i, j) = pairs[p];
                counts[p] < limits[p] && load[i] < budget[i] && load[j] < budget[j]
            })
            .min_by_key(|&p| {
                let (i, j) = pairs[p];
                (counts[p], load[i] + load[j])
            });
        let Some(p) = pick else { break };
        counts[p] += 1;
        load[pairs[p].0] += 1;
        load[pairs[p].1] += 1;
    }
    counts
}

/// Multiple-access flows inside a cluster: a max flow from senders to
/// receivers (no self loops) with the antenna dimensions left over by
/// alignment as capacities and `cap` relay dimensions in total.
fn mac_cluster(
    config: &NetworkConfig,
    s: &StrategyDescriptor,
    l: usize,
    e: usize,
    cap: usize,
) -> Vec<(MacKey, usize)> {
    let k = config.users(l);
    let send: Vec<usize> = (0..k)
        .map(|u| e * config.antennas(l, u) - s.user_tx_streams(l, u).min(e * config.antennas(l, u)))
        .collect();
    let recv: Vec<usize> = (0..k)
        .map(|u| e * config.antennas(l, u) - s.user_rx_streams(l, u).min(e * config.antennas(l, u)))
        .collect();
    // nodes: 0 source, 1 gate, 2..2+k senders, 2+k..2+2k receivers, last sink
    let n = 3 + 2 * k;
    let sink = n - 1;
    let mut capm = vec![vec![0usize; n]; n];
    capm[0][1] = cap;
    for u in 0..k {
        capm[1][2 + u] = send[u];
        capm[2 + k + u][sink] = recv[u];
        for v in 0..k {
            if u != v {
                capm[2 + u][2 + k + v] = usize::MAX / 4;
            }
        }
    }
    let orig = capm.clone();
    max_flow(&mut capm, 0, sink);
    let mut out = Vec::new();
    for u in 0..k {
        for v in 0..k {
            if u != v {
                let f = orig[2 + u][2 + k + v] - capm[2 + u][2 + k + v];
                if f > 0 {
                    out.push((MacKey { cluster: l, src: u, dest: v }, f));
                }
            }
        }
    }
    out
}

/// Edmonds-Karp on a dense residual matrix, updated in place.
fn max_flow(res: &mut [Vec<usize>], src: usize, sink: usize) -> usize {
    let n = res.len();
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[src] = src;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if prev[y] == usize::MAX && res[x][y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut push = usize::MAX;
        let mut y = sink;
        while y != src {
            push = push.min(res[prev[y]][y]);
            y = prev[y];
        }
        let mut y = sink;
        while y != src {
            let x = prev[y];
            res[x][y] -= push;
            res[y][x] += push;
            y = x;
        }
        total += push;
    }
}

/// Pairwise alignment over all `LK(K-1)/2` pairs carrying `N` relay
/// dimensions in total. The uneven split puts `ceil(N/P)` on all pairs but
/// one; when that is infeasible (negative remainder or a user over its
/// antenna budget) the dimensions are spread one at a time instead.
fn symmetric_ssa(config: &NetworkConfig) -> Option<StrategyDescriptor> {
    let (_, k, m) = config.as_symmetric()?;
    let n = config.relay_antennas;
    let mut keys = Vec::new();
    for l in 0..config.num_clusters() {
        for (i, j) in cluster_pairs(k) {
            keys.push(PairKey::new(l, i, j));
        }
    }
    let p = keys.len();
    let limit = shared_dim(n, m, m);
    let load_ok = |counts: &[usize]| {
        let mut load = vec![vec![0; k]; config.num_clusters()];
        for (key, &c) in keys.iter().zip(counts) {
            load[key.cluster][key.first] += c;
            load[key.cluster][key.second] += c;
        }
        load.iter().flatten().all(|&x| x <= m) && counts.iter().all(|&c| c <= limit)
    };

    let per = n.div_ceil(p);
    let mut counts = vec![per; p];
    let uneven_ok = match n.checked_sub((p - 1) * per) {
        Some(last) => {
            counts[p - 1] = last;
            load_ok(&counts)
        }
        None => false,
    };
    if !uneven_ok {
        // flatten pairs across clusters: user index is offset by cluster
        let flat: Vec<(usize, usize)> = keys
            .iter()
            .map(|key| (key.cluster * k + key.first, key.cluster * k + key.second))
            .collect();
        counts = round_robin_counts(&flat, &vec![limit; p], &vec![m; k * config.num_clusters()], n);
        if counts.iter().sum::<usize>() != n {
            return None;
        }
    }
    let mut s = StrategyDescriptor::empty(n, 1);
    s.aligned = keys
        .into_iter()
        .zip(counts)
        .filter(|&(_, c)| c > 0)
        .collect();
    Some(s)
}
