//! Explicit beamformers, relay processing and receive filters for a stream
//! allocation on one channel realization, with a noiseless round trip and a
//! finite-SNR rate proxy.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alignment::{receiver_filters, shared_dim, shared_subspace};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::{ChannelSet, MacKey, MessageId, NetworkConfig, PairKey, StrategyDescriptor};

/// Stacked relay matrices above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e10;
/// Noiseless round-trip tolerance on relative symbol error.
pub const NOISELESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRoute {
    /// Dimension `index` of an aligned pair; the relay only sees the sum.
    Aligned { pair: PairKey, index: usize },
    /// Stream `index` of a multiple-access flow.
    Mac { flow: MacKey, index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamInfo {
    pub message: MessageId,
    pub route: StreamRoute,
    /// Relay dimension (column of the decode stack, row of the downlink stack).
    pub slot: usize,
    /// Transmit direction in the sender's (extended) antenna space.
    pub beam: CVec,
    /// Receive combiner, applied as `filter^T y`.
    pub filter: CVec,
    /// The opposite stream of an aligned pair, whose symbol the receiver
    /// knows and cancels.
    pub partner: Option<usize>,
}

impl StreamInfo {
    pub fn sender(&self) -> (usize, usize) {
        (self.message.cluster, self.message.src)
    }

    pub fn receiver(&self) -> (usize, usize) {
        (self.message.cluster, self.message.dest)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionScheme {
    pub config: NetworkConfig,
    pub descriptor: StrategyDescriptor,
    pub extension_factor: usize,
    pub relay_dims: usize,
    pub relay_antennas_used: usize,
    /// Relay-side combiner (`relay_dims x e*N'`) applied to the block-diagonal
    /// extended channel; identity when absent.
    pub combiner: Option<CMat>,
    /// Effective uplink `relay_dims x e*M_k^l` per user.
    pub uplink: Vec<Vec<CMat>>,
    /// Effective downlink `e*M_k^l x relay_dims` per user.
    pub downlink: Vec<Vec<CMat>>,
    pub streams: Vec<StreamInfo>,
    /// Relay-side directions per aligned pair (`relay_dims x count`).
    pub targets: BTreeMap<PairKey, CMat>,
    /// `[aligned directions | MAC arrival columns]`, one column per slot.
    pub directions: CMat,
    /// One row per slot: common downlink rows `g_i^T` and MAC users' raw rows.
    pub effective_downlink: CMat,
    pub relay_decode: CMat,
    pub relay_precode: CMat,
    pub alignment_residual: f64,
    pub filter_residual: f64,
    pub decode_condition: f64,
    pub precode_condition: f64,
}

impl TransmissionScheme {
    pub fn slots(&self) -> usize {
        self.directions.ncols()
    }

    /// Interference-free streams per channel use.
    pub fn stream_dof(&self) -> num_rational::Rational64 {
        num_rational::Rational64::new(self.streams.len() as i64, self.extension_factor as i64)
    }

    fn streams_of(&self, pick: impl Fn(&StreamInfo) -> bool) -> Vec<&StreamInfo> {
        self.streams.iter().filter(|s| pick(s)).collect()
    }

    /// Columns are the user's stream directions.
    pub fn beamformer(&self, cluster: usize, user: usize) -> CMat {
        let s = self.streams_of(|s| s.sender() == (cluster, user));
        let dim = self.uplink[cluster][user].ncols();
        let cols: Vec<CVec> = s.iter().map(|s| s.beam.clone()).collect();
        columns(dim, &cols)
    }

    /// Rows are the user's receive combiners.
    pub fn receive_filter(&self, cluster: usize, user: usize) -> CMat {
        let s = self.streams_of(|s| s.receiver() == (cluster, user));
        let dim = self.downlink[cluster][user].nrows();
        let cols: Vec<CVec> = s.iter().map(|s| s.filter.clone()).collect();
        columns(dim, &cols).transpose()
    }
}

fn columns(dim: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(dim, cols.len());
    for (i, c) in cols.iter().enumerate() {
        m.set_column(i, c);
    }
    m
}

fn unit(dim: usize, at: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[at] = Complex64::new(1.0, 0.0);
    v
}

/// Random matrix with orthonormal rows.
fn isometry_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let g = linalg::complex_gaussian(rng, cols, rows);
    g.qr().q().adjoint()
}

/// Effective channels seen within `relay_dims` relay dimensions over
/// `extension` channel uses of the first `ceil(relay_dims / extension)`
/// relay antennas.
fn effective_channels(
    channels: &ChannelSet,
    relay_dims: usize,
    extension: usize,
    combiner: Option<&CMat>,
) -> (Vec<Vec<CMat>>, Vec<Vec<CMat>>) {
    let used = relay_dims.div_ceil(extension);
    let up = channels
        .uplink
        .iter()
        .map(|c| {
            c.iter()
                .map(|h| {
                    let b = linalg::block_diag_repeat(&h.rows(0, used).into_owned(), extension);
                    match combiner {
                        Some(r) => r * b,
                        None => b,
                    }
                })
                .collect()
        })
        .collect();
    let down = channels
        .downlink
        .iter()
        .map(|c| {
            c.iter()
                .map(|g| {
                    let b = linalg::block_diag_repeat(&g.columns(0, used).into_owned(), extension);
                    match combiner {
                        Some(r) => b * r.adjoint(),
                        None => b,
                    }
                })
                .collect()
        })
        .collect();
    (up, down)
}

fn check_shapes(config: &NetworkConfig, channels: &ChannelSet) -> Result<()> {
    let n = config.relay_antennas;
    let ok = channels.uplink.len() == config.num_clusters()
        && channels.downlink.len() == config.num_clusters()
        && config.clusters.iter().enumerate().all(|(l, c)| {
            channels.uplink[l].len() == c.len()
                && channels.downlink[l].len() == c.len()
                && c.iter().enumerate().all(|(k, &m)| {
                    channels.uplink[l][k].shape() == (n, m)
                        && channels.downlink[l][k].shape() == (m, n)
                })
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Shape {
            expected: format!("channels sampled for {config}"),
            got: "mismatched channel set".into(),
        })
    }
}

fn mixing(rng: &mut ChaCha8Rng, avail: usize, want: usize) -> CMat {
    linalg::complex_gaussian(rng, avail, want)
}

/// Synthesizes the scheme realizing `descriptor` on `channels`.
pub fn build_scheme(
    config: &NetworkConfig,
    descriptor: &StrategyDescriptor,
    channels: &ChannelSet,
) -> Result<TransmissionScheme> {
    descriptor.validate(config)?;
    check_shapes(config, channels)?;
    let e = descriptor.extension_factor;
    let d = descriptor.relay_dims;
    let used = descriptor.relay_antennas_used;

    let mut rng = ChaCha8Rng::seed_from_u64(channels.seed);
    rng.set_stream(1 << 20 | u64::from(channels.attempt));
    let combiner = (e * used != d).then(|| isometry_rows(&mut rng, d, e * used));
    let (uplink, downlink) = effective_channels(channels, d, e, combiner.as_ref());

    let mut streams: Vec<StreamInfo> = Vec::new();
    let mut targets = BTreeMap::new();
    let mut dir_cols: Vec<CVec> = Vec::new();
    let mut g_rows: Vec<CVec> = Vec::new();
    let mut alignment_residual: f64 = 0.0;
    let mut filter_residual: f64 = 0.0;

    for (&pair, &count) in &descriptor.aligned {
        if count == 0 {
            continue;
        }
        let (l, i, j) = (pair.cluster, pair.first, pair.second);
        let (hi, hj) = (&uplink[l][i], &uplink[l][j]);
        let (gi, gj) = (&downlink[l][i], &downlink[l][j]);
        let avail = shared_dim(d, hi.ncols(), hj.ncols());
        let up = shared_subspace(hi, hj, avail)?.combine(&mixing(&mut rng, avail, count), hi, hj);
        let down = receiver_filters(gi, gj, avail)?.combine(&mixing(&mut rng, avail, count), gi, gj);
        alignment_residual = alignment_residual.max(up.residual);
        filter_residual = filter_residual.max(down.residual);
        for t in 0..count {
            let slot = dir_cols.len();
            dir_cols.push(up.q.column(t).into_owned());
            g_rows.push(down.g.column(t).into_owned());
            let a = streams.len();
            streams.push(StreamInfo {
                message: MessageId::new(l, j, i),
                route: StreamRoute::Aligned { pair, index: t },
                slot,
                beam: up.u.column(t).into_owned(),
                filter: down.filters2.row(t).transpose(),
                partner: Some(a + 1),
            });
            streams.push(StreamInfo {
                message: MessageId::new(l, i, j),
                route: StreamRoute::Aligned { pair, index: t },
                slot,
                beam: up.w.column(t).into_owned(),
                filter: down.filters1.row(t).transpose(),
                partner: Some(a),
            });
        }
        targets.insert(pair, up.q);
    }

    for (&flow, &count) in &descriptor.mac {
        if count == 0 {
            continue;
        }
        let l = flow.cluster;
        let h = &uplink[l][flow.src];
        let g = &downlink[l][flow.dest];
        let tx_existing = existing_vectors(&streams, |s| s.sender() == (l, flow.src), |s| &s.beam, h.ncols());
        let rx_existing = existing_vectors(&streams, |s| s.receiver() == (l, flow.dest), |s| &s.filter, g.nrows());
        let cols = linalg::complete_with_unit_columns(&tx_existing, h.ncols(), count).ok_or_else(|| {
            Error::Plan(format!("no room for {count} more transmit streams at the sender of {flow}"))
        })?;
        let rows = linalg::complete_with_unit_columns(&rx_existing, g.nrows(), count).ok_or_else(|| {
            Error::Plan(format!("no room for {count} more receive streams at the receiver of {flow}"))
        })?;
        for (t, (&c, &r)) in cols.iter().zip(&rows).enumerate() {
            let slot = dir_cols.len();
            dir_cols.push(h.column(c).into_owned());
            g_rows.push(g.row(r).transpose());
            streams.push(StreamInfo {
                message: MessageId::new(l, flow.dest, flow.src),
                route: StreamRoute::Mac { flow, index: t },
                slot,
                beam: unit(h.ncols(), c),
                filter: unit(g.nrows(), r),
                partner: None,
            });
        }
    }

    let directions = columns(d, &dir_cols);
    let effective_downlink = columns(d, &g_rows).transpose();
    let decode_condition = linalg::condition_number(&directions);
    let precode_condition = linalg::condition_number(&effective_downlink);
    for (what, cond) in [
        ("relay direction stack", decode_condition),
        ("effective downlink stack", precode_condition),
    ] {
        if !(cond <= MAX_CONDITION) {
            return Err(Error::IllConditioned {
                what: what.into(),
                cond,
            });
        }
    }
    let relay_decode = linalg::pinv(&directions);
    let relay_precode = linalg::pinv(&effective_downlink);

    Ok(TransmissionScheme {
        config: config.clone(),
        descriptor: descriptor.clone(),
        extension_factor: e,
        relay_dims: d,
        relay_antennas_used: used,
        combiner,
        uplink,
        downlink,
        streams,
        targets,
        directions,
        effective_downlink,
        relay_decode,
        relay_precode,
        alignment_residual,
        filter_residual,
        decode_condition,
        precode_condition,
    })
}

fn existing_vectors(
    streams: &[StreamInfo],
    pick: impl Fn(&StreamInfo) -> bool,
    get: impl Fn(&StreamInfo) -> &CVec,
    dim: usize,
) -> CMat {
    let cols: Vec<CVec> = streams.iter().filter(|s| pick(s)).map(|s| get(s).clone()).collect();
    columns(dim, &cols)
}

/// Outcome of a noiseless round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiselessOutcome {
    pub decoded: Vec<Complex64>,
    /// Largest error over all streams, relative to the largest symbol magnitude.
    pub residual: f64,
    /// Streams whose relative error exceeds the tolerance.
    pub failures: Vec<(usize, f64)>,
}

impl NoiselessOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Unit-modulus symbols with uniformly random phase, one per stream.
pub fn random_symbols(scheme: &TransmissionScheme, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..scheme.streams.len())
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Sends one symbol per stream through uplink, relay and downlink with no
/// noise. Receivers of aligned streams cancel their own symbol from the
/// relayed sum.
pub fn simulate_noiseless(
    scheme: &TransmissionScheme,
    symbols: &[Complex64],
) -> Result<NoiselessOutcome> {
    if symbols.len() != scheme.streams.len() {
        return Err(Error::Shape {
            expected: format!("{} symbols", scheme.streams.len()),
            got: format!("{}", symbols.len()),
        });
    }
    let d = scheme.relay_dims;
    let mut y_relay = CVec::zeros(d);
    for (s, &x) in scheme.streams.iter().zip(symbols) {
        let (l, k) = s.sender();
        y_relay += &scheme.uplink[l][k] * (&s.beam * x);
    }
    let z = &scheme.relay_decode * y_relay;
    let x_relay = &scheme.relay_precode * z;

    let received: Vec<Vec<CVec>> = scheme
        .downlink
        .iter()
        .map(|c| c.iter().map(|g| g * &x_relay).collect())
        .collect();
    let scale = symbols.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut decoded = Vec::with_capacity(symbols.len());
    let mut residual: f64 = 0.0;
    let mut failures = Vec::new();
    for (id, s) in scheme.streams.iter().enumerate() {
        let (l, k) = s.receiver();
        let mut value = s.filter.dot(&received[l][k]);
        if let Some(p) = s.partner {
            value -= symbols[p];
        }
        decoded.push(value);
        let err = (value - symbols[id]).norm() / scale;
        residual = residual.max(err);
        if !(err <= NOISELESS_TOL) {
            failures.push((id, err));
        }
    }
    Ok(NoiselessOutcome {
        decoded,
        residual,
        failures,
    })
}

/// Achievable-rate proxy in bits per channel use at transmit power `power`.
///
/// Every user splits `e * power` evenly over its streams, except that both
/// members of an aligned pair use the common amplitude allowed by the weaker
/// budget so their arrivals still coincide. The relay zero-forces the
/// direction stack, re-encodes each slot at unit power and precodes with the
/// pseudo-inverse scaled to total power `e * power`. Each stream collects
/// half of `log2(1 + SINR)` of its relay slot and half of its downlink SINR;
/// residual misalignment and leakage count as noise.
pub fn sum_rate(scheme: &TransmissionScheme, channels: &ChannelSet, power: f64) -> f64 {
    if scheme.streams.is_empty() || power <= 0.0 {
        return 0.0;
    }
    let e = scheme.extension_factor as f64;
    let (uplink, downlink) = effective_channels(
        channels,
        scheme.relay_dims,
        scheme.extension_factor,
        scheme.combiner.as_ref(),
    );

    let mut per_user: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for s in &scheme.streams {
        *per_user.entry(s.sender()).or_insert(0) += 1;
    }
    let budget = |s: &StreamInfo| e * power / per_user[&s.sender()] as f64;
    let amp: Vec<f64> = scheme
        .streams
        .iter()
        .map(|s| {
            let own = budget(s) / s.beam.norm_squared();
            match s.partner {
                Some(p) => {
                    let o = &scheme.streams[p];
                    own.min(budget(o) / o.beam.norm_squared()).sqrt()
                }
                None => own.sqrt(),
            }
        })
        .collect();

    let n = scheme.streams.len();
    let d = scheme.relay_dims;
    let mut arrivals = CMat::zeros(d, n);
    for (t, s) in scheme.streams.iter().enumerate() {
        let (l, k) = s.sender();
        let col = &uplink[l][k] * &s.beam * Complex64::new(amp[t], 0.0);
        arrivals.set_column(t, &col);
    }
    let t_up = &scheme.relay_decode * &arrivals;
    let slots = scheme.slots();
    let mut sinr_up = vec![0.0; slots];
    for (slot, sinr) in sinr_up.iter_mut().enumerate() {
        let desired: Vec<usize> = (0..n).filter(|&t| scheme.streams[t].slot == slot).collect();
        let signal = desired
            .iter()
            .map(|&t| t_up[(slot, t)].norm_sqr())
            .fold(f64::INFINITY, f64::min);
        let leak: f64 = (0..n)
            .filter(|t| !desired.contains(t))
            .map(|t| t_up[(slot, t)].norm_sqr())
            .sum();
        let mismatch = if desired.len() == 2 {
            (t_up[(slot, desired[0])] - t_up[(slot, desired[1])]).norm_sqr()
        } else {
            0.0
        };
        let noise = scheme.relay_decode.row(slot).norm_squared();
        *sinr = signal / (leak + mismatch + noise);
    }

    let precode_norm = linalg::frobenius(&scheme.relay_precode);
    let gamma = (e * power).sqrt() / precode_norm;
    let mut rate = 0.0;
    for s in &scheme.streams {
        let (l, k) = s.receiver();
        let row = s.filter.transpose() * &downlink[l][k] * &scheme.relay_precode * Complex64::new(gamma, 0.0);
        let signal = row[(0, s.slot)].norm_sqr();
        let leak: f64 = (0..slots).filter(|&j| j != s.slot).map(|j| row[(0, j)].norm_sqr()).sum();
        let sinr_dn = signal / (leak + s.filter.norm_squared());
        rate += 0.5 * (1.0 + sinr_up[s.slot]).log2() + 0.5 * (1.0 + sinr_dn).log2();
    }
    rate / e
}

/// Slope of [`sum_rate`] against `log2(power)` between two powers at least
/// a factor 100 apart.
pub fn estimate_dof_slope(
    scheme: &TransmissionScheme,
    channels: &ChannelSet,
    p_lo: f64,
    p_hi: f64,
) -> Result<f64> {
    if !(p_lo > 0.0 && p_hi >= 100.0 * p_lo) {
        return Err(Error::Precondition(format!(
            "need 0 < P_lo and P_hi >= 100 P_lo, got P_lo={p_lo}, P_hi={p_hi}"
        )));
    }
    let lo = sum_rate(scheme, channels, p_lo);
    let hi = sum_rate(scheme, channels, p_hi);
    Ok((hi - lo) / (p_hi.log2() - p_lo.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dof_catalog::classify;
    use crate::model::sample_channels;

    fn built(clusters: Vec<Vec<usize>>, n: usize, seed: u64) -> (TransmissionScheme, ChannelSet) {
        let c = NetworkConfig::new(clusters, n).unwrap();
        let rep = classify(&c).unwrap();
        let ch = sample_channels(&c, seed).unwrap();
        (build_scheme(&c, rep.strategy.as_ref().unwrap(), &ch).unwrap(), ch)
    }

    #[test]
    fn symmetric_two_by_two_round_trip() {
        let (s, _) = built(vec![vec![3, 3], vec![3, 3]], 4, 5);
        assert_eq!(s.slots(), 4);
        assert_eq!(s.streams.len(), 8);
        assert_eq!(linalg::rank(&s.directions, 1e-9), 4);
        assert!(s.alignment_residual <= 1e-8 && s.filter_residual <= 1e-8);
        let out = simulate_noiseless(&s, &random_symbols(&s, 5)).unwrap();
        assert!(out.passed(), "residual {}", out.residual);
    }

    #[test]
    fn zero_symbols_decode_to_zero() {
        let (s, _) = built(vec![vec![3, 2], vec![2, 2]], 3, 1);
        let zeros = vec![Complex64::new(0.0, 0.0); s.streams.len()];
        let out = simulate_noiseless(&s, &zeros).unwrap();
        assert!(out.decoded.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn over_asking_a_pair_is_a_plan_error() {
        let c = NetworkConfig::new(vec![vec![3, 2], vec![2, 2]], 3).unwrap();
        let mut s = StrategyDescriptor::empty(3, 1);
        s.aligned.insert(PairKey::new(1, 0, 1), 3);
        let ch = sample_channels(&c, 1).unwrap();
        assert!(matches!(build_scheme(&c, &s, &ch), Err(Error::Plan(_))));
    }

    #[test]
    fn rate_grows_with_power() {
        let (s, ch) = built(vec![vec![3, 3], vec![3, 3]], 4, 2);
        let a = sum_rate(&s, &ch, 1e2);
        let b = sum_rate(&s, &ch, 2e2);
        assert!(b > a && a > 0.0);
        assert!(sum_rate(&s, &ch, 1e-12) < 1e-6);
    }

    #[test]
    fn slope_precondition() {
        let (s, ch) = built(vec![vec![3, 3], vec![3, 3]], 4, 2);
        assert!(matches!(
            estimate_dof_slope(&s, &ch, 1e4, 1e5),
            Err(Error::Precondition(_))
        ));
        let slope = estimate_dof_slope(&s, &ch, 1e4, 1e6).unwrap();
        assert!((7.2..=8.8).contains(&slope), "slope {slope}");
    }

    #[test]
    fn empty_scheme_has_zero_slope() {
        let c = NetworkConfig::new(vec![vec![2, 2]], 2).unwrap();
        let ch = sample_channels(&c, 3).unwrap();
        let s = build_scheme(&c, &StrategyDescriptor::empty(2, 1), &ch).unwrap();
        assert_eq!(estimate_dof_slope(&s, &ch, 1e4, 1e6).unwrap(), 0.0);
    }
}
