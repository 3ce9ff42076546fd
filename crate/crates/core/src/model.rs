//! System configuration, parametric multipath channels, and the statistical
//! CSI error model.
//!
//! Channels follow a path-based model: each link is a sum of a small number
//! of planar wavefronts with i.i.d. standard complex normal gains, scaled by
//! a distance-dependent path loss. The base station carries a half-wavelength
//! uniform linear array, the surface a square uniform planar array.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{C64, CMatrix, CVector};

/// Full parameter set for one experiment.
///
/// Dimensions use the usual downlink conventions: `bs_antennas` transmit
/// antennas serve `users` single-antenna receivers with the help of a surface
/// carrying `mis_elements` reflective elements. The first `bs_served` users
/// receive symbols precoded at the base station; the remaining
/// `users - bs_served` receive symbols modulated onto the reflected carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of BS antennas (N).
    pub bs_antennas: usize,
    /// Number of MIS reflective elements (K); must be a perfect square.
    pub mis_elements: usize,
    /// Total number of users (M).
    pub users: usize,
    /// Number of BS-served users (B); the rest are MIS-served.
    pub bs_served: usize,
    /// Transmit block length in symbols (L).
    pub block_len: usize,
    /// Total transmit power in dBm.
    pub power_dbm: f64,
    /// Receiver noise variance in dBm.
    pub noise_dbm: f64,
    /// Multipath components in the BS-MIS link.
    pub paths_mis: usize,
    /// Multipath components in each BS-user link.
    pub paths_bs_user: usize,
    /// Multipath components in each MIS-user link.
    pub paths_mis_user: usize,
    /// BS-MIS distance in meters.
    pub dist_mis: f64,
    /// User-BS distance in meters (shared by all users).
    pub dist_user_bs: f64,
    /// User-MIS distance range in meters; each user draws uniformly from it.
    pub dist_user_mis: [f64; 2],
    /// Path-loss exponent for the BS-MIS and MIS-user links.
    pub exponent_mis: f64,
    /// Path-loss exponent for the BS-user link.
    pub exponent_bs_user: f64,
    /// Path loss at the reference distance, in dB.
    pub ref_loss_db: f64,
    /// Reference distance in meters.
    pub ref_dist: f64,
    /// CSI accuracy in [0, 1]; 1 means perfect CSI.
    pub kappa: f64,
    /// Relative stopping tolerance of the outer optimization loop.
    pub eps: f64,
    /// Maximum number of outer iterations.
    pub max_iters: usize,
    /// Initial prior precision for the VAMP message.
    pub gamma0: f64,
    /// Master seed.
    pub seed: u64,
}

impl Default for SimConfig {
    /// Desk-scale defaults: small enough for CI, propagation parameters as in
    /// the standard urban setup (500 m links, -30 dB reference loss,
    /// exponents 2.5 and 3.7, -100 dBm noise).
    fn default() -> Self {
        Self {
            bs_antennas: 8,
            mis_elements: 36,
            users: 4,
            bs_served: 2,
            block_len: 8,
            power_dbm: 20.0,
            noise_dbm: -100.0,
            paths_mis: 10,
            paths_bs_user: 2,
            paths_mis_user: 2,
            dist_mis: 500.0,
            dist_user_bs: 500.0,
            dist_user_mis: [10.0, 50.0],
            exponent_mis: 2.5,
            exponent_bs_user: 3.7,
            ref_loss_db: -30.0,
            ref_dist: 1.0,
            kappa: 1.0,
            eps: 1e-4,
            max_iters: 200,
            gamma0: 1.0,
            seed: 1,
        }
    }
}

impl SimConfig {
    /// Number of MIS-served users (R = M - B).
    pub fn mis_served(&self) -> usize {
        self.users - self.bs_served
    }

    /// Total transmit power in linear milliwatt units.
    pub fn power_lin(&self) -> f64 {
        dbm_to_mw(self.power_dbm)
    }

    /// Noise variance in linear milliwatt units.
    pub fn noise_var(&self) -> f64 {
        dbm_to_mw(self.noise_dbm)
    }

    /// Checks every invariant, returning a field-level message on failure.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.bs_antennas == 0 {
            return fail("N must be at least 1");
        }
        if self.mis_elements == 0 || !is_perfect_square(self.mis_elements) {
            return fail("K must be a perfect square");
        }
        if self.users == 0 {
            return fail("M must be at least 1");
        }
        if self.bs_served > self.users {
            return fail("B must not exceed M");
        }
        if self.bs_served > self.bs_antennas {
            return fail("B must not exceed N");
        }
        if self.block_len == 0 {
            return fail("L must be at least 1");
        }
        if self.paths_mis == 0 || self.paths_bs_user == 0 || self.paths_mis_user == 0 {
            return fail("path counts must be at least 1");
        }
        if !(self.ref_dist > 0.0) {
            return fail("d0 must be positive");
        }
        if self.dist_mis < self.ref_dist || self.dist_user_bs < self.ref_dist {
            return fail("link distances must be at least d0");
        }
        if self.dist_user_mis[0] < self.ref_dist || self.dist_user_mis[0] > self.dist_user_mis[1] {
            return fail("d_prime_range must satisfy d0 <= min <= max");
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return fail("kappa must lie in [0, 1]");
        }
        if !(self.eps > 0.0) {
            return fail("eps must be positive");
        }
        if !(self.gamma0 >= 0.0) {
            return fail("gamma0 must be nonnegative");
        }
        Ok(())
    }
}

/// dBm to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

fn is_perfect_square(k: usize) -> bool {
    let s = (k as f64).sqrt().round() as usize;
    s * s == k
}

/// The three channel matrices of one realization.
///
/// Column ordering of the user matrices is BS-served users first, then
/// MIS-served users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// BS-MIS channel, `mis_elements x bs_antennas`.
    pub mis_bs: CMatrix,
    /// BS-user channels, `bs_antennas x users`.
    pub bs_user: CMatrix,
    /// MIS-user channels, `mis_elements x users`.
    pub mis_user: CMatrix,
    /// Number of BS-served users (leading columns).
    pub bs_served: usize,
    /// Number of MIS-served users (trailing columns).
    pub mis_served: usize,
}

/// Per-path draws behind one channel realization, retained so the CSI error
/// model can reuse the per-user distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRealization {
    /// Path gains of the BS-MIS link.
    pub mis_bs_gains: Vec<C64>,
    /// BS-side azimuths of the BS-MIS paths.
    pub mis_bs_bs_azimuths: Vec<f64>,
    /// MIS-side (azimuth, elevation) pairs of the BS-MIS paths.
    pub mis_bs_mis_angles: Vec<(f64, f64)>,
    /// Per-user path gains of the BS-user links.
    pub bs_user_gains: Vec<Vec<C64>>,
    /// Per-user azimuths of the BS-user links.
    pub bs_user_azimuths: Vec<Vec<f64>>,
    /// Per-user path gains of the MIS-user links.
    pub mis_user_gains: Vec<Vec<C64>>,
    /// Per-user (azimuth, elevation) pairs of the MIS-user links.
    pub mis_user_angles: Vec<Vec<(f64, f64)>>,
    /// User-BS distances d_m.
    pub user_bs_dists: Vec<f64>,
    /// User-MIS distances d'_m.
    pub user_mis_dists: Vec<f64>,
}

/// Distance-dependent path loss as a linear power gain:
/// `10^(C0_db/10) * (dist/d0)^(-eta)`.
pub fn path_loss(dist: f64, exponent: f64, ref_loss_db: f64, ref_dist: f64) -> Result<f64> {
    if !(dist > 0.0) || !(ref_dist > 0.0) {
        return Err(Error::Domain(format!(
            "path loss requires positive distances, got dist={dist}, d0={ref_dist}"
        )));
    }
    Ok(dbm_to_mw(ref_loss_db) * (dist / ref_dist).powf(-exponent))
}

/// Steering vector of a half-wavelength uniform linear array: element `n`
/// equals `exp(j*pi*n*sin(phi))`.
pub fn steering_bs(phi: f64, n: usize) -> CVector {
    let phase = PI * phi.sin();
    CVector::from_fn(n, |i, _| C64::cis(phase * i as f64))
}

/// Steering vector of a square uniform planar array with `k` elements,
/// written as the Kronecker product of a vertical and a horizontal
/// half-wavelength ULA response: horizontal phase `pi*sin(phi)*cos(psi)`,
/// vertical phase `pi*sin(psi)`.
pub fn steering_mis(phi: f64, psi: f64, k: usize) -> Result<CVector> {
    if k == 0 || !is_perfect_square(k) {
        return Err(Error::Config("K must be a perfect square".to_string()));
    }
    let side = (k as f64).sqrt().round() as usize;
    let horizontal = PI * phi.sin() * psi.cos();
    let vertical = PI * psi.sin();
    Ok(CVector::from_fn(k, |i, _| {
        let row = i / side;
        let col = i % side;
        C64::cis(vertical * row as f64 + horizontal * col as f64)
    }))
}

/// One draw of a standard circularly-symmetric complex normal (unit variance).
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn uniform_azimuth(rng: &mut impl Rng) -> f64 {
    rng.random_range(-FRAC_PI_2..FRAC_PI_2)
}

/// Sum of per-path rank-one terms `scale_sqrt * sum_q c_q * left_q * right_q^T`.
fn assemble_link(scale_sqrt: f64, gains: &[C64], left: &[CVector], right: &[CVector]) -> CMatrix {
    let mut out = CMatrix::zeros(left[0].nrows(), right[0].nrows());
    for ((c, a), b) in gains.iter().zip(left).zip(right) {
        out += (a * b.transpose()) * (c * scale_sqrt);
    }
    out
}

fn assemble_vector(scale_sqrt: f64, gains: &[C64], steer: &[CVector]) -> CVector {
    let mut out = CVector::zeros(steer[0].nrows());
    for (c, a) in gains.iter().zip(steer) {
        out += a * (c * scale_sqrt);
    }
    out
}

/// Draws one channel realization. Deterministic given the RNG state.
pub fn generate_channels(
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<(ChannelSet, PathRealization)> {
    cfg.validate()?;
    let k = cfg.mis_elements;
    let n = cfg.bs_antennas;
    let m = cfg.users;

    // BS-MIS link.
    let mut mis_bs_gains = Vec::with_capacity(cfg.paths_mis);
    let mut mis_bs_bs_azimuths = Vec::with_capacity(cfg.paths_mis);
    let mut mis_bs_mis_angles = Vec::with_capacity(cfg.paths_mis);
    let mut mis_steer = Vec::with_capacity(cfg.paths_mis);
    let mut bs_steer = Vec::with_capacity(cfg.paths_mis);
    for _ in 0..cfg.paths_mis {
        let c = complex_gaussian(rng);
        let bs_phi = uniform_azimuth(rng);
        let mis_phi = uniform_azimuth(rng);
        let mis_psi = uniform_azimuth(rng);
        mis_bs_gains.push(c);
        mis_bs_bs_azimuths.push(bs_phi);
        mis_bs_mis_angles.push((mis_phi, mis_psi));
        mis_steer.push(steering_mis(mis_phi, mis_psi, k)?);
        bs_steer.push(steering_bs(bs_phi, n));
    }
    let loss_mis = path_loss(cfg.dist_mis, cfg.exponent_mis, cfg.ref_loss_db, cfg.ref_dist)?;
    let mis_bs = assemble_link(loss_mis.sqrt(), &mis_bs_gains, &mis_steer, &bs_steer);

    // Per-user distances.
    let user_bs_dists = vec![cfg.dist_user_bs; m];
    let [d_lo, d_hi] = cfg.dist_user_mis;
    let user_mis_dists: Vec<f64> = (0..m)
        .map(|_| {
            if d_lo == d_hi {
                d_lo
            } else {
                rng.random_range(d_lo..d_hi)
            }
        })
        .collect();

    // MIS-user links.
    let mut mis_user = CMatrix::zeros(k, m);
    let mut mis_user_gains = Vec::with_capacity(m);
    let mut mis_user_angles = Vec::with_capacity(m);
    for u in 0..m {
        let mut gains = Vec::with_capacity(cfg.paths_mis_user);
        let mut angles = Vec::with_capacity(cfg.paths_mis_user);
        let mut steer = Vec::with_capacity(cfg.paths_mis_user);
        for _ in 0..cfg.paths_mis_user {
            gains.push(complex_gaussian(rng));
            let phi = uniform_azimuth(rng);
            let psi = uniform_azimuth(rng);
            angles.push((phi, psi));
            steer.push(steering_mis(phi, psi, k)?);
        }
        let loss = path_loss(user_mis_dists[u], cfg.exponent_mis, cfg.ref_loss_db, cfg.ref_dist)?;
        mis_user.set_column(u, &assemble_vector(loss.sqrt(), &gains, &steer));
        mis_user_gains.push(gains);
        mis_user_angles.push(angles);
    }

    // BS-user links.
    let mut bs_user = CMatrix::zeros(n, m);
    let mut bs_user_gains = Vec::with_capacity(m);
    let mut bs_user_azimuths = Vec::with_capacity(m);
    for u in 0..m {
        let mut gains = Vec::with_capacity(cfg.paths_bs_user);
        let mut azimuths = Vec::with_capacity(cfg.paths_bs_user);
        let mut steer = Vec::with_capacity(cfg.paths_bs_user);
        for _ in 0..cfg.paths_bs_user {
            gains.push(complex_gaussian(rng));
            let phi = uniform_azimuth(rng);
            azimuths.push(phi);
            steer.push(steering_bs(phi, n));
        }
        let loss = path_loss(
            user_bs_dists[u],
            cfg.exponent_bs_user,
            cfg.ref_loss_db,
            cfg.ref_dist,
        )?;
        bs_user.set_column(u, &assemble_vector(loss.sqrt(), &gains, &steer));
        bs_user_gains.push(gains);
        bs_user_azimuths.push(azimuths);
    }

    let channels = ChannelSet {
        mis_bs,
        bs_user,
        mis_user,
        bs_served: cfg.bs_served,
        mis_served: cfg.mis_served(),
    };
    let paths = PathRealization {
        mis_bs_gains,
        mis_bs_bs_azimuths,
        mis_bs_mis_angles,
        bs_user_gains,
        bs_user_azimuths,
        mis_user_gains,
        mis_user_angles,
        user_bs_dists,
        user_mis_dists,
    };
    Ok((channels, paths))
}

/// Statistical CSI error model: each channel becomes
/// `kappa * H + sqrt((1 - kappa^2) * L(dist)) * Delta` with i.i.d. standard
/// complex normal perturbations. `kappa = 1` is the identity map.
pub fn apply_csi_error(
    channels: &ChannelSet,
    cfg: &SimConfig,
    paths: &PathRealization,
    rng: &mut impl Rng,
) -> Result<ChannelSet> {
    if !(0.0..=1.0).contains(&cfg.kappa) {
        return Err(Error::Config("kappa must lie in [0, 1]".to_string()));
    }
    if cfg.kappa == 1.0 {
        return Ok(channels.clone());
    }
    let kappa = C64::from(cfg.kappa);
    let spread = 1.0 - cfg.kappa * cfg.kappa;

    let loss_mis = path_loss(cfg.dist_mis, cfg.exponent_mis, cfg.ref_loss_db, cfg.ref_dist)?;
    let scale = (spread * loss_mis).sqrt();
    let mut mis_bs = channels.mis_bs.map(|h| h * kappa);
    for e in mis_bs.iter_mut() {
        *e += complex_gaussian(rng) * scale;
    }

    let mut bs_user = channels.bs_user.map(|h| h * kappa);
    for u in 0..channels.bs_user.ncols() {
        let loss = path_loss(
            paths.user_bs_dists[u],
            cfg.exponent_bs_user,
            cfg.ref_loss_db,
            cfg.ref_dist,
        )?;
        let scale = (spread * loss).sqrt();
        for e in bs_user.column_mut(u).iter_mut() {
            *e += complex_gaussian(rng) * scale;
        }
    }

    let mut mis_user = channels.mis_user.map(|h| h * kappa);
    for u in 0..channels.mis_user.ncols() {
        let loss = path_loss(
            paths.user_mis_dists[u],
            cfg.exponent_mis,
            cfg.ref_loss_db,
            cfg.ref_dist,
        )?;
        let scale = (spread * loss).sqrt();
        for e in mis_user.column_mut(u).iter_mut() {
            *e += complex_gaussian(rng) * scale;
        }
    }

    Ok(ChannelSet {
        mis_bs,
        bs_user,
        mis_user,
        bs_served: channels.bs_served,
        mis_served: channels.mis_served,
    })
}
