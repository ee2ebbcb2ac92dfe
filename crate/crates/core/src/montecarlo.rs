//! Monte Carlo checks of the worst-case input.
//!
//! Replicas are independent ChaCha8 streams keyed by `(seed, replica,
//! stream)` and run concurrently; every reduction walks replicas in index
//! order, so results do not depend on scheduling.
//!
//! After burn-in each replica is cut into consecutive batches. Intervals
//! are normal approximations over the batch means of all replicas, which
//! gives a far steadier spread estimate than a handful of replica means.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::aninorm::{AnisotropicNormSolution, WorstCaseFilter};
use crate::bilinear::{self, TimeScale};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::statespace::{CtStateSpace, DtStateSpace};

const Z95: f64 = 1.959_963_984_540_054;
/// Relative half-width above which an interval is reported as wide.
pub const WIDE_INTERVAL: f64 = 0.05;

/// Batches per replica for the interval estimates.
pub const BATCHES_PER_REPLICA: usize = 10;

const DT_STREAM: u64 = 0;
const CT_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Steps per replica, burn-in included.
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Euler–Maruyama step in seconds.
    pub em_dt: f64,
    pub replicas: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { steps: 1_000_000, burn_in: 10_000, seed: 0, em_dt: 1e-3, replicas: 8 }
    }
}

impl SimConfig {
    /// Default configuration with `steps` per replica; the burn-in is
    /// capped at a tenth of the run.
    pub fn with_steps(steps: usize) -> Self {
        let d = Self::default();
        Self { steps, burn_in: d.burn_in.min(steps / 10), ..d }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.replicas == 0 {
            return Err(Error::InvalidConfig("steps and replicas must be positive".into()));
        }
        if self.burn_in >= self.steps {
            return Err(Error::InvalidConfig(format!("burn-in {} must be below steps {}", self.burn_in, self.steps)));
        }
        if !(self.em_dt.is_finite() && self.em_dt > 0.0) {
            return Err(Error::InvalidConfig(format!("em_dt must be positive, got {}", self.em_dt)));
        }
        Ok(())
    }
}

/// Mean over batches with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let r = xs.len() as f64;
        let value = xs.iter().sum::<f64>() / r;
        if xs.len() < 2 {
            return Self { value, half_width: f64::INFINITY };
        }
        let var = xs.iter().map(|x| (x - value).powi(2)).sum::<f64>() / (r - 1.0);
        Self { value, half_width: Z95 * (var / r).sqrt() }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.half_width
    }
}

/// Time averages over one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub var_input: f64,
    pub var_output: f64,
    pub state_cov: Mat,
    pub innov_cov: Mat,
    /// `E[w_k w_{k+1}ᵀ]`
    pub autocov_lag1: Mat,
}

impl BatchStats {
    pub fn gain(&self) -> f64 {
        if self.var_input > 0.0 {
            (self.var_output / self.var_input).sqrt()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub var_input: Estimate,
    pub var_output: Estimate,
    pub empirical_gain: Estimate,
    pub state_cov: Mat,
    pub state_cov_half_width: Mat,
    pub innov_cov: Mat,
    pub innov_cov_half_width: Mat,
    pub autocov_lag1: Mat,
    pub autocov_lag1_half_width: Mat,
    /// Batch averages, replica-major.
    pub batches: Vec<BatchStats>,
}

fn matrix_estimate(mats: Vec<&Mat>) -> (Mat, Mat) {
    let (r, c) = mats[0].shape();
    let mut mean = Mat::zeros(r, c);
    let mut hw = Mat::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let xs: Vec<f64> = mats.iter().map(|m| m[(i, j)]).collect();
            let e = Estimate::from_samples(&xs);
            mean[(i, j)] = e.value;
            hw[(i, j)] = e.half_width;
        }
    }
    (mean, hw)
}

/// `sqrt(mean var_output / mean var_input)` with a delta-method interval.
fn ratio_estimate(batches: &[BatchStats]) -> Estimate {
    let k = batches.len() as f64;
    let x = batches.iter().map(|b| b.var_input).sum::<f64>() / k;
    let y = batches.iter().map(|b| b.var_output).sum::<f64>() / k;
    if !(x > 0.0) || y == 0.0 {
        return Estimate { value: 0.0, half_width: 0.0 };
    }
    let ratio = y / x;
    let gain = ratio.sqrt();
    let linear: Vec<f64> = batches.iter().map(|b| (b.var_output - ratio * b.var_input) / (2.0 * gain * x)).collect();
    Estimate { value: gain, half_width: Estimate::from_samples(&linear).half_width }
}

impl SimStats {
    fn collect(replicas: Vec<Vec<BatchStats>>) -> Self {
        let replicas: Vec<BatchStats> = replicas.into_iter().flatten().collect();
        let pick = |f: fn(&BatchStats) -> f64| Estimate::from_samples(&replicas.iter().map(f).collect::<Vec<_>>());
        let var_input = pick(|r| r.var_input);
        let var_output = pick(|r| r.var_output);
        let empirical_gain = ratio_estimate(&replicas);
        let (state_cov, state_cov_half_width) = matrix_estimate(replicas.iter().map(|r| &r.state_cov).collect());
        let (innov_cov, innov_cov_half_width) = matrix_estimate(replicas.iter().map(|r| &r.innov_cov).collect());
        let (autocov_lag1, autocov_lag1_half_width) = matrix_estimate(replicas.iter().map(|r| &r.autocov_lag1).collect());
        Self {
            var_input,
            var_output,
            empirical_gain,
            state_cov,
            state_cov_half_width,
            innov_cov,
            innov_cov_half_width,
            autocov_lag1,
            autocov_lag1_half_width,
            batches: replicas,
        }
    }
}

/// Row-major dense matrix for the inner loops.
struct Flat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Flat {
    fn new(m: &Mat) -> Self {
        let (rows, cols) = m.shape();
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| m[(i, j)])).collect();
        Self { rows, cols, data }
    }

    /// `out = scale·(self · x) + out`
    fn mul_add(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let s: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            out[i] += scale * s;
        }
    }
}

/// Accumulates `Σ x yᵀ` into a row-major buffer.
fn outer_add(acc: &mut [f64], x: &[f64], y: &[f64]) {
    let c = y.len();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            acc[i * c + j] += xi * yj;
        }
    }
}

fn to_mat(rows: usize, cols: usize, data: &[f64], scale: f64) -> Mat {
    Mat::from_row_slice(rows, cols, data) * scale
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Running sums for one batch.
struct Accumulator {
    n: usize,
    m: usize,
    count: usize,
    lag_count: usize,
    s_in: f64,
    s_out: f64,
    s_x: Vec<f64>,
    s_e: Vec<f64>,
    s_lag: Vec<f64>,
}

impl Accumulator {
    fn new(n: usize, m: usize) -> Self {
        Self { n, m, count: 0, lag_count: 0, s_in: 0.0, s_out: 0.0, s_x: vec![0.0; n * n], s_e: vec![0.0; m * m], s_lag: vec![0.0; m * m] }
    }

    fn add(&mut self, w: &[f64], z: &[f64], x: &[f64], e: &[f64], w_prev: Option<&[f64]>) {
        self.count += 1;
        self.s_in += sq(w);
        self.s_out += sq(z);
        outer_add(&mut self.s_x, x, x);
        outer_add(&mut self.s_e, e, e);
        if let Some(prev) = w_prev {
            self.lag_count += 1;
            outer_add(&mut self.s_lag, prev, w);
        }
    }

    /// Averages; `innov_scale` divides the innovation second moment.
    fn finish(&self, innov_scale: f64) -> BatchStats {
        let k = self.count.max(1) as f64;
        let (n, m) = (self.n, self.m);
        BatchStats {
            var_input: self.s_in / k,
            var_output: self.s_out / k,
            state_cov: to_mat(n, n, &self.s_x, 1.0 / k),
            innov_cov: to_mat(m, m, &self.s_e, 1.0 / (k * innov_scale)),
            autocov_lag1: to_mat(m, m, &self.s_lag, 1.0 / self.lag_count.max(1) as f64),
        }
    }
}

/// Step index at which batch `b` ends.
fn batch_end(cfg: &SimConfig, b: usize) -> usize {
    let k = cfg.steps - cfg.burn_in;
    let batches = BATCHES_PER_REPLICA.min(k);
    cfg.burn_in + (b + 1) * k / batches
}

fn rng_for(seed: u64, replica: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64 * 2 + stream);
    rng
}

fn check_filter(filter: &WorstCaseFilter, n: usize, m: usize) -> Result<()> {
    if filter.dt_closed_loop.shape() != (n, n) || filter.dt_l.shape() != (m, n) || filter.dt_m.shape() != (m, m) {
        return Err(Error::DimensionMismatch("filter does not match the system".into()));
    }
    Ok(())
}

/// Exact simulation of `x_{k+1} = A_T x_k + B_T w_k`, `ζ_k = C_T x_k + D_T w_k`
/// driven either by white noise `w = υ` or by the worst-case input
/// `w_k = L_T x_k + M_T υ_k`.
pub fn simulate_dt(sys: &DtStateSpace, filter: Option<&WorstCaseFilter>, cfg: &SimConfig) -> Result<SimStats> {
    cfg.validate()?;
    let (n, m, p) = (sys.n(), sys.m(), sys.p());
    let radius = sys.spectral_radius();
    if radius >= 1.0 {
        return Err(Error::UnstableSystem { radius });
    }
    if let Some(f) = filter {
        check_filter(f, n, m)?;
        let radius = linalg::spectral_radius(&f.dt_closed_loop);
        if radius >= 1.0 {
            return Err(Error::UnstableSystem { radius });
        }
    }
    let a = Flat::new(sys.a());
    let b = Flat::new(sys.b());
    let c = Flat::new(sys.c());
    let d = Flat::new(sys.d());
    let l = filter.map(|f| Flat::new(&f.dt_l));
    let mm = filter.map(|f| Flat::new(&f.dt_m));

    let replicas = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(cfg.seed, r, DT_STREAM);
            let mut x = vec![0.0; n];
            let mut x_next = vec![0.0; n];
            let mut ups = vec![0.0; m];
            let mut w = vec![0.0; m];
            let mut innov = vec![0.0; m];
            let mut w_prev = vec![0.0; m];
            let mut z = vec![0.0; p];
            let mut batches = Vec::with_capacity(BATCHES_PER_REPLICA);
            let mut acc = Accumulator::new(n, m);
            let mut end = batch_end(cfg, 0);
            for k in 0..cfg.steps {
                for u in ups.iter_mut() {
                    *u = StandardNormal.sample(&mut rng);
                }
                match (&l, &mm) {
                    (Some(l), Some(mm)) => {
                        innov.iter_mut().for_each(|v| *v = 0.0);
                        mm.mul_add(&ups, 1.0, &mut innov);
                        w.copy_from_slice(&innov);
                        l.mul_add(&x, 1.0, &mut w);
                    }
                    _ => {
                        innov.copy_from_slice(&ups);
                        w.copy_from_slice(&ups);
                    }
                }
                z.iter_mut().for_each(|v| *v = 0.0);
                c.mul_add(&x, 1.0, &mut z);
                d.mul_add(&w, 1.0, &mut z);
                if k >= cfg.burn_in {
                    acc.add(&w, &z, &x, &innov, (k > cfg.burn_in).then_some(&w_prev[..]));
                    if k + 1 == end {
                        batches.push(acc.finish(1.0));
                        acc = Accumulator::new(n, m);
                        end = batch_end(cfg, batches.len());
                    }
                }
                w_prev.copy_from_slice(&w);
                x_next.iter_mut().for_each(|v| *v = 0.0);
                a.mul_add(&x, 1.0, &mut x_next);
                b.mul_add(&w, 1.0, &mut x_next);
                std::mem::swap(&mut x, &mut x_next);
            }
            batches
        })
        .collect::<Vec<_>>();
    Ok(SimStats::collect(replicas))
}

/// Euler–Maruyama simulation of the continuous system and the OU low-pass
/// filters `dW_T = −Ω W_T dt + √(2Ω) dW`, `dZ_T = −Ω Z_T dt + √(2Ω) dZ`.
///
/// Reported variances are those of `W_T` and `Z_T`; `state_cov` is the
/// covariance of `X`, `innov_cov` estimates the diffusion `ct_M ct_Mᵀ` of
/// `W` and `autocov_lag1` is `E[W_T(t) W_T(t + em_dt)ᵀ]`.
pub fn simulate_ct_em(sys: &CtStateSpace, ts: TimeScale, filter: Option<&WorstCaseFilter>, cfg: &SimConfig) -> Result<SimStats> {
    cfg.validate()?;
    let (n, m, p) = (sys.n(), sys.m(), sys.p());
    let omega = ts.omega();
    let h = cfg.em_dt;
    if h * omega > 0.1 {
        return Err(Error::StepTooLarge { em_dt: h, reason: format!("em_dt * Omega = {} exceeds 0.1", h * omega) });
    }
    let drift = match filter {
        Some(f) => {
            check_filter(f, n, m)?;
            f.ct_closed_loop.clone()
        }
        None => sys.a().clone(),
    };
    let abscissa = linalg::spectral_abscissa(&drift);
    if abscissa >= 0.0 {
        return Err(Error::UnstableSystem { radius: abscissa.exp() });
    }
    let em_radius = linalg::spectral_radius(&(Mat::identity(n, n) + &drift * h));
    if em_radius >= 1.0 {
        return Err(Error::StepTooLarge { em_dt: h, reason: format!("Euler-Maruyama map has spectral radius {em_radius}") });
    }
    let a = Flat::new(sys.a());
    let b = Flat::new(sys.b());
    let c = Flat::new(sys.c());
    let d = Flat::new(sys.d());
    let l = filter.map(|f| Flat::new(&f.ct_l));
    let mm = filter.map(|f| Flat::new(&f.ct_m));
    let sqrt_h = h.sqrt();
    let lp = (2.0 * omega).sqrt();

    let replicas = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(cfg.seed, r, CT_STREAM);
            let mut x = vec![0.0; n];
            let mut dx = vec![0.0; n];
            let mut dv = vec![0.0; m];
            let mut dw = vec![0.0; m];
            let mut diff = vec![0.0; m];
            let mut dz = vec![0.0; p];
            let mut wt = vec![0.0; m];
            let mut wt_prev = vec![0.0; m];
            let mut zt = vec![0.0; p];
            let mut batches = Vec::with_capacity(BATCHES_PER_REPLICA);
            let mut acc = Accumulator::new(n, m);
            let mut end = batch_end(cfg, 0);
            for k in 0..cfg.steps {
                for v in dv.iter_mut() {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *v = sqrt_h * g;
                }
                match (&l, &mm) {
                    (Some(l), Some(mm)) => {
                        diff.iter_mut().for_each(|v| *v = 0.0);
                        mm.mul_add(&dv, 1.0, &mut diff);
                        dw.copy_from_slice(&diff);
                        l.mul_add(&x, h, &mut dw);
                    }
                    _ => {
                        diff.copy_from_slice(&dv);
                        dw.copy_from_slice(&dv);
                    }
                }
                dz.iter_mut().for_each(|v| *v = 0.0);
                c.mul_add(&x, h, &mut dz);
                d.mul_add(&dw, 1.0, &mut dz);
                dx.iter_mut().for_each(|v| *v = 0.0);
                a.mul_add(&x, h, &mut dx);
                b.mul_add(&dw, 1.0, &mut dx);
                if k >= cfg.burn_in {
                    acc.add(&wt, &zt, &x, &diff, (k > cfg.burn_in).then_some(&wt_prev[..]));
                    if k + 1 == end {
                        batches.push(acc.finish(h));
                        acc = Accumulator::new(n, m);
                        end = batch_end(cfg, batches.len());
                    }
                }
                wt_prev.copy_from_slice(&wt);
                for i in 0..n {
                    x[i] += dx[i];
                }
                for i in 0..m {
                    wt[i] += -omega * wt[i] * h + lp * dw[i];
                }
                for i in 0..p {
                    zt[i] += -omega * zt[i] * h + lp * dz[i];
                }
            }
            batches
        })
        .collect::<Vec<_>>();
    Ok(SimStats::collect(replicas))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Observed deviation from the predicted value.
    pub deviation: f64,
    /// 95% bound the deviation is compared with.
    pub bound: f64,
    pub passed: bool,
    pub wide_interval: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub stats: SimStats,
    pub isometry: Estimate,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn wide_interval(&self) -> bool {
        self.checks.iter().any(|c| c.wide_interval)
    }
}

fn matrix_check(name: &'static str, estimate: &Mat, half_width: &Mat, expected: &Mat) -> Check {
    let deviation = linalg::fro(&(estimate - expected));
    // Half-widths are 1.96 standard errors; combine them in quadrature.
    let bound = half_width.iter().map(|h| h * h).sum::<f64>().sqrt();
    let scale = linalg::fro(expected).max(1e-300);
    Check { name, deviation, bound, passed: deviation <= bound, wide_interval: bound > WIDE_INTERVAL * scale }
}

/// Simulates the discrete worst case and compares the sample moments with
/// the solution: (i) the gain, (ii) `E|ϖ|² − q E|ζ|² = m`, (iii) the state
/// covariance `P_T` and (iv) the innovation covariance `M_T²`.
pub fn validate_solution(
    sys: &CtStateSpace,
    ts: TimeScale,
    sol: &AnisotropicNormSolution,
    wc: &WorstCaseFilter,
    cfg: &SimConfig,
) -> Result<ValidationReport> {
    let dt = bilinear::to_discrete(sys, ts)?;
    let stats = simulate_dt(&dt, Some(wc), cfg)?;
    let m = dt.m() as f64;
    let iso: Vec<f64> = stats.batches.iter().map(|r| r.var_input - sol.q * r.var_output - m).collect();
    let isometry = Estimate::from_samples(&iso);

    let g = stats.empirical_gain;
    let gain_dev = (g.value - sol.norm_value).abs();
    let mut checks = vec![
        Check {
            name: "gain",
            deviation: gain_dev,
            bound: g.half_width,
            passed: gain_dev <= g.half_width,
            wide_interval: g.half_width > WIDE_INTERVAL * sol.norm_value,
        },
        Check {
            name: "isometry",
            deviation: isometry.value.abs(),
            bound: isometry.half_width,
            passed: isometry.value.abs() <= isometry.half_width,
            wide_interval: isometry.half_width > WIDE_INTERVAL * m,
        },
    ];
    checks.push(matrix_check("state_covariance", &stats.state_cov, &stats.state_cov_half_width, &sol.p_t));
    let m2 = &sol.m_t * &sol.m_t;
    checks.push(matrix_check("innovation_covariance", &stats.innov_cov, &stats.innov_cov_half_width, &m2));
    Ok(ValidationReport { checks, stats, isometry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aninorm;
    use crate::statespace::mat;

    fn scalar_ct() -> CtStateSpace {
        CtStateSpace::new(mat(1, 1, &[-1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0])).unwrap()
    }

    fn one() -> TimeScale {
        TimeScale::new(1.0).unwrap()
    }

    #[test]
    fn config_rules() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig { burn_in: 10, steps: 10, ..Default::default() }.validate().is_err());
        assert!(SimConfig { replicas: 0, ..Default::default() }.validate().is_err());
        assert!(SimConfig::with_steps(100).validate().is_ok());
    }

    #[test]
    fn estimate_interval() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(e.value, 2.0);
        assert!((e.half_width - Z95 / 3f64.sqrt()).abs() < 1e-15);
        assert!(Estimate::from_samples(&[1.0]).half_width.is_infinite());
    }

    #[test]
    fn white_scalar_gain() {
        let dt = bilinear::to_discrete(&scalar_ct(), one()).unwrap();
        let s = simulate_dt(&dt, None, &SimConfig::with_steps(200_000)).unwrap();
        assert!(s.empirical_gain.contains(0.5f64.sqrt()) || (s.empirical_gain.value - 0.5f64.sqrt()).abs() < 0.01);
        assert!(s.empirical_gain.half_width < 0.02);
    }

    #[test]
    fn reproducible_for_a_seed() {
        let dt = bilinear::to_discrete(&scalar_ct(), one()).unwrap();
        let cfg = SimConfig { seed: 42, ..SimConfig::with_steps(5_000) };
        let a = simulate_dt(&dt, None, &cfg).unwrap();
        let b = simulate_dt(&dt, None, &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_dt(&dt, None, &SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.var_output, c.var_output);
    }

    #[test]
    fn zero_input_gain_gives_zero_output() {
        let sol = aninorm::anisotropic_norm(&scalar_ct(), one(), 0.0).unwrap();
        let mut wc = aninorm::worst_case_filter(&scalar_ct(), one(), &sol).unwrap();
        wc.dt_m = Mat::zeros(1, 1);
        wc.dt_input_gain = Mat::zeros(1, 1);
        let dt = bilinear::to_discrete(&scalar_ct(), one()).unwrap();
        let s = simulate_dt(&dt, Some(&wc), &SimConfig::with_steps(1_000)).unwrap();
        assert_eq!(s.var_input.value, 0.0);
        assert_eq!(s.var_output.value, 0.0);
        assert_eq!(s.empirical_gain.value, 0.0);
    }

    #[test]
    fn unstable_and_coarse_steps_are_rejected() {
        let dt = DtStateSpace::new(mat(1, 1, &[1.5]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0])).unwrap();
        assert!(matches!(simulate_dt(&dt, None, &SimConfig::with_steps(100)), Err(Error::UnstableSystem { .. })));
        let cfg = SimConfig { em_dt: 0.5, ..SimConfig::with_steps(100) };
        assert!(matches!(simulate_ct_em(&scalar_ct(), one(), None, &cfg), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn short_run_is_flagged_wide() {
        let a = 0.5 * (9.0f64 / 8.0).ln();
        let sol = aninorm::anisotropic_norm(&scalar_ct(), one(), a).unwrap();
        let wc = aninorm::worst_case_filter(&scalar_ct(), one(), &sol).unwrap();
        let r = validate_solution(&scalar_ct(), one(), &sol, &wc, &SimConfig::with_steps(100)).unwrap();
        assert!(r.wide_interval());
    }
}
