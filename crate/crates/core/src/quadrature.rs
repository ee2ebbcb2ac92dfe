//! Quadrature on the punctured circle and on bounded intervals.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `N` equispaced nodes `φ_j = −π + (j + ½)·2π/N` in the open interval
/// `(−π, π)`. The nodes are symmetric about zero and never touch `±π`, the
/// image of the puncture at `z = −1`. For periodic integrands the rectangle
/// rule on these nodes is the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiGrid {
    n: usize,
}

impl Default for PhiGrid {
    fn default() -> Self {
        Self { n: 4096 }
    }
}

impl PhiGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size must be a power of two >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    /// Smallest power-of-two grid, at least the default, on which the
    /// trapezoid rule resolves poles of modulus `radius`: the aliasing error
    /// decays like `radius^N`, so `N ≥ 40/(1 − radius)` leaves it below
    /// `e^{-40}`. Capped at `2^22` nodes.
    pub fn resolving(radius: f64) -> Self {
        let want = if radius < 1.0 { 40.0 / (1.0 - radius) } else { f64::INFINITY };
        let cap = 1usize << 22;
        let n = if want >= cap as f64 { cap } else { (want.ceil() as usize).next_power_of_two() };
        Self { n: n.max(Self::default().n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// `(1/2π) ∫_𝕋 f dφ` from values at the nodes, summed in node order.
    pub fn circle_mean(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        values.iter().sum::<f64>() / self.n as f64
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel for a vector-valued integrand. Returns Kronrod
/// estimates and the largest component error estimate.
fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let centre = f(c)?;
    for i in 0..dim {
        kron[i] += WGK[7] * centre[i];
        gauss[i] += WG[3] * centre[i];
    }
    for k in 0..7 {
        let dx = h * XGK[k];
        let left = f(c - dx)?;
        let right = f(c + dx)?;
        for i in 0..dim {
            let s = left[i] + right[i];
            kron[i] += WGK[k] * s;
            if k % 2 == 1 {
                gauss[i] += WG[k / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        kron[i] *= h;
        gauss[i] *= h;
        err = err.max((kron[i] - gauss[i]).abs());
    }
    Ok((kron, err))
}

/// Adaptive Gauss–Kronrod integration of a vector-valued function over
/// `[a, b]`, starting from `initial_panels` equal panels plus the given
/// interior breakpoints. All components share one panel set, so ratios of
/// components see identical nodes and positive weights.
pub fn adaptive_gk<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    initial_panels: usize,
    dim: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let mut edges: Vec<f64> = (0..=initial_panels.max(1))
        .map(|k| a + (b - a) * k as f64 / initial_panels.max(1) as f64)
        .collect();
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));

    struct Panel {
        a: f64,
        b: f64,
        value: Vec<f64>,
        err: f64,
    }
    let mut panels = Vec::new();
    for w in edges.windows(2) {
        let (value, err) = gk15(&mut f, w[0], w[1], dim)?;
        panels.push(Panel { a: w[0], b: w[1], value, err });
    }
    for _ in 0..20_000 {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let scale = (0..dim)
            .map(|i| panels.iter().map(|p| p.value[i]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if total_err <= abs_tol.max(rel_tol * scale) {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel collapsed to machine resolution; keep its estimate.
            panels.push(Panel { err: 0.0, ..p });
            continue;
        }
        let (lv, le) = gk15(&mut f, p.a, mid, dim)?;
        let (rv, re) = gk15(&mut f, mid, p.b, dim)?;
        panels.push(Panel { a: p.a, b: mid, value: lv, err: le });
        panels.push(Panel { a: mid, b: p.b, value: rv, err: re });
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut total = vec![0.0; dim];
    for p in &panels {
        for i in 0..dim {
            total[i] += p.value[i];
        }
    }
    Ok(total)
}
