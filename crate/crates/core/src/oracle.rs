//! Brute-force integration of the cascaded two-mode master equation and of
//! the adiabatic single-mode loss equation, used as ground truth for the
//! analytic channel.
//!
//! The two-mode generator (with hbar = 1) is
//!
//! ```text
//! dD/dt = -i[H, D] + g1/2 L[a1] D + g2/2 L[a2] D
//!         + s ([a1 D, a2†] + [a2, D a1†]),     s = sqrt(g1' g2')
//! H     = i g s/2 (a1† a2 - a2† a1),           L[a] D = 2aDa† - a†aD - Da†a
//! ```
//!
//! No term raises the total excitation `n1 + n2`, so states are stored on the
//! basis `{(n1, n2) : n1 + n2 <= cap}` with `cap` the highest occupied source
//! level of the initial state. Restricting to that basis is exact.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::channel::check_times;
use crate::error::{Error, Result};
use crate::feedback::{effective_rate, FeedbackParams};
use crate::fock::{hermitian_eigenvalues, DensityMatrix, FockSpace, Modes, C64, TOL_HERMITICITY};

/// Bounds checked at every record time.
pub const MAX_TRACE_DEVIATION: f64 = 1e-7;
pub const MIN_EIGENVALUE: f64 = -1e-6;
/// Diagnostics beyond this multiple of their bound abort the run.
const ABORT_FACTOR: f64 = 10.0;
/// Largest `dt * rate` accepted for an explicit RK4 step.
const RK4_SAFETY: f64 = 2.5;

/// Fixed-step RK4 settings. Each interval between record times is split into
/// equal substeps no longer than `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub record_times: Vec<f64>,
    /// Keep the full two-mode states in the record, not only the reduced ones.
    pub keep_joint: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, record_times: Vec<f64>) -> Self {
        Self { dt, record_times, keep_joint: false }
    }

    /// Config with `dt` at the stability bound for `params`.
    pub fn for_params(params: &FeedbackParams, record_times: Vec<f64>) -> Self {
        Self::new(stability_bound(params), record_times)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn t_end(&self) -> f64 {
        self.record_times.last().copied().unwrap_or(0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        check_times(&self.record_times)
    }
}

/// `min(0.05/gamma2, 0.05/sqrt(g^2 gamma1 gamma2))`, ignoring terms that vanish.
pub fn stability_bound(params: &FeedbackParams) -> f64 {
    let mut bound = f64::INFINITY;
    if params.gamma2() > 0.0 {
        bound = bound.min(0.05 / params.gamma2());
    }
    let coupling = (params.g() * params.g() * params.gamma1() * params.gamma2()).sqrt();
    if coupling > 0.0 {
        bound = bound.min(0.05 / coupling);
    }
    if bound.is_infinite() {
        bound = 0.05 / params.gamma1();
    }
    bound
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn within_bounds(&self) -> bool {
        self.trace_deviation < MAX_TRACE_DEVIATION
            && self.min_eigenvalue > MIN_EIGENVALUE
            && self.hermiticity_deviation <= TOL_HERMITICITY
    }

    fn check_abort(&self, t: f64) -> Result<()> {
        if self.trace_deviation > ABORT_FACTOR * MAX_TRACE_DEVIATION
            || self.min_eigenvalue < ABORT_FACTOR * MIN_EIGENVALUE
            || self.hermiticity_deviation > ABORT_FACTOR * TOL_HERMITICITY
        {
            return Err(Error::Stability(format!("at t = {t}: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    /// Source-mode states, one per record time.
    pub reduced_states: Vec<DensityMatrix>,
    /// Two-mode states when requested; empty otherwise and for adiabatic runs.
    pub joint_states: Vec<DensityMatrix>,
    pub diagnostics: Vec<Diagnostics>,
    /// Largest `|tr D - 1|` seen after any step.
    pub max_step_trace_deviation: f64,
    pub steps: usize,
}

impl EvolutionRecord {
    pub fn all_within_bounds(&self) -> bool {
        self.diagnostics.iter().all(Diagnostics::within_bounds)
            && self.max_step_trace_deviation < MAX_TRACE_DEVIATION
    }
}

/// Sparse column map of a ladder-type operator: `op |src> = coef |i>`.
type Lowering = Vec<Option<(usize, f64)>>;

/// Two-mode generator on an excitation-capped basis.
#[derive(Debug, Clone)]
struct TwoModeGenerator {
    d1: usize,
    d2: usize,
    basis: Vec<(usize, usize)>,
    /// Row-gather form of the non-Hermitian part `K = kappa B - g1/2 n1 - g2/2 n2 - s a2†a1`.
    k_rows: Vec<Vec<(usize, f64)>>,
    lower1: Lowering,
    lower2: Lowering,
    gamma1: f64,
    gamma2: f64,
    cascade: f64,
}

impl TwoModeGenerator {
    fn new(params: &FeedbackParams, d1: usize, d2: usize, cap: usize) -> Self {
        let basis: Vec<(usize, usize)> = (0..d1)
            .flat_map(|n1| (0..d2).map(move |n2| (n1, n2)))
            .filter(|&(n1, n2)| n1 + n2 <= cap)
            .collect();
        let mut index = vec![usize::MAX; d1 * d2];
        for (i, &(n1, n2)) in basis.iter().enumerate() {
            index[n1 * d2 + n2] = i;
        }
        let lookup = |n1: usize, n2: usize| -> Option<usize> {
            (n1 < d1 && n2 < d2).then(|| index[n1 * d2 + n2]).filter(|&i| i != usize::MAX)
        };
        let (g1, g2, s) = (params.gamma1(), params.gamma2(), params.cascade_rate());
        let kappa = params.g() * s / 2.0;
        let k_rows = basis
            .iter()
            .map(|&(n1, n2)| {
                let mut row = vec![];
                // diagonal
                row.push((lookup(n1, n2).unwrap(), -0.5 * (g1 * n1 as f64 + g2 * n2 as f64)));
                // a1† a2 |n1-1, n2+1> = sqrt(n1 (n2+1)) |n1, n2>, weight kappa
                if n1 >= 1 {
                    if let Some(c) = lookup(n1 - 1, n2 + 1) {
                        row.push((c, kappa * ((n1 * (n2 + 1)) as f64).sqrt()));
                    }
                }
                // a2† a1 |n1+1, n2-1> = sqrt((n1+1) n2) |n1, n2>, weight -(kappa + s)
                if n2 >= 1 {
                    if let Some(c) = lookup(n1 + 1, n2 - 1) {
                        row.push((c, -(kappa + s) * (((n1 + 1) * n2) as f64).sqrt()));
                    }
                }
                row
            })
            .collect();
        let lower1 = basis
            .iter()
            .map(|&(n1, n2)| lookup(n1 + 1, n2).map(|src| (src, ((n1 + 1) as f64).sqrt())))
            .collect();
        let lower2 = basis
            .iter()
            .map(|&(n1, n2)| lookup(n1, n2 + 1).map(|src| (src, ((n2 + 1) as f64).sqrt())))
            .collect();
        Self { d1, d2, basis, k_rows, lower1, lower2, gamma1: g1, gamma2: g2, cascade: s }
    }

    fn size(&self) -> usize {
        self.basis.len()
    }

    /// Upper estimate of the fastest rate in the generator.
    fn rate_scale(&self, params: &FeedbackParams) -> f64 {
        let cap = self.basis.iter().map(|&(a, b)| a + b).max().unwrap_or(0) as f64;
        let s = params.cascade_rate();
        let kappa = params.g() * s / 2.0;
        cap * (self.gamma1.max(self.gamma2) + kappa.abs() + (kappa + s).abs())
    }

    /// `out = L(d)` for Hermitian `d`, both row-major `size x size`.
    fn apply(&self, d: &[C64], kd: &mut [C64], out: &mut [C64]) {
        let n = self.size();
        let parallel = n >= 64;
        let kd_row = |r: usize, row: &mut [C64]| {
            row.fill(C64::new(0.0, 0.0));
            for &(c, v) in &self.k_rows[r] {
                let src = &d[c * n..(c + 1) * n];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += s * v;
                }
            }
        };
        if parallel {
            kd.par_chunks_mut(n).enumerate().for_each(|(r, row)| kd_row(r, row));
        } else {
            kd.chunks_mut(n).enumerate().for_each(|(r, row)| kd_row(r, row));
        }
        let kd = &*kd;
        let out_row = |r: usize, row: &mut [C64]| {
            for (j, o) in row.iter_mut().enumerate() {
                // K D + D K† = KD + (KD)†
                let mut v = kd[r * n + j] + kd[j * n + r].conj();
                if let (Some((sr, cr)), Some((sj, cj))) = (self.lower1[r], self.lower1[j]) {
                    v += d[sr * n + sj] * (self.gamma1 * cr * cj);
                }
                if let (Some((sr, cr)), Some((sj, cj))) = (self.lower2[r], self.lower2[j]) {
                    v += d[sr * n + sj] * (self.gamma2 * cr * cj);
                }
                // s (a1 D a2† + a2 D a1†)
                if let (Some((sr, cr)), Some((sj, cj))) = (self.lower1[r], self.lower2[j]) {
                    v += d[sr * n + sj] * (self.cascade * cr * cj);
                }
                if let (Some((sr, cr)), Some((sj, cj))) = (self.lower2[r], self.lower1[j]) {
                    v += d[sr * n + sj] * (self.cascade * cr * cj);
                }
                *o = v;
            }
        };
        if parallel {
            out.par_chunks_mut(n).enumerate().for_each(|(r, row)| out_row(r, row));
        } else {
            out.chunks_mut(n).enumerate().for_each(|(r, row)| out_row(r, row));
        }
    }

    fn pack(&self, m: &DMatrix<C64>) -> Vec<C64> {
        let n = self.size();
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for (i, &(a1, a2)) in self.basis.iter().enumerate() {
            for (j, &(b1, b2)) in self.basis.iter().enumerate() {
                v[i * n + j] = m[(a1 * self.d2 + a2, b1 * self.d2 + b2)];
            }
        }
        v
    }

    fn unpack(&self, v: &[C64]) -> DMatrix<C64> {
        let n = self.size();
        let dim = self.d1 * self.d2;
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &(a1, a2)) in self.basis.iter().enumerate() {
            for (j, &(b1, b2)) in self.basis.iter().enumerate() {
                m[(a1 * self.d2 + a2, b1 * self.d2 + b2)] = v[i * n + j];
            }
        }
        m
    }

    fn reduced(&self, v: &[C64]) -> DMatrix<C64> {
        let n = self.size();
        let mut m = DMatrix::zeros(self.d1, self.d1);
        for (i, &(a1, a2)) in self.basis.iter().enumerate() {
            for (j, &(b1, b2)) in self.basis.iter().enumerate() {
                if a2 == b2 {
                    m[(a1, b1)] += v[i * n + j];
                }
            }
        }
        m
    }

    fn trace(&self, v: &[C64]) -> C64 {
        let n = self.size();
        (0..n).map(|i| v[i * n + i]).sum()
    }
}

fn diagnostics(v: &[C64], n: usize) -> Diagnostics {
    let m = DMatrix::from_row_slice(n, n, v);
    let trace = m.trace();
    let mut herm = 0.0f64;
    for i in 0..n {
        for j in i..n {
            herm = herm.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    Diagnostics {
        trace_deviation: (trace - C64::new(1.0, 0.0)).norm(),
        hermiticity_deviation: herm,
        min_eigenvalue: hermitian_eigenvalues(&m).first().copied().unwrap_or(0.0),
    }
}

/// Classic RK4 over flat complex buffers.
struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
    scratch: Vec<C64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z.clone(), scratch: z }
    }

    fn step<F>(&mut self, y: &mut [C64], h: f64, rhs: &F)
    where
        F: Fn(&[C64], &mut [C64], &mut [C64]),
    {
        let Rk4 { k1, k2, k3, k4, tmp, scratch } = self;
        rhs(y, scratch, k1);
        axpy(tmp, y, k1, h / 2.0);
        rhs(tmp, scratch, k2);
        axpy(tmp, y, k2, h / 2.0);
        rhs(tmp, scratch, k3);
        axpy(tmp, y, k3, h);
        rhs(tmp, scratch, k4);
        let w = h / 6.0;
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

fn axpy(out: &mut [C64], y: &[C64], k: &[C64], h: f64) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * h;
    }
}

/// Integrates `y` through every record time, calling `record` at each.
fn integrate<F, R>(y: &mut [C64], cfg: &IntegratorConfig, trace: impl Fn(&[C64]) -> C64, rhs: F, mut record: R) -> Result<(f64, usize)>
where
    F: Fn(&[C64], &mut [C64], &mut [C64]),
    R: FnMut(f64, &[C64]) -> Result<()>,
{
    let mut rk = Rk4::new(y.len());
    let mut t = 0.0;
    let mut worst = (trace(y) - C64::new(1.0, 0.0)).norm();
    let mut steps = 0;
    for &target in &cfg.record_times {
        let span = target - t;
        if span > 0.0 {
            let n = ((span / cfg.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                rk.step(y, h, &rhs);
                worst = worst.max((trace(y) - C64::new(1.0, 0.0)).norm());
                steps += 1;
            }
            if worst > ABORT_FACTOR * MAX_TRACE_DEVIATION {
                return Err(Error::Stability(format!("trace drifted by {worst:e} before t = {target}")));
            }
        }
        t = target;
        record(t, y)?;
    }
    Ok((worst, steps))
}

/// Highest source level carrying any weight in `rho`.
fn occupied_cap(rho: &DensityMatrix) -> usize {
    let m = rho.matrix();
    let d = rho.dim();
    (0..d)
        .rev()
        .find(|&n| (0..d).any(|k| m[(n, k)] != C64::new(0.0, 0.0) || m[(k, n)] != C64::new(0.0, 0.0)))
        .unwrap_or(0)
}

/// `dD/dt` of the two-mode master equation on the full truncated product space.
pub fn lindblad_rhs(joint: &DensityMatrix, params: &FeedbackParams) -> Result<DMatrix<C64>> {
    let Modes::Joint(s1, s2) = joint.modes() else {
        return Err(Error::Shape("two-mode generator needs a joint state".into()));
    };
    let gen = TwoModeGenerator::new(params, s1.dim(), s2.dim(), s1.dim() + s2.dim());
    let v = gen.pack(joint.matrix());
    let mut kd = vec![C64::new(0.0, 0.0); v.len()];
    let mut out = kd.clone();
    gen.apply(&v, &mut kd, &mut out);
    Ok(gen.unpack(&out))
}

/// Evolves `rho1_0 ⊗ |0><0|` with the two-mode master equation; the driven
/// mode gets the same truncation as the source.
pub fn evolve_joint(rho1_0: &DensityMatrix, params: &FeedbackParams, cfg: &IntegratorConfig) -> Result<EvolutionRecord> {
    cfg.validate()?;
    let bound = stability_bound(params);
    if cfg.dt > bound * (1.0 + 1e-12) {
        return Err(Error::Config(format!("dt = {} exceeds stability bound {bound}", cfg.dt)));
    }
    let src = rho1_0
        .space()
        .ok_or_else(|| Error::Shape("initial source state must be single-mode".into()))?;
    let d = src.dim();
    let gen = TwoModeGenerator::new(params, d, d, occupied_cap(rho1_0));
    let rate = gen.rate_scale(params);
    if cfg.dt * rate > RK4_SAFETY {
        return Err(Error::Stability(format!(
            "dt = {} too large for fastest rate {rate:.3e} in {src}",
            cfg.dt
        )));
    }
    let joint0 = rho1_0.tensor(&DensityMatrix::vacuum(FockSpace::new(d)?))?;
    let mut y = gen.pack(joint0.matrix());
    let n = gen.size();
    let mut rec = EvolutionRecord {
        times: vec![],
        reduced_states: vec![],
        joint_states: vec![],
        diagnostics: vec![],
        max_step_trace_deviation: 0.0,
        steps: 0,
    };
    let rhs = |v: &[C64], kd: &mut [C64], out: &mut [C64]| gen.apply(v, kd, out);
    let (worst, steps) = integrate(&mut y, cfg, |v| gen.trace(v), rhs, |t, v| {
        let diag = diagnostics(v, n);
        diag.check_abort(t)?;
        rec.times.push(t);
        rec.reduced_states.push(DensityMatrix::from_parts(Modes::Single(src), gen.reduced(v))?);
        if cfg.keep_joint {
            rec.joint_states.push(DensityMatrix::from_parts(Modes::Joint(src, src), gen.unpack(v))?);
        }
        rec.diagnostics.push(diag);
        Ok(())
    })?;
    rec.max_step_trace_deviation = worst;
    rec.steps = steps;
    Ok(rec)
}

/// Single-mode loss at the renormalized rate `gamma1 [1 + g (2 + g) eta^2]`.
pub fn evolve_adiabatic(rho1_0: &DensityMatrix, params: &FeedbackParams, cfg: &IntegratorConfig) -> Result<EvolutionRecord> {
    cfg.validate()?;
    let space = rho1_0
        .space()
        .ok_or_else(|| Error::Shape("adiabatic model acts on a single mode".into()))?;
    let d = space.dim();
    let rate = effective_rate(params);
    if cfg.dt * rate * (d.saturating_sub(1)) as f64 > RK4_SAFETY {
        return Err(Error::Stability(format!(
            "dt = {} too large for loss rate {rate} on {space}",
            cfg.dt
        )));
    }
    let mut y: Vec<C64> = rho1_0.matrix().transpose().iter().copied().collect();
    let rhs = |v: &[C64], _: &mut [C64], out: &mut [C64]| {
        for n in 0..d {
            for m in 0..d {
                let mut z = v[n * d + m] * (-0.5 * (n + m) as f64);
                if n + 1 < d && m + 1 < d {
                    z += v[(n + 1) * d + m + 1] * (((n + 1) * (m + 1)) as f64).sqrt();
                }
                out[n * d + m] = z * rate;
            }
        }
    };
    let trace = |v: &[C64]| (0..d).map(|i| v[i * d + i]).sum::<C64>();
    let mut rec = EvolutionRecord {
        times: vec![],
        reduced_states: vec![],
        joint_states: vec![],
        diagnostics: vec![],
        max_step_trace_deviation: 0.0,
        steps: 0,
    };
    let (worst, steps) = integrate(&mut y, cfg, trace, rhs, |t, v| {
        let diag = diagnostics(v, d);
        diag.check_abort(t)?;
        rec.times.push(t);
        rec.reduced_states.push(DensityMatrix::from_parts(Modes::Single(space), DMatrix::from_row_slice(d, d, v))?);
        rec.diagnostics.push(diag);
        Ok(())
    })?;
    rec.max_step_trace_deviation = worst;
    rec.steps = steps;
    Ok(rec)
}
