//! Taylor-series continuation of solutions of linear equations.
//!
//! At a center `c` the solution is expanded as `g = Σ c_m (z - c)^m`. Matching
//! powers in `g^(k) = -Σ_j b_j g^(j)` gives the recurrence
//!
//! ```text
//! c_{m+k} (m+k)!/m! = -Σ_j Σ_{l<=m} β_{j,l} c_{m-l+j} (m-l+j)!/(m-l)!
//! ```
//!
//! with `b_j = Σ_l β_{j,l} (z - c)^l`. Continuation re-expands the series at
//! the next center; queries re-run the recurrence at the query point, so the
//! returned jets satisfy the equation up to rounding.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::thread::ThreadId;

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Func};
use crate::jet::ComplexJet;
use crate::ode::LinearODE;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative size of the last series terms accepted at the step radius.
const TAIL_TOL: f64 = 1e-16;
/// Largest ratio between the biggest data met on the way to a step and the
/// data at the step for which the step is trusted. Rounding errors picked up
/// near the peak return amplified by about the square of this ratio.
const LOSS_LIMIT: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Taylor order per step.
    pub order: usize,
    /// Fraction of the local convergence radius used as step length.
    pub safety: f64,
    /// Upper bound on a single step.
    pub max_step: f64,
    /// Steps shorter than this (relative to `1 + |center|`) count as underflow.
    pub min_step: f64,
    /// Limit on the number of steps of one continuation.
    pub max_steps: usize,
    /// Whether queries outside the computed discs extend the continuation.
    pub extend: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            order: 30,
            safety: 0.5,
            max_step: 1.0,
            min_step: 1e-12,
            max_steps: 200_000,
            extend: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 8 || self.order > 200 {
            return Err(Error::InvalidInput(format!(
                "solver order {} outside 8..=200",
                self.order
            )));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::InvalidInput(format!(
                "solver safety {} outside (0, 1)",
                self.safety
            )));
        }
        if !(self.max_step > 0.0) || !(self.min_step > 0.0) {
            return Err(Error::InvalidInput(
                "solver step bounds must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Taylor coefficients `c_0..c_order` of the solution at `center` with
/// `c_j = g^(j)(center)/j!` given for `j < k`.
pub fn local_series(
    ode: &LinearODE,
    center: Complex64,
    initial: &[Complex64],
    order: usize,
) -> Result<Vec<Complex64>> {
    let k = ode.order();
    let order = order.max(k);
    let mut c = vec![ZERO; order + 1];
    c[..k].copy_from_slice(&initial[..k]);
    let b = ode.coefficient_jets(center, order - k)?;
    for m in 0..=order - k {
        let mut acc = ZERO;
        for (j, bj) in b.iter().enumerate() {
            let beta = bj.coeffs();
            for l in 0..=m {
                let idx = m - l + j;
                if c[idx] == ZERO {
                    continue;
                }
                let falling: f64 = ((m - l + 1)..=(m - l + j)).map(|x| x as f64).product();
                acc += beta[l] * c[idx] * falling;
            }
        }
        let ratio: f64 = ((m + 1)..=(m + k)).map(|x| x as f64).product();
        c[m + k] = -acc / ratio;
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Breakdown(format!("series overflow at {center}")));
    }
    Ok(c)
}

/// Scaled initial data `g^(j)/j!` from derivative values.
fn scaled_initial(values: &[Complex64]) -> Vec<Complex64> {
    let mut fact = 1.0;
    values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if j > 1 {
                fact *= j as f64;
            }
            v / fact
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Step {
    center: Complex64,
    series: ComplexJet,
    radius: f64,
    /// Size of the initial data at the center.
    scale: f64,
    /// Largest `scale` along the continuation that produced this step.
    peak: f64,
    /// Whether the step lies on a continuation straight from the initial point.
    direct: bool,
}

impl Step {
    fn loss(&self) -> f64 {
        if self.scale > 0.0 {
            self.peak / self.scale
        } else {
            f64::INFINITY
        }
    }

    /// Trusted as a covering disc and as a start for further continuation.
    fn usable(&self) -> bool {
        self.direct || self.loss() <= LOSS_LIMIT
    }
}

type StepCache = Arc<Mutex<Vec<Step>>>;

/// A solution of a linear equation, continued on demand.
///
/// Each thread continues from its own copy of the explicitly computed steps,
/// so the values seen by a thread depend only on its own queries and not on
/// how they interleave with queries from other threads.
pub struct SolutionEvaluator {
    ode: LinearODE,
    z0: Complex64,
    initial: Vec<Complex64>,
    config: SolverConfig,
    /// The initial step and the steps of [`Self::extend_along`].
    seed: Mutex<Vec<Step>>,
    caches: Mutex<HashMap<ThreadId, StepCache>>,
}

impl std::fmt::Debug for SolutionEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionEvaluator")
            .field("z0", &self.z0)
            .field("initial", &self.initial)
            .finish()
    }
}

impl SolutionEvaluator {
    /// `initial` holds `g(z0), g'(z0), ..., g^(k-1)(z0)`.
    pub fn new(
        ode: LinearODE,
        z0: Complex64,
        initial: &[Complex64],
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        let k = ode.order();
        if initial.len() != k {
            return Err(Error::InvalidInput(format!(
                "order {k} needs {k} initial values, got {}",
                initial.len()
            )));
        }
        if initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("initial values must be finite".into()));
        }
        if !ode.domain().contains(z0) {
            return Err(Error::OutsideDomain(z0));
        }
        let this = Self {
            ode,
            z0,
            initial: initial.to_vec(),
            config,
            seed: Mutex::new(Vec::new()),
            caches: Mutex::new(HashMap::new()),
        };
        let mut first = this.make_step(z0, &scaled_initial(initial))?;
        first.direct = true;
        this.seed.lock().expect("seed steps").push(first);
        Ok(this)
    }

    pub fn ode(&self) -> &LinearODE {
        &self.ode
    }

    pub fn initial_point(&self) -> Complex64 {
        self.z0
    }

    pub fn initial_values(&self) -> &[Complex64] {
        &self.initial
    }

    pub fn shared(self) -> Func {
        Arc::new(self)
    }

    /// Number of continuation steps computed so far by the calling thread.
    pub fn step_count(&self) -> usize {
        self.cache().lock().expect("step cache").len()
    }

    fn cache(&self) -> StepCache {
        let mut caches = self.caches.lock().expect("step caches");
        caches
            .entry(std::thread::current().id())
            .or_insert_with(|| Arc::new(Mutex::new(self.seed.lock().expect("seed steps").clone())))
            .clone()
    }

    fn make_step(&self, center: Complex64, init: &[Complex64]) -> Result<Step> {
        let n = self.config.order;
        let c = local_series(&self.ode, center, init, n)?;
        let hint = self
            .ode
            .radius_hint(center)
            .min(self.ode.domain().boundary_distance(center));
        let k = self.ode.order();
        let scale = c[..k].iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut tail = f64::INFINITY;
        if scale > 0.0 {
            for m in [n - 1, n] {
                let a = c[m].norm();
                if a > 0.0 {
                    tail = tail.min((TAIL_TOL * scale / a).powf(1.0 / m as f64));
                }
            }
            // geometric decay estimate from the whole tail, guards against
            // accidental zeros in the last coefficients
            for m in (n / 2)..n {
                let a = c[m].norm();
                if a > 0.0 {
                    tail = tail.min(2.0 * (scale / a).powf(1.0 / m as f64));
                }
            }
        }
        let radius = (self.config.safety * hint)
            .min(tail)
            .min(self.config.max_step);
        if !(radius > self.config.min_step * (1.0 + center.norm())) {
            let reached = (center - self.z0).norm();
            return Err(Error::StepUnderflow {
                at: center,
                reached,
            });
        }
        Ok(Step {
            center,
            series: ComplexJet::new(center, c)?,
            radius,
            scale,
            peak: scale,
            direct: false,
        })
    }

    fn covering(steps: &[Step], p: Complex64) -> Option<&Step> {
        steps
            .iter()
            .filter(|s| s.usable() && (p - s.center).norm() <= s.radius)
            .min_by(|a, b| {
                ((p - a.center).norm() / a.radius).total_cmp(&((p - b.center).norm() / b.radius))
            })
    }

    /// Continues from the step `from` along `curve(t)`, `t ∈ [0, 1]`, with
    /// `curve(0)` inside the disc of `from`. Returns the index of the last step.
    /// New steps are marked `direct` when requested.
    fn continue_along(
        &self,
        steps: &mut Vec<Step>,
        from: usize,
        curve: &dyn Fn(f64) -> Result<Complex64>,
        direct: bool,
    ) -> Result<usize> {
        let k = self.ode.order();
        let mut current = from;
        let mut t = 0.0f64;
        let mut guess = 1.0f64;
        for _ in 0..self.config.max_steps {
            let step = &steps[current];
            let end = curve(1.0)?;
            if (end - step.center).norm() <= step.radius {
                return Ok(current);
            }
            // largest t' with |curve(t') - center| <= radius, found by a growing/shrinking search
            let reach =
                |s: f64| -> Result<bool> { Ok((curve(s)? - step.center).norm() <= step.radius) };
            let mut lo = t;
            let mut dt = guess.min(1.0 - t);
            let mut hi;
            loop {
                let cand = (lo + dt).min(1.0);
                if reach(cand)? {
                    lo = cand;
                    if cand >= 1.0 {
                        break;
                    }
                    dt *= 2.0;
                } else {
                    hi = cand;
                    for _ in 0..30 {
                        let mid = 0.5 * (lo + hi);
                        if reach(mid)? {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    break;
                }
            }
            if lo <= t {
                return Err(Error::StepUnderflow {
                    at: step.center,
                    reached: (step.center - self.z0).norm(),
                });
            }
            guess = (lo - t).max(1e-12);
            t = lo;
            let next = curve(t)?;
            let init = step.series.recenter(next - step.center, k - 1);
            let peak = step.peak;
            let mut new_step = self.make_step(next, init.coeffs())?;
            new_step.peak = new_step.peak.max(peak);
            new_step.direct = direct;
            steps.push(new_step);
            current = steps.len() - 1;
        }
        Err(Error::Breakdown(format!(
            "continuation exceeded {} steps",
            self.config.max_steps
        )))
    }

    fn route(&self, from: Complex64, to: Complex64) -> Box<dyn Fn(f64) -> Result<Complex64> + '_> {
        match self.ode.domain() {
            Domain::Image(map) => {
                let (a, b) = match (map.inverse(from), map.inverse(to)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => return Box::new(move |t| Ok(from + (to - from) * t)),
                };
                Box::new(move |t| map.eval(a + (b - a) * t))
            }
            _ => Box::new(move |t| Ok(from + (to - from) * t)),
        }
    }

    /// Continues the solution along the polyline `path`. The polyline starts
    /// from the first computed disc containing `path[0]`, or from the initial
    /// point when there is none.
    pub fn extend_along(&self, path: &[Complex64]) -> Result<()> {
        let result = {
            let mut steps = self.seed.lock().expect("seed steps");
            self.extend_steps(&mut steps, path)
        };
        // threads restart from the extended seed
        self.caches.lock().expect("step caches").clear();
        result
    }

    fn extend_steps(&self, steps: &mut Vec<Step>, path: &[Complex64]) -> Result<()> {
        let mut current = match path.first() {
            None => return Ok(()),
            Some(&p) => steps
                .iter()
                .position(|s| (p - s.center).norm() <= s.radius)
                .unwrap_or(0),
        };
        let mut start = steps[current].center;
        for &p in path {
            if !self.ode.domain().contains(p) {
                return Err(Error::OutsideDomain(p));
            }
            let curve = move |t: f64| Ok(start + (p - start) * t);
            current = self.continue_along(steps, current, &curve, false)?;
            start = steps[current].center;
        }
        Ok(())
    }

    /// Initial data at `p` (scaled Taylor coefficients of orders `0..k`).
    fn data_at(&self, p: Complex64) -> Result<Vec<Complex64>> {
        let k = self.ode.order();
        let cache = self.cache();
        let mut steps = cache.lock().expect("step cache");
        if let Some(s) = Self::covering(&steps, p) {
            return Ok(s.series.recenter(p - s.center, k - 1).coeffs().to_vec());
        }
        if !self.config.extend {
            return Err(Error::NotCovered(p));
        }
        if !self.ode.domain().contains(p) {
            return Err(Error::OutsideDomain(p));
        }
        let nearest = (0..steps.len())
            .filter(|&i| steps[i].usable())
            .min_by(|&a, &b| {
                (p - steps[a].center)
                    .norm()
                    .total_cmp(&(p - steps[b].center).norm())
            })
            .expect("the initial step is usable");
        let curve = self.route(steps[nearest].center, p);
        let mut last = self.continue_along(&mut steps, nearest, &*curve, false)?;
        // a detour through larger values spoils the data; go straight from the initial point instead
        if !steps[last].usable() {
            let curve = self.route(self.z0, p);
            last = self.continue_along(&mut steps, 0, &*curve, true)?;
        }
        let s = &steps[last];
        Ok(s.series.recenter(p - s.center, k - 1).coeffs().to_vec())
    }
}

impl AnalyticFunction for SolutionEvaluator {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        let init = self.data_at(z)?;
        let c = local_series(&self.ode, z, &init, order.max(self.ode.order()))?;
        Ok(ComplexJet::new(z, c)?.truncate(order))
    }

    fn domain(&self) -> Domain {
        self.ode.domain()
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.ode
            .radius_hint(z)
            .min(self.ode.domain().boundary_distance(z))
    }
}

/// Solves from `g^(j)(z0) = initial[j]` and continues along `path`.
pub fn taylor_solve(
    ode: &LinearODE,
    z0: Complex64,
    initial: &[Complex64],
    path: &[Complex64],
) -> Result<SolutionEvaluator> {
    taylor_solve_with(ode, z0, initial, path, SolverConfig::default())
}

pub fn taylor_solve_with(
    ode: &LinearODE,
    z0: Complex64,
    initial: &[Complex64],
    path: &[Complex64],
    config: SolverConfig,
) -> Result<SolutionEvaluator> {
    let eval = SolutionEvaluator::new(ode.clone(), z0, initial, config)?;
    eval.extend_along(path)?;
    Ok(eval)
}

/// A basis of solutions with `g_i^(j)(z0) = δ_ij`.
pub fn canonical_basis(ode: &LinearODE, z0: Complex64, config: SolverConfig) -> Result<Vec<Func>> {
    let k = ode.order();
    (0..k)
        .map(|i| {
            let mut init = vec![ZERO; k];
            init[i] = Complex64::new(1.0, 0.0);
            Ok(SolutionEvaluator::new(ode.clone(), z0, &init, config)?.shared())
        })
        .collect()
}
