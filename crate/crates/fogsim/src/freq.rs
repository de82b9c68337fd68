//! DVFS frequency selection for fog nodes.
//!
//! The computation energy of a request on a fog node, as a function of
//! frequency f (GHz), expands to
//!
//!   E_cp(f) = K * (p_0/f + p_1 + p_2 f + p_3 f^2 + ... + p_Q f^{Q-1}),
//!   K = L*theta / (s_n * 1e9).
//!
//! Negative coefficients make this non-convex, so the minimization runs as
//! a difference-of-convex scheme: the terms for q = 0 and q >= 3 are split
//! by sign into a convex part E+ and a convex part E- (p_1 and p_2 terms
//! are affine in f and always stay in E+), E_cp = E+ - E-. Each round
//! linearizes E- at the current point; since a convex function lies above
//! its tangent, the resulting convex surrogate E+ - tangent over-estimates
//! E_cp everywhere and touches it at the expansion point, which gives the
//! usual majorize-minimize descent guarantee. The surrogate minimum over
//! the feasible frequency interval is found by safeguarded Newton on the
//! stationarity condition, and the loop repeats until the iterate moves
//! less than epsilon or the round budget runs out.
//!
//! The feasible interval is [max(f_min, f_delay), f_max], where f_delay is
//! the slowest frequency that still meets the deadline after transfer and
//! queue delays are paid; a request whose f_delay exceeds f_max cannot be
//! served on that node at all.
//!
//! A single start point can settle in a non-global local minimum: E_cp has
//! up to two interior stationary points, and whichever basin the start
//! falls in wins. Runs therefore start from the configured point (upper
//! bound by default) and, when E- is non-trivial, additionally from both
//! interval endpoints, keeping the candidate with the lowest exact energy.
//! For Q = 3 the two endpoint basins cover every local minimum, so this
//! matches the closed-form optimum; [`analytic_optimum_q3`] provides that
//! closed form for cross-checking.

use crate::cost;
use crate::model::{Fleet, FogNodeSpec, ModelError, NodeRef, Request, ScheduleState};

/// Relative tolerance on the surrogate derivative in the stationarity
/// solver, scaled by the derivative magnitude at the bracket ends.
pub const STATIONARITY_TOL_REL: f64 = 1e-9;

/// Iteration budgets and stopping threshold for the frequency search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaParams {
    /// Outer linearization rounds.
    pub max_sca_iters: u32,
    /// Newton iterations per stationarity solve.
    pub max_newton_iters: u32,
    /// Stop once the iterate moves less than this many GHz.
    pub epsilon_ghz: f64,
    /// First expansion point; `None` starts at the interval's upper bound.
    pub initial_ghz: Option<f64>,
}

impl Default for ScaParams {
    fn default() -> Self {
        ScaParams { max_sca_iters: 10, max_newton_iters: 20, epsilon_ghz: 1e-6, initial_ghz: None }
    }
}

/// Sign-split form of the computation-energy polynomial.
///
/// `plus[q]` and `minus[q]` hold the coefficient magnitudes feeding the
/// convex parts E+ and E-; term q contributes c * f^(q-1) (so q = 0 is the
/// 1/f term). Both parts are convex for f > 0 and E_cp = E+ - E-.
#[derive(Debug, Clone, PartialEq)]
pub struct DcSplit {
    plus: Vec<f64>,
    minus: Vec<f64>,
    scale: f64,
}

fn terms(coeffs: &[f64], f: f64) -> f64 {
    let mut v = coeffs[0] / f;
    for (q, &c) in coeffs.iter().enumerate().skip(1) {
        v += c * f.powi(q as i32 - 1);
    }
    v
}

fn dterms(coeffs: &[f64], f: f64) -> f64 {
    let mut v = -coeffs[0] / (f * f);
    for (q, &c) in coeffs.iter().enumerate().skip(2) {
        v += (q as f64 - 1.0) * c * f.powi(q as i32 - 2);
    }
    v
}

fn ddterms(coeffs: &[f64], f: f64) -> f64 {
    let mut v = 2.0 * coeffs[0] / (f * f * f);
    for (q, &c) in coeffs.iter().enumerate().skip(3) {
        v += (q as f64 - 1.0) * (q as f64 - 2.0) * c * f.powi(q as i32 - 3);
    }
    v
}

impl DcSplit {
    /// Split raw power coefficients (ascending degree, watts at f in GHz),
    /// with `scale` = K in joules. Terms q = 1, 2 always join the plus
    /// part; q = 0 and q >= 3 go by sign.
    pub fn new(power_coeffs: &[f64], scale: f64) -> Self {
        assert!(!power_coeffs.is_empty(), "power polynomial needs at least one coefficient");
        assert!(scale > 0.0, "energy scale must be positive");
        let mut plus = vec![0.0; power_coeffs.len()];
        let mut minus = vec![0.0; power_coeffs.len()];
        for (q, &c) in power_coeffs.iter().enumerate() {
            if q == 1 || q == 2 || c >= 0.0 {
                plus[q] = c;
            } else {
                minus[q] = -c;
            }
        }
        DcSplit { plus, minus, scale }
    }

    pub fn for_request(r: &Request, node: &FogNodeSpec) -> Self {
        Self::new(&node.power_coeffs, r.flops() / (node.flop_per_cycle * 1e9))
    }

    pub fn plus_coeffs(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus_coeffs(&self) -> &[f64] {
        &self.minus
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn minus_is_zero(&self) -> bool {
        self.minus.iter().all(|&c| c == 0.0)
    }

    /// Exact E_cp(f) in joules.
    pub fn energy(&self, f_ghz: f64) -> f64 {
        self.energy_plus(f_ghz) - self.energy_minus(f_ghz)
    }

    pub fn energy_plus(&self, f_ghz: f64) -> f64 {
        self.scale * terms(&self.plus, f_ghz)
    }

    pub fn energy_minus(&self, f_ghz: f64) -> f64 {
        self.scale * terms(&self.minus, f_ghz)
    }

    pub fn plus_deriv(&self, f_ghz: f64) -> f64 {
        self.scale * dterms(&self.plus, f_ghz)
    }

    pub fn minus_deriv(&self, f_ghz: f64) -> f64 {
        self.scale * dterms(&self.minus, f_ghz)
    }

    pub fn plus_curvature(&self, f_ghz: f64) -> f64 {
        self.scale * ddterms(&self.plus, f_ghz)
    }
}

/// Tangent of E- at the expansion point f_bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinusTangent {
    pub f_bar_ghz: f64,
    pub value_j: f64,
    pub slope_j_per_ghz: f64,
}

impl MinusTangent {
    pub fn eval(&self, f_ghz: f64) -> f64 {
        self.value_j + self.slope_j_per_ghz * (f_ghz - self.f_bar_ghz)
    }
}

pub fn linearize_minus(split: &DcSplit, f_bar_ghz: f64) -> MinusTangent {
    MinusTangent {
        f_bar_ghz,
        value_j: split.energy_minus(f_bar_ghz),
        slope_j_per_ghz: split.minus_deriv(f_bar_ghz),
    }
}

/// Convex surrogate E+(f) - tangent(f); touches E_cp at the expansion
/// point and lies above it elsewhere.
pub fn surrogate_energy(split: &DcSplit, tangent: &MinusTangent, f_ghz: f64) -> f64 {
    split.energy_plus(f_ghz) - tangent.eval(f_ghz)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub f_ghz: f64,
    pub newton_iters: u32,
}

// Inverted and NaN bounds both land here.
fn ensure_ordered_bounds(lo_ghz: f64, hi_ghz: f64) -> Result<(), ModelError> {
    if lo_ghz > hi_ghz || lo_ghz.is_nan() || hi_ghz.is_nan() {
        return Err(ModelError::InvertedBounds { lo_ghz, hi_ghz });
    }
    Ok(())
}

/// Minimize the surrogate over [lo, hi].
///
/// The surrogate is convex, so its derivative crosses zero at most once:
/// a non-negative derivative at `lo` pins the minimum there, a
/// non-positive one at `hi` pins it there (for a constant-derivative
/// surrogate both rules agree with picking the lower-valued endpoint),
/// and otherwise Newton runs on the bracketed root with bisection as the
/// fallback whenever a step leaves the bracket or curvature vanishes.
pub fn solve_stationarity(
    split: &DcSplit,
    tangent: &MinusTangent,
    lo_ghz: f64,
    hi_ghz: f64,
    max_newton_iters: u32,
    tol_rel: f64,
) -> Result<StationaryPoint, ModelError> {
    ensure_ordered_bounds(lo_ghz, hi_ghz)?;
    let g = |f: f64| split.plus_deriv(f) - tangent.slope_j_per_ghz;
    let g_lo = g(lo_ghz);
    if g_lo >= 0.0 {
        return Ok(StationaryPoint { f_ghz: lo_ghz, newton_iters: 0 });
    }
    let g_hi = g(hi_ghz);
    if g_hi <= 0.0 {
        return Ok(StationaryPoint { f_ghz: hi_ghz, newton_iters: 0 });
    }

    let tol = tol_rel * g_lo.abs().max(g_hi);
    let (mut a, mut b) = (lo_ghz, hi_ghz);
    let mut x = 0.5 * (a + b);
    let mut iters = 0;
    while iters < max_newton_iters {
        let gx = g(x);
        iters += 1;
        if gx.abs() <= tol {
            break;
        }
        if gx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= f64::EPSILON * b {
            break;
        }
        let curvature = split.plus_curvature(x);
        let newton = if curvature > 0.0 { x - gx / curvature } else { f64::NAN };
        x = if newton.is_finite() && newton > a && newton < b { newton } else { 0.5 * (a + b) };
    }
    Ok(StationaryPoint { f_ghz: x, newton_iters: iters })
}

/// Slowest frequency (GHz) on `fog` that still meets the request's
/// deadline once transfer and queue delays are paid, clamped up to the
/// node's lower frequency bound. `None` when no frequency can: either the
/// remaining time budget is gone or the required frequency exceeds f_max.
pub fn delay_min_frequency(
    r: &Request,
    fog: usize,
    fleet: &Fleet,
    state: &ScheduleState,
    t_k: f64,
) -> Result<Option<f64>, ModelError> {
    let target = NodeRef::Fog(fog);
    let comm = cost::delay_comm(r, target, fleet)?;
    let queue = cost::delay_queue(r, target, fleet, state, t_k)?;
    let node = &fleet.fogs[fog];
    let budget = r.deadline_s - comm.total_s() - queue;
    if budget <= 0.0 {
        return Ok(None);
    }
    let f_delay_ghz = r.flops() / (node.flop_per_cycle * budget) / 1e9;
    if f_delay_ghz > node.f_max_ghz {
        return Ok(None);
    }
    // The algebraic inverse can land one ulp short of the deadline once the
    // delay is re-evaluated; bump to the first frequency whose evaluated
    // total (same summation order as the cost side) actually fits.
    let mut f = f_delay_ghz.max(node.f_min_ghz);
    for _ in 0..4 {
        if f > node.f_max_ghz {
            return Ok(None);
        }
        let d_cp = cost::delay_compute(r, target, fleet, f)?;
        if comm.up_s + comm.down_s + queue + d_cp <= r.deadline_s {
            return Ok(Some(f));
        }
        f = f.next_up();
    }
    Ok(None)
}

/// Result of the frequency search for one (request, fog node) pair.
/// The frequency and objectives are meaningful only when `feasible`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSolution {
    pub feasible: bool,
    pub f_star_ghz: f64,
    pub iterations_sca: u32,
    pub iterations_newton: u32,
    /// Exact E_cp at f_star, joules.
    pub objective_j: f64,
    /// Final surrogate at f_star; differs from the exact value by
    /// O(epsilon^2) once converged.
    pub surrogate_objective_j: f64,
}

impl FreqSolution {
    fn infeasible() -> Self {
        FreqSolution {
            feasible: false,
            f_star_ghz: 0.0,
            iterations_sca: 0,
            iterations_newton: 0,
            objective_j: 0.0,
            surrogate_objective_j: 0.0,
        }
    }
}

struct ScaRun {
    f_star: f64,
    sca_iters: u32,
    newton_iters: u32,
    final_tangent: MinusTangent,
}

fn sca_from(
    split: &DcSplit,
    lo: f64,
    hi: f64,
    start: f64,
    params: &ScaParams,
) -> Result<ScaRun, ModelError> {
    let mut f_bar = start.clamp(lo, hi);
    let mut newton_total = 0;
    let mut iters = 0;
    loop {
        let tangent = linearize_minus(split, f_bar);
        let sp = solve_stationarity(
            split,
            &tangent,
            lo,
            hi,
            params.max_newton_iters,
            STATIONARITY_TOL_REL,
        )?;
        iters += 1;
        newton_total += sp.newton_iters;
        let moved = (sp.f_ghz - f_bar).abs();
        f_bar = sp.f_ghz;
        if moved <= params.epsilon_ghz || iters >= params.max_sca_iters {
            return Ok(ScaRun {
                f_star: f_bar,
                sca_iters: iters,
                newton_iters: newton_total,
                final_tangent: tangent,
            });
        }
    }
}

/// Minimize a split energy over [lo, hi] GHz.
///
/// Runs the linearization loop from the configured start, plus both
/// endpoints whenever the concave correction E- is non-trivial, and keeps
/// the lowest exact energy (ties resolve to the lower frequency).
pub fn optimize_split(
    split: &DcSplit,
    lo_ghz: f64,
    hi_ghz: f64,
    params: &ScaParams,
) -> Result<FreqSolution, ModelError> {
    ensure_ordered_bounds(lo_ghz, hi_ghz)?;
    let first = params.initial_ghz.unwrap_or(hi_ghz).clamp(lo_ghz, hi_ghz);
    let mut starts = vec![first];
    if !split.minus_is_zero() && hi_ghz > lo_ghz {
        for s in [hi_ghz, lo_ghz] {
            if !starts.contains(&s) {
                starts.push(s);
            }
        }
    }

    let mut best: Option<(ScaRun, f64)> = None;
    for start in starts {
        let run = sca_from(split, lo_ghz, hi_ghz, start, params)?;
        let energy = split.energy(run.f_star);
        let better = match &best {
            None => true,
            Some((b, e)) => energy < *e || (energy == *e && run.f_star < b.f_star),
        };
        if better {
            best = Some((run, energy));
        }
    }
    let (run, energy) = best.expect("at least one start point");
    Ok(FreqSolution {
        feasible: true,
        f_star_ghz: run.f_star,
        iterations_sca: run.sca_iters,
        iterations_newton: run.newton_iters,
        objective_j: energy,
        surrogate_objective_j: surrogate_energy(split, &run.final_tangent, run.f_star),
    })
}

/// Pick the energy-minimal feasible frequency for serving `r` on `fog`
/// given the current schedule. Infeasible solutions mean the node cannot
/// meet the deadline at any frequency.
pub fn optimize_frequency(
    r: &Request,
    fog: usize,
    fleet: &Fleet,
    state: &ScheduleState,
    t_k: f64,
    params: &ScaParams,
) -> Result<FreqSolution, ModelError> {
    let Some(lo) = delay_min_frequency(r, fog, fleet, state, t_k)? else {
        return Ok(FreqSolution::infeasible());
    };
    let node = &fleet.fogs[fog];
    let split = DcSplit::for_request(r, node);
    optimize_split(&split, lo, node.f_max_ghz, params)
}

/// Closed-form minimizer of E_cp over [lo, hi] for cubic power models
/// (Q = 3). Interior stationary points are the positive real roots of
/// 2 p3 f^3 + p2 f^2 - p0 = 0; the minimum is the best of those and the
/// endpoints. The request's energy scale factors out of the argmin, so
/// only the node enters. Serves as the independent oracle for
/// [`optimize_frequency`].
pub fn analytic_optimum_q3(
    node: &FogNodeSpec,
    lo_ghz: f64,
    hi_ghz: f64,
) -> Result<f64, ModelError> {
    analytic_optimum_q3_coeffs(&node.power_coeffs, lo_ghz, hi_ghz)
}

/// Coefficient-level form of [`analytic_optimum_q3`], ascending degree,
/// at most four coefficients.
pub fn analytic_optimum_q3_coeffs(
    power_coeffs: &[f64],
    lo_ghz: f64,
    hi_ghz: f64,
) -> Result<f64, ModelError> {
    assert!(power_coeffs.len() <= 4, "closed form only covers Q <= 3");
    ensure_ordered_bounds(lo_ghz, hi_ghz)?;
    let mut p = [0.0; 4];
    p[..power_coeffs.len()].copy_from_slice(power_coeffs);
    let energy = |f: f64| p[0] / f + p[1] + p[2] * f + p[3] * f * f;

    let mut candidates = vec![lo_ghz, hi_ghz];
    for root in real_cubic_roots(2.0 * p[3], p[2], 0.0, -p[0]) {
        if root > lo_ghz && root < hi_ghz {
            candidates.push(root);
        }
    }
    let mut best = (f64::INFINITY, lo_ghz);
    for f in candidates {
        let e = energy(f);
        if e < best.0 || (e == best.0 && f < best.1) {
            best = (e, f);
        }
    }
    Ok(best.1)
}

/// Real roots of a x^3 + b x^2 + c x + d, each polished by two Newton
/// steps. Degenerate leading coefficients fall back to the quadratic and
/// linear cases.
fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            if c == 0.0 {
                return vec![];
            }
            return vec![-d / c];
        }
        let disc = c * c - 4.0 * b * d;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        // the stable quadratic form avoids cancellation in one root
        let q = -0.5 * (c + c.signum() * s);
        if q == 0.0 {
            return vec![0.0, -c / b];
        }
        return vec![q / b, d / q];
    }

    let bn = b / a;
    let cn = c / a;
    let dn = d / a;
    // depressed cubic t^3 + pt + q with x = t - bn/3
    let p = cn - bn * bn / 3.0;
    let q = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;
    let shift = -bn / 3.0;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let magnitude = half_q * half_q + third_p.abs().powi(3);

    let mut roots = if magnitude == 0.0 {
        vec![shift]
    } else if disc.abs() <= 1e-12 * magnitude {
        // a double root plus a simple one
        vec![3.0 * q / p + shift, -3.0 * q / (2.0 * p) + shift]
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-half_q + s).cbrt();
        let v = (-half_q - s).cbrt();
        vec![u + v + shift]
    } else {
        // three distinct real roots
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };

    for root in &mut roots {
        for _ in 0..2 {
            let f = ((a * *root + b) * *root + c) * *root + d;
            let df = (3.0 * a * *root + 2.0 * b) * *root + c;
            if df != 0.0 {
                let next = *root - f / df;
                if next.is_finite() {
                    *root = next;
                }
            }
        }
    }
    roots
}
