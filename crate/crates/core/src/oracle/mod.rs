//! Discretized Bellman solver used as an independent check on the closed
//! forms.
//!
//! `V_j(A)` is the best expected harvest with frames `j..=0` left and energy
//! `A` available. Frame 0 has `V_{-1} = 0`. In each frame the solver
//! maximizes over a ladder of transmit levels `rho` in `[e_t, A]`, not just
//! the two endpoints, so a binary optimum is observed rather than assumed.
//!
//! For fixed `A` every action's payoff `(rho - e_t) g + V_{j-1}(A - rho)` is
//! linear in the gain `g`, so the integrand is the upper envelope of those
//! lines. The envelope is split at its breakpoints and each linear piece is
//! integrated against `e^{-g}` with a shifted Gauss–Laguerre rule, which is
//! exact for linear integrands. `V_{j-1}` between budget nodes uses linear
//! interpolation.

mod quadrature;

pub use quadrature::GaussLaguerre;

use crate::analytics::{check_estimation, check_frames, ENERGY_EPS};
use crate::{Error, Result};

/// Largest horizon the solver accepts.
pub const MAX_FRAMES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct DpConfig {
    pub frames: usize,
    pub budget: f64,
    pub estimation_energy: f64,
    /// Requested budget intervals on `[0, P]`. The solver may raise this (at
    /// most to double) so that `e_t` falls on a node.
    pub budget_intervals: usize,
    /// Transmit levels from `e_t` to `A`, endpoints included.
    pub action_levels: usize,
    pub quadrature_nodes: usize,
    /// Relative change of `V_{N-1}(P)` allowed when both grids are refined.
    /// `None` skips the refinement solve.
    pub refinement_tolerance: Option<f64>,
}

impl DpConfig {
    pub fn new(frames: usize, budget: f64, estimation_energy: f64) -> Self {
        Self {
            frames,
            budget,
            estimation_energy,
            budget_intervals: 2048,
            action_levels: 101,
            quadrature_nodes: 64,
            refinement_tolerance: Some(1e-5),
        }
    }

    fn validate(&self) -> Result<()> {
        check_frames(self.frames)?;
        check_estimation(self.budget, self.estimation_energy)?;
        if self.frames > MAX_FRAMES {
            return Err(Error::InvalidGrid(format!(
                "at most {MAX_FRAMES} frames, got {}",
                self.frames
            )));
        }
        if self.budget_intervals < 2 || self.action_levels < 2 {
            return Err(Error::InvalidGrid(
                "need at least 2 budget intervals and 2 action levels".into(),
            ));
        }
        if let Some(tol) = self.refinement_tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::InvalidGrid(format!("refinement tolerance {tol}")));
            }
        }
        Ok(())
    }

    fn refined(&self) -> Self {
        Self {
            budget_intervals: 2 * self.budget_intervals,
            action_levels: 2 * self.action_levels - 1,
            refinement_tolerance: None,
            ..self.clone()
        }
    }
}

/// Interval count in `[requested, 2 requested]` putting `e_t` on a node, or
/// `requested` when none does.
fn aligned_intervals(requested: usize, budget: f64, estimation: f64) -> usize {
    if estimation == 0.0 {
        return requested;
    }
    (requested..=2 * requested)
        .find(|&m| {
            let k = estimation * m as f64 / budget;
            (k - k.round()).abs() < 1e-9
        })
        .unwrap_or(requested)
}

/// Solved value table.
#[derive(Debug, Clone)]
pub struct DpGrid {
    config: DpConfig,
    intervals: usize,
    step: f64,
    quadrature: GaussLaguerre,
    /// `values[j][i] = V_j(i * step)`.
    values: Vec<Vec<f64>>,
    refinement_change: Option<f64>,
}

/// A line `slope * g + intercept` for transmit level `rho`.
#[derive(Debug, Clone, Copy)]
struct Action {
    rho: f64,
    slope: f64,
    intercept: f64,
}

impl DpGrid {
    pub fn config(&self) -> &DpConfig {
        &self.config
    }

    pub fn frames(&self) -> usize {
        self.config.frames
    }

    /// Budget grid spacing.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn budget_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(move |i| self.node(i))
    }

    pub fn quadrature(&self) -> &GaussLaguerre {
        &self.quadrature
    }

    /// Relative change of `V_{N-1}(P)` under refinement, when checked.
    pub fn refinement_change(&self) -> Option<f64> {
        self.refinement_change
    }

    /// `V_frame` at every budget node.
    pub fn node_values(&self, frame: usize) -> &[f64] {
        &self.values[frame]
    }

    fn node(&self, i: usize) -> f64 {
        i as f64 * self.config.budget / self.intervals as f64
    }

    /// Interpolated `V_frame(available)`.
    pub fn value(&self, frame: usize, available: f64) -> f64 {
        interpolate(&self.values[frame], self.step, available)
    }

    /// `V_{N-1}(P)`.
    pub fn top_value(&self) -> f64 {
        self.values[self.config.frames - 1][self.intervals]
    }

    fn actions(&self, frame: usize, available: f64, levels: usize) -> Vec<Action> {
        actions(
            &self.values,
            frame,
            available,
            self.config.estimation_energy,
            self.config.budget,
            self.step,
            levels,
        )
    }

    /// DP-optimal transmit energy at `(frame, available, gain)`, or `None`
    /// if not even the estimation cost is affordable.
    ///
    /// Endpoints win ties; an interior level is chosen only when it beats both
    /// endpoints by more than floating-point noise.
    pub fn best_action(&self, frame: usize, available: f64, gain: f64) -> Option<f64> {
        let actions = self.actions(frame, available, self.config.action_levels);
        let (first, last) = (actions.first()?, actions.last()?);
        let at = |a: &Action| a.slope * gain + a.intercept;
        let (mut rho, endpoint_best) = if at(last) >= at(first) {
            (last.rho, at(last))
        } else {
            (first.rho, at(first))
        };
        let mut bar = endpoint_best + 1e-11 * self.config.budget;
        for a in &actions[1..actions.len() - 1] {
            let v = at(a);
            if v > bar {
                bar = v;
                rho = a.rho;
            }
        }
        Some(rho)
    }
}

fn interpolate(values: &[f64], step: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return values[0];
    }
    let last = values.len() - 1;
    let t = x / step;
    let i = (t.floor() as usize).min(last - 1);
    let frac = t - i as f64;
    values[i] + frac * (values[i + 1] - values[i])
}

fn actions(
    values: &[Vec<f64>],
    frame: usize,
    available: f64,
    estimation: f64,
    budget: f64,
    step: f64,
    levels: usize,
) -> Vec<Action> {
    if available <= estimation + ENERGY_EPS * budget {
        return Vec::new();
    }
    let span = available - estimation;
    (0..levels)
        .map(|k| {
            let rho = if k == levels - 1 {
                available
            } else {
                estimation + span * k as f64 / (levels - 1) as f64
            };
            let intercept = if frame == 0 {
                0.0
            } else {
                interpolate(&values[frame - 1], step, available - rho)
            };
            Action {
                rho,
                slope: rho - estimation,
                intercept,
            }
        })
        .collect()
}

/// `E[max_k (slope_k g + intercept_k)]` for `g ~ Exp(1)`. Slopes must be
/// strictly increasing.
fn expected_envelope(lines: &[Action], quad: &GaussLaguerre) -> f64 {
    if lines.is_empty() {
        return 0.0;
    }
    // Line on top at g = 0: largest intercept, then largest slope.
    let mut current = 0;
    for (k, l) in lines.iter().enumerate() {
        if l.intercept >= lines[current].intercept {
            current = k;
        }
    }
    let mut start = 0.0_f64;
    let mut total = 0.0;
    loop {
        let c = lines[current];
        let mut next: Option<(usize, f64)> = None;
        for (k, l) in lines.iter().enumerate().skip(current + 1) {
            let cross = ((c.intercept - l.intercept) / (l.slope - c.slope)).max(start);
            if next.is_none_or(|(_, x)| cross <= x) {
                next = Some((k, cross));
            }
        }
        let piece = |a: f64| quad.integrate_from(a, |g| c.slope * g + c.intercept);
        match next {
            Some((k, end)) => {
                total += piece(start) - piece(end);
                current = k;
                start = end;
            }
            None => {
                total += piece(start);
                return total;
            }
        }
    }
}

fn solve_once(config: &DpConfig) -> Result<DpGrid> {
    let quadrature = GaussLaguerre::new(config.quadrature_nodes)?;
    let intervals = aligned_intervals(config.budget_intervals, config.budget, config.estimation_energy);
    let step = config.budget / intervals as f64;
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(config.frames);
    for frame in 0..config.frames {
        let row: Vec<f64> = (0..=intervals)
            .map(|i| {
                let available = i as f64 * config.budget / intervals as f64;
                let lines = actions(
                    &values,
                    frame,
                    available,
                    config.estimation_energy,
                    config.budget,
                    step,
                    config.action_levels,
                );
                expected_envelope(&lines, &quadrature)
            })
            .collect();
        values.push(row);
    }
    Ok(DpGrid {
        config: config.clone(),
        intervals,
        step,
        quadrature,
        values,
        refinement_change: None,
    })
}

/// Backward induction over `frames` frames. With a refinement tolerance
/// set, the problem is re-solved with both grids refined and
/// [`Error::NotConverged`] is returned if `V_{N-1}(P)` moves too much.
pub fn solve_bellman(config: &DpConfig) -> Result<DpGrid> {
    config.validate()?;
    let mut grid = solve_once(config)?;
    if let Some(tolerance) = config.refinement_tolerance {
        let fine = solve_once(&config.refined())?;
        let reference = fine.top_value();
        let change = (fine.top_value() - grid.top_value()).abs() / reference.abs().max(f64::MIN_POSITIVE);
        if change > tolerance {
            return Err(Error::NotConverged {
                relative_change: change,
                tolerance,
            });
        }
        grid.refinement_change = Some(change);
    }
    Ok(grid)
}

/// Smallest gain at which the DP transmits everything at `(frame,
/// available)`.
///
/// Fails with [`Error::NonMonotoneAction`] if the optimal transmit level is
/// not non-decreasing in the gain.
pub fn extract_threshold(grid: &DpGrid, frame: usize, available: f64) -> Result<f64> {
    if frame >= grid.frames() {
        return Err(Error::FrameOutOfRange(frame));
    }
    let eps = ENERGY_EPS * grid.config.budget;
    let action = |g: f64| grid.best_action(frame, available, g);
    if action(0.0).is_none() {
        return Err(Error::InvalidGrid(format!(
            "available energy {available} does not cover the estimation cost"
        )));
    }
    let transmits = |g: f64| action(g).is_some_and(|rho| rho >= available - eps);

    let mut probes: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.005).collect();
    probes.extend_from_slice(grid.quadrature.nodes());
    probes.sort_by(f64::total_cmp);
    let mut prev = f64::NEG_INFINITY;
    for g in probes {
        let rho = action(g).unwrap_or(0.0);
        if rho + eps < prev {
            return Err(Error::NonMonotoneAction { frame, available });
        }
        prev = prev.max(rho);
    }

    if transmits(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !transmits(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonMonotoneAction { frame, available });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if transmits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Outcome of the binary-action check.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryCheck {
    /// `(frame, available, gain)` points examined.
    pub points: usize,
    /// Points whose optimal level sits more than one budget step from both
    /// `e_t` and `A`, as `(frame, available, gain, rho)`.
    pub violations: Vec<(usize, f64, f64, f64)>,
}

impl BinaryCheck {
    pub fn is_binary(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Examines every frame, every budget node that can afford estimation, and
/// every quadrature node.
pub fn binary_optimality_report(grid: &DpGrid) -> BinaryCheck {
    let estimation = grid.config.estimation_energy;
    let mut check = BinaryCheck {
        points: 0,
        violations: Vec::new(),
    };
    for frame in 0..grid.frames() {
        for available in grid.budget_nodes() {
            for &gain in grid.quadrature.nodes() {
                let Some(rho) = grid.best_action(frame, available, gain) else {
                    continue;
                };
                check.points += 1;
                let near_endpoint = (rho - estimation).abs() <= grid.step || (available - rho).abs() <= grid.step;
                if !near_endpoint {
                    check.violations.push((frame, available, gain, rho));
                }
            }
        }
    }
    check
}

/// `true` iff the DP-optimal action is all-or-nothing everywhere.
pub fn binary_optimality_check(grid: &DpGrid) -> bool {
    binary_optimality_report(grid).is_binary()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quick(frames: usize, e: f64) -> DpConfig {
        DpConfig {
            budget_intervals: 256,
            action_levels: 21,
            refinement_tolerance: None,
            ..DpConfig::new(frames, 1.0, e)
        }
    }

    #[test]
    fn single_frame_value_is_mean_gain() {
        let g = solve_bellman(&quick(1, 0.0)).unwrap();
        assert_abs_diff_eq!(g.top_value(), 1.0, epsilon = 1e-13);
        let g = solve_bellman(&quick(1, 0.1)).unwrap();
        assert_abs_diff_eq!(g.top_value(), 0.9, epsilon = 1e-13);
    }

    #[test]
    fn two_frames_without_estimation() {
        let g = solve_bellman(&quick(2, 0.0)).unwrap();
        assert_abs_diff_eq!(g.top_value(), 1.0 + (-1.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn envelope_of_two_lines() {
        // E[max(g, 1)] = 1 + e^{-1}
        let q = GaussLaguerre::new(16).unwrap();
        let lines = [
            Action {
                rho: 0.0,
                slope: 0.0,
                intercept: 1.0,
            },
            Action {
                rho: 1.0,
                slope: 1.0,
                intercept: 0.0,
            },
        ];
        assert_abs_diff_eq!(expected_envelope(&lines, &q), 1.0 + (-1.0f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn alignment_puts_estimation_on_node() {
        assert_eq!(aligned_intervals(2048, 1.0, 0.0), 2048);
        assert_eq!(aligned_intervals(2048, 1.0, 0.05), 2060);
        assert_eq!(aligned_intervals(2048, 1.0, 0.1), 2050);
    }

    #[test]
    fn config_validation() {
        assert!(solve_bellman(&quick(0, 0.0)).is_err());
        assert!(solve_bellman(&quick(MAX_FRAMES + 1, 0.0)).is_err());
        assert!(solve_bellman(&quick(2, 1.0)).is_err());
        let bad = DpConfig {
            action_levels: 1,
            ..quick(2, 0.0)
        };
        assert!(solve_bellman(&bad).is_err());
    }

    #[test]
    fn last_frame_threshold_is_zero() {
        let g = solve_bellman(&quick(3, 0.05)).unwrap();
        assert_eq!(extract_threshold(&g, 0, 1.0).unwrap(), 0.0);
        assert!(extract_threshold(&g, 3, 1.0).is_err());
        assert!(extract_threshold(&g, 1, 0.01).is_err());
    }

    #[test]
    fn value_monotone_in_budget() {
        let g = solve_bellman(&quick(3, 0.05)).unwrap();
        for j in 0..3 {
            assert!(g.node_values(j).windows(2).all(|w| w[1] >= w[0] - 1e-15));
        }
    }
}
