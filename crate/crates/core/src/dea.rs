//! BCC efficiency models, production-possibility-set membership, the
//! weak-Pareto gap and unit classification.
//!
//! Every LP here is stated in column-normalized coordinates (each column
//! divided by its maximum), so scores, intensity vectors and slack zero-tests
//! do not depend on the measurement units of the data. Slacks are reported
//! back in data units.

use std::fmt;

use rayon::prelude::*;

use crate::dataset::{Dataset, Point};
use crate::error::{Error, Result};
use crate::lp::{solve_lexicographic, solve_lp, LpProblem, LpStatus, RowSense, FEAS_TOL};

/// A slack, coefficient or score deviation counts as zero at or below this
/// value (in column-normalized units).
pub const ZERO_TOL: f64 = 1e-6;

/// Allowed overshoot of θ* above 1 (or η* below 1) before a point is
/// declared outside the production possibility set.
const SCORE_SLACK: f64 = 1e-8;

/// Recomputed slacks at or below this share of the column scale are zero.
const SLACK_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Input,
    Output,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Input => "input",
            Orientation::Output => "output",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyResult {
    pub orientation: Orientation,
    /// θ* for input orientation, η* for output orientation.
    pub score: f64,
    pub input_slacks: Vec<f64>,
    pub output_slacks: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Σ λ_j (X_j, Y_j) at the stage-2 optimum.
    pub projection: Point,
    /// Largest slack divided by its column scale.
    pub max_scaled_slack: f64,
}

impl EfficiencyResult {
    pub fn has_slack(&self, zero_tol: f64) -> bool {
        self.max_scaled_slack > zero_tol
    }

    pub fn score_is_one(&self, zero_tol: f64) -> bool {
        (self.score - 1.0).abs() <= zero_tol
    }

    /// The radial projection `(θ*X, Y)` or `(X, η*Y)` of `target`.
    pub fn radial_projection(&self, target: &Point) -> Point {
        match self.orientation {
            Orientation::Input => Point::unchecked(
                target.x().iter().map(|v| v * self.score).collect(),
                target.y().to_vec(),
            ),
            Orientation::Output => Point::unchecked(
                target.x().to_vec(),
                target.y().iter().map(|v| v * self.score).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitClass {
    ExtremeEfficient,
    EfficientNonextreme,
    WeaklyEfficient,
    Inefficient,
}

impl UnitClass {
    pub fn is_efficient(self) -> bool {
        matches!(self, UnitClass::ExtremeEfficient | UnitClass::EfficientNonextreme)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UnitClass::ExtremeEfficient => "extreme-efficient",
            UnitClass::EfficientNonextreme => "efficient-nonextreme",
            UnitClass::WeaklyEfficient => "weakly-efficient",
            UnitClass::Inefficient => "inefficient",
        }
    }
}

impl fmt::Display for UnitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Both orientations and the resulting class of one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitEvaluation {
    pub input: EfficiencyResult,
    /// `None` for a unit with an all-zero output vector.
    pub output: Option<EfficiencyResult>,
    pub class: UnitClass,
}

impl UnitEvaluation {
    pub fn theta(&self) -> f64 {
        self.input.score
    }

    pub fn eta(&self) -> Option<f64> {
        self.output.as_ref().map(|o| o.score)
    }

    /// Non-efficient unit whose stage-2 slacks are nonzero in the given orientation.
    pub fn weak_in(&self, orientation: Orientation, zero_tol: f64) -> bool {
        if self.class.is_efficient() {
            return false;
        }
        match orientation {
            Orientation::Input => self.input.has_slack(zero_tol),
            Orientation::Output => self.output.as_ref().is_some_and(|o| o.has_slack(zero_tol)),
        }
    }

    pub fn weak_projection(&self, zero_tol: f64) -> bool {
        self.weak_in(Orientation::Input, zero_tol) || self.weak_in(Orientation::Output, zero_tol)
    }
}

fn norm_x(ds: &Dataset, j: usize, k: usize) -> f64 {
    ds.input(j)[k] / ds.scales().input_scale[k]
}

fn norm_y(ds: &Dataset, j: usize, i: usize) -> f64 {
    ds.output(j)[i] / ds.scales().output_scale[i]
}

fn check_dims(ds: &Dataset, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != ds.num_inputs() {
        return Err(Error::DimensionMismatch { what: "point inputs", expected: ds.num_inputs(), got: x.len() });
    }
    if y.len() != ds.num_outputs() {
        return Err(Error::DimensionMismatch { what: "point outputs", expected: ds.num_outputs(), got: y.len() });
    }
    Ok(())
}

/// Shared row structure of the two envelopment models: variables are
/// `λ (n) | s⁻ (m) | s⁺ (r) | score`.
fn envelopment_problem(ds: &Dataset, target: &Point, orientation: Orientation) -> LpProblem {
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    let score = n + m + r;
    let s = ds.scales();
    let mut c = vec![0.0; score + 1];
    c[score] = match orientation {
        Orientation::Input => 1.0,
        Orientation::Output => -1.0,
    };
    let mut p = LpProblem::new(c);
    for k in 0..m {
        let mut row = vec![0.0; score + 1];
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = norm_x(ds, j, k);
        }
        row[n + k] = 1.0;
        let xo = target.x()[k] / s.input_scale[k];
        let rhs = match orientation {
            Orientation::Input => {
                row[score] = -xo;
                0.0
            }
            Orientation::Output => xo,
        };
        p.add_row(&row, RowSense::Eq, rhs).expect("row width matches");
    }
    for i in 0..r {
        let mut row = vec![0.0; score + 1];
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = norm_y(ds, j, i);
        }
        row[n + m + i] = -1.0;
        let yo = target.y()[i] / s.output_scale[i];
        let rhs = match orientation {
            Orientation::Input => yo,
            Orientation::Output => {
                row[score] = -yo;
                0.0
            }
        };
        p.add_row(&row, RowSense::Eq, rhs).expect("row width matches");
    }
    let mut conv = vec![0.0; score + 1];
    conv[..n].fill(1.0);
    p.add_row(&conv, RowSense::Eq, 1.0).expect("row width matches");
    p
}

fn bcc(ds: &Dataset, target: &Point, orientation: Orientation) -> Result<EfficiencyResult> {
    ds.check_point(target)?;
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    if orientation == Orientation::Output && target.y().iter().all(|&v| v == 0.0) {
        return Err(Error::input("output orientation is undefined for a zero output vector"));
    }
    let problem = envelopment_problem(ds, target, orientation);
    let mut stage2 = vec![0.0; n + m + r + 1];
    stage2[n..n + m + r].fill(-1.0);
    let first = solve_lp(&problem)?;
    if first.status != LpStatus::Optimal {
        return Err(Error::OutsidePps);
    }
    let score = match orientation {
        Orientation::Input => first.objective_value,
        Orientation::Output => -first.objective_value,
    };
    let outside = match orientation {
        Orientation::Input => score > 1.0 + SCORE_SLACK,
        Orientation::Output => score < 1.0 - SCORE_SLACK,
    };
    if outside {
        return Err(Error::OutsidePps);
    }
    // Stage 2 holds the score variable at its optimum and maximizes slack.
    let score_var = n + m + r;
    let raw = first.primal[score_var];
    let mut fixed = problem.with_objective(&stage2)?;
    fixed.set_bounds(score_var, raw, raw)?;
    let mut second = solve_lp(&fixed)?;
    if second.status != LpStatus::Optimal {
        second = solve_lexicographic(&problem, &stage2)?.1.expect("stage 1 was optimal");
    }
    if second.status != LpStatus::Optimal {
        return Err(Error::Numerical {
            iterations: second.iterations,
            detail: "slack-maximization stage did not reach an optimum".into(),
        });
    }
    let v = &second.primal;
    let sc = ds.scales();
    let lambdas = v[..n].to_vec();
    let projection = combination(ds, &lambdas);
    // Slacks are recomputed at the exact optimal score so that the band
    // allowed in the second stage does not show up as slack.
    let (xs, ys) = match orientation {
        Orientation::Input => (score, 1.0),
        Orientation::Output => (1.0, score),
    };
    let snap = |v: f64, scale: f64| if v <= SLACK_FLOOR * scale { 0.0 } else { v };
    let input_slacks: Vec<f64> = (0..m)
        .map(|k| snap(xs * target.x()[k] - projection.x()[k], sc.input_scale[k]))
        .collect();
    let output_slacks: Vec<f64> = (0..r)
        .map(|i| snap(projection.y()[i] - ys * target.y()[i], sc.output_scale[i]))
        .collect();
    let max_scaled_slack = (0..m)
        .map(|k| input_slacks[k] / sc.input_scale[k])
        .chain((0..r).map(|i| output_slacks[i] / sc.output_scale[i]))
        .fold(0.0f64, f64::max);
    Ok(EfficiencyResult {
        orientation,
        score,
        input_slacks,
        output_slacks,
        lambdas,
        projection,
        max_scaled_slack,
    })
}

fn combination(ds: &Dataset, lambdas: &[f64]) -> Point {
    let mut x = vec![0.0; ds.num_inputs()];
    let mut y = vec![0.0; ds.num_outputs()];
    for (j, &l) in lambdas.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        for (a, b) in x.iter_mut().zip(ds.input(j)) {
            *a += l * b;
        }
        for (a, b) in y.iter_mut().zip(ds.output(j)) {
            *a += l * b;
        }
    }
    Point::unchecked(x, y)
}

/// Input-oriented BCC score of `target` with maximal slacks at θ = θ*.
pub fn bcc_input(ds: &Dataset, target: &Point) -> Result<EfficiencyResult> {
    bcc(ds, target, Orientation::Input)
}

/// Output-oriented BCC score of `target` with maximal slacks at η = η*.
pub fn bcc_output(ds: &Dataset, target: &Point) -> Result<EfficiencyResult> {
    bcc(ds, target, Orientation::Output)
}

pub fn bcc_oriented(ds: &Dataset, target: &Point, orientation: Orientation) -> Result<EfficiencyResult> {
    bcc(ds, target, orientation)
}

/// Largest δ (in column-range units, possibly negative) such that
/// `(x − δ·range, y + δ·range)` is still in the set spanned by the units
/// not in `exclude`. `−∞` if no unit remains.
pub(crate) fn signed_gap(ds: &Dataset, x: &[f64], y: &[f64], exclude: &[usize]) -> Result<f64> {
    check_dims(ds, x, y)?;
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let units: Vec<usize> = (0..ds.len()).filter(|j| !exclude.contains(j)).collect();
    if units.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let nl = units.len();
    let delta = nl;
    let mut c = vec![0.0; nl + 1];
    c[delta] = -1.0;
    let mut p = LpProblem::new(c);
    p.set_bounds(delta, f64::NEG_INFINITY, f64::INFINITY)?;
    let sc = ds.scales();
    for k in 0..m {
        let mut row: Vec<f64> = units.iter().map(|&j| norm_x(ds, j, k)).collect();
        row.push(sc.input_range[k] / sc.input_scale[k]);
        p.add_row(&row, RowSense::Le, x[k] / sc.input_scale[k])?;
    }
    for i in 0..r {
        let mut row: Vec<f64> = units.iter().map(|&j| norm_y(ds, j, i)).collect();
        row.push(-sc.output_range[i] / sc.output_scale[i]);
        p.add_row(&row, RowSense::Ge, y[i] / sc.output_scale[i])?;
    }
    let mut conv = vec![1.0; nl + 1];
    conv[delta] = 0.0;
    p.add_row(&conv, RowSense::Eq, 1.0)?;
    let s = solve_lp(&p)?;
    match s.status {
        LpStatus::Optimal => Ok(s.primal[delta]),
        _ => Err(Error::Numerical {
            iterations: s.iterations,
            detail: "gap problem is always feasible and bounded".into(),
        }),
    }
}

pub(crate) fn membership_tol(ds: &Dataset, x: &[f64], y: &[f64]) -> f64 {
    let sc = ds.scales();
    let big = x
        .iter()
        .zip(&sc.input_range)
        .chain(y.iter().zip(&sc.output_range))
        .fold(0.0f64, |a, (v, s)| a.max((v / s).abs()));
    FEAS_TOL * (1.0 + big)
}

pub(crate) fn contains(ds: &Dataset, x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(signed_gap(ds, x, y, &[])? >= -membership_tol(ds, x, y))
}

/// Whether `p` belongs to the production possibility set spanned by `ds`.
pub fn membership(ds: &Dataset, p: &Point) -> Result<bool> {
    contains(ds, p.x(), p.y())
}

pub(crate) fn gap_raw(ds: &Dataset, x: &[f64], y: &[f64]) -> Result<f64> {
    let d = signed_gap(ds, x, y, &[])?;
    if d < -membership_tol(ds, x, y) {
        return Err(Error::OutsidePps);
    }
    Ok(d.max(0.0))
}

/// Largest uniform improvement δ ≥ 0 (inputs down, outputs up, in
/// column-range units) that keeps `p` inside the set. Zero exactly on the
/// boundary.
pub fn wpe_gap(ds: &Dataset, p: &Point) -> Result<f64> {
    ds.check_point(p)?;
    gap_raw(ds, p.x(), p.y())
}

/// Additive model: maximal normalized slack sum at `p` with no radial
/// contraction. Returns the sum and the optimal λ.
pub fn additive(ds: &Dataset, p: &Point) -> Result<(f64, Vec<f64>)> {
    ds.check_point(p)?;
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    let mut c = vec![0.0; n + m + r];
    c[n..].fill(-1.0);
    let mut prob = LpProblem::new(c);
    let sc = ds.scales();
    for k in 0..m {
        let mut row = vec![0.0; n + m + r];
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = norm_x(ds, j, k);
        }
        row[n + k] = 1.0;
        prob.add_row(&row, RowSense::Eq, p.x()[k] / sc.input_scale[k])?;
    }
    for i in 0..r {
        let mut row = vec![0.0; n + m + r];
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = norm_y(ds, j, i);
        }
        row[n + m + i] = -1.0;
        prob.add_row(&row, RowSense::Eq, p.y()[i] / sc.output_scale[i])?;
    }
    let mut conv = vec![0.0; n + m + r];
    conv[..n].fill(1.0);
    prob.add_row(&conv, RowSense::Eq, 1.0)?;
    let s = solve_lp(&prob)?;
    if s.status != LpStatus::Optimal {
        return Err(Error::OutsidePps);
    }
    Ok((-s.objective_value, s.primal[..n].to_vec()))
}

/// Pareto efficiency of unit `j` through the additive model (one LP).
pub fn is_efficient(ds: &Dataset, j: usize, zero_tol: f64) -> Result<bool> {
    ds.check_index(j)?;
    if ds.output(j).iter().all(|&v| v == 0.0) {
        return Ok(false);
    }
    Ok(additive(ds, &ds.point(j))?.0 <= zero_tol)
}

/// Whether unit `j` can be written as a convex combination of units at
/// other locations plus free disposal. Exact duplicates of `j` are left out
/// so that a repeated vertex still counts as a vertex.
pub(crate) fn representable_without(ds: &Dataset, j: usize) -> Result<bool> {
    let (x, y) = (ds.input(j), ds.output(j));
    let twins: Vec<usize> = (0..ds.len())
        .filter(|&u| ds.input(u) == x && ds.output(u) == y)
        .collect();
    Ok(signed_gap(ds, x, y, &twins)? >= -membership_tol(ds, x, y))
}

/// Both orientations plus the class of unit `j`.
pub fn evaluate_unit(ds: &Dataset, j: usize, zero_tol: f64) -> Result<UnitEvaluation> {
    ds.check_index(j)?;
    let p = ds.point(j);
    let input = bcc_input(ds, &p)?;
    let zero_output = p.y().iter().all(|&v| v == 0.0);
    let output = if zero_output { None } else { Some(bcc_output(ds, &p)?) };
    let theta_one = input.score_is_one(zero_tol);
    let class = match &output {
        None => {
            if theta_one {
                UnitClass::WeaklyEfficient
            } else {
                UnitClass::Inefficient
            }
        }
        Some(out) => {
            let eta_one = out.score_is_one(zero_tol);
            if theta_one && eta_one {
                if input.has_slack(zero_tol) || out.has_slack(zero_tol) {
                    UnitClass::WeaklyEfficient
                } else if representable_without(ds, j)? {
                    UnitClass::EfficientNonextreme
                } else {
                    UnitClass::ExtremeEfficient
                }
            } else {
                UnitClass::Inefficient
            }
        }
    };
    Ok(UnitEvaluation { input, output, class })
}

pub fn classify(ds: &Dataset, j: usize) -> Result<UnitClass> {
    Ok(evaluate_unit(ds, j, ZERO_TOL)?.class)
}

/// Evaluates every unit in parallel.
pub fn evaluate_all(ds: &Dataset, zero_tol: f64) -> Result<Vec<UnitEvaluation>> {
    (0..ds.len())
        .into_par_iter()
        .map(|j| evaluate_unit(ds, j, zero_tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Dataset {
        Dataset::new(
            vec!["E".into(), "D".into(), "C".into()],
            vec![vec![1.0, 4.0], vec![2.0, 2.0], vec![4.0, 1.0]],
            vec![vec![1.0], vec![1.0], vec![1.0]],
        )
        .unwrap()
    }

    fn pt(x: &[f64], y: &[f64]) -> Point {
        Point::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn d3_plus(extra: &[(&str, Point)]) -> Dataset {
        let extra: Vec<_> = extra
            .iter()
            .map(|(id, p)| (id.to_string(), p.clone(), crate::dataset::Origin::Original))
            .collect();
        d3().extended(&extra).unwrap()
    }

    #[test]
    fn input_scores_on_desk_set() {
        let ds = d3();
        let e = bcc_input(&ds, &ds.point(0)).unwrap();
        assert!((e.score - 1.0).abs() < 1e-9);
        assert!(e.max_scaled_slack < 1e-7, "{e:?}");

        let r = bcc_input(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap();
        assert!((r.score - 0.5).abs() < 1e-9);
        assert!(r.max_scaled_slack < 1e-6);
        assert!((r.projection.x()[0] - 2.0).abs() < 1e-6 && (r.projection.x()[1] - 2.0).abs() < 1e-6);

        let g = bcc_input(&ds, &pt(&[1.0, 6.0], &[1.0])).unwrap();
        assert!((g.score - 1.0).abs() < 1e-9);
        assert!(g.input_slacks[0].abs() < 1e-6);
        assert!((g.input_slacks[1] - 2.0).abs() < 1e-6);
        assert!((g.lambdas[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn output_scores_on_desk_set() {
        let ds = d3();
        let d = bcc_output(&ds, &ds.point(1)).unwrap();
        assert!((d.score - 1.0).abs() < 1e-9);
        let h = bcc_output(&ds, &pt(&[2.0, 2.0], &[0.5])).unwrap();
        assert!((h.score - 2.0).abs() < 1e-9);
        assert!(h.max_scaled_slack < 1e-6);
        assert!(matches!(bcc_output(&ds, &pt(&[1.0, 3.0], &[1.0])), Err(Error::OutsidePps)));
        assert!(matches!(bcc_output(&ds, &pt(&[1.0, 3.0], &[0.0])), Err(Error::Input(_))));
    }

    #[test]
    fn input_orientation_rejects_points_outside() {
        let ds = d3();
        assert!(matches!(bcc_input(&ds, &pt(&[0.5, 0.5], &[1.0])), Err(Error::OutsidePps)));
        assert!(matches!(bcc_input(&ds, &pt(&[4.0, 4.0], &[2.0])), Err(Error::OutsidePps)));
        assert!(bcc_input(&ds, &pt(&[1.0], &[1.0])).is_err());
    }

    #[test]
    fn membership_and_gap() {
        let ds = d3();
        for j in 0..3 {
            assert!(membership(&ds, &ds.point(j)).unwrap());
        }
        assert!(membership(&ds, &pt(&[10.0, 10.0], &[0.5])).unwrap());
        assert!(!membership(&ds, &pt(&[0.5, 0.5], &[1.0])).unwrap());

        assert!(wpe_gap(&ds, &ds.point(1)).unwrap() <= ZERO_TOL);
        assert!(wpe_gap(&ds, &pt(&[1.0, 6.0], &[1.0])).unwrap() <= ZERO_TOL);
        assert!(wpe_gap(&ds, &pt(&[0.5, 0.5], &[1.0])).is_err());
        // outputs cannot rise above 1 in this set, so the gap is zero even at (4, 4)
        assert!(wpe_gap(&ds, &pt(&[4.0, 4.0], &[1.0])).unwrap() <= ZERO_TOL);
        assert!(wpe_gap(&ds, &pt(&[4.0, 4.0], &[0.5])).unwrap() > 0.1);
    }

    #[test]
    fn classification_on_desk_set() {
        let g = pt(&[1.0, 6.0], &[1.0]);
        let ineff = pt(&[4.0, 4.0], &[1.0]);
        let mid = pt(&[1.5, 3.0], &[1.0]);
        let ds = d3_plus(&[("G", g), ("F", ineff), ("M", mid)]);
        assert_eq!(classify(&ds, 0).unwrap(), UnitClass::ExtremeEfficient);
        assert_eq!(classify(&ds, 1).unwrap(), UnitClass::ExtremeEfficient);
        assert_eq!(classify(&ds, 3).unwrap(), UnitClass::WeaklyEfficient);
        assert_eq!(classify(&ds, 4).unwrap(), UnitClass::Inefficient);
        assert_eq!(classify(&ds, 5).unwrap(), UnitClass::EfficientNonextreme);
        assert!(classify(&ds, 9).is_err());
    }

    #[test]
    fn additive_agrees_with_classification() {
        let ds = d3_plus(&[("G", pt(&[1.0, 6.0], &[1.0])), ("M", pt(&[1.5, 3.0], &[1.0]))]);
        let evals = evaluate_all(&ds, ZERO_TOL).unwrap();
        for (j, e) in evals.iter().enumerate() {
            assert_eq!(is_efficient(&ds, j, ZERO_TOL).unwrap(), e.class.is_efficient(), "unit {j}");
        }
    }

    #[test]
    fn zero_output_unit_is_never_efficient() {
        let ds = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.5], vec![1.0]],
            vec![vec![0.0], vec![1.0]],
        )
        .unwrap();
        let e = evaluate_unit(&ds, 0, ZERO_TOL).unwrap();
        assert!(e.output.is_none());
        assert!(!e.class.is_efficient());
        assert!(!is_efficient(&ds, 0, ZERO_TOL).unwrap());
    }
}
