//! Terminal units: extreme-efficient units from which an infinite edge of
//! the production possibility set emanates.
//!
//! The edge test works on the generator representation
//! `p = Σλ_j Z_j + Σμ_k (e_k, 0) − Σν_i (0, e_i)`, `Σλ = 1`. A ray
//! `Z_j + t·d` is an edge exactly when a probe on it is a boundary point whose
//! minimal face is spanned by `Z_j` and `d` alone.

use std::fmt;

use rayon::prelude::*;

use crate::dataset::{Dataset, Point};
use crate::dea::{self, UnitClass, ZERO_TOL};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus, RowSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectionKind {
    InputIncrease,
    OutputDecrease,
}

/// A recession direction of the set: `(e_k, 0)` or `−(0, e_i)`.
///
/// `axis` is zero-based; the textual form is one-based, e.g.
/// `input-increase:2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub kind: DirectionKind,
    pub axis: usize,
}

impl Direction {
    pub fn input_increase(axis: usize) -> Self {
        Self { kind: DirectionKind::InputIncrease, axis }
    }

    pub fn output_decrease(axis: usize) -> Self {
        Self { kind: DirectionKind::OutputDecrease, axis }
    }

    /// Index of the moved coordinate in the concatenated `(x, y)` order.
    pub fn coordinate(&self, m: usize) -> usize {
        match self.kind {
            DirectionKind::InputIncrease => self.axis,
            DirectionKind::OutputDecrease => m + self.axis,
        }
    }

    /// +1 for input-increase, −1 for output-decrease.
    pub fn sign(&self) -> f64 {
        match self.kind {
            DirectionKind::InputIncrease => 1.0,
            DirectionKind::OutputDecrease => -1.0,
        }
    }

    /// All `m + r` disposal directions in canonical order.
    pub fn all(m: usize, r: usize) -> Vec<Direction> {
        (0..m)
            .map(Direction::input_increase)
            .chain((0..r).map(Direction::output_decrease))
            .collect()
    }

    pub(crate) fn check(&self, m: usize, r: usize) -> Result<()> {
        let limit = match self.kind {
            DirectionKind::InputIncrease => m,
            DirectionKind::OutputDecrease => r,
        };
        if self.axis >= limit {
            return Err(Error::input(format!("direction axis {} out of range", self.axis + 1)));
        }
        Ok(())
    }

    /// `p + step·d`, with `step` in data units.
    pub fn shift(&self, p: &Point, step: f64) -> Point {
        let mut q = p.clone();
        match self.kind {
            DirectionKind::InputIncrease => q.x_mut()[self.axis] += step,
            DirectionKind::OutputDecrease => q.y_mut()[self.axis] -= step,
        }
        q
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DirectionKind::InputIncrease => "input-increase",
            DirectionKind::OutputDecrease => "output-decrease",
        };
        write!(f, "{kind}:{}", self.axis + 1)
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, axis) = s
            .split_once(':')
            .ok_or_else(|| Error::input(format!("bad direction `{s}`")))?;
        let axis: usize = axis
            .parse()
            .ok()
            .filter(|&a| a >= 1)
            .ok_or_else(|| Error::input(format!("bad direction axis in `{s}`")))?;
        match kind {
            "input-increase" => Ok(Direction::input_increase(axis - 1)),
            "output-decrease" => Ok(Direction::output_decrease(axis - 1)),
            _ => Err(Error::input(format!("bad direction kind in `{s}`"))),
        }
    }
}

/// Generators with a strictly positive coefficient in some representation
/// of a point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FaceGenerators {
    pub units: Vec<usize>,
    pub directions: Vec<Direction>,
}

/// Representation system over `λ (n) | μ (m) | ν (r)` in normalized
/// coordinates. The objective may be longer to carry auxiliary variables.
fn representation(ds: &Dataset, x: &[f64], y: &[f64], objective: Vec<f64>) -> LpProblem {
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    let sc = ds.scales();
    let mut p = LpProblem::new(objective);
    for k in 0..m {
        let mut row: Vec<(usize, f64)> = (0..n).map(|j| (j, ds.input(j)[k] / sc.input_scale[k])).collect();
        row.push((n + k, 1.0));
        p.add_sparse_row(&row, RowSense::Eq, x[k] / sc.input_scale[k]).expect("indices in range");
    }
    for i in 0..r {
        let mut row: Vec<(usize, f64)> = (0..n).map(|j| (j, ds.output(j)[i] / sc.output_scale[i])).collect();
        row.push((n + m + i, -1.0));
        p.add_sparse_row(&row, RowSense::Eq, y[i] / sc.output_scale[i]).expect("indices in range");
    }
    let conv: Vec<(usize, f64)> = (0..n).map(|j| (j, 1.0)).collect();
    p.add_sparse_row(&conv, RowSense::Eq, 1.0).expect("indices in range");
    p
}

fn generator_count(ds: &Dataset) -> usize {
    ds.len() + ds.num_inputs() + ds.num_outputs()
}

fn split_generators(ds: &Dataset, found: impl IntoIterator<Item = usize>) -> FaceGenerators {
    let (n, m) = (ds.len(), ds.num_inputs());
    let mut out = FaceGenerators::default();
    for g in found {
        if g < n {
            out.units.push(g);
        } else if g < n + m {
            out.directions.push(Direction::input_increase(g - n));
        } else {
            out.directions.push(Direction::output_decrease(g - n - m));
        }
    }
    out.units.sort_unstable();
    out.directions.sort_unstable();
    out
}

/// Largest attainable coefficient of generator `g` (units first, then input
/// directions, then output directions) in a representation of `(x, y)`.
/// Direction coefficients are in normalized units and may be unbounded.
pub(crate) fn max_coefficient_raw(ds: &Dataset, x: &[f64], y: &[f64], g: usize) -> Result<f64> {
    let mut c = vec![0.0; generator_count(ds)];
    c[g] = -1.0;
    let s = solve_lp(&representation(ds, x, y, c))?;
    match s.status {
        LpStatus::Optimal => Ok(-s.objective_value),
        LpStatus::Unbounded => Ok(f64::INFINITY),
        LpStatus::Infeasible => Err(Error::OutsidePps),
    }
}

/// Per-generator route: one LP per generator.
pub fn minimal_face_generators_exhaustive(ds: &Dataset, p: &Point, zero_tol: f64) -> Result<FaceGenerators> {
    ds.check_point(p)?;
    let mut found = Vec::new();
    for g in 0..generator_count(ds) {
        if max_coefficient_raw(ds, p.x(), p.y(), g)? > zero_tol {
            found.push(g);
        }
    }
    Ok(split_generators(ds, found))
}

/// Repeatedly maximizes `Σ min(coef_g, 1)` over undecided generators; every
/// generator seen above `zero_tol` is decided positive. Stops when the
/// optimum drops to `zero_tol`.
pub(crate) fn face_generators_raw(ds: &Dataset, x: &[f64], y: &[f64], zero_tol: f64) -> Result<FaceGenerators> {
    let total = generator_count(ds);
    let mut undecided: Vec<usize> = (0..total).collect();
    let mut found = Vec::new();
    while !undecided.is_empty() {
        let u = undecided.len();
        let mut c = vec![0.0; total + u];
        c[total..].fill(-1.0);
        let mut lp = representation(ds, x, y, c);
        for (slot, &g) in undecided.iter().enumerate() {
            let t = total + slot;
            lp.set_bounds(t, 0.0, 1.0)?;
            lp.add_sparse_row(&[(g, 1.0), (t, -1.0)], RowSense::Ge, 0.0)?;
        }
        let s = solve_lp(&lp)?;
        if s.status == LpStatus::Infeasible {
            return Err(Error::OutsidePps);
        }
        if s.status != LpStatus::Optimal {
            return Err(Error::Numerical {
                iterations: s.iterations,
                detail: "bounded face problem reported unbounded".into(),
            });
        }
        if -s.objective_value <= zero_tol {
            break;
        }
        let before = found.len();
        undecided.retain(|&g| {
            if s.primal[g] > zero_tol {
                found.push(g);
                false
            } else {
                true
            }
        });
        if found.len() == before {
            for g in std::mem::take(&mut undecided) {
                if max_coefficient_raw(ds, x, y, g)? > zero_tol {
                    found.push(g);
                }
            }
        }
    }
    Ok(split_generators(ds, found))
}

/// Units and directions attaining a positive coefficient in some
/// representation of `p`.
pub fn minimal_face_generators(ds: &Dataset, p: &Point) -> Result<FaceGenerators> {
    ds.check_point(p)?;
    face_generators_raw(ds, p.x(), p.y(), ZERO_TOL)
}

pub fn is_extreme_efficient(ds: &Dataset, j: usize) -> Result<bool> {
    Ok(dea::classify(ds, j)? == UnitClass::ExtremeEfficient)
}

/// Edge test for the ray from unit `j` along `d`, probing at `probe` column
/// ranges. Assumes `j` is extreme-efficient.
///
/// The probe must have zero gap, and no representation of it may put weight
/// above `zero_tol` on a generator other than `d` and units lying on the ray
/// from `Z_j` (which covers duplicates of `j`).
pub fn is_edge(ds: &Dataset, j: usize, d: Direction, probe: f64, zero_tol: f64) -> Result<bool> {
    ds.check_index(j)?;
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    d.check(m, r)?;
    let coord = d.coordinate(m);
    let base = ds.point(j);
    let p = d.shift(&base, probe * ds.scales().range(coord));
    if dea::gap_raw(ds, p.x(), p.y())? > zero_tol {
        return Ok(false);
    }
    let sc = ds.scales();
    let on_ray = |u: usize| {
        let q = ds.point(u);
        (0..m + r).all(|c| {
            let diff = (q.coord(c) - base.coord(c)) / sc.scale(c);
            if c == coord {
                d.sign() * diff >= -zero_tol
            } else {
                diff.abs() <= zero_tol
            }
        })
    };
    let mut c = vec![0.0; generator_count(ds)];
    for (g, cg) in c.iter_mut().enumerate() {
        let allowed = if g < n { on_ray(g) } else { g == n + coord };
        if !allowed {
            *cg = -1.0;
        }
    }
    let s = solve_lp(&representation(ds, p.x(), p.y(), c))?;
    match s.status {
        LpStatus::Optimal => Ok(-s.objective_value <= zero_tol),
        LpStatus::Unbounded => Ok(false),
        LpStatus::Infeasible => Err(Error::OutsidePps),
    }
}

fn directions_for(ds: &Dataset, j: usize, probe: f64, zero_tol: f64) -> Result<Vec<Direction>> {
    let mut out = Vec::new();
    for d in Direction::all(ds.num_inputs(), ds.num_outputs()) {
        if is_edge(ds, j, d, probe, zero_tol)? {
            out.push(d);
        }
    }
    Ok(out)
}

/// Terminal directions of unit `j`; empty unless `j` is extreme-efficient.
pub fn terminal_directions(ds: &Dataset, j: usize) -> Result<Vec<Direction>> {
    terminal_directions_with_probe(ds, j, 1.0)
}

pub fn terminal_directions_with_probe(ds: &Dataset, j: usize, probe: f64) -> Result<Vec<Direction>> {
    if !is_extreme_efficient(ds, j)? {
        return Ok(Vec::new());
    }
    directions_for(ds, j, probe, ZERO_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminalEntry {
    pub index: usize,
    pub id: String,
    pub class: UnitClass,
    pub directions: Vec<Direction>,
}

/// One entry per unit in dataset order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TerminalReport {
    pub entries: Vec<TerminalEntry>,
}

impl TerminalReport {
    pub fn terminal(&self) -> impl Iterator<Item = &TerminalEntry> {
        self.entries.iter().filter(|e| !e.directions.is_empty())
    }

    pub fn terminal_ids(&self) -> Vec<&str> {
        self.terminal().map(|e| e.id.as_str()).collect()
    }

    pub fn directions_of(&self, id: &str) -> Option<&[Direction]> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.directions.as_slice())
    }

    pub fn extreme_count(&self) -> usize {
        self.entries.iter().filter(|e| e.class == UnitClass::ExtremeEfficient).count()
    }
}

pub fn find_terminal_units(ds: &Dataset) -> Result<TerminalReport> {
    find_terminal_units_with(ds, 1.0, ZERO_TOL)
}

pub fn find_terminal_units_with(ds: &Dataset, probe: f64, zero_tol: f64) -> Result<TerminalReport> {
    let entries = (0..ds.len())
        .into_par_iter()
        .map(|j| {
            let class = dea::evaluate_unit(ds, j, zero_tol)?.class;
            let directions = if class == UnitClass::ExtremeEfficient {
                directions_for(ds, j, probe, zero_tol)?
            } else {
                Vec::new()
            };
            Ok(TerminalEntry { index: j, id: ds.id(j).to_string(), class, directions })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TerminalReport { entries })
}
