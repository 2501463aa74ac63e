//! Frontier improvement: inserts artificial units so that terminal units stop
//! emitting infinite edges and inefficient units stop projecting onto weakly
//! efficient faces, while every originally efficient unit stays efficient.
//!
//! The pipeline has four parts:
//!
//! 1. one candidate per terminal unit, terminal direction and containing
//!    section, each tested alone against the original data;
//! 2. joint correction of the Part-1 units by shrinking their offsets;
//! 3. radial copies of weak projections, inserted one at a time;
//! 4. joint correction of the Part-3 units by moving them toward the
//!    frontier.
//!
//! Within the loops a unit counts as efficient when the additive model finds
//! no slack; the final certificate uses full classification.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::dataset::{ColumnScales, Dataset, Origin, Point};
use crate::dea::{self, Orientation, UnitClass, UnitEvaluation};
use crate::error::{Error, Result};
use crate::sections::{SectionKind, SectionSpec};
use crate::terminal::{self, Direction, DirectionKind, TerminalReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ImproveParams {
    /// Move along the terminal direction, in column-range units.
    pub along_step: f64,
    /// Initial offset off the terminal ray, in column-range units.
    pub exterior_offset: f64,
    pub shrink_factor: f64,
    /// Initial radial factor for weak-projection copies.
    pub radial_offset: f64,
    pub max_halvings: usize,
    pub zero_tol: f64,
    /// Shrink every Part-1 unit in a corrective round, not only the
    /// responsible ones.
    pub shrink_all: bool,
    /// Upper bound on sweeps over the weak projections.
    pub max_passes: usize,
    /// Orientations whose weak projections are removed and certified.
    pub orientations: OrientationFilter,
}

/// Which orientations a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrientationFilter {
    #[default]
    Both,
    Input,
    Output,
}

impl OrientationFilter {
    pub fn includes(self, o: Orientation) -> bool {
        match self {
            OrientationFilter::Both => true,
            OrientationFilter::Input => o == Orientation::Input,
            OrientationFilter::Output => o == Orientation::Output,
        }
    }
}

impl Default for ImproveParams {
    fn default() -> Self {
        Self {
            along_step: 0.5,
            exterior_offset: 0.25,
            shrink_factor: 0.5,
            radial_offset: 0.9,
            max_halvings: 50,
            zero_tol: dea::ZERO_TOL,
            shrink_all: false,
            max_passes: 10,
            orientations: OrientationFilter::Both,
        }
    }
}

impl ImproveParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("along_step", self.along_step),
            ("exterior_offset", self.exterior_offset),
            ("shrink_factor", self.shrink_factor),
            ("radial_offset", self.radial_offset),
            ("zero_tol", self.zero_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("{name} must be positive, got {v}")));
            }
        }
        if self.shrink_factor >= 1.0 {
            return Err(Error::input("shrink_factor must be below 1"));
        }
        if self.radial_offset >= 1.0 {
            return Err(Error::input("radial_offset must be below 1"));
        }
        if self.max_halvings < 1 || self.max_passes < 1 {
            return Err(Error::input("max_halvings and max_passes must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Terminal { unit: String, direction: Direction, axes: (String, String) },
    Projection { unit: String, orientation: Orientation },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Terminal { unit, direction, axes } => {
                write!(f, "part1:{unit}:{direction}:{}+{}", axes.0, axes.1)
            }
            Provenance::Projection { unit, orientation } => write!(f, "part3:{unit}:{orientation}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtificialStatus {
    Kept,
    DeletedInefficient,
    AbandonedUnderflow,
    /// The first candidate already lay inside the set.
    AbandonedInside,
    AbandonedDuplicate,
    AbandonedDegenerate,
}

impl ArtificialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ArtificialStatus::Kept => "kept",
            ArtificialStatus::DeletedInefficient => "deleted-inefficient",
            ArtificialStatus::AbandonedUnderflow => "abandoned-underflow",
            ArtificialStatus::AbandonedInside => "abandoned-inside",
            ArtificialStatus::AbandonedDuplicate => "abandoned-duplicate",
            ArtificialStatus::AbandonedDegenerate => "abandoned-degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Placement {
    Terminal {
        anchor: Point,
        direction: Direction,
        section: SectionSpec,
        step: f64,
        paired_range: f64,
        epsilon: f64,
    },
    Radial {
        source: Point,
        orientation: Orientation,
        score: f64,
        alpha: f64,
    },
}

impl Placement {
    fn point(&self) -> Result<Point> {
        match self {
            Placement::Terminal { anchor, direction, section, step, paired_range, epsilon } => {
                candidate_artificial(anchor, *direction, section, *step, epsilon * paired_range)
            }
            Placement::Radial { source, orientation, score, alpha } => Ok(radial_candidate(source, *orientation, *score, *alpha)),
        }
    }

    /// ε in range units, or `1 − α`.
    fn offset(&self) -> f64 {
        match self {
            Placement::Terminal { epsilon, .. } => *epsilon,
            Placement::Radial { alpha, .. } => 1.0 - alpha,
        }
    }

    fn part(&self) -> u8 {
        match self {
            Placement::Terminal { .. } => 1,
            Placement::Radial { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtificialUnit {
    pub id: String,
    pub point: Point,
    pub provenance: Provenance,
    /// Final ε (range units) for Part-1 units, `1 − α` for Part-3 units.
    pub offset: f64,
    pub status: ArtificialStatus,
    pub(crate) placement: Placement,
    /// Moves toward the frontier so far, capped by `max_halvings`.
    pub(crate) shrinks: usize,
}

/// One run-log event.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub part: u8,
    pub unit: String,
    pub direction: Option<Direction>,
    pub axes: Option<(String, String)>,
    pub epsilon: f64,
    pub accepted: bool,
    pub efficient_count: usize,
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let direction = self.direction.map_or_else(|| "-".to_string(), |d| d.to_string());
        let section = self.axes.as_ref().map_or_else(|| "-".to_string(), |(a, b)| format!("{a},{b}"));
        write!(
            f,
            "part={} unit={} direction={} section={} epsilon={} accepted={} efficient_count={}",
            self.part, self.unit, direction, section, self.epsilon, self.accepted, self.efficient_count
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitSummary {
    pub id: String,
    pub class: UnitClass,
    pub theta: f64,
    pub eta: Option<f64>,
    pub input_slack: f64,
    pub output_slack: Option<f64>,
    pub weak_projection: bool,
}

impl UnitSummary {
    fn from_eval(id: &str, e: &UnitEvaluation, zero_tol: f64) -> Self {
        Self {
            id: id.to_string(),
            class: e.class,
            theta: e.theta(),
            eta: e.eta(),
            input_slack: e.input.max_scaled_slack,
            output_slack: e.output.as_ref().map(|o| o.max_scaled_slack),
            weak_projection: e.weak_projection(zero_tol),
        }
    }
}

/// Outcome of checking the three guarantees on an improved dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Certificate {
    /// Originally efficient units that are no longer efficient.
    pub broken: Vec<String>,
    /// Original units that are still terminal.
    pub terminal_originals: Vec<String>,
    /// Non-efficient original units that still have slack in some orientation.
    pub residual_weak: Vec<String>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.broken.is_empty() && self.terminal_originals.is_empty() && self.residual_weak.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ImprovementResult {
    /// Originals followed by the kept artificial units.
    pub improved: Dataset,
    pub artificials: Vec<ArtificialUnit>,
    pub log: Vec<LogRecord>,
    pub before: Vec<UnitSummary>,
    pub after: Vec<UnitSummary>,
    pub terminal_before: TerminalReport,
    pub certificate: Certificate,
}

impl ImprovementResult {
    pub fn kept(&self) -> impl Iterator<Item = &ArtificialUnit> {
        self.artificials.iter().filter(|a| a.status == ArtificialStatus::Kept)
    }
}

/// Moves `unit` by `t` along `d` and offsets the section's other axis by
/// `epsilon` in the improving sense (input down, output up). Both `t` and
/// `epsilon` are in data units; coordinates are clamped at zero.
pub fn candidate_artificial(unit: &Point, d: Direction, section: &SectionSpec, t: f64, epsilon: f64) -> Result<Point> {
    let (m, r) = (unit.x().len(), unit.y().len());
    d.check(m, r)?;
    section.validate(m, r)?;
    let coord = d.coordinate(m);
    let paired = section
        .paired_coord(m, coord)
        .ok_or_else(|| Error::input(format!("section {} does not contain the axis of {d}", section.kind)))?;
    let mut x = unit.x().to_vec();
    let mut y = unit.y().to_vec();
    match d.kind {
        DirectionKind::InputIncrease => x[d.axis] += t,
        DirectionKind::OutputDecrease => y[d.axis] = (y[d.axis] - t).max(0.0),
    }
    if paired < m {
        let before = x[paired];
        let after = before - epsilon;
        if after < 0.0 {
            x[paired] = 0.0;
            if before <= 0.0 {
                return Err(Error::DegeneratePlacement(format!(
                    "input {} is already zero, no room for an offset",
                    paired + 1
                )));
            }
        } else {
            x[paired] = after;
        }
    } else {
        y[paired - m] += epsilon;
    }
    Point::new(x, y)
}

fn radial_candidate(source: &Point, orientation: Orientation, score: f64, alpha: f64) -> Point {
    match orientation {
        Orientation::Input => Point::unchecked(source.x().iter().map(|v| v * score * alpha).collect(), source.y().to_vec()),
        Orientation::Output => Point::unchecked(source.x().to_vec(), source.y().iter().map(|v| v * score / alpha).collect()),
    }
}

/// Sections containing the axis of `d`, paired with every other coordinate
/// of the opposite or same block as allowed by the section kinds.
pub fn containing_sections(ds: &Dataset, j: usize, d: Direction) -> Vec<SectionSpec> {
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let mut out = Vec::new();
    match d.kind {
        DirectionKind::InputIncrease => {
            for other in (0..m).filter(|&k| k != d.axis) {
                out.push(SectionSpec::through_unit(ds, j, SectionKind::S1, d.axis, other));
            }
            for i in 0..r {
                out.push(SectionSpec::through_unit(ds, j, SectionKind::S3, d.axis, i));
            }
        }
        DirectionKind::OutputDecrease => {
            for other in (0..r).filter(|&i| i != d.axis) {
                out.push(SectionSpec::through_unit(ds, j, SectionKind::S2, d.axis, other));
            }
            for s in 0..m {
                out.push(SectionSpec::through_unit(ds, j, SectionKind::S3, s, d.axis));
            }
        }
    }
    out
}

/// Working state: the original data plus the artificial units in play.
struct Workspace<'a> {
    original: &'a Dataset,
    scales: ColumnScales,
    params: &'a ImproveParams,
    /// Indices (into `original`) of originally efficient units.
    efficient0: Vec<usize>,
    artificials: Vec<ArtificialUnit>,
    log: Vec<LogRecord>,
    next_id: usize,
}

impl<'a> Workspace<'a> {
    fn active(&self) -> Vec<usize> {
        (0..self.artificials.len())
            .filter(|&a| self.artificials[a].status == ArtificialStatus::Kept)
            .collect()
    }

    fn assemble_with(&self, active: &[usize], extra: Option<(&str, &Point)>) -> Result<Dataset> {
        let mut rows: Vec<(String, Point, Origin)> = active
            .iter()
            .map(|&a| (self.artificials[a].id.clone(), self.artificials[a].point.clone(), Origin::Artificial))
            .collect();
        if let Some((id, p)) = extra {
            rows.push((id.to_string(), p.clone(), Origin::Artificial));
        }
        self.original.extended(&rows)
    }

    fn fresh_id(&mut self) -> String {
        loop {
            self.next_id += 1;
            let id = format!("art{}", self.next_id);
            if self.original.index_of(&id).is_none() && self.artificials.iter().all(|a| a.id != id) {
                return id;
            }
        }
    }

    /// Originally efficient units that the additive model finds inefficient
    /// on `ds`, with their intensity vectors.
    fn broken(&self, ds: &Dataset) -> Result<Vec<(usize, Vec<f64>)>> {
        let tol = self.params.zero_tol;
        let found: Vec<Option<(usize, Vec<f64>)>> = self
            .efficient0
            .par_iter()
            .map(|&o| {
                let (sum, lambdas) = dea::additive(ds, &ds.point(o))?;
                Ok((sum > tol).then_some((o, lambdas)))
            })
            .collect::<Result<_>>()?;
        Ok(found.into_iter().flatten().collect())
    }

    /// Whether `p` coincides with a unit of `ds` or a kept artificial unit.
    fn is_duplicate(&self, ds: &Dataset, p: &Point) -> bool {
        let (m, r) = (ds.num_inputs(), ds.num_outputs());
        let same = |q: &Point| {
            (0..m + r).all(|c| ((q.coord(c) - p.coord(c)) / self.scales.scale(c)).abs() <= self.params.zero_tol)
        };
        (0..ds.len()).any(|j| same(&ds.point(j)))
            || self.artificials.iter().any(|a| a.status == ArtificialStatus::Kept && same(&a.point))
    }

    fn log(&mut self, part: u8, unit: &str, placement: &Placement, accepted: bool, efficient_count: usize) {
        let (direction, axes) = match placement {
            Placement::Terminal { direction, section, .. } => {
                (Some(*direction), Some(section.axis_labels(self.original.num_inputs())))
            }
            Placement::Radial { .. } => (None, None),
        };
        self.log.push(LogRecord {
            part,
            unit: unit.to_string(),
            direction,
            axes,
            epsilon: placement.offset(),
            accepted,
            efficient_count,
        });
    }

    /// Tries `placement` against `base` (which lacks the candidate), moving it
    /// toward the frontier until no originally efficient unit breaks.
    fn place(&mut self, base: &Dataset, mut placement: Placement, owner: &str, provenance: Provenance) -> Result<()> {
        let part = placement.part();
        let total = self.efficient0.len();
        let id = self.fresh_id();
        let mut status = ArtificialStatus::AbandonedUnderflow;
        let mut point = None;
        let mut shrinks = 0;
        for trial in 0..=self.params.max_halvings {
            let p = match placement.point() {
                Ok(p) => p,
                Err(Error::DegeneratePlacement(_)) => {
                    status = ArtificialStatus::AbandonedDegenerate;
                    self.log(part, owner, &placement, false, total);
                    break;
                }
                Err(e) => return Err(e),
            };
            if trial == 0 && dea::membership(base, &p)? {
                status = ArtificialStatus::AbandonedInside;
                self.log(part, owner, &placement, false, total);
                break;
            }
            if self.is_duplicate(base, &p) {
                status = ArtificialStatus::AbandonedDuplicate;
                self.log(part, owner, &placement, false, total);
                break;
            }
            let trial_ds = base.extended(&[(id.clone(), p.clone(), Origin::Artificial)])?;
            let broken = self.broken(&trial_ds)?.len();
            let accepted = broken == 0;
            self.log(part, owner, &placement, accepted, total - broken);
            if accepted {
                status = ArtificialStatus::Kept;
                point = Some(p);
                break;
            }
            if trial == self.params.max_halvings {
                break;
            }
            shrink(&mut placement, self.params.shrink_factor);
            shrinks += 1;
        }
        let point = match point {
            Some(p) => p,
            None => placement.point().unwrap_or_else(|_| placement_anchor(&placement)),
        };
        self.artificials.push(ArtificialUnit {
            id,
            point,
            provenance,
            offset: placement.offset(),
            status,
            placement,
            shrinks,
        });
        Ok(())
    }

    /// Corrective rounds over the kept units of `part`. Each round moves the
    /// responsible units one step toward the frontier; a unit stops moving
    /// after `max_halvings` steps in total. Returns an error listing broken
    /// units if they persist.
    fn correct(&mut self, part: u8, shrink_all: bool) -> Result<()> {
        let n0 = self.original.len();
        let budget = self.params.max_halvings;
        loop {
            let active = self.active();
            let ds = self.assemble_with(&active, None)?;
            let broken = self.broken(&ds)?;
            if broken.is_empty() {
                return Ok(());
            }
            let placed_in = if part == 2 { 1 } else { 3 };
            let movable = |a: usize| self.artificials[a].placement.part() == placed_in && self.artificials[a].shrinks < budget;
            let mut responsible = BTreeSet::new();
            if shrink_all {
                responsible.extend(active.iter().copied().filter(|&a| movable(a)));
            } else {
                for (_, lambdas) in &broken {
                    for (slot, &a) in active.iter().enumerate() {
                        if lambdas[n0 + slot] > self.params.zero_tol && movable(a) {
                            responsible.insert(a);
                        }
                    }
                }
            }
            if responsible.is_empty() {
                return Err(Error::Convergence {
                    part,
                    broken: broken.iter().map(|(o, _)| self.original.id(*o).to_string()).collect(),
                    partial: None,
                });
            }
            for &a in &responsible {
                let unit = &mut self.artificials[a];
                shrink(&mut unit.placement, self.params.shrink_factor);
                unit.shrinks += 1;
                unit.point = unit.placement.point()?;
                unit.offset = unit.placement.offset();
            }
            let ds = self.assemble_with(&active, None)?;
            let still = self.broken(&ds)?.len();
            let total = self.efficient0.len();
            for &a in &responsible {
                let (id, placement) = (self.artificials[a].id.clone(), self.artificials[a].placement.clone());
                self.log(part, &id, &placement, still == 0, total - still);
            }
        }
    }

    /// Marks kept artificial units that are not efficient as deleted.
    fn delete_inefficient(&mut self) -> Result<()> {
        let active = self.active();
        let ds = self.assemble_with(&active, None)?;
        let n0 = self.original.len();
        let tol = self.params.zero_tol;
        let flags: Vec<bool> = (0..active.len())
            .into_par_iter()
            .map(|slot| dea::is_efficient(&ds, n0 + slot, tol))
            .collect::<Result<_>>()?;
        for (slot, efficient) in flags.into_iter().enumerate() {
            if !efficient {
                self.artificials[active[slot]].status = ArtificialStatus::DeletedInefficient;
            }
        }
        Ok(())
    }
}

fn shrink(placement: &mut Placement, factor: f64) {
    match placement {
        Placement::Terminal { epsilon, .. } => *epsilon *= factor,
        Placement::Radial { alpha, .. } => *alpha = 0.5 * (1.0 + *alpha),
    }
}

fn placement_anchor(placement: &Placement) -> Point {
    match placement {
        Placement::Terminal { anchor, .. } => anchor.clone(),
        Placement::Radial { source, .. } => source.clone(),
    }
}

/// Part 1: candidates around every original terminal unit.
fn smooth(ws: &mut Workspace<'_>, report: &TerminalReport) -> Result<()> {
    let ds = ws.original;
    let m = ds.num_inputs();
    let params = ws.params.clone();
    for entry in report.terminal() {
        if ds.origin(entry.index) != Origin::Original {
            continue;
        }
        for &d in &entry.directions {
            for section in containing_sections(ds, entry.index, d) {
                let coord = d.coordinate(m);
                let paired = section.paired_coord(m, coord).expect("section built around the direction axis");
                let anchor = ds.point(entry.index);
                let mut step = params.along_step * ws.scales.range(coord);
                if d.kind == DirectionKind::OutputDecrease {
                    // a zero output can never be efficient
                    step = step.min(0.5 * anchor.coord(coord));
                }
                let placement = Placement::Terminal {
                    anchor,
                    direction: d,
                    step,
                    paired_range: ws.scales.range(paired),
                    epsilon: params.exterior_offset,
                    section: section.clone(),
                };
                let provenance = Provenance::Terminal {
                    unit: entry.id.clone(),
                    direction: d,
                    axes: section.axis_labels(m),
                };
                ws.place(ds, placement, &entry.id, provenance)?;
            }
        }
    }
    Ok(())
}

/// Part 1 on its own: candidates for every terminal unit of `report`, each
/// tested against `dataset` alone.
pub fn smooth_terminal_units(ds: &Dataset, report: &TerminalReport, params: &ImproveParams) -> Result<(Vec<ArtificialUnit>, Vec<LogRecord>)> {
    params.validate()?;
    let mut ws = workspace(ds, params)?;
    smooth(&mut ws, report)?;
    Ok((ws.artificials, ws.log))
}

/// Part 3: radial copies of weak projections of original non-efficient units.
fn remove_weak(ws: &mut Workspace<'_>) -> Result<()> {
    let tol = ws.params.zero_tol;
    let originals: Vec<usize> = (0..ws.original.len()).filter(|&j| ws.original.origin(j) == Origin::Original).collect();
    for _ in 0..ws.params.max_passes {
        let mut inserted = false;
        for &o in &originals {
            if ws.efficient0.contains(&o) {
                continue;
            }
            for orientation in [Orientation::Input, Orientation::Output] {
                if !ws.params.orientations.includes(orientation) {
                    continue;
                }
                let base = ws.assemble_with(&ws.active(), None)?;
                let eval = dea::evaluate_unit(&base, o, tol)?;
                if !eval.weak_in(orientation, tol) {
                    continue;
                }
                let score = match orientation {
                    Orientation::Input => eval.input.score,
                    Orientation::Output => eval.output.as_ref().expect("weak output implies an output evaluation").score,
                };
                let placement = Placement::Radial {
                    source: ws.original.point(o),
                    orientation,
                    score,
                    alpha: ws.params.radial_offset,
                };
                let id = ws.original.id(o).to_string();
                let provenance = Provenance::Projection { unit: id.clone(), orientation };
                ws.place(&base, placement, &id, provenance)?;
                inserted |= ws.artificials.last().is_some_and(|a| a.status == ArtificialStatus::Kept);
            }
        }
        if !inserted {
            break;
        }
    }
    Ok(())
}

/// Part 3 on its own, against a dataset that already holds any earlier
/// artificial units. Units of `dataset` marked original are scanned.
pub fn remove_weak_projections(ds: &Dataset, params: &ImproveParams) -> Result<(Vec<ArtificialUnit>, Vec<LogRecord>)> {
    params.validate()?;
    let mut ws = workspace(ds, params)?;
    remove_weak(&mut ws)?;
    Ok((ws.artificials, ws.log))
}

/// Which corrective rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionMode {
    /// Shrink Part-1 offsets.
    Offset,
    /// Move Part-3 units radially toward the frontier.
    Radial,
}

/// Corrective pass over `artificials` appended to `dataset`, followed by the
/// deletion of inefficient artificial units.
pub fn corrective_pass(
    ds: &Dataset,
    artificials: Vec<ArtificialUnit>,
    params: &ImproveParams,
    mode: CorrectionMode,
) -> Result<(Vec<ArtificialUnit>, Vec<LogRecord>)> {
    params.validate()?;
    let mut ws = workspace(ds, params)?;
    ws.next_id = artificials.len();
    ws.artificials = artificials;
    let part = match mode {
        CorrectionMode::Offset => 2,
        CorrectionMode::Radial => 4,
    };
    ws.correct(part, params.shrink_all && mode == CorrectionMode::Offset)?;
    ws.delete_inefficient()?;
    Ok((ws.artificials, ws.log))
}

fn workspace<'a>(ds: &'a Dataset, params: &'a ImproveParams) -> Result<Workspace<'a>> {
    let tol = params.zero_tol;
    let efficient0 = (0..ds.len())
        .into_par_iter()
        .filter(|&j| ds.origin(j) == Origin::Original)
        .map(|j| Ok((j, dea::is_efficient(ds, j, tol)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(j, e)| e.then_some(j))
        .collect();
    Ok(Workspace {
        original: ds,
        scales: ds.scales().clone(),
        params,
        efficient0,
        artificials: Vec::new(),
        log: Vec::new(),
        next_id: 0,
    })
}

fn summaries(ds: &Dataset, zero_tol: f64) -> Result<(Vec<UnitSummary>, Vec<UnitEvaluation>)> {
    let originals: Vec<usize> = (0..ds.len()).filter(|&j| ds.origin(j) == Origin::Original).collect();
    let evals: Vec<UnitEvaluation> = originals
        .par_iter()
        .map(|&j| dea::evaluate_unit(ds, j, zero_tol))
        .collect::<Result<_>>()?;
    let sums = originals
        .iter()
        .zip(&evals)
        .map(|(&j, e)| UnitSummary::from_eval(ds.id(j), e, zero_tol))
        .collect();
    Ok((sums, evals))
}

/// Checks the three guarantees on `improved`, whose original units are those
/// marked [`Origin::Original`].
pub fn certify(improved: &Dataset, originally_efficient: &[String], zero_tol: f64) -> Result<Certificate> {
    let (after, _) = summaries(improved, zero_tol)?;
    certify_with(improved, originally_efficient, &after, zero_tol, OrientationFilter::Both)
}

fn certify_with(
    improved: &Dataset,
    originally_efficient: &[String],
    after: &[UnitSummary],
    zero_tol: f64,
    orientations: OrientationFilter,
) -> Result<Certificate> {
    let mut cert = Certificate::default();
    for s in after {
        if originally_efficient.contains(&s.id) && !s.class.is_efficient() {
            cert.broken.push(s.id.clone());
        }
        let input = if orientations.includes(Orientation::Input) { s.input_slack } else { 0.0 };
        let output = if orientations.includes(Orientation::Output) { s.output_slack.unwrap_or(0.0) } else { 0.0 };
        let slack = input.max(output);
        if !s.class.is_efficient() && slack > zero_tol {
            cert.residual_weak.push(s.id.clone());
        }
    }
    let extreme: Vec<usize> = after
        .iter()
        .filter(|s| s.class == UnitClass::ExtremeEfficient)
        .filter_map(|s| improved.index_of(&s.id))
        .collect();
    let terminal: Vec<Option<String>> = extreme
        .par_iter()
        .map(|&j| {
            for d in Direction::all(improved.num_inputs(), improved.num_outputs()) {
                if terminal::is_edge(improved, j, d, 1.0, zero_tol)? {
                    return Ok(Some(improved.id(j).to_string()));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    cert.terminal_originals = terminal.into_iter().flatten().collect();
    Ok(cert)
}

/// Runs Parts 1–4 and certifies the result.
///
/// A corrective part that cannot restore every originally efficient unit
/// returns [`Error::Convergence`] carrying the partial result.
pub fn improve_frontier(ds: &Dataset, params: &ImproveParams) -> Result<ImprovementResult> {
    params.validate()?;
    let tol = params.zero_tol;
    let (before, _) = summaries(ds, tol)?;
    if !before.iter().any(|s| s.class.is_efficient()) {
        return Err(Error::input("the dataset has no efficient unit"));
    }
    let terminal_before = terminal::find_terminal_units_with(ds, 1.0, tol)?;
    let mut ws = workspace(ds, params)?;

    let finish = |ws: &Workspace<'_>, failed: bool| -> Result<ImprovementResult> {
        let improved = ws.assemble_with(&ws.active(), None)?;
        let (after, _) = summaries(&improved, tol)?;
        let eff0: Vec<String> = ws.efficient0.iter().map(|&j| ds.id(j).to_string()).collect();
        let certificate = if failed {
            Certificate::default()
        } else {
            certify_with(&improved, &eff0, &after, tol, params.orientations)?
        };
        Ok(ImprovementResult {
            improved,
            artificials: ws.artificials.clone(),
            log: ws.log.clone(),
            before: before.clone(),
            after,
            terminal_before: terminal_before.clone(),
            certificate,
        })
    };
    let fail = |ws: &Workspace<'_>, e: Error| -> Error {
        match e {
            Error::Convergence { part, broken, .. } => match finish(ws, true) {
                Ok(partial) => Error::Convergence { part, broken, partial: Some(Box::new(partial)) },
                Err(e) => e,
            },
            e => e,
        }
    };

    smooth(&mut ws, &terminal_before)?;
    if let Err(e) = ws.correct(2, params.shrink_all) {
        return Err(fail(&ws, e));
    }
    ws.delete_inefficient()?;
    remove_weak(&mut ws)?;
    if let Err(e) = ws.correct(4, false) {
        return Err(fail(&ws, e));
    }
    ws.delete_inefficient()?;
    finish(&ws, false)
}
