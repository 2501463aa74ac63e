//! Two-dimensional sections of the frontier through a base point.
//!
//! * `S1`: two inputs; the second is minimized given the first (input isoquant).
//! * `S2`: two outputs; the second is maximized given the first (output isoquant).
//! * `S3`: an input on the first axis, an output on the second, maximized.
//!
//! All remaining coordinates stay at the base point's values. Curves are traced
//! by sampling the first axis between the two domain endpoints and bisecting
//! every sample interval that fails a midpoint linearity test, which is exact
//! for convex or concave functions.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::{column_label, Dataset, Point};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus, RowSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectionKind {
    S1,
    S2,
    S3,
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SectionKind::S1 => "S1",
            SectionKind::S2 => "S2",
            SectionKind::S3 => "S3",
        })
    }
}

impl FromStr for SectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" | "s1" => Ok(SectionKind::S1),
            "S2" | "s2" => Ok(SectionKind::S2),
            "S3" | "s3" => Ok(SectionKind::S3),
            _ => Err(Error::input(format!("unknown section kind `{s}`"))),
        }
    }
}

/// A section plane: two free coordinates through `base`.
///
/// Axis indices are zero-based within their block: both inputs for `S1`,
/// both outputs for `S2`, and (input, output) for `S3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpec {
    pub base: Point,
    /// Unit id of the base point, if it is a unit.
    pub base_id: Option<String>,
    pub kind: SectionKind,
    pub first: usize,
    pub second: usize,
}

impl SectionSpec {
    pub fn new(base: Point, kind: SectionKind, first: usize, second: usize) -> Self {
        Self { base, base_id: None, kind, first, second }
    }

    pub fn through_unit(ds: &Dataset, j: usize, kind: SectionKind, first: usize, second: usize) -> Self {
        Self { base: ds.point(j), base_id: Some(ds.id(j).to_string()), kind, first, second }
    }

    pub fn validate(&self, m: usize, r: usize) -> Result<()> {
        if self.base.x().len() != m || self.base.y().len() != r {
            return Err(Error::input("section base has the wrong dimensions"));
        }
        let (lim1, lim2) = match self.kind {
            SectionKind::S1 => (m, m),
            SectionKind::S2 => (r, r),
            SectionKind::S3 => (m, r),
        };
        if self.first >= lim1 || self.second >= lim2 {
            return Err(Error::input(format!("section axes out of range for {}", self.kind)));
        }
        if self.kind != SectionKind::S3 && self.first == self.second {
            return Err(Error::input("section axes must differ"));
        }
        Ok(())
    }

    /// First-axis coordinate in the concatenated `(x, y)` order.
    pub fn first_coord(&self, m: usize) -> usize {
        match self.kind {
            SectionKind::S1 | SectionKind::S3 => self.first,
            SectionKind::S2 => m + self.first,
        }
    }

    pub fn second_coord(&self, m: usize) -> usize {
        match self.kind {
            SectionKind::S1 => self.second,
            SectionKind::S2 | SectionKind::S3 => m + self.second,
        }
    }

    pub fn axis_labels(&self, m: usize) -> (String, String) {
        (column_label(m, self.first_coord(m)), column_label(m, self.second_coord(m)))
    }

    /// The base point with the two section coordinates replaced.
    pub fn lift(&self, a: f64, b: f64) -> Point {
        let m = self.base.x().len();
        let mut p = self.base.clone();
        for (c, v) in [(self.first_coord(m), a), (self.second_coord(m), b)] {
            if c < m {
                p.x_mut()[c] = v;
            } else {
                p.y_mut()[c - m] = v;
            }
        }
        p
    }

    /// Whether `coord` (concatenated order) is one of the two section axes.
    pub fn contains_coord(&self, m: usize, coord: usize) -> bool {
        self.first_coord(m) == coord || self.second_coord(m) == coord
    }

    /// The section axis other than `coord`.
    pub fn paired_coord(&self, m: usize, coord: usize) -> Option<usize> {
        let (a, b) = (self.first_coord(m), self.second_coord(m));
        if coord == a {
            Some(b)
        } else if coord == b {
            Some(a)
        } else {
            None
        }
    }

    fn ray_directions(&self) -> ((f64, f64), (f64, f64)) {
        match self.kind {
            SectionKind::S1 => ((0.0, 1.0), (1.0, 0.0)),
            SectionKind::S2 => ((-1.0, 0.0), (0.0, -1.0)),
            SectionKind::S3 => ((0.0, -1.0), (1.0, 0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionPolyline {
    pub kind: SectionKind,
    pub base_id: Option<String>,
    pub axes: (String, String),
    /// Ordered by the first axis.
    pub vertices: Vec<(f64, f64)>,
    /// Unbounded tail leaving the first vertex.
    pub left_ray: Option<(f64, f64)>,
    /// Unbounded tail leaving the last vertex.
    pub right_ray: Option<(f64, f64)>,
    pub samples: usize,
    pub diagnostic: Option<String>,
    /// Orthogonal projections of units onto the section axes, for plotting.
    pub annex: Vec<(String, f64, f64)>,
}

impl SectionPolyline {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Slopes of consecutive segments.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// Checks monotonicity and curvature for the section kind, allowing
    /// `tol` relative slack on slope comparisons.
    pub fn has_expected_shape(&self, tol: f64) -> bool {
        let slopes = self.slopes();
        if self.vertices.windows(2).any(|w| w[1].0 <= w[0].0) {
            return false;
        }
        let scale = slopes.iter().fold(1e-12f64, |a, s| a.max(s.abs()));
        let eps = tol * scale;
        let monotone = slopes.iter().all(|&s| match self.kind {
            SectionKind::S1 | SectionKind::S2 => s <= eps,
            SectionKind::S3 => s >= -eps,
        });
        let curvature = slopes.windows(2).all(|w| match self.kind {
            SectionKind::S1 => w[1] >= w[0] - eps,
            SectionKind::S2 | SectionKind::S3 => w[1] <= w[0] + eps,
        });
        monotone && curvature
    }

    /// Plain-text export: header, one `a<TAB>b` line per vertex, ray markers
    /// and an optional `# unit` annex.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let base = self.base_id.as_deref().unwrap_or("free");
        let _ = writeln!(s, "# section kind={} base={} axes={},{}", self.kind, base, self.axes.0, self.axes.1);
        if let Some(d) = &self.diagnostic {
            let _ = writeln!(s, "# diagnostic {d}");
        }
        for (a, b) in &self.vertices {
            let _ = writeln!(s, "{a}\t{b}");
        }
        if self.left_ray.is_some() {
            s.push_str("# ray left\n");
        }
        if self.right_ray.is_some() {
            s.push_str("# ray right\n");
        }
        for (id, a, b) in &self.annex {
            let _ = writeln!(s, "# unit {id}\t{a}\t{b}");
        }
        s
    }

    /// Parses the output of [`SectionPolyline::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::input("empty polyline file"))?;
        let rest = header
            .strip_prefix("# section ")
            .ok_or_else(|| Error::input("missing polyline header"))?;
        let mut kind = None;
        let mut base_id = None;
        let mut axes = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("kind", v)) => kind = Some(v.parse::<SectionKind>()?),
                Some(("base", v)) => base_id = (v != "free").then(|| v.to_string()),
                Some(("axes", v)) => {
                    let (a, b) = v.split_once(',').ok_or_else(|| Error::input("bad axes field"))?;
                    axes = Some((a.to_string(), b.to_string()));
                }
                _ => return Err(Error::input(format!("unknown header field `{field}`"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::input("header lacks kind"))?;
        let axes = axes.ok_or_else(|| Error::input("header lacks axes"))?;
        let spec_dirs = SectionSpec::new(Point::unchecked(vec![], vec![]), kind, 0, 0).ray_directions();
        let mut out = SectionPolyline {
            kind,
            base_id,
            axes,
            vertices: Vec::new(),
            left_ray: None,
            right_ray: None,
            samples: 0,
            diagnostic: None,
            annex: Vec::new(),
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::input(format!("bad number `{v}`")));
        for line in lines {
            if let Some(d) = line.strip_prefix("# diagnostic ") {
                out.diagnostic = Some(d.to_string());
            } else if line == "# ray left" {
                out.left_ray = Some(spec_dirs.0);
            } else if line == "# ray right" {
                out.right_ray = Some(spec_dirs.1);
            } else if let Some(u) = line.strip_prefix("# unit ") {
                let parts: Vec<&str> = u.split('\t').collect();
                if parts.len() != 3 {
                    return Err(Error::input(format!("bad annex line `{line}`")));
                }
                out.annex.push((parts[0].to_string(), num(parts[1])?, num(parts[2])?));
            } else if !line.trim().is_empty() {
                let (a, b) = line.split_once('\t').ok_or_else(|| Error::input(format!("bad vertex line `{line}`")))?;
                out.vertices.push((num(a)?, num(b)?));
            }
        }
        Ok(out)
    }
}

/// +1 when smaller is better for the coordinate (inputs), −1 otherwise.
fn improving_weight(m: usize, coord: usize) -> f64 {
    if coord < m {
        1.0
    } else {
        -1.0
    }
}

fn coord_value(ds: &Dataset, j: usize, coord: usize) -> f64 {
    let m = ds.num_inputs();
    if coord < m {
        ds.input(j)[coord]
    } else {
        ds.output(j)[coord - m]
    }
}

/// LP over λ: every coordinate except the second axis is held at the base
/// value (the first axis at `first_value`, or left free when `None`).
/// `objective` lists `(coordinate, weight)` pairs in normalized units.
fn section_lp(ds: &Dataset, spec: &SectionSpec, first_value: Option<f64>, objective: &[(usize, f64)]) -> LpProblem {
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    let sc = ds.scales();
    let mut c = vec![0.0; n];
    for &(coord, w) in objective {
        for (j, cj) in c.iter_mut().enumerate() {
            *cj += w * coord_value(ds, j, coord) / sc.scale(coord);
        }
    }
    let mut p = LpProblem::new(c);
    let (fc, sc2) = (spec.first_coord(m), spec.second_coord(m));
    for coord in 0..m + r {
        if coord == sc2 {
            continue;
        }
        let value = if coord == fc {
            match first_value {
                Some(v) => v,
                None => continue,
            }
        } else {
            spec.base.coord(coord)
        };
        let row: Vec<f64> = (0..n).map(|j| coord_value(ds, j, coord) / sc.scale(coord)).collect();
        let sense = if coord < m { RowSense::Le } else { RowSense::Ge };
        p.add_row(&row, sense, value / sc.scale(coord)).expect("row width matches");
    }
    p.add_row(&vec![1.0; n], RowSense::Eq, 1.0).expect("row width matches");
    p
}

fn combination_at(ds: &Dataset, lambdas: &[f64], coord: usize) -> f64 {
    lambdas.iter().enumerate().map(|(j, l)| l * coord_value(ds, j, coord)).sum()
}

/// Second-axis boundary value at `first_value`, or `None` outside the
/// section's domain.
pub fn boundary_point(ds: &Dataset, spec: &SectionSpec, first_value: f64) -> Result<Option<f64>> {
    let m = ds.num_inputs();
    spec.validate(m, ds.num_outputs())?;
    let sc2 = spec.second_coord(m);
    let w = improving_weight(m, sc2);
    let s = solve_lp(&section_lp(ds, spec, Some(first_value), &[(sc2, w)]))?;
    match s.status {
        LpStatus::Optimal => Ok(Some(w * s.objective_value * ds.scales().scale(sc2))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Numerical {
            iterations: s.iterations,
            detail: "section boundary problem reported unbounded".into(),
        }),
    }
}

/// Lexicographic endpoint: optimize `primary`, then `secondary` with
/// `primary` capped at its optimum, both in the improving sense, with the
/// first axis free.
fn endpoint(ds: &Dataset, spec: &SectionSpec, primary: usize, secondary: usize) -> Result<Option<(f64, f64)>> {
    let m = ds.num_inputs();
    let sc = ds.scales();
    let wp = improving_weight(m, primary);
    let first = solve_lp(&section_lp(ds, spec, None, &[(primary, wp)]))?;
    match first.status {
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => {
            return Err(Error::Numerical {
                iterations: first.iterations,
                detail: "section endpoint problem reported unbounded".into(),
            })
        }
        LpStatus::Optimal => {}
    }
    let best = wp * first.objective_value;
    let ws = improving_weight(m, secondary);
    let mut lp = section_lp(ds, spec, None, &[(secondary, ws)]);
    let row: Vec<f64> = (0..ds.len()).map(|j| coord_value(ds, j, primary) / sc.scale(primary)).collect();
    let sense = if primary < m { RowSense::Le } else { RowSense::Ge };
    lp.add_row(&row, sense, best)?;
    let second = solve_lp(&lp)?;
    let lambdas = if second.is_optimal() { second.primal } else { first.primal };
    let value = |coord: usize| {
        if coord == primary {
            best * sc.scale(primary)
        } else {
            combination_at(ds, &lambdas, coord)
        }
    };
    Ok(Some((value(spec.first_coord(m)), value(spec.second_coord(m)))))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: (f64, f64),
    b: (f64, f64),
    verified: bool,
}

impl Segment {
    fn slope(&self) -> f64 {
        (self.b.1 - self.a.1) / (self.b.0 - self.a.0)
    }
}

struct Tracer<'a> {
    ds: &'a Dataset,
    spec: &'a SectionSpec,
    min_width: f64,
    lin_tol: f64,
}

impl Tracer<'_> {
    fn eval(&self, v: f64) -> Result<f64> {
        boundary_point(self.ds, self.spec, v)?.ok_or_else(|| Error::Numerical {
            iterations: 0,
            detail: format!("section value {v} unexpectedly outside the domain"),
        })
    }

    fn refine(&self, a: (f64, f64), b: (f64, f64), out: &mut Vec<Segment>) -> Result<()> {
        let mid = 0.5 * (a.0 + b.0);
        let fm = self.eval(mid)?;
        if (fm - 0.5 * (a.1 + b.1)).abs() <= self.lin_tol {
            out.push(Segment { a, b, verified: true });
            return Ok(());
        }
        if b.0 - a.0 <= self.min_width {
            out.push(Segment { a, b: (mid, fm), verified: false });
            out.push(Segment { a: (mid, fm), b, verified: false });
            return Ok(());
        }
        self.refine(a, (mid, fm), out)?;
        self.refine((mid, fm), b, out)
    }
}

#[derive(Debug, Clone, Copy)]
struct Line {
    start: (f64, f64),
    end: (f64, f64),
    slope: f64,
}

impl Line {
    fn at(&self, v: f64) -> f64 {
        self.start.1 + self.slope * (v - self.start.0)
    }
}

fn merge_lines(segments: &[Segment], slope_tol: f64) -> Vec<Line> {
    let mut lines: Vec<Line> = Vec::new();
    for s in segments.iter().filter(|s| s.verified) {
        let slope = s.slope();
        if let Some(last) = lines.last_mut() {
            let contiguous = (s.a.0 - last.end.0).abs() <= f64::EPSILON * (1.0 + s.a.0.abs());
            if contiguous && (slope - last.slope).abs() <= slope_tol {
                last.end = s.b;
                last.slope = (last.end.1 - last.start.1) / (last.end.0 - last.start.0);
                continue;
            }
        }
        lines.push(Line { start: s.a, end: s.b, slope });
    }
    lines
}

fn simplify(vertices: Vec<(f64, f64)>, dup_tol: (f64, f64), slope_tol: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if let Some(last) = out.last() {
            if (v.0 - last.0).abs() <= dup_tol.0 && (v.1 - last.1).abs() <= dup_tol.1 {
                continue;
            }
        }
        while out.len() >= 2 {
            let (p, q) = (out[out.len() - 2], out[out.len() - 1]);
            let s1 = (q.1 - p.1) / (q.0 - p.0);
            let s2 = (v.1 - q.1) / (v.0 - q.0);
            if (s1 - s2).abs() <= slope_tol {
                out.pop();
            } else {
                break;
            }
        }
        out.push(v);
    }
    out
}

fn empty(spec: &SectionSpec, m: usize, samples: usize, why: &str) -> SectionPolyline {
    SectionPolyline {
        kind: spec.kind,
        base_id: spec.base_id.clone(),
        axes: spec.axis_labels(m),
        vertices: Vec::new(),
        left_ray: None,
        right_ray: None,
        samples,
        diagnostic: Some(why.to_string()),
        annex: Vec::new(),
    }
}

/// Traces the section as a polyline with its two unbounded tails.
pub fn section_polyline(ds: &Dataset, spec: &SectionSpec, samples: usize) -> Result<SectionPolyline> {
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    spec.validate(m, r)?;
    if samples < 2 {
        return Err(Error::input("a section needs at least 2 samples"));
    }
    let (fc, scd) = (spec.first_coord(m), spec.second_coord(m));
    let (left_key, right_key) = match spec.kind {
        SectionKind::S1 | SectionKind::S3 => ((fc, scd), (scd, fc)),
        SectionKind::S2 => ((scd, fc), (fc, scd)),
    };
    let Some(left) = endpoint(ds, spec, left_key.0, left_key.1)? else {
        return Ok(empty(spec, m, samples, "empty domain: no point of the set lies in this plane"));
    };
    let right = endpoint(ds, spec, right_key.0, right_key.1)?.expect("same feasible region as the left endpoint");
    let sc = ds.scales();
    let first_unit = sc.scale(fc);
    let second_unit = sc.scale(scd);
    let (rays_l, rays_r) = spec.ray_directions();
    let mut poly = SectionPolyline {
        kind: spec.kind,
        base_id: spec.base_id.clone(),
        axes: spec.axis_labels(m),
        vertices: vec![left],
        left_ray: Some(rays_l),
        right_ray: Some(rays_r),
        samples,
        diagnostic: None,
        annex: Vec::new(),
    };
    let (lo, hi) = (left.0, right.0);
    let width = hi - lo;
    if width <= 1e-12 * first_unit {
        return Ok(poly);
    }
    let grid: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { hi } else { lo + width * i as f64 / (samples - 1) as f64 })
        .collect();
    let inner: Vec<f64> = grid[1..samples - 1]
        .par_iter()
        .map(|&v| boundary_point(ds, spec, v)?.ok_or(Error::OutsidePps))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(samples);
    values.push(left.1);
    values.extend(inner);
    values.push(right.1);

    let tracer = Tracer { ds, spec, min_width: 1e-6 * width, lin_tol: 1e-9 * second_unit };
    let mut segments = Vec::new();
    for i in 0..samples - 1 {
        tracer.refine((grid[i], values[i]), (grid[i + 1], values[i + 1]), &mut segments)?;
    }
    let slope_scale = segments.iter().filter(|s| s.verified).fold(0.0f64, |a, s| a.max(s.slope().abs()));
    let slope_tol = 1e-6 * slope_scale.max(second_unit / first_unit * 1e-6);
    let lines = merge_lines(&segments, slope_tol);

    let mut vertices = vec![left];
    for w in lines.windows(2) {
        let (l1, l2) = (w[0], w[1]);
        let v = if (l1.slope - l2.slope).abs() > 0.0 {
            let x = (l2.at(0.0) - l1.at(0.0)) / (l1.slope - l2.slope);
            x.clamp(l1.end.0, l2.start.0)
        } else {
            l1.end.0
        };
        vertices.push((v, l1.at(v)));
    }
    vertices.push(right);
    poly.vertices = simplify(vertices, (1e-9 * first_unit, 1e-9 * second_unit), slope_tol);
    Ok(poly)
}

/// Adds the orthogonal projection of every unit onto the section axes.
pub fn attach_annex(ds: &Dataset, spec: &SectionSpec, poly: &mut SectionPolyline) {
    let m = ds.num_inputs();
    let (fc, scd) = (spec.first_coord(m), spec.second_coord(m));
    poly.annex = (0..ds.len())
        .map(|j| (ds.id(j).to_string(), coord_value(ds, j, fc), coord_value(ds, j, scd)))
        .collect();
}
