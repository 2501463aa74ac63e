use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Original,
    Artificial,
}

/// A point `(x, y)` of input–output space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Point {
    /// Rejects non-finite or negative coordinates.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        for v in x.iter().chain(&y) {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::input(format!(
                    "point coordinates must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { x, y })
    }

    /// Probe points along output-decrease directions may leave the orthant.
    pub(crate) fn unchecked(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub(crate) fn x_mut(&mut self) -> &mut [f64] {
        &mut self.x
    }

    pub(crate) fn y_mut(&mut self) -> &mut [f64] {
        &mut self.y
    }

    /// Coordinate `k` of the concatenated vector `(x, y)`.
    pub fn coord(&self, k: usize) -> f64 {
        if k < self.x.len() {
            self.x[k]
        } else {
            self.y[k - self.x.len()]
        }
    }
}

/// Per-column normalization data.
///
/// `scale` (the column maximum) conditions every LP; `range` (max − min,
/// or the maximum for a constant column) is the unit for probe offsets,
/// placement steps and the weak-Pareto gap.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnScales {
    pub input_scale: Vec<f64>,
    pub output_scale: Vec<f64>,
    pub input_range: Vec<f64>,
    pub output_range: Vec<f64>,
}

/// Observed production units: `n` rows of `m` inputs and `r` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    ids: Vec<String>,
    m: usize,
    r: usize,
    // row-major n × m and n × r
    x: Vec<f64>,
    y: Vec<f64>,
    origins: Vec<Origin>,
    scales: ColumnScales,
}

impl Dataset {
    pub fn new(ids: Vec<String>, inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self> {
        let origins = vec![Origin::Original; ids.len()];
        Self::with_origins(ids, inputs, outputs, origins)
    }

    pub fn with_origins(
        ids: Vec<String>,
        inputs: Vec<Vec<f64>>,
        outputs: Vec<Vec<f64>>,
        origins: Vec<Origin>,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::input("dataset has no units"));
        }
        for (what, len) in [
            ("input rows", inputs.len()),
            ("output rows", outputs.len()),
            ("origin flags", origins.len()),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch { what, expected: n, got: len });
            }
        }
        let m = inputs[0].len();
        let r = outputs[0].len();
        if m == 0 || r == 0 {
            return Err(Error::input("need at least one input and one output column"));
        }
        let mut seen = HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::input(format!("duplicate unit id {id:?}")));
            }
        }
        let mut x = Vec::with_capacity(n * m);
        let mut y = Vec::with_capacity(n * r);
        for j in 0..n {
            if inputs[j].len() != m {
                return Err(Error::DimensionMismatch { what: "inputs per unit", expected: m, got: inputs[j].len() });
            }
            if outputs[j].len() != r {
                return Err(Error::DimensionMismatch { what: "outputs per unit", expected: r, got: outputs[j].len() });
            }
            for v in inputs[j].iter().chain(&outputs[j]) {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::input(format!(
                        "unit {:?}: entries must be finite and nonnegative, got {v}",
                        ids[j]
                    )));
                }
            }
            x.extend_from_slice(&inputs[j]);
            y.extend_from_slice(&outputs[j]);
        }
        let scales = ColumnScales::compute(&x, m, &y, r, n)?;
        Ok(Self { ids, m, r, x, y, origins, scales })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_inputs(&self) -> usize {
        self.m
    }

    pub fn num_outputs(&self) -> usize {
        self.r
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, j: usize) -> &str {
        &self.ids[j]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn input(&self, j: usize) -> &[f64] {
        &self.x[j * self.m..(j + 1) * self.m]
    }

    pub fn output(&self, j: usize) -> &[f64] {
        &self.y[j * self.r..(j + 1) * self.r]
    }

    pub fn point(&self, j: usize) -> Point {
        Point::unchecked(self.input(j).to_vec(), self.output(j).to_vec())
    }

    pub fn origin(&self, j: usize) -> Origin {
        self.origins[j]
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn scales(&self) -> &ColumnScales {
        &self.scales
    }

    /// Units whose output vector is entirely zero; accepted but never efficient.
    pub fn zero_output_units(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.output(j).iter().all(|&v| v == 0.0))
            .collect()
    }

    /// A new dataset with `extra` units appended.
    pub fn extended(&self, extra: &[(String, Point, Origin)]) -> Result<Self> {
        let mut ids = self.ids.clone();
        let mut inputs: Vec<Vec<f64>> = (0..self.len()).map(|j| self.input(j).to_vec()).collect();
        let mut outputs: Vec<Vec<f64>> = (0..self.len()).map(|j| self.output(j).to_vec()).collect();
        let mut origins = self.origins.clone();
        for (id, p, o) in extra {
            self.check_point(p)?;
            ids.push(id.clone());
            inputs.push(p.x().to_vec());
            outputs.push(p.y().to_vec());
            origins.push(*o);
        }
        Self::with_origins(ids, inputs, outputs, origins)
    }

    /// The first `n` units.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let n = n.min(self.len());
        Self::with_origins(
            self.ids[..n].to_vec(),
            (0..n).map(|j| self.input(j).to_vec()).collect(),
            (0..n).map(|j| self.output(j).to_vec()).collect(),
            self.origins[..n].to_vec(),
        )
    }

    /// Multiplies one column (inputs first, then outputs) by `factor`.
    pub fn rescaled(&self, column: usize, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::input("scale factor must be positive"));
        }
        let mut inputs: Vec<Vec<f64>> = (0..self.len()).map(|j| self.input(j).to_vec()).collect();
        let mut outputs: Vec<Vec<f64>> = (0..self.len()).map(|j| self.output(j).to_vec()).collect();
        for j in 0..self.len() {
            if column < self.m {
                inputs[j][column] *= factor;
            } else {
                outputs[j][column - self.m] *= factor;
            }
        }
        Self::with_origins(self.ids.clone(), inputs, outputs, self.origins.clone())
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.x().len() != self.m {
            return Err(Error::DimensionMismatch { what: "point inputs", expected: self.m, got: p.x().len() });
        }
        if p.y().len() != self.r {
            return Err(Error::DimensionMismatch { what: "point outputs", expected: self.r, got: p.y().len() });
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.len() {
            return Err(Error::input(format!("unit index {j} out of range 0..{}", self.len())));
        }
        Ok(())
    }

    /// Name of a column in the concatenated `(x, y)` order, e.g. `x2` or `y1`.
    pub fn column_label(&self, k: usize) -> String {
        column_label(self.m, k)
    }
}

pub(crate) fn column_label(m: usize, k: usize) -> String {
    if k < m {
        format!("x{}", k + 1)
    } else {
        format!("y{}", k - m + 1)
    }
}

impl ColumnScales {
    fn compute(x: &[f64], m: usize, y: &[f64], r: usize, n: usize) -> Result<Self> {
        let stats = |data: &[f64], width: usize, k: usize| {
            let col = (0..n).map(|j| data[j * width + k]);
            let (lo, hi) = col.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
            (lo, hi)
        };
        let mut s = Self {
            input_scale: Vec::with_capacity(m),
            output_scale: Vec::with_capacity(r),
            input_range: Vec::with_capacity(m),
            output_range: Vec::with_capacity(r),
        };
        for k in 0..m {
            let (lo, hi) = stats(x, m, k);
            if hi <= 0.0 {
                return Err(Error::input(format!("input column x{} has no positive entry", k + 1)));
            }
            s.input_scale.push(hi);
            s.input_range.push(if hi > lo { hi - lo } else { hi });
        }
        for i in 0..r {
            let (lo, hi) = stats(y, r, i);
            if hi <= 0.0 {
                return Err(Error::input(format!("output column y{} has no positive entry", i + 1)));
            }
            s.output_scale.push(hi);
            s.output_range.push(if hi > lo { hi - lo } else { hi });
        }
        Ok(s)
    }

    /// Range of column `k` in the concatenated `(x, y)` order.
    pub fn range(&self, k: usize) -> f64 {
        let m = self.input_range.len();
        if k < m {
            self.input_range[k]
        } else {
            self.output_range[k - m]
        }
    }

    pub fn scale(&self, k: usize) -> f64 {
        let m = self.input_scale.len();
        if k < m {
            self.input_scale[k]
        } else {
            self.output_scale[k - m]
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x: {:?}, y: {:?})", self.x, self.y)
    }
}
