//! Reference implementations used to cross-check the library: an exact
//! rational simplex, a basic-solution enumerator and a λ-grid search.
//! None of them share code with the crate under test. Also holds the
//! generators and geometry helpers shared by several test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use dea_frontier::dataset::{Dataset, Point};
use dea_frontier::lp::{LpProblem, RowSense};
use dea_frontier::sections::SectionPolyline;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn d3() -> Dataset {
    dataset(&[("E", &[1.0, 4.0], &[1.0]), ("D", &[2.0, 2.0], &[1.0]), ("C", &[4.0, 1.0], &[1.0])])
}

pub fn dataset(rows: &[(&str, &[f64], &[f64])]) -> Dataset {
    Dataset::new(
        rows.iter().map(|r| r.0.to_string()).collect(),
        rows.iter().map(|r| r.1.to_vec()).collect(),
        rows.iter().map(|r| r.2.to_vec()).collect(),
    )
    .unwrap()
}

pub fn with_units(ds: &Dataset, extra: &[(&str, &[f64], &[f64])]) -> Dataset {
    let extra: Vec<_> = extra
        .iter()
        .map(|(id, x, y)| (id.to_string(), Point::new(x.to_vec(), y.to_vec()).unwrap(), dea_frontier::Origin::Original))
        .collect();
    ds.extended(&extra).unwrap()
}

// ---------------------------------------------------------------------------
// Exact rational simplex (Bland's rule throughout).

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Integer LP: minimize c·x subject to rows and per-variable bounds
/// (`None` means infinite).
#[derive(Clone, Debug)]
pub struct IntLp {
    pub c: Vec<i64>,
    pub rows: Vec<(Vec<i64>, Sense, i64)>,
    pub bounds: Vec<(Option<i64>, Option<i64>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exact {
    Optimal(BigRational),
    Infeasible,
    Unbounded,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn to_f64(v: &BigRational) -> f64 {
    v.numer().to_f64().unwrap() / v.denom().to_f64().unwrap()
}

/// Standard form: every original variable becomes nonnegative columns.
/// x = l + p, x = u − p, or x = p⁺ − p⁻; a finite upper bound next to a
/// finite lower bound adds a row.
pub fn solve_exact(lp: &IntLp) -> Exact {
    let nv = lp.c.len();
    // (column, coefficient) pairs per original variable, and constant offsets.
    let mut cols: Vec<Vec<(usize, i64)>> = Vec::with_capacity(nv);
    let mut offset = vec![0i64; nv];
    let mut ncols = 0usize;
    let mut extra_rows: Vec<(Vec<(usize, i64)>, i64)> = Vec::new();
    for (v, &(lo, hi)) in lp.bounds.iter().enumerate() {
        match (lo, hi) {
            (Some(l), hi) => {
                offset[v] = l;
                cols.push(vec![(ncols, 1)]);
                if let Some(u) = hi {
                    extra_rows.push((vec![(ncols, 1)], u - l));
                }
                ncols += 1;
            }
            (None, Some(u)) => {
                offset[v] = u;
                cols.push(vec![(ncols, -1)]);
                ncols += 1;
            }
            (None, None) => {
                cols.push(vec![(ncols, 1), (ncols + 1, -1)]);
                ncols += 2;
            }
        }
    }
    // Rows as dense rationals over standard columns.
    let mut a: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();
    let mut senses = Vec::new();
    for (row, sense, rhs) in &lp.rows {
        let mut dense = vec![BigRational::zero(); ncols];
        let mut r = *rhs;
        for (v, &coef) in row.iter().enumerate() {
            r -= coef * offset[v];
            for &(c, s) in &cols[v] {
                dense[c] += q(coef * s);
            }
        }
        a.push(dense);
        b.push(q(r));
        senses.push(*sense);
    }
    for (entries, rhs) in extra_rows {
        let mut dense = vec![BigRational::zero(); ncols];
        for (c, s) in entries {
            dense[c] = q(s);
        }
        a.push(dense);
        b.push(q(rhs));
        senses.push(Sense::Le);
    }
    let mut cost = vec![BigRational::zero(); ncols];
    let mut const_obj = BigRational::zero();
    for (v, &cv) in lp.c.iter().enumerate() {
        const_obj += q(cv * offset[v]);
        for &(c, s) in &cols[v] {
            cost[c] += q(cv * s);
        }
    }
    // Slack columns, then one artificial per row.
    let m = a.len();
    let nslack = senses.iter().filter(|s| **s != Sense::Eq).count();
    let width = ncols + nslack + m;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); width + 1]; m];
    let mut si = ncols;
    for i in 0..m {
        t[i][..ncols].clone_from_slice(&a[i]);
        match senses[i] {
            Sense::Le => {
                t[i][si] = BigRational::one();
                si += 1;
            }
            Sense::Ge => {
                t[i][si] = -BigRational::one();
                si += 1;
            }
            Sense::Eq => {}
        }
        t[i][width] = b[i].clone();
        if b[i].is_negative() {
            for v in t[i].iter_mut() {
                *v = -v.clone();
            }
        }
        t[i][ncols + nslack + i] = BigRational::one();
    }
    let art0 = ncols + nslack;
    let mut basis: Vec<usize> = (0..m).map(|i| art0 + i).collect();
    let mut phase1 = vec![BigRational::zero(); width];
    for v in phase1.iter_mut().skip(art0) {
        *v = BigRational::one();
    }
    let allowed: Vec<bool> = (0..width).map(|_| true).collect();
    if run_bland(&mut t, &mut basis, &phase1, &allowed) == Run::Unbounded {
        unreachable!("phase 1 is bounded below");
    }
    let infeas: BigRational = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= art0)
        .map(|(i, _)| t[i][width].clone())
        .sum();
    if infeas.is_positive() {
        return Exact::Infeasible;
    }
    // Drive zero-level artificials out; drop redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= art0 {
            if let Some(col) = (0..art0).find(|&c| !t[i][c].is_zero()) {
                pivot(&mut t, &mut basis, i, col);
                i += 1;
            } else {
                t.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    let allowed: Vec<bool> = (0..width).map(|c| c < art0).collect();
    let mut cost_full = cost;
    cost_full.resize(width, BigRational::zero());
    match run_bland(&mut t, &mut basis, &cost_full, &allowed) {
        Run::Unbounded => Exact::Unbounded,
        Run::Optimal => {
            let mut z = const_obj;
            for (i, &bv) in basis.iter().enumerate() {
                z += &cost_full[bv] * &t[i][width];
            }
            Exact::Optimal(z)
        }
    }
}

#[derive(PartialEq)]
enum Run {
    Optimal,
    Unbounded,
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    basis[r] = c;
}

fn run_bland(t: &mut [Vec<BigRational>], basis: &mut [usize], cost: &[BigRational], allowed: &[bool]) -> Run {
    let width = cost.len();
    loop {
        // Reduced cost d_j = c_j − c_B · column_j.
        let mut entering = None;
        for j in 0..width {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut d = cost[j].clone();
            for (i, &bv) in basis.iter().enumerate() {
                if !cost[bv].is_zero() && !t[i][j].is_zero() {
                    d -= &cost[bv] * &t[i][j];
                }
            }
            if d.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { return Run::Optimal };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = &t[i][width] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { return Run::Unbounded };
        pivot(t, basis, r, j);
    }
}

// ---------------------------------------------------------------------------
// Basic-solution enumeration for small polytopes {z ≥ 0 : A z = b}.

const ENUM_TOL: f64 = 1e-9;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All feasible basic solutions of `A z = b, z ≥ 0`. `A` must have full
/// row rank.
pub fn basic_solutions(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<DVector<f64>> {
    let (m, n) = a.shape();
    let mut out = Vec::new();
    for cols in combinations(n, m) {
        let sub = DMatrix::from_fn(m, m, |i, j| a[(i, cols[j])]);
        let lu = sub.clone().lu();
        let Some(xb) = lu.solve(b) else { continue };
        if !xb.iter().all(|v| v.is_finite()) {
            continue;
        }
        // Reject near-singular bases whose solution does not satisfy the system.
        if (&sub * &xb - b).amax() > 1e-9 * (1.0 + b.amax()) {
            continue;
        }
        if xb.iter().all(|&v| v >= -ENUM_TOL) {
            let mut z = DVector::zeros(n);
            for (k, &c) in cols.iter().enumerate() {
                z[c] = xb[k].max(0.0);
            }
            out.push(z);
        }
    }
    out
}

/// Builder for `A z = b` systems over named column blocks.
struct System {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    width: usize,
}

impl System {
    fn new(width: usize) -> Self {
        Self { rows: Vec::new(), rhs: Vec::new(), width }
    }

    fn row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        let mut r = vec![0.0; self.width];
        for (c, v) in coeffs {
            r[c] += v;
        }
        self.rows.push(r);
        self.rhs.push(rhs);
    }

    fn solutions(&self) -> Vec<DVector<f64>> {
        let a = DMatrix::from_fn(self.rows.len(), self.width, |i, j| self.rows[i][j]);
        basic_solutions(&a, &DVector::from_vec(self.rhs.clone()))
    }
}

/// Columns: λ (n) | s⁻ (m) | s⁺ (r) | extra. Rows: input balances, output
/// balances, convexity. `x_coef` and `y_coef` give the extra column's
/// coefficient per balance row; `x_rhs`, `y_rhs` the right-hand sides.
fn envelopment(
    ds: &Dataset,
    units: &[usize],
    extra: usize,
    x_rhs: &[f64],
    y_rhs: &[f64],
    x_coef: impl Fn(usize) -> Vec<(usize, f64)>,
    y_coef: impl Fn(usize) -> Vec<(usize, f64)>,
) -> (System, usize) {
    let (n, m, r) = (units.len(), ds.num_inputs(), ds.num_outputs());
    let base = n + m + r;
    let mut sys = System::new(base + extra);
    for k in 0..m {
        let mut c: Vec<(usize, f64)> = units.iter().enumerate().map(|(l, &j)| (l, ds.input(j)[k])).collect();
        c.push((n + k, 1.0));
        c.extend(x_coef(k).into_iter().map(|(e, v)| (base + e, v)));
        sys.row(c, x_rhs[k]);
    }
    for i in 0..r {
        let mut c: Vec<(usize, f64)> = units.iter().enumerate().map(|(l, &j)| (l, ds.output(j)[i])).collect();
        c.push((n + m + i, -1.0));
        c.extend(y_coef(i).into_iter().map(|(e, v)| (base + e, v)));
        sys.row(c, y_rhs[i]);
    }
    sys.row((0..n).map(|l| (l, 1.0)).collect(), 1.0);
    (sys, base)
}

fn all_units(ds: &Dataset) -> Vec<usize> {
    (0..ds.len()).collect()
}

/// min θ of the input-oriented envelopment problem, or `None` when the
/// target lies outside the set.
pub fn oracle_theta(ds: &Dataset, p: &Point) -> Option<f64> {
    let zeros = vec![0.0; ds.num_inputs()];
    let (sys, base) = envelopment(ds, &all_units(ds), 1, &zeros, p.y(), |k| vec![(0, -p.x()[k])], |_| vec![]);
    sys.solutions().iter().map(|z| z[base]).min_by(f64::total_cmp)
}

/// max η of the output-oriented envelopment problem.
pub fn oracle_eta(ds: &Dataset, p: &Point) -> Option<f64> {
    let zeros = vec![0.0; ds.num_outputs()];
    let (sys, base) = envelopment(ds, &all_units(ds), 1, p.x(), &zeros, |_| vec![], |i| vec![(0, -p.y()[i])]);
    sys.solutions().iter().map(|z| z[base]).max_by(f64::total_cmp)
}

/// Largest total slack (scaled by column maxima) at the point itself.
pub fn oracle_additive(ds: &Dataset, p: &Point) -> Option<f64> {
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let n = ds.len();
    let (sys, _) = envelopment(ds, &all_units(ds), 0, p.x(), p.y(), |_| vec![], |_| vec![]);
    let scale: Vec<f64> = (0..m)
        .map(|k| (0..n).map(|j| ds.input(j)[k]).fold(0.0, f64::max))
        .chain((0..r).map(|i| (0..n).map(|j| ds.output(j)[i]).fold(0.0, f64::max)))
        .collect();
    sys.solutions()
        .iter()
        .map(|z| (0..m + r).map(|c| z[n + c] / scale[c]).sum::<f64>())
        .max_by(f64::total_cmp)
}

/// Whether `p` is in the set spanned by `units`.
pub fn oracle_member(ds: &Dataset, units: &[usize], p: &Point) -> bool {
    if units.is_empty() {
        return false;
    }
    let (sys, _) = envelopment(ds, units, 0, p.x(), p.y(), |_| vec![], |_| vec![]);
    !sys.solutions().is_empty()
}

/// Largest uniform improvement δ ≥ 0 (raw units) keeping `p` in the set.
pub fn oracle_gap(ds: &Dataset, p: &Point) -> Option<f64> {
    oracle_gap_raw(ds, p.x(), p.y())
}

/// As [`oracle_gap`] for coordinates that may be negative (the set has no
/// sign restriction on outputs).
pub fn oracle_gap_raw(ds: &Dataset, x: &[f64], y: &[f64]) -> Option<f64> {
    let (sys, base) = envelopment(ds, &all_units(ds), 1, x, y, |_| vec![(0, 1.0)], |_| vec![(0, -1.0)]);
    sys.solutions().iter().map(|z| z[base]).max_by(f64::total_cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleClass {
    Extreme,
    NonExtreme,
    Weak,
    Inefficient,
}

pub fn oracle_class(ds: &Dataset, j: usize) -> OracleClass {
    let p = ds.point(j);
    let theta = oracle_theta(ds, &p).unwrap();
    let zero_out = p.y().iter().all(|&v| v == 0.0);
    let theta_one = (theta - 1.0).abs() <= 1e-9;
    if zero_out {
        return if theta_one { OracleClass::Weak } else { OracleClass::Inefficient };
    }
    let eta = oracle_eta(ds, &p).unwrap();
    let eta_one = (eta - 1.0).abs() <= 1e-9;
    if !(theta_one && eta_one) {
        return OracleClass::Inefficient;
    }
    if oracle_additive(ds, &p).unwrap() > 1e-9 {
        return OracleClass::Weak;
    }
    let others: Vec<usize> = (0..ds.len())
        .filter(|&u| !(ds.input(u) == p.x() && ds.output(u) == p.y()))
        .collect();
    if oracle_member(ds, &others, &p) {
        OracleClass::NonExtreme
    } else {
        OracleClass::Extreme
    }
}

/// Terminal directions of unit `j`, as `(is_output, axis)` pairs. A
/// direction qualifies when the probe one range unit along it stays on the
/// boundary and every generator with a positive coefficient in some
/// representation of the probe lies on the ray itself.
pub fn oracle_terminal(ds: &Dataset, j: usize, probe: f64) -> BTreeSet<(bool, usize)> {
    let mut out = BTreeSet::new();
    if oracle_class(ds, j) != OracleClass::Extreme {
        return out;
    }
    let (n, m, r) = (ds.len(), ds.num_inputs(), ds.num_outputs());
    let range = |c: usize| {
        let vals: Vec<f64> = (0..n).map(|u| if c < m { ds.input(u)[c] } else { ds.output(u)[c - m] }).collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        if hi - lo > 0.0 {
            hi - lo
        } else {
            hi
        }
    };
    for c in 0..m + r {
        let step = probe * range(c);
        let mut x = ds.input(j).to_vec();
        let mut y = ds.output(j).to_vec();
        if c < m {
            x[c] += step;
        } else {
            y[c - m] -= step;
        }
        if oracle_gap_raw(ds, &x, &y).unwrap_or(f64::INFINITY) > 1e-9 {
            continue;
        }
        let (sys, _) = envelopment(ds, &all_units(ds), 0, &x, &y, |_| vec![], |_| vec![]);
        let sols = sys.solutions();
        let mut ok = true;
        for g in 0..n + m + r {
            let best = sols.iter().map(|z| z[g]).fold(0.0, f64::max);
            if best <= 1e-9 {
                continue;
            }
            let on_ray = if g < n {
                let (ux, uy) = (ds.input(g), ds.output(g));
                (0..m + r).all(|k| {
                    let (a, b) = if k < m { (ux[k], ds.input(j)[k]) } else { (uy[k - m], ds.output(j)[k - m]) };
                    if k == c {
                        if k < m {
                            a >= b - 1e-12
                        } else {
                            a <= b + 1e-12
                        }
                    } else {
                        (a - b).abs() <= 1e-12
                    }
                })
            } else {
                g - n == c
            };
            if !on_ray {
                ok = false;
                break;
            }
        }
        if ok {
            out.insert((c >= m, if c < m { c } else { c - m }));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// λ-grid search.

/// Input-oriented score by scanning λ over the simplex with step `1/res`:
/// for each grid λ meeting the output levels, θ(λ) = max_k Σλx_k / x_ok.
pub fn grid_theta(ds: &Dataset, p: &Point, res: usize) -> Option<f64> {
    let n = ds.len();
    let mut best: Option<f64> = None;
    let mut lam = vec![0usize; n];
    fn rec(k: usize, left: usize, lam: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k + 1 == lam.len() {
            lam[k] = left;
            f(lam);
            return;
        }
        for v in 0..=left {
            lam[k] = v;
            rec(k + 1, left - v, lam, f);
        }
    }
    let mut visit = |l: &[usize]| {
        let w: Vec<f64> = l.iter().map(|&v| v as f64 / res as f64).collect();
        let feasible = (0..ds.num_outputs())
            .all(|i| (0..n).map(|j| w[j] * ds.output(j)[i]).sum::<f64>() >= p.y()[i] - 1e-12);
        if !feasible {
            return;
        }
        let theta = (0..ds.num_inputs())
            .filter(|&k| p.x()[k] > 0.0)
            .map(|k| (0..n).map(|j| w[j] * ds.input(j)[k]).sum::<f64>() / p.x()[k])
            .fold(0.0, f64::max);
        if best.is_none_or(|b| theta < b) {
            best = Some(theta);
        }
    };
    rec(0, res, &mut lam, &mut visit);
    best
}

/// Random small dataset with integer values in `1..=hi`.
pub fn random_dataset(rng: &mut impl rand::Rng, n: usize, m: usize, r: usize, hi: u32) -> Dataset {
    let mut draw = |k: usize| -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..k).map(|_| rng.random_range(1..=hi) as f64).collect()).collect()
    };
    let x = draw(m);
    let y = draw(r);
    Dataset::new((0..n).map(|j| format!("u{j}")).collect(), x, y).unwrap()
}

// Random integer LPs.

pub fn to_problem(lp: &IntLp) -> LpProblem {
    let mut p = LpProblem::new(lp.c.iter().map(|&v| v as f64).collect());
    for (row, sense, b) in &lp.rows {
        let sense = match sense {
            Sense::Le => RowSense::Le,
            Sense::Ge => RowSense::Ge,
            Sense::Eq => RowSense::Eq,
        };
        let coeffs: Vec<f64> = row.iter().map(|&v| v as f64).collect();
        p.add_row(&coeffs, sense, *b as f64).unwrap();
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        let lo = lo.map_or(f64::NEG_INFINITY, |v| v as f64);
        let hi = hi.map_or(f64::INFINITY, |v| v as f64);
        p.set_bounds(j, lo, hi).unwrap();
    }
    p
}

/// Mixed senses and bounds. Most instances are built around a known
/// feasible integer point with finite boxes, so most are optimal; the rest
/// draw arbitrary right-hand sides and half-free variables.
pub fn random_lp(rng: &mut ChaCha8Rng) -> IntLp {
    let nv = rng.random_range(1..=30);
    let nr = rng.random_range(1..=20);
    // 0..=6: anchored and mostly boxed; 7..=8: arbitrary right-hand sides;
    // 9: anchored with many unbounded variables.
    let kind = rng.random_range(0..10);
    let anchored = kind != 7 && kind != 8;
    let open = if kind == 9 { 0.5 } else { 0.08 };
    let c = (0..nv).map(|_| rng.random_range(-9..=9)).collect();
    let bounds: Vec<(Option<i64>, Option<i64>)> = (0..nv)
        .map(|_| {
            if rng.random_bool(open) {
                match rng.random_range(0..3) {
                    0 => (None, Some(rng.random_range(0..=6))),
                    1 => (Some(0), None),
                    _ => (None, None),
                }
            } else if rng.random_bool(0.6) {
                (Some(0), Some(rng.random_range(1..=10)))
            } else {
                (Some(rng.random_range(-3..=2)), Some(rng.random_range(3..=8)))
            }
        })
        .collect();
    let point: Vec<i64> = bounds
        .iter()
        .map(|&(lo, hi)| match (lo, hi) {
            (Some(l), Some(h)) => rng.random_range(l..=h),
            (Some(l), None) => l + rng.random_range(0..=3),
            (None, Some(h)) => h - rng.random_range(0..=3),
            (None, None) => rng.random_range(-3..=3),
        })
        .collect();
    let rows = (0..nr)
        .map(|_| {
            let row: Vec<i64> = (0..nv)
                .map(|_| if rng.random_bool(0.4) { rng.random_range(-5..=9) } else { 0 })
                .collect();
            let sense = match rng.random_range(0..10) {
                0..=5 => Sense::Le,
                6..=8 => Sense::Ge,
                _ => Sense::Eq,
            };
            let at: i64 = row.iter().zip(&point).map(|(a, x)| a * x).sum();
            let b = if anchored {
                match sense {
                    Sense::Le => at + rng.random_range(0..=5),
                    Sense::Ge => at - rng.random_range(0..=5),
                    Sense::Eq => at,
                }
            } else {
                rng.random_range(-10..=40)
            };
            (row, sense, b)
        })
        .collect();
    IntLp { c, rows, bounds }
}

// Polyline geometry.

/// Largest distance from a vertex of `a` to the curve of `b`, with each
/// axis measured in units of its own range.
pub fn max_vertex_shift(a: &SectionPolyline, b: &SectionPolyline, range: (f64, f64)) -> f64 {
    let norm = |p: (f64, f64)| (p.0 / range.0, p.1 / range.1);
    a.vertices
        .iter()
        .map(|&v| {
            let p = norm(v);
            let single = [b.vertices[0], b.vertices[0]];
            let pieces: Vec<&[(f64, f64)]> = if b.vertices.len() == 1 { vec![&single] } else { b.vertices.windows(2).collect() };
            pieces
                .into_iter()
                .map(|w| {
                    let (s, e) = (norm(w[0]), norm(w[1]));
                    let d = (e.0 - s.0, e.1 - s.1);
                    let len2 = d.0 * d.0 + d.1 * d.1;
                    let t = if len2 > 0.0 { (((p.0 - s.0) * d.0 + (p.1 - s.1) * d.1) / len2).clamp(0.0, 1.0) } else { 0.0 };
                    ((p.0 - s.0 - t * d.0).powi(2) + (p.1 - s.1 - t * d.1).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn axis_ranges(p: &SectionPolyline) -> (f64, f64) {
    let span = |f: fn(&(f64, f64)) -> f64| {
        let (lo, hi) = p.vertices.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        (hi - lo).max(1e-12)
    };
    (span(|v| v.0), span(|v| v.1))
}
