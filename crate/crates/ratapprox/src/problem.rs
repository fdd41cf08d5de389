//! The discretized approximation problem: the maximal deviation, active
//! sets, deviation gradients, and the generator set whose convex hull is
//! the Clarke subdifferential of the maximal deviation.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::util::parse_two_column_csv;

/// Absolute tolerance used to match externally supplied abscissae (CSV
/// targets, tabulated kernels) against grid points.
pub(crate) const GRID_MATCH_TOL: f64 = 1e-9;

/// An ordered set of distinct abscissae; the discrete stand-in for the
/// compact approximation domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("grid contains non-finite points".into()));
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "grid points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `m` equidistant points covering `[lo, hi]`, both endpoints included.
    pub fn uniform(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "grid interval is empty: [{lo}, {hi}]"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "uniform grid needs at least 2 points, got {m}"
            )));
        }
        let step = (hi - lo) / (m - 1) as f64;
        let mut points: Vec<f64> = (0..m).map(|i| lo + i as f64 * step).collect();
        points[m - 1] = hi;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

/// Target functions named in the experiment tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedTarget {
    Abs,
    Sin,
    AbsSin,
    SqrtAbs,
    One,
    Runge,
    Ratl1,
    Ratl2,
    SinCos,
}

impl NamedTarget {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            NamedTarget::Abs => t.abs(),
            NamedTarget::Sin => t.sin(),
            NamedTarget::AbsSin => t.sin().abs(),
            NamedTarget::SqrtAbs => t.abs().sqrt(),
            NamedTarget::One => 1.0,
            NamedTarget::Runge => 1.0 / (t * t + 1.0),
            NamedTarget::Ratl1 => t / (t + 1.5),
            NamedTarget::Ratl2 => (t * t - 1.0) / (t + 2.0),
            NamedTarget::SinCos => (t.sin() - t.cos()) / (t + 2.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedTarget::Abs => "abs",
            NamedTarget::Sin => "sin",
            NamedTarget::AbsSin => "abssin",
            NamedTarget::SqrtAbs => "sqrtabs",
            NamedTarget::One => "one",
            NamedTarget::Runge => "runge",
            NamedTarget::Ratl1 => "ratl1",
            NamedTarget::Ratl2 => "ratl2",
            NamedTarget::SinCos => "sincos",
        }
    }
}

impl FromStr for NamedTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" => Ok(NamedTarget::Abs),
            "sin" => Ok(NamedTarget::Sin),
            "abssin" => Ok(NamedTarget::AbsSin),
            "sqrtabs" => Ok(NamedTarget::SqrtAbs),
            "one" => Ok(NamedTarget::One),
            "runge" => Ok(NamedTarget::Runge),
            "ratl1" => Ok(NamedTarget::Ratl1),
            "ratl2" => Ok(NamedTarget::Ratl2),
            "sincos" => Ok(NamedTarget::SinCos),
            other => Err(Error::InvalidArgument(format!(
                "unknown target function '{other}'"
            ))),
        }
    }
}

/// The function being approximated: a registry name or samples on the
/// grid (from a two-column CSV whose t column must match the grid).
#[derive(Debug, Clone)]
pub enum Target {
    Named(NamedTarget),
    Sampled { ts: Vec<f64>, values: Vec<f64> },
}

impl Target {
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let (ts, values) = parse_two_column_csv(text)?;
        if !ts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "sampled target abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Target::Sampled { ts, values })
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    /// Values of the target on the grid points.
    pub fn sample_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Target::Named(f) => Ok(grid.points().iter().map(|&t| f.eval(t)).collect()),
            Target::Sampled { ts, values } => {
                if ts.len() != grid.len() {
                    return Err(Error::InvalidArgument(format!(
                        "sampled target has {} rows but the grid has {} points",
                        ts.len(),
                        grid.len()
                    )));
                }
                for (&t_csv, &t_grid) in ts.iter().zip(grid.points()) {
                    if (t_csv - t_grid).abs() > GRID_MATCH_TOL * t_grid.abs().max(1.0) {
                        return Err(Error::OffGrid { t: t_csv });
                    }
                }
                Ok(values.clone())
            }
        }
    }

    /// Plot-friendly evaluation anywhere on the interval; sampled targets
    /// are linearly interpolated.
    pub fn value_for_plot(&self, t: f64) -> f64 {
        match self {
            Target::Named(f) => f.eval(t),
            Target::Sampled { ts, values } => crate::basis::interpolate(ts, values, t),
        }
    }
}

/// The decision vector: numerator coefficients `a` (length n+1) and
/// denominator coefficients `b` (length m+1), flattened as (a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
}

impl CoefficientPair {
    pub fn new(a: DVector<f64>, b: DVector<f64>) -> Self {
        Self { a, b }
    }

    pub fn from_slices(a: &[f64], b: &[f64]) -> Self {
        Self {
            a: DVector::from_row_slice(a),
            b: DVector::from_row_slice(b),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn flatten(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, self.a.len()).copy_from(&self.a);
        v.rows_mut(self.a.len(), self.b.len()).copy_from(&self.b);
        v
    }

    /// Split a flat (a, b) vector back into the pair for degrees (n, m).
    pub fn from_flat(n: usize, m: usize, v: &DVector<f64>) -> Result<Self> {
        if v.len() != n + m + 2 {
            return Err(Error::InvalidArgument(format!(
                "flat vector has length {}, expected {}",
                v.len(),
                n + m + 2
            )));
        }
        Ok(Self {
            a: v.rows(0, n + 1).into_owned(),
            b: v.rows(n + 1, m + 1).into_owned(),
        })
    }
}

/// Whether an active grid point attains +psi or -psi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Indices of grid points where the deviation attains the maximum (up to
/// `tol_active`), split by sign.
#[derive(Debug, Clone)]
pub struct ActiveSets {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub psi: f64,
    pub tol_active: f64,
}

/// A finite set of vectors whose convex hull represents the Clarke
/// subdifferential at a point, with the (grid index, sign) each vector
/// came from.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub vectors: Vec<DVector<f64>>,
    pub provenance: Vec<(usize, Sign)>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// A fully discretized instance: grid, target samples, and the numerator
/// and denominator basis matrices evaluated on the grid.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    grid: Grid,
    f_values: Vec<f64>,
    g: DMatrix<f64>,
    h: DMatrix<f64>,
    n: usize,
    m: usize,
}

impl ProblemInstance {
    pub fn new(
        grid: Grid,
        f_values: Vec<f64>,
        g: DMatrix<f64>,
        h: DMatrix<f64>,
        n: usize,
        m: usize,
    ) -> Result<Self> {
        let rows = grid.len();
        if f_values.len() != rows || g.nrows() != rows || h.nrows() != rows {
            return Err(Error::InvalidArgument(format!(
                "row mismatch: grid {rows}, f {}, G {}, H {}",
                f_values.len(),
                g.nrows(),
                h.nrows()
            )));
        }
        if g.ncols() != n + 1 || h.ncols() != m + 1 {
            return Err(Error::InvalidArgument(format!(
                "column mismatch: G {}x expected {}, H {} expected {}",
                g.ncols(),
                n + 1,
                h.ncols(),
                m + 1
            )));
        }
        if f_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("target samples must be finite".into()));
        }
        if (0..rows).any(|i| h[(i, 0)] != 1.0) {
            return Err(Error::InvalidArgument(
                "denominator basis element 0 must be identically 1".into(),
            ));
        }
        Ok(Self {
            grid,
            f_values,
            g,
            h,
            n,
            m,
        })
    }

    /// Sample the target and evaluate both bases on the grid.
    pub fn build(
        grid: Grid,
        target: &Target,
        num_basis: &BasisSpec,
        n: usize,
        den_basis: &BasisSpec,
        m: usize,
    ) -> Result<Self> {
        let f_values = target.sample_on(&grid)?;
        let g = num_basis.eval_basis_grid(n, &grid)?;
        let h = den_basis.eval_basis_grid(m, &grid)?;
        Self::new(grid, f_values, g, h, n, m)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    pub fn num_matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn den_matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Dimension of the flattened decision vector, n + m + 2.
    pub fn dim(&self) -> usize {
        self.n + self.m + 2
    }

    fn row_dot(matrix: &DMatrix<f64>, i: usize, v: &DVector<f64>) -> f64 {
        // Plain left-to-right accumulation; keeps single-row evaluation
        // bit-identical to the column-sweep used by `linear_forms`.
        let mut s = 0.0;
        for j in 0..matrix.ncols() {
            s += matrix[(i, j)] * v[j];
        }
        s
    }

    /// Numerator values <a, g(t_i)> and denominator values <b, h(t_i)>
    /// for every grid row.
    pub fn linear_forms(&self, x: &CoefficientPair) -> (DVector<f64>, DVector<f64>) {
        let mut num = DVector::zeros(self.grid.len());
        let mut den = DVector::zeros(self.grid.len());
        // Column sweeps accumulate each row sum in index order.
        for j in 0..self.g.ncols() {
            let aj = x.a[j];
            for i in 0..self.grid.len() {
                num[i] += self.g[(i, j)] * aj;
            }
        }
        for j in 0..self.h.ncols() {
            let bj = x.b[j];
            for i in 0..self.grid.len() {
                den[i] += self.h[(i, j)] * bj;
            }
        }
        (num, den)
    }

    /// Deviation sigma_i = f(t_i) - <a,g(t_i)>/<b,h(t_i)> at one grid row.
    pub fn deviation(&self, x: &CoefficientPair, i: usize) -> Result<f64> {
        let den = Self::row_dot(&self.h, i, &x.b);
        if !(den > 0.0) {
            return Err(Error::InfeasiblePoint { index: i, denom: den });
        }
        let num = Self::row_dot(&self.g, i, &x.a);
        Ok(self.f_values[i] - num / den)
    }

    /// All deviations at once; errors on the smallest row with a
    /// nonpositive denominator.
    pub fn deviations(&self, x: &CoefficientPair) -> Result<DVector<f64>> {
        let (num, den) = self.linear_forms(x);
        let mut sigma = DVector::zeros(self.grid.len());
        for i in 0..self.grid.len() {
            if !(den[i] > 0.0) {
                return Err(Error::InfeasiblePoint {
                    index: i,
                    denom: den[i],
                });
            }
            sigma[i] = self.f_values[i] - num[i] / den[i];
        }
        Ok(sigma)
    }

    /// The maximal deviation psi = max_i |sigma_i| and the smallest index
    /// attaining it.
    pub fn max_deviation(&self, x: &CoefficientPair) -> Result<(f64, usize)> {
        let sigma = self.deviations(x)?;
        let mut psi = -1.0;
        let mut argmax = 0;
        for (i, &s) in sigma.iter().enumerate() {
            let v = s.abs();
            if v > psi {
                psi = v;
                argmax = i;
            }
        }
        Ok((psi, argmax))
    }

    /// Grid indices whose deviation attains psi up to `tol_active`,
    /// split by the sign of the deviation.
    pub fn active_sets(&self, x: &CoefficientPair, tol_active: f64) -> Result<ActiveSets> {
        let sigma = self.deviations(x)?;
        let psi = sigma.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
        let cut = psi - tol_active;
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (i, &s) in sigma.iter().enumerate() {
            if s >= cut {
                plus.push(i);
            }
            if -s >= cut {
                minus.push(i);
            }
        }
        Ok(ActiveSets {
            plus,
            minus,
            psi,
            tol_active,
        })
    }

    /// Gradient of sigma_{t_i} with respect to the flattened (a, b):
    /// the a-block is -g(t_i)/<b,h>, the b-block is <a,g> h(t_i)/<b,h>^2.
    pub fn sigma_gradient(&self, x: &CoefficientPair, i: usize) -> Result<DVector<f64>> {
        let den = Self::row_dot(&self.h, i, &x.b);
        if !(den > 0.0) {
            return Err(Error::InfeasiblePoint { index: i, denom: den });
        }
        let num = Self::row_dot(&self.g, i, &x.a);
        let inv = 1.0 / den;
        let scale_b = num * inv * inv;
        let mut grad = DVector::zeros(self.dim());
        for j in 0..=self.n {
            grad[j] = -self.g[(i, j)] * inv;
        }
        for j in 0..=self.m {
            grad[self.n + 1 + j] = scale_b * self.h[(i, j)];
        }
        Ok(grad)
    }

    /// Generators of the Clarke subdifferential of psi at `x`: the
    /// gradients of active positive deviations and the negated gradients
    /// of active negative deviations, ordered by (grid index, sign) and
    /// deduplicated bitwise.
    pub fn subdiff_generators(&self, x: &CoefficientPair, tol_active: f64) -> Result<GeneratorSet> {
        let active = self.active_sets(x, tol_active)?;
        let mut in_plus = vec![false; self.grid.len()];
        let mut in_minus = vec![false; self.grid.len()];
        for &i in &active.plus {
            in_plus[i] = true;
        }
        for &i in &active.minus {
            in_minus[i] = true;
        }
        let mut vectors: Vec<DVector<f64>> = Vec::new();
        let mut provenance = Vec::new();
        let mut push_unique = |v: DVector<f64>, tag: (usize, Sign)| {
            let dup = vectors.iter().any(|w| {
                w.iter()
                    .zip(v.iter())
                    .all(|(x, y)| x.to_bits() == y.to_bits())
            });
            if !dup {
                vectors.push(v);
                provenance.push(tag);
            }
        };
        for i in 0..self.grid.len() {
            if in_plus[i] {
                push_unique(self.sigma_gradient(x, i)?, (i, Sign::Plus));
            }
            if in_minus[i] {
                push_unique(-self.sigma_gradient(x, i)?, (i, Sign::Minus));
            }
        }
        Ok(GeneratorSet {
            vectors,
            provenance,
        })
    }

    /// True iff <b, h(t_i)> >= 1 - margin on every grid row.
    pub fn feasible(&self, x: &CoefficientPair, margin: f64) -> bool {
        let (_, den) = self.linear_forms(x);
        den.iter().all(|&d| d >= 1.0 - margin)
    }

    /// Ratio value <a,g(t_i)>/<b,h(t_i)> at a grid row.
    pub fn ratio_at_row(&self, x: &CoefficientPair, i: usize) -> Result<f64> {
        let den = Self::row_dot(&self.h, i, &x.b);
        if !(den > 0.0) {
            return Err(Error::InfeasiblePoint { index: i, denom: den });
        }
        Ok(Self::row_dot(&self.g, i, &x.a) / den)
    }
}

/// Scale-free active-set tolerance: 1e-8 * max(1, psi).
pub fn default_active_tol(psi: f64) -> f64 {
    1e-8 * psi.abs().max(1.0)
}
