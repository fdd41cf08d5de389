//! Basis-function families for the numerator and denominator linear forms.
//!
//! Every family has the constant function 1 as element 0, which makes
//! `b = (1, 0, ..., 0)` a feasible denominator for any problem and keeps
//! the constraint `<b, h(t)> >= 1` attainable with equality.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::Grid;
use crate::util::parse_two_column_csv;

/// Scalar kernels available for the power-of-kernel family. The registry
/// is closed; anything else comes in as a [`BasisSpec::Tabulated`] table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Exp,
    Sin,
    Cos,
    Abs,
    Identity,
}

impl Kernel {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Kernel::Exp => t.exp(),
            Kernel::Sin => t.sin(),
            Kernel::Cos => t.cos(),
            Kernel::Abs => t.abs(),
            Kernel::Identity => t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Exp => "exp",
            Kernel::Sin => "sin",
            Kernel::Cos => "cos",
            Kernel::Abs => "abs",
            Kernel::Identity => "identity",
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(Kernel::Exp),
            "sin" => Ok(Kernel::Sin),
            "cos" => Ok(Kernel::Cos),
            "abs" => Ok(Kernel::Abs),
            "identity" | "id" | "t" => Ok(Kernel::Identity),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel '{other}' (registry: exp, sin, cos, abs, identity)"
            ))),
        }
    }
}

/// Samples of a kernel h(t) on a fixed, strictly increasing set of
/// abscissae. Queries are only defined at those abscissae.
#[derive(Debug, Clone)]
pub struct TabulatedKernel {
    ts: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedKernel {
    pub fn new(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ts.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "tabulated kernel: {} abscissae but {} values",
                ts.len(),
                values.len()
            )));
        }
        if ts.is_empty() {
            return Err(Error::InvalidArgument("tabulated kernel is empty".into()));
        }
        if !ts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "tabulated kernel abscissae must be strictly increasing".into(),
            ));
        }
        if ts.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "tabulated kernel contains non-finite entries".into(),
            ));
        }
        Ok(Self { ts, values })
    }

    /// Parse a two-column CSV `t, h(t)` (header optional).
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let (ts, values) = parse_two_column_csv(text)?;
        Self::new(ts, values)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    /// Exact lookup; `t` must be one of the stored abscissae.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        match self
            .ts
            .binary_search_by(|probe| probe.partial_cmp(&t).expect("finite abscissae"))
        {
            Ok(i) => Ok(self.values[i]),
            Err(_) => Err(Error::OffGrid { t }),
        }
    }

    /// Piecewise-linear evaluation, clamped at the ends. Only used for
    /// plot sampling; solves always stay on the tabulation grid.
    pub fn value_interpolated(&self, t: f64) -> f64 {
        interpolate(&self.ts, &self.values, t)
    }
}

pub(crate) fn interpolate(ts: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= ts[0] {
        return values[0];
    }
    if t >= ts[ts.len() - 1] {
        return values[values.len() - 1];
    }
    let hi = ts.partition_point(|&p| p < t);
    let (t0, t1) = (ts[hi - 1], ts[hi]);
    let w = (t - t0) / (t1 - t0);
    values[hi - 1] * (1.0 - w) + values[hi] * w
}

/// A family of basis functions; element k of the family is the k-th
/// function, and element 0 is identically 1.
#[derive(Debug, Clone)]
pub enum BasisSpec {
    /// 1, t, t^2, ...
    Monomial,
    /// 1, h(t), h(t)^2, ... for a registry kernel h.
    FunctionPower(Kernel),
    /// 1, h(t), h(t)^2, ... for h given by samples on the grid.
    Tabulated(TabulatedKernel),
}

impl BasisSpec {
    /// Evaluate elements 0..=degree at `t`. Component 0 is exactly 1 and
    /// component k is the k-th power of the family's base value, so the
    /// result for degree d is a prefix of the result for degree d+1.
    pub fn eval_basis(&self, degree: usize, t: f64) -> Result<DVector<f64>> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite abscissa {t}")));
        }
        let base = match self {
            BasisSpec::Monomial => t,
            BasisSpec::FunctionPower(k) => k.eval(t),
            BasisSpec::Tabulated(tab) => tab.value_at(t)?,
        };
        if !base.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "basis kernel is not finite at t = {t}"
            )));
        }
        let mut v = DVector::zeros(degree + 1);
        v[0] = 1.0;
        for k in 1..=degree {
            v[k] = v[k - 1] * base;
        }
        Ok(v)
    }

    /// Evaluate the family on a whole grid; row i is `eval_basis` at
    /// `grid[i]`, reproduced bit-for-bit.
    pub fn eval_basis_grid(&self, degree: usize, grid: &Grid) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(grid.len(), degree + 1);
        for (i, &t) in grid.points().iter().enumerate() {
            let row = self.eval_basis(degree, t)?;
            m.row_mut(i).copy_from(&row.transpose());
        }
        Ok(m)
    }

    /// Base kernel value for plotting, defined off-grid as well
    /// (tabulated kernels are linearly interpolated).
    pub fn kernel_value_for_plot(&self, t: f64) -> f64 {
        match self {
            BasisSpec::Monomial => t,
            BasisSpec::FunctionPower(k) => k.eval(t),
            BasisSpec::Tabulated(tab) => tab.value_interpolated(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn monomial_powers() {
        let v = BasisSpec::Monomial.eval_basis(2, 0.5).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn function_power_at_special_points() {
        let v = BasisSpec::FunctionPower(Kernel::Exp).eval_basis(2, 0.0).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 1.0, 1.0]);
        let v = BasisSpec::FunctionPower(Kernel::Sin)
            .eval_basis(2, FRAC_PI_2)
            .unwrap();
        assert_eq!(v.as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let grid = Grid::new(vec![-1.0, 1.0]).unwrap();
        let m = BasisSpec::Monomial.eval_basis_grid(1, &grid).unwrap();
        assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0]);
        assert_eq!(m.row(1).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);

        let grid = Grid::new(vec![0.0, 1.0]).unwrap();
        let m = BasisSpec::FunctionPower(Kernel::Exp)
            .eval_basis_grid(1, &grid)
            .unwrap();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 1)], E);

        // bit-for-bit agreement with pointwise evaluation
        let grid = Grid::uniform(-1.0, 1.0, 17).unwrap();
        let spec = BasisSpec::FunctionPower(Kernel::Sin);
        let m = spec.eval_basis_grid(4, &grid).unwrap();
        for (i, &t) in grid.points().iter().enumerate() {
            let row = spec.eval_basis(4, t).unwrap();
            for k in 0..5 {
                assert_eq!(m[(i, k)].to_bits(), row[k].to_bits());
            }
        }
    }

    #[test]
    fn single_point_grid_matrix() {
        let grid = Grid::new(vec![0.0, 1.0]).unwrap();
        let m = BasisSpec::Monomial.eval_basis_grid(0, &grid).unwrap();
        assert_eq!(m.ncols(), 1);
        assert!(m.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn prefix_property_and_leading_one() {
        let specs = [
            BasisSpec::Monomial,
            BasisSpec::FunctionPower(Kernel::Cos),
            BasisSpec::FunctionPower(Kernel::Abs),
            BasisSpec::FunctionPower(Kernel::Identity),
        ];
        for spec in &specs {
            for &t in &[-1.0, -0.37, 0.0, 0.61, 1.0] {
                let short = spec.eval_basis(3, t).unwrap();
                let long = spec.eval_basis(4, t).unwrap();
                assert_eq!(short[0], 1.0);
                for k in 0..4 {
                    assert_eq!(short[k].to_bits(), long[k].to_bits());
                }
            }
        }
    }

    #[test]
    fn tabulated_requires_grid_points() {
        let tab = TabulatedKernel::new(vec![-1.0, 0.0, 1.0], vec![2.0, 3.0, 4.0]).unwrap();
        let spec = BasisSpec::Tabulated(tab);
        let v = spec.eval_basis(2, 0.0).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 3.0, 9.0]);
        assert!(matches!(
            spec.eval_basis(2, 0.5),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn tabulated_csv_round_trip() {
        let tab = TabulatedKernel::from_csv_str("t,h\n-1.0,0.5\n0.0,1.0\n1.0,2.0\n").unwrap();
        assert_eq!(tab.value_at(-1.0).unwrap(), 0.5);
        assert!(TabulatedKernel::from_csv_str("0.0,1.0\n0.0,2.0\n").is_err());
    }

    #[test]
    fn kernel_registry_is_closed() {
        assert!("exp".parse::<Kernel>().is_ok());
        assert!("tanh".parse::<Kernel>().is_err());
    }
}
