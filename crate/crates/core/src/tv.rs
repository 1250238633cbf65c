//! Total-variation-style denoising
//! `min_x 1/2 ||y - x||² + lambda ||Dx||_1` for a full-row-rank analysis
//! operator `D`, reduced to the standard l1 path problem through the change
//! of variables `u = Dx`, `A = Dᵀ(DDᵀ)⁻¹`, `z = A D y`, and mapped back via
//! `x = y + A(u - Dy)`.

use crate::conditions::ConditionReport;
use crate::error::{Error, Result};
use crate::homotopy::{solve_path, LassoProblem, PathOpts, SolutionPath};
use crate::matrix::{cholesky, classify_dominance, gram, invert_spd, DenseMatrix};

/// Observation `y` (length n) with analysis operator `D` (m x n, full row
/// rank, m <= n). Rank is verified at construction: the smallest pivot of
/// `DDᵀ` must reach `1e-10` times the largest one.
#[derive(Debug, Clone)]
pub struct TvProblem {
    y: Vec<f64>,
    d: DenseMatrix,
}

impl TvProblem {
    pub fn new(y: Vec<f64>, d: DenseMatrix) -> Result<Self> {
        if y.len() != d.cols() {
            return Err(Error::Dimension(format!(
                "operator has {} columns, observation has length {}",
                d.cols(),
                y.len()
            )));
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite observation entry {bad}"
            )));
        }
        if d.rows() > d.cols() {
            return Err(Error::Hypothesis(format!(
                "operator is {}x{}: full row rank needs at least as many columns as rows",
                d.rows(),
                d.cols()
            )));
        }
        check_full_row_rank(&d)?;
        Ok(Self { y, d })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn d(&self) -> &DenseMatrix {
        &self.d
    }
}

fn check_full_row_rank(d: &DenseMatrix) -> Result<()> {
    let ddt = gram(&d.transpose());
    let ch = cholesky(&ddt, 0.0)
        .map_err(|_| Error::Singular("operator is not full row rank".into()))?;
    let pivots = ch.pivots();
    let max = pivots.iter().fold(0.0f64, |m, p| m.max(*p));
    let min = pivots.iter().fold(f64::INFINITY, |m, p| m.min(*p));
    if min < 1e-10 * max {
        return Err(Error::Singular(format!(
            "operator is numerically rank deficient: pivot ratio {:.3e}",
            min / max
        )));
    }
    Ok(())
}

/// The change of variables, cached for breakpoint recovery: `a = Dᵀ(DDᵀ)⁻¹`
/// together with `(DDᵀ)⁻¹` and `Dy`.
#[derive(Debug, Clone)]
pub struct TvTransform {
    a: DenseMatrix,
    ddt_inv: DenseMatrix,
    dy: Vec<f64>,
}

impl TvTransform {
    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn ddt_inv(&self) -> &DenseMatrix {
        &self.ddt_inv
    }

    /// Maps analysis coefficients back to the signal:
    /// `x = y + A(u - Dy)`.
    pub fn recover(&self, y: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.dy.len() {
            return Err(Error::Dimension(format!(
                "u has length {}, operator has {} rows",
                u.len(),
                self.dy.len()
            )));
        }
        let diff: Vec<f64> = u.iter().zip(&self.dy).map(|(ui, di)| ui - di).collect();
        let corr = self.a.matvec(&diff)?;
        Ok(y.iter().zip(&corr).map(|(yi, ci)| yi + ci).collect())
    }
}

/// The (n-1) x n first-difference matrix: rows `(x_i - x_{i+1})`.
pub fn first_difference_matrix(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "first differences need dimension >= 2, got {n}"
        )));
    }
    DenseMatrix::from_fn(n - 1, n, |i, j| {
        if j == i {
            1.0
        } else if j == i + 1 {
            -1.0
        } else {
            0.0
        }
    })
}

/// Builds the equivalent l1 problem `min_u 1/2 ||z - Au||² + lambda ||u||_1`
/// with `A = Dᵀ(DDᵀ)⁻¹` and `z = A D y`, plus the transform record used to
/// recover `x` later. The identity `AᵀA = (DDᵀ)⁻¹` makes the dominance
/// condition on `DDᵀ` carry over to the reduced problem.
pub fn reformulate(t: &TvProblem) -> Result<(LassoProblem, TvTransform)> {
    let ddt = gram(&t.d.transpose());
    let ddt_inv = invert_spd(&ddt)?;
    let a = t.d.transpose().matmul(&ddt_inv)?;
    let dy = t.d.matvec(&t.y)?;
    let z = a.matvec(&dy)?;
    let problem = LassoProblem::new(a.clone(), z)?;
    Ok((problem, TvTransform { a, ddt_inv, dy }))
}

/// One-shot recovery `x = y + Dᵀ(DDᵀ)⁻¹(u - Dy)` without a cached
/// transform.
pub fn recover_x(t: &TvProblem, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != t.d.rows() {
        return Err(Error::Dimension(format!(
            "u has length {}, operator has {} rows",
            u.len(),
            t.d.rows()
        )));
    }
    let (_, transform) = reformulate(t)?;
    transform.recover(&t.y, u)
}

/// Solution path in `u = Dx` coordinates plus the recovered signal at every
/// breakpoint.
#[derive(Debug, Clone)]
pub struct TvPath {
    pub lasso_path: SolutionPath,
    pub x_breakpoints: Vec<Vec<f64>>,
}

/// Composes reformulation, the homotopy solver, and per-breakpoint
/// recovery.
pub fn solve_tv_path(t: &TvProblem, opts: &PathOpts) -> Result<TvPath> {
    let (problem, transform) = reformulate(t)?;
    let lasso_path = solve_path(&problem, opts)?;
    let x_breakpoints = lasso_path
        .breakpoints()
        .iter()
        .map(|bp| transform.recover(&t.y, &bp.u))
        .collect::<Result<Vec<_>>>()?;
    Ok(TvPath {
        lasso_path,
        x_breakpoints,
    })
}

/// Dominance condition on the operator Gram matrix `DDᵀ`: when it is
/// diagonally dominant, the analysis support `I(Dx*(lambda))` grows
/// monotonically as lambda decreases.
pub fn check_operator_dominance(d: &DenseMatrix) -> Result<ConditionReport> {
    check_full_row_rank(d)?;
    let ddt = gram(&d.transpose());
    let dc = classify_dominance(&ddt)?;
    let witness = if dc.is_dominant() {
        None
    } else {
        let n = ddt.rows();
        let mut msg = String::from("DDᵀ is not diagonally dominant");
        for i in 0..n {
            let diag = ddt.get(i, i);
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| ddt.get(i, j).abs()).sum();
            if diag < off {
                msg = format!("DDᵀ row {i}: diagonal {diag} < off-diagonal sum {off}");
                break;
            }
        }
        Some(msg)
    };
    Ok(ConditionReport {
        condition: "operator_gram_dd".into(),
        holds: dc.is_dominant(),
        dominance: Some(dc),
        mu: None,
        k_bound: None,
        witness,
    })
}

/// Stationarity of the denoising problem at `(lambda, x)`: there must be a
/// `w` with `Dᵀw = y - x`, `w_i = lambda * sign((Dx)_i)` on the support of
/// `Dx` and `|w_i| <= lambda` off it. `w` is computed as
/// `(DDᵀ)⁻¹ D (y - x)`.
pub fn tv_stationarity_check(t: &TvProblem, lambda: f64, x: &[f64], tol: f64) -> Result<bool> {
    if x.len() != t.y.len() {
        return Err(Error::Dimension(format!(
            "x has length {}, observation has length {}",
            x.len(),
            t.y.len()
        )));
    }
    if !(lambda >= 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "need lambda >= 0 and tol > 0".into(),
        ));
    }
    let ddt = gram(&t.d.transpose());
    let ddt_inv = invert_spd(&ddt)?;
    let resid: Vec<f64> = t.y.iter().zip(x).map(|(yi, xi)| yi - xi).collect();
    let w = ddt_inv.matvec(&t.d.matvec(&resid)?)?;
    // The residual must lie in the row space of D: Dᵀw == y - x.
    let back = t.d.transpose().matvec(&w)?;
    for (bi, ri) in back.iter().zip(&resid) {
        if (bi - ri).abs() > tol {
            return Ok(false);
        }
    }
    let u = t.d.matvec(x)?;
    for (ui, wi) in u.iter().zip(&w) {
        let ok = if ui.abs() > tol {
            (wi - lambda * ui.signum()).abs() <= tol
        } else {
            wi.abs() <= lambda + tol
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
