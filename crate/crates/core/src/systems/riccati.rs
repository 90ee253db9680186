//! Continuous-time algebraic Riccati equation
//!
//! ```text
//! AᵀP + PA − PBBᵀP + CᵀC = 0
//! ```
//!
//! solved by Newton–Kleinman iteration from a stabilizing feedback gain.
//! Each iterate solves a Lyapunov equation by Kronecker vectorization, which
//! is only sensible for the small state dimensions used here.

use crate::error::{Error, Result};
use crate::numerics::{solve_dense, Matrix};

const MAX_ITERATIONS: usize = 100;
const STEP_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-10;

/// Solve `AᵀX + XA = rhs` for `X` (`n²×n²` dense solve).
pub fn solve_lyapunov(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() || rhs.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.rows(),
        });
    }
    let nn = n * n;
    let mut op = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // (AᵀX)_{ij} = Σ_k A_{ki} X_{kj}
                op[(row, k * n + j)] += a[(k, i)];
                // (XA)_{ij} = Σ_k X_{ik} A_{kj}
                op[(row, i * n + k)] += a[(k, j)];
            }
        }
    }
    let x = solve_dense(&op, rhs.as_slice())?;
    Ok(Matrix::from_row_major(n, n, x))
}

/// Lyapunov test: `A` is Hurwitz iff `AᵀX + XA = −I` has a positive definite solution.
pub fn is_hurwitz(a: &Matrix) -> bool {
    let n = a.rows();
    match solve_lyapunov(a, &Matrix::identity(n).scale(-1.0)) {
        Ok(x) => x.symmetrize().cholesky().is_some(),
        Err(_) => false,
    }
}

/// `AᵀP + PA − PBBᵀP + CᵀC`.
pub fn are_residual_matrix(a: &Matrix, b: &Matrix, c: &Matrix, p: &Matrix) -> Matrix {
    let pb = p.matmul(b);
    a.transpose()
        .matmul(p)
        .add(&p.matmul(a))
        .sub(&pb.matmul(&pb.transpose()))
        .add(&c.transpose().matmul(c))
}

/// Frobenius norm of [`are_residual_matrix`].
pub fn are_residual(a: &Matrix, b: &Matrix, c: &Matrix, p: &Matrix) -> f64 {
    are_residual_matrix(a, b, c, p).frobenius_norm()
}

fn check_shapes(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<()> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::InvalidParameter("A must be square".into()));
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    if c.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.cols(),
        });
    }
    Ok(())
}

/// Scan feedback gains `K` on a fixed grid, ordered by norm, until `A − BK` is Hurwitz.
pub fn stabilizing_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    const LEVELS: [f64; 15] = [
        0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0, 20.0, -20.0, 50.0, -50.0,
    ];
    let (n, m) = (a.rows(), b.cols());
    let entries = n * m;
    if entries > 6 {
        return Err(Error::InvalidParameter("seed scan limited to n·m ≤ 6".into()));
    }
    let total = LEVELS.len().pow(entries as u32);
    let mut candidates: Vec<Matrix> = (0..total)
        .map(|mut code| {
            let mut data = Vec::with_capacity(entries);
            for _ in 0..entries {
                data.push(LEVELS[code % LEVELS.len()]);
                code /= LEVELS.len();
            }
            Matrix::from_row_major(m, n, data)
        })
        .collect();
    candidates.sort_by(|x, y| x.frobenius_norm().total_cmp(&y.frobenius_norm()));
    candidates
        .into_iter()
        .find(|k| is_hurwitz(&a.sub(&b.matmul(k))))
        .ok_or(Error::NoStabilizingSeed)
}

/// Stabilizing solution of the Riccati equation, seeded by [`stabilizing_gain`].
pub fn solve_are(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<Matrix> {
    check_shapes(a, b, c)?;
    let k0 = stabilizing_gain(a, b)?;
    solve_are_from_gain(a, b, c, &k0)
}

/// Newton–Kleinman iteration from a given stabilizing gain `K₀` (`m × n`).
pub fn solve_are_from_gain(a: &Matrix, b: &Matrix, c: &Matrix, k0: &Matrix) -> Result<Matrix> {
    check_shapes(a, b, c)?;
    if k0.shape() != (b.cols(), a.rows()) {
        return Err(Error::InvalidParameter(format!(
            "seed gain must be {}x{}",
            b.cols(),
            a.rows()
        )));
    }
    if !is_hurwitz(&a.sub(&b.matmul(k0))) {
        return Err(Error::NotStabilizing);
    }
    let ctc = c.transpose().matmul(c);
    let mut gain = k0.clone();
    let mut prev: Option<Matrix> = None;
    for _ in 0..MAX_ITERATIONS {
        let closed = a.sub(&b.matmul(&gain));
        let rhs = ctc.add(&gain.transpose().matmul(&gain)).scale(-1.0);
        let p = solve_lyapunov(&closed, &rhs)?.symmetrize();
        gain = b.transpose().matmul(&p);
        let done = prev
            .as_ref()
            .is_some_and(|old| p.sub(old).frobenius_norm() <= STEP_TOL * (1.0 + p.frobenius_norm()));
        prev = Some(p);
        if done {
            break;
        }
    }
    let p = prev.expect("at least one iteration");
    let residual = are_residual(a, b, c, &p);
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(Error::AreNotConverged {
            iterations: MAX_ITERATIONS,
            residual,
        });
    }
    let closed = a.sub(&b.matmul(&b.transpose()).matmul(&p));
    if !is_hurwitz(&closed) {
        return Err(Error::NotStabilizing);
    }
    Ok(p)
}
