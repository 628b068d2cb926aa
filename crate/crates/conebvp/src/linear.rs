//! The linear problem `u'' + y = 0` on `(0, T)` with
//! `u(0) = beta u(eta)` and `u(T) = alpha * integral of u over [0, eta]`.
//!
//! For `beta` away from the excluded value
//! `(2T - alpha eta^2)/(alpha eta^2 - 2 eta + 2T)` the problem has a unique
//! solution, reconstructed here as
//!
//! ```text
//! u(t) = u(0) + u'(0) t - V(t),      V(t) = integral of (t - s) y(s) ds,
//! ```
//!
//! with `u(0)` and `u'(0)` solved from the two boundary conditions. The
//! boundary system is assembled from the same discrete objects that enter
//! the reconstruction and the residual measurements — `V(eta)`, `V(T)` and
//! the panel-Simpson integral of `V` — so both boundary residuals vanish to
//! roundoff for any forcing, not merely at the rate of the quadrature
//! error.

use crate::grid::{double_cumulative, simpson_first_panel, GridFunction, Mesh};
use crate::problem::{ProblemSpec, DEGENERACY_TOL};
use nalgebra::DMatrix;
use std::fmt;

/// Initial values pinning down the solution of the linear problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub u0: f64,
    pub du0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearError {
    /// `beta` sits at the excluded value where the boundary system is
    /// singular and uniqueness fails.
    ExcludedBeta { beta: f64, bound: f64 },
    /// The forcing lives on a mesh that does not match the problem's
    /// `eta` and `T`.
    MeshMismatch,
}

impl fmt::Display for LinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearError::ExcludedBeta { beta, bound } => write!(
                f,
                "beta = {beta} matches the excluded value \
                 (2T - alpha*eta^2)/(alpha*eta^2 - 2*eta + 2T) = {bound}; \
                 the linear boundary problem is singular there"
            ),
            LinearError::MeshMismatch => {
                write!(f, "forcing mesh does not match the problem's eta and T")
            }
        }
    }
}

impl std::error::Error for LinearError {}

fn checked_denominator(spec: &ProblemSpec) -> Result<f64, LinearError> {
    let d = spec.denominator();
    let ae2 = spec.alpha() * spec.eta() * spec.eta();
    if d.abs() <= DEGENERACY_TOL * (1.0 + (2.0 * spec.t_end() - ae2).abs()) {
        return Err(LinearError::ExcludedBeta {
            beta: spec.beta(),
            bound: spec.beta_bound(),
        });
    }
    Ok(d)
}

fn check_mesh(y: &GridFunction, spec: &ProblemSpec) -> Result<(), LinearError> {
    let mesh = y.mesh();
    if mesh.eta() == spec.eta() && mesh.t_end() == spec.t_end() {
        Ok(())
    } else {
        Err(LinearError::MeshMismatch)
    }
}

fn assemble(y: &GridFunction, spec: &ProblemSpec) -> Result<(InitialData, GridFunction), LinearError> {
    check_mesh(y, spec)?;
    let d = checked_denominator(spec)?;
    let v = double_cumulative(y);
    let mi = v.mesh().eta_index();
    let i1 = v.values()[mi];
    let i3 = *v.values().last().unwrap();
    let i2 = 2.0 * simpson_first_panel(&v);

    let (t, eta, alpha, beta) = (spec.t_end(), spec.eta(), spec.alpha(), spec.beta());
    let ae2 = alpha * eta * eta;
    let u0 = (2.0 * beta * eta * i3 - beta * (2.0 * t - ae2) * i1 - alpha * beta * eta * i2) / d;
    let du0 = (2.0 * (1.0 - beta) * i3 + alpha * (beta - 1.0) * i2
        + 2.0 * beta * (1.0 - alpha * eta) * i1)
        / d;
    Ok((InitialData { u0, du0 }, v))
}

/// `u(0)` and `u'(0)` of the unique solution for the forcing `y`.
pub fn initial_data(y: &GridFunction, spec: &ProblemSpec) -> Result<InitialData, LinearError> {
    Ok(assemble(y, spec)?.0)
}

/// Solves the linear problem for the forcing `y` sampled on a mesh whose
/// interior node sits at the problem's `eta`.
pub fn solve_linear(y: &GridFunction, spec: &ProblemSpec) -> Result<GridFunction, LinearError> {
    let (init, v) = assemble(y, spec)?;
    let values: Vec<f64> = y
        .mesh()
        .nodes()
        .iter()
        .zip(v.values())
        .map(|(&t, &vt)| init.u0 + init.du0 * t - vt)
        .collect();
    Ok(GridFunction::from_values(y.mesh().clone(), values).expect("solution values stay finite"))
}

/// Dense matrix `L` of the discrete solution map `y -> solve_linear(y)`,
/// built column-by-column from unit forcings. The map is linear in `y`, so
/// `L` depends only on the mesh and the parameters; the nonlinear solver
/// factors Jacobians `I - L diag(a f'(u))` against it.
pub fn solution_operator(mesh: &Mesh, spec: &ProblemSpec) -> Result<DMatrix<f64>, LinearError> {
    checked_denominator(spec)?;
    let size = mesh.len();
    let mut op = DMatrix::zeros(size, size);
    let mut unit = vec![0.0; size];
    for j in 0..size {
        unit[j] = 1.0;
        let e = GridFunction::from_values(mesh.clone(), unit.clone()).expect("unit vector");
        let col = solve_linear(&e, spec)?;
        op.column_mut(j).copy_from_slice(col.values());
        unit[j] = 0.0;
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grid::{moments, Mesh};
    use crate::problem::ProblemSpec;

    fn spec(t_end: f64, eta: f64, alpha: f64, beta: f64) -> ProblemSpec {
        ProblemSpec::new(
            t_end,
            eta,
            alpha,
            beta,
            parse_expr("1", "t").unwrap(),
            parse_expr("1", "u").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn initial_data_for_unit_forcing() {
        let s = spec(1.0, 0.5, 1.0, 0.0);
        let m = Mesh::build(1.0, 0.5, 8, 8).unwrap();
        let init = initial_data(&GridFunction::constant(&m, 1.0), &s).unwrap();
        assert!(init.u0.abs() < 1e-15, "{}", init.u0);
        assert!((init.du0 - 23.0 / 42.0).abs() < 1e-14, "{}", init.du0);

        let s = spec(2.0, 1.0, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.0, 8, 8).unwrap();
        let init = initial_data(&GridFunction::constant(&m, 1.0), &s).unwrap();
        assert!((init.u0 - 13.0 / 18.0).abs() < 1e-14, "{}", init.u0);
        assert!((init.du0 - 11.0 / 9.0).abs() < 1e-14, "{}", init.du0);
    }

    #[test]
    fn zero_forcing_gives_zero_solution() {
        let s = spec(2.0, 1.0, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.0, 6, 4).unwrap();
        let init = initial_data(&GridFunction::constant(&m, 0.0), &s).unwrap();
        assert_eq!((init.u0, init.du0), (0.0, 0.0));
        let u = solve_linear(&GridFunction::constant(&m, 0.0), &s).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_forcing_matches_closed_forms_at_all_nodes() {
        let s = spec(1.0, 0.5, 1.0, 0.0);
        let m = Mesh::build(1.0, 0.5, 16, 16).unwrap();
        let u = solve_linear(&GridFunction::constant(&m, 1.0), &s).unwrap();
        for (&t, &ut) in m.nodes().iter().zip(u.values()) {
            let want = (23.0 / 42.0) * t - 0.5 * t * t;
            assert!((ut - want).abs() < 1e-14, "t={t}: {ut} vs {want}");
        }
        assert!((u.values().last().unwrap() - 1.0 / 21.0).abs() < 1e-14);

        let s = spec(2.0, 1.0, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.0, 16, 16).unwrap();
        let u = solve_linear(&GridFunction::constant(&m, 1.0), &s).unwrap();
        for (&t, &ut) in m.nodes().iter().zip(u.values()) {
            let want = 13.0 / 18.0 + (11.0 / 9.0) * t - 0.5 * t * t;
            assert!((ut - want).abs() < 1e-14, "t={t}: {ut} vs {want}");
        }
        assert!((u.values().last().unwrap() - 7.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_residuals_vanish_for_smooth_forcing() {
        let s = spec(2.0, 1.5, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.5, 20, 12).unwrap();
        let y = GridFunction::from_fn(&m, |t| (1.3 * t).sin() + 1.5);
        let u = solve_linear(&y, &s).unwrap();
        let scale = 1.0 + u.sup_norm();
        let bc0 = (u.values()[0] - s.beta() * u.values()[m.eta_index()]).abs();
        let bct =
            (u.values().last().unwrap() - s.alpha() * simpson_first_panel(&u)).abs();
        assert!(bc0 <= 1e-12 * scale, "bc0 {bc0}");
        assert!(bct <= 1e-12 * scale, "bcT {bct}");
    }

    #[test]
    fn degenerate_beta_is_rejected_with_the_bound() {
        let s = spec(1.0, 0.5, 1.0, 1.4);
        let m = Mesh::build(1.0, 0.5, 4, 4).unwrap();
        let err = solve_linear(&GridFunction::constant(&m, 1.0), &s).unwrap_err();
        match err {
            LinearError::ExcludedBeta { beta, bound } => {
                assert_eq!(beta, 1.4);
                assert!((bound - 1.4).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mesh_mismatch_is_rejected() {
        let s = spec(1.0, 0.5, 1.0, 0.0);
        let m = Mesh::build(1.0, 0.25, 4, 4).unwrap();
        assert!(matches!(
            solve_linear(&GridFunction::constant(&m, 1.0), &s),
            Err(LinearError::MeshMismatch)
        ));
    }

    #[test]
    fn solve_is_linear_in_the_forcing() {
        let s = spec(2.0, 1.5, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.5, 12, 8).unwrap();
        let y1 = GridFunction::from_fn(&m, |t| 1.0 + t);
        let y2 = GridFunction::from_fn(&m, |t| (2.0 * t).cos() + 1.0);
        let (a, b) = (0.7, -0.3);
        let combo = GridFunction::from_values(
            m.clone(),
            y1.values()
                .iter()
                .zip(y2.values())
                .map(|(p, q)| a * p + b * q)
                .collect(),
        )
        .unwrap();
        let u1 = solve_linear(&y1, &s).unwrap();
        let u2 = solve_linear(&y2, &s).unwrap();
        let uc = solve_linear(&combo, &s).unwrap();
        let scale = 1.0 + uc.sup_norm();
        for i in 0..m.len() {
            let want = a * u1.values()[i] + b * u2.values()[i];
            assert!(
                (uc.values()[i] - want).abs() <= 1e-13 * scale,
                "node {i}"
            );
        }
    }

    #[test]
    fn interior_second_differences_recover_the_forcing() {
        // within a uniform panel the reconstruction satisfies
        // (u_{i-1} - 2u_i + u_{i+1})/h^2 = -(y_{i-1} + 2y_i + y_{i+1})/4,
        // an O(h^2)-consistent restatement of u'' = -y
        let s = spec(1.0, 0.5, 1.0, 0.25);
        let check = |k: usize| -> f64 {
            let m = Mesh::build(1.0, 0.5, 32 * k, 32 * k).unwrap();
            let y = GridFunction::from_fn(&m, |t| t.sin() + 0.5);
            let u = solve_linear(&y, &s).unwrap();
            let h = m.h1();
            let mut worst = 0.0f64;
            for i in 1..m.len() - 1 {
                if i == m.eta_index() {
                    continue;
                }
                let second =
                    (u.values()[i - 1] - 2.0 * u.values()[i] + u.values()[i + 1]) / (h * h);
                worst = worst.max((second + y.values()[i]).abs());
            }
            worst
        };
        let ratio = check(1) / check(2);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reconstruction_agrees_with_the_four_term_closed_form() {
        // Independent route: evaluate the explicit kernel form built from
        // the three weighted moments at t in {eta, T}.
        let four_term = |y: &GridFunction, s: &ProblemSpec, t: f64| -> f64 {
            let mo = moments(y);
            let (tt, eta, alpha, beta) = (s.t_end(), s.eta(), s.alpha(), s.beta());
            let ae2 = alpha * eta * eta;
            let dp = (ae2 - 2.0 * tt) - beta * (2.0 * eta - ae2 - 2.0 * tt);
            let c1 = (beta * (2.0 * tt - ae2) - 2.0 * beta * (1.0 - alpha * eta) * t) / dp;
            let c2 = (alpha * beta * eta - alpha * (beta - 1.0) * t) / dp;
            let c3 = (2.0 * (beta - 1.0) * t - 2.0 * beta * eta) / dp;
            let v = double_cumulative(y);
            let idx = if t == s.eta() {
                v.mesh().eta_index()
            } else {
                v.mesh().len() - 1
            };
            c1 * mo.i1 + c2 * mo.i2 + c3 * mo.i3 - v.values()[idx]
        };

        let s = spec(2.0, 1.0, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.0, 64, 64).unwrap();

        // exact agreement for constant forcing
        let y = GridFunction::constant(&m, 1.0);
        let u = solve_linear(&y, &s).unwrap();
        for (t, idx) in [(1.0, m.eta_index()), (2.0, m.len() - 1)] {
            let diff = (four_term(&y, &s, t) - u.values()[idx]).abs();
            assert!(diff < 1e-13, "constant forcing at t={t}: {diff}");
        }

        // quadrature-level agreement for smooth forcing
        let y = GridFunction::from_fn(&m, |t| (t * 1.1).sin() + 1.2);
        let u = solve_linear(&y, &s).unwrap();
        for (t, idx) in [(1.0, m.eta_index()), (2.0, m.len() - 1)] {
            let diff = (four_term(&y, &s, t) - u.values()[idx]).abs();
            assert!(diff < 1e-4, "smooth forcing at t={t}: {diff}");
        }
    }

    #[test]
    fn solution_operator_reproduces_solve_linear() {
        let s = spec(2.0, 1.5, 1.0, 0.5);
        let m = Mesh::build(2.0, 1.5, 8, 6).unwrap();
        let op = solution_operator(&m, &s).unwrap();
        let y = GridFunction::from_fn(&m, |t| 0.3 + t * t);
        let direct = solve_linear(&y, &s).unwrap();
        let via_op = op * nalgebra::DVector::from_column_slice(y.values());
        for i in 0..m.len() {
            assert!(
                (via_op[i] - direct.values()[i]).abs() < 1e-12,
                "node {i}: {} vs {}",
                via_op[i],
                direct.values()[i]
            );
        }
    }
}
