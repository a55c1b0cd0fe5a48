//! The constrained-minimization entropy: an exact 1D solver for the rod-like
//! specialization and a moment-matching (Boltzmann-form) solver on SO(3).

use crate::error::{Error, Result};
use crate::so3::{gauss_legendre, So3Grid};
use crate::tensor::{traceless_basis, SymTracelessTensor};
use nalgebra::{DMatrix, DVector, Matrix3};

const NEWTON_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// 1D rod-like solver
// ---------------------------------------------------------------------------

/// Solution of the 1D moment problem: Lagrange scalar `b` with
/// `<z^2>_b = x`, the log partition value and the entropy value
/// `f_ent = b x - ln Z`.
#[derive(Debug, Clone, Copy)]
pub struct Rod1DSolution {
    pub b: f64,
    pub x: f64,
    pub ln_partition: f64,
    pub f_ent: f64,
}

struct RodQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RodQuadrature {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        RodQuadrature { nodes, weights }
    }

    /// `(ln Z, <z^2>, <z^4>)` for the exponent `b z^2`, max-shifted so large
    /// `b` cannot overflow.
    fn moments(&self, b: f64) -> (f64, f64, f64) {
        let shift = b.max(0.0);
        let mut z0 = 0.0;
        let mut z2 = 0.0;
        let mut z4 = 0.0;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            let zz = z * z;
            let e = 0.5 * w * (b * zz - shift).exp();
            z0 += e;
            z2 += e * zz;
            z4 += e * zz * zz;
        }
        (z0.ln() + shift, z2 / z0, z4 / z0)
    }
}

fn solve_rod_multiplier(x: f64, quad: &RodQuadrature) -> Result<(f64, f64, f64, f64)> {
    if x <= 0.0 || x >= 1.0 || x.is_nan() {
        return Err(Error::InvalidInput(format!(
            "second-moment target {x} outside (0, 1)"
        )));
    }
    // safeguarded Newton on <z^2>(b) = x; the map is strictly increasing
    let mut b = 0.0;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for _ in 0..200 {
        let (ln_z, m2, m4) = quad.moments(b);
        let r = m2 - x;
        if r.abs() <= NEWTON_TOL {
            return Ok((b, ln_z, m2, m4));
        }
        if r > 0.0 {
            hi = hi.min(b);
        } else {
            lo = lo.max(b);
        }
        let var = m4 - m2 * m2;
        let mut next = b - r / var;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + (b - lo).abs().max(1.0) * 2.0
            } else {
                hi - (hi - b).abs().max(1.0) * 2.0
            };
        }
        b = next;
    }
    Err(Error::NoConvergence(format!(
        "rod multiplier solve stalled at x = {x}"
    )))
}

// The 64-point rule cannot represent targets beyond its largest node squared
// (~0.9987); refine for targets inside that boundary layer.
fn rod_quadrature_for(x: f64) -> RodQuadrature {
    RodQuadrature::new(if x > 0.99 { 512 } else { 64 })
}

/// Entropy of the 1D rod specialization: solves the Lagrange scalar with a
/// 64-point Gauss-Legendre rule and returns `f_ent(x) = b x - ln Z`.
pub fn rod_entropy(x: f64) -> Result<Rod1DSolution> {
    let quad = rod_quadrature_for(x);
    let (b, ln_z, _, _) = solve_rod_multiplier(x, &quad)?;
    Ok(Rod1DSolution {
        b,
        x,
        ln_partition: ln_z,
        f_ent: b * x - ln_z,
    })
}

/// Second derivative of the 1D entropy: the reciprocal moment variance
/// `1 / (<z^4>_b - <z^2>_b^2)` at the solved multiplier.
pub fn rod_entropy_second_derivative(x: f64) -> Result<f64> {
    let quad = rod_quadrature_for(x);
    let (_, _, m2, m4) = solve_rod_multiplier(x, &quad)?;
    Ok(1.0 / (m4 - m2 * m2))
}

/// The entropy-strength coefficient matching the quasi-entropy curvature to
/// the original entropy at the isotropic point: `81 nu / 4 = f_ent''(1/3)`,
/// giving `nu = 5/9`.
pub fn calibrate_nu() -> f64 {
    let second = rod_entropy_second_derivative(1.0 / 3.0).expect("1/3 is interior");
    second * 4.0 / 81.0
}

// ---------------------------------------------------------------------------
// SO(3) moment-matching solver
// ---------------------------------------------------------------------------

/// The constrainable functions on SO(3): the three frame vectors and the five
/// second-order traceless combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentFunction {
    /// `m1`, `m2`, `m3` (order 1).
    M1,
    M2,
    M3,
    /// `(m1^2)_0` (order 2).
    SquareHead,
    /// `(m2^2 - m3^2)/2`.
    SquareDiff,
    /// `m1 m2`, `m1 m3`, `m2 m3`.
    Mixed12,
    Mixed13,
    Mixed23,
}

impl MomentFunction {
    pub fn order(&self) -> usize {
        match self {
            MomentFunction::M1 | MomentFunction::M2 | MomentFunction::M3 => 1,
            _ => 2,
        }
    }
}

/// One moment constraint: the averaged function and its target value.
#[derive(Debug, Clone)]
pub struct MomentTarget {
    pub function: MomentFunction,
    pub value: SymTracelessTensor,
}

impl MomentTarget {
    pub fn new(function: MomentFunction, value: SymTracelessTensor) -> Result<Self> {
        if value.order() != function.order() {
            return Err(Error::OrderMismatch(value.order(), function.order()));
        }
        Ok(MomentTarget { function, value })
    }
}

/// Converged state of the SO(3) moment-matching problem: Lagrange tensors of
/// the same orders as the targets, the log partition value and the entropy.
#[derive(Debug, Clone)]
pub struct BinghamSolution {
    pub multipliers: Vec<SymTracelessTensor>,
    pub ln_partition: f64,
    pub f_ent: f64,
    pub residual: f64,
    pub iterations: usize,
    pub grid: So3Grid,
}

impl BinghamSolution {
    /// Recomputes the averaged tensors under the converged density.
    pub fn moments(&self, targets: &[MomentTarget]) -> Vec<SymTracelessTensor> {
        let table = CoordTable::build(targets, &self.grid);
        let b = stack_coords(&self.multipliers);
        let (_, mean, _) = table.statistics(&b, false);
        unstack_coords(targets, &mean)
    }
}

/// Per-node coordinates of the constrained functions, precomputed once.
struct CoordTable {
    total: usize,
    weights: Vec<f64>,
    coords: Vec<f64>, // node-major, `total` values per node
}

impl CoordTable {
    fn build(targets: &[MomentTarget], grid: &So3Grid) -> Self {
        let total: usize = targets.iter().map(|t| 2 * t.function.order() + 1).sum();
        let basis2: Vec<Matrix3<f64>> = traceless_basis(2)
            .iter()
            .map(|b| b.inner().as_matrix())
            .collect();
        let nodes = grid.nodes();
        let mut weights = Vec::with_capacity(nodes.len());
        let mut coords = Vec::with_capacity(nodes.len() * total);
        for node in &nodes {
            weights.push(node.weight);
            let p = &node.rotation;
            let ax = [p.axis(0), p.axis(1), p.axis(2)];
            for t in targets {
                match t.function {
                    MomentFunction::M1 => coords.extend_from_slice(&ax[0]),
                    MomentFunction::M2 => coords.extend_from_slice(&ax[1]),
                    MomentFunction::M3 => coords.extend_from_slice(&ax[2]),
                    f2 => {
                        // symmetric matrix of the order-2 function; the
                        // isotropic part is orthogonal to the traceless basis
                        // so it can be dropped
                        let m = match f2 {
                            MomentFunction::SquareHead => outer(&ax[0], &ax[0]),
                            MomentFunction::SquareDiff => {
                                (outer(&ax[1], &ax[1]) - outer(&ax[2], &ax[2])) * 0.5
                            }
                            MomentFunction::Mixed12 => sym_outer(&ax[0], &ax[1]),
                            MomentFunction::Mixed13 => sym_outer(&ax[0], &ax[2]),
                            MomentFunction::Mixed23 => sym_outer(&ax[1], &ax[2]),
                            _ => unreachable!(),
                        };
                        for b in &basis2 {
                            coords.push(frobenius(b, &m));
                        }
                    }
                }
            }
        }
        CoordTable {
            total,
            weights,
            coords,
        }
    }

    /// `(ln Z, mean coords, optional covariance)` under the density with
    /// multiplier coordinates `b`.
    fn statistics(&self, b: &[f64], with_cov: bool) -> (f64, Vec<f64>, Option<DMatrix<f64>>) {
        let d = self.total;
        // max-shift the exponent so strong alignment cannot overflow
        let mut shift = f64::NEG_INFINITY;
        for n in 0..self.weights.len() {
            let row = &self.coords[n * d..(n + 1) * d];
            let e: f64 = row.iter().zip(b).map(|(c, bb)| c * bb).sum();
            if e > shift {
                shift = e;
            }
        }
        let mut z = 0.0;
        let mut mean = vec![0.0; d];
        let mut second = if with_cov {
            Some(DMatrix::<f64>::zeros(d, d))
        } else {
            None
        };
        for n in 0..self.weights.len() {
            let row = &self.coords[n * d..(n + 1) * d];
            let e: f64 = row.iter().zip(b).map(|(c, bb)| c * bb).sum();
            let w = self.weights[n] * (e - shift).exp();
            z += w;
            for i in 0..d {
                mean[i] += w * row[i];
            }
            if let Some(s) = second.as_mut() {
                for i in 0..d {
                    for j in i..d {
                        s[(i, j)] += w * row[i] * row[j];
                    }
                }
            }
        }
        for m in mean.iter_mut() {
            *m /= z;
        }
        let cov = second.map(|mut s| {
            for i in 0..d {
                for j in i..d {
                    let c = s[(i, j)] / z - mean[i] * mean[j];
                    s[(i, j)] = c;
                    s[(j, i)] = c;
                }
            }
            s
        });
        (z.ln() + shift, mean, cov)
    }
}

fn outer(a: &[f64; 3], b: &[f64; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| a[i] * b[j])
}

fn sym_outer(a: &[f64; 3], b: &[f64; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| 0.5 * (a[i] * b[j] + b[i] * a[j]))
}

fn frobenius(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

fn stack_coords(tensors: &[SymTracelessTensor]) -> Vec<f64> {
    tensors.iter().flat_map(|t| t.coords()).collect()
}

fn unstack_coords(targets: &[MomentTarget], coords: &[f64]) -> Vec<SymTracelessTensor> {
    let mut out = Vec::new();
    let mut base = 0;
    for t in targets {
        let o = t.function.order();
        let d = 2 * o + 1;
        out.push(SymTracelessTensor::from_coords(o, &coords[base..base + d]));
        base += d;
    }
    out
}

/// Solves the SO(3) moment-matching problem with the default quadrature.
pub fn bingham_solve_so3(targets: &[MomentTarget]) -> Result<BinghamSolution> {
    bingham_solve_so3_with_grid(targets, So3Grid::default_entropy())
}

/// Damped Newton on the moment map: the Jacobian is the covariance of the
/// constrained function coordinates, symmetric positive definite, so the
/// method converges from the zero multiplier for feasible targets.
pub fn bingham_solve_so3_with_grid(
    targets: &[MomentTarget],
    grid: So3Grid,
) -> Result<BinghamSolution> {
    for t in targets {
        if t.value.order() != t.function.order() {
            return Err(Error::OrderMismatch(t.value.order(), t.function.order()));
        }
    }
    let table = CoordTable::build(targets, &grid);
    let d = table.total;
    let tau: Vec<f64> = targets.iter().flat_map(|t| t.value.coords()).collect();

    let mut b = vec![0.0; d];
    let mut iterations = 0;
    let (mut ln_z, mut mean, mut cov_opt) = table.statistics(&b, true);
    loop {
        let residual: Vec<f64> = mean.iter().zip(&tau).map(|(m, t)| m - t).collect();
        let rnorm = residual.iter().map(|r| r * r).sum::<f64>().sqrt();
        if rnorm <= NEWTON_TOL {
            let f_ent: f64 = b.iter().zip(&tau).map(|(bb, t)| bb * t).sum::<f64>() - ln_z;
            return Ok(BinghamSolution {
                multipliers: unstack_coords(targets, &b),
                ln_partition: ln_z,
                f_ent,
                residual: rnorm,
                iterations,
                grid,
            });
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NoConvergence(format!(
                "moment matching stalled after 200 iterations, residual {rnorm:.3e}"
            )));
        }
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm > 100.0 {
            return Err(Error::NoConvergence(format!(
                "multiplier norm {bnorm:.3e} exploded with residual {rnorm:.3e}; targets look infeasible"
            )));
        }
        let cov = cov_opt.take().expect("covariance requested");
        let rhs = DVector::from_column_slice(&residual);
        let delta = cov
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NoConvergence("singular moment covariance".into()))?;
        // step halving until the residual decreases
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(i, v)| v - scale * delta[i])
                .collect();
            let (lz, m, c) = table.statistics(&cand, true);
            let rn = m
                .iter()
                .zip(&tau)
                .map(|(mi, t)| (mi - t) * (mi - t))
                .sum::<f64>()
                .sqrt();
            if rn < rnorm {
                b = cand;
                ln_z = lz;
                mean = m;
                cov_opt = Some(c.expect("covariance requested"));
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!(
                "no residual decrease after 30 halvings, residual {rnorm:.3e}"
            )));
        }
    }
}

/// Uniaxial second-moment target `<(m1^2)_0> = diag(x - 1/3, ...)` along the
/// first reference axis.
pub fn uniaxial_target(x: f64) -> MomentTarget {
    let mut t = crate::tensor::SymTensor::zeros(2);
    t.set_comp((2, 0, 0), x - 1.0 / 3.0);
    t.set_comp((0, 2, 0), (1.0 - x) / 2.0 - 1.0 / 3.0);
    t.set_comp((0, 0, 2), (1.0 - x) / 2.0 - 1.0 / 3.0);
    MomentTarget {
        function: MomentFunction::SquareHead,
        value: SymTracelessTensor::new(t).expect("traceless"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Rotation;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rod_isotropic_point() {
        let s = rod_entropy(1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(s.b, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.f_ent, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ln_partition, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rod_second_derivative_at_isotropic() {
        // 1/(<z^4> - <z^2>^2) at b = 0 is 1/(1/5 - 1/9) = 45/4
        let d2 = rod_entropy_second_derivative(1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(d2, 11.25, epsilon = 1e-10);
    }

    #[test]
    fn rod_round_trip_and_quadrature_resolution() {
        let s = rod_entropy(0.6).unwrap();
        assert!(s.b > 0.0);
        // self-consistency under the 64-point rule
        let quad = RodQuadrature::new(64);
        let (_, m2, _) = quad.moments(s.b);
        assert_abs_diff_eq!(m2, 0.6, epsilon = 1e-10);
        // and under a much finer rule
        let fine = RodQuadrature::new(256);
        let (_, m2f, _) = fine.moments(s.b);
        assert_abs_diff_eq!(m2f, 0.6, epsilon = 1e-10);
    }

    #[test]
    fn rod_second_derivative_matches_differences_and_diverges() {
        for x in [0.25, 0.45] {
            let h = 1e-4;
            let num = (rod_entropy(x + h).unwrap().f_ent - 2.0 * rod_entropy(x).unwrap().f_ent
                + rod_entropy(x - h).unwrap().f_ent)
                / (h * h);
            let ana = rod_entropy_second_derivative(x).unwrap();
            assert!((num - ana).abs() <= 1e-6 * ana.abs(), "{num} vs {ana}");
        }
        assert!(rod_entropy_second_derivative(0.999).unwrap() > 1e3);
        assert!(rod_entropy(0.0).is_err());
        assert!(rod_entropy(1.0).is_err());
    }

    #[test]
    fn rod_entropy_is_convex_on_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(301);
        for _ in 0..20 {
            let x1 = 0.05 + 0.9 * rand::Rng::random::<f64>(&mut rng);
            let x2 = 0.05 + 0.9 * rand::Rng::random::<f64>(&mut rng);
            let fm = rod_entropy(0.5 * (x1 + x2)).unwrap().f_ent;
            let f1 = rod_entropy(x1).unwrap().f_ent;
            let f2 = rod_entropy(x2).unwrap().f_ent;
            assert!(fm <= 0.5 * (f1 + f2) + 1e-12);
        }
    }

    #[test]
    fn calibration_value() {
        assert_abs_diff_eq!(calibrate_nu(), 5.0 / 9.0, epsilon = 1e-9);
        // consistency of the two displayed curvatures
        assert_abs_diff_eq!(81.0 / 4.0 * calibrate_nu(), 11.25, epsilon = 1e-8);
    }

    fn test_grid() -> So3Grid {
        So3Grid {
            n_alpha: 16,
            n_beta: 32,
            n_gamma: 32,
        }
    }

    #[test]
    fn zero_targets_give_uniform_density() {
        let targets = vec![uniaxial_target(1.0 / 3.0)];
        let sol = bingham_solve_so3_with_grid(&targets, test_grid()).unwrap();
        assert!(sol.multipliers[0].norm() < 1e-10);
        assert_abs_diff_eq!(sol.f_ent, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.ln_partition, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn uniaxial_matches_rod_solver() {
        let x = 0.5;
        let sol = bingham_solve_so3_with_grid(&[uniaxial_target(x)], test_grid()).unwrap();
        let rod = rod_entropy(x).unwrap();
        assert!(
            (sol.f_ent - rod.f_ent).abs() <= 1e-6,
            "{} vs {}",
            sol.f_ent,
            rod.f_ent
        );
    }

    #[test]
    fn solved_moments_match_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(307);
        let targets = vec![
            MomentTarget::new(
                MomentFunction::M1,
                SymTracelessTensor::random_ball(1, 0.2, &mut rng),
            )
            .unwrap(),
            MomentTarget::new(
                MomentFunction::SquareHead,
                SymTracelessTensor::random_ball(2, 0.15, &mut rng),
            )
            .unwrap(),
        ];
        let sol = bingham_solve_so3_with_grid(&targets, test_grid()).unwrap();
        let moments = sol.moments(&targets);
        for (m, t) in moments.iter().zip(&targets) {
            assert!(m.sub(&t.value).norm() <= 1e-8);
        }
    }

    #[test]
    fn rotation_invariance_of_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(311);
        let value = SymTracelessTensor::random_ball(2, 0.18, &mut rng);
        let base = bingham_solve_so3_with_grid(
            &[MomentTarget::new(MomentFunction::SquareHead, value.clone()).unwrap()],
            test_grid(),
        )
        .unwrap();
        for _ in 0..3 {
            let r = Rotation::random(&mut rng);
            let rotated = bingham_solve_so3_with_grid(
                &[MomentTarget::new(MomentFunction::SquareHead, value.rotate(&r)).unwrap()],
                test_grid(),
            )
            .unwrap();
            assert!(
                (base.f_ent - rotated.f_ent).abs() <= 1e-7,
                "{} vs {}",
                base.f_ent,
                rotated.f_ent
            );
        }
    }

    #[test]
    fn quadrature_refinement_is_converged() {
        let grid = So3Grid {
            n_alpha: 32,
            n_beta: 64,
            n_gamma: 64,
        };
        let targets = vec![uniaxial_target(0.55)];
        let coarse = bingham_solve_so3_with_grid(&targets, grid).unwrap();
        let fine = bingham_solve_so3_with_grid(&targets, grid.doubled()).unwrap();
        assert!(
            (coarse.f_ent - fine.f_ent).abs() <= 1e-9,
            "{} vs {}",
            coarse.f_ent,
            fine.f_ent
        );
    }

    #[test]
    fn infeasible_targets_error() {
        // |<m1>| can never reach 1.2
        let mut t = crate::tensor::SymTensor::zeros(1);
        t.set_comp((1, 0, 0), 1.2);
        let target =
            MomentTarget::new(MomentFunction::M1, SymTracelessTensor::new(t).unwrap()).unwrap();
        assert!(bingham_solve_so3_with_grid(&[target], test_grid()).is_err());
    }
}
