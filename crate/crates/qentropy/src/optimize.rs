//! Barrier-aware multi-start minimization, stationary-point classification
//! and executable verifications of the structural results: axisymmetry of rod
//! stationary points, the shared-eigenframe condition for two-fold couplings,
//! and the counterexample family outside that condition.

use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use crate::models::{critical_chi, rod_branch_root, sorted_eigenvalues, EnergyLandscape, RTriple};
use crate::tensor::SymTracelessTensor;
use nalgebra::{DMatrix, Matrix3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Multi-start minimization options.
#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub n_starts: usize,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            n_starts: 24,
            grad_tol: 1e-9,
            max_iters: 5000,
            seed: 0,
        }
    }
}

/// Classification of a stationary point by its Hessian spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Minimizer,
    Saddle,
    Maximizer,
    /// Some eigenvalue sits below the resolution threshold (rotational zero
    /// modes land here).
    Degenerate,
}

/// Eigenvalues with magnitude below this threshold count as zero modes.
pub const HESSIAN_ZERO_TOL: f64 = 1e-7;

/// A converged stationary point in model coordinates.
#[derive(Debug, Clone)]
pub struct StationaryPoint {
    pub coords: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub hessian_spectrum: Vec<f64>,
    pub kind: PointKind,
    pub fingerprint: Vec<f64>,
    /// Accepted energies of the descent that found the point (monotone).
    pub trace: Vec<f64>,
}

fn classify(spectrum: &[f64]) -> PointKind {
    let neg = spectrum.iter().filter(|&&l| l < -HESSIAN_ZERO_TOL).count();
    let pos = spectrum.iter().filter(|&&l| l > HESSIAN_ZERO_TOL).count();
    let zero = spectrum.len() - neg - pos;
    if neg > 0 && pos > 0 {
        PointKind::Saddle
    } else if zero > 0 {
        PointKind::Degenerate
    } else if neg == 0 {
        PointKind::Minimizer
    } else {
        PointKind::Maximizer
    }
}

/// Gradient descent with a backtracking Armijo line search; the step halves
/// on domain exit or insufficient decrease and doubles after acceptance.
/// Near the minimum the energy differences fall below the floating-point
/// resolution of the value long before the gradient reaches `grad_tol`, so a
/// quadratic-model polish on the gradient norm finishes the job.
fn descend(
    model: &dyn EnergyLandscape,
    x0: Vec<f64>,
    opts: &MinimizeOptions,
) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let mut x = x0;
    let mut f = model.energy(&x)?;
    let mut trace = vec![f];
    let mut step = 0.05;
    for _ in 0..opts.max_iters {
        let g = model.gradient(&x)?;
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2.sqrt() <= opts.grad_tol {
            return Some((x, f, trace));
        }
        let mut accepted = false;
        let mut at_value_floor = false;
        for _ in 0..60 {
            if 1e-4 * step * g2 < 8.0 * f.abs() * f64::EPSILON {
                at_value_floor = true;
                break;
            }
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            if let Some(fc) = model.energy(&cand) {
                if fc <= f - 1e-4 * step * g2 {
                    x = cand;
                    f = fc;
                    trace.push(f);
                    step = (step * 2.0).min(1e3);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if at_value_floor {
            let (xp, fp) = polish(model, x, opts)?;
            trace.push(fp.min(f));
            return Some((xp, fp, trace));
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Newton iteration on the gradient with the finite-difference Hessian
/// (pseudo-inverted across near-zero rotational modes), accepting steps that
/// reduce the gradient norm.
fn polish(
    model: &dyn EnergyLandscape,
    mut x: Vec<f64>,
    opts: &MinimizeOptions,
) -> Option<(Vec<f64>, f64)> {
    let grad_norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut g = model.gradient(&x)?;
    let mut gn = grad_norm(&g);
    for _ in 0..16 {
        if gn <= opts.grad_tol {
            let f = model.energy(&x)?;
            return Some((x, f));
        }
        let h = fd_hessian(model, &x)?;
        let eig = h.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.amax().max(1e-12);
        let gv = DMatrix::from_column_slice(x.len(), 1, &g);
        let coeffs = eig.eigenvectors.transpose() * &gv;
        let mut delta = DMatrix::<f64>::zeros(x.len(), 1);
        for k in 0..x.len() {
            let l = eig.eigenvalues[k];
            if l.abs() > 1e-8 * lmax {
                delta += eig.eigenvectors.column(k) * (coeffs[(k, 0)] / l);
            }
        }
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = (0..x.len()).map(|i| x[i] - scale * delta[(i, 0)]).collect();
            if let Some(gc) = model.gradient(&cand) {
                let gcn = grad_norm(&gc);
                if gcn < gn {
                    x = cand;
                    g = gc;
                    gn = gcn;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if gn <= opts.grad_tol {
        let f = model.energy(&x)?;
        Some((x, f))
    } else {
        None
    }
}

fn fd_hessian(model: &dyn EnergyLandscape, x: &[f64]) -> Option<DMatrix<f64>> {
    let n = x.len();
    let mut h = 1e-4;
    'attempt: for _ in 0..4 {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let probe = |si: f64, sj: f64| -> Option<f64> {
                    let mut y = x.to_vec();
                    y[i] += si * h;
                    y[j] += sj * h;
                    model.energy(&y)
                };
                let v = match (
                    probe(1.0, 1.0),
                    probe(1.0, -1.0),
                    probe(-1.0, 1.0),
                    probe(-1.0, -1.0),
                ) {
                    (Some(a), Some(b), Some(c), Some(d)) => (a - b - c + d) / (4.0 * h * h),
                    _ => {
                        h *= 0.3;
                        continue 'attempt;
                    }
                };
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        return Some(m);
    }
    None
}

fn hessian_spectrum(model: &dyn EnergyLandscape, x: &[f64]) -> Option<Vec<f64>> {
    fd_hessian(model, x).map(|m| sym_eigenvalues(&m))
}

/// Runs `n_starts` descents from the model's start distribution, classifies
/// the converged points and deduplicates them by energy and
/// rotation-invariant fingerprint.  Points are returned sorted by energy.
pub fn minimize_multistart(
    model: &dyn EnergyLandscape,
    opts: &MinimizeOptions,
) -> Result<Vec<StationaryPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found: Vec<StationaryPoint> = Vec::new();
    let mut converged = 0usize;
    for _ in 0..opts.n_starts {
        let x0 = model.random_start(&mut rng);
        let Some((x, f, trace)) = descend(model, x0, opts) else {
            continue;
        };
        converged += 1;
        let duplicate = found.iter().any(|p| {
            (p.energy - f).abs() <= 1e-7
                && p.fingerprint
                    .iter()
                    .zip(model.fingerprint(&x).iter())
                    .all(|(a, b)| (a - b).abs() <= 1e-5)
        });
        if duplicate {
            continue;
        }
        let g = model.gradient(&x).unwrap_or_default();
        let spectrum = hessian_spectrum(model, &x).unwrap_or_default();
        found.push(StationaryPoint {
            fingerprint: model.fingerprint(&x),
            grad_norm: g.iter().map(|v| v * v).sum::<f64>().sqrt(),
            kind: classify(&spectrum),
            hessian_spectrum: spectrum,
            energy: f,
            coords: x,
            trace,
        });
    }
    if converged == 0 {
        return Err(Error::NoConvergence(format!(
            "none of {} starts converged for model {}",
            opts.n_starts,
            model.label()
        )));
    }
    found.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(found)
}

// ---------------------------------------------------------------------------
// rod stationary census
// ---------------------------------------------------------------------------

/// Classification on the 1D uniaxial profile.  `Saddle` means both first and
/// second derivatives vanish and the first derivative does not change sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    LocalMin,
    LocalMax,
    Saddle,
}

#[derive(Debug, Clone)]
pub struct RodCensusEntry {
    pub x: f64,
    pub kind: ProfileKind,
}

/// Census of the uniaxial profile's stationary points at a given coupling.
#[derive(Debug, Clone)]
pub struct RodCensus {
    pub chi: f64,
    /// Which of the five coupling regimes applies (boundaries matched with
    /// absolute tolerance `1e-5`).
    pub case: u8,
    pub entries: Vec<RodCensusEntry>,
}

const CHI_BOUNDARY_TOL: f64 = 1e-5;

/// Bisection for `(3x+1)/(x(1-x^2)) = chi/2` on a monotone branch.
fn branch_root(chi: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = |x: f64| (3.0 * x + 1.0) / (x * (1.0 - x * x)) - 0.5 * chi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g(lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Stationary points of the uniaxial rod profile, from the factorized first
/// derivative: the root `x = 1/3` plus the roots of the coupling balance on
/// the two monotone branches around the branch minimum.
pub fn rod_stationary_census(chi: f64) -> Result<RodCensus> {
    if chi <= 0.0 || chi.is_nan() {
        return Err(Error::InvalidInput(format!(
            "coupling chi = {chi} must be positive"
        )));
    }
    let (chi1, chi2) = critical_chi();
    let xstar = rod_branch_root();
    let mut entries = Vec::new();
    let case;
    if chi < chi1 - CHI_BOUNDARY_TOL {
        case = 1;
        entries.push(RodCensusEntry {
            x: 1.0 / 3.0,
            kind: ProfileKind::LocalMin,
        });
    } else if (chi - chi1).abs() <= CHI_BOUNDARY_TOL {
        case = 2;
        entries.push(RodCensusEntry {
            x: 1.0 / 3.0,
            kind: ProfileKind::LocalMin,
        });
        entries.push(RodCensusEntry {
            x: xstar,
            kind: ProfileKind::Saddle,
        });
    } else if chi < chi2 - CHI_BOUNDARY_TOL {
        case = 3;
        entries.push(RodCensusEntry {
            x: 1.0 / 3.0,
            kind: ProfileKind::LocalMin,
        });
        entries.push(RodCensusEntry {
            x: branch_root(chi, 1.0 / 3.0, xstar),
            kind: ProfileKind::LocalMax,
        });
        entries.push(RodCensusEntry {
            x: branch_root(chi, xstar, 1.0 - 1e-12),
            kind: ProfileKind::LocalMin,
        });
    } else if (chi - chi2).abs() <= CHI_BOUNDARY_TOL {
        case = 4;
        entries.push(RodCensusEntry {
            x: 1.0 / 3.0,
            kind: ProfileKind::Saddle,
        });
        entries.push(RodCensusEntry {
            x: branch_root(chi, xstar, 1.0 - 1e-12),
            kind: ProfileKind::LocalMin,
        });
    } else {
        case = 5;
        entries.push(RodCensusEntry {
            x: branch_root(chi, 1e-12, 1.0 / 3.0),
            kind: ProfileKind::LocalMin,
        });
        entries.push(RodCensusEntry {
            x: 1.0 / 3.0,
            kind: ProfileKind::LocalMax,
        });
        entries.push(RodCensusEntry {
            x: branch_root(chi, xstar, 1.0 - 1e-12),
            kind: ProfileKind::LocalMin,
        });
    }
    entries.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    Ok(RodCensus { chi, case, entries })
}

// ---------------------------------------------------------------------------
// structural verifications
// ---------------------------------------------------------------------------

/// True when the second-order tensor has two eigenvalues within `1e-6`, the
/// axisymmetry every rod stationary point must satisfy.
pub fn verify_axisymmetry(q2: &SymTracelessTensor) -> bool {
    let ev = sorted_eigenvalues(&q2.as_matrix());
    let g1 = ev[1] - ev[0];
    let g2 = ev[2] - ev[1];
    g1.min(g2) <= 1e-6
}

fn commutator_norm(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a * b - b * a).norm()
}

/// Shared-eigenframe check: true when `||[R1, R2]||_F <= 1e-6` (the third
/// tensor then commutes automatically).  Returns all three commutator norms.
pub fn verify_shared_eigenframe(r: &RTriple) -> (bool, [f64; 3]) {
    let norms = [
        commutator_norm(r.r(0), r.r(1)),
        commutator_norm(r.r(0), r.r(2)),
        commutator_norm(r.r(1), r.r(2)),
    ];
    (norms[0] <= 1e-6, norms)
}

/// A stationary point of the two-fold model whose tensors do not share an
/// eigenframe, with the couplings that make it stationary.
#[derive(Debug, Clone)]
pub struct D2Counterexample {
    pub triple: RTriple,
    pub c: [f64; 3],
    pub r: f64,
    pub r_squared: f64,
    /// Euler-Lagrange residual off the multiplier direction.
    pub residual: f64,
    pub commutator_norm: f64,
}

/// Builds the stationary-point family without a shared eigenframe.  Exists
/// for `1/4 < a < 1/2` and `|1-3a| <= c < a`; anything else is rejected
/// naming the violated inequality.
pub fn construct_d2_counterexample(a: f64, c: f64) -> Result<D2Counterexample> {
    if a.is_nan() || a <= 0.25 || a >= 0.5 {
        return Err(Error::WindowViolation(format!(
            "a = {a} violates 1/4 < a < 1/2"
        )));
    }
    if c.is_nan() || c < (1.0 - 3.0 * a).abs() {
        return Err(Error::WindowViolation(format!(
            "c = {c} violates |1 - 3a| <= c (= {})",
            (1.0 - 3.0 * a).abs()
        )));
    }
    if c >= a {
        return Err(Error::WindowViolation(format!(
            "c = {c} violates c < a (= {a})"
        )));
    }
    let lambda = a * a - c * c;
    let den = (1.0 - 3.0 * a) * lambda + a * (1.0 - 2.0 * a) * (4.0 * a - 1.0);
    let r_squared = 0.25 * (1.0 - 2.0 * a + lambda) - a * (1.0 - 2.0 * a).powi(2) * lambda / den;
    if r_squared.is_nan() || r_squared < -1e-15 {
        return Err(Error::WindowViolation(format!(
            "balance equation has no real off-diagonal entry (r^2 = {r_squared})"
        )));
    }
    let r = r_squared.max(0.0).sqrt();
    let c1 = 1.0 / lambda;
    let det2 = 0.25 * (1.0 - a) * (1.0 - a) - 0.25 * c * c - r_squared;
    if det2 <= 0.0 {
        return Err(Error::WindowViolation(
            "second tensor loses positive definiteness".into(),
        ));
    }
    let c23 = 1.0 / det2;

    let r1 = Matrix3::from_diagonal(&nalgebra::Vector3::new(a + c, a - c, 1.0 - 2.0 * a));
    let r2 = Matrix3::new(
        0.5 * (1.0 - a - c),
        r,
        0.0,
        r,
        0.5 * (1.0 - a + c),
        0.0,
        0.0,
        0.0,
        a,
    );
    let r3 = Matrix3::new(
        0.5 * (1.0 - a - c),
        -r,
        0.0,
        -r,
        0.5 * (1.0 - a + c),
        0.0,
        0.0,
        0.0,
        a,
    );
    let triple = RTriple::new(r1, r2, r3)?;

    // Euler-Lagrange residual off the multiplier (identity) direction
    let lhs = |m: &Matrix3<f64>, cc: f64| m.try_inverse().expect("positive definite") + cc * m;
    let deviatoric = |m: Matrix3<f64>| m - Matrix3::identity() * (m.trace() / 3.0);
    let d12 = deviatoric(lhs(&r1, c1) - lhs(&r2, c23)).norm();
    let d13 = deviatoric(lhs(&r1, c1) - lhs(&r3, c23)).norm();
    let residual = d12.max(d13);
    if residual > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "constructed point fails stationarity, residual {residual:.3e}"
        )));
    }
    Ok(D2Counterexample {
        commutator_norm: commutator_norm(&r1, &r2),
        triple,
        c: [c1, c23, c23],
        r,
        r_squared,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        rod_uniaxial_profile, D2Model, ModelCoefficients, RodModel, ToReducedModel,
    };
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn rod_opts(seed: u64, n_starts: usize) -> MinimizeOptions {
        MinimizeOptions {
            n_starts,
            seed,
            ..Default::default()
        }
    }

    fn rod_model(chi: f64) -> RodModel {
        RodModel {
            coeffs: ModelCoefficients {
                nu: 5.0 / 9.0,
                eta: chi * 5.0 / 9.0,
                ..Default::default()
            },
        }
    }

    #[test]
    fn rod_below_first_critical_has_single_minimizer() {
        let model = rod_model(12.0);
        let points = minimize_multistart(&model, &rod_opts(7, 16)).unwrap();
        assert_eq!(points.len(), 1);
        let p = &points[0];
        assert_eq!(p.kind, PointKind::Minimizer);
        assert!(p.coords.iter().all(|c| c.abs() <= 1e-7), "{:?}", p.coords);
        assert!(p.grad_norm <= 1e-9);
    }

    #[test]
    fn rod_above_second_critical_finds_the_nematic_orbit() {
        let model = rod_model(14.0);
        let points = minimize_multistart(&model, &rod_opts(11, 24)).unwrap();
        assert!(!points.is_empty());
        for p in &points {
            let q = SymTracelessTensor::from_coords(2, &p.coords);
            assert!(verify_axisymmetry(&q));
        }
        // the lowest point matches the census branch minimizer
        let census = rod_stationary_census(14.0).unwrap();
        let x3 = census
            .entries
            .iter()
            .filter(|e| e.kind == ProfileKind::LocalMin)
            .map(|e| e.x)
            .fold(0.0f64, f64::max);
        let q = SymTracelessTensor::from_coords(2, &points[0].coords);
        let top = sorted_eigenvalues(&q.as_matrix())[2];
        assert_abs_diff_eq!(top, x3 - 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn multistart_is_deterministic_and_monotone() {
        let model = rod_model(13.3);
        let a = minimize_multistart(&model, &rod_opts(5, 12)).unwrap();
        let b = minimize_multistart(&model, &rod_opts(5, 12)).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.energy, y.energy);
            assert_eq!(x.coords, y.coords);
        }
        for p in &a {
            for w in p.trace.windows(2) {
                assert!(w[1] <= w[0]);
            }
            // re-evaluate the gradient independently
            let g = model.gradient(&p.coords).unwrap();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm <= 1e-9, "reported point has gradient {norm}");
        }
    }

    #[test]
    fn reduced_to_model_at_zero_couplings() {
        let model = ToReducedModel {
            mu1_bar: 0.0,
            mu2_bar: 0.0,
        };
        let points = minimize_multistart(
            &model,
            &MinimizeOptions {
                n_starts: 12,
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(points.len(), 1);
        assert!(points[0].coords[0].abs() <= 1e-7);
        assert!(points[0].coords[1].abs() <= 1e-7);
        assert_eq!(points[0].kind, PointKind::Minimizer);
    }

    #[test]
    fn census_matches_the_five_regimes() {
        let (chi1, chi2) = critical_chi();
        let xstar = rod_branch_root();

        let c1 = rod_stationary_census(12.0).unwrap();
        assert_eq!((c1.case, c1.entries.len()), (1, 1));
        assert_eq!(c1.entries[0].kind, ProfileKind::LocalMin);

        let c2 = rod_stationary_census(13.065904).unwrap();
        assert_eq!((c2.case, c2.entries.len()), (2, 2));
        assert_abs_diff_eq!(c2.entries[1].x, xstar, epsilon = 1e-9);
        assert_eq!(c2.entries[1].kind, ProfileKind::Saddle);
        assert_abs_diff_eq!(xstar, 0.4246, epsilon = 1e-4);
        // same regime when handed the computed boundary exactly
        assert_eq!(rod_stationary_census(chi1).unwrap().case, 2);

        let c3 = rod_stationary_census(13.3).unwrap();
        assert_eq!((c3.case, c3.entries.len()), (3, 3));
        assert_eq!(c3.entries[0].x, 1.0 / 3.0);
        assert_eq!(c3.entries[0].kind, ProfileKind::LocalMin);
        assert_eq!(c3.entries[1].kind, ProfileKind::LocalMax);
        assert_eq!(c3.entries[2].kind, ProfileKind::LocalMin);
        assert!(1.0 / 3.0 < c3.entries[1].x && c3.entries[1].x < c3.entries[2].x);

        let c4 = rod_stationary_census(13.5).unwrap();
        assert_eq!((c4.case, c4.entries.len()), (4, 2));
        assert_eq!(c4.entries[0].kind, ProfileKind::Saddle);
        assert_eq!(c4.entries[1].kind, ProfileKind::LocalMin);
        assert_eq!(rod_stationary_census(chi2).unwrap().case, 4);

        let c5 = rod_stationary_census(14.0).unwrap();
        assert_eq!((c5.case, c5.entries.len()), (5, 3));
        assert!(c5.entries[0].x < 1.0 / 3.0);
        assert_eq!(c5.entries[0].kind, ProfileKind::LocalMin);
        assert_eq!(c5.entries[1].kind, ProfileKind::LocalMax);
        assert_eq!(c5.entries[2].kind, ProfileKind::LocalMin);

        assert!(rod_stationary_census(0.0).is_err());
    }

    #[test]
    fn census_roots_are_stationary_and_consistent() {
        for chi in [12.0, 13.065904, 13.3, 13.5, 14.0] {
            let census = rod_stationary_census(chi).unwrap();
            // boundary regimes report the exact-boundary root, so the
            // residual there reflects the chi matching tolerance
            let fp_tol = if census.case == 2 || census.case == 4 {
                1e-5
            } else {
                1e-10
            };
            for e in &census.entries {
                let (_, fp, fpp) = rod_uniaxial_profile(e.x, chi).unwrap();
                assert!(fp.abs() <= fp_tol, "chi {chi}: f'({}) = {fp}", e.x);
                match e.kind {
                    ProfileKind::LocalMin => assert!(fpp > -1e-8),
                    ProfileKind::LocalMax => assert!(fpp < 1e-8),
                    ProfileKind::Saddle => assert!(fpp.abs() <= 1e-4),
                }
            }
        }
    }

    #[test]
    fn axisymmetry_check() {
        assert!(verify_axisymmetry(&SymTracelessTensor::zeros(2)));
        let mut t = crate::tensor::SymTensor::zeros(2);
        t.set_comp((2, 0, 0), 0.3);
        t.set_comp((0, 2, 0), -0.1);
        t.set_comp((0, 0, 2), -0.2);
        assert!(!verify_axisymmetry(&SymTracelessTensor::new(t).unwrap()));
    }

    #[test]
    fn shared_eigenframe_for_admissible_couplings() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..6 {
            let c = loop {
                let c = [
                    rng.random::<f64>() * 12.0 - 6.0,
                    rng.random::<f64>() * 12.0 - 6.0,
                    rng.random::<f64>() * 12.0 - 6.0,
                ];
                if c.iter().cloned().fold(f64::INFINITY, f64::min) <= 4.0 {
                    break c;
                }
            };
            let model = D2Model { c };
            let points = minimize_multistart(
                &model,
                &MinimizeOptions {
                    n_starts: 8,
                    seed: 100 + trial,
                    ..Default::default()
                },
            )
            .unwrap();
            for p in &points {
                let triple = D2Model::triple(&p.coords);
                let (shared, norms) = verify_shared_eigenframe(&triple);
                assert!(shared, "c = {c:?}, commutators {norms:?}");
            }
        }
    }

    #[test]
    fn counterexample_reference_point() {
        let ce = construct_d2_counterexample(1.0 / 3.0, 0.2).unwrap();
        // by hand: lambda = 1/9 - 1/25 = 16/225, the balance equation at
        // a = 1/3 gives r^2 = 1/12 - (3/4) lambda = 3/100
        assert_abs_diff_eq!(ce.r_squared, 0.03, epsilon = 1e-12);
        assert_abs_diff_eq!(ce.c[0], 14.0625, epsilon = 1e-10);
        assert_abs_diff_eq!(ce.c[1], 14.0625, epsilon = 1e-10);
        assert!(ce.residual <= 1e-10);
        assert!(ce.commutator_norm >= 0.01);
        let (shared, _) = verify_shared_eigenframe(&ce.triple);
        assert!(!shared);
    }

    #[test]
    fn counterexample_degenerate_and_rejections() {
        // c = 0 at a = 1/3: diagonal tensors, shared eigenframe
        let ce = construct_d2_counterexample(1.0 / 3.0, 0.0).unwrap();
        assert_abs_diff_eq!(ce.r, 0.0, epsilon = 1e-12);
        let (shared, _) = verify_shared_eigenframe(&ce.triple);
        assert!(shared);

        for (a, c) in [(0.2, 0.1), (0.55, 0.1), (1.0 / 3.0, 0.4), (0.45, 0.05)] {
            let err = construct_d2_counterexample(a, c).unwrap_err();
            assert!(
                matches!(err, Error::WindowViolation(_)),
                "({a},{c}) gave {err}"
            );
        }
    }

    #[test]
    fn counterexample_couplings_exceed_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = 0.26 + rng.random::<f64>() * 0.23;
            let lo = (1.0 - 3.0 * a).abs();
            let c = lo + (a - lo) * rng.random::<f64>() * 0.98;
            let ce = construct_d2_counterexample(a, c).unwrap();
            assert!(
                ce.c.iter().all(|&v| v > 4.0),
                "a={a} c={c}: couplings {:?}",
                ce.c
            );
        }
    }
}
