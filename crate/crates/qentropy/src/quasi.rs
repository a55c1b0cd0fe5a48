//! Closed-form quasi-entropies for the eight point groups, their gradients,
//! inner-minimized (marginal) variants and the reduced two-parameter form for
//! the tetrahedral/octahedral family.
//!
//! Each group's quasi-entropy is a sum of `-ln det` over small symmetric
//! blocks built from the averaged tensors.  Out-of-domain (a block failing
//! positive definiteness) is a normal return value, not an error, so line
//! searches can backtrack cheaply.

use crate::error::{Error, Result};
use crate::linalg::{assemble_blocks, neg_logdet_pd};
use crate::tensor::{
    aux_tensor, pair_vec, psi3, psi4, AuxKind, Rotation, SymTensor, SymTracelessTensor,
};
use nalgebra::{DMatrix, Matrix3, SMatrix};

/// Point groups with explicit quasi-entropy expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Dinf,
    Cinf,
    C2,
    D2,
    O,
    T,
    D4,
    D3,
}

impl Group {
    pub fn parse(s: &str) -> Result<Group> {
        match s.to_ascii_lowercase().as_str() {
            "dinf" | "d-inf" | "dinfinity" => Ok(Group::Dinf),
            "cinf" | "c-inf" | "cinfinity" => Ok(Group::Cinf),
            "c2" => Ok(Group::C2),
            "d2" => Ok(Group::D2),
            "o" | "oct" => Ok(Group::O),
            "t" | "tet" => Ok(Group::T),
            "d4" => Ok(Group::D4),
            "d3" => Ok(Group::D3),
            other => Err(Error::Parse(format!("unknown group `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Group::Dinf => "dinf",
            Group::Cinf => "cinf",
            Group::C2 => "c2",
            Group::D2 => "d2",
            Group::O => "o",
            Group::T => "t",
            Group::D4 => "d4",
            Group::D3 => "d3",
        }
    }

    /// Orders of the member tensors, in the fixed member layout.
    pub fn member_orders(&self) -> &'static [usize] {
        match self {
            Group::Dinf => &[2],
            Group::Cinf => &[1, 2],
            Group::C2 => &[1, 2, 2, 2],
            Group::D2 => &[2, 2],
            Group::O => &[4],
            Group::T => &[3, 4],
            Group::D4 => &[2, 4, 4],
            Group::D3 => &[2, 3, 4, 4],
        }
    }

    pub fn member_names(&self) -> &'static [&'static str] {
        match self {
            Group::Dinf => &["q2"],
            Group::Cinf => &["q1", "q2"],
            Group::C2 => &["q1", "q2", "m12", "m22"],
            Group::D2 => &["q2", "m12"],
            Group::O => &["o4"],
            Group::T => &["t3", "o4"],
            Group::D4 => &["q2", "q4", "m41"],
            Group::D3 => &["q2", "m13", "q4", "n4"],
        }
    }

    /// Total number of independent coordinates (2k+1 per member).
    pub fn coord_dim(&self) -> usize {
        self.member_orders().iter().map(|k| 2 * k + 1).sum()
    }

    pub const ALL: [Group; 8] = [
        Group::Dinf,
        Group::Cinf,
        Group::C2,
        Group::D2,
        Group::O,
        Group::T,
        Group::D4,
        Group::D3,
    ];
}

/// Per-group bundle of averaged symmetric traceless tensors, the minimization
/// variables of the free-energy models.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderParameterSet {
    group: Group,
    members: Vec<SymTracelessTensor>,
}

impl OrderParameterSet {
    pub fn new(group: Group, members: Vec<SymTracelessTensor>) -> Result<Self> {
        let orders = group.member_orders();
        if members.len() != orders.len() {
            return Err(Error::GroupMismatch(format!(
                "group {} expects {} member tensors, got {}",
                group.name(),
                orders.len(),
                members.len()
            )));
        }
        for (m, &o) in members.iter().zip(orders) {
            if m.order() != o {
                return Err(Error::GroupMismatch(format!(
                    "group {} member order mismatch: expected {}, got {}",
                    group.name(),
                    o,
                    m.order()
                )));
            }
        }
        Ok(OrderParameterSet { group, members })
    }

    pub fn zeros(group: Group) -> Self {
        let members = group
            .member_orders()
            .iter()
            .map(|&o| SymTracelessTensor::zeros(o))
            .collect();
        OrderParameterSet { group, members }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn members(&self) -> &[SymTracelessTensor] {
        &self.members
    }

    pub fn member(&self, name: &str) -> Option<&SymTracelessTensor> {
        self.group
            .member_names()
            .iter()
            .position(|&n| n == name)
            .map(|i| &self.members[i])
    }

    pub fn set_member(&mut self, index: usize, t: SymTracelessTensor) {
        assert_eq!(t.order(), self.group.member_orders()[index]);
        self.members[index] = t;
    }

    /// Rotates every member tensor by the same rotation.
    pub fn rotate_all(&self, r: &Rotation) -> OrderParameterSet {
        OrderParameterSet {
            group: self.group,
            members: self.members.iter().map(|m| m.rotate(r)).collect(),
        }
    }

    /// Flat coordinates: concatenated orthonormal-basis coordinates of each
    /// member, in member order.
    pub fn coords(&self) -> Vec<f64> {
        self.members.iter().flat_map(|m| m.coords()).collect()
    }

    pub fn from_coords(group: Group, coords: &[f64]) -> OrderParameterSet {
        assert_eq!(coords.len(), group.coord_dim(), "coordinate count mismatch");
        let mut members = Vec::new();
        let mut base = 0;
        for &o in group.member_orders() {
            let d = 2 * o + 1;
            members.push(SymTracelessTensor::from_coords(o, &coords[base..base + d]));
            base += d;
        }
        OrderParameterSet { group, members }
    }

    pub fn is_nan(&self) -> bool {
        self.members.iter().any(|m| m.is_nan())
    }

    /// Rejection-samples a parameter set inside the quasi-entropy domain, with
    /// member coordinates drawn uniformly in a ball of the given radius.  The
    /// radius shrinks geometrically if rejection keeps failing.
    pub fn random_in_domain<R: rand::Rng + ?Sized>(
        group: Group,
        radius: f64,
        rng: &mut R,
    ) -> OrderParameterSet {
        let mut r = radius;
        for _ in 0..200 {
            let members = group
                .member_orders()
                .iter()
                .map(|&o| SymTracelessTensor::random_ball(o, r, rng))
                .collect();
            let params = OrderParameterSet { group, members };
            if let Ok(v) = quasi_entropy(&params) {
                if v.in_domain {
                    return params;
                }
            }
            r *= 0.8;
        }
        OrderParameterSet::zeros(group)
    }
}

/// Quasi-entropy evaluation result.  `in_domain == false` (with an infinite
/// value) signals that some block failed positive definiteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiEntropyValue {
    pub value: f64,
    pub in_domain: bool,
}

impl QuasiEntropyValue {
    pub fn out_of_domain() -> Self {
        QuasiEntropyValue {
            value: f64::INFINITY,
            in_domain: false,
        }
    }

    fn finite(value: f64) -> Self {
        QuasiEntropyValue {
            value,
            in_domain: true,
        }
    }
}

/// `diag(1/15, 1/20, 1/20, 1/20, 1/20)`, the reshaped identity contribution
/// of the fourth-order blocks.
pub fn d_matrix() -> SMatrix<f64, 5, 5> {
    SMatrix::<f64, 5, 5>::from_diagonal(&nalgebra::SVector::<f64, 5>::from_column_slice(&[
        1.0 / 15.0,
        1.0 / 20.0,
        1.0 / 20.0,
        1.0 / 20.0,
        1.0 / 20.0,
    ]))
}

fn third_identity() -> Matrix3<f64> {
    Matrix3::identity() / 3.0
}

/// Antisymmetric matrix `S_ij = sum_s eps_ijs v_s` of an order-1 tensor.
fn eps_mat(v: &SymTensor) -> Matrix3<f64> {
    let a = v.as_vec3();
    Matrix3::new(0.0, a[2], -a[1], -a[2], 0.0, a[0], a[1], -a[0], 0.0)
}

fn dm(m: Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

fn dm5(m: SMatrix<f64, 5, 5>) -> DMatrix<f64> {
    DMatrix::from_fn(5, 5, |i, j| m[(i, j)])
}

fn dm35(m: SMatrix<f64, 3, 5>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 5, |i, j| m[(i, j)])
}

/// The `-ln det` blocks of a group's quasi-entropy, each with its
/// multiplicity.  Exposed for the oracle comparison tests.
pub fn quasi_entropy_blocks(params: &OrderParameterSet) -> Result<Vec<(f64, DMatrix<f64>)>> {
    if params.is_nan() {
        return Err(Error::InvalidInput("NaN in order parameter set".into()));
    }
    let m = params.members();
    let i3 = third_identity();
    let d = d_matrix();
    let blocks = match params.group() {
        Group::Dinf => {
            let q = m[0].as_matrix();
            vec![(1.0, dm(q + i3)), (2.0, dm(i3 - q / 2.0))]
        }
        Group::Cinf => {
            let q1 = m[0].as_vec3();
            let q2 = m[1].as_matrix();
            let outer = Matrix3::from_fn(|i, j| q1[i] * q1[j]);
            let s = eps_mat(m[0].inner());
            let b1 = dm(i3 + q2 - outer);
            let a = dm(i3 - q2 / 2.0);
            let coupled = assemble_blocks(&[3, 3], &|bi, bj| match (bi, bj) {
                (0, 0) | (1, 1) => a.clone(),
                _ => dm(s / 2.0),
            });
            vec![(1.0, b1), (1.0, coupled)]
        }
        Group::C2 => {
            let q1 = m[0].as_vec3();
            let q2 = m[1].as_matrix();
            let m12 = m[2].as_matrix();
            let m22 = m[3].as_matrix();
            let outer = Matrix3::from_fn(|i, j| q1[i] * q1[j]);
            let s = eps_mat(m[0].inner());
            let b1 = dm(i3 + q2 - outer);
            let coupled = assemble_blocks(&[3, 3], &|bi, bj| match (bi, bj) {
                (0, 0) => dm(i3 - q2 / 2.0 + m12),
                (1, 1) => dm(i3 - q2 / 2.0 - m12),
                _ => dm(m22 + s / 2.0),
            });
            vec![(1.0, b1), (1.0, coupled)]
        }
        Group::D2 => {
            let q2 = m[0].as_matrix();
            let m12 = m[1].as_matrix();
            vec![
                (1.0, dm(i3 + q2)),
                (1.0, dm(i3 - q2 / 2.0 + m12)),
                (1.0, dm(i3 - q2 / 2.0 - m12)),
            ]
        }
        Group::O => {
            let p = psi4(&m[0].expand())?;
            vec![(2.0, dm5(d - p / 2.0)), (3.0, dm5(d + p / 3.0))]
        }
        Group::T => {
            let t3 = &m[0];
            let p = psi4(&m[1].expand())?;
            let a1 = psi4(&aux_tensor(AuxKind::A1, t3)?)?;
            let p3 = psi3(&t3.expand())?;
            let top = assemble_blocks(&[5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => dm5(d * (4.0 / 3.0) - p * (2.0 / 3.0)),
                (1, 1) => dm5(d - p / 2.0),
                _ => dm5(a1 / 2.0),
            });
            let bottom = assemble_blocks(&[3, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => dm(i3),
                (1, 1) => dm5(d + p / 3.0),
                _ => dm35(p3),
            });
            vec![(1.0, top), (3.0, bottom)]
        }
        Group::D4 => {
            let q2m = m[0].as_matrix();
            let p4 = psi4(&m[1].expand())?;
            let m41 = psi4(&m[2].expand())?;
            let a2 = psi4(&aux_tensor(AuxKind::A2, &m[0])?)?;
            let b1 = psi3(&aux_tensor(AuxKind::B1, &m[0])?)?;
            let qv = pair_vec(m[0].inner())?;
            let qq = qv * qv.transpose();
            let mut blocks = vec![
                (1.0, dm(q2m + i3)),
                (1.0, dm5(p4 - a2 * (4.0 / 21.0) - qq + d * (4.0 / 3.0))),
                (1.0, dm5(p4 / 8.0 + m41 / 8.0 + a2 / 7.0 + d)),
                (1.0, dm5(p4 / 8.0 - m41 / 8.0 + a2 / 7.0 + d)),
            ];
            for sign in [1.0, -1.0] {
                blocks.push((
                    1.0,
                    assemble_blocks(&[3, 5], &|bi, bj| match (bi, bj) {
                        (0, 0) => dm(i3 - q2m / 2.0),
                        (1, 1) => dm5(-p4 / 2.0 - a2 / 14.0 + d),
                        _ => dm35(b1 * (sign / 4.0)),
                    }),
                ));
            }
            blocks
        }
        Group::D3 => {
            let q2m = m[0].as_matrix();
            let m13 = psi3(&m[1].expand())?;
            let p4 = psi4(&m[2].expand())?;
            let n4 = psi4(&m[3].expand())?;
            let a2 = psi4(&aux_tensor(AuxKind::A2, &m[0])?)?;
            let b1 = psi3(&aux_tensor(AuxKind::B1, &m[0])?)?;
            let b2 = psi4(&aux_tensor(AuxKind::B2, &m[1])?)?;
            let qv = pair_vec(m[0].inner())?;
            let qq = qv * qv.transpose();
            let first = assemble_blocks(&[3, 5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => dm(i3 - q2m / 2.0),
                (0, 1) => dm35(m13 / 4.0),
                (0, 2) => dm35(b1 / 4.0),
                (1, 1) => dm5(p4 / 8.0 + a2 / 7.0 + d),
                (1, 2) => dm5((n4 + b2) / 4.0),
                _ => dm5(-p4 / 2.0 - a2 / 14.0 + d),
            });
            let second = assemble_blocks(&[3, 5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => dm(i3 - q2m / 2.0),
                (0, 1) => dm35(-b1 / 4.0),
                (0, 2) => dm35(-m13 / 4.0),
                (1, 1) => dm5(-p4 / 2.0 - a2 / 14.0 + d),
                (1, 2) => dm5((n4 - b2) / 4.0),
                _ => dm5(p4 / 8.0 + a2 / 7.0 + d),
            });
            vec![
                (1.0, dm(q2m + i3)),
                (1.0, dm5(p4 - a2 * (4.0 / 21.0) - qq + d * (4.0 / 3.0))),
                (1.0, first),
                (1.0, second),
            ]
        }
    };
    Ok(blocks)
}

/// The quasi-entropy of a parameter set, evaluated exactly as displayed for
/// its group (no normalizing constants added).
pub fn quasi_entropy(params: &OrderParameterSet) -> Result<QuasiEntropyValue> {
    let blocks = quasi_entropy_blocks(params)?;
    let mut total = 0.0;
    for (mult, m) in &blocks {
        match neg_logdet_pd(m) {
            Some(v) => total += mult * v,
            None => return Ok(QuasiEntropyValue::out_of_domain()),
        }
    }
    Ok(QuasiEntropyValue::finite(total))
}

// ---------------------------------------------------------------------------
// gradients
// ---------------------------------------------------------------------------

fn project_matrix_gradient(g: &Matrix3<f64>) -> Vec<f64> {
    // dot the gradient matrix with each orthonormal traceless basis tensor
    let gt = SymTensor::from_matrix(&((g + g.transpose()) * 0.5)).expect("symmetric");
    crate::tensor::traceless_basis(2)
        .iter()
        .map(|b| gt.dot(b.inner()).expect("order 2"))
        .collect()
}

/// Gradient of [`quasi_entropy`] in the independent coordinates of each
/// member tensor (the layout of [`OrderParameterSet::coords`]).  Analytic for
/// the D-infinity and D2 groups, Richardson-extrapolated central differences
/// for the rest.
pub fn quasi_entropy_gradient(params: &OrderParameterSet) -> Result<Vec<f64>> {
    let v = quasi_entropy(params)?;
    if !v.in_domain {
        return Err(Error::OutOfDomain(
            "quasi-entropy gradient requested outside the PD domain".into(),
        ));
    }
    match params.group() {
        Group::Dinf => {
            let q = params.members()[0].as_matrix();
            let i3 = third_identity();
            let a_inv = (q + i3).try_inverse().ok_or_else(singular)?;
            let b_inv = (i3 - q / 2.0).try_inverse().ok_or_else(singular)?;
            Ok(project_matrix_gradient(&(-a_inv + b_inv)))
        }
        Group::D2 => {
            let q = params.members()[0].as_matrix();
            let m12 = params.members()[1].as_matrix();
            let i3 = third_identity();
            let a_inv = (i3 + q).try_inverse().ok_or_else(singular)?;
            let b_inv = (i3 - q / 2.0 + m12).try_inverse().ok_or_else(singular)?;
            let c_inv = (i3 - q / 2.0 - m12).try_inverse().ok_or_else(singular)?;
            let mut g = project_matrix_gradient(&(-a_inv + b_inv / 2.0 + c_inv / 2.0));
            g.extend(project_matrix_gradient(&(-b_inv + c_inv)));
            Ok(g)
        }
        _ => finite_difference_gradient(params),
    }
}

fn singular() -> Error {
    Error::OutOfDomain("singular block matrix".into())
}

/// Richardson-extrapolated central differences, step `1e-6`, shrinking when a
/// probe leaves the domain.
pub fn finite_difference_gradient(params: &OrderParameterSet) -> Result<Vec<f64>> {
    let group = params.group();
    let x0 = params.coords();
    let eval = |x: &[f64]| -> Result<Option<f64>> {
        let p = OrderParameterSet::from_coords(group, x);
        let v = quasi_entropy(&p)?;
        Ok(v.in_domain.then_some(v.value))
    };
    let mut grad = vec![0.0; x0.len()];
    for i in 0..x0.len() {
        let mut h = 1e-6;
        let mut ok = false;
        'attempt: for _ in 0..4 {
            let mut d = [0.0; 2];
            for (slot, step) in [(0usize, h), (1usize, h / 2.0)] {
                let mut xp = x0.clone();
                let mut xm = x0.clone();
                xp[i] += step;
                xm[i] -= step;
                match (eval(&xp)?, eval(&xm)?) {
                    (Some(fp), Some(fm)) => d[slot] = (fp - fm) / (2.0 * step),
                    _ => {
                        h /= 10.0;
                        continue 'attempt;
                    }
                }
            }
            grad[i] = (4.0 * d[1] - d[0]) / 3.0;
            ok = true;
            break;
        }
        if !ok {
            return Err(Error::OutOfDomain(format!(
                "finite differences could not stay in the domain along coordinate {i}"
            )));
        }
    }
    Ok(grad)
}

// ---------------------------------------------------------------------------
// marginal (inner-minimized) quasi-entropies
// ---------------------------------------------------------------------------

/// Which member is minimized out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marginal {
    /// C-infinity quasi-entropy minimized over the second-order tensor,
    /// leaving a function of the polar first-order tensor alone.
    CinfOverQ2,
    /// C2 quasi-entropy minimized over the second mixed tensor, leaving a
    /// function of `(q1, q2, m12)`.
    C2OverM22,
}

/// Result of a marginal minimization: the value and the completed set.
#[derive(Debug, Clone)]
pub struct MarginalResult {
    pub value: QuasiEntropyValue,
    pub minimizer: OrderParameterSet,
}

/// Minimizes the group quasi-entropy over the designated free member, by
/// descent with backtracking from the zero initialization (the free member of
/// `fixed` is ignored).  Strict convexity makes the minimum unique; an
/// infeasible zero start reports `in_domain = false`.
pub fn quasi_entropy_marginal(
    which: Marginal,
    fixed: &OrderParameterSet,
) -> Result<MarginalResult> {
    quasi_entropy_marginal_from(which, fixed, SymTracelessTensor::zeros(2))
}

/// [`quasi_entropy_marginal`] with a caller-provided warm start.  The inner
/// problem is strictly convex, so the minimizer does not depend on the start;
/// an infeasible start falls back to zero.
pub fn quasi_entropy_marginal_from(
    which: Marginal,
    fixed: &OrderParameterSet,
    start: SymTracelessTensor,
) -> Result<MarginalResult> {
    let (expected_group, free_index) = match which {
        Marginal::CinfOverQ2 => (Group::Cinf, 1),
        Marginal::C2OverM22 => (Group::C2, 3),
    };
    if fixed.group() != expected_group {
        return Err(Error::GroupMismatch(format!(
            "marginal expects group {}, got {}",
            expected_group.name(),
            fixed.group().name()
        )));
    }
    let mut params = fixed.clone();
    params.set_member(free_index, SymTracelessTensor::zeros(2));

    let value = |base: &OrderParameterSet, m: &SymTracelessTensor| -> Result<QuasiEntropyValue> {
        let mut p = base.clone();
        p.set_member(free_index, m.clone());
        quasi_entropy(&p)
    };

    let mut x = start;
    let mut fx = value(&params, &x)?;
    if !fx.in_domain {
        x = SymTracelessTensor::zeros(2);
        fx = value(&params, &x)?;
    }
    if !fx.in_domain {
        return Ok(MarginalResult {
            value: QuasiEntropyValue::out_of_domain(),
            minimizer: params,
        });
    }
    let gradient_at = |base: &OrderParameterSet, m: &SymTracelessTensor| -> Result<Vec<f64>> {
        let mut p = base.clone();
        p.set_member(free_index, m.clone());
        marginal_gradient(which, &p)
    };
    // Phase 1: Armijo descent on the value until the requested decrease falls
    // below the floating-point resolution of the value.  Phase 2: descent on
    // the (analytic) gradient norm, which has no such floor, down to 1e-10.
    let mut step = 0.1;
    let mut polishing = false;
    for _ in 0..20000 {
        let g = gradient_at(&params, &x)?;
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        let gnorm = gnorm2.sqrt();
        if gnorm <= 1e-10 {
            break;
        }
        let candidate = |s: f64| -> SymTracelessTensor {
            let coords: Vec<f64> = x
                .coords()
                .iter()
                .zip(&g)
                .map(|(xi, gi)| xi - s * gi)
                .collect();
            SymTracelessTensor::from_coords(2, &coords)
        };
        let mut accepted = false;
        if !polishing {
            for _ in 0..60 {
                if 1e-4 * step * gnorm2 < 8.0 * fx.value.abs() * f64::EPSILON {
                    polishing = true;
                    break;
                }
                let cand = candidate(step);
                let fc = value(&params, &cand)?;
                if fc.in_domain && fc.value <= fx.value - 1e-4 * step * gnorm2 {
                    x = cand;
                    fx = fc;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if polishing {
                continue;
            }
            if !accepted {
                polishing = true;
            }
        } else {
            let mut s = step;
            for _ in 0..60 {
                let cand = candidate(s);
                let fc = value(&params, &cand)?;
                if fc.in_domain {
                    let gc = gradient_at(&params, &cand)?;
                    let gcn = gc.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if gcn < gnorm {
                        x = cand;
                        fx = fc;
                        step = s * 2.0;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
    params.set_member(free_index, x);
    Ok(MarginalResult {
        value: fx,
        minimizer: params,
    })
}

/// Analytic gradient of the group quasi-entropy with respect to the free
/// member of a marginal, via `d ln det M = tr(M^-1 dM)`.
fn marginal_gradient(which: Marginal, params: &OrderParameterSet) -> Result<Vec<f64>> {
    let blocks = quasi_entropy_blocks(params)?;
    match which {
        Marginal::C2OverM22 => {
            // free member enters only the 6x6 coupled block, in both
            // off-diagonal corners
            let m = &blocks[1].1;
            let inv = m.clone().try_inverse().ok_or_else(singular)?;
            let mut g = Matrix3::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] = -(inv[(i, j + 3)] + inv[(j + 3, i)]);
                }
            }
            Ok(project_matrix_gradient(&g))
        }
        Marginal::CinfOverQ2 => {
            // q2 enters the 3x3 block with +1 and both diagonal 3x3 sub-blocks
            // of the 6x6 with -1/2
            let a_inv = blocks[0].1.clone().try_inverse().ok_or_else(singular)?;
            let m_inv = blocks[1].1.clone().try_inverse().ok_or_else(singular)?;
            let mut g = Matrix3::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] = -a_inv[(i, j)] + 0.5 * (m_inv[(i, j)] + m_inv[(i + 3, j + 3)]);
                }
            }
            Ok(project_matrix_gradient(&g))
        }
    }
}

// ---------------------------------------------------------------------------
// reduced tetrahedral/octahedral form
// ---------------------------------------------------------------------------

/// The tetrahedral-symmetric embedding `T = s e1 e2 e3`,
/// `O = t (e1^2 e2^2 + e2^2 e3^2 + e3^2 e1^2 - id^2/5)`.
pub fn tetrahedral_embedding(s: f64, t: f64) -> OrderParameterSet {
    let t3 = SymTracelessTensor::new(SymTensor::monomial((1, 1, 1)).scale(s)).expect("traceless");
    let o4 = SymTracelessTensor::new(
        SymTensor::monomial((2, 2, 0))
            .add(&SymTensor::monomial((0, 2, 2)))
            .add(&SymTensor::monomial((2, 0, 2)))
            .sub(&SymTensor::identity_sq().scale(0.2))
            .scale(t),
    )
    .expect("traceless");
    OrderParameterSet::new(Group::T, vec![t3, o4]).expect("orders match")
}

/// Pre-constant reduced quasi-entropy of the tetrahedral family:
/// `-2 ln((1/15 + t/10)^2 - s^2/36) - 9 ln((1-t)/15) - 3 ln((1-t)/20)
///  - 9 ln(1/60 + t/90 - s^2/36)`.
///
/// The first term factors as `(1/15 + t/10 + s/6)(1/15 + t/10 - s/6)`; the
/// domain requires each factor positive (not merely the product), matching
/// positive definiteness of the underlying 2x2 blocks.  The product alone
/// would re-admit a spurious region below `t = -2/3` where both factors are
/// negative.
pub fn q4_reduced_st(s: f64, t: f64) -> QuasiEntropyValue {
    let u = 1.0 / 15.0 + t / 10.0;
    let p = u * u - s * s / 36.0;
    let a = (1.0 - t) / 15.0;
    let b = (1.0 - t) / 20.0;
    let c = 1.0 / 60.0 + t / 90.0 - s * s / 36.0;
    if u <= 0.0 || p <= 0.0 || a <= 0.0 || b <= 0.0 || c <= 0.0 {
        return QuasiEntropyValue::out_of_domain();
    }
    QuasiEntropyValue::finite(-2.0 * p.ln() - 9.0 * a.ln() - 3.0 * b.ln() - 9.0 * c.ln())
}

/// Gradient of [`q4_reduced_st`]; `None` outside the domain.
pub fn q4_reduced_st_gradient(s: f64, t: f64) -> Option<(f64, f64)> {
    let u = 1.0 / 15.0 + t / 10.0;
    let p = u * u - s * s / 36.0;
    let c = 1.0 / 60.0 + t / 90.0 - s * s / 36.0;
    if u <= 0.0 || p <= 0.0 || t >= 1.0 || c <= 0.0 {
        return None;
    }
    let ds = s / (9.0 * p) + s / (2.0 * c);
    let dt = -0.4 * u / p + 12.0 / (1.0 - t) - 1.0 / (10.0 * c);
    Some((ds, dt))
}
