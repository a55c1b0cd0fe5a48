//! Independent construction of covariance matrices from averaged tensors,
//! used as a brute-force oracle validating every explicit quasi-entropy
//! formula.
//!
//! The first-order covariance ([`build_cov_w1`]) is assembled from the eight
//! averaged tensors of the frame-vector functions.  The symmetry-reduced
//! fourth-order covariances ([`build_cov_w2_sym`]) substitute each group's
//! moment relations into the universal block identities, which hold pointwise
//! on SO(3) and are therefore valid for any density (the generic-density
//! quadrature tests below exercise exactly that).

use crate::error::{Error, Result};
use crate::linalg::{assemble_blocks, logdet_pd_checked, neg_logdet_pd};
use crate::quasi::{Group, OrderParameterSet};
use crate::tensor::{
    aux_tensor, kron, levi_civita, pair_vec, psi3, psi4, AuxKind, FullTensor, SymTensor,
    SymTracelessTensor,
};
use nalgebra::{DMatrix, Matrix3};

/// Minus log-determinant of a symmetric matrix: `Ok(None)` flags a non-PD
/// input, asymmetric input is an error.
pub fn logdet_pd(m: &DMatrix<f64>) -> Result<Option<f64>> {
    logdet_pd_checked(m)
}

// ---------------------------------------------------------------------------
// first-order covariance
// ---------------------------------------------------------------------------

/// The eight averaged tensors determining the covariance of the frame-vector
/// functions: three first-order averages and five second-order traceless
/// combinations.
#[derive(Debug, Clone)]
pub struct FirstOrderAverages {
    /// `<m1>`, `<m2>`, `<m3>` (order 1).
    pub m1: SymTracelessTensor,
    pub m2: SymTracelessTensor,
    pub m3: SymTracelessTensor,
    /// `<(m1^2)_0>`.
    pub q2: SymTracelessTensor,
    /// `(1/2) <m2^2 - m3^2>`.
    pub m12: SymTracelessTensor,
    /// `<m1 m2>`, `<m1 m3>`, `<m2 m3>` (symmetrized mixed monomials).
    pub m1m2: SymTracelessTensor,
    pub m1m3: SymTracelessTensor,
    pub m2m3: SymTracelessTensor,
}

impl FirstOrderAverages {
    pub fn zeros() -> Self {
        FirstOrderAverages {
            m1: SymTracelessTensor::zeros(1),
            m2: SymTracelessTensor::zeros(1),
            m3: SymTracelessTensor::zeros(1),
            q2: SymTracelessTensor::zeros(2),
            m12: SymTracelessTensor::zeros(2),
            m1m2: SymTracelessTensor::zeros(2),
            m1m3: SymTracelessTensor::zeros(2),
            m2m3: SymTracelessTensor::zeros(2),
        }
    }

    /// The symmetry reduction of a second-order group: members map onto their
    /// slots, every tensor vanishing for the group stays zero.
    pub fn from_group(params: &OrderParameterSet) -> Result<Self> {
        let mut avg = FirstOrderAverages::zeros();
        let m = params.members();
        match params.group() {
            Group::Dinf => {
                avg.q2 = m[0].clone();
            }
            Group::Cinf => {
                avg.m1 = m[0].clone();
                avg.q2 = m[1].clone();
            }
            Group::C2 => {
                avg.m1 = m[0].clone();
                avg.q2 = m[1].clone();
                avg.m12 = m[2].clone();
                avg.m2m3 = m[3].clone();
            }
            Group::D2 => {
                avg.q2 = m[0].clone();
                avg.m12 = m[1].clone();
            }
            g => {
                return Err(Error::GroupMismatch(format!(
                    "group {} is not a second-order reduction",
                    g.name()
                )))
            }
        }
        Ok(avg)
    }
}

/// 9x9 covariance of the stacked frame-vector functions.
#[derive(Debug, Clone)]
pub struct CovW1 {
    pub matrix: DMatrix<f64>,
}

impl CovW1 {
    pub fn neg_logdet(&self) -> Option<f64> {
        neg_logdet_pd(&self.matrix)
    }
}

/// Antisymmetric correction `(1/2) sum_s eps_ijs v_s` entering the
/// off-diagonal frame blocks.
fn half_eps(v: &SymTracelessTensor) -> Matrix3<f64> {
    let a = v.as_vec3();
    0.5 * Matrix3::new(0.0, a[2], -a[1], -a[2], 0.0, a[0], a[1], -a[0], 0.0)
}

pub fn build_cov_w1(avg: &FirstOrderAverages) -> CovW1 {
    let i3 = Matrix3::identity() / 3.0;
    let q2 = avg.q2.as_matrix();
    let m12 = avg.m12.as_matrix();
    // diagonal blocks from the square-sum identity, off-diagonal blocks from
    // the mixed monomials plus the epsilon correction carrying the remaining
    // frame vector
    let d1 = q2 + i3;
    let d2 = i3 - q2 / 2.0 + m12;
    let d3 = i3 - q2 / 2.0 - m12;
    let o12 = avg.m1m2.as_matrix() + half_eps(&avg.m3);
    let o13 = avg.m1m3.as_matrix() - half_eps(&avg.m2);
    let o23 = avg.m2m3.as_matrix() + half_eps(&avg.m1);
    let mut k = DMatrix::<f64>::zeros(9, 9);
    let put = |k: &mut DMatrix<f64>, bi: usize, bj: usize, m: &Matrix3<f64>| {
        for a in 0..3 {
            for b in 0..3 {
                k[(3 * bi + a, 3 * bj + b)] = m[(a, b)];
                k[(3 * bj + b, 3 * bi + a)] = m[(a, b)];
            }
        }
    };
    put(&mut k, 0, 0, &d1);
    put(&mut k, 1, 1, &d2);
    put(&mut k, 2, 2, &d3);
    put(&mut k, 0, 1, &o12);
    put(&mut k, 0, 2, &o13);
    put(&mut k, 1, 2, &o23);
    let mut mean = DMatrix::<f64>::zeros(9, 1);
    for (bi, v) in [&avg.m1, &avg.m2, &avg.m3].iter().enumerate() {
        let a = v.as_vec3();
        for c in 0..3 {
            mean[(3 * bi + c, 0)] = a[c];
        }
    }
    let matrix = k - &mean * mean.transpose();
    CovW1 { matrix }
}

// ---------------------------------------------------------------------------
// universal fourth-order blocks
// ---------------------------------------------------------------------------

/// `c_cross (d_ik d_jl + d_il d_jk) + c_diag d_ij d_kl` as an order-4 tensor.
fn delta_structure(c_cross: f64, c_diag: f64) -> FullTensor {
    FullTensor::from_fn(4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        c_cross * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k))
            + c_diag * kron(i, j) * kron(k, l)
    })
}

/// `d_kl A_ij + d_ij A_kl - 3/4 (d_ik A_jl + d_jl A_ik + d_il A_jk + d_jk A_il)`.
fn delta_weave(a: &SymTensor) -> FullTensor {
    FullTensor::from_fn(4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        kron(k, l) * a.get(&[i, j]) + kron(i, j) * a.get(&[k, l])
            - 0.75
                * (kron(i, k) * a.get(&[j, l])
                    + kron(j, l) * a.get(&[i, k])
                    + kron(i, l) * a.get(&[j, k])
                    + kron(j, k) * a.get(&[i, l]))
    })
}

/// Pointwise identity for the squared first traceless square:
/// `<W1(p) (x) W1(p)>` in terms of `<(m1^4)_0>` and `<(m1^2)_0>`.
fn block_head(f4: &SymTensor, a: &SymTensor) -> FullTensor {
    f4.expand()
        .add(&delta_weave(a).scale(-4.0 / 21.0))
        .and_then(|t| t.add(&delta_structure(1.0 / 15.0, -2.0 / 45.0)))
        .expect("order 4")
}

/// Pointwise identity for the remaining squared second-order functions:
/// the relevant fourth-order traceless average plus the weave of the
/// complementary second-order average.
fn block_square(h4: &SymTensor, a: &SymTensor) -> FullTensor {
    h4.expand()
        .add(&delta_weave(a).scale(1.0 / 7.0))
        .and_then(|t| t.add(&delta_structure(1.0 / 20.0, -1.0 / 30.0)))
        .expect("order 4")
}

/// Pointwise identity for the mixed frame-vector times mixed-square function:
/// `<m1m2m3>` plus an epsilon correction from the difference of second-order
/// averages.
fn cross_vector_square(t123: &SymTensor, a_diff: &SymTensor) -> FullTensor {
    FullTensor::from_fn(3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let eps_term: f64 = (0..3)
            .map(|s| {
                levi_civita(i, j, s) * a_diff.get(&[k, s])
                    + levi_civita(i, k, s) * a_diff.get(&[j, s])
            })
            .sum();
        t123.get(&[i, j, k]) + eps_term / 6.0
    })
}

/// The cross block between the first two second-order functions under
/// three-fold symmetry: `(1/2)(eps_iks T_jls + eps_jls T_kis)`.
fn cross_head_pair(t123: &SymTensor) -> FullTensor {
    FullTensor::from_fn(4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        0.5 * (0..3)
            .map(|s| {
                levi_civita(i, k, s) * t123.get(&[j, l, s])
                    + levi_civita(j, l, s) * t123.get(&[k, i, s])
            })
            .sum::<f64>()
    })
}

// ---------------------------------------------------------------------------
// symmetry-reduced fourth-order covariances
// ---------------------------------------------------------------------------

/// One positive-definite candidate block with a label naming its source, so a
/// failing comparison pinpoints the wrong block.
#[derive(Debug, Clone)]
pub struct LabeledBlock {
    pub label: String,
    pub matrix: DMatrix<f64>,
}

/// The labeled diagonal super-blocks of a symmetry-reduced covariance.
#[derive(Debug, Clone)]
pub struct CovW2Blocks {
    pub blocks: Vec<LabeledBlock>,
}

impl CovW2Blocks {
    /// Sum of `-ln det` over the blocks; `None` when any block is not PD.
    pub fn neg_logdet_sum(&self) -> Option<f64> {
        let mut total = 0.0;
        for b in &self.blocks {
            total += neg_logdet_pd(&b.matrix)?;
        }
        Some(total)
    }

    /// Debug dump: one labeled CSV matrix per block.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out.push_str(&format!("# {}\n", b.label));
            for r in 0..b.matrix.nrows() {
                let row: Vec<String> = (0..b.matrix.ncols())
                    .map(|c| format!("{:.17e}", b.matrix[(r, c)]))
                    .collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        out
    }
}

struct GroupMoments {
    a1: SymTensor,
    a2: SymTensor,
    a3: SymTensor,
    f1: SymTensor,
    g22: SymTensor,
    h12: SymTensor,
    h13: SymTensor,
    h23: SymTensor,
    t123: SymTensor,
}

fn zero2() -> SymTensor {
    SymTensor::zeros(2)
}

fn dmat3(m: Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

fn psi4_block(t: &FullTensor) -> DMatrix<f64> {
    let m = psi4(t).expect("order 4 block");
    DMatrix::from_fn(5, 5, |i, j| m[(i, j)])
}

fn psi3_block(t: &FullTensor) -> DMatrix<f64> {
    let m = psi3(t).expect("order 3 block");
    DMatrix::from_fn(3, 5, |i, j| m[(i, j)])
}

/// Assembles the nonzero covariance blocks for the fourth-order groups by
/// substituting the group's moment relations into the universal block
/// identities; every other block vanishes by symmetry.
pub fn build_cov_w2_sym(group: Group, params: &OrderParameterSet) -> Result<CovW2Blocks> {
    if params.group() != group {
        return Err(Error::GroupMismatch(format!(
            "parameter set is for group {}, requested {}",
            params.group().name(),
            group.name()
        )));
    }
    let m = params.members();
    let i3 = Matrix3::identity() / 3.0;
    let moments = match group {
        Group::O | Group::T => {
            let o4 = if group == Group::O { &m[0] } else { &m[1] };
            let third: SymTensor = o4.inner().scale(1.0 / 3.0);
            GroupMoments {
                a1: zero2(),
                a2: zero2(),
                a3: zero2(),
                f1: o4.inner().scale(-2.0 / 3.0),
                g22: o4.inner().scale(-0.5),
                h12: third.clone(),
                h13: third.clone(),
                h23: third,
                t123: if group == Group::T {
                    m[0].inner().clone()
                } else {
                    SymTensor::zeros(3)
                },
            }
        }
        Group::D4 | Group::D3 => {
            let q2 = &m[0];
            let (q4, m41) = if group == Group::D4 {
                (m[1].inner().clone(), m[2].inner().clone())
            } else {
                (m[2].inner().clone(), SymTensor::zeros(4))
            };
            GroupMoments {
                a1: q2.inner().clone(),
                a2: q2.inner().scale(-0.5),
                a3: q2.inner().scale(-0.5),
                f1: q4.clone(),
                g22: q4.add(&m41).scale(1.0 / 8.0),
                h12: q4.scale(-0.5),
                h13: q4.scale(-0.5),
                h23: q4.sub(&m41).scale(1.0 / 8.0),
                t123: SymTensor::zeros(3),
            }
        }
        g => {
            return Err(Error::GroupMismatch(format!(
                "group {} has no fourth-order covariance reduction",
                g.name()
            )))
        }
    };

    let frame_block = |a: &SymTensor| dmat3(SymTensor::as_matrix(a) + i3);
    let head = {
        let mut b = psi4_block(&block_head(&moments.f1, &moments.a1));
        // subtract the squared mean of the first traceless-square function
        let qv = pair_vec(&moments.a1)?;
        let qq = qv * qv.transpose();
        for i in 0..5 {
            for j in 0..5 {
                b[(i, j)] -= qq[(i, j)];
            }
        }
        b
    };

    let blocks = match group {
        Group::O => vec![
            LabeledBlock {
                label: "frame m1".into(),
                matrix: frame_block(&moments.a1),
            },
            LabeledBlock {
                label: "frame m2".into(),
                matrix: frame_block(&moments.a2),
            },
            LabeledBlock {
                label: "frame m3".into(),
                matrix: frame_block(&moments.a3),
            },
            LabeledBlock {
                label: "square W1".into(),
                matrix: head,
            },
            LabeledBlock {
                label: "square W2".into(),
                matrix: psi4_block(&block_square(&moments.g22, &moments.a1)),
            },
            LabeledBlock {
                label: "square W3 (m1m2)".into(),
                matrix: psi4_block(&block_square(&moments.h12, &moments.a3)),
            },
            LabeledBlock {
                label: "square W4 (m1m3)".into(),
                matrix: psi4_block(&block_square(&moments.h13, &moments.a2)),
            },
            LabeledBlock {
                label: "square W5 (m2m3)".into(),
                matrix: psi4_block(&block_square(&moments.h23, &moments.a1)),
            },
        ],
        Group::T => {
            let w1w2 = psi4_block(&cross_head_pair(&moments.t123));
            let top = assemble_blocks(&[5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => head.clone(),
                (1, 1) => psi4_block(&block_square(&moments.g22, &moments.a1)),
                _ => w1w2.clone(),
            });
            let coupled = |label: &str, adiff: SymTensor, h4: &SymTensor, acomp: &SymTensor| {
                let cross = psi3_block(&cross_vector_square(&moments.t123, &adiff));
                let square = psi4_block(&block_square(h4, acomp));
                LabeledBlock {
                    label: label.into(),
                    matrix: assemble_blocks(&[3, 5], &|bi, bj| match (bi, bj) {
                        (0, 0) => dmat3(i3),
                        (1, 1) => square.clone(),
                        _ => cross.clone(),
                    }),
                }
            };
            vec![
                LabeledBlock {
                    label: "squares W1+W2".into(),
                    matrix: top,
                },
                coupled(
                    "frame m1 + square W5",
                    moments.a3.sub(&moments.a2),
                    &moments.h23,
                    &moments.a1,
                ),
                coupled(
                    "frame m2 + square W4",
                    moments.a1.sub(&moments.a3),
                    &moments.h13,
                    &moments.a2,
                ),
                coupled(
                    "frame m3 + square W3",
                    moments.a2.sub(&moments.a1),
                    &moments.h12,
                    &moments.a3,
                ),
            ]
        }
        Group::D4 => {
            let coupled = |label: &str,
                           adiff: SymTensor,
                           h4: &SymTensor,
                           acomp: &SymTensor,
                           adiag: &SymTensor| {
                let cross = psi3_block(&cross_vector_square(&moments.t123, &adiff));
                let square = psi4_block(&block_square(h4, acomp));
                let frame = frame_block(adiag);
                LabeledBlock {
                    label: label.into(),
                    matrix: assemble_blocks(&[3, 5], &|bi, bj| match (bi, bj) {
                        (0, 0) => frame.clone(),
                        (1, 1) => square.clone(),
                        _ => cross.clone(),
                    }),
                }
            };
            vec![
                LabeledBlock {
                    label: "frame m1".into(),
                    matrix: frame_block(&moments.a1),
                },
                LabeledBlock {
                    label: "square W1".into(),
                    matrix: head,
                },
                LabeledBlock {
                    label: "square W2".into(),
                    matrix: psi4_block(&block_square(&moments.g22, &moments.a1)),
                },
                LabeledBlock {
                    label: "square W5 (m2m3)".into(),
                    matrix: psi4_block(&block_square(&moments.h23, &moments.a1)),
                },
                coupled(
                    "frame m2 + square W4",
                    moments.a1.sub(&moments.a3),
                    &moments.h13,
                    &moments.a2,
                    &moments.a2,
                ),
                coupled(
                    "frame m3 + square W3",
                    moments.a2.sub(&moments.a1),
                    &moments.h12,
                    &moments.a3,
                    &moments.a3,
                ),
            ]
        }
        Group::D3 => {
            let m13 = &m[1];
            let n4 = &m[3];
            let b2 = aux_tensor(AuxKind::B2, m13)?;
            let n4_full = n4.expand();
            let plus = psi4_block(&n4_full.add(&b2)?.scale(0.25));
            let minus = psi4_block(&n4_full.add(&b2.scale(-1.0))?.scale(0.25));
            let m13_quarter = psi3_block(&m13.expand().scale(0.25));
            let first = assemble_blocks(&[3, 5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => frame_block(&moments.a2),
                (0, 1) => m13_quarter.clone(),
                (0, 2) => psi3_block(&cross_vector_square(
                    &moments.t123,
                    &moments.a1.sub(&moments.a3),
                )),
                (1, 1) => psi4_block(&block_square(&moments.g22, &moments.a1)),
                (1, 2) => plus.clone(),
                _ => psi4_block(&block_square(&moments.h13, &moments.a2)),
            });
            let second = assemble_blocks(&[3, 5, 5], &|bi, bj| match (bi, bj) {
                (0, 0) => frame_block(&moments.a3),
                (0, 1) => psi3_block(&cross_vector_square(
                    &moments.t123,
                    &moments.a2.sub(&moments.a1),
                )),
                (0, 2) => m13_quarter.scale(-1.0),
                (1, 1) => psi4_block(&block_square(&moments.h12, &moments.a3)),
                (1, 2) => minus.clone(),
                _ => psi4_block(&block_square(&moments.h23, &moments.a1)),
            });
            vec![
                LabeledBlock {
                    label: "frame m1".into(),
                    matrix: frame_block(&moments.a1),
                },
                LabeledBlock {
                    label: "square W1".into(),
                    matrix: head,
                },
                LabeledBlock {
                    label: "frame m2 + squares W2,W4".into(),
                    matrix: first,
                },
                LabeledBlock {
                    label: "frame m3 + squares W3,W5".into(),
                    matrix: second,
                },
            ]
        }
        _ => unreachable!(),
    };
    Ok(CovW2Blocks { blocks })
}
