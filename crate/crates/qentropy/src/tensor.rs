//! Symmetric (traceless) tensor algebra on R^3 up to order 4.
//!
//! Symmetric tensors are stored minimally: one coefficient per multi-degree
//! `(k1,k2,k3)` with `k1+k2+k3 = order`, holding the component value at a
//! representative index (e.g. the `(1,1,2)` slot for multi-degree `(2,1,0)`).
//! A full `3^k` expansion ([`FullTensor`]) backs rotations, the reshaping maps
//! and the brute-force oracles in the test suite.

use crate::error::{Error, Result};
use nalgebra::{Matrix3, SMatrix, SVector};
use std::f64::consts::PI;
use std::sync::LazyLock;

/// Construction-time invariant tolerance (orthonormality, tracelessness).
pub const CONSTRUCTION_TOL: f64 = 1e-12;

const MAX_ORDER: usize = 4;

// ---------------------------------------------------------------------------
// multi-degree bookkeeping
// ---------------------------------------------------------------------------

/// Multi-degree of a monomial index multiset: how many 1s, 2s, 3s.
pub type MultiDegree = (usize, usize, usize);

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        factorial(n) / (factorial(k) * factorial(n - k))
    }
}

/// Canonical enumeration of multi-degrees of a given order (lexicographic,
/// `k1` descending).
pub fn multi_degrees(order: usize) -> Vec<MultiDegree> {
    let mut out = Vec::new();
    for k1 in (0..=order).rev() {
        for k2 in (0..=order - k1).rev() {
            out.push((k1, k2, order - k1 - k2));
        }
    }
    out
}

fn degree_index(order: usize, d: MultiDegree) -> usize {
    // position of d in multi_degrees(order)
    let (k1, k2, _) = d;
    let mut idx = 0;
    for a in (k1 + 1..=order).rev() {
        idx += order - a + 1;
    }
    idx + (order - k1 - k2)
}

/// Number of distinct index tuples sharing a multi-degree: k!/(k1! k2! k3!).
pub fn multiplicity(d: MultiDegree) -> f64 {
    factorial(d.0 + d.1 + d.2) / (factorial(d.0) * factorial(d.1) * factorial(d.2))
}

fn degree_of(idx: &[usize]) -> MultiDegree {
    let mut d = (0, 0, 0);
    for &i in idx {
        match i {
            0 => d.0 += 1,
            1 => d.1 += 1,
            _ => d.2 += 1,
        }
    }
    d
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(())
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub(crate) fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Euler angles and rotations
// ---------------------------------------------------------------------------

/// Euler angles with `alpha` in `[0, pi]`, `beta`, `gamma` in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    /// Wraps arbitrary angles into the canonical ranges.  `alpha` outside
    /// `[0, pi]` is reflected (`alpha -> 2*pi - alpha`) with `beta`, `gamma`
    /// shifted by `pi`, which leaves the rotation matrix unchanged.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut a = alpha.rem_euclid(two_pi);
        let mut b = beta;
        let mut g = gamma;
        if a > PI {
            a = two_pi - a;
            b += PI;
            g += PI;
        }
        EulerAngles {
            alpha: a,
            beta: b.rem_euclid(two_pi),
            gamma: g.rem_euclid(two_pi),
        }
    }
}

/// Element of SO(3).  Columns of `m` are the body frame axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Builds the rotation matrix from Euler angles.
    pub fn from_euler(a: EulerAngles) -> Self {
        let EulerAngles { alpha, beta, gamma } = EulerAngles::new(a.alpha, a.beta, a.gamma);
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let (sg, cg) = gamma.sin_cos();
        Rotation {
            m: [
                [ca, -sa * cg, sa * sg],
                [sa * cb, ca * cb * cg - sb * sg, -ca * cb * sg - sb * cg],
                [sa * sb, ca * sb * cg + cb * sg, -ca * sb * sg + cb * cg],
            ],
        }
    }

    /// Validates orthonormality and `det = +1` to `1e-12`.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation { m };
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                if (dot - kron(i, j)).abs() > CONSTRUCTION_TOL {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not orthonormal: column dot ({i},{j}) = {dot}"
                    )));
                }
            }
        }
        if (r.det() - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix determinant {} is not +1",
                r.det()
            )));
        }
        Ok(r)
    }

    /// Rotation by `theta` about the first body axis.
    pub fn about_first_axis(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    /// Uniform random rotation under the Haar measure.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        let alpha = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
        let beta = rng.random::<f64>() * 2.0 * PI;
        let gamma = rng.random::<f64>() * 2.0 * PI;
        Rotation::from_euler(EulerAngles::new(alpha, beta, gamma))
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.m[i][j])
    }

    /// Column `j` of the matrix (the image of the `j`-th reference axis).
    pub fn axis(&self, j: usize) -> [f64; 3] {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Rotation { m }
    }

    pub fn transpose(&self) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.m[j][i];
            }
        }
        Rotation { m }
    }

    pub fn apply_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (0..3).map(|j| self.m[i][j] * v[j]).sum();
        }
        out
    }
}

// ---------------------------------------------------------------------------
// full (dense) tensors
// ---------------------------------------------------------------------------

/// Dense order-k tensor over R^3, `3^k` entries in row-major order.  Used for
/// non-symmetric intermediates (epsilon-built tensors, covariance blocks) and
/// as the brute-force expansion of [`SymTensor`].
#[derive(Debug, Clone, PartialEq)]
pub struct FullTensor {
    order: usize,
    data: Vec<f64>,
}

impl FullTensor {
    pub fn zeros(order: usize) -> Self {
        FullTensor {
            order,
            data: vec![0.0; 3usize.pow(order as u32)],
        }
    }

    pub fn from_fn(order: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut t = FullTensor::zeros(order);
        let mut idx = vec![0usize; order];
        for flat in 0..t.data.len() {
            decode(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * 3 + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.flat(idx);
        self.data[f] = v;
    }

    pub fn scale(&self, s: f64) -> FullTensor {
        FullTensor {
            order: self.order,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &FullTensor) -> Result<FullTensor> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(FullTensor {
            order: self.order,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn dot(&self, other: &FullTensor) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Average over all index permutations (the symmetrization map).
    pub fn sym_part(&self) -> Result<SymTensor> {
        check_order(self.order)?;
        let perms = permutations(self.order);
        let mut out = SymTensor::zeros(self.order);
        let degrees = multi_degrees(self.order);
        for (pos, &d) in degrees.iter().enumerate() {
            let rep = representative(d);
            let mut acc = 0.0;
            let mut permuted = vec![0usize; self.order];
            for p in &perms {
                for (slot, &src) in p.iter().enumerate() {
                    permuted[slot] = rep[src];
                }
                acc += self.get(&permuted);
            }
            out.comps[pos] = acc / perms.len() as f64;
        }
        Ok(out)
    }
}

fn decode(mut flat: usize, idx: &mut [usize]) {
    for slot in (0..idx.len()).rev() {
        idx[slot] = flat % 3;
        flat /= 3;
    }
}

fn representative(d: MultiDegree) -> Vec<usize> {
    let mut rep = Vec::with_capacity(d.0 + d.1 + d.2);
    rep.extend(std::iter::repeat_n(0usize, d.0));
    rep.extend(std::iter::repeat_n(1usize, d.1));
    rep.extend(std::iter::repeat_n(2usize, d.2));
    rep
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// symmetric tensors, minimal storage
// ---------------------------------------------------------------------------

/// Fully symmetric order-k tensor (k <= 4) in minimal monomial storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    order: usize,
    comps: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(order: usize) -> Self {
        let n = multi_degrees(order).len();
        SymTensor {
            order,
            comps: vec![0.0; n],
        }
    }

    pub fn scalar(v: f64) -> Self {
        SymTensor {
            order: 0,
            comps: vec![v],
        }
    }

    /// The order-2 Kronecker delta.
    pub fn identity() -> Self {
        let mut t = SymTensor::zeros(2);
        t.set_comp((2, 0, 0), 1.0);
        t.set_comp((0, 2, 0), 1.0);
        t.set_comp((0, 0, 2), 1.0);
        t
    }

    /// The symmetrized square of the identity, order 4.
    pub fn identity_sq() -> Self {
        SymTensor::identity().sym_product(&SymTensor::identity())
    }

    /// Reference axis `i` (0-based) as an order-1 tensor.
    pub fn basis_vector(i: usize) -> Self {
        let mut t = SymTensor::zeros(1);
        t.comps[degree_index(
            1,
            match i {
                0 => (1, 0, 0),
                1 => (0, 1, 0),
                _ => (0, 0, 1),
            },
        )] = 1.0;
        t
    }

    /// Symmetrized monomial `e1^k1 e2^k2 e3^k3`.
    pub fn monomial(d: MultiDegree) -> Self {
        let order = d.0 + d.1 + d.2;
        let mut t = SymTensor::zeros(order);
        t.set_comp(d, 1.0 / multiplicity(d));
        t
    }

    pub fn from_vec3(v: [f64; 3]) -> Self {
        let mut t = SymTensor::zeros(1);
        t.comps = v.to_vec();
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn comp(&self, d: MultiDegree) -> f64 {
        self.comps[degree_index(self.order, d)]
    }

    pub fn set_comp(&mut self, d: MultiDegree, v: f64) {
        let idx = degree_index(self.order, d);
        self.comps[idx] = v;
    }

    /// Component at an arbitrary index tuple.
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.comp(degree_of(idx))
    }

    pub fn is_nan(&self) -> bool {
        self.comps.iter().any(|x| x.is_nan())
    }

    pub fn add(&self, other: &SymTensor) -> SymTensor {
        assert_eq!(self.order, other.order, "tensor order mismatch");
        SymTensor {
            order: self.order,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> SymTensor {
        SymTensor {
            order: self.order,
            comps: self.comps.iter().map(|x| x * s).collect(),
        }
    }

    /// Full contraction; equals the dot of the dense expansions.
    pub fn dot(&self, other: &SymTensor) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let degrees = multi_degrees(self.order);
        Ok(degrees
            .iter()
            .enumerate()
            .map(|(pos, &d)| multiplicity(d) * self.comps[pos] * other.comps[pos])
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).expect("same order").sqrt()
    }

    /// Symmetrized tensor product.
    pub fn sym_product(&self, other: &SymTensor) -> SymTensor {
        let p = self.order;
        let q = other.order;
        let mut out = SymTensor::zeros(p + q);
        let norm = binomial(p + q, p);
        for (pos, &m) in multi_degrees(p + q).iter().enumerate() {
            let mut acc = 0.0;
            for &a in &multi_degrees_bounded(p, m) {
                let b = (m.0 - a.0, m.1 - a.1, m.2 - a.2);
                let ways = binomial(m.0, a.0) * binomial(m.1, a.1) * binomial(m.2, a.2);
                acc += ways * self.comp(a) * other.comp(b);
            }
            out.comps[pos] = acc / norm;
        }
        out
    }

    /// Contraction of one index pair (well defined for symmetric tensors).
    pub fn trace(&self) -> SymTensor {
        assert!(self.order >= 2, "trace needs order >= 2");
        let mut out = SymTensor::zeros(self.order - 2);
        for (pos, &d) in multi_degrees(self.order - 2).iter().enumerate() {
            out.comps[pos] = self.comp((d.0 + 2, d.1, d.2))
                + self.comp((d.0, d.1 + 2, d.2))
                + self.comp((d.0, d.1, d.2 + 2));
        }
        out
    }

    /// Orthogonal projection onto symmetric traceless tensors.  Orders 0 and 1
    /// pass through unchanged.
    pub fn traceless_part(&self) -> SymTracelessTensor {
        let t = match self.order {
            0 | 1 => self.clone(),
            2 => {
                let s = self.trace().comps[0];
                self.sub(&SymTensor::identity().scale(s / 3.0))
            }
            3 => {
                let v = self.trace().scale(3.0 / 5.0);
                self.sub(&SymTensor::identity().sym_product(&v))
            }
            4 => {
                let w = self.trace();
                let v = w
                    .scale(6.0 / 7.0)
                    .sub(&SymTensor::identity().scale(3.0 / 35.0 * w.trace().comps[0]));
                self.sub(&SymTensor::identity().sym_product(&v))
            }
            o => panic!("unsupported tensor order {o}"),
        };
        SymTracelessTensor(t)
    }

    /// Rotates the tensor: components transform covariantly.
    pub fn rotate(&self, r: &Rotation) -> SymTensor {
        if self.order == 0 {
            return self.clone();
        }
        let full = self.expand();
        let mut out = SymTensor::zeros(self.order);
        let mut src = vec![0usize; self.order];
        for (pos, &d) in multi_degrees(self.order).iter().enumerate() {
            let rep = representative(d);
            let mut acc = 0.0;
            for flat in 0..full.data.len() {
                decode(flat, &mut src);
                let mut w = full.data[flat];
                if w == 0.0 {
                    continue;
                }
                for (slot, &j) in src.iter().enumerate() {
                    w *= r.m[rep[slot]][j];
                }
                acc += w;
            }
            out.comps[pos] = acc;
        }
        out
    }

    /// Dense `3^k` expansion.
    pub fn expand(&self) -> FullTensor {
        FullTensor::from_fn(self.order, |idx| self.get(idx))
    }

    /// Order-2 tensor as a 3x3 matrix.
    pub fn as_matrix(&self) -> Matrix3<f64> {
        assert_eq!(self.order, 2, "as_matrix needs an order-2 tensor");
        Matrix3::from_fn(|i, j| self.get(&[i, j]))
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Result<SymTensor> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut t = SymTensor::zeros(2);
        t.set_comp((2, 0, 0), m[(0, 0)]);
        t.set_comp((0, 2, 0), m[(1, 1)]);
        t.set_comp((0, 0, 2), m[(2, 2)]);
        t.set_comp((1, 1, 0), 0.5 * (m[(0, 1)] + m[(1, 0)]));
        t.set_comp((1, 0, 1), 0.5 * (m[(0, 2)] + m[(2, 0)]));
        t.set_comp((0, 1, 1), 0.5 * (m[(1, 2)] + m[(2, 1)]));
        Ok(t)
    }

    pub fn as_vec3(&self) -> [f64; 3] {
        assert_eq!(self.order, 1, "as_vec3 needs an order-1 tensor");
        [self.comps[0], self.comps[1], self.comps[2]]
    }

    // -- text format: `order; (k1,k2,k3)=coeff; ...` --------------------------

    pub fn to_text(&self) -> String {
        let mut s = format!("{}", self.order);
        for (pos, d) in multi_degrees(self.order).iter().enumerate() {
            s.push_str(&format!(
                "; ({},{},{})={:.17e}",
                d.0, d.1, d.2, self.comps[pos]
            ));
        }
        s
    }

    pub fn from_text(line: &str) -> Result<SymTensor> {
        let mut parts = line.split(';').map(str::trim);
        let order: usize = parts
            .next()
            .ok_or_else(|| Error::Parse("empty tensor line".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad tensor order: {e}")))?;
        check_order(order)?;
        let mut t = SymTensor::zeros(order);
        for part in parts {
            if part.is_empty() {
                continue;
            }
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected (k1,k2,k3)=value, got `{part}`")))?;
            let key = key.trim().trim_start_matches('(').trim_end_matches(')');
            let ks: Vec<usize> = key
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("bad multi-degree `{key}`: {e}")))?;
            if ks.len() != 3 || ks[0] + ks[1] + ks[2] != order {
                return Err(Error::Parse(format!(
                    "multi-degree ({key}) does not sum to order {order}"
                )));
            }
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad coefficient `{val}`: {e}")))?;
            t.set_comp((ks[0], ks[1], ks[2]), v);
        }
        Ok(t)
    }
}

fn multi_degrees_bounded(order: usize, bound: MultiDegree) -> Vec<MultiDegree> {
    multi_degrees(order)
        .into_iter()
        .filter(|d| d.0 <= bound.0 && d.1 <= bound.1 && d.2 <= bound.2)
        .collect()
}

// ---------------------------------------------------------------------------
// symmetric traceless tensors
// ---------------------------------------------------------------------------

/// Fully symmetric tensor whose every pair contraction vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTracelessTensor(SymTensor);

impl SymTracelessTensor {
    /// Validates tracelessness to `1e-12` (relative to the tensor norm).
    pub fn new(t: SymTensor) -> Result<Self> {
        if t.order >= 2 {
            let tr = t.trace().norm();
            if tr > CONSTRUCTION_TOL * (1.0 + t.norm()) {
                return Err(Error::InvalidInput(format!(
                    "tensor is not traceless: |trace| = {tr:.3e}"
                )));
            }
        }
        Ok(SymTracelessTensor(t))
    }

    pub fn zeros(order: usize) -> Self {
        SymTracelessTensor(SymTensor::zeros(order))
    }

    pub fn inner(&self) -> &SymTensor {
        &self.0
    }

    pub fn into_inner(self) -> SymTensor {
        self.0
    }

    pub fn rotate(&self, r: &Rotation) -> SymTracelessTensor {
        SymTracelessTensor(self.0.rotate(r))
    }

    pub fn add(&self, other: &SymTracelessTensor) -> SymTracelessTensor {
        SymTracelessTensor(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &SymTracelessTensor) -> SymTracelessTensor {
        SymTracelessTensor(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: f64) -> SymTracelessTensor {
        SymTracelessTensor(self.0.scale(s))
    }

    /// Coordinates in the orthonormal traceless basis of the same order.
    pub fn coords(&self) -> Vec<f64> {
        traceless_basis(self.0.order)
            .iter()
            .map(|b| self.0.dot(&b.0).expect("same order"))
            .collect()
    }

    pub fn from_coords(order: usize, coords: &[f64]) -> SymTracelessTensor {
        let basis = traceless_basis(order);
        assert_eq!(coords.len(), basis.len(), "coordinate count mismatch");
        let mut t = SymTensor::zeros(order);
        for (c, b) in coords.iter().zip(basis) {
            t = t.add(&b.0.scale(*c));
        }
        SymTracelessTensor(t)
    }

    /// Uniform sample in the coordinate ball of the given radius.
    pub fn random_ball<R: rand::Rng + ?Sized>(
        order: usize,
        radius: f64,
        rng: &mut R,
    ) -> SymTracelessTensor {
        let dim = 2 * order + 1;
        let mut g = Vec::with_capacity(dim);
        while g.len() < dim {
            // Box-Muller
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            let r = (-2.0 * u1.ln()).sqrt();
            g.push(r * (2.0 * PI * u2).cos());
            if g.len() < dim {
                g.push(r * (2.0 * PI * u2).sin());
            }
        }
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let u: f64 = rng.random();
        let scale = radius * u.powf(1.0 / dim as f64) / norm;
        SymTracelessTensor::from_coords(order, &g.iter().map(|x| x * scale).collect::<Vec<_>>())
    }
}

impl std::ops::Deref for SymTracelessTensor {
    type Target = SymTensor;
    fn deref(&self) -> &SymTensor {
        &self.0
    }
}

/// Orthonormal basis of the symmetric traceless subspace (dimension 2k+1).
pub fn traceless_basis(order: usize) -> &'static [SymTracelessTensor] {
    static BASES: LazyLock<Vec<Vec<SymTracelessTensor>>> = LazyLock::new(|| {
        (0..=MAX_ORDER)
            .map(|order| {
                if order == 0 {
                    return vec![SymTracelessTensor(SymTensor::scalar(1.0))];
                }
                let mut basis: Vec<SymTracelessTensor> = Vec::new();
                for d in multi_degrees(order) {
                    let cand = SymTensor::monomial(d).traceless_part();
                    let mut v = cand.0;
                    for b in &basis {
                        let proj = v.dot(&b.0).expect("same order");
                        v = v.sub(&b.0.scale(proj));
                    }
                    let n = v.norm();
                    if n > 1e-8 {
                        basis.push(SymTracelessTensor(v.scale(1.0 / n)));
                    }
                }
                assert_eq!(basis.len(), 2 * order + 1);
                basis
            })
            .collect()
    });
    &BASES[order]
}

// ---------------------------------------------------------------------------
// reshaping maps
// ---------------------------------------------------------------------------

/// 3x5 reshaping of an order-3 tensor.
pub type Psi3Matrix = SMatrix<f64, 3, 5>;
/// 5x5 reshaping of an order-4 tensor; symmetric when the source is fully
/// symmetric.
pub type Psi4Matrix = SMatrix<f64, 5, 5>;

// Contraction patterns shared by the reshaping maps: entry c of the output
// row/column applies pattern c to one index pair of the input.
fn pair_contract(f: impl Fn(usize, usize) -> f64, c: usize) -> f64 {
    match c {
        0 => f(0, 0),
        1 => 0.5 * (f(1, 1) - f(2, 2)),
        2 => f(0, 1),
        3 => f(0, 2),
        _ => f(1, 2),
    }
}

/// 3x5 reshaping of an order-3 tensor.
pub fn psi3(v: &FullTensor) -> Result<Psi3Matrix> {
    if v.order() != 3 {
        return Err(Error::OrderMismatch(v.order(), 3));
    }
    Ok(Psi3Matrix::from_fn(|i, c| {
        pair_contract(|k, l| v.get(&[i, k, l]), c)
    }))
}

/// 5x5 reshaping of an order-4 tensor.
pub fn psi4(v: &FullTensor) -> Result<Psi4Matrix> {
    if v.order() != 4 {
        return Err(Error::OrderMismatch(v.order(), 4));
    }
    Ok(Psi4Matrix::from_fn(|r, c| {
        pair_contract(|i, j| pair_contract(|k, l| v.get(&[i, j, k, l]), c), r)
    }))
}

/// 5-vector of an order-2 symmetric tensor under the same contraction
/// patterns: `(Q11, (Q22-Q33)/2, Q12, Q13, Q23)`.
pub fn pair_vec(q: &SymTensor) -> Result<SVector<f64, 5>> {
    if q.order() != 2 {
        return Err(Error::OrderMismatch(q.order(), 2));
    }
    Ok(SVector::<f64, 5>::from_fn(|c, _| {
        pair_contract(|i, j| q.get(&[i, j]), c)
    }))
}

// ---------------------------------------------------------------------------
// auxiliary epsilon-built tensors
// ---------------------------------------------------------------------------

/// The four auxiliary tensors entering the fourth-order covariance blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxKind {
    /// Order-4 from an order-3 input: `eps_jks T_ils + eps_ils T_jks`.
    A1,
    /// Order-4 from an order-2 input:
    /// `d_kl Q_ij + d_ij Q_kl - 3/4 (d_ik Q_jl + d_jl Q_ik + d_il Q_jk + d_jk Q_il)`.
    A2,
    /// Order-3 from an order-2 input: `eps_ijs Q_ks + eps_iks Q_js`.
    B1,
    /// Order-4 from an order-3 input: `eps_iks M_jls + eps_jls M_iks`.
    B2,
}

pub fn aux_tensor(kind: AuxKind, input: &SymTracelessTensor) -> Result<FullTensor> {
    let expect = match kind {
        AuxKind::A1 | AuxKind::B2 => 3,
        AuxKind::A2 | AuxKind::B1 => 2,
    };
    if input.order() != expect {
        return Err(Error::OrderMismatch(input.order(), expect));
    }
    let t = input.inner();
    let out = match kind {
        AuxKind::A1 => FullTensor::from_fn(4, |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            (0..3)
                .map(|s| {
                    levi_civita(j, k, s) * t.get(&[i, l, s])
                        + levi_civita(i, l, s) * t.get(&[j, k, s])
                })
                .sum()
        }),
        AuxKind::A2 => FullTensor::from_fn(4, |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            kron(k, l) * t.get(&[i, j]) + kron(i, j) * t.get(&[k, l])
                - 0.75
                    * (kron(i, k) * t.get(&[j, l])
                        + kron(j, l) * t.get(&[i, k])
                        + kron(i, l) * t.get(&[j, k])
                        + kron(j, k) * t.get(&[i, l]))
        }),
        AuxKind::B1 => FullTensor::from_fn(3, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            (0..3)
                .map(|s| {
                    levi_civita(i, j, s) * t.get(&[k, s]) + levi_civita(i, k, s) * t.get(&[j, s])
                })
                .sum()
        }),
        AuxKind::B2 => FullTensor::from_fn(4, |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            (0..3)
                .map(|s| {
                    levi_civita(i, k, s) * t.get(&[j, l, s])
                        + levi_civita(j, l, s) * t.get(&[i, k, s])
                })
                .sum()
        }),
    };
    Ok(out)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(order: usize, rng: &mut ChaCha8Rng) -> SymTensor {
        let mut t = SymTensor::zeros(order);
        for d in multi_degrees(order) {
            t.set_comp(d, rng.random::<f64>() * 2.0 - 1.0);
        }
        t
    }

    #[test]
    fn euler_identity() {
        let r = Rotation::from_euler(EulerAngles::new(0.0, 0.0, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(r.entry(i, j), kron(i, j), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn euler_third_angle_is_first_axis_spin() {
        // (0,0,theta) must reproduce the rotation about the first body axis
        let theta = 0.7313;
        let r = Rotation::from_euler(EulerAngles::new(0.0, 0.0, theta));
        let j = Rotation::about_first_axis(theta);
        for i in 0..3 {
            for k in 0..3 {
                assert_abs_diff_eq!(r.entry(i, k), j.entry(i, k), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn euler_half_pi_first_axis() {
        // alpha = pi/2, beta = gamma = 0: first column becomes (0,1,0)
        let r = Rotation::from_euler(EulerAngles::new(PI / 2.0, 0.0, 0.0));
        let m1 = r.axis(0);
        assert_abs_diff_eq!(m1[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m1[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m1[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn euler_wrapping_preserves_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = rng.random::<f64>() * 20.0 - 10.0;
            let b = rng.random::<f64>() * 20.0 - 10.0;
            let g = rng.random::<f64>() * 20.0 - 10.0;
            let wrapped = EulerAngles::new(a, b, g);
            assert!((0.0..=PI).contains(&wrapped.alpha));
            assert!((0.0..2.0 * PI).contains(&wrapped.beta));
            assert!((0.0..2.0 * PI).contains(&wrapped.gamma));
            let r1 = Rotation::from_euler(EulerAngles {
                alpha: a,
                beta: b,
                gamma: g,
            });
            let r2 = Rotation::from_euler(wrapped);
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(r1.entry(i, j), r2.entry(i, j), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_rotation_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let r = Rotation::random(&mut rng);
            Rotation::from_matrix([
                [r.entry(0, 0), r.entry(0, 1), r.entry(0, 2)],
                [r.entry(1, 0), r.entry(1, 1), r.entry(1, 2)],
                [r.entry(2, 0), r.entry(2, 1), r.entry(2, 2)],
            ])
            .expect("random rotation must validate");
        }
    }

    #[test]
    fn rotate_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for order in 0..=4 {
            let t = random_sym(order, &mut rng);
            let r = t.rotate(&Rotation::identity());
            for (a, b) in t.comps.iter().zip(&r.comps) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rotate_isotropic_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let id = SymTensor::identity();
        let id2 = SymTensor::identity_sq();
        for _ in 0..10 {
            let p = Rotation::random(&mut rng);
            assert!(id.rotate(&p).sub(&id).norm() < 1e-13);
            assert!(id2.rotate(&p).sub(&id2).norm() < 1e-13);
        }
    }

    #[test]
    fn rotation_preserves_dot() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let order = 1 + (rng.random::<f64>() * 4.0) as usize % 4;
            let u = random_sym(order, &mut rng);
            let v = random_sym(order, &mut rng);
            let p = Rotation::random(&mut rng);
            let lhs = u.rotate(&p).dot(&v.rotate(&p)).unwrap();
            let rhs = u.dot(&v).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn sym_part_fixed_point_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // already-symmetric input maps to itself
        let s = random_sym(3, &mut rng);
        let back = s.expand().sym_part().unwrap();
        assert!(s.sub(&back).norm() < 1e-13);

        // e1 (x) e2 symmetrizes to the monomial e1 e2
        let mut raw = FullTensor::zeros(2);
        raw.set(&[0, 1], 1.0);
        let sym = raw.sym_part().unwrap();
        let expected = SymTensor::monomial((1, 1, 0));
        assert!(sym.sub(&expected).norm() < 1e-15);
        assert_abs_diff_eq!(sym.get(&[0, 1]), 0.5, epsilon = 1e-15);

        // antisymmetric input lies in the kernel
        let mut anti = FullTensor::zeros(2);
        anti.set(&[0, 1], 1.0);
        anti.set(&[1, 0], -1.0);
        assert!(anti.sym_part().unwrap().norm() < 1e-15);
    }

    #[test]
    fn traceless_part_order2() {
        // (e1^2)_0 = e1^2 - id/3
        let t = SymTensor::monomial((2, 0, 0)).traceless_part();
        let expected = SymTensor::monomial((2, 0, 0)).sub(&SymTensor::identity().scale(1.0 / 3.0));
        assert!(t.inner().sub(&expected).norm() < 1e-15);
    }

    #[test]
    fn traceless_part_order4() {
        // (e1^4)_0 = e1^4 - 6/7 e1^2 id + 3/35 id^2
        let t = SymTensor::monomial((4, 0, 0)).traceless_part();
        let expected = SymTensor::monomial((4, 0, 0))
            .sub(
                &SymTensor::monomial((2, 0, 0))
                    .sym_product(&SymTensor::identity())
                    .scale(6.0 / 7.0),
            )
            .add(&SymTensor::identity_sq().scale(3.0 / 35.0));
        assert!(t.inner().sub(&expected).norm() < 1e-14);

        // id^2 is pure trace
        assert!(SymTensor::identity_sq().traceless_part().norm() < 1e-14);
    }

    #[test]
    fn traceless_part_is_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for order in 2..=4 {
            for _ in 0..20 {
                let t = random_sym(order, &mut rng);
                let once = t.traceless_part();
                let twice = once.inner().traceless_part();
                assert!(once.inner().sub(twice.inner()).norm() <= 1e-12);
                assert!(once.inner().trace().norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn rotate_commutes_with_traceless_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for order in 2..=4 {
            for _ in 0..20 {
                let t = random_sym(order, &mut rng);
                let p = Rotation::random(&mut rng);
                let a = t.rotate(&p).traceless_part();
                let b = t.traceless_part().inner().rotate(&p);
                assert!(a.inner().sub(&b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn dot_examples() {
        let id = SymTensor::identity();
        assert_abs_diff_eq!(id.dot(&id).unwrap(), 3.0, epsilon = 1e-15);

        // |e1^2 - id/3|^2 = 2/3
        let q = SymTensor::monomial((2, 0, 0)).traceless_part();
        assert_abs_diff_eq!(q.dot(q.inner()).unwrap(), 2.0 / 3.0, epsilon = 1e-15);

        assert!(id.dot(&SymTensor::zeros(3)).is_err());
    }

    #[test]
    fn minimal_dot_equals_full_dot() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for order in 0..=4 {
            for _ in 0..20 {
                let u = random_sym(order, &mut rng);
                let v = random_sym(order, &mut rng);
                let minimal = u.dot(&v).unwrap();
                let full = u.expand().dot(&v.expand()).unwrap();
                assert!((minimal - full).abs() <= 1e-12 * (1.0 + full.abs()));
            }
        }
    }

    #[test]
    fn sym_product_matches_full_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (p, q) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 1)] {
            let a = random_sym(p, &mut rng);
            let b = random_sym(q, &mut rng);
            let fast = a.sym_product(&b);
            // oracle: dense outer product then symmetrization
            let fa = a.expand();
            let fb = b.expand();
            let outer = FullTensor::from_fn(p + q, |idx| fa.get(&idx[..p]) * fb.get(&idx[p..]));
            let slow = outer.sym_part().unwrap();
            assert!(fast.sub(&slow).norm() < 1e-13);
        }
    }

    #[test]
    fn psi4_zero_and_octahedral_pattern() {
        let zero = psi4(&FullTensor::zeros(4)).unwrap();
        assert_eq!(zero, SMatrix::<f64, 5, 5>::zeros());

        // t * (e1^2 e2^2 + e2^2 e3^2 + e3^2 e1^2 - id^2/5) has Psi4 =
        // diag(-t/5, -3t/20, t/10, t/10, t/10)
        let t = 0.83;
        let o = SymTensor::monomial((2, 2, 0))
            .add(&SymTensor::monomial((0, 2, 2)))
            .add(&SymTensor::monomial((2, 0, 2)))
            .sub(&SymTensor::identity_sq().scale(0.2))
            .scale(t);
        assert_abs_diff_eq!(o.get(&[0, 0, 0, 0]), -t / 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(o.get(&[0, 0, 1, 1]), t / 10.0, epsilon = 1e-14);
        let m = psi4(&o.expand()).unwrap();
        let expected = [-t / 5.0, -3.0 * t / 20.0, t / 10.0, t / 10.0, t / 10.0];
        for r in 0..5 {
            for c in 0..5 {
                let want = if r == c { expected[r] } else { 0.0 };
                assert_abs_diff_eq!(m[(r, c)], want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn psi3_tetrahedral_pattern() {
        // s * e1 e2 e3 has T_123 = s/6 and Psi3 rows hitting columns 4,3,2
        let s = 1.7;
        let t = SymTensor::monomial((1, 1, 1)).scale(s);
        assert_abs_diff_eq!(t.get(&[0, 1, 2]), s / 6.0, epsilon = 1e-15);
        let m = psi3(&t.expand()).unwrap();
        for i in 0..3 {
            for c in 0..5 {
                let want = match (i, c) {
                    (0, 4) | (1, 3) | (2, 2) => s / 6.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(m[(i, c)], want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn psi4_of_symmetric_tensor_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..30 {
            let t = random_sym(4, &mut rng);
            let m = psi4(&t.expand()).unwrap();
            for r in 0..5 {
                for c in 0..5 {
                    assert!((m[(r, c)] - m[(c, r)]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn aux_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);

        // zeros map to zeros
        let z3 = SymTracelessTensor::zeros(3);
        let z2 = SymTracelessTensor::zeros(2);
        assert!(aux_tensor(AuxKind::A1, &z3)
            .unwrap()
            .data
            .iter()
            .all(|&x| x == 0.0));
        assert!(aux_tensor(AuxKind::A2, &z2)
            .unwrap()
            .data
            .iter()
            .all(|&x| x == 0.0));

        // wrong order rejected
        assert!(aux_tensor(AuxKind::A1, &z2).is_err());
        assert!(aux_tensor(AuxKind::B1, &z3).is_err());

        for _ in 0..10 {
            let q = random_sym(2, &mut rng).traceless_part();
            let t = random_sym(3, &mut rng).traceless_part();

            // A1 is symmetric in the index pairs (i,j) <-> (k,l) for traceless input
            let a1 = aux_tensor(AuxKind::A1, &t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            assert!(
                                (a1.get(&[i, j, k, l]) - a1.get(&[j, i, k, l])).abs() < 1e-12,
                                "A1 pair symmetry"
                            );
                            assert!((a1.get(&[i, j, k, l]) - a1.get(&[i, j, l, k])).abs() < 1e-12);
                        }
                    }
                }
            }

            // B1 single contractions vanish for symmetric traceless input
            let b1 = aux_tensor(AuxKind::B1, &q).unwrap();
            for j in 0..3 {
                let c1: f64 = (0..3).map(|i| b1.get(&[i, j, i])).sum();
                let c2: f64 = (0..3).map(|i| b1.get(&[i, i, j])).sum();
                let c3: f64 = (0..3).map(|i| b1.get(&[j, i, i])).sum();
                assert!(c1.abs() < 1e-12 && c2.abs() < 1e-12 && c3.abs() < 1e-12);
            }

            // A2 against a brute-force index evaluation
            let a2 = aux_tensor(AuxKind::A2, &q).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let want = kron(k, l) * q.get(&[i, j]) + kron(i, j) * q.get(&[k, l])
                                - 0.75
                                    * (kron(i, k) * q.get(&[j, l])
                                        + kron(j, l) * q.get(&[i, k])
                                        + kron(i, l) * q.get(&[j, k])
                                        + kron(j, k) * q.get(&[i, l]));
                            assert_abs_diff_eq!(a2.get(&[i, j, k, l]), want, epsilon = 1e-14);
                        }
                    }
                }
            }
            // A2 is pair-traceless: contracting (i,j) gives 3Q_kl - (3/4)*4 Q_kl = 0
            let tr_ij: f64 = (0..3).map(|i| a2.get(&[i, i, 0, 1])).sum::<f64>();
            assert_abs_diff_eq!(tr_ij, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn traceless_basis_is_orthonormal() {
        for order in 1..=4 {
            let basis = traceless_basis(order);
            assert_eq!(basis.len(), 2 * order + 1);
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let d = a.inner().dot(b.inner()).unwrap();
                    assert!((d - kron(i, j)).abs() < 1e-12);
                }
                if order >= 2 {
                    assert!(a.inner().trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for order in 1..=4 {
            let t = random_sym(order, &mut rng).traceless_part();
            let coords = t.coords();
            let back = SymTracelessTensor::from_coords(order, &coords);
            assert!(t.inner().sub(back.inner()).norm() < 1e-12);
            // norm identity in orthonormal coordinates
            let n2: f64 = coords.iter().map(|c| c * c).sum();
            assert!((n2 - t.inner().dot(t.inner()).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for order in 0..=4 {
            let t = random_sym(order, &mut rng);
            let s = t.to_text();
            let back = SymTensor::from_text(&s).unwrap();
            assert!(t.sub(&back).norm() < 1e-15);
        }
        // sparse input: missing entries default to zero
        let q = SymTensor::from_text("2; (2,0,0)=1.5").unwrap();
        assert_abs_diff_eq!(q.comp((2, 0, 0)), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.comp((0, 2, 0)), 0.0, epsilon = 1e-15);
        // malformed input rejected
        assert!(SymTensor::from_text("2; (1,0,0)=1.0").is_err());
        assert!(SymTensor::from_text("9").is_err());
    }

    #[test]
    fn text_format_golden() {
        // the serialized form is stable for golden-file comparisons
        let golden = "2; (2,0,0)=1.00000000000000000e0; (1,1,0)=0.00000000000000000e0; \
(1,0,1)=0.00000000000000000e0; (0,2,0)=1.00000000000000000e0; \
(0,1,1)=0.00000000000000000e0; (0,0,2)=1.00000000000000000e0";
        assert_eq!(SymTensor::identity().to_text(), golden);
    }
}
