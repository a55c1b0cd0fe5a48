//! Free-energy models built on the quasi-entropy: rod (full and
//! uniaxial-reduced), two-fold biaxial, bent-core, and tetrahedral /
//! octahedral (full and reduced), each as value + gradient over reduced
//! coordinates.

use crate::error::{Error, Result};
use crate::quasi::{
    self, q4_reduced_st, q4_reduced_st_gradient, quasi_entropy, quasi_entropy_gradient, Group,
    Marginal, OrderParameterSet, QuasiEntropyValue,
};
use crate::tensor::{traceless_basis, SymTensor, SymTracelessTensor};
use nalgebra::Matrix3;
use std::cell::RefCell;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// model coefficients and their flat key=value file format
// ---------------------------------------------------------------------------

/// Coefficients of the free-energy models.  `c1..c3` are the rescaled
/// two-fold couplings `c1 = -eta (c02 - c04)/nu`, `c2 = -eta (c03 - c04)/nu`,
/// `c3 = -eta c04/nu`; `chi = eta/nu`; `mu1_bar = eta mu1 / (6 nu)` and
/// `mu2_bar = 3 eta mu2 / (10 nu)`.  Derived fields are filled in when absent
/// and cross-checked when both parametrizations are supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelCoefficients {
    pub nu: f64,
    pub eta: f64,
    pub c01: f64,
    pub c02: f64,
    pub c03: f64,
    pub c04: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub chi: f64,
    pub mu1_bar: f64,
    pub mu2_bar: f64,
}

impl Default for ModelCoefficients {
    fn default() -> Self {
        ModelCoefficients {
            nu: 5.0 / 9.0,
            eta: 0.0,
            c01: 0.0,
            c02: 0.0,
            c03: 0.0,
            c04: 0.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            mu1: 0.0,
            mu2: 0.0,
            chi: 0.0,
            mu1_bar: 0.0,
            mu2_bar: 0.0,
        }
    }
}

const COEFF_KEYS: [&str; 14] = [
    "nu", "eta", "c01", "c02", "c03", "c04", "c1", "c2", "c3", "mu1", "mu2", "chi", "mu1_bar",
    "mu2_bar",
];

impl ModelCoefficients {
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "nu" => self.nu,
            "eta" => self.eta,
            "c01" => self.c01,
            "c02" => self.c02,
            "c03" => self.c03,
            "c04" => self.c04,
            "c1" => self.c1,
            "c2" => self.c2,
            "c3" => self.c3,
            "mu1" => self.mu1,
            "mu2" => self.mu2,
            "chi" => self.chi,
            "mu1_bar" => self.mu1_bar,
            "mu2_bar" => self.mu2_bar,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, v: f64) -> Result<()> {
        match key {
            "nu" => self.nu = v,
            "eta" => self.eta = v,
            "c01" => self.c01 = v,
            "c02" => self.c02 = v,
            "c03" => self.c03 = v,
            "c04" => self.c04 = v,
            "c1" => self.c1 = v,
            "c2" => self.c2 = v,
            "c3" => self.c3 = v,
            "mu1" => self.mu1 = v,
            "mu2" => self.mu2 = v,
            "chi" => self.chi = v,
            "mu1_bar" => self.mu1_bar = v,
            "mu2_bar" => self.mu2_bar = v,
            other => {
                return Err(Error::Parse(format!(
                    "unknown coefficient key `{other}` (expected one of {})",
                    COEFF_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` text format (a TOML-compatible subset:
    /// one pair per line, `#` comments).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            let v: f64 = val.trim().parse().map_err(|e| {
                Error::Parse(format!(
                    "line {}: bad value `{}`: {e}",
                    lineno + 1,
                    val.trim()
                ))
            })?;
            pairs.insert(key.trim().to_string(), v);
        }
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, f64>) -> Result<Self> {
        let mut c = ModelCoefficients::default();
        for (k, v) in pairs {
            c.set(k, *v)?;
        }
        if c.nu <= 0.0 || c.nu.is_nan() {
            return Err(Error::InvalidInput(format!(
                "nu must be positive, got {}",
                c.nu
            )));
        }
        if c.eta < 0.0 {
            return Err(Error::InvalidInput(format!(
                "eta must be nonnegative, got {}",
                c.eta
            )));
        }
        let has = |k: &str| pairs.contains_key(k);
        let reduced_given = has("c1") || has("c2") || has("c3");
        let raw_given = has("c02") || has("c03") || has("c04");
        if raw_given {
            let derived = c.derived_two_fold();
            if reduced_given {
                for (name, given, want) in [
                    ("c1", c.c1, derived[0]),
                    ("c2", c.c2, derived[1]),
                    ("c3", c.c3, derived[2]),
                ] {
                    if (given - want).abs() > 1e-9 * (1.0 + want.abs()) {
                        return Err(Error::InvalidInput(format!(
                            "{name} = {given} is inconsistent with the derived value {want}"
                        )));
                    }
                }
            } else {
                [c.c1, c.c2, c.c3] = derived;
            }
        }
        if !has("chi") {
            c.chi = c.eta / c.nu;
        }
        if !has("mu1_bar") {
            c.mu1_bar = c.eta * c.mu1 / (6.0 * c.nu);
        }
        if !has("mu2_bar") {
            c.mu2_bar = 3.0 * c.eta * c.mu2 / (10.0 * c.nu);
        }
        Ok(c)
    }

    /// `[c1, c2, c3]` from the raw couplings.
    pub fn derived_two_fold(&self) -> [f64; 3] {
        [
            -self.eta * (self.c02 - self.c04) / self.nu,
            -self.eta * (self.c03 - self.c04) / self.nu,
            -self.eta * self.c04 / self.nu,
        ]
    }

    pub fn to_text(&self) -> String {
        COEFF_KEYS
            .iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap()))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// second-moment triple
// ---------------------------------------------------------------------------

/// The three averaged frame-vector squares: positive definite, unit trace,
/// summing to the identity.
#[derive(Debug, Clone)]
pub struct RTriple {
    r: [Matrix3<f64>; 3],
}

impl RTriple {
    pub fn new(r1: Matrix3<f64>, r2: Matrix3<f64>, r3: Matrix3<f64>) -> Result<Self> {
        let t = RTriple { r: [r1, r2, r3] };
        for (i, m) in t.r.iter().enumerate() {
            if (m.trace() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidInput(format!(
                    "R{} trace {} is not 1",
                    i + 1,
                    m.trace()
                )));
            }
            if sorted_eigenvalues(m)[0] <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "R{} is not positive definite",
                    i + 1
                )));
            }
        }
        let sum = t.r[0] + t.r[1] + t.r[2];
        if (sum - Matrix3::identity()).norm() > 1e-10 {
            return Err(Error::InvalidInput(
                "R1 + R2 + R3 does not sum to the identity".into(),
            ));
        }
        Ok(t)
    }

    /// Built from the two independent traceless tensors.
    pub fn from_order_params(q2: &SymTracelessTensor, m12: &SymTracelessTensor) -> Self {
        let i3 = Matrix3::identity() / 3.0;
        let q = q2.as_matrix();
        let m = m12.as_matrix();
        RTriple {
            r: [q + i3, i3 - q / 2.0 + m, i3 - q / 2.0 - m],
        }
    }

    pub fn r(&self, i: usize) -> &Matrix3<f64> {
        &self.r[i]
    }

    /// Inverse of [`RTriple::from_order_params`].
    pub fn to_order_params(&self) -> (SymTracelessTensor, SymTracelessTensor) {
        let i3 = Matrix3::identity() / 3.0;
        let q = SymTensor::from_matrix(&(self.r[0] - i3)).expect("symmetric");
        let m = SymTensor::from_matrix(&((self.r[1] - self.r[2]) / 2.0)).expect("symmetric");
        (
            SymTracelessTensor::new(q).expect("traceless"),
            SymTracelessTensor::new(m).expect("traceless"),
        )
    }

    pub fn sorted_eigenvalues(&self) -> [[f64; 3]; 3] {
        [
            sorted_eigenvalues(&self.r[0]),
            sorted_eigenvalues(&self.r[1]),
            sorted_eigenvalues(&self.r[2]),
        ]
    }
}

pub fn sorted_eigenvalues(m: &Matrix3<f64>) -> [f64; 3] {
    let sym = (m + m.transpose()) * 0.5;
    let ev = sym.symmetric_eigen().eigenvalues;
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

// ---------------------------------------------------------------------------
// rod model
// ---------------------------------------------------------------------------

/// Rod free energy `nu q2(Q) - (eta/2) |Q|^2`.
pub fn rod_energy(
    q2: &SymTracelessTensor,
    coeffs: &ModelCoefficients,
) -> Result<QuasiEntropyValue> {
    let params = OrderParameterSet::new(Group::Dinf, vec![q2.clone()])?;
    let q = quasi_entropy(&params)?;
    if !q.in_domain {
        return Ok(QuasiEntropyValue::out_of_domain());
    }
    let norm2 = q2.inner().dot(q2.inner())?;
    Ok(QuasiEntropyValue {
        value: coeffs.nu * q.value - 0.5 * coeffs.eta * norm2,
        in_domain: true,
    })
}

/// Uniaxial profile of the rod energy with `nu` factored out:
/// value, first and second derivatives at `x = <(m1.n)^2>`.
pub fn rod_uniaxial_profile(x: f64, chi: f64) -> Result<(f64, f64, f64)> {
    if x <= 0.0 || x >= 1.0 || x.is_nan() {
        return Err(Error::InvalidInput(format!("x = {x} outside (0, 1)")));
    }
    let f = -x.ln()
        - 4.0 * ((1.0 - x) / 2.0).ln()
        - 4.0 * ((1.0 + x) / 4.0).ln()
        - 0.5 * chi * (x * x + (1.0 - x) * (1.0 - x) / 2.0 - 1.0 / 3.0);
    let fp = (3.0 * x - 1.0) * ((3.0 * x + 1.0) / (x * (1.0 - x * x)) - 0.5 * chi);
    let fpp =
        1.0 / (x * x) + 4.0 / ((1.0 - x) * (1.0 - x)) + 4.0 / ((1.0 + x) * (1.0 + x)) - 1.5 * chi;
    Ok((f, fp, fpp))
}

/// Real root of `6x^3 + 3x^2 = 1`, bisected to `1e-12`.
pub fn rod_branch_root() -> f64 {
    let f = |x: f64| 6.0 * x * x * x + 3.0 * x * x - 1.0;
    let mut lo = 0.3;
    let mut hi = 0.5;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two critical couplings of the uniaxial rod profile:
/// `chi1 = 2 (3x*+1)/(x*(1-x*^2))` at the branch root and `chi2 = 27/2`.
pub fn critical_chi() -> (f64, f64) {
    let x = rod_branch_root();
    let chi1 = 2.0 * (3.0 * x + 1.0) / (x * (1.0 - x * x));
    (chi1, 13.5)
}

// ---------------------------------------------------------------------------
// two-fold (D2) model
// ---------------------------------------------------------------------------

/// Two-fold free energy per entropy unit:
/// `-sum ln det R_i - (1/2)(c1 |R1|^2 + c2 |R2|^2 + c3 |R3|^2)`, additive
/// constant dropped.
pub fn d2_energy(r: &RTriple, c: [f64; 3]) -> QuasiEntropyValue {
    let mut value = 0.0;
    for i in 0..3 {
        let ev = sorted_eigenvalues(r.r(i));
        if ev[0] <= 0.0 {
            return QuasiEntropyValue::out_of_domain();
        }
        value -= r.r(i).determinant().ln();
        value -= 0.5 * c[i] * frob2(r.r(i));
    }
    QuasiEntropyValue {
        value,
        in_domain: true,
    }
}

fn frob2(m: &Matrix3<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    s
}

// ---------------------------------------------------------------------------
// bent-core model
// ---------------------------------------------------------------------------

/// Bent-core free energy over `(q1, q2, m12)`:
/// `nu q2(q1, q2, m12) + (eta/2)(c01 |q1|^2 + c02 |R1|^2 + c03 |R2|^2 +
/// 2 c04 R1.R2)`, with the quasi-entropy marginalized over the second mixed
/// tensor.
pub fn bentcore_energy(
    q1: &SymTracelessTensor,
    q2: &SymTracelessTensor,
    m12: &SymTracelessTensor,
    coeffs: &ModelCoefficients,
) -> Result<QuasiEntropyValue> {
    let fixed = OrderParameterSet::new(
        Group::C2,
        vec![
            q1.clone(),
            q2.clone(),
            m12.clone(),
            SymTracelessTensor::zeros(2),
        ],
    )?;
    let marginal = quasi::quasi_entropy_marginal(Marginal::C2OverM22, &fixed)?;
    if !marginal.value.in_domain {
        return Ok(QuasiEntropyValue::out_of_domain());
    }
    Ok(QuasiEntropyValue {
        value: coeffs.nu * marginal.value.value + bentcore_quadratic(q1, q2, m12, coeffs)?,
        in_domain: true,
    })
}

fn bentcore_quadratic(
    q1: &SymTracelessTensor,
    q2: &SymTracelessTensor,
    m12: &SymTracelessTensor,
    coeffs: &ModelCoefficients,
) -> Result<f64> {
    let triple = RTriple::from_order_params(q2, m12);
    let r1 = triple.r(0);
    let r2 = triple.r(1);
    let mut dot12 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            dot12 += r1[(i, j)] * r2[(i, j)];
        }
    }
    Ok(0.5
        * coeffs.eta
        * (coeffs.c01 * q1.inner().dot(q1.inner())?
            + coeffs.c02 * frob2(r1)
            + coeffs.c03 * frob2(r2)
            + 2.0 * coeffs.c04 * dot12))
}

// ---------------------------------------------------------------------------
// tetrahedral / octahedral models
// ---------------------------------------------------------------------------

/// Full tetrahedral free energy
/// `nu q4(T, O) - (eta/2)(mu1 |T|^2 + mu2 |O|^2)`.
pub fn to_energy(
    t3: &SymTracelessTensor,
    o4: &SymTracelessTensor,
    coeffs: &ModelCoefficients,
) -> Result<QuasiEntropyValue> {
    let params = OrderParameterSet::new(Group::T, vec![t3.clone(), o4.clone()])?;
    let q = quasi_entropy(&params)?;
    if !q.in_domain {
        return Ok(QuasiEntropyValue::out_of_domain());
    }
    let value = coeffs.nu * q.value
        - 0.5
            * coeffs.eta
            * (coeffs.mu1 * t3.inner().dot(t3.inner())?
                + coeffs.mu2 * o4.inner().dot(o4.inner())?);
    Ok(QuasiEntropyValue {
        value,
        in_domain: true,
    })
}

/// Reduced tetrahedral free energy per entropy unit, in the rescaled
/// couplings: `q4(s,t) - (mu1_bar/2) s^2 - (mu2_bar/2) t^2`.
pub fn to_reduced_energy(s: f64, t: f64, mu1_bar: f64, mu2_bar: f64) -> QuasiEntropyValue {
    let q = q4_reduced_st(s, t);
    if !q.in_domain {
        return QuasiEntropyValue::out_of_domain();
    }
    QuasiEntropyValue {
        value: q.value - 0.5 * mu1_bar * s * s - 0.5 * mu2_bar * t * t,
        in_domain: true,
    }
}

// ---------------------------------------------------------------------------
// minimizable landscapes
// ---------------------------------------------------------------------------

/// A free-energy landscape over flat coordinates, ready for multi-start
/// minimization.  `energy`/`gradient` return `None` outside the barrier
/// domain.
pub trait EnergyLandscape {
    fn label(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn energy(&self, x: &[f64]) -> Option<f64>;
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>>;
    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
    /// Rotation-invariant summary used to deduplicate stationary points.
    fn fingerprint(&self, x: &[f64]) -> Vec<f64>;
}

fn simplex_q2_start(rng: &mut dyn rand::RngCore) -> SymTracelessTensor {
    use rand::Rng;
    // eigenvalues uniform on the open simplex, frame from a random rotation
    let mut u = [rng.random::<f64>(), rng.random::<f64>()];
    if u[0] > u[1] {
        u.swap(0, 1);
    }
    let ev = [u[0], u[1] - u[0], 1.0 - u[1]];
    let rot = crate::tensor::Rotation::random(rng).matrix();
    let diag = Matrix3::from_diagonal(&nalgebra::Vector3::new(ev[0], ev[1], ev[2]));
    let r1 = rot * diag * rot.transpose();
    let q = SymTensor::from_matrix(&(r1 - Matrix3::identity() / 3.0)).expect("symmetric");
    SymTracelessTensor::new(q).expect("traceless")
}

fn project_quadratic(g: &Matrix3<f64>) -> Vec<f64> {
    let gt = SymTensor::from_matrix(&((g + g.transpose()) * 0.5)).expect("symmetric");
    traceless_basis(2)
        .iter()
        .map(|b| gt.dot(b.inner()).expect("order 2"))
        .collect()
}

/// Rod model over the five independent components of the second-order tensor.
pub struct RodModel {
    pub coeffs: ModelCoefficients,
}

impl EnergyLandscape for RodModel {
    fn label(&self) -> &'static str {
        "rod"
    }

    fn dim(&self) -> usize {
        5
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        let q = SymTracelessTensor::from_coords(2, x);
        let v = rod_energy(&q, &self.coeffs).ok()?;
        v.in_domain.then_some(v.value)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let q = SymTracelessTensor::from_coords(2, x);
        let params = OrderParameterSet::new(Group::Dinf, vec![q]).ok()?;
        let gq = quasi_entropy_gradient(&params).ok()?;
        Some(
            gq.iter()
                .zip(x)
                .map(|(g, xi)| self.coeffs.nu * g - self.coeffs.eta * xi)
                .collect(),
        )
    }

    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        simplex_q2_start(rng).coords()
    }

    fn fingerprint(&self, x: &[f64]) -> Vec<f64> {
        let q = SymTracelessTensor::from_coords(2, x);
        sorted_eigenvalues(&q.as_matrix()).to_vec()
    }
}

/// Two-fold model over the ten independent components `(q2, m12)`, per
/// entropy unit.
pub struct D2Model {
    pub c: [f64; 3],
}

impl D2Model {
    fn split(x: &[f64]) -> (SymTracelessTensor, SymTracelessTensor) {
        (
            SymTracelessTensor::from_coords(2, &x[..5]),
            SymTracelessTensor::from_coords(2, &x[5..]),
        )
    }

    pub fn triple(x: &[f64]) -> RTriple {
        let (q2, m12) = Self::split(x);
        RTriple::from_order_params(&q2, &m12)
    }
}

impl EnergyLandscape for D2Model {
    fn label(&self) -> &'static str {
        "d2"
    }

    fn dim(&self) -> usize {
        10
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        let v = d2_energy(&Self::triple(x), self.c);
        v.in_domain.then_some(v.value)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (q2, m12) = Self::split(x);
        let params = OrderParameterSet::new(Group::D2, vec![q2, m12]).ok()?;
        let gq = quasi_entropy_gradient(&params).ok()?;
        let triple = Self::triple(x);
        let [c1, c2, c3] = self.c;
        let gq2 = project_quadratic(
            &(-c1 * triple.r(0) + 0.5 * c2 * triple.r(1) + 0.5 * c3 * triple.r(2)),
        );
        let gm12 = project_quadratic(&(-c2 * triple.r(1) + c3 * triple.r(2)));
        let quad: Vec<f64> = gq2.into_iter().chain(gm12).collect();
        Some(gq.iter().zip(&quad).map(|(a, b)| a + b).collect())
    }

    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        use rand::Rng;
        for _ in 0..100 {
            let q2 = simplex_q2_start(rng);
            let radius = 0.3 * rng.random::<f64>();
            let m12 = SymTracelessTensor::random_ball(2, radius, rng);
            let x: Vec<f64> = q2.coords().into_iter().chain(m12.coords()).collect();
            if self.energy(&x).is_some() {
                return x;
            }
        }
        vec![0.0; 10]
    }

    fn fingerprint(&self, x: &[f64]) -> Vec<f64> {
        let triple = Self::triple(x);
        triple.sorted_eigenvalues().concat()
    }
}

/// Bent-core model over the thirteen independent components
/// `(q1, q2, m12)`.  The inner marginal minimizer is warm-started across
/// evaluations; strict convexity keeps the result independent of the start.
pub struct BentCoreModel {
    pub coeffs: ModelCoefficients,
    warm: RefCell<SymTracelessTensor>,
}

impl BentCoreModel {
    pub fn new(coeffs: ModelCoefficients) -> Self {
        BentCoreModel {
            coeffs,
            warm: RefCell::new(SymTracelessTensor::zeros(2)),
        }
    }

    fn split(x: &[f64]) -> (SymTracelessTensor, SymTracelessTensor, SymTracelessTensor) {
        (
            SymTracelessTensor::from_coords(1, &x[..3]),
            SymTracelessTensor::from_coords(2, &x[3..8]),
            SymTracelessTensor::from_coords(2, &x[8..]),
        )
    }

    /// Energy together with the inner minimizer (the completed C2 set).
    fn solve(&self, x: &[f64]) -> Option<(f64, OrderParameterSet)> {
        let (q1, q2, m12) = Self::split(x);
        let fixed = OrderParameterSet::new(
            Group::C2,
            vec![
                q1.clone(),
                q2.clone(),
                m12.clone(),
                SymTracelessTensor::zeros(2),
            ],
        )
        .ok()?;
        let start = self.warm.borrow().clone();
        let res = quasi::quasi_entropy_marginal_from(Marginal::C2OverM22, &fixed, start).ok()?;
        if !res.value.in_domain {
            return None;
        }
        *self.warm.borrow_mut() = res.minimizer.members()[3].clone();
        let quad = bentcore_quadratic(&q1, &q2, &m12, &self.coeffs).ok()?;
        Some((self.coeffs.nu * res.value.value + quad, res.minimizer))
    }
}

impl EnergyLandscape for BentCoreModel {
    fn label(&self) -> &'static str {
        "bentcore"
    }

    fn dim(&self) -> usize {
        13
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        self.solve(x).map(|(v, _)| v)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        // envelope: differentiate with the inner minimizer held fixed
        let (_, completed) = self.solve(x)?;
        let m22 = completed.members()[3].clone();
        let frozen = |y: &[f64]| -> Option<f64> {
            let (q1, q2, m12) = Self::split(y);
            let params = OrderParameterSet::new(
                Group::C2,
                vec![q1.clone(), q2.clone(), m12.clone(), m22.clone()],
            )
            .ok()?;
            let q = quasi_entropy(&params).ok()?;
            if !q.in_domain {
                return None;
            }
            let quad = bentcore_quadratic(&q1, &q2, &m12, &self.coeffs).ok()?;
            Some(self.coeffs.nu * q.value + quad)
        };
        let mut grad = vec![0.0; x.len()];
        let h = 1e-6;
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            grad[i] = (frozen(&xp)? - frozen(&xm)?) / (2.0 * h);
        }
        Some(grad)
    }

    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        use rand::Rng;
        for _ in 0..100 {
            let q1 = SymTracelessTensor::random_ball(1, 0.3, rng);
            let q2 = simplex_q2_start(rng);
            let radius = 0.3 * rng.random::<f64>();
            let m12 = SymTracelessTensor::random_ball(2, radius, rng);
            let x: Vec<f64> = q1
                .coords()
                .into_iter()
                .chain(q2.coords())
                .chain(m12.coords())
                .collect();
            if self.energy(&x).is_some() {
                return x;
            }
        }
        vec![0.0; 13]
    }

    fn fingerprint(&self, x: &[f64]) -> Vec<f64> {
        let (q1, q2, m12) = Self::split(x);
        let triple = RTriple::from_order_params(&q2, &m12);
        let mut f = vec![q1.norm()];
        f.extend(triple.sorted_eigenvalues().concat());
        f
    }
}

/// Reduced tetrahedral/octahedral model over `(s, t)`, per entropy unit.
pub struct ToReducedModel {
    pub mu1_bar: f64,
    pub mu2_bar: f64,
}

impl EnergyLandscape for ToReducedModel {
    fn label(&self) -> &'static str {
        "to-reduced"
    }

    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        let v = to_reduced_energy(x[0], x[1], self.mu1_bar, self.mu2_bar);
        v.in_domain.then_some(v.value)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (ds, dt) = q4_reduced_st_gradient(x[0], x[1])?;
        Some(vec![ds - self.mu1_bar * x[0], dt - self.mu2_bar * x[1]])
    }

    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        use rand::Rng;
        for _ in 0..200 {
            let s = rng.random::<f64>() * 1.1 - 0.55;
            let t = rng.random::<f64>() * 2.2 - 1.25;
            if self.energy(&[s, t]).is_some() {
                return vec![s, t];
            }
        }
        vec![0.0, 0.0]
    }

    fn fingerprint(&self, x: &[f64]) -> Vec<f64> {
        // the energy is even in s, so +s and -s describe the same state
        vec![x[0].abs(), x[1]]
    }
}

/// Full tetrahedral model over the sixteen components `(T, O)`.
pub struct ToFullModel {
    pub coeffs: ModelCoefficients,
}

impl ToFullModel {
    fn split(x: &[f64]) -> (SymTracelessTensor, SymTracelessTensor) {
        (
            SymTracelessTensor::from_coords(3, &x[..7]),
            SymTracelessTensor::from_coords(4, &x[7..]),
        )
    }
}

impl EnergyLandscape for ToFullModel {
    fn label(&self) -> &'static str {
        "to-full"
    }

    fn dim(&self) -> usize {
        16
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        let (t3, o4) = Self::split(x);
        let v = to_energy(&t3, &o4, &self.coeffs).ok()?;
        v.in_domain.then_some(v.value)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (t3, o4) = Self::split(x);
        let params = OrderParameterSet::new(Group::T, vec![t3, o4]).ok()?;
        let gq = quasi_entropy_gradient(&params).ok()?;
        let mut g: Vec<f64> = gq.iter().map(|v| self.coeffs.nu * v).collect();
        for i in 0..7 {
            g[i] -= self.coeffs.eta * self.coeffs.mu1 * x[i];
        }
        for i in 7..16 {
            g[i] -= self.coeffs.eta * self.coeffs.mu2 * x[i];
        }
        Some(g)
    }

    fn random_start(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        for _ in 0..200 {
            let t3 = SymTracelessTensor::random_ball(3, 0.3, rng);
            let o4 = SymTracelessTensor::random_ball(4, 0.3, rng);
            let x: Vec<f64> = t3.coords().into_iter().chain(o4.coords()).collect();
            if self.energy(&x).is_some() {
                return x;
            }
        }
        vec![0.0; 16]
    }

    fn fingerprint(&self, x: &[f64]) -> Vec<f64> {
        let (t3, o4) = Self::split(x);
        vec![t3.norm(), o4.norm()]
    }
}
