//! Parameter sweeps, phase classification and CSV / plot-script emission.

use crate::error::{Error, Result};
use crate::models::{
    BentCoreModel, D2Model, EnergyLandscape, ModelCoefficients, RTriple, RodModel, ToReducedModel,
};
use crate::optimize::{minimize_multistart, MinimizeOptions, StationaryPoint};
use crate::tensor::SymTracelessTensor;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Phase labels of the lowest-energy minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    Iso,
    N1,
    N2,
    N3,
    Biaxial,
    Tetrahedral,
    Octahedral,
}

impl PhaseLabel {
    pub fn parse(s: &str) -> Result<PhaseLabel> {
        Ok(match s {
            "Iso" => PhaseLabel::Iso,
            "N1" => PhaseLabel::N1,
            "N2" => PhaseLabel::N2,
            "N3" => PhaseLabel::N3,
            "Biaxial" => PhaseLabel::Biaxial,
            "Tetrahedral" => PhaseLabel::Tetrahedral,
            "Octahedral" => PhaseLabel::Octahedral,
            other => return Err(Error::Parse(format!("unknown phase label `{other}`"))),
        })
    }

    /// Symmetry rank used to break energy ties toward the more symmetric
    /// label (lower is more symmetric).
    fn symmetry_rank(&self) -> u8 {
        match self {
            PhaseLabel::Iso => 0,
            PhaseLabel::Octahedral => 1,
            PhaseLabel::Tetrahedral => 2,
            PhaseLabel::N1 | PhaseLabel::N2 | PhaseLabel::N3 => 3,
            PhaseLabel::Biaxial => 4,
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhaseLabel::Iso => "Iso",
            PhaseLabel::N1 => "N1",
            PhaseLabel::N2 => "N2",
            PhaseLabel::N3 => "N3",
            PhaseLabel::Biaxial => "Biaxial",
            PhaseLabel::Tetrahedral => "Tetrahedral",
            PhaseLabel::Octahedral => "Octahedral",
        };
        f.write_str(s)
    }
}

/// Rotation-invariant summary of a minimizer, input of the classification.
#[derive(Debug, Clone)]
pub enum MinimizerSummary {
    /// Sorted eigenvalues of the three second-moment tensors.
    Triple(RTriple),
    /// Reduced tetrahedral coordinates.
    ReducedPair { s: f64, t: f64 },
}

impl MinimizerSummary {
    /// Flat invariant values for CSV emission.
    pub fn invariants(&self) -> Vec<f64> {
        match self {
            MinimizerSummary::Triple(t) => t.sorted_eigenvalues().concat(),
            MinimizerSummary::ReducedPair { s, t } => vec![*s, *t],
        }
    }
}

/// Classifies a minimizer; the boolean flags an ambiguous configuration that
/// fell back to the isotropic label.
pub fn classify_phase(summary: &MinimizerSummary, tol: f64) -> (PhaseLabel, bool) {
    match summary {
        MinimizerSummary::ReducedPair { s, t } => {
            if s.abs() > tol {
                (PhaseLabel::Tetrahedral, false)
            } else if t.abs() > tol {
                (PhaseLabel::Octahedral, false)
            } else {
                (PhaseLabel::Iso, false)
            }
        }
        MinimizerSummary::Triple(triple) => {
            // per-tensor shape: isotropic, uniaxial with an isolated
            // eigenvalue, or biaxial
            let mut distinguished = Vec::new();
            for ev in triple.sorted_eigenvalues() {
                let g01 = ev[1] - ev[0];
                let g12 = ev[2] - ev[1];
                if g01 <= tol && g12 <= tol {
                    distinguished.push(None);
                } else if g01 <= tol {
                    distinguished.push(Some(ev[2]));
                } else if g12 <= tol {
                    distinguished.push(Some(ev[0]));
                } else {
                    return (PhaseLabel::Biaxial, false);
                }
            }
            if distinguished.iter().all(Option::is_none) {
                return (PhaseLabel::Iso, false);
            }
            let above: Vec<usize> = distinguished
                .iter()
                .enumerate()
                .filter(|(_, d)| matches!(d, Some(a) if *a > 1.0 / 3.0 + tol))
                .map(|(i, _)| i)
                .collect();
            match above.as_slice() {
                [0] => (PhaseLabel::N1, false),
                [1] => (PhaseLabel::N2, false),
                [2] => (PhaseLabel::N3, false),
                _ => (PhaseLabel::Iso, true),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// sweep specification
// ---------------------------------------------------------------------------

/// Model families available to the sweep engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    Rod,
    D2,
    BentCore,
    ToReduced,
}

impl ModelFamily {
    pub fn parse(s: &str) -> Result<ModelFamily> {
        match s.to_ascii_lowercase().as_str() {
            "rod" => Ok(ModelFamily::Rod),
            "d2" => Ok(ModelFamily::D2),
            "bentcore" | "bent-core" => Ok(ModelFamily::BentCore),
            "to-reduced" | "toreduced" => Ok(ModelFamily::ToReduced),
            other => Err(Error::Parse(format!("unknown model family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Rod => "rod",
            ModelFamily::D2 => "d2",
            ModelFamily::BentCore => "bentcore",
            ModelFamily::ToReduced => "to-reduced",
        }
    }

    pub fn build(&self, coeffs: &ModelCoefficients) -> Box<dyn EnergyLandscape> {
        match self {
            ModelFamily::Rod => Box::new(RodModel {
                coeffs: coeffs.clone(),
            }),
            ModelFamily::D2 => Box::new(D2Model {
                c: [coeffs.c1, coeffs.c2, coeffs.c3],
            }),
            ModelFamily::BentCore => Box::new(BentCoreModel::new(coeffs.clone())),
            ModelFamily::ToReduced => Box::new(ToReducedModel {
                mu1_bar: coeffs.mu1_bar,
                mu2_bar: coeffs.mu2_bar,
            }),
        }
    }

    /// Extracts the classification summary from a stationary point's
    /// coordinates.
    pub fn summary(&self, coords: &[f64]) -> MinimizerSummary {
        match self {
            ModelFamily::Rod => {
                let q2 = SymTracelessTensor::from_coords(2, coords);
                MinimizerSummary::Triple(RTriple::from_order_params(
                    &q2,
                    &SymTracelessTensor::zeros(2),
                ))
            }
            ModelFamily::D2 => {
                let q2 = SymTracelessTensor::from_coords(2, &coords[..5]);
                let m12 = SymTracelessTensor::from_coords(2, &coords[5..]);
                MinimizerSummary::Triple(RTriple::from_order_params(&q2, &m12))
            }
            ModelFamily::BentCore => {
                let q2 = SymTracelessTensor::from_coords(2, &coords[3..8]);
                let m12 = SymTracelessTensor::from_coords(2, &coords[8..13]);
                MinimizerSummary::Triple(RTriple::from_order_params(&q2, &m12))
            }
            ModelFamily::ToReduced => MinimizerSummary::ReducedPair {
                s: coords[0],
                t: coords[1],
            },
        }
    }
}

/// One sweep axis: a coefficient key with an inclusive linear range.
#[derive(Debug, Clone)]
pub struct AxisSpec {
    pub key: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(key: &str, min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidInput(format!(
                "axis {key} needs at least 2 steps, got {steps}"
            )));
        }
        Ok(AxisSpec {
            key: key.into(),
            min,
            max,
            steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Sweep specification: the model family, base coefficients (kept as raw
/// pairs so derived couplings are rebuilt consistently at every node), one or
/// two axes, and the per-node minimization options.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: ModelFamily,
    pub base: BTreeMap<String, f64>,
    pub axis1: AxisSpec,
    pub axis2: Option<AxisSpec>,
    pub options: MinimizeOptions,
    pub class_tol: f64,
}

impl SweepSpec {
    /// Parses the flat key=value sweep file.  Axes are written as
    /// `axis1 = key,min,max,steps`; `family` selects the model; `n_starts`,
    /// `seed`, `grad_tol`, `max_iters` and `class_tol` configure the solver;
    /// every other key is a model coefficient.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut family = None;
        let mut axis1 = None;
        let mut axis2 = None;
        let mut options = MinimizeOptions::default();
        let mut class_tol = 1e-4;
        let mut base = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let val = val.trim();
            let parse_f64 = |v: &str| -> Result<f64> {
                v.parse().map_err(|e| {
                    Error::Parse(format!("line {}: bad number `{v}`: {e}", lineno + 1))
                })
            };
            match key {
                "family" => family = Some(ModelFamily::parse(val)?),
                "axis1" | "axis2" => {
                    let parts: Vec<&str> = val.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(Error::Parse(format!(
                            "line {}: axis needs key,min,max,steps",
                            lineno + 1
                        )));
                    }
                    let steps: usize = parts[3].parse().map_err(|e| {
                        Error::Parse(format!("line {}: bad step count: {e}", lineno + 1))
                    })?;
                    let axis =
                        AxisSpec::new(parts[0], parse_f64(parts[1])?, parse_f64(parts[2])?, steps)?;
                    if key == "axis1" {
                        axis1 = Some(axis);
                    } else {
                        axis2 = Some(axis);
                    }
                }
                "n_starts" => options.n_starts = parse_f64(val)? as usize,
                "seed" => options.seed = parse_f64(val)? as u64,
                "grad_tol" => options.grad_tol = parse_f64(val)?,
                "max_iters" => options.max_iters = parse_f64(val)? as usize,
                "class_tol" => class_tol = parse_f64(val)?,
                coeff => {
                    base.insert(coeff.to_string(), parse_f64(val)?);
                }
            }
        }
        Ok(SweepSpec {
            family: family.ok_or_else(|| Error::Parse("sweep file needs a `family` key".into()))?,
            axis1: axis1.ok_or_else(|| Error::Parse("sweep file needs an `axis1` key".into()))?,
            axis2,
            base,
            options,
            class_tol,
        })
    }

    fn node_coefficients(&self, a1: f64, a2: Option<f64>) -> Result<ModelCoefficients> {
        let mut pairs = self.base.clone();
        pairs.insert(self.axis1.key.clone(), a1);
        if let (Some(axis), Some(v)) = (&self.axis2, a2) {
            pairs.insert(axis.key.clone(), v);
        }
        ModelCoefficients::from_pairs(&pairs)
    }
}

/// Node status: converged, converged but ambiguous (labeled isotropic), or
/// failed to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Ok,
    Ambiguous,
    Failed,
}

#[derive(Debug, Clone)]
pub struct PhaseNode {
    pub axis1: f64,
    pub axis2: f64,
    pub label: PhaseLabel,
    pub status: NodeStatus,
    pub energy: f64,
    pub invariants: Vec<f64>,
}

/// Complete labeled grid.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub family: ModelFamily,
    pub axis1_key: String,
    pub axis2_key: String,
    pub nodes: Vec<PhaseNode>,
}

/// Picks the lowest-energy stationary point among the local minimizers
/// (degenerate points with no negative curvature included); ties within
/// `1e-9` break toward the more symmetric label.
fn select_ground_state(
    family: ModelFamily,
    points: &[StationaryPoint],
    tol: f64,
) -> Option<(PhaseLabel, bool, f64, MinimizerSummary)> {
    let candidates: Vec<&StationaryPoint> = points
        .iter()
        .filter(|p| {
            !p.hessian_spectrum
                .iter()
                .any(|&l| l < -crate::optimize::HESSIAN_ZERO_TOL)
        })
        .collect();
    let pool = if candidates.is_empty() {
        points.iter().collect::<Vec<_>>()
    } else {
        candidates
    };
    let best_energy = pool.iter().map(|p| p.energy).fold(f64::INFINITY, f64::min);
    let mut best: Option<(PhaseLabel, bool, f64, MinimizerSummary)> = None;
    for p in pool {
        if p.energy > best_energy + 1e-9 {
            continue;
        }
        let summary = family.summary(&p.coords);
        let (label, ambiguous) = classify_phase(&summary, tol);
        let better = match &best {
            None => true,
            Some((cur, _, _, _)) => label.symmetry_rank() < cur.symmetry_rank(),
        };
        if better {
            best = Some((label, ambiguous, p.energy, summary));
        }
    }
    best
}

/// Runs the sweep: at every grid node the model is minimized from multiple
/// starts, the lowest-energy minimizer is classified, and failures are
/// recorded without aborting the grid.  Nodes are independent work items;
/// the assembly order is fixed by node index.
pub fn sweep(spec: &SweepSpec) -> Result<PhaseDiagram> {
    let a1 = spec.axis1.values();
    let a2 = spec
        .axis2
        .as_ref()
        .map(|a| a.values())
        .unwrap_or_else(|| vec![0.0]);
    let indices: Vec<(usize, usize)> = (0..a2.len())
        .flat_map(|j| (0..a1.len()).map(move |i| (i, j)))
        .collect();
    let nodes: Vec<PhaseNode> = indices
        .par_iter()
        .map(|&(i, j)| {
            let x = a1[i];
            let y = a2[j];
            let failed = |x: f64, y: f64| PhaseNode {
                axis1: x,
                axis2: y,
                label: PhaseLabel::Iso,
                status: NodeStatus::Failed,
                energy: f64::NAN,
                invariants: Vec::new(),
            };
            let Ok(coeffs) = spec.node_coefficients(x, spec.axis2.as_ref().map(|_| y)) else {
                return failed(x, y);
            };
            let model = spec.family.build(&coeffs);
            let mut opts = spec.options;
            opts.seed = spec
                .options
                .seed
                .wrapping_add((j * a1.len() + i) as u64)
                .wrapping_mul(0x9E3779B97F4A7C15);
            let Ok(points) = minimize_multistart(model.as_ref(), &opts) else {
                return failed(x, y);
            };
            match select_ground_state(spec.family, &points, spec.class_tol) {
                Some((label, ambiguous, energy, summary)) => PhaseNode {
                    axis1: x,
                    axis2: y,
                    label,
                    status: if ambiguous {
                        NodeStatus::Ambiguous
                    } else {
                        NodeStatus::Ok
                    },
                    energy,
                    invariants: summary.invariants(),
                },
                None => failed(x, y),
            }
        })
        .collect();
    Ok(PhaseDiagram {
        family: spec.family,
        axis1_key: spec.axis1.key.clone(),
        axis2_key: spec
            .axis2
            .as_ref()
            .map(|a| a.key.clone())
            .unwrap_or_else(|| "-".into()),
        nodes,
    })
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

pub fn csv_string(d: &PhaseDiagram) -> String {
    let width = d
        .nodes
        .iter()
        .map(|n| n.invariants.len())
        .max()
        .unwrap_or(0);
    let mut out = String::from("axis1,axis2,label,energy,flag");
    for k in 0..width {
        out.push_str(&format!(",inv{k}"));
    }
    out.push('\n');
    for n in &d.nodes {
        let label = match n.status {
            NodeStatus::Failed => "FAILED".to_string(),
            _ => n.label.to_string(),
        };
        let flag = match n.status {
            NodeStatus::Ok => "ok",
            NodeStatus::Ambiguous => "ambiguous",
            NodeStatus::Failed => "failed",
        };
        out.push_str(&format!(
            "{:.12e},{:.12e},{label},{:.12e},{flag}",
            n.axis1, n.axis2, n.energy
        ));
        for k in 0..width {
            let v = n.invariants.get(k).copied().unwrap_or(f64::NAN);
            out.push_str(&format!(",{v:.12e}"));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(d: &PhaseDiagram, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(d))?;
    Ok(())
}

/// Minimal CSV reader for round-trip checks: `(axis1, axis2, label)` rows.
pub fn parse_csv_labels(text: &str) -> Result<Vec<(f64, f64, String)>> {
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 5 {
            return Err(Error::Parse(format!("short CSV row: `{line}`")));
        }
        let a1: f64 = cols[0]
            .parse()
            .map_err(|e| Error::Parse(format!("bad axis1 `{}`: {e}", cols[0])))?;
        let a2: f64 = cols[1]
            .parse()
            .map_err(|e| Error::Parse(format!("bad axis2 `{}`: {e}", cols[1])))?;
        if cols[2] != "FAILED" {
            PhaseLabel::parse(cols[2])?;
        }
        rows.push((a1, a2, cols[2].to_string()));
    }
    Ok(rows)
}

/// Self-contained gnuplot script with the labeled grid inlined.
pub fn plot_script_string(d: &PhaseDiagram) -> String {
    let mut out = String::new();
    out.push_str("# gnuplot phase map\n");
    out.push_str(&format!(
        "set title \"{} phase diagram\"\n",
        d.family.name()
    ));
    out.push_str(&format!("set xlabel \"{}\"\n", d.axis1_key));
    out.push_str(&format!("set ylabel \"{}\"\n", d.axis2_key));
    out.push_str("set key outside\n");
    out.push_str("set palette maxcolors 8\n");
    out.push_str(
        "set palette defined (0 'gray80', 1 'royalblue', 2 'forest-green', 3 'dark-orange', \
         4 'purple', 5 'red', 6 'gold', 7 'black')\n",
    );
    out.push_str("set cbrange [-0.5:7.5]\n");
    out.push_str(
        "set cbtics ('Iso' 0, 'N1' 1, 'N2' 2, 'N3' 3, 'Biaxial' 4, 'Tetrahedral' 5, \
         'Octahedral' 6, 'FAILED' 7)\n",
    );
    out.push_str("$DATA << EOD\n");
    for n in &d.nodes {
        let idx = match n.status {
            NodeStatus::Failed => 7,
            _ => match n.label {
                PhaseLabel::Iso => 0,
                PhaseLabel::N1 => 1,
                PhaseLabel::N2 => 2,
                PhaseLabel::N3 => 3,
                PhaseLabel::Biaxial => 4,
                PhaseLabel::Tetrahedral => 5,
                PhaseLabel::Octahedral => 6,
            },
        };
        out.push_str(&format!("{} {} {}\n", n.axis1, n.axis2, idx));
    }
    out.push_str("EOD\n");
    out.push_str("plot $DATA using 1:2:3 with points pt 5 ps 2.4 palette notitle\n");
    out
}

pub fn emit_plot_script(d: &PhaseDiagram, path: &Path) -> Result<()> {
    std::fs::write(path, plot_script_string(d))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn triple_from_diag(a: [f64; 3], b: [f64; 3]) -> RTriple {
        let r1 = Matrix3::from_diagonal(&nalgebra::Vector3::new(a[0], a[1], a[2]));
        let r2 = Matrix3::from_diagonal(&nalgebra::Vector3::new(b[0], b[1], b[2]));
        let r3 = Matrix3::identity() - r1 - r2;
        RTriple::new(r1, r2, r3).unwrap()
    }

    #[test]
    fn classification_rules() {
        let tol = 1e-4;
        let iso = triple_from_diag(
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        );
        assert_eq!(
            classify_phase(&MinimizerSummary::Triple(iso), tol),
            (PhaseLabel::Iso, false)
        );

        // prolate along the first axis: R1 distinguished above 1/3
        let n1 = triple_from_diag([0.6, 0.2, 0.2], [0.2, 0.4, 0.4]);
        assert_eq!(
            classify_phase(&MinimizerSummary::Triple(n1), tol),
            (PhaseLabel::N1, false)
        );

        let biax = triple_from_diag([0.5, 0.3, 0.2], [0.25, 0.35, 0.4]);
        assert_eq!(
            classify_phase(&MinimizerSummary::Triple(biax), tol),
            (PhaseLabel::Biaxial, false)
        );

        assert_eq!(
            classify_phase(&MinimizerSummary::ReducedPair { s: 0.1, t: 0.05 }, tol),
            (PhaseLabel::Tetrahedral, false)
        );
        assert_eq!(
            classify_phase(&MinimizerSummary::ReducedPair { s: 0.0, t: 0.3 }, tol),
            (PhaseLabel::Octahedral, false)
        );
        assert_eq!(
            classify_phase(&MinimizerSummary::ReducedPair { s: 0.0, t: 0.0 }, tol),
            (PhaseLabel::Iso, false)
        );
    }

    #[test]
    fn sweep_spec_parsing() {
        let text = "\
family = to-reduced
axis1 = mu1_bar, 0, 60, 4
axis2 = mu2_bar, 0, 30, 3
n_starts = 6
seed = 42
nu = 1.0
";
        let spec = SweepSpec::from_text(text).unwrap();
        assert_eq!(spec.family, ModelFamily::ToReduced);
        assert_eq!(spec.axis1.values().len(), 4);
        assert_eq!(spec.axis2.as_ref().unwrap().values().len(), 3);
        assert_eq!(spec.options.n_starts, 6);
        assert_eq!(spec.options.seed, 42);

        assert!(SweepSpec::from_text("axis1 = eta,0,1,2").is_err());
        assert!(SweepSpec::from_text("family = rod\naxis1 = eta,0,1,1").is_err());
    }

    #[test]
    fn trivial_grid_csv_round_trip() {
        let spec = SweepSpec::from_text(
            "family = to-reduced\naxis1 = mu1_bar, 0, 30, 2\naxis2 = mu2_bar, 0, 10, 2\nn_starts = 4\nseed = 1\n",
        )
        .unwrap();
        let diagram = sweep(&spec).unwrap();
        assert_eq!(diagram.nodes.len(), 4);
        let csv = csv_string(&diagram);
        assert_eq!(csv.lines().count(), 5);
        let rows = parse_csv_labels(&csv).unwrap();
        assert_eq!(rows.len(), 4);
        for ((a1, a2, label), node) in rows.iter().zip(&diagram.nodes) {
            assert_eq!(*a1, node.axis1);
            assert_eq!(*a2, node.axis2);
            assert_eq!(*label, node.label.to_string());
        }
        let script = plot_script_string(&diagram);
        assert!(script.contains("$DATA << EOD"));
        assert!(script.matches('\n').count() > 10);
    }

    #[test]
    fn failed_nodes_are_reported() {
        let diagram = PhaseDiagram {
            family: ModelFamily::Rod,
            axis1_key: "eta".into(),
            axis2_key: "-".into(),
            nodes: vec![PhaseNode {
                axis1: 1.0,
                axis2: 0.0,
                label: PhaseLabel::Iso,
                status: NodeStatus::Failed,
                energy: f64::NAN,
                invariants: vec![],
            }],
        };
        let csv = csv_string(&diagram);
        assert!(csv.contains("FAILED"));
        let rows = parse_csv_labels(&csv).unwrap();
        assert_eq!(rows[0].2, "FAILED");
    }

    #[test]
    fn rod_sweep_switches_from_isotropic_to_nematic() {
        let spec = SweepSpec::from_text(
            "family = rod\naxis1 = eta, 6.0, 8.0, 5\nnu = 0.5555555555555556\nn_starts = 10\nseed = 2\n",
        )
        .unwrap();
        let diagram = sweep(&spec).unwrap();
        assert_eq!(diagram.nodes.len(), 5);
        assert_eq!(diagram.nodes[0].label, PhaseLabel::Iso);
        assert_eq!(diagram.nodes[4].label, PhaseLabel::N1);
        // labels are monotone along the axis: Iso then N1
        let first_n1 = diagram
            .nodes
            .iter()
            .position(|n| n.label == PhaseLabel::N1)
            .unwrap();
        for n in &diagram.nodes[..first_n1] {
            assert_eq!(n.label, PhaseLabel::Iso);
        }
        for n in &diagram.nodes[first_n1..] {
            assert_eq!(n.label, PhaseLabel::N1);
        }
    }

    #[test]
    fn rod_coexistence_lies_inside_the_critical_window() {
        // global-minimum crossover located by bisection on the two stationary
        // branches; the label switch of the sweep must bracket it
        use crate::models::rod_uniaxial_profile;
        use crate::optimize::{rod_stationary_census, ProfileKind};
        let nu = 5.0 / 9.0;
        let branch_gap = |eta: f64| {
            let chi = eta / nu;
            let census = rod_stationary_census(chi).unwrap();
            let x3 = census
                .entries
                .iter()
                .filter(|e| e.kind == ProfileKind::LocalMin)
                .map(|e| e.x)
                .fold(0.0f64, f64::max);
            let (f_nem, _, _) = rod_uniaxial_profile(x3, chi).unwrap();
            let (f_iso, _, _) = rod_uniaxial_profile(1.0 / 3.0, chi).unwrap();
            f_nem - f_iso
        };
        let mut lo = 7.26; // just above the branch-creation coupling
        let mut hi = 7.4999; // just below the isotropic spinodal
        assert!(branch_gap(lo) > 0.0 && branch_gap(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if branch_gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let eta_co = 0.5 * (lo + hi);
        assert!(7.2 < eta_co && eta_co < 7.5, "coexistence at eta = {eta_co}");

        // the labeled sweep switches within the same window
        let spec = SweepSpec::from_text(
            "family = rod\naxis1 = eta, 7.2, 7.5, 7\nnu = 0.5555555555555556\nn_starts = 8\nseed = 6\n",
        )
        .unwrap();
        let d = sweep(&spec).unwrap();
        let first_n1 = d
            .nodes
            .iter()
            .position(|n| n.label == PhaseLabel::N1)
            .expect("switch inside the window");
        assert!(first_n1 > 0);
        assert!(d.nodes[first_n1 - 1].axis1 <= eta_co && eta_co <= d.nodes[first_n1].axis1);
    }

    #[test]
    fn octahedral_boundary_stable_under_refinement() {
        // 1D slice toward the octahedral transition: halving the step moves
        // the detected boundary by at most one coarse cell
        let base =
            "family = to-reduced\naxis1 = mu2_bar, 18.0, 26.0, {N}\nn_starts = 6\nseed = 9\n";
        let boundary = |steps: usize| -> (f64, f64) {
            let spec = SweepSpec::from_text(&base.replace("{N}", &steps.to_string())).unwrap();
            let d = sweep(&spec).unwrap();
            let idx = d
                .nodes
                .iter()
                .position(|n| n.label == PhaseLabel::Octahedral)
                .expect("transition inside the window");
            assert!(idx > 0, "transition below the window");
            (d.nodes[idx - 1].axis1, d.nodes[idx].axis1)
        };
        let (lo_c, hi_c) = boundary(5);
        let (lo_f, hi_f) = boundary(9);
        // refined bracket must overlap the coarse one
        assert!(hi_f >= lo_c - 1e-12 && lo_f <= hi_c + 1e-12);
        let coarse_cell = hi_c - lo_c;
        assert!(hi_f - lo_f <= 0.5 * coarse_cell + 1e-12);
    }
}
