//! Report structure and its CSV, JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::format::{g17, to_json};
use crate::scenario::Kind;

pub const CSV_HEADER: &str = "t,drift,fidelity,bound_drift,bound_fidelity";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub kind: Kind,
    pub library_version: String,
    pub generator: String,
    pub seed: u64,
    /// SHA-256 of the scenario text.
    pub input_digest: String,
    pub tolerances: BTreeMap<String, f64>,
    /// Realized `‖[H, K]‖` when the scenario has a bipartite Hamiltonian.
    pub epsilon: Option<f64>,
    pub verdicts: BTreeMap<String, bool>,
    /// Every verdict holds.
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compat: Option<Vec<CompatRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatRow {
    pub name: String,
    /// `‖[H, T]‖`
    pub residual: f64,
    pub class: String,
    pub off_block_mass: f64,
    pub expected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub t: Vec<f64>,
    pub drift: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `‖(I − Π) ψ(t)‖²`
    pub leakage: Vec<f64>,
    pub bound_drift: Vec<f64>,
    pub bound_fidelity: Vec<f64>,
    pub drift_bound_ok: bool,
    pub fidelity_bound_ok: bool,
    pub max_bound_slack: f64,
    /// `max_t |F(t) + leakage(t) − 1|`
    pub max_normalization_error: f64,
    pub kernel_dim: usize,
    pub delta: Option<f64>,
    /// `δ/ε`; `null` when unbounded.
    pub stability_window: Option<f64>,
    pub window_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSection {
    pub ambient_dim: usize,
    pub dim: usize,
    /// Orthonormal basis vectors as `[re, im]` amplitudes.
    pub basis: Vec<Vec<[f64; 2]>>,
    /// `‖K b‖` per basis vector.
    pub residuals: Vec<f64>,
    pub sync_operator_norm: f64,
    pub preservation_times: Option<Vec<f64>>,
    pub preservation_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSection {
    pub group: String,
    pub order: usize,
    pub class_count: usize,
    pub reps: Vec<RepSection>,
    pub diagonal_subspace: Option<DiagonalSection>,
    pub containment: Option<ContainmentSection>,
    pub members: Vec<MemberRow>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSection {
    pub side: String,
    pub dim: usize,
    pub homomorphism_residual: f64,
    pub unitarity_residual: f64,
    pub identity_residual: f64,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub valid: bool,
    pub multiplicities: Vec<MultiplicityRow>,
    pub isotypic: Option<IsotypicSection>,
    pub commutant_dim: Option<usize>,
    pub schur: Option<SchurSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityRow {
    pub irrep: String,
    pub multiplicity: usize,
    pub rounding_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotypicSection {
    pub completeness_residual: f64,
    pub orthogonality_residual: f64,
    pub idempotence_residual: f64,
    /// `(irrep, rank of P_λ)`
    pub ranks: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurSection {
    pub equivariance_residual: f64,
    pub entries: Vec<SchurRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurRow {
    pub irrep: String,
    pub multiplicity: usize,
    /// Present only for irreps occurring once.
    pub scalar: Option<f64>,
    pub block_eigenvalues: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSection {
    pub dim: usize,
    /// `max_g ‖(I − Π) ρ(g) Π‖` under the joint action.
    pub max_leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentSection {
    pub matched_dim: usize,
    /// Every matched block lies in `ker K`.
    pub contained: bool,
    /// Every shared irrep is matched, so the whole diagonal subspace lies
    /// in `ker K`.
    pub fully_contained: bool,
    pub all_ok: bool,
    pub entries: Vec<ContainmentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentRow {
    pub irrep: String,
    pub alpha: f64,
    pub beta: f64,
    pub gap: f64,
    pub matched: bool,
    pub max_kernel_residual: f64,
    pub max_gap_deviation: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRow {
    pub name: String,
    pub equivariance_residual: f64,
    pub kernel_commutation_residual: f64,
    pub member: bool,
    pub expected: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "text" => Some(Self::Text),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Text => "txt",
        }
    }
}

pub fn emit_report(r: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => emit_csv(r),
        Format::Json => {
            to_json(r).map_err(|e| HarnessError::Output(format!("json serialization failed: {e}")))
        }
        Format::Text => Ok(emit_text(r).into_bytes()),
    }
}

fn emit_csv(r: &Report) -> Result<Vec<u8>> {
    let s = r.series.as_ref().ok_or_else(|| {
        HarnessError::Output(format!(
            "csv output needs a time series; kind '{}' has none",
            r.kind
        ))
    })?;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for i in 0..s.t.len() {
        let row = [
            s.t[i],
            s.drift[i],
            s.fidelity[i],
            s.bound_drift[i],
            s.bound_fidelity[i],
        ];
        let cells: Vec<String> = row.iter().map(|&x| g17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_else(|| "-".into())
}

fn emit_text(r: &Report) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "scenario         {}", r.scenario);
    let _ = writeln!(o, "kind             {}", r.kind);
    let _ = writeln!(o, "library version  {}", r.library_version);
    let _ = writeln!(o, "generator        {} (seed {})", r.generator, r.seed);
    let _ = writeln!(o, "input sha256     {}", r.input_digest);
    let _ = writeln!(o, "epsilon          {}", opt(r.epsilon));
    let _ = writeln!(o, "passed           {}", r.passed);
    let _ = writeln!(o, "\nverdicts");
    for (k, v) in &r.verdicts {
        let _ = writeln!(o, "  {k:<32} {}", if *v { "pass" } else { "FAIL" });
    }
    if let Some(rows) = &r.compat {
        let _ = writeln!(
            o,
            "\n{:<16} {:>24} {:>24}  {:<15} expected",
            "hamiltonian", "residual", "off_block_mass", "class"
        );
        for c in rows {
            let _ = writeln!(
                o,
                "{:<16} {:>24} {:>24}  {:<15} {}",
                c.name,
                g17(c.residual),
                g17(c.off_block_mass),
                c.class,
                c.expected.as_deref().unwrap_or("-")
            );
        }
    }
    if let Some(s) = &r.series {
        let _ = writeln!(
            o,
            "\nkernel dim {}  max bound slack {}  window {}  window drift {}",
            s.kernel_dim,
            g17(s.max_bound_slack),
            opt(s.stability_window),
            opt(s.window_drift)
        );
        let _ = writeln!(
            o,
            "{:>24} {:>24} {:>24} {:>24} {:>24}",
            "t", "drift", "fidelity", "bound_drift", "bound_fidelity"
        );
        for i in 0..s.t.len() {
            let _ = writeln!(
                o,
                "{:>24} {:>24} {:>24} {:>24} {:>24}",
                g17(s.t[i]),
                g17(s.drift[i]),
                g17(s.fidelity[i]),
                g17(s.bound_drift[i]),
                g17(s.bound_fidelity[i])
            );
        }
    }
    if let Some(k) = &r.kernel {
        let _ = writeln!(
            o,
            "\nkernel dim {} of {}  ‖K‖ {}",
            k.dim,
            k.ambient_dim,
            g17(k.sync_operator_norm)
        );
        for (i, (b, res)) in k.basis.iter().zip(&k.residuals).enumerate() {
            let amps: Vec<String> = b
                .iter()
                .map(|[re, im]| format!("({}, {})", g17(*re), g17(*im)))
                .collect();
            let _ = writeln!(o, "  b{i} (‖Kb‖ = {}): [{}]", g17(*res), amps.join(", "));
        }
        if let Some(p) = k.preservation_residual {
            let _ = writeln!(o, "  preservation residual {}", g17(p));
        }
    }
    if let Some(g) = &r.group {
        let _ = writeln!(
            o,
            "\ngroup {} (order {}, {} classes)",
            g.group, g.order, g.class_count
        );
        for rep in &g.reps {
            let _ = writeln!(
                o,
                "  rep {} dim {}: valid {} (hom {}, unit {}, pairs {})",
                rep.side,
                rep.dim,
                rep.valid,
                g17(rep.homomorphism_residual),
                g17(rep.unitarity_residual),
                rep.pairs_checked
            );
            for m in &rep.multiplicities {
                let _ = writeln!(o, "    m({}) = {}", m.irrep, m.multiplicity);
            }
            if let Some(iso) = &rep.isotypic {
                let _ = writeln!(
                    o,
                    "    projectors: completeness {} orthogonality {} idempotence {}",
                    g17(iso.completeness_residual),
                    g17(iso.orthogonality_residual),
                    g17(iso.idempotence_residual)
                );
            }
            if let Some(c) = rep.commutant_dim {
                let _ = writeln!(o, "    commutant dim {c}");
            }
            if let Some(s) = &rep.schur {
                for e in &s.entries {
                    let _ = writeln!(
                        o,
                        "    schur {:<12} scalar {:>24} residual {}",
                        e.irrep,
                        opt(e.scalar),
                        g17(e.residual)
                    );
                }
            }
        }
        if let Some(d) = &g.diagonal_subspace {
            let _ = writeln!(
                o,
                "  diagonal subspace dim {} leakage {}",
                d.dim,
                g17(d.max_leakage)
            );
        }
        if let Some(c) = &g.containment {
            let _ = writeln!(
                o,
                "  containment: matched dim {} contained {} fully {} all ok {}",
                c.matched_dim, c.contained, c.fully_contained, c.all_ok
            );
            for e in &c.entries {
                let _ = writeln!(
                    o,
                    "    {:<12} alpha {:>24} beta {:>24} gap {:>24} max ‖Kb‖ {}",
                    e.irrep,
                    g17(e.alpha),
                    g17(e.beta),
                    g17(e.gap),
                    g17(e.max_kernel_residual)
                );
            }
        }
        for m in &g.members {
            let _ = writeln!(
                o,
                "  member {:<12} {} (equivariance {}, [H,K] {})",
                m.name,
                m.member,
                g17(m.equivariance_residual),
                g17(m.kernel_commutation_residual)
            );
        }
        for n in &g.notes {
            let _ = writeln!(o, "  note: {n}");
        }
    }
    o
}
