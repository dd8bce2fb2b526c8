//! Scenario files: schema, parsing and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use syncsub::Tolerances;

use crate::error::{HarnessError, Result};
use crate::literal::{ClockLit, GroupLit, IrrepLit, MatrixLit, RepLit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Compat,
    Drift,
    Fidelity,
    Kernel,
    Group,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Compat => "compat",
            Self::Drift => "drift",
            Self::Fidelity => "fidelity",
            Self::Kernel => "kernel",
            Self::Group => "group",
        }
    }

    /// Kinds whose report carries a time series (and hence a CSV form).
    pub fn has_series(&self) -> bool {
        matches!(self, Self::Drift | Self::Fidelity)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Joint Hamiltonian on `H_A ⊗ H_B` (or on a single clock's space for
/// compatibility scenarios).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Matrix(MatrixLit),
    /// `H_A ⊗ I + I ⊗ H_B`
    Local {
        a: MatrixLit,
        b: MatrixLit,
    },
    /// `Σ c_k A_k ⊗ B_k`
    Terms(Vec<TermLit>),
    /// Independent random compatible Hamiltonian on each side.
    RandomCompatible {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermLit {
    #[serde(default = "one")]
    pub coeff: f64,
    pub a: MatrixLit,
    pub b: MatrixLit,
}

fn one() -> f64 {
    1.0
}

/// `"random"` or an explicit Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionLit {
    Keyword(String),
    Matrix(MatrixLit),
}

/// `base + strength · V / ‖[V, K]‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationLit {
    pub base: HamiltonianSpec,
    pub direction: DirectionLit,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Explicit amplitudes, or a random unit vector in the kernel of `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateLit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_sample: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedHamiltonian {
    pub name: String,
    pub hamiltonian: HamiltonianSpec,
    /// Expected class (`diagonal`, `block_diagonal`, `incompatible`) for
    /// compatibility scenarios, or expected membership for group scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_dim: Option<usize>,
    /// Whether the whole diagonal isotypic subspace lies in `ker K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contained: Option<bool>,
}

/// Output paths, relative to the scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// Scenario file contents as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,

    // compat
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock: Option<ClockLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonians: Option<Vec<NamedHamiltonian>>,

    // drift / fidelity / kernel
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_a: Option<ClockLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_b: Option<ClockLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    // group
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characters: Option<Vec<IrrepLit>>,
    #[serde(default, alias = "rep", skip_serializing_if = "Option::is_none")]
    pub rep_a: Option<RepLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep_b: Option<RepLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_function_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_function_b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<NamedHamiltonian>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Outputs>,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    /// Defaults overlaid with the scenario's `tolerances` block.
    pub tolerances: Tolerances,
    /// SHA-256 of the scenario text, lowercase hex.
    pub digest: String,
    /// Directory that relative output paths resolve against.
    pub base_dir: Option<PathBuf>,
}

impl Scenario {
    /// Applies a tolerance override on top of the scenario's own values.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        self.tolerances
            .set(name, value)
            .map_err(|e| HarnessError::validation(format!("tolerances.{name}"), e.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn kind(&self) -> Kind {
        self.spec.kind
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let bytes = std::fs::read(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| HarnessError::Parse {
        path: ".".into(),
        line: 0,
        column: 0,
        message: format!("scenario is not UTF-8: {e}"),
    })?;
    let mut s = parse_scenario_str(text)?;
    s.base_dir = path.parent().map(Path::to_path_buf);
    Ok(s)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ScenarioSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let message = inner.to_string();
        let suffix = format!(" at line {line} column {column}");
        HarnessError::Parse {
            path,
            line,
            column,
            message: message
                .strip_suffix(&suffix)
                .unwrap_or(&message)
                .to_string(),
        }
    })?;
    let mut tolerances = Tolerances::default();
    for (name, &value) in spec.tolerances.iter().flatten() {
        tolerances
            .set(name, value)
            .map_err(|e| HarnessError::validation(format!("tolerances.{name}"), e.to_string()))?;
    }
    let scenario = Scenario {
        spec,
        tolerances,
        digest: digest(text.as_bytes()),
        base_dir: None,
    };
    validate(&scenario)?;
    Ok(scenario)
}

fn require<'a, T>(value: &'a Option<T>, field: &str, kind: Kind) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| {
        HarnessError::validation(field, format!("missing field (required for kind '{kind}')"))
    })
}

fn forbid<T>(value: &Option<T>, field: &str, kind: Kind) -> Result<()> {
    match value {
        Some(_) => Err(HarnessError::validation(
            field,
            format!("not used by kind '{kind}'"),
        )),
        None => Ok(()),
    }
}

/// Checks kind-specific fields and builds every deterministic object once
/// so that shape and dimension errors surface before any run.
fn validate(s: &Scenario) -> Result<()> {
    let spec = &s.spec;
    let kind = spec.kind;
    if spec.name.trim().is_empty() {
        return Err(HarnessError::validation("name", "must not be empty"));
    }
    if let Some(p) = &spec.perturbation {
        if !p.strength.is_finite() || p.strength < 0.0 {
            return Err(HarnessError::validation(
                "perturbation.strength",
                format!("must be a finite non-negative number, got {}", p.strength),
            ));
        }
        if let DirectionLit::Keyword(k) = &p.direction {
            if k != "random" {
                return Err(HarnessError::validation(
                    "perturbation.direction",
                    format!("expected \"random\" or a matrix, got \"{k}\""),
                ));
            }
        }
    }
    if let Some(times) = &spec.times {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(HarnessError::validation("times", "non-finite time"));
        }
    }
    if let Some(d) = spec.delta {
        if !d.is_finite() || d <= 0.0 {
            return Err(HarnessError::validation(
                "delta",
                format!("must be positive, got {d}"),
            ));
        }
    }
    if let Some(state) = &spec.initial_state {
        if state.amplitudes.is_some() == state.kernel_sample.is_some() {
            return Err(HarnessError::validation(
                "initial_state",
                "needs exactly one of 'amplitudes' or 'kernel_sample'",
            ));
        }
    }

    match kind {
        Kind::Compat => {
            require(&spec.clock, "clock", kind)?;
            let hs = require(&spec.hamiltonians, "hamiltonians", kind)?;
            if hs.is_empty() {
                return Err(HarnessError::validation("hamiltonians", "list is empty"));
            }
            for (i, h) in hs.iter().enumerate() {
                if let Some(e) = &h.expect {
                    let ok = e
                        .as_str()
                        .and_then(syncsub::clocks::CompatClass::parse)
                        .is_some();
                    if !ok {
                        return Err(HarnessError::validation(
                            format!("hamiltonians[{i}].expect"),
                            "expected one of \"diagonal\", \"block_diagonal\", \"incompatible\"",
                        ));
                    }
                }
            }
            forbid(&spec.perturbation, "perturbation", kind)?;
            forbid(&spec.group, "group", kind)?;
        }
        Kind::Drift | Kind::Fidelity => {
            require(&spec.clock_a, "clock_a", kind)?;
            require(&spec.clock_b, "clock_b", kind)?;
            let times = require(&spec.times, "times", kind)?;
            if times.is_empty() {
                return Err(HarnessError::validation("times", "list is empty"));
            }
            if spec.hamiltonian.is_some() == spec.perturbation.is_some() {
                return Err(HarnessError::validation(
                    "hamiltonian",
                    "needs exactly one of 'hamiltonian' or 'perturbation'",
                ));
            }
            forbid(&spec.group, "group", kind)?;
        }
        Kind::Kernel => {
            require(&spec.clock_a, "clock_a", kind)?;
            require(&spec.clock_b, "clock_b", kind)?;
            if spec.hamiltonian.is_some() && spec.perturbation.is_some() {
                return Err(HarnessError::validation(
                    "hamiltonian",
                    "give at most one of 'hamiltonian' or 'perturbation'",
                ));
            }
            forbid(&spec.group, "group", kind)?;
        }
        Kind::Group => {
            require(&spec.group, "group", kind)?;
            require(&spec.rep_a, "rep_a", kind)?;
            if spec.class_function_b.is_some() && spec.class_function_a.is_none() {
                return Err(HarnessError::validation(
                    "class_function_a",
                    "required when class_function_b is given",
                ));
            }
            if spec.members.is_some() && spec.class_function_a.is_none() {
                return Err(HarnessError::validation(
                    "class_function_a",
                    "required to define K for membership checks",
                ));
            }
            for (i, m) in spec.members.iter().flatten().enumerate() {
                if matches!(m.expect, Some(ref e) if !e.is_boolean()) {
                    return Err(HarnessError::validation(
                        format!("members[{i}].expect"),
                        "expected a boolean",
                    ));
                }
            }
            forbid(&spec.clock_a, "clock_a", kind)?;
            forbid(&spec.perturbation, "perturbation", kind)?;
        }
    }
    crate::run::prepare(s, spec.seed).map(|_| ())
}
