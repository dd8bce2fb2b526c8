//! Scenario execution.

use std::collections::BTreeMap;

use log::{debug, info};
use num_complex::Complex64;
use syncsub::clocks::{classify_with, random_compatible, CompatClass};
use syncsub::grouprep::{
    commutant_dimension, diagonal_isotypic_subspace, hsync_membership_with,
    isotypic_projectors_with, multiplicities_with, observable_from_class_function,
    schur_scalars_with, validate_representation, verify_kernel_containment_with,
    IsotypicDecomposition, Representation,
};
use syncsub::opcore::{leakage, operator_norm, projector, tensor_product, CMatrix, Hermitian};
use syncsub::random::{self, GENERATOR_ID};
use syncsub::sync::{
    drift_trace_with, epsilon_compatible, kernel_residuals, preservation_residual,
    sample_kernel_state, stability_window, sync_bundle_with, SyncOperatorBundle,
};
use syncsub::{ClockObservable, SyncSystem, Tolerances};

use crate::error::{HarnessError, Result};
use crate::literal::{build_group, GroupData};
use crate::report::{
    CompatRow, ContainmentRow, ContainmentSection, DiagonalSection, GroupSection, IsotypicSection,
    KernelSection, MemberRow, MultiplicityRow, RepSection, Report, SchurRow, SchurSection, Series,
};
use crate::scenario::{
    DirectionLit, HamiltonianSpec, Kind, NamedHamiltonian, Scenario, ScenarioSpec,
};

/// Fixed stream ids; a nested seed left unset is derived from the scenario
/// seed and its stream, so one top-level seed drives every draw.
const STREAM_COMPATIBLE: u64 = 1;
const STREAM_DIRECTION: u64 = 2;
const STREAM_STATE: u64 = 3;

/// Commutant dimension is solved as a dense `n² × n²` system; skip above this.
const COMMUTANT_MAX_DIM: usize = 12;

fn stream(seed: u64, id: u64) -> u64 {
    seed.wrapping_add(id.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn numerical(context: &str, e: impl ToString) -> HarnessError {
    HarnessError::Numerical {
        context: context.to_string(),
        message: e.to_string(),
    }
}

/// Objects built from a scenario for one seed.
pub(crate) enum Prepared {
    Compat {
        clock: ClockObservable,
        hamiltonians: Vec<(String, Hermitian, Option<CompatClass>)>,
    },
    Bipartite {
        clock_a: ClockObservable,
        clock_b: ClockObservable,
        system: Option<SyncSystem>,
    },
    Group(Box<GroupPrepared>),
}

pub(crate) struct GroupPrepared {
    data: GroupData,
    rho_a: Representation,
    rho_b: Option<Representation>,
    f_a: Option<Vec<f64>>,
    f_b: Option<Vec<f64>>,
    members: Vec<(String, Hermitian, Option<bool>)>,
}

/// Builds a joint Hamiltonian on `C^da ⊗ C^db`.
fn joint_hamiltonian(
    spec: &HamiltonianSpec,
    field: &str,
    (da, db): (usize, usize),
    clocks: Option<(&ClockObservable, &ClockObservable)>,
    seed: u64,
    tol: &Tolerances,
) -> Result<Hermitian> {
    let check_dim = |m: &CMatrix, want: usize, f: &str| {
        if m.dim() == want {
            Ok(())
        } else {
            Err(HarnessError::validation(
                f,
                format!("dimension {} does not match the expected {want}", m.dim()),
            ))
        }
    };
    let m = match spec {
        HamiltonianSpec::Matrix(lit) => {
            let f = format!("{field}.matrix");
            let m = lit.to_matrix(&f)?;
            check_dim(&m, da * db, &f)?;
            m
        }
        HamiltonianSpec::Local { a, b } => {
            let (fa, fb) = (format!("{field}.local.a"), format!("{field}.local.b"));
            let (ma, mb) = (a.to_matrix(&fa)?, b.to_matrix(&fb)?);
            check_dim(&ma, da, &fa)?;
            check_dim(&mb, db, &fb)?;
            &tensor_product(&ma, &CMatrix::identity(db))
                + &tensor_product(&CMatrix::identity(da), &mb)
        }
        HamiltonianSpec::Terms(terms) => {
            if terms.is_empty() {
                return Err(HarnessError::validation(
                    format!("{field}.terms"),
                    "no terms",
                ));
            }
            let mut acc = CMatrix::zeros(da * db, da * db);
            for (i, t) in terms.iter().enumerate() {
                let (fa, fb) = (
                    format!("{field}.terms[{i}].a"),
                    format!("{field}.terms[{i}].b"),
                );
                if !t.coeff.is_finite() {
                    return Err(HarnessError::validation(
                        format!("{field}.terms[{i}].coeff"),
                        "non-finite number",
                    ));
                }
                let (ma, mb) = (t.a.to_matrix(&fa)?, t.b.to_matrix(&fb)?);
                check_dim(&ma, da, &fa)?;
                check_dim(&mb, db, &fb)?;
                acc = &acc + &tensor_product(&ma, &mb).scale_real(t.coeff);
            }
            acc
        }
        HamiltonianSpec::RandomCompatible { seed: own } => {
            let (ca, cb) = clocks.ok_or_else(|| {
                HarnessError::validation(
                    format!("{field}.random_compatible"),
                    "needs clocks; not available for this scenario kind",
                )
            })?;
            let s = own.unwrap_or_else(|| stream(seed, STREAM_COMPATIBLE));
            let ha = random_compatible(ca, s);
            let hb = random_compatible(cb, s.wrapping_add(1));
            return Ok(ha
                .kron(&Hermitian::identity(db))
                .add(&Hermitian::identity(da).kron(&hb))
                .expect("matching dimensions"));
        }
    };
    Hermitian::with_tolerances(m, tol).map_err(|e| HarnessError::from_core(field, e))
}

fn single_hamiltonian(
    spec: &HamiltonianSpec,
    field: &str,
    clock: &ClockObservable,
    seed: u64,
    tol: &Tolerances,
) -> Result<Hermitian> {
    match spec {
        HamiltonianSpec::Matrix(lit) => {
            let f = format!("{field}.matrix");
            let h = lit.to_hermitian(&f, tol)?;
            if h.dim() != clock.dim() {
                return Err(HarnessError::validation(
                    f,
                    format!(
                        "dimension {} does not match the clock dimension {}",
                        h.dim(),
                        clock.dim()
                    ),
                ));
            }
            Ok(h)
        }
        HamiltonianSpec::RandomCompatible { seed: own } => Ok(random_compatible(
            clock,
            own.unwrap_or_else(|| stream(seed, STREAM_COMPATIBLE)),
        )),
        _ => Err(HarnessError::validation(
            field,
            "single-clock scenarios accept only 'matrix' or 'random_compatible'",
        )),
    }
}

fn system_hamiltonian(
    spec: &ScenarioSpec,
    clock_a: &ClockObservable,
    clock_b: &ClockObservable,
    seed: u64,
    tol: &Tolerances,
) -> Result<Option<Hermitian>> {
    let dims = (clock_a.dim(), clock_b.dim());
    let clocks = Some((clock_a, clock_b));
    if let Some(h) = &spec.hamiltonian {
        return joint_hamiltonian(h, "hamiltonian", dims, clocks, seed, tol).map(Some);
    }
    let Some(p) = &spec.perturbation else {
        return Ok(None);
    };
    let base = joint_hamiltonian(&p.base, "perturbation.base", dims, clocks, seed, tol)?;
    let direction = match &p.direction {
        DirectionLit::Matrix(lit) => {
            let d = lit.to_hermitian("perturbation.direction", tol)?;
            if d.dim() != base.dim() {
                return Err(HarnessError::validation(
                    "perturbation.direction",
                    format!(
                        "dimension {} does not match the joint dimension {}",
                        d.dim(),
                        base.dim()
                    ),
                ));
            }
            d
        }
        DirectionLit::Keyword(_) => {
            let s = p.seed.unwrap_or_else(|| stream(seed, STREAM_DIRECTION));
            random::hermitian::<f64>(base.dim(), &mut random::rng(s))
        }
    };
    let k = syncsub::sync::sync_operator(clock_a, clock_b);
    epsilon_compatible(&base, &k, &direction, p.strength)
        .map(Some)
        .map_err(|e| HarnessError::from_core("perturbation", e))
}

fn members(
    list: &[NamedHamiltonian],
    dims: (usize, usize),
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<(String, Hermitian, Option<bool>)>> {
    list.iter()
        .enumerate()
        .map(|(i, m)| {
            let h = joint_hamiltonian(
                &m.hamiltonian,
                &format!("members[{i}].hamiltonian"),
                dims,
                None,
                seed,
                tol,
            )?;
            Ok((
                m.name.clone(),
                h,
                m.expect.as_ref().and_then(|e| e.as_bool()),
            ))
        })
        .collect()
}

pub(crate) fn prepare(s: &Scenario, seed: u64) -> Result<Prepared> {
    let spec = &s.spec;
    let tol = &s.tolerances;
    match spec.kind {
        Kind::Compat => {
            let clock = spec
                .clock
                .as_ref()
                .expect("validated")
                .to_clock("clock", tol)?;
            let hamiltonians = spec
                .hamiltonians
                .as_ref()
                .expect("validated")
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let m = single_hamiltonian(
                        &h.hamiltonian,
                        &format!("hamiltonians[{i}].hamiltonian"),
                        &clock,
                        seed,
                        tol,
                    )?;
                    let expected = h
                        .expect
                        .as_ref()
                        .and_then(|e| e.as_str())
                        .and_then(CompatClass::parse);
                    Ok((h.name.clone(), m, expected))
                })
                .collect::<Result<_>>()?;
            Ok(Prepared::Compat {
                clock,
                hamiltonians,
            })
        }
        Kind::Drift | Kind::Fidelity | Kind::Kernel => {
            let clock_a = spec
                .clock_a
                .as_ref()
                .expect("validated")
                .to_clock("clock_a", tol)?;
            let clock_b = spec
                .clock_b
                .as_ref()
                .expect("validated")
                .to_clock("clock_b", tol)?;
            let system = system_hamiltonian(spec, &clock_a, &clock_b, seed, tol)?
                .map(|h| SyncSystem::new(clock_a.clone(), clock_b.clone(), h))
                .transpose()
                .map_err(|e| HarnessError::from_core("hamiltonian", e))?;
            Ok(Prepared::Bipartite {
                clock_a,
                clock_b,
                system,
            })
        }
        Kind::Group => {
            let data = build_group(
                spec.group.as_ref().expect("validated"),
                spec.characters.as_deref(),
            )?;
            let rho_a = spec
                .rep_a
                .as_ref()
                .expect("validated")
                .to_rep("rep_a", &data.group)?;
            let bipartite =
                spec.rep_b.is_some() || spec.class_function_b.is_some() || spec.members.is_some();
            let rho_b = match &spec.rep_b {
                Some(lit) => Some(lit.to_rep("rep_b", &data.group)?),
                None if bipartite => Some(rho_a.clone()),
                None => None,
            };
            let classes = data.group.class_count();
            for (field, f) in [
                ("class_function_a", &spec.class_function_a),
                ("class_function_b", &spec.class_function_b),
            ] {
                if let Some(f) = f {
                    if f.len() != classes {
                        return Err(HarnessError::validation(
                            field,
                            format!(
                                "expected {classes} values (one per conjugacy class), got {}",
                                f.len()
                            ),
                        ));
                    }
                }
            }
            let f_a = spec.class_function_a.clone();
            let f_b = spec.class_function_b.clone().or_else(|| f_a.clone());
            let members = match (&spec.members, &rho_b) {
                (Some(list), Some(rb)) => members(list, (rho_a.dim(), rb.dim()), seed, tol)?,
                _ => Vec::new(),
            };
            Ok(Prepared::Group(Box::new(GroupPrepared {
                data,
                rho_a,
                rho_b,
                f_a,
                f_b,
                members,
            })))
        }
    }
}

/// Runs a validated scenario. `seed_override` replaces the scenario seed.
pub fn run_scenario(s: &Scenario, seed_override: Option<u64>) -> Result<Report> {
    let seed = seed_override.unwrap_or(s.spec.seed);
    info!(
        "running scenario '{}' ({}, seed {seed})",
        s.name(),
        s.kind()
    );
    let mut report = Report {
        scenario: s.spec.name.clone(),
        kind: s.spec.kind,
        library_version: syncsub::VERSION.to_string(),
        generator: GENERATOR_ID.to_string(),
        seed,
        input_digest: s.digest.clone(),
        tolerances: s
            .tolerances
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        epsilon: None,
        verdicts: BTreeMap::new(),
        passed: true,
        compat: None,
        series: None,
        kernel: None,
        group: None,
    };
    match prepare(s, seed)? {
        Prepared::Compat {
            clock,
            hamiltonians,
        } => run_compat(&mut report, &clock, &hamiltonians, &s.tolerances)?,
        Prepared::Bipartite {
            clock_a,
            clock_b,
            system,
        } => {
            if s.kind() == Kind::Kernel {
                run_kernel(&mut report, s, &clock_a, &clock_b, system.as_ref())?
            } else {
                let system = system.expect("validated: drift scenarios carry a Hamiltonian");
                run_drift(&mut report, s, &system, seed)?
            }
        }
        Prepared::Group(g) => run_group(&mut report, s, *g)?,
    }
    report.passed = report.verdicts.values().all(|&v| v);
    info!("scenario '{}' passed: {}", s.name(), report.passed);
    Ok(report)
}

fn run_compat(
    report: &mut Report,
    clock: &ClockObservable,
    hamiltonians: &[(String, Hermitian, Option<CompatClass>)],
    tol: &Tolerances,
) -> Result<()> {
    let mut rows = Vec::with_capacity(hamiltonians.len());
    for (name, h, expected) in hamiltonians {
        let v = classify_with(h, clock, tol).map_err(|e| numerical(name, e))?;
        debug!("{name}: residual {:e}, class {}", v.residual, v.class);
        if let Some(exp) = expected {
            report
                .verdicts
                .insert(format!("class_{name}"), v.class == *exp);
        }
        rows.push(CompatRow {
            name: name.clone(),
            residual: v.residual,
            class: v.class.to_string(),
            off_block_mass: v.off_block_mass,
            expected: expected.map(|c| c.to_string()),
        });
    }
    report.compat = Some(rows);
    Ok(())
}

fn bundle(system: &SyncSystem, tol: &Tolerances) -> Result<SyncOperatorBundle<f64>> {
    sync_bundle_with(system, tol).map_err(|e| numerical("sync operator", e))
}

fn run_drift(report: &mut Report, s: &Scenario, system: &SyncSystem, seed: u64) -> Result<()> {
    let tol = &s.tolerances;
    let spec = &s.spec;
    let b = bundle(system, tol)?;
    report.epsilon = Some(b.epsilon);
    debug!("kernel dim {}, epsilon {:e}", b.kernel.dim(), b.epsilon);

    let psi0 = match spec
        .initial_state
        .as_ref()
        .and_then(|st| st.amplitudes.as_ref())
    {
        Some(amps) => {
            if amps.len() != system.dim() {
                return Err(HarnessError::validation(
                    "initial_state.amplitudes",
                    format!("expected {} amplitudes, got {}", system.dim(), amps.len()),
                ));
            }
            if amps.iter().flatten().any(|x| !x.is_finite()) {
                return Err(HarnessError::validation(
                    "initial_state.amplitudes",
                    "non-finite number",
                ));
            }
            amps.iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect()
        }
        None => {
            let st = spec
                .initial_state
                .as_ref()
                .and_then(|st| st.kernel_sample)
                .unwrap_or_else(|| stream(seed, STREAM_STATE));
            sample_kernel_state(&b, st).map_err(|e| HarnessError::from_core("initial_state", e))?
        }
    };
    let times = spec.times.as_deref().expect("validated");
    let trace = drift_trace_with(system, &b, &psi0, times, tol).map_err(|e| match e {
        syncsub::Error::NotNormalized { .. } | syncsub::Error::OutsideKernel { .. } => {
            HarnessError::from_core("initial_state", e)
        }
        other => numerical("drift trace", other),
    })?;

    let n = trace.len();
    let bound_drift: Vec<f64> = (0..n).map(|i| trace.drift_bound(i)).collect();
    let bound_fidelity: Vec<f64> = (0..n).map(|i| trace.fidelity_bound(i)).collect();
    let max_normalization_error = (0..n)
        .map(|i| (trace.fidelity[i] + trace.leakage[i] - 1.0).abs())
        .fold(0.0, f64::max);

    let (window, window_drift) = match spec.delta {
        Some(delta) => {
            let w = stability_window(&b, delta).map_err(|e| HarnessError::from_core("delta", e))?;
            if w.is_finite() {
                let at = drift_trace_with(system, &b, &psi0, &[0.9 * w], tol)
                    .map_err(|e| numerical("window", e))?;
                let d = at.drift[0];
                report
                    .verdicts
                    .insert("window_ok".into(), d <= delta + tol.bound_slack);
                (Some(w), Some(d))
            } else {
                report.verdicts.insert("window_ok".into(), true);
                (None, None)
            }
        }
        None => (None, None),
    };

    match s.kind() {
        Kind::Drift => {
            report
                .verdicts
                .insert("drift_bound_ok".into(), trace.drift_bound_ok);
        }
        _ => {
            report
                .verdicts
                .insert("fidelity_bound_ok".into(), trace.fidelity_bound_ok);
            report.verdicts.insert(
                "fidelity_normalization_ok".into(),
                max_normalization_error <= tol.ortho,
            );
        }
    }
    report.series = Some(Series {
        t: trace.times.clone(),
        drift: trace.drift.clone(),
        fidelity: trace.fidelity.clone(),
        leakage: trace.leakage.clone(),
        bound_drift,
        bound_fidelity,
        drift_bound_ok: trace.drift_bound_ok,
        fidelity_bound_ok: trace.fidelity_bound_ok,
        max_bound_slack: trace.max_bound_slack,
        max_normalization_error,
        kernel_dim: b.kernel.dim(),
        delta: spec.delta,
        stability_window: window,
        window_drift,
    });
    Ok(())
}

fn run_kernel(
    report: &mut Report,
    s: &Scenario,
    clock_a: &ClockObservable,
    clock_b: &ClockObservable,
    system: Option<&SyncSystem>,
) -> Result<()> {
    let tol = &s.tolerances;
    // without a Hamiltonian the kernel depends on the clocks alone
    let zero = SyncSystem::new(
        clock_a.clone(),
        clock_b.clone(),
        Hermitian::zeros(clock_a.dim() * clock_b.dim()),
    )
    .expect("matching dimensions");
    let system = system.unwrap_or(&zero);
    let b = bundle(system, tol)?;
    let residuals = kernel_residuals(&b.k, &b.kernel).map_err(|e| numerical("kernel", e))?;
    let k_norm = operator_norm(b.k.matrix());
    let max_res = residuals.iter().copied().fold(0.0, f64::max);
    report.verdicts.insert(
        "kernel_residuals_ok".into(),
        max_res <= tol.kernel * k_norm.max(1.0),
    );
    if let Some(want) = s.spec.expect.as_ref().and_then(|e| e.kernel_dim) {
        report
            .verdicts
            .insert("kernel_dim".into(), b.kernel.dim() == want);
    }

    let has_h = s.spec.hamiltonian.is_some() || s.spec.perturbation.is_some();
    let mut preservation = None;
    if has_h {
        report.epsilon = Some(b.epsilon);
        if let Some(times) = &s.spec.times {
            let p = preservation_residual(system, &b, times)
                .map_err(|e| numerical("preservation", e))?;
            let h_norm = operator_norm(system.hamiltonian().matrix());
            if b.epsilon <= tol.compat * (h_norm * k_norm).max(1.0) {
                report
                    .verdicts
                    .insert("preservation_ok".into(), p <= tol.ortho);
            }
            preservation = Some(p);
        }
    }
    report.kernel = Some(KernelSection {
        ambient_dim: b.kernel.ambient_dim(),
        dim: b.kernel.dim(),
        basis: b
            .kernel
            .vectors()
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        residuals,
        sync_operator_norm: k_norm,
        preservation_times: if has_h { s.spec.times.clone() } else { None },
        preservation_residual: preservation,
    });
    Ok(())
}

struct SideResult {
    section: RepSection,
    decomposition: Option<IsotypicDecomposition<f64>>,
    observable: Option<Hermitian>,
}

fn analyze_side(
    report: &mut Report,
    side: &str,
    rho: &Representation,
    data: &GroupData,
    f: Option<&[f64]>,
    tol: &Tolerances,
) -> Result<SideResult> {
    let v = validate_representation(rho);
    let valid = v.passed();
    report.verdicts.insert(format!("rep_{side}_valid"), valid);
    let mut section = RepSection {
        side: side.to_uppercase(),
        dim: rho.dim(),
        homomorphism_residual: v.homomorphism_residual,
        unitarity_residual: v.unitarity_residual,
        identity_residual: v.identity_residual,
        pairs_checked: v.pairs_checked,
        exhaustive: v.exhaustive,
        valid,
        multiplicities: Vec::new(),
        isotypic: None,
        commutant_dim: None,
        schur: None,
    };
    if !valid {
        return Ok(SideResult {
            section,
            decomposition: None,
            observable: None,
        });
    }
    let ctx = format!("rep_{side}");
    let mults =
        multiplicities_with(rho, &data.chars, tol).map_err(|e| HarnessError::from_core(&ctx, e))?;
    section.multiplicities = mults
        .iter()
        .map(|m| MultiplicityRow {
            irrep: m.irrep.clone(),
            multiplicity: m.multiplicity,
            rounding_error: m.rounding_error,
        })
        .collect();
    let decomp = isotypic_projectors_with(rho, &data.chars, tol)
        .map_err(|e| HarnessError::from_core(&ctx, e))?;
    let iso = IsotypicSection {
        completeness_residual: decomp.completeness_residual(),
        orthogonality_residual: decomp.orthogonality_residual(),
        idempotence_residual: decomp.idempotence_residual(),
        ranks: decomp
            .components
            .iter()
            .map(|c| (c.irrep.clone(), c.isotypic_dim))
            .collect(),
    };
    report.verdicts.insert(
        format!("projectors_{side}_ok"),
        iso.completeness_residual <= tol.ortho
            && iso.orthogonality_residual <= tol.ortho
            && iso.idempotence_residual <= tol.ortho,
    );
    section.isotypic = Some(iso);
    if rho.dim() <= COMMUTANT_MAX_DIM {
        let c = commutant_dimension(rho);
        let expected: usize = mults.iter().map(|m| m.multiplicity * m.multiplicity).sum();
        report
            .verdicts
            .insert(format!("commutant_{side}_ok"), c == expected);
        section.commutant_dim = Some(c);
    }
    let mut observable = None;
    if let Some(f) = f {
        let field = format!("class_function_{side}");
        let t = observable_from_class_function(f, rho)
            .map_err(|e| HarnessError::from_core(&field, e))?;
        let schur = schur_scalars_with(&t, rho, &decomp, tol)
            .map_err(|e| numerical(&format!("schur {side}"), e))?;
        report.verdicts.insert(
            format!("schur_{side}_ok"),
            schur.max_residual() <= tol.schur,
        );
        section.schur = Some(SchurSection {
            equivariance_residual: schur.equivariance_residual,
            entries: schur
                .entries
                .iter()
                .map(|e| SchurRow {
                    irrep: e.irrep.clone(),
                    multiplicity: e.multiplicity,
                    scalar: e.scalar.map(|z| z.re),
                    block_eigenvalues: e.block_eigenvalues.clone(),
                    residual: e.residual,
                })
                .collect(),
        });
        observable = Some(t);
    }
    Ok(SideResult {
        section,
        decomposition: Some(decomp),
        observable,
    })
}

fn run_group(report: &mut Report, s: &Scenario, g: GroupPrepared) -> Result<()> {
    let tol = &s.tolerances;
    let GroupPrepared {
        data,
        rho_a,
        rho_b,
        f_a,
        f_b,
        members,
    } = g;
    let mut section = GroupSection {
        group: data.name.clone(),
        order: data.group.order(),
        class_count: data.group.class_count(),
        reps: Vec::new(),
        diagonal_subspace: None,
        containment: None,
        members: Vec::new(),
        notes: Vec::new(),
    };
    let a = analyze_side(report, "a", &rho_a, &data, f_a.as_deref(), tol)?;
    section.reps.push(a.section.clone());
    let b = match &rho_b {
        Some(rb) => Some(analyze_side(report, "b", rb, &data, f_b.as_deref(), tol)?),
        None => None,
    };
    if let Some(b) = &b {
        section.reps.push(b.section.clone());
    }

    let both_valid =
        a.decomposition.is_some() && b.as_ref().is_some_and(|b| b.decomposition.is_some());
    if let (Some(rb), true) = (&rho_b, both_valid) {
        let b = b.as_ref().expect("present");
        let joint = rho_a
            .tensor(rb)
            .map_err(|e| numerical("joint representation", e))?;
        match diagonal_isotypic_subspace(&rho_a, rb, &data.chars) {
            Ok(kg) => {
                let p = projector(&kg);
                let max_leakage = joint
                    .matrices()
                    .iter()
                    .map(|m| leakage(m, &p))
                    .fold(0.0, f64::max);
                report
                    .verdicts
                    .insert("diagonal_invariant".into(), max_leakage <= tol.ortho);
                section.diagonal_subspace = Some(DiagonalSection {
                    dim: kg.dim(),
                    max_leakage,
                });
                if let (Some(ta), Some(tb)) = (&a.observable, &b.observable) {
                    let c = verify_kernel_containment_with(&rho_a, rb, ta, tb, &data.chars, tol)
                        .map_err(|e| numerical("containment", e))?;
                    let fully = c.contained && c.entries.iter().all(|e| e.matched);
                    report.verdicts.insert("containment_ok".into(), c.all_ok);
                    if let Some(want) = s.spec.expect.as_ref().and_then(|e| e.contained) {
                        report.verdicts.insert("contained".into(), fully == want);
                    }
                    section.containment = Some(ContainmentSection {
                        matched_dim: c.matched_dim,
                        contained: c.contained,
                        fully_contained: fully,
                        all_ok: c.all_ok,
                        entries: c
                            .entries
                            .iter()
                            .map(|e| ContainmentRow {
                                irrep: e.irrep.clone(),
                                alpha: e.alpha.re,
                                beta: e.beta.re,
                                gap: e.gap,
                                matched: e.matched,
                                max_kernel_residual: e.max_kernel_residual,
                                max_gap_deviation: e.max_gap_deviation,
                                ok: e.ok,
                            })
                            .collect(),
                    });
                }
            }
            Err(e @ syncsub::Error::NotMultiplicityFree { .. }) => {
                section
                    .notes
                    .push(format!("diagonal subspace and containment skipped: {e}"));
            }
            Err(e) => return Err(numerical("diagonal subspace", e)),
        }
        if let (Some(ta), Some(tb)) = (&a.observable, &b.observable) {
            let k = ta
                .kron(&Hermitian::identity(rb.dim()))
                .sub(&Hermitian::identity(rho_a.dim()).kron(tb))
                .expect("matching dimensions");
            for (name, h, expected) in &members {
                let m =
                    hsync_membership_with(h, &joint, &k, tol).map_err(|e| numerical(name, e))?;
                if let Some(want) = expected {
                    report
                        .verdicts
                        .insert(format!("member_{name}"), m.member == *want);
                }
                section.members.push(MemberRow {
                    name: name.clone(),
                    equivariance_residual: m.equivariance_residual,
                    kernel_commutation_residual: m.kernel_commutation_residual,
                    member: m.member,
                    expected: *expected,
                });
            }
        }
    }
    report.group = Some(section);
    Ok(())
}
