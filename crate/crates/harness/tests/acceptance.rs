//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use syncsub::clocks::{random_compatible, ClockObservable, CompatClass};
use syncsub::grouprep::{
    builtin_group, commutant_dimension, diagonal_isotypic_subspace, isotypic_projectors,
    observable_from_class_function, random_equivariant, schur_scalars, verify_kernel_containment,
    BuiltinGroup, FiniteGroup, Representation,
};
use syncsub::opcore::{
    commutator_norm, hermitian_eig, null_space, operator_norm, projector, tensor_product, vector,
    CMatrix, Hermitian, Subspace,
};
use syncsub::random;
use syncsub::sync::{
    drift_trace, epsilon_compatible, preservation_residual, sample_kernel_state,
    spectrum_deviation, stability_window, sync_bundle, sync_operator, SyncSystem,
};
use syncsub_harness::{parse_scenario, run_scenario, Report};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run_bundled(name: &str) -> Result<Report, String> {
    let s = parse_scenario(&scenario_path(name)).map_err(|e| e.to_string())?;
    run_scenario(&s, None).map_err(|e| e.to_string())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli_z() -> CMatrix {
    CMatrix::from_diag(&[1.0, -1.0])
}

fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// Plain triple-loop product.
fn naive_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = c(0.0);
            for k in 0..a.cols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Largest singular value by power iteration on `A†A`.
fn power_norm(a: &CMatrix) -> f64 {
    let ata = naive_mul(&a.adjoint(), a);
    let n = ata.cols();
    let mut v: Vec<Complex64> = (0..n).map(|i| c(1.0 + 0.31 * i as f64)).collect();
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = ata.mul_vec(&v).unwrap();
        let nrm = vector::norm(&w);
        if nrm == 0.0 {
            return 0.0;
        }
        lambda = nrm;
        v = w.iter().map(|z| z / nrm).collect();
    }
    lambda.sqrt()
}

/// Clock with integer labels drawn from `0..levels` (the first label pinned
/// to 0 so that two such clocks always share a label) in a random basis.
fn random_clock(dim: usize, levels: i64, rng: &mut impl Rng) -> ClockObservable {
    let labels = (0..dim)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                rng.gen_range(0..levels) as f64
            }
        })
        .collect();
    ClockObservable::with_basis(labels, random::unitary(dim, rng)).unwrap()
}

fn criterion_1() -> Outcome {
    let r = run_bundled("ex55_compat.json")?;
    let rows = r.compat.as_ref().ok_or("no compatibility rows")?;
    let t = CMatrix::from_diag(&[0.0, 1.0, 2.0]);
    let h4 = CMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
    let oracle = power_norm(&(&naive_mul(&h4, &t) - &naive_mul(&t, &h4)));
    for row in &rows[..3] {
        check(
            row.residual <= 1e-12,
            format!("{} residual {:e}", row.name, row.residual),
        )?;
        check(
            row.class == CompatClass::Diagonal.as_str(),
            format!("{} class {}", row.name, row.class),
        )?;
    }
    let h4_row = &rows[3];
    check(
        (oracle - 1.0).abs() <= 1e-12,
        format!("oracle norm {oracle}"),
    )?;
    check(
        (h4_row.residual - oracle).abs() <= 1e-12,
        format!("H4 residual {} vs oracle {oracle}", h4_row.residual),
    )?;
    check(
        h4_row.class == "incompatible",
        format!("H4 class {}", h4_row.class),
    )?;
    check(r.passed, "scenario verdicts failed")?;
    Ok(format!(
        "H1..H3 residual 0, H4 residual {}",
        h4_row.residual
    ))
}

fn criterion_2() -> Outcome {
    let r = run_bundled("ex74_kernel.json")?;
    let k = r.kernel.as_ref().ok_or("no kernel section")?;
    check(k.dim == 2, format!("kernel dim {}", k.dim))?;
    let cols: Vec<Vec<Complex64>> = k
        .basis
        .iter()
        .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let p =
        projector(&Subspace::new(CMatrix::from_columns(4, &cols), 0.0).map_err(|e| e.to_string())?);
    let dev = (p.matrix() - &CMatrix::from_diag(&[1.0, 0.0, 0.0, 1.0])).max_abs();
    check(dev <= 1e-12, format!("projector deviation {dev:e}"))?;

    let i2 = CMatrix::identity(2);
    let kk = &tensor_product(&pauli_z(), &i2) - &tensor_product(&i2, &pauli_z());
    let zi = tensor_product(&pauli_z(), &i2);
    let iz = tensor_product(&i2, &pauli_z());
    let mut hs = vec![
        zi.clone(),
        iz.clone(),
        tensor_product(&pauli_z(), &pauli_z()),
    ];
    let mut rng = random::rng(74);
    for _ in 0..20 {
        let (a, b): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        hs.push(&zi.scale_real(a) + &iz.scale_real(b));
    }
    let worst = hs
        .iter()
        .map(|h| commutator_norm(h, &kk).unwrap())
        .fold(0.0, f64::max);
    check(worst <= 1e-12, format!("max ‖[H,K]‖ {worst:e}"))?;

    let g = run_bundled("ex74_group.json")?;
    let members = &g.group.as_ref().ok_or("no group section")?.members;
    let xi = members
        .iter()
        .find(|m| m.name == "XI")
        .ok_or("no XI member")?;
    check(!xi.member, "X⊗I reported as member")?;
    let xi_comm = commutator_norm(&tensor_product(&pauli_x(), &i2), &kk).unwrap();
    check(xi_comm > 1.0, format!("‖[X⊗I,K]‖ {xi_comm}"))?;
    check(
        members.iter().filter(|m| m.name != "XI").all(|m| m.member),
        "Z-type member rejected",
    )?;
    Ok(format!(
        "dim 2, projector dev {dev:e}, 23 members ok, ‖[X⊗I,K]‖ = {xi_comm}"
    ))
}

fn criterion_3() -> Outcome {
    let times = [0.1, 1.0, 10.0, 100.0];
    let mut rng = random::rng(2042);
    let (mut w_comm, mut w_pres, mut w_spec) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let da = rng.gen_range(2..=4);
        let db = rng.gen_range(2..=4);
        let ca = random_clock(da, 3, &mut rng);
        let cb = random_clock(db, 3, &mut rng);
        let ha = random_compatible(&ca, rng.gen());
        let hb = random_compatible(&cb, rng.gen());
        let sys = SyncSystem::from_locals(ca.clone(), cb, ha, hb).map_err(|e| e.to_string())?;
        let b = sync_bundle(&sys).map_err(|e| e.to_string())?;
        w_comm = w_comm.max(b.epsilon);
        w_pres = w_pres.max(preservation_residual(&sys, &b, &times).map_err(|e| e.to_string())?);
        let ta = ca.matrix().kron(&Hermitian::identity(db));
        w_spec = w_spec
            .max(spectrum_deviation(sys.hamiltonian(), &ta, &times).map_err(|e| e.to_string())?);
    }
    check(w_comm <= 1e-11, format!("‖[K,H]‖ {w_comm:e}"))?;
    check(w_pres <= 1e-10, format!("preservation {w_pres:e}"))?;
    check(w_spec <= 1e-10, format!("spectrum deviation {w_spec:e}"))?;
    Ok(format!(
        "200 systems: max ‖[K,H]‖ {w_comm:.1e}, preservation {w_pres:.1e}, spectra {w_spec:.1e}"
    ))
}

/// Outcome of one swept perturbed system.
struct Sweep {
    drift_excess: f64,
    fidelity_excess: f64,
    normalization: f64,
    window_excess: f64,
    violations: (usize, usize, usize),
}

fn sweep() -> Result<Sweep, String> {
    let times: Vec<f64> = (0..64).map(|k| -50.0 + 100.0 * k as f64 / 63.0).collect();
    let delta = 0.1;
    let mut out = Sweep {
        drift_excess: f64::NEG_INFINITY,
        fidelity_excess: f64::NEG_INFINITY,
        normalization: 0.0,
        window_excess: f64::NEG_INFINITY,
        violations: (0, 0, 0),
    };
    for (i, &eps) in [0.001, 0.01, 0.1].iter().enumerate() {
        for seed in 0..50u64 {
            let mut rng = random::rng(1000 * i as u64 + seed);
            let da = rng.gen_range(2..=6);
            let db = rng.gen_range(2..=6);
            let ca = random_clock(da, 4, &mut rng);
            let cb = random_clock(db, 4, &mut rng);
            let ha = random_compatible(&ca, rng.gen());
            let hb = random_compatible(&cb, rng.gen());
            let base = ha
                .kron(&Hermitian::identity(db))
                .add(&Hermitian::identity(da).kron(&hb))
                .unwrap();
            let k = sync_operator(&ca, &cb);
            let dir = random::hermitian::<f64>(da * db, &mut rng);
            let h = epsilon_compatible(&base, &k, &dir, eps).map_err(|e| e.to_string())?;
            let sys = SyncSystem::new(ca, cb, h).map_err(|e| e.to_string())?;
            let b = sync_bundle(&sys).map_err(|e| e.to_string())?;
            let psi0 = sample_kernel_state(&b, rng.gen()).map_err(|e| e.to_string())?;
            let tr = drift_trace(&sys, &psi0, &times).map_err(|e| e.to_string())?;
            let e = b.epsilon;
            for j in 0..tr.len() {
                let t = times[j];
                let dx = tr.drift[j] - e * t.abs();
                let fx = (1.0 - e * e * t * t) - tr.fidelity[j];
                let nx = (tr.fidelity[j] + tr.leakage[j] - 1.0).abs();
                out.drift_excess = out.drift_excess.max(dx);
                out.fidelity_excess = out.fidelity_excess.max(fx);
                out.normalization = out.normalization.max(nx);
                out.violations.0 += usize::from(dx > 1e-9);
                out.violations.1 += usize::from(fx > 1e-9 || nx > 1e-10);
            }
            let w = stability_window(&b, delta).map_err(|e| e.to_string())?;
            let at = drift_trace(&sys, &psi0, &[0.9 * w]).map_err(|e| e.to_string())?;
            let wx = at.drift[0] - delta;
            out.window_excess = out.window_excess.max(wx);
            out.violations.2 += usize::from(wx > 1e-9);
        }
    }
    Ok(out)
}

fn criterion_4(s: &Sweep) -> Outcome {
    check(
        s.violations.0 == 0,
        format!(
            "{} drift violations (max excess {:e})",
            s.violations.0, s.drift_excess
        ),
    )?;
    Ok(format!(
        "150 systems × 64 times, max drift − ε|t| = {:.3e}",
        s.drift_excess
    ))
}

fn criterion_5(s: &Sweep) -> Outcome {
    check(
        s.violations.1 == 0,
        format!(
            "{} fidelity violations (max excess {:e}, normalization {:e})",
            s.violations.1, s.fidelity_excess, s.normalization
        ),
    )?;
    Ok(format!(
        "max (1 − ε²t²) − F = {:.3e}, max |F + leak − 1| = {:.1e}",
        s.fidelity_excess, s.normalization
    ))
}

fn criterion_6(s: &Sweep) -> Outcome {
    check(
        s.violations.2 == 0,
        format!(
            "{} window violations (max excess {:e})",
            s.violations.2, s.window_excess
        ),
    )?;
    Ok(format!("max drift(0.9δ/ε) − δ = {:.3e}", s.window_excess))
}

fn criterion_7() -> Outcome {
    let groups = [
        BuiltinGroup::Cyclic(2),
        BuiltinGroup::KleinFour,
        BuiltinGroup::S3,
        BuiltinGroup::D4,
    ];
    let mut worst_proj = 0.0f64;
    let mut worst_schur = 0.0f64;
    for which in groups {
        let (g, chars) = builtin_group::<f64>(which).map_err(|e| e.to_string())?;
        let rho = Representation::regular(g.clone());
        let d = isotypic_projectors(&rho, &chars).map_err(|e| e.to_string())?;
        worst_proj = worst_proj
            .max(d.idempotence_residual())
            .max(d.orthogonality_residual())
            .max(d.completeness_residual());
        for irrep in chars.irreps() {
            let comp = d.component(&irrep.name).ok_or("missing component")?;
            // rank of P_λ by eigenvalue count, independent of the library's bookkeeping
            let rank = hermitian_eig(&comp.projector)
                .eigenvalues
                .iter()
                .filter(|&&l| l > 0.5)
                .count();
            check(
                rank == irrep.dim * irrep.dim && comp.isotypic_dim == rank,
                format!(
                    "{which}: rank(P_{}) = {rank}, expected {}",
                    irrep.name,
                    irrep.dim * irrep.dim
                ),
            )?;
        }
        // regular representation: m_λ = d_λ, so Σ m_λ² = Σ d_λ² = |G|
        let cd = commutant_dimension(&rho);
        check(
            cd == g.order(),
            format!("{which}: commutant dim {cd}, expected {}", g.order()),
        )?;
        for seed in 0..20 {
            let t = random_equivariant(&rho, seed);
            let s = schur_scalars(&t, &rho, &d).map_err(|e| e.to_string())?;
            worst_schur = worst_schur.max(s.max_residual());
        }
    }
    check(
        worst_proj <= 1e-10,
        format!("projector residual {worst_proj:e}"),
    )?;
    check(
        worst_schur <= 1e-9,
        format!("schur residual {worst_schur:e}"),
    )?;
    Ok(format!(
        "Z2, Z2xZ2, S3, D4: projectors {worst_proj:.1e}, schur {worst_schur:.1e}"
    ))
}

/// trivial ⊕ sign ⊕ standard on `C⁴`.
fn s3_four(g: &FiniteGroup) -> Representation {
    let (cs, sn) = (-0.5, 3f64.sqrt() / 2.0);
    let r = CMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, cs, -sn],
        &[0.0, 0.0, sn, cs],
    ]);
    let s = CMatrix::from_diag(&[1.0, -1.0, 1.0, -1.0]);
    let gens = [(g.index_of("r").unwrap(), r), (g.index_of("s").unwrap(), s)];
    Representation::from_generators(g.clone(), &gens).unwrap()
}

fn criterion_8() -> Outcome {
    let (g, chars) = builtin_group::<f64>(BuiltinGroup::S3).map_err(|e| e.to_string())?;
    let rho = s3_four(&g);
    let kg = diagonal_isotypic_subspace(&rho, &rho, &chars).map_err(|e| e.to_string())?;
    let decomp = isotypic_projectors(&rho, &chars).map_err(|e| e.to_string())?;
    let mut rng = random::rng(8);
    let mut worst_matched = 0.0f64;
    let mut worst_gap = 0.0f64;
    let class_count = g.class_count();
    // α_λ = Σ_g f(g) χ_λ(g) / d_λ
    let alpha = |f: &[f64], l: usize| -> f64 {
        let irrep = &chars.irreps()[l];
        (0..g.order())
            .map(|x| f[g.class_of(x)] * irrep.characters[g.class_of(x)].re)
            .sum::<f64>()
            / irrep.dim as f64
    };
    for _ in 0..20 {
        let f: Vec<f64> = (0..class_count).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = observable_from_class_function(&f, &rho).map_err(|e| e.to_string())?;
        let k = t
            .kron(&Hermitian::identity(4))
            .sub(&Hermitian::identity(4).kron(&t))
            .unwrap();
        for b in kg.vectors() {
            worst_matched = worst_matched.max(vector::norm(&k.matrix().mul_vec(&b).unwrap()));
        }

        let mut fb = f.clone();
        let class = rng.gen_range(0..class_count);
        fb[class] += rng.gen_range(0.5..1.5);
        let tb = observable_from_class_function(&fb, &rho).map_err(|e| e.to_string())?;
        let kb = t
            .kron(&Hermitian::identity(4))
            .sub(&Hermitian::identity(4).kron(&tb))
            .unwrap();
        let report =
            verify_kernel_containment(&rho, &rho, &t, &tb, &chars).map_err(|e| e.to_string())?;
        for (l, irrep) in chars.irreps().iter().enumerate() {
            let gap = (alpha(&f, l) - alpha(&fb, l)).abs();
            let comp = decomp.component(&irrep.name).ok_or("missing component")?;
            let entry = report
                .entries
                .iter()
                .find(|e| e.irrep == irrep.name)
                .ok_or("missing entry")?;
            check(
                entry.matched == (gap <= 1e-6),
                format!(
                    "{}: matched {} but oracle gap {gap}",
                    irrep.name, entry.matched
                ),
            )?;
            for i in 0..comp.basis.cols() {
                for j in 0..comp.basis.cols() {
                    let bv = vector::kron(&comp.basis.column(i), &comp.basis.column(j));
                    let kb_norm = vector::norm(&kb.matrix().mul_vec(&bv).unwrap());
                    worst_gap = worst_gap.max((kb_norm - gap).abs());
                    let leaves = kb_norm > 1e-9;
                    check(
                        leaves == (gap > 1e-6),
                        format!("{}: ‖Kb‖ = {kb_norm:e} with gap {gap:e}", irrep.name),
                    )?;
                }
            }
        }
    }
    check(
        worst_matched <= 1e-9,
        format!("matched ‖Kb‖ {worst_matched:e}"),
    )?;
    check(worst_gap <= 1e-9, format!("‖Kb‖ vs gap {worst_gap:e}"))?;
    Ok(format!(
        "20 class functions: max ‖Kb‖ {worst_matched:.1e}, gap deviation {worst_gap:.1e}"
    ))
}

/// Largest principal angle (as a sine) between two subspaces of equal dimension.
fn principal_angle(a: &Subspace, b: &Subspace) -> f64 {
    let pb = projector(b);
    let resid = &(&CMatrix::identity(pb.dim()) - pb.matrix()) * a.basis();
    operator_norm(&resid)
}

fn criterion_9() -> Outcome {
    let mut rng = random::rng(99);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let k = if case % 2 == 0 {
            let da = rng.gen_range(1..=4);
            let db = rng.gen_range(1..=4);
            let ca = random_clock(da, 3, &mut rng);
            let cb = random_clock(db, 3, &mut rng);
            sync_operator(&ca, &cb).into_matrix()
        } else {
            let n = rng.gen_range(2..=16);
            let r = rng.gen_range(1..n);
            let f = random::complex_matrix::<f64>(n, r, &mut rng);
            let g = random::complex_matrix::<f64>(r, n, &mut rng);
            naive_mul(&f, &g)
        };
        let svd_kernel = null_space(&k, 1e-10);
        let gram = Hermitian::new(naive_mul(&k.adjoint(), &k)).map_err(|e| e.to_string())?;
        let eig = hermitian_eig(&gram);
        let top = eig.eigenvalues.last().copied().unwrap_or(0.0);
        let idx: Vec<usize> = (0..eig.dim())
            .filter(|&i| eig.eigenvalues[i] <= 1e-12 * top.max(1e-300))
            .collect();
        let eig_kernel = Subspace::new(eig.eigenvectors.matrix().select_columns(&idx), 0.0)
            .map_err(|e| e.to_string())?;
        check(
            svd_kernel.dim() == eig_kernel.dim(),
            format!(
                "case {case}: dims {} vs {}",
                svd_kernel.dim(),
                eig_kernel.dim()
            ),
        )?;
        if svd_kernel.dim() > 0 {
            worst = worst.max(principal_angle(&svd_kernel, &eig_kernel));
        }
    }
    check(worst <= 1e-8, format!("principal angle {worst:e}"))?;
    Ok(format!(
        "100 operators, max principal angle sine {worst:.1e}"
    ))
}

fn cli(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_syncsub"))
        .args(args)
        .env_remove("SYNCSUB_LOG")
        .status()
        .map_err(|e| e.to_string())?;
    check(
        status.code() == Some(0),
        format!("{args:?} exited with {status}"),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |round: usize, name: &str| dir.path().join(format!("{round}-{name}"));
    let jobs = [
        ("ex55_compat.json", "json"),
        ("ex74_kernel.json", "json"),
        ("ex74_group.json", "json"),
        ("drift_perturbed.json", "json"),
        ("drift_perturbed.json", "csv"),
    ];
    for round in 0..2 {
        for (scenario, format) in jobs {
            let out = path(round, &format!("{scenario}.{format}"));
            let input = scenario_path(scenario);
            cli(&[
                "run",
                input.to_str().unwrap(),
                "--format",
                format,
                "--out",
                out.to_str().unwrap(),
            ])?;
        }
    }
    let mut bytes = 0;
    for (scenario, format) in jobs {
        let name = format!("{scenario}.{format}");
        let a = std::fs::read(path(0, &name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(path(1, &name)).map_err(|e| e.to_string())?;
        check(
            !a.is_empty() && a == b,
            format!("{name} differs between runs"),
        )?;
        bytes += a.len();
    }
    Ok(format!(
        "{} outputs byte-identical across runs ({bytes} bytes)",
        jobs.len()
    ))
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
        Err(why) => {
            failures += 1;
            println!("criterion {n:>2} FAIL  {name}: {why}");
        }
    };
    report(1, "three-level clock compatibility", criterion_1());
    report(2, "two-qubit synchronization kernel", criterion_2());
    report(3, "local compatibility preserves the kernel", criterion_3());
    match sweep() {
        Ok(s) => {
            report(4, "linear drift bound", criterion_4(&s));
            report(5, "quadratic fidelity bound", criterion_5(&s));
            report(6, "stability window", criterion_6(&s));
        }
        Err(e) => {
            for (n, name) in [
                (4, "linear drift bound"),
                (5, "quadratic fidelity bound"),
                (6, "stability window"),
            ] {
                report(n, name, Err(e.clone()));
            }
        }
    }
    report(7, "isotypic projectors, commutant and Schur", criterion_7());
    report(8, "diagonal isotypic containment", criterion_8());
    report(9, "null space oracle equivalence", criterion_9());
    report(10, "deterministic reports", criterion_10());
    println!(
        "acceptance: {} of 10 criteria passed in {:.1}s",
        10 - failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
