//! Subcommands. Each takes the input file's text and returns an [`Outcome`];
//! nothing here touches the filesystem or the process exit code.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use ucc_core::elimination::{eliminate_truncated, intermediate_normalize, reconstruct};
use ucc_core::fockoracle::{
    apply_euler_assigned, apply_exp_factors, apply_exp_series, apply_ucc_product, compare, occupied, reference_det,
    StateVector, DEFAULT_TOL,
};
use ucc_core::identities::{disentangle, disentangle_reversed, UCCFactor};
use ucc_core::opalg::NumericSum;
use ucc_core::reorder::{convert_with_diagnostics, trotter_assignment, trotterize, CCResult, FactorProduct};
use ucc_core::symcoef::Assignment;

use crate::report::{CliError, Outcome, RunInfo, EXIT_STUCK};
use crate::spec::Ansatz;

pub const DEFAULT_SEED: u64 = 42;

/// Perturbation half-width applied to given angles in `verify`.
const PERTURBATION: f64 = 0.05;

fn assignment_json(a: &Assignment) -> Value {
    json!(a.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>())
}

fn random_angles(factors: &[UCCFactor], rng: &mut ChaCha8Rng) -> Assignment {
    factors
        .iter()
        .map(|f| (f.angle.clone(), rng.gen_range(-FRAC_PI_4..FRAC_PI_4)))
        .collect()
}

/// Given values if present, else seeded draws in (-pi/4, pi/4).
fn angles_or_random(a: &Ansatz, seed: u64) -> Assignment {
    match &a.given {
        Some(g) => g.clone(),
        None => random_angles(&a.factors, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

fn state_text(s: &StateVector<f64>) -> String {
    let mut out = String::new();
    for (d, c) in s.iter() {
        let _ = writeln!(out, "{:?} {:+.15e}", occupied(d), c);
    }
    out
}

fn ucc_state(a: &Ansatz, assign: &Assignment) -> Result<StateVector<f64>, CliError> {
    Ok(apply_ucc_product(&a.factors, assign, &StateVector::reference(a.space))?)
}

fn space_json(a: &Ansatz) -> Value {
    json!({"n_orbitals": a.space.n_orbitals, "n_electrons": a.space.n_electrons})
}

fn factors_json(a: &Ansatz) -> Value {
    json!(a.factors.iter().map(|f| json!({"angle": f.angle.to_string(), "occ": f.occ(), "virt": f.virt()})).collect::<Vec<_>>())
}

fn run(info: &RunInfo, body: impl FnOnce() -> Result<Outcome, CliError>) -> Outcome {
    body().unwrap_or_else(|e| Outcome::failed(info, &e))
}

#[derive(Debug, Clone)]
pub struct Ucc2ccOptions {
    pub tol: f64,
}

impl Default for Ucc2ccOptions {
    fn default() -> Self {
        Ucc2ccOptions { tol: DEFAULT_TOL }
    }
}

fn numeric_values(cc: &CCResult, assign: &Assignment) -> Result<Value, CliError> {
    let mut factors = Vec::new();
    for f in &cc.factors {
        let mut terms = Vec::new();
        for (op, c) in f.to_exp().exponent.terms() {
            terms.push(json!({"operator": op.to_string(), "value": c.eval(assign)?}));
        }
        factors.push(terms);
    }
    Ok(json!({"prefactor": cc.prefactor.eval(assign)?, "factors": factors}))
}

pub fn cmd_ucc2cc(input: &str, seed: u64, opts: &Ucc2ccOptions) -> Outcome {
    let info = RunInfo::new("ucc2cc", input, seed).tol("oracle", opts.tol);
    run(&info, || {
        let a = Ansatz::from_text(input)?;
        let mut result = json!({"space": space_json(&a), "input_factors": factors_json(&a)});
        match convert_with_diagnostics(&a.factors, &a.space) {
            Ok(cc) => {
                result["cc"] = cc.to_json();
                let mut text = cc.to_string();
                let mut warnings = cc.diagnostics.notes.clone();
                if let Some(assign) = &a.given {
                    result["values"] = numeric_values(&cc, assign)?;
                    let cmp = compare(&ucc_state(&a, assign)?, &cc.apply_to_reference(assign)?, opts.tol);
                    result["oracle_check"] = json!({"max_abs_diff": cmp.max_abs_diff, "matched": cmp.matched});
                    let _ = writeln!(text, "oracle check: max |diff| = {:.3e} ({})", cmp.max_abs_diff, if cmp.matched { "matched" } else { "MISMATCH" });
                    if !cmp.matched {
                        warnings.push("converted form disagrees with the determinant oracle".into());
                        return Ok(Outcome::new(&info, "mismatch", EXIT_STUCK, result, text, warnings));
                    }
                }
                warnings.sort();
                warnings.dedup();
                Ok(Outcome::ok(&info, result, text, warnings))
            }
            Err(stuck) => {
                result["error"] = json!(stuck.error.to_string());
                result["diagnostics"] = serde_json::to_value(&stuck.diagnostics).expect("diagnostics serialize");
                let mut text = format!("stuck: {}\n", stuck.error);
                let mut warnings = stuck.diagnostics.notes.clone();
                warnings.push("symbolic conversion incomplete; amplitudes are available numerically through elimination".into());
                if let Some(assign) = &a.given {
                    let s = ucc_state(&a, assign)?;
                    let t = eliminate_truncated(&s, a.space.max_rank())?;
                    result["fallback"] = json!({"method": "elimination", "amplitudes": t.amplitudes.to_json()});
                    let _ = writeln!(text, "fallback elimination: {} amplitudes", t.amplitudes.len());
                }
                Ok(Outcome::new(&info, "stuck", EXIT_STUCK, result, text, warnings))
            }
        }
    })
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 50,
            tol: DEFAULT_TOL,
        }
    }
}

/// How the CC side of a verification was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyPath {
    Symbolic,
    Elimination,
}

fn sample_angles(a: &Ansatz, k: usize, rng: &mut ChaCha8Rng) -> Assignment {
    match &a.given {
        Some(g) if k == 0 => g.clone(),
        Some(g) => g
            .iter()
            .map(|(l, &v)| {
                let p = v + rng.gen_range(-PERTURBATION..PERTURBATION);
                (l.clone(), if p.abs() < FRAC_PI_2 { p } else { v })
            })
            .collect(),
        None => random_angles(&a.factors, rng),
    }
}

/// Amplitudes recovered by elimination, applied back to the reference with
/// the reference weight restored.
fn elimination_state(s: &StateVector<f64>, max_rank: usize) -> Result<StateVector<f64>, CliError> {
    let c0 = s.amplitude(reference_det(&s.space));
    let t = eliminate_truncated(s, max_rank)?;
    Ok(reconstruct(&t.amplitudes)?.scaled(&c0))
}

pub fn cmd_verify(input: &str, seed: u64, opts: &VerifyOptions) -> Outcome {
    let info = RunInfo::new("verify", input, seed).tol("tol", opts.tol);
    run(&info, || {
        let a = Ansatz::from_text(input)?;
        let mut warnings = Vec::new();
        let converted = convert_with_diagnostics(&a.factors, &a.space);
        let path = match &converted {
            Ok(_) => VerifyPath::Symbolic,
            Err(stuck) => {
                warnings.push(format!("symbolic conversion stuck ({}); verifying the elimination fallback", stuck.error));
                VerifyPath::Elimination
            }
        };
        if opts.samples == 0 {
            warnings.push("zero samples requested; passing vacuously".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut failures = 0usize;
        let mut prefactor_ok = true;
        for k in 0..opts.samples {
            let assign = sample_angles(&a, k, &mut rng);
            let u = ucc_state(&a, &assign)?;
            let c = match &converted {
                Ok(cc) => {
                    let p = cc.prefactor.eval(&assign)?;
                    prefactor_ok &= p > 0.0 && p <= 1.0;
                    cc.apply_to_reference(&assign)?
                }
                Err(_) => elimination_state(&u, a.space.max_rank())?,
            };
            let cmp = compare(&u, &c, opts.tol);
            worst = worst.max(cmp.max_abs_diff);
            failures += usize::from(!cmp.matched);
        }
        let pass = failures == 0 && prefactor_ok;
        let path_name = match path {
            VerifyPath::Symbolic => "symbolic",
            VerifyPath::Elimination => "elimination",
        };
        let result = json!({
            "samples": opts.samples,
            "path": path_name,
            "max_abs_diff": worst,
            "failures": failures,
            "prefactor_in_unit_interval": prefactor_ok,
            "pass": pass,
        });
        let text = format!(
            "{} samples via {} path: max |UCC - CC| = {:.3e}, {} failures -> {}\n",
            opts.samples,
            path_name,
            worst,
            failures,
            if pass { "PASS" } else { "FAIL" }
        );
        if pass {
            Ok(Outcome::ok(&info, result, text, warnings))
        } else {
            Ok(Outcome::new(&info, "fail", crate::report::EXIT_INPUT, result, text, warnings))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed-form rotation of each factor.
    Euler,
    /// Power series of each factor's exponential.
    Series,
    /// `steps`-fold split of the whole sequence.
    Trotter,
    /// Each factor as its three disentangled exponentials.
    Disentangled,
    /// One exponential of the summed generator.
    Sum,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Series => "series",
            Method::Trotter => "trotter",
            Method::Disentangled => "disentangled",
            Method::Sum => "sum",
        }
    }
}

fn generator(f: &UCCFactor, assign: &Assignment) -> Result<NumericSum, CliError> {
    Ok(f.t().sub(&f.t_dagger()).evaluate(assign)?.into_iter().map(|(c, op)| (c * assign[&f.angle], op)).collect())
}

pub fn simulate_state(a: &Ansatz, assign: &Assignment, method: Method, steps: usize) -> Result<StateVector<f64>, CliError> {
    let reference = StateVector::reference(a.space);
    match method {
        Method::Euler => ucc_state(a, assign),
        Method::Series => {
            let mut s = reference;
            for f in a.factors.iter().rev() {
                s = apply_exp_series(&generator(f, assign)?, &s)?;
            }
            Ok(s)
        }
        Method::Trotter => {
            let split = trotterize(&a.factors, steps)?;
            let split_assign = trotter_assignment(&a.factors, assign, steps)?;
            Ok(apply_ucc_product(&split, &split_assign, &reference)?)
        }
        Method::Disentangled => Ok(FactorProduct::from_ucc(&a.factors).apply(assign, &reference)?),
        Method::Sum => {
            let mut g: NumericSum = Vec::new();
            for f in &a.factors {
                g.extend(generator(f, assign)?);
            }
            Ok(apply_exp_series(&g, &reference)?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub method: Method,
    pub steps: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            method: Method::Euler,
            steps: 1,
        }
    }
}

pub fn cmd_simulate(input: &str, seed: u64, opts: &SimulateOptions) -> Outcome {
    let info = RunInfo::new("simulate", input, seed);
    run(&info, || {
        let a = Ansatz::from_text(input)?;
        if opts.steps == 0 {
            return Err(CliError::Input("--steps must be positive".into()));
        }
        let mut warnings = Vec::new();
        if a.given.is_none() {
            warnings.push("symbolic ansatz: angles drawn from the seeded generator".into());
        }
        if opts.method != Method::Trotter && opts.steps != 1 {
            warnings.push(format!("--steps is ignored by the {} method", opts.method.name()));
        }
        let assign = angles_or_random(&a, seed);
        let s = simulate_state(&a, &assign, opts.method, opts.steps)?;
        let result = json!({
            "method": opts.method.name(),
            "steps": opts.steps,
            "angles": assignment_json(&assign),
            "norm": s.norm(),
            "state": s.to_json(),
        });
        Ok(Outcome::ok(&info, result, state_text(&s), warnings))
    })
}

#[derive(Debug, Clone, Default)]
pub struct EliminateOptions {
    /// Defaults to the full rank of the space.
    pub max_rank: Option<usize>,
    pub roundtrip: bool,
    pub tol: Option<f64>,
}

/// Input for `eliminate`: a state vector JSON (has `amplitudes`), a
/// `simulate` report, or an ansatz.
fn eliminate_input(input: &str, seed: u64) -> Result<(StateVector<f64>, Option<Assignment>), CliError> {
    let v: Value = serde_json::from_str(input).map_err(|e| CliError::Input(format!("input: {}", e)))?;
    if v.get("amplitudes").is_some() {
        return Ok((StateVector::from_json(&v)?, None));
    }
    if let Some(state) = v.pointer("/result/state") {
        return Ok((StateVector::from_json(state)?, None));
    }
    let a = Ansatz::from_text(input)?;
    let assign = angles_or_random(&a, seed);
    Ok((ucc_state(&a, &assign)?, Some(assign)))
}

pub fn cmd_eliminate(input: &str, seed: u64, opts: &EliminateOptions) -> Outcome {
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let info = RunInfo::new("eliminate", input, seed).tol("roundtrip", tol);
    run(&info, || {
        let (s, angles) = eliminate_input(input, seed)?;
        let full = s.space.max_rank();
        let max_rank = opts.max_rank.unwrap_or(full);
        let t = eliminate_truncated(&s, max_rank)?;
        let mut warnings = Vec::new();
        if t.residual_determinants > 0 {
            warnings.push(format!(
                "state reaches beyond rank {}: {} determinants left over, residual {:.3e}",
                max_rank, t.residual_determinants, t.residual
            ));
        }
        let mut result = json!({
            "max_rank": max_rank,
            "amplitudes": t.amplitudes.to_json(),
            "highest_rank": t.amplitudes.highest_rank(0.0),
            "residual": t.residual,
            "residual_determinants": t.residual_determinants,
        });
        if let Some(a) = &angles {
            result["angles"] = assignment_json(a);
        }
        let mut text = String::new();
        for (rank, (occ, virt), value) in t.amplitudes.iter() {
            let _ = writeln!(text, "rank {} {:?} -> {:?}: {:+.15e}", rank, occ, virt, value);
        }
        let _ = writeln!(text, "residual above rank {}: {:.3e}", max_rank, t.residual);
        if opts.roundtrip {
            let target = intermediate_normalize(&s)?;
            let rebuilt = reconstruct(&t.amplitudes)?;
            // only determinants within max_rank are reproduced by construction
            let reference = reference_det(&s.space);
            let within = |v: &StateVector<f64>| {
                let mut out = StateVector::zero(v.space);
                for (d, c) in v.iter().filter(|(d, _)| (d & !reference).count_ones() as usize <= max_rank) {
                    out.add(d, *c);
                }
                out
            };
            let cmp = compare(&within(&target), &within(&rebuilt), tol);
            result["roundtrip"] = json!({"max_abs_diff": cmp.max_abs_diff, "matched": cmp.matched});
            let _ = writeln!(text, "round trip: max |diff| = {:.3e} ({})", cmp.max_abs_diff, if cmp.matched { "matched" } else { "MISMATCH" });
            if !cmp.matched {
                return Ok(Outcome::new(&info, "mismatch", crate::report::EXIT_INPUT, result, text, warnings));
            }
        }
        Ok(Outcome::ok(&info, result, text, warnings))
    })
}

#[derive(Debug, Clone, Default)]
pub struct DisentangleOptions {
    pub index: usize,
    pub reversed: bool,
}

pub fn cmd_disentangle(input: &str, seed: u64, opts: &DisentangleOptions) -> Outcome {
    let info = RunInfo::new("disentangle", input, seed).tol("oracle", DEFAULT_TOL);
    run(&info, || {
        let a = Ansatz::from_text(input)?;
        let f = a.factors.get(opts.index).ok_or_else(|| {
            CliError::Input(format!("factor index {} out of range (ansatz has {})", opts.index, a.factors.len()))
        })?;
        let triple = if opts.reversed { disentangle_reversed(f) } else { disentangle(f) };
        let mut text = format!("exp({} (T - T^dagger)) =\n", f.angle);
        for x in &triple {
            let _ = writeln!(text, "  {}", x);
        }
        let mut result = json!({
            "factor": {"angle": f.angle.to_string(), "occ": f.occ(), "virt": f.virt()},
            "order": if opts.reversed { "reversed" } else { "forward" },
            "factors": triple.iter().map(|x| x.exponent.to_json()).collect::<Vec<_>>(),
            "rendered": triple.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        });
        if let Some(assign) = &a.given {
            let r = StateVector::reference(a.space);
            let cmp = compare(&apply_exp_factors(&triple, assign, &r)?, &apply_euler_assigned(f, assign, &r)?, DEFAULT_TOL);
            result["oracle_check"] = json!({"max_abs_diff": cmp.max_abs_diff, "matched": cmp.matched});
            let _ = writeln!(text, "oracle check on the reference: max |diff| = {:.3e}", cmp.max_abs_diff);
        }
        Ok(Outcome::ok(&info, result, text, vec![]))
    })
}
