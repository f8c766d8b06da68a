//! Command dispatch.

use std::path::PathBuf;

use clap::ValueEnum;
use netzero_core::linalg::{numerical_rank, numerical_rank_c, spectral_radius};
use netzero_core::{
    block_system, blocked_transfer_assembly, blocked_transfer_eval, circulant_zero_report, close_loop, corpus,
    correspondence_report, design_check, diagonalization_residual, homogeneous_zero_report, invariant_zeros,
    match_multisets, minimum_phase_verdict, pencil_at, rank_at, CirculantSpec, Cx, HomogeneousNetwork,
    RelativeDegree, StateSpace, Verdict, VerdictReason, ZeroOptions, ZeroReport,
};
use rand::Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::model_file::{parse_model_source, Model};
use crate::report::{complexes, Check, CommandEcho, ModelSummary, Report, Status, ToleranceEcho, Violation, ZeroSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Invariant zeros of the closed-loop network.
    Zeros,
    /// Zeros of a homogeneous network through the coupling zeros.
    Homog,
    /// Zeros of a circulant homogeneous network in the Fourier basis.
    Circulant,
    /// Blocked versus unblocked zeros.
    Block,
    /// Zero-free design condition on the coupling.
    Design,
    /// Every applicable cross-check on the model.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Zeros => "zeros",
            Command::Homog => "homog",
            Command::Circulant => "circulant",
            Command::Block => "block",
            Command::Design => "design",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub command: Command,
    pub model: PathBuf,
    /// Block size for `block`.
    pub block: usize,
    pub seed: u64,
    /// Matching tolerance for zero sets.
    pub tol: f64,
    /// Sample points per normal-rank estimate.
    pub samples: usize,
}

impl Options {
    pub fn new(command: Command, model: impl Into<PathBuf>) -> Self {
        Self { command, model: model.into(), block: 2, seed: 0, tol: 1e-6, samples: 7 }
    }

    fn zero_options(&self) -> ZeroOptions<f64> {
        let base = ZeroOptions::<f64>::default();
        ZeroOptions { samples: self.samples, seed: self.seed, tol: base.tol.with_matching(self.tol) }
    }

    fn echo(&self) -> CommandEcho {
        let model = self.model.display().to_string();
        let mut argv = vec!["netzero".to_string(), self.command.name().into(), "--model".into(), model.clone()];
        if self.command == Command::Block {
            argv.extend(["--T".into(), self.block.to_string()]);
        }
        argv.extend([
            "--seed".into(),
            self.seed.to_string(),
            "--tol".into(),
            format!("{:e}", self.tol),
            "--samples".into(),
            self.samples.to_string(),
        ]);
        CommandEcho {
            name: self.command.name().into(),
            argv,
            model,
            block: (self.command == Command::Block).then_some(self.block),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.command == Command::Block && self.block == 0 {
            return Err(CliError::Argument("--T must be at least 1".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Argument(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.samples == 0 {
            return Err(CliError::Argument("--samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// What a command produced.
struct Outcome {
    results: Value,
    checks: Vec<Check>,
}

/// Reads the model and runs the command. Input problems are errors; a
/// violated hypothesis becomes a report with status `hypothesis_violation`.
pub fn run(opts: &Options) -> Result<Report, CliError> {
    opts.validate()?;
    let path = opts.model.display().to_string();
    let text = std::fs::read_to_string(&opts.model).map_err(|e| CliError::Read { path: path.clone(), source: e })?;
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())));
    let (_, model) = parse_model_source(&text, &path)?;
    let zopts = opts.zero_options();
    let mut report = Report {
        tool: "netzero",
        version: env!("CARGO_PKG_VERSION"),
        command: opts.echo(),
        input_digest: digest,
        seed: opts.seed,
        samples: opts.samples,
        tolerances: ToleranceEcho::from(&zopts.tol),
        model: ModelSummary {
            agents: model.agents.len(),
            states: model.states(),
            inputs: model.coupling.inputs(),
            outputs: model.coupling.outputs(),
            homogeneous_shorthand: model.shorthand_count.is_some(),
            circulant_shorthand: model.circulant.is_some(),
        },
        status: Status::Ok,
        results: Value::Null,
        checks: Vec::new(),
        violation: None,
    };
    match run_command(opts.command, &model, opts, &zopts) {
        Ok(out) => {
            report.results = out.results;
            report.checks = out.checks;
        }
        Err(CliError::Hypothesis(hypothesis)) => report.violation = Some(Violation { hypothesis }),
        Err(e) => return Err(e),
    }
    report.settle();
    Ok(report)
}

fn run_command(cmd: Command, model: &Model, opts: &Options, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    match cmd {
        Command::Zeros => zeros(model, zopts),
        Command::Homog => homog(model, zopts),
        Command::Circulant => circulant(model, zopts),
        Command::Block => block(model, opts.block, zopts),
        Command::Design => design(model, zopts),
        Command::Verify => verify(model, zopts),
    }
}

fn network(model: &Model) -> Result<StateSpace<f64>, CliError> {
    Ok(close_loop(&model.agents, &model.coupling)?.system)
}

fn homogeneous(model: &Model) -> Result<HomogeneousNetwork<f64>, CliError> {
    Ok(HomogeneousNetwork::from_agents(&model.agents, model.coupling.clone())?)
}

fn circulant_spec(model: &Model) -> Result<CirculantSpec<f64>, CliError> {
    match &model.circulant {
        Some(spec) => Ok(spec.clone()),
        None => CirculantSpec::from_matrix(&model.coupling.l, 1e-12)
            .ok_or_else(|| CliError::Hypothesis("circulant analysis needs L to be a circulant matrix".into())),
    }
}

/// Seeded sample points `r·e^{iθ}` with `r` in `[lo, hi)`.
fn sample_points(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<Cx<f64>> {
    let mut rng = corpus::rng(seed);
    (0..count).map(|_| Cx::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))).collect()
}

fn zero_checks(sys: &StateSpace<f64>, rep: &ZeroReport<f64>, zopts: &ZeroOptions<f64>) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let mut missing = Vec::new();
    for z in rep.locations() {
        let at = rank_at(sys, z, zopts)?;
        if at.rank >= at.normal_rank {
            missing.push(z);
        }
    }
    checks.push(Check::new(
        "rank drop at every zero",
        missing.is_empty(),
        if missing.is_empty() { format!("{} zeros", rep.locations().len()) } else { format!("no rank drop at {missing:?}") },
    ));
    let zeros = rep.zeros();
    let conj: Vec<Cx<f64>> = zeros.iter().map(|z| z.conj()).collect();
    checks.push(Check::new("closed under conjugation", match_multisets(&zeros, &conj, zopts.tol.matching).matched, ""));
    checks.push(Check::new(
        "pencil rank is states plus transfer rank",
        rep.normal_rank_pencil == sys.states() + rep.normal_rank_tf,
        format!("{} = {} + {}", rep.normal_rank_pencil, sys.states(), rep.normal_rank_tf),
    ));
    checks.push(Check::new(
        "infinite zero iff rank D below transfer rank",
        rep.has_infinite_zero == (rep.rank_feedthrough < rep.normal_rank_tf),
        format!("rank D = {}, transfer rank = {}", rep.rank_feedthrough, rep.normal_rank_tf),
    ));
    Ok(checks)
}

fn zeros(model: &Model, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    let sys = network(model)?;
    let rep = invariant_zeros(&sys, zopts)?;
    let checks = zero_checks(&sys, &rep, zopts)?;
    Ok(Outcome {
        results: json!({ "zeros": ZeroSummary::from(&rep), "minimum_phase": rep.is_minimum_phase() }),
        checks,
    })
}

/// Compares a fast-path report against the direct engine.
fn equivalence_checks(label: &str, fast: &ZeroReport<f64>, direct: &ZeroReport<f64>, tol: f64) -> Vec<Check> {
    let m = match_multisets(&fast.zeros(), &direct.zeros(), tol);
    vec![
        Check::new(
            &format!("{label} zeros match the direct engine"),
            m.matched,
            format!("max scaled error {:e}; unmatched {} / {}", m.max_error, m.unmatched_left.len(), m.unmatched_right.len()),
        ),
        Check::new(
            &format!("{label} infinite-zero flag matches"),
            fast.has_infinite_zero == direct.has_infinite_zero,
            format!("{} vs {}", fast.has_infinite_zero, direct.has_infinite_zero),
        ),
        Check::new(
            &format!("{label} transfer rank matches"),
            fast.normal_rank_tf == direct.normal_rank_tf,
            format!("{} vs {}", fast.normal_rank_tf, direct.normal_rank_tf),
        ),
    ]
}

fn homog(model: &Model, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    let hn = homogeneous(model)?;
    let fast = homogeneous_zero_report(&hn, zopts)?;
    let direct = invariant_zeros(&network(model)?, zopts)?;
    let interconnection = invariant_zeros(&hn.coupling.as_state_space(), zopts)?;
    let checks = equivalence_checks("homogeneous", &fast, &direct, zopts.tol.matching);
    Ok(Outcome {
        results: json!({
            "agent": {
                "numerator": complexes(hn.agent.num().coeffs()),
                "denominator": complexes(hn.agent.den().coeffs()),
                "degree": hn.agent.degree(),
            },
            "count": hn.count,
            "interconnection": ZeroSummary::from(&interconnection),
            "zeros": ZeroSummary::from(&fast),
            "direct": ZeroSummary::from(&direct),
        }),
        checks,
    })
}

fn circulant(model: &Model, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    let spec = circulant_spec(model)?;
    let hn = homogeneous(model)?;
    let c = &model.coupling;
    let cz = circulant_zero_report(&hn.agent, &spec, &c.r, &c.s, &c.d, zopts)?;
    let direct = invariant_zeros(&network(model)?, zopts)?;
    let residual = diagonalization_residual(&spec);
    let scale = spec.matrix().norm();
    let mut checks = equivalence_checks("circulant", &cz.report, &direct, zopts.tol.matching);
    checks.push(Check::new(
        "Fourier basis diagonalizes L",
        residual <= 1e-10 * scale.max(f64::MIN_POSITIVE),
        format!("residual {residual:e}, |L| {scale:e}"),
    ));
    Ok(Outcome {
        results: json!({
            "first_row": spec.c,
            "eigenvalues": complexes(&cz.eigenvalues),
            "coupling_zeros": complexes(&cz.w),
            "zeros": ZeroSummary::from(&cz.report),
            "direct": ZeroSummary::from(&direct),
            "diagonalization_residual": residual,
        }),
        checks,
    })
}

fn assembly_check(sys: &StateSpace<f64>, t: usize, seed: u64) -> Result<Check, CliError> {
    let blk = block_system(sys, t)?;
    let reach = 1.0 + spectral_radius(&blk.system.a);
    let (mut worst, mut evaluated) = (0.0f64, 0);
    for zeta in sample_points(seed ^ 0xb10c, 5, 1.1 * reach, 3.0 * reach) {
        if let (Ok(a), Ok(b)) = (blocked_transfer_eval(&blk, zeta), blocked_transfer_assembly(sys, t, zeta)) {
            worst = worst.max((a - &b).norm() / b.norm().max(f64::MIN_POSITIVE));
            evaluated += 1;
        }
    }
    Ok(Check::new(
        "blocked transfer equals its assembly",
        evaluated > 0 && worst <= 1e-8,
        format!("{evaluated} points, max relative error {worst:e}"),
    ))
}

fn block_outcome(sys: &StateSpace<f64>, t: usize, zopts: &ZeroOptions<f64>) -> Result<(Value, Vec<Check>), CliError> {
    let rep = correspondence_report(sys, t, zopts)?;
    let mut checks = vec![Check::new("nonzero blocked zeros are T-th powers", rep.nonzero_match, rep.details.join("; "))];
    // only meaningful for a minimal realization
    if let (Some(origin), Some(infinity)) = (rep.origin_match, rep.infinity_match) {
        checks.push(Check::new(
            "origin zero preserved",
            origin,
            format!("{} vs {}", rep.unblocked.has_origin_zero, rep.blocked.has_origin_zero),
        ));
        checks.push(Check::new(
            "infinite zero preserved",
            infinity,
            format!("{} vs {}", rep.unblocked.has_infinite_zero, rep.blocked.has_infinite_zero),
        ));
    }
    checks.push(assembly_check(sys, t, zopts.seed)?);
    let results = json!({
        "block": t,
        "minimal": rep.minimal,
        "unblocked": ZeroSummary::from(&rep.unblocked),
        "blocked": ZeroSummary::from(&rep.blocked),
        "blocked_nonzero": complexes(&rep.blocked.nonzero_locations()),
        "details": rep.details,
    });
    Ok((results, checks))
}

fn block(model: &Model, t: usize, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    let (results, checks) = block_outcome(&network(model)?, t, zopts)?;
    Ok(Outcome { results, checks })
}

fn siso_strictly_proper_coupling(model: &Model) -> Result<(), CliError> {
    let c = &model.coupling;
    if c.inputs() != 1 || c.outputs() != 1 || c.d.iter().any(|&v| v != 0.0) {
        return Err(CliError::Hypothesis(format!(
            "the zero-free design condition needs a single-input single-output coupling with D = 0, got {}×{} with D = {:?}",
            c.outputs(),
            c.inputs(),
            c.d.as_slice()
        )));
    }
    Ok(())
}

fn design(model: &Model, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    siso_strictly_proper_coupling(model)?;
    let c = &model.coupling;
    let dr = design_check(&c.l, &c.r, &c.s)?;
    let interconnection = invariant_zeros(&c.as_state_space(), zopts)?;
    let n = c.l.nrows();
    let mut checks = Vec::new();
    if let (true, true, RelativeDegree::Finite(k)) = (dr.reachable, dr.observable, dr.relative_degree) {
        // a minimal SISO coupling has N − k finite zeros
        checks.push(Check::new(
            "coupling zero count is N minus the relative degree",
            interconnection.zero_count() == n - k.min(n),
            format!("{} zeros, N = {n}, relative degree {k}", interconnection.zero_count()),
        ));
    }
    if dr.zero_free {
        checks.push(Check::new(
            "zero-free coupling has no finite zeros",
            interconnection.finite_zeros.is_empty(),
            format!("{} zeros", interconnection.zero_count()),
        ));
    }
    let relative_degree = match dr.relative_degree {
        RelativeDegree::Finite(k) => json!(k),
        RelativeDegree::Infinite => json!("infinite"),
    };
    Ok(Outcome {
        results: json!({
            "reachable": dr.reachable,
            "observable": dr.observable,
            "relative_degree": relative_degree,
            "agents": n,
            "zero_free": dr.zero_free,
            "interconnection": ZeroSummary::from(&interconnection),
        }),
        checks,
    })
}

fn verify(model: &Model, zopts: &ZeroOptions<f64>) -> Result<Outcome, CliError> {
    let sys = network(model)?;
    let direct = invariant_zeros(&sys, zopts)?;
    let mut checks = zero_checks(&sys, &direct, zopts)?;
    let mut skipped = Vec::new();
    let mut sections = serde_json::Map::new();
    sections.insert("zeros".into(), json!(ZeroSummary::from(&direct)));

    match homogeneous(model) {
        Ok(hn) => {
            let fast = homogeneous_zero_report(&hn, zopts)?;
            checks.extend(equivalence_checks("homogeneous", &fast, &direct, zopts.tol.matching));
            checks.push(rank_identity(&hn, &sys, zopts));
            let d = &hn.coupling.d;
            if numerical_rank(d) == d.nrows().min(d.ncols()) {
                let mp = minimum_phase_verdict(&hn, zopts)?;
                let informative = mp.reason != VerdictReason::Direct && mp.verdict != Verdict::Inconclusive;
                if informative {
                    checks.push(Check::new(
                        "minimum-phase verdict agrees with the network zeros",
                        mp.direct == Verdict::Inconclusive || mp.verdict == mp.direct,
                        format!("{} by {}, direct {}", mp.verdict, mp.reason, mp.direct),
                    ));
                }
                sections.insert(
                    "minimum_phase".into(),
                    json!({
                        "verdict": mp.verdict.to_string(),
                        "reason": mp.reason.to_string(),
                        "agent_class": mp.classification.class.to_string(),
                        "direct": mp.direct.to_string(),
                    }),
                );
            } else {
                skipped.push("minimum-phase verdict: D is not of full rank");
            }
            match (circulant_spec(model), circulant(model, zopts)) {
                (Ok(_), Ok(out)) => checks.extend(out.checks),
                (Ok(_), Err(CliError::Hypothesis(_))) => skipped.push("circulant path: D is not square of full rank"),
                (Ok(_), Err(e)) => return Err(e),
                (Err(_), _) => skipped.push("circulant path: L is not circulant"),
            }
        }
        Err(CliError::Hypothesis(_)) => skipped.push("homogeneous path: agents are not identical SISO systems"),
        Err(e) => return Err(e),
    }

    let (blocked, block_checks) = block_outcome(&sys, 2, zopts)?;
    checks.extend(block_checks);
    sections.insert("blocked".into(), blocked);

    match design(model, zopts) {
        Ok(out) => {
            checks.extend(out.checks);
            sections.insert("design".into(), out.results);
        }
        Err(CliError::Hypothesis(_)) => skipped.push("design condition: coupling is not SISO with D = 0"),
        Err(e) => return Err(e),
    }
    sections.insert("skipped".into(), json!(skipped));
    Ok(Outcome { results: Value::Object(sections), checks })
}

/// `rank Π_net(z) = N(n − 1) + rank` of the reduced matrix at seeded points.
fn rank_identity(hn: &HomogeneousNetwork<f64>, sys: &StateSpace<f64>, zopts: &ZeroOptions<f64>) -> Check {
    let offset = hn.count * (hn.agent_degree() - 1);
    let radius = 1.0 + spectral_radius(&sys.a);
    let mut bad = Vec::new();
    let points = sample_points(zopts.seed ^ 0x5eed, zopts.samples, 0.2, 2.0 * radius);
    for &z in &points {
        let lhs = numerical_rank_c(&pencil_at(sys, z));
        let rhs = offset + numerical_rank_c(&hn.reduced_matrix(z));
        if lhs != rhs {
            bad.push(format!("{z}: {lhs} vs {rhs}"));
        }
    }
    Check::new(
        "network rank splits into agent and reduced parts",
        bad.is_empty(),
        if bad.is_empty() { format!("{} points", points.len()) } else { bad.join("; ") },
    )
}
