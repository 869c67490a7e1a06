use std::io::Write;

use anyhow::Context as _;
use lindstedt::bifurcation::{
    axial_thresholds, classify_region, critical_surface_mesh, halo_threshold, solve_eta, EtaRoot, EvalPoint,
};
use lindstedt::lp::{build_solution, extract_bifurcation_coeffs, BuildConfig, CoefficientRecord, EtaMode};
use lindstedt::orbit::{classify_orbit, delta_value, refine_eta, sample_trajectory, OrbitParams};
use lindstedt::params::{CouplingCase, CouplingConstants, LinearConstants};
use lindstedt::validation::{validate, IntegratorConfig, ValidationReport};
use lindstedt::{Context, Error, Form, Solution};
use serde::Serialize;

use crate::config::{self, Amplitudes, BifurcateCommand, Command, EtaChoice, RunConfig};

const DEFAULT_ORBIT_ORDER: u32 = 5;
const FORM_ORDER: u32 = 3;

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Params { sys } => params(&RunConfig::resolve(&sys)?),
        Command::Build { sys, eta } => {
            let run = RunConfig::resolve(&sys)?;
            let eta = eta.or(Amplitudes::resolve(&Default::default(), &run.file)?.eta.and_then(|c| match c {
                EtaChoice::Value(v) => Some(v),
                EtaChoice::Root { .. } => None,
            }));
            build(&run, eta)
        }
        Command::Bifurcate { action } => match action {
            BifurcateCommand::Solve { sys, amp } => {
                let run = RunConfig::resolve(&sys)?;
                let amp = Amplitudes::resolve(&amp, &run.file)?;
                bifurcate_solve(&run, &amp)
            }
            BifurcateCommand::Region { sys, amp } => {
                let run = RunConfig::resolve(&sys)?;
                let amp = Amplitudes::resolve(&amp, &run.file)?;
                let form = form(&run, run.case)?;
                write_json(&run, &classify_region(&form, &eval_point(&run, &amp))?)
            }
            BifurcateCommand::Threshold { sys } => threshold(&RunConfig::resolve(&sys)?),
        },
        Command::Surface { sys, mesh } => {
            let run = RunConfig::resolve(&sys)?;
            let m = config::mesh(&mesh, &run.file);
            let form = form(&run, run.case)?;
            let mesh = critical_surface_mesh(&form, m.surface, m.sheet, run.e, &m.grid)?;
            if let Some(d) = &mesh.diagnostic {
                eprintln!("note: {d}");
            }
            eprintln!("{} points on {} ({})", mesh.points.len(), mesh.surface, mesh.sheet.label());
            write_with(&run, |w| mesh.write_csv(w))
        }
        Command::Orbit { sys, amp, span } => {
            let run = RunConfig::resolve(&sys)?;
            let amp = Amplitudes::resolve(&amp, &run.file)?;
            let (span, samples) = config::span(&span, &run.file, 200)?;
            orbit(&run, &amp, span, samples)
        }
        Command::Validate { sys, amp, span } => {
            let run = RunConfig::resolve(&sys)?;
            let amp = Amplitudes::resolve(&amp, &run.file)?;
            let (span, samples) = config::span(&span, &run.file, 100)?;
            validate_orbit(&run, &amp, span, samples)
        }
    }
}

fn write_with(run: &RunConfig, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> anyhow::Result<()> {
    match config::open_out(&run.out)? {
        Some(file) => {
            let mut w = std::io::BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<S: Serialize>(run: &RunConfig, value: &S) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing output")?;
    write_with(run, |w| writeln!(w, "{text}"))
}

fn context(run: &RunConfig) -> lindstedt::Result<Context> {
    Context::new(run.mu, run.point)
}

fn form(run: &RunConfig, case: CouplingCase) -> lindstedt::Result<Form> {
    let sol = build_solution(&context(run)?, case, BuildConfig::symbolic(FORM_ORDER))?;
    extract_bifurcation_coeffs(&sol)
}

fn eval_point(run: &RunConfig, amp: &Amplitudes) -> EvalPoint<f64> {
    EvalPoint::new(amp.a1, amp.a2, amp.a3_sq(), run.e)
}

#[derive(Serialize)]
struct ParamsOut<'a> {
    mu: f64,
    e: f64,
    point: String,
    gamma: f64,
    /// `c2..=c_{n_poly_max+1}`.
    c: &'a [f64],
    linear: LinearConstants<f64>,
    coupling: Vec<CouplingConstants<f64>>,
}

fn params(run: &RunConfig) -> anyhow::Result<()> {
    let ctx = context(run)?;
    let out = ParamsOut {
        mu: ctx.mu,
        e: run.e,
        point: ctx.point.to_string(),
        gamma: ctx.gamma,
        c: &ctx.c[2..],
        linear: ctx.linear,
        coupling: CouplingCase::ALL.iter().map(|&c| ctx.coupling(c)).collect(),
    };
    write_json(run, &out)
}

#[derive(Serialize)]
struct BuildOut {
    mu: f64,
    point: String,
    case: String,
    order: u32,
    eta: Option<f64>,
    eta_degree: Option<usize>,
    completed_order: u32,
    delta_undetermined: bool,
    coefficients: Vec<CoefficientRecord>,
}

fn build_config(run: &RunConfig, order: u32, eta: Option<f64>) -> BuildConfig<f64> {
    match eta {
        Some(v) => BuildConfig::numeric(order, v),
        None => {
            let cfg = BuildConfig::symbolic(order);
            match run.eta_degree {
                Some(d) => cfg.with_eta_degree(d),
                None => cfg,
            }
        }
    }
}

fn build(run: &RunConfig, eta: Option<f64>) -> anyhow::Result<()> {
    let order = run.order.unwrap_or(FORM_ORDER);
    let sol = build_solution(&context(run)?, run.case, build_config(run, order, eta))?;
    if sol.delta_undetermined {
        eprintln!("note: eta = 0 leaves some Delta corrections free; they are stored as zero");
    }
    let eta_degree = match sol.config.eta {
        EtaMode::Symbolic { degree } => Some(degree),
        EtaMode::Numeric(_) => None,
    };
    let out = BuildOut {
        mu: run.mu,
        point: run.point.to_string(),
        case: run.case.to_string(),
        order,
        eta,
        eta_degree,
        completed_order: sol.completed_order,
        delta_undetermined: sol.delta_undetermined,
        coefficients: sol.records(),
    };
    write_json(run, &out)
}

#[derive(Serialize)]
struct SolveOut {
    case: String,
    point: EvalPoint<f64>,
    form: Form,
    quartic: [f64; 3],
    count: usize,
    degenerate: bool,
    roots: Vec<EtaRoot<f64>>,
    positive: Vec<f64>,
}

fn bifurcate_solve(run: &RunConfig, amp: &Amplitudes) -> anyhow::Result<()> {
    let form = form(run, run.case)?;
    let pt = eval_point(run, amp);
    let (a, b, c) = lindstedt::bifurcation::quartic_at(&form, &pt)?;
    let sols = solve_eta(&form, &pt)?;
    let out = SolveOut {
        case: run.case.to_string(),
        point: pt,
        form,
        quartic: [a, b, c],
        count: sols.count(),
        degenerate: sols.degenerate,
        positive: sols.positive(),
        roots: sols.roots,
    };
    write_json(run, &out)
}

#[derive(Serialize)]
struct ThresholdOut {
    case: String,
    e: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha1_crit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha2_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha1_cri: Option<f64>,
}

fn threshold(run: &RunConfig) -> anyhow::Result<()> {
    let mut out = ThresholdOut { case: run.case.to_string(), e: run.e, alpha1_crit: None, alpha2_max: None, alpha1_cri: None };
    match run.case {
        CouplingCase::XToZ => out.alpha1_crit = Some(halo_threshold(&form(run, CouplingCase::XToZ)?, run.e)?),
        CouplingCase::YToZ | CouplingCase::ZToY => {
            let ax = axial_thresholds(&form(run, CouplingCase::ZToY)?, &form(run, CouplingCase::YToZ)?, run.e)?;
            if ax.alpha2_max.is_none() && ax.alpha1_cri.is_none() {
                return Err(Error::NoBifurcation("no axial threshold on either axis".into()).into());
            }
            out.alpha2_max = ax.alpha2_max;
            out.alpha1_cri = ax.alpha1_cri;
        }
    }
    write_json(run, &out)
}

struct PreparedOrbit {
    sol: Solution,
    params: OrbitParams<f64>,
    class: &'static str,
}

/// Builds the solution an orbit needs and fixes `eta`.
fn prepare(run: &RunConfig, amp: &Amplitudes) -> anyhow::Result<PreparedOrbit> {
    let ctx = context(run)?;
    let order = run.order.unwrap_or(DEFAULT_ORBIT_ORDER);
    let mut active = [amp.a1 != 0.0, amp.a2 != 0.0, amp.a3 != 0.0, run.e != 0.0];
    if !active[..3].iter().any(|&a| a) {
        active[0] = true;
    }
    let mut params = OrbitParams::new(amp.a1, amp.a2, amp.a3, run.e, 0.0);
    if amp.transit {
        params = params.transit();
    }
    let sol = match amp.eta {
        None => build_solution(&ctx, run.case, BuildConfig::numeric(order, 0.0).with_active(active))?,
        Some(EtaChoice::Value(v)) => {
            params = params.with_eta(v);
            build_solution(&ctx, run.case, BuildConfig::numeric(order, v).with_active(active))?
        }
        Some(EtaChoice::Root { branch, negative }) => {
            let sols = solve_eta(&form(run, run.case)?, &eval_point(run, amp))?;
            let eta0 = sols.get(branch, !negative).ok_or_else(|| {
                Error::NoBifurcation(format!("no {} root with the requested sign at these amplitudes", branch_label(branch)))
            })?;
            let sol = build_solution(&ctx, run.case, build_config(run, order, None).with_active(active))?;
            params = params.with_eta(refine_eta(&sol, &params, eta0)?);
            eprintln!("eta = {:.9e} (order-3 root {:.9e})", params.eta, eta0);
            sol
        }
    };
    let class = if amp.a1 == 0.0 && amp.a2 == 0.0 && amp.a3 == 0.0 {
        "equilibrium"
    } else {
        classify_orbit(&params, run.case, Some(delta_value(&sol, &params)?))?.label()
    };
    Ok(PreparedOrbit { sol, params, class })
}

fn branch_label(b: lindstedt::bifurcation::Branch) -> &'static str {
    match b {
        lindstedt::bifurcation::Branch::SmallBranch => "small-branch",
        lindstedt::bifurcation::Branch::LargeBranch => "large-branch",
    }
}

fn orbit(run: &RunConfig, amp: &Amplitudes, span: f64, samples: usize) -> anyhow::Result<()> {
    let p = prepare(run, amp)?;
    eprintln!("{} orbit at order {}", p.class, p.sol.completed_order);
    let grid: Vec<f64> = (0..=samples).map(|i| span * i as f64 / samples as f64).collect();
    let traj = sample_trajectory(&p.sol, &p.params, &grid)?;
    let frame = p.sol.ctx.frame();
    write_with(run, |w| {
        writeln!(w, "f,x,y,z,vx,vy,vz,X,Y,Z,VX,VY,VZ")?;
        for sv in &traj {
            let g = frame.to_global(&sv.state);
            write!(w, "{:.9e}", sv.f)?;
            for v in sv.state.iter().chain(g.iter()) {
                // adding zero folds -0 into 0
                write!(w, ",{:.9e}", v + 0.0)?;
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct ValidateOut {
    class: &'static str,
    case: String,
    span: f64,
    samples: usize,
    report: ValidationReport<f64>,
}

fn validate_orbit(run: &RunConfig, amp: &Amplitudes, span: f64, samples: usize) -> anyhow::Result<()> {
    let p = prepare(run, amp)?;
    let report = validate(&p.sol, &p.params, span, samples, &IntegratorConfig::default())?;
    let out = ValidateOut { class: p.class, case: run.case.to_string(), span, samples, report };
    write_json(run, &out)
}
