//! `hypdel`: validate, check, solve and export hyperbolic Delaunay
//! instances.
//!
//! Exit codes: 0 success, 1 unreadable input, 2 invalid complex, 3 target
//! rejected, 4 infeasible, 5 solver did not converge.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypdel::export::{export_obj, export_svg, SvgOptions};
use hypdel::feasibility::DEFAULT_EPS_MIN;
use hypdel::functionals::{
    check_target, feasibility_bruteforce, TargetCheck, DEFAULT_BRUTE_FORCE_MAX_FACES, IDENTITY_TOL,
};
use hypdel::io::{parse_instance, parse_solution, to_json, InstanceFile, SolutionFile};
use hypdel::realization::{
    build_prisms, circumcircle_angles, develop, expected_top_dihedral, holonomy_report,
    prism_pair_angles,
};
use hypdel::{instances, margin_lp, uniformize, Error, LpVerdict, SolveOptions, SurfaceComplex};
use hypdel::{EdgeTarget, UniformSolution};
use serde::Serialize;
use serde_json::{json, Value};

const ANGLE_TOL: f64 = 1e-8;
const LENGTH_TOL: f64 = 1e-9;
const DIHEDRAL_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "hypdel",
    version,
    about = "Hyperbolic Delaunay structures from intersection angles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the complex and the target predicates.
    Validate { file: PathBuf },
    /// Decide feasibility with the margin LP and, for small complexes, by
    /// enumerating face subsets.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        brute_force_max: usize,
    },
    /// Compute the uniform angle system and verify it.
    Solve {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Develop a solution into the Poincaré disk.
    Layout {
        solution: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        circumcircles: bool,
    },
    /// Build and check the ideal prisms of a solution.
    Prisms {
        solution: PathBuf,
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Write an instance file: the symmetric one-vertex surface, or a seeded
    /// random surface with a feasible target.
    Gen {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, conflicts_with_all = ["seed", "random_target"])]
        one_vertex: bool,
        #[arg(long, requires = "random_target")]
        seed: Option<u64>,
        #[arg(long, requires = "seed")]
        random_target: bool,
        #[arg(long, default_value_t = 12)]
        faces: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    detail: Value,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Complex(_) => (2, "invalid_complex"),
            Error::NotDelaunay { .. } | Error::DimensionMismatch { .. } => (3, "target_rejected"),
            Error::Infeasible { .. } => (4, "infeasible"),
            Error::MaxIterExceeded { .. } | Error::NumericalBreakdown(_) => (5, "not_converged"),
            _ => (1, "invalid_input"),
        };
        let detail = match &e {
            Error::MaxIterExceeded {
                iterations,
                residual,
                min_margin,
            } => json!({"iterations": iterations, "residual": residual, "min_margin": min_margin}),
            Error::NotDelaunay { edge, value } => json!({"edge": edge, "psi": value}),
            _ => Value::Null,
        };
        Failure::new(code, kind, e.to_string()).with_detail(detail)
    }
}

type CmdResult = Result<(), Failure>;

/// A measured quantity with the tolerance it was checked against.
#[derive(Serialize)]
struct Measured {
    value: f64,
    tolerance: f64,
    ok: bool,
}

impl Measured {
    fn at_most(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            ok: value <= tolerance,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(1, "io", format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text)
        .map_err(|e| Failure::new(1, "io", format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(SurfaceComplex, EdgeTarget), Failure> {
    let inst = parse_instance(&read(path)?)?;
    let c = inst.complex()?;
    let p = inst.target()?;
    if p.len() != c.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: c.edge_count(),
            found: p.len(),
        }
        .into());
    }
    Ok((c, p))
}

fn load_solution(path: &Path) -> Result<(SurfaceComplex, UniformSolution), Failure> {
    let file = parse_solution(&read(path)?)?;
    Ok((file.complex()?, file.solution()?))
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn instance_summary(c: &SurfaceComplex) -> Value {
    let (chi, genus) = c.euler_and_genus();
    json!({
        "faces": c.face_count(),
        "edges": c.edge_count(),
        "vertices": c.vertex_count(),
        "euler_characteristic": chi,
        "genus": genus,
    })
}

fn target_summary(t: &TargetCheck) -> Value {
    json!({
        "delaunay": t.delaunay,
        "nonsingular": t.nonsingular,
        "nonsingular_tolerance": IDENTITY_TOL,
        "cone_angles": t.cone_angles,
    })
}

fn print(report: &Value) {
    print!("{}", to_json(report));
}

fn validate(file: &Path) -> CmdResult {
    let (c, p) = load_instance(file)?;
    let t = check_target(&p, &c)?;
    print(&json!({"instance": instance_summary(&c), "target": target_summary(&t)}));
    p.require_delaunay()?;
    Ok(())
}

fn feasibility_report(
    c: &SurfaceComplex,
    p: &EdgeTarget,
    brute_force_max: usize,
) -> Result<(Value, bool, Value), Failure> {
    let lp = margin_lp(p, c, DEFAULT_EPS_MIN)?;
    let mut feasible = lp.status == LpVerdict::Feasible;
    let mut witness = Value::Null;
    let brute = if c.face_count() <= brute_force_max {
        match feasibility_bruteforce(p, c, brute_force_max) {
            Ok(bf) => {
                feasible &= bf.feasible;
                witness = json!(bf.witness);
                json!({
                    "feasible": bf.feasible,
                    "margin": bf.margin,
                    "minimizing_subset": bf.minimizer,
                    "witness": bf.witness,
                    "agrees_with_lp": bf.feasible == (lp.status == LpVerdict::Feasible),
                })
            }
            Err(Error::TooLarge { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        }
    } else {
        Value::Null
    };
    let report = json!({
        "lp": {
            "epsilon_star": lp.epsilon_star,
            "eps_min": DEFAULT_EPS_MIN,
            "status": lp.status,
            "pivots": lp.pivots,
        },
        "brute_force": brute,
    });
    Ok((report, feasible, witness))
}

fn check(file: &Path, brute_force_max: usize) -> CmdResult {
    let (c, p) = load_instance(file)?;
    let t = check_target(&p, &c)?;
    p.require_delaunay()?;
    let (feas, feasible, witness) = feasibility_report(&c, &p, brute_force_max)?;
    print(&json!({
        "instance": instance_summary(&c),
        "target": target_summary(&t),
        "feasibility": feas,
    }));
    if feasible {
        Ok(())
    } else {
        Err(Failure::new(4, "infeasible", "target is not feasible")
            .with_detail(json!({"witness": witness})))
    }
}

fn verification(c: &SurfaceComplex, u: &UniformSolution) -> Result<Value, Failure> {
    let layout = develop(u, c, &c.dual_spanning_tree(0))?;
    let angles = circumcircle_angles(&layout, c)?;
    let prop2 = max_abs(
        angles
            .iter()
            .zip(u.target_echo.psi())
            .map(|(a, psi)| a - (PI - psi)),
    );
    let h = holonomy_report(&layout, u, c);
    Ok(json!({
        "circumcircle_angle_error": Measured::at_most(prop2, ANGLE_TOL),
        "holonomy_defect": Measured::at_most(h.max_vertex_defect(), ANGLE_TOL),
        "holonomy_loop_closure": Measured::at_most(h.max_loop_closure(), ANGLE_TOL),
        "non_tree_edge_mismatch": Measured::at_most(h.max_edge_mismatch(), LENGTH_TOL),
        "vertex_angles": h.vertex_angles,
    }))
}

fn solve(file: &Path, output: Option<&Path>, tol: f64, max_iter: usize) -> CmdResult {
    let (c, p) = load_instance(file)?;
    p.require_delaunay()?;
    let opts = SolveOptions {
        tol,
        max_iter,
        ..SolveOptions::default()
    };
    let u = match uniformize(&p, &c, &opts) {
        Err(Error::Infeasible { epsilon }) => {
            let (_, _, witness) = feasibility_report(&c, &p, DEFAULT_BRUTE_FORCE_MAX_FACES)?;
            return Err(Failure::new(
                4,
                "infeasible",
                format!("target is infeasible (LP margin {epsilon:e})"),
            )
            .with_detail(json!({"epsilon_star": epsilon, "witness": witness})));
        }
        other => other?,
    };
    let cert = hypdel::certify(&u, &c, tol);
    let report = json!({
        "instance": instance_summary(&c),
        "solve": {
            "iterations": u.iterations,
            "residual": Measured::at_most(u.residual, tol),
            "gradient_norm": Measured::at_most(u.gradient_norm, 10.0 * tol),
            "objective": u.objective,
        },
        "certificate": cert,
        "verification": verification(&c, &u)?,
    });
    if let Some(path) = output {
        write(path, &to_json(&SolutionFile::new(&c, &u)))?;
    }
    print(&report);
    Ok(())
}

fn layout(solution: &Path, svg: Option<&Path>, circumcircles: bool) -> CmdResult {
    let (c, u) = load_solution(solution)?;
    let report = json!({
        "instance": instance_summary(&c),
        "verification": verification(&c, &u)?,
    });
    if let Some(path) = svg {
        let layout = develop(&u, &c, &c.dual_spanning_tree(0))?;
        write(path, &export_svg(&layout, &c, SvgOptions { circumcircles }))?;
    }
    print(&report);
    Ok(())
}

fn prisms(solution: &Path, obj: Option<&Path>) -> CmdResult {
    let (c, u) = load_solution(solution)?;
    let layout = develop(&u, &c, &c.dual_spanning_tree(0))?;
    let prisms = build_prisms(&layout);
    let (mut vertical, mut top) = (0.0f64, 0.0f64);
    for (f, prism) in prisms.iter().enumerate() {
        let d = u.angles.face(f);
        for i in 0..3 {
            vertical = vertical.max((prism.vertical[i] - d[i]).abs());
            top = top.max((prism.top[i] - expected_top_dihedral(d, i)).abs());
            top = top.max((prism.bottom[i] - expected_top_dihedral(d, i)).abs());
        }
    }
    let pair = max_abs(
        prism_pair_angles(&layout, &c)
            .iter()
            .zip(u.target_echo.theta())
            .map(|(a, t)| a - t),
    );
    print(&json!({
        "instance": instance_summary(&c),
        "prisms": prisms.len(),
        "total_volume": u.objective,
        "vertical_dihedral_error": Measured::at_most(vertical, DIHEDRAL_TOL),
        "top_dihedral_error": Measured::at_most(top, DIHEDRAL_TOL),
        "edge_dihedral_error": Measured::at_most(pair, ANGLE_TOL),
    }));
    if let Some(path) = obj {
        write(path, &export_obj(&layout))?;
    }
    Ok(())
}

fn gen(
    genus: usize,
    one_vertex: bool,
    seed: Option<u64>,
    faces: usize,
    output: Option<&Path>,
) -> CmdResult {
    if genus < 2 {
        return Err(Failure::new(1, "invalid_input", "genus must be at least 2"));
    }
    let (c, p) = match seed {
        Some(seed) => {
            let base = 4 * genus - 2;
            if faces < base || (faces - base) % 2 != 0 {
                return Err(Failure::new(
                    1,
                    "invalid_input",
                    format!("genus {genus} needs an even face count of at least {base}"),
                ));
            }
            instances::seeded_round_trip(seed, genus, faces)
        }
        None if !one_vertex => {
            return Err(Failure::new(
                1,
                "invalid_input",
                "pass --one-vertex or --seed with --random-target",
            ));
        }
        None => {
            let c = instances::one_vertex_genus(genus);
            let p = instances::symmetric_target(&c);
            (c, p)
        }
    };
    let text = to_json(&InstanceFile::new(&c, &p));
    match output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Check {
            file,
            brute_force_max,
        } => check(file, *brute_force_max),
        Command::Solve {
            file,
            output,
            tol,
            max_iter,
        } => solve(file, output.as_deref(), *tol, *max_iter),
        Command::Layout {
            solution,
            svg,
            circumcircles,
        } => layout(solution, svg.as_deref(), *circumcircles),
        Command::Prisms { solution, obj } => prisms(solution, obj.as_deref()),
        Command::Gen {
            genus,
            one_vertex,
            seed,
            random_target: _,
            faces,
            output,
        } => gen(*genus, *one_vertex, *seed, *faces, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut err = json!({"error": f.kind, "message": f.message, "exit_code": f.code});
            if !f.detail.is_null() {
                err["detail"] = f.detail;
            }
            eprint!("{}", to_json(&err));
            ExitCode::from(f.code)
        }
    }
}
