//! `jacobi`: run verification suites, evaluate thetas and Jacobi forms,
//! decompose products of unary Jacobi forms and scan their coefficients.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jacobi_core::jacobi::qseries::QSeriesJson;
use jacobi_core::jacobi::{
    conjecture_scan, jacobi_from_mf, p_coefficients, product_decompose, theta_contraction, JacobiForm,
    QExpansionJson, QSeries, ScanStatus,
};
use jacobi_core::lattice::LatticeJson;
use jacobi_core::realspace::{split_point, GrassmannianJson};
use jacobi_core::theta::{jacobi_theta_detailed, theta_lm, ThetaRequest};
use jacobi_core::tolerances::{FD_STEP, THETA_TOL};
use jacobi_core::verify::{run_verify, Suite, VerifyConfig};
use jacobi_core::{GrassmannianPoint, Lattice, PrimitiveSublattice};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "jacobi", version, about = "Jacobi forms of lattice index: verification and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one residual suite and print a JSON-lines report.
    Verify {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        grassmannian: Option<PathBuf>,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides the suite's residual threshold.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = THETA_TOL)]
        theta_tol: f64,
        #[arg(long, default_value_t = FD_STEP)]
        fd_step: f64,
        #[arg(long, default_value_t = 6)]
        word_max: usize,
        /// `{"matrix": [[..], ..]}`, for the kernel-invariance suite.
        #[arg(long)]
        isometry: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Match every product coefficient against unary theta series.
    ConjectureScan {
        #[arg(long, default_value_t = 3)]
        m_max: i64,
        #[arg(long, default_value_t = 3)]
        n_max: i64,
        #[arg(long, default_value_t = 30)]
        q_prec: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a theta function or a Jacobi form at one point.
    Eval {
        entity: Entity,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        grassmannian: Option<PathBuf>,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        /// JSON list of `[re, im]` pairs; zero when omitted.
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        /// q-expansion JSON of the input form (jacobi, contraction).
        #[arg(long)]
        form: Option<PathBuf>,
        /// `{"basis": [[..], ..]}`, an n × c matrix whose columns span M (theta-lm, contraction).
        #[arg(long)]
        sublattice: Option<PathBuf>,
        #[arg(long, default_value_t = THETA_TOL)]
        theta_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of `θ_{r+2mZ}(τ,ζ) θ_{s+2nZ}(τ,ζ)`, or `P(F ⊗ H)` when both inputs are given.
    ProductDecompose {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 20)]
        q_prec: i64,
        /// JSON list of q-series, one per residue mod 2m.
        #[arg(long)]
        f: Option<PathBuf>,
        /// JSON list of q-series, one per residue mod 2n.
        #[arg(long)]
        h: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Entity {
    Theta,
    ThetaLm,
    Jacobi,
    Contraction,
}

/// Usage and configuration problems; mapped to exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Usage>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Run<T> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_lattice(path: &Path) -> Run<Lattice> {
    Ok(Lattice::try_from(read_json::<LatticeJson>(path)?)?)
}

fn read_point(l: &Lattice, path: Option<&PathBuf>) -> Run<GrassmannianPoint> {
    match path {
        Some(p) => Ok(GrassmannianPoint::from_json(l, &read_json::<GrassmannianJson>(p)?)?),
        None => Ok(GrassmannianPoint::standard(l)),
    }
}

fn int_matrix(rows: &[Vec<i64>], what: &str) -> Run<DMatrix<i64>> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Usage(format!("{what}: ragged matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Deserialize)]
struct MatrixJson {
    matrix: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct BasisJson {
    basis: Vec<Vec<i64>>,
}

fn parse_tau(s: &str) -> Run<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else {
        return Err(Usage(format!("--tau expects re,im; got {s:?}")));
    };
    Ok(Complex64::new(re.parse()?, im.parse()?))
}

fn parse_zeta(s: Option<&str>, n: usize) -> Run<DVector<Complex64>> {
    let Some(s) = s else {
        return Ok(DVector::zeros(n));
    };
    let pairs: Vec<[f64; 2]> = serde_json::from_str(s)?;
    if pairs.len() != n {
        return Err(Usage(format!("--zeta has {} entries, expected {n}", pairs.len())));
    }
    Ok(DVector::from_iterator(n, pairs.iter().map(|[a, b]| Complex64::new(*a, *b))))
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn emit(out: Option<&PathBuf>, text: &str) -> Run<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn verify(cmd: Command) -> Run<bool> {
    let Command::Verify {
        lattice,
        grassmannian,
        suite,
        samples,
        seed,
        tol,
        theta_tol,
        fd_step,
        word_max,
        isometry,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let l = read_lattice(&lattice)?;
    let mut cfg = VerifyConfig::new(&l, suite);
    if grassmannian.is_some() {
        cfg.point = Some(read_point(&l, grassmannian.as_ref())?);
    }
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.tolerance = tol;
    cfg.theta_tolerance = theta_tol;
    cfg.fd_step = fd_step;
    cfg.word_max = word_max;
    if let Some(p) = isometry {
        cfg.isometry = Some(int_matrix(&read_json::<MatrixJson>(&p)?.matrix, "isometry")?);
    }
    let report = run_verify(&cfg)?;
    emit(out.as_ref(), &report.to_json_lines())?;
    eprintln!("{}", report.summary_line());
    Ok(report.pass)
}

fn scan(m_max: i64, n_max: i64, q_prec: i64, out: Option<&PathBuf>) -> Run<bool> {
    let entries = conjecture_scan(m_max, n_max, q_prec)?;
    let mut text = String::new();
    for e in &entries {
        text.push_str(&serde_json::to_string(e)?);
        text.push('\n');
    }
    let matched = entries.iter().filter(|e| e.status == ScanStatus::Match).count();
    text.push_str(&serde_json::to_string(&json!({
        "m_max": m_max, "n_max": n_max, "q_prec": q_prec,
        "coefficients": entries.len(), "matched": matched,
    }))?);
    text.push('\n');
    emit(out, &text)?;
    eprintln!(
        "conjecture-scan: {matched}/{} nonzero coefficients matched a unary theta series up to q^{q_prec}",
        entries.len()
    );
    Ok(true)
}

fn eval(cmd: Command) -> Run<bool> {
    let Command::Eval { entity, lattice, grassmannian, tau, zeta, form, sublattice, theta_tol, out } = cmd else {
        unreachable!()
    };
    let l = read_lattice(&lattice)?;
    let v = read_point(&l, grassmannian.as_ref())?;
    let tau = parse_tau(&tau)?;
    let sub = || -> Run<PrimitiveSublattice> {
        let path = sublattice.as_ref().ok_or_else(|| Usage("--sublattice is required".into()))?;
        Ok(PrimitiveSublattice::new(&l, int_matrix(&read_json::<BasisJson>(path)?.basis, "sublattice")?)?)
    };
    let load_form = || -> Run<_> {
        let path = form.as_ref().ok_or_else(|| Usage("--form is required".into()))?;
        Ok(read_json::<QExpansionJson>(path)?.into_form(&l)?.with_theta_tol(theta_tol))
    };
    let value = match entity {
        Entity::Theta => {
            let z = parse_zeta(zeta.as_deref(), l.rank())?;
            let th = jacobi_theta_detailed(&ThetaRequest::new(&v, tau).zeta(z).tolerance(theta_tol))?;
            json!({
                "entity": "theta",
                "tau": cjson(tau),
                "values": th.values.coeffs.iter().map(|z| cjson(*z)).collect::<Vec<_>>(),
                "tolerance": theta_tol,
                "radius": th.radius,
                "points": th.points,
            })
        }
        Entity::ThetaLm => {
            let m = sub()?;
            let (_, u_perp) = split_point(&m, &v)?;
            let eta = parse_zeta(zeta.as_deref(), m.complement.rank())?;
            let t = theta_lm(&m, &u_perp, tau, &eta, theta_tol)?;
            let rows: Vec<Vec<Value>> = t.row_iter().map(|r| r.iter().map(|z| cjson(*z)).collect()).collect();
            json!({ "entity": "theta-lm", "tau": cjson(tau), "values": rows, "tolerance": theta_tol })
        }
        Entity::Jacobi => {
            let f = load_form()?;
            let z = parse_zeta(zeta.as_deref(), l.rank())?;
            let lift = jacobi_from_mf(&f, &l, &v)?.with_tolerance(theta_tol);
            let w = lift.weight2();
            json!({
                "entity": "jacobi",
                "tau": cjson(tau),
                "value": cjson(lift.eval(tau, &z)?),
                "weight2": [w.0, w.1],
                "tolerance": theta_tol,
            })
        }
        Entity::Contraction => {
            let f = load_form()?;
            let m = sub()?;
            let (_, u_perp) = split_point(&m, &v)?;
            let eta = parse_zeta(zeta.as_deref(), m.complement.rank())?;
            let g = theta_contraction(&f, &m, &u_perp, tau, &eta)?;
            json!({
                "entity": "contraction",
                "tau": cjson(tau),
                "values": g.coeffs.iter().map(|z| cjson(*z)).collect::<Vec<_>>(),
                "tolerance": theta_tol,
            })
        }
    };
    emit(out.as_ref(), &format!("{value}\n"))?;
    Ok(true)
}

fn read_series(path: &Path) -> Run<Vec<QSeries>> {
    let raw: Vec<QSeriesJson> = read_json(path)?;
    raw.iter().map(|j| QSeries::from_json(j).map_err(Usage::from)).collect()
}

fn decompose(m: i64, n: i64, q_prec: i64, f: Option<PathBuf>, h: Option<PathBuf>, out: Option<&PathBuf>) -> Run<bool> {
    let value = match (f, h) {
        (Some(f), Some(h)) => {
            let p = product_decompose(m, n, &read_series(&f)?, &read_series(&h)?, q_prec)?;
            json!({
                "m": m, "n": n, "q_prec": q_prec,
                "components": p.iter().map(|s| json!({ "json": s.to_json(), "display": s.to_string() })).collect::<Vec<_>>(),
            })
        }
        (None, None) => {
            let table = p_coefficients(m, n, q_prec)?;
            let rows: Vec<Value> = table
                .iter()
                .map(|((r, s), row)| {
                    json!({
                        "r": r, "s": s,
                        "terms": row.iter().map(|p| json!({ "t": p.t, "series": p.series.to_json(), "display": p.series.to_string() })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({ "m": m, "n": n, "q_prec": q_prec, "table": rows })
        }
        _ => return Err(Usage("--f and --h go together".into())),
    };
    emit(out, &format!("{value}\n"))?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        cmd @ Command::Verify { .. } => verify(cmd),
        Command::ConjectureScan { m_max, n_max, q_prec, out } => scan(m_max, n_max, q_prec, out.as_ref()),
        cmd @ Command::Eval { .. } => eval(cmd),
        Command::ProductDecompose { m, n, q_prec, f, h, out } => decompose(m, n, q_prec, f, h, out.as_ref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
