//! kaspinor: command-line front end for the ka-spinor engine.

use clap::{Args, Parser, Subcommand};
use ka_spinor::acceptance::{self, RunConfig};
use ka_spinor::algebra::Signature;
use ka_spinor::error::KaError;
use ka_spinor::instanton::{curving_residual, instanton_residual, ConditionCase};
use ka_spinor::json::{
    structure_from_json, structure_to_json, ConditionJson, MultivectorJson, SpinorJson,
    StructureDataJson, VerificationJson,
};
use ka_spinor::lowdim::{build_square_from_data, extract_structure, SquareCase};
use ka_spinor::pairing;
use ka_spinor::rep::CliffordRep;
use ka_spinor::square::{
    bilinear_square, hermitian_square, verify_square, SquareKind, SquareResult, VERIFY_TOL,
};
use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kaspinor",
    about = "Clifford/Kähler-Atiyah engine: spinor squares, pairing tables, instanton and curving conditions",
    version
)]
struct Cli {
    /// Root seed for all sampling (falls back to $KA_SPINOR_SEED, then 42)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Verification tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output format
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv", "text"])]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SigArg {
    /// Signature as p,q
    #[arg(long, value_parser = parse_sig)]
    sig: Signature,
}

fn parse_sig(text: &str) -> Result<Signature, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected p,q".to_string());
    }
    let p: u32 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let q: u32 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Signature::new(p, q))
}

fn parse_kappa(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected re,im".to_string());
    }
    let re: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(re, im))
}

#[derive(Subcommand)]
enum Command {
    /// Run the full acceptance sweep; exit code 0 iff every criterion passes
    Sweep {
        /// Restrict to one signature
        #[arg(long, value_parser = parse_sig)]
        sig: Option<Signature>,
        /// Override per-criterion sample counts
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Square a spinor from a JSON file
    Square {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, value_parser = ["hermitian", "bilinear"])]
        kind: String,
        /// Spinor JSON file
        #[arg(long)]
        spinor: PathBuf,
        /// Unit phase re,im of the Hermitian square map
        #[arg(long, value_parser = parse_kappa)]
        kappa: Option<Complex64>,
        /// Module label for odd d
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        ell: Option<String>,
        /// Adjoint type of the pairing (defaults to the available one)
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        adjoint: Option<String>,
    },
    /// Verify a form as a spinor square; prints the residual map
    Verify {
        /// Multivector JSON file holding the candidate square
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, value_parser = ["hermitian", "bilinear"])]
        kind: String,
        #[arg(long, value_parser = parse_kappa)]
        kappa: Option<Complex64>,
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        ell: Option<String>,
        /// Chirality to include the chirality equation (even d)
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        mu: Option<String>,
        /// Optional witness β JSON file
        #[arg(long)]
        beta: Option<PathBuf>,
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        adjoint: Option<String>,
    },
    /// Extract structure data from a square
    Structure {
        #[command(flatten)]
        sig: SigArg,
        /// Multivector JSON file holding the square
        #[arg(long)]
        square: PathBuf,
        #[arg(long, value_parser = ["hermitian", "bilinear"])]
        kind: String,
        /// Chirality µ (even d) or module label ℓ (odd d)
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true, default_value = "1")]
        mu: String,
    },
    /// Rebuild a square from structure data
    Build {
        /// StructureData JSON file
        #[arg(long)]
        data: PathBuf,
    },
    /// Evaluate the spinorial instanton condition for a two-form
    Instanton {
        #[arg(long)]
        case: String,
        /// Two-form JSON file
        #[arg(long = "F")]
        f: PathBuf,
        /// StructureData JSON file
        #[arg(long)]
        data: PathBuf,
    },
    /// Evaluate the spinorial curving condition for a three-form
    Curving {
        #[arg(long)]
        case: String,
        /// Three-form JSON file
        #[arg(long = "H")]
        h: PathBuf,
        /// StructureData JSON file (alternative to --spinor)
        #[arg(long)]
        data: Option<PathBuf>,
        /// Spinor JSON file; its Hermitian square supplies the data
        #[arg(long)]
        spinor: Option<PathBuf>,
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true, default_value = "1")]
        mu: String,
        #[arg(long, value_parser = ["1", "-1"], allow_hyphen_values = true)]
        ell: Option<String>,
    },
    /// Emit the measured (adjoint, symmetry) grid against the residue tables
    Tables {
        #[arg(long, default_value_t = 9)]
        max_d: u32,
    },
}

fn sign_arg(v: &Option<String>) -> Option<i8> {
    v.as_deref().map(|s| if s == "-1" { -1 } else { 1 })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, KaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| KaError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| KaError::Parse(format!("{}: {e}", path.display())))
}

fn read_spinor(path: &PathBuf, rep: &CliffordRep) -> Result<ka_spinor::Spinor, KaError> {
    let eta = read_json::<SpinorJson>(path)?.to_spinor();
    if eta.comps.len() != rep.dim() {
        return Err(KaError::Parse(format!(
            "spinor has {} components, module for {} needs {}",
            eta.comps.len(),
            rep.sig,
            rep.dim()
        )));
    }
    Ok(eta)
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct SquareOut {
    p: u32,
    q: u32,
    kind: String,
    kappa: ka_spinor::json::ComplexJson,
    adjoint: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<i8>,
    alpha: MultivectorJson,
}

#[derive(Serialize)]
struct SweepOut {
    seed: u64,
    passed: bool,
    criteria: Vec<acceptance::CriterionReport>,
}

struct PairedReps {
    rep: CliffordRep,
    s: pairing::Pairing,
    b: pairing::Pairing,
}

fn paired(sig: Signature, ell: Option<i8>, adjoint: Option<i8>) -> Result<PairedReps, KaError> {
    let rep = CliffordRep::build(sig, ell)?;
    let set = pairing::pairings(&rep)?;
    let s = match adjoint {
        Some(a) => pairing::build_hermitian(&rep, a)?,
        None => set
            .hermitian_pos
            .as_ref()
            .or(set.hermitian_neg.as_ref())
            .expect("hermitian pairing exists")
            .clone(),
    };
    let b = match adjoint.filter(|_| sig.dim() % 2 == 0) {
        Some(a) => pairing::build_bilinear(&rep, a)?,
        None => {
            if sig.dim() % 2 == 0 {
                set.bilinear(s.adjoint).expect("both types exist").clone()
            } else {
                set.bilinear_pos
                    .as_ref()
                    .or(set.bilinear_neg.as_ref())
                    .expect("bilinear pairing exists")
                    .clone()
            }
        }
    };
    Ok(PairedReps { rep, s, b })
}

fn run(cli: Cli) -> Result<ExitCode, KaError> {
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("KA_SPINOR_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(42);

    match cli.command {
        Command::Sweep { sig, samples } => {
            let cfg = RunConfig {
                seed,
                tolerance: cli.tol,
                signatures: sig.map(|s| vec![s]),
                samples,
            };
            let criteria = acceptance::run_all(&cfg)?;
            let passed = criteria.iter().all(|c| c.passed);
            match cli.format.as_str() {
                "json" => emit(&SweepOut { seed, passed, criteria }),
                "csv" => {
                    println!("id,name,passed,max_residual,threshold");
                    for c in &criteria {
                        println!(
                            "{},{},{},{:e},{:e}",
                            c.id, c.name, c.passed, c.max_residual, c.threshold
                        );
                    }
                }
                _ => {
                    for c in &criteria {
                        println!("{}", c.line());
                    }
                    println!("sweep: {}", if passed { "PASS" } else { "FAIL" });
                }
            }
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Square { sig, kind, spinor, kappa, ell, adjoint } => {
            let pr = paired(sig.sig, sign_arg(&ell), sign_arg(&adjoint))?;
            let eta = read_spinor(&spinor, &pr.rep)?;
            let kappa = kappa.unwrap_or(Complex64::new(1.0, 0.0));
            let result = match kind.as_str() {
                "hermitian" => hermitian_square(&pr.rep, &pr.s, &eta, kappa)?,
                _ => bilinear_square(&pr.rep, &pr.b, &eta)?,
            };
            emit(&SquareOut {
                p: sig.sig.p,
                q: sig.sig.q,
                kind,
                kappa: result.kappa.into(),
                adjoint: result.adjoint,
                sigma: result.sigma,
                ell: result.ell,
                alpha: MultivectorJson::from(&result.alpha),
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { alpha, kind, kappa, ell, mu, beta, adjoint } => {
            let alpha_mv = read_json::<MultivectorJson>(&alpha)?.to_multivector()?;
            let sig = alpha_mv.sig;
            let pr = paired(sig, sign_arg(&ell), sign_arg(&adjoint))?;
            let kappa = kappa.unwrap_or(Complex64::new(1.0, 0.0));
            let square = match kind.as_str() {
                "hermitian" => SquareResult {
                    alpha: alpha_mv,
                    kind: SquareKind::Hermitian,
                    kappa,
                    adjoint: pr.s.adjoint,
                    sigma: None,
                    ell: pr.rep.ell,
                },
                _ => SquareResult {
                    alpha: alpha_mv,
                    kind: SquareKind::Bilinear,
                    kappa: Complex64::new(1.0, 0.0),
                    adjoint: pr.b.adjoint,
                    sigma: pr.b.symmetry,
                    ell: pr.rep.ell,
                },
            };
            let beta_mv = beta
                .map(|p| read_json::<MultivectorJson>(&p))
                .transpose()?
                .map(|m| m.to_multivector())
                .transpose()?;
            let report = verify_square(
                &square,
                &pr.rep,
                beta_mv.as_ref(),
                sign_arg(&mu),
                cli.tol.unwrap_or(VERIFY_TOL),
            )?;
            emit(&VerificationJson::from(&report));
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Structure { sig, square, kind, mu } => {
            let alpha = read_json::<MultivectorJson>(&square)?.to_multivector()?;
            let mu_val = if mu == "-1" { -1i8 } else { 1 };
            let case = if kind == "hermitian" {
                SquareCase::Hermitian
            } else {
                SquareCase::Bilinear
            };
            let data = extract_structure(&alpha, sig.sig, mu_val, case)?;
            emit(&structure_to_json(&data, sig.sig, mu_val, &kind));
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { data } => {
            let json = read_json::<StructureDataJson>(&data)?;
            let sig = Signature::new(json.p, json.q);
            let case = if json.kind == "hermitian" {
                SquareCase::Hermitian
            } else {
                SquareCase::Bilinear
            };
            let parsed = structure_from_json(&json)?;
            let alpha = build_square_from_data(sig, json.mu, &parsed, case)?;
            emit(&MultivectorJson::from(&alpha));
            Ok(ExitCode::SUCCESS)
        }
        Command::Instanton { case, f, data } => {
            let case = ConditionCase::parse(&case)?;
            let form = read_json::<MultivectorJson>(&f)?.to_multivector()?;
            let json = read_json::<StructureDataJson>(&data)?;
            let parsed = structure_from_json(&json)?;
            let report = instanton_residual(&form, &parsed, json.mu, case)?;
            emit(&ConditionJson::from(&report));
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Curving { case, h, data, spinor, mu, ell } => {
            let case = ConditionCase::parse(&case)?;
            let form = read_json::<MultivectorJson>(&h)?.to_multivector()?;
            let mu_val = if mu == "-1" { -1i8 } else { 1 };
            let (parsed, mu_used) = match (data, spinor) {
                (Some(path), _) => {
                    let json = read_json::<StructureDataJson>(&path)?;
                    let mu_used = json.mu;
                    (structure_from_json(&json)?, mu_used)
                }
                (None, Some(path)) => {
                    let sig = form.sig;
                    let pr = paired(sig, sign_arg(&ell), None)?;
                    let eta = read_spinor(&path, &pr.rep)?;
                    let hs = hermitian_square(&pr.rep, &pr.s, &eta, Complex64::new(1.0, 0.0))?;
                    (
                        extract_structure(&hs.alpha, sig, mu_val, SquareCase::Hermitian)?,
                        mu_val,
                    )
                }
                (None, None) => {
                    return Err(KaError::Parse(
                        "curving needs either --data or --spinor".to_string(),
                    ))
                }
            };
            let report = curving_residual(&form, &parsed, mu_used, case)?;
            emit(&ConditionJson::from(&report));
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Tables { max_d } => {
            let rows = pairing::measured_table(max_d)?;
            match cli.format.as_str() {
                "csv" => {
                    println!(
                        "p,q,d,pairing,adjoint,symmetry,expected_adjoint,expected_symmetry,match"
                    );
                    for r in &rows {
                        println!(
                            "{},{},{},{},{},{},{},{},{}",
                            r.p,
                            r.q,
                            r.d,
                            r.pairing,
                            r.adjoint,
                            r.symmetry.map(|s| s.to_string()).unwrap_or_default(),
                            r.expected_adjoint,
                            r.expected_symmetry.map(|s| s.to_string()).unwrap_or_default(),
                            r.matches
                        );
                    }
                }
                _ => emit(&rows),
            }
            let all_match = rows.iter().all(|r| r.matches);
            Ok(if all_match { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            // domain failures print the reason, never a stack trace
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
