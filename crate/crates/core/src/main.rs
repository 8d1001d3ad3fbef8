//! Command-line front end: validate curve documents, compute multiplicities
//! by any of the methods, aggregate weighted counts, run the identity
//! suites, and emit the named fixtures.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use tropmult::doc::CurveDocument;
use tropmult::{bracket, fixtures, mult, splitting, suites, trqft, Error};

#[derive(Parser)]
#[command(
    name = "tropmult",
    version,
    about = "Exact multiplicities of rigid tropical curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Lattice-index determinant (the definition).
    Det,
    /// Field-theory evaluation over the midpoint flow, then a square root.
    Trqft,
    /// Field-theory evaluation over a single-sink tree flow.
    TrqftTree,
    /// Genus-0 evaluation in the subalgebra of boxed forms.
    Box,
    /// Genus-0 polyvector bracket propagation.
    Bracket,
    /// Genus-0 splitting sum over one compact edge.
    Split,
}

#[derive(Subcommand)]
enum Command {
    /// Check a curve document against every structural invariant.
    Validate { file: String },
    /// Compute the multiplicity of the curve in a document.
    Mult {
        file: String,
        #[arg(long, value_enum, default_value = "det")]
        method: Method,
        /// Sink vertex for tree/bracket methods (default: first vertex).
        #[arg(long)]
        sink: Option<u32>,
        /// Compact edge for the splitting method (default: first compact edge).
        #[arg(long)]
        edge: Option<u32>,
    },
    /// Weighted count Σ Mult(Γ)/|Aut Γ|·Π⟨V⟩ over a list of documents.
    Gw { files: Vec<String> },
    /// Run an identity suite with a reproducible seed.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Emit a named fixture document on stdout.
    Gen {
        #[command(subcommand)]
        fixture: Fixture,
    },
}

#[derive(Subcommand)]
enum Fixture {
    /// The line through two points (multiplicity 1).
    E1,
    /// Two-vertex weight-calibration curve (multiplicity w²).
    E2 {
        #[arg(long, default_value_t = 2)]
        weight: i64,
    },
    /// The genus-1 curve with ψ-marked line conditions along (a,b), (c,d),
    /// (e,f); multiplicity |ad(e+f) − be(c+d)|.
    Genus1 {
        /// Six integers a,b,c,d,e,f for the line spans.
        #[arg(long, value_delimiter = ',', default_values_t = [1i64, 1, 1, 2, 1, 3])]
        params: Vec<i64>,
    },
    /// Random rigid tree whose multiplicity is a product of skew-form
    /// pairings ω(n1, n2).
    Theta {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        lambda: i64,
    },
}

fn read_document(path: &str) -> Result<CurveDocument, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    CurveDocument::parse(&text)
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => {
            let doc = read_document(&file)?;
            let (curve, constraints, psi) = doc.to_instance()?;
            let diag = curve.validate();
            if diag.is_empty() {
                tropmult::constraints::check_constraints(&curve, &constraints)?;
                curve.psi_check(&psi)?;
                println!(
                    "valid: {} vertices, {} edges, {} markings, genus {}, expected dimension {}",
                    curve.vertices.len(),
                    curve.edges.len(),
                    curve.markings.len(),
                    curve.genus(),
                    curve.expected_dimension()
                );
                Ok(())
            } else {
                for d in &diag {
                    println!("violation: {d}");
                }
                Err(Error::Precondition(format!(
                    "{} invariant violations",
                    diag.len()
                )))
            }
        }
        Command::Mult {
            file,
            method,
            sink,
            edge,
        } => {
            let doc = read_document(&file)?;
            let (curve, constraints, _psi) = doc.to_instance()?;
            let sink = sink.unwrap_or_else(|| curve.vertices[0].id);
            let value: BigInt = match method {
                Method::Det => mult::mult(&curve, &constraints)?,
                Method::Trqft => trqft::mult_trqft(&curve, &constraints)?,
                Method::TrqftTree => {
                    let sq = trqft::evaluate_tree(&curve, &constraints, sink)?;
                    exact_sqrt(&sq)?
                }
                Method::Box => {
                    let sq = trqft::evaluate_box(&curve, &constraints)?;
                    exact_sqrt(&sq)?
                }
                Method::Bracket => bracket::mult_bracket(&curve, &constraints, sink)?,
                Method::Split => {
                    let edge = match edge {
                        Some(e) => e,
                        None => curve.compact_edges().map(|e| e.id).next().ok_or_else(|| {
                            Error::Precondition("no compact edge to split".into())
                        })?,
                    };
                    splitting::splitting_sum(&curve, &constraints, edge, None)?
                }
            };
            println!("{value}");
            Ok(())
        }
        Command::Gw { files } => {
            if files.is_empty() {
                return Err(Error::Parse("gw needs at least one document".into()));
            }
            let mut total = BigRational::zero();
            for f in &files {
                let doc = read_document(f)?;
                let (curve, constraints, psi) = doc.to_instance()?;
                let m = mult::mult(&curve, &constraints)?;
                let aut = curve.automorphism_order()?;
                let mut v_factor = BigInt::one();
                for v in &curve.vertices {
                    v_factor *= curve.vertex_multinomial(&psi, v.id)?;
                }
                total += BigRational::new(m * v_factor, aut);
            }
            if total.denom().is_one() {
                println!("{}", total.numer());
            } else {
                println!("{}/{}", total.numer(), total.denom());
            }
            Ok(())
        }
        Command::Check { suite, seed, cases } => {
            let results = suites::run_suite(&suite, seed, cases)?;
            let mut all_pass = true;
            for r in &results {
                println!(
                    "{} {} — {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                all_pass &= r.pass;
            }
            if all_pass {
                println!(
                    "{} checks passed (seed {seed}, {cases} cases)",
                    results.len()
                );
                Ok(())
            } else {
                Err(Error::Invariant("identity suite failed".into()))
            }
        }
        Command::Gen { fixture } => {
            let doc = match fixture {
                Fixture::E1 => {
                    let (c, a, p) = fixtures::e1();
                    CurveDocument::from_instance(&c, &a, &p)
                }
                Fixture::E2 { weight } => {
                    if weight < 1 {
                        return Err(Error::Precondition("weight must be ≥ 1".into()));
                    }
                    let (c, a, p) = fixtures::e2(weight);
                    CurveDocument::from_instance(&c, &a, &p)
                }
                Fixture::Genus1 { params } => {
                    if params.len() != 6 {
                        return Err(Error::Parse("genus1 takes six integers".into()));
                    }
                    if params[..2] == [0, 0] || params[2..4] == [0, 0] || params[4..] == [0, 0] {
                        return Err(Error::Precondition(
                            "each line span (a,b), (c,d), (e,f) must be nonzero".into(),
                        ));
                    }
                    let (c, a, p) = fixtures::genus1(&params);
                    CurveDocument::from_instance(&c, &a, &p)
                }
                Fixture::Theta { seed, lambda } => {
                    if lambda == 0 {
                        return Err(Error::Precondition("lambda must be nonzero".into()));
                    }
                    let fx = fixtures::theta(seed, lambda);
                    CurveDocument::from_instance(&fx.curve, &fx.constraints, &fx.psi)
                }
            };
            print!("{}", doc.to_json());
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn exact_sqrt(sq: &BigInt) -> Result<BigInt, Error> {
    let root = sq.sqrt();
    if &(&root * &root) != sq {
        return Err(Error::Invariant(format!(
            "value {sq} is not a perfect square"
        )));
    }
    Ok(root)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
