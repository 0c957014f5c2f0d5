mod desc;
mod report;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use formal_hs::exactnum::FpElem;
use formal_hs::fgl::{FormalGroupLaw, Height};
use formal_hs::hsd::{HSDerivation, Window};
use formal_hs::serial::{law_to_value, table_from_json, table_to_value};
use formal_hs::series::LaurentPoly;
use serde_json::{json, Value};

use desc::LawDesc;
use report::{CliError, Report, Status};

#[derive(Parser)]
#[command(name = "formal-hs", version, about = "Formal group laws and Hasse-Schmidt derivations over F_p")]
#[command(after_help = "Laws: additive[:p], multiplicative[:p] (p defaults to 2), honda:p:h.\n\
Exit codes: 0 success or PASS, 1 FAIL, 2 usage error, 3 computation error.")]
struct Cli {
    /// Print a JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and inspect a formal group law
    Fgl {
        law: String,
        /// Series precision N (monomials of total degree < N are kept)
        #[arg(long = "deg", default_value_t = 16)]
        deg: usize,
        #[command(subcommand)]
        action: FglAction,
    },
    /// Hasse-Schmidt derivations attached to a law
    Deriv {
        law: String,
        /// Order bound B: the maps ∂_0 .. ∂_{B-1}
        #[arg(long)]
        orders: usize,
        /// Series precision N of the law; defaults to 2B + 1
        #[arg(long = "deg")]
        deg: Option<usize>,
        /// Allowed t-exponents LO:HI. Default: -(B+1):B·p^h for honda:p:h,
        /// -(B+1):B otherwise
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Read the derivation table from this JSON file instead of the
        /// canonical derivation of the law
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(subcommand)]
        action: DerivAction,
    },
    /// Re-run a pinned computation and compare with the expected values
    Repro { name: ReproName },
}

#[derive(Subcommand)]
enum FglAction {
    /// Print F(X, Y)
    Build,
    /// Unit and associativity axioms
    Check,
    /// Height from the p-series
    Height,
    /// The m-truncation F[m]
    Truncate { m: u32 },
    /// The formal inverse ι(X)
    Inverse,
    /// Coefficient of Y^n as a polynomial in X, with a stability probe
    Coeff {
        n: usize,
        /// Comparison precision N' (default 2N)
        #[arg(long)]
        against: Option<usize>,
    },
}

#[derive(Subcommand)]
enum DerivAction {
    /// The table ∂_n(t), n < B
    Canonical,
    /// ∂_n(q) for a Laurent polynomial q such as "t^3 + t^-1"
    Apply {
        #[arg(allow_hyphen_values = true)]
        q: String,
        n: usize,
    },
    /// ∂_n(1/t), n < B
    InverseImage,
    /// F-iterativity against the full law, or against F[m] when m is given
    CheckIterative { m: Option<u32> },
    /// Whether ∂_n(1/t) stays in k[1/t] for n < B (or n < --upto)
    CheckP1 {
        #[arg(long)]
        upto: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproName {
    #[value(name = "example-3.6")]
    InverseImage,
    #[value(name = "example-4.5")]
    HondaTable,
    #[value(name = "theorem-3.1")]
    ProjectiveLine,
    Heights,
}

fn parse_law(text: &str) -> Result<LawDesc, CliError> {
    text.parse().map_err(CliError::Usage)
}

fn build_law(desc: LawDesc, precision: usize) -> Result<FormalGroupLaw<FpElem>, CliError> {
    if precision < 2 {
        return Err(CliError::Usage(format!("--deg must be at least 2, got {precision}")));
    }
    desc.build(precision).map_err(CliError::compute)
}

fn run_fgl(law_text: &str, deg: usize, action: &FglAction) -> Result<Report, CliError> {
    let desc = parse_law(law_text)?;
    let law = build_law(desc, deg)?;
    let params = json!({ "law": desc.to_string(), "precision": deg });
    let (command, result, text, status) = match action {
        FglAction::Build => (
            "fgl build",
            serde_json::to_value(law_to_value(&law)).expect("serializable"),
            law.to_string(),
            Status::Ok,
        ),
        FglAction::Check => {
            let r = law.check_axioms();
            let mark = |b: bool| if b { "ok" } else { "fails" };
            let mut text = format!(
                "left unit F(0, Y) = Y: {}\nright unit F(X, 0) = X: {}\nassociativity through total degree {}: {}\n",
                mark(r.left_unit),
                mark(r.right_unit),
                r.degree_checked,
                mark(r.associativity)
            );
            match &r.first_failure {
                None => text.push_str("PASS"),
                Some(f) => text.push_str(&format!("FAIL: {f}")),
            }
            let result = json!({
                "left_unit": r.left_unit,
                "right_unit": r.right_unit,
                "associativity": r.associativity,
                "degree_checked": r.degree_checked,
                "first_failure": r.first_failure,
            });
            ("fgl check", result, text, Status::from_check(r.passed()))
        }
        FglAction::Height => {
            let h = law.height().map_err(CliError::compute)?;
            let result = match h {
                Height::Finite { h, unit } => json!({ "height": h, "unit": unit.value() }),
                Height::InfiniteAtPrecision(n) => json!({ "height": Value::Null, "precision": n }),
            };
            ("fgl height", result, h.to_string(), Status::Ok)
        }
        FglAction::Truncate { m } => {
            let t = law.truncate(*m).map_err(CliError::compute)?;
            let monomials: Vec<Value> = t
                .terms()
                .map(|(i, j, c)| json!({ "i": i, "j": j, "c": c.value() }))
                .collect();
            let result = json!({ "m": m, "order": t.order(), "monomials": monomials });
            ("fgl truncate", result, t.to_string(), Status::Ok)
        }
        FglAction::Inverse => {
            let iota = law.formal_inverse();
            let coeffs: Vec<u64> = iota.coeffs().iter().map(|c| c.value()).collect();
            let result = json!({ "coefficients": coeffs, "precision": iota.precision() });
            ("fgl inverse", result, iota.to_string(), Status::Ok)
        }
        FglAction::Coeff { n, against } => {
            let high = against.unwrap_or(2 * deg);
            if *n >= deg || high < deg {
                return Err(CliError::Usage(format!("need n < N <= N' (n = {n}, N = {deg}, N' = {high})")));
            }
            let probe = law.coeff_of_y(*n, high).map_err(CliError::compute)?;
            let poly = LaurentPoly::from_terms(
                law.field(),
                probe.polynomial().into_iter().map(|(d, c)| (d as i64, c)),
            );
            let as_x = poly.to_string().replace('t', "X");
            let text = format!(
                "coefficient of Y^{n}: {as_x}\nstable between N={deg} and N'={high}: {}",
                if probe.stabilized { "yes" } else { "no" }
            );
            let terms: Vec<Value> = probe
                .polynomial()
                .into_iter()
                .map(|(d, c)| json!({ "degree": d, "c": c.value() }))
                .collect();
            let result = json!({ "n": n, "against": high, "terms": terms, "stabilized": probe.stabilized });
            ("fgl coeff", result, text, Status::from_check(probe.stabilized))
        }
    };
    Ok(Report {
        command: command.into(),
        params,
        result,
        text,
        status,
    })
}

struct DerivSetup {
    desc: LawDesc,
    precision: usize,
    derivation: HSDerivation<FpElem>,
}

fn setup_deriv(
    law_text: &str,
    orders: usize,
    deg: Option<usize>,
    window: Option<&str>,
    table: Option<&PathBuf>,
) -> Result<DerivSetup, CliError> {
    let desc = parse_law(law_text)?;
    if orders == 0 {
        return Err(CliError::Usage("--orders must be at least 1".into()));
    }
    let precision = deg.unwrap_or(2 * orders + 1);
    let kind = desc.build(2).map_err(CliError::compute)?.kind();
    let window = match window {
        Some(w) => w.parse::<Window>().map_err(|e| CliError::Usage(e.to_string()))?,
        None => Window::for_law(kind, orders, precision),
    };
    let derivation = match table {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let d: HSDerivation<FpElem> =
                table_from_json(&text, window).map_err(|e| CliError::Usage(e.to_string()))?;
            if d.field().p() != desc.p() {
                return Err(CliError::Usage(format!(
                    "table is over F_{}, law over F_{}",
                    d.field().p(),
                    desc.p()
                )));
            }
            if d.bound() != orders {
                return Err(CliError::Usage(format!("table has B = {}, --orders is {orders}", d.bound())));
            }
            d
        }
        None => {
            let law = build_law(desc, precision)?;
            HSDerivation::canonical(&law, orders, window).map_err(CliError::compute)?
        }
    };
    Ok(DerivSetup {
        desc,
        precision,
        derivation,
    })
}

fn run_deriv(
    law_text: &str,
    orders: usize,
    deg: Option<usize>,
    window: Option<&str>,
    table: Option<&PathBuf>,
    action: &DerivAction,
) -> Result<Report, CliError> {
    let setup = setup_deriv(law_text, orders, deg, window, table)?;
    let d = &setup.derivation;
    let params = json!({
        "law": setup.desc.to_string(),
        "orders": orders,
        "precision": setup.precision,
        "window": d.window().to_string(),
        "table": table.map(|p| p.display().to_string()),
    });
    let (command, result, text, status) = match action {
        DerivAction::Canonical => (
            "deriv canonical",
            serde_json::to_value(table_to_value(d)).expect("serializable"),
            d.to_string().trim_end().to_string(),
            Status::Ok,
        ),
        DerivAction::Apply { q, n } => {
            let poly = LaurentPoly::parse(d.field(), q).map_err(|e| CliError::Usage(e.to_string()))?;
            let r = d.apply(&poly, *n).map_err(CliError::compute)?;
            let result = json!({ "q": poly.to_string(), "n": n, "value": r.to_string() });
            ("deriv apply", result, format!("∂_{n}({poly}) = {r}"), Status::Ok)
        }
        DerivAction::InverseImage => {
            let images = d.inverse_image(orders).map_err(CliError::compute)?;
            let text = images
                .iter()
                .enumerate()
                .map(|(n, q)| format!("∂_{n}(t^-1) = {q}"))
                .collect::<Vec<_>>()
                .join("\n");
            let entries: Vec<Value> = images
                .iter()
                .enumerate()
                .map(|(n, q)| json!({ "n": n, "poly": q.to_string() }))
                .collect();
            ("deriv inverse-image", json!({ "entries": entries }), text, Status::Ok)
        }
        DerivAction::CheckIterative { m } => {
            let law = build_law(setup.desc, setup.precision)?;
            let report = match m {
                None => d.check_iterativity(&law),
                Some(m) => {
                    let truncated = law.truncate(*m).map_err(CliError::compute)?;
                    d.check_truncated_iterativity(&truncated)
                }
            }
            .map_err(CliError::compute)?;
            let failure = report.failure.as_ref().map(|f| {
                json!({ "i": f.i, "j": f.j, "monomial": f.monomial, "lhs": f.lhs, "rhs": f.rhs })
            });
            let result = json!({ "bound": report.bound, "m": m, "failure": failure });
            ("deriv check-iterative", result, report.to_string(), Status::from_check(report.passed()))
        }
        DerivAction::CheckP1 { upto } => {
            let bound = upto.unwrap_or(orders);
            let report = d.check_p1_extendable(bound).map_err(CliError::compute)?;
            let failure = report
                .failure
                .as_ref()
                .map(|f| json!({ "n": f.n, "offending": f.offending }));
            let result = json!({ "bound": bound, "failure": failure });
            ("deriv check-p1", result, report.to_string(), Status::from_check(report.passed()))
        }
    };
    Ok(Report {
        command: command.into(),
        params,
        result,
        text,
        status,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fgl { law, deg, action } => run_fgl(law, *deg, action),
        Command::Deriv {
            law,
            orders,
            deg,
            window,
            table,
            action,
        } => run_deriv(law, *orders, *deg, window.as_deref(), table.as_ref(), action),
        Command::Repro { name } => repro::run(match name {
            ReproName::InverseImage => repro::Target::InverseImage,
            ReproName::HondaTable => repro::Target::HondaTable,
            ReproName::ProjectiveLine => repro::Target::ProjectiveLine,
            ReproName::Heights => repro::Target::Heights,
        }),
    };
    match outcome {
        Ok(report) => {
            println!("{}", report.render(cli.json));
            report.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
