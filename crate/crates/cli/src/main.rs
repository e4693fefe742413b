use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use padic_montes::factor::{factor, verify, FactorConfig, FactorReport};
use padic_montes::sfl::{PrecisionMode, Variant};
use padic_montes::suites::{run_suite, to_csv};
use padic_montes::testpolys::{expected_invariants, gen_family, reconciled_invariants, FamilySpec};
use padic_montes::ZPoly;

#[derive(Parser)]
#[command(
    name = "pmfactor",
    version,
    about = "Factor polynomials over the p-adic integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a polynomial to a given p-adic precision.
    Factor(FactorArgs),
    /// Report depth, width, index, exponent and splitting data per factor.
    Invariants(InvariantArgs),
    /// Print a test-family polynomial and its expected invariant row.
    Gen(GenArgs),
    /// Check that a list of factors multiplies to the input modulo p^ν.
    Verify(VerifyArgs),
    /// Run a timing suite and print CSV.
    Bench(BenchArgs),
}

/// The polynomial to work on: a literal or a test-family member.
#[derive(Args)]
struct Input {
    /// Coefficients constant-first ("5,0,1") or an expression in x ("x^2+5").
    poly: Option<String>,
    /// The prime p (defaults to the family prime with --family).
    #[arg(long, short = 'p')]
    prime: Option<u64>,
    /// Test family: A, Am, B, C, D or E.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters, e.g. "p=7,k=5".
    #[arg(long, default_value = "")]
    params: String,
}

impl Input {
    fn resolve(&self) -> Result<(ZPoly, u64, Option<FamilySpec>)> {
        match (&self.poly, &self.family) {
            (Some(_), Some(_)) => bail!("give either a polynomial or --family, not both"),
            (None, None) => bail!("missing polynomial (or --family NAME --params k=v,...)"),
            (Some(s), None) => {
                let p = self
                    .prime
                    .ok_or_else(|| anyhow!("--prime is required with a literal polynomial"))?;
                Ok((ZPoly::parse(s, Some(p))?, p, None))
            }
            (None, Some(fam)) => {
                let spec = FamilySpec::parse(fam, &self.params)?;
                let p = spec.prime();
                if let Some(q) = self.prime {
                    if q != p {
                        bail!("--prime {q} disagrees with the family prime {p}");
                    }
                }
                Ok((gen_family(&spec)?, p, Some(spec)))
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    /// Newton warmup of the inverse before the main loop.
    #[value(name = "1")]
    Warmup,
    /// Main loop from h = 2, no warmup.
    #[value(name = "2")]
    Short,
}

#[derive(Args)]
struct FactorArgs {
    #[command(flatten)]
    input: Input,
    /// Target precision ν: factors are returned modulo p^ν.
    #[arg(long, short = 'n', default_value_t = 10)]
    precision: u32,
    #[arg(long, value_enum, default_value = "1")]
    alg: Alg,
    /// Lift unramified simple factors with the direct driver.
    #[arg(long)]
    direct: bool,
    #[arg(long)]
    json: bool,
    /// Print the Montes loop trace.
    #[arg(long)]
    trace: bool,
    /// Seed for the residue-field factorizations.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Lift the factors one after the other.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct InvariantArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, short = 'n')]
    precision: u32,
    /// A factor, constant-first; repeat once per factor.
    #[arg(long = "factor", required = true)]
    factors: Vec<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// E (depth sweep), B (width sweep), D (factor-count sweep) or H (direct vs Hensel).
    #[arg(long, default_value = "E")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn print_report(r: &FactorReport) {
    println!(
        "f = {} over Z_{} to precision {}",
        r.input.join(","),
        r.prime,
        r.precision
    );
    println!(
        "degree {}, v_p(disc) = {}, {} factor(s), splitting {}",
        r.degree, r.disc_valuation, r.n_factors, r.splitting
    );
    for (i, g) in r.factors.iter().enumerate() {
        let inv = &g.invariants;
        println!(
            "factor {}: degree {} e={} f={} depth {} width {:?} index {} exponent {} nu0 {}",
            i + 1,
            g.degree,
            inv.e,
            inv.f,
            inv.depth,
            inv.width,
            inv.index,
            inv.exponent,
            inv.nu0
        );
        println!("  {}", g.coeffs.join(","));
        if !g.h_trajectory.is_empty() {
            println!(
                "  slopes {:?} ({} divisions, {})",
                g.h_trajectory, g.quotrems, g.driver
            );
        }
    }
    println!(
        "ledger: {} = 2*({} + {}) + {}   [v_p(disc) = 2*(factor indices + cross terms) + delta]",
        r.disc_valuation, r.index_factors, r.index_cross, r.delta
    );
    if r.disc_source == "tame" {
        println!("  (v_p(disc) from the index: every factor is tamely ramified)");
    }
    println!(
        "product check: {}",
        if r.product_check { "ok" } else { "FAILED" }
    );
    for line in &r.trace {
        println!("trace: {line}");
    }
}

fn cmd_factor(a: &FactorArgs) -> Result<ExitCode> {
    let (f, p, _) = a.input.resolve()?;
    let cfg = FactorConfig {
        nu: a.precision,
        variant: match a.alg {
            Alg::Warmup => Variant::Warmup,
            Alg::Short => Variant::Short,
        },
        precision: PrecisionMode::Production,
        direct: a.direct,
        seed: a.seed,
        trace: a.trace,
        parallel: !a.sequential,
    };
    let r = factor(&f, p, &cfg)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        print_report(&r);
    }
    Ok(if r.product_check {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_invariants(a: &InvariantArgs) -> Result<ExitCode> {
    let (f, p, spec) = a.input.resolve()?;
    let r = factor(
        &f,
        p,
        &FactorConfig {
            nu: 1,
            seed: a.seed,
            ..Default::default()
        },
    )?;
    let row = r.as_row();
    if a.json {
        let mut v = serde_json::json!({
            "prime": p,
            "factors": r.factors.iter().map(|g| &g.invariants).collect::<Vec<_>>(),
            "computed": row,
        });
        if let Some(s) = &spec {
            v["expected"] = serde_json::to_value(expected_invariants(s)?)?;
        }
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(ExitCode::SUCCESS);
    }
    for (i, g) in r.factors.iter().enumerate() {
        println!(
            "factor {}: {}",
            i + 1,
            serde_json::to_string(&g.invariants)?
        );
    }
    println!(
        "total: {} factor(s), depth {}, width sum {}, index {}, delta {}, splitting {}",
        r.n_factors, r.depth, r.width_sum, r.index, r.delta, r.splitting
    );
    if let Some(s) = &spec {
        let ex = expected_invariants(s)?;
        let diff = row.diff(&ex);
        if diff.is_empty() {
            println!("matches the expected row for {s}");
        } else {
            println!(
                "differs from the expected row for {s} in: {}",
                diff.join(", ")
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode> {
    let spec = FamilySpec::parse(&a.family, &a.params)?;
    let f = gen_family(&spec)?;
    if a.json {
        let v = serde_json::json!({
            "family": spec.to_string(),
            "prime": spec.prime(),
            "polynomial": f.to_text(),
            "expected": expected_invariants(&spec)?,
            "reconciled": reconciled_invariants(&spec)?,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{}", f.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    let (f, p, _) = a.input.resolve()?;
    let gs = a
        .factors
        .iter()
        .map(|s| ZPoly::parse_coeffs(s).with_context(|| format!("factor '{s}'")))
        .collect::<Result<Vec<_>>>()?;
    if verify(&f, &gs, p, a.precision) {
        println!("ok");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("mismatch");
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let rows = run_suite(&a.suite, a.seed)?;
    print!("{}", to_csv(&rows));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Factor(a) => cmd_factor(a),
        Command::Invariants(a) => cmd_invariants(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
