mod report;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitstat::charpoly::sn_expectation_closed;
use orbitstat::frobenius_stats::{
    chi_formula, chi_formula_charpoly, chi_formula_symbolic, chi_oracle, ensemble_sum, sigma_structure,
};
use orbitstat::polynomial::{factor, necklace_check};
use orbitstat::verify::{run_suite, Caps, Scale, SUITE_NAMES};
use orbitstat::young_stats::{closed_form_histogram, coset_histogram, expected_binom_on_coset, histogram_average};
use orbitstat::{CharPoly, CosetSpec, EnsembleFilter, FieldCtx, FieldElement, MultiIndex, Poly, Rational};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "orbitstat", version, about = "Cycle statistics of Frobenius on roots of polynomials over finite fields")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// Field size, a prime power below 2^16.
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Defining polynomial of F_q over F_p as coefficients `[c0,...,1]`.
    #[arg(long = "mod", global = true)]
    modulus: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Largest group or coset enumerated element by element.
    #[arg(long, global = true, default_value_t = orbitstat::symmetric::DEFAULT_BRUTE_FORCE_CAP)]
    cap_bruteforce: u64,
    /// Largest polynomial ensemble q^d.
    #[arg(long, global = true, default_value_t = orbitstat::frobenius_stats::DEFAULT_POLY_CAP)]
    cap_poly: u64,
    /// Largest number of terms in a symbol expansion.
    #[arg(long, global = true, default_value_t = orbitstat::division_algebra::DEFAULT_TERM_LIMIT)]
    cap_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report wall-clock time. Off by default so output is reproducible.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor a polynomial into monic irreducibles.
    Factor {
        #[arg(long)]
        f: String,
    },
    /// Check sum_{d|k} d N_d = q^k for k up to kmax.
    Necklace {
        #[arg(long, default_value_t = 6)]
        kmax: usize,
    },
    /// Evaluate a character polynomial on the Frobenius coset of f.
    Eval {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = EvalMethod::Formula)]
        method: EvalMethod,
    },
    /// Sum a character polynomial over all monic polynomials of degree d.
    Ensemble {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        target: Target,
        /// all, squarefree or maxmult=m.
        #[arg(long, default_value = "all")]
        filter: EnsembleFilter,
        #[arg(long, value_enum, default_value_t = EnsembleMethod::Ensemble)]
        method: EnsembleMethod,
    },
    /// Statistics of the coset tau H of a Young subgroup.
    Young {
        /// Blocks `d^r,...`, e.g. `1^2,2^1`.
        #[arg(long)]
        blocks: CosetSpec,
        #[command(flatten)]
        target: OptionalTarget,
        /// Print the full cycle-type histogram instead of one expectation.
        #[arg(long)]
        histogram: bool,
        #[arg(long, value_enum, default_value_t = YoungMethod::Formula)]
        method: YoungMethod,
    },
    /// Run the self-verification suites.
    Verify {
        /// Largest polynomial degree in the polynomial suites.
        #[arg(long)]
        dmax: Option<usize>,
        /// Suites to run, 1 to 10; default all.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<u8>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Target {
    /// Multi-index `k:m,...` selecting binom(X, mu).
    #[arg(long)]
    mu: Option<MultiIndex>,
    /// Character polynomial, e.g. `X1^2 - 1/2*binom(2:1)`.
    #[arg(long)]
    chi: Option<CharPoly>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptionalTarget {
    #[arg(long)]
    mu: Option<MultiIndex>,
    #[arg(long)]
    chi: Option<CharPoly>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EvalMethod {
    Formula,
    Symbolic,
    Oracle,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EnsembleMethod {
    Ensemble,
    Closed,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum YoungMethod {
    Formula,
    Bruteforce,
    Both,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] orbitstat::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A target as (description, character polynomial, single multi-index if given).
fn resolve(mu: Option<MultiIndex>, chi: Option<CharPoly>) -> Option<(String, CharPoly, Option<MultiIndex>)> {
    match (mu, chi) {
        (Some(mu), _) => Some((format!("binom({mu})"), CharPoly::binom(mu.clone()), Some(mu))),
        (None, Some(chi)) => Some((chi.to_string(), chi, None)),
        (None, None) => None,
    }
}

impl Shared {
    fn field(&self) -> CliResult<Arc<FieldCtx>> {
        let q = self
            .q
            .ok_or_else(|| CliError::Usage("--q is required for this command".into()))?;
        let text = match &self.modulus {
            Some(m) => format!("q={q};mod={m}"),
            None => format!("q={q}"),
        };
        Ok(FieldCtx::parse(&text)?)
    }

    fn field_inputs(&self, rep: &mut RunReport, ctx: &FieldCtx) {
        rep.input("q", ctx.q());
        if let Some(m) = ctx.modulus() {
            rep.input("mod", format!("{m:?}").replace(' ', ""));
        }
    }

    fn caps(&self) -> Caps {
        Caps {
            brute_force: self.cap_bruteforce,
            poly: self.cap_poly,
            terms: self.cap_terms,
        }
    }
}

fn parse_poly(text: &str, ctx: &Arc<FieldCtx>) -> CliResult<Poly> {
    Ok(Poly::parse(text, ctx)?)
}

fn cmd_factor(sh: &Shared, f: &str) -> CliResult<RunReport> {
    let ctx = sh.field()?;
    let f = parse_poly(f, &ctx)?;
    let mut rep = RunReport::new("factor");
    sh.field_inputs(&mut rep, &ctx);
    rep.input("f", &f);
    let fac = factor(&f)?;
    rep.text("factorization", &fac);
    if fac.unit != FieldElement::one(&ctx) {
        rep.text("unit", Poly::constant(&fac.unit));
    }
    for (g, r) in &fac.factors {
        rep.text(format!("factor {g}"), format!("multiplicity {r}, degree {}", g.degree().unwrap_or(0)));
    }
    rep.flag("squarefree", fac.is_squarefree());
    if f.is_monic() {
        rep.text("coset blocks", sigma_structure(&f)?.spec);
    }
    Ok(rep)
}

fn cmd_necklace(sh: &Shared, kmax: usize) -> CliResult<RunReport> {
    let ctx = sh.field()?;
    let mut rep = RunReport::new("necklace");
    sh.field_inputs(&mut rep, &ctx);
    rep.input("kmax", kmax);
    for k in 1..=kmax {
        let row = necklace_check(k, &ctx)?;
        rep.text(
            format!("k={k}"),
            format!("sum d*N_d = {}, q^k = {}, equal = {}", row.lhs, row.rhs, row.equal),
        );
        rep.ok &= row.equal;
    }
    Ok(rep)
}

fn cmd_eval(sh: &Shared, f: &str, target: Target, method: EvalMethod) -> CliResult<RunReport> {
    let ctx = sh.field()?;
    let f = parse_poly(f, &ctx)?;
    let (desc, chi, mu) = resolve(target.mu, target.chi).expect("clap requires a target");
    let mut rep = RunReport::new("eval");
    sh.field_inputs(&mut rep, &ctx);
    rep.input("f", &f).input("chi", &desc);
    rep.text("coset blocks", sigma_structure(&f)?.spec);
    let formula = |rep: &mut RunReport| -> CliResult<Rational> {
        rep.methods.push("formula".into());
        let v = match &mu {
            Some(mu) => chi_formula(&f, mu)?,
            None => chi_formula_charpoly(&f, &chi)?,
        };
        rep.exact("formula", &v);
        Ok(v)
    };
    let oracle = |rep: &mut RunReport| -> CliResult<Rational> {
        rep.methods.push("oracle".into());
        let v = chi_oracle(&f, &chi, sh.cap_bruteforce)?;
        rep.exact("oracle", &v);
        Ok(v)
    };
    match method {
        EvalMethod::Formula => {
            formula(&mut rep)?;
        }
        EvalMethod::Oracle => {
            oracle(&mut rep)?;
        }
        EvalMethod::Symbolic => {
            let mu = mu
                .as_ref()
                .ok_or_else(|| CliError::Usage("--method symbolic needs --mu".into()))?;
            let sym = chi_formula_symbolic(&f, mu, sh.cap_terms)?;
            rep.methods.push("symbolic".into());
            rep.exact("symbolic", &sym);
            let fast = formula(&mut rep)?;
            rep.agree(sym == fast);
        }
        EvalMethod::Both => {
            let a = formula(&mut rep)?;
            let b = oracle(&mut rep)?;
            rep.agree(a == b);
        }
    }
    Ok(rep)
}

fn cmd_ensemble(
    sh: &Shared,
    d: usize,
    target: Target,
    filter: EnsembleFilter,
    method: EnsembleMethod,
) -> CliResult<RunReport> {
    let ctx = sh.field()?;
    let (desc, chi, _) = resolve(target.mu, target.chi).expect("clap requires a target");
    let mut rep = RunReport::new("ensemble");
    sh.field_inputs(&mut rep, &ctx);
    rep.input("d", d).input("chi", &desc).input("filter", filter);
    let closed = || -> CliResult<Rational> {
        if filter != EnsembleFilter::All {
            return Err(CliError::Usage("the closed form needs --filter all".into()));
        }
        Ok(chi
            .terms()
            .iter()
            .map(|(mu, c)| c * sn_expectation_closed(mu, d))
            .sum())
    };
    let mut mean = None;
    if method != EnsembleMethod::Closed {
        rep.methods.push("ensemble".into());
        let (sum, count) = ensemble_sum(d, &ctx, &chi, filter, sh.cap_poly, sh.threads)?;
        rep.exact("sum", &sum).integer("count", count);
        if count > 0 {
            let m = sum / Rational::from_integer(count.into());
            rep.exact("mean", &m);
            mean = Some(m);
        }
    }
    if method != EnsembleMethod::Ensemble {
        rep.methods.push("closed".into());
        let c = closed()?;
        rep.exact("symmetric group expectation", &c);
        if method == EnsembleMethod::Both {
            rep.agree(mean.as_ref() == Some(&c));
        }
    }
    Ok(rep)
}

fn cmd_young(
    sh: &Shared,
    spec: CosetSpec,
    target: OptionalTarget,
    histogram: bool,
    method: YoungMethod,
) -> CliResult<RunReport> {
    let mut rep = RunReport::new("young");
    rep.input("blocks", &spec);
    rep.integer("N", spec.size()).integer("|H|", spec.h_order());
    let brute = if method == YoungMethod::Formula {
        None
    } else {
        rep.methods.push("bruteforce".into());
        Some(coset_histogram(&spec, sh.cap_bruteforce, sh.threads)?)
    };
    if method != YoungMethod::Bruteforce {
        rep.methods.insert(0, "formula".into());
    }
    if histogram {
        let closed = if method == YoungMethod::Bruteforce {
            None
        } else {
            Some(closed_form_histogram(&spec)?)
        };
        let types: Vec<&MultiIndex> = match (&closed, &brute) {
            (Some(c), _) => c.keys().collect(),
            (None, Some(b)) => b.keys().collect(),
            (None, None) => unreachable!(),
        };
        for ct in types {
            match &closed {
                Some(c) => rep.integer(format!("count {ct}"), &c[ct]),
                None => rep.integer(format!("count {ct}"), brute.as_ref().unwrap()[ct]),
            };
        }
        if let (Some(c), Some(b)) = (&closed, &brute) {
            let b: BTreeMap<&MultiIndex, String> = b.iter().map(|(k, v)| (k, v.to_string())).collect();
            let c: BTreeMap<&MultiIndex, String> = c.iter().map(|(k, v)| (k, v.to_string())).collect();
            rep.agree(b == c);
        }
        return Ok(rep);
    }
    let (desc, chi, _) = resolve(target.mu, target.chi)
        .ok_or_else(|| CliError::Usage("young needs --mu, --chi or --histogram".into()))?;
    rep.input("chi", desc);
    let formula = (method != YoungMethod::Bruteforce).then(|| {
        chi.terms()
            .iter()
            .map(|(mu, c)| c * expected_binom_on_coset(&spec, mu))
            .sum::<Rational>()
    });
    let bruteforce = brute.as_ref().map(|hist| {
        chi.terms()
            .iter()
            .map(|(mu, c)| c * histogram_average(hist, mu))
            .sum::<Rational>()
    });
    if let Some(v) = &formula {
        rep.exact("formula", v);
    }
    if let Some(v) = &bruteforce {
        rep.exact("bruteforce", v);
    }
    if let (Some(a), Some(b)) = (&formula, &bruteforce) {
        rep.agree(a == b);
    }
    Ok(rep)
}

fn cmd_verify(sh: &Shared, dmax: Option<usize>, suites: &[u8]) -> CliResult<RunReport> {
    let mut scale = Scale {
        threads: sh.threads,
        caps: sh.caps(),
        ..Scale::default()
    };
    let mut rep = RunReport::new("verify");
    if let Some(q) = sh.q {
        scale = scale.with_field(q);
        rep.input("q", q);
    }
    if let Some(d) = dmax {
        scale = scale.with_degree(d);
        rep.input("dmax", d);
    }
    scale.validate()?;
    let ids: Vec<u8> = if suites.is_empty() {
        (1..=SUITE_NAMES.len() as u8).collect()
    } else {
        suites.to_vec()
    };
    let (mut checks, mut failed) = (0u64, 0u64);
    for id in ids {
        let report = run_suite(id, &scale)?;
        checks += report.checks;
        failed += report.failed;
        rep.text(format!("suite {id}"), report.summary_line());
        for failure in &report.failures {
            rep.text(format!("suite {id} failure"), failure);
        }
        rep.ok &= report.passed();
    }
    rep.integer("checks", checks).integer("failed", failed);
    Ok(rep)
}

fn run(cli: Cli) -> CliResult<RunReport> {
    let sh = &cli.shared;
    match cli.command {
        Command::Factor { f } => cmd_factor(sh, &f),
        Command::Necklace { kmax } => cmd_necklace(sh, kmax),
        Command::Eval { f, target, method } => cmd_eval(sh, &f, target, method),
        Command::Ensemble { d, target, filter, method } => cmd_ensemble(sh, d, target, filter, method),
        Command::Young { blocks, target, histogram, method } => cmd_young(sh, blocks, target, histogram, method),
        Command::Verify { dmax, suite } => cmd_verify(sh, dmax, &suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, timing) = (cli.shared.format, cli.shared.timing);
    let start = Instant::now();
    match run(cli) {
        Ok(mut rep) => {
            if timing {
                rep.set_elapsed(start.elapsed());
            }
            match format {
                Format::Text => print!("{}", rep.to_text()),
                Format::Json => println!("{}", rep.to_json()),
            }
            if rep.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ensemble_both_reports_agreement() {
        let cli = Cli::parse_from(["orbitstat", "--q", "2", "ensemble", "--d", "3", "--mu", "1:1", "--method", "both"]);
        let rep = run(cli).unwrap();
        assert_eq!(rep.agreement, Some(true));
    }
}
