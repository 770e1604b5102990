use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use monoid_pcsp::algebra::{FiniteMonoid, DEFAULT_POWER_CAP};
use monoid_pcsp::classifier::{classify, classify_via_abreg, sandwich_check, Classification, Verdict};
use monoid_pcsp::cosets::{is_tuple_coset, tuple_coset_closure};
use monoid_pcsp::csp::{
    group_to_monoid, oracle_solve, random_instance, FiniteTemplate, GroupInstance, Instance, Template,
    DEFAULT_BUDGET,
};
use monoid_pcsp::polymorph::{find_block_symmetric, pmc_reduce, MinorCondition};
use monoid_pcsp::regularize::ab_reg;
use monoid_pcsp::solver::{solve_finite_tractable, solve_tractable};
use monoid_pcsp::text::{join, parse_monoid};
use monoid_pcsp::Error;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_NP_HARD: u8 = 10;
const EXIT_UNSAT: u8 = 11;
const EXIT_DISAGREE: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Tsv,
}

/// Promise equation/CSP templates over monoids.
#[derive(Debug, Parser)]
#[command(name = "monoid-pcsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Cap on materialized powers and homomorphism searches.
    #[arg(long, global = true, default_value_t = DEFAULT_POWER_CAP, value_parser = positive_usize)]
    cap_power: usize,
    /// Node budget of the exhaustive oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = positive_u64)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide tractability of PCSP(lhs, rhs).
    Classify {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// Search homomorphisms out of the commutative regularization of a finite lhs.
        #[arg(long)]
        via_abreg: bool,
    },
    /// Solve an instance over a coset template with the polynomial algorithm.
    Solve {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        /// The instance uses the group signature (`x'` for inverses).
        #[arg(long)]
        group: bool,
    },
    /// Solve an instance over a finite template by exhaustive search.
    Oracle {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        group: bool,
    },
    /// Print the commutative regularization of a finite monoid or template.
    Regularize {
        #[arg(long)]
        lhs: PathBuf,
    },
    /// Search a 2-block symmetric polymorphism of the given odd arity.
    Polysearch {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// Reduce a minor condition to a CSP instance.
    PmcReduce {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long)]
        condition: PathBuf,
        /// The PMC arity N.
        #[arg(long)]
        arity: usize,
    },
    /// Print the coset closure of a finite template's relation.
    CosetClosure {
        #[arg(long)]
        template: PathBuf,
    },
    /// Compare the polynomial solver with the oracle on seeded random instances.
    Crosscheck {
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5, value_parser = positive_usize)]
        vars: usize,
        #[arg(long, default_value_t = 6)]
        constraints: usize,
    },
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Output text plus exit code, or an error to report.
type Outcome = Result<(String, u8), Error>;

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}

fn read_template(path: &Path) -> Result<Template, Error> {
    Template::parse(&read(path)?)
}

fn read_finite(path: &Path) -> Result<FiniteTemplate, Error> {
    Ok(read_template(path)?.as_finite()?.clone())
}

fn read_instance(path: &Path, group: bool) -> Result<Instance, Error> {
    let text = read(path)?;
    if group {
        Ok(group_to_monoid(&GroupInstance::parse(&text)?))
    } else {
        Instance::parse(&text)
    }
}

struct Printer {
    format: Format,
    out: String,
}

impl Printer {
    fn new(format: Format) -> Self {
        Printer {
            format,
            out: String::new(),
        }
    }

    /// A key/value line: `key: value` for humans, `key<TAB>value` for machines.
    fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = match self.format {
            Format::Human => writeln!(self.out, "{key}: {value}"),
            Format::Tsv => writeln!(self.out, "{key}\t{value}"),
        };
    }

    fn status(&mut self, s: &str) {
        match self.format {
            Format::Human => {
                let _ = writeln!(self.out, "{s}");
            }
            Format::Tsv => self.field("status", s),
        }
    }

    fn raw(&mut self, text: &str) {
        self.out.push_str(text);
    }
}

fn report_classification(p: &mut Printer, c: &Classification, sandwich_ok: bool) -> u8 {
    p.status(&c.verdict.to_string());
    p.field("candidates", c.candidates);
    if let (Some(h), Some(s)) = (&c.witness, &c.sandwich) {
        p.field("witness", h);
        p.field("sandwich_elements", s.template.monoid().size());
        p.field("sandwich_tuples", s.template.tuples().len());
        p.field("sandwich_embedding", join(&s.embedding));
        p.field("sandwich_valid", if sandwich_ok { "yes" } else { "no" });
    }
    match c.verdict {
        Verdict::Tractable => EXIT_OK,
        Verdict::NpHard => EXIT_NP_HARD,
    }
}

fn cmd_classify(cli: &Cli, lhs: &Path, rhs: &Path, via_abreg: bool) -> Outcome {
    let m = read_template(lhs)?;
    let n = read_finite(rhs)?;
    let result = if via_abreg {
        classify_via_abreg(m.as_finite()?, &n)
    } else {
        classify(&m, &n)
    };
    let mut p = Printer::new(cli.format);
    match result {
        Ok(c) => {
            let ok = c.verdict == Verdict::NpHard || sandwich_check(&c, &m, &n);
            let code = report_classification(&mut p, &c, ok);
            Ok((p.out, code))
        }
        Err(Error::PromiseViolation) => {
            p.status("PROMISE-VIOLATION");
            Ok((p.out, EXIT_INPUT))
        }
        Err(e) => Err(e),
    }
}

fn cmd_solve(cli: &Cli, template: &Path, instance: &Path, group: bool) -> Outcome {
    let t = read_template(template)?;
    let inst = read_instance(instance, group)?;
    let values: Option<Vec<String>> = match &t {
        Template::NormalForm(nt) => {
            solve_tractable(nt, &inst)?.map(|a| a.iter().map(ToString::to_string).collect())
        }
        Template::Finite(ft) => {
            solve_finite_tractable(ft, &inst)?.map(|a| a.iter().map(ToString::to_string).collect())
        }
    };
    Ok(report_assignment(cli.format, values))
}

fn report_assignment(format: Format, values: Option<Vec<String>>) -> (String, u8) {
    let mut p = Printer::new(format);
    match values {
        Some(vs) => {
            p.status("SAT");
            for (x, v) in vs.iter().enumerate() {
                p.field(&format!("x{x}"), v);
            }
            (p.out, EXIT_OK)
        }
        None => {
            p.status("UNSAT");
            (p.out, EXIT_UNSAT)
        }
    }
}

fn cmd_oracle(cli: &Cli, template: &Path, instance: &Path, group: bool) -> Outcome {
    let t = read_finite(template)?;
    let inst = read_instance(instance, group)?;
    let values = oracle_solve(&t, &inst, cli.budget)?.map(|a| a.iter().map(ToString::to_string).collect());
    Ok(report_assignment(cli.format, values))
}

fn cmd_regularize(cli: &Cli, lhs: &Path) -> Outcome {
    let text = read(lhs)?;
    let (monoid, template): (FiniteMonoid, Option<FiniteTemplate>) = match Template::parse(&text) {
        Ok(Template::Finite(t)) => (t.monoid().clone(), Some(t)),
        Ok(Template::NormalForm(_)) => {
            return Err(Error::Unsupported("normal-form carriers are already regular".into()))
        }
        Err(_) => (parse_monoid(&text)?, None),
    };
    let q = ab_reg(&monoid);
    let mut p = Printer::new(cli.format);
    p.field("source_size", monoid.size());
    p.field("size", q.quotient().size());
    for (i, class) in q.classes().iter().enumerate() {
        p.field(&format!("class{i}"), join(class));
    }
    match template {
        Some(t) => {
            let pi = q.projection();
            let projected = t.tuples().iter().map(|x| pi.apply_tuple(x)).collect();
            let closed = tuple_coset_closure(q.quotient(), &projected)?;
            let reg = FiniteTemplate::new(q.quotient().clone(), t.arity(), closed)?;
            p.raw(&Template::Finite(reg).to_text());
        }
        None => p.raw(&monoid_pcsp::text::monoid_to_string(q.quotient())),
    }
    Ok((p.out, EXIT_OK))
}

fn cmd_polysearch(cli: &Cli, lhs: &Path, rhs: &Path, arity: usize) -> Outcome {
    if arity.is_multiple_of(2) {
        return Err(Error::Validation("2-block symmetric arities are odd".into()));
    }
    let m = read_template(lhs)?;
    let n = read_finite(rhs)?;
    let mut p = Printer::new(cli.format);
    match find_block_symmetric(&m, &n, arity / 2, cli.cap_power)? {
        Some(f) => {
            p.status("FOUND");
            for (j, c) in f.components().iter().enumerate() {
                p.field(&format!("component{j}"), c);
            }
            Ok((p.out, EXIT_OK))
        }
        None => {
            p.status("NONE");
            Ok((p.out, EXIT_UNSAT))
        }
    }
}

fn cmd_pmc_reduce(cli: &Cli, lhs: &Path, rhs: &Path, condition: &Path, arity: usize) -> Outcome {
    let m = read_finite(lhs)?;
    let n = read_finite(rhs)?;
    let phi = MinorCondition::parse(&read(condition)?)?;
    let inst = pmc_reduce(&phi, &m, &n, arity, cli.cap_power)?;
    Ok((inst.to_text(), EXIT_OK))
}

fn cmd_coset_closure(cli: &Cli, template: &Path) -> Outcome {
    let t = read_finite(template)?;
    t.monoid().is_commutative().then_some(()).ok_or_else(|| {
        let (a, b) = t.monoid().commutativity_violation().expect("non-commutative");
        Error::NotCommutative(a, b)
    })?;
    let closure = tuple_coset_closure(t.monoid(), t.tuples())?;
    let mut p = Printer::new(cli.format);
    p.field("is_coset", if is_tuple_coset(t.monoid(), t.tuples()) { "yes" } else { "no" });
    p.field("size", closure.len());
    let closed = FiniteTemplate::new(t.monoid().clone(), t.arity(), closure)?;
    p.raw(&Template::Finite(closed).to_text());
    Ok((p.out, EXIT_OK))
}

fn cmd_crosscheck(cli: &Cli, template: &Path, count: usize, vars: usize, constraints: usize) -> Outcome {
    let t = read_finite(template)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut p = Printer::new(cli.format);
    let (mut agree, mut sat) = (0, 0);
    for k in 0..count {
        let inst = random_instance(&mut rng, vars, constraints, t.arity());
        let fast = solve_finite_tractable(&t, &inst)?.is_some();
        let slow = oracle_solve(&t, &inst, cli.budget)?.is_some();
        if fast == slow {
            agree += 1;
            sat += usize::from(fast);
        } else {
            p.field(&format!("disagreement{k}"), inst.to_text().replace('\n', "; "));
        }
    }
    p.field("instances", count);
    p.field("satisfiable", sat);
    p.field("agree", agree);
    let code = if agree == count { EXIT_OK } else { EXIT_DISAGREE };
    Ok((p.out, code))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PowerTooLarge { .. } | Error::SearchCapExceeded { .. } | Error::TooLarge(_) | Error::BudgetExceeded(_) => {
            EXIT_CAP
        }
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify { lhs, rhs, via_abreg } => cmd_classify(&cli, lhs, rhs, *via_abreg),
        Command::Solve {
            template,
            instance,
            group,
        } => cmd_solve(&cli, template, instance, *group),
        Command::Oracle {
            template,
            instance,
            group,
        } => cmd_oracle(&cli, template, instance, *group),
        Command::Regularize { lhs } => cmd_regularize(&cli, lhs),
        Command::Polysearch { lhs, rhs, arity } => cmd_polysearch(&cli, lhs, rhs, *arity),
        Command::PmcReduce {
            lhs,
            rhs,
            condition,
            arity,
        } => cmd_pmc_reduce(&cli, lhs, rhs, condition, *arity),
        Command::CosetClosure { template } => cmd_coset_closure(&cli, template),
        Command::Crosscheck {
            template,
            count,
            vars,
            constraints,
        } => cmd_crosscheck(&cli, template, *count, *vars, *constraints),
    };
    match outcome {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
