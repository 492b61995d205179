use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use provrec::equational::{check_eq_derivation, coherence_probe, evaluate, parse_certificate, CoherenceProbe, EqVerdict, SearchBudget};
use provrec::intrinsic::{self, relativize};
use provrec::kernel::{check_report, parse_proof, EigentermPolicy, Proof, TheoryConfig, Verdict};
use provrec::prlib::{self, PrRegistry};
use provrec::syntax::{numeral, parse_formula, parse_program, parse_var_list, Name, Program};

#[derive(Parser)]
#[command(name = "provrec", version, about = "Check and generate proofs about provably recursive functions")]
struct Cli {
    /// Line-oriented `key value` output for scripts.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, env = "PROVREC_MAX_STEPS", default_value_t = 10_000)]
    max_steps: usize,
    #[arg(long, env = "PROVREC_MAX_TERM_SIZE", default_value_t = 64)]
    max_term_size: usize,
}

impl BudgetArgs {
    fn budget(self) -> Result<SearchBudget> {
        Ok(SearchBudget::new(self.max_steps, self.max_term_size)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Theory {
    Arith,
    Intrinsic,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script against a program.
    Check {
        #[arg(long, default_value = "unrestricted", value_parser = parse_policy)]
        policy: EigentermPolicy,
        #[arg(long, value_enum, default_value = "arith")]
        theory: Theory,
        /// Registry giving the meaning of `!link`ed symbols (default: the bundled catalog).
        #[arg(long)]
        registry: Option<PathBuf>,
        program: PathBuf,
        proof: PathBuf,
    },
    /// Evaluate `f` on numerals by equational derivation.
    Eval {
        program: PathBuf,
        function: String,
        args: Vec<u64>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the certificate for `f(args) = value` here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Check an equational certificate.
    CheckCert { program: PathBuf, certificate: PathBuf },
    /// Search for a derivation of an equation between distinct numerals.
    Coherence {
        program: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Relativize a formula to the data predicate `N`.
    Relativize { formula: String },
    /// Translate a proof with primitive recursive eigenterms into the intrinsic theory.
    Translate {
        program: PathBuf,
        proof: PathBuf,
        /// Variables whose `N` hypotheses head the judgment, e.g. `x,y`.
        #[arg(long, default_value = "")]
        vars: String,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a basic-policy totality proof for a registry definition.
    GenTotality {
        registry: PathBuf,
        symbol: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the minimal program the proof is about.
        #[arg(long)]
        program_out: Option<PathBuf>,
    },
    /// Replace non-basic primitive recursive eigenterms by basic ones.
    Lower {
        proof: PathBuf,
        /// The full program the proof is about.
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add `f(xs) = h(k(g(xs, y), xs, y))` and `k(0, xs, y) = y` to a program.
    BuildK {
        program: PathBuf,
        g: String,
        h: String,
        f: String,
        /// Proof of `forall xs exists y g(xs, y) = 0`; with --h-proof, emit a totality proof of `f`.
        #[arg(long, requires = "h_proof")]
        g_proof: Option<PathBuf>,
        #[arg(long, requires = "g_proof")]
        h_proof: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        proof_out: Option<PathBuf>,
    },
    /// Totality proof, intrinsic translation and N-closure for registry definitions,
    /// kernel-checking every stage.
    Pipeline {
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Restrict to these symbols (default: every definition).
        #[arg(long = "symbol")]
        symbols: Vec<String>,
        /// Write the proofs of each stage into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_policy(s: &str) -> Result<EigentermPolicy, String> {
    EigentermPolicy::parse(s).ok_or_else(|| format!("unknown policy `{s}` (expected unrestricted, pr or basic)"))
}

/// A negative answer: exit status 1 with a reason.
#[derive(Debug)]
struct Negative(String);

impl fmt::Display for Negative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Negative {}

fn negative(reason: impl Into<String>) -> anyhow::Error {
    Negative(reason.into()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_proof(path: &Path) -> Result<Proof> {
    parse_proof(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_registry(path: Option<&Path>) -> Result<PrRegistry> {
    match path {
        Some(p) => PrRegistry::parse(&read(p)?).with_context(|| format!("in {}", p.display())),
        None => Ok(PrRegistry::catalog()),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Kernel-check a generated proof before it leaves the process.
fn ensure_accepted(cfg: &TheoryConfig, pf: &Proof, what: &str) -> Result<provrec::kernel::Judgment> {
    match check_report(cfg, pf).verdict {
        Verdict::Accepted(j) => Ok(j),
        v => bail!("internal error: generated {what} is not accepted: {v}"),
    }
}

/// A line describing a judgment, printed to stdout when the proof goes to a file.
fn summary(output: Option<&Path>, porcelain: bool, j: &provrec::kernel::Judgment) {
    let line = if porcelain { format!("judgment {j}") } else { format!("proves {j}") };
    if output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn run(cli: Cli) -> Result<()> {
    let porcelain = cli.porcelain;
    match cli.command {
        Command::Check { policy, theory, registry, program, proof } => {
            let p = load_program(&program)?;
            let pf = load_proof(&proof)?;
            let cfg = match theory {
                Theory::Arith => prlib::pr_config(&load_registry(registry.as_deref())?, &p, policy),
                Theory::Intrinsic => TheoryConfig::intrinsic(p).with_policy(policy),
            };
            let report = check_report(&cfg, &pf);
            if porcelain {
                print!("{}", report.porcelain());
            } else {
                println!("{}", report.text());
            }
            match report.verdict {
                Verdict::Accepted(_) => Ok(()),
                Verdict::Rejected { node, reason } => Err(negative(format!("rejected at {node}: {reason}"))),
            }
        }
        Command::Eval { program, function, args, budget, cert } => {
            let p = load_program(&program)?;
            let b = budget.budget()?;
            let nums: Vec<_> = args.iter().map(|&a| numeral(a)).collect();
            match evaluate(&p, &function, &nums, &b)? {
                Some(ev) => {
                    if porcelain {
                        println!("value {}", ev.value);
                        println!("numeral {}", ev.numeral);
                        println!("certificate-steps {}", ev.certificate.steps.len());
                    } else {
                        println!("{}", ev.value);
                    }
                    if let Some(path) = cert {
                        fs::write(&path, ev.certificate.to_string())
                            .with_context(|| format!("cannot write {}", path.display()))?;
                        if porcelain {
                            println!("certificate {}", path.display());
                        } else {
                            println!("certificate written to {}", path.display());
                        }
                    }
                    Ok(())
                }
                None => Err(negative(format!(
                    "absent-within-budget: no value for {function} within max-steps {} and max-term-size {}",
                    b.max_steps, b.max_term_size
                ))),
            }
        }
        Command::CheckCert { program, certificate } => {
            let p = load_program(&program)?;
            let d = parse_certificate(&read(&certificate)?).with_context(|| format!("in {}", certificate.display()))?;
            match check_eq_derivation(&p, &d) {
                EqVerdict::Valid(e) => {
                    if porcelain {
                        println!("verdict valid\nconclusion {e}");
                    } else {
                        println!("valid: {e}");
                    }
                    Ok(())
                }
                EqVerdict::Invalid { step, reason } => {
                    if porcelain {
                        println!("verdict invalid\nstep {step}\nreason {reason}");
                    }
                    Err(negative(format!("invalid at step {step}: {reason}")))
                }
            }
        }
        Command::Coherence { program, budget } => {
            let p = load_program(&program)?;
            let b = budget.budget()?;
            match coherence_probe(&p, &b) {
                CoherenceProbe::Incoherent { witness, equation } => {
                    if porcelain {
                        println!("verdict incoherent\nequation {equation}");
                    } else {
                        println!("incoherent: {equation} is derivable");
                    }
                    print!("{witness}");
                    Ok(())
                }
                CoherenceProbe::NoWitnessWithin(b) => {
                    if porcelain {
                        println!("verdict no-witness-within-budget");
                    }
                    Err(negative(format!(
                        "no-witness-within-budget: max-steps {} max-term-size {}",
                        b.max_steps, b.max_term_size
                    )))
                }
            }
        }
        Command::Relativize { formula } => {
            let a = parse_formula(&formula)?;
            println!("{}", relativize(&a));
            Ok(())
        }
        Command::Translate { program, proof, vars, registry, output } => {
            let reg = load_registry(registry.as_deref())?;
            let p = load_program(&program)?;
            let pf = load_proof(&proof)?;
            let vars: Vec<Name> = parse_var_list(&vars)?;
            let out = intrinsic::translate_pr_proof(&reg, &p, &pf, &vars).map_err(|e| negative(e.to_string()))?;
            let j = ensure_accepted(&TheoryConfig::intrinsic(p), &out, "translation")?;
            emit(output.as_deref(), &out.to_string())?;
            summary(output.as_deref(), porcelain, &j);
            Ok(())
        }
        Command::GenTotality { registry, symbol, output, program_out } => {
            let reg = load_registry(Some(&registry))?;
            let pf = prlib::gen_totality_proof(&reg, &symbol)?;
            let p = reg.minimal_program(&symbol)?;
            let j = ensure_accepted(&prlib::pr_config(&reg, &p, EigentermPolicy::Basic), &pf, "totality proof")?;
            if let Some(path) = program_out {
                fs::write(&path, p.to_string()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            emit(output.as_deref(), &pf.to_string())?;
            summary(output.as_deref(), porcelain, &j);
            Ok(())
        }
        Command::Lower { proof, program, registry, output } => {
            let reg = load_registry(registry.as_deref())?;
            let p = load_program(&program)?;
            let pf = load_proof(&proof)?;
            let cfg = prlib::pr_config(&reg, &p, EigentermPolicy::PrimitiveRecursive);
            if let Verdict::Rejected { node, reason } = check_report(&cfg, &pf).verdict {
                return Err(negative(format!("input rejected under policy pr at {node}: {reason}")));
            }
            let low = prlib::lower_eigenterms(&reg, &p, &pf).map_err(|e| negative(e.to_string()))?;
            let j = ensure_accepted(&prlib::pr_config(&reg, &p, EigentermPolicy::Basic), &low, "lowered proof")?;
            emit(output.as_deref(), &low.to_string())?;
            summary(output.as_deref(), porcelain, &j);
            Ok(())
        }
        Command::BuildK { program, g, h, f, g_proof, h_proof, output, proof_out } => {
            let base = load_program(&program)?;
            let p = prlib::build_k_program(&base, &g, &h, &f)?;
            emit(output.as_deref(), &p.to_string())?;
            if let (Some(gp), Some(hp)) = (g_proof, h_proof) {
                let (gp, hp) = (load_proof(&gp)?, load_proof(&hp)?);
                let pf = prlib::gen_k_totality_proof(&base, &g, &h, &f, &gp, &hp).map_err(|e| negative(e.to_string()))?;
                let cfg = TheoryConfig::arithmetic(p, EigentermPolicy::Basic);
                let v = check_report(&cfg, &pf).verdict;
                let Verdict::Accepted(j) = v else {
                    return Err(negative(format!("k-trick proof rejected: {v}")));
                };
                emit(proof_out.as_deref(), &pf.to_string())?;
                summary(proof_out.as_deref(), porcelain, &j);
            }
            Ok(())
        }
        Command::Pipeline { registry, symbols, out_dir } => {
            let reg = load_registry(registry.as_deref())?;
            let names: Vec<String> = if symbols.is_empty() {
                reg.user_definitions().map(|d| d.name.to_string()).collect()
            } else {
                symbols
            };
            if let Some(d) = &out_dir {
                fs::create_dir_all(d).with_context(|| format!("cannot create {}", d.display()))?;
            }
            let mut failures = 0;
            for name in &names {
                match pipeline_one(&reg, name, out_dir.as_deref()) {
                    Ok(line) => {
                        if porcelain {
                            println!("pipeline {name} ok {line}");
                        } else {
                            println!("{name}: ok ({line})");
                        }
                    }
                    Err(e) => {
                        failures += 1;
                        if porcelain {
                            println!("pipeline {name} failed {e}");
                        } else {
                            println!("{name}: FAILED: {e:#}");
                        }
                    }
                }
            }
            if failures > 0 {
                return Err(negative(format!("{failures} of {} pipelines failed", names.len())));
            }
            Ok(())
        }
    }
}

fn pipeline_one(reg: &PrRegistry, name: &str, out_dir: Option<&Path>) -> Result<String> {
    let run = intrinsic::pipeline(reg, name)?;
    let basic = prlib::pr_config(reg, &run.program, EigentermPolicy::Basic);
    let intr = TheoryConfig::intrinsic(run.program.clone());
    ensure_accepted(&basic, &run.totality, "totality proof")?;
    let tj = ensure_accepted(&intr, &run.translated, "translation")?;
    let want = relativize(run.totality.conclusion().expect("non-empty"));
    if !tj.conclusion.alpha_eq(&want) {
        bail!("translation concludes {} instead of {want}", tj.conclusion);
    }
    let nj = ensure_accepted(&intr, &run.n_closure, "N-closure")?;
    if let Some(d) = out_dir {
        let write = |suffix: &str, text: String| {
            let path = d.join(format!("{name}.{suffix}"));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
        };
        write("hg", run.program.to_string())?;
        write("totality.ndp", run.totality.to_string())?;
        write("intrinsic.ndp", run.translated.to_string())?;
        write("closure.ndp", run.n_closure.to_string())?;
    }
    Ok(format!(
        "nodes {}/{}/{}; {}",
        run.totality.len(),
        run.translated.len(),
        run.n_closure.len(),
        nj.conclusion
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Negative>() {
            Some(n) => {
                eprintln!("{n}");
                ExitCode::from(1)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
