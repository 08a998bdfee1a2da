use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cqdet::chase::{structure_to_dot, trace_to_json_lines, Scheduler};
use cqdet::cq::Name;
use cqdet::greenred::{decide_determinacy, DeterminacyInstance, DeterminacyReport, DeterminacyVerdict};
use cqdet::parse::parse_determinacy;
use cqdet::reductions::{
    compile_thue, compile_thue_unchecked, encode_reachability, validate_friendly, Graph, ThueSystem,
};
use cqdet::spider::{IdealSpider, Ruleset, SpiderWorld};
use cqdet::swarm::{
    check_structural, parse_swarm, swarm_to_dot, swarm_to_text, word_set, StructuralContext, Swarm, SwarmChase,
    SwarmScheduler,
};

#[derive(Parser, Debug)]
#[command(
    name = "cqdet",
    version,
    about = "Green-red chase workbench for conjunctive query determinacy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sched {
    Fifo,
    Random,
    Spouse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Reach,
    Thue,
}

#[derive(clap::Args, Debug)]
struct RunOpts {
    /// Trigger applications (or rewrites) before giving up.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, value_enum)]
    scheduler: Option<Sched>,
    /// Seed for the random scheduler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a determinacy instance by the green-red chase.
    Determinacy {
        file: PathBuf,
        /// Read FILE as a spider ruleset; the views are its rules and the query is the full spider query.
        #[arg(long)]
        ruleset: bool,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Run the green-red chase of a determinacy instance and print the trace.
    Chase {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Run swarm rewriting for a ruleset.
    Swarm {
        ruleset: PathBuf,
        /// Start swarm; defaults to one green full edge.
        #[arg(long)]
        start: Option<PathBuf>,
        /// Run the structural checks; needs --thue for roles and productions.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        thue: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Compile a graph or a Thue system into a spider ruleset.
    Compile {
        #[arg(long, value_enum)]
        kind: Kind,
        file: PathBuf,
        /// Emit the base ruleset without the last rule (Thue only).
        #[arg(long)]
        base: bool,
        /// Skip the friendliness check (Thue only).
        #[arg(long)]
        unchecked: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the words of a swarm.
    Words {
        swarm: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn chase_scheduler(run: &RunOpts) -> Result<Scheduler> {
    Ok(match run.scheduler.unwrap_or(Sched::Fifo) {
        Sched::Fifo => Scheduler::Fifo,
        Sched::Random => Scheduler::random(run.seed),
        Sched::Spouse => bail!("the spouse scheduler applies to swarm runs only"),
    })
}

fn swarm_scheduler(run: &RunOpts) -> SwarmScheduler {
    match run.scheduler.unwrap_or(Sched::Spouse) {
        Sched::Fifo => SwarmScheduler::Fifo,
        Sched::Random => SwarmScheduler::random(run.seed),
        Sched::Spouse => SwarmScheduler::Spouse,
    }
}

fn instance(path: &Path, ruleset: bool) -> Result<DeterminacyInstance> {
    let src = read(path)?;
    if ruleset {
        let rs = Ruleset::parse(&src)?;
        let world = SpiderWorld::new(rs.s)?;
        let views = rs
            .named()
            .into_iter()
            .map(|(n, b)| Ok((n, world.combine(&b)?)))
            .collect::<Result<Vec<(Name, _)>>>()?;
        return Ok(DeterminacyInstance::with_signature(
            world.base_signature().clone(),
            views,
            world.phi_query(),
        )?);
    }
    let p = parse_determinacy(&src)?;
    Ok(DeterminacyInstance::new(p.views, p.query.1)?)
}

fn verdict_code(rep: &DeterminacyReport) -> u8 {
    match rep.verdict {
        DeterminacyVerdict::Determined { .. } => 0,
        DeterminacyVerdict::NotDetermined => 1,
        DeterminacyVerdict::Unknown { .. } => 2,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Determinacy { file, ruleset, run } => {
            let inst = instance(&file, ruleset)?;
            let rep = decide_determinacy(&inst, run.budget, chase_scheduler(&run)?)?;
            emit(
                run.out.as_deref(),
                &format!("{}\n", serde_json::to_string(&rep.to_json())?),
            )?;
            Ok(verdict_code(&rep))
        }
        Command::Chase { file, format, run } => {
            let inst = instance(&file, false)?;
            let rep = decide_determinacy(&inst, run.budget, chase_scheduler(&run)?)?;
            let text = match format {
                Format::Json => trace_to_json_lines(&rep.trace.steps),
                Format::Dot => structure_to_dot(&rep.trace.final_structure),
                Format::Text => {
                    let mut s = String::new();
                    for a in rep.trace.final_structure.atoms() {
                        writeln!(s, "{a}.")?;
                    }
                    s
                }
            };
            emit(run.out.as_deref(), &text)?;
            eprintln!("{}", serde_json::to_string(&rep.to_json())?);
            Ok(verdict_code(&rep))
        }
        Command::Swarm {
            ruleset,
            start,
            check,
            thue,
            format,
            run,
        } => {
            let rules = Ruleset::parse(&read(&ruleset)?)?;
            let w0 = match &start {
                Some(p) => parse_swarm(&read(p)?)?,
                None => Swarm::green_full(),
            };
            let ts = thue
                .as_deref()
                .map(|p| read(p).and_then(|s| Ok(ThueSystem::parse(&s)?)))
                .transpose()?;
            if check && ts.is_none() {
                bail!("--check needs --thue for the letter roles");
            }
            let mut chase = SwarmChase::new(rules, w0)
                .with_scheduler(swarm_scheduler(&run))
                .with_goal(IdealSpider::full(cqdet::greenred::Color::Red));
            let verdict = chase.run(run.budget);
            let goal = chase.goal_step();
            let trace = chase.into_trace();
            let text = match format {
                Format::Json => {
                    let mut s = String::new();
                    for step in &trace.steps {
                        writeln!(s, "{}", serde_json::to_string(step)?)?;
                    }
                    s
                }
                Format::Dot => swarm_to_dot(&trace.final_swarm),
                Format::Text => swarm_to_text(&trace.final_swarm),
            };
            emit(run.out.as_deref(), &text)?;
            let mut clean = trace.violations.is_empty();
            for v in &trace.violations {
                eprintln!("idempotence: {v}");
            }
            if check {
                let ts = ts.expect("checked above");
                let rep = check_structural(&trace, &StructuralContext::new(ts.roles).with_thue(ts));
                for c in &rep.checks {
                    let n = rep.violations.iter().filter(|(v, _)| v == c).count();
                    eprintln!("{} {c}", if n == 0 { "ok  " } else { "FAIL" });
                }
                for (c, m) in &rep.violations {
                    eprintln!("{c}: {m}");
                }
                for m in &rep.inconclusive {
                    eprintln!("inconclusive: {m}");
                }
                clean &= rep.is_clean();
            }
            eprintln!(
                "{} steps, {} edges, {}",
                trace.steps.len(),
                trace.final_swarm.edge_count(),
                match goal {
                    Some(k) => format!("red full edge at step {k}"),
                    None => format!("{verdict:?}"),
                }
            );
            if !clean {
                return Ok(4);
            }
            Ok(match (goal, verdict) {
                (Some(_), _) => 0,
                (None, cqdet::chase::Verdict::Saturated) => 1,
                (None, cqdet::chase::Verdict::BudgetExhausted) => 2,
            })
        }
        Command::Compile {
            kind,
            file,
            base,
            unchecked,
            out,
        } => {
            let src = read(&file)?;
            let text = match kind {
                Kind::Reach => {
                    let g = Graph::parse(&src)?;
                    let (world, qs) = encode_reachability(&g)?;
                    let mut s = format!("spiders {}\n", world.s());
                    for q in qs {
                        writeln!(s, "query {q}")?;
                    }
                    s
                }
                Kind::Thue => {
                    let ts = ThueSystem::parse(&src)?;
                    let compiled = if unchecked {
                        compile_thue_unchecked(&ts)?
                    } else {
                        let v = validate_friendly(&ts);
                        if !v.is_empty() {
                            for x in &v {
                                eprintln!("- {x}");
                            }
                            bail!("the system is not friendly ({} violations)", v.len());
                        }
                        compile_thue(&ts)?
                    };
                    if base { compiled.q0 } else { compiled.q }.to_string()
                }
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Words { swarm, max_len, out } => {
            let w = parse_swarm(&read(&swarm)?)?;
            let mut s = String::new();
            for word in word_set(&w, max_len) {
                let letters: Vec<String> = word.iter().map(usize::to_string).collect();
                writeln!(s, "{}", letters.join(" "))?;
            }
            emit(out.as_deref(), &s)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
