use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use objlift::assertions::Universe;
use objlift::interp::{render_footprint, run, RunResult, DEFAULT_FUEL};
use objlift::parser::{parse_expr, parse_program, parse_proof, parse_state, render_program, render_proof, render_type, with_aux};
use objlift::proofs::{check, translate_proof, CheckOptions, System};
use objlift::state::{State, Value};
use objlift::suites::{run_suite, SuiteConfig, SUITES};
use objlift::syntax::{typecheck, Flavor, Program, THIS};
use objlift::transform::transform_program;
use objlift::wp::{render_members, wp_semantic, wp_symbolic, Membership, Mode, StateSpace};

#[derive(Parser)]
#[command(name = "objlift", version, about = "Run, transform and verify programs of a small object language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct UniverseArgs {
    /// Integer range of quantifiers and enumerated states.
    #[arg(long, value_name = "LO..HI", default_value = "-8..8", value_parser = parse_range, allow_hyphen_values = true)]
    int_range: (i64, i64),
    /// Number of non-null objects.
    #[arg(long, default_value_t = 4)]
    objects: u32,
}

impl UniverseArgs {
    fn universe(&self) -> Universe {
        Universe::new(self.int_range.0, self.int_range.1, self.objects)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the normalized rendering of a program, state or proof.
    Parse {
        file: PathBuf,
        /// Declarations for a proof file.
        #[arg(long)]
        program: Option<PathBuf>,
    },
    /// Run a program and print its final state.
    Run {
        file: PathBuf,
        /// Initial state; defaults to all defaults with `this` = o1.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Translate an object-oriented program into a recursive one.
    Transform {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weakest precondition of a program's main statement.
    Wp {
        file: PathBuf,
        /// Postcondition.
        #[arg(long)]
        post: String,
        #[arg(long, default_value = "p")]
        mode: Mode,
        /// Print the symbolic precondition instead of enumerating states.
        #[arg(long)]
        symbolic: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Check a derivation and discharge its obligations.
    CheckProof {
        file: PathBuf,
        #[arg(long)]
        system: System,
        #[arg(long)]
        program: PathBuf,
        /// Also translate the derivation and check the result.
        #[arg(long)]
        translate: bool,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Run a named property suite; `suite list` names them.
    Suite {
        name: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        #[arg(long, default_value_t = 4000)]
        fuel: u64,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Exit status with a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn rejected(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let program = parse_program(&read(path)?, &origin(path)).map_err(|e| rejected(e.to_string()))?;
    let diags = typecheck(&program);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
        return Err(rejected(lines.join("\n")));
    }
    Ok(program)
}

fn render(p: &Program) -> Result<String, Failure> {
    render_program(p).map_err(|e| rejected(e.to_string()))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn cmd_parse(file: &Path, program: Option<&Path>) -> Result<u8, Failure> {
    match extension(file) {
        "state" => {
            let s = parse_state(&read(file)?, &origin(file)).map_err(|e| rejected(e.to_string()))?;
            println!("{s}");
        }
        "prf" => {
            let decls = program.ok_or_else(|| usage("parsing a proof needs --program"))?;
            let p = load_program(decls)?;
            let f = parse_proof(&read(file)?, &origin(file), &p).map_err(|e| rejected(e.to_string()))?;
            print!("{}", render_proof(&f.derivation).map_err(|e| rejected(e.to_string()))?);
        }
        _ => print!("{}", render(&load_program(file)?)?),
    }
    Ok(0)
}

fn cmd_run(file: &Path, state: Option<&Path>, fuel: u64) -> Result<u8, Failure> {
    let program = load_program(file)?;
    let start = match state {
        Some(path) => parse_state(&read(path)?, &origin(path)).map_err(|e| rejected(e.to_string()))?,
        None => {
            let mut s = State::new();
            if program.flavor == Flavor::ObjectOriented {
                s.set_normal(THIS, Value::oid(1));
            }
            s
        }
    };
    match run(&program, &start, fuel).map_err(|e| rejected(e.to_string()))? {
        RunResult::Terminated(s) => {
            println!("{}", render_footprint(&program, &s));
            Ok(0)
        }
        RunResult::Failed => {
            println!("FAIL");
            Ok(0)
        }
        r @ RunResult::OutOfFuel(_) => {
            println!("{r}");
            Ok(3)
        }
    }
}

fn cmd_transform(file: &Path, output: Option<&Path>) -> Result<u8, Failure> {
    let program = load_program(file)?;
    let image = transform_program(&program).map_err(|e| rejected(e.to_string()))?;
    let mut text = format!("// transformed from {}\n", file.display());
    for m in &image.var_mapping {
        text += &format!(
            "// varMapping: ivar {}: {} -> var {}: {}\n",
            m.instance.name,
            render_type(&m.instance.ty),
            m.lifted.name,
            render_type(&m.lifted.ty)
        );
    }
    text += &render(&image.program)?;
    match output {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_wp(file: &Path, post: &str, mode: Mode, symbolic: bool, fuel: u64, u: Universe) -> Result<u8, Failure> {
    let program = load_program(file)?;
    let post = parse_expr(post, "--post", &program).map_err(|e| rejected(e.to_string()))?;
    if symbolic {
        let pre = wp_symbolic(&program.main, &post, mode).map_err(|e| rejected(e.to_string()))?;
        println!("{pre}");
        return Ok(0);
    }
    let space = StateSpace::for_program(u, &program);
    let Some(size) = space.size() else { return Err(Failure { code: 3, message: "state space too large".into() }) };
    let set = wp_semantic(&program.main, &program.decls, &post, &space, fuel, mode);
    print!("{}", render_members(&space, &set));
    let unknown = set.count(Membership::Unknown);
    println!("{} of {size} states, {unknown} unknown", set.count(Membership::In));
    Ok(if unknown > 0 { 3 } else { 0 })
}

fn cmd_check(file: &Path, system: System, program: &Path, translate: bool, u: Universe) -> Result<u8, Failure> {
    let base = load_program(program)?;
    let proof = parse_proof(&read(file)?, &origin(file), &base).map_err(|e| rejected(e.to_string()))?;
    let p = with_aux(&base, &proof.aux);
    let opts = CheckOptions::with_universe(u);
    let verdict = check(&proof.derivation, system, &p, &opts);
    print!("{verdict}");
    let mut code = verdict.exit_code() as u8;
    if translate && code != 2 {
        let t = translate_proof(&proof.derivation, system, &p, &opts).map_err(|e| rejected(e.to_string()))?;
        println!("translated derivation ({})", t.system);
        print!("{}", render_proof(&t.derivation).map_err(|e| rejected(e.to_string()))?);
        let v = check(&t.derivation, t.system, &t.program, &opts);
        print!("{v}");
        code = code.max(v.exit_code() as u8);
    }
    Ok(code)
}

fn cmd_suite(name: &str, cfg: SuiteConfig) -> Result<u8, Failure> {
    if name == "list" {
        SUITES.iter().for_each(|s| println!("{s}"));
        return Ok(0);
    }
    let report = run_suite(name, &cfg).ok_or_else(|| usage(format!("unknown suite `{name}`; try `suite list`")))?;
    println!("{report}");
    Ok(if report.ok() { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Parse { file, program } => cmd_parse(file, program.as_deref()),
        Command::Run { file, state, fuel } => cmd_run(file, state.as_deref(), *fuel),
        Command::Transform { file, output } => cmd_transform(file, output.as_deref()),
        Command::Wp { file, post, mode, symbolic, fuel, universe } => {
            cmd_wp(file, post, *mode, *symbolic, *fuel, universe.universe())
        }
        Command::CheckProof { file, system, program, translate, universe } => {
            cmd_check(file, *system, program, *translate, universe.universe())
        }
        Command::Suite { name, seed, cases, fuel } => {
            cmd_suite(name, SuiteConfig { seed: *seed, cases: *cases, fuel: *fuel })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
