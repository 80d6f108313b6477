use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use txs_core::expr::Format;
use txs_cli::eval::BUILTINS;
use txs_cli::script::{parse_conventions, split_statements, standard_preamble, Interpreter, Options, Statement, Status};

/// Symbolic abstract-index tensor algebra.
#[derive(Parser)]
#[command(name = "txs", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "plain")]
    format: Format,
    /// Sign conventions, e.g. `riemann=+1,ricci=+1`.
    #[arg(long, global = true)]
    conventions: Option<String>,
    /// Script run before a one-shot command instead of the default session.
    #[arg(long, global = true)]
    prelude: Option<PathBuf>,
    /// Dimension of the default session's manifold (an integer or a symbol),
    /// and the target dimension of `ddis` and `euler`.
    #[arg(long, global = true, default_value = "d")]
    dim: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script.
    Run {
        path: PathBuf,
        /// Continue past failed assertions and errors.
        #[arg(long)]
        keep_going: bool,
        /// Seed for random numeric checks.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print per-statement status and timing to stderr.
        #[arg(long)]
        report: bool,
    },
    /// Interactive prompt.
    Repl,
    /// Canonical form of an expression.
    Canon { expr: String },
    /// All independent contractions of a product.
    Contractions {
        expr: String,
        /// Free indices of the result, e.g. `-a,-b`.
        #[arg(long)]
        frees: Option<String>,
        /// Symmetry of the frees: `sym`, `antisym`, or `tableau {{a,b},{c}}`.
        #[arg(long)]
        sym: Option<String>,
    },
    /// All independent arrangements of the free indices.
    Configurations { expr: String },
    /// Trace-free part of a tensor.
    Traceless { expr: String },
    /// Dimensionally dependent identities in the `--dim` dimension.
    Ddis {
        expr: String,
        #[arg(long)]
        frees: Option<String>,
        #[arg(long)]
        sym: Option<String>,
        /// Largest dimension expanded.
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Sum of the expressions in a file (one per line) with fresh constants.
    Ansatz { file: PathBuf },
    /// Solve the equations in a file (one per line) for their constants.
    SolveConstants { file: PathBuf },
    /// Solve the equations in a file for tensor structures.
    SolveTensors {
        file: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        no_symmetries: bool,
        /// `all` (default) or `none`.
        #[arg(long, default_value = "all")]
        metric_on: String,
    },
    /// Variational derivative.
    VarD {
        expr: String,
        /// Field varied, e.g. `g[-a,-b]`.
        #[arg(long)]
        wrt: Option<String>,
    },
    /// Metric variation of a Lagrangian density.
    VarL {
        expr: String,
        #[arg(long)]
        wrt: Option<String>,
    },
    /// Euler density in the `--dim` dimension.
    Euler {
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Bianchi identities and derivative ordering until nothing changes.
    Simplify { expr: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let conventions = match cli.conventions.as_deref().map(parse_conventions) {
        None => None,
        Some(Ok((r, c))) => Some((r.unwrap_or(1), c.unwrap_or(1))),
        Some(Err(e)) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    let mut options = Options {
        format: cli.format,
        conventions,
        ..Options::default()
    };
    let code = match &cli.command {
        Command::Run {
            path,
            keep_going,
            seed,
            report,
        } => {
            options.keep_going = *keep_going;
            options.seed = *seed;
            run(path, options, *report)
        }
        Command::Repl => repl(&cli, options),
        cmd => one_shot(&cli, cmd, options),
    };
    ExitCode::from(code)
}

fn run(path: &PathBuf, options: Options, show_report: bool) -> u8 {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            return 2;
        }
    };
    let mut interp = Interpreter::new(options);
    let mut stdout = std::io::stdout().lock();
    let mut code = 0;
    for st in split_statements(&src) {
        let r = interp.run_statement(&st);
        match (r.status, &r.output) {
            (Status::Ok, Some(o)) => {
                let _ = writeln!(stdout, "{}", o);
            }
            (Status::Ok, None) => {}
            (_, o) => eprintln!("{}", o.as_deref().unwrap_or("")),
        }
        if show_report {
            eprintln!(
                "line {:>4}  {:<5}  {:>9.3} ms  {}",
                r.line,
                r.status,
                r.elapsed.as_secs_f64() * 1e3,
                r.source
            );
        }
        code = code.max(match r.status {
            Status::Ok => 0,
            Status::Fail => 1,
            Status::Error => 2,
        });
        if r.status != Status::Ok && !interp.options.keep_going {
            break;
        }
    }
    code
}

/// A session set up from `--prelude` or the default declarations.
fn prepared(cli: &Cli, options: Options) -> Result<Interpreter, String> {
    let mut interp = Interpreter::new(options);
    let src = match &cli.prelude {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {}", p.display(), e))?,
        None => standard_preamble(&cli.dim),
    };
    let report = interp.run_source(&src);
    if report.exit_code() != 0 {
        let msg = report
            .statements
            .iter()
            .filter(|&s| s.status != Status::Ok ).map(|s| s.output.clone().unwrap_or_default())
            .collect::<Vec<_>>()
            .join("\n");
        return Err(format!("in the prelude: {}", msg));
    }
    Ok(interp)
}

fn repl(cli: &Cli, options: Options) -> u8 {
    let mut interp = match prepared(cli, options) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let interactive = std::io::stdin().is_terminal();
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let mut line_no = 0;
    let mut buffer = String::new();
    loop {
        if interactive {
            print!("{}", if buffer.is_empty() { "txs> " } else { "...> " });
            let _ = std::io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        line_no += 1;
        let trimmed = line.trim();
        if buffer.is_empty() {
            if let Some(cmd) = trimmed.strip_prefix(':') {
                let (word, arg) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
                match word {
                    "quit" | "q" | "exit" => return 0,
                    "save" if !arg.trim().is_empty() => match std::fs::write(arg.trim(), interp.transcript()) {
                        Ok(()) => eprintln!("saved to {}", arg.trim()),
                        Err(e) => eprintln!("error: cannot write {}: {}", arg.trim(), e),
                    },
                    "save" => eprintln!("error: usage `:save PATH`"),
                    "help" => {
                        for (_, usage) in BUILTINS {
                            println!("  {}", usage);
                        }
                    }
                    _ => eprintln!("error: unknown command `:{}` (try :help, :save PATH, :quit)", word),
                }
                continue;
            }
        }
        match trimmed.strip_suffix('\\') {
            Some(part) => {
                buffer.push_str(part);
                buffer.push(' ');
                continue;
            }
            None => buffer.push_str(&line),
        }
        for st in split_statements(&std::mem::take(&mut buffer)) {
            let r = interp.run_statement(&Statement {
                line: line_no,
                text: st.text,
            });
            match (r.status, r.output) {
                (Status::Ok, Some(o)) => println!("{}", o),
                (Status::Ok, None) => {}
                (_, o) => eprintln!("{}", o.unwrap_or_default()),
            }
        }
    }
    0
}

fn index_list(text: &str) -> String {
    format!("{{{}}}", text)
}

fn sym_arg(text: &str) -> String {
    text.trim().strip_prefix("tableau").map(str::trim).unwrap_or(text).to_string()
}

fn statements_of(path: &PathBuf) -> Result<Vec<String>, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    Ok(split_statements(&src).into_iter().map(|s| s.text).collect())
}

fn one_shot(cli: &Cli, cmd: &Command, options: Options) -> u8 {
    let mut interp = match prepared(cli, options) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let call = match build_call(cli, cmd, &interp) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    match interp.execute(&call) {
        Ok(Some(out)) => {
            match cmd {
                Command::SolveConstants { .. } if cli.format == Format::Plain => println!("let solution = {}", out),
                Command::SolveTensors { .. } if cli.format == Format::Plain => println!("let rules = {}", out),
                _ => println!("{}", out),
            }
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn build_call(cli: &Cli, cmd: &Command, interp: &Interpreter) -> Result<String, String> {
    let metric = || {
        interp
            .session
            .metric_name()
            .map(|g| format!("{}[-a,-b]", g))
            .ok_or_else(|| "no metric is declared".to_string())
    };
    Ok(match cmd {
        Command::Canon { expr } => format!("canon({})", expr),
        Command::Contractions { expr, frees, sym } => {
            let mut c = format!("contractions({}, {}", expr, index_list(frees.as_deref().unwrap_or("")));
            if let Some(s) = sym {
                c.push_str(&format!(", sym={}", sym_arg(s)));
            }
            c + ")"
        }
        Command::Configurations { expr } => format!("configurations({})", expr),
        Command::Traceless { expr } => format!("traceless({})", expr),
        Command::Ddis { expr, frees, sym, cap } => {
            let mut c = format!("ddis({}, {}", expr, index_list(frees.as_deref().unwrap_or("")));
            if let Ok(d) = cli.dim.parse::<i64>() {
                c.push_str(&format!(", dim={}", d));
            }
            if let Some(s) = sym {
                c.push_str(&format!(", sym={}", sym_arg(s)));
            }
            if let Some(k) = cap {
                c.push_str(&format!(", cap={}", k));
            }
            c + ")"
        }
        Command::Ansatz { file } => format!("ansatz({{{}}})", statements_of(file)?.join(", ")),
        Command::SolveConstants { file } => format!("solve_constants({{{}}})", statements_of(file)?.join(", ")),
        Command::SolveTensors {
            file,
            target,
            no_symmetries,
            metric_on,
        } => {
            let metric_on = match metric_on.as_str() {
                "all" => 1,
                "none" => 0,
                other => return Err(format!("--metric-on takes `all` or `none`, got `{}`", other)),
            };
            let mut c = format!(
                "solve_tensors({{{}}}, use_symmetries={}, metric_on={}",
                statements_of(file)?.join(", "),
                u8::from(!no_symmetries),
                metric_on
            );
            if let Some(t) = target {
                c.push_str(&format!(", target={}", t));
            }
            c + ")"
        }
        Command::VarD { expr, wrt } => format!("var_d({}, {})", expr, wrt.clone().map_or_else(metric, Ok)?),
        Command::VarL { expr, wrt } => format!("var_l({}, {})", expr, wrt.clone().map_or_else(metric, Ok)?),
        Command::Euler { cap } => {
            let n: i64 = cli
                .dim
                .parse()
                .map_err(|_| "euler needs an integer `--dim N`".to_string())?;
            match cap {
                Some(k) => format!("euler({}, cap={})", n, k),
                None => format!("euler({})", n),
            }
        }
        Command::Simplify { expr } => format!("simplify({})", expr),
        Command::Run { .. } | Command::Repl => unreachable!(),
    })
}
