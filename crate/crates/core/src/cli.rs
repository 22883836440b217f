//! Command-line front end. [`run`] takes the argument vector and the two
//! output streams and returns the process exit code: 0 when the property
//! holds, 1 when it is refuted (a witness is printed), 2 on usage, input or
//! limit errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::distributability::{check_distributed, find_pure_m};
use crate::equivalence::{bounded_observation, compare, find_local_deadlock};
use crate::net::{check_contact_free, parse_net, serialize_net, ContactVerdict, LabelledNet};
use crate::semantics::DEFAULT_STATE_LIMIT;
use crate::transforms::{builtin, refine_transition, Builtin};
use crate::unfolding::{default_event_limit, enumerate_processes, visible_pomset, Pomset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "causalnet", version, about = "Causal semantics of 1-safe labelled Petri nets")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Limits {
    /// Maximum number of reachable markings to explore.
    #[arg(long, default_value_t = DEFAULT_STATE_LIMIT as u64, value_parser = clap::value_parser!(u64).range(1..))]
    limit: u64,
}

#[derive(Debug, clap::Args)]
struct Bound {
    /// Maximum number of visible events per process.
    #[arg(short = 'k', default_value_t = 4)]
    k: usize,
    /// Maximum number of events per process (default 10k + 50).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    event_limit: Option<u64>,
}

impl Bound {
    fn event_limit(&self) -> usize {
        self.event_limit
            .map_or_else(|| default_event_limit(self.k), |n| n as usize)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check structure and contact-freeness.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Print the reachability graph.
    Reach {
        file: PathBuf,
        /// Track causal dependencies on tokens.
        #[arg(long)]
        dependency: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Decide whether the net is distributed.
    Distributed {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// List fully reachable pure M substructures.
    PureM {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Enumerate processes up to a visible-event bound.
    Unfold {
        file: PathBuf,
        #[command(flatten)]
        bound: Bound,
        /// Only list maximal processes.
        #[arg(long)]
        complete_only: bool,
    },
    /// Print the bounded complete and partial pomset sets.
    Pomsets {
        file: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// Compare two nets up to a visible-event bound.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// Search for local deadlocks.
    Deadlock {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Insert a τ-transition and a buffer place in front of a transition.
    Refine {
        file: PathBuf,
        /// Transition to refine.
        #[arg(short = 't')]
        transition: String,
        /// Write the net here instead of standard output.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Print a built-in net.
    Example {
        /// pure_m, repeated_pure_m, centralised or deadlocking.
        name: String,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

struct Failure(String);

type Outcome = Result<i32, Failure>;

fn load(path: &Path) -> Result<LabelledNet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_net(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn pomset_blocks(out: &mut String, set: &std::collections::BTreeSet<Pomset>, tsv: bool, tag: &str) {
    for p in set {
        if tsv {
            out.push_str(&format!("pomset\t{tag}\n"));
            out.push_str(&p.to_tsv());
        } else {
            out.push_str(&format!("{p}\n\n"));
        }
    }
}

fn execute(cli: Cli, out: &mut String, err: &mut String) -> Outcome {
    let tsv = cli.format == Format::Tsv;
    match cli.command {
        Command::Validate { file, limits } => {
            let net = load(&file)?;
            match check_contact_free(&net, limits.limit as usize) {
                ContactVerdict::ContactFree { markings } => {
                    if tsv {
                        out.push_str(&format!(
                            "valid\t{}\t{}\t{markings}\n",
                            net.place_count(),
                            net.transition_count()
                        ));
                    } else {
                        out.push_str(&format!(
                            "valid: {} places, {} transitions, contact-free over {markings} reachable markings\n",
                            net.place_count(),
                            net.transition_count()
                        ));
                    }
                    Ok(0)
                }
                ContactVerdict::Violation { marking, transition } => {
                    let t = net.transition_name(transition);
                    let m = marking.display(&net).to_string();
                    if tsv {
                        out.push_str(&format!("contact\t{t}\t{m}\n"));
                    } else {
                        out.push_str(&format!("contact situation: {t} at {m}\n"));
                    }
                    Ok(1)
                }
                ContactVerdict::LimitExceeded { explored } => Err(Failure(format!(
                    "state limit reached after {explored} markings"
                ))),
            }
        }
        Command::Reach {
            file,
            dependency,
            limits,
        } => {
            let net = load(&file)?;
            let g = crate::semantics::explore_reachable(&net, dependency, limits.limit as usize);
            if g.truncated {
                return Err(Failure(format!(
                    "state limit of {} markings exceeded",
                    limits.limit
                )));
            }
            let bound = g.bound.map_or_else(|| "overflow".to_owned(), |b| b.to_string());
            if tsv {
                out.push_str(&format!("markings\t{}\nbound\t{bound}\n", g.node_count()));
                out.push_str(&g.dump_tsv(&net));
            } else {
                out.push_str(&format!("markings: {}\nbound: {bound}\n", g.node_count()));
                out.push_str(&g.dump(&net));
            }
            Ok(0)
        }
        Command::Distributed { file, limits } => {
            let net = load(&file)?;
            let v = check_distributed(&net, limits.limit as usize).map_err(|e| Failure(e.to_string()))?;
            out.push_str(&if tsv { v.render_tsv(&net) } else { v.render(&net) });
            Ok(if v.is_distributed() { 0 } else { 1 })
        }
        Command::PureM { file, limits } => {
            let net = load(&file)?;
            let ws = find_pure_m(&net, limits.limit as usize).map_err(|e| Failure(e.to_string()))?;
            if ws.is_empty() && !tsv {
                out.push_str("no pure M\n");
            }
            for w in &ws {
                if tsv {
                    let m: Vec<&str> = w.marking.iter().map(|p| net.place_name(p)).collect();
                    out.push_str(&format!(
                        "pure_m\t{}\t{}\t{}\t{}\n",
                        net.transition_name(w.left),
                        net.transition_name(w.middle),
                        net.transition_name(w.right),
                        m.join(",")
                    ));
                } else {
                    out.push_str(&format!("pure M: {}\n", w.render(&net)));
                }
            }
            Ok(if ws.is_empty() { 0 } else { 1 })
        }
        Command::Unfold {
            file,
            bound,
            complete_only,
        } => {
            let net = load(&file)?;
            let u = enumerate_processes(&net, bound.k, bound.event_limit());
            for (i, p) in u.processes.iter().enumerate() {
                if complete_only && !p.maximal {
                    continue;
                }
                let status = if p.maximal {
                    "maximal"
                } else if p.saturated {
                    "saturated"
                } else {
                    "open"
                };
                let pomset = visible_pomset(&net, &p.process);
                if tsv {
                    out.push_str(&format!(
                        "process\t{i}\t{status}\t{}\t{}\n",
                        p.process.event_count(),
                        pomset.len()
                    ));
                    out.push_str(&pomset.to_tsv());
                } else {
                    out.push_str(&format!(
                        "process {i} ({status}, {} events)\n{}{pomset}\n\n",
                        p.process.event_count(),
                        p.process.describe(&net)
                    ));
                }
            }
            if u.diverged {
                err.push_str("warning: event limit reached; some τ-branches were cut\n");
            }
            Ok(0)
        }
        Command::Pomsets { file, bound } => {
            let net = load(&file)?;
            let obs = bounded_observation(&net, bound.k, bound.event_limit());
            if tsv {
                out.push_str(&format!("bound\t{}\ndivergent\t{}\n", obs.bound, obs.divergent));
            } else {
                out.push_str(&format!(
                    "bound: {}\ndivergent: {}\n\n",
                    obs.bound,
                    if obs.divergent { "yes" } else { "no" }
                ));
                out.push_str(&format!("complete ({}):\n\n", obs.complete.len()));
            }
            pomset_blocks(out, &obs.complete, tsv, "complete");
            if !tsv {
                out.push_str(&format!("partial ({}):\n\n", obs.partial.len()));
            }
            pomset_blocks(out, &obs.partial, tsv, "partial");
            Ok(0)
        }
        Command::Compare { a, b, bound } => {
            let na = load(&a)?;
            let nb = load(&b)?;
            let v = compare(&na, &nb, bound.k, bound.event_limit());
            if tsv {
                out.push_str(&v.to_tsv());
            } else {
                out.push_str(&format!("{v}\n"));
            }
            Ok(if v.equivalent() { 0 } else { 1 })
        }
        Command::Deadlock { file, limits } => {
            let net = load(&file)?;
            let ws = find_local_deadlock(&net, limits.limit as usize).map_err(|e| Failure(e.to_string()))?;
            if ws.is_empty() && !tsv {
                out.push_str("no local deadlock\n");
            }
            for (i, w) in ws.iter().enumerate() {
                if tsv {
                    out.push_str(&w.render_tsv(&net));
                } else {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(&format!("local deadlock\n{}\n", w.render(&net)));
                }
            }
            Ok(if ws.is_empty() { 0 } else { 1 })
        }
        Command::Refine {
            file,
            transition,
            output,
        } => {
            let net = load(&file)?;
            let (refined, rec) =
                refine_transition(&net, &transition).map_err(|e| Failure(e.to_string()))?;
            let summary = format!(
                "refined {}: new place {}, new transition {}\n",
                rec.target, rec.new_place, rec.new_tau
            );
            match output {
                Some(path) => {
                    write_file(&path, &serialize_net(&refined))?;
                    out.push_str(&summary);
                }
                None => {
                    out.push_str(&format!("# {summary}"));
                    out.push_str(&serialize_net(&refined));
                }
            }
            Ok(0)
        }
        Command::Example { name, output } => {
            let which: Builtin = name.parse().map_err(Failure)?;
            let text = serialize_net(&builtin(which));
            match output {
                Some(path) => write_file(&path, &text)?,
                None => out.push_str(&text),
            }
            Ok(0)
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut stdout = String::new();
    let mut stderr = String::new();
    let code = match execute(cli, &mut stdout, &mut stderr) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            stderr.push_str(&format!("error: {msg}\n"));
            2
        }
    };
    let _ = out.write_all(stdout.as_bytes());
    let _ = err.write_all(stderr.as_bytes());
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("causalnet").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn example_prints_the_net() {
        let (code, out, _) = invoke(&["example", "pure_m"]);
        assert_eq!(code, 0);
        assert_eq!(out, serialize_net(&builtin(Builtin::PureM)));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(invoke(&[]).0, 2);
        assert_eq!(invoke(&["example", "nope"]).0, 2);
        assert_eq!(invoke(&["reach", "/nonexistent.net"]).0, 2);
        assert_eq!(invoke(&["reach", "x.net", "--limit", "0"]).0, 2);
        let (code, out, _) = invoke(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("Usage"));
    }
}
