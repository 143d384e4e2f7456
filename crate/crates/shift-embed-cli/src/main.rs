use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use shift_embed::codes::BlockMap;
use shift_embed::combinatorics::{find_stamp, marker_set};
use shift_embed::constructions::avoiding;
use shift_embed::embedder::{decode_stream, encode_stream, synthesize, verify_certificate_seeded, EmbeddingCertificate};
use shift_embed::invariants::{count_liftable, count_periodic, decide_embeddable, Mode};
use shift_embed::shift_core::{entropy, structure, Presentation};
use shift_embed::{Budget, Error};

#[derive(Parser)]
#[command(name = "shift-embed", version, about = "Embeddings of subshifts through factor codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output layout; `canonical` sorts every object's keys.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Worker threads for checks that split their work.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    #[arg(long, global = true, default_value_t = Budget::default().max_words)]
    max_words: u64,
    #[arg(long, global = true, default_value_t = Budget::default().max_states)]
    max_states: usize,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pretty,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Practical,
    Certified,
}

#[derive(Subcommand)]
enum Command {
    /// Size, structure and entropy of a presentation.
    Info {
        #[arg(long)]
        shift: PathBuf,
    },
    /// Certified entropy interval.
    Entropy {
        #[arg(long)]
        shift: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        precision: f64,
    },
    /// Periodic point and least-period orbit counts.
    Census {
        #[arg(long)]
        shift: PathBuf,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Output orbits with a preimage orbit of equal least period.
    Liftable {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        pi: PathBuf,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Periodic-point condition for embedding `z` through the channel.
    Decide {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
        mode: ModeArg,
    },
    /// Shortest word of `y` occurring exactly once in its contexts against `w`.
    FindStamp {
        #[arg(long)]
        y: PathBuf,
        /// Subshift to separate from; defaults to `y` avoiding `--avoid`.
        #[arg(long, conflicts_with = "avoid", required_unless_present = "avoid")]
        w: Option<PathBuf>,
        #[arg(long)]
        avoid: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
    },
    /// Marker cylinders at scale `n`.
    Markers {
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Builds and verifies an embedding certificate.
    Synthesize {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        z: PathBuf,
    },
    /// Re-runs every check of a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        /// Seed for the codec test words.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Applies the embedding to a word of `z`.
    Encode {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        word: String,
        /// Also apply the channel, giving the transmitted word.
        #[arg(long)]
        through_channel: bool,
    },
    /// Recovers a word of `z` from a transmitted word.
    Decode {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        word: String,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
    Rejected(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Malformed(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_shift(path: &Path) -> Result<Presentation, Failure> {
    Presentation::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_code(path: &Path) -> Result<BlockMap, Failure> {
    BlockMap::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_cert(path: &Path) -> Result<EmbeddingCertificate, Failure> {
    EmbeddingCertificate::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn doc<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("result documents serialize")
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let budget = Budget { max_words: cli.max_words, max_states: cli.max_states, threads: cli.threads.into() };
    Ok(match &cli.command {
        Command::Info { shift } => {
            let p = load_shift(shift)?;
            json!({
                "alphabet": p.alphabet().symbols().map(|a| p.alphabet().name(a).to_string()).collect::<Vec<_>>(),
                "vertices": p.vertex_count(),
                "edges": p.edges().len(),
                "sft": p.sft_flag(),
                "one_step": p.is_one_step(),
                "structure": doc(&structure(&p, &budget)?),
                "entropy": doc(&entropy(&p, 1e-9, &budget)?),
            })
        }
        Command::Entropy { shift, precision } => {
            if !(*precision > 0.0 && *precision < 1.0) {
                return Err(Failure::Usage(format!("precision {precision} is not in (0, 1)")));
            }
            doc(&entropy(&load_shift(shift)?, *precision, &budget)?)
        }
        Command::Census { shift, n_max } => doc(&count_periodic(&load_shift(shift)?, *n_max, &budget)?),
        Command::Liftable { x, pi, n_max } => doc(&count_liftable(&load_shift(x)?, &load_code(pi)?, *n_max, &budget)?),
        Command::Decide { x, pi, z, mode } => {
            let mode = match mode {
                ModeArg::Practical => Mode::Practical,
                ModeArg::Certified => Mode::Certified,
            };
            doc(&decide_embeddable(&load_shift(x)?, &load_code(pi)?, &load_shift(z)?, mode, &budget)?)
        }
        Command::FindStamp { y, w, avoid, k, max_len } => {
            let yp = load_shift(y)?;
            let wp = match (w, avoid) {
                (Some(w), _) => load_shift(w)?,
                (None, Some(theta)) => avoiding(&yp, &yp.alphabet().parse(theta).map_err(|e| Failure::Usage(e.to_string()))?)?,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let stamp = find_stamp(&yp, &wp, *k, *max_len, &budget)?;
            let mut out = doc(&stamp);
            out["text"] = yp.alphabet().render(&stamp.word).into();
            out
        }
        Command::Markers { z, n } => {
            let zp = load_shift(z)?;
            let m = marker_set(&zp, *n, &budget)?;
            let mut out = doc(&m);
            out["text"] = m.cylinders.iter().map(|c| zp.alphabet().render(c)).collect::<Vec<_>>().into();
            out
        }
        Command::Synthesize { x, pi, z } => {
            let cert = synthesize(&load_shift(x)?, &load_code(pi)?, &load_shift(z)?, &budget)?;
            doc(&cert)
        }
        Command::Verify { cert, seed } => {
            let cert = load_cert(cert)?;
            let t = verify_certificate_seeded(&cert, &budget, *seed)?;
            let out = json!({
                "passed": t.passed(),
                "matches_recorded": t == cert.transcript,
                "transcript": doc(&t),
            });
            if !t.passed() {
                return Err(Failure::Rejected(out));
            }
            out
        }
        Command::Encode { cert, word, through_channel } => {
            let cert = load_cert(cert)?;
            let w = cert.z.alphabet().parse(word).map_err(|e| Failure::Usage(e.to_string()))?;
            let x = encode_stream(&cert, &w)?;
            if *through_channel {
                json!({ "word": cert.pi.target().render(&cert.pi.apply(&x)?) })
            } else {
                json!({ "word": cert.x.alphabet().render(&x) })
            }
        }
        Command::Decode { cert, word } => {
            let cert = load_cert(cert)?;
            let y = cert.pi.target().parse(word).map_err(|e| Failure::Usage(e.to_string()))?;
            let d = decode_stream(&cert, &y)?;
            json!({ "offset": d.offset, "word": cert.z.alphabet().render(&d.word) })
        }
    })
}

fn emit(cli: &Cli, value: &Value) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Pretty => serde_json::to_string_pretty(value),
        Format::Canonical => serde_json::to_string_pretty(&canonical(value)),
    }
    .expect("values serialize")
        + "\n";
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Rebuilds every object through an ordered map.
fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: std::collections::BTreeMap<&String, Value> = m.iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().map(|(k, v)| (k.clone(), v)).collect())
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|v| emit(&cli, &v));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_limit() { 3 } else { 1 })
        }
        Err(Failure::Rejected(v)) => {
            let _ = emit(&cli, &v);
            eprintln!("error: the certificate fails verification");
            ExitCode::from(1)
        }
    }
}
