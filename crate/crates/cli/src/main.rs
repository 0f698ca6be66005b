use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use forge_core::area::{self, Limits, Method};
use forge_core::derivation::{self, check_derivation};
use forge_core::diagram::{self, band_side_label, boundary_position, diagram_from_derivation, trace_bands, Side};
use forge_core::smachine::{self, AdmissibleWord, SMachine};
use forge_core::subdisc::{subdisc_search, SubdiscLimits};
use forge_core::tm::{self, TuringMachine};
use forge_core::{encode, lemma3, presentation, Symbol, Word};

#[derive(Parser)]
#[command(name = "forge", version, about = "S-machines, their group presentations and van Kampen diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an S-machine (or a Turing machine) for well-formedness.
    Validate(MachineArg),
    /// Apply a sequence of rules to an admissible word.
    Simulate {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long)]
        word: String,
        /// Rule names, separated by spaces or commas.
        #[arg(long)]
        rules: String,
    },
    /// Enumerate the words reachable from an admissible word.
    Reach {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
    },
    /// Build the group presentation of an S-machine, or re-read one.
    Present(PresentArgs),
    /// Count state components, generators and relators.
    Census(MachineArg),
    /// Encode a Turing machine configuration as an admissible word.
    EncodeSigma {
        #[arg(long)]
        tm: String,
        /// Input word; the start configuration on it is encoded.
        #[arg(long, conflicts_with = "accept")]
        input: Option<String>,
        /// Encode the accept configuration instead.
        #[arg(long)]
        accept: bool,
        /// Exponent of α and ω.
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    /// Print the hub word K(u), or H(u) for a Turing machine input.
    Hub {
        #[arg(long, required_unless_present = "input")]
        word: Option<String>,
        #[arg(long, requires = "input")]
        tm: Option<String>,
        #[arg(long, requires = "tm", conflicts_with = "word")]
        input: Option<String>,
        #[arg(long = "N", default_value_t = 1)]
        big_n: usize,
    },
    /// Check the conjugation identity derivation for a given n.
    VerifyLemma3 {
        #[arg(long)]
        n: usize,
        /// Check this derivation file instead of the built-in one.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Write the derivation to a file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bounded area of a word, with a witness derivation.
    Area {
        /// `s4`, `core` or a presentation file.
        #[arg(long, default_value = "core")]
        presentation: String,
        #[arg(long, required_unless_present = "loop_n")]
        word: Option<String>,
        /// Use the loop u_n as the word.
        #[arg(long = "loop", conflicts_with = "word")]
        loop_n: Option<usize>,
        #[arg(long, default_value_t = 256)]
        max_area: usize,
        #[arg(long, default_value_t = 64)]
        max_len: usize,
        /// Write the witness derivation to a file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Trace the bands of a rule letter in the diagram of u_n.
    Bands {
        #[arg(long)]
        n: usize,
        /// `s1`, `s4` or a generator name.
        #[arg(long, default_value = "s4")]
        letter: String,
    },
    /// Search for a decomposition of u_n into small subdiscs.
    Subdisc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        perim: usize,
        /// Comma separated caps, e.g. `chord=2,area=64,len=64,threads=4`.
        #[arg(long, default_value = "")]
        caps: String,
    },
    /// Write the diagram of u_n in DOT format.
    ExportDot {
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MachineArg {
    /// Built-in name (S1..S4) or an S-machine file.
    #[arg(long)]
    machine: Option<String>,
    /// Built-in fixture name (unary, two-tape) or a Turing machine file.
    #[arg(long)]
    tm: Option<String>,
}

#[derive(Args)]
struct PresentArgs {
    #[arg(long, required_unless_present = "parse", conflicts_with = "parse")]
    machine: Option<String>,
    #[arg(long = "N", requires = "hub", default_value_t = 1)]
    big_n: usize,
    /// File holding the admissible word W0 for the hub relator.
    #[arg(long, requires = "machine")]
    hub: Option<PathBuf>,
    /// Re-read a presentation file and print it back.
    #[arg(long)]
    parse: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_machine(spec: &str) -> Result<SMachine> {
    if let Ok(m) = smachine::builtin(spec) {
        return Ok(m);
    }
    let text = read(Path::new(spec))?;
    smachine::parse_machine(&text).with_context(|| format!("parsing {spec}"))
}

fn load_tm(spec: &str) -> Result<TuringMachine> {
    match spec {
        "unary" => Ok(tm::fixtures::unary()),
        "two-tape" | "two_tape" => Ok(tm::fixtures::two_tape()),
        path => {
            let text = read(Path::new(path))?;
            tm::parse_tm(&text).with_context(|| format!("parsing {path}"))
        }
    }
}

fn machine_of(arg: &MachineArg) -> Result<SMachine> {
    match (&arg.machine, &arg.tm) {
        (Some(m), _) => load_machine(m),
        (None, Some(t)) => Ok(encode::skeleton_machine(&load_tm(t)?)),
        (None, None) => unreachable!("clap enforces the group"),
    }
}

fn load_presentation(spec: &str) -> Result<presentation::GroupPresentation> {
    match spec {
        "s4" => Ok(presentation::s4_fragment()),
        "core" => Ok(lemma3::core_presentation()),
        path => {
            let text = read(Path::new(path))?;
            presentation::parse(&text).with_context(|| format!("parsing {path}"))
        }
    }
}

fn word(text: &str) -> Result<Word> {
    text.parse().map_err(|e| anyhow!("bad word {text:?}: {e}"))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn band_letter(name: &str) -> Symbol {
    match name {
        "s1" => lemma3::sigma1(),
        "s4" => lemma3::sigma4(),
        other => Symbol::intern(other),
    }
}

fn parse_caps(text: &str) -> Result<SubdiscLimits> {
    let mut limits = SubdiscLimits::default();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item.split_once('=').ok_or_else(|| anyhow!("cap {item:?} is not key=value"))?;
        let value: usize = value.parse().with_context(|| format!("cap {key}"))?;
        match key {
            "chord" => limits.max_chord_len = value,
            "area" => limits.max_area = value,
            "len" => limits.max_len = value,
            "threads" => limits.threads = value,
            _ => bail!("unknown cap {key:?} (expected chord, area, len, threads)"),
        }
    }
    Ok(limits)
}

/// Returns whether the verdict is a success.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Validate(arg) => {
            if let (None, Some(t)) = (&arg.machine, &arg.tm) {
                let report = tm::validate_tm(&load_tm(t)?);
                println!("{}", if report.all_pass() { "valid" } else { "invalid" });
                print!("{report}");
                return Ok(report.all_pass());
            }
            let report = machine_of(&arg)?.validate();
            print!("{report}");
            Ok(report.is_valid())
        }
        Command::Simulate { machine, word: w, rules } => {
            let m = machine_of(&machine)?;
            let start = AdmissibleWord::parse(&w, &m.hardware)?;
            let rules: Vec<&str> = rules.split([' ', ',']).filter(|s| !s.is_empty()).collect();
            let trace = m.run(&start, &rules)?;
            println!("ok, {} words", trace.words.len());
            println!("{}", trace.words[0]);
            for (r, w) in trace.rules.iter().zip(&trace.words[1..]) {
                println!("{r}: {w}");
            }
            Ok(true)
        }
        Command::Reach { machine, word: w, depth, max_states } => {
            let m = machine_of(&machine)?;
            let start = AdmissibleWord::parse(&w, &m.hardware)?;
            let reach = m.reachable(&start, depth, max_states);
            println!("{} words{}", reach.words.len(), if reach.truncated { ", truncated" } else { "" });
            for w in &reach.words {
                println!("{w}");
            }
            Ok(true)
        }
        Command::Present(args) => present(args),
        Command::Census(arg) => {
            let census = presentation::component_census(&machine_of(&arg)?);
            println!("census");
            print!("{census}");
            Ok(true)
        }
        Command::EncodeSigma { tm: t, input, accept, n } => {
            let m = load_tm(&t)?;
            let c = match (input, accept) {
                (_, true) => m.accept_configuration(),
                (Some(u), false) => m.start_configuration(&word(&u)?),
                (None, false) => m.start_configuration(&Word::empty()),
            };
            let w = encode::sigma_encode(&m, &c, n)?;
            println!("ok, length={}", w.len());
            println!("{w}");
            Ok(true)
        }
        Command::Hub { word: w, tm: t, input, big_n } => {
            let hub = match (w, t, input) {
                (Some(u), _, _) => encode::hub_word(&word(&u)?, big_n)?,
                (None, Some(t), Some(u)) => encode::h_encode(&load_tm(&t)?, &word(&u)?, big_n)?,
                _ => unreachable!("clap enforces word or tm+input"),
            };
            println!("ok, length={}", hub.len());
            println!("{hub}");
            Ok(true)
        }
        Command::VerifyLemma3 { n, from, output } => {
            let p = presentation::s4_fragment();
            let d = match &from {
                Some(path) => derivation::parse(&read(path)?)?,
                None => lemma3::lemma3_derivation(n),
            };
            if let Some(path) = &output {
                fs::write(path, derivation::serialize(&d)).with_context(|| format!("writing {}", path.display()))?;
            }
            let want_start = lemma3::lemma3_start(n);
            let want_end = lemma3::lemma3_end(n);
            match check_derivation(&p, &d) {
                Ok(c) if d.start == want_start && c.end_word == want_end => {
                    println!("valid, area={}, end={}", c.area, c.end_word);
                    Ok(true)
                }
                Ok(c) => {
                    println!("invalid, start={}, end={}", d.start, c.end_word);
                    Ok(false)
                }
                Err(e) => {
                    println!("invalid, {e}");
                    Ok(false)
                }
            }
        }
        Command::Area { presentation: spec, word: w, loop_n, max_area, max_len, output } => {
            let p = load_presentation(&spec)?;
            let w = match (w, loop_n) {
                (_, Some(n)) => lemma3::loop_word(n),
                (Some(w), None) => word(&w)?,
                (None, None) => unreachable!("clap enforces word or loop"),
            };
            match area::bounded_area_with(&p, &w, Limits::new(max_area, max_len)) {
                Ok(f) => {
                    let method = match f.method {
                        Method::Bands => "bands",
                        Method::Search => "search",
                    };
                    println!("area={} method={method}", f.area);
                    if let Some(path) = &output {
                        emit(&derivation::serialize(&f.witness), Some(path))?;
                    }
                    Ok(true)
                }
                Err(e) => {
                    println!("no filling: {e}");
                    Ok(false)
                }
            }
        }
        Command::Bands { n, letter } => {
            let dg = delta(n)?;
            let x = band_letter(&letter);
            let bands = trace_bands(&dg, x);
            println!("bands={} letter={x} area={} perimeter={}", bands.len(), dg.area(), dg.perimeter());
            for (i, b) in bands.iter().enumerate() {
                let pos = |e: Option<usize>| match e.and_then(|e| boundary_position(&dg, e)) {
                    Some(p) => p.to_string(),
                    None => "-".to_string(),
                };
                println!(
                    "band {i}: cells={} start={} end={} annulus={}",
                    b.cells.len(),
                    pos(b.start_edge()),
                    pos(b.end_edge()),
                    b.annulus
                );
                println!("  top: {}", band_side_label(&dg, b, Side::Top));
                println!("  bottom: {}", band_side_label(&dg, b, Side::Bottom));
            }
            Ok(true)
        }
        Command::Subdisc { n, k, perim, caps } => {
            let limits = parse_caps(&caps)?;
            let v = subdisc_search(&lemma3::core_presentation(), &lemma3::loop_word(n), k, perim, limits);
            print!("{v}");
            Ok(true)
        }
        Command::ExportDot { n, output } => {
            let dot = diagram::export_dot(&delta(n)?);
            emit(&dot, output.as_deref())?;
            if output.is_some() {
                println!("ok");
            }
            Ok(true)
        }
    }
}

/// The diagram of the closed filling of u_n over the S4 fragment.
fn delta(n: usize) -> Result<diagram::Diagram> {
    let p = presentation::s4_fragment();
    Ok(diagram_from_derivation(&p, &lemma3::closed_filling(n))?)
}

fn present(args: PresentArgs) -> Result<bool> {
    let p = match (&args.parse, &args.machine) {
        (Some(path), _) => presentation::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
        (None, Some(spec)) => {
            let m = load_machine(spec)?;
            let w0 = match &args.hub {
                Some(path) => Some(AdmissibleWord::parse(read(path)?.trim(), &m.hardware)?),
                None => None,
            };
            presentation::build_presentation(&m, args.big_n, w0.as_ref())?
        }
        (None, None) => unreachable!("clap enforces machine or parse"),
    };
    let text = presentation::serialize(&p);
    match &args.output {
        Some(path) => {
            emit(&text, Some(path))?;
            println!("ok, {} generators, {} relators", p.generators.len(), p.relators.len());
        }
        None => emit(&text, None)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
