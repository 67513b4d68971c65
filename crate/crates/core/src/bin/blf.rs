//! Command-line front end: validate, measure, and rewrite `.blf` diagrams.
//!
//! Exit codes: 0 success, 1 validation/move failure, 2 usage or parse error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blf::arrangement::Dart;
use blf::diagram::BlfDiagram;
use blf::format;
use blf::ids::FaceId;
use blf::mcg::{round_handle_check, Handedness, HomologyClass};
use blf::moves;

#[derive(Parser)]
#[command(name = "blf", about = "Broken Lefschetz fibration diagrams over the sphere")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Right,
    Left,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Graph,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a diagram and report violations and warnings.
    Validate { file: PathBuf },
    /// Print the Euler characteristic of the total space.
    Euler { file: PathBuf },
    /// Print a summary: counts, Euler characteristic, parity, connectivity.
    Report { file: PathBuf },
    /// Check that a class in a face's fiber is fixed (up to sign) by the
    /// monodromy of that face's Lefschetz factorization.
    CheckMonodromy {
        file: PathBuf,
        #[arg(long)]
        face: String,
        /// Comma-separated homology coordinates, e.g. 1,0,0,0.
        #[arg(long = "class")]
        class: String,
        #[arg(long, value_enum, default_value = "right")]
        convention: Convention,
    },
    /// Apply a move script to a diagram and write the result.
    Apply {
        file: PathBuf,
        script: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the flip-and-slip pipeline that connects a disconnected fiber.
    ConnectFibers {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write each intermediate stage next to the output.
        #[arg(long)]
        trace: bool,
    },
    /// Export the arrangement in another format.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
}

fn load(path: &PathBuf) -> Result<BlfDiagram, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {}", path.display(), e);
        ExitCode::from(2)
    })?;
    format::parse(&text).map_err(|e| {
        eprintln!("error: {}: {}", path.display(), e);
        ExitCode::from(2)
    })
}

fn save(d: &BlfDiagram, path: &PathBuf) -> Result<(), ExitCode> {
    std::fs::write(path, format::serialize(d)).map_err(|e| {
        eprintln!("error: cannot write {}: {}", path.display(), e);
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(code) => code,
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let d = load(&file)?;
            let report = d.validate();
            print!("{}", report);
            if report.ok() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Cmd::Euler { file } => {
            let d = load(&file)?;
            match d.euler_characteristic() {
                Ok(e) => {
                    println!("{}", e);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::Report { file } => {
            let d = load(&file)?;
            let report = d.validate();
            if !report.ok() {
                print!("{}", report);
                return Ok(ExitCode::FAILURE);
            }
            println!("faces: {}", d.faces.len());
            println!("fold curves: {}", d.folds.len());
            println!("double points: {}", d.double_count());
            println!("cusps: {}", d.cusp_count());
            println!("lefschetz points: {}", d.lefschetz_count());
            println!("base points: {}", d.basepoints);
            println!("sections: {}", d.sections);
            match d.euler_characteristic() {
                Ok(e) => {
                    println!("euler characteristic: {}", e);
                    let parity = d.parity_check().unwrap();
                    println!("parity check: {}", if parity { "ok" } else { "FAILED" });
                }
                Err(e) => println!("euler characteristic: n/a ({})", e),
            }
            let conn = d.connectivity_report().map_err(|e| {
                eprintln!("error: {}", e);
                ExitCode::FAILURE
            })?;
            println!(
                "fibers: {}",
                if conn.all_connected { "all connected" } else { "disconnected" }
            );
            for (face, connected) in &conn.per_face {
                println!(
                    "  {}: {}",
                    face,
                    if *connected { "connected" } else { "disconnected" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckMonodromy { file, face, class, convention } => {
            let d = load(&file)?;
            let coords: Vec<i64> = class
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| {
                    eprintln!("error: bad class {:?}", class);
                    ExitCode::from(2)
                })?;
            let z = HomologyClass::new(coords).map_err(|e| {
                eprintln!("error: {}", e);
                ExitCode::from(2)
            })?;
            let handedness = match convention {
                Convention::Right => Handedness::Right,
                Convention::Left => Handedness::Left,
            };
            let word = d
                .monodromy_word(&FaceId(face), handedness)
                .map_err(|e| {
                    eprintln!("error: {}", e);
                    ExitCode::FAILURE
                })?;
            match round_handle_check(&word, &z) {
                Ok(true) => {
                    println!("OK (fixed up to sign)");
                    Ok(ExitCode::SUCCESS)
                }
                Ok(false) => {
                    println!("NOT FIXED");
                    Ok(ExitCode::FAILURE)
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::Apply { file, script, output } => {
            let d = load(&file)?;
            let text = std::fs::read_to_string(&script).map_err(|e| {
                eprintln!("error: cannot read {}: {}", script.display(), e);
                ExitCode::from(2)
            })?;
            let cmds = format::parse_script(&text).map_err(|e| {
                eprintln!("error: {}: {}", script.display(), e);
                ExitCode::from(2)
            })?;
            match moves::apply_script(&d, &cmds) {
                Ok(out) => {
                    save(&out, &output)?;
                    println!("wrote {}", output.display());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::ConnectFibers { file, output, trace } => {
            let d = load(&file)?;
            match moves::connect_fibers_traced(&d) {
                Ok(stages) => {
                    if trace {
                        for (i, (label, stage)) in stages.iter().enumerate() {
                            let mut path = output.clone();
                            path.set_extension(format!("stage{}.{}.blf", i + 1, label));
                            save(stage, &path)?;
                            println!("wrote {}", path.display());
                        }
                    }
                    save(&stages.last().unwrap().1, &output)?;
                    println!("wrote {}", output.display());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::Export { file, format: ExportFormat::Graph } => {
            let d = load(&file)?;
            print!("{}", export_graph(&d));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Plain-text adjacency description: vertices with their rotation, curves
/// with endpoints and fold labels, faces with their boundary circuits.
fn export_graph(d: &BlfDiagram) -> String {
    let mut out = String::new();
    for (v, kind) in &d.arrangement.vertices {
        let mut slots = Vec::new();
        for slot in 0..kind.valence() {
            let at = d
                .arrangement
                .edges
                .iter()
                .find(|(_, ends)| ends.iter().any(|x| x.vertex == *v && x.slot == slot))
                .map(|(id, _)| id.as_str().to_string())
                .unwrap_or_else(|| "-".into());
            slots.push(at);
        }
        let _ = writeln!(out, "vertex {} {} [{}]", v, kind.name(), slots.join(" "));
    }
    for (e, ends) in &d.arrangement.edges {
        let fold = &d.folds[e];
        let _ = writeln!(
            out,
            "curve {} {}.{} -- {}.{} high={} low={} {}",
            e,
            ends[0].vertex,
            ends[0].slot,
            ends[1].vertex,
            ends[1].slot,
            fold.high,
            fold.low,
            fold.surgery
        );
    }
    for z in &d.arrangement.circles {
        let fold = &d.folds[z];
        let _ = writeln!(
            out,
            "curve {} circle high={} low={} {}",
            z, fold.high, fold.low, fold.surgery
        );
    }
    if let Ok(analysis) = d.analyze() {
        for (face, circuits) in &analysis.circuits_of_face {
            let fiber = &d.faces[face];
            let mut parts = Vec::new();
            for &ci in circuits {
                let darts: Vec<String> = analysis.trace.circuits[ci]
                    .iter()
                    .map(|dart| match dart {
                        Dart::Arc { edge, origin } => format!("{}.{}", edge, origin),
                        Dart::Side { circle, side } => format!("{}~{}", circle, side),
                    })
                    .collect();
                parts.push(format!("({})", darts.join(" ")));
            }
            let _ = writeln!(out, "face {} fiber={} boundary {}", face, fiber, parts.join(" "));
        }
    }
    out
}
