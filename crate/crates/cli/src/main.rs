//! `balflip`: balanced triangulations from the command line.
//!
//! Exit status is 0 on success, 1 when the answer is a negative verdict
//! (caps hit, no expansion found, not balanced) and 2 on bad input.

mod input;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use balflip_core::explorer::{self, ExploreError, FlipGraphView, GALLERY};
use balflip_core::io::{format_site, write_emb, write_script, write_tri};
use balflip_core::rewrites::{self, Budget, RewriteError};
use balflip_core::{
    apply_flip, bipartite, canonical_code, classify, enumerate_sites, find_coloring, Caps,
    ColorMode, Coloring, FlipKind, FlipSite, Triangulation, Verdict,
};

use input::{parse_moves, read_bip, read_emb, read_script, read_tri, resolve_site};

/// A definite negative answer, as opposed to bad input.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Negative(String);

fn negative<T>(msg: impl Into<String>) -> Result<T> {
    Err(Negative(msg.into()).into())
}

#[derive(Parser)]
#[command(name = "balflip", version, about = "Flips on balanced triangulations of closed surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a triangulation and report its counts, surface and coloring.
    Validate { file: String },
    /// Print the canonical code.
    Canon {
        file: String,
        #[arg(long, value_enum, default_value_t = Mode::Perm)]
        mode: Mode,
    },
    /// List the sites of one kind, 1-based.
    Sites {
        file: String,
        #[arg(long)]
        kind: FlipKind,
    },
    /// Apply one move.
    Apply {
        file: String,
        #[arg(long)]
        site: String,
        /// Optional; must agree with the site's own kind.
        #[arg(long)]
        kind: Option<FlipKind>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Express one move through others and print the certified sequence.
    Expand {
        file: String,
        #[arg(long)]
        site: String,
        #[arg(long)]
        kind: Option<FlipKind>,
        /// Defaults to ps for BES, ps-btw for BEW and budget otherwise.
        #[arg(long, value_enum)]
        via: Option<Via>,
        /// For `--via budget`, e.g. `bes*3,pc*4,bew`.
        #[arg(long)]
        budget: Option<Budget>,
    },
    /// Search for a sequence of moves from A to B.
    Connect {
        a: String,
        b: String,
        #[command(flatten)]
        search: Search,
    },
    /// Breadth-first exploration of the flip graph.
    Bfs {
        file: String,
        #[command(flatten)]
        search: Search,
        /// Write the edge list (`code <tab> kind <tab> code`).
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Write every state as `<code>.tri` into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Report the PS/PC applicability and octahedron checks.
    Classify { file: String },
    /// Seeded random walk.
    Sample {
        #[arg(long)]
        from: String,
        #[arg(long, default_value = "all")]
        moves: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a named triangulation; lists the names when none is given.
    Gallery {
        name: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bipartite graph operations.
    #[command(subcommand)]
    Bip(BipCommand),
    /// Even embeddings and color-class deletion.
    #[command(subcommand)]
    Emb(EmbCommand),
}

#[derive(Subcommand)]
enum BipCommand {
    /// Rewrite an operation script into forward operations only.
    Normalize {
        graph: PathBuf,
        script: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EmbCommand {
    /// Delete a color class (1..=3) of a triangulation.
    Delete {
        file: String,
        #[arg(long)]
        color: u8,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cone every face walk of an even embedding.
    Subdivide {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check whether subdivisions and welds provably cannot join A and B.
    Obstruct { a: String, b: String },
}

#[derive(Args)]
struct Search {
    /// Comma-separated kinds, or `all`.
    #[arg(long, default_value = "all")]
    moves: String,
    #[arg(long, default_value_t = 12)]
    max_vertices: usize,
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl Search {
    fn caps(&self) -> Caps {
        Caps::new(self.max_vertices, self.max_states)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ignore,
    Fixed,
    Perm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Via {
    Ps,
    BtsPc,
    PsBtw,
    Budget,
}

fn emit(out: &mut dyn Write, output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn site_arg(site: &str, kind: Option<FlipKind>) -> Result<FlipSite> {
    let s = resolve_site(site)?;
    if let Some(k) = kind {
        if k != s.kind() {
            bail!("--kind {k} does not match site {site}");
        }
    }
    Ok(s)
}

fn set_jobs(jobs: usize) -> Result<()> {
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("starting worker pool")?;
    }
    Ok(())
}

fn validate(out: &mut dyn Write, file: &str) -> Result<()> {
    let (t, given) = read_tri(file)?;
    writeln!(out, "vertices={}", t.vertex_count())?;
    writeln!(out, "edges={}", t.edge_count())?;
    writeln!(out, "faces={}", t.face_count())?;
    writeln!(out, "euler={}", t.euler_characteristic())?;
    writeln!(out, "orientable={}", t.is_orientable())?;
    writeln!(out, "surface={}", t.surface())?;
    let col = match given {
        Some(c) => Some(c),
        None => find_coloring(&t).ok(),
    };
    match col {
        Some(c) => {
            let k: Vec<String> = c.as_slice().iter().map(|x| (x + 1).to_string()).collect();
            writeln!(out, "balanced=true")?;
            writeln!(out, "coloring={}", k.join(" "))?;
            Ok(())
        }
        None => {
            writeln!(out, "balanced=false")?;
            negative("not balanced")
        }
    }
}

fn balanced(file: &str) -> Result<(Triangulation, Coloring)> {
    let (t, given) = read_tri(file)?;
    let c = match given {
        Some(c) => c,
        None => find_coloring(&t).with_context(|| format!("{file} is not balanced"))?,
    };
    Ok((t, c))
}

fn expand(t: &Triangulation, c: &Coloring, site: &FlipSite, via: Option<Via>, budget: Option<Budget>) -> Result<Vec<FlipSite>> {
    let via = via.unwrap_or(match site.kind() {
        FlipKind::Bes => Via::Ps,
        FlipKind::Bew => Via::PsBtw,
        _ => Via::Budget,
    });
    if budget.is_some() && via != Via::Budget {
        bail!("--budget only applies to --via budget");
    }
    let found = match via {
        Via::Ps => rewrites::expand_bes_via_ps(t, c, site).map(Vec::from),
        Via::BtsPc => rewrites::expand_bes_via_bts_pc(t, c, site).map(Vec::from),
        Via::PsBtw => rewrites::expand_bew_via_ps_btw(t, c, site).map(Vec::from),
        Via::Budget => match budget {
            Some(b) => rewrites::expand_via_budget(t, c, site, &b),
            None => rewrites::expand_with_default_budget(t, c, site),
        },
    };
    let seq = match found {
        Ok(seq) => seq,
        Err(e @ (RewriteError::NoEligibleOrientation | RewriteError::NotFound(_))) => {
            return negative(e.to_string())
        }
        Err(e) => return Err(e.into()),
    };
    if !rewrites::certify(t, c, site, &seq)? {
        bail!("internal error: expansion of {} does not certify", format_site(site));
    }
    Ok(seq)
}

fn print_view(out: &mut dyn Write, view: &FlipGraphView) -> Result<()> {
    writeln!(out, "states={}", view.len())?;
    writeln!(out, "edges={}", view.edges().len())?;
    let levels: Vec<String> = view.levels().iter().map(ToString::to_string).collect();
    writeln!(out, "levels={}", levels.join(","))?;
    writeln!(out, "truncated={}", view.truncated())?;
    Ok(())
}

fn dump_view(view: &FlipGraphView, edges: Option<&Path>, dump: Option<&Path>) -> Result<()> {
    if let Some(p) = edges {
        fs::write(p, view.edge_list()).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(dir) = dump {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for s in view.states() {
            let p = dir.join(format!("{}.tri", s.code));
            fs::write(&p, write_tri(&s.triangulation, Some(&s.coloring)))
                .with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Validate { file } => validate(out, &file)?,
        Command::Canon { file, mode } => {
            let (t, c) = read_tri(&file)?;
            let mode = match mode {
                Mode::Ignore => ColorMode::Ignore,
                Mode::Fixed => ColorMode::Fixed,
                Mode::Perm => ColorMode::UpToPermutation,
            };
            let c = match (mode, c) {
                (ColorMode::Ignore, c) => c,
                (_, Some(c)) => Some(c),
                (_, None) => Some(find_coloring(&t).with_context(|| format!("{file} is not balanced"))?),
            };
            writeln!(out, "{}", canonical_code(&t, c.as_ref(), mode)?)?;
        }
        Command::Sites { file, kind } => {
            let (t, c) = balanced(&file)?;
            for s in enumerate_sites(&t, &c, kind) {
                writeln!(out, "{}", format_site(&s))?;
            }
        }
        Command::Apply { file, site, kind, output } => {
            let (t, c) = balanced(&file)?;
            let site = site_arg(&site, kind)?;
            let (u, uc) = apply_flip(&t, &c, &site)?;
            emit(out, output.as_deref(), &write_tri(&u, Some(&uc)))?;
        }
        Command::Expand { file, site, kind, via, budget } => {
            let (t, c) = balanced(&file)?;
            let site = site_arg(&site, kind)?;
            for s in expand(&t, &c, &site, via, budget)? {
                writeln!(out, "{}", format_site(&s))?;
            }
        }
        Command::Connect { a, b, search } => {
            set_jobs(search.jobs)?;
            let (ta, ca) = balanced(&a)?;
            let (tb, cb) = balanced(&b)?;
            let moves = parse_moves(&search.moves)?;
            match explorer::connect((&ta, &ca), (&tb, &cb), &moves, search.caps()) {
                Ok(path) => {
                    writeln!(out, "c {} moves", path.len())?;
                    for s in path {
                        writeln!(out, "{}", format_site(&s))?;
                    }
                }
                Err(e) => return negative(e.to_string()),
            }
        }
        Command::Bfs { file, search, edges, dump } => {
            set_jobs(search.jobs)?;
            let (t, c) = balanced(&file)?;
            let moves = parse_moves(&search.moves)?;
            let record = edges.is_some();
            match explorer::bfs((&t, &c), &moves, search.caps(), record) {
                Ok(view) => {
                    print_view(out, &view)?;
                    dump_view(&view, edges.as_deref(), dump.as_deref())?;
                }
                Err(ExploreError::StateCapExceeded(view)) => {
                    print_view(out, &view)?;
                    dump_view(&view, edges.as_deref(), dump.as_deref())?;
                    return negative(format!("state cap of {} reached", search.max_states));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Classify { file } => {
            let (t, c) = balanced(&file)?;
            writeln!(out, "{}", classify(&t, &c))?;
        }
        Command::Sample { from, moves, steps, seed, max_vertices, output } => {
            let (t, c) = balanced(&from)?;
            let moves = parse_moves(&moves)?;
            let cap = max_vertices.unwrap_or(usize::MAX);
            let (u, uc) = explorer::random_walk_within((&t, &c), &moves, steps, seed, cap);
            emit(out, output.as_deref(), &write_tri(&u, Some(&uc)))?;
        }
        Command::Gallery { name: None, .. } => {
            for name in GALLERY {
                writeln!(out, "{name}")?;
            }
        }
        Command::Gallery { name: Some(name), output } => {
            let Some((t, c)) = explorer::gallery(&name) else {
                bail!("unknown gallery entry `{name}` (try one of: {})", GALLERY.join(", "));
            };
            emit(out, output.as_deref(), &write_tri(&t, Some(&c)))?;
        }
        Command::Bip(BipCommand::Normalize { graph, script, output }) => {
            let h = read_bip(&graph)?;
            let seq = read_script(&script)?;
            let normalized = bipartite::normalize_sequence(&h, &seq)?;
            emit(out, output.as_deref(), &write_script(&normalized))?;
        }
        Command::Emb(EmbCommand::Delete { file, color, output }) => {
            if !(1..=3).contains(&color) {
                bail!("--color must be 1, 2 or 3");
            }
            let (t, c) = balanced(&file)?;
            let h = balflip_core::delete_color_class(&t, &c, color - 1);
            emit(out, output.as_deref(), &write_emb(&h))?;
        }
        Command::Emb(EmbCommand::Subdivide { file, output }) => {
            let h = read_emb(&file)?;
            let (t, c) = balflip_core::face_subdivision(&h);
            emit(out, output.as_deref(), &write_tri(&t, Some(&c)))?;
        }
        Command::Emb(EmbCommand::Obstruct { a, b }) => {
            let (ta, _) = read_tri(&a)?;
            let (tb, _) = read_tri(&b)?;
            match balflip_core::subdivision_obstruction(&ta, &tb)? {
                Verdict::Unreachable => writeln!(out, "unreachable")?,
                Verdict::Inconclusive => writeln!(out, "inconclusive")?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = run(cli, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // a closed pipe downstream (`| head`) is not a failure
        Err(e) if e
            .downcast_ref::<std::io::Error>()
            .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("balflip: {e:#}");
            if e.is::<Negative>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

