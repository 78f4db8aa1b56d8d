use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use outraag::experiment::{run_experiment, ExperimentConfig, Mode};
use outraag::factors::{disjoint_check, meet_projection, overlap_check, FreeFactorClass};
use outraag::farey::FareyVertex;
use outraag::freegroup::{Alphabet, Word};
use outraag::projections::{project, projection_distance, MarkedGraph, MarkedGraphJson, Target};
use outraag::raag::{min_set, normalize, syllable_order, SimplicialGraph, SimplicialGraphJson};
use outraag::stallings::{pullback_components, SubgroupGraph};
use outraag::systems::{alt_closed_form, build_support_graph, complexity, SystemFixture};

#[derive(Parser)]
#[command(
    name = "outraag",
    version,
    about = "Right-angled Artin subgroups of Out(F_n), by computation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct FreeArgs {
    /// Generator names, comma separated.
    #[arg(long, conflicts_with = "rank")]
    alphabet: Option<String>,
    /// Use the standard alphabet a, b, c, ... of this rank.
    #[arg(long)]
    rank: Option<usize>,
}

impl FreeArgs {
    fn alphabet(&self) -> Result<Alphabet> {
        match (&self.alphabet, self.rank) {
            (Some(names), _) => Ok(Alphabet::new(names.split(',').map(str::trim))?),
            (None, Some(n)) => Ok(Alphabet::standard(n)),
            (None, None) => bail!("give --alphabet or --rank"),
        }
    }
}

#[derive(Args)]
struct GammaArg {
    /// JSON file, `pentagon`, or inline `N:i-j,k-l,...` on vertices v0..v{N-1}.
    #[arg(long)]
    gamma: String,
}

impl GammaArg {
    fn load(&self) -> Result<SimplicialGraph> {
        let g = &self.gamma;
        if g == "pentagon" {
            return Ok(SimplicialGraph::pentagon());
        }
        if let Some((n, edges)) = g.split_once(':') {
            if let Ok(n) = n.parse::<usize>() {
                let mut es = Vec::new();
                for e in edges.split(',').filter(|s| !s.is_empty()) {
                    let (i, j) = e.split_once('-').context("edges look like i-j")?;
                    es.push((i.trim().parse()?, j.trim().parse()?));
                }
                return Ok(SimplicialGraph::indexed(n, &es)?);
            }
        }
        let text = fs::read_to_string(g).with_context(|| format!("reading {g}"))?;
        let j: SimplicialGraphJson = serde_json::from_str(&text)?;
        Ok(SimplicialGraph::from_json(&j)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Normal form and Min(g) of a RAAG word such as "v0^2 v1^-1".
    NormalForm {
        #[command(flatten)]
        gamma: GammaArg,
        word: String,
    },
    /// The syllable orders of a RAAG word.
    SylOrder {
        #[command(flatten)]
        gamma: GammaArg,
        word: String,
    },
    /// Folded Stallings graph of a subgroup.
    Fold {
        #[command(flatten)]
        free: FreeArgs,
        gens: Vec<String>,
    },
    /// Intersections A ∩ gBg^-1 from the pullback.
    Intersect {
        #[command(flatten)]
        free: FreeArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        #[arg(long = "b", required = true)]
        b: Vec<String>,
    },
    /// Conjugacy classes of nontrivial proper intersections of two free factors.
    Meet {
        #[command(flatten)]
        free: FreeArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        #[arg(long = "b", required = true)]
        b: Vec<String>,
    },
    /// Overlap and disjointness of two free factors.
    Overlap {
        #[command(flatten)]
        free: FreeArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        #[arg(long = "b", required = true)]
        b: Vec<String>,
    },
    /// Support graph realizing the complement-star collection of Γ.
    SupportGraph {
        #[command(flatten)]
        gamma: GammaArg,
    },
    /// Rank of the support graph's fundamental group.
    Complexity {
        #[command(flatten)]
        gamma: GammaArg,
    },
    /// Farey distance between two slopes `p/q` (`1/0` is infinity).
    FareyDist { x: String, y: String },
    /// Projection of a marked graph (JSON file) or a factor into F(A).
    Project {
        #[command(flatten)]
        free: FreeArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        /// `tree:FILE`, `rose`, or `factor:w1;w2;...`.
        target: String,
    },
    /// Projection distance in F(A) between two targets, for rank-two A.
    Dist {
        #[command(flatten)]
        free: FreeArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        x: String,
        y: String,
    },
    /// Load a system fixture and print its certificates.
    VerifySystem {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        power: Option<u32>,
    },
    /// Seeded experiment producing a JSON report.
    Run {
        #[arg(long)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        power: Option<u32>,
        #[arg(long)]
        nielsen_max: Option<usize>,
        #[arg(long)]
        m_emp: Option<u32>,
        #[arg(long)]
        l_path: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
    },
}

fn factor(al: &Alphabet, gens: &[String]) -> Result<FreeFactorClass> {
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    Ok(FreeFactorClass::parse(al, &refs)?)
}

fn words(al: &Alphabet, gens: &[String]) -> Result<Vec<Word>> {
    gens.iter().map(|g| Ok(al.parse_word(g)?)).collect()
}

fn fmt_words(al: &Alphabet, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| al.format_word(w)).collect()
}

enum Owned {
    Tree(MarkedGraph),
    Factor(FreeFactorClass),
}

impl Owned {
    fn parse(al: &Alphabet, s: &str) -> Result<Owned> {
        if s == "rose" {
            return Ok(Owned::Tree(MarkedGraph::rose(al)));
        }
        if let Some(path) = s.strip_prefix("tree:") {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let j: MarkedGraphJson = serde_json::from_str(&text)?;
            return Ok(Owned::Tree(MarkedGraph::from_json(al, &j)?));
        }
        if let Some(gens) = s.strip_prefix("factor:") {
            let gens: Vec<String> = gens.split(';').map(|g| g.trim().to_string()).collect();
            return Ok(Owned::Factor(factor(al, &gens)?));
        }
        bail!("target must be `rose`, `tree:FILE` or `factor:w1;w2`")
    }

    fn target(&self) -> Target<'_> {
        match self {
            Owned::Tree(t) => Target::Tree(t),
            Owned::Factor(b) => Target::Factor(b),
        }
    }
}

fn print(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::NormalForm { gamma, word } => {
            let g = gamma.load()?;
            let w = g.parse_word(&word)?;
            let nf = normalize(&g, &w)?;
            let members = min_set(&g, &w)?;
            print(&json!({
                "normal_form": g.format_word(&nf),
                "syllables": nf.len(),
                "word_length": nf.word_length(),
                "min_set": members.iter().map(|m| g.format_word(m)).collect::<Vec<_>>(),
            }));
        }
        Cmd::SylOrder { gamma, word } => {
            let g = gamma.load()?;
            let o = syllable_order(&g, &g.parse_word(&word)?)?;
            let syl: Vec<String> = o
                .syllables
                .iter()
                .map(|s| format!("{}^{}", g.names()[s.gen], s.exp))
                .collect();
            print(&json!({
                "syllables": syl,
                "prec": o.prec,
                "prec_m": o.prec_m,
                "closure_matches": o.closure_of_m() == o.prec,
                "acyclic": o.is_acyclic(),
                "max_antichain": o.max_antichain(),
            }));
        }
        Cmd::Fold { free, gens } => {
            let al = free.alphabet()?;
            let h = SubgroupGraph::from_generators(al.rank(), &words(&al, &gens)?);
            print(&json!({
                "rank": h.rank(),
                "basis": fmt_words(&al, h.basis()),
                "graph": h.graph().to_json(&al),
                "canonical_core": h.canonical_core().ok(),
            }));
        }
        Cmd::Intersect { free, a, b } => {
            let al = free.alphabet()?;
            let ga = SubgroupGraph::from_generators(al.rank(), &words(&al, &a)?);
            let gb = SubgroupGraph::from_generators(al.rank(), &words(&al, &b)?);
            let comps: Vec<Value> = pullback_components(&ga, &gb)
                .iter()
                .filter(|c| c.rank() > 0)
                .map(|c| {
                    json!({
                        "conjugator": al.format_word(&c.conjugator),
                        "rank": c.rank(),
                        "gens": fmt_words(&al, &c.gens),
                    })
                })
                .collect();
            print(&json!({ "components": comps }));
        }
        Cmd::Meet { free, a, b } => {
            let al = free.alphabet()?;
            let (fa, fb) = (factor(&al, &a)?, factor(&al, &b)?);
            let classes: Vec<Value> = meet_projection(&fa, &fb)
                .iter()
                .map(|m| {
                    json!({
                        "class": m.class.display_gens(),
                        "key": m.class.key(),
                        "conjugator": al.format_word(&m.conjugator),
                        "gens_in_a": fmt_words(&al, &m.gens_in_a),
                    })
                })
                .collect();
            print(&json!({ "classes": classes }));
        }
        Cmd::Overlap { free, a, b } => {
            let al = free.alphabet()?;
            let (fa, fb) = (factor(&al, &a)?, factor(&al, &b)?);
            let ov = overlap_check(&fa, &fb).map(|o| {
                json!({
                    "x": o.x.display_gens(),
                    "conjugator": al.format_word(&o.conjugator),
                    "join_rank": o.join_rank,
                    "join_basis": fmt_words(&al, o.join.basis()),
                })
            });
            print(&json!({ "overlap": ov, "disjoint": disjoint_check(&fa, &fb)? }));
        }
        Cmd::SupportGraph { gamma } => {
            let sg = build_support_graph(&gamma.load()?)?;
            print(&serde_json::to_value(sg.to_json())?);
        }
        Cmd::Complexity { gamma } => {
            let g = gamma.load()?;
            print(&json!({
                "complexity": complexity(&g),
                "alt_closed_form": alt_closed_form(&g),
            }));
        }
        Cmd::FareyDist { x, y } => {
            let (x, y): (FareyVertex, FareyVertex) = (x.parse()?, y.parse()?);
            println!("{}", x.distance(y));
        }
        Cmd::Project { free, a, target } => {
            let al = free.alphabet()?;
            let fa = factor(&al, &a)?;
            let t = Owned::parse(&al, &target)?;
            let p = project(&fa, t.target())?;
            let classes: Vec<Value> = p
                .classes
                .iter()
                .map(|c| json!({ "key": c.key, "gens": fmt_words(&al, &c.gens) }))
                .collect();
            print(&json!({
                "classes": classes,
                "farey": p.farey.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "diameter": p.diameter(),
            }));
        }
        Cmd::Dist { free, a, x, y } => {
            let al = free.alphabet()?;
            let fa = factor(&al, &a)?;
            let (x, y) = (Owned::parse(&al, &x)?, Owned::parse(&al, &y)?);
            println!("{}", projection_distance(&fa, x.target(), y.target())?);
        }
        Cmd::VerifySystem { fixture, power } => {
            let text = fs::read_to_string(&fixture)
                .with_context(|| format!("reading {}", fixture.display()))?;
            let loaded = SystemFixture::from_json_str(&text)?.load()?;
            let sys = loaded.system(power.unwrap_or(loaded.power), 1 << 22)?;
            let c = sys.certificates();
            let ok = c.support_ok() && c.commutation_ok() && c.irreducible_ok();
            print(&json!({
                "power": sys.power(),
                "certificates": c,
                "pass": ok,
            }));
            return Ok(ok);
        }
        Cmd::Run {
            mode,
            seed,
            samples,
            fixture,
            out,
            power,
            nielsen_max,
            m_emp,
            l_path,
            k,
        } => {
            let mut cfg = ExperimentConfig::new(mode, samples, seed);
            cfg.power = power;
            cfg.m_emp = m_emp;
            cfg.l_path = l_path;
            cfg.k = k;
            if let Some(n) = nielsen_max {
                cfg.nielsen_max = n;
            }
            let loaded = match &fixture {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    cfg.fixture = Some(path.display().to_string());
                    Some(SystemFixture::from_json_str(&text)?.load()?)
                }
                None => None,
            };
            let report = run_experiment(&cfg, loaded.as_ref())?;
            let text = report.to_json_string();
            match out {
                Some(path) => fs::write(&path, &text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            eprintln!(
                "{}: {} evaluated, {} violations",
                if report.pass { "pass" } else { "fail" },
                report.evaluated,
                report.violations.len()
            );
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
