use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treelen::classgen::{
    caterpillar_injectivity, enumerate_class, injectivity_oracle, non_injectivity_witnesses,
    random_tree, write_corpus, WeightScheme,
};
use treelen::lengthseq::{
    exact_distribution_with, marked_distribution_with, read_distribution, write_distribution,
    ChainOptions, DEFAULT_MAX_LEAVES,
};
use treelen::rational::parse_rational;
use treelen::reconstruct::{hat_signature, reconstruct, reconstruct_caterpillar, recover_mixture, tree_from_distances};
use treelen::tree::{
    caterpillar, farris_transform, format_tree, is_caterpillar_structural, is_combinatorial,
    is_general_position, is_k_ary, is_k_valent, is_simple, is_ultrametric, parse_tree, star,
};
use treelen::{Error, LengthDistribution, Rational, TreeClass, WeightedTree};

#[derive(Parser)]
#[command(name = "treelen", version, about = "Exact random length sequences of edge-weighted trees")]
struct Cli {
    /// Worker threads for parallel enumeration (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input file (stdin when omitted).
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassArg {
    /// Tree class, e.g. `star`, `caterpillar`, `k_valent`, `k_ary(3)`.
    #[arg(long)]
    class: String,
    /// Parameter for `k_valent` and `k_ary`.
    #[arg(long)]
    k: Option<usize>,
}

impl ClassArg {
    fn parse(&self) -> Result<TreeClass, Error> {
        match self.k {
            Some(k) => TreeClass::from_name(&self.class, k),
            None => self.class.parse(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Simple,
    Combinatorial,
    Ultrametric,
    GeneralPosition,
    Caterpillar,
    KValent,
    KAry,
}

#[derive(Subcommand)]
enum OracleKind {
    /// Compare laws across every type of an enumerable class.
    Injectivity {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        n: usize,
    },
    /// Compare laws across all caterpillars with `n + ell <= max_sum`.
    Caterpillars {
        #[arg(long, default_value_t = 9)]
        max_sum: usize,
    },
    /// Check the documented non-injectivity witnesses.
    Witnesses,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a tree (or, with `--all`, every type of the class).
    Gen {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "unit")]
        scheme: String,
        /// Explicit pendant weights for a star.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
        /// Explicit composition for a caterpillar.
        #[arg(long, value_delimiter = ',')]
        composition: Option<Vec<usize>>,
        /// Enumerate every isomorphism type, one tree per line.
        #[arg(long)]
        all: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact law of the random length sequence of a tree.
    Dist {
        #[command(flatten)]
        io: Io,
        /// Label of a marked leaf that is always sampled first.
        #[arg(long)]
        mark: Option<String>,
        #[arg(long, env = "TREELEN_MAX_LEAVES", default_value_t = DEFAULT_MAX_LEAVES)]
        max_leaves: usize,
    },
    /// Recover a tree from a distribution file.
    Reconstruct {
        #[command(flatten)]
        class: ClassArg,
        #[command(flatten)]
        io: Io,
        /// For caterpillars, print the tree instead of the composition.
        #[arg(long)]
        tree: bool,
    },
    /// Evaluate a structural predicate on a tree.
    Check {
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Exhaustive injectivity checks.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
    /// Recover mixing weights over tree types from a distribution file.
    Mixture {
        #[command(flatten)]
        class: ClassArg,
        #[command(flatten)]
        io: Io,
    },
    /// Hat signature of a simple combinatorial tree.
    Signature {
        #[command(flatten)]
        io: Io,
    },
    /// Farris transform with respect to a leaf, emitted as an ultrametric tree.
    Farris {
        /// Leaf label to transform around.
        #[arg(long)]
        leaf: String,
        /// Transform constant; defaults to one more than the largest distance from the leaf.
        #[arg(long)]
        c: Option<String>,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Lib(e) => e.kind(),
            Failure::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "parse" => 2,
            "class-violation" => 3,
            "infeasible" => 4,
            "precondition" => 5,
            _ => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn open_input(path: &Option<PathBuf>) -> io::Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(BufReader::new(io::stdin().lock())),
    })
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_tree(path: &Option<PathBuf>) -> Result<WeightedTree, Failure> {
    let mut text = String::new();
    open_input(path)?.read_to_string(&mut text)?;
    Ok(parse_tree(text.trim())?)
}

fn read_dist(path: &Option<PathBuf>) -> Result<LengthDistribution, Failure> {
    Ok(read_distribution(open_input(path)?)?)
}

fn need_n(n: Option<usize>) -> Result<usize, Failure> {
    n.ok_or_else(|| Failure::Lib(Error::Precondition("--n is required".into())))
}

fn gen(
    class: TreeClass,
    n: Option<usize>,
    seed: u64,
    scheme: &str,
    weights: Option<Vec<String>>,
    composition: Option<Vec<usize>>,
    all: bool,
    output: &Option<PathBuf>,
) -> Outcome {
    let scheme: WeightScheme = scheme.parse()?;
    let trees = if all {
        enumerate_class(class, need_n(n)?)?.items
    } else if let Some(w) = weights {
        if class != TreeClass::Star {
            return Err(Error::Precondition("--weights applies to the star class".into()).into());
        }
        let w: Vec<Rational> = w.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
        if n.is_some_and(|n| n != w.len()) {
            return Err(Error::Precondition("--n disagrees with the number of weights".into()).into());
        }
        vec![star(&w)?]
    } else if let Some(c) = composition {
        if class != TreeClass::Caterpillar {
            return Err(
                Error::Precondition("--composition applies to the caterpillar class".into()).into(),
            );
        }
        vec![caterpillar(&c)?]
    } else {
        vec![random_tree(class, need_n(n)?, seed, scheme)?]
    };
    let mut out = open_output(output)?;
    write_corpus(&mut out, &trees)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen {
            class,
            n,
            seed,
            scheme,
            weights,
            composition,
            all,
            output,
        } => gen(class.parse()?, n, seed, &scheme, weights, composition, all, &output),
        Command::Dist {
            io,
            mark,
            max_leaves,
        } => {
            let tree = read_tree(&io.input)?;
            let opts = ChainOptions { max_leaves };
            let dist = match mark {
                Some(m) => marked_distribution_with(&tree, &m, &opts)?,
                None => exact_distribution_with(&tree, &opts)?,
            };
            let mut out = open_output(&io.output)?;
            write_distribution(&mut out, &dist)?;
            out.flush()?;
            Ok(())
        }
        Command::Reconstruct { class, io, tree } => {
            let class = class.parse()?;
            let dist = read_dist(&io.input)?;
            let mut out = open_output(&io.output)?;
            if class == TreeClass::Caterpillar && !tree {
                let c = reconstruct_caterpillar(&dist)?;
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                writeln!(out, "({})", parts.join(","))?;
            } else {
                writeln!(out, "{}", format_tree(&reconstruct(&dist, class)?))?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Check { property, k, io } => {
            let t = read_tree(&io.input)?;
            let holds = match property {
                Property::Simple => is_simple(&t),
                Property::Combinatorial => is_combinatorial(&t),
                Property::Ultrametric => is_ultrametric(&t),
                Property::GeneralPosition => is_general_position(&t)?,
                Property::Caterpillar => is_caterpillar_structural(&t).is_some(),
                Property::KValent => is_k_valent(&t, k),
                Property::KAry => is_k_ary(&t, k),
            };
            let mut out = open_output(&io.output)?;
            writeln!(out, "{holds}")?;
            out.flush()?;
            Ok(())
        }
        Command::Oracle { kind } => {
            let mut out = open_output(&None)?;
            match kind {
                OracleKind::Injectivity { class, n } => {
                    write!(out, "{}", injectivity_oracle(class.parse()?, n)?)?
                }
                OracleKind::Caterpillars { max_sum } => {
                    write!(out, "{}", caterpillar_injectivity(max_sum)?)?
                }
                OracleKind::Witnesses => {
                    for w in non_injectivity_witnesses()? {
                        writeln!(
                            out,
                            "{}\t{}\t{}\tconfirmed={}",
                            w.name,
                            format_tree(&w.left),
                            format_tree(&w.right),
                            w.confirmed
                        )?;
                    }
                }
            }
            out.flush()?;
            Ok(())
        }
        Command::Mixture { class, io } => {
            let class = class.parse()?;
            let dist = read_dist(&io.input)?;
            let mut out = open_output(&io.output)?;
            write!(out, "{}", recover_mixture(&dist, class)?)?;
            out.flush()?;
            Ok(())
        }
        Command::Signature { io } => {
            let sig = hat_signature(&read_tree(&io.input)?)?;
            let parts: Vec<String> = sig.iter().map(|x| x.to_string()).collect();
            let mut out = open_output(&io.output)?;
            writeln!(out, "{}", parts.join(" "))?;
            out.flush()?;
            Ok(())
        }
        Command::Farris { leaf, c, io } => {
            let t = read_tree(&io.input)?;
            let a = t.vertex_of(&leaf)?;
            let c = match c {
                Some(c) => parse_rational(&c)?,
                None => {
                    let from_a = t.distances_from(a);
                    let reach = t.leaves().iter().map(|&l| from_a[l]).max().unwrap_or_default();
                    reach + Rational::from_integer(1)
                }
            };
            let ultra = tree_from_distances(&farris_transform(&t, a, c)?)?;
            let mut out = open_output(&io.output)?;
            writeln!(out, "{}", format_tree(&ultra))?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("error\tkind=usage\t{}", e.kind());
            return ExitCode::from(2);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error\tkind=precondition\t{e}");
            return ExitCode::from(5);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = f.message().replace(['\n', '\t'], " ");
            eprintln!("error\tkind={}\t{msg}", f.kind());
            ExitCode::from(f.code())
        }
    }
}
