use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kprox_core::IndexKind;

#[derive(Debug, Parser)]
#[command(name = "kprox", version, about = "Proximity queries and intersection graphs of convex homothets in R^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated scene as JSON.
    Generate(Common),
    /// Build a structure and print its statistics.
    Build(Common),
    /// Run a batch of detect/report/NN queries.
    Query {
        #[command(flatten)]
        common: Common,
        /// JSON list of `{"c": [x,y,z], "rho": r}`; random queries when absent.
        #[arg(long)]
        queries: Option<PathBuf>,
        /// Number of random queries.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Breadth-first search of the intersection graph.
    Bfs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    /// Depth-first forest of the intersection graph.
    Dfs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    /// Minimum spanning forest of the centers under the threshold `r0`.
    Mst {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r0: f64,
    },
    /// Shortest paths between centers along edges of length at most `r0`.
    Dijkstra {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r0: f64,
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    /// Smallest expansion admitting a path of at most `k` hops.
    Rsp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        k: usize,
    },
    /// Run the invariant suites of every module.
    Verify(Common),
    /// Timing sweep over scene sizes (and optionally `t`), written as CSV.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Scene sizes of the sweep.
        #[arg(long, value_delimiter = ',', default_values_t = [2000, 4000, 8000, 16000, 32000])]
        sizes: Vec<usize>,
        /// Shallowness values of the fast tree to sweep.
        #[arg(long = "t-values", value_delimiter = ',')]
        t_values: Vec<f64>,
        /// Expected intersection-graph degree of the generated scenes.
        #[arg(long, default_value_t = 8.0)]
        degree: f64,
        /// Random queries timed per row.
        #[arg(long, default_value_t = 1000)]
        queries: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistributionArg {
    Uniform,
    Clustered,
    Grid,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scene JSON; a scene is generated from the flags below when absent.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// `euclidean`, `ellipsoid:A,B,C` (semi-axes) or `lp:P` / `lp:P:A,B,C`.
    #[arg(long, default_value = "euclidean")]
    pub body: String,
    #[arg(long, value_enum, default_value_t = DistributionArg::Uniform)]
    pub distribution: DistributionArg,
    /// Common member size; sizes are uniform in [size/2, 3·size/2] with `--spread`.
    #[arg(long, default_value_t = 1.0)]
    pub size: f64,
    #[arg(long)]
    pub spread: bool,
    /// Side of the cube holding the centers.
    #[arg(long, default_value_t = 20.0)]
    pub extent: f64,
    /// `fast`, `grouped`, `linear` or `oracle`.
    #[arg(long)]
    pub structure: Option<IndexKind>,
    /// Shallowness parameter of the fast trees.
    #[arg(long)]
    pub t: Option<f64>,
    /// Storage budget `s`; picks the structure and group size.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file receiving the timing row of the run.
    #[arg(long)]
    pub timings: Option<PathBuf>,
}
