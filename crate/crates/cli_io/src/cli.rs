use crate::config::{DEFAULT_DEPTH, DEFAULT_POINTS};
use clap::{Args, Parser, Subcommand};
use discrete::RANK_TOL;
use mellin_core::Cx;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "conewedge", version, about = "Spectral experiments for cone differential operators")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Depth T of the log grid, which covers t = log x in [-T, 0].
    #[arg(short = 'T', long = "depth", global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: f64,
    /// Number of grid points G.
    #[arg(short = 'G', long = "points", global = true, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Relative rank threshold for kernel and cokernel decisions.
    #[arg(long, global = true, default_value_t = RANK_TOL)]
    pub tol: f64,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RayArgs {
    /// Ray direction in degrees.
    #[arg(long = "ray", default_value_t = 180.0, allow_hyphen_values = true)]
    pub ray: f64,
    /// Opening of the arc used to border the minimal operator, in degrees.
    #[arg(long, default_value_t = 90.0)]
    pub aperture: f64,
    /// Smallest |lambda| on the ray.
    #[arg(long, default_value_t = 1.0)]
    pub rmin: f64,
    /// Largest |lambda| on the ray.
    #[arg(long, default_value_t = 1e4)]
    pub rmax: f64,
    /// Number of log-spaced samples between rmin and rmax.
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary spectrum of the conormal symbol.
    SpecB {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Mark the roots inside the strip and report the quotient dimension.
        #[arg(long)]
        strip: bool,
    },
    /// Quotient bases of the maximal domain, on the model and on the cone.
    Domains {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Extension file; without it only the quotient bases are listed.
        #[arg(long)]
        ext: Option<PathBuf>,
    },
    /// Cone-side representatives of the model singular functions at one exponent.
    Theta {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Exponent as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        sigma: Cx,
    },
    /// Index of A - lambda on nested extensions of the minimal domain.
    IndexLadder {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Spectral parameter as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-1,0")]
        lambda: Cx,
    },
    /// Resolvent norm sweep along a ray, written as CSV with a JSON sidecar.
    Sweep {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Extension file (JSON) selecting the closed realization.
        #[arg(long)]
        ext: PathBuf,
        #[command(flatten)]
        ray: RayArgs,
        /// Move the samples nearest to eigenvalues on the ray onto them.
        #[arg(long)]
        snap: bool,
        /// Path of the JSON sidecar (defaults to the CSV path with extension .json).
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Background-spectrum classification of a polar grid over a sector.
    SectorScan {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Model-side realization whose eigenvalues mark deficient cells.
        #[arg(long)]
        ext: PathBuf,
        /// Sector direction in degrees.
        #[arg(long, allow_hyphen_values = true)]
        center: f64,
        /// Opening of the sector in degrees.
        #[arg(long, default_value_t = 90.0)]
        aperture: f64,
        /// Number of rays spread over the sector.
        #[arg(long, default_value_t = 3)]
        rays: usize,
        /// Band edges in |lambda|, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        radii: Vec<f64>,
    },
    /// Principal radial symbol against a sector.
    CsymCheck {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Sector direction in degrees.
        #[arg(long, allow_hyphen_values = true)]
        center: f64,
        /// Opening of the sector in degrees.
        #[arg(long, default_value_t = 90.0)]
        aperture: f64,
        /// Number of sample directions on the cosphere.
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Convergence of the blended operator A_tau to A on random probes.
    AtauCheck {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Blend radii, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.003,0.01,0.03,0.1")]
        taus: Vec<f64>,
        /// Number of random probe functions.
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Decay of the enrichment part of the model resolvent along a ray.
    SmaxCheck {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Extension file (JSON) selecting the closed realization.
        #[arg(long)]
        ext: PathBuf,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// Difference between the cone and model reductions to the boundary along a ray.
    FfwedgeCheck {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Extension file (JSON) selecting the closed realization.
        #[arg(long)]
        ext: PathBuf,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// Norms of the dilated, cut-off enrichment lift.
    KtildeCheck {
        /// Problem file (JSON) with the coefficients of the operator.
        problem: PathBuf,
        /// Extension file (JSON) selecting the closed realization.
        #[arg(long)]
        ext: PathBuf,
        /// Dilation factors, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        rhos: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SpecB { .. } => "spec-b",
            Command::Domains { .. } => "domains",
            Command::Theta { .. } => "theta",
            Command::IndexLadder { .. } => "index-ladder",
            Command::Sweep { .. } => "sweep",
            Command::SectorScan { .. } => "sector-scan",
            Command::CsymCheck { .. } => "csym-check",
            Command::AtauCheck { .. } => "atau-check",
            Command::SmaxCheck { .. } => "smax-check",
            Command::FfwedgeCheck { .. } => "ffwedge-check",
            Command::KtildeCheck { .. } => "ktilde-check",
        }
    }
}

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(s: &str) -> Result<Cx, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}` is not a number: {e}"));
    match parts.as_slice() {
        [re] => Ok(Cx::new(num(re)?, 0.0)),
        [re, im] => Ok(Cx::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}
