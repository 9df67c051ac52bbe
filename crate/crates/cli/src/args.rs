use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pshmass::scalar::parse_fraction;
use pshmass::Rational;

#[derive(Debug, Parser)]
#[command(name = "pshmass", version, about = "Residual Monge-Ampere masses, Cantor potentials and monomial multiplicities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level-k intervals, atoms or distribution function of the Cantor measure (CSV).
    Cantor(CantorArgs),
    /// Logarithmic potential of the level-k Cantor measure (JSON).
    Potential(PotentialArgs),
    /// Multiplicity of a monomial ideal family (JSON).
    Mult(MultArgs),
    /// Residual mass from blowup intersection numbers (JSON).
    Mass(MassArgs),
    /// Masses of the multiplier-ideal approximants (JSON or CSV).
    Approx(ApproxArgs),
    /// Counterexample report for a singularity family (JSON or CSV).
    Report(ReportArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Intervals,
    Atoms,
    Cdf,
}

#[derive(Debug, Args)]
pub struct CantorArgs {
    /// Decay base a > 2 of the lengths l_k = exp(-a^k).
    #[arg(long, default_value_t = 3.0)]
    pub a: f64,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = Emit::Intervals)]
    pub emit: Emit,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long, default_value_t = 3.0)]
    pub a: f64,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Gauss-Legendre nodes per interval.
    #[arg(long, default_value_t = 8)]
    pub nodes: usize,
    /// Evaluation point "x,y", or "inf" for the point at infinity.
    #[arg(long = "eval", value_parser = parse_point)]
    pub eval: Vec<EvalPoint>,
    /// Fit p(x0) against (a/2)^k over levels kmin..=kmax.
    #[arg(long, value_parser = parse_range)]
    pub bound_fit: Option<(usize, usize)>,
    /// Base point of the bound fit.
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalPoint {
    Finite(f64, f64),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Hyperplane,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Closed,
    Grid,
    Both,
}

#[derive(Debug, Args)]
pub struct MultArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_enum, default_value_t = Oracle::Closed)]
    pub oracle: Oracle,
    /// Grid cells per unit length of the covolume count.
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Trivial,
    Hyperplane,
    Point,
    Custom,
}

#[derive(Debug, Args)]
pub struct MassArgs {
    #[arg(long, value_enum, default_value_t = GeometryArg::Point)]
    pub geometry: GeometryArg,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Coefficient c as "p/q" or an integer.
    #[arg(long, value_parser = parse_rational)]
    pub c: Rational,
    /// Comma-separated ι(0), …, ι(n-2) (custom geometry only).
    #[arg(long, value_parser = parse_rational_list)]
    pub iota: Option<RationalList>,
    /// Recompute the mass through the integer recursion.
    #[arg(long)]
    pub check_recursion: bool,
    /// Scale d for the recursion (default: the denominator of c).
    #[arg(long)]
    pub d: Option<u64>,
    /// Compare against the multiplicity of the matching monomial ideal.
    #[arg(long)]
    pub cross_check: bool,
    /// Accept c > 1.
    #[arg(long)]
    pub allow_any_c: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalList(pub Vec<Rational>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub m_max: u64,
    /// Report the multiplier ideal order at a rational λ > 0.
    #[arg(long, value_parser = parse_rational)]
    pub lambda: Option<Rational>,
    /// Keep ((m-n+1)/m)^n for m < n instead of clamping to 0.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFamily {
    Cantor2,
    CantorHd,
    Analytic,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_enum)]
    pub family: ReportFamily,
    /// Dimension (cantor-hd and analytic).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub gamma: Option<u64>,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryArg>,
    #[arg(long, value_parser = parse_rational)]
    pub c: Option<Rational>,
    #[arg(long, default_value_t = 100)]
    pub m_max: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ProfileArg::Fast)]
    pub profile: ProfileArg,
    #[arg(long, value_enum, default_value_t = VerifyFormat::Table)]
    pub format: VerifyFormat,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    parse_fraction(s).ok_or_else(|| format!("'{s}' is not a fraction p/q"))
}

fn parse_rational_list(s: &str) -> Result<RationalList, String> {
    s.split(',').map(parse_rational).collect::<Result<_, _>>().map(RationalList)
}

fn parse_float(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_point(s: &str) -> Result<EvalPoint, String> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(EvalPoint::Infinity);
    }
    let (x, y) = s.split_once(',').ok_or_else(|| format!("'{s}' is not of the form x,y or inf"))?;
    Ok(EvalPoint::Finite(parse_float(x)?, parse_float(y)?))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("'{s}' is not of the form kmin:kmax");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(format!("empty level range {s}"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        assert_eq!(parse_point("0.5,-1"), Ok(EvalPoint::Finite(0.5, -1.0)));
        assert_eq!(parse_point("INF"), Ok(EvalPoint::Infinity));
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("nan,0").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4:10"), Ok((4, 10)));
        assert!(parse_range("10:4").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
