//! Single-purpose subcommands: rules, closed forms, mixture evaluation, sampling and the oracle.

use ghquad::{
    gh_mgf, gh_summary_stats, gig_mgf, gig_mgf_quad, gig_moment, gig_rule, ig_rule,
    mixture_cdf_bruteforce, mixture_sf_bruteforce, preset, DensityOracle, GHParams, GIGParams,
    GhDensity, GhSampler, IGParams, Mixture, RngStream,
};
use serde_json::Value;

use crate::args::{usage, CliResult};
use crate::report::{Cell, Report, Table};

fn params_json(params: &GHParams) -> Value {
    serde_json::to_value(params).expect("parameters serialize")
}

fn point_table(points: &[f64], mut f: impl FnMut(f64) -> CliResult<f64>) -> CliResult<Table> {
    let mut table = Table::new(["input", "value"]);
    for &x in points {
        table.push(vec![x.into(), f(x)?.into()]);
    }
    Ok(table)
}

pub struct QuadOptions<'a> {
    pub set: Option<&'a str>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub raw: bool,
}

pub fn quad(opts: &QuadOptions) -> CliResult<Report> {
    let explicit =
        opts.gamma.is_some() || opts.delta.is_some() || opts.sigma.is_some() || opts.p.is_some();
    let gig = if let Some(name) = opts.set {
        if explicit {
            return usage("--set cannot be combined with explicit rule parameters");
        }
        let Some(p) = preset(name) else {
            return usage(format!("unknown parameter set '{name}'"));
        };
        Some(p.gh_params()?.mixing())
    } else {
        let (gamma, delta) = match (opts.sigma, opts.gamma, opts.delta) {
            (Some(s), None, None) => (s, s),
            (None, g, d) => (g.unwrap_or(1.0), d.unwrap_or(1.0)),
            _ => return usage("--sigma cannot be combined with --gamma or --delta"),
        };
        match opts.p {
            Some(p) => Some(GIGParams::new(gamma, delta, p)?),
            None => {
                let ig = IGParams::new(gamma, delta)?;
                let rule = ig_rule(&ig, opts.n)?;
                return Ok(rule_report(
                    &rule,
                    serde_json::to_value(ig).expect("serialize"),
                    opts.n,
                    false,
                ));
            }
        }
    };
    let gig = gig.expect("set or explicit gig");
    let rule = gig_rule(&gig, opts.n, !opts.raw)?;
    Ok(rule_report(
        &rule,
        serde_json::to_value(gig).expect("serialize"),
        opts.n,
        !opts.raw,
    ))
}

fn rule_report(
    rule: &ghquad::QuadratureRule,
    params: Value,
    n: usize,
    renormalized: bool,
) -> Report {
    let mut table = Table::new(["node", "weight"]);
    for (x, w) in rule.iter() {
        table.push(vec![x.into(), w.into()]);
    }
    Report::new(table)
        .with_params(params)
        .meta("n", n)
        .meta("renormalized", renormalized)
        .meta("degraded", rule.is_degraded())
}

pub fn density(params: &GHParams, ys: &[f64], log: bool) -> CliResult<Report> {
    let d = GhDensity::new(params)?;
    let table = point_table(ys, |y| {
        let v = d.ln_pdf(y)?;
        Ok(if log { v } else { v.exp() })
    })?;
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("log", log))
}

pub fn moments(params: &GHParams, rs: &[f64]) -> CliResult<Report> {
    let g = params.mixing();
    let table = point_table(rs, |r| Ok(gig_moment(&g, r)?))?;
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("quantity", "mixing moment E[X^r]"))
}

pub fn mgf(params: &GHParams, ts: &[f64], mixing: bool, n: Option<usize>) -> CliResult<Report> {
    let g = params.mixing();
    let table = point_table(ts, |t| {
        Ok(match (mixing, n) {
            (true, None) => gig_mgf(&g, t)?,
            (true, Some(n)) => gig_mgf_quad(&g, t, n)?,
            (false, None) => gh_mgf(params, t)?,
            (false, Some(n)) => {
                (params.mu * t).exp() * gig_mgf_quad(&g, params.beta * t + 0.5 * t * t, n)?
            }
        })
    })?;
    let mut report = Report::new(table)
        .with_params(params_json(params))
        .meta("variable", if mixing { "mixing" } else { "gh" });
    if let Some(n) = n {
        report = report.meta("n", n);
    }
    Ok(report)
}

pub fn stats(params: &GHParams) -> CliResult<Report> {
    let s = gh_summary_stats(params)?;
    let mut table = Table::new(["statistic", "value"]);
    for (name, v) in [
        ("mean", s.mean),
        ("variance", s.variance),
        ("skewness", s.skewness),
        ("ex_kurtosis", s.ex_kurtosis),
    ] {
        table.push(vec![name.into(), v.into()]);
    }
    Ok(Report::new(table).with_params(params_json(params)))
}

pub fn cdf(params: &GHParams, ys: &[f64], n: usize, upper: bool) -> CliResult<Report> {
    let mix = Mixture::new(params, n)?;
    let table = point_table(ys, |y| Ok(if upper { mix.sf(y) } else { mix.cdf(y) }))?;
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("n", n)
        .meta("upper", upper))
}

pub fn quantile(params: &GHParams, qs: &[f64], n: usize) -> CliResult<Report> {
    let mix = Mixture::new(params, n)?;
    let table = point_table(qs, |q| Ok(mix.quantile(q)?))?;
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("n", n))
}

pub fn price(params: &GHParams, strikes: &[f64], n: usize, put: bool) -> CliResult<Report> {
    let mix = Mixture::new(params, n)?;
    let table = point_table(strikes, |k| {
        Ok(if put {
            mix.put_price(k)?
        } else {
            mix.call_price(k)?
        })
    })?;
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("n", n)
        .meta("option", if put { "put" } else { "call" }))
}

/// Integrand families accepted by `expect`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    Power(f64),
    Exp(f64),
    Indicator(f64),
    Call(f64),
    Put(f64),
}

impl Integrand {
    pub fn parse(s: &str) -> CliResult<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let Ok(a) = arg.parse::<f64>() else {
            return usage(format!(
                "bad function '{s}': expected kind:number, e.g. power:2"
            ));
        };
        Ok(match kind {
            "power" => Integrand::Power(a),
            "exp" => Integrand::Exp(a),
            "indicator" => Integrand::Indicator(a),
            "call" => Integrand::Call(a),
            "put" => Integrand::Put(a),
            _ => {
                return usage(format!(
                    "unknown function kind '{kind}' (power, exp, indicator, call, put)"
                ))
            }
        })
    }

    pub fn eval(self, y: f64) -> f64 {
        match self {
            Integrand::Power(k) => y.powf(k),
            Integrand::Exp(t) => (t * y).exp(),
            Integrand::Indicator(c) => f64::from(u8::from(y < c)),
            Integrand::Call(k) => (y.exp() - k).max(0.0),
            Integrand::Put(k) => (k - y.exp()).max(0.0),
        }
    }
}

pub fn expect(params: &GHParams, functions: &[String], n: usize, m: usize) -> CliResult<Report> {
    let mix = Mixture::new(params, n)?;
    let mut table = Table::new(["function", "value"]);
    for s in functions {
        let g = Integrand::parse(s)?;
        table.push(vec![
            s.as_str().into(),
            mix.expectation(|y| g.eval(y), m)?.into(),
        ]);
    }
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("n", n)
        .meta("m", m))
}

pub struct SampleOptions {
    pub count: usize,
    pub seed: u64,
    pub n: usize,
    pub antithetic: bool,
    pub chunk: Option<usize>,
}

pub fn sample(params: &GHParams, opts: &SampleOptions) -> CliResult<Vec<f64>> {
    let sampler = GhSampler::new(params, opts.n)?;
    Ok(match opts.chunk {
        Some(0) => return usage("--chunk must be positive"),
        Some(c) => sampler.sample_parallel(opts.count, opts.seed, c, opts.antithetic),
        None => sampler.sample(opts.count, &mut RngStream::new(opts.seed), opts.antithetic),
    })
}

pub fn sample_report(params: &GHParams, opts: &SampleOptions, values: &[f64]) -> Report {
    let mut table = Table::new(["value"]);
    for &v in values {
        table.push(vec![Cell::Num(v)]);
    }
    Report::new(table)
        .with_params(params_json(params))
        .meta("seed", opts.seed)
        .meta("n", opts.n)
        .meta("antithetic", opts.antithetic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Integrate the closed-form GH density
    Density,
    /// Integrate normal probabilities against the mixing density
    Mixing,
}

pub fn oracle_cdf(
    params: &GHParams,
    ys: &[f64],
    tol: f64,
    route: Route,
    upper: bool,
) -> CliResult<Report> {
    let table = match route {
        Route::Density => {
            let oracle = DensityOracle::new(params)?;
            point_table(ys, |y| {
                Ok(if upper {
                    oracle.sf(y, tol)?
                } else {
                    oracle.cdf(y, tol)?
                })
            })?
        }
        Route::Mixing => point_table(ys, |y| {
            Ok(if upper {
                mixture_sf_bruteforce(params, y, tol)?
            } else {
                mixture_cdf_bruteforce(params, y, tol)?
            })
        })?,
    };
    let route = match route {
        Route::Density => "density",
        Route::Mixing => "mixing",
    };
    Ok(Report::new(table)
        .with_params(params_json(params))
        .meta("tol", tol)
        .meta("route", route)
        .meta("upper", upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrand_parsing() {
        assert_eq!(Integrand::parse("power:2").unwrap(), Integrand::Power(2.0));
        assert_eq!(
            Integrand::parse("indicator:-0.5").unwrap(),
            Integrand::Indicator(-0.5)
        );
        assert!(Integrand::parse("power").is_err());
        assert!(Integrand::parse("cosh:1").is_err());
        assert_eq!(Integrand::Indicator(0.0).eval(-1.0), 1.0);
        assert_eq!(Integrand::Call(1.0).eval(0.0), 0.0);
    }
}
