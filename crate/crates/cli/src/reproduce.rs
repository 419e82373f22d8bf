//! Data behind the moment, MGF and CDF convergence figures, and the four reference tables.

use std::time::Instant;

use clap::ValueEnum;
use ghquad::{
    gh_summary_stats, gig_mgf, gig_mgf_quad, gig_moment, ig_rule, DensityOracle, GHParams,
    GIGParams, GhSampler, IGParams, Mixture, RngStream, PRESETS,
};

use crate::args::CliResult;
use crate::report::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Table1,
    Table2,
    Table3,
    Table4,
    All,
}

impl Target {
    pub const EACH: [Target; 7] = [
        Target::Fig1,
        Target::Fig2,
        Target::Fig3,
        Target::Table1,
        Target::Table2,
        Target::Table3,
        Target::Table4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Fig1 => "fig1",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Table1 => "table1",
            Target::Table2 => "table2",
            Target::Table3 => "table3",
            Target::Table4 => "table4",
            Target::All => "all",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    /// Quadrature size for the fixed-size tables
    pub n: usize,
    pub seed: u64,
    /// Timing repetitions for table2 or simulation repetitions for table4
    pub reps: Option<usize>,
    pub count: usize,
    pub tol: f64,
}

pub fn preset_sets() -> Vec<(String, GHParams)> {
    PRESETS
        .iter()
        .map(|p| (p.name.to_owned(), p.gh_params().expect("presets are valid")))
        .collect()
}

pub fn build(target: Target, s: &Settings) -> CliResult<Table> {
    match target {
        Target::Fig1 => moment_errors(),
        Target::Fig2 => mgf_errors(),
        Target::Fig3 => cdf_convergence(),
        Target::Table1 => parameter_table(),
        Target::Table2 => timing_table(&preset_sets(), s.n, s.reps.unwrap_or(20), s.tol),
        Target::Table3 => tail_errors(s.n),
        Target::Table4 => monte_carlo(s.n, s.count, s.reps.unwrap_or(100), s.seed),
        Target::All => unreachable!("expanded by the caller"),
    }
}

/// Relative error of IG(1,1) quadrature moments over a grid of real orders.
fn moment_errors() -> CliResult<Table> {
    let ig = IGParams::new(1.0, 1.0)?;
    let gig = GIGParams::from(ig);
    let mut table = Table::new(["n", "r", "rel_error"]);
    for n in [10usize, 20] {
        let rule = ig_rule(&ig, n)?;
        let span = 10 * (n as i64 + 3);
        for k in -span..=span {
            let r = k as f64 / 10.0;
            let exact = gig_moment(&gig, r)?;
            let quad = rule.integrate(|x| x.powf(r));
            table.push(vec![
                n.into(),
                r.into(),
                ((quad - exact) / exact).abs().into(),
            ]);
        }
    }
    Ok(table)
}

/// Relative MGF error at t = 0.4 sigma^2 for the NIG and hyperbolic mixing laws.
fn mgf_errors() -> CliResult<Table> {
    let mut table = Table::new(["p", "sigma", "n", "rel_error"]);
    for p in [-0.5, 1.0] {
        for sigma in [0.5, 0.75, 1.0, 1.5, 2.0] {
            let g = GIGParams::new(sigma, sigma, p)?;
            let t = 0.4 * sigma * sigma;
            let exact = gig_mgf(&g, t)?;
            for n in 1..=60usize {
                let quad = gig_mgf_quad(&g, t, n)?;
                table.push(vec![
                    p.into(),
                    sigma.into(),
                    n.into(),
                    ((quad - exact) / exact).abs().into(),
                ]);
            }
        }
    }
    Ok(table)
}

/// The 99 percentile points, located with a fine rule.
fn percentile_points(params: &GHParams) -> CliResult<Vec<f64>> {
    let fine = Mixture::new(params, 150)?;
    (1..=99)
        .map(|j| Ok(fine.quantile(j as f64 / 100.0)?))
        .collect()
}

fn reference_cdfs(params: &GHParams, ys: &[f64]) -> CliResult<Vec<f64>> {
    let oracle = DensityOracle::new(params)?;
    ys.iter().map(|&y| Ok(oracle.cdf(y, 1e-14)?)).collect()
}

fn max_error(values: impl Iterator<Item = f64>, reference: &[f64]) -> f64 {
    values
        .zip(reference)
        .map(|(v, r)| (v - r).abs())
        .fold(0.0, f64::max)
}

fn cdf_convergence() -> CliResult<Table> {
    let mut table = Table::new(["set", "n", "max_error"]);
    for (name, params) in preset_sets() {
        let ys = percentile_points(&params)?;
        let reference = reference_cdfs(&params, &ys)?;
        for n in (5..=150).step_by(5) {
            let mix = Mixture::new(&params, n)?;
            let err = max_error(ys.iter().map(|&y| mix.cdf(y)), &reference);
            table.push(vec![name.as_str().into(), n.into(), err.into()]);
        }
    }
    Ok(table)
}

fn parameter_table() -> CliResult<Table> {
    let mut table = Table::new([
        "set",
        "mu",
        "alpha",
        "beta",
        "delta",
        "p",
        "sigma",
        "mean",
        "variance",
        "skewness",
        "ex_kurtosis",
    ]);
    for preset in PRESETS.iter() {
        let a = preset.params;
        let params = preset.gh_params()?;
        let s = gh_summary_stats(&params)?;
        let row = [
            a.mu,
            a.alpha,
            a.beta,
            a.delta,
            a.p,
            params.sigma(),
            s.mean,
            s.variance,
            s.skewness,
            s.ex_kurtosis,
        ];
        let mut cells: Vec<Cell> = vec![preset.name.into()];
        cells.extend(row.into_iter().map(Cell::Num));
        table.push(cells);
    }
    Ok(table)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[m - 1] + xs[m])
    } else {
        xs[m]
    }
}

/// Wall-clock medians of a 99-point CDF batch through the quadrature and through the density oracle.
pub fn timing_table(
    sets: &[(String, GHParams)],
    n: usize,
    reps: usize,
    tol: f64,
) -> CliResult<Table> {
    let mut table = Table::new([
        "set",
        "n",
        "quad_ms",
        "oracle_ms",
        "ratio",
        "quad_error",
        "oracle_error",
    ]);
    let reps = reps.max(1);
    for (name, params) in sets {
        let ys = percentile_points(params)?;
        let reference = reference_cdfs(params, &ys)?;
        Mixture::new(params, n)?;
        let (mut tq, mut to) = (Vec::with_capacity(reps), Vec::with_capacity(reps));
        let (mut quad_vals, mut oracle_vals) = (Vec::new(), Vec::new());
        for _ in 0..reps {
            let start = Instant::now();
            let mix = Mixture::new(params, n)?;
            quad_vals = ys.iter().map(|&y| mix.cdf(y)).collect();
            tq.push(start.elapsed().as_secs_f64());

            let start = Instant::now();
            let oracle = DensityOracle::new(params)?;
            oracle_vals = ys
                .iter()
                .map(|&y| oracle.cdf(y, tol))
                .collect::<Result<Vec<_>, _>>()?;
            to.push(start.elapsed().as_secs_f64());
        }
        let (tq, to) = (median(tq), median(to));
        table.push(vec![
            name.as_str().into(),
            n.into(),
            (tq * 1e3).into(),
            (to * 1e3).into(),
            (to / tq).into(),
            max_error(quad_vals.into_iter(), &reference).into(),
            max_error(oracle_vals.into_iter(), &reference).into(),
        ]);
    }
    Ok(table)
}

/// Signed CDF errors at extreme quantiles.
fn tail_errors(n: usize) -> CliResult<Table> {
    let sets = preset_sets();
    let mut columns = vec!["q".to_owned()];
    columns.extend(sets.iter().map(|(name, _)| name.clone()));
    let mut table = Table::new(columns);
    let levels: [(&str, f64, bool); 6] = [
        ("1e-9", 1e-9, false),
        ("1e-6", 1e-6, false),
        ("1e-3", 1e-3, false),
        ("1-1e-3", 1e-3, true),
        ("1-1e-6", 1e-6, true),
        ("1-1e-9", 1e-9, true),
    ];
    let mut cols = Vec::new();
    for (_, params) in &sets {
        let fine = Mixture::new(params, 150)?;
        let mix = Mixture::new(params, n)?;
        let oracle = DensityOracle::new(params)?;
        let mut col = Vec::new();
        for &(_, q, upper) in &levels {
            col.push(if upper {
                let y = fine.quantile(1.0 - q)?;
                oracle.sf(y, 1e-14)? - mix.sf(y)
            } else {
                let y = fine.quantile(q)?;
                mix.cdf(y) - oracle.cdf(y, 1e-14)?
            });
        }
        cols.push(col);
    }
    for (i, &(label, _, _)) in levels.iter().enumerate() {
        let mut row: Vec<Cell> = vec![label.into()];
        row.extend(cols.iter().map(|c| Cell::Num(c[i])));
        table.push(row);
    }
    Ok(table)
}

/// Bias and standard deviation, in units of 1e-6, of empirical CDF values from repeated simulations.
fn monte_carlo(n: usize, count: usize, reps: usize, seed: u64) -> CliResult<Table> {
    let percentiles = [1usize, 10, 30, 50, 70, 90, 99];
    let mut table = Table::new(["percentile", "set", "bias_1e6", "sd_1e6"]);
    let root = RngStream::new(seed);
    for (i, (name, params)) in preset_sets().iter().enumerate() {
        let oracle = DensityOracle::new(params)?;
        let ys: Vec<f64> = percentiles
            .iter()
            .map(|&j| oracle.quantile(j as f64 / 100.0, 1e-14))
            .collect::<Result<_, _>>()?;
        let sampler = GhSampler::new(params, n)?;
        let mut errs = vec![Vec::with_capacity(reps); percentiles.len()];
        for r in 0..reps {
            let mut rng = root.substream((i * reps + r) as u64);
            let draws = sampler.sample(count, &mut rng, false);
            let mut below = vec![0usize; ys.len()];
            for d in draws {
                // below[k] counts draws in (y_{k-1}, y_k]
                let k = ys.partition_point(|&y| y < d);
                if k < below.len() {
                    below[k] += 1;
                }
            }
            let mut cum = 0usize;
            for (k, &j) in percentiles.iter().enumerate() {
                cum += below[k];
                errs[k].push(cum as f64 / count as f64 - j as f64 / 100.0);
            }
        }
        for (k, &j) in percentiles.iter().enumerate() {
            let e = &errs[k];
            let m = e.iter().sum::<f64>() / e.len() as f64;
            let var = if e.len() > 1 {
                e.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (e.len() - 1) as f64
            } else {
                f64::NAN
            };
            table.push(vec![
                j.into(),
                name.as_str().into(),
                (m * 1e6).into(),
                (var.sqrt() * 1e6).into(),
            ]);
        }
    }
    Ok(table)
}
