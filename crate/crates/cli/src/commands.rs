use std::collections::BTreeMap;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use modcorr::hecke::{self, FundDomainCell, Rational};
use modcorr::report::fmt_f64;
use modcorr::rotor::{SpherePoint, UnitQuaternion};
use modcorr::sphstat::{self, Cap};
use modcorr::words::{GeneratorSystem, Mode};
use modcorr::{Execution, RunOptions};

use crate::output::Output;
use crate::settings::{load_config, parse_floats, parse_tuples, NRange, Resolver};
use crate::{CapArgs, CharacterArgs, CheckArgs, Common, Generators, HeckeArgs, HeckeOrbitArgs, Invalid, SphereArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereKind {
    Axes,
    Orbit,
}

/// Settings shared by every subcommand.
struct Run {
    output: Output,
    threads: Option<usize>,
    options: RunOptions,
}

fn resolver(common: &Common) -> Result<Resolver, Invalid> {
    let file = match &common.config {
        Some(p) => load_config(p)?,
        None => BTreeMap::new(),
    };
    Ok(Resolver::new(file))
}

fn common(r: &mut Resolver, c: &Common, default_name: &str) -> Result<Run, Invalid> {
    let out = r.opt::<String>("out", c.out.as_ref().map(|p| p.display().to_string()))?;
    let name = r.get("name", c.name.clone(), default_name.to_string())?;
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Invalid(format!("name: `{name}` is not a plain file name")));
    }
    let threads = r.opt::<usize>("threads", c.threads)?;
    if threads == Some(0) {
        return Err(Invalid("threads: must be at least 1".into()));
    }
    let depth = r.opt::<usize>("partition-depth", c.partition_depth)?;
    let sequential = r.flag("sequential", c.sequential)?;
    let mut options = RunOptions { partition_depth: depth, ..RunOptions::default() };
    if sequential {
        options.execution = Execution::Sequential;
    }
    Ok(Run { output: Output { dir: out.map(Into::into), name }, threads, options })
}

/// Runs `f` on a pool of the requested size (or the global pool).
fn on_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(f())
}

fn generators(r: &mut Resolver, g: &Generators) -> Result<GeneratorSystem, Invalid> {
    let preset = r.opt::<String>("preset", g.preset.clone())?;
    let quats = r.opt::<String>("quaternions", g.quaternions.clone())?;
    let mode = match r.get("mode", g.mode.clone(), "semigroup".to_string())?.as_str() {
        "semigroup" => Mode::Semigroup,
        "group" => Mode::Group,
        other => return Err(Invalid(format!("mode: `{other}` is not semigroup or group"))),
    };
    let half: Vec<UnitQuaternion> = match (preset.as_deref(), quats) {
        (Some(_), Some(_)) => return Err(Invalid("quaternions: conflicts with preset".into())),
        (Some("lps5") | None, None) => modcorr::words::lps5_quaternions()[..2].to_vec(),
        (Some("lps5-triple"), None) => modcorr::words::lps5_quaternions().to_vec(),
        (Some(other), None) => return Err(Invalid(format!("preset: unknown preset `{other}`"))),
        (None, Some(list)) => parse_tuples("quaternions", &list, 4)?
            .into_iter()
            .map(|q| UnitQuaternion::new(q[0], q[1], q[2], q[3]))
            .collect::<modcorr::Result<_>>()
            .map_err(|e| Invalid(format!("quaternions: {e}")))?,
    };
    if half.is_empty() {
        return Err(Invalid("quaternions: no generators".into()));
    }
    let system = match mode {
        Mode::Semigroup => GeneratorSystem::new(half, Mode::Semigroup),
        Mode::Group => GeneratorSystem::symmetric(half),
    };
    system.map_err(|e| Invalid(format!("quaternions: {e}")))
}

fn caps(r: &mut Resolver, c: &CapArgs) -> Result<Vec<Cap>, Invalid> {
    let spec = r.opt::<String>("caps", c.caps.clone())?;
    let random = r.opt::<usize>("random-caps", c.random_caps)?;
    let seed = r.opt::<u64>("seed", c.seed)?;
    match (spec.as_deref(), random) {
        (Some(_), Some(_)) => Err(Invalid("random-caps: conflicts with caps".into())),
        (None, Some(k)) => {
            let seed = seed.ok_or_else(|| Invalid("seed: required with random-caps".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k)
                .map(|_| {
                    let v: [f64; 3] =
                        [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
                    let radius = rng.random_range(0.1..=1.0);
                    let center = SpherePoint::normalized(v).map_err(|e| Invalid(format!("random-caps: {e}")))?;
                    Cap::new(center, radius).map_err(|e| Invalid(format!("random-caps: {e}")))
                })
                .collect()
        }
        (None | Some("default"), None) => {
            if seed.is_some() {
                return Err(Invalid("seed: only used with random-caps".into()));
            }
            Ok(sphstat::default_caps())
        }
        (Some(list), None) => parse_tuples("caps", list, 4)?
            .into_iter()
            .map(|t| {
                let center = SpherePoint::normalized([t[0], t[1], t[2]]).map_err(|e| Invalid(format!("caps: {e}")))?;
                Cap::new(center, t[3]).map_err(|e| Invalid(format!("caps: {e}")))
            })
            .collect(),
    }
}

fn n_values(r: &mut Resolver, flag: Option<NRange>) -> Result<Vec<u32>, Invalid> {
    let range = r.opt::<NRange>("n", flag)?.ok_or_else(|| Invalid("n: required".into()))?;
    Ok(range.values())
}

fn flat_rows(n: u32, rows: Vec<(String, String)>) -> Vec<Vec<String>> {
    rows.into_iter().map(|(k, v)| vec![n.to_string(), k, v]).collect()
}

pub fn sphere(kind: SphereKind, args: SphereArgs, point: Option<String>) -> Result<()> {
    let mut r = resolver(&args.common)?;
    let name = match kind {
        SphereKind::Axes => "axes",
        SphereKind::Orbit => "orbit",
    };
    let run = common(&mut r, &args.common, name)?;
    let system = generators(&mut r, &args.generators)?;
    let ns = n_values(&mut r, args.n)?;
    let lmax = r.get("L", args.l, sphstat::DEFAULT_LMAX)?;
    if lmax > sphstat::MAX_DEGREE {
        return Err(Invalid(format!("L: {lmax} above {}", sphstat::MAX_DEGREE)).into());
    }
    let caps = caps(&mut r, &args.caps)?;
    let base = match kind {
        SphereKind::Orbit => {
            let p = r.opt::<String>("point", point)?;
            match p {
                Some(s) => {
                    let v = parse_floats("point", &s)?;
                    if v.len() != 3 {
                        return Err(Invalid("point: needs x,y,z".into()).into());
                    }
                    SpherePoint::normalized([v[0], v[1], v[2]]).map_err(|e| Invalid(format!("point: {e}")))?
                }
                None => SpherePoint::NORTH,
            }
        }
        SphereKind::Axes => SpherePoint::NORTH,
    };
    let config = r.finish()?;
    run.output.prepare()?;

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for n in ns {
        let report = on_pool(run.threads, || match kind {
            SphereKind::Axes => sphstat::axis_experiment(&system, n as usize, lmax, &caps, &run.options),
            SphereKind::Orbit => sphstat::orbit_experiment(&system, &base, n as usize, lmax, &caps, &run.options),
        })??;
        println!(
            "{name} n={n} degree={} points={} mass={} worst_residual={}",
            report.degree,
            report.point_count,
            fmt_f64(report.mass),
            fmt_f64(report.worst_cap_residual())
        );
        rows.extend(flat_rows(n, report.flat_rows()));
        reports.push(serde_json::to_value(&report)?);
    }
    run.output.write_report(&config, reports)?;
    run.output.write_csv("report.csv", &["n", "statistic", "value"], &rows)
}

pub fn characters(args: CharacterArgs) -> Result<()> {
    let mut r = resolver(&args.common)?;
    let run = common(&mut r, &args.common, "characters")?;
    let system = generators(&mut r, &args.generators)?;
    let ns = n_values(&mut r, args.n)?;
    let lmax = r.get("L", args.l, 4)?;
    let config = r.finish()?;
    run.output.prepare()?;

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for n in ns {
        let report = on_pool(run.threads, || sphstat::character_experiment(&system, n as usize, lmax, &run.options))??;
        let worst = report.char_avg.iter().skip(1).map(|c| c.abs()).fold(0.0, f64::max);
        let chars: Vec<String> = report.char_avg.iter().skip(1).map(|c| format!("{c:.3e}")).collect();
        println!(
            "characters n={n} degree={} mass={} worst_residual={} char[1..]={}",
            report.degree,
            fmt_f64(report.mass),
            fmt_f64(worst),
            chars.join(",")
        );
        rows.extend(flat_rows(n, report.flat_rows()));
        reports.push(serde_json::to_value(&report)?);
    }
    run.output.write_report(&config, reports)?;
    run.output.write_csv("report.csv", &["n", "statistic", "value"], &rows)
}

fn cells(r: &mut Resolver, h: &HeckeArgs) -> Result<Vec<FundDomainCell>, Invalid> {
    let slices = r.get("x-slices", h.x_slices, 4)?;
    let breaks = r.get("y-breaks", h.y_breaks.clone(), "2".to_string())?;
    let breaks = if breaks.trim().is_empty() { vec![] } else { parse_floats("y-breaks", &breaks)? };
    hecke::grid_cells(slices, &breaks).map_err(|e| Invalid(format!("y-breaks: {e}")))
}

fn prime(r: &mut Resolver, flag: Option<u64>) -> Result<u64, Invalid> {
    let p = r.get("p", flag, 2)?;
    hecke::coset_reps(p).map_err(|e| Invalid(format!("p: {e}")))?;
    Ok(p)
}

fn rational(q: Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn hecke_fix(args: HeckeArgs) -> Result<()> {
    let mut r = resolver(&args.common)?;
    let run = common(&mut r, &args.common, "hecke-fix")?;
    let p = prime(&mut r, args.p)?;
    let ns = n_values(&mut r, args.n)?;
    let cells = cells(&mut r, &args)?;
    let config = r.finish()?;
    run.output.prepare()?;

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for n in ns {
        let (report, measure) = on_pool(run.threads, || hecke::fixed_point_report(p, n, &cells))??;
        println!(
            "hecke-fix p={p} n={n} degree={} ratio={} mass={} worst_residual={}",
            report.degree,
            report.ratio,
            fmt_f64(report.mass),
            fmt_f64(report.worst_cell_residual())
        );
        for level in &measure.levels {
            for pt in &level.points {
                let weight = pt.weight * Rational::from_integer(level.multiplicity as i128);
                points.push(vec![
                    n.to_string(),
                    level.level.to_string(),
                    pt.trace.to_string(),
                    pt.form.a.to_string(),
                    pt.form.b.to_string(),
                    pt.form.c.to_string(),
                    rational(pt.x_exact()),
                    rational(pt.y_squared_exact()),
                    rational(weight),
                ]);
            }
        }
        rows.extend(flat_rows(n, report.flat_rows()));
        reports.push(serde_json::to_value(&report)?);
    }
    run.output.write_report(&config, reports)?;
    run.output.write_csv("report.csv", &["n", "statistic", "value"], &rows)?;
    run.output.write_csv("points.csv", &["n", "level", "t", "a", "b", "c", "x", "y2", "weight"], &points)
}

pub fn hecke_orbit(args: HeckeOrbitArgs) -> Result<()> {
    let h = &args.hecke;
    let mut r = resolver(&h.common)?;
    let run = common(&mut r, &h.common, "hecke-orbit")?;
    let p = prime(&mut r, h.p)?;
    let ns = n_values(&mut r, h.n)?;
    let cells = cells(&mut r, h)?;
    let z0 = parse_floats("z0", &r.get("z0", args.z0.clone(), "0,2".to_string())?)?;
    if z0.len() != 2 || z0[1].is_nan() || z0[1] <= 0.0 {
        return Err(Invalid("z0: needs x,y with y > 0".into()).into());
    }
    let config = r.finish()?;
    run.output.prepare()?;

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for n in ns {
        let (report, orbit) = on_pool(run.threads, || hecke::orbit_report(p, n, (z0[0], z0[1]), &cells))??;
        println!(
            "hecke-orbit p={p} n={n} degree={} ratio={} mass={} worst_residual={}",
            report.degree,
            report.ratio,
            fmt_f64(report.mass),
            fmt_f64(report.worst_cell_residual())
        );
        for pt in &orbit.points {
            points.push(vec![
                n.to_string(),
                pt.level.to_string(),
                pt.coset.alpha.to_string(),
                pt.coset.beta.to_string(),
                pt.coset.delta.to_string(),
                fmt_f64(pt.x),
                fmt_f64(pt.y),
                pt.multiplicity.to_string(),
            ]);
        }
        rows.extend(flat_rows(n, report.flat_rows()));
        reports.push(serde_json::to_value(&report)?);
    }
    run.output.write_report(&config, reports)?;
    run.output.write_csv("report.csv", &["n", "statistic", "value"], &rows)?;
    run.output.write_csv("points.csv", &["n", "level", "alpha", "beta", "delta", "x", "y", "multiplicity"], &points)
}

pub fn check(args: CheckArgs) -> Result<()> {
    let mut r = resolver(&args.common)?;
    let run = common(&mut r, &args.common, "check")?;
    let max = r.get("hurwitz-max", args.hurwitz_max, 200)?;
    if max == 0 {
        return Err(Invalid("hurwitz-max: must be at least 1".into()).into());
    }
    if max > hecke::forms::RELATION_BUDGET {
        return Err(modcorr::Error::Budget {
            needed: format!("hurwitz-max = {max}"),
            limit: hecke::forms::RELATION_BUDGET.to_string(),
        }
        .into());
    }
    let config = r.finish()?;
    run.output.prepare()?;

    let execution = run.options.execution;
    let residuals = on_pool(run.threads, || {
        modcorr::exec::try_map_tasks(execution, max as usize, |i| hecke::class_relation_check(i as u64 + 1))
    })??;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut nonzero = 0;
    for (i, res) in residuals.iter().enumerate() {
        let n = i + 1;
        if *res != Rational::from_integer(0) {
            nonzero += 1;
        }
        println!("check N={n} residual={res}");
        rows.push(vec![n.to_string(), res.to_string()]);
        entries.push(serde_json::json!({ "N": n, "residual": res.to_string() }));
    }
    println!("check hurwitz-max={max} zero={} nonzero={nonzero}", max as usize - nonzero);
    run.output.write_report(&config, vec![Value::Array(entries)])?;
    run.output.write_csv("report.csv", &["N", "residual"], &rows)?;
    if nonzero > 0 {
        anyhow::bail!("class number relation fails for {nonzero} values of N");
    }
    Ok(())
}
