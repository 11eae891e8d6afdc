use std::io::Write;

use probreach::acc_oracle::is_safe;
use probreach::dynamics::AccSystem;
use probreach::gpc::{GpcConfig, SamplingStrategy};
use probreach::mcs::{coverage_trial_suite, mcs_reach_with_count, sample_bound, ReachSpec};
use probreach::scenario::AccScenario;
use probreach::{IntervalBox, SeededRng};

use crate::output::{contour, flag, Csv, Svg};
use crate::{AccArgs, BoundArgs, CliError, CliResult, GpcArgs, McsArgs, OracleArgs, ReachArgs, Strategy, TrialsArgs};

fn say<W: Write>(stdout: &mut W, line: std::fmt::Arguments) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(|e| CliError::io("<stdout>".as_ref(), e))
}

pub fn cmd_bound<W: Write>(args: &BoundArgs, stdout: &mut W) -> CliResult<()> {
    let m = sample_bound(args.n, args.epsilon, args.delta)?;
    say(stdout, format_args!("{m}"))
}

fn reach_spec(args: &ReachArgs) -> CliResult<ReachSpec> {
    let (lower, upper) = args.system.initial_box();
    let lower = args.lower.clone().unwrap_or(lower);
    let upper = args.upper.clone().unwrap_or(upper);
    let (t0, t1) = args.system.horizon();
    let region = IntervalBox::new(lower, upper)?;
    let spec = ReachSpec::new(
        args.epsilon,
        args.delta,
        args.t0.unwrap_or(t0),
        args.t1.unwrap_or(t1),
        region,
    )?;
    if spec.dimension() != args.system.state_names().len() {
        return Err(CliError::Param(format!(
            "{:?} has {} state variables but the initial box has {}",
            args.system,
            args.system.state_names().len(),
            spec.dimension()
        )));
    }
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(CliError::Param("step must be positive".into()));
    }
    Ok(spec)
}

pub fn cmd_mcs<W: Write>(args: &McsArgs, stdout: &mut W) -> CliResult<()> {
    let spec = reach_spec(&args.reach)?;
    let names = args.reach.system.state_names();
    let project = match args.project.as_slice() {
        &[i, j] if i < names.len() && j < names.len() => (i, j),
        _ => {
            return Err(CliError::Param(format!(
                "--project needs two coordinates below {}",
                names.len()
            )))
        }
    };
    let system = args.reach.system.build();
    let count = args.samples.unwrap_or_else(|| spec.sample_bound());
    let rng = SeededRng::new(args.reach.seed);
    let result = mcs_reach_with_count(system.as_ref(), &spec, count, &rng, args.reach.step)?;
    let dir = &args.output.out;

    let mut hull = Csv::new(&["dim", "lower", "upper"]);
    for (d, (lo, hi)) in result.hull.lower().iter().zip(result.hull.upper().iter()).enumerate() {
        hull.row([d.to_string(), lo.to_string(), hi.to_string()]);
    }
    hull.write(dir, "hull.csv")?;

    let mut header = vec!["t"];
    header.extend_from_slice(names);
    let mut samples = Csv::new(&header);
    for (t, states) in [(spec.t0, &result.initial_states), (spec.t1, &result.final_states)] {
        for x in states.iter() {
            samples.row(std::iter::once(t).chain(x.iter().copied()));
        }
    }
    samples.write(dir, "samples.csv")?;

    let (i, j) = project;
    let pts: Vec<(f64, f64)> = result.final_states.iter().map(|x| (x[i], x[j])).collect();
    let mut svg = Svg::new(
        (result.hull.lower()[i], result.hull.upper()[i]),
        (result.hull.lower()[j], result.hull.upper()[j]),
    );
    svg.title(&format!(
        "{:?}: {} successor samples and their interval hull",
        args.reach.system, count
    ));
    svg.axes(names[i], names[j]);
    for &(x, y) in &pts {
        svg.circle(x, y, 1.5, "none", "#3465a4");
    }
    svg.rect(
        (result.hull.lower()[i], result.hull.lower()[j]),
        (result.hull.upper()[i], result.hull.upper()[j]),
        "#cc0000",
    );
    crate::output::write_file(dir, "hull.svg", &svg.finish())?;

    say(
        stdout,
        format_args!(
            "samples={} bound={} certified={} volume={}",
            count,
            spec.sample_bound(),
            result.certified,
            result.hull.volume()
        ),
    )?;
    for (d, name) in names.iter().enumerate() {
        say(
            stdout,
            format_args!("{name}: [{}, {}]", result.hull.lower()[d], result.hull.upper()[d]),
        )?;
    }
    Ok(())
}

fn acc_scenario(acc: &AccArgs, step: f64) -> CliResult<AccScenario> {
    let system = AccSystem::new(acc.a, acc.b)?;
    let range = |name: &str, r: &[f64]| match r {
        &[lo, hi] => Ok((lo, hi)),
        _ => Err(CliError::Param(format!("--{name} needs exactly two values"))),
    };
    let (h_lo, h_hi) = range("h-range", &acc.h_range)?;
    let (v_lo, v_hi) = range("vl-range", &acc.vl_range)?;
    if v_lo < 0.0 || !(acc.vf >= 0.0 && acc.vf.is_finite()) {
        return Err(CliError::Param("speeds must be nonnegative".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Param("step must be positive".into()));
    }
    Ok(AccScenario {
        system,
        v_follower: acc.vf,
        region: IntervalBox::new(vec![h_lo, v_lo], vec![h_hi, v_hi])?,
        step,
    })
}

/// Cell centres along one axis of `region`.
fn centres(region: &IntervalBox, axis: usize, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| region.lower()[axis] + region.width(axis) * (k as f64 + 0.5) / n as f64)
        .collect()
}

fn boundary_curve(scenario: &AccScenario) -> Vec<(f64, f64)> {
    let r = &scenario.region;
    (0..=200)
        .map(|k| {
            let v = r.lower()[1] + r.width(1) * k as f64 / 200.0;
            (scenario.boundary(v), v)
        })
        .filter(|&(h, _)| h >= r.lower()[0] && h <= r.upper()[0])
        .collect()
}

pub fn cmd_gpc<W: Write>(args: &GpcArgs, stdout: &mut W) -> CliResult<()> {
    let scenario = acc_scenario(&args.acc, args.step)?;
    if args.grid == 0 {
        return Err(CliError::Param("--grid must be positive".into()));
    }
    let strategy = match args.strategy {
        Strategy::Adaptive => SamplingStrategy::Adaptive,
        Strategy::Uniform => SamplingStrategy::Uniform,
        Strategy::Lhs => SamplingStrategy::LatinHypercube,
    };
    let cfg = GpcConfig {
        regularization: args.regularization,
        ..GpcConfig::default()
    };
    let rng = SeededRng::new(args.seed);
    let estimate = scenario.estimate(strategy, args.m, args.pool, &cfg, &rng)?;
    let dir = &args.output.out;

    let hs = centres(&scenario.region, 0, args.grid);
    let vs = centres(&scenario.region, 1, args.grid);
    let mut grid = Csv::new(&["h", "vL", "predicted", "true"]);
    let mut levels = Vec::with_capacity(hs.len() * vs.len());
    let mut agree = 0usize;
    for &h in &hs {
        for &v in &vs {
            let p = [h, v];
            let predicted = estimate.classify(&p);
            let truth = scenario.truth(&p);
            agree += (predicted == truth) as usize;
            grid.row([
                h.to_string(),
                v.to_string(),
                flag(predicted).to_string(),
                flag(truth).to_string(),
            ]);
            levels.push(match estimate.constant_class {
                Some(_) => 0.0,
                None => estimate.model.mean(&p) - estimate.threshold,
            });
        }
    }
    grid.write(dir, "grid.csv")?;
    let accuracy = agree as f64 / levels.len() as f64;

    let mut samples = Csv::new(&["h", "vL", "label"]);
    for s in estimate.samples() {
        samples.row([s.point[0], s.point[1], s.label]);
    }
    samples.write(dir, "samples.csv")?;

    let r = &scenario.region;
    let mut svg = Svg::new((r.lower()[0], r.upper()[0]), (r.lower()[1], r.upper()[1]));
    svg.title(&format!(
        "{:?} sampling, m = {}, accuracy {:.4}",
        args.strategy, args.m, accuracy
    ));
    svg.axes("h(0)", "vL(0)");
    svg.polyline(&boundary_curve(&scenario), "#000000", false);
    if estimate.constant_class.is_none() {
        svg.segments(&contour(&hs, &vs, &levels), "#cc0000", true);
    }
    for s in estimate.samples() {
        if s.inside() {
            svg.cross(s.point[0], s.point[1], 3.0, "#3465a4");
        } else {
            svg.circle(s.point[0], s.point[1], 3.0, "#cc0000", "none");
        }
    }
    crate::output::write_file(dir, "safe_set.svg", &svg.finish())?;

    if estimate.is_degenerate() {
        say(
            stdout,
            format_args!("warning: only one class observed; the classifier is constant"),
        )?;
    }
    say(
        stdout,
        format_args!(
            "strategy={:?} m={} labels={} accuracy={}",
            args.strategy, args.m, estimate.label_evaluations, accuracy
        ),
    )
}

pub fn cmd_trials<W: Write>(args: &TrialsArgs, stdout: &mut W) -> CliResult<()> {
    let spec = reach_spec(&args.reach)?;
    let system = args.reach.system.build();
    let rng = SeededRng::new(args.reach.seed);
    let suite = coverage_trial_suite(
        system.as_ref(),
        &spec,
        args.trials,
        args.validation,
        &rng,
        args.reach.step,
    )?;
    let mut csv = Csv::new(&["trial", "seed", "m", "coverage", "success"]);
    for t in &suite.trials {
        csv.row([
            t.trial.to_string(),
            t.stream.stream_id.to_string(),
            t.sample_count.to_string(),
            t.coverage.to_string(),
            flag(t.success).to_string(),
        ]);
    }
    csv.write(&args.output.out, "trials.csv")?;
    let min = suite.trials.iter().map(|t| t.coverage).fold(f64::INFINITY, f64::min);
    say(
        stdout,
        format_args!(
            "trials={} m={} success_fraction={} target={} min_coverage={}",
            args.trials,
            spec.sample_bound(),
            suite.success_fraction,
            1.0 - spec.delta,
            min
        ),
    )
}

pub fn cmd_acc_oracle_grid<W: Write>(args: &OracleArgs, stdout: &mut W) -> CliResult<()> {
    let scenario = acc_scenario(&args.acc, probreach::dynamics::DEFAULT_STEP)?;
    if args.grid == 0 {
        return Err(CliError::Param("--grid must be positive".into()));
    }
    let (a, b, vf) = (scenario.system.a, scenario.system.b, scenario.v_follower);
    let mut csv = Csv::new(&["h", "vL", "safe"]);
    let mut safe = 0usize;
    let hs = centres(&scenario.region, 0, args.grid);
    let vs = centres(&scenario.region, 1, args.grid);
    for &h in &hs {
        for &v in &vs {
            let s = is_safe(h, v, vf, a, b);
            safe += s as usize;
            csv.row([h.to_string(), v.to_string(), flag(s).to_string()]);
        }
    }
    csv.write(&args.output.out, "oracle.csv")?;

    let r = &scenario.region;
    let mut svg = Svg::new((r.lower()[0], r.upper()[0]), (r.lower()[1], r.upper()[1]));
    svg.title(&format!("Closed-form safe set, vF = {vf}"));
    svg.axes("h(0)", "vL(0)");
    svg.polyline(&boundary_curve(&scenario), "#000000", false);
    crate::output::write_file(&args.output.out, "oracle.svg", &svg.finish())?;

    say(
        stdout,
        format_args!(
            "grid={}x{} safe_fraction={}",
            args.grid,
            args.grid,
            safe as f64 / (hs.len() * vs.len()) as f64
        ),
    )
}
