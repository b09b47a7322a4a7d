use std::fs;

use serde::Serialize;
use sigma_damp::experiments::{curve_csv, curve_json, error_curve, fit_slope, to_json, FIT_T_MAX, FIT_T_MIN};
use sigma_damp::model::OscillationBand;
use sigma_damp::profiles::{golden_check, GoldenCheck};
use sigma_damp::{ModelParams, RateCase};
use sigma_damp_acceptance::{CriterionReport, Suite};

use crate::config::{Overrides, Run};
use crate::CliError;

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Document<T> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

fn print_json<T: Serialize>(body: T) -> Result<(), CliError> {
    println!(
        "{}",
        to_json(&Document {
            schema_version: SCHEMA_VERSION,
            body
        })?
    );
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    params: ModelParams,
    case: RateCase,
    delta: f64,
    order_step: f64,
    band: Option<OscillationBand>,
    eps_star: f64,
    k: Vec<usize>,
    data: Vec<String>,
    times: usize,
    t_min: f64,
    t_max: f64,
    tol: f64,
}

pub fn validate(flags: &Overrides) -> Result<(), CliError> {
    let run = Run::resolve(flags, &[0, 1, 2])?;
    let p = run.params;
    let s = Summary {
        params: p,
        case: run.case,
        delta: p.delta(),
        order_step: p.order_step(run.case),
        band: p.oscillation_band()?,
        eps_star: p.eps_star()?,
        k: run.ks.clone(),
        data: run.data.iter().map(|(name, _)| name.clone()).collect(),
        times: run.times.len(),
        t_min: run.times[0],
        t_max: run.times[run.times.len() - 1],
        tol: run.tol,
    };
    if run.json {
        return print_json(s);
    }
    println!(
        "params   n={} sigma={} sigma1={} sigma2={} s={}",
        p.n, p.sigma, p.sigma1, p.sigma2, p.s
    );
    println!("case     {:?}", s.case);
    println!("delta    {}", s.delta);
    println!("step     {}", s.order_step);
    match s.band {
        Some(b) => println!("band     ({}, {})", b.r_low, b.r_high),
        None => println!("band     none"),
    }
    println!("eps*     {}", s.eps_star);
    println!("k        {:?}", s.k);
    println!("data     {}", s.data.join(", "));
    println!("times    {} points on [{}, {}]", s.times, s.t_min, s.t_max);
    println!("tol      {:e}", s.tol);
    println!("OK");
    Ok(())
}

#[derive(Serialize)]
struct Rate {
    k: usize,
    exponent: f64,
}

pub fn rates(flags: &Overrides) -> Result<(), CliError> {
    let run = Run::resolve(flags, &[0, 1, 2])?;
    let rows = run
        .ks
        .iter()
        .map(|&k| {
            Ok(Rate {
                k,
                exponent: run.params.error_exponent(k, run.case)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if run.json {
        #[derive(Serialize)]
        struct Rates {
            case: RateCase,
            rates: Vec<Rate>,
        }
        return print_json(Rates { case: run.case, rates: rows });
    }
    println!("{:?}", run.case);
    println!("k  exponent");
    for r in rows {
        println!("{}  {:.12}", r.k, r.exponent);
    }
    Ok(())
}

pub fn goldens(flags: &Overrides) -> Result<(), CliError> {
    let run = Run::resolve(flags, &[1, 2])?;
    let checks = run
        .ks
        .iter()
        .map(|&k| golden_check(k, run.case, &run.params))
        .collect::<Result<Vec<GoldenCheck>, _>>()?;
    if run.json {
        #[derive(Serialize)]
        struct Entry<'a> {
            #[serde(flatten)]
            check: &'a GoldenCheck,
            passed: bool,
        }
        #[derive(Serialize)]
        struct Goldens<'a> {
            goldens: Vec<Entry<'a>>,
        }
        print_json(Goldens {
            goldens: checks
                .iter()
                .map(|check| Entry {
                    check,
                    passed: check.passed(),
                })
                .collect(),
        })?;
    } else {
        for c in &checks {
            println!(
                "k={} {:?} {} max_error={:.3e} points={} corrected={}",
                c.k,
                c.case,
                if c.passed() { "PASS" } else { "FAIL" },
                c.max_error,
                c.points,
                c.corrected.len()
            );
            for note in &c.corrected {
                println!("    corrected: {note}");
            }
        }
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("k={}", c.k))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SuiteFailure(format!("golden profiles {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct Written {
    k: usize,
    data: String,
    slope: Option<f64>,
    target: f64,
    cancellations: usize,
    csv: String,
    json: String,
}

pub fn curve(flags: &Overrides) -> Result<(), CliError> {
    let run = Run::resolve(flags, &[0, 1, 2])?;
    fs::create_dir_all(&run.out)?;
    let mut written = Vec::new();
    for &k in &run.ks {
        for (name, data) in &run.data {
            let curve = error_curve(&run.params, run.case, k, data, &run.times, run.tol)?;
            let window = curve.window(FIT_T_MIN, FIT_T_MAX);
            let fit = if window.len() >= 5 {
                Some(fit_slope(&curve, window)?)
            } else {
                None
            };
            let stem = format!("curve_k{k}_{name}");
            let csv = run.out.join(format!("{stem}.csv"));
            let json = run.out.join(format!("{stem}.json"));
            fs::write(&csv, curve_csv(&curve, fit.as_ref())?)?;
            fs::write(&json, curve_json(&curve, fit.as_ref())? + "\n")?;
            let entry = Written {
                k,
                data: name.clone(),
                slope: fit.as_ref().map(|f| f.slope),
                target: curve.target()?,
                cancellations: curve.cancellations.iter().sum(),
                csv: csv.display().to_string(),
                json: json.display().to_string(),
            };
            if !run.json {
                let slope = entry.slope.map_or_else(|| "n/a".to_string(), |s| format!("{s:.4}"));
                println!(
                    "k={k} {name}: slope {slope} target {:.4} -> {}",
                    entry.target, entry.csv
                );
            }
            written.push(entry);
        }
    }
    if run.json {
        #[derive(Serialize)]
        struct Curves {
            curves: Vec<Written>,
        }
        print_json(Curves { curves: written })?;
    }
    Ok(())
}

pub fn verify(flags: &Overrides) -> Result<(), CliError> {
    let run = Run::resolve(flags, &[0])?;
    let suite = Suite::default();
    let mut reports: Vec<CriterionReport> = Vec::new();
    for &id in &run.criteria {
        let report = suite.run(id);
        if !run.json {
            print!("{report}");
        }
        reports.push(report);
    }
    if run.json {
        #[derive(Serialize)]
        struct Verify<'a> {
            criteria: &'a [CriterionReport],
        }
        print_json(Verify { criteria: &reports })?;
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SuiteFailure(format!("criteria {} failed", failed.join(", "))))
    }
}
