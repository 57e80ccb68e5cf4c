//! The subcommands. Each returns the CSV body; `main` adds the header and writes it once.

use std::fmt::Write;

use heat_trace::duhamel::{trace_total, SeriesOptions};
use heat_trace::oracle::OracleSpectrum;
use heat_trace::regularity::{classify_regularity_with, fit_expansion, gnm_check, ClassifyOptions, HeatTracePoint, Verdict};
use heat_trace::scattering::{birman_krein_check, find_resonances, ResonanceClass};
use heat_trace::{Error, Potential64, Stream};

use crate::config::RunConfig;

/// Full-precision decimal form (17 significant digits).
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn oracle_for(v: &Potential64) -> Result<Option<OracleSpectrum>, Error> {
    if v.is_zero() {
        Ok(None)
    } else {
        OracleSpectrum::compute(v).map(Some)
    }
}

pub fn trace(cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let mut s = String::from("t,method,value,stderr,tail_bound\n");
    let spectrum = if cfg.methods.iter().any(|m| m == "oracle") { oracle_for(v)? } else { None };
    let stream = Stream::new(cfg.seed);
    for (i, t) in cfg.times().into_iter().enumerate() {
        for method in &cfg.methods {
            let (value, se, tail) = match method.as_str() {
                "oracle" => match &spectrum {
                    Some(sp) => {
                        let o = sp.trace(t)?;
                        (o.value, o.error_estimate, 0.0)
                    }
                    None => (0.0, 0.0, 0.0),
                },
                _ => {
                    let opts = SeriesOptions { kmax: cfg.kmax, samples: cfg.samples, tolerance: None };
                    let series = trace_total(v, t, opts, stream.substream(i as u64))?;
                    (series.total, series.std_error(), series.tail_bound)
                }
            };
            writeln!(s, "{},{method},{},{},{}", num(t), num(value), num(se), num(tail)).unwrap();
        }
    }
    Ok(s)
}

pub fn expand(cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let spectrum = oracle_for(v)?;
    let samples: Vec<HeatTracePoint> = cfg
        .times()
        .into_iter()
        .map(|t| match &spectrum {
            Some(sp) => sp.trace(t).map(|o| HeatTracePoint { t, value: o.value, std_error: o.error_estimate }),
            None => Ok(HeatTracePoint { t, value: 0.0, std_error: 0.0 }),
        })
        .collect::<Result<_, _>>()?;
    let fit = fit_expansion(&samples, v.dim(), cfg.p_max)?;
    let mut s = format!("# condition_number = {}\n# divergence_exponent = {}\n", num(fit.condition_number), num(fit.divergence_exponent));
    s.push_str("power,coefficient,stderr\n");
    for ((p, c), e) in fit.powers.iter().zip(&fit.coefficients).zip(&fit.std_errors) {
        writeln!(s, "{p},{},{}", num(*c), num(*e)).unwrap();
    }
    Ok(s)
}

pub fn classify(cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let opts = ClassifyOptions { t_min: cfg.t_min, t_max: cfg.t_max, ..ClassifyOptions::default() };
    let report = classify_regularity_with(v, cfg.m_max, opts)?;
    let mut s = match report.max_passing {
        Some(m) => format!("# max_passing = {m}\n"),
        None => "# max_passing = none\n".to_string(),
    };
    s.push_str("m,verdict,divergence_exponent\n");
    for o in &report.orders {
        let verdict = match o.verdict {
            Verdict::Bounded => "bounded",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        };
        writeln!(s, "{},{verdict},{}", o.m, num(o.slope)).unwrap();
    }
    Ok(s)
}

pub fn resonances(cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let found = find_resonances(v, cfg.region, cfg.tol)?;
    let mut s = String::from("re,im,multiplicity,class,residual\n");
    for r in &found {
        let class = match r.class {
            ResonanceClass::ImaginaryAxis => "imaginary",
            ResonanceClass::Pair => "pair",
        };
        writeln!(s, "{},{},{},{class},{}", num(r.lambda.re), num(r.lambda.im), r.multiplicity, num(r.residual)).unwrap();
    }
    Ok(s)
}

pub fn bk_verify(cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let mut s = String::from("t,lhs,rhs,m_selected,residual\n");
    for t in cfg.times() {
        let r = birman_krein_check(v, t)?;
        writeln!(s, "{},{},{},{},{}", num(t), num(r.lhs), num(r.rhs), r.m_selected, num(r.residual)).unwrap();
    }
    Ok(s)
}

/// Product-estimate classes `(k, m, orders)` with the derivatives along the first axis.
const GNM_CLASSES: &[(usize, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[2, 2]),
    (3, 1, &[1, 1, 0]),
    (3, 2, &[2, 1, 1]),
    (4, 1, &[1, 1, 0, 0]),
    (4, 2, &[1, 1, 1, 1]),
];

pub fn gnm(_cfg: &RunConfig, v: &Potential64) -> Result<String, Error> {
    let mut s = String::from("k,m,alpha,lhs,rhs,ratio\n");
    let dim = v.dim();
    for &(k, m, orders) in GNM_CLASSES {
        let alphas: Vec<Vec<u32>> = orders
            .iter()
            .map(|&o| {
                let mut a = vec![0; dim];
                a[0] = o;
                a
            })
            .collect();
        let fields = vec![v; k];
        let r = gnm_check(&fields, &alphas, m)?;
        let label: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
        writeln!(s, "{k},{m},{},{},{},{}", label.join(";"), num(r.lhs), num(r.rhs), num(r.ratio)).unwrap();
    }
    Ok(s)
}
