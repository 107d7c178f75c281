use std::fmt::Write as _;

use num_rational::BigRational;
use serde_json::{json, Value};

use rnaenum::asymptotics::{analyze_class, analyze_grammar, limit_law, AsymptoticsConfig, AsymptoticsError};
use rnaenum::models::{
    build_system, check_consistency, count_range, describe, format_pq, link_distribution, symbolic_coefficients,
    Dangles, Grammar, ModelError, StructureClass,
};
use rnaenum::series::SeriesError;
use rnaenum::structures::{
    classify, count_dangle_annotations, parse_dot_bracket, parse_rational, to_tree, validate, ModelParams,
    SecondaryStructure, StructureError,
};
use rnaenum::thermo::{celsius_grid, compare_models, ThermoError, ALTERNATE_GAS_CONSTANT, GAS_CONSTANT};

use crate::{ClassArgs, Command, Output};

/// Exit status 1 for bad input, 2 for numeric failure.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Series(s) => s.into(),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<AsymptoticsError> for Failure {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Model(m) => m.into(),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<ThermoError> for Failure {
    fn from(e: ThermoError) -> Self {
        match e {
            ThermoError::InvalidModel | ThermoError::NonPositiveTemperature(_) => Failure::Validation(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn class_of(args: &ClassArgs) -> Result<StructureClass, Failure> {
    let p = parse_rational(&args.p)?;
    let q = match (&args.q, args.dangles) {
        (Some(_), Dangles::None) => return Err(invalid("--q needs --dangles external")),
        (Some(q), Dangles::External) => parse_rational(q)?,
        (None, _) => BigRational::from_integer(0.into()),
    };
    let params = ModelParams::new(args.theta, args.tau, p, q)?;
    Ok(StructureClass::new(args.family, args.dangles, params)?)
}

fn class_json(class: &StructureClass) -> Value {
    json!({
        "class": class.label(),
        "theta": class.params.theta,
        "tau": class.params.tau,
        "p": class.params.p.to_string(),
        "q": class.params.q.to_string(),
    })
}

fn pretty<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Pretty JSON with every float rounded to `digits` significant digits.
fn rounded<T: serde::Serialize>(v: &T, digits: Option<u32>) -> Result<String, Failure> {
    let Some(digits) = digits else {
        return Ok(pretty(v));
    };
    if !(1..=15).contains(&digits) {
        return Err(invalid("--precision-digits must lie in 1..=15; values are computed in double precision"));
    }
    fn walk(v: &mut serde_json::Value, digits: usize) {
        match v {
            serde_json::Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().expect("f64");
                let r: f64 = format!("{:.*e}", digits - 1, x).parse().expect("float");
                *v = serde_json::json!(r);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(|x| walk(x, digits)),
            serde_json::Value::Object(map) => map.values_mut().for_each(|x| walk(x, digits)),
            _ => {}
        }
    }
    let mut value = serde_json::to_value(v).expect("serializable");
    walk(&mut value, digits as usize);
    Ok(pretty(&value))
}

pub fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Count {
            class,
            n_max,
            n,
            by_links,
            output,
        } => count(&class_of(&class)?, n_max, n, by_links, output),
        Command::Series { class, order, output } => series(&class_of(&class)?, order, output),
        Command::System { class } => {
            let class = class_of(&class)?;
            let sys = build_system(&class)?;
            let (phi, psi) = sys.phi_psi();
            Ok(format!("{}\nPhi = {phi}\nPsi = {psi}\n", describe(&class)?))
        }
        Command::Asym {
            class,
            grammar,
            seed_n,
            diagnostic_n,
            precision_digits,
        } => {
            if seed_n < 2 {
                return Err(invalid("--seed-n must be at least 2"));
            }
            let config = AsymptoticsConfig { seed_n, diagnostic_n };
            let class = class_of(&class)?;
            let est = match grammar {
                None => analyze_class(&class, config)?,
                Some(g @ (Grammar::G4 | Grammar::G5)) => {
                    let q = if class.dangles == Dangles::External {
                        class.params.q.clone()
                    } else {
                        BigRational::from_integer(1.into())
                    };
                    analyze_grammar(g, class.params.theta, &class.params.p, &q, config)?
                }
                Some(g) => return Err(invalid(format!("asymptotics are available for g4 and g5, not {g}"))),
            };
            rounded(&est, precision_digits)
        }
        Command::Limitlaw {
            class,
            h,
            precision_digits,
        } => {
            if !(h > 0.0 && h < 0.25) {
                return Err(invalid("--h must lie in (0, 0.25)"));
            }
            rounded(&limit_law(&class_of(&class)?, h)?, precision_digits)
        }
        Command::Melt {
            n,
            theta,
            from,
            to,
            step,
            epsilon,
            paper_r,
            level,
            output,
        } => {
            if !(step > 0.0) || to < from {
                return Err(invalid("need --step > 0 and --from ≤ --to"));
            }
            if from <= -273.15 {
                return Err(invalid("temperatures must be above absolute zero"));
            }
            let r = if paper_r { ALTERNATE_GAS_CONSTANT } else { GAS_CONSTANT };
            let grid = celsius_grid(from, to, step);
            let cmp = compare_models(n, theta, epsilon, r, &grid, level)?;
            Ok(match output {
                Output::Csv => cmp.to_csv(),
                Output::Json => pretty(&cmp),
            })
        }
        Command::Check {
            n_max,
            thetas,
            taus,
            qs,
            json,
        } => {
            let qs = qs.iter().map(|q| parse_rational(q)).collect::<Result<Vec<_>, _>>()?;
            let report = check_consistency(n_max, &thetas, &taus, &qs)?;
            if json {
                return Ok(pretty(&report));
            }
            let failures: Vec<_> = report.failures().collect();
            if failures.is_empty() {
                Ok(format!("all classes consistent ({} rows, n <= {n_max})\n", report.rows.len()))
            } else {
                let mut msg = format!("{} inconsistent rows:\n", failures.len());
                for r in failures {
                    let _ = writeln!(msg, "{}", serde_json::to_string(r).expect("serializable"));
                }
                Err(Failure::Validation(msg))
            }
        }
        Command::Structure { structure, theta, tau } => structure_report(&structure, theta, tau),
    }
}

fn count(class: &StructureClass, n_max: usize, n: Option<usize>, by_links: bool, output: Output) -> Result<String, Failure> {
    let top = n.unwrap_or(n_max);
    let range = match n {
        Some(n) => n..=n,
        None => 1..=n_max,
    };
    let mut rows: Vec<(usize, Option<usize>, String)> = Vec::new();
    if by_links {
        let dist = link_distribution(class, top)?;
        for m in range {
            for (k, c) in &dist[m] {
                rows.push((m, Some(*k), c.to_string()));
            }
        }
    } else {
        let counts = count_range(class, top)?;
        for m in range {
            rows.push((m, None, counts[m].to_string()));
        }
    }
    Ok(match output {
        Output::Csv => {
            let mut out = String::from(if by_links { "n,k,count\n" } else { "n,count\n" });
            for (m, k, c) in rows {
                match k {
                    Some(k) => writeln!(out, "{m},{k},{c}"),
                    None => writeln!(out, "{m},{c}"),
                }
                .expect("string write");
            }
            out
        }
        Output::Json => {
            let mut v = class_json(class);
            v["counts"] = rows
                .into_iter()
                .map(|(m, k, c)| match k {
                    Some(k) => json!({"n": m, "k": k, "count": c}),
                    None => json!({"n": m, "count": c}),
                })
                .collect();
            pretty(&v)
        }
    })
}

fn series(class: &StructureClass, order: usize, output: Output) -> Result<String, Failure> {
    let coeffs = symbolic_coefficients(class, order)?;
    let rows: Vec<(usize, String)> = coeffs.iter().enumerate().map(|(n, c)| (n, format_pq(c))).collect();
    Ok(match output {
        Output::Csv => {
            let mut out = String::from("n,coefficient\n");
            for (n, c) in rows {
                writeln!(out, "{n},{c}").expect("string write");
            }
            out
        }
        Output::Json => {
            let mut v = class_json(class);
            v["coefficients"] = rows.into_iter().map(|(n, c)| json!({"n": n, "coefficient": c})).collect();
            pretty(&v)
        }
    })
}

fn structure_report(text: &str, theta: u32, tau: u32) -> Result<String, Failure> {
    let s: SecondaryStructure = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| invalid(format!("bad structure JSON: {e}")))?
    } else {
        parse_dot_bracket(text.trim())?
    };
    let params = ModelParams::thresholds(theta, tau);
    let valid = validate(&s, &params);
    let mut v = json!({
        "dot_bracket": s.to_dot_bracket(),
        "structure": s,
        "theta": theta,
        "tau": tau,
        "valid": valid,
        "links": s.links(),
        "stacked_pairs": s.stacked_pairs(),
        "stem_lengths": s.stem_lengths(),
        "dangle_polynomial": count_dangle_annotations(&s).coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    if valid {
        v["classification"] = serde_json::to_value(classify(&s, &params)?).expect("serializable");
        if !s.pairs().is_empty() {
            v["tree"] = serde_json::to_value(to_tree(&s)?).expect("serializable");
        }
    }
    Ok(pretty(&v))
}
