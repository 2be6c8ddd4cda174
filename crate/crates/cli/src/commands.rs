use std::fs::File;
use std::io::{self, BufWriter, Write};

use num_traits::ToPrimitive;
use polya_core::dp::estimated_memory;
use polya_core::{
    chernoff_bound, definetti_estimator, equalization_probability,
    equalization_probability_binomial, equalization_probability_complement, estimate_equalization,
    first_passage_dp_with, normal_approximation, ApproxResult, EstimateWithCI, Execution, RngSeed,
    UrnConfig, DEFAULT_MEMORY_BUDGET,
};
use rayon::prelude::*;

use crate::record::{dec, dec_rational, ratio, write_records, Format, Method, OutputRecord};
use crate::{
    ApproxMethod, CliError, ExactForm, McArgs, OutputArgs, RangeArg, SimMethod, UrnArgs,
    DP_BUDGET_ENV,
};

/// Largest horizon at which `simulate` computes a DP reference on its own.
const REFERENCE_DP_MAX_HORIZON: u64 = 1000;

type CliResult<T = ()> = Result<T, CliError>;

fn config(urn: &UrnArgs) -> CliResult<UrnConfig> {
    UrnConfig::new(urn.b, urn.w).map_err(|e| CliError::Usage(e.to_string()))
}

fn dp_budget() -> CliResult<u64> {
    match std::env::var(DP_BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!("{DP_BUDGET_ENV} must be a byte count, got {v:?}"))
        }),
        Err(_) => Ok(DEFAULT_MEMORY_BUDGET),
    }
}

fn open_output(out: &OutputArgs) -> CliResult<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Failed(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: &OutputArgs, records: &[OutputRecord], notes: &[String]) -> CliResult {
    for n in notes {
        eprintln!("note: {n}");
    }
    let mut w = open_output(out)?;
    write_records(&mut w, out.format, records, notes)?;
    w.flush()?;
    Ok(())
}

fn swap_note(c: UrnConfig, notes: &mut Vec<String>) {
    if c.black() < c.white() {
        notes.push(format!(
            "b < w: colors swapped, value is that of (b={}, w={})",
            c.white(),
            c.black()
        ));
    }
}

/// The urn with black in the majority, for forms that require `b > w`.
fn majority(c: UrnConfig) -> UrnConfig {
    if c.black() < c.white() {
        c.swapped()
    } else {
        c
    }
}

fn exact_record(c: UrnConfig, method: Method) -> CliResult<OutputRecord> {
    let p = match method {
        Method::Exact => equalization_probability(c),
        Method::Binomial => equalization_probability_binomial(majority(c))?,
        Method::Complement => equalization_probability_complement(majority(c))?,
        _ => unreachable!("not a closed form"),
    };
    Ok(OutputRecord::from_probability(
        c.black(),
        c.white(),
        method,
        &p,
    ))
}

pub fn exact(urn: &UrnArgs, form: ExactForm, out: &OutputArgs) -> CliResult {
    let c = config(urn)?;
    let mut notes = Vec::new();
    swap_note(c, &mut notes);
    if c.black() == c.white() {
        notes.push("b = w: the urn starts equal, probability 1 by convention".into());
    }
    let methods: &[Method] = match form {
        ExactForm::Theorem => &[Method::Exact],
        ExactForm::Binomial => &[Method::Binomial],
        ExactForm::Complement => &[Method::Complement],
        ExactForm::All if c.black() == c.white() => {
            notes.push("explicit sum forms need b != w; reporting the closed form only".into());
            &[Method::Exact]
        }
        ExactForm::All => &[Method::Exact, Method::Binomial, Method::Complement],
    };
    let records = methods
        .iter()
        .map(|&m| exact_record(c, m))
        .collect::<CliResult<Vec<_>>>()?;
    if form == ExactForm::All && records.len() == 3 {
        if records.iter().all(|r| r.rational == records[0].rational) {
            notes.push(format!(
                "identity holds: all three forms equal {}",
                records[0].rational.as_deref().unwrap_or("?")
            ));
        } else {
            emit(out, &records, &notes)?;
            return Err(CliError::Failed(format!("closed forms disagree for {c}")));
        }
    }
    emit(out, &records, &notes)
}

fn dp_record(c: UrnConfig, target: i64, horizon: u64, budget: u64) -> CliResult<OutputRecord> {
    let table = first_passage_dp_with(c, target, horizon, budget, Execution::default())?;
    let mut r = OutputRecord::exact(c.black(), c.white(), Method::Dp, &table.cumulative);
    r.target = Some(target);
    r.horizon = Some(horizon);
    if target == 0 {
        r.reference = Some(dec_rational(equalization_probability(c).value()));
    }
    Ok(r)
}

pub fn dp(urn: &UrnArgs, target: i64, horizon: u64, emit_pmf: bool, out: &OutputArgs) -> CliResult {
    let c = config(urn)?;
    let budget = dp_budget()?;
    if !emit_pmf {
        let r = dp_record(c, target, horizon, budget)?;
        let mut notes = Vec::new();
        if target == 0 && c.black() != c.white() {
            notes.push(format!(
                "truncated at horizon {horizon}; untruncated value in `reference`"
            ));
        }
        return emit(out, &[r], &notes);
    }
    if out.format != Format::Csv {
        return Err(CliError::Usage("--emit-pmf writes CSV only".into()));
    }
    let table = first_passage_dp_with(c, target, horizon, budget, Execution::default())?;
    eprintln!(
        "note: P(tau <= {horizon}) = {} = {}",
        ratio(&table.cumulative),
        dec_rational(&table.cumulative)
    );
    let mut w = open_output(out)?;
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(&mut w);
    wtr.write_record(["n", "p_tau_n_num", "p_tau_n_den", "p_tau_n_decimal"])?;
    for (n, p) in table.hit_pmf.iter().enumerate() {
        wtr.write_record([
            n.to_string(),
            p.numer().to_string(),
            p.denom().to_string(),
            dec_rational(p),
        ])?;
    }
    wtr.flush()?;
    drop(wtr);
    w.flush()?;
    Ok(())
}

fn estimate_fields(r: &mut OutputRecord, e: &EstimateWithCI, mc: &McArgs) {
    r.samples = Some(mc.samples);
    r.seed = Some(mc.seed);
    r.streams = Some(mc.streams);
    r.std_err = Some(dec(e.std_err));
    r.ci95_lo = Some(dec(e.ci95.0));
    r.ci95_hi = Some(dec(e.ci95.1));
}

fn reference_fields(r: &mut OutputRecord, e: &EstimateWithCI, reference: f64) {
    r.reference = Some(dec(reference));
    r.z_score = e.z_score(reference).map(dec);
}

fn mc_record(
    c: UrnConfig,
    target: i64,
    horizon: u64,
    mc: &McArgs,
    budget: u64,
    notes: &mut Vec<String>,
) -> CliResult<OutputRecord> {
    let e = estimate_equalization(
        c,
        target,
        horizon,
        mc.samples,
        RngSeed::new(mc.seed),
        mc.streams,
    )?;
    let mut r = OutputRecord::new(c.black(), c.white(), Method::Mc, dec(e.p_hat));
    r.target = Some(target);
    r.horizon = Some(horizon);
    estimate_fields(&mut r, &e, mc);
    if horizon <= REFERENCE_DP_MAX_HORIZON && estimated_memory(c, horizon) <= budget {
        let table = first_passage_dp_with(c, target, horizon, budget, Execution::default())?;
        let reference = table.cumulative.to_f64().unwrap_or(f64::NAN);
        reference_fields(&mut r, &e, reference);
    } else {
        notes.push(format!(
            "{c}: no DP reference above horizon {REFERENCE_DP_MAX_HORIZON}"
        ));
    }
    if e.degenerate {
        notes.push(format!("{c}: degenerate estimate, standard error is zero"));
    }
    Ok(r)
}

fn definetti_record(c: UrnConfig, mc: &McArgs, notes: &mut Vec<String>) -> CliResult<OutputRecord> {
    if c.black() <= c.white() {
        return Err(CliError::Usage(format!(
            "the de Finetti estimator needs b > w (got b={}, w={})",
            c.black(),
            c.white()
        )));
    }
    let e = definetti_estimator(c, mc.samples, RngSeed::new(mc.seed), mc.streams)?;
    let mut r = OutputRecord::new(c.black(), c.white(), Method::Definetti, dec(e.p_hat));
    estimate_fields(&mut r, &e, mc);
    reference_fields(&mut r, &e, equalization_probability(c).to_f64());
    if e.degenerate {
        notes.push(format!("{c}: degenerate estimate, standard error is zero"));
    }
    Ok(r)
}

pub fn simulate(
    urn: &UrnArgs,
    target: i64,
    horizon: u64,
    mc: &McArgs,
    method: SimMethod,
    out: &OutputArgs,
) -> CliResult {
    let c = config(urn)?;
    let mut notes = Vec::new();
    let r = match method {
        SimMethod::Direct => mc_record(c, target, horizon, mc, dp_budget()?, &mut notes)?,
        SimMethod::Definetti => definetti_record(c, mc, &mut notes)?,
    };
    emit(out, &[r], &notes)
}

fn approx_record(c: UrnConfig, method: Method, res: ApproxResult) -> OutputRecord {
    let exact = equalization_probability(c);
    let res = res.compared_to(&exact);
    let mut r = OutputRecord::new(c.black(), c.white(), method, dec(res.value));
    r.kind = Some(res.kind.as_str().to_string());
    r.reference = Some(dec_rational(exact.value()));
    r.rel_error = res.rel_error.map(dec);
    r
}

fn approx_records(c: UrnConfig, method: Method) -> CliResult<OutputRecord> {
    let res = match method {
        Method::Normal => normal_approximation(c),
        Method::Chernoff => chernoff_bound(c),
        _ => unreachable!("not an approximation"),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(approx_record(c, method, res))
}

pub fn approx(urn: &UrnArgs, method: ApproxMethod, out: &OutputArgs) -> CliResult {
    let c = config(urn)?;
    let methods: &[Method] = match method {
        ApproxMethod::Normal => &[Method::Normal],
        ApproxMethod::Chernoff => &[Method::Chernoff],
        ApproxMethod::All => &[Method::Normal, Method::Chernoff],
    };
    let records = methods
        .iter()
        .map(|&m| approx_records(c, m))
        .collect::<CliResult<Vec<_>>>()?;
    emit(out, &records, &[])
}

fn sweep_row(
    c: UrnConfig,
    methods: &[Method],
    target: i64,
    horizon: u64,
    mc: &McArgs,
    budget: u64,
) -> CliResult<(Vec<OutputRecord>, Vec<String>)> {
    let mut notes = Vec::new();
    let mut rows = Vec::with_capacity(methods.len());
    for &m in methods {
        rows.push(match m {
            Method::Exact | Method::Binomial | Method::Complement => exact_record(c, m)?,
            Method::Dp => dp_record(c, target, horizon, budget)?,
            Method::Mc => mc_record(c, target, horizon, mc, budget, &mut notes)?,
            Method::Definetti => definetti_record(c, mc, &mut notes)?,
            Method::Normal | Method::Chernoff => approx_records(c, m)?,
        });
    }
    Ok((rows, notes))
}

pub fn sweep(
    b_range: RangeArg,
    w_range: RangeArg,
    methods: &[Method],
    target: i64,
    horizon: u64,
    mc: &McArgs,
    out: &OutputArgs,
) -> CliResult {
    if methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    let budget = dp_budget()?;
    let mut notes = Vec::new();
    let mut pairs = Vec::new();
    for b in b_range.lo..=b_range.hi {
        for w in w_range.lo..=w_range.hi {
            if w < b {
                pairs.push(UrnConfig::new(b, w).expect("b, w >= 1"));
            } else {
                notes.push(format!("skipped (b={b}, w={w}): sweep rows need w < b"));
            }
        }
    }
    if pairs.is_empty() {
        return Err(CliError::Usage("no (b, w) pair in range has w < b".into()));
    }
    let rows: Vec<_> = pairs
        .par_iter()
        .map(|&c| sweep_row(c, methods, target, horizon, mc, budget))
        .collect::<CliResult<_>>()?;
    let mut records = Vec::new();
    for (r, n) in rows {
        records.extend(r);
        notes.extend(n);
    }
    emit(out, &records, &notes)
}

pub fn identity_check(max_total: u64) -> CliResult {
    let pairs: Vec<(u64, u64)> = (3..=max_total)
        .flat_map(|total| (1..total).map(move |w| (total - w, w)))
        .filter(|(b, w)| w < b)
        .collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(b, w)| {
            let c = UrnConfig::new(b, w).expect("b, w >= 1");
            let theorem = equalization_probability(c);
            let bin = equalization_probability_binomial(c).ok()?;
            let comp = equalization_probability_complement(c).ok()?;
            (theorem != bin || theorem != comp).then(|| {
                format!("(b={b}, w={w}): theorem {theorem}, binomial {bin}, complement {comp}")
            })
        })
        .collect();
    for f in &failures {
        eprintln!("mismatch {f}");
    }
    println!(
        "identity-check: {} pairs with 1 <= w < b, b + w <= {max_total}: {} failures",
        pairs.len(),
        failures.len()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} identity failures",
            failures.len()
        )))
    }
}
