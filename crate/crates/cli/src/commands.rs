use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use bubbles_core::algebra::format_rational;
use bubbles_core::bubble::{bicolored_cycle_count, chain_decomposition};
use bubbles_core::effective::{
    diagnostics_csv, diagnostics_from_chains, effective_from_chains, laguerre_reconstruct,
    maximal_terms, wishart_moment, wishart_moment_leading, wishart_moment_numeric, Balance,
};
use bubbles_core::montecarlo::estimate_expectation;
use bubbles_core::oracle::{self, dominant_contractions, per_color_dimensions, DEFAULT_N_MAX};
use bubbles_core::tree::enumerate_trees;
use bubbles_core::weingarten::{
    gram_matrix_numeric, weingarten_asymptotic, weingarten_class_values_numeric,
    ConjugacyClassTable, WeingartenConfig, WgValue,
};
use bubbles_core::{
    Bubble, ColorSplit, CornerLabeledTree, Dim, LaurentPoly, SampleSpec, WeingartenTable,
};

use crate::report::{Check, RunReport};

fn load_bubble(path: &Path) -> Result<Bubble> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Bubble::from_json(&text).with_context(|| format!("parsing bubble file {}", path.display()))
}

fn int(x: u64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn leading(p: &LaurentPoly) -> Value {
    match p.leading_term() {
        Ok((exp, c)) => json!({ "exp": exp, "coeff": format_rational(&c) }),
        Err(_) => Value::Null,
    }
}

/// Quotes a CSV field, doubling embedded quotes.
fn quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

fn poly_csv(p: &LaurentPoly) -> String {
    let mut out = String::from("exp,coeff\n");
    for (e, c) in p.terms() {
        out.push_str(&format!("{e},{}\n", format_rational(c)));
    }
    out
}

pub fn expect(path: &Path, alpha: i64, numeric_n: Option<u64>) -> Result<RunReport> {
    let b = load_bubble(path)?;
    let mut report = RunReport::new(
        "expect",
        json!({ "bubble": path, "alpha": alpha, "numeric_N": numeric_n, "d": b.d(), "n": b.n() }),
    );
    let result = oracle::expectation(&b, alpha)?;
    let (exp, count) = dominant_contractions(&b)?;
    report.output("raw_display", result.raw.to_string());
    report.output("scaled_display", result.scaled.to_string());
    report.output("expectation", &result);
    report.output(
        "dominant_contractions",
        json!({ "exp": exp, "count": count.to_string() }),
    );
    let mut bicolored = Vec::new();
    for c1 in 1..=b.d() {
        for c2 in c1 + 1..=b.d() {
            bicolored
                .push(json!({ "colors": [c1, c2], "cycles": bicolored_cycle_count(&b, c1, c2)? }));
        }
    }
    report.output("bicolored_cycles", bicolored);
    if let Some(n0) = numeric_n {
        let direct = per_color_dimensions(&b, &vec![n0; b.d()])?;
        let from_poly = result.raw.eval(&int(n0));
        report.output("numeric_value", direct.to_string());
        report.check(Check::compare(
            format!("per-color enumeration at N = {n0} equals the polynomial"),
            &direct.to_string(),
            &format_rational(&from_poly),
        ));
    }
    report.csv = Some(poly_csv(&result.scaled));
    Ok(report)
}

pub fn effective(path: &Path, split: &str) -> Result<RunReport> {
    let b = load_bubble(path)?;
    let split = ColorSplit::parse(b.d(), split)?;
    let mut report = RunReport::new(
        "effective",
        json!({ "bubble": path, "split": split.to_string(), "d": b.d(), "n": b.n() }),
    );
    let cd = chain_decomposition(&b, &split).map_err(bubbles_core::Error::from)?;
    let (r, c) = (split.row_power(), split.column_power());
    report.output(
        "chains",
        json!({
            "lengths": cd.chain_lengths(),
            "endpoint_maps": cd.endpoint_maps().iter().map(|(c, p)| json!({ "color": c, "map": p })).collect::<Vec<_>>(),
        }),
    );
    let e = effective_from_chains(&cd, &split, &WeingartenConfig::default())?;
    report.output("row_dim", format!("N^{r}"));
    report.output("expansion_display", e.to_string());
    report.output("expansion", &e);
    let recon = laguerre_reconstruct(&e, r, c)?;
    report.output("reconstruction_display", recon.to_string());
    report.output("reconstruction", &recon);
    if b.n() <= DEFAULT_N_MAX {
        let direct = oracle::gaussian_expectation(&b)?;
        report.check(Check::compare(
            "angular route equals Wick enumeration",
            &recon,
            &direct,
        ));
    }
    if cd.num_chains() <= 6 {
        let diags = diagnostics_from_chains(&cd, &split)?;
        let max = maximal_terms(&diags).first().map(|d| d.exponent);
        report.output("max_diagnostic_exponent", max);
        report.output("reconstruction_leading", leading(&recon));
        report.csv = Some(diagnostics_csv(&diags));
    }
    Ok(report)
}

fn load_trees(path: &Path) -> Result<Vec<CornerLabeledTree>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let trees = match value {
        Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    Ok(trees)
}

pub fn tree(file: Option<&Path>, enumerate: Option<&[u32]>, alpha: i64) -> Result<RunReport> {
    let (trees, inputs) = match (file, enumerate) {
        (Some(path), None) => (load_trees(path)?, json!({ "file": path, "alpha": alpha })),
        (None, Some([v, k])) => (
            enumerate_trees(*v as usize, *k).collect(),
            json!({ "enumerate": { "max_vertices": v, "max_total_label": k }, "alpha": alpha }),
        ),
        _ => bail!("give either a tree file or --enumerate V K"),
    };
    let mut report = RunReport::new("tree", inputs);
    let mut rows = Vec::new();
    let mut csv = String::from(
        "index,tree,vertex_totals,catalan_product,oracle_leading_coeff,scaled_exp,status\n",
    );
    for (i, t) in trees.iter().enumerate() {
        let b = t.to_bubble()?;
        let predicted = t.catalan_product();
        let (exp, count) = dominant_contractions(&b)?;
        let scaled_exp = exp - alpha * b.n() as i64;
        let check = Check::compare(
            format!("tree {i}: leading coefficient is the Catalan product"),
            &predicted.to_string(),
            &count.to_string(),
        );
        let totals = t.vertex_totals();
        csv.push_str(&format!(
            "{i},{},{},{predicted},{count},{scaled_exp},{}\n",
            quote(&serde_json::to_string(t)?),
            totals
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" "),
            if predicted == count { "PASS" } else { "FAIL" },
        ));
        rows.push(json!({
            "tree": t,
            "vertex_totals": totals,
            "catalan_product": predicted.to_string(),
            "oracle_leading": { "exp": scaled_exp, "coeff": count.to_string() },
        }));
        report.check(check);
    }
    report.output("count", trees.len());
    report.output("trees", rows);
    report.csv = Some(csv);
    Ok(report)
}

pub fn weingarten(n: usize, dim: &str) -> Result<RunReport> {
    let dim: Dim = dim.parse()?;
    if n == 0 {
        bail!("n must be at least 1");
    }
    let mut report = RunReport::new("weingarten", json!({ "n": n, "dim": dim }));
    let table = WeingartenTable::new(n, dim)?;
    let classes = ConjugacyClassTable::new(n);
    report.output("classes", &classes);
    report.output("table", &table);
    let display: Vec<Value> = table
        .values
        .iter()
        .map(|e| json!({ "class": e.class.to_string(), "value": e.value.to_string() }))
        .collect();
    report.output("display", display);
    let asymptotic: Vec<Value> = table
        .values
        .iter()
        .map(|e| {
            let (exp, coeff) = weingarten_asymptotic(&e.class);
            json!({ "class": e.class.to_string(), "exp": exp, "coeff": coeff.to_string() })
        })
        .collect();
    report.output("asymptotic", asymptotic);

    let mut csv = String::from("class,value,asymptotic_exp,asymptotic_coeff\n");
    for e in &table.values {
        let (exp, coeff) = weingarten_asymptotic(&e.class);
        csv.push_str(&format!(
            "{},{},{exp},{coeff}\n",
            quote(&e.class.to_string()),
            quote(&e.value.to_string())
        ));
    }
    report.csv = Some(csv);

    // numeric dimension at which to test the defining property
    let (m, values) = match dim {
        Dim::Numeric(m) => (
            m,
            table
                .values
                .iter()
                .map(|e| e.value.as_numeric().unwrap().clone())
                .collect(),
        ),
        Dim::Power(k) => {
            let base = (n as u64).max(2);
            let m = base.pow(k);
            let at: Vec<BigRational> = table
                .values
                .iter()
                .map(|e| match &e.value {
                    WgValue::Symbolic(r) => r.eval(&int(base)),
                    WgValue::Numeric(_) => unreachable!("symbolic table"),
                })
                .collect::<bubbles_core::Result<_>>()?;
            let independent = weingarten_class_values_numeric(n, m, &WeingartenConfig::default())?;
            let fmt = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
            report.check(Check::compare(
                format!("symbolic table at N = {base} equals an independent solve at dim {m}"),
                &fmt(&at),
                &fmt(&independent),
            ));
            (m, at)
        }
    };
    let gram = gram_matrix_numeric(n, m);
    let id = classes.identity_index();
    let lhs: Vec<String> = gram
        .iter()
        .map(|row| {
            format_rational(
                &row.iter()
                    .zip(&values)
                    .map(|(g, w)| g * w)
                    .sum::<BigRational>(),
            )
        })
        .collect();
    let rhs: Vec<String> = (0..classes.len())
        .map(|a| if a == id { "1" } else { "0" }.to_string())
        .collect();
    report.check(Check::compare(
        format!("Gram x Wg = identity at dim {m}"),
        &lhs,
        &rhs,
    ));
    Ok(report)
}

pub fn wishart(lengths: &str, rows: &str, cols: &str) -> Result<RunReport> {
    let lengths: Vec<usize> = lengths
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .with_context(|| format!("bad length {t:?}"))
        })
        .collect::<Result<_>>()?;
    let (rows, cols): (Dim, Dim) = (rows.parse()?, cols.parse()?);
    let mut report = RunReport::new(
        "wishart",
        json!({ "lengths": lengths, "rows": rows, "cols": cols }),
    );
    match (rows, cols) {
        (Dim::Power(a), Dim::Power(b)) => {
            let p = wishart_moment(&lengths, a, b)?;
            report.output("moment_display", p.to_string());
            report.output("moment", &p);
            report.output("leading", leading(&p));
            report.csv = Some(poly_csv(&p));
            if let [l] = lengths[..] {
                let balance = if a == b {
                    Balance::Square
                } else {
                    Balance::Unbalanced
                };
                let expected = wishart_moment_leading(l as u32, balance);
                let (_, c) = p.leading_term()?;
                report.check(Check::compare(
                    "leading coefficient matches the large-N law",
                    &format_rational(&c),
                    &expected.to_string(),
                ));
            }
        }
        (Dim::Numeric(a), Dim::Numeric(b)) => {
            let v = wishart_moment_numeric(&lengths, a, b)?;
            report.output("moment", v.to_string());
            report.csv = Some(format!("moment\n{v}\n"));
        }
        _ => bail!("rows and cols must both be symbolic or both numeric"),
    }
    Ok(report)
}

pub fn mc(
    path: &Path,
    numeric_n: usize,
    samples: u64,
    seed: u64,
    variance: f64,
) -> Result<RunReport> {
    let b = load_bubble(path)?;
    let spec = SampleSpec {
        n: numeric_n,
        d: b.d(),
        variance,
        samples,
        seed,
    };
    let mut report = RunReport::new("mc", json!({ "bubble": path, "spec": &spec }));
    let est = estimate_expectation(&b, &spec)?;
    report.output("estimate", &est);
    report.csv = Some(format!(
        "mean,stderr,samples,seed\n{},{},{},{}\n",
        est.mean, est.stderr, est.samples, est.seed
    ));
    if b.n() <= DEFAULT_N_MAX {
        let exact = per_color_dimensions(&b, &vec![numeric_n as u64; b.d()])?;
        let exact_f = exact.to_string().parse::<f64>()? * variance.powi(b.n() as i32);
        report.output("exact", exact_f);
        let z = (est.mean - exact_f).abs() / est.stderr;
        report.check(Check::new(
            "estimate within 5 standard errors of the exact value",
            z < 5.0,
            &json!({ "mean": est.mean, "stderr": est.stderr }),
            &exact_f,
        ));
    }
    Ok(report)
}
