//! Pipeline stages. Each writes its artifacts under the output directory,
//! prints one status line per check and returns whether every check passed.

use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use laminatron::curves::Curve;
use laminatron::estimates::{
    admissible_a, measure_big_b, random_twist_samples, twist_inequality, verify_sandwich, EstimateLedger,
};
use laminatron::exactnum::{growth_certificate, rat};
use laminatron::family::{generate, GeneratedSequence, IntersectionTable, DIGIT_BUDGET};
use laminatron::limitset::{case_two_error_ratios, domination_report, trace_limit_cycle, Mode, TraceOptions};
use laminatron::measures::{
    cauchy_report, default_probes, limit_simplex_basis, singularity_diagnostics, vectors_csv, ProbeTable,
};
use laminatron::timeline::{check_ordering, g1_product_report, profile, TimelineModel};
use laminatron::verify::{check_p, check_p4, default_twist_probes, qg_report, subsurface_coefficient_report, P4Status};

use crate::config::RunConfig;

/// Windows examined by the boundary check when it applies.
const P4_BUDGET: usize = 4;

/// Tolerance on the Cauchy tail of the limit basis.
const BASIS_TAIL: i64 = 1 << 20;

pub struct Context {
    cfg: RunConfig,
    out: PathBuf,
    seq: Option<GeneratedSequence>,
    table: Option<IntersectionTable>,
    ledger: Option<EstimateLedger>,
}

fn status(name: &str, ok: bool, detail: impl AsRef<str>) -> bool {
    println!("{:<28} {}  {}", name, if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    ok
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        let out = PathBuf::from(&cfg.out);
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Context { cfg, out, seq: None, table: None, ledger: None })
    }

    fn write(&self, name: &str, body: &str) -> Result<()> {
        let p = self.out.join(name);
        std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    }

    fn write_json<T: Serialize>(&self, name: &str, v: &T) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(v)? + "\n"))
    }

    fn seq(&mut self) -> Result<&GeneratedSequence> {
        if self.seq.is_none() {
            let spec = self.cfg.family_spec()?;
            let mut seq = generate(&spec, self.cfg.max_index, DIGIT_BUDGET)?;
            seq.spec.eseq = self.cfg.inject(seq.spec.eseq)?;
            self.seq = Some(seq);
        }
        Ok(self.seq.as_ref().unwrap())
    }

    fn table(&mut self) -> Result<&IntersectionTable> {
        if self.table.is_none() {
            let seq = self.seq()?;
            let t = seq.intersection_table(seq.len())?;
            self.table = Some(t);
        }
        Ok(self.table.as_ref().unwrap())
    }

    fn big_b(&mut self) -> Result<(BigInt, serde_json::Value)> {
        if let Some(b) = &self.cfg.big_b {
            let v: BigInt = b.parse().with_context(|| format!("bad arc constant {b:?}"))?;
            return Ok((v.clone(), json!({ "value": v.to_string(), "source": "configured" })));
        }
        let bm = measure_big_b(self.seq()?)?;
        Ok((BigInt::from(bm.value), json!({ "source": "measured", "measure": bm })))
    }

    fn ledger(&mut self) -> Result<&EstimateLedger> {
        if self.ledger.is_none() {
            let (b, _) = self.big_b()?;
            let seq = self.seq()?;
            let l = EstimateLedger::for_sequence(seq, b, seq.len())?;
            self.ledger = Some(l);
        }
        Ok(self.ledger.as_ref().unwrap())
    }

    fn probes(&mut self) -> Result<ProbeTable> {
        self.seq()?;
        let seq = self.seq.as_ref().unwrap();
        let all = default_probes(seq.surface());
        let chosen: Vec<(String, Curve)> = match &self.cfg.probes {
            None => all,
            Some(names) => names
                .iter()
                .map(|n| {
                    let key = format!("[{}]", n.trim().replace('-', ","));
                    all.iter()
                        .find(|(k, _)| *k == key)
                        .cloned()
                        .with_context(|| format!("unknown probe {n:?}; use a-b for a round curve"))
                })
                .collect::<Result<_>>()?,
        };
        if chosen.is_empty() {
            bail!("empty probe set");
        }
        Ok(ProbeTable::compute(seq, &chosen, seq.len())?)
    }

    pub fn generate(&mut self) -> Result<bool> {
        let seq = self.seq()?.clone();
        self.write_json("sequence.json", &seq)?;
        let csv = self.table()?.to_csv();
        self.write("intersections.csv", &csv)?;
        Ok(status("generate", true, format!("{} curves", seq.len())))
    }

    pub fn verify(&mut self) -> Result<bool> {
        let seq = self.seq()?.clone();
        let p = check_p(&seq, seq.len())?;
        let growth = growth_certificate(&seq.spec.eseq);
        let p4 = check_p4(&seq, P4_BUDGET)?;
        let qg = qg_report(seq.m(), seq.len());
        let coeffs = subsurface_coefficient_report(&seq, &default_twist_probes(&seq))?;
        let samples = random_twist_samples(seq.surface(), self.cfg.twist_samples, 12, 50, self.cfg.seed)?;
        let mut twist_failures = Vec::new();
        for (j, s) in samples.iter().enumerate() {
            let r = twist_inequality(&s.beta, &s.delta, &s.delta_p, &BigInt::from(s.e))?;
            if !r.holds() {
                twist_failures.push(format!("sample {j}: {} > {}", r.deviation, r.allowance));
            }
        }
        self.write("verify.txt", &p.table())?;
        self.write_json(
            "verify.json",
            &json!({
                "local_conditions": p,
                "growth": growth,
                "boundary_condition": p4,
                "distance_lower_bounds": qg,
                "annular_coefficients": coeffs,
                "twist_formula_sample": { "seed": self.cfg.seed, "count": samples.len(), "failures": twist_failures },
            }),
        )?;
        let p4_ok = !matches!(p4, P4Status::Checked { ok: false, .. });
        let mut ok = status("local conditions", p.verdict, format!("{} curves, {} failures", p.upto, p.failures.len()));
        ok &= status("twist power growth", growth.a_violation.is_none(), format!("first violation after index {:?}", growth.a_violation));
        ok &= status("boundary condition", p4_ok, format!("{p4:?}"));
        ok &= status(
            "twist formula sample",
            twist_failures.is_empty(),
            format!("{} triples, seed {}", samples.len(), self.cfg.seed),
        );
        Ok(ok)
    }

    pub fn estimates(&mut self) -> Result<bool> {
        let (b, b_info) = self.big_b()?;
        let spec = self.seq()?.spec.clone();
        let adm = admissible_a(spec.m, &b, &spec.b1, &spec.b2)?;
        let table = self.table()?.clone();
        let ledger = self.ledger()?.clone();
        let sw = verify_sandwich(&table, &ledger)?;
        let inv = ledger.invariant_failures();
        self.write("sandwich.csv", &sw.to_csv())?;
        self.write_json(
            "estimates.json",
            &json!({
                "arc_constant": b_info,
                "admissible_a": adm,
                "ledger": ledger.to_json(),
                "sandwich": sw,
                "invariant_failures": inv,
            }),
        )?;
        let mut ok = status("constant ledger", inv.is_empty(), format!("admissible a = {}", adm.a));
        ok &= status(
            "intersection sandwich",
            sw.pass,
            format!("{} pairs, base admissible: {}", sw.rows.len(), ledger.admissible),
        );
        Ok(ok)
    }

    pub fn measures(&mut self) -> Result<bool> {
        let pt = self.probes()?;
        let table = self.table()?.clone();
        let ledger = self.ledger()?.clone();
        let xi = self.seq()?.surface().xi();
        let cauchy = cauchy_report(&pt, &ledger, self.cfg.slope_tolerance);
        let sing = singularity_diagnostics(&table, &ledger, self.cfg.slope_tolerance, self.cfg.band);
        let basis = match limit_simplex_basis(&pt, &table, &ledger, xi, &rat(BASIS_TAIL, 1)) {
            Ok(b) => json!({ "basis": b }),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
        self.write("vectors.csv", &vectors_csv(&pt, &ledger))?;
        self.write("cauchy.csv", &cauchy.to_csv())?;
        self.write_json(
            "measures.json",
            &json!({ "probes": pt, "cauchy": cauchy, "singularity": sing, "limit_basis": basis }),
        )?;
        let ok = status("cauchy bounds", cauchy.bounds_pass, format!("{} rows", cauchy.rows.len()));
        status("cauchy slopes", cauchy.slopes_pass, "regression, informational");
        let sing_ok = sing.iter().all(|d| d.pass);
        status("singularity ratios", sing_ok, format!("{} pairs, informational", sing.len()));
        Ok(ok)
    }

    pub fn timeline(&mut self, times: Option<&[f64]>) -> Result<bool> {
        let model = self.cfg.timeline()?;
        let ord = check_ordering(&model);
        let products = g1_product_report(&model);
        self.write("timeline.csv", &model.to_csv())?;
        self.write_json("ordering.json", &json!({ "ordering": ord, "products": products }))?;
        if let Some(ts) = times {
            self.write("profile.csv", &profile_csv(&model, ts)?)?;
        }
        let mut ok = status(
            "interval ordering",
            ord.pass,
            format!(
                "threshold {:?}, shift error {:.3e}, skipped {}",
                ord.threshold,
                ord.shift_error,
                ord.skipped.len()
            ),
        );
        if model.g1 {
            ok &= status("growth products", products.iter().all(|p| p.increasing), format!("{} pairs", products.len()));
        }
        Ok(ok)
    }

    pub fn trace(&mut self) -> Result<bool> {
        let model = self.cfg.timeline()?;
        let m = model.m;
        let synthetic = self.cfg.synthetic || !self.cfg.has_curves();
        let pt = if synthetic { None } else { Some(self.probes()?) };
        let avail = pt.as_ref().map_or(model.len(), |p| p.len().min(model.len()));
        let first = self.cfg.schedule.first_window.unwrap_or(m);
        if avail < first + m + 2 {
            bail!("need at least {} indices to trace from window {first}", first + m + 2);
        }
        let windows = first..avail - m;
        let mode = pt.as_ref().map_or(Mode::Synthetic, Mode::Exact);
        let s = &self.cfg.schedule;
        let opts = TraceOptions { samples_per_window: s.samples_per_window, w: s.w, max_residual: s.max_residual };
        let tr = trace_limit_cycle(&model, mode, windows.clone(), &opts)?;
        let dom = domination_report(&model, windows.clone())?;
        let case_two = case_two_error_ratios(&model, windows.clone(), s.case_two_fraction);
        let last = windows.end - 1;
        let cyclic = tr.edges_cyclic();
        let cyclic_from = tr.cyclic_from();
        self.write("trace.csv", &tr.to_csv())?;
        self.write_json(
            "trace.json",
            &json!({
                "mode": if synthetic { "synthetic" } else { "exact" },
                "edges": tr.edges,
                "cyclic": cyclic,
                "cyclic_from": cyclic_from,
                "basis": tr.basis,
                "last_window": last,
                "endpoint_error": tr.endpoint_error(last),
                "min_coordinate": tr.min_coordinate(last),
                "domination": dom,
                "case_two_error": case_two,
            }),
        )?;
        Ok(status(
            "limit cycle",
            cyclic_from.is_some(),
            format!(
                "{} windows, cyclic from {:?}, last endpoint error {:.3e}, last min coordinate {:.3e}",
                tr.edges.len(),
                cyclic_from,
                tr.endpoint_error(last).unwrap_or(f64::NAN),
                tr.min_coordinate(last).unwrap_or(f64::NAN)
            ),
        ))
    }

    pub fn all(&mut self, times: Option<&[f64]>) -> Result<bool> {
        let mut ok = true;
        if self.cfg.has_curves() {
            ok &= self.generate()?;
            ok &= self.verify()?;
            ok &= self.estimates()?;
            ok &= self.measures()?;
        }
        ok &= self.timeline(times)?;
        ok &= self.trace()?;
        Ok(ok)
    }
}

fn profile_csv(model: &TimelineModel, times: &[f64]) -> Result<String> {
    let mut s = String::from("t,k,width,length,twisted,ln_twist,ln_modulus\n");
    for &t in times {
        for k in 0..model.len() {
            let p = profile(model, t, k)?;
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t, k, p.width, p.length, p.twisted, p.ln_twist, p.ln_modulus
            ));
        }
    }
    Ok(s)
}
