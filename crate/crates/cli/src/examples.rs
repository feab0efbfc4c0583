//! Built-in regression table: a fixed catalogue of singularities with every
//! invariant hard-coded, rerun exactly on demand. The exit code is the
//! conjunction of all row verdicts.

use crate::render::extnat_text;
use crate::{CliError, Config};
use milnor_core::branch::BranchData;
use milnor_core::expr::parse_poly;
use milnor_core::fibration::{fiber_singularity_check, smoothing_verdict, Verdict};
use milnor_core::field::make_field;
use milnor_core::invariants::{
    euler_relation, in_jacobian_closure_numeric, is_mu_stable, milnor, mu_unit_multiple, tilde_mu,
    tjurina, tjurina_ideal, StabilityVerdict, UnstableWitness,
};
use milnor_core::localstd::{LocalIdeal, Membership};
use milnor_core::series::{resultant_y, Monomial, YPolynomial};
use milnor_core::{Error, ExtNat, FieldCtx, TruncSeries};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde_json::json;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn chk(name: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail,
    }
}

fn eq_ext(name: &str, got: ExtNat, want: ExtNat) -> Check {
    chk(
        name,
        got == want,
        format!("{name} = {} (want {})", extnat_text(&got), extnat_text(&want)),
    )
}

fn eq_u64(name: &str, got: u64, want: u64) -> Check {
    chk(name, got == want, format!("{name} = {got} (want {want})"))
}

fn truth(name: &str, got: bool) -> Check {
    chk(name, got, format!("{name} = {got}"))
}

fn fld(p: u64, seed: u64) -> Result<FieldCtx, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_field(p, 1, &mut rng)
}

fn pp(src: &str, ctx: &FieldCtx) -> Result<TruncSeries, Error> {
    parse_poly(src, ctx, 2)
}

type Row = (&'static str, &'static str, fn(&Config) -> Result<Vec<Check>, Error>);

fn ex_1_1(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("Y^3 + X^4", &ctx)?;
    Ok(vec![
        eq_ext("mu", milnor(&f), ExtNat::Infinite),
        eq_ext("tau", tjurina(&f), ExtNat::Finite(9)),
        eq_ext(
            "mu((1+Y)f)",
            mu_unit_multiple(&f, &pp("1 + Y", &ctx)?)?,
            ExtNat::Finite(9),
        ),
    ])
}

fn ex_1_3(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("X^2*Y + Y^2*X", &ctx)?;
    let mut rng = cfg.rng();
    let rep = smoothing_verdict(&f, 32, &mut rng)?;
    let mut checks = vec![
        eq_ext("mu", rep.mu, ExtNat::Infinite),
        truth("not_smoothing", rep.verdict == Verdict::NotSmoothing),
    ];
    // the witness must be an associate of Y - X
    let ok = match &rep.witness_factor {
        Some(w) => {
            let c = w.coeff(&Monomial(vec![0, 1]));
            !c.is_zero() && w.sub(&pp("Y - X", &ctx)?.scale(&c)).is_zero()
        }
        None => false,
    };
    checks.push(chk(
        "witness",
        ok,
        format!(
            "common factor of partials = {} (want associate of Y - X)",
            rep.witness_factor
                .as_ref()
                .map(|w| w.to_string())
                .unwrap_or_else(|| "none".to_string())
        ),
    ));
    Ok(checks)
}

fn ex_2_6(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("X^3 + X^5 + Y^5", &ctx)?;
    let g = pp("(1 + X)*(X^3 + X^5 + Y^5)", &ctx)?;
    let mut rng = cfg.rng();
    // I(g_X, g_Y) as the X-order of Res_Y of the partials
    let gx = YPolynomial::from_series(&g.partial(0), 64);
    let gy = YPolynomial::from_series(&g.partial(1), 64);
    let res = resultant_y(&gx, &gy)?;
    Ok(vec![
        eq_ext("mu", milnor(&f), ExtNat::Finite(16)),
        eq_ext("tau", tjurina(&f), ExtNat::Finite(12)),
        eq_ext(
            "mu((1+X)f)",
            mu_unit_multiple(&f, &pp("1 + X", &ctx)?)?,
            ExtNat::Finite(12),
        ),
        truth(
            "f_not_in_closure",
            !in_jacobian_closure_numeric(&f, cfg.trials, &mut rng)?,
        ),
        eq_ext("I(g_X,g_Y)", res.ord_extnat(), ExtNat::Finite(12)),
    ])
}

fn ex_3_3(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("X^2*Y + Y^2*X", &ctx)?;
    let fx = f.partial(0);
    let fy = f.partial(1);
    let lhs = f.mul(&fx.add(&fy));
    let rhs = pp("X + Y", &ctx)?.mul(&fx).mul(&fy);
    let m = LocalIdeal::maximal_ideal(&ctx, 2);
    let t = tjurina_ideal(&f);
    let mt2 = m.product(&t.power(2));
    // in characteristic 3 the two products agree up to sign
    let identity = lhs.sub(&rhs).is_zero() || lhs.add(&rhs).is_zero();
    Ok(vec![
        truth("identity", identity),
        truth("membership", mt2.membership(&lhs) == Membership::In),
    ])
}

fn ex_3_12(cfg: &Config) -> Result<Vec<Check>, Error> {
    let c11 = fld(11, cfg.seed)?;
    let f11 = pp("Y^3 - X^11", &c11)?;
    let mut rng = cfg.rng();
    let v11 = is_mu_stable(&f11, cfg.lmax, cfg.trials, &mut rng)?;
    let c5 = fld(5, cfg.seed)?;
    let f5 = pp("Y^3 - X^11", &c5)?;
    let mut rng5 = cfg.rng();
    let v5 = is_mu_stable(&f5, cfg.lmax, cfg.trials, &mut rng5)?;
    Ok(vec![
        truth(
            "p11_unstable",
            matches!(v11, StabilityVerdict::Unstable(_)),
        ),
        eq_ext("p11_mu", milnor(&f11), ExtNat::Infinite),
        eq_ext(
            "p11_mu((1+X)f)",
            mu_unit_multiple(&f11, &pp("1 + X", &c11)?)?,
            ExtNat::Finite(22),
        ),
        eq_u64(
            "p5_qh_degree",
            euler_relation(&f5).map(|e| e.degree).unwrap_or(0),
            33,
        ),
        truth("p5_stable_1", v5 == StabilityVerdict::Stable(1)),
    ])
}

fn ex_3_14(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(2, cfg.seed)?;
    let f = pp("Y^3 + X^5", &ctx)?;
    let mut rng = cfg.rng();
    let v = is_mu_stable(&f, cfg.lmax, cfg.trials, &mut rng)?;
    let st = f.blowup_strict_transform(0);
    let mut rng2 = cfg.rng();
    let vst = is_mu_stable(&st, cfg.lmax, cfg.trials, &mut rng2)?;
    Ok(vec![
        truth("stable_1", v == StabilityVerdict::Stable(1)),
        truth("strict_transform", st.sub(&pp("Y^3 + X^2", &ctx)?).is_zero()),
        truth(
            "transform_unstable",
            vst == StabilityVerdict::Unstable(UnstableWitness::InitialFormObstruction { d: 2 }),
        ),
    ])
}

fn ex_4_1(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("X^3 + Y^4", &ctx)?;
    let mut rng = cfg.rng();
    let rep = smoothing_verdict(&f, 32, &mut rng)?;
    let one = ctx.one();
    let zero = ctx.zero();
    Ok(vec![
        truth("not_smoothing", rep.verdict == Verdict::NotSmoothing),
        truth(
            "fiber_singularity_(1,0)_s1",
            fiber_singularity_check(&f, &[one.clone(), zero], &one),
        ),
        truth(
            "samples_dominate",
            {
                let mut svals: Vec<&milnor_core::FieldElem> = Vec::new();
                for sp in &rep.samples {
                    if !svals.iter().any(|x| **x == sp.s) {
                        svals.push(&sp.s);
                    }
                }
                svals.len() >= 2
            },
        ),
    ])
}

fn ex_5_1(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(3, cfg.seed)?;
    let f = pp("Y^3 - X^11", &ctx)?;
    let h = pp("Y^3 - X^11 + X^8*Y", &ctx)?;
    let bf = BranchData::analyze(&f, cfg.tprec)?;
    let bh = BranchData::analyze(&h, cfg.tprec)?;
    let mut rng = cfg.rng();
    let tf = tilde_mu(&f, cfg.trials, &mut rng)?;
    let mut rng2 = cfg.rng();
    let th = tilde_mu(&h, cfg.trials, &mut rng2)?;
    Ok(vec![
        truth("S(f)=<3,11>", bf.semigroup().generators() == [3, 11]),
        truth("S(h)=<3,11>", bh.semigroup().generators() == [3, 11]),
        eq_ext("tilde_mu(f)", tf, ExtNat::Finite(30)),
        eq_ext("tilde_mu(h)", th, ExtNat::Finite(24)),
        eq_ext("tau(h)", tjurina(&h), ExtNat::Finite(22)),
        eq_ext("mu(h)", milnor(&h), ExtNat::Infinite),
    ])
}

fn ex_5_3(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(5, cfg.seed)?;
    let f = pp("(Y^2 - X^3)^2 - Y*X^11", &ctx)?;
    let h = pp("(Y^2 - X^3 + X^2*Y)^2 - Y*X^11", &ctx)?;
    let bf = BranchData::analyze(&f, cfg.tprec)?;
    let mut rng = cfg.rng();
    let tf = tilde_mu(&f, cfg.trials, &mut rng)?;
    let mut rng2 = cfg.rng();
    let th = tilde_mu(&h, cfg.trials, &mut rng2)?;
    let mut rng3 = cfg.rng();
    let vh = is_mu_stable(&h, cfg.lmax.max(3), cfg.trials, &mut rng3)?;
    let mut rng4 = cfg.rng();
    let vf = is_mu_stable(&f, cfg.lmax, cfg.trials, &mut rng4)?;
    Ok(vec![
        truth("S(f)=<4,6,25>", bf.semigroup().generators() == [4, 6, 25]),
        eq_u64("conductor", bf.conductor(), 28),
        eq_ext("mu(f)", milnor(&f), ExtNat::Finite(41)),
        eq_ext("tilde_mu(f)", tf, ExtNat::Finite(30)),
        truth("f_unstable", matches!(vf, StabilityVerdict::Unstable(_))),
        eq_ext("mu(h)", milnor(&h), ExtNat::Finite(29)),
        eq_ext("tilde_mu(h)", th, ExtNat::Finite(29)),
        truth(
            "h_stable_le_3",
            matches!(vh, StabilityVerdict::Stable(l) if l <= 3),
        ),
    ])
}

fn ex_5_9(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(5, cfg.seed)?;
    let f = pp("Y^3 - X^10", &ctx)?;
    let bd = BranchData::analyze(&f, cfg.tprec)?;
    Ok(vec![
        eq_ext("mu", milnor(&f), ExtNat::Infinite),
        eq_u64("conductor", bd.conductor(), 18),
    ])
}

fn ex_5_10(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(5, cfg.seed)?;
    let f = pp("(Y^2 - X^3 + X^2*Y)^2 - X^11*Y", &ctx)?;
    let t = tjurina_ideal(&f);
    let m = LocalIdeal::maximal_ideal(&ctx, 2);
    // truncate so the Nakayama membership test stays exact
    let kt = t.mprimary_exponent()?;
    let d = (kt * 3 + 2) as u32;
    let t3 = LocalIdeal::new(
        &ctx,
        2,
        t.gens().iter().map(|g| g.truncate_to(d)).collect(),
    );
    let target = m.product(&t3.power(3));
    let member = target.membership(&f.pow(3).truncate_to(d));
    let bd = BranchData::analyze(&f, cfg.tprec)?;
    Ok(vec![
        truth("f3_in_mT3", member == Membership::In),
        truth("not_tame", !bd.semigroup().is_tame(5)),
    ])
}

fn ex_5_11(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(13, cfg.seed)?;
    // the monomial must have value 2 * 301 = 18*32 + 26 for the branch to
    // carry the semigroup <18, 26, 301>
    let f = pp("(Y^9 - X^13)^2 - X^32*Y", &ctx)?;
    let bd = BranchData::analyze(&f, Some(cfg.tprec.unwrap_or(640)))?;
    let mu = milnor(&f);
    let ify = bd.intersection(&f.partial(1));
    let mu_val = mu.finite().unwrap_or(0);
    let bound = mu_val + bd.multiplicity() - 1;
    Ok(vec![
        truth(
            "S(f)=<18,26,301>",
            bd.semigroup().generators() == [18, 26, 301],
        ),
        eq_u64("conductor", bd.conductor(), 492),
        eq_ext("mu", mu, ExtNat::Finite(559)),
        eq_ext("I(f,f_Y)", ify, ExtNat::Finite(509)),
        truth("deligne_mu_ge_c", mu_val >= bd.conductor()),
        chk(
            "gap_inequality",
            509 < bound && bound == 576,
            format!("509 < {bound} = mu(f)+mult(f)-1"),
        ),
    ])
}

fn rows() -> Vec<Row> {
    vec![
        ("1.1", "Y^3+X^4, p=3: mu infinite, tau and mu(uf) finite", ex_1_1),
        ("1.3", "X^2Y+Y^2X, p=3: partials share the factor Y-X", ex_1_3),
        ("2.6", "X^3+X^5+Y^5, p=3: mu > tilde_mu with resultant cross-check", ex_2_6),
        ("3.3", "X^2Y+Y^2X, p=3: f(f_X+f_Y) lies in mT(f)^2", ex_3_3),
        ("3.12", "Y^3-X^11: unstable at p=11, stable at p=5", ex_3_12),
        ("3.14", "Y^3+X^5, p=2: stability lost under blow-up", ex_3_14),
        ("4.1", "X^3+Y^4, p=3: no local smoothing, singular fibers", ex_4_1),
        ("5.1+5.2", "Y^3-X^11 and Y^3-X^11+X^8Y, p=3: equisingular, different tilde_mu", ex_5_1),
        ("5.3", "<4,6,25> class, p=5: mu-stability differs within the class", ex_5_3),
        ("5.9", "Y^3-X^10, p=5: mu infinite, conductor 18", ex_5_9),
        ("5.10", "(Y^2-X^3+X^2Y)^2-X^11Y, p=5: stable but not tame", ex_5_10),
        ("5.11", "(Y^9-X^13)^2-X^32Y, p=13: mu=559 above the conductor", ex_5_11),
    ]
}

fn self_test_row(cfg: &Config) -> Result<Vec<Check>, Error> {
    let ctx = fld(0, cfg.seed)?;
    let f = pp("X^2 + Y^3", &ctx)?;
    // deliberately wrong expectation, to exercise the FAIL path
    Ok(vec![eq_ext("tau", tjurina(&f), ExtNat::Finite(3))])
}

pub fn cmd_examples(
    cfg: &Config,
    only: Option<&str>,
    self_test_fail: bool,
) -> Result<(), CliError> {
    let mut table: Vec<(String, String, Vec<Check>, Option<String>)> = Vec::new();
    for (id, title, run) in rows() {
        if let Some(filter) = only {
            if !id.contains(filter) {
                continue;
            }
        }
        match run(cfg) {
            Ok(checks) => table.push((id.to_string(), title.to_string(), checks, None)),
            Err(e) => table.push((id.to_string(), title.to_string(), Vec::new(), Some(e.to_string()))),
        }
    }
    if self_test_fail {
        match self_test_row(cfg) {
            Ok(checks) => table.push((
                "self-test".to_string(),
                "deliberately wrong expectation".to_string(),
                checks,
                None,
            )),
            Err(e) => table.push((
                "self-test".to_string(),
                "deliberately wrong expectation".to_string(),
                Vec::new(),
                Some(e.to_string()),
            )),
        }
    }
    let all_pass = table
        .iter()
        .all(|(_, _, checks, err)| err.is_none() && checks.iter().all(|c| c.pass));
    if cfg.json {
        let rows_json: Vec<serde_json::Value> = table
            .iter()
            .map(|(id, title, checks, err)| {
                json!({
                    "id": id,
                    "title": title,
                    "pass": err.is_none() && checks.iter().all(|c| c.pass),
                    "error": err,
                    "checks": checks.iter().map(|c| json!({
                        "name": c.name,
                        "pass": c.pass,
                        "detail": c.detail,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = json!({
            "schema_version": 1,
            "config": cfg.json_value(),
            "input": { "table": "examples" },
            "results": { "rows": rows_json, "all_pass": all_pass },
        });
        println!("{doc}");
    } else {
        for (id, title, checks, err) in &table {
            let (status, detail) = match err {
                Some(e) => ("FAIL", format!("error: {e}")),
                None => {
                    if checks.iter().all(|c| c.pass) {
                        (
                            "PASS",
                            checks
                                .iter()
                                .map(|c| c.detail.as_str())
                                .collect::<Vec<_>>()
                                .join("; "),
                        )
                    } else {
                        (
                            "FAIL",
                            checks
                                .iter()
                                .filter(|c| !c.pass)
                                .map(|c| c.detail.as_str())
                                .collect::<Vec<_>>()
                                .join("; "),
                        )
                    }
                }
            };
            println!("{id:<9} {status}  {title}");
            println!("{:<9}       {detail}", "");
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::ExamplesFailed)
    }
}
