//! The acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see the lines for passing
//! criteria as well).

use milnor_core::branch::{
    branch_tower, construct_q, delgado_check, intersection_via_resultant, milnor_spanning_family,
    reduce_mod_jacobian, BranchData, QBuilder,
};
use milnor_core::expr::parse_poly;
use milnor_core::fibration::{fiber_singularity_check, smoothing_verdict, Verdict};
use milnor_core::field::make_field;
use milnor_core::invariants::{
    euler_relation, in_jacobian_closure_numeric, is_mu_stable, jacobian_ideal, milnor,
    mu_unit_multiple, tilde_mu, tjurina, tjurina_ideal, StabilityVerdict, UnstableWitness,
};
use milnor_core::localstd::{LocalIdeal, Membership};
use milnor_core::numsgp::NumericalSemigroup;
use milnor_core::series::{resultant_y, Monomial, Prec, YPolynomial};
use milnor_core::{ExtNat, FieldCtx, TruncSeries};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(42)
}

fn field(p: u64) -> FieldCtx {
    make_field(p, 1, &mut rng()).unwrap()
}

fn poly(src: &str, ctx: &FieldCtx) -> TruncSeries {
    parse_poly(src, ctx, 2).unwrap()
}

fn report(id: &str, desc: &str, checks: &[(&str, bool)]) {
    let pass = checks.iter().all(|(_, ok)| *ok);
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {id}: {desc}");
    for (name, ok) in checks {
        if !ok {
            println!("        failed: {name}");
        }
    }
    assert!(pass, "criterion {id} failed");
}

#[test]
fn criterion_01_infinite_milnor_finite_tjurina() {
    let ctx = field(3);
    let f = poly("Y^3 + X^4", &ctx);
    report(
        "01",
        "Y^3+X^4, p=3: mu infinite, tau = mu(uf) = 9",
        &[
            ("mu = inf", milnor(&f) == ExtNat::Infinite),
            ("tau = 9", tjurina(&f) == ExtNat::Finite(9)),
            (
                "mu((1+Y)f) = 9",
                mu_unit_multiple(&f, &poly("1 + Y", &ctx)).unwrap() == ExtNat::Finite(9),
            ),
        ],
    );
}

#[test]
fn criterion_02_fibration_witness_common_factor() {
    let ctx = field(3);
    let f = poly("X^2*Y + Y^2*X", &ctx);
    let rep = smoothing_verdict(&f, 32, &mut rng()).unwrap();
    let witness_ok = match &rep.witness_factor {
        Some(w) => {
            let c = w.coeff(&Monomial(vec![0, 1]));
            !c.is_zero() && w.sub(&poly("Y - X", &ctx).scale(&c)).is_zero()
        }
        None => false,
    };
    report(
        "02",
        "X^2Y+Y^2X, p=3: mu infinite, partials share an associate of Y-X",
        &[
            ("mu = inf", rep.mu == ExtNat::Infinite),
            ("witness factor ~ Y - X", witness_ok),
        ],
    );
}

#[test]
fn criterion_03_mu_drop_with_resultant_crosscheck() {
    let ctx = field(3);
    let f = poly("X^3 + X^5 + Y^5", &ctx);
    let g = poly("(1 + X)*(X^3 + X^5 + Y^5)", &ctx);
    let gx = YPolynomial::from_series(&g.partial(0), 64);
    let gy = YPolynomial::from_series(&g.partial(1), 64);
    let res = resultant_y(&gx, &gy).unwrap();
    report(
        "03",
        "X^3+X^5+Y^5, p=3: mu = 16 > 12 = mu((1+X)f) = I(g_X,g_Y)",
        &[
            ("mu = 16", milnor(&f) == ExtNat::Finite(16)),
            ("tau = 12", tjurina(&f) == ExtNat::Finite(12)),
            (
                "mu((1+X)f) = 12",
                mu_unit_multiple(&f, &poly("1 + X", &ctx)).unwrap() == ExtNat::Finite(12),
            ),
            (
                "f not in closure",
                !in_jacobian_closure_numeric(&f, 6, &mut rng()).unwrap(),
            ),
            (
                "ord_X Res_Y(g_X, g_Y) = 12",
                res.ord_extnat() == ExtNat::Finite(12),
            ),
        ],
    );
}

#[test]
fn criterion_04_jacobian_identity_and_membership() {
    let ctx = field(3);
    let f = poly("X^2*Y + Y^2*X", &ctx);
    let fx = f.partial(0);
    let fy = f.partial(1);
    let lhs = f.mul(&fx.add(&fy));
    let rhs = poly("X + Y", &ctx).mul(&fx).mul(&fy);
    let mt2 = LocalIdeal::maximal_ideal(&ctx, 2).product(&tjurina_ideal(&f).power(2));
    report(
        "04",
        "X^2Y+Y^2X, p=3: f(f_X+f_Y) = (X+Y)f_Xf_Y up to sign, lies in mT(f)^2",
        &[
            // in characteristic 3 the two products agree up to sign
            (
                "identity up to sign",
                lhs.sub(&rhs).is_zero() || lhs.add(&rhs).is_zero(),
            ),
            ("membership in mT(f)^2", mt2.membership(&lhs) == Membership::In),
        ],
    );
}

#[test]
fn criterion_05_stability_depends_on_characteristic() {
    let c11 = field(11);
    let f11 = poly("Y^3 - X^11", &c11);
    let v11 = is_mu_stable(&f11, 4, 6, &mut rng()).unwrap();
    let c5 = field(5);
    let f5 = poly("Y^3 - X^11", &c5);
    let v5 = is_mu_stable(&f5, 4, 6, &mut rng()).unwrap();
    report(
        "05",
        "Y^3-X^11: unstable at p=11, quasi-homogeneous and stable at p=5",
        &[
            ("p=11 unstable", matches!(v11, StabilityVerdict::Unstable(_))),
            ("p=11 mu = inf", milnor(&f11) == ExtNat::Infinite),
            (
                "p=11 mu((1+X)f) = 22",
                mu_unit_multiple(&f11, &poly("1 + X", &c11)).unwrap() == ExtNat::Finite(22),
            ),
            (
                "p=5 qh degree 33",
                euler_relation(&f5).map(|e| e.degree) == Some(33),
            ),
            ("p=5 stable l=1", v5 == StabilityVerdict::Stable(1)),
        ],
    );
}

#[test]
fn criterion_06_stability_lost_under_blowup() {
    let ctx = field(2);
    let f = poly("Y^3 + X^5", &ctx);
    let v = is_mu_stable(&f, 4, 6, &mut rng()).unwrap();
    let st = f.blowup_strict_transform(0);
    let vst = is_mu_stable(&st, 4, 6, &mut rng()).unwrap();
    report(
        "06",
        "Y^3+X^5, p=2: stable, but the strict transform Y^3+X^2 is not",
        &[
            ("stable l=1", v == StabilityVerdict::Stable(1)),
            (
                "strict transform = Y^3 + X^2",
                st.sub(&poly("Y^3 + X^2", &ctx)).is_zero(),
            ),
            (
                "transform unstable with d=2",
                vst == StabilityVerdict::Unstable(UnstableWitness::InitialFormObstruction { d: 2 }),
            ),
        ],
    );
}

#[test]
fn criterion_07_no_local_smoothing() {
    let ctx = field(3);
    let f = poly("X^3 + Y^4", &ctx);
    let rep = smoothing_verdict(&f, 32, &mut rng()).unwrap();
    let one = ctx.one();
    let zero = ctx.zero();
    report(
        "07",
        "X^3+Y^4, p=3: the family is not a smoothing; nearby fibers singular",
        &[
            ("verdict NotSmoothing", rep.verdict == Verdict::NotSmoothing),
            (
                "fiber over s=1 singular at (1,0)",
                fiber_singularity_check(&f, &[one.clone(), zero], &one),
            ),
        ],
    );
}

#[test]
fn criterion_08_equisingular_different_tilde_mu() {
    let ctx = field(3);
    let f = poly("Y^3 - X^11", &ctx);
    let h = poly("Y^3 - X^11 + X^8*Y", &ctx);
    let bf = BranchData::analyze(&f, None).unwrap();
    let bh = BranchData::analyze(&h, None).unwrap();
    report(
        "08",
        "Y^3-X^11 vs Y^3-X^11+X^8Y, p=3: same semigroup, tilde_mu 30 vs 24",
        &[
            ("S(f) = <3,11>", bf.semigroup().generators() == [3, 11]),
            ("S(h) = <3,11>", bh.semigroup().generators() == [3, 11]),
            (
                "tilde_mu(f) = 30",
                tilde_mu(&f, 6, &mut rng()).unwrap() == ExtNat::Finite(30),
            ),
            (
                "tilde_mu(h) = 24",
                tilde_mu(&h, 6, &mut rng()).unwrap() == ExtNat::Finite(24),
            ),
            ("tau(h) = 22", tjurina(&h) == ExtNat::Finite(22)),
            ("mu(h) = inf", milnor(&h) == ExtNat::Infinite),
        ],
    );
}

#[test]
fn criterion_09_stability_differs_within_class() {
    let ctx = field(5);
    let f = poly("(Y^2 - X^3)^2 - Y*X^11", &ctx);
    let h = poly("(Y^2 - X^3 + X^2*Y)^2 - Y*X^11", &ctx);
    let bf = BranchData::analyze(&f, None).unwrap();
    let vf = is_mu_stable(&f, 4, 6, &mut rng()).unwrap();
    let vh = is_mu_stable(&h, 4, 6, &mut rng()).unwrap();
    report(
        "09",
        "<4,6,25> class, p=5: f unstable with mu=41, h stable with mu=29",
        &[
            ("S(f) = <4,6,25>", bf.semigroup().generators() == [4, 6, 25]),
            ("conductor 28", bf.conductor() == 28),
            ("mu(f) = 41", milnor(&f) == ExtNat::Finite(41)),
            (
                "tilde_mu(f) = 30",
                tilde_mu(&f, 6, &mut rng()).unwrap() == ExtNat::Finite(30),
            ),
            ("f unstable", matches!(vf, StabilityVerdict::Unstable(_))),
            ("mu(h) = 29", milnor(&h) == ExtNat::Finite(29)),
            (
                "tilde_mu(h) = 29",
                tilde_mu(&h, 6, &mut rng()).unwrap() == ExtNat::Finite(29),
            ),
            (
                "h stable with l <= 3",
                matches!(vh, StabilityVerdict::Stable(l) if l <= 3),
            ),
        ],
    );
}

#[test]
fn criterion_10_stable_but_not_tame() {
    let ctx = field(5);
    let f = poly("(Y^2 - X^3 + X^2*Y)^2 - X^11*Y", &ctx);
    let t = tjurina_ideal(&f);
    // truncate so the Nakayama membership test stays exact
    let kt = t.mprimary_exponent().unwrap();
    let d = (kt * 3 + 2) as u32;
    let t3 = LocalIdeal::new(&ctx, 2, t.gens().iter().map(|g| g.truncate_to(d)).collect());
    let target = LocalIdeal::maximal_ideal(&ctx, 2).product(&t3.power(3));
    let member = target.membership(&f.pow(3).truncate_to(d));
    let bd = BranchData::analyze(&f, None).unwrap();
    report(
        "10",
        "(Y^2-X^3+X^2Y)^2-X^11Y, p=5: f^3 in mT(f)^3 yet the semigroup is wild",
        &[
            ("f^3 in mT(f)^3", member == Membership::In),
            ("not tame at p=5", !bd.semigroup().is_tame(5)),
        ],
    );
}

#[test]
fn criterion_11_milnor_above_conductor() {
    let ctx = field(13);
    // the monomial must have value 2 * 301 = 18*32 + 26 for the branch to
    // carry the semigroup <18, 26, 301>
    let f = poly("(Y^9 - X^13)^2 - X^32*Y", &ctx);
    let bd = BranchData::analyze(&f, Some(640)).unwrap();
    let mu = milnor(&f);
    let mu_val = mu.finite().unwrap_or(0);
    let ify = bd.intersection(&f.partial(1));
    let bound = mu_val + bd.multiplicity() - 1;
    println!("        509 < {bound} = mu(f)+mult(f)-1");
    report(
        "11",
        "(Y^9-X^13)^2-X^32Y, p=13: mu = 559 >= c = 492, I(f,f_Y) = 509 < 576",
        &[
            (
                "S(f) = <18,26,301>",
                bd.semigroup().generators() == [18, 26, 301],
            ),
            ("conductor 492", bd.conductor() == 492),
            ("mu = 559", mu == ExtNat::Finite(559)),
            ("I(f,f_Y) = 509", ify == ExtNat::Finite(509)),
            ("Deligne: mu >= c", mu_val >= bd.conductor()),
            ("509 < 576 = mu + mult - 1", 509 < bound && bound == 576),
        ],
    );
}

#[test]
fn criterion_12_tame_branches_mu_equals_conductor() {
    // 18 binomial branches with p coprime to both exponents, plus two
    // genus-two tame curves
    let binomials: [(u64, u64, u64); 18] = [
        (2, 3, 7),
        (2, 5, 7),
        (2, 9, 7),
        (2, 11, 7),
        (2, 13, 7),
        (3, 4, 7),
        (3, 5, 7),
        (3, 8, 7),
        (3, 10, 7),
        (3, 11, 7),
        (4, 5, 7),
        (4, 9, 7),
        (4, 11, 7),
        (5, 6, 7),
        (5, 8, 7),
        (2, 3, 11),
        (3, 4, 11),
        (4, 5, 11),
    ];
    let mut checks: Vec<(String, bool)> = Vec::new();
    for (a, b, p) in binomials {
        let ctx = field(p);
        let f = poly(&format!("Y^{a} - X^{b}"), &ctx);
        let bd = BranchData::analyze(&f, None).unwrap();
        let c = bd.conductor();
        let mu = milnor(&f);
        let tm = tilde_mu(&f, 4, &mut rng()).unwrap();
        let v = is_mu_stable(&f, 2, 4, &mut rng()).unwrap();
        let ok = mu == ExtNat::Finite(c)
            && tm == ExtNat::Finite(c)
            && c == (a - 1) * (b - 1)
            && bd.semigroup().is_tame(p)
            && !matches!(v, StabilityVerdict::Unstable(_));
        checks.push((format!("Y^{a}-X^{b} p={p}"), ok));
    }
    for (src, p, want_c) in [
        ("(Y^2 - X^3)^2 - X^5*Y", 7u64, 16u64),
        ("(Y^2 - X^3)^2 - X^6*Y", 11, 18),
    ] {
        let ctx = field(p);
        let f = poly(src, &ctx);
        let bd = BranchData::analyze(&f, None).unwrap();
        let c = bd.conductor();
        let mu = milnor(&f);
        let tm = tilde_mu(&f, 4, &mut rng()).unwrap();
        let v = is_mu_stable(&f, 2, 4, &mut rng()).unwrap();
        let ok = c == want_c
            && mu == ExtNat::Finite(c)
            && tm == ExtNat::Finite(c)
            && bd.semigroup().is_tame(p)
            && !matches!(v, StabilityVerdict::Unstable(_));
        checks.push((format!("{src} p={p}"), ok));
    }
    let named: Vec<(&str, bool)> = checks.iter().map(|(n, ok)| (n.as_str(), *ok)).collect();
    report(
        "12",
        "20 tame branches: mu = c = tilde_mu and never unstable",
        &named,
    );
}

#[test]
fn criterion_13_wild_binomial_family() {
    let mut checks: Vec<(String, bool)> = Vec::new();
    for (n, m, p) in [(3u64, 2u64, 5u64), (2, 3, 7), (4, 3, 5)] {
        let ctx = field(p);
        let f = poly(&format!("Y^{n} - X^{}", m * p), &ctx);
        let bd = BranchData::analyze(&f, None).unwrap();
        let ok = milnor(&f) == ExtNat::Infinite && bd.conductor() == (n - 1) * (m * p - 1);
        checks.push((format!("Y^{n}-X^{} p={p}", m * p), ok));
    }
    let named: Vec<(&str, bool)> = checks.iter().map(|(n, ok)| (n.as_str(), *ok)).collect();
    report(
        "13",
        "Y^n - X^mp: mu infinite, conductor (n-1)(mp-1)",
        &named,
    );
}

#[test]
fn criterion_14_oracle_equivalences() {
    let mut checks: Vec<(String, bool)> = Vec::new();

    // (a) parametrization vs resultant on >= 100 (branch, monomial) pairs
    let mut pairs = 0usize;
    let mut agree = true;
    for (a, b, p) in [
        (2u64, 3u64, 7u64),
        (2, 5, 7),
        (3, 4, 7),
        (3, 5, 7),
        (4, 5, 7),
        (2, 7, 11),
        (3, 7, 11),
        (5, 7, 13),
    ] {
        let ctx = field(p);
        let f = poly(&format!("Y^{a} - X^{b}"), &ctx);
        let bd = BranchData::analyze(&f, None).unwrap();
        for i in 0u64..4 {
            for j in 0u64..4 {
                if i + j == 0 {
                    continue;
                }
                let h = poly(&format!("X^{i}*Y^{j}"), &ctx);
                let want = ExtNat::Finite(i * a + j * b);
                let xp = 2 * (i * a + j * b) as usize + 8;
                let r = intersection_via_resultant(&f, &h, xp).unwrap();
                agree &= bd.intersection(&h) == want && r == want;
                pairs += 1;
            }
        }
    }
    checks.push((format!("(a) {pairs} pairs agree"), agree && pairs >= 100));

    // (b), (c) conductor formula vs sweep on a semigroup corpus
    let corpus: [&[u64]; 6] = [
        &[2, 3],
        &[3, 4],
        &[3, 11],
        &[4, 6, 13],
        &[4, 6, 25],
        &[18, 26, 301],
    ];
    let mut b_ok = true;
    let mut c_ok = true;
    for gens in corpus {
        let s = NumericalSemigroup::new(gens).unwrap();
        let c = s.conductor();
        b_ok &= s.conductor_formula() == c;
        let mut brute = 0;
        for n in (0..2 * c + 2).rev() {
            if !s.contains(n) {
                brute = n + 1;
                break;
            }
        }
        b_ok &= brute == c;
        c_ok &= s.sweep_set().len() as u64 == c;
    }
    checks.push(("(b) conductor formula = definition".to_string(), b_ok));
    checks.push(("(c) #sweep set = conductor".to_string(), c_ok));

    // (d) equality in Delgado's formula exactly when p does not divide I(f,g)
    let ctx5 = field(5);
    let cusp = BranchData::analyze(&poly("Y^2 - X^3", &ctx5), None).unwrap();
    let mut d_ok = true;
    for i in 0u64..5 {
        for j in 0u64..3 {
            if i + j == 0 {
                continue;
            }
            let g = poly(&format!("X^{i}*Y^{j}"), &ctx5);
            let rep = delgado_check(&cusp, &g).unwrap();
            d_ok &= rep.inequality_holds && rep.equality == !rep.p_divides_ifg;
        }
    }
    checks.push(("(d) Delgado equality iff p does not divide I(f,g)".to_string(), d_ok));

    // (e) 50 random unit factors and automorphisms
    let ctx7 = field(7);
    let mut r = rng();
    let mut e_ok = true;
    for k in 0..50u64 {
        let f = poly(
            ["Y^2 - X^3", "Y^3 - X^4", "X^2*Y + Y^2*X + Y^4"][(k % 3) as usize],
            &ctx7,
        );
        let c0 = 1 + r.next_u64() % 6;
        let c1 = r.next_u64() % 7;
        let c2 = r.next_u64() % 7;
        let u = poly(&format!("{c0} + {c1}*X + {c2}*Y"), &ctx7);
        e_ok &= tjurina(&u.mul(&f)) == tjurina(&f);
        let (m00, m11) = (1 + r.next_u64() % 6, 1 + r.next_u64() % 6);
        let m01 = r.next_u64() % 7;
        let q = r.next_u64() % 7;
        if (m00 * m11) % 7 == 0 {
            continue;
        }
        let img_x = poly(&format!("{m00}*X + {m01}*Y + {q}*X^2"), &ctx7);
        let img_y = poly(&format!("{m11}*Y"), &ctx7);
        if let Ok(g) = f.apply_automorphism(&[img_x, img_y]) {
            e_ok &= milnor(&g) == milnor(&f);
        }
    }
    checks.push(("(e) tau(uf) = tau(f), mu(phi f) = mu(f), 50 samples".to_string(), e_ok));

    // (f) q-polynomial certificates on genus-one and genus-two tame branches
    let mut f_ok = true;
    let cusp5 = BranchData::analyze(&poly("Y^2 - X^3", &ctx5), None).unwrap();
    for s in 2u64..=10 {
        if !cusp5.semigroup().contains(s) {
            continue;
        }
        let qp = construct_q(&cusp5, s).unwrap();
        f_ok &= qp.degree_ok && qp.value_ok && qp.in_jacobian;
    }
    let g2 = BranchData::analyze(&poly("(Y^2 - X^3)^2 - X^5*Y", &ctx7), None).unwrap();
    let tower = branch_tower(&g2).unwrap();
    let mut qb = QBuilder::new(&tower);
    for s in [4u64, 6, 8, 10, 12, 13, 16, 17, 19, 20, 23, 26] {
        let qp = qb.construct(s).unwrap();
        f_ok &= qp.degree_ok && qp.value_ok && qp.in_jacobian;
    }
    checks.push(("(f) q-polynomial certificates".to_string(), f_ok));

    // (g) reduction against the spanning family reconstructs the input
    let fam = milnor_spanning_family(&tower).unwrap();
    let h = poly("X^2 + Y^3 + X*Y", &ctx7);
    let red = reduce_mod_jacobian(&tower, &fam, &h).unwrap();
    let mut acc = red.jacobian_part.clone();
    for (val, co) in &red.coords {
        let phi = &fam.iter().find(|(a, _)| a == val).unwrap().1;
        acc = acc.add(&phi.scale(co));
    }
    let diff = YPolynomial::from_series(&h, acc.x_prec()).sub(&acc);
    let jac = jacobian_ideal(&g2.f());
    let js = red
        .jacobian_part
        .to_series(Prec::Trunc(red.jacobian_part.x_prec() as u32));
    let g_ok = diff.is_zero() && jac.membership(&js) == Membership::In;
    checks.push(("(g) reduction reconstructs the input".to_string(), g_ok));

    let named: Vec<(&str, bool)> = checks.iter().map(|(n, ok)| (n.as_str(), *ok)).collect();
    report("14", "independent oracles agree", &named);
}

#[test]
fn criterion_15_characteristic_zero_regression() {
    let ctx = make_field(0, 1, &mut rng()).unwrap();
    let mut r = rng();
    let mut checks: Vec<(String, bool)> = Vec::new();
    // binomial plus a random perturbation term; every sample stays isolated
    let shapes: [(u64, u64, u64, u64); 4] =
        [(2, 3, 1, 2), (2, 5, 1, 3), (3, 4, 2, 3), (3, 4, 2, 2)];
    for k in 0..20u64 {
        let (a, b, i, j) = shapes[(k % 4) as usize];
        let c = 1 + r.next_u64() % 9;
        let f = poly(&format!("X^{a} + Y^{b} + {c}*X^{i}*Y^{j}"), &ctx);
        let mu = milnor(&f);
        let tm = tilde_mu(&f, 4, &mut r).unwrap();
        let c1 = r.next_u64() % 5;
        let c2 = r.next_u64() % 5;
        let u = poly(&format!("1 + {c1}*X + {c2}*Y"), &ctx);
        let muf = mu_unit_multiple(&f, &u).unwrap();
        let tau = tjurina(&f);
        let ok = match (mu, tau) {
            (ExtNat::Finite(m), ExtNat::Finite(t)) => tm == mu && muf == mu && t <= m,
            _ => false,
        };
        checks.push((format!("sample {k}: X^{a}+Y^{b}+{c}X^{i}Y^{j}"), ok));
    }
    let named: Vec<(&str, bool)> = checks.iter().map(|(n, ok)| (n.as_str(), *ok)).collect();
    report(
        "15",
        "char 0: mu = tilde_mu = mu(uf) and tau <= mu on 20 random samples",
        &named,
    );
}
