use super::*;
use crate::coeffring::rat;
use crate::elimination::contraction_columns;
use crate::exterior::Chart;
use crate::random::Sampler;

fn canonical() -> NFormStructure {
    let c = Chart::new(&["x0", "x1", "y", "p", "p0", "p1", "s0", "s1"], &[]).unwrap();
    let d = |n: &str| c.d(n).unwrap();
    let f = |n: &str| DiffForm::scalar(&c, Coefficient::var(n));
    let dx1 = d("x1");
    let mdx0 = d("x0").neg();
    let theta = d("s0").wedge(&dx1).unwrap()
        .add(&d("s1").wedge(&mdx0).unwrap()).unwrap()
        .sub(&f("p").wedge(&d("x0").wedge(&dx1).unwrap()).unwrap()).unwrap()
        .sub(&f("p0").wedge(&d("y").wedge(&dx1).unwrap()).unwrap()).unwrap()
        .sub(&f("p1").wedge(&d("y").wedge(&mdx0).unwrap()).unwrap()).unwrap();
    NFormStructure::new(theta)
}

fn contact() -> NFormStructure {
    let c = Chart::new(&["q", "p", "z"], &[]).unwrap();
    NFormStructure::new(c.d("z").unwrap().sub(&c.d("q").unwrap().scale(&Coefficient::var("p"))).unwrap())
}

fn var(n: &str) -> Coefficient {
    Coefficient::var(n)
}

const CANONICAL_VARS: [&str; 8] = ["x0", "x1", "y", "p", "p0", "p1", "s0", "s1"];

/// Random element of `𝒵^n`, built from a random `X ∈ ker₁Θ` and `γ`.
fn random_top(s: &NFormStructure, rng: &mut Sampler) -> (DiffForm, MultiVector, Coefficient) {
    let ker = s.kernel_basis(1, KernelOf::Theta).unwrap();
    let mut x = MultiVector::zero(s.chart(), 1);
    for k in &ker {
        x = x.add(&k.scale(&rng.polynomial(&CANONICAL_VARS, 2, 2))).unwrap();
    }
    let gamma = rng.polynomial(&CANONICAL_VARS, 2, 2);
    let alpha = s.dtheta().interior(&x).unwrap().add(&s.theta().scale(&gamma)).unwrap();
    (alpha, x, gamma)
}

#[test]
fn top_degree_decompositions() {
    let s = canonical();
    let (x, g) = sharp_and_reeb(&s, s.theta()).unwrap();
    assert!(x.is_zero());
    assert!(g.is_one());
    let ey = s.chart().e("p0").unwrap();
    let (x, g) = sharp_and_reeb(&s, &s.dtheta().interior(&ey).unwrap()).unwrap();
    assert_eq!(x, ey);
    assert!(g.is_zero());
    let mut rng = Sampler::new(11);
    for _ in 0..16 {
        let (alpha, x, gamma) = random_top(&s, &mut rng);
        let (sx, sg) = sharp_and_reeb(&s, &alpha).unwrap();
        assert_eq!((sx.clone(), sg.clone()), (x, gamma));
        assert!(s.theta().interior(&sx).unwrap().is_zero());
        assert_eq!(s.dtheta().interior(&sx).unwrap(), alpha.sub(&s.theta().scale(&sg)).unwrap());
    }
}

#[test]
fn sharp_of_d_y_is_momentum_direction() {
    // ∂_y itself is outside ker₁Θ; its contraction is reached through ∂_y + p^μ∂_{s^μ}
    let s = canonical();
    let c = s.chart();
    let shifted = c.e("y").unwrap()
        .add(&c.e("s0").unwrap().scale(&var("p0"))).unwrap()
        .add(&c.e("s1").unwrap().scale(&var("p1"))).unwrap();
    let alpha = s.dtheta().interior(&shifted).unwrap();
    let (x, g) = sharp_and_reeb(&s, &alpha).unwrap();
    assert_eq!(x, shifted);
    assert!(g.is_zero());
}

#[test]
fn non_members_carry_certificates() {
    let s = canonical();
    let c = s.chart();
    let outside = c.d("s0").unwrap().wedge(&c.d("x0").unwrap()).unwrap();
    match z_membership(&s, &outside).unwrap() {
        ZMembership::NotMember { residual, .. } => assert!(!residual.is_zero()),
        ZMembership::Member(d) => panic!("unexpected member {:?}", d.sharp()),
    }
    assert!(matches!(sharp_and_reeb(&s, &outside), Err(StructureError::Domain(_))));
}

#[test]
fn skew_symmetry_at_top_degree() {
    let s = canonical();
    let mut rng = Sampler::from_env(21);
    for _ in 0..16 {
        let (a, xa, _) = random_top(&s, &mut rng);
        let (b, xb, _) = random_top(&s, &mut rng);
        assert_eq!(b.interior(&xa).unwrap(), a.interior(&xb).unwrap().neg());
    }
}

#[test]
fn graded_pairing_identity() {
    let s = canonical();
    let n = s.n();
    let mut rng = Sampler::from_env(22);
    for _ in 0..12 {
        let mut members = Vec::new();
        for a in 1..=n {
            let (top, _, _) = random_top(&s, &mut rng);
            let u: MultiVector = rng.graded(s.chart(), n - a, &CANONICAL_VARS, 1, 2);
            members.push(top.interior(&u).unwrap());
        }
        for alpha in &members {
            for beta in &members {
                let (a, b) = (alpha.degree(), beta.degree());
                if n + 1 - a > b {
                    continue;
                }
                let sa = sharp_graded(&s, alpha).unwrap();
                let sb = sharp_graded(&s, beta).unwrap();
                let lhs = beta.interior(sa.representative()).unwrap();
                let rhs = alpha.interior(sb.representative()).unwrap().scale_int(sign((n + 1 - a) * (n + 1 - b)));
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn quotient_classes_compare_modulo_kernel() {
    let s = canonical();
    let c = s.chart();
    let u = c.e("y").unwrap().wedge(&c.e("p0").unwrap()).unwrap();
    let k = c.e("s0").unwrap().wedge(&c.e("s1").unwrap()).unwrap();
    let q1 = QuotientMultiVector::new(&s, &u).unwrap();
    let q2 = QuotientMultiVector::new(&s, &u.add(&k.scale(&var("x1"))).unwrap()).unwrap();
    assert_eq!(q1, q2);
    assert!(q1.contains(&u).unwrap());
    assert!(!q1.contains(&k).unwrap());
}

/// The four elementary families.
fn elementary(s: &NFormStructure) -> Vec<DiffForm> {
    let c = s.chart();
    let dx1 = c.d("x1").unwrap();
    let mdx0 = c.d("x0").unwrap().neg();
    vec![
        dx1.scale(&var("s0")).add(&mdx0.scale(&var("s1"))).unwrap(),
        dx1.scale(&var("y")),
        mdx0.scale(&var("y")),
        dx1.scale(&var("p0")).add(&mdx0.scale(&var("p1"))).unwrap(),
        dx1.clone(),
        mdx0.clone(),
    ]
}

#[test]
fn canonical_witnesses_reproduce_table_fields() {
    let s = canonical();
    for alpha in elementary(&s) {
        let data = canonical_witness(&s, &alpha).unwrap();
        let v = s.verify_conformal(data.x_field()).unwrap().unwrap();
        let lie = s.theta().lie(data.x_field()).unwrap();
        assert_eq!(lie, s.theta().interior(&v).unwrap());
    }
    // y dⁿ⁻¹x_0 gets −y∂_{s⁰} − ∂_{p⁰} exactly
    let c = s.chart();
    let data = canonical_witness(&s, &elementary(&s)[1]).unwrap();
    let expected = c.e("s0").unwrap().scale(&-var("y")).sub(&c.e("p0").unwrap()).unwrap();
    assert_eq!(data.x_field(), &expected);
}

#[test]
fn bracket_through_sharp_matches_definition() {
    let s = canonical();
    let fam: Vec<ConformalData> = elementary(&s).iter().map(|a| canonical_witness(&s, a).unwrap()).collect();
    let mut all = fam.clone();
    for a in &fam {
        for b in &fam {
            if let Some(c) = s.cup_product(a, b).unwrap() {
                all.push(c);
            }
        }
    }
    let mut checked = 0;
    for a in &all {
        for b in &all {
            if a.p() + b.p() - 1 > s.n() {
                continue;
            }
            bracket_via_sharp(&s, a, b).unwrap();
            checked += 1;
        }
    }
    assert!(checked > 36);
    let zero = s.zero_conformal(1).unwrap();
    assert!(bracket_via_sharp(&s, &zero, &fam[0]).unwrap().is_zero());
}

#[test]
fn top_degree_specialization() {
    // {α,β} = −d(α∨β) + ι_{♯(dα)}dβ − ℛ(dβ)α + ℛ(dα)β
    let s = canonical();
    let forms = elementary(&s);
    for a in &forms {
        for b in &forms {
            let da = canonical_witness(&s, a).unwrap();
            let db = canonical_witness(&s, b).unwrap();
            let lhs = s.jacobi_bracket(&da, &db).unwrap().unwrap();
            let (sa, ra) = sharp_and_reeb(&s, &a.d()).unwrap();
            let (_, rb) = sharp_and_reeb(&s, &b.d()).unwrap();
            let cup = s.cup_product(&da, &db).unwrap().unwrap();
            let rhs = cup.alpha().d().neg()
                .add(&b.d().interior(&sa).unwrap()).unwrap()
                .sub(&a.scale(&rb)).unwrap()
                .add(&b.scale(&ra)).unwrap();
            assert_eq!(lhs.alpha(), &rhs);
        }
    }
}

/// Solves `ι_X dη + η(X)η = ω` on the contact chart.
fn flat_inverse(s: &NFormStructure, omega: &DiffForm) -> MultiVector {
    let chart = s.chart();
    let (basis, _) = contraction_columns(s.theta(), 1);
    let cols: Vec<DiffForm> = basis
        .iter()
        .map(|b| {
            let e = MultiVector::basis(chart, *b);
            let eta_e = s.theta().interior(&e).unwrap().as_scalar().unwrap();
            s.dtheta().interior(&e).unwrap().add(&s.theta().scale(&eta_e)).unwrap()
        })
        .collect();
    let Solution::Solved { particular, .. } = LinearSystem::from_columns(&cols, Some(omega)).solve(chart) else {
        panic!("flat is invertible on a contact chart")
    };
    assemble(chart, 1, &basis, &particular)
}

#[test]
fn contact_case_matches_jacobi_structure() {
    let s = contact();
    let c = s.chart();
    let reeb = c.e("z").unwrap();
    assert!(s.dtheta().interior(&reeb).unwrap().is_zero());
    let mut rng = Sampler::from_env(23);
    let vars = ["q", "p", "z"];
    for _ in 0..16 {
        let f = rng.polynomial(&vars, 3, 3);
        let g = rng.polynomial(&vars, 3, 3);
        let df = c.function(f.clone()).d();
        let dg = c.function(g.clone()).d();
        // ♯_Λ(df) = ♭⁻¹(df) − df(R)R
        let rf = reeb.apply(&f).unwrap();
        let sharp_lambda = flat_inverse(&s, &df).sub(&reeb.scale(&rf)).unwrap();
        let (sharp_df, gamma) = sharp_and_reeb(&s, &df).unwrap();
        assert_eq!(sharp_df, sharp_lambda);
        assert_eq!(gamma, rf);
        // X_f = ♯(df) − fR
        let xf = sharp_df.sub(&reeb.scale(&f)).unwrap();
        let fa = s.make_conformal_data(c.function(f.clone()), xf, MultiVector::scalar(c, -&rf)).unwrap();
        let gb = canonical_witness(&s, &c.function(g.clone())).unwrap();
        // {f,g} = ι_{♯_Λ(df)}dg + E(g)f − E(f)g with E = −R
        let bracket = s.jacobi_bracket(&fa, &gb).unwrap().unwrap();
        let eg = -reeb.apply(&g).unwrap();
        let ef = -rf.clone();
        let expected = dg.interior(&sharp_lambda).unwrap().as_scalar().unwrap() + &eg * &f - &ef * &g;
        assert_eq!(bracket.alpha().as_scalar().unwrap(), expected);
        assert_eq!(bracket_via_sharp(&s, &fa, &gb).unwrap(), bracket.alpha().clone());
    }
    let (x, g) = sharp_and_reeb(&s, s.theta()).unwrap();
    assert!(x.is_zero() && g == Coefficient::constant(rat(1)));
}
