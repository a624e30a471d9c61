use super::*;
use crate::random::Sampler;
use crate::structures::ms_hamiltonian_pair;

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

fn elementary(s: &NFormStructure) -> Vec<ConformalData> {
    let c = s.chart();
    let e = |n: &str| c.e(n).unwrap();
    let dx1 = c.d("x1").unwrap();
    let mdx0 = c.d("x0").unwrap().neg();
    let zero = MultiVector::zero(c, 0);
    let euler = e("s0").scale(&-var("s0"))
        .sub(&e("s1").scale(&var("s1"))).unwrap()
        .sub(&e("p0").scale(&var("p0"))).unwrap()
        .sub(&e("p1").scale(&var("p1"))).unwrap()
        .sub(&e("p").scale(&var("p"))).unwrap();
    let mk = |a: DiffForm, x: MultiVector, v: MultiVector| s.make_conformal_data(a, x, v).unwrap();
    vec![
        mk(dx1.scale(&var("s0")).add(&mdx0.scale(&var("s1"))).unwrap(), euler, MultiVector::scalar(c, Coefficient::int(-1))),
        mk(dx1.scale(&var("y")), e("s0").scale(&-var("y")).sub(&e("p0")).unwrap(), zero.clone()),
        mk(mdx0.scale(&var("y")), e("s1").scale(&-var("y")).sub(&e("p1")).unwrap(), zero.clone()),
        mk(dx1.scale(&var("p0")).add(&mdx0.scale(&var("p1"))).unwrap(), e("y"), zero.clone()),
        mk(dx1.clone(), e("s0").neg(), zero.clone()),
        mk(mdx0.clone(), e("s1").neg(), zero),
    ]
}

#[test]
fn canonical_construction() {
    let s = canonical();
    let sy = Symplectization::build(&s).unwrap();
    assert_eq!(sy.fiber(), "z");
    let z = sy.conformal_factor().clone();
    let dz = sy.extended_chart().d("z").unwrap();
    let theta = sy.horizontal(s.theta()).unwrap();
    let expected = dz.wedge(&theta).unwrap().neg()
        .sub(&sy.horizontal(s.dtheta()).unwrap().scale(&z)).unwrap();
    assert_eq!(sy.omega(), &expected);
    assert!(sy.nondegeneracy_check().unwrap());
    assert_eq!(sy.nondegeneracy_matches_multicontact().unwrap(), Some(true));
}

#[test]
fn contact_and_closed_bases() {
    let sy = Symplectization::build(&contact()).unwrap();
    assert_eq!(sy.fiber(), "z1");
    assert!(sy.nondegeneracy_check().unwrap());
    assert_eq!(sy.nondegeneracy_matches_multicontact().unwrap(), Some(true));

    let c = Chart::new(&["a", "b"], &[]).unwrap();
    let closed = NFormStructure::new(c.d("a").unwrap());
    let sy = Symplectization::build(&closed).unwrap();
    let dz = sy.extended_chart().d("z").unwrap();
    assert_eq!(sy.omega(), &dz.wedge(&sy.horizontal(closed.theta()).unwrap()).unwrap().neg());
    assert!(!sy.nondegeneracy_check().unwrap());
    assert_eq!(sy.nondegeneracy_matches_multicontact().unwrap(), Some(true));
}

#[test]
fn lifts_preserve_upsilon() {
    let s = canonical();
    let sy = Symplectization::build(&s).unwrap();
    let t = elementary(&s);
    let lifted = sy.lift_conformal(t[4].x_field(), t[4].v_field()).unwrap();
    assert_eq!(lifted, sy.horizontal(t[4].x_field()).unwrap());
    let lifted = sy.lift_conformal(t[0].x_field(), t[0].v_field()).unwrap();
    assert_eq!(lifted, sy.horizontal(t[0].x_field()).unwrap().add(sy.liouville()).unwrap());
    let zero = sy.lift_conformal(&MultiVector::zero(s.chart(), 1), &MultiVector::zero(s.chart(), 0)).unwrap();
    assert!(zero.is_zero());
    let bad = sy.lift_conformal(t[0].x_field(), &MultiVector::zero(s.chart(), 0));
    assert!(matches!(bad, Err(StructureError::Validation { .. })));
}

#[test]
fn lifts_agree_modulo_kernel() {
    let s = canonical();
    let sy = Symplectization::build(&s).unwrap();
    let k = s.kernel_basis(1, KernelOf::Theta).unwrap();
    let t = elementary(&s);
    let cup = s.cup_product(&t[1], &t[3]).unwrap().unwrap();
    let first = sy.lift_conformal(cup.x_field(), cup.v_field()).unwrap();
    let shifted_v = cup.v_field().add(&k[0].scale(&var("x1"))).unwrap();
    let second = sy.lift_conformal(cup.x_field(), &shifted_v).unwrap();
    let du = sy.upsilon().d();
    assert!(du.interior(&first.sub(&second).unwrap()).unwrap().is_zero());
}

#[test]
fn symplectic_poisson_bracket() {
    let c = Chart::new(&["q", "p"], &[]).unwrap();
    let omega = c.d("q").unwrap().wedge(&c.d("p").unwrap()).unwrap();
    let mut rng = Sampler::from_env(31);
    let structure = NFormStructure::new(omega.clone());
    for _ in 0..12 {
        let f = rng.polynomial(&["q", "p"], 3, 3);
        let g = rng.polynomial(&["q", "p"], 3, 3);
        let (ff, gg) = (c.function(f.clone()), c.function(g.clone()));
        let xf = ms_hamiltonian_pair(&omega, &ff).unwrap().unwrap();
        let xg = ms_hamiltonian_pair(&omega, &gg).unwrap().unwrap();
        let wedge = xf.wedge(&xg).unwrap();
        let classical = &f.partial("q") * &g.partial("p") - &f.partial("p") * &g.partial("q");
        assert_eq!(omega.interior(&wedge).unwrap().as_scalar().unwrap(), classical);
        // {df, dg} = d{f,g}_P with X_{df} = −X_f and zero factors
        let a = structure.make_conformal_data(ff.d(), xf.neg(), MultiVector::zero(&c, 0)).unwrap();
        let b = structure.make_conformal_data(gg.d(), xg.neg(), MultiVector::zero(&c, 0)).unwrap();
        let jb = structure.jacobi_bracket(&a, &b).unwrap().unwrap();
        assert_eq!(jb.alpha(), &c.function(classical).d());
    }
}

#[test]
fn poisson_rejects_non_hamiltonian_pairs() {
    let s = canonical();
    let sy = Symplectization::build(&s).unwrap();
    let t = elementary(&s);
    let (psi, x) = sy.psi_map(&t[4]).unwrap();
    let wrong = x.neg();
    assert!(sy.poisson_bracket((&psi, &wrong), (&psi, &x)).is_err());
    // Ψ(dⁿ⁻¹x_0) = z·dx1
    assert_eq!(psi, sy.extended_chart().d("x1").unwrap().scale(sy.conformal_factor()));
}

#[test]
fn correspondence_on_elementary_family() {
    let s = canonical();
    let sy = Symplectization::build(&s).unwrap();
    let mut fam = elementary(&s);
    let base = fam.clone();
    for a in &base {
        for b in &base {
            if let Some(c) = s.cup_product(a, b).unwrap() {
                fam.push(c);
            }
        }
    }
    for a in &fam {
        for b in &fam {
            let r = sy.check_correspondence(a, b).unwrap();
            assert!(r.is_zero(), "residual {r}");
        }
    }
}

#[test]
fn contact_correspondence() {
    let s = contact();
    let sy = Symplectization::build(&s).unwrap();
    let c = s.chart();
    let reeb = c.e("z").unwrap();
    let mut rng = Sampler::from_env(32);
    for _ in 0..8 {
        let f = rng.polynomial(&["q", "p", "z"], 2, 3);
        let df = c.function(f.clone()).d();
        let (sharp, gamma) = crate::sharp::sharp_and_reeb(&s, &df).unwrap();
        let x = sharp.sub(&reeb.scale(&f)).unwrap();
        let a = s.make_conformal_data(c.function(f), x, MultiVector::scalar(c, -gamma)).unwrap();
        let (psi, _) = sy.psi_map(&a).unwrap();
        assert_eq!(psi, sy.horizontal(a.alpha()).unwrap().scale(sy.conformal_factor()));
        assert!(sy.check_correspondence(&a, &a).unwrap().is_zero());
        let t = s.make_conformal_data(c.function(Coefficient::int(1)), reeb.neg(), MultiVector::zero(c, 0)).unwrap();
        assert!(sy.check_correspondence(&a, &t).unwrap().is_zero());
    }
}
