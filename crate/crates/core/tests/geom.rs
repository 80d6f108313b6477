use std::sync::Arc;

use txs_core::algebra::collect_tensors;
use txs_core::expr::{parse, Dim, Printer, Session, TensorKind};
use txs_core::geom::{
    apply_contracted_bianchi, commute_adjacent, euler_density, full_simplification, sort_covds, var_d, var_l,
    vary_metric,
};
use txs_core::symm::{canonicalize, SymmetrySpec};
use txs_core::{Error, Expr, Factor};

fn session() -> Session {
    let mut s = Session::standard(Dim::Sym(Arc::from("d")));
    s.declare_tensor("phi", 0, SymmetrySpec::none(0), "phi", TensorKind::Plain).unwrap();
    s.declare_tensor("V", 1, SymmetrySpec::none(1), "V", TensorKind::Plain).unwrap();
    s
}

fn p(s: &Session, e: &str) -> Expr {
    parse(e, s).unwrap()
}

fn metric_down() -> Factor {
    Factor::new("g", vec![txs_core::Index::down("a"), txs_core::Index::down("b")])
}

fn show(s: &Session, e: &Expr) -> String {
    Printer::plain(s).expr(e)
}

/// Equal after metric contraction and canonicalization.
fn assert_same(s: &Session, got: &Expr, want: &str) {
    let diff = collect_tensors(&got.sub(&p(s, want)), s).unwrap();
    assert!(diff.is_zero(), "got {}\nwant {}\ndiff {}", show(s, got), want, show(s, &diff));
}

#[test]
fn variation_of_scalar_curvature() {
    let s = session();
    let got = vary_metric(&p(&s, "RicciScalar[]"), &s).unwrap();
    assert_same(
        &s,
        &got,
        "-dg[a,b]*Ricci[-a,-b] + CD[-b][CD[-a][dg[a,b]]] - CD[-b][CD[b][dg[a,-a]]]",
    );
}

#[test]
fn variation_of_lone_metric() {
    let s = session();
    let got = vary_metric(&p(&s, "g[-a,-b]"), &s).unwrap();
    assert_eq!(show(&s, &got), "dg[-a,-b]");
}

#[test]
fn variation_obeys_product_rule() {
    let s = session();
    let r = p(&s, "RicciScalar[]");
    let dr = vary_metric(&r, &s).unwrap();
    let got = vary_metric(&p(&s, "RicciScalar[]^2"), &s).unwrap();
    let want = r.mul(&dr).unwrap().scale(&txs_core::Coeff::int(2));
    assert!(collect_tensors(&got.sub(&want), &s).unwrap().is_zero());
}

#[test]
fn var_d_of_scalar_curvature_keeps_metrics() {
    let s = session();
    let got = var_d(&p(&s, "RicciScalar[]"), &metric_down(), &s).unwrap();
    assert_eq!(show(&s, &got), "-g[a,c]*g[b,d]*Ricci[-c,-d]");
}

#[test]
fn var_l_of_scalar_curvature() {
    let s = session();
    let got = var_l(&p(&s, "RicciScalar[]"), &metric_down(), &s).unwrap();
    assert_eq!(show(&s, &got), "-g[a,c]*g[b,d]*Ricci[-c,-d] + 1/2*g[a,b]*RicciScalar[]");
}

#[test]
fn var_l_of_scalar_coupled_to_curvature() {
    let s = session();
    let got = var_l(&p(&s, "phi[]*RicciScalar[]"), &metric_down(), &s).unwrap();
    assert_same(
        &s,
        &got,
        "-phi[]*Ricci[a,b] + 1/2*g[a,b]*phi[]*RicciScalar[] + 1/2*CD[a][CD[b][phi[]]] \
         + 1/2*CD[b][CD[a][phi[]]] - g[a,b]*CD[-c][CD[c][phi[]]]",
    );
}

#[test]
fn var_l_of_curvature_powers() {
    let s = session();
    let got = var_l(&p(&s, "RicciScalar[]^2"), &metric_down(), &s).unwrap();
    assert_same(
        &s,
        &got,
        "-2*Ricci[a,b]*RicciScalar[] + 1/2*g[a,b]*RicciScalar[]^2 + CD[a][CD[b][RicciScalar[]]] \
         + CD[b][CD[a][RicciScalar[]]] - 2*g[a,b]*CD[-c][CD[c][RicciScalar[]]]",
    );
    let got = var_l(&p(&s, "RicciScalar[]^4"), &metric_down(), &s).unwrap();
    assert_same(
        &s,
        &got,
        "-4*Ricci[a,b]*RicciScalar[]^3 + 1/2*g[a,b]*RicciScalar[]^4 \
         + 6*RicciScalar[]^2*CD[a][CD[b][RicciScalar[]]] \
         + 24*RicciScalar[]*CD[a][RicciScalar[]]*CD[b][RicciScalar[]] \
         + 6*RicciScalar[]^2*CD[b][CD[a][RicciScalar[]]] \
         - 12*g[a,b]*RicciScalar[]^2*CD[-c][CD[c][RicciScalar[]]] \
         - 24*g[a,b]*RicciScalar[]*CD[-c][RicciScalar[]]*CD[c][RicciScalar[]]",
    );
}

#[test]
fn var_d_result_is_symmetric() {
    let s = session();
    for l in [
        "RicciScalar[]^2",
        "Ricci[-a,-b]*Ricci[a,b]",
        "Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d]",
        "phi[]*CD[-a][CD[a][RicciScalar[]]]",
    ] {
        let got = collect_tensors(&var_d(&p(&s, l), &metric_down(), &s).unwrap(), &s).unwrap();
        let map = [
            (Arc::from("a"), txs_core::Index::up("b")),
            (Arc::from("b"), txs_core::Index::up("a")),
        ]
        .into_iter()
        .collect();
        let swapped = got.rename_frees(&map);
        assert!(collect_tensors(&got.sub(&swapped), &s).unwrap().is_zero(), "{}", l);
    }
}

#[test]
fn trace_of_einstein_hilbert_variation() {
    let s = session();
    let v = var_l(&p(&s, "RicciScalar[]"), &metric_down(), &s).unwrap();
    let traced = collect_tensors(&p(&s, "g[-a,-b]").mul(&v).unwrap(), &s).unwrap();
    let want = p(&s, "(d/2 - 1)*RicciScalar[]");
    assert!(collect_tensors(&traced.sub(&want), &s).unwrap().is_zero(), "{}", show(&s, &traced));
}

#[test]
fn variation_with_respect_to_a_field() {
    let s = session();
    let target = Factor::new("V", vec![txs_core::Index::down("a")]);
    let got = var_d(&p(&s, "V[b]*V[-b]*phi[]"), &target, &s).unwrap();
    assert_same(&s, &got, "2*phi[]*V[a]");
    let got = var_d(&p(&s, "CD[-b][V[b]]*phi[]"), &target, &s).unwrap();
    assert_same(&s, &got, "-CD[a][phi[]]");
}

#[test]
fn varying_the_weyl_tensor_is_unsupported() {
    let s = session();
    let e = vary_metric(&p(&s, "Weyl[-a,-b,-c,-d]*Weyl[a,b,c,d]"), &s);
    assert!(matches!(e, Err(Error::Unsupported(_))));
}

#[test]
fn euler_densities() {
    let s = session();
    assert_eq!(show(&s, &euler_density(2, &s).unwrap()), "-RicciScalar[]");
    assert_same(
        &s,
        &euler_density(4, &s).unwrap(),
        "-RicciScalar[]^2 + 4*Ricci[-a,-b]*Ricci[a,b] - Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d]",
    );
    let e6 = euler_density(6, &s).unwrap();
    assert_eq!(e6.len(), 8);
    assert_same(
        &s,
        &e6,
        "-RicciScalar[]^3 + 12*RicciScalar[]*Ricci[-a,-b]*Ricci[a,b] \
         - 16*Ricci[-a,c]*Ricci[a,b]*Ricci[-b,-c] \
         - 24*Ricci[a,b]*Ricci[c,d]*Riemann[-a,-c,-b,-d] \
         - 3*RicciScalar[]*Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d] \
         + 24*Ricci[a,b]*Riemann[-a,c,d,e]*Riemann[-b,-c,-d,-e] \
         + 8*Riemann[-a,e,-c,f]*Riemann[a,b,c,d]*Riemann[-b,-f,-d,-e] \
         - 2*Riemann[-a,-b,e,f]*Riemann[a,b,c,d]*Riemann[-c,-d,-e,-f]",
    );
}

#[test]
fn euler_density_in_eight_dimensions() {
    let s = session();
    let e8 = euler_density(8, &s).unwrap();
    assert_eq!(e8.len(), 25);
    assert_same(
        &s,
        &e8,
        "-RicciScalar[]^4 + 24*RicciScalar[]^2*Ricci[-a,-b]*Ricci[a,b] \
         - 64*RicciScalar[]*Ricci[-a,c]*Ricci[a,b]*Ricci[-b,-c] \
         + 96*Ricci[-a,c]*Ricci[a,b]*Ricci[-b,d]*Ricci[-c,-d] \
         - 48*Ricci[-a,-b]*Ricci[a,b]*Ricci[-c,-d]*Ricci[c,d] \
         - 96*RicciScalar[]*Ricci[a,b]*Ricci[c,d]*Riemann[-a,-c,-b,-d] \
         - 6*RicciScalar[]^2*Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d] \
         + 96*RicciScalar[]*Ricci[a,b]*Riemann[-a,c,d,e]*Riemann[-b,-c,-d,-e] \
         + 384*Ricci[-a,c]*Ricci[a,b]*Ricci[d,e]*Riemann[-b,-d,-c,-e] \
         - 96*Ricci[a,b]*Ricci[c,d]*Riemann[-a,-c,e,f]*Riemann[-b,-d,-e,-f] \
         - 192*Ricci[a,b]*Ricci[c,d]*Riemann[-a,e,-c,f]*Riemann[-b,-e,-d,-f] \
         + 32*RicciScalar[]*Riemann[-a,e,-c,f]*Riemann[a,b,c,d]*Riemann[-b,-f,-d,-e] \
         - 8*RicciScalar[]*Riemann[-a,-b,e,f]*Riemann[a,b,c,d]*Riemann[-c,-d,-e,-f] \
         - 192*Ricci[-a,c]*Ricci[a,b]*Riemann[-b,d,e,f]*Riemann[-c,-d,-e,-f] \
         + 192*Ricci[a,b]*Ricci[c,d]*Riemann[-a,e,-b,f]*Riemann[-c,-e,-d,-f] \
         - 384*Ricci[a,b]*Riemann[-a,c,d,e]*Riemann[-b,f,-d,g]*Riemann[-c,-g,-e,-f] \
         + 24*Ricci[-a,-b]*Ricci[a,b]*Riemann[-c,-d,-e,-f]*Riemann[c,d,e,f] \
         + 96*Ricci[a,b]*Riemann[-a,c,d,e]*Riemann[-b,-c,f,g]*Riemann[-d,-e,-f,-g] \
         - 192*Ricci[a,b]*Riemann[-a,c,-b,d]*Riemann[-c,e,f,g]*Riemann[-d,-e,-f,-g] \
         + 96*Riemann[-a,e,-c,f]*Riemann[a,b,c,d]*Riemann[-b,g,-e,h]*Riemann[-d,-g,-f,-h] \
         + 96*Riemann[-a,-b,e,f]*Riemann[a,b,c,d]*Riemann[-c,g,-e,h]*Riemann[-d,-h,-f,-g] \
         - 6*Riemann[-a,-b,e,f]*Riemann[a,b,c,d]*Riemann[-c,-d,g,h]*Riemann[-e,-f,-g,-h] \
         + 48*Riemann[-a,-b,-c,e]*Riemann[a,b,c,d]*Riemann[-d,f,g,h]*Riemann[-e,-f,-g,-h] \
         - 48*Riemann[-a,e,-c,f]*Riemann[a,b,c,d]*Riemann[-b,g,-d,h]*Riemann[-e,-g,-f,-h] \
         - 3*Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d]*Riemann[-e,-f,-g,-h]*Riemann[e,f,g,h]",
    );
}

#[test]
fn euler_density_rejects_bad_dimensions() {
    let s = session();
    assert!(euler_density(3, &s).is_err());
    assert!(matches!(euler_density(10, &s), Err(Error::Unsupported(_))));
}

#[test]
fn euler_density_sign_follows_signature() {
    let mut s = Session::new();
    s.declare_manifold("M", Dim::Sym(Arc::from("d")), vec![Arc::from("a"), Arc::from("b")]).unwrap();
    s.declare_metric("g", 1, "CD", false, "g").unwrap();
    assert_eq!(show(&s, &euler_density(2, &s).unwrap()), "RicciScalar[]");
}

#[test]
fn sorted_derivatives_are_left_alone() {
    let s = session();
    let e = p(&s, "CD[-c][CD[-b][RicciScalar[]]]");
    assert_eq!(sort_covds(&e, &s).unwrap(), canonicalize(&e, &s).unwrap());
}

#[test]
fn derivatives_of_scalars_commute() {
    let s = session();
    let e = p(&s, "CD[-a][CD[-b][phi[]]] - CD[-b][CD[-a][phi[]]]");
    assert!(sort_covds(&e, &s).unwrap().is_zero());
}

#[test]
fn sorting_a_vector_derivative_adds_curvature() {
    let s = session();
    let got = sort_covds(&p(&s, "CD[-b][CD[-c][V[-a]]]"), &s).unwrap();
    assert_same(&s, &got, "CD[-c][CD[-b][V[-a]]] + Riemann[-b,-c,-a,d]*V[-d]");

    let mut flipped = session();
    flipped.riemann_sign = -1;
    let got = sort_covds(&p(&flipped, "CD[-b][CD[-c][V[-a]]]"), &flipped).unwrap();
    assert_same(&flipped, &got, "CD[-c][CD[-b][V[-a]]] - Riemann[-b,-c,-a,d]*V[-d]");
}

#[test]
fn commuting_twice_is_the_identity() {
    let s = session();
    for e in [
        "CD[-b][CD[-c][V[-a]]]",
        "CD[-e][CD[-f][Ricci[-a,-b]]]",
        "CD[-a][CD[-c][CD[-b][V[d]]]]",
        "phi[]*CD[-d][CD[-c][Riemann[-a,-b,-e,-f]]]",
    ] {
        let e = p(&s, e);
        let t = &e.terms[0];
        let fi = t.factors.iter().position(|f| f.derivs.len() >= 2).unwrap();
        let once = commute_adjacent(t, fi, 0, &s).unwrap();
        let mut twice = commute_adjacent(&once.terms[0], fi, 0, &s).unwrap();
        twice.terms.extend(once.terms[1..].iter().cloned());
        assert!(collect_tensors(&twice.sub(&e), &s).unwrap().is_zero());
    }
}

#[test]
fn contracted_bianchi_identities() {
    let s = session();
    let got = apply_contracted_bianchi(&p(&s, "CD[-d][Riemann[-a,-b,-c,d]]"), &s).unwrap();
    assert_same(&s, &got, "CD[-b][Ricci[-a,-c]] - CD[-a][Ricci[-b,-c]]");
    let got = apply_contracted_bianchi(&p(&s, "CD[a][Ricci[-a,-b]]"), &s).unwrap();
    assert_same(&s, &got, "1/2*CD[-b][RicciScalar[]]");
    // every slot position of the divergence
    let got = apply_contracted_bianchi(&p(&s, "CD[a][Riemann[-a,-b,-c,-d]]"), &s).unwrap();
    assert_same(&s, &got, "CD[-c][Ricci[-b,-d]] - CD[-d][Ricci[-b,-c]]");
    let got = apply_contracted_bianchi(&p(&s, "CD[b][Riemann[-a,-b,-c,-d]]"), &s).unwrap();
    assert_same(&s, &got, "CD[-d][Ricci[-a,-c]] - CD[-c][Ricci[-a,-d]]");
}

#[test]
fn full_simplification_examples() {
    let s = session();
    let got = full_simplification(&p(&s, "CD[a][CD[-b][Ricci[-c,-a]]]"), &s).unwrap();
    assert_same(
        &s,
        &got,
        "Ricci[-b,a]*Ricci[-c,-a] - Ricci[a,d]*Riemann[-b,-a,-c,-d] + 1/2*CD[-c][CD[-b][RicciScalar[]]]",
    );
    let got = full_simplification(&p(&s, "Riemann[a,b,c,d]*Riemann[-a,-c,-b,-d]"), &s).unwrap();
    assert_eq!(got, canonicalize(&p(&s, "1/2*Riemann[-a,-b,-c,-d]*Riemann[a,b,c,d]"), &s).unwrap());
    let r = p(&s, "RicciScalar[]");
    assert_eq!(full_simplification(&r, &s).unwrap(), r);
}

#[test]
fn full_simplification_is_idempotent() {
    let s = session();
    for e in [
        "CD[a][CD[-b][Ricci[-c,-a]]]",
        "CD[-a][CD[-b][CD[a][CD[b][RicciScalar[]]]]]",
        "Riemann[a,b,c,d]*Riemann[-a,-c,-b,-d] + Ricci[a,b]*Ricci[-a,-b]",
        "CD[d][CD[-e][Riemann[-a,-b,-c,-d]]]",
    ] {
        let once = full_simplification(&p(&s, e), &s).unwrap();
        let twice = full_simplification(&once, &s).unwrap();
        assert_eq!(once, twice, "{}", e);
    }
}
