use std::f64::consts::PI;

use l2growth::caps::Caps;
use l2growth::covers::instantiate;
use l2growth::groups::{quotient, FiniteQuotient, Group, GroupElement, MatrixElement, Subgroup};
use l2growth::spectral::bounds::{betti_bound_general, j_bound, sublog_bound, uniform_gap_exponent};
use l2growth::spectral::density::{
    density_by_quotients, density_zn, log_grid, symmetric_cyclic_density, uniform_grid, DensityEstimate, Provenance,
};
use l2growth::spectral::ns::{estimate_ns, NsEstimate};
use l2growth::stripes::{circle_complex, gap_complex, glue_stripe, torus_complex, zero_complex, StripeSpec};
use l2growth::Error;

fn caps() -> Caps {
    Caps::default()
}

fn cyclic(i: i64) -> FiniteQuotient {
    quotient(&Group::free_abelian(1).unwrap(), &Subgroup::cyclic(i), &caps()).unwrap()
}

fn circle_cdf(l: f64) -> f64 {
    (1.0 - l / 2.0).clamp(-1.0, 1.0).acos() / PI
}

fn gap_z() -> l2growth::group_ring::EquivariantChainComplex {
    gap_complex(&Group::free_abelian(1).unwrap(), &GroupElement::Abelian(vec![1])).unwrap()
}

#[test]
fn torus_quadrature_examples() {
    let d = density_zn(&circle_complex(), 0, 20_000, &[2.0, 4.0], 7).unwrap();
    assert!((d.value_at(2.0) - 0.5).abs() <= 0.02, "{}", d.value_at(2.0));
    assert_eq!(d.value_at(4.0), 1.0);
    let g = density_zn(&gap_z(), 1, 5_000, &[0.9, 9.0], 7).unwrap();
    assert_eq!(g.value_at(0.9), 0.0);
    assert_eq!(g.value_at(9.0), 1.0);
    assert_eq!(d, density_zn(&circle_complex(), 0, 20_000, &[2.0, 4.0], 7).unwrap());
}

#[test]
fn quotient_family_examples() {
    let grid = uniform_grid(0.0, 4.0, 0.25).unwrap();
    let family: Vec<_> = [10, 100, 1000].into_iter().map(cyclic).collect();
    let d = density_by_quotients(&circle_complex(), 0, &family, &grid, &caps()).unwrap();
    assert_eq!(d.provenance, Provenance::QuotientApproximation { order: 1000 });
    assert_eq!(d.members.len(), 3);
    assert!((d.value_at(2.0) - 0.5).abs() <= 0.05);
    assert_eq!(d.value_at(4.0), 1.0);

    let g = density_by_quotients(&gap_z(), 1, &[cyclic(100)], &grid, &caps()).unwrap();
    assert_eq!(g.value_at(0.5), 0.0);

    let zero = zero_complex(&Group::free_abelian(1).unwrap()).unwrap();
    let z = density_by_quotients(&zero, 0, &[cyclic(3), cyclic(8)], &grid, &caps()).unwrap();
    assert!(z.members.iter().all(|m| m.values[0] == 1.0));
}

#[test]
fn quotient_densities_converge_at_rate_two_over_i() {
    let grid: Vec<f64> = (1..40).map(|j| 0.1 * j as f64 + 0.003).collect();
    for i in [7, 20, 64, 150] {
        let d = density_by_quotients(&circle_complex(), 0, &[cyclic(i)], &grid, &caps()).unwrap();
        for (&l, &v) in grid.iter().zip(&d.values) {
            assert!((v - circle_cdf(l)).abs() <= 2.0 / i as f64, "i={i} l={l}: {v} vs {}", circle_cdf(l));
        }
    }
}

#[test]
fn j_bound_examples() {
    let grid = uniform_grid(0.0, 1.0, 0.01).unwrap();
    let flat = DensityEstimate::closed_form(grid.clone(), |x| if x >= 0.2 { 0.1 } else { 0.0 }, 1.0, 1, None).unwrap();
    let j = j_bound(10, &flat, 0.25).unwrap();
    assert!((j.bound - (0.1 + 4.0 * (-10.0f64).exp())).abs() < 1e-12);
    assert!(j.direct <= j.bound + 1e-9);
    assert!((j_bound(0, &flat, 0.25).unwrap().bound - 4.1).abs() < 1e-12);

    let gap = symmetric_cyclic_density(5.0, 2.0, 9.0, uniform_grid(0.0, 9.0, 0.01).unwrap()).unwrap();
    let z = 1.0 / 9.0 - 1e-3;
    let j = j_bound(12, &gap, z).unwrap();
    assert_eq!(j.mu_z, 0.0);
    assert_eq!(j.bound, 4.0 * (-24.0 * z.sqrt()).exp());
    assert!(j.direct <= j.bound + 1e-9);
}

#[test]
fn general_bound_examples() {
    let grid = uniform_grid(0.0, 9.0, 0.001).unwrap();
    let circle = symmetric_cyclic_density(2.0, 1.0, 4.0, grid.clone()).unwrap();
    let q = cyclic(50);
    let n = 49.0f64;
    let z = ((n.ln().ln()) / n).powi(2);
    let r = betti_bound_general(&circle_complex(), &q, 1, &circle, z, &caps()).unwrap();
    assert_eq!(r.measured, 1);
    assert!(r.bound >= 1.0 && r.satisfied, "{r}");

    let gap = symmetric_cyclic_density(5.0, 2.0, 9.0, grid.clone()).unwrap();
    let r = betti_bound_general(&gap_z(), &cyclic(20), 1, &gap, 1.0 / 9.0 - 1e-6, &caps()).unwrap();
    assert_eq!(r.measured, 0);
    assert!(r.satisfied);

    let stripe = glue_stripe(&StripeSpec::new(torus_complex(2).unwrap(), GroupElement::Abelian(vec![1, 0]), 3).unwrap()).unwrap();
    let q = quotient(stripe.group(), &Subgroup::diagonal(&[2, 3]), &caps()).unwrap();
    let r = betti_bound_general(&stripe, &q, 3, &circle, 0.5, &caps()).unwrap();
    assert_eq!(r.measured, 3);
    assert!(r.bound >= 3.0, "{r}");
}

#[test]
fn sublog_on_stripes_and_short_guard() {
    let stripe = glue_stripe(&StripeSpec::new(torus_complex(2).unwrap(), GroupElement::Abelian(vec![1, 0]), 3).unwrap()).unwrap();
    let q = quotient(stripe.group(), &Subgroup::diagonal(&[5, 7]), &caps()).unwrap();
    let r = sublog_bound(&stripe, &q, 3, None, &caps()).unwrap();
    assert_eq!(r.measured, 7);
    assert!(r.satisfied && r.bound >= 7.0, "{r}");
    assert!(matches!(sublog_bound(&circle_complex(), &cyclic(2), 1, None, &caps()), Err(Error::ShortTooSmall { .. })));
}

#[test]
fn novikov_shubin_estimates() {
    let grid: Vec<f64> = std::iter::once(0.0).chain(log_grid(1e-6, 1e-2, 10)).collect();
    let d = density_zn(&circle_complex(), 0, 100_000, &grid, 1).unwrap();
    match estimate_ns(&d).unwrap().estimate {
        NsEstimate::Alpha(a) => assert!((0.8..=1.2).contains(&a), "{a}"),
        e => panic!("{e:?}"),
    }
    let g = density_zn(&gap_z(), 1, 5_000, &grid, 1).unwrap();
    assert_eq!(estimate_ns(&g).unwrap().estimate, NsEstimate::GapDetected);
}

#[test]
fn synthetic_power_laws_recover_twice_the_exponent() {
    let grid: Vec<f64> = std::iter::once(0.0).chain(log_grid(1e-6, 1.0, 10)).collect();
    for beta in [0.25, 0.5, 1.0, 1.5] {
        let d = DensityEstimate::closed_form(grid.clone(), |l| l.powf(beta), 1.0, 1, None).unwrap();
        match estimate_ns(&d).unwrap().estimate {
            NsEstimate::Alpha(a) => assert!((a - 2.0 * beta).abs() <= 0.05, "beta {beta}: {a}"),
            e => panic!("{e:?}"),
        }
    }
}

fn sanov() -> Group {
    Group::integral_matrix(vec![
        MatrixElement::from_rows(&[vec![1, 2], vec![0, 1]]).unwrap(),
        MatrixElement::from_rows(&[vec![1, 0], vec![2, 1]]).unwrap(),
    ])
    .unwrap()
}

#[test]
fn congruence_family_has_sub_linear_exponent() {
    let g = sanov();
    let cx = gap_complex(&g, &g.generator(0).unwrap()).unwrap();
    let density = symmetric_cyclic_density(5.0, 2.0, 9.0, uniform_grid(0.0, 9.0, 0.01).unwrap()).unwrap();
    let family: Vec<_> = [3, 5, 7].into_iter().map(|p| Subgroup::congruence(p).unwrap()).collect();
    let r = uniform_gap_exponent(&cx, 1, &family, 1.0, Some(&density), &caps()).unwrap();
    assert!(r.exponent < 1.0, "{r:?}");
    assert!(r.members.iter().all(|m| m.satisfied && m.betti == 0), "{r:?}");
}

#[test]
fn polynomial_growth_family_is_rejected() {
    let z2 = Group::free_abelian(2).unwrap();
    let cx = gap_complex(&z2, &GroupElement::Abelian(vec![1, 0])).unwrap();
    let family: Vec<_> = (2..=40).map(|i| Subgroup::diagonal(&[i, i])).collect();
    let err = uniform_gap_exponent(&cx, 1, &family, 1.0, None, &caps()).unwrap_err();
    assert!(matches!(err, Error::FamilyNotLogUniform(_)), "{err:?}");
}

#[test]
fn zero_laplacian_covers_have_full_betti() {
    let zero = zero_complex(&Group::free_abelian(1).unwrap()).unwrap();
    for i in [1, 5, 17] {
        assert_eq!(instantiate(&zero, &cyclic(i), &caps()).unwrap().betti(0).unwrap(), i as usize);
    }
}
