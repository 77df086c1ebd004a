use blaschke_core::zerofind::{
    blaschke_product, envelope_exponential, jensen_residual, locate_zeros_with, product, winding_number, Contour,
    EnvelopeKind, LocateOptions, Rect, ZeroSet,
};
use blaschke_core::{Complex64, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_family(rng: &mut ChaCha8Rng) -> Vec<(Complex64, u32)> {
    let n = rng.random_range(1..=6usize);
    let mut out: Vec<(Complex64, u32)> = Vec::new();
    while out.len() < n {
        let z = Complex64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
        if out.iter().all(|(w, _)| (z - w).norm() > 1e-3) {
            out.push((z, rng.random_range(1..=3u32)));
        }
    }
    out
}

fn expand(zs: &[(Complex64, u32)]) -> Vec<Complex64> {
    zs.iter()
        .flat_map(|&(z, m)| std::iter::repeat_n(z, m as usize))
        .collect()
}

#[test]
fn random_blaschke_products_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let region = Rect::new(-0.7, 0.7, -0.7, 0.7);
    let opts = LocateOptions::new(1e-10, 60);
    for _ in 0..10 {
        let fam = random_family(&mut rng);
        let f = blaschke_product(&expand(&fam)).unwrap();
        // locate from values alone, without the known-zero shortcut
        let blind = blaschke_core::zerofind::AnalyticFn::new(f.domain(), {
            let f = f.clone();
            move |z| f.eval_unchecked(z)
        })
        .with_derivative({
            let f = f.clone();
            move |z| f.derivative_unchecked(z).unwrap()
        });
        let found = locate_zeros_with(&blind, region, &opts).unwrap();
        assert_eq!(found.len(), fam.len());
        for &(z, m) in &fam {
            let hit = found
                .iter()
                .find(|r| (r.location - z).norm() < 1e-8)
                .expect("zero not found");
            assert_eq!(hit.multiplicity, m);
        }
        let total: u32 = fam.iter().map(|p| p.1).sum();
        assert_eq!(
            winding_number(&f, &Contour::Rectangle(region), 64).unwrap(),
            total as i64
        );
    }
}

#[test]
fn sequential_and_parallel_localization_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let fam = random_family(&mut rng);
    let f = blaschke_product(&expand(&fam)).unwrap();
    let region = Rect::new(-0.7, 0.7, -0.7, 0.7);
    let a = locate_zeros_with(
        &f,
        region,
        &LocateOptions::new(1e-10, 60).with_execution(Execution::Sequential),
    )
    .unwrap();
    let b = locate_zeros_with(
        &f,
        region,
        &LocateOptions::new(1e-10, 60).with_execution(Execution::Parallel),
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_free_product_factor_changes_nothing() {
    let zs = [Complex64::new(0.3, -0.2), Complex64::new(-0.4, 0.1)];
    let f = product(
        &blaschke_product(&zs).unwrap(),
        &envelope_exponential(EnvelopeKind::Cayley { c: 0.5 }).unwrap(),
    )
    .unwrap();
    let found = locate_zeros_with(&f, Rect::new(-0.7, 0.7, -0.7, 0.7), &LocateOptions::new(1e-10, 60)).unwrap();
    let want = ZeroSet::from_points(&zs);
    assert_eq!(found.len(), want.len());
    for (a, b) in found.iter().zip(want.iter()) {
        assert!((a.location - b.location).norm() < 1e-10);
        assert_eq!(a.multiplicity, b.multiplicity);
    }
    assert!(jensen_residual(&f, 0.9, 4096).unwrap().abs() < 1e-6);
}
