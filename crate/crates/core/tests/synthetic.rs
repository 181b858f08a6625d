use modeforest::analysis::DensityOracle;
use modeforest::synthetic::{
    catalog_conditional, catalog_density, catalog_mixture, CatalogDensity, MixtureDensity, CATALOG,
};
use modeforest::Error;

fn grad_norm(m: &MixtureDensity, x: &[f64]) -> f64 {
    let step = 1e-5;
    let mut sum = 0.0;
    for k in 0..x.len() {
        let (mut up, mut down) = (x.to_vec(), x.to_vec());
        up[k] += step;
        down[k] -= step;
        let g = (m.density_at(&up).unwrap() - m.density_at(&down).unwrap()) / (2.0 * step);
        sum += g * g;
    }
    sum.sqrt()
}

#[test]
fn integrates_to_one() {
    // Composite Simpson on a wide interval, independent of the mixture code.
    for name in [
        "standard-normal",
        "two-gaussian-10sep",
        "dominant-with-bump",
        "trimodal",
        "far-pair",
    ] {
        let m = catalog_mixture(name).unwrap();
        let (a, b, steps) = (-30.0, 40.0, 200_000usize);
        let h = (b - a) / steps as f64;
        let mut total = 0.0;
        for k in 0..=steps {
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            total += w * m.density_at(&[a + h * k as f64]).unwrap();
        }
        total *= h / 3.0;
        assert!((total - 1.0).abs() < 1e-6, "{name}: {total}");
    }
}

#[test]
fn sample_moments_of_standard_normal() {
    let x = catalog_mixture("standard-normal")
        .unwrap()
        .sample(10_000, 11);
    let v = x.as_slice();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
    assert!(mean.abs() <= 0.05, "{mean}");
    assert!((0.95..=1.05).contains(&sd), "{sd}");
}

#[test]
fn modes_of_single_normal_and_far_pair() {
    let m = catalog_mixture("standard-normal").unwrap();
    let modes = m.true_modes(&[(-5.0, 5.0)], 0.01).unwrap();
    assert_eq!(modes.len(), 1);
    assert!(modes.row(0)[0].abs() < 1e-6);

    let m = catalog_mixture("far-pair").unwrap();
    let modes = m.true_modes(&[(-15.0, 15.0)], 0.01).unwrap();
    assert_eq!(modes.len(), 2);
    assert!((modes.row(0)[0] + 10.0).abs() < 1e-6);
    assert!((modes.row(1)[0] - 10.0).abs() < 1e-6);
}

#[test]
fn bump_mode_is_pulled_toward_main_mode() {
    // Reference positions from an independent bounded scalar optimizer.
    let m = catalog_mixture("dominant-with-bump").unwrap();
    let modes = m.true_modes(&[(-2.0, 4.0)], 0.01).unwrap();
    assert_eq!(modes.len(), 2);
    assert!(modes.row(0)[0].abs() < 1e-5);
    let minor = modes.row(1)[0];
    assert!((minor - 1.499_949_649_6).abs() < 1e-5, "{minor}");
    assert!(minor < 1.5);
    let (dip, level) = m.saddle_1d(0.2, 1.4).unwrap();
    assert!((dip - 0.907_396_755_7).abs() < 1e-5);
    assert!((level - 0.031_244_794_946).abs() < 1e-9);
}

#[test]
fn wide_bump_has_a_single_mode() {
    let m = MixtureDensity::univariate(&[(0.9, 0.0, 0.5), (0.1, 1.5, 0.5)]).unwrap();
    assert_eq!(m.true_modes(&[(-3.0, 5.0)], 0.01).unwrap().len(), 1);
}

#[test]
fn trimodal_modes_and_saddles() {
    let m = catalog_mixture("trimodal").unwrap();
    let modes = m.true_modes(&[(-10.0, 20.0)], 0.01).unwrap();
    let expect = [0.074_082_729_407, 5.0, 9.925_917_270_593];
    assert_eq!(modes.len(), 3);
    for (got, want) in modes.as_slice().iter().zip(expect) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    for (a, b, want) in [
        (expect[0], expect[1], 2.499_436_176_8),
        (expect[1], expect[2], 7.500_563_823_2),
    ] {
        let (x, v) = m.saddle_1d(a, b).unwrap();
        assert!((x - want).abs() < 1e-5, "{x}");
        assert!((v - 0.053_063_852_781_07).abs() < 1e-10, "{v}");
    }
}

#[test]
fn reported_modes_are_stationary() {
    for name in [
        "standard-normal",
        "two-gaussian-10sep",
        "dominant-with-bump",
        "trimodal",
        "far-pair",
    ] {
        let m = catalog_mixture(name).unwrap();
        for row in m.true_modes(&[(-15.0, 20.0)], 0.01).unwrap().rows() {
            assert!(grad_norm(&m, row) < 1e-4, "{name} at {row:?}");
        }
    }
    let m = catalog_mixture("planar-pair").unwrap();
    let modes = m.true_modes(&[(-2.0, 6.0), (-2.0, 2.0)], 0.05).unwrap();
    assert_eq!(modes.len(), 2);
    for row in modes.rows() {
        assert!(grad_norm(&m, row) < 1e-4, "{row:?}");
    }
}

#[test]
fn saddle_errors() {
    let m = catalog_mixture("standard-normal").unwrap();
    assert!(matches!(
        m.saddle_level_1d(-3.0, -1.0),
        Err(Error::NoInteriorMinimum { .. })
    ));
    let planar = catalog_mixture("planar-pair").unwrap();
    assert!(matches!(
        planar.saddle_level_1d(0.0, 1.0),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn lipschitz_bound_dominates_finite_differences() {
    for name in ["two-gaussian-10sep", "dominant-with-bump", "trimodal"] {
        let m = catalog_mixture(name).unwrap();
        let bound = m.lipschitz_bound();
        let mut worst: f64 = 0.0;
        for k in 0..20_000 {
            let x = -5.0 + 1e-3 * k as f64;
            worst = worst.max(grad_norm(&m, &[x]));
        }
        assert!(worst <= bound, "{name}: {worst} > {bound}");
    }
}

#[test]
fn catalog_is_complete() {
    for entry in CATALOG {
        let density = catalog_density(entry.name).unwrap_or_else(|| panic!("{}", entry.name));
        let x = density.sample(5, 1);
        assert_eq!(x.dim(), density.dim());
        assert!(!entry.assumptions.is_empty());
    }
    assert!(catalog_density("nope").is_none());
    assert!(matches!(
        catalog_density("flat-uniform"),
        Some(CatalogDensity::Flat(_))
    ));
}

#[test]
fn conditional_catalog() {
    let c = catalog_conditional("bimodal-conditional").unwrap();
    let modes = c.conditional_modes().unwrap();
    assert_eq!(modes.len(), 2);
    assert!((modes[0] + 2.0).abs() < 1e-6 && (modes[1] - 2.0).abs() < 1e-6);
    let data = c.sample(1000, 2);
    assert_eq!(data.dim(), 2);
    assert!(data.rows().all(|r| (0.0..1.0).contains(&r[0])));
}
