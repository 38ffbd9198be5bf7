use hammerlip_core::chains::{
    hammersley_lines, length_with_boundary, longest_chain_bruteforce, longest_chain_length, longest_chain_lipschitz,
    longest_chain_standard,
};
use hammerlip_core::geometry::{
    classify, limiting_shape, max_inscribed_rectangle, order_embedding, order_holds, phi_map, CaseLabel, Parallelogram,
    PlanarPoint, SlopeBand,
};
use hammerlip_core::sampler::{PointCloud, SourceSinkSample};
use proptest::collection::vec;
use proptest::prelude::*;

fn finite_band() -> impl Strategy<Value = SlopeBand> {
    (0.01f64..10.0, 0.05f64..20.0).prop_map(|(alpha, gap)| SlopeBand::new(alpha, alpha + gap).unwrap())
}

fn any_band() -> impl Strategy<Value = SlopeBand> {
    prop_oneof![
        4 => finite_band(),
        1 => (0.01f64..5.0).prop_map(|a| SlopeBand::new(a, f64::INFINITY).unwrap()),
        1 => (0.05f64..5.0).prop_map(|b| SlopeBand::new(0.0, b).unwrap()),
        1 => Just(SlopeBand::classical()),
    ]
}

fn point() -> impl Strategy<Value = PlanarPoint> {
    (0.0f64..100.0, 0.0f64..100.0).prop_map(|(x, y)| PlanarPoint::new(x, y))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phi_has_unit_determinant(band in finite_band()) {
        let m = phi_map(band).unwrap();
        prop_assert!((m.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn embedding_preserves_order(band in any_band(), p in point(), q in point()) {
        prop_assume!(p != q);
        let m = order_embedding(band);
        let (ip, iq) = (m.apply(p), m.apply(q));
        // Stay away from the band's edges, where rounding decides.
        let dx = q.x - p.x;
        let dy = q.y - p.y;
        let margin = 1e-9 * (1.0 + dx.abs() + dy.abs()) * (1.0 + band.alpha() + band.beta().min(1e6));
        prop_assume!((dy - band.alpha() * dx).abs() > margin);
        prop_assume!(band.beta().is_infinite() || (dy - band.beta() * dx).abs() > margin);
        prop_assume!(dx.abs() > margin);
        prop_assert_eq!(order_holds(p, q, band), ip.dominated_by(&iq));
    }

    #[test]
    fn shape_is_continuous_at_thresholds(band in finite_band(), a in 0.1f64..10.0) {
        let upper = a * band.arithmetic_mean();
        let lower = a * band.harmonic_mean();
        let sup = a * (band.beta() - band.alpha()).sqrt();
        let sub = lower * (1.0 / band.alpha() - 1.0 / band.beta()).sqrt();
        prop_assert!(rel(limiting_shape(a, upper, band).unwrap(), sup) < 1e-12);
        prop_assert!(rel(limiting_shape(a, lower, band).unwrap(), sub) < 1e-12);
    }

    #[test]
    fn shape_is_homogeneous(band in any_band(), a in 0.1f64..10.0, b in 0.1f64..10.0, t in 0.1f64..50.0) {
        prop_assume!(!(band.beta().is_infinite() && classify(a, b, band) == CaseLabel::Super));
        let f = limiting_shape(a, b, band).unwrap();
        prop_assert!(rel(limiting_shape(t * a, t * b, band).unwrap(), t * f) < 1e-12);
    }

    #[test]
    fn shape_is_monotone(band in any_band(), a in 0.1f64..10.0, b in 0.1f64..10.0, k in 1.0f64..3.0) {
        let f = limiting_shape(a, b, band).unwrap();
        prop_assert!(limiting_shape(k * a, b, band).unwrap() >= f * (1.0 - 1e-12));
        prop_assert!(limiting_shape(a, k * b, band).unwrap() >= f * (1.0 - 1e-12));
    }

    #[test]
    fn shape_reflection_symmetry(band in finite_band(), a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let f = limiting_shape(a, b, band).unwrap();
        let g = limiting_shape(b, a, band.transposed()).unwrap();
        prop_assert!(rel(f, g) < 1e-9);
        let mirrored = match classify(b, a, band.transposed()) {
            CaseLabel::Sub => CaseLabel::Super,
            CaseLabel::Super => CaseLabel::Sub,
            CaseLabel::Central => CaseLabel::Central,
        };
        prop_assert_eq!(classify(a, b, band), mirrored);
    }

    #[test]
    fn rectangle_family_is_contained(c in 0.1f64..10.0, cp in 0.1f64..10.0, mu in 1.05f64..6.0, u in 0.0f64..1.0) {
        let par = Parallelogram::from_sides(c, cp, mu).unwrap();
        let best = max_inscribed_rectangle(&par);
        prop_assert!(best.area <= par.area() * (1.0 + 1e-12));
        let tol = 1e-9 * par.diameter();
        let r = best.member(u * best.family.max_shift);
        for corner in r.corners() {
            prop_assert!(par.contains(&corner, tol), "{:?} outside", corner);
        }
        prop_assert!((r.area() - best.area).abs() <= 1e-9 * best.area.max(1.0));
    }

    #[test]
    fn chain_length_is_monotone_under_insertion(pts in vec(point(), 0..80), extra in point()) {
        let base = PointCloud::from_points(pts.clone());
        let mut more = pts;
        more.push(extra);
        let more = PointCloud::from_points(more);
        let l = longest_chain_standard(&base).length;
        let l2 = longest_chain_standard(&more).length;
        prop_assert!(l2 == l || l2 == l + 1);
    }

    #[test]
    fn lipschitz_path_is_a_chain(band in any_band(), pts in vec(point(), 0..120)) {
        let cloud = PointCloud::from_points(pts);
        let r = longest_chain_lipschitz(&cloud, band);
        prop_assert_eq!(r.path.len(), r.length);
        for w in r.path.windows(2) {
            prop_assert!(order_holds(w[0], w[1], band));
        }
        let brute = longest_chain_bruteforce(&cloud.points, |p, q| order_holds(*p, *q, band)).unwrap();
        prop_assert_eq!(r.length, brute);
    }
}

fn boundary_config() -> impl Strategy<Value = (Vec<PlanarPoint>, SourceSinkSample)> {
    (
        vec((0.0f64..10.0, 0.0f64..10.0).prop_map(|(x, y)| PlanarPoint::new(x, y)), 0..40),
        vec(0.0f64..10.0, 0..8),
        vec(0.0f64..10.0, 0..8),
    )
        .prop_map(|(pts, mut sources, mut sinks)| {
            sources.sort_by(f64::total_cmp);
            sinks.sort_by(f64::total_cmp);
            (pts, SourceSinkSample { sources, sinks, lambda: 1.0 })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boundary_length_is_monotone((pts, ss) in boundary_config(), x in 0.0f64..10.0, y in 0.0f64..10.0, dx in 0.0f64..3.0, dy in 0.0f64..3.0) {
        let cloud = PointCloud::from_points(pts);
        let l = length_with_boundary(&cloud, &ss, x, y).length;
        prop_assert!(length_with_boundary(&cloud, &ss, x + dx, y).length >= l);
        prop_assert!(length_with_boundary(&cloud, &ss, x, y + dy).length >= l);
    }

    #[test]
    fn no_path_mixes_sources_and_sinks((pts, ss) in boundary_config(), x in 0.0f64..10.0, y in 0.0f64..10.0) {
        let cloud = PointCloud::from_points(pts);
        let r = length_with_boundary(&cloud, &ss, x, y);
        prop_assert!(r.uses_sources == 0 || r.uses_sinks == 0);
    }

    #[test]
    fn hammersley_lines_count_chains((pts, ss) in boundary_config(), x in 0.0f64..10.0, y in 0.0f64..10.0) {
        let cloud = PointCloud::from_points(pts);
        let lines = hammersley_lines(&cloud, &ss, 10.0, 10.0);
        prop_assert_eq!(lines.len(), length_with_boundary(&cloud, &ss, 10.0, 10.0).length);
        let below = lines
            .iter()
            .filter(|l| l.height_after(x).is_some_and(|h| h <= y))
            .count();
        prop_assert_eq!(below, length_with_boundary(&cloud, &ss, x, y).length);
    }

    #[test]
    fn hammersley_lines_do_not_cross((pts, ss) in boundary_config(), x in 0.0f64..10.0) {
        let cloud = PointCloud::from_points(pts);
        let lines = hammersley_lines(&cloud, &ss, 10.0, 10.0);
        let heights: Vec<f64> = lines.iter().filter_map(|l| l.height_after(x)).collect();
        prop_assert!(heights.windows(2).all(|w| w[0] <= w[1]), "{:?}", heights);
        for l in &lines {
            prop_assert!(l.vertices.windows(2).all(|w| w[0].x <= w[1].x && w[0].y >= w[1].y));
        }
    }
}

#[test]
fn chain_length_without_path_agrees() {
    let pts: Vec<PlanarPoint> = (0..500)
        .map(|i| {
            let u = (i as f64 * 0.618_033_988_75).fract();
            let v = (i as f64 * 0.414_213_562_37).fract();
            PlanarPoint::new(u, v)
        })
        .collect();
    let cloud = PointCloud::from_points(pts);
    assert_eq!(longest_chain_length(&cloud.points), longest_chain_standard(&cloud).length);
}
