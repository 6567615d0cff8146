use fzbeam::analysis::{intensity_transform, rate_upper_bound};
use fzbeam::channel::Weights;
use fzbeam::evaluation::{design, run_sweep, weights_rate, ChannelModel, DesignSettings, ExperimentSpec, Method, PlacementSource, Scene, SweepVariable};
use fzbeam::fresnel::{a_of_point, build_frame, ellipse_params, fz_to_cartesian, intensity_profile, jacobian, route_extent, Aperture};
use fzbeam::scenario::{Placement, Point3, SystemConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn placement() -> impl Strategy<Value = Placement> {
    let coord = (-8.0..8.0f64, -8.0..8.0f64, 2.0..12.0f64);
    (coord.clone(), coord).prop_filter_map("distinct points", |(b, u)| {
        Placement::new(Point3::new(b.0, b.1, b.2), Point3::new(u.0, u.1, u.2)).ok()
    })
}

fn small_config() -> SystemConfig {
    SystemConfig::default().with_side_length(0.25)
}

fn fd_jacobian(p: &Placement, a: f64, theta: f64, eta0: f64) -> f64 {
    let f = build_frame(p);
    let at = |a, t| fz_to_cartesian(&f, a, t).unwrap();
    // The radial derivative goes like a square root of the distance to the
    // degenerate zone, which shrinks with eta0^2; the a step has to follow it.
    let radial = a * (100.0 * eta0 * eta0).min(1.0);
    let partials = |h: f64| {
        let ha = h * radial;
        let (pa, ma, pt, mt) = (at(a + ha, theta), at(a - ha, theta), at(a, theta + h), at(a, theta - h));
        [(pa.0 - ma.0) / (2.0 * ha), (pa.1 - ma.1) / (2.0 * ha), (pt.0 - mt.0) / (2.0 * h), (pt.1 - mt.1) / (2.0 * h)]
    };
    // Richardson step removes the h^2 term.
    let (c, f2) = (partials(2e-6), partials(1e-6));
    let d: Vec<f64> = (0..4).map(|i| (4.0 * f2[i] - c[i]) / 3.0).collect();
    (d[0] * d[3] - d[2] * d[1]).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zone_coordinates_round_trip(p in placement(), s in 0.0..1.0f64, theta in 0.0..std::f64::consts::TAU) {
        let (lo, hi) = route_extent(&p, &Aperture::square(1.0));
        let a = lo / 2.0 + s * (hi - lo) / 2.0;
        let f = build_frame(&p);
        let (x, y) = fz_to_cartesian(&f, a, theta).unwrap();
        prop_assert!((a_of_point(&f, x, y) - a).abs() < 1e-9);
        // The point is on the route-length ellipse in the original frame.
        let r = Point3::new(x, y, 0.0);
        prop_assert!((p.route_length(r) - 2.0 * a).abs() < 2e-9);
    }

    #[test]
    fn jacobian_matches_finite_differences(p in placement(), s in 0.0..1.0f64, theta in 0.0..std::f64::consts::TAU) {
        let (lo, hi) = route_extent(&p, &Aperture::square(1.0));
        let a = lo / 2.0 + s * (hi - lo) / 2.0;
        let f = build_frame(&p);
        // Near the degenerate zone the finite difference itself loses accuracy.
        let eta0 = ellipse_params(&f, a).map(|e| e.eta0).unwrap_or(0.0);
        prop_assume!(eta0 > 1e-3);
        let j = jacobian(&f, a, theta).unwrap();
        let fd = fd_jacobian(&p, a, theta, eta0);
        prop_assert!((j - fd).abs() / fd < 1e-6, "J = {} fd = {}", j, fd);
    }

    #[test]
    fn monostatic_zones_are_circles(x in -3.0..3.0f64, y in -3.0..3.0f64, z in 1.0..10.0f64, extra in 0.01..2.0f64, theta in 0.0..6.3f64) {
        let p = Placement::new(Point3::new(x, y, z), Point3::new(x, y, z)).unwrap();
        let f = build_frame(&p);
        let a = z + extra;
        prop_assert!((jacobian(&f, a, theta).unwrap() - a).abs() < 1e-12 * a);
        let (px, py) = fz_to_cartesian(&f, a, theta).unwrap();
        let radius = ((px - x).powi(2) + (py - y).powi(2)).sqrt();
        prop_assert!((radius - (a * a - z * z).sqrt()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monostatic_intensity_is_exact_inside_the_aperture(z in 1.0..10.0f64) {
        let p = Placement::new(Point3::new(0.0, 0.0, z), Point3::new(0.0, 0.0, z)).unwrap();
        let cfg = small_config();
        let prof = intensity_profile(&build_frame(&p), &cfg, &p).unwrap();
        let half = Aperture::of_config(&cfg).half_x;
        for (i, v) in prof.v.iter().enumerate() {
            let a = prof.a_grid.at(i);
            if a * a - z * z < 0.99 * half * half {
                let want = std::f64::consts::TAU * prof.g0 * a;
                prop_assert!((v - want).abs() <= 1e-9 * want);
            }
        }
    }

    #[test]
    fn designed_weights_are_unit_modulus_and_deterministic(p in placement(), bits in proptest::option::of(1u32..4)) {
        let mut cfg = small_config();
        cfg.phase_bits = bits;
        let scene = Scene::new(&cfg, p).unwrap();
        let settings = DesignSettings::default();
        for m in [Method::Narrowband, Method::Vsa, Method::FzSpm, Method::FzGsa] {
            let w = design(&scene, m, &settings).unwrap().unwrap().weights;
            prop_assert_eq!(w.len(), scene.grid.len());
            for z in w.phasors() {
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }
            let again = design(&scene, m, &settings).unwrap().unwrap().weights;
            prop_assert_eq!(w.phases(), again.phases());
        }
    }

    #[test]
    fn rate_is_nondecreasing_in_power(p in placement(), seed in any::<u64>(), lo in -20.0..20.0f64, step in 0.0..15.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cfg = small_config();
        let n = cfg.element_count();
        let w = Weights::from_phases((0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)));
        cfg.tx_power_dbm = lo;
        let low = weights_rate(&Scene::new(&cfg, p).unwrap(), &w, ChannelModel::Approximate).unwrap();
        cfg.tx_power_dbm = lo + step;
        let high = weights_rate(&Scene::new(&cfg, p).unwrap(), &w, ChannelModel::Approximate).unwrap();
        prop_assert!(high >= low);
    }

    #[test]
    fn parseval_over_one_period(p in placement()) {
        let cfg = small_config();
        let prof = intensity_profile(&build_frame(&p), &cfg, &p).unwrap();
        let tg = prof.t_grid();
        // The trapezoid transform is periodic in 1/h.
        let n = 4 * prof.len();
        let df = 1.0 / (tg.step * n as f64);
        let offsets: Vec<f64> = (0..n).map(|k| k as f64 * df).collect();
        let spectral: f64 = intensity_transform(&prof, &offsets).iter().map(|z| z.norm_sqr()).sum::<f64>() * df;
        let e = prof.energy();
        prop_assert!((spectral - e).abs() / e < 0.01, "{} vs {}", spectral, e);
    }
}

#[test]
fn upper_bound_dominates_random_weights() {
    let cfg = small_config();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let scenes: Vec<Scene> = [Placement::reference(), Placement::reference().swapped()]
        .into_iter()
        .map(|p| Scene::new(&cfg, p).unwrap())
        .collect();
    for trial in 0..100 {
        let scene = &scenes[trial % scenes.len()];
        let w = Weights::from_phases((0..scene.grid.len()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)));
        let bound = rate_upper_bound(&scene.profile, &scene.link);
        let r = weights_rate(scene, &w, ChannelModel::Approximate).unwrap();
        assert!(r <= bound, "trial {trial}: {r} > {bound}");
    }
}

#[test]
fn upper_bound_dominates_every_design() {
    let cfg = small_config();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let p = fzbeam::scenario::sample_placement(rng.gen(), fzbeam::scenario::DistanceRange::reference(), fzbeam::scenario::DistanceRange::reference()).unwrap();
        let scene = Scene::new(&cfg, p).unwrap();
        let bound = rate_upper_bound(&scene.profile, &scene.link);
        for m in [Method::Narrowband, Method::Vsa, Method::FzSpm, Method::FzGsa] {
            let w = design(&scene, m, &DesignSettings::default()).unwrap().unwrap().weights;
            assert!(weights_rate(&scene, &w, ChannelModel::Approximate).unwrap() <= bound);
        }
    }
}

#[test]
fn sweeps_are_bit_identical_across_runs() {
    let spec = ExperimentSpec {
        variable: SweepVariable::Bandwidth,
        values: vec![0.5e9, 1.5e9],
        methods: vec![Method::Vsa, Method::FzGsa, Method::Optimal],
        trials: 2,
        master_seed: 77,
        placements: PlacementSource::default(),
        settings: DesignSettings::default(),
    };
    let cfg = small_config();
    let a = run_sweep(&spec, &cfg).unwrap();
    let b = run_sweep(&spec, &cfg).unwrap();
    for (x, y) in a.cells.iter().zip(&b.cells) {
        assert_eq!(x.mean_rate_bps.to_bits(), y.mean_rate_bps.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
}
