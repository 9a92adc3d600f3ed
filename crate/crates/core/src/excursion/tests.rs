use super::*;
use crate::kernel::FRAC_PI_2;
use crate::rng;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn excursion_endpoints_exact_and_inside_closed_disk() {
    let mut r = rng::stream(1, 0);
    for k in 0..8 {
        let x = BoundaryPoint::from_measure_angle(LEFT_ARC_LO + 0.2 + 0.3 * k as f64 % PI);
        let y = BoundaryPoint::from_measure_angle(LEFT_ARC_HI - 0.15 - 0.11 * k as f64 % PI);
        let exc = sample_excursion(x, y, 1e-3, &mut r).unwrap();
        assert_eq!(exc.path.points[0], x.point());
        assert_eq!(*exc.path.points.last().unwrap(), y.point());
        assert!(exc.path.points.iter().all(|p| p.norm() <= 1.0 + 1e-9));
        assert!(exc
            .path
            .points
            .iter()
            .skip(1)
            .rev()
            .skip(1)
            .all(|p| p.norm() < 1.0));
        // times strictly increasing from zero
        assert_eq!(exc.path.times[0], 0.0);
        assert!(exc.path.times.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn coincident_endpoints_are_rejected() {
    let mut r = rng::stream(1, 1);
    let x = BoundaryPoint::from_measure_angle(2.5);
    assert!(matches!(
        sample_excursion(x, x, 1e-3, &mut r),
        Err(Error::CoincidentPoints)
    ));
}

/// Asymptotic two-sample Kolmogorov-Smirnov p-value.
fn ks_two_sample(a: &mut Vec<f64>, b: &mut Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len() as f64, b.len() as f64);
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    let mut p = 0.0;
    for k in 1..101 {
        let kf = k as f64;
        p += 2.0 * (-1.0f64).powi(k + 1) * (-2.0 * kf * kf * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

fn first_hit_angles(step: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 0);
    let mut out = Vec::new();
    for _ in 0..n {
        let exc = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), step, &mut r).unwrap();
        for win in exc.path.points.windows(2) {
            if win[1].norm() <= 0.5 {
                out.push(win[1].arg());
                break;
            }
        }
    }
    out
}

#[test]
fn first_hit_distribution_stable_under_step_refinement() {
    // brute-force refinement oracle: the law of the first hit of |z| = 1/2
    // must agree between the base step and a 4x finer step
    let n = 2000;
    let mut coarse = first_hit_angles(8e-4, n, 21);
    let mut fine = first_hit_angles(2e-4, n, 22);
    // hitting frequencies comparable
    let (fc, ff) = (coarse.len() as f64 / n as f64, fine.len() as f64 / n as f64);
    assert!((fc - ff).abs() < 0.05, "hit rates diverge: {fc} vs {ff}");
    let p = ks_two_sample(&mut coarse, &mut fine);
    assert!(p > 0.01, "KS p-value too small: {p}");
}

#[test]
fn bubble_diameter_and_endpoint_locality() {
    let mut r = rng::stream(3, 0);
    let x = BoundaryPoint::from_measure_angle(PI);
    let eps = 0.25;
    let delta = 0.02;
    for _ in 0..5 {
        let b = sample_bubble(x, eps, delta, 1e-5, 50_000_000, &mut r).unwrap();
        assert!(b.diameter() > eps);
        let a0 = b.start.measure_angle();
        let a1 = b.end.measure_angle();
        assert!((a0 - PI).abs() <= 2.0 * delta + 1e-12);
        assert!((a1 - PI).abs() <= 2.0 * delta + 1e-12);
    }
}

#[test]
fn bubble_rejection_budget_is_an_explicit_error() {
    let mut r = rng::stream(3, 1);
    let x = BoundaryPoint::from_measure_angle(PI);
    let err = sample_bubble(x, 0.9, 1e-4, 1e-5, 3, &mut r).unwrap_err();
    assert!(matches!(err, Error::BubbleRejection { .. }));
}

#[test]
fn scaled_bubble_intensity_stabilizes_as_delta_shrinks() {
    // The raw acceptance rate decays like δ²; the kernel-scaled estimate
    // converges to the bubble mass above the cutoff. Halving δ at the
    // smallest statistically resolvable scale moves it by a few percent.
    let x = BoundaryPoint::from_measure_angle(PI);
    let eps = 0.3;
    let mut r1 = rng::stream(4, 1);
    let mut r2 = rng::stream(4, 2);
    let big = bubble_mass_estimate(x, eps, 0.04, 1e-4, 60_000, &mut r1).unwrap();
    let small = bubble_mass_estimate(x, eps, 0.02, 2.5e-5, 120_000, &mut r2).unwrap();
    assert!(big > 0.0 && small > 0.0);
    let rel = (big - small).abs() / small;
    assert!(rel < 0.05, "scaled bubble intensity drifted: {big} vs {small} (rel {rel:.3})");
}

#[test]
fn zero_measure_gives_empty_process() {
    let mut r = rng::stream(5, 0);
    let set = sample_process(&BoundaryMeasure::zero(), &ProcessParams::default(), &mut r).unwrap();
    assert!(set.is_empty());
}

#[test]
fn atom_only_measure_keeps_endpoints_at_the_atom() {
    let mut r = rng::stream(5, 1);
    let nu = BoundaryMeasure::dirac(PI, 2.0);
    let params = ProcessParams {
        eps_exc: 0.3,
        step: 1e-4,
        ..ProcessParams::default()
    };
    let set = sample_process(&nu, &params, &mut r).unwrap();
    for exc in &set.excursions {
        assert!((exc.start.measure_angle() - PI).abs() <= 2.0 * params.bubble_delta + 1e-12);
        assert!((exc.end.measure_angle() - PI).abs() <= 2.0 * params.bubble_delta + 1e-12);
        assert!(exc.diameter() > params.eps_exc);
    }
}

#[test]
fn retained_count_is_poisson_dispersed() {
    // thinning a Poisson process leaves a Poisson count: the empirical
    // variance/mean ratio over repeated runs stays near 1
    let nu = BoundaryMeasure::constant_on_left_arc(0.6);
    let params = ProcessParams {
        eps_exc: 0.25,
        step: 2e-3,
        ..ProcessParams::default()
    };
    let sampler = PairSampler::new(&nu, &[]).unwrap();
    let runs = 1000;
    let mut counts = Vec::with_capacity(runs);
    for k in 0..runs {
        let mut r = rng::stream(6, k as u64);
        let set = sample_process_with(&sampler, &nu, &params, &mut r).unwrap();
        counts.push(set.len() as f64);
    }
    let mean = counts.iter().sum::<f64>() / runs as f64;
    let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
    let ratio = var / mean;
    assert!(mean > 1.0, "expected a nontrivial retained count, got {mean}");
    assert!((0.9..=1.1).contains(&ratio), "dispersion ratio {ratio} (mean {mean})");
}

#[test]
fn lowering_cutoff_strictly_increases_arc_pair_counts() {
    // diagnostic for the infinite small-excursion reservoir: the expected
    // number of excursions with both ends in a charged arc keeps growing as
    // the cutoff drops, with no plateau
    let nu = BoundaryMeasure::constant_on_left_arc(1.0);
    let arc = (2.0, 2.6);
    let ladder = [0.4, 0.2, 0.1, 0.05];
    let mut means = Vec::new();
    for (li, eps) in ladder.iter().enumerate() {
        let params = ProcessParams {
            eps_exc: *eps,
            step: 2e-3,
            ..ProcessParams::default()
        };
        let sampler = PairSampler::new(&nu, &[]).unwrap();
        let runs = 60;
        let mut total = 0usize;
        for k in 0..runs {
            let mut r = rng::stream(7 + li as u64, k as u64);
            let set = sample_process_with(&sampler, &nu, &params, &mut r).unwrap();
            total += set
                .excursions
                .iter()
                .filter(|e| {
                    let (a, b) = (e.start.measure_angle(), e.end.measure_angle());
                    a >= arc.0 && a <= arc.1 && b >= arc.0 && b <= arc.1
                })
                .count();
        }
        means.push(total as f64 / runs as f64);
    }
    for w in means.windows(2) {
        assert!(w[1] > w[0], "no growth across the cutoff ladder: {means:?}");
    }
}

#[test]
fn d_curves_identities() {
    let seg = |a: Complex64, b: Complex64| TimedPath {
        points: vec![a, b],
        times: vec![0.0, 1.0],
    };
    let p1 = seg(c(0.0, 0.0), c(0.0, 1.0));
    let p2 = seg(c(0.0, 0.0), c(0.1, 1.0));
    let s1 = vec![&p1];
    let s2 = vec![&p2];
    // identity bijection
    assert_eq!(d_curves(&s1, &s1), 0.0);
    // cardinality mismatch
    assert_eq!(d_curves(&s1, &[]), f64::INFINITY);
    // hand-computed single-pair distance: equal durations, sup distance 0.1
    let d = d_curves(&s1, &s2);
    assert!((d - 0.1).abs() < 1e-12, "got {d}");
}

#[test]
fn d_curves_duration_term() {
    let p1 = TimedPath {
        points: vec![c(0.0, 0.0), c(0.0, 1.0)],
        times: vec![0.0, 1.0],
    };
    let p2 = TimedPath {
        points: vec![c(0.0, 0.0), c(0.0, 1.0)],
        times: vec![0.0, 1.5],
    };
    // same geometry traversed over a longer clock: only |ΔT| contributes
    let d = d_curves(&[&p1], &[&p2]);
    assert!((d - 0.5).abs() < 1e-12);
}

#[test]
fn d_curves_triangle_inequality_on_random_sets() {
    use rand::Rng;
    let mut r = rng::stream(8, 0);
    for _ in 0..40 {
        let n = r.gen_range(1..4usize);
        let mk = |r: &mut rng::Stream| -> Vec<TimedPath> {
            (0..n)
                .map(|_| {
                    let m = r.gen_range(2..6usize);
                    let mut t = 0.0;
                    let mut times = vec![0.0];
                    let mut pts = vec![c(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5))];
                    for _ in 1..m {
                        t += r.gen_range(0.1..1.0);
                        times.push(t);
                        pts.push(c(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)));
                    }
                    TimedPath { points: pts, times }
                })
                .collect()
        };
        let (a, b, cc) = (mk(&mut r), mk(&mut r), mk(&mut r));
        let ra: Vec<&TimedPath> = a.iter().collect();
        let rb: Vec<&TimedPath> = b.iter().collect();
        let rc: Vec<&TimedPath> = cc.iter().collect();
        let dab = d_curves(&ra, &rb);
        let dbc = d_curves(&rb, &rc);
        let dac = d_curves(&ra, &rc);
        assert!(dac <= dab + dbc + 1e-9, "triangle violated: {dac} > {dab} + {dbc}");
    }
}

#[test]
fn markov_slices_concatenation_is_exact() {
    let mut r = rng::stream(9, 0);
    let x = BoundaryPoint::from_measure_angle(2.0);
    let y = BoundaryPoint::from_measure_angle(4.0);
    let mut found = 0;
    for _ in 0..20 {
        let exc = sample_excursion(x, y, 1e-3, &mut r).unwrap();
        match markov_slices(&exc, 0.3) {
            Ok(tri) => {
                found += 1;
                assert_eq!(tri.concatenate(), exc.path.points);
                // entry/exit sit near the inner boundary, within a step
                let step_len = 1e-3f64.sqrt() * 4.0;
                assert!((dist_to_left_arc(tri.entry) - 0.3).abs() < step_len);
                assert!((dist_to_left_arc(tri.exit) - 0.3).abs() < step_len);
            }
            Err(Error::NoSlice) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(found > 0, "no excursion reached the inner region");
}

#[test]
fn markov_slices_boundary_case_has_single_step_outer_slices() {
    // a path that is inside the inner region at every interior sample: the
    // outer slices are exactly the two endpoint steps
    let exc = Excursion {
        path: TimedPath {
            points: vec![c(-1.0, 0.0), c(-0.2, 0.0), c(0.1, 0.1), c(0.0, -1.0)],
            times: vec![0.0, 1.0, 2.0, 3.0],
        },
        start: BoundaryPoint::from_measure_angle(PI),
        end: BoundaryPoint::minus_i(),
    };
    let tri = markov_slices(&exc, 0.3).unwrap();
    assert_eq!(tri.first.points.len(), 2);
    assert_eq!(tri.last.points.len(), 2);
    assert_eq!(tri.concatenate(), exc.path.points);
}

#[test]
fn excursion_never_enters_inner_region_is_no_slice() {
    let exc = Excursion {
        path: TimedPath {
            points: vec![c(-1.0, 0.0), c(-0.95, 0.05), c(-1.0, 0.1)],
            times: vec![0.0, 1.0, 2.0],
        },
        start: BoundaryPoint::from_measure_angle(PI),
        end: BoundaryPoint::from_measure_angle(PI - 0.1),
    };
    assert!(matches!(markov_slices(&exc, 0.5), Err(Error::NoSlice)));
}

fn seg_intersects(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[test]
fn independent_excursions_intersect_near_their_common_endpoint() {
    // two independent excursions from -i to i meet arbitrarily close to -i;
    // at finite resolution we ask for a crossing within distance 0.1
    let n = 60;
    let mut hits = 0;
    for k in 0..n {
        let mut r = rng::stream(10, k as u64);
        let e1 = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), 1e-4, &mut r).unwrap();
        let e2 = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), 1e-4, &mut r).unwrap();
        let near = |p: &Complex64| (p + c(0.0, 1.0)).norm() < 0.1;
        let a: Vec<usize> = (1..e1.path.points.len())
            .filter(|&i| near(&e1.path.points[i]) || near(&e1.path.points[i - 1]))
            .collect();
        let b: Vec<usize> = (1..e2.path.points.len())
            .filter(|&i| near(&e2.path.points[i]) || near(&e2.path.points[i - 1]))
            .collect();
        'outer: for &i in &a {
            for &j in &b {
                if seg_intersects(
                    e1.path.points[i - 1],
                    e1.path.points[i],
                    e2.path.points[j - 1],
                    e2.path.points[j],
                ) {
                    hits += 1;
                    break 'outer;
                }
            }
        }
    }
    let freq = hits as f64 / n as f64;
    assert!(freq >= 0.9, "intersection frequency {freq}");
}

#[test]
fn diameter_matches_brute_force() {
    use rand::Rng;
    let mut r = rng::stream(11, 0);
    for _ in 0..50 {
        let m = r.gen_range(2..40usize);
        let pts: Vec<Complex64> = (0..m)
            .map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let exact = polyline_diameter(&pts);
        let mut brute: f64 = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                brute = brute.max((pts[i] - pts[j]).norm());
            }
        }
        assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
    }
}

#[test]
fn chart_maps_half_plane_boundary_to_circle() {
    let x = BoundaryPoint::from_measure_angle(2.2);
    let y = BoundaryPoint::from_measure_angle(4.4);
    let chart = ExcursionChart::new(x, y).unwrap();
    assert!((chart.phi(c(0.0, 0.0)) - x.point()).norm() < 1e-12);
    for k in 0..50 {
        let w = c(-20.0 + k as f64, 0.0);
        assert!((chart.phi(w).norm() - 1.0).abs() < 1e-9);
        let wi = c(k as f64 * 0.3 - 5.0, 0.5 + k as f64 * 0.1);
        assert!(chart.phi(wi).norm() < 1.0);
    }
}

#[test]
fn left_arc_distance_cases() {
    assert!((dist_to_left_arc(c(-0.5, 0.0)) - 0.5).abs() < 1e-12);
    assert!((dist_to_left_arc(c(0.5, 0.0)) - (c(0.5, 0.0) - c(0.0, 1.0)).norm().min((c(0.5, 0.0) - c(0.0, -1.0)).norm())).abs() < 1e-12);
    assert!(dist_to_left_arc(c(0.0, -0.99)) < 0.011 + 1e-9);
    let _ = FRAC_PI_2;
}
