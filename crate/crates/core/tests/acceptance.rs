//! One line per acceptance criterion. Exits non-zero if any criterion fails.

#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use skylink::cellsim::{association_histogram, deciles, nearest_sites_fraction, sum_rate_samples, Scenario};
use skylink::channel::{ChannelModel, LogDistanceParams, ProbLosParams, SmallScaleModel};
use skylink::data::builtin;
use skylink::energy::{me_speed, mr_speed, RotaryWingParams, DEFAULT_VCAP};
use skylink::kv::KvFile;
use skylink::metrics::{circular_ee, flyby_improvement, flyby_trace, optimize_radius, outage_mc, EeCircleParams, Link, LinkScene, Node};
use skylink::planner::{solve_pdp, solve_tsp, spiral_placement, strip_placement, PrecedencePair, TspMode, WaypointSet};
use skylink::rng::stream;
use skylink::trajopt::{
    bcd_codesign, initial_paths, minspeed_surrogate, rate_surrogate, rate_surrogate_grad, sca, schedule_lp, shares_csv,
    trajectory_csv, CodesignInstance, SurrogateMode,
};
use skylink::{AirframePowerModel, FixedWingParams, Vec3};

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
    limit: Option<f64>,
}

fn check(name: &'static str, limit: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Line {
    let t = Instant::now();
    let (ok, detail) = f();
    let secs = t.elapsed().as_secs_f64();
    let pass = ok && limit.is_none_or(|l| secs < l);
    Line { name, pass, detail, secs, limit }
}

fn kv(name: &str) -> KvFile {
    KvFile::parse(builtin(name).unwrap()).unwrap()
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn fig12() -> (bool, String) {
    let k = kv("fig12.preset");
    let p = ProbLosParams::from_kv(&k).unwrap();
    let tr = flyby_trace(&p, k.get_f64("D").unwrap(), k.get_f64("H_U").unwrap(), k.get_f64("V").unwrap(), 0.5).unwrap();
    let (los, nlos, avg) = flyby_improvement(&tr);
    let ok = (los - 23.0).abs() <= 1.5 && (nlos - 23.0).abs() <= 1.5 && (avg - 40.0).abs() <= 3.0;
    (ok, format!("PL gain LoS {los:.2} dB, NLoS {nlos:.2} dB (23 +/- 1.5); channel power gain {avg:.2} dB (40 +/- 3)"))
}

fn energy() -> (bool, String) {
    let mut rng = stream(11, &[]);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c1 = 10f64.powf(rng.random_range(-4.0..-2.0));
        let c2 = 10f64.powf(rng.random_range(2.0..3.7));
        let m = AirframePowerModel::FixedWing(FixedWingParams::new(c1, c2).unwrap());
        let p = |v: f64| c1 * v.powi(3) + c2 / v;
        let me = golden_min(p, 0.5, 500.0);
        let mr = golden_min(|v| p(v) / v, 0.5, 500.0);
        worst = worst.max((me_speed(&m, DEFAULT_VCAP) / me - 1.0).abs());
        worst = worst.max((mr_speed(&m, DEFAULT_VCAP) / mr - 1.0).abs());
    }
    let f16 = AirframePowerModel::FixedWing(FixedWingParams::new(9.26e-4, 2250.0).unwrap());
    let vme = me_speed(&f16, DEFAULT_VCAP);
    let mut order_ok = mr_speed(&f16, DEFAULT_VCAP) > vme;
    let base = AirframePowerModel::from_kv(&kv("rotary_illustrative.params")).unwrap();
    let AirframePowerModel::RotaryWing(b) = base else { unreachable!() };
    let mut jitter = |x: f64| x * rng.random_range(0.5..1.5);
    for _ in 0..50 {
        let p = RotaryWingParams {
            p0: jitter(b.p0),
            pi: jitter(b.pi),
            utip: jitter(b.utip),
            v0: jitter(b.v0),
            d0: jitter(b.d0),
            rho: jitter(b.rho),
            s: jitter(b.s),
            area: jitter(b.area),
        };
        let m = AirframePowerModel::RotaryWing(p);
        order_ok &= mr_speed(&m, DEFAULT_VCAP) > me_speed(&m, DEFAULT_VCAP);
    }
    let ok = worst <= 1e-6 && (vme - 30.0).abs() <= 0.01 && order_ok;
    (ok, format!("max rel. error {worst:.1e} (<= 1e-6); V_me = {vme:.4} m/s (30 +/- 0.01); V_mr > V_me on 51 airframes: {order_ok}"))
}

fn fig16() -> (bool, String) {
    let p = EeCircleParams::from_kv(&kv("fig16.preset")).unwrap();
    let grid: Vec<(f64, f64)> = (0..=29_900).map(|i| 10.0 + 0.1 * i as f64).map(|r| (r, circular_ee(r, &p).unwrap())).collect();
    let mut changes = 0;
    let mut last = 0.0f64;
    for w in grid.windows(2) {
        let d = w[1].1 - w[0].1;
        if d != 0.0 {
            if last != 0.0 && d.signum() != last.signum() {
                changes += 1;
            }
            last = d;
        }
    }
    let best = grid.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let r = optimize_radius(&p, 10.0, 3000.0).unwrap();
    let ok = changes <= 1 && (r - best.0).abs() <= 1.0;
    (ok, format!("sign changes {changes} (<= 1); golden-section r* = {r:.2} m, grid r* = {:.1} m", best.0))
}

fn surrogates() -> (bool, String) {
    let mut rng = stream(12, &[]);
    let rate = |q: &Vec3<f64>, w: &Vec3<f64>, g: f64, a: f64| (g / q.distance(w).powf(a)).ln_1p() / std::f64::consts::LN_2;
    let mut below = true;
    let rnd_point = |rng: &mut skylink::rng::StreamRng, z: (f64, f64)| {
        Vec3::new(rng.random_range(-1000.0..1000.0), rng.random_range(-1000.0..1000.0), rng.random_range(z.0..z.1))
    };
    for _ in 0..100_000 {
        let w = rnd_point(&mut rng, (0.0, 1e-9));
        let q = rnd_point(&mut rng, (50.0, 300.0));
        let ql = rnd_point(&mut rng, (50.0, 300.0));
        let g = 10f64.powf(rng.random_range(4.0..8.0));
        let a = rng.random_range(2.0..4.0);
        let truth = rate(&q, &w, g, a);
        for mode in [SurrogateMode::Distance, SurrogateMode::DistanceSq] {
            below &= rate_surrogate(&q, &w, g, a, &ql, mode) <= truth + 1e-12 * truth.max(1.0);
        }
        let v = Vec3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0));
        let vl = Vec3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0));
        below &= minspeed_surrogate(&v, &vl) <= v.norm_sq() + 1e-9;
    }
    let mut tight: f64 = 0.0;
    let mut grad: f64 = 0.0;
    for _ in 0..100 {
        let w = rnd_point(&mut rng, (0.0, 1e-9));
        let ql = rnd_point(&mut rng, (50.0, 300.0));
        let g = 10f64.powf(rng.random_range(4.0..8.0));
        let a = rng.random_range(2.0..4.0);
        let truth = rate(&ql, &w, g, a);
        let h = 1e-3;
        let fd = Vec3::new(
            (rate(&(ql + Vec3::new(h, 0.0, 0.0)), &w, g, a) - rate(&(ql - Vec3::new(h, 0.0, 0.0)), &w, g, a)) / (2.0 * h),
            (rate(&(ql + Vec3::new(0.0, h, 0.0)), &w, g, a) - rate(&(ql - Vec3::new(0.0, h, 0.0)), &w, g, a)) / (2.0 * h),
            (rate(&(ql + Vec3::new(0.0, 0.0, h)), &w, g, a) - rate(&(ql - Vec3::new(0.0, 0.0, h)), &w, g, a)) / (2.0 * h),
        );
        for mode in [SurrogateMode::Distance, SurrogateMode::DistanceSq] {
            tight = tight.max((rate_surrogate(&ql, &w, g, a, &ql, mode) - truth).abs() / truth);
            let an = rate_surrogate_grad(&ql, &w, g, a, &ql, mode);
            grad = grad.max((an - fd).norm() / fd.norm());
        }
        let vl: Vec3<f64> = Vec3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0));
        tight = tight.max((minspeed_surrogate(&vl, &vl) - vl.norm_sq()).abs() / vl.norm_sq());
        let e = [Vec3::new(h, 0.0, 0.0), Vec3::new(0.0, h, 0.0), Vec3::new(0.0, 0.0, h)];
        let fd_v: Vec<f64> = e.iter().map(|d| ((vl + *d).norm_sq() - (vl - *d).norm_sq()) / (2.0 * h)).collect();
        let sg: Vec<f64> = e.iter().map(|d| (minspeed_surrogate(&(vl + *d), &vl) - minspeed_surrogate(&(vl - *d), &vl)) / (2.0 * h)).collect();
        let diff = Vec3::new(fd_v[0] - sg[0], fd_v[1] - sg[1], fd_v[2] - sg[2]).norm();
        grad = grad.max(diff / Vec3::new(fd_v[0], fd_v[1], fd_v[2]).norm());
    }
    let k = kv("fig14.preset");
    let (hh, g, a, yl) = (k.get_f64("H").unwrap(), 10f64.powf(k.get_f64("gamma_dB").unwrap() / 10.0), k.get_f64("alpha").unwrap(), k.get_f64("y_local").unwrap());
    let w = Vec3::new(0.0, 0.0, 0.0);
    let ql = Vec3::new(0.0, yl, hh);
    let tighter = (0..=800).all(|y| {
        let q = Vec3::new(0.0, y as f64, hh);
        rate_surrogate(&q, &w, g, a, &ql, SurrogateMode::Distance) >= rate_surrogate(&q, &w, g, a, &ql, SurrogateMode::DistanceSq)
    });
    let ok = below && tight <= 1e-12 && grad <= 1e-5 && tighter;
    (ok, format!("lower bounds at 1e5 points: {below}; max rel. gap at local {tight:.1e}; max rel. gradient error {grad:.1e} (<= 1e-5); distance >= distance-squared on grid: {tighter}"))
}

fn codesign() -> (bool, String) {
    let inst = CodesignInstance::canonical().unwrap();
    let init = initial_paths(&inst).unwrap();
    let baseline = inst.utility_value(&init, &inst.shares);
    let run = || bcd_codesign(&inst, &init).unwrap();
    let a = run();
    let b = run();
    let mono = |xs: &[f64]| xs.windows(2).all(|w| w[1] >= w[0]);
    let bcd_mono = mono(&a.trace.iter().map(|t| t.objective).collect::<Vec<_>>());
    let s = sca(&inst, &init, &inst.shares, inst.tol, inst.max_iter).unwrap();
    let sca_mono = mono(&s.trace);
    let sca_iters = s.trace.len() - 1;
    let bytes = |o: &skylink::trajopt::CodesignOutcome| {
        format!("{}{}{}", trajectory_csv(&o.paths, inst.grid.delta_t), shares_csv(&o.shares), o.trace_csv())
    };
    let identical = bytes(&a) == bytes(&b);
    let ok = bcd_mono && sca_mono && a.sca_iterations <= 100 && sca_iters < 100 && a.objective() > baseline && identical;
    (
        ok,
        format!(
            "BCD trace nondecreasing {bcd_mono}, SCA trace nondecreasing {sca_mono} ({sca_iters} iters); min-rate {:.6} vs baseline {baseline:.6}; {} SCA iters in BCD; identical reruns {identical}",
            a.objective(),
            a.sca_iterations
        ),
    )
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn vertex_max_eta(rates: &[Vec<f64>]) -> f64 {
    let (k, n) = (rates.len(), rates[0].len());
    let dim = k * n + 1;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (u, r) in rates.iter().enumerate() {
        let mut a = vec![0.0; dim];
        a[dim - 1] = 1.0;
        for s in 0..n {
            a[u * n + s] = -r[s];
        }
        rows.push((a, 0.0));
    }
    for s in 0..n {
        let mut a = vec![0.0; dim];
        for u in 0..k {
            a[u * n + s] = 1.0;
        }
        rows.push((a, 1.0));
    }
    for i in 0..dim {
        let mut a = vec![0.0; dim];
        a[i] = -1.0;
        rows.push((a, 0.0));
    }
    let mut best = f64::NEG_INFINITY;
    combinations(rows.len(), dim, |sel| {
        let m = DMatrix::from_fn(dim, dim, |i, j| rows[sel[i]].0[j]);
        let rhs = DVector::from_fn(dim, |i, _| rows[sel[i]].1);
        let lu = m.lu();
        if lu.determinant().abs() < 1e-12 {
            return;
        }
        let Some(x) = lu.solve(&rhs) else { return };
        let feasible = rows.iter().all(|(a, b)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
        if feasible {
            best = best.max(x[dim - 1]);
        }
    });
    best
}

fn schedule() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = stream(13, &[i]);
        let k = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let rates: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| if rng.random::<f64>() < 0.15 { 0.0 } else { rng.random_range(0.0..5.0) }).collect())
            .collect();
        let lp = schedule_lp(&rates).unwrap();
        worst = worst.max((lp.eta - vertex_max_eta(&rates)).abs());
    }
    (worst <= 1e-9, format!("max |eta_lp - eta_vertex| = {worst:.1e} over 50 instances (<= 1e-9)"))
}

fn held_karp(p: &[Vec3<f64>]) -> f64 {
    let n = p.len();
    let full = 1usize << (n - 1);
    let d = |a: usize, b: usize| p[a].distance(&p[b]);
    let mut dp = vec![vec![f64::INFINITY; n]; full];
    for j in 1..n {
        dp[1 << (j - 1)][j] = d(0, j);
    }
    for mask in 1..full {
        for j in 1..n {
            let cur = dp[mask][j];
            if !cur.is_finite() || mask & (1 << (j - 1)) == 0 {
                continue;
            }
            for t in 1..n {
                if mask & (1 << (t - 1)) == 0 {
                    let m2 = mask | (1 << (t - 1));
                    dp[m2][t] = dp[m2][t].min(cur + d(j, t));
                }
            }
        }
    }
    (1..n).map(|j| dp[full - 1][j] + d(j, 0)).fold(f64::INFINITY, f64::min)
}

fn is_perm(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n && order.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

fn planner() -> (bool, String) {
    let mut worst_gap: f64 = 0.0;
    let mut certs = true;
    for i in 0..100u64 {
        let mut rng = stream(14, &[i]);
        let n = rng.random_range(7..=12);
        let pts: Vec<Vec3<f64>> =
            (0..n).map(|_| Vec3::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0), 100.0)).collect();
        let tour = solve_tsp(&WaypointSet::closed(pts.clone()), TspMode::Heuristic).unwrap();
        let opt = held_karp(&pts);
        worst_gap = worst_gap.max(tour.length / opt - 1.0);
        certs &= is_perm(&tour.order, n);
        let recomputed: f64 = (0..n).map(|j| pts[tour.order[j]].distance(&pts[tour.order[(j + 1) % n]])).sum();
        certs &= (recomputed - tour.length).abs() <= 1e-9 * recomputed;
        let pairs: Vec<PrecedencePair> = (0..3)
            .map(|_| {
                let a = rng.random_range(0..n - 1);
                PrecedencePair { source: a, destination: rng.random_range(a + 1..n) }
            })
            .collect();
        let ws = WaypointSet { points: pts.clone(), start: Some(Vec3::new(0.0, 0.0, 100.0)), end: None };
        let pdp = solve_pdp(&pairs, &ws).unwrap();
        certs &= is_perm(&pdp.order, n);
        let pos = |x: usize| pdp.order.iter().position(|&o| o == x).unwrap();
        certs &= pairs.iter().all(|p| pos(p.source) < pos(p.destination));
    }
    let mut covered = true;
    let mut fewer = 0;
    for i in 0..50u64 {
        let mut rng = stream(15, &[i]);
        let m = rng.random_range(20..60);
        let r = rng.random_range(100.0..250.0);
        let gts: Vec<Vec3<f64>> =
            (0..m).map(|_| Vec3::new(rng.random_range(0.0..1500.0), rng.random_range(0.0..1500.0), 0.0)).collect();
        let sp = spiral_placement(&gts, r).unwrap();
        let st = strip_placement(&gts, r).unwrap();
        covered &= gts.iter().all(|g| sp.iter().any(|u| (g.x - u.x).hypot(g.y - u.y) <= r + 1e-9));
        fewer += usize::from(sp.len() <= st.len());
    }
    let ok = worst_gap <= 0.05 && certs && covered && fewer == 50;
    (
        ok,
        format!("worst TSP gap {:.2}% (<= 5%); certificates {certs}; spiral covers all {covered}; spiral <= strip on {fewer}/50", 100.0 * worst_gap),
    )
}

fn outage() -> (bool, String) {
    let (alpha, x0, pt, noise) = (2.0, 40.0, 1.0, 1e-10);
    let scene = LinkScene {
        nodes: vec![Node::aerial(Vec3::new(0.0, 0.0, 100.0), pt), Node::ground(Vec3::new(0.0, 0.0, 0.0), 0.0)],
        links: vec![Link { tx: 0, rx: 1 }],
        interferers: vec![],
        model: ChannelModel::LogDistance(LogDistanceParams::new(alpha, x0, 0.0).unwrap()),
        fading: SmallScaleModel::Rayleigh,
        noise_w: noise,
    };
    let beta = 10f64.powf(-(x0 + 10.0 * alpha * 100f64.log10()) / 10.0);
    let mut worst: f64 = 0.0;
    for (i, gamma) in [10.0, 50.0, 200.0].into_iter().enumerate() {
        let mc = outage_mc(0, &scene, gamma, 1_000_000, 16 + i as u64).unwrap();
        let exact = 1.0 - (-gamma * noise / (pt * beta)).exp();
        worst = worst.max((mc - exact).abs());
    }
    (worst <= 0.005, format!("max |MC - closed form| = {worst:.4} at 3 thresholds (<= 0.005)"))
}

fn cellsim() -> (bool, String) {
    let fixed = Scenario::reference(false).unwrap();
    let bf = Scenario::reference(true).unwrap();
    let near = |s: &Scenario, h: f64| nearest_sites_fraction(s, &association_histogram(s, h).unwrap());
    let (f_ground, f_air, b_air) = (near(&fixed, 1.5), near(&fixed, 200.0), near(&bf, 200.0));
    let d0 = deciles(&sum_rate_samples(&fixed, 0).unwrap());
    let d8 = deciles(&sum_rate_samples(&fixed, 8).unwrap());
    let below = d8.iter().zip(&d0).all(|(a, b)| a < b);
    let ok = f_air < f_ground && b_air >= 0.9 && below;
    (
        ok,
        format!(
            "{} drops: (a) fixed nearest-3 {f_air:.3} at 200 m < {f_ground:.3} at 1.5 m; (b) beamforming {b_air:.3} at 200 m (>= 0.9); (c) 8-UAV deciles below 0-UAV: {below} (medians {:.2} vs {:.2})",
            fixed.drops, d8[4], d0[4]
        ),
    )
}

fn main() {
    let lines = vec![
        check("fig12_channel_gain", Some(1.0), fig12),
        check("energy_closed_forms", Some(5.0), energy),
        check("fig16_ee_radius", Some(5.0), fig16),
        check("surrogate_bounds", Some(30.0), surrogates),
        check("sca_bcd_monotonicity", Some(120.0), codesign),
        check("schedule_lp_exactness", None, schedule),
        check("planner_oracles", None, planner),
        check("monte_carlo_outage", Some(30.0), outage),
        check("cellsim_orderings", Some(300.0), cellsim),
    ];
    let mut failed = 0;
    for l in &lines {
        let limit = l.limit.map_or(String::new(), |x| format!(", limit {x} s"));
        println!("{} {:<24} {} [{:.2} s{limit}]", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail, l.secs);
        failed += usize::from(!l.pass);
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
