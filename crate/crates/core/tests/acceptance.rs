//! Acceptance criteria 1–9. Each test prints one PASS/FAIL line with the
//! pinned tolerances and the measured values, then asserts.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use speclab::analytic_spectra::{
    box_spectrum, disjoint_union_spectrum, disk_neumann_prefix, rectangle_mu_k, segment_spectrum, weyl_ratio,
    BoundaryCondition,
};
use speclab::constants::{alpha1_sharp, c_upper, kroger_upper, payne_weinberger_lower};
use speclab::experiments::{ratio_scan, rhombus_sweep, table_mu1, Cell, PairShape, Report, DEFAULT_SECTOR_ANGLES};
use speclab::fem::eigen_estimates;
use speclab::geometry::{build, DirichletSelector, DomainSpec};
use speclab::specfun::bessel_j_zero;

const PI2: f64 = PI * PI;

fn report(n: u32, what: &str, checks: &[(bool, String)], elapsed: Duration, limit: Duration) -> bool {
    let on_time = elapsed <= limit;
    let pass = on_time && checks.iter().all(|c| c.0);
    let mut parts: Vec<String> = checks.iter().map(|(ok, s)| format!("{}{s}", if *ok { "" } else { "FAILED " })).collect();
    parts.push(format!("runtime {:.2} s <= {} s{}", elapsed.as_secs_f64(), limit.as_secs(), if on_time { "" } else { " FAILED" }));
    println!("criterion {n} {}: {what}; {}", if pass { "PASS" } else { "FAIL" }, parts.join("; "));
    pass
}

fn num(r: &Report, row: usize, col: &str) -> f64 {
    match &r.rows[row][r.column(col).unwrap_or_else(|| panic!("column {col}"))] {
        Cell::Num(x) => *x,
        Cell::Int(i) => *i as f64,
        Cell::Text(t) => panic!("{col} is text: {t}"),
    }
}

fn text<'a>(r: &'a Report, row: usize, col: &str) -> &'a str {
    match &r.rows[row][r.column(col).unwrap()] {
        Cell::Text(t) => t,
        other => panic!("{col} is not text: {other:?}"),
    }
}

#[test]
fn criterion_1_constants() {
    let t = Instant::now();
    let a2 = alpha1_sharp(2).unwrap();
    let a3 = alpha1_sharp(3).unwrap();
    let worst = (1..=20)
        .map(|k| {
            let kf = k as f64;
            (c_upper(k, 3).unwrap() - kf * kf / ((kf + 1.0) * (kf + 1.0))).abs()
        })
        .fold(0.0, f64::max);
    let checks = [
        ((0.4264..=0.4270).contains(&a2), format!("alpha1_sharp(2) = {a2:.6} in [0.4264, 0.4270]")),
        ((a3 - 0.25).abs() <= 1e-12, format!("|alpha1_sharp(3) - 0.25| = {:.1e} <= 1e-12", (a3 - 0.25).abs())),
        (worst <= 1e-12, format!("max_k<=20 |c_upper(k,3) - k^2/(k+1)^2| = {worst:.1e} <= 1e-12")),
    ];
    assert!(report(1, "constants", &checks, t.elapsed(), Duration::from_secs(1)));
}

#[test]
fn criterion_2_bessel_suite() {
    let t = Instant::now();
    let half = (1..=20)
        .map(|k| (bessel_j_zero(0.5, k).unwrap() / (k as f64 * PI) - 1.0).abs())
        .fold(0.0, f64::max);
    let j01 = bessel_j_zero(0.0, 1).unwrap();
    let orders: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).chain([12.5, 20.0, 29.0, 45.0, 59.0]).collect();
    let ks = 1..=20usize;
    let (mut interlace, mut monotone, mut lower, mut upper) = (true, true, true, true);
    for (i, &nu) in orders.iter().enumerate() {
        for k in ks.clone() {
            let z = bessel_j_zero(nu, k).unwrap();
            // j_{ν,k} < j_{ν+1,k} < j_{ν,k+1}
            let up = bessel_j_zero(nu + 1.0, k).unwrap();
            interlace &= z < up && up < bessel_j_zero(nu, k + 1).unwrap();
            if let Some(&next) = orders.get(i + 1) {
                monotone &= z < bessel_j_zero(next, k).unwrap();
            }
            if nu > 0.5 {
                lower &= z > nu + k as f64 * PI - 0.5;
            }
        }
        let j1 = bessel_j_zero(nu, 1).unwrap();
        upper &= j1 * j1 <= 2.0 * (nu + 1.0) * (nu + 3.0);
    }
    let grid = format!("nu in {} orders up to 59, k <= 20", orders.len());
    let checks = [
        (half <= 1e-12, format!("max_k<=20 |j_(1/2,k)/(k pi) - 1| = {half:.1e} <= 1e-12")),
        ((5.781..=5.785).contains(&(j01 * j01)), format!("j01^2 = {:.6} in [5.781, 5.785]", j01 * j01)),
        (interlace, format!("interlacing j_(nu,k) < j_(nu+1,k) < j_(nu,k+1) on {grid}")),
        (monotone, "j_(nu,k) increasing in nu".to_string()),
        (lower, "j_(nu,k) > nu + k pi - 1/2 for nu > 1/2".to_string()),
        (upper, "j_(nu,1)^2 <= 2(nu+1)(nu+3)".to_string()),
    ];
    assert!(report(2, "Bessel suite", &checks, t.elapsed(), Duration::from_secs(5)));
}

#[test]
fn criterion_3_table_reproduction() {
    let t = Instant::now();
    let angles: Vec<f64> = DEFAULT_SECTOR_ANGLES.split(',').map(|s| s.parse().unwrap()).collect();
    let r = table_mu1(2, 64, 256, &angles, &[20.0, 10.0, 5.0]).unwrap();
    let elapsed = t.elapsed();
    // (row, reference value, tolerance, reference ratio)
    let pinned = [
        ("square", PI2 / 2.0, 0.002, 0.5),
        ("equilateral triangle", 4.0 * PI2 / 9.0, 0.005, 0.5625),
        ("disk", 3.39, 0.005, 0.73),
        ("Reuleaux triangle", 3.487, 0.01, 0.707),
        ("line segment", PI2 / 4.0, 1e-12, 1.0),
    ];
    let segment = segment_spectrum(2.0, BoundaryCondition::Neumann, 2).unwrap().values()[1];
    let mut checks = Vec::new();
    let mut max_dofs = 0.0f64;
    for (name, reference, tol, ratio_ref) in pinned {
        let Some(i) = (0..r.rows.len()).find(|&i| text(&r, i, "row") == name) else {
            checks.push((false, format!("{name}: row missing")));
            continue;
        };
        let (v, eps) = (num(&r, i, "mu1"), num(&r, i, "error_estimate"));
        max_dofs = max_dofs.max(num(&r, i, "dofs"));
        let dev = (v / reference - 1.0).abs();
        let ratio = segment / v;
        let ratio_dev = (ratio / ratio_ref - 1.0).abs();
        checks.push((dev <= tol + eps / reference, format!("{name} {v:.6} dev {dev:.2e} <= {tol} + {:.1e}", eps / reference)));
        checks.push((ratio_dev <= tol + eps / v, format!("ratio {ratio:.5} vs {ratio_ref} dev {ratio_dev:.2e}")));
    }
    checks.push((max_dofs <= 3e5, format!("finest dofs {max_dofs} <= 3e5")));
    assert!(report(3, "mu1 table at diameter 2", &checks, elapsed, Duration::from_secs(600)));
}

#[test]
fn criterion_4_rhombus_sweep() {
    let t = Instant::now();
    let r = rhombus_sweep(&[20.0, 10.0, 5.0], 2).unwrap();
    let elapsed = t.elapsed();
    let j2 = bessel_j_zero(0.0, 1).unwrap().powi(2);
    let mut checks = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..r.rows.len() {
        let deg = num(&r, i, "theta_deg");
        let theta = deg.to_radians();
        let (v, eps) = (num(&r, i, "normalized"), num(&r, i, "error_estimate"));
        let lo = theta.cos().powi(2) * j2 - eps;
        let hi = j2 + eps;
        checks.push((lo <= v && v <= hi, format!("{deg}deg: {v:.5} in [{lo:.5}, {hi:.5}]")));
        if let Some((pv, pe)) = prev {
            checks.push((v + eps + pe >= pv, format!("increasing {pv:.5} -> {v:.5}")));
        }
        prev = Some((v, eps));
        let m = theta.tan();
        let bound = PI2 / (4.0 * m * m);
        let tau = num(&r, i, "tau1");
        checks.push((tau >= 0.995 * bound, format!("tau1 {tau:.3} >= 0.995 * {bound:.3}")));
    }
    assert!(report(4, "rhombus squeeze and antisymmetric mode", &checks, elapsed, Duration::from_secs(900)));
}

fn first_scan() -> &'static (Report, Duration) {
    static SCAN: OnceLock<(Report, Duration)> = OnceLock::new();
    SCAN.get_or_init(|| {
        let t = Instant::now();
        let r = ratio_scan(200, 1, 1, 12, 6, PairShape::Mixed, false).unwrap();
        (r, t.elapsed())
    })
}

#[test]
fn criterion_5_ratio_scan() {
    let (r, elapsed) = first_scan();
    let bound = 0.995 * alpha1_sharp(2).unwrap();
    let ok: Vec<usize> = (0..r.rows.len()).filter(|&i| text(r, i, "status") == "ok").collect();
    let min_ratio = ok.iter().map(|&i| num(r, i, "ratio")).fold(f64::INFINITY, f64::min);
    let min_high = ok.iter().map(|&i| num(r, i, "ratio_high")).fold(f64::INFINITY, f64::min);
    let below_one = ok.iter().filter(|&&i| num(r, i, "ratio_high") < 1.0).count();
    let reported = r.notes.iter().any(|n| n.starts_with("minimum ratio"));
    let checks = [
        (ok.len() == 200, format!("{} of 200 pairs evaluated", ok.len())),
        (min_ratio >= bound, format!("min ratio {min_ratio:.5} >= 0.995 alpha1_sharp(2) = {bound:.5}")),
        (reported, "minimum ratio reported".to_string()),
        (min_high < 1.0, format!("{below_one} pairs with ratio + error < 1 (smallest {min_high:.5})")),
    ];
    assert!(report(5, "ratio scan, 200 seeded pairs", &checks, *elapsed, Duration::from_secs(1800)));
}

#[test]
fn criterion_6_weyl() {
    let t = Instant::now();
    let target = weyl_ratio(1.0, 2.6, 2).unwrap();
    let dev = |k: u64| {
        let ratio = rectangle_mu_k(1.0, 1.0, k).unwrap() / rectangle_mu_k(2.0, 1.3, k).unwrap();
        (ratio - target).abs() / target
    };
    let (d3, d4, d5) = (dev(1_000), dev(10_000), dev(100_000));
    let checks = [
        ((target - 2.6).abs() <= 1e-12, format!("target {target}")),
        (d3 <= 0.05, format!("k=1e3 dev {d3:.3e} <= 5%")),
        (d5 <= 0.02, format!("k=1e5 dev {d5:.3e} <= 2%")),
        (d4 < d3 && d5 < d4, format!("decreasing: {d3:.3e}, {d4:.3e}, {d5:.3e}")),
    ];
    assert!(report(6, "Weyl ratio for 1x1 in 2x1.3", &checks, t.elapsed(), Duration::from_secs(60)));
}

#[test]
fn criterion_7_bracketing_suites() {
    let t = Instant::now();
    let domains = [
        DomainSpec::Square { side: 1.0 },
        DomainSpec::Rhombus { diameter: 2.0, theta: 10f64.to_radians() },
        DomainSpec::EquilateralTriangle { side: 1.0 },
        DomainSpec::RegularPolygon { n_vertices: 64, circumradius: 1.0 },
    ];
    let mut checks = Vec::new();
    for spec in &domains {
        let diam = build(spec).unwrap().diameter();
        let neu = eigen_estimates(spec, 6, 1, &DirichletSelector::None).unwrap();
        let dir = eigen_estimates(spec, 5, 1, &DirichletSelector::All).unwrap();
        let mut bracket = true;
        let mut kroger = true;
        for k in 1..=5 {
            bracket &= neu[k].finest().value <= dir[k - 1].finest().value;
            bracket &= neu[k].value <= dir[k - 1].value + neu[k].error_estimate + dir[k - 1].error_estimate;
            kroger &= neu[k].value <= 1.005 * kroger_upper(k, 2, diam).unwrap() + neu[k].error_estimate;
        }
        let pw = payne_weinberger_lower(diam).unwrap();
        let pw_ok = neu[1].value + neu[1].error_estimate >= 0.995 * pw;
        let zero = neu[0].finest().value.abs() <= 1e-8 * neu[1].finest().value;
        checks.push((bracket, format!("{spec}: mu_k <= lambda_k, k <= 5")));
        checks.push((kroger, format!("{spec}: mu_k <= 1.005 Kroger, k <= 5")));
        checks.push((pw_ok, format!("{spec}: mu_1 {:.4} >= 0.995 PW {pw:.4}", neu[1].value)));
        checks.push((zero, format!("{spec}: discrete zero mode")));
    }
    assert!(report(7, "bracketing, Payne-Weinberger and Kroger", &checks, t.elapsed(), Duration::from_secs(600)));
}

#[test]
fn criterion_8_counterexamples() {
    let t = Instant::now();
    let seg = segment_spectrum(1.0, BoundaryCondition::Neumann, 2).unwrap().values()[1];
    let s = 0.5f64.sqrt();
    let sq = box_spectrum(&[s, s], BoundaryCondition::Neumann, 2).unwrap().values()[1];
    let ratio = seg / sq;
    let mut checks = vec![((ratio - 0.5).abs() <= 1e-12, format!("segment/square ratio {ratio} = 0.5 (1e-12)"))];
    for j in [2usize, 3] {
        let n = j * j;
        let parts = vec![disk_neumann_prefix(1.0 / j as f64).unwrap(); n];
        let u = disjoint_union_spectrum(&parts, n + 1).unwrap();
        let (z, first) = (u.values()[n - 1], u.values()[n]);
        checks.push((z == 0.0 && first > 0.0, format!("j={j}: mu_{} = {z}, mu_{n} = {first:.4}", n - 1)));
    }
    assert!(report(8, "closed-form counterexamples", &checks, t.elapsed(), Duration::from_secs(1)));
}

#[test]
fn criterion_9_determinism() {
    let (first, _) = first_scan();
    let t = Instant::now();
    // Second run on a single-thread pool: scheduling must not matter either.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let second = pool.install(|| ratio_scan(200, 1, 1, 12, 6, PairShape::Mixed, false).unwrap());
    let (a, b) = (first.to_csv(), second.to_csv());
    let checks = [
        (a == b, format!("CSV byte-identical ({} bytes)", a.len())),
        (first.verdicts_json() == second.verdicts_json(), "verdict JSON byte-identical".to_string()),
    ];
    assert!(report(9, "ratio scan rerun with the same seed", &checks, t.elapsed(), Duration::from_secs(1800)));
}
