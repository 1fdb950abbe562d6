//! Acceptance run: one PASS / FAIL / FLAG line per criterion.
//!
//! Runs without the libtest harness so the lines appear in order. The process
//! fails when a criterion fails that is not listed in `KNOWN_FAILURES`.
//! Pass criterion numbers as arguments to run a subset.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::process::ExitCode;
use std::time::Instant;

use himlab::analytic::boundary::{boundary_search, default_grid};
use himlab::analytic::fourier_g::{fourier_g_energies, log_slope, partial_sum_identity};
use himlab::analytic::interpolate_energy;
use himlab::analytic::kernels::{kernel_quotient, kernel_scan, kernels};
use himlab::analytic::pointcontact::{pointcontact_energy, pointcontact_witness, predicted_slope};
use himlab::analytic::seminorm::{bump, extend_pm, gamma_search, h12_seminorm, FourierProfile};
use himlab::assembly::{assemble, det_integral, element_energy, QuadraticForm};
use himlab::bisect::{grid_study, nested_study, BisectOptions, GridMesh};
use himlab::himtest::{decide, descend, pencil_min, start_vector, DescentOptions, Outcome, DEFAULT_SEED};
use himlab::mesh::{build_rect_mesh, Domain, Mesh, Pattern};
use himlab::regions::{element_values, FieldSpec, Island};
use himlab::mesh::Rect;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQRT8: f64 = 2.828_427_124_746_190_3;
const PENCIL_TOL: f64 = 1e-8;
const BISECT_WIDTH: f64 = 1e-4;
/// Criteria that cannot be met by the constructions as built; see README.
const KNOWN_FAILURES: &[usize] = &[6, 11];

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Outcome disagrees with the expected verdict in a case the criterion itself
    /// routes to an open question instead of a failure.
    Flag,
}

struct Report {
    status: Status,
    detail: String,
}

fn report(ok: bool, detail: String) -> Report {
    Report {
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn criss_cross(domain: &Domain, n_div: usize) -> Mesh {
    build_rect_mesh(domain, n_div, Pattern::CrissCross).unwrap()
}

fn form(spec: &FieldSpec, mesh: &Mesh) -> QuadraticForm {
    assemble(mesh, &element_values(spec, mesh).unwrap()).unwrap()
}

fn bisect_options() -> BisectOptions {
    BisectOptions {
        tol: BISECT_WIDTH,
        ..Default::default()
    }
}

fn c1_null_lagrangian() -> Report {
    let base = criss_cross(&Domain::square(1.0, vec![], vec![]), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut sizes = vec![];
    for level in 0..3 {
        let mesh = base.refined(level).unwrap();
        sizes.push(mesh.n_triangles());
        let q = assemble(&mesh, &vec![0.0; mesh.n_triangles()]).unwrap();
        for _ in 0..100 {
            let v: Vec<f64> = (0..q.n_free).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = q.to_nodal(&v).unwrap();
            let ratio = det_integral(&mesh, &u).unwrap().abs() / q.k_energy(&v).unwrap();
            worst = worst.max(ratio);
        }
    }
    report(
        worst <= 1e-10,
        format!("max |int det| / u'Ku = {worst:.2e} over 300 fields on {sizes:?} elements (limit 1e-10)"),
    )
}

fn c2_two_state() -> Report {
    let spec = FieldSpec::HalfDomain { m_value: 1.0 };
    let coarse = criss_cross(&spec.natural_domain(), 4);
    let rows = nested_study(&spec, &coarse, 4, [3.0, 6.0], bisect_options()).unwrap();
    let lams: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let above = lams.iter().all(|&l| l >= 4.0);
    let monotone = lams.windows(2).all(|w| w[1] <= w[0] + BISECT_WIDTH);
    let last = rows.last().unwrap();
    let fine = last.elements >= 16384 && last.lambda <= 4.6;
    report(
        above && monotone && fine,
        format!(
            "M_crit {} at {} elements (>= 4, non-increasing, <= 4.6 at >= 16384)",
            fmt_list(&lams, 4),
            last.elements
        ),
    )
}

fn c3_point_contact() -> Report {
    let spec = FieldSpec::PointContact { c: SQRT8 };
    let coarse = criss_cross(&spec.natural_domain(), 4);
    let rows = nested_study(&spec, &coarse, 5, [1.0, 1.6], bisect_options()).unwrap();
    let lams: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let last = rows.last().unwrap();
    let decreasing = lams.windows(2).all(|w| w[1] < w[0]);
    let in_range = (1.0..=1.2).contains(&last.lambda);
    let on_target = last.elements >= 65536 && (last.lambda - 1.0859).abs() <= 0.05;
    report(
        decreasing && in_range && on_target,
        format!(
            "lambda {} over {:?} elements; finest {:.4} vs 1.0859 +- 0.05",
            fmt_list(&lams, 5),
            rows.iter().map(|r| r.elements).collect::<Vec<_>>(),
            last.lambda
        ),
    )
}

/// Smallest `n_div` giving at least `min` criss-cross elements.
fn aligned_mesh(spec: &FieldSpec, min: usize) -> Mesh {
    let domain = spec.natural_domain();
    (1..)
        .map(|n| criss_cross(&domain, n))
        .find(|m| m.n_triangles() >= min)
        .unwrap()
}

fn verdict(spec: &FieldSpec, mesh: &Mesh) -> (Outcome, f64) {
    let v = decide(&form(spec, mesh), PENCIL_TOL).unwrap();
    (v.outcome, v.mu_min.unwrap())
}

fn c4_insulation_widths() -> Report {
    let cases = [
        (0.25, Outcome::Unbounded),
        (0.5, Outcome::Unbounded),
        (1.0, Outcome::Unbounded),
        (2.0, Outcome::Nonnegative),
    ];
    let mut ok = true;
    let mut parts = vec![];
    for (rho, want) in cases {
        let spec = FieldSpec::insulation_rho(rho, 0.0, 4.0).unwrap();
        let mesh = aligned_mesh(&spec, 16384);
        let (got, mu) = verdict(&spec, &mesh);
        ok &= got == want;
        parts.push(format!("rho={rho}: {got:?} (mu {mu:.5}, {} el)", mesh.n_triangles()));
    }
    report(ok, parts.join("; "))
}

fn c5_insulation_angles() -> Report {
    let cases = [
        (-FRAC_PI_4, "-pi/4", Outcome::Nonnegative),
        (-FRAC_PI_8, "-pi/8", Outcome::Unbounded),
        (FRAC_PI_8, "pi/8", Outcome::Unbounded),
        (FRAC_PI_4, "pi/4", Outcome::Unbounded),
    ];
    let mut others_ok = true;
    let mut first_ok = true;
    let mut parts = vec![];
    for (i, (alpha, name, want)) in cases.into_iter().enumerate() {
        let spec = FieldSpec::Insulation {
            w_minus: 0.6,
            w_zero: 0.8,
            w_plus: 0.6,
            alpha,
            c: 4.0,
        };
        let mesh = aligned_mesh(&spec, 16384);
        let (got, mu) = verdict(&spec, &mesh);
        if i == 0 {
            first_ok = got == want;
        } else {
            others_ok &= got == want;
        }
        parts.push(format!("alpha={name}: {got:?} (mu {mu:.5}, {} el)", mesh.n_triangles()));
    }
    let mut r = report(first_ok && others_ok, parts.join("; "));
    if others_ok && !first_ok {
        r.status = Status::Flag;
        r.detail += "; alpha=-pi/4 disagrees: open question on the deflected geometry";
    }
    r
}

fn c6_grid_study() -> Report {
    let grid = GridMesh {
        cells: 48,
        pattern: Pattern::CrissCross,
    };
    let mut verdicts = vec![];
    for m in 3..=5 {
        let spec = FieldSpec::DiagonalGrid { m };
        let mesh = grid.build(m).unwrap();
        verdicts.push((m, verdict(&spec, &mesh).0));
    }
    let study = grid_study(3..=12, grid, [0.1, 2.0], bisect_options()).unwrap();
    let fit = study.fit.as_ref().unwrap();
    let all_unbounded = verdicts.iter().all(|(_, v)| *v == Outcome::Unbounded);
    let c0_ok = (4.2..=5.2).contains(&fit.c0) && study.error.is_none();
    let lams: Vec<String> = study.rows.iter().map(|r| format!("{}:{:.4}", r.m, r.lambda)).collect();
    report(
        all_unbounded && c0_ok,
        format!(
            "lambda=1 verdicts {:?}; lambda(m) [{}]; c0 = {:.4} in [4.2, 5.2]; affine fit a = {:.4}, b = {:.4}",
            verdicts,
            lams.join(" "),
            fit.c0,
            fit.affine.0,
            fit.affine.1
        ),
    )
}

/// Midpoint double sum of `(h(t) - h(s))^2 / (4 sin^2((t - s)/2))` over the
/// torus, the periodised form of the defining double integral. The skipped
/// diagonal cell contributes about `h'^2 dt^2` per row.
fn seminorm_oracle(h: &dyn Fn(f64) -> f64, m: usize) -> f64 {
    let dt = 2.0 * PI / m as f64;
    let vals: Vec<f64> = (0..m).map(|j| h((j as f64 + 0.5) * dt)).collect();
    let mut s: f64 = (0..m)
        .map(|i| ((vals[(i + 1) % m] - vals[(i + m - 1) % m]) / (2.0 * dt)).powi(2))
        .sum();
    for k in 1..m {
        let w = 1.0 / (4.0 * (0.5 * k as f64 * dt).sin().powi(2));
        for i in 0..m {
            let d = vals[i] - vals[(i + k) % m];
            s += d * d * w;
        }
    }
    s * dt * dt
}

type Profile = Box<dyn Fn(f64) -> f64>;

fn c7_seminorm() -> Report {
    let wide = |t: f64| bump(FRAC_PI_2, FRAC_PI_4, t);
    let fold = |h: fn(f64) -> f64, sign: f64| {
        move |t: f64| {
            let t = t.rem_euclid(2.0 * PI);
            if t < PI {
                h(t)
            } else {
                sign * h(t - PI)
            }
        }
    };
    let wide_fn: fn(f64) -> f64 = |t| bump(FRAC_PI_2, FRAC_PI_4, t);
    let pair_fn: fn(f64) -> f64 = |t| bump(1.0, 0.2, t) + bump(PI - 1.0, 0.2, t);
    let profiles: Vec<(&str, Profile)> = vec![
        ("exp(cos)", Box::new(|t: f64| t.cos().exp())),
        ("1/(2+sin)", Box::new(|t: f64| 1.0 / (2.0 + t.sin()))),
        ("cos 3t + sin t / 2", Box::new(|t: f64| (3.0 * t).cos() + 0.5 * t.sin())),
        ("h+ of a wide bump", Box::new(fold(wide_fn, 1.0))),
        ("h- of two bumps", Box::new(fold(pair_fn, -1.0))),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = vec![];
    for (name, h) in &profiles {
        let samples: Vec<f64> = (0..512).map(|j| h(2.0 * PI * j as f64 / 512.0)).collect();
        let series = h12_seminorm(&FourierProfile::from_samples(&samples));
        let oracle = seminorm_oracle(h.as_ref(), 2048);
        let rel = (series / oracle - 1.0).abs();
        worst = worst.max(rel);
        parts.push(format!("{name}: {series:.5}/{oracle:.5}"));
    }
    // The bump profiles also go through the even/odd extension.
    let (hp, _) = extend_pm(wide, 512).unwrap();
    let via_pm = h12_seminorm(&hp);
    let direct = seminorm_oracle(&fold(wide_fn, 1.0), 2048);
    worst = worst.max((via_pm / direct - 1.0).abs());
    let single = h12_seminorm(&FourierProfile::new(0.0, vec![1.0], vec![0.0]).unwrap());
    let single_err = (single - 2.0 * PI * PI).abs();
    report(
        worst <= 0.01 && single_err <= 1e-12,
        format!(
            "max relative gap {worst:.2e} (limit 1e-2) [{}]; cos t: |s - 2pi^2| = {single_err:.1e}",
            parts.join(", ")
        ),
    )
}

fn c8_kernels() -> Report {
    let scan = kernel_scan(33, 10_000).unwrap();
    let scan_ok = scan.min >= 0.5 - 1e-9;
    // Scaled remainders: k (pi k^2 K5 - 1), k (2 pi k^2 sum K_j - 1) and
    // k^2 (Q - 1/2) stay bounded if the stated orders hold.
    let mut worst = [0.0_f64; 3];
    for phi in [FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4] {
        for k in [100u64, 1000, 10_000] {
            let ks = kernels(phi, k);
            let kf = k as f64;
            let k2 = PI * kf * kf;
            let sum: f64 = ks[..4].iter().sum();
            worst[0] = worst[0].max(kf * (k2 * ks[4] - 1.0).abs());
            worst[1] = worst[1].max(kf * (2.0 * k2 * sum - 1.0).abs());
            worst[2] = worst[2].max(kf * kf * (kernel_quotient(phi, k).unwrap() - 0.5).abs());
        }
    }
    let q_far = (kernel_quotient(1.0, 10_000).unwrap() - 0.5).abs();
    let orders_ok = worst.iter().all(|&w| w <= 10.0) && q_far <= 1e-4;
    report(
        scan_ok && orders_ok,
        format!(
            "min Q = {:.12} at phi = {:.4}, k = {} (>= 0.5 - 1e-9); scaled remainders {:.3} {:.3} {:.3} (<= 10); |Q(1, 1e4) - 1/2| = {q_far:.1e}",
            scan.min, scan.phi, scan.k, worst[0], worst[1], worst[2]
        ),
    )
}

fn c9_gamma() -> Report {
    let s = gamma_search(1000, DEFAULT_SEED).unwrap();
    report(
        s.min_ratio >= 0.24,
        format!("min [h+]^2 / [h-]^2 = {:.4} over {} profiles (>= 0.24)", s.min_ratio, s.members),
    )
}

fn c10_fourier_g() -> Report {
    let n = 10_000;
    let e = fourier_g_energies(n);
    let ratio = e.d_q1 / (2.0 * PI * (n as f64).ln());
    let ns = [100.0, 300.0, 1000.0, 3000.0, 10_000.0];
    let q2: Vec<f64> = ns.iter().map(|&n| fourier_g_energies(n as usize).d_q2).collect();
    let slope = log_slope(&ns, &q2);
    let ps = partial_sum_identity(1, 1_000_000);
    let ps_err = (ps.sum - ps.closed_form).abs();
    report(
        (0.95..=1.05).contains(&ratio) && slope.abs() < 0.05 && ps_err <= 2e-6,
        format!(
            "D(g;Q1)/(2 pi ln N) = {ratio:.4} at N=1e4; D(g;Q2) slope vs ln N = {slope:.2e}; partial sum error {ps_err:.2e} (<= 2e-6)"
        ),
    )
}

fn c11_pointcontact() -> Report {
    let (rho, c, r) = (0.75, 3.0, 1.4);
    let spec = FieldSpec::PointContact { c };
    let domain = Domain::square(r, vec![-1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0]);
    let mesh = build_rect_mesh(&domain, 300, Pattern::Diagonal).unwrap();
    let ns = [8usize, 16, 32, 64];
    let mut fem = vec![];
    for &n in &ns {
        let w = pointcontact_witness(n, rho, c, r).unwrap();
        fem.push(interpolate_energy(&mesh, &spec, &w).unwrap());
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = log_slope(&xs, &fem);
    let target = predicted_slope(rho, c);
    let slope_ok = (slope / target - 1.0).abs() <= 0.2;
    let negative = fem[3] < 0.0;
    let continuum: Vec<(usize, f64)> = [64usize, 128, 256]
        .iter()
        .map(|&n| (n, pointcontact_energy(n, rho, c, r).unwrap().total))
        .collect();
    let first_negative = continuum.iter().find(|(_, e)| *e < 0.0).map(|(n, _)| *n);
    let exact: Vec<f64> = ns.iter().map(|&n| pointcontact_energy(n, rho, c, r).unwrap().total).collect();
    let exact_slope = log_slope(&xs, &exact);
    report(
        negative && slope_ok,
        format!(
            "interpolated energy {} for N = {ns:?} on {} elements; N=64 negative: {negative}; slope {slope:.4} vs {target:.4} (20%: {slope_ok}); continuum slope {exact_slope:.4}; continuum {} first negative at N = {first_negative:?}",
            fmt_list(&fem, 4),
            mesh.n_triangles(),
            continuum.iter().map(|(n, e)| format!("{n}:{e:.3}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn c12_boundary() -> Report {
    let grid = default_grid();
    let hot = boundary_search(2.5, &grid).unwrap();
    let sharp = boundary_search(2.0, &grid).unwrap();
    report(
        hot.min < 0.0 && sharp.min >= -1e-6,
        format!(
            "c=2.5: min {:.4e} at (delta, R0) = ({}, {}); c=2: min {:.4e} (>= -1e-6)",
            hot.min, hot.argmin.0, hot.argmin.1, sharp.min
        ),
    )
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(0x4143_4345),
        failure_persistence: None,
        ..Config::default()
    })
}

fn any_field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        (-5.0..5.0f64).prop_map(|c| FieldSpec::Constant { c }),
        (-6.0..6.0f64).prop_map(|m| FieldSpec::HalfDomain { m_value: m }),
        (0.0..5.0f64).prop_map(|c| FieldSpec::PointContact { c }),
        (-6.0..6.0f64).prop_map(|m| FieldSpec::TwoStateIsland {
            island: Island::Rect(Rect::new(-0.5, 0.5, -0.5, 0.5)),
            m_value: m,
        }),
    ]
}

fn c13_properties() -> Report {
    let mesh_for = |spec: &FieldSpec, n: usize| criss_cross(&spec.natural_domain(), n);
    let mut results = vec![];

    let r = runner(32).run(&(any_field(), -4.0..4.0f64, any::<u64>()), |(spec, lambda, seed)| {
        let q = form(&spec, &mesh_for(&spec, 4));
        let u = start_vector(&q, seed);
        let lu: Vec<f64> = u.iter().map(|v| lambda * v).collect();
        let (e, el) = (q.energy(&u).unwrap(), q.energy(&lu).unwrap());
        prop_assert!((el - lambda * lambda * e).abs() <= 1e-12 * (1.0 + el.abs()));
        Ok(())
    });
    results.push(("homogeneity", r.map_err(|e| e.to_string())));

    let r = runner(32).run(&(any_field(), any::<u64>()), |(spec, seed)| {
        let mesh = mesh_for(&spec, 4);
        let f = element_values(&spec, &mesh).unwrap();
        let mean = f.iter().zip(&mesh.area).map(|(v, a)| v * a).sum::<f64>() / mesh.total_area();
        let shifted: Vec<f64> = f.iter().map(|v| v - mean).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<[f64; 2]> = mesh
            .boundary
            .iter()
            .map(|&b| if b { [0.0; 2] } else { [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)] })
            .collect();
        let (dir, det) = element_energy(&mesh, &f, &u).unwrap();
        let (dir2, det2) = element_energy(&mesh, &shifted, &u).unwrap();
        let split = dir2 + det2 + mean * det_integral(&mesh, &u).unwrap();
        prop_assert!((dir + det - split).abs() <= 1e-10 * dir);
        Ok(())
    });
    results.push(("mean-shift", r.map_err(|e| e.to_string())));

    let r = runner(8).run(&(any_field(), any::<u64>()), |(spec, seed)| {
        let q = form(&spec, &mesh_for(&spec, 3));
        let v = decide(&q, PENCIL_TOL).unwrap();
        prop_assume!((v.mu_min.unwrap() + 1.0).abs() > 1e-3);
        let d = descend(&q, &start_vector(&q, seed), DescentOptions::default()).unwrap();
        prop_assert_eq!(d.verdict.outcome, v.outcome);
        Ok(())
    });
    results.push(("pencil/descent", r.map_err(|e| e.to_string())));

    let r = runner(8).run(&any_field(), |spec| {
        let coarse = mesh_for(&spec, 2);
        let fine = coarse.refine().unwrap();
        let mc = pencil_min(&form(&spec, &coarse), 1e-10).unwrap().mu_min;
        let mf = pencil_min(&form(&spec, &fine), 1e-10).unwrap().mu_min;
        prop_assert!(mf <= mc + 1e-8);
        Ok(())
    });
    results.push(("nested monotonicity", r.map_err(|e| e.to_string())));

    let r = runner(16).run(&(any::<u64>(), 0.0..4.0f64), |(seed, c)| {
        let spec = FieldSpec::PointContact { c };
        let mesh = mesh_for(&spec, 4);
        let f = element_values(&spec, &mesh).unwrap();
        let rot = |p: [f64; 2]| [-p[1], p[0]];
        let turned = mesh.map_nodes(rot).unwrap();
        let q = assemble(&mesh, &f).unwrap();
        let qr = assemble(&turned, &f).unwrap();
        let v = start_vector(&q, seed);
        let u = q.to_nodal(&v).unwrap();
        let ru: Vec<[f64; 2]> = u.iter().map(|&w| rot(w)).collect();
        let er = qr.energy(&qr.from_nodal(&ru).unwrap()).unwrap();
        prop_assert!((q.energy(&v).unwrap() - er).abs() <= 1e-12 * q.k_energy(&v).unwrap());
        Ok(())
    });
    results.push(("rotation equivariance", r.map_err(|e| e.to_string())));

    let ok = results.iter().all(|(_, r)| r.is_ok());
    let detail = results
        .iter()
        .map(|(name, r)| match r {
            Ok(()) => format!("{name} ok"),
            Err(e) => format!("{name} FAILED: {e}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    report(ok, detail)
}

fn fmt_list(xs: &[f64], digits: usize) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}

type Criterion = fn() -> Report;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 13] = [
        ("null-Lagrangian exactness", c1_null_lagrangian),
        ("two-state threshold", c2_two_state),
        ("point-contact lambda", c3_point_contact),
        ("insulation width sweep", c4_insulation_widths),
        ("insulation angle sweep", c5_insulation_angles),
        ("diagonal grid study", c6_grid_study),
        ("H^1/2 identity", c7_seminorm),
        ("kernel inequalities", c8_kernels),
        ("gamma_0 evidence", c9_gamma),
        ("Fourier g energies", c10_fourier_g),
        ("point-contact witness", c11_pointcontact),
        ("boundary witness", c12_boundary),
        ("property suite", c13_properties),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut unexpected = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let r = run();
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flag => "FLAG",
        };
        println!("{tag} {id:>2} {name} ({:.1} s): {}", t.elapsed().as_secs_f64(), r.detail);
        if r.status == Status::Fail && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
