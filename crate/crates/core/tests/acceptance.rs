//! Acceptance suite: one line per criterion.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails. Criteria listed in `KNOWN_RED` are implemented at full
//! strength and are expected to fail at desk-scale parameters; they print
//! `[FAIL]` but do not fail the process. Any other failure does.

use num_complex::Complex64;
use ssflab::asymptotics::{
    approaches_one_monotonically, expansion_residuals, frak_c, inversion_suite, is_non_increasing, phi1, profile, ssf_predict,
    verify_msf1, verify_msf2, Boundary, Side, INVERSION_CONSTANTS,
};
use ssflab::capacity::{capacity, FeketeConfig};
use ssflab::counting::RandomSuite;
use ssflab::effective::{
    check_double_step, check_level_shift, check_single_step, m6_vs_m7, BasisTable, CutoffField, FormCheckConfig, Grid2, GridSpec,
};
use ssflab::geometry::PlanarSet;
use ssflab::resolvent::{hs_norm, random_bound_suite, Cutoff1D, HsConfig, KernelSpec, KernelVariant};
use ssflab::toeplitz::{fipu_residuals, radial_oracle, radial_oracle_sequence, spectrum, toeplitz_matrix, QuadConfig};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

/// Criteria that fail at the parameters fixed by the acceptance text.
const KNOWN_RED: [(u32, &str); 3] = [
    (4, "the counting ratio converges like 1/ln ln(1/lambda); about 1.106 at ln lambda = -2.6e4"),
    (5, "same slow convergence for the arctan-trace ratio"),
    (9, "for C = -1 the normalized expansion residual grows over 1e6..1e15"),
];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `P(k+1, 1) = e^-1 sum_{j > k} 1/j!`, summed from the tail without cancellation.
fn gamma_p_at_one(k: usize) -> f64 {
    let mut term = 1.0f64;
    for j in 1..=k + 1 {
        term /= j as f64;
    }
    let (mut sum, mut j) = (0.0f64, k + 1);
    while term > 1e-18 * sum {
        sum += term;
        j += 1;
        term /= j as f64;
    }
    sum * (-1f64).exp()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let cfg = FeketeConfig::default();
    let t = Instant::now();
    let disk = capacity(&PlanarSet::disk([0.0, 0.0], 1.0), &[50, 100, 200], &cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    o.check(rel(disk.value, 1.0) <= 0.01, format!("unit disk cap {:.6} (tol 1%)", disk.value));
    o.check(secs < 10.0, format!("n = 200 schedule took {secs:.2} s (< 10 s)"));
    let seg = capacity(&PlanarSet::segment([-2.0, 0.0], [2.0, 0.0]), &[50, 100, 200], &cfg).unwrap();
    o.check(rel(seg.value, 1.0) <= 0.02, format!("segment of length 4 cap {:.6} (tol 2%)", seg.value));
    let square = PlanarSet::square([0.0, 0.0], 1.0);
    let base = capacity(&square, &[30, 60], &cfg).unwrap().value;
    let mut worst = 0.0f64;
    let mut s = 0.05f64;
    for i in 0..20 {
        // deterministic spread over [0.05, 20]
        s *= 1.37;
        let shift = [0.1 * i as f64, -0.2 * i as f64];
        let v = capacity(&square.clone().scaled(s, shift), &[30, 60], &cfg).unwrap().value;
        worst = worst.max(rel(v, s * base));
    }
    o.check(worst <= 1e-9, format!("scaling law on 20 factors, worst relative deviation {worst:.2e} (tol 1e-9)"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let disk = PlanarSet::disk([0.0, 0.0], 1.0);
    let b = 2.0;
    for q in 0..3 {
        let op = toeplitz_matrix(&disk, q, b, 40, &QuadConfig::default()).unwrap();
        let seq = spectrum(&op).unwrap();
        let mut oracle: Vec<f64> = (0..=40).map(|k| radial_oracle(1.0, q, b, k)).collect();
        oracle.sort_by(|x, y| y.total_cmp(x));
        let worst = (0..20).map(|k| rel(seq.nu[k], oracle[k])).fold(0.0, f64::max);
        o.check(worst <= 1e-8, format!("q = {q}: leading 20 vs radial oracle, worst relative {worst:.2e} (tol 1e-8)"));
        if q == 0 {
            let w = (0..20).map(|k| rel(seq.nu[k], gamma_p_at_one(k))).fold(0.0, f64::max);
            o.check(w <= 1e-9, format!("q = 0: against P(k+1, 1), worst relative {w:.2e} (tol 1e-9)"));
            let nu0 = 1.0 - (-1f64).exp();
            o.check(rel(seq.nu[0], nu0) <= 1e-9, format!("nu_0 = {:.15} vs 1 - 1/e", seq.nu[0]));
        }
    }
    o
}

fn residual_gate(o: &mut Outcome, label: &str, set: &PlanarSet, b: f64, cap: f64, tol: f64) {
    let op = toeplitz_matrix(set, 0, b, 60, &QuadConfig::default()).unwrap();
    let seq = spectrum(&op).unwrap();
    let r: Vec<f64> = fipu_residuals(&seq, frak_c(b, cap).unwrap()).into_iter().filter(|(k, _)| (20..=40).contains(k)).map(|x| x.1).collect();
    let at40 = *r.last().unwrap();
    o.check(at40 < tol, format!("{label}: residual at k = 40 is {at40:.4} (tol {tol})"));
    o.check(is_non_increasing(&r), format!("{label}: residual decreasing over k in [20, 40] ({:.4} -> {at40:.4})", r[0]));
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    residual_gate(&mut o, "centered disk", &PlanarSet::disk([0.0, 0.0], 1.0), 2.0, 1.0, 0.25);
    let square = PlanarSet::square([0.0, 0.0], 1.0);
    let cap = capacity(&square, &[50, 100, 200], &FeketeConfig::default()).unwrap().value;
    residual_gate(&mut o, &format!("unit square (cap {cap:.5})"), &square, 2.0, cap, 0.3);
    o
}

const MSF_SCHEDULE: [f64; 3] = [-1e3, -1e4, -2.6e4];

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    for q in 0..2 {
        let seq = radial_oracle_sequence(1.0, q, 2.0, 2000);
        for c in [1.0, 10.0] {
            let t = verify_msf1(&seq, c, 2.0, 1.0, &MSF_SCHEDULE).unwrap();
            let r = t.ratios();
            let deep = *r.last().unwrap();
            o.check(
                r.len() == 3 && (deep - 1.0).abs() <= 0.1 && approaches_one_monotonically(&r),
                format!("q = {q}, c = {c}: ratios {r:.4?} (deepest within 10%, monotone)"),
            );
        }
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for q in 0..2 {
        let seq = radial_oracle_sequence(1.0, q, 2.0, 2000);
        for c in [1.0, 10.0] {
            let t2 = verify_msf2(&seq, c, 2.0, 1.0, &MSF_SCHEDULE).unwrap();
            let r = t2.ratios();
            let deep = *r.last().unwrap();
            o.check(
                r.len() == 3 && (deep - 1.0).abs() <= 0.1 && approaches_one_monotonically(&r),
                format!("q = {q}, c = {c}: Tr-arctan ratios {r:.4?} (deepest within 10%, monotone)"),
            );
            let t1 = verify_msf1(&seq, c, 2.0, 1.0, &MSF_SCHEDULE).unwrap();
            let v = t2.rows.last().unwrap().observed / t1.rows.last().unwrap().observed;
            o.check((v - 0.5).abs() <= 0.025, format!("q = {q}, c = {c}: Tr-arctan / count at the deepest point {v:.4} (1/2 within 5%)"));
        }
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let spec = GridSpec { half_perp: 7.0, ..GridSpec::default() };
    for q in 0..3 {
        let cut = CutoffField::gaussian(1.0, 1.0, 1.0, [0.3, -0.2], spec, 1.0, q).unwrap();
        let r = m6_vs_m7(&cut, &FormCheckConfig { k_max: 12, ..FormCheckConfig::default() }).unwrap();
        o.check(r.discrepancy < 1e-6, format!("q = {q}: form discrepancy {:.2e} (tol 1e-6)", r.discrepancy));
    }
    let g = Grid2::centered(128, 6.0);
    let v: Vec<Complex64> = g.points().map(|x| Complex64::new((-(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.1).powi(2)).exp(), 0.0)).collect();
    let mut basis = BasisTable::new(g, 1.0, 12);
    let mut worst = [0.0f64; 3];
    for m in 1..4 {
        let c = check_level_shift(&v, &mut basis, m, 2).unwrap();
        worst[0] = worst[0].max(c.max_abs_diff);
    }
    for q in 0..3 {
        let c = check_single_step(&v, &mut basis, q, 2).unwrap();
        worst[1] = worst[1].max(c.max_abs_diff);
    }
    for q in 1..3 {
        let c = check_double_step(&v, &mut basis, q, 2).unwrap();
        worst[2] = worst[2].max(c.max_abs_diff);
    }
    for (name, w) in ["level shift", "one-step ladder", "two-step ladder"].iter().zip(worst) {
        o.check(w <= 1e-7, format!("{name} identity, dual-path difference {w:.2e} (tol 1e-7)"));
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let suite = RandomSuite { seed: 2024, instances: 200, max_dim: 8 };
    let m3 = suite.m3_agreement(1e-10).unwrap();
    o.check(m3.violations == 0, format!("closed form vs exact average: {} violations / 200, worst {:.2e} (tol 1e-10)", m3.violations, m3.worst));
    let ta = suite.tr_arctan_agreement(1e-12).unwrap();
    o.check(ta.violations == 0, format!("Tr-arctan dual path: {} violations / 200, worst {:.2e} (tol 1e-12)", ta.violations, ta.worst));
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let suite = RandomSuite { seed: 2024, instances: 1000, max_dim: 8 };
    let w = suite.weyl().unwrap();
    o.check(w.violations == 0, format!("Weyl: {} / 1000 violations", w.violations));
    let c = suite.chebyshev(&[1.0, 2.0]).unwrap();
    o.check(c.violations == 0, format!("Chebyshev, p in {{1, 2}}: {} / 1000 violations", c.violations));
    let p = suite.pushnitski_bound().unwrap();
    o.check(p.violations == 0, format!("averaged-count bound: {} / 1000 violations", p.violations));
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let inv = inversion_suite(2024, 200, 1e-12).unwrap();
    o.check(inv.violations == 0, format!("Newton inverse: {} / 200 above 1e-12, worst {:.2e}", inv.violations, inv.worst));
    for c in INVERSION_CONSTANTS {
        let r = expansion_residuals(c, &[1e6, 1e9, 1e12, 1e15]).unwrap();
        o.check(is_non_increasing(&r), format!("C = {c:.4}: normalized expansion residuals {r:.4?} decreasing"));
    }
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let r = random_bound_suite(2024, 500, &HsConfig::default()).unwrap();
    o.check(r.violations == 0, format!("HS norm vs bound: {} / 500 violations, largest norm/bound {:.4}", r.violations, r.worst));
    let c = Cutoff1D::Indicator { a: 0.0, b: 1.0 };
    let mut worst = 0.0f64;
    for a in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let spec = KernelSpec::new(-a * a, KernelVariant::Plain).unwrap();
        let q = hs_norm(&spec, &c, &HsConfig::default()).unwrap();
        let closed = (2.0 * a - 1.0 + (-2.0 * a).exp()) / (2.0 * a * a) / (4.0 * a * a);
        worst = worst.max((q.norm * q.norm - closed).abs());
    }
    o.check(worst <= 1e-8, format!("indicator closed form vs quadrature, worst {worst:.2e} (tol 1e-8)"));
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let (b, cap) = (1.0, 0.8);
    let mut ok = [true; 3];
    for l in [-20.0, -1e2, -1e4, -1e8] {
        for q in 0..3 {
            let p = |side, bd| ssf_predict(q, side, bd, l, b, cap).unwrap();
            let db = p(Side::Below, Boundary::Dirichlet);
            let (da, na, nb) = (p(Side::Above, Boundary::Dirichlet), p(Side::Above, Boundary::Neumann), p(Side::Below, Boundary::Neumann));
            let f = phi1(&profile(l, true).unwrap(), frak_c(b, cap).unwrap()).unwrap();
            ok[0] &= db.bounded_flag;
            ok[1] &= nb.value / na.value == 2.0;
            ok[2] &= da.value - na.value == 0.5 * f;
        }
    }
    o.check(ok[0], "dirichlet below returns the bounded flag".into());
    o.check(ok[1], "neumann below/above ratio is exactly 2".into());
    o.check(ok[2], "dirichlet minus neumann above is exactly Phi_1/2".into());
    o
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "capacity golden values", criterion_1),
        (2, "Toeplitz vs radial oracle", criterion_2),
        (3, "factorial decay residual", criterion_3),
        (4, "counting asymptotics", criterion_4),
        (5, "arctan-trace asymptotics", criterion_5),
        (6, "effective form equivalence", criterion_6),
        (7, "counting identities", criterion_7),
        (8, "inequality suites", criterion_8),
        (9, "inverse of x ln x - Cx", criterion_9),
        (10, "resolvent HS bounds", criterion_10),
        (11, "predictor structure", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Outcome { pass: false, lines: vec![format!("FAIL panicked: {}", msg.unwrap_or_default())] }
        });
        let tag = if outcome.pass { "[PASS]" } else { "[FAIL]" };
        println!("{tag} criterion {id:>2}: {name} ({:.1} s)", t.elapsed().as_secs_f64());
        for l in &outcome.lines {
            println!("         {l}");
        }
        match KNOWN_RED.iter().find(|k| k.0 == id) {
            Some((_, why)) if !outcome.pass => println!("         known red: {why}"),
            None if !outcome.pass => unexpected.push(id),
            _ => {}
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
