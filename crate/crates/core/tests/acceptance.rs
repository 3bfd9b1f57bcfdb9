//! Acceptance criteria 1 to 9. Each criterion prints one PASS or FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::io::Write;
use std::thread;
use std::time::{Duration, Instant};

use common::{brute_force, max_diff};
use pnp_core::detector::compute_alpha;
use pnp_core::diagnostics::{extrema, smallness_margin, StepReport};
use pnp_core::fespace::FeSpace;
use pnp_core::mesh::{build_sym_stencils, check_acuteness, BoundaryTag, Mesh};
use pnp_core::scenarios::{Builtin, MeshSpec, ScenarioSpec};
use pnp_core::solver::{RunSummary, Simulation};
use pnp_core::stabilizer::{build_b1, build_b2, star_transport, Charge, EntropyFns, StabMatrix};
use pnp_core::{Algorithm, BoundarySpec, Field, SolverConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ALGORITHMS: [Algorithm; 2] = [Algorithm::Alg1, Algorithm::Alg2];

struct Verdict {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn verdict(id: u8, name: &'static str, start: Instant, limit: Option<Duration>, pass: bool, detail: String) -> Verdict {
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let detail = match limit {
        Some(l) if !in_time => format!("{detail}; exceeded the {}s budget", l.as_secs()),
        _ => detail,
    };
    Verdict { id, name, pass: pass && in_time, detail, elapsed }
}

fn square(n: usize) -> Mesh {
    Mesh::unit_square(n, [0.0, 0.0]).unwrap()
}

fn random_field(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn relative_drift(reports: &[StepReport], get: fn(&StepReport) -> f64) -> f64 {
    let m0 = get(&reports[0]);
    reports.iter().map(|r| (get(r) - m0).abs() / m0.abs()).fold(0.0, f64::max)
}

fn run(mesh: &Mesh, spec: &ScenarioSpec, config: &SolverConfig) -> Result<RunSummary, pnp_core::Error> {
    let (p0, n0) = spec.initial_fields(mesh)?;
    Simulation::new(mesh, &spec.bc, config, p0, n0)?.run(|_, _| {})
}

fn stabilizer_algebra() -> Verdict {
    let start = Instant::now();
    let mesh = square(8);
    let nn = mesh.num_nodes();
    let st = build_sym_stencils(&mesh).unwrap();
    let fe = FeSpace::new(&mesh);
    let (m, kmat) = (fe.mass(), fe.stiffness());
    let fns = EntropyFns::new(1e-3).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    let (mut row, mut asym, mut quad) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut check = |b: &StabMatrix, probe: &[f64]| {
        row = b.matrix().row_sums().iter().fold(row, |a, r| a.max(r.abs()));
        for &(i, j, _) in b.beta() {
            asym = asym.max((b.beta_at(i, j) - b.beta_at(j, i)).abs());
        }
        asym = asym.max(b.matrix().asymmetry());
        quad = quad.min(b.quadratic_form(probe)).min(b.matrix().bilinear(probe, probe));
    };
    for _ in 0..100 {
        let x = random_field(&mut rng, nn, 0.0, 4.0);
        let phi = random_field(&mut rng, nn, -20.0, 20.0);
        let probe = random_field(&mut rng, nn, -1.0, 1.0);
        let alpha = compute_alpha(&x, 2.0, &mesh, &st);
        let g = fe.drift(&phi);
        for charge in [Charge::Positive, Charge::Negative] {
            check(&build_b1(charge, &alpha, 1e-3, &m, &kmat, &g).unwrap(), &probe);
            check(&build_b2(charge, &x, &phi, &alpha, &fns, &kmat), &probe);
            check(&build_b2(charge, &x, &phi, &alpha, &fns, &kmat), &x);
        }
    }
    let pass = row <= 1e-13 && asym == 0.0 && quad >= -1e-12;
    let detail = format!("max |row sum| {row:.2e}, beta asymmetry {asym:.1e}, min quadratic form {quad:.3e}");
    verdict(1, "stabilizer algebra", start, Some(Duration::from_secs(5)), pass, detail)
}

fn detector() -> Verdict {
    let start = Instant::now();
    let mesh = square(8);
    let nn = mesh.num_nodes();
    let st = build_sym_stencils(&mesh).unwrap();
    let mut rng = StdRng::seed_from_u64(2);
    let (mut range_ok, mut planted_ok) = (true, true);
    for trial in 0..1000 {
        let mut x = random_field(&mut rng, nn, -10.0, 10.0);
        let a = compute_alpha(&x, 2.0, &mesh, &st);
        range_ok &= a.iter().all(|v| (0.0..=1.0).contains(v));
        let i = rng.gen_range(0..nn);
        let around = mesh.neighbors(i).iter().filter(|&&j| j != i).map(|&j| x[j]);
        x[i] = if trial % 2 == 0 {
            around.fold(f64::NEG_INFINITY, f64::max) + rng.gen_range(0.01..1.0)
        } else {
            around.fold(f64::INFINITY, f64::min) - rng.gen_range(0.01..1.0)
        };
        planted_ok &= compute_alpha(&x, 2.0, &mesh, &st)[i] == 1.0;
    }
    let constant_ok = compute_alpha(&vec![2.5; nn], 2.0, &mesh, &st).iter().all(|&v| v == 0.0);
    let mut linear_max = 0.0f64;
    for _ in 0..100 {
        let c: [f64; 3] = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let x: Vec<f64> = mesh.nodes().iter().map(|p| c[0] + c[1] * p[0] + c[2] * p[1]).collect();
        let a = compute_alpha(&x, 2.0, &mesh, &st);
        for i in (0..nn).filter(|&i| !mesh.is_boundary(i)) {
            linear_max = linear_max.max(a[i]);
        }
    }
    let pass = range_ok && planted_ok && constant_ok && linear_max <= 1e-20;
    let detail = format!(
        "range {range_ok}, planted extrema {planted_ok}, constants {constant_ok}, max interior alpha on linear fields {linear_max:.1e}"
    );
    verdict(2, "shock detector", start, Some(Duration::from_secs(5)), pass, detail)
}

fn assembly() -> Verdict {
    let start = Instant::now();
    let two = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]]).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for mesh in [two, square(4)] {
        let u = random_field(&mut rng, mesh.num_nodes(), -3.0, 3.0);
        let fe = FeSpace::new(&mesh);
        let o = brute_force(&mesh, &u);
        worst = worst
            .max(max_diff(&fe.mass(), &o.m))
            .max(max_diff(&fe.stiffness(), &o.k))
            .max(max_diff(&fe.drift(&u), &o.g));
    }
    verdict(3, "assembly oracle", start, None, worst <= 1e-12, format!("max entry difference {worst:.2e}"))
}

/// Smooth data on the 20 x 20 square, 200 steps of each scheme.
fn smooth_runs() -> [Verdict; 2] {
    let start = Instant::now();
    let mesh = square(20);
    let mut dmp = Vec::new();
    let mut drift = Vec::new();
    let mut ok = (true, true);
    for alg in ALGORITHMS {
        let spec = ScenarioSpec::builtin(Builtin::Smooth, alg);
        let config = SolverConfig { t_final: 200.0 * spec.config.k, ..spec.config.clone() };
        match run(&mesh, &spec, &config) {
            Ok(s) if s.reports.len() == 201 => {
                let r0 = &s.reports[0];
                let (lo, hi) = (r0.min_p.min(r0.min_n), r0.max_p.max(r0.max_n));
                let excess = s
                    .reports
                    .iter()
                    .map(|r| (lo - r.min_p.min(r.min_n)).max(r.max_p.max(r.max_n) - hi))
                    .fold(f64::NEG_INFINITY, f64::max);
                let margin = smallness_margin(config.k, lo, hi);
                ok.0 &= excess <= 1e-10 && margin > 0.0 && s.reports.iter().all(|r| r.flags.smallness_ok);
                let (dp, dn) = (relative_drift(&s.reports, |r| r.mass_p), relative_drift(&s.reports, |r| r.mass_n));
                ok.1 &= dp <= 1e-10 && dn <= 1e-10;
                dmp.push(format!("alg{} bound excess {excess:.1e}, 1 - k(max0 - min0) = {margin:.4}", alg.number()));
                drift.push(format!("alg{} drift p {dp:.1e}, n {dn:.1e}", alg.number()));
            }
            Ok(s) => {
                ok = (false, false);
                dmp.push(format!("alg{} stopped after {} reports", alg.number(), s.reports.len()));
            }
            Err(e) => {
                ok = (false, false);
                dmp.push(format!("alg{} failed: {e}", alg.number()));
            }
        }
    }
    [
        verdict(4, "maximum principle", start, Some(Duration::from_secs(300)), ok.0, dmp.join("; ")),
        verdict(5, "mass conservation", start, Some(Duration::from_secs(300)), ok.1, drift.join("; ")),
    ]
}

fn entropy_decay() -> Verdict {
    let start = Instant::now();
    let mesh = MeshSpec::Equilateral { nx: 24, ny: 24, spacing: 1.0 / 24.0 }.build().unwrap();
    let acute = check_acuteness(&mesh, &FeSpace::new(&mesh).stiffness());
    let spec = ScenarioSpec::builtin(Builtin::Smooth, Algorithm::Alg2);
    let config = SolverConfig { t_final: 200.0 * spec.config.k, ..spec.config.clone() };
    let (pass, detail) = match run(&mesh, &spec, &config) {
        Ok(s) => {
            let e: Vec<f64> = s.reports.iter().map(|r| r.entropy).collect();
            let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            let finite = e.iter().all(|v| v.is_finite());
            let cumulative = e.iter().all(|&v| v <= e[0]);
            let pass = acute.is_acute && finite && s.reports.len() == 201 && rise <= 1e-8 && cumulative;
            (
                pass,
                format!(
                    "acute {} (c_ang {:.3e}), E_h {:.6e} -> {:.6e}, max step increase {rise:.1e}, E_h(m) <= E_h(0) {cumulative}",
                    acute.is_acute,
                    acute.c_ang,
                    e[0],
                    e[e.len() - 1]
                ),
            )
        }
        Err(e) => (false, format!("run failed: {e}")),
    };
    verdict(6, "entropy decay", start, None, pass, detail)
}

fn star_consistency() -> Verdict {
    let start = Instant::now();
    let mesh = square(8);
    let nn = mesh.num_nodes();
    let kmat = FeSpace::new(&mesh).stiffness();
    let fns = EntropyFns::new(0.05).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let (mut worst, mut distinct) = (0.0f64, true);
    for _ in 0..100 {
        let x = random_field(&mut rng, nn, 0.1, 5.0);
        let phi = random_field(&mut rng, nn, -1.0, 1.0);
        let mut sorted = x.clone();
        sorted.sort_by(f64::total_cmp);
        distinct &= sorted.windows(2).all(|w| w[0] < w[1]);
        let xbar: Vec<f64> = x.iter().map(|&v| fns.dg_eps(v)).collect();
        let direct = kmat.bilinear(&x, &phi);
        let star = star_transport(&x, &phi, &xbar, &fns, &kmat);
        worst = worst.max((star - direct).abs() / direct.abs().max(1.0));
    }
    let pass = distinct && worst <= 1e-11;
    verdict(7, "star form consistency", start, None, pass, format!("max difference {worst:.2e} (relative above 1)"))
}

/// Channel experiments on the coarse 0.25 grid.
fn channel(which: Builtin) -> Verdict {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for alg in ALGORITHMS {
        let spec = ScenarioSpec { mesh: MeshSpec::Channel { cell: 0.25 }, ..ScenarioSpec::builtin(which, alg) };
        let mesh = spec.mesh.build().unwrap();
        let summary = match run(&mesh, &spec, &spec.config) {
            Ok(s) => s,
            Err(e) => {
                pass = false;
                parts.push(format!("alg{} failed: {e}", alg.number()));
                continue;
            }
        };
        let r = &summary.reports;
        let a = alg.number();
        match which {
            Builtin::ChannelUniform => {
                let ip = extrema(&summary.final_state.p).argmax;
                let in_ = extrema(&summary.final_state.n).argmax;
                let (tp, tn) = (mesh.tag(ip), mesh.tag(in_));
                pass &= tp == BoundaryTag::Bottom && tn == BoundaryTag::Top;
                parts.push(format!("alg{a} argmax p on {}, argmax n on {}", tp.name(), tn.name()));
            }
            Builtin::ChannelWave => {
                let (dp, dn) = (relative_drift(r, |r| r.mass_p), relative_drift(r, |r| r.mass_n));
                pass &= dp <= 1e-10 && dn <= 1e-10;
                parts.push(format!("alg{a} mass drift p {dp:.1e}, n {dn:.1e}"));
            }
            _ => {
                let increasing = r.windows(2).all(|w| w[1].mass_p > w[0].mass_p);
                let dn = relative_drift(r, |r| r.mass_n);
                pass &= increasing && dn <= 1e-10;
                parts.push(format!(
                    "alg{a} mass p {:.4} -> {:.4} strictly increasing {increasing}, n drift {dn:.1e}",
                    r[0].mass_p,
                    r[r.len() - 1].mass_p
                ));
            }
        }
    }
    let name = match which {
        Builtin::ChannelUniform => "channel, uniform data",
        Builtin::ChannelWave => "channel, wave data",
        _ => "channel, selective membrane",
    };
    verdict(8, name, start, Some(Duration::from_secs(600)), pass, parts.join("; "))
}

fn stationary() -> Verdict {
    let start = Instant::now();
    let mesh = square(10);
    let nn = mesh.num_nodes();
    let mut worst = 0.0f64;
    let mut pass = true;
    for alg in ALGORITHMS {
        let config = SolverConfig { algorithm: alg, k: 1e-3, t_final: 50e-3, ..SolverConfig::default() };
        let ones = Field::constant(nn, 1.0);
        let sim = Simulation::new(&mesh, &BoundarySpec::neumann(), &config, ones.clone(), ones).unwrap();
        let mut steps = 0;
        let res = sim.run(|s, _| {
            steps += 1;
            for i in 0..nn {
                worst = worst.max((s.p[i] - 1.0).abs()).max((s.n[i] - 1.0).abs()).max(s.phi[i].abs());
            }
        });
        pass &= res.is_ok() && steps == 51;
    }
    pass &= worst <= 1e-10;
    verdict(9, "stationary fixed point", start, None, pass, format!("max deviation over 50 steps {worst:.1e}"))
}

#[test]
fn acceptance_criteria() {
    let mut verdicts: Vec<Verdict> = thread::scope(|s| {
        let channels: Vec<_> = [Builtin::ChannelUniform, Builtin::ChannelWave, Builtin::ChannelSelective]
            .into_iter()
            .map(|b| s.spawn(move || channel(b)))
            .collect();
        let smooth = s.spawn(smooth_runs);
        let entropy = s.spawn(entropy_decay);
        let mut v = vec![stabilizer_algebra(), detector(), assembly(), star_consistency(), stationary()];
        v.extend(smooth.join().unwrap());
        v.push(entropy.join().unwrap());
        v.extend(channels.into_iter().map(|h| h.join().unwrap()));
        v
    });
    verdicts.sort_by_key(|v| v.id);

    // Written to the raw handle so the lines appear without --nocapture.
    let mut out = std::io::stdout().lock();
    for v in &verdicts {
        let status = if v.pass { "PASS" } else { "FAIL" };
        let _ =
            writeln!(out, "criterion {} [{status}] {} ({:.1}s): {}", v.id, v.name, v.elapsed.as_secs_f64(), v.detail);
    }
    let failed: Vec<u8> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
