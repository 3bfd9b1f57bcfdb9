use std::fs;
use std::path::Path;
use std::process::Command;

use pnp_core::diagnostics::recompute_flags;
use pnp_core::scenarios::{Builtin, MeshSpec, ScenarioSpec};
use pnp_core::solver::Simulation;
use pnp_core::Algorithm;
use pnp_sim::config::{parse_str, resolve, Overrides, Scenario};
use pnp_sim::{run_scenario, table, vtk};
use vtkio::model::{Attribute, CellType, DataSet, Piece, VertexNumbers};
use vtkio::Vtk;

fn small_smooth(algorithm: Algorithm, dir: &Path) -> Scenario {
    let mut spec = ScenarioSpec::builtin(Builtin::Smooth, algorithm);
    spec.mesh = MeshSpec::Square { n: 10 };
    spec.config.t_final = 0.02;
    Scenario { spec, out_dir: dir.to_path_buf(), snapshots: vec![0.0, 0.01, 0.02] }
}

#[test]
fn snapshot_parses_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ScenarioSpec::builtin(Builtin::Smooth, Algorithm::Alg1);
    let mesh = spec.mesh.build().unwrap();
    let (p0, n0) = spec.initial_fields(&mesh).unwrap();
    let sim = Simulation::new(&mesh, &spec.bc, &spec.config, p0, n0).unwrap();
    let path = dir.path().join("s.vtk");
    vtk::write_vtk_snapshot(sim.state(), &mesh, &path).unwrap();

    let parsed = Vtk::import(&path).expect("valid legacy VTK");
    let DataSet::UnstructuredGrid { pieces, .. } = parsed.data else { panic!("not an unstructured grid") };
    let Piece::Inline(piece) = &pieces[0] else { panic!("piece not inline") };
    assert_eq!(piece.num_points(), mesh.num_nodes());
    assert_eq!(piece.cells.types.len(), mesh.num_elements());
    assert!(piece.cells.types.iter().all(|t| *t == CellType::Triangle));
    let VertexNumbers::Legacy { num_cells, vertices } = &piece.cells.cell_verts else { panic!("legacy cells") };
    assert_eq!(*num_cells as usize, mesh.num_elements());
    assert_eq!(
        &vertices[..4],
        &[3, mesh.elements()[0][0] as u32, mesh.elements()[0][1] as u32, mesh.elements()[0][2] as u32]
    );
    let points: Vec<f64> = piece.points.clone().cast_into().unwrap();
    for (i, node) in mesh.nodes().iter().enumerate() {
        assert_eq!([points[3 * i], points[3 * i + 1]], *node);
    }

    let names: Vec<&str> = piece.data.point.iter().map(Attribute::name).collect();
    assert_eq!(names, ["p", "n", "phi"]);
    let state = sim.state();
    for (attr, field) in piece.data.point.iter().zip([&state.p, &state.n, &state.phi]) {
        let Attribute::DataArray(a) = attr else { panic!("scalar array expected") };
        let values: Vec<f64> = a.data.clone().cast_into().unwrap();
        assert_eq!(values.len(), field.len());
        for (v, x) in values.iter().zip(field.iter()) {
            assert!((v - x).abs() <= 1e-15 * x.abs().max(1.0));
        }
    }
}

#[test]
fn csv_rows_reproduce_their_flags() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_smooth(Algorithm::Alg2, dir.path());
    let outcome = run_scenario(&scenario).unwrap();
    assert!(outcome.completed());
    assert!(outcome.invariants_hold());
    assert_eq!(outcome.reports.len(), 21);

    let rows = table::read_reports(fs::File::open(dir.path().join("reports.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), outcome.reports.len());
    for (a, b) in rows.iter().zip(&outcome.reports) {
        assert_eq!(a.t.to_bits(), b.t.to_bits());
        assert_eq!(a.mass_p.to_bits(), b.mass_p.to_bits());
        assert_eq!(a.entropy.to_bits(), b.entropy.to_bits());
        assert_eq!(a.min_n.to_bits(), b.min_n.to_bits());
    }
    let flags = recompute_flags(&rows, &outcome.policy, scenario.spec.config.k);
    let stored: Vec<_> = rows.iter().map(|r| r.flags).collect();
    assert_eq!(flags, stored);

    let snaps: Vec<_> =
        outcome.snapshot_files.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(snaps, ["snapshot_000000.vtk", "snapshot_000010.vtk", "snapshot_000020.vtk"]);
    for name in ["mesh.vtk", "mass.svg", "energy.svg", "extrema.svg"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_scenario(&small_smooth(Algorithm::Alg1, a.path())).unwrap();
    run_scenario(&small_smooth(Algorithm::Alg1, b.path())).unwrap();
    let read = |d: &Path| fs::read(d.join("reports.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn config_file_resolves_like_the_builtin() {
    let file =
        parse_str(r#"{"scenario": "channel_selective", "algorithm": 2, "solver": {"q": 1}}"#, Path::new("c.json"))
            .unwrap();
    let s = resolve(file, &Overrides::default()).unwrap();
    let mut expected = ScenarioSpec::builtin(Builtin::ChannelSelective, Algorithm::Alg2);
    expected.config.q = 1.0;
    assert_eq!(s.spec, expected);
    assert_eq!(s.snapshots, vec![0.0, 10.0]);
}

fn cli(dir: &Path, args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pnp-sim"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"scenario": "smooth", "mesh": {"square": {"n": 6}}, "solver": {"T": 0.005}}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");

    let (code, err) = cli(&out, &["--config", cfg, "--algorithm", "2", "--snapshots", "0,0.002"]);
    assert_eq!(code, Some(0), "{err}");
    assert!(out.join("snapshot_000002.vtk").is_file());
    assert_eq!(fs::read_to_string(out.join("reports.csv")).unwrap().lines().count(), 7);

    // A step violating the time-step restriction of the first scheme.
    let (code, err) = cli(&out, &["--config", cfg, "--k", "0.5", "--T", "0.5"]);
    assert_eq!(code, Some(3), "{err}");
    assert!(err.contains("smallness_ok: false"), "{err}");
    let (code, _) = cli(&out, &["--config", cfg, "--k", "0.5", "--T", "0.5", "--no-strict"]);
    assert_eq!(code, Some(0));

    let (code, err) = cli(&out, &["--config", cfg, "--k=-1"]);
    assert_eq!(code, Some(1));
    assert!(err.contains("k must be positive"), "{err}");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"scenario\": \"smooth\",\n \"sovler\": {}}").unwrap();
    let (code, err) = cli(&out, &["--config", bad.to_str().unwrap()]);
    assert_eq!(code, Some(1));
    assert!(err.contains("sovler") && err.contains("line 2"), "{err}");

    let (code, _) = cli(&out, &["--algorithm", "3"]);
    assert_eq!(code, Some(2));
}
