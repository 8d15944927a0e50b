use std::path::Path;
use std::process::Command;

use place3d::arch::{build_fabric, ArchSpec, Style};
use place3d::harness::{gen_netlist, report, sweep, utilization, GenParams, Mode, RunConfig};
use place3d::lookahead::{build_table, DelayMode};
use place3d::netlist::{load_netlist, BlockKind};
use place3d::placement::{check_legality, Placement};
use place3d::timing::{run_sta, BlockDelays};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_place3d"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.net"), dir.path().join("b.net"));
    run_ok(bin().args(["gen", "--blocks", "50", "--seed", "7", "--out"]).arg(&a));
    run_ok(bin().args(["gen", "--blocks", "50", "--seed", "7", "--out"]).arg(&b));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn combinational_netlist_ends_only_at_outputs() {
    let nl = gen_netlist(&GenParams { blocks: 200, seq_fraction: 0.0, ..GenParams::default() }).unwrap();
    assert!(nl.blocks().iter().all(|b| !b.seq));
    for b in nl.blocks() {
        if nl.fanout_connections(b.id).is_empty() {
            assert!(b.kind == BlockKind::Io && b.name.starts_with("out"), "{} is an endpoint", b.name);
        }
    }
}

#[test]
fn place_then_report_agree() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("d.net");
    let runs = dir.path().join("runs");
    run_ok(bin().args(["gen", "--blocks", "500", "--seed", "3", "--out"]).arg(&net));
    for seed in ["1", "2"] {
        run_ok(bin().args(["place", "--seed", seed, "--netlist"]).arg(&net).arg("--out").arg(runs.join(format!("s{seed}"))));
    }

    let run = runs.join("s1");
    let nl = load_netlist(run.join("netlist.txt")).unwrap();
    let spec = ArchSpec::load(run.join("arch.toml")).unwrap();
    let f = build_fabric(&spec).unwrap();
    assert!(utilization(&nl, &f) >= 0.8);
    let (p, seed) = Placement::load(run.join("placement.txt"), &nl).unwrap();
    assert_eq!(seed, 1);
    assert!(check_legality(&p, &nl, &f).is_empty());
    let t = build_table(&f, &spec, DelayMode::Exact);
    let d = run_sta(&nl, &p, &t, &BlockDelays::default()).unwrap().d_max;

    let single = report(&run).unwrap();
    assert_eq!(single.rows[0].d_max, d);
    assert_eq!(single.rows[0].stored_d_max, Some(d));
    assert!(single.geomean.is_none());
    assert!(!single.curve.is_empty());

    let both = report(&runs).unwrap();
    assert_eq!(both.rows.len(), 2);
    assert!(both.geomean.is_some());
    let text = run_ok(bin().arg("report").arg(&runs));
    assert!(text.contains("geomean"));
}

#[test]
fn report_on_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("report").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(7));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no runs found"));
    assert!(report(dir.path()).is_err());
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("bad.net");
    std::fs::write(&net, "block a clb\nnet n a.0 -> zz.0\n").unwrap();
    let out = bin().arg("partition").arg("--netlist").arg(&net).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let out = bin().arg("partition").arg("--netlist").arg(dir.path().join("missing.net")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin().args(["delay-table"]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn delay_table_dump_loads() {
    let dir = tempfile::tempdir().unwrap();
    let arch = dir.path().join("a.toml");
    std::fs::write(&arch, ArchSpec::new(8, 8, Style::CbO).to_toml()).unwrap();
    let dump = dir.path().join("t.lut");
    run_ok(bin().arg("delay-table").arg("--arch").arg(&arch).arg("--out").arg(&dump));
    let t = place3d::lookahead::DelayTable::load(&dump).unwrap();
    assert_eq!(t.mode(), DelayMode::Exact);
}

#[test]
fn one_cell_sweep_flags_delta() {
    let nl = gen_netlist(&GenParams { blocks: 60, ..GenParams::default() }).unwrap();
    let r = sweep(&[("x".into(), nl)], &ArchSpec::new(8, 8, Style::Sb), &[RunConfig::mode(Mode::Ours)], &[1]).unwrap();
    assert_eq!(r.records.len(), 1);
    let c = r.compare("ours", "ours");
    assert!(c.delta_pct.is_none() && c.note.is_some());
}

#[test]
fn sweep_is_reproducible() {
    let suite: Vec<_> = (0..2)
        .map(|i| (format!("n{i}"), gen_netlist(&GenParams { blocks: 80, seed: i, ..GenParams::default() }).unwrap()))
        .collect();
    let cfgs = [RunConfig::mode(Mode::Baseline), RunConfig::mode(Mode::Ours)];
    let a = sweep(&suite, &ArchSpec::new(8, 8, Style::Cb), &cfgs, &[1, 2]).unwrap();
    let b = sweep(&suite, &ArchSpec::new(8, 8, Style::Cb), &cfgs, &[1, 2]).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
    assert!(a.compare("baseline", "ours").ratio.is_some());
}

#[test]
fn partition_cli_writes_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("p.net");
    let out = dir.path().join("p.layers");
    run_ok(bin().args(["gen", "--blocks", "80", "--out"]).arg(&net));
    run_ok(bin().arg("partition").arg("--netlist").arg(&net).arg("--out").arg(&out));
    let nl = load_netlist(&net).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let layers = place3d::placement::parse_assignment(&text, &nl, Path::new("p")).unwrap();
    assert_eq!(layers.len(), nl.num_blocks());
    run_ok(bin().arg("place").arg("--netlist").arg(&net).arg("--init-from").arg(&out));
}
