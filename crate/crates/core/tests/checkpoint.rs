use sthdg::harness::{run, RunConfig};
use sthdg::solver::read_checkpoint;
use sthdg::spaces::Degrees;
use sthdg::Error;

fn config(dir: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::new("poly-exact", 3, 2, Degrees::uniform(2).unwrap(), 0.05);
    cfg.output.checkpoints = Some(dir.to_path_buf());
    cfg
}

#[test]
fn checkpoints_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&config(dir.path())).unwrap();
    assert_eq!(report.records.len(), 2);
    for (k, rec) in report.records.iter().enumerate() {
        let c = read_checkpoint(dir.path(), k).unwrap();
        assert_eq!(c.slab, k);
        assert_eq!((c.t0, c.t1), (rec.t0, rec.t1));
        assert_eq!(c.n_elements, 9);
        assert_eq!(c.n_modes, 27);
        assert!(c.coeffs.iter().flatten().all(|v| v.is_finite()));
    }
}

#[test]
fn corrupted_checkpoint_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    run(&config(dir.path())).unwrap();
    let txt = dir.path().join("slab_0001.txt");
    let mut lines: Vec<String> = std::fs::read_to_string(&txt).unwrap().lines().map(String::from).collect();
    lines[4] = "0 4 not-a-number".into();
    std::fs::write(&txt, lines.join("\n")).unwrap();
    match read_checkpoint(dir.path(), 1) {
        Err(Error::Checkpoint { line, .. }) => assert_eq!(line, 5),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn truncated_checkpoint_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    run(&config(dir.path())).unwrap();
    let txt = dir.path().join("slab_0000.txt");
    let text = std::fs::read_to_string(&txt).unwrap();
    std::fs::write(&txt, text.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
    assert!(matches!(read_checkpoint(dir.path(), 0), Err(Error::Checkpoint { .. })));
}
