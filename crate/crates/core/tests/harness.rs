use legdet::harness::{
    execute, revalidate, run, CheckId, Config, DList, Format, ResultCache, Status,
};
use legdet::Exec;

fn small_config() -> Config {
    Config {
        pmax: Some(60),
        ..Config::default()
    }
}

fn render(config: &Config) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(config, &mut out, &mut err).unwrap();
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn every_result_revalidates() {
    let results = execute(&small_config()).unwrap();
    assert!(!results.is_empty());
    for r in &results {
        assert!(revalidate(r), "{r:?}");
    }
    for id in CheckId::ALL {
        assert!(results.iter().any(|r| r.check_id == id), "{id} never ran");
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let par = execute(&Config {
        exec: Exec::Parallel,
        jobs: 3,
        ..small_config()
    })
    .unwrap();
    let seq = execute(&Config {
        exec: Exec::Sequential,
        ..small_config()
    })
    .unwrap();
    assert_eq!(par, seq);
}

#[test]
fn warm_cache_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.jsonl");
    let config = Config {
        cache: Some(path.clone()),
        checks: vec![CheckId::TheoremA, CheckId::Carlitz, CheckId::Eigen],
        d_list: DList::All,
        pmax: Some(40),
        ..Config::default()
    };
    let cold = render(&config);
    let stored = ResultCache::open(&path).unwrap().len();
    assert_eq!(stored, cold.1.lines().count());
    let warm = render(&config);
    assert_eq!(cold, warm);
    // Nothing new was appended.
    assert_eq!(ResultCache::open(&path).unwrap().len(), stored);
}

#[test]
fn exit_code_tracks_failures() {
    let passing = Config {
        checks: vec![CheckId::CorollaryA, CheckId::RowIdentity],
        ..small_config()
    };
    let (code, out, err) = render(&passing);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.contains("\"status\":\"pass\"")));
    assert!(err.contains("total"));

    // The p = 3 Chapman matrix does not follow the p ≡ 3 (mod 4) form.
    let failing = Config {
        checks: vec![CheckId::Chapman],
        pmax: Some(3),
        format: Format::Text,
        ..Config::default()
    };
    let (code, _, err) = render(&failing);
    assert_eq!(code, 1);
    let results = execute(&failing).unwrap();
    assert_eq!(results[0].status, Status::Fail);
    assert!(err.lines().last().unwrap().split_whitespace().nth(3) == Some("1"));
}
