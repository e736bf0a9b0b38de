mod common;

use aqoci_core::samplers::{
    oracle_sample, remote_hybrid, simulated_annealing, tabu_search, StubServer,
};
use aqoci_core::{AnnealConfig, Error, QuboProblem, RemoteSolverConfig, SampleSource, TabuConfig};
use common::random_qubo;

const INSTANCES: u64 = 50;

fn success_rate(solve: impl Fn(&QuboProblem) -> f64) -> f64 {
    let hits = (0..INSTANCES)
        .filter(|&seed| {
            let q = random_qubo(12, 1000 + seed);
            let (_, min) = q.brute_force_minimum().unwrap();
            (solve(&q) - min).abs() <= 1e-9
        })
        .count();
    hits as f64 / INSTANCES as f64
}

#[test]
fn anneal_finds_oracle_minimum() {
    let cfg = AnnealConfig {
        num_reads: 50,
        sweeps: 200,
        ..AnnealConfig::default()
    };
    let rate = success_rate(|q| simulated_annealing(q, &cfg).unwrap().best().unwrap().energy);
    assert!(rate >= 0.9, "{rate}");
    let rate = success_rate(|q| {
        simulated_annealing(q, &AnnealConfig::default())
            .unwrap()
            .best()
            .unwrap()
            .energy
    });
    assert!(rate >= 0.9, "{rate}");
}

#[test]
fn tabu_finds_oracle_minimum() {
    let cfg = TabuConfig {
        restarts: 20,
        ..TabuConfig::default()
    };
    let rate = success_rate(|q| tabu_search(q, &cfg).unwrap().best().unwrap().energy);
    assert!(rate >= 0.9, "{rate}");
}

#[test]
fn records_re_evaluate_exactly() {
    let q = random_qubo(14, 5);
    for set in [
        simulated_annealing(&q, &AnnealConfig::default()).unwrap(),
        tabu_search(&q, &TabuConfig::default()).unwrap(),
        oracle_sample(&q).unwrap(),
    ] {
        set.validate(&q).unwrap();
        for r in set.records() {
            assert!((q.energy(&r.assignment).unwrap() - r.energy).abs() <= 1e-9);
        }
    }
}

#[test]
fn tabu_is_deterministic() {
    let q = random_qubo(20, 8);
    let cfg = TabuConfig {
        seed: 4,
        ..TabuConfig::default()
    };
    assert_eq!(
        tabu_search(&q, &cfg).unwrap(),
        tabu_search(&q, &cfg).unwrap()
    );
}

fn small_problem() -> QuboProblem {
    let mut q = QuboProblem::new(3);
    q.add_linear(0, 1.0).unwrap();
    q.add_quadratic(1, 2, -2.0).unwrap();
    q.add_constant(1.25).unwrap();
    q
}

#[test]
fn stub_echoing_all_zeros() {
    let server = StubServer::spawn(|_| {
        (
            200,
            r#"{"records":[{"bits":"000","energy":1.25,"occurrences":4}]}"#.to_string(),
        )
    })
    .unwrap();
    let mut cfg = RemoteSolverConfig::new(server.endpoint());
    cfg.auth_token = Some("secret".into());
    let set = remote_hybrid(&small_problem(), &cfg).unwrap();
    assert_eq!(set.source, SampleSource::Remote);
    assert_eq!(set.records().len(), 1);
    assert_eq!(set.records()[0].energy, 1.25);
    assert_eq!(set.records()[0].occurrences, 4);

    let requests = server.requests();
    assert_eq!(requests.len(), 1);
    assert_eq!(requests[0].method, "POST");
    assert_eq!(requests[0].path, "/solve");
    assert_eq!(requests[0].authorization.as_deref(), Some("Bearer secret"));
    assert_eq!(
        QuboProblem::from_json(&requests[0].body).unwrap(),
        small_problem()
    );
}

#[test]
fn stub_solver_returns_minimum() {
    let server = StubServer::solver().unwrap();
    let q = random_qubo(10, 3);
    let set = remote_hybrid(&q, &RemoteSolverConfig::new(server.endpoint())).unwrap();
    assert_eq!(
        set.best().unwrap().energy,
        q.brute_force_minimum().unwrap().1
    );
}

#[test]
fn stub_wrong_energy_is_rejected() {
    let server = StubServer::spawn(|_| {
        (
            200,
            r#"{"records":[{"bits":"011","energy":5.0,"occurrences":1}]}"#.to_string(),
        )
    })
    .unwrap();
    let err = remote_hybrid(
        &small_problem(),
        &RemoteSolverConfig::new(server.endpoint()),
    );
    assert!(matches!(err, Err(Error::EnergyMismatch { .. })), "{err:?}");
}

#[test]
fn stub_http_error_is_reported() {
    let server = StubServer::spawn(|_| (503, "busy".to_string())).unwrap();
    let mut cfg = RemoteSolverConfig::new(server.endpoint());
    cfg.offline_fallback = true;
    assert!(matches!(
        remote_hybrid(&small_problem(), &cfg),
        Err(Error::Remote(_))
    ));
}

fn unused_endpoint() -> String {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}")
}

#[test]
fn unreachable_endpoint_falls_back() {
    let mut cfg = RemoteSolverConfig::new(unused_endpoint());
    cfg.timeout_secs = 2.0;
    cfg.offline_fallback = true;
    let set = remote_hybrid(&small_problem(), &cfg).unwrap();
    assert_eq!(set.source, SampleSource::Fallback);
    assert_eq!(set.best().unwrap().energy, -0.75);

    cfg.offline_fallback = false;
    assert!(matches!(
        remote_hybrid(&small_problem(), &cfg),
        Err(Error::Remote(_))
    ));
}
