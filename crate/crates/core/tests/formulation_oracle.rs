//! Desk-scale instances checked against exhaustive search over integer
//! codes and cluster assignments, computed without any QUBO machinery.

use aqoci_core::formulation::{assemble, decode_solution, CentroidProblem};
use aqoci_core::refine::{initialize_state, run_refinement, GridSpec, LoopConfig, PenaltyConfig};
use aqoci_core::rng::SeededRng;
use aqoci_core::{SamplerChoice, WeightGrid};

struct Desk {
    data: Vec<Vec<f64>>,
    k: usize,
    bits: u32,
}

fn desk(seed: u64) -> Desk {
    let mut rng = SeededRng::new(seed);
    let d = 1 + rng.below(2) as usize;
    let n = 1 + rng.below(4) as usize;
    let k = 1 + rng.below(2.min(n as u32)) as usize;
    let bits = 1 + rng.below(2);
    let data = (0..n)
        .map(|_| (0..d).map(|_| -8.0 + 15.0 * rng.next_f64()).collect())
        .collect();
    Desk { data, k, bits }
}

/// Minimum of `sum_j ||v_j - w_{c(j)}||^2` over all grid codes and labelings.
fn exhaustive(desk: &Desk, scale: f64, offset: f64) -> f64 {
    let d = desk.data[0].len();
    let n = desk.data.len();
    let weights = d * desk.k;
    let levels = 1usize << desk.bits;
    let mut best = f64::INFINITY;
    for codes in 0..levels.pow(weights as u32) {
        let w: Vec<f64> = (0..weights)
            .map(|i| ((codes / levels.pow(i as u32)) % levels) as f64 * scale + offset)
            .collect();
        for labels in 0..desk.k.pow(n as u32) {
            let mut total = 0.0;
            for (j, v) in desk.data.iter().enumerate() {
                let c = (labels / desk.k.pow(j as u32)) % desk.k;
                for (a, &va) in v.iter().enumerate() {
                    let diff = va - w[a * desk.k + c];
                    total += diff * diff;
                }
            }
            best = best.min(total);
        }
    }
    best
}

#[test]
fn oracle_minimum_decodes_optimal_centroids() {
    for seed in 0..40 {
        let inst = desk(seed);
        let grid = WeightGrid::unsigned(inst.bits).unwrap();
        let mut problem = CentroidProblem::new(inst.data.clone(), inst.k, grid).unwrap();
        let state = initialize_state(7.0, -8.0, inst.bits, problem.num_weights(), 2.0).unwrap();
        let entries = state.entries();
        problem.certify_delta1(&entries).unwrap();
        problem.certify_delta2(&entries).unwrap();
        let (qubo, layout) = assemble(&problem, &entries).unwrap();
        assert!(qubo.num_vars() <= 24);
        let (best, energy) = qubo.brute_force_minimum().unwrap();
        let decoded = decode_solution(&best, &layout, &grid, &entries).unwrap();
        assert!(
            decoded.one_hot,
            "seed {seed}: {:?} k {} bits {} delta2 {} h {:?} w {:?}",
            inst.data, inst.k, inst.bits, problem.delta2, decoded.h, decoded.centroids
        );
        assert!(decoded.aux_consistent, "seed {seed}");

        let expected = exhaustive(&inst, entries[0].scale, -8.0);
        let labels: Vec<usize> = decoded.labels().into_iter().map(Option::unwrap).collect();
        let objective: f64 = inst
            .data
            .iter()
            .zip(&labels)
            .map(|(v, &c)| {
                v.iter()
                    .zip(&decoded.centroids[c])
                    .map(|(x, w)| (x - w) * (x - w))
                    .sum::<f64>()
            })
            .sum();
        assert!(
            (objective - expected).abs() <= 1e-6,
            "seed {seed}: {objective} vs {expected}"
        );
        assert!(
            (energy - expected).abs() <= 1e-6,
            "seed {seed}: {energy} vs {expected}"
        );
    }
}

#[test]
fn refinement_invariants_on_desk_instances() {
    for seed in 0..12 {
        let inst = desk(100 + seed);
        let grid = GridSpec {
            bits: inst.bits,
            lower: -8.0,
            upper: 7.0,
        };
        let cfg = LoopConfig {
            max_iterations: 5,
            ..LoopConfig::new(SamplerChoice::Oracle)
        };
        let r = run_refinement(&inst.data, inst.k, grid, &PenaltyConfig::default(), &cfg).unwrap();
        let initial = 15.0 / ((1u64 << inst.bits) - 1) as f64;
        for (t, it) in r.trace.iterations.iter().enumerate() {
            for &s in &it.scales {
                assert_eq!(s, initial / f64::powi(2.0, t as i32));
            }
            // The decoded value survives the update exactly.
            if let Some(next) = r.trace.iterations.get(t + 1) {
                for (i, &code) in it.codes.iter().enumerate() {
                    let old = code as f64 * it.scales[i] + it.offsets[i];
                    let new = code as f64 * next.scales[i] + next.offsets[i];
                    assert!((old - new).abs() <= 1e-12);
                }
            }
        }
        let objectives: Vec<f64> = r.trace.iterations.iter().map(|i| i.objective).collect();
        assert!(
            objectives.windows(2).all(|w| w[1] <= w[0] + 1e-9),
            "seed {seed}: {objectives:?}"
        );
        assert!(r.one_hot);
    }
}

#[test]
fn refinement_trace_is_reproducible() {
    let inst = desk(7);
    let grid = GridSpec {
        bits: inst.bits,
        lower: -8.0,
        upper: 7.0,
    };
    let cfg = LoopConfig {
        max_iterations: 4,
        seed: 3,
        ..LoopConfig::new(SamplerChoice::Tabu(Default::default()))
    };
    let a = run_refinement(&inst.data, inst.k, grid, &PenaltyConfig::default(), &cfg).unwrap();
    let b = run_refinement(&inst.data, inst.k, grid, &PenaltyConfig::default(), &cfg).unwrap();
    assert_eq!(a.trace.to_json().unwrap(), b.trace.to_json().unwrap());
}
