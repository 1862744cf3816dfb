use std::collections::BTreeMap;

use a2m_core::kingman::{
    consistency_test, convergence_experiment, history_to_tree, median_by_step, rooted_shape_distribution, simulate,
    ConsistencyConfig, ConvergenceConfig, Level, MergerEvent, MergerHistory,
};
use a2m_core::rng::rng_from_seed;
use a2m_core::shape::{index_set, tv_distance, Label, ShapeDistribution, ShapeMode, Truncation};
use proptest::prelude::*;

/// Exact rooted shape law of the nested coalescent, by walking every path of
/// the jump chain with its transition probabilities.
fn brute_force_rooted_law(n: &[u32], gamma_h: f64, gamma_p: f64) -> BTreeMap<String, f64> {
    let labels = index_set(n);
    // State: host blocks as (host id, parasite block ids).
    let hosts: Vec<(usize, Vec<usize>)> = (0..n.len())
        .map(|h| {
            let members = labels.iter().enumerate().filter(|(_, l)| l.host == h as u32 + 1).map(|(i, _)| i).collect();
            (h, members)
        })
        .collect();
    let mut out = BTreeMap::new();
    walk(&labels, hosts, n.len(), labels.len(), Vec::new(), 1.0, gamma_h, gamma_p, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    labels: &[Label],
    hosts: Vec<(usize, Vec<usize>)>,
    next_h: usize,
    next_p: usize,
    events: Vec<MergerEvent>,
    prob: f64,
    gh: f64,
    gp: f64,
    out: &mut BTreeMap<String, f64>,
) {
    let pairs = |k: usize| k * k.saturating_sub(1) / 2;
    let total = gh * pairs(hosts.len()) as f64 + gp * hosts.iter().map(|(_, p)| pairs(p.len()) as f64).sum::<f64>();
    if total == 0.0 {
        let h = MergerHistory::new(labels.to_vec(), gh, gp, events).unwrap();
        let code = history_to_tree(&h).unwrap().rooted_shape_code().unwrap();
        *out.entry(code).or_insert(0.0) += prob;
        return;
    }
    let time = events.len() as f64 + 1.0;
    for i in 0..hosts.len() {
        for j in i + 1..hosts.len() {
            let mut next = hosts.clone();
            let (hj, pj) = next.remove(j);
            let (hi, pi) = &mut next[i];
            let mut ev = events.clone();
            ev.push(MergerEvent { time, level: Level::Host, blocks: [(*hi).min(hj), (*hi).max(hj)] });
            pi.extend(pj);
            *hi = next_h;
            walk(labels, next, next_h + 1, next_p, ev, prob * gh / total, gh, gp, out);
        }
    }
    for h in 0..hosts.len() {
        let ps = &hosts[h].1;
        for a in 0..ps.len() {
            for b in a + 1..ps.len() {
                let mut next = hosts.clone();
                let (x, y) = (ps[a], ps[b]);
                next[h].1.retain(|&p| p != x && p != y);
                next[h].1.push(next_p);
                let mut ev = events.clone();
                ev.push(MergerEvent { time, level: Level::Parasite, blocks: [x.min(y), x.max(y)] });
                walk(labels, next, next_h, next_p + 1, ev, prob * gp / total, gh, gp, out);
            }
        }
    }
}

fn as_dist(n: &[u32], probs: BTreeMap<String, f64>) -> ShapeDistribution<f64> {
    ShapeDistribution { n: n.to_vec(), mode: ShapeMode::Exact, samples: None, probs }
}

#[test]
fn four_parasites_in_one_host_match_the_jump_chain() {
    let exact = brute_force_rooted_law(&[4], 1.0, 1.0);
    assert!((exact.values().sum::<f64>() - 1.0).abs() < 1e-12);
    // 18 labelled ranked histories collapse to 15 rooted labelled topologies.
    assert_eq!(exact.len(), 15);
    let samples = 30_000;
    let mc = rooted_shape_distribution(&[4], 1.0, 1.0, samples, 8, 2).unwrap();
    let tv = tv_distance(&as_dist(&[4], exact.clone()), &mc).unwrap();
    assert!(tv <= 3.0 * (exact.len() as f64 / samples as f64).sqrt(), "tv {tv}");
}

#[test]
fn nested_case_matches_the_jump_chain() {
    for (gh, gp) in [(1.0, 1.0), (3.0, 0.5)] {
        let exact = brute_force_rooted_law(&[2, 2], gh, gp);
        let samples = 30_000;
        let mc = rooted_shape_distribution(&[2, 2], gh, gp, samples, 4, 2).unwrap();
        let k = exact.len().max(mc.support_size());
        let tv = tv_distance(&as_dist(&[2, 2], exact), &mc).unwrap();
        assert!(tv <= 3.0 * (k as f64 / samples as f64).sqrt(), "rates {gh} {gp}: tv {tv}");
    }
}

#[test]
fn host_merge_time_is_exponential() {
    let runs = 10_000;
    let gamma_h = 2.0;
    let mut rng = rng_from_seed(12);
    let times: Vec<f64> = (0..runs)
        .map(|_| {
            let h = simulate(&[1, 1], gamma_h, 1.0, &mut rng).unwrap();
            assert_eq!(h.events().len(), 2);
            h.events().iter().find(|e| e.level == Level::Host).unwrap().time
        })
        .collect();
    let mean = times.iter().sum::<f64>() / runs as f64;
    // Exp(γ) has mean and standard deviation 1/γ.
    let sigma = (1.0 / gamma_h) / (runs as f64).sqrt();
    assert!((mean - 1.0 / gamma_h).abs() <= 3.0 * sigma, "mean {mean}");
}

#[test]
fn restriction_to_everything_is_the_identity() {
    let mut rng = rng_from_seed(30);
    for _ in 0..20 {
        let h = simulate(&[3, 2, 2], 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(h.restrict(h.labels()).unwrap(), h);
        let j = [Label::new(1, 1), Label::new(1, 2), Label::new(3, 2)];
        let r = h.restrict(&j).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.count(Level::Host), 1);
        assert_eq!(r.count(Level::Parasite), 2);
        // Restricting in two steps is restricting once.
        let rr = h.restrict(&[Label::new(1, 1), Label::new(1, 2), Label::new(2, 1), Label::new(3, 2)]).unwrap();
        assert_eq!(rr.restrict(&j).unwrap(), r);
    }
}

#[test]
fn restriction_commutes_with_simulation() {
    let cfg = ConsistencyConfig { n: vec![3, 2, 2], j: vec![2, 1], gamma_h: 1.0, gamma_p: 2.0, samples: 20_000, seed: 3 };
    let r = consistency_test(&cfg, 4).unwrap();
    assert!(r.pass, "tv {} threshold {}", r.tv, r.threshold);
}

#[test]
fn convergence_rows_are_reproducible() {
    let cfg = ConvergenceConfig {
        schedule: vec![vec![2, 2], vec![3, 3], vec![5, 5]],
        gamma_h: 1.0,
        gamma_p: 1.0,
        truncation: Truncation { m_max: 2, per_m_budget: 3 },
        samples: 300,
        seeds: 3,
        seed: 1,
    };
    let a = convergence_experiment(&cfg, 1).unwrap();
    let b = convergence_experiment(&cfg, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 6);
    assert!(a.iter().all(|r| r.estimate >= 0.0 && r.estimate <= 1.0));
    assert_eq!(median_by_step(&a).len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simulated_histories_are_valid(seed in any::<u64>(), n in proptest::collection::vec(1u32..5, 1..5)) {
        let h = simulate(&n, 1.0, 1.0, &mut rng_from_seed(seed)).unwrap();
        let total: u32 = n.iter().sum();
        prop_assert_eq!(h.count(Level::Host), n.len() - 1);
        prop_assert_eq!(h.count(Level::Parasite), total as usize - 1);
        prop_assert!(h.partitions().iter().all(|p| p.is_nested()));
        let e = history_to_tree(&h).unwrap();
        prop_assert_eq!(e.chi.tree.leaves().len(), total as usize + 1);
        prop_assert_eq!(e.chi.tree.len(), 2 * total as usize);
        prop_assert_eq!(e.chi.nu.components().len(), n.len());
    }
}
