//! The finite nested Kingman coalescent: simulation, merger histories, the
//! induced trees with their empirical two-level measure, and restriction.

mod experiment;
mod tree;

pub use experiment::{
    consistency_test, convergence_experiment, median_by_step, rooted_shape_distribution, ConsistencyConfig,
    ConsistencyReport, ConvergenceConfig, ConvergenceRow, ExperimentError, KingmanSource,
};
pub use tree::{history_to_tree, EmpiricalTwoLevel};

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::rng::SimRng;
use crate::shape::{index_set, Label};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistoryError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("label {0} is listed twice")]
    DuplicateLabel(Label),
    #[error("label {0} is not in the index set")]
    NotInIndexSet(Label),
    #[error("event {event} refers to block {block}, which does not exist at that time")]
    UnknownBlock { event: usize, block: usize },
    #[error("event {event} merges a block with itself")]
    SelfMerge { event: usize },
    #[error("event {event} merges parasite blocks lying in different host blocks")]
    NotNested { event: usize },
    #[error("event {event} has time {time}, before the previous event")]
    TimeDecreasing { event: usize, time: f64 },
    #[error("history ends with {hosts} host blocks and {parasites} parasite blocks")]
    Incomplete { hosts: usize, parasites: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Host,
    Parasite,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Host => "H",
            Level::Parasite => "P",
        }
    }
}

/// A merger of two blocks at one level.
///
/// Parasite blocks `0..L` are the singletons of the labels in order; the
/// `k`-th parasite event creates block `L + k`. Host blocks `0..H` are the
/// initial hosts in increasing order; the `k`-th host event creates `H + k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergerEvent {
    pub time: f64,
    pub level: Level,
    pub blocks: [usize; 2],
}

/// Host and parasite partitions of an index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedPartition {
    pub host_blocks: Vec<BTreeSet<Label>>,
    pub parasite_blocks: Vec<BTreeSet<Label>>,
}

impl NestedPartition {
    /// Every parasite block lies inside one host block.
    pub fn is_nested(&self) -> bool {
        self.parasite_blocks.iter().all(|p| self.host_blocks.iter().any(|h| p.is_subset(h)))
    }
}

/// A timed record of the mergers of a nested coalescent on a finite index set.
#[derive(Clone, Debug, PartialEq)]
pub struct MergerHistory {
    labels: Vec<Label>,
    gamma_h: f64,
    gamma_p: f64,
    events: Vec<MergerEvent>,
}

struct Replay {
    parasites: Vec<Option<Vec<usize>>>,
    hosts: Vec<Option<Vec<usize>>>,
    host_of: Vec<usize>,
}

impl Replay {
    fn new(labels: &[Label]) -> Self {
        let host_values: Vec<u32> = labels.iter().map(|l| l.host).collect::<BTreeSet<_>>().into_iter().collect();
        let host_of: Vec<usize> = labels.iter().map(|l| host_values.binary_search(&l.host).expect("present")).collect();
        let mut hosts = vec![Some(Vec::new()); host_values.len()];
        for (i, &h) in host_of.iter().enumerate() {
            hosts[h].as_mut().expect("alive").push(i);
        }
        Replay { parasites: (0..labels.len()).map(|i| Some(vec![i])).collect(), hosts, host_of }
    }

    fn apply(&mut self, k: usize, e: &MergerEvent) -> Result<(), HistoryError> {
        let [a, b] = e.blocks;
        if a == b {
            return Err(HistoryError::SelfMerge { event: k });
        }
        let blocks = match e.level {
            Level::Host => &mut self.hosts,
            Level::Parasite => &mut self.parasites,
        };
        for x in [a, b] {
            if blocks.get(x).is_none_or(Option::is_none) {
                return Err(HistoryError::UnknownBlock { event: k, block: x });
            }
        }
        if e.level == Level::Parasite {
            let ha = self.host_of[self.parasites[a].as_ref().expect("alive")[0]];
            let hb = self.host_of[self.parasites[b].as_ref().expect("alive")[0]];
            if ha != hb {
                return Err(HistoryError::NotNested { event: k });
            }
        }
        let blocks = match e.level {
            Level::Host => &mut self.hosts,
            Level::Parasite => &mut self.parasites,
        };
        let mut merged = blocks[a].take().expect("alive");
        merged.extend(blocks[b].take().expect("alive"));
        merged.sort_unstable();
        let id = blocks.len();
        if e.level == Level::Host {
            for &i in &merged {
                self.host_of[i] = id;
            }
        }
        let blocks = match e.level {
            Level::Host => &mut self.hosts,
            Level::Parasite => &mut self.parasites,
        };
        blocks.push(Some(merged));
        Ok(())
    }

    fn alive(blocks: &[Option<Vec<usize>>]) -> usize {
        blocks.iter().filter(|b| b.is_some()).count()
    }

    fn partition(&self, labels: &[Label]) -> NestedPartition {
        let sets = |bs: &[Option<Vec<usize>>]| -> Vec<BTreeSet<Label>> {
            bs.iter().flatten().map(|b| b.iter().map(|&i| labels[i]).collect()).collect()
        };
        NestedPartition { host_blocks: sets(&self.hosts), parasite_blocks: sets(&self.parasites) }
    }
}

fn check_labels(labels: &[Label]) -> Result<(), HistoryError> {
    if labels.is_empty() {
        return Err(HistoryError::EmptyIndexSet);
    }
    let mut seen = BTreeSet::new();
    for &l in labels {
        if !seen.insert(l) {
            return Err(HistoryError::DuplicateLabel(l));
        }
    }
    Ok(())
}

fn check_rates(gamma_h: f64, gamma_p: f64) -> Result<(), HistoryError> {
    if !(gamma_h > 0.0 && gamma_h.is_finite() && gamma_p > 0.0 && gamma_p.is_finite()) {
        return Err(HistoryError::InvalidParameters(format!("rates must be positive, got {gamma_h} and {gamma_p}")));
    }
    Ok(())
}

impl MergerHistory {
    /// Builds and validates a history. Labels are sorted; event times must
    /// be nonnegative and nondecreasing, and ties keep their listed order.
    pub fn new(mut labels: Vec<Label>, gamma_h: f64, gamma_p: f64, events: Vec<MergerEvent>) -> Result<Self, HistoryError> {
        labels.sort_unstable();
        check_labels(&labels)?;
        check_rates(gamma_h, gamma_p)?;
        let h = MergerHistory { labels, gamma_h, gamma_p, events };
        h.replay(|_| ())?;
        Ok(h)
    }

    fn replay(&self, mut visit: impl FnMut(&Replay)) -> Result<Replay, HistoryError> {
        let mut state = Replay::new(&self.labels);
        visit(&state);
        let mut last = 0.0;
        for (k, e) in self.events.iter().enumerate() {
            if e.time.is_nan() || e.time < last {
                return Err(HistoryError::TimeDecreasing { event: k, time: e.time });
            }
            last = e.time;
            state.apply(k, e)?;
            visit(&state);
        }
        Ok(state)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn gamma_h(&self) -> f64 {
        self.gamma_h
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }

    pub fn events(&self) -> &[MergerEvent] {
        &self.events
    }

    /// Distinct host values in increasing order.
    pub fn hosts(&self) -> Vec<u32> {
        self.labels.iter().map(|l| l.host).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Number of labels per host, in host order.
    pub fn host_sizes(&self) -> Vec<u32> {
        let mut sizes: BTreeMap<u32, u32> = BTreeMap::new();
        for l in &self.labels {
            *sizes.entry(l.host).or_insert(0) += 1;
        }
        sizes.into_values().collect()
    }

    pub fn count(&self, level: Level) -> usize {
        self.events.iter().filter(|e| e.level == level).count()
    }

    pub fn is_complete(&self) -> bool {
        self.replay(|_| ())
            .map(|s| Replay::alive(&s.hosts) == 1 && Replay::alive(&s.parasites) == 1)
            .unwrap_or(false)
    }

    pub(crate) fn require_complete(&self) -> Result<(), HistoryError> {
        let s = self.replay(|_| ())?;
        let (hosts, parasites) = (Replay::alive(&s.hosts), Replay::alive(&s.parasites));
        if hosts != 1 || parasites != 1 {
            return Err(HistoryError::Incomplete { hosts, parasites });
        }
        Ok(())
    }

    /// The nested partition before the first event and after every event.
    pub fn partitions(&self) -> Vec<NestedPartition> {
        let mut out = Vec::new();
        self.replay(|s| out.push(s.partition(&self.labels))).expect("history was validated");
        out
    }

    /// The induced history on the labels `j`: events that do not merge two
    /// blocks meeting `j` are dropped and blocks are renumbered.
    pub fn restrict(&self, j: &[Label]) -> Result<MergerHistory, HistoryError> {
        let mut j: Vec<Label> = j.to_vec();
        j.sort_unstable();
        check_labels(&j)?;
        let pos: BTreeMap<Label, usize> = self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut p_map: Vec<Option<usize>> = vec![None; self.labels.len()];
        for (k, l) in j.iter().enumerate() {
            let &i = pos.get(l).ok_or(HistoryError::NotInIndexSet(*l))?;
            p_map[i] = Some(k);
        }
        let all_hosts = self.hosts();
        let j_hosts: Vec<u32> = j.iter().map(|l| l.host).collect::<BTreeSet<_>>().into_iter().collect();
        let mut h_map: Vec<Option<usize>> = all_hosts.iter().map(|h| j_hosts.binary_search(h).ok()).collect();
        let (mut next_p, mut next_h) = (j.len(), j_hosts.len());
        let mut events = Vec::new();
        for e in &self.events {
            let map = match e.level {
                Level::Host => &mut h_map,
                Level::Parasite => &mut p_map,
            };
            let [a, b] = e.blocks;
            let merged = match (map[a], map[b]) {
                (Some(x), Some(y)) => {
                    let next = match e.level {
                        Level::Host => &mut next_h,
                        Level::Parasite => &mut next_p,
                    };
                    events.push(MergerEvent { time: e.time, level: e.level, blocks: [x.min(y), x.max(y)] });
                    *next += 1;
                    Some(*next - 1)
                }
                (x, y) => x.or(y),
            };
            map.push(merged);
        }
        MergerHistory::new(j, self.gamma_h, self.gamma_p, events)
    }
}

fn pair(rng: &mut SimRng, k: usize) -> (usize, usize) {
    let i = rng.random_range(0..k);
    let mut j = rng.random_range(0..k - 1);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

fn choose2(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// Simulates the nested coalescent on `labels` until both levels are a
/// single block.
///
/// Each pair of host blocks merges at rate `gamma_h`; each pair of parasite
/// blocks inside a common host block merges at rate `gamma_p`.
pub fn simulate_on(labels: &[Label], gamma_h: f64, gamma_p: f64, rng: &mut SimRng) -> Result<MergerHistory, HistoryError> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    check_labels(&labels)?;
    check_rates(gamma_h, gamma_p)?;
    let host_values: Vec<u32> = labels.iter().map(|l| l.host).collect::<BTreeSet<_>>().into_iter().collect();
    let mut hosts: Vec<(usize, Vec<usize>)> = host_values
        .iter()
        .enumerate()
        .map(|(h, &hv)| (h, (0..labels.len()).filter(|&i| labels[i].host == hv).collect()))
        .collect();
    let (mut next_h, mut next_p) = (hosts.len(), labels.len());
    let mut t = 0.0;
    let mut events = Vec::with_capacity(hosts.len() + labels.len());
    loop {
        let host_rate = gamma_h * choose2(hosts.len());
        let para_rates: Vec<f64> = hosts.iter().map(|(_, p)| gamma_p * choose2(p.len())).collect();
        let total = host_rate + para_rates.iter().sum::<f64>();
        if total == 0.0 {
            break;
        }
        t += -(1.0 - rng.random::<f64>()).ln() / total;
        let mut u = rng.random::<f64>() * total;
        if u < host_rate {
            let (i, j) = pair(rng, hosts.len());
            let (hj, pj) = hosts.remove(j);
            let (hi, pi) = &mut hosts[i];
            events.push(MergerEvent { time: t, level: Level::Host, blocks: [(*hi).min(hj), (*hi).max(hj)] });
            pi.extend(pj);
            *hi = next_h;
            next_h += 1;
        } else {
            u -= host_rate;
            let mut h = para_rates.iter().rposition(|&r| r > 0.0).expect("positive parasite rate");
            for (k, &r) in para_rates.iter().enumerate() {
                if u < r {
                    h = k;
                    break;
                }
                u -= r;
            }
            let parasites = &mut hosts[h].1;
            let (i, j) = pair(rng, parasites.len());
            let pj = parasites.remove(j);
            let pi = parasites[i];
            events.push(MergerEvent { time: t, level: Level::Parasite, blocks: [pi.min(pj), pi.max(pj)] });
            parasites[i] = next_p;
            next_p += 1;
        }
    }
    MergerHistory::new(labels, gamma_h, gamma_p, events)
}

/// Simulates the nested coalescent on `M` hosts with `n[i]` parasites each.
pub fn simulate(n: &[u32], gamma_h: f64, gamma_p: f64, rng: &mut SimRng) -> Result<MergerHistory, HistoryError> {
    if n.is_empty() || n.contains(&0) {
        return Err(HistoryError::InvalidParameters("need at least one host and one parasite per host".into()));
    }
    simulate_on(&index_set(n), gamma_h, gamma_p, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn event_counts_and_nesting() {
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let h = simulate(&[3, 1, 2], 1.0, 2.0, &mut rng).unwrap();
            assert_eq!(h.count(Level::Host), 2);
            assert_eq!(h.count(Level::Parasite), 5);
            assert!(h.is_complete());
            assert!(h.partitions().iter().all(NestedPartition::is_nested));
            assert!(h.events().windows(2).all(|w| w[0].time <= w[1].time));
        }
    }

    #[test]
    fn cross_host_merger_is_rejected() {
        let labels = vec![Label::new(1, 1), Label::new(2, 1)];
        let e = MergerEvent { time: 1.0, level: Level::Parasite, blocks: [0, 1] };
        assert_eq!(MergerHistory::new(labels, 1.0, 1.0, vec![e]), Err(HistoryError::NotNested { event: 0 }));
    }

    #[test]
    fn restriction_examples() {
        let mut rng = rng_from_seed(5);
        let h = simulate(&[2, 2], 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(h.restrict(h.labels()).unwrap(), h);
        let single = h.restrict(&[Label::new(2, 1)]).unwrap();
        assert!(single.events().is_empty());
        let pair = h.restrict(&[Label::new(1, 1), Label::new(1, 2)]).unwrap();
        assert_eq!(pair.count(Level::Parasite), 1);
        assert_eq!(pair.count(Level::Host), 0);
        assert_eq!(h.restrict(&[Label::new(3, 1)]), Err(HistoryError::NotInIndexSet(Label::new(3, 1))));
    }

    #[test]
    fn bad_rates() {
        let mut rng = rng_from_seed(1);
        assert!(matches!(simulate(&[1], 0.0, 1.0, &mut rng), Err(HistoryError::InvalidParameters(_))));
    }
}
