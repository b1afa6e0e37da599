//! Partitions of `C([n], k)` into perfect matchings when `k | n`.
//!
//! The construction adds the elements `1..=n` one at a time to
//! `m = C(n-1, k-1)` partial partitions of `n/k` parts each. After element
//! `i` has been placed, every subset `A ⊆ [i]` occurs as a part exactly
//! `C(n-i, k-|A|)` times in total. Placing element `i+1` means choosing one
//! part per partition to receive it, such that each `A` is chosen exactly
//! `C(n-i-1, k-|A|-1)` times. A fractional choice always exists, so an
//! integral max flow does too:
//!
//! ```text
//! source -1-> partition j -(copies of A in j)-> A -(C(n-i-1, k-|A|-1))-> sink
//! ```
//!
//! When all elements are placed every part is a k-set and each k-set occurs
//! exactly once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::binom::binom_i;
use crate::error::{Error, Result};
use crate::family::{GroundParams, KSet, SetFamily};

/// Largest `C(n, k)` the construction accepts.
pub const PARTITION_GUARD: u128 = 50_000;

/// A partition of all k-sets into parallel classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaranyaiPartition {
    params: GroundParams,
    classes: Vec<SetFamily>,
}

impl BaranyaiPartition {
    pub fn params(&self) -> GroundParams {
        self.params
    }

    pub fn classes(&self) -> &[SetFamily] {
        &self.classes
    }

    /// Checks that every class partitions `[n]` and that the classes
    /// partition `C([n], k)`.
    pub fn validate(&self) -> Result<()> {
        let p = self.params;
        let expected = p.star_size() as usize;
        if self.classes.len() != expected {
            return Err(Error::domain(format!(
                "{} classes instead of {expected}",
                self.classes.len()
            )));
        }
        let mut seen = Vec::with_capacity(p.universe_size() as usize);
        for (c, class) in self.classes.iter().enumerate() {
            let mut cover = 0u64;
            for s in class.iter() {
                if cover & s.bits() != 0 {
                    return Err(Error::domain(format!("class {c} is not a matching")));
                }
                cover |= s.bits();
                seen.push(s);
            }
            if cover != p.ground_mask() || class.len() != (p.n / p.k) as usize {
                return Err(Error::domain(format!("class {c} does not cover [n]")));
            }
        }
        seen.sort_unstable();
        if seen != p.all_ksets()? {
            return Err(Error::domain("classes do not partition the k-sets"));
        }
        Ok(())
    }

    /// One class per line, sets joined by `|`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for class in &self.classes {
            let line: Vec<String> = class.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{}", line.join("|"));
        }
        out
    }
}

fn check_params(params: GroundParams) -> Result<()> {
    if !params.n.is_multiple_of(params.k) {
        return Err(Error::InvalidParams {
            n: params.n,
            k: params.k,
            reason: "k must divide n".into(),
        });
    }
    let size = params.universe_size();
    if size > PARTITION_GUARD {
        return Err(Error::GuardExceeded {
            what: "partitioning the k-sets".into(),
            size,
            limit: PARTITION_GUARD,
        });
    }
    Ok(())
}

fn finish(params: GroundParams, parts: Vec<Vec<u64>>) -> BaranyaiPartition {
    let mut classes: Vec<SetFamily> = parts
        .into_iter()
        .map(|p| SetFamily::from_valid(params, p.into_iter().map(KSet).collect()))
        .collect();
    classes.sort_by(|a, b| a.members().cmp(b.members()));
    BaranyaiPartition { params, classes }
}

/// Builds the partition by integral flows, falling back to exhaustive
/// backtracking for `n <= 8` should the flow route ever fail validation.
pub fn baranyai_partition(params: GroundParams) -> Result<BaranyaiPartition> {
    check_params(params)?;
    let built = finish(params, flow_construction(params)?);
    match built.validate() {
        Ok(()) => Ok(built),
        Err(e) if params.n <= 8 => {
            log::warn!("flow construction failed validation ({e}); backtracking");
            backtracking_partition(params)
        }
        Err(e) => Err(e),
    }
}

fn flow_construction(params: GroundParams) -> Result<Vec<Vec<u64>>> {
    let (n, k) = (params.n as i64, params.k as i64);
    let m = params.star_size() as usize;
    let per_class = (n / k) as usize;
    let mut parts = vec![vec![0u64; per_class]; m];
    for i in 0..n {
        let bit = 1u64 << i;
        // Distinct part types still short of k elements, in sorted order.
        let mut types: BTreeMap<u64, usize> = BTreeMap::new();
        for class in &parts {
            for &a in class {
                if (a.count_ones() as i64) < k {
                    let next = types.len();
                    types.entry(a).or_insert(next);
                }
            }
        }
        let type_list: Vec<u64> = types.keys().copied().collect();
        for (idx, t) in type_list.iter().enumerate() {
            *types.get_mut(t).expect("present") = idx;
        }
        let source = 0;
        let sink = 1;
        let class_node = |j: usize| 2 + j;
        let type_node = |t: usize| 2 + m + t;
        let mut net = Dinic::new(2 + m + type_list.len());
        for (j, class) in parts.iter().enumerate() {
            net.add_edge(source, class_node(j), 1);
            let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
            for &a in class {
                if let Some(&t) = types.get(&a) {
                    *counts.entry(t).or_default() += 1;
                }
            }
            for (t, c) in counts {
                net.add_edge(class_node(j), type_node(t), c);
            }
        }
        let remaining = n - i - 1;
        for (t, &a) in type_list.iter().enumerate() {
            let need = binom_i(remaining, k - a.count_ones() as i64 - 1) as i64;
            if need > 0 {
                net.add_edge(type_node(t), sink, need);
            }
        }
        let flow = net.max_flow(source, sink);
        if flow != m as i64 {
            return Err(Error::domain(format!(
                "flow of {flow} instead of {m} while placing element {}",
                i + 1
            )));
        }
        for (j, class) in parts.iter_mut().enumerate() {
            let t = net
                .saturated_targets(class_node(j))
                .find(|&v| v >= 2 + m)
                .map(|v| v - 2 - m)
                .expect("each class sends one unit");
            let a = type_list[t];
            let slot = class
                .iter()
                .position(|&x| x == a)
                .expect("type present in class");
            class[slot] |= bit;
        }
    }
    Ok(parts)
}

/// Exhaustive search, usable for tiny parameters and as a test oracle.
pub fn backtracking_partition(params: GroundParams) -> Result<BaranyaiPartition> {
    check_params(params)?;
    let all: Vec<u64> = params.all_ksets()?.iter().map(|s| s.bits()).collect();
    let mut used = vec![false; all.len()];
    let mut classes: Vec<Vec<u64>> = Vec::new();
    let mut current = Vec::new();
    if !fill(
        &all,
        &mut used,
        &mut classes,
        &mut current,
        0,
        params.ground_mask(),
    ) {
        return Err(Error::domain("no partition found"));
    }
    Ok(finish(params, classes))
}

fn fill(
    all: &[u64],
    used: &mut [bool],
    classes: &mut Vec<Vec<u64>>,
    current: &mut Vec<u64>,
    covered: u64,
    full: u64,
) -> bool {
    if covered == full {
        classes.push(std::mem::take(current));
        let done = used.iter().all(|&u| u);
        if done || fill(all, used, classes, current, 0, full) {
            return true;
        }
        *current = classes.pop().expect("just pushed");
        return false;
    }
    // The lowest uncovered element must be covered by the next set; when
    // starting a class, fixing the first unused set breaks class symmetry.
    let low = 1u64 << (!covered).trailing_zeros();
    let first_unused = if covered == 0 {
        (0..all.len()).find(|&i| !used[i] && all[i] & low != 0)
    } else {
        None
    };
    for (idx, &s) in all.iter().enumerate() {
        if used[idx] || s & covered != 0 || s & low == 0 {
            continue;
        }
        if first_unused.is_some_and(|f| f != idx) {
            continue;
        }
        used[idx] = true;
        current.push(s);
        if fill(all, used, classes, current, covered | s, full) {
            return true;
        }
        current.pop();
        used[idx] = false;
    }
    false
}

/// Dinic's max flow on small integer networks.
struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize) -> Self {
        Dinic {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.head[u].len() {
            let e = self.head[u][self.iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Heads of forward edges out of `u` that carry flow.
    fn saturated_targets(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.head[u]
            .iter()
            .filter(|&&e| e % 2 == 0 && self.cap[e ^ 1] > 0)
            .map(|&e| self.to[e])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, k: u32) -> GroundParams {
        GroundParams::new(n, k).unwrap()
    }

    #[test]
    fn flow_partitions_are_valid() {
        for (n, k) in [
            (4, 2),
            (6, 2),
            (6, 3),
            (8, 2),
            (8, 4),
            (9, 3),
            (10, 5),
            (12, 3),
            (12, 4),
        ] {
            let part = baranyai_partition(p(n, k)).unwrap();
            part.validate().unwrap();
            assert_eq!(part.classes().len() as u128, p(n, k).star_size());
        }
    }

    #[test]
    fn backtracking_oracle_agrees_on_counts() {
        for (n, k) in [(4, 2), (6, 2), (6, 3), (8, 4)] {
            let part = backtracking_partition(p(n, k)).unwrap();
            part.validate().unwrap();
        }
        let four = backtracking_partition(p(4, 2)).unwrap();
        assert_eq!(four.to_text(), "1,2|3,4\n1,3|2,4\n2,3|1,4\n");
    }

    #[test]
    fn indivisible_is_rejected() {
        assert!(baranyai_partition(p(7, 2)).is_err());
    }
}
