use std::cmp::Ordering;
use std::fmt::Write as _;

use super::SolveError;
use crate::formats::{
    content_lines, end_line, parse_field, parse_finite, KnapsackInstance, KnapsackItem, ParseError, ParseErrorKind,
};
use crate::Scalar;

/// Upper bound on DP table cells before `knapsack_dp` refuses an instance.
const DP_CELL_LIMIT: usize = 1 << 27;

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackSolution<T = f64> {
    /// Chosen item ids, ascending.
    pub chosen: Vec<u32>,
    pub total_value: T,
    pub total_weight: u64,
}

impl<T: Scalar> KnapsackSolution<T> {
    /// Totals are recomputed from the items, summed in ascending id order.
    pub fn from_ids(instance: &KnapsackInstance<T>, mut chosen: Vec<u32>) -> Self {
        chosen.sort_unstable();
        chosen.dedup();
        let mut total_value = T::zero();
        let mut total_weight = 0u64;
        for id in &chosen {
            let item = instance.item(*id).expect("chosen ids come from the instance");
            total_value = total_value + item.value;
            total_weight += item.weight;
        }
        Self { chosen, total_value, total_weight }
    }
}

/// Exact 0/1 knapsack by dynamic programming over capacities.
///
/// Among optimal subsets the lexicographically smallest id sequence wins.
pub fn knapsack_dp<T: Scalar>(instance: &KnapsackInstance<T>) -> Result<KnapsackSolution<T>, SolveError> {
    let mut items: Vec<KnapsackItem<T>> = instance.items().to_vec();
    items.sort_by_key(|i| i.id);
    let n = items.len();
    let weight_sum: u64 = items.iter().map(|i| i.weight).fold(0u64, u64::saturating_add);
    let cap = instance.capacity().min(weight_sum) as usize;
    let width = cap + 1;
    if (n + 1).saturating_mul(width) > DP_CELL_LIMIT {
        return Err(SolveError::TooLarge { size: (n + 1).saturating_mul(width), limit: DP_CELL_LIMIT });
    }

    // best[i][c]: optimal value using items[i..] within capacity c
    let mut best = vec![T::zero(); (n + 1) * width];
    for i in (0..n).rev() {
        let w = items[i].weight as usize;
        let v = items[i].value;
        for c in 0..width {
            let skip = best[(i + 1) * width + c];
            best[i * width + c] = if w <= c { skip.max(v + best[(i + 1) * width + c - w]) } else { skip };
        }
    }

    // Walk forward preferring inclusion: a set containing the current id is
    // lexicographically smaller than any optimal continuation without it,
    // unless that continuation is the empty set (value zero).
    let mut chosen = Vec::new();
    let mut c = cap;
    for (i, item) in items.iter().enumerate() {
        let w = item.weight as usize;
        let here = best[i * width + c];
        let skip = best[(i + 1) * width + c];
        let can_take = w <= c && item.value + best[(i + 1) * width + c - w] == here;
        let skip_to_empty = skip == here && here == T::zero();
        if can_take && !skip_to_empty {
            chosen.push(item.id);
            c -= w;
        }
    }
    Ok(KnapsackSolution::from_ids(instance, chosen))
}

/// Dantzig bound: greedy by value density with a fractional last item.
///
/// Items with non-positive value are ignored; zero-weight items with
/// positive value are always included.
pub fn fractional_bound<T: Scalar>(instance: &KnapsackInstance<T>) -> T {
    let sorted = by_density(instance.items());
    let mut remaining = instance.capacity();
    let mut bound = T::zero();
    for item in sorted {
        if item.weight <= remaining {
            remaining -= item.weight;
            bound = bound + item.value;
        } else {
            bound = bound + item.value * T::of_usize(remaining as usize) / T::of_usize(item.weight as usize);
            break;
        }
    }
    bound
}

/// Positive-value items ordered by decreasing value/weight, ties by id.
fn by_density<T: Scalar>(items: &[KnapsackItem<T>]) -> Vec<KnapsackItem<T>> {
    let mut useful: Vec<KnapsackItem<T>> = items.iter().copied().filter(|i| i.value > T::zero()).collect();
    useful.sort_by(|a, b| {
        // compare a.v/a.w with b.v/b.w without dividing by zero
        let lhs = a.value * T::of_usize(b.weight as usize);
        let rhs = b.value * T::of_usize(a.weight as usize);
        rhs.partial_cmp(&lhs).unwrap_or(Ordering::Equal).then(a.id.cmp(&b.id))
    });
    useful
}

/// Depth-first branch-and-bound with the fractional bound for pruning.
/// Agrees with `knapsack_dp` on the optimal value; the chosen set may differ
/// when several subsets tie.
pub fn knapsack_branch_bound<T: Scalar>(instance: &KnapsackInstance<T>) -> KnapsackSolution<T> {
    let items = by_density(instance.items());
    let mut search = BranchBound { items: &items, best_value: T::zero(), best: Vec::new(), current: Vec::new() };
    search.explore(0, instance.capacity(), T::zero());
    let chosen = search.best.iter().map(|&k| items[k].id).collect();
    KnapsackSolution::from_ids(instance, chosen)
}

struct BranchBound<'a, T> {
    items: &'a [KnapsackItem<T>],
    best_value: T,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl<T: Scalar> BranchBound<'_, T> {
    fn bound(&self, from: usize, mut remaining: u64, value: T) -> T {
        let mut bound = value;
        for item in &self.items[from..] {
            if item.weight <= remaining {
                remaining -= item.weight;
                bound = bound + item.value;
            } else {
                return bound + item.value * T::of_usize(remaining as usize) / T::of_usize(item.weight as usize);
            }
        }
        bound
    }

    fn explore(&mut self, k: usize, remaining: u64, value: T) {
        if value > self.best_value {
            self.best_value = value;
            self.best.clone_from(&self.current);
        }
        if k == self.items.len() || self.bound(k, remaining, value) <= self.best_value {
            return;
        }
        let item = self.items[k];
        if item.weight <= remaining {
            self.current.push(k);
            self.explore(k + 1, remaining - item.weight, value + item.value);
            self.current.pop();
        }
        self.explore(k + 1, remaining, value);
    }
}

/// `ITEMS <ids...>` / `VALUE <v>` / `WEIGHT <w>`.
pub fn serialize_knapsack_solution<T: Scalar>(solution: &KnapsackSolution<T>) -> String {
    let mut out = String::from("ITEMS");
    for id in &solution.chosen {
        write!(out, " {id}").unwrap();
    }
    writeln!(out, "\nVALUE {}\nWEIGHT {}", solution.total_value, solution.total_weight).unwrap();
    out
}

pub fn parse_knapsack_solution<T: Scalar>(text: &str) -> Result<KnapsackSolution<T>, ParseError> {
    let mut chosen = None;
    let mut value = None;
    let mut weight = None;
    for (line, body) in content_lines(text, None) {
        let mut tok = body.split_whitespace();
        match tok.next() {
            Some("ITEMS") => {
                chosen = Some(tok.map(|t| parse_field::<u32>(line, Some(t), "item id")).collect::<Result<Vec<_>, _>>()?)
            }
            Some("VALUE") => value = Some(parse_finite::<T>(line, tok.next(), "value")?),
            Some("WEIGHT") => weight = Some(parse_field::<u64>(line, tok.next(), "weight")?),
            _ => return Err(ParseError::syntax(line, "expected ITEMS, VALUE or WEIGHT")),
        }
    }
    let eof = end_line(text);
    Ok(KnapsackSolution {
        chosen: chosen.ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("ITEMS line")))?,
        total_value: value.ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("VALUE line")))?,
        total_weight: weight.ok_or_else(|| ParseError::new(eof, ParseErrorKind::Missing("WEIGHT line")))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn instance(raw: &[(u64, f64)], cap: u64) -> KnapsackInstance {
        let items = raw
            .iter()
            .enumerate()
            .map(|(k, &(weight, value))| KnapsackItem { id: k as u32 + 1, weight, value })
            .collect();
        KnapsackInstance::new(items, cap).unwrap()
    }

    /// Best value and lexicographically smallest optimal id set, by enumeration.
    fn brute(inst: &KnapsackInstance) -> (f64, Vec<u32>) {
        let items = inst.items();
        let mut best: Option<(f64, Vec<u32>)> = None;
        for mask in 0u32..(1 << items.len()) {
            let ids: Vec<u32> = (0..items.len()).filter(|b| mask >> b & 1 == 1).map(|b| items[b].id).collect();
            let sol = KnapsackSolution::from_ids(inst, ids);
            if sol.total_weight > inst.capacity() {
                continue;
            }
            best = match best {
                Some((v, ref set)) if v > sol.total_value || (v == sol.total_value && *set <= sol.chosen) => best,
                _ => Some((sol.total_value, sol.chosen)),
            };
        }
        best.unwrap()
    }

    #[test]
    fn three_item_example() {
        let inst = instance(&[(2, 3.0), (3, 4.0), (4, 5.0)], 5);
        assert_eq!(brute(&inst), (7.0, vec![1, 2]));
        let dp = knapsack_dp(&inst).unwrap();
        assert_eq!(dp.chosen, vec![1, 2]);
        assert_eq!(dp.total_value, 7.0);
        assert_eq!(dp.total_weight, 5);
        assert_eq!(knapsack_branch_bound(&inst).total_value, 7.0);
    }

    #[test]
    fn empty_and_oversized() {
        let empty = instance(&[], 10);
        assert_eq!(
            knapsack_dp(&empty).unwrap(),
            KnapsackSolution { chosen: vec![], total_value: 0.0, total_weight: 0 }
        );
        assert_eq!(knapsack_branch_bound(&empty).chosen, Vec::<u32>::new());
        let heavy = instance(&[(6, 10.0)], 5);
        assert!(knapsack_dp(&heavy).unwrap().chosen.is_empty());
        assert!(knapsack_branch_bound(&heavy).chosen.is_empty());
    }

    #[test]
    fn lexicographic_tie_break() {
        // {1, 4} and {3, 4} both reach 10
        let inst = instance(&[(3, 5.0), (2, 4.0), (3, 5.0), (2, 5.0)], 5);
        assert_eq!(brute(&inst).1, vec![1, 4]);
        assert_eq!(knapsack_dp(&inst).unwrap().chosen, vec![1, 4]);
    }

    #[test]
    fn zero_value_items_follow_lex_order() {
        // [1, 2] precedes [2], but [2] precedes [2, 3]
        let inst = instance(&[(1, 0.0), (1, 2.0), (1, 0.0)], 3);
        assert_eq!(brute(&inst).1, vec![1, 2]);
        assert_eq!(knapsack_dp(&inst).unwrap().chosen, vec![1, 2]);
        let inst = instance(&[(1, 2.0), (1, 0.0)], 2);
        assert_eq!(brute(&inst).1, vec![1]);
        assert_eq!(knapsack_dp(&inst).unwrap().chosen, vec![1]);
    }

    #[test]
    fn huge_capacity_is_clamped() {
        let inst = instance(&[(3, 1.0), (4, 2.0)], u64::MAX);
        assert_eq!(knapsack_dp(&inst).unwrap().total_value, 3.0);
        let wide = instance(&[(1 << 40, 1.0), (1 << 41, 2.0)], 1 << 42);
        assert!(matches!(knapsack_dp(&wide), Err(SolveError::TooLarge { .. })));
        assert_eq!(knapsack_branch_bound(&wide).total_value, 3.0);
    }

    #[test]
    fn dantzig_bound() {
        let inst = instance(&[(2, 3.0), (3, 4.0), (4, 5.0)], 5);
        // densities 1.5, 1.333, 1.25: take 1 and 2 fully
        assert_eq!(fractional_bound(&inst), 7.0);
        let partial = instance(&[(2, 4.0), (4, 4.0)], 4);
        assert_eq!(fractional_bound(&partial), 6.0);
        let all_fit = instance(&[(1, 1.0), (2, 2.5)], 10);
        assert_eq!(fractional_bound(&all_fit), 3.5);
    }

    #[test]
    fn solution_text_round_trip() {
        let inst = instance(&[(2, 3.0), (3, 4.0), (4, 5.0)], 5);
        let sol = knapsack_dp(&inst).unwrap();
        let text = serialize_knapsack_solution(&sol);
        assert_eq!(text, "ITEMS 1 2\nVALUE 7\nWEIGHT 5\n");
        assert_eq!(parse_knapsack_solution::<f64>(&text).unwrap(), sol);
        assert!(parse_knapsack_solution::<f64>("VALUE 1\nWEIGHT 1").is_err());
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(
            raw in prop::collection::vec((0u64..12, 0u32..20), 0..10),
            cap in 0u64..40,
        ) {
            let raw: Vec<(u64, f64)> = raw.into_iter().map(|(w, v)| (w, f64::from(v))).collect();
            let inst = instance(&raw, cap);
            let (value, set) = brute(&inst);
            let dp = knapsack_dp(&inst).unwrap();
            prop_assert_eq!(dp.total_value, value);
            prop_assert_eq!(dp.chosen, set);
            let bb = knapsack_branch_bound(&inst);
            prop_assert_eq!(bb.total_value, value);
            prop_assert!(bb.total_weight <= cap);
            prop_assert!(fractional_bound(&inst) >= value);
        }
    }
}
