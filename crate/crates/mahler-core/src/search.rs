//! Optimal factorization search, exhaustive oracles, and theorem checks.
//!
//! Three search strategies return the same answer by construction of the
//! underlying theory; `verify_theorems` re-proves that on concrete inputs.
//! The oracles enumerate factorizations by brute force over assignments of
//! ladder occurrences to entry slots and share no code with delta/epsilon,
//! so agreement between the two paths is meaningful evidence.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::factorization::{
    is_direct_subfactorization, lex_compare, Factorization, Fraction, MeasureVector,
};
use crate::forest::{
    find_homomorphism, is_isomorphic, ChildOrder, FactorizationTree, TreeBuilder, DEFAULT_NODE_CAP,
};
use crate::quotient::quotient;
use crate::rational::{PrimeLadder, ReducedRational};

/// Level cap for exhaustive enumeration of primitive factorizations.
pub const ORACLE_PRIMITIVE_LEVEL_CAP: usize = 9;
/// Level cap for exhaustive enumeration of all factorizations.
pub const ORACLE_ALL_LEVEL_CAP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Leaves of the canonical optimal tree.
    Canonical,
    /// Leaves of the maximal primitive tree.
    Primitive,
    /// Frontier expansion with measure-class pruning at separation indices.
    Staged,
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchStrategy::Canonical => write!(f, "canonical"),
            SearchStrategy::Primitive => write!(f, "primitive"),
            SearchStrategy::Staged => write!(f, "staged"),
        }
    }
}

impl std::str::FromStr for SearchStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(SearchStrategy::Canonical),
            "primitive" => Ok(SearchStrategy::Primitive),
            "staged" => Ok(SearchStrategy::Staged),
            other => Err(Error::InvalidInput(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub node_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// One pruning event: the candidate count at `level` before and after
/// discarding everything outside the smallest measure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneRecord {
    pub level: usize,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// All factorizations attaining the minimal measure vector, in
    /// canonical form, deduplicated and sorted.
    pub optimal_set: Vec<Factorization>,
    pub measure: MeasureVector,
    /// Total candidate contents materialized during the search. Tree
    /// strategies count tree vertices; the staged strategy counts distinct
    /// frontier contents summed over levels.
    pub candidates_examined: usize,
    pub pruning_trace: Vec<PruneRecord>,
}

/// Keeps exactly the candidates whose measure vector is lexicographically
/// minimal. All candidates must sit at one common level.
pub fn lex_filter(candidates: &[Factorization]) -> Result<Vec<Factorization>> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput(
            "lex filter needs at least one candidate".into(),
        ));
    }
    let level = candidates[0].level();
    if candidates.iter().any(|c| c.level() != level) {
        return Err(Error::InvalidInput(
            "lex filter candidates must share one level".into(),
        ));
    }
    let vectors: Vec<MeasureVector> = candidates.iter().map(|c| c.measure_vector()).collect();
    let min = vectors.iter().min().expect("non-empty").clone();
    Ok(candidates
        .iter()
        .zip(&vectors)
        .filter(|(_, v)| **v == min)
        .map(|(c, _)| c.clone())
        .collect())
}

pub fn optimal_factorizations(
    alpha: &ReducedRational,
    strategy: SearchStrategy,
) -> Result<SearchResult> {
    optimal_factorizations_with(alpha, strategy, &SearchConfig::default())
}

pub fn optimal_factorizations_with(
    alpha: &ReducedRational,
    strategy: SearchStrategy,
    config: &SearchConfig,
) -> Result<SearchResult> {
    match strategy {
        SearchStrategy::Staged => {
            let ladder = alpha.prime_ladder()?;
            let (frontier, examined, trace) = staged_run(&ladder, ladder.len(), config)?;
            let mut optimal_set = frontier;
            optimal_set.sort();
            let measure = optimal_set
                .first()
                .map(Factorization::measure_vector)
                .unwrap_or_else(|| MeasureVector::new(Vec::new()));
            Ok(SearchResult {
                optimal_set,
                measure,
                candidates_examined: examined,
                pruning_trace: trace,
            })
        }
        SearchStrategy::Canonical | SearchStrategy::Primitive => {
            let builder = TreeBuilder::default().with_node_cap(config.node_cap);
            let tree = match strategy {
                SearchStrategy::Canonical => builder.canonical_optimal(alpha)?,
                _ => builder.maximal_primitive(alpha)?,
            };
            let leaves: Vec<Factorization> = tree.leaves().into_iter().cloned().collect();
            let winners = lex_filter(&leaves)?;
            let mut optimal_set: Vec<Factorization> =
                winners.iter().map(Factorization::canonicalize).collect();
            optimal_set.sort();
            optimal_set.dedup();
            let measure = optimal_set[0].measure_vector();
            Ok(SearchResult {
                optimal_set,
                measure,
                candidates_examined: tree.len(),
                pruning_trace: vec![PruneRecord {
                    level: tree.ladder().len(),
                    before: leaves.len(),
                    after: winners.len(),
                }],
            })
        }
    }
}

/// The surviving candidate set after staged search has run through `level`,
/// which must be a separation index of alpha's ladder.
pub fn staged_frontier(alpha: &ReducedRational, level: usize) -> Result<Vec<Factorization>> {
    staged_frontier_with(alpha, level, &SearchConfig::default())
}

pub fn staged_frontier_with(
    alpha: &ReducedRational,
    level: usize,
    config: &SearchConfig,
) -> Result<Vec<Factorization>> {
    let ladder = alpha.prime_ladder()?;
    if !ladder.separation_indices().contains(&level) {
        return Err(Error::InvalidInput(format!(
            "level {level} is not a separation index of {alpha}"
        )));
    }
    let (mut frontier, _, _) = staged_run(&ladder, level, config)?;
    frontier.sort();
    Ok(frontier)
}

/// Expands the candidate frontier level by level using delta-or-epsilon
/// children, pruning to the smallest measure class whenever a separation
/// index is reached. Frontiers hold distinct contents only.
fn staged_run(
    ladder: &PrimeLadder,
    stop_level: usize,
    config: &SearchConfig,
) -> Result<(Vec<Factorization>, usize, Vec<PruneRecord>)> {
    let separations: BTreeSet<usize> = ladder.separation_indices().into_iter().collect();
    let mut frontier = vec![Factorization::empty()];
    let mut examined = 1usize;
    let mut trace = Vec::new();
    for n in 0..stop_level {
        let mut next: Vec<Factorization> = Vec::new();
        for f in &frontier {
            let d = f.delta(ladder)?;
            let kids = if d.is_empty() {
                vec![f.epsilon(ladder)?]
            } else {
                d
            };
            for kid in kids {
                if !next.contains(&kid) {
                    next.push(kid);
                }
            }
        }
        examined += next.len();
        if examined > config.node_cap {
            return Err(Error::CapacityExceeded(format!(
                "staged frontier for {} exceeds the {}-node cap",
                ladder.alpha(),
                config.node_cap
            )));
        }
        frontier = next;
        let level = n + 1;
        if separations.contains(&level) {
            let before = frontier.len();
            let min = frontier
                .iter()
                .map(Factorization::measure_vector)
                .min()
                .expect("frontier never empties");
            frontier.retain(|f| f.measure_vector() == min);
            trace.push(PruneRecord {
                level,
                before,
                after: frontier.len(),
            });
        }
    }
    Ok((frontier, examined, trace))
}

/// The t-norm of a factorization: the l^t norm of the entry measures.
/// Factors out the largest log to stay finite for large t.
pub fn t_norm(factorization: &Factorization, t: f64) -> Result<f64> {
    if t.is_nan() || t < 1.0 {
        return Err(Error::InvalidInput(format!(
            "t must be at least 1, got {t}"
        )));
    }
    let logs: Vec<f64> = factorization
        .entries()
        .iter()
        .map(Fraction::ln_max)
        .collect();
    let top = logs.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = logs.iter().map(|&x| (x / top).powf(t)).sum();
    Ok(top * sum.powf(1.0 / t))
}

/// Upper bound for the t-metric Mahler measure of alpha: the smallest
/// t-norm over the leaves of the canonical optimal tree.
pub fn mt_upper(alpha: &ReducedRational, t: f64) -> Result<f64> {
    mt_upper_with(alpha, t, &SearchConfig::default())
}

pub fn mt_upper_with(alpha: &ReducedRational, t: f64, config: &SearchConfig) -> Result<f64> {
    if t.is_nan() || t < 1.0 {
        return Err(Error::InvalidInput(format!(
            "t must be at least 1, got {t}"
        )));
    }
    let tree = TreeBuilder::default()
        .with_node_cap(config.node_cap)
        .canonical_optimal(alpha)?;
    let mut best = f64::INFINITY;
    for leaf in tree.leaves() {
        best = best.min(t_norm(leaf, t)?);
    }
    Ok(best)
}

/// Exhaustively enumerates the primitive factorizations of every partial,
/// indexed by level. Independent of delta/epsilon: occurrences of ladder
/// primes are assigned to entry slots in all possible ways.
pub fn oracle_enumerate_primitive(alpha: &ReducedRational) -> Result<Vec<BTreeSet<Factorization>>> {
    oracle_enumerate(alpha, ORACLE_PRIMITIVE_LEVEL_CAP, true)
}

/// Exhaustively enumerates all factorizations of every partial. The state
/// space is larger than the primitive one, hence the lower default cap.
pub fn oracle_enumerate_all(alpha: &ReducedRational) -> Result<Vec<BTreeSet<Factorization>>> {
    oracle_enumerate(alpha, ORACLE_ALL_LEVEL_CAP, false)
}

pub fn oracle_enumerate(
    alpha: &ReducedRational,
    level_cap: usize,
    primitive_only: bool,
) -> Result<Vec<BTreeSet<Factorization>>> {
    let ladder = alpha.prime_ladder()?;
    if ladder.len() > level_cap {
        return Err(Error::CapacityExceeded(format!(
            "ladder of {alpha} has {} primes, oracle cap is {level_cap}",
            ladder.len()
        )));
    }
    Ok((0..=ladder.len())
        .map(|n| oracle_level(&ladder, n, primitive_only))
        .collect())
}

struct Slot {
    num: BigUint,
    den: BigUint,
    num_occ: u32,
    den_occ: u32,
}

impl Slot {
    fn fresh() -> Self {
        Slot {
            num: BigUint::one(),
            den: BigUint::one(),
            num_occ: 0,
            den_occ: 0,
        }
    }
}

fn oracle_level(
    ladder: &PrimeLadder,
    level: usize,
    primitive_only: bool,
) -> BTreeSet<Factorization> {
    let mut found = BTreeSet::new();
    if level == 0 {
        found.insert(Factorization::empty());
        return found;
    }
    let mut slots: Vec<Slot> = (0..level).map(|_| Slot::fresh()).collect();
    assign_occurrence(ladder, level, 1, 0, &mut slots, primitive_only, &mut found);
    found
}

/// Groups the first `level` ladder occurrences into unordered non-empty
/// entries: occurrence `occ` joins an already used slot or opens the next
/// one, so each grouping arises exactly once. Products are updated by an
/// exact multiply on entry and divide on exit.
fn assign_occurrence(
    ladder: &PrimeLadder,
    level: usize,
    occ: usize,
    used: usize,
    slots: &mut Vec<Slot>,
    primitive_only: bool,
    found: &mut BTreeSet<Factorization>,
) {
    if occ > level {
        harvest(&slots[..used], level, primitive_only, found);
        return;
    }
    let prime = ladder.prime(occ).clone();
    let on_numerator = ladder.sign(occ) == crate::rational::PrimeSign::Numerator;
    for s in 0..=used.min(level - 1) {
        if on_numerator {
            slots[s].num *= &prime;
            slots[s].num_occ += 1;
        } else {
            slots[s].den *= &prime;
            slots[s].den_occ += 1;
        }
        let now_used = used.max(s + 1);
        assign_occurrence(
            ladder,
            level,
            occ + 1,
            now_used,
            slots,
            primitive_only,
            found,
        );
        if on_numerator {
            slots[s].num /= &prime;
            slots[s].num_occ -= 1;
        } else {
            slots[s].den /= &prime;
            slots[s].den_occ -= 1;
        }
    }
}

/// Records every factorization whose entry multiset is the given grouping.
/// A multiset always admits a non-increasing arrangement, so validity
/// reduces to the primitivity restriction when one is asked for. Entries
/// sharing both maximum and numerator stay mutually unordered, so each of
/// their arrangements is a distinct canonical form.
fn harvest(live: &[Slot], level: usize, primitive_only: bool, found: &mut BTreeSet<Factorization>) {
    if primitive_only {
        for slot in live {
            let occ = if slot.num >= slot.den {
                slot.num_occ
            } else {
                slot.den_occ
            };
            if occ > 1 {
                return;
            }
        }
    }
    let mut entries: Vec<Fraction> = live
        .iter()
        .map(|s| Fraction::new(s.num.clone(), s.den.clone()).expect("slot sides are positive"))
        .collect();
    entries.sort_by(|a, b| (b.max_side(), b.numerator()).cmp(&(a.max_side(), a.numerator())));
    // Maximal runs of equal (maximum, numerator).
    let mut groups: Vec<Vec<Vec<Fraction>>> = Vec::new();
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        let key = (entries[start].max_side(), entries[start].numerator());
        while end < entries.len() && (entries[end].max_side(), entries[end].numerator()) == key {
            end += 1;
        }
        groups.push(distinct_arrangements(&entries[start..end]));
        start = end;
    }
    let mut assembled = Vec::with_capacity(entries.len());
    emit_arrangements(&groups, 0, &mut assembled, level, found);
}

fn distinct_arrangements(items: &[Fraction]) -> Vec<Vec<Fraction>> {
    let mut out = BTreeSet::new();
    let mut buf = items.to_vec();
    arrange_rec(&mut buf, 0, &mut out);
    out.into_iter().collect()
}

fn arrange_rec(buf: &mut Vec<Fraction>, k: usize, out: &mut BTreeSet<Vec<Fraction>>) {
    if k + 1 >= buf.len() {
        out.insert(buf.clone());
        return;
    }
    for i in k..buf.len() {
        buf.swap(k, i);
        arrange_rec(buf, k + 1, out);
        buf.swap(k, i);
    }
}

fn emit_arrangements(
    groups: &[Vec<Vec<Fraction>>],
    index: usize,
    assembled: &mut Vec<Fraction>,
    level: usize,
    found: &mut BTreeSet<Factorization>,
) {
    if index == groups.len() {
        found.insert(Factorization::new(level, assembled.clone()).canonicalize());
        return;
    }
    for option in &groups[index] {
        let before = assembled.len();
        assembled.extend_from_slice(option);
        emit_arrangements(groups, index + 1, assembled, level, found);
        assembled.truncate(before);
    }
}

const SAMPLE_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Draws a random positive rational with at most `max_primes` prime
/// occurrences split across numerator and denominator. With
/// `allow_repeated` a third of the draws (when room permits) repeat one
/// prime so that non-square-free ladders are exercised too.
pub fn sample_alpha<R: Rng>(
    rng: &mut R,
    max_primes: usize,
    allow_repeated: bool,
) -> ReducedRational {
    let max_primes = max_primes.max(1);
    let target = rng.gen_range(1..=max_primes);
    let repeat = allow_repeated && target >= 2 && rng.gen_bool(1.0 / 3.0);
    let distinct = if repeat { target - 1 } else { target };
    let mut pool = SAMPLE_PRIMES.to_vec();
    for i in 0..distinct {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut chosen: Vec<(u64, bool)> = pool[..distinct]
        .iter()
        .map(|&p| (p, rng.gen_bool(0.5)))
        .collect();
    if repeat {
        let copy = chosen[rng.gen_range(0..distinct)];
        chosen.push(copy);
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (p, on_numerator) in chosen {
        if on_numerator {
            num *= p;
        } else {
            den *= p;
        }
    }
    ReducedRational::new(num, den).expect("sampled sides are positive")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "fail"),
            CheckStatus::NotApplicable => write!(f, "n/a"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TheoremCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub witness: Option<String>,
}

impl TheoremCheck {
    fn pass(name: &'static str) -> Self {
        TheoremCheck {
            name,
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    fn fail(name: &'static str, witness: String) -> Self {
        TheoremCheck {
            name,
            status: CheckStatus::Fail,
            witness: Some(witness),
        }
    }

    fn not_applicable(name: &'static str, witness: String) -> Self {
        TheoremCheck {
            name,
            status: CheckStatus::NotApplicable,
            witness: Some(witness),
        }
    }

    fn from_outcome(name: &'static str, outcome: std::result::Result<(), String>) -> Self {
        match outcome {
            Ok(()) => TheoremCheck::pass(name),
            Err(witness) => TheoremCheck::fail(name, witness),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub node_cap: usize,
    pub oracle_primitive_cap: usize,
    pub oracle_all_cap: usize,
    pub t_cap: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            node_cap: DEFAULT_NODE_CAP,
            oracle_primitive_cap: ORACLE_PRIMITIVE_LEVEL_CAP,
            oracle_all_cap: ORACLE_ALL_LEVEL_CAP,
            t_cap: 65536.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub alpha: ReducedRational,
    pub checks: Vec<TheoremCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        let items: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "theorem": c.name,
                    "status": c.status.to_string(),
                    "witness": c.witness,
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "alpha": self.alpha.to_string(),
            "checks": items,
        }))
        .expect("report serialization cannot fail")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            match &check.witness {
                Some(w) => writeln!(f, "[{}] {}: {}", check.status, check.name, w)?,
                None => writeln!(f, "[{}] {}", check.status, check.name)?,
            }
        }
        write!(
            f,
            "result: {}",
            if self.all_passed() { "pass" } else { "fail" }
        )
    }
}

pub fn verify_theorems(alpha: &ReducedRational) -> Result<VerifyReport> {
    verify_theorems_with(alpha, &VerifyConfig::default())
}

/// Re-proves the structural theorems on one concrete input. Checks that
/// only hold for square-free alpha report n/a otherwise.
pub fn verify_theorems_with(
    alpha: &ReducedRational,
    config: &VerifyConfig,
) -> Result<VerifyReport> {
    let ladder = alpha.prime_ladder()?;
    if ladder.len() > config.oracle_primitive_cap {
        return Err(Error::CapacityExceeded(format!(
            "ladder of {alpha} has {} primes; the exhaustive checks stop at {}",
            ladder.len(),
            config.oracle_primitive_cap
        )));
    }
    let square_free = ladder.is_square_free();
    let builder = TreeBuilder::default().with_node_cap(config.node_cap);
    let p_tree = builder.maximal_primitive(alpha)?;
    let p_permuted = TreeBuilder::default()
        .with_node_cap(config.node_cap)
        .with_child_order(ChildOrder::Shuffled(0x5eed))
        .maximal_primitive(alpha)?;
    let o_tree = builder.canonical_optimal(alpha)?;
    let o_permuted = TreeBuilder::default()
        .with_node_cap(config.node_cap)
        .with_child_order(ChildOrder::Reversed)
        .canonical_optimal(alpha)?;
    let oracle_prim = oracle_enumerate(alpha, config.oracle_primitive_cap, true)?;
    let oracle_all = if ladder.len() <= config.oracle_all_cap {
        Some(oracle_enumerate(alpha, config.oracle_all_cap, false)?)
    } else {
        None
    };

    let checks = vec![
        check_trees_valid(&p_tree, &o_tree),
        check_contents_complete(&p_tree, &oracle_prim),
        check_optimal_embeds(&p_tree, &o_tree),
        check_self_homomorphism_identity(&p_tree, &o_tree),
        check_homomorphism_unique(&o_tree, &p_tree, &p_permuted),
        check_tree_unique("maximal-primitive-tree-unique", &p_tree, &p_permuted),
        check_tree_unique("canonical-optimal-tree-unique", &o_tree, &o_permuted),
        check_contents_injective(square_free, &p_tree, &o_tree),
        check_contents_determine_tree(square_free, &p_tree, &p_permuted),
        check_direct_sub_unique(
            square_free,
            &ladder,
            oracle_all.as_ref().unwrap_or(&oracle_prim),
        ),
        check_quotient_binary(square_free, &p_tree, &o_tree),
        check_quotient_unique(&p_tree, &p_permuted),
        check_optimal_primitive(oracle_all.as_deref(), &oracle_prim),
        check_strategies_agree(alpha, config)?,
        check_search_matches_enumeration(alpha, config, &oracle_prim)?,
        check_staged_prunes_preserve(alpha, config, &ladder, &o_tree)?,
        check_children_well_formed(&ladder, &p_tree),
        check_separation_definitions_agree(&ladder),
        check_t_order_matches_lex(config, &o_tree)?,
    ];

    Ok(VerifyReport {
        alpha: alpha.clone(),
        checks,
    })
}

fn check_trees_valid(p: &FactorizationTree, o: &FactorizationTree) -> TheoremCheck {
    let name = "built-trees-satisfy-axioms";
    let rp = p.validate();
    if !rp.is_ok() {
        return TheoremCheck::fail(name, format!("maximal primitive tree: {rp}"));
    }
    let ro = o.validate();
    if !ro.is_ok() {
        return TheoremCheck::fail(name, format!("canonical optimal tree: {ro}"));
    }
    TheoremCheck::pass(name)
}

/// Level by level, the contents of the maximal primitive tree are exactly
/// the primitive factorizations found by exhaustive enumeration.
fn check_contents_complete(
    p: &FactorizationTree,
    oracle: &[BTreeSet<Factorization>],
) -> TheoremCheck {
    let name = "primitive-contents-complete";
    for (level, expected) in oracle.iter().enumerate() {
        let got: BTreeSet<Factorization> = p
            .level_contents(level)
            .into_iter()
            .map(Factorization::canonicalize)
            .collect();
        if got != *expected {
            let missing: Vec<String> = expected.difference(&got).map(|f| f.to_string()).collect();
            let extra: Vec<String> = got.difference(expected).map(|f| f.to_string()).collect();
            return TheoremCheck::fail(
                name,
                format!(
                    "level {level}: missing [{}] extra [{}]",
                    missing.join(", "),
                    extra.join(", ")
                ),
            );
        }
    }
    TheoremCheck::pass(name)
}

/// The canonical optimal tree embeds into the maximal primitive tree via
/// an injective content- and parent-preserving map.
fn check_optimal_embeds(p: &FactorizationTree, o: &FactorizationTree) -> TheoremCheck {
    let name = "primitive-tree-embeds-optimal-tree";
    match find_homomorphism(o, p) {
        Ok(hom) if hom.is_injective() => TheoremCheck::pass(name),
        Ok(_) => TheoremCheck::fail(name, "embedding is not injective".into()),
        Err(e) => TheoremCheck::fail(name, e.to_string()),
    }
}

fn check_self_homomorphism_identity(p: &FactorizationTree, o: &FactorizationTree) -> TheoremCheck {
    let name = "self-homomorphism-is-identity";
    for tree in [p, o] {
        match find_homomorphism(tree, tree) {
            Ok(hom) if hom.is_identity() => {}
            Ok(_) => {
                return TheoremCheck::fail(
                    name,
                    format!("{} tree maps onto itself non-trivially", tree.kind()),
                )
            }
            Err(e) => return TheoremCheck::fail(name, e.to_string()),
        }
    }
    TheoremCheck::pass(name)
}

/// Homomorphisms are unique: the map into an independently built copy,
/// composed with the copy-to-original isomorphism, is the original map.
fn check_homomorphism_unique(
    o: &FactorizationTree,
    p: &FactorizationTree,
    p_permuted: &FactorizationTree,
) -> TheoremCheck {
    let name = "homomorphism-unique";
    let direct = match find_homomorphism(o, p) {
        Ok(h) => h,
        Err(e) => return TheoremCheck::fail(name, e.to_string()),
    };
    let via_copy = match find_homomorphism(o, p_permuted) {
        Ok(h) => h,
        Err(e) => return TheoremCheck::fail(name, e.to_string()),
    };
    let copy_to_original = match find_homomorphism(p_permuted, p) {
        Ok(h) => h,
        Err(e) => return TheoremCheck::fail(name, e.to_string()),
    };
    for node in o.nodes() {
        let composed = copy_to_original.map(via_copy.map(node.id()));
        if composed != direct.map(node.id()) {
            return TheoremCheck::fail(
                name,
                format!("two distinct homomorphisms disagree at node {}", node.id()),
            );
        }
    }
    TheoremCheck::pass(name)
}

/// Independently built instances are isomorphic in both directions.
fn check_tree_unique(
    name: &'static str,
    a: &FactorizationTree,
    b: &FactorizationTree,
) -> TheoremCheck {
    match (is_isomorphic(a, b), is_isomorphic(b, a)) {
        (Ok(true), Ok(true)) => TheoremCheck::pass(name),
        (Ok(_), Ok(_)) => TheoremCheck::fail(name, "rebuilt instance is not isomorphic".into()),
        (Err(e), _) | (_, Err(e)) => TheoremCheck::fail(name, e.to_string()),
    }
}

/// For square-free alpha the content map is injective on every tree here.
fn check_contents_injective(
    square_free: bool,
    p: &FactorizationTree,
    o: &FactorizationTree,
) -> TheoremCheck {
    let name = "content-map-injective-square-free";
    if !square_free {
        return TheoremCheck::not_applicable(name, "alpha is not square-free".into());
    }
    for tree in [p, o] {
        let mut seen = BTreeSet::new();
        for node in tree.nodes() {
            if !seen.insert(node.content().canonicalize()) {
                return TheoremCheck::fail(
                    name,
                    format!("{} tree repeats content {}", tree.kind(), node.content()),
                );
            }
        }
    }
    TheoremCheck::pass(name)
}

/// For square-free alpha, equal content sets force isomorphic trees.
fn check_contents_determine_tree(
    square_free: bool,
    p: &FactorizationTree,
    p_permuted: &FactorizationTree,
) -> TheoremCheck {
    let name = "content-sets-determine-tree-square-free";
    if !square_free {
        return TheoremCheck::not_applicable(name, "alpha is not square-free".into());
    }
    let set_a: BTreeSet<Factorization> = p.nodes().map(|n| n.content().canonicalize()).collect();
    let set_b: BTreeSet<Factorization> = p_permuted
        .nodes()
        .map(|n| n.content().canonicalize())
        .collect();
    if set_a != set_b {
        return TheoremCheck::fail(name, "content sets differ between instances".into());
    }
    match is_isomorphic(p, p_permuted) {
        Ok(true) => TheoremCheck::pass(name),
        Ok(false) => TheoremCheck::fail(name, "equal content sets, no isomorphism".into()),
        Err(e) => TheoremCheck::fail(name, e.to_string()),
    }
}

/// For square-free alpha every factorization of a partial has exactly one
/// direct subfactorization: divide the level prime out of each entry that
/// admits it and count the distinct valid results.
fn check_direct_sub_unique(
    square_free: bool,
    ladder: &PrimeLadder,
    enumerated: &[BTreeSet<Factorization>],
) -> TheoremCheck {
    let name = "direct-subfactorization-unique-square-free";
    if !square_free {
        return TheoremCheck::not_applicable(name, "alpha is not square-free".into());
    }
    for (level, set) in enumerated.iter().enumerate().skip(1) {
        for factorization in set {
            let candidates = removal_candidates(factorization, ladder);
            if candidates.len() != 1 {
                return TheoremCheck::fail(
                    name,
                    format!(
                        "{} at level {level} has {} direct subfactorizations",
                        factorization,
                        candidates.len()
                    ),
                );
            }
        }
    }
    TheoremCheck::pass(name)
}

/// All valid results of removing one occurrence of the level's prime.
fn removal_candidates(
    factorization: &Factorization,
    ladder: &PrimeLadder,
) -> BTreeSet<Factorization> {
    let level = factorization.level();
    let prime = ladder.prime(level);
    let on_numerator = ladder.sign(level) == crate::rational::PrimeSign::Numerator;
    let mut out = BTreeSet::new();
    for (k, entry) in factorization.entries().iter().enumerate() {
        let side = if on_numerator {
            entry.numerator()
        } else {
            entry.denominator()
        };
        if !(side % prime).is_zero() {
            continue;
        }
        let mut entries: Vec<Fraction> = factorization.entries().to_vec();
        let (num, den) = if on_numerator {
            (entry.numerator() / prime, entry.denominator().clone())
        } else {
            (entry.numerator().clone(), entry.denominator() / prime)
        };
        entries[k] = Fraction::new(num, den).expect("sides stay positive");
        // The shrunken entry may sort elsewhere (or vanish entirely).
        entries.sort_by(|a, b| (b.max_side(), b.numerator()).cmp(&(a.max_side(), a.numerator())));
        let candidate = Factorization::new(level - 1, entries);
        if candidate.validate(ladder).is_ok() {
            out.insert(candidate.canonicalize());
        }
    }
    out
}

/// The quotient of either canonical tree is a binary tree when alpha is
/// square-free and the source satisfies the tree axioms.
fn check_quotient_binary(
    square_free: bool,
    p: &FactorizationTree,
    o: &FactorizationTree,
) -> TheoremCheck {
    let name = "quotient-of-canonical-trees-binary-square-free";
    if !square_free {
        return TheoremCheck::not_applicable(name, "alpha is not square-free".into());
    }
    for tree in [p, o] {
        let graph = quotient(tree);
        if let Err(e) = graph.check_invariants(tree) {
            return TheoremCheck::fail(name, e);
        }
        if !graph.is_binary_tree() {
            return TheoremCheck::fail(
                name,
                format!("quotient of the {} tree is not a binary tree", tree.kind()),
            );
        }
    }
    TheoremCheck::pass(name)
}

/// Quotients of independently built instances agree as labeled graphs.
fn check_quotient_unique(p: &FactorizationTree, p_permuted: &FactorizationTree) -> TheoremCheck {
    let name = "quotient-unique-up-to-labels";
    let g1 = quotient(p);
    let g2 = quotient(p_permuted);
    let labels =
        |g: &crate::quotient::MeasureClassGraph| -> BTreeSet<(usize, MeasureVector, usize)> {
            g.classes()
                .iter()
                .map(|c| (c.level(), c.measure().clone(), c.members().len()))
                .collect()
        };
    if labels(&g1) != labels(&g2) {
        return TheoremCheck::fail(name, "class label sets differ".into());
    }
    let edges = |g: &crate::quotient::MeasureClassGraph| -> BTreeSet<(
        (usize, MeasureVector),
        (usize, MeasureVector),
    )> {
        g.edges()
            .map(|(a, b)| {
                let ca = g.class(a);
                let cb = g.class(b);
                (
                    (ca.level(), ca.measure().clone()),
                    (cb.level(), cb.measure().clone()),
                )
            })
            .collect()
    };
    if edges(&g1) != edges(&g2) {
        return TheoremCheck::fail(name, "edge sets differ under label identification".into());
    }
    TheoremCheck::pass(name)
}

/// The lexicographic minimum over all factorizations is attained by
/// primitive ones only, and the two minima coincide.
fn check_optimal_primitive(
    oracle_all: Option<&[BTreeSet<Factorization>]>,
    oracle_prim: &[BTreeSet<Factorization>],
) -> TheoremCheck {
    let name = "optimal-factorizations-are-primitive";
    let Some(all) = oracle_all else {
        return TheoremCheck::not_applicable(
            name,
            "ladder is longer than the exhaustive-enumeration cap".into(),
        );
    };
    let top_all: Vec<Factorization> = all
        .last()
        .expect("level zero exists")
        .iter()
        .cloned()
        .collect();
    let top_prim: Vec<Factorization> = oracle_prim
        .last()
        .expect("level zero exists")
        .iter()
        .cloned()
        .collect();
    let min_all = match lex_filter(&top_all) {
        Ok(m) => m,
        Err(e) => return TheoremCheck::fail(name, e.to_string()),
    };
    let min_prim = match lex_filter(&top_prim) {
        Ok(m) => m,
        Err(e) => return TheoremCheck::fail(name, e.to_string()),
    };
    let set_all: BTreeSet<&Factorization> = min_all.iter().collect();
    let set_prim: BTreeSet<&Factorization> = min_prim.iter().collect();
    if set_all != set_prim {
        return TheoremCheck::fail(
            name,
            "minimum over all factorizations differs from the primitive minimum".into(),
        );
    }
    for f in &min_all {
        if !f.is_primitive() {
            return TheoremCheck::fail(name, format!("optimal factorization {f} is not primitive"));
        }
    }
    TheoremCheck::pass(name)
}

fn check_strategies_agree(alpha: &ReducedRational, config: &VerifyConfig) -> Result<TheoremCheck> {
    let name = "search-strategies-agree";
    let search_config = SearchConfig {
        node_cap: config.node_cap,
    };
    let canonical = optimal_factorizations_with(alpha, SearchStrategy::Canonical, &search_config)?;
    let primitive = optimal_factorizations_with(alpha, SearchStrategy::Primitive, &search_config)?;
    let staged = optimal_factorizations_with(alpha, SearchStrategy::Staged, &search_config)?;
    let agree = canonical.optimal_set == primitive.optimal_set
        && primitive.optimal_set == staged.optimal_set
        && canonical.measure == primitive.measure
        && primitive.measure == staged.measure;
    Ok(if agree {
        TheoremCheck::pass(name)
    } else {
        TheoremCheck::fail(
            name,
            format!(
                "canonical {}, primitive {}, staged {} optima",
                canonical.optimal_set.len(),
                primitive.optimal_set.len(),
                staged.optimal_set.len()
            ),
        )
    })
}

fn check_search_matches_enumeration(
    alpha: &ReducedRational,
    config: &VerifyConfig,
    oracle_prim: &[BTreeSet<Factorization>],
) -> Result<TheoremCheck> {
    let name = "search-matches-enumeration";
    let search_config = SearchConfig {
        node_cap: config.node_cap,
    };
    let result = optimal_factorizations_with(alpha, SearchStrategy::Canonical, &search_config)?;
    let top: Vec<Factorization> = oracle_prim
        .last()
        .expect("level zero exists")
        .iter()
        .cloned()
        .collect();
    let expected = lex_filter(&top)?;
    let got: BTreeSet<&Factorization> = result.optimal_set.iter().collect();
    let want: BTreeSet<&Factorization> = expected.iter().collect();
    Ok(if got == want {
        TheoremCheck::pass(name)
    } else {
        TheoremCheck::fail(
            name,
            "tree search and exhaustive enumeration disagree on the optimal set".into(),
        )
    })
}

/// At every separation index the staged frontier equals the smallest
/// measure class of the canonical optimal tree's level, and each optimal
/// leaf's ancestor chain survives every prune.
fn check_staged_prunes_preserve(
    alpha: &ReducedRational,
    config: &VerifyConfig,
    ladder: &PrimeLadder,
    o_tree: &FactorizationTree,
) -> Result<TheoremCheck> {
    let name = "staged-prunes-preserve-optima";
    let search_config = SearchConfig {
        node_cap: config.node_cap,
    };
    let optimal = optimal_factorizations_with(alpha, SearchStrategy::Staged, &search_config)?;
    let optimal_leaf_ids: Vec<_> = o_tree
        .leaf_ids()
        .into_iter()
        .filter(|&id| {
            optimal
                .optimal_set
                .contains(&o_tree.node(id).content().canonicalize())
        })
        .collect();
    for level in ladder.separation_indices() {
        let frontier: BTreeSet<Factorization> = staged_frontier_with(alpha, level, &search_config)?
            .into_iter()
            .collect();
        let level_contents: Vec<Factorization> = o_tree
            .level_contents(level)
            .into_iter()
            .map(Factorization::canonicalize)
            .collect();
        let class_min: BTreeSet<Factorization> = lex_filter(&level_contents)?.into_iter().collect();
        if frontier != class_min {
            return Ok(TheoremCheck::fail(
                name,
                format!(
                    "at level {level} the staged frontier differs from the smallest measure class"
                ),
            ));
        }
        for &leaf in &optimal_leaf_ids {
            let mut cursor = leaf;
            while o_tree.node(cursor).level() > level {
                cursor = o_tree.node(cursor).parent().expect("above target level");
            }
            let ancestor = o_tree.node(cursor).content().canonicalize();
            if !frontier.contains(&ancestor) {
                return Ok(TheoremCheck::fail(
                    name,
                    format!("prune at level {level} discards the ancestor {ancestor} of an optimal leaf"),
                ));
            }
        }
    }
    Ok(TheoremCheck::pass(name))
}

/// Child generation is sound: children are valid primitive factorizations,
/// direct superfactorizations of the parent, mutually distinct, and carry
/// at most two distinct measure vectors (the parent's and one extension).
fn check_children_well_formed(ladder: &PrimeLadder, p: &FactorizationTree) -> TheoremCheck {
    let name = "child-generation-consistent";
    for node in p.nodes() {
        if node.level() == ladder.len() {
            continue;
        }
        let children = match node.content().children(ladder) {
            Ok(c) => c,
            Err(e) => return TheoremCheck::fail(name, e.to_string()),
        };
        if children.is_empty() {
            return TheoremCheck::fail(
                name,
                format!("{} has no children below the top level", node.content()),
            );
        }
        let mut measures = BTreeSet::new();
        let mut distinct = BTreeSet::new();
        for child in &children {
            if !child.validate(ladder).is_ok() {
                return TheoremCheck::fail(
                    name,
                    format!("child {child} of {} is invalid", node.content()),
                );
            }
            if !child.is_primitive() {
                return TheoremCheck::fail(
                    name,
                    format!("child {child} of {} is not primitive", node.content()),
                );
            }
            if !is_direct_subfactorization(node.content(), child, ladder) {
                return TheoremCheck::fail(
                    name,
                    format!(
                        "{} is not a direct subfactorization of its child {child}",
                        node.content()
                    ),
                );
            }
            measures.insert(child.measure_vector());
            if !distinct.insert(child.canonicalize()) {
                return TheoremCheck::fail(
                    name,
                    format!("duplicate child {child} of {}", node.content()),
                );
            }
        }
        if measures.len() > 2 {
            return TheoremCheck::fail(
                name,
                format!(
                    "{} has children in {} distinct measure classes",
                    node.content(),
                    measures.len()
                ),
            );
        }
    }
    TheoremCheck::pass(name)
}

/// The structural definition of separation indices (descents of the prime
/// sequence) agrees with the valuation-based one: n separates when no
/// ladder prime beyond position n divides the n-th partial.
fn check_separation_definitions_agree(ladder: &PrimeLadder) -> TheoremCheck {
    let name = "separation-index-definitions-agree";
    let structural: BTreeSet<usize> = ladder.separation_indices().into_iter().collect();
    let mut valuation = BTreeSet::new();
    for n in 0..=ladder.len() {
        let partial = ladder.partial(n);
        let mut separated = true;
        for m in (n + 1)..=ladder.len() {
            let p = ladder.prime(m);
            if (partial.numerator() % p).is_zero() || (partial.denominator() % p).is_zero() {
                separated = false;
                break;
            }
        }
        if separated {
            valuation.insert(n);
        }
    }
    TheoremCheck::from_outcome(
        name,
        if structural == valuation {
            Ok(())
        } else {
            Err(format!(
                "structural {structural:?} vs valuation {valuation:?}"
            ))
        },
    )
}

/// For large enough t the t-norm ranks the optimal leaf strictly below
/// every leaf with a different measure vector. Doubles t until the
/// ordering holds for every pair, failing if the cap is passed.
fn check_t_order_matches_lex(
    config: &VerifyConfig,
    o_tree: &FactorizationTree,
) -> Result<TheoremCheck> {
    let name = "t-norm-order-matches-lexicographic";
    let leaves: Vec<Factorization> = o_tree
        .leaves()
        .into_iter()
        .map(Factorization::canonicalize)
        .collect();
    let winners = lex_filter(&leaves)?;
    let best = &winners[0];
    let best_vector = best.measure_vector();
    let rivals: Vec<&Factorization> = leaves
        .iter()
        .filter(|l| l.measure_vector() != best_vector)
        .collect();
    if rivals.is_empty() {
        return Ok(TheoremCheck::not_applicable(
            name,
            "every leaf of the canonical optimal tree attains the minimum".into(),
        ));
    }
    let mut t = 1.0f64;
    loop {
        let best_norm = t_norm(best, t)?;
        let ordered = rivals
            .iter()
            .all(|r| t_norm(r, t).map(|n| best_norm < n).unwrap_or(false));
        if ordered {
            // Once separated the ordering must persist at larger t.
            let again = t_norm(best, 2.0 * t)?;
            for r in &rivals {
                if again >= t_norm(r, 2.0 * t)? {
                    return Ok(TheoremCheck::fail(
                        name,
                        format!("ordering at t = {t} flips at t = {}", 2.0 * t),
                    ));
                }
            }
            for r in &rivals {
                if lex_compare(&best_vector, &r.measure_vector())? != std::cmp::Ordering::Less {
                    return Ok(TheoremCheck::fail(
                        name,
                        "t-norm winner is not the lexicographic winner".into(),
                    ));
                }
            }
            return Ok(TheoremCheck::pass(name));
        }
        t *= 2.0;
        if t > config.t_cap {
            return Ok(TheoremCheck::fail(
                name,
                format!("no separating t at or below {}", config.t_cap),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(text: &str) -> ReducedRational {
        ReducedRational::parse(text).unwrap()
    }

    fn fact(text: &str, ladder: &PrimeLadder) -> Factorization {
        Factorization::parse(text, ladder).unwrap()
    }

    #[test]
    fn lex_filter_keeps_all_minima() {
        let ladder = rat("30/7").prime_ladder().unwrap();
        let a = fact("5/7*3*2", &ladder);
        let b = fact("6/7*5", &ladder);
        let c = fact("1/7*5*3*2", &ladder);
        let kept = lex_filter(&[b.clone(), a.clone(), c]).unwrap();
        assert_eq!(kept, vec![a]);

        let ladder_15 = rat("4/15").prime_ladder().unwrap();
        let tie_1 = fact("4/5*1/3", &ladder_15);
        let tie_2 = fact("2/5*2/3", &ladder_15);
        let short = fact("1/7", &ladder);
        let kept = lex_filter(&[tie_1.clone(), tie_2.clone(), short]).err();
        assert!(kept.is_some(), "mixed levels are rejected");
        let kept = lex_filter(&[tie_1.clone(), tie_2.clone()]).unwrap();
        assert_eq!(kept.len(), 2);
        assert!(lex_filter(&[]).is_err());
    }

    #[test]
    fn optimal_set_for_30_7() {
        let result = optimal_factorizations(&rat("30/7"), SearchStrategy::Canonical).unwrap();
        let ladder = rat("30/7").prime_ladder().unwrap();
        assert_eq!(result.optimal_set, vec![fact("5/7*3*2", &ladder)]);
        assert_eq!(result.measure.to_string(), "(7,3,2)");
    }

    #[test]
    fn optimal_set_for_851_858_under_all_strategies() {
        let alpha = rat("851/858");
        let ladder = alpha.prime_ladder().unwrap();
        let expected = vec![fact("37/33*23/13*1/2", &ladder)];
        for strategy in [
            SearchStrategy::Canonical,
            SearchStrategy::Primitive,
            SearchStrategy::Staged,
        ] {
            let result = optimal_factorizations(&alpha, strategy).unwrap();
            assert_eq!(result.optimal_set, expected, "strategy {strategy}");
            assert_eq!(result.measure.to_string(), "(37,23,2)");
        }
    }

    #[test]
    fn optimal_tie_for_4_15() {
        let alpha = rat("4/15");
        let ladder = alpha.prime_ladder().unwrap();
        let result = optimal_factorizations(&alpha, SearchStrategy::Staged).unwrap();
        let expected: BTreeSet<Factorization> =
            [fact("4/5*1/3", &ladder), fact("2/5*2/3", &ladder)]
                .into_iter()
                .collect();
        let got: BTreeSet<Factorization> = result.optimal_set.into_iter().collect();
        assert_eq!(got, expected);
        assert_eq!(result.measure.to_string(), "(5,3)");
    }

    #[test]
    fn trivial_alpha_has_the_empty_optimum() {
        for strategy in [
            SearchStrategy::Canonical,
            SearchStrategy::Primitive,
            SearchStrategy::Staged,
        ] {
            let result = optimal_factorizations(&rat("1"), strategy).unwrap();
            assert_eq!(result.optimal_set, vec![Factorization::empty()]);
            assert_eq!(result.measure.to_string(), "()");
        }
    }

    #[test]
    fn staged_frontier_matches_the_walkthrough() {
        let alpha = rat("316889/549010");
        let ladder = alpha.prime_ladder().unwrap();
        let frontier = staged_frontier(&alpha, 7).unwrap();
        let expected: BTreeSet<Factorization> = [
            fact("131/77*59/31*41/23", &ladder),
            fact("131/77*59/23*41/31", &ladder),
        ]
        .into_iter()
        .collect();
        assert_eq!(frontier.into_iter().collect::<BTreeSet<_>>(), expected);

        // 12/7 carries the ladder 7, 3, 2, 2; index 3 sits before the tied
        // pair of 2s and therefore does not separate.
        let err = staged_frontier(&rat("12/7"), 3).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn staged_search_on_the_nine_prime_example() {
        let alpha = rat("316889/549010");
        let ladder = alpha.prime_ladder().unwrap();
        let result = optimal_factorizations(&alpha, SearchStrategy::Staged).unwrap();
        assert_eq!(
            result.optimal_set,
            vec![fact("131/77*59/46*41/31*1/5", &ladder)]
        );
        assert_eq!(result.measure.to_string(), "(131,59,41,5)");
        let level_7 = result
            .pruning_trace
            .iter()
            .find(|r| r.level == 7)
            .expect("level 7 is a separation index");
        assert_eq!(level_7.after, 2);
    }

    #[test]
    fn t_norm_handles_extremes() {
        let ladder = rat("30/7").prime_ladder().unwrap();
        let f = fact("5/7*3*2", &ladder);
        let expected_1 = 7f64.ln() + 3f64.ln() + 2f64.ln();
        assert!((t_norm(&f, 1.0).unwrap() - expected_1).abs() < 1e-12);
        // Large t collapses to the maximum entry measure without overflow.
        let huge = t_norm(&f, 1e6).unwrap();
        assert!(huge.is_finite());
        assert!((huge - 7f64.ln()).abs() < 1e-3);
        assert!(t_norm(&f, 0.5).is_err());
        assert_eq!(t_norm(&Factorization::empty(), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn mt_upper_bound_values() {
        let alpha = rat("30/7");
        let at_1 = mt_upper(&alpha, 1.0).unwrap();
        assert!((at_1 - 42f64.ln()).abs() < 1e-12, "got {at_1}");
        let at_2 = mt_upper(&alpha, 2.0).unwrap();
        let expected = (7f64.ln().powi(2) + 3f64.ln().powi(2) + 2f64.ln().powi(2)).sqrt();
        assert!((at_2 - expected).abs() < 1e-12, "got {at_2}");
        assert!(mt_upper(&alpha, 0.0).is_err());
    }

    #[test]
    fn oracle_counts_for_small_alphas() {
        let six = oracle_enumerate_primitive(&rat("6")).unwrap();
        assert_eq!(six.len(), 3);
        let ladder = rat("6").prime_ladder().unwrap();
        assert_eq!(six[0].len(), 1);
        assert_eq!(six[1].len(), 1);
        assert_eq!(
            six[2],
            [fact("3*2", &ladder)].into_iter().collect::<BTreeSet<_>>()
        );
        // Without the primitivity restriction the single-entry form shows up.
        let six_all = oracle_enumerate_all(&rat("6")).unwrap();
        assert_eq!(
            six_all[2],
            [fact("6", &ladder), fact("3*2", &ladder)]
                .into_iter()
                .collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn oracle_all_includes_imprimitive_level_four_content() {
        let alpha = rat("30/7");
        let ladder = alpha.prime_ladder().unwrap();
        let all = oracle_enumerate_all(&alpha).unwrap();
        assert!(all[4].contains(&fact("10/7*3", &ladder)));
        assert!(all[4].contains(&fact("30/7", &ladder)));
        let prim = oracle_enumerate_primitive(&alpha).unwrap();
        assert!(!prim[4].contains(&fact("10/7*3", &ladder)));
        assert_eq!(prim[4].len(), 5);
    }

    #[test]
    fn oracle_respects_the_level_cap() {
        let err = oracle_enumerate(&rat("30/7"), 3, true).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded(_)));
    }

    #[test]
    fn sampler_is_deterministic_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let first: Vec<ReducedRational> =
            (0..16).map(|_| sample_alpha(&mut rng, 6, true)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let second: Vec<ReducedRational> =
            (0..16).map(|_| sample_alpha(&mut rng, 6, true)).collect();
        assert_eq!(first, second);
        let mut saw_repeat = false;
        for alpha in &first {
            let ladder = alpha.prime_ladder().unwrap();
            assert!(!ladder.is_empty() && ladder.len() <= 6);
            saw_repeat |= !ladder.is_square_free();
        }
        assert!(saw_repeat, "seed 42 visits a non-square-free sample");
    }

    #[test]
    fn verify_reports_all_pass_on_the_walkthrough_input() {
        let report = verify_theorems(&rat("851/858")).unwrap();
        assert!(report.all_passed(), "{report}");
        assert!(report.checks.iter().all(|c| c.status == CheckStatus::Pass));
        assert!(report.checks.len() >= 15);
    }

    #[test]
    fn verify_marks_square_free_checks_not_applicable_for_4_15() {
        let report = verify_theorems(&rat("4/15")).unwrap();
        assert!(report.all_passed());
        let statuses: std::collections::BTreeMap<&str, CheckStatus> =
            report.checks.iter().map(|c| (c.name, c.status)).collect();
        assert_eq!(
            statuses["quotient-of-canonical-trees-binary-square-free"],
            CheckStatus::NotApplicable
        );
        assert_eq!(
            statuses["direct-subfactorization-unique-square-free"],
            CheckStatus::NotApplicable
        );
        assert_eq!(statuses["primitive-contents-complete"], CheckStatus::Pass);
    }

    #[test]
    fn verify_handles_the_trivial_input() {
        let report = verify_theorems(&rat("1")).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn verify_rejects_ladders_beyond_the_cap() {
        // 2*3*5*7*11*13*17*19*23*29 has ten primes.
        let alpha = rat("6469693230");
        assert!(matches!(
            verify_theorems(&alpha),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn verify_report_renders_text_and_json() {
        let report = verify_theorems(&rat("6")).unwrap();
        let text = report.to_string();
        assert!(text.contains("[pass] primitive-contents-complete"));
        assert!(text.ends_with("result: pass"));
        let doc: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(doc["alpha"], "6");
        let checks = doc["checks"].as_array().unwrap();
        assert!(checks
            .iter()
            .any(|c| c["theorem"] == "search-strategies-agree" && c["status"] == "pass"));
    }
}
