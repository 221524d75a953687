//! Distributional thesaurus graph: every target keeps its `p` most salient
//! contexts, word similarity is the overlap of those context sets, and the
//! 24-value block probes how a feature word sits in the context lists of the
//! two compared words (directly, via word neighbours, or via feature
//! neighbours).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::association::plmi_from_counts;
use crate::corpus::CoocTable;
use crate::error::{Error, Result};

pub const DEFAULT_P: usize = 1000;
/// Neighbour lists scanned by the indirect query modes.
pub const NEIGHBOR_SCAN: usize = 10;

/// Which side of the target the context word was seen on. Stands in for a
/// POS/dependency tag when no parser is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    L,
    R,
}

impl Direction {
    fn as_str(self) -> &'static str {
        match self {
            Direction::L => "L",
            Direction::R => "R",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A context: lexical item plus structural tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextKey {
    pub lexical: String,
    pub tag: String,
}

impl ContextKey {
    pub fn new(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        ContextKey {
            lexical: lexical.into(),
            tag: tag.into(),
        }
    }
}

/// Produces tag-refined `(target, context, count)` triples from a table.
/// Swap in a different extractor to use parsed contexts instead of
/// directional ones.
pub trait ContextExtractor {
    fn contexts(&self, table: &CoocTable) -> Result<Vec<(u32, ContextKey, u64)>>;
}

/// Left/right window contexts; requires a table with directional counts.
pub struct DirectionalContexts;

impl ContextExtractor for DirectionalContexts {
    fn contexts(&self, table: &CoocTable) -> Result<Vec<(u32, ContextKey, u64)>> {
        let left = table.left_pairs().ok_or_else(|| {
            Error::Config(
                "graph construction needs directional counts; build the table from a corpus".into(),
            )
        })?;
        let mut out = Vec::new();
        for (w, c, n) in left {
            // c is left of w, so w is right of c
            out.push((w, ContextKey::new(table.token(c), Direction::L.as_str()), n));
            out.push((c, ContextKey::new(table.token(w), Direction::R.as_str()), n));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedContext {
    pub key: ContextKey,
    pub score: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DistributionalGraph {
    p: usize,
    targets: BTreeMap<String, Vec<RankedContext>>,
    /// context → targets listing it
    by_context: HashMap<ContextKey, Vec<String>>,
}

fn salience_order(a: &RankedContext, b: &RankedContext) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.key.cmp(&b.key))
}

pub fn build_graph(table: &CoocTable, p: usize) -> Result<DistributionalGraph> {
    build_graph_with(table, p, &DirectionalContexts)
}

pub fn build_graph_with(
    table: &CoocTable,
    p: usize,
    extractor: &dyn ContextExtractor,
) -> Result<DistributionalGraph> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be >= 1".into()));
    }
    let triples = extractor.contexts(table)?;
    let mut row = vec![0u64; table.num_tokens()];
    let mut col: HashMap<&ContextKey, u64> = HashMap::new();
    let mut total = 0u64;
    for (w, key, n) in &triples {
        row[*w as usize] += n;
        *col.entry(key).or_insert(0) += n;
        total += n;
    }
    let mut lists: Vec<Vec<RankedContext>> = vec![Vec::new(); table.num_tokens()];
    for (w, key, n) in &triples {
        let score = plmi_from_counts(*n, row[*w as usize], col[key], total);
        if score > 0.0 {
            lists[*w as usize].push(RankedContext {
                key: key.clone(),
                score,
            });
        }
    }
    let mut targets = BTreeMap::new();
    for (id, mut list) in lists.into_iter().enumerate() {
        list.sort_by(salience_order);
        list.truncate(p);
        targets.insert(table.token(id as u32).to_string(), list);
    }
    Ok(DistributionalGraph::from_lists(p, targets))
}

/// Profile of a feature word inside one target's context list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatProfile {
    pub found: bool,
    pub best_rank: i64,
    pub worst_rank: i64,
    pub total_score: f64,
    pub occurrences: u32,
}

impl FeatProfile {
    pub const MISSING: FeatProfile = FeatProfile {
        found: false,
        best_rank: -1,
        worst_rank: -1,
        total_score: 0.0,
        occurrences: 0,
    };
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    target: String,
    contexts: Vec<(String, String, f64)>,
}

impl DistributionalGraph {
    pub fn from_lists(p: usize, targets: BTreeMap<String, Vec<RankedContext>>) -> Self {
        let mut by_context: HashMap<ContextKey, Vec<String>> = HashMap::new();
        for (t, list) in &targets {
            for rc in list {
                by_context
                    .entry(rc.key.clone())
                    .or_default()
                    .push(t.clone());
            }
        }
        DistributionalGraph {
            p,
            targets,
            by_context,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn contexts(&self, target: &str) -> &[RankedContext] {
        self.targets.get(target).map_or(&[], Vec::as_slice)
    }

    pub fn targets(&self) -> impl Iterator<Item = (&str, &[RankedContext])> {
        self.targets.iter().map(|(t, l)| (t.as_str(), l.as_slice()))
    }

    pub fn context_overlap(&self, a: &str, b: &str) -> usize {
        let set: HashSet<&ContextKey> = self.contexts(a).iter().map(|rc| &rc.key).collect();
        let mut seen = HashSet::new();
        self.contexts(b)
            .iter()
            .filter(|rc| set.contains(&rc.key) && seen.insert(&rc.key))
            .count()
    }

    /// Up to `k` words sharing at least one context with `w`, by overlap
    /// descending then lexicographically.
    pub fn neighbors(&self, w: &str, k: usize) -> Vec<(String, usize)> {
        let mut overlap: HashMap<&str, usize> = HashMap::new();
        let mut seen = HashSet::new();
        for rc in self.contexts(w) {
            if !seen.insert(&rc.key) {
                continue;
            }
            for other in self.by_context.get(&rc.key).into_iter().flatten() {
                if other != w {
                    *overlap.entry(other.as_str()).or_insert(0) += 1;
                }
            }
        }
        let mut ranked: Vec<(&str, usize)> = overlap.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(k);
        ranked
            .into_iter()
            .map(|(t, n)| (t.to_string(), n))
            .collect()
    }

    /// Matches `feat` against the lexical part of every context of `target`.
    pub fn query_profile(&self, target: &str, feat: &str) -> FeatProfile {
        let mut prof = FeatProfile::MISSING;
        for (i, rc) in self.contexts(target).iter().enumerate() {
            if rc.key.lexical != feat {
                continue;
            }
            let rank = i as i64 + 1;
            if !prof.found {
                prof.found = true;
                prof.best_rank = rank;
            }
            prof.worst_rank = rank;
            prof.total_score += rc.score;
            prof.occurrences += 1;
        }
        prof
    }

    /// Newline-delimited JSON, one `{target, contexts}` record per target in
    /// sorted target order, contexts in rank order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (target, list) in &self.targets {
            let rec = GraphRecord {
                target: target.clone(),
                contexts: list
                    .iter()
                    .map(|rc| (rc.key.lexical.clone(), rc.key.tag.clone(), rc.score))
                    .collect(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads the JSONL form. `p` becomes the longest list length seen.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        const WHAT: &str = "graph";
        let mut targets = BTreeMap::new();
        let mut p = 1;
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(WHAT, i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: GraphRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(WHAT, i + 1, e.to_string()))?;
            let list: Vec<RankedContext> = rec
                .contexts
                .into_iter()
                .map(|(lex, tag, score)| RankedContext {
                    key: ContextKey::new(lex, tag),
                    score,
                })
                .collect();
            if list
                .iter()
                .any(|rc| rc.score.is_nan() || rc.score <= 0.0 || !rc.score.is_finite())
            {
                return Err(Error::parse(
                    WHAT,
                    i + 1,
                    "scores must be positive and finite",
                ));
            }
            p = p.max(list.len());
            targets.insert(rec.target, list);
        }
        Ok(DistributionalGraph::from_lists(p, targets))
    }
}

pub const JOBIM_PER_MODE: usize = 8;
pub const JOBIM_WIDTH: usize = 3 * JOBIM_PER_MODE;

const MODE_NAMES: [&str; 3] = ["direct", "wordnb", "featnb"];
const FIELD_NAMES: [&str; JOBIM_PER_MODE] = [
    "pred_rank",
    "pred_score",
    "total_score",
    "top_rank",
    "bottom_rank",
    "occurrences",
    "which_neighbor",
    "which_feat_neighbor",
];

pub fn jobim_columns() -> Vec<String> {
    MODE_NAMES
        .iter()
        .flat_map(|m| FIELD_NAMES.iter().map(move |f| format!("jobim_{m}_{f}")))
        .collect()
}

/// Three 8-value sub-blocks in the order direct, word-neighbour,
/// feature-neighbour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JobimFeatureBlock(pub [f64; JOBIM_WIDTH]);

/// A profile plus how it was obtained: 0 for the word itself, the 1-based
/// neighbour rank when substituted, -1 when the scan came up empty.
#[derive(Debug, Clone, Copy)]
struct Resolved {
    profile: FeatProfile,
    via: i64,
}

fn mode_features(p1: Resolved, p2: Resolved, indirection: Indirection) -> [f64; JOBIM_PER_MODE] {
    let (a, b) = (p1.profile, p2.profile);
    let by_rank = a.found && (!b.found || a.best_rank < b.best_rank);
    let by_score = a.total_score > b.total_score;
    let chosen = if by_score { p1 } else { p2 };
    let (which_nb, which_feat_nb) = match indirection {
        Indirection::None => (0, 0),
        Indirection::Word => (chosen.via, 0),
        Indirection::Feat => (0, chosen.via),
    };
    [
        by_rank as u8 as f64,
        by_score as u8 as f64,
        chosen.profile.total_score,
        chosen.profile.best_rank as f64,
        chosen.profile.worst_rank as f64,
        chosen.profile.occurrences as f64,
        which_nb as f64,
        which_feat_nb as f64,
    ]
}

#[derive(Clone, Copy)]
enum Indirection {
    None,
    Word,
    Feat,
}

impl DistributionalGraph {
    fn via_word_neighbors(&self, w: &str, feat: &str, direct: FeatProfile) -> Resolved {
        if direct.found {
            return Resolved {
                profile: direct,
                via: 0,
            };
        }
        for (rank, (nb, _)) in self.neighbors(w, NEIGHBOR_SCAN).iter().enumerate() {
            let prof = self.query_profile(nb, feat);
            if prof.found {
                return Resolved {
                    profile: prof,
                    via: rank as i64 + 1,
                };
            }
        }
        Resolved {
            profile: FeatProfile::MISSING,
            via: -1,
        }
    }

    fn via_feat_neighbors(
        &self,
        w: &str,
        feat_neighbors: &[(String, usize)],
        direct: FeatProfile,
    ) -> Resolved {
        if direct.found {
            return Resolved {
                profile: direct,
                via: 0,
            };
        }
        for (rank, (nb, _)) in feat_neighbors.iter().enumerate() {
            let prof = self.query_profile(nb, w);
            if prof.found {
                return Resolved {
                    profile: prof,
                    via: rank as i64 + 1,
                };
            }
        }
        Resolved {
            profile: FeatProfile::MISSING,
            via: -1,
        }
    }

    pub fn jobim_feature_block(&self, w1: &str, w2: &str, feat: &str) -> JobimFeatureBlock {
        let d1 = self.query_profile(w1, feat);
        let d2 = self.query_profile(w2, feat);
        let direct = |p| Resolved { profile: p, via: 0 };

        let mut v = [0.0; JOBIM_WIDTH];
        v[..8].copy_from_slice(&mode_features(direct(d1), direct(d2), Indirection::None));

        let n1 = self.via_word_neighbors(w1, feat, d1);
        let n2 = self.via_word_neighbors(w2, feat, d2);
        v[8..16].copy_from_slice(&mode_features(n1, n2, Indirection::Word));

        let feat_nbs = self.neighbors(feat, NEIGHBOR_SCAN);
        let f1 = self.via_feat_neighbors(w1, &feat_nbs, d1);
        let f2 = self.via_feat_neighbors(w2, &feat_nbs, d2);
        v[16..].copy_from_slice(&mode_features(f1, f2, Indirection::Feat));
        JobimFeatureBlock(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(lex: &str, tag: &str, score: f64) -> RankedContext {
        RankedContext {
            key: ContextKey::new(lex, tag),
            score,
        }
    }

    fn graph(entries: Vec<(&str, Vec<RankedContext>)>) -> DistributionalGraph {
        DistributionalGraph::from_lists(
            20,
            entries
                .into_iter()
                .map(|(t, l)| (t.to_string(), l))
                .collect(),
        )
    }

    /// Six nodes. `feat` sits at rank 2 for w1 (score 3) and rank 5 for w2
    /// (score 1); `lonely` has no feat; its neighbour `pal` does.
    fn fixture() -> DistributionalGraph {
        graph(vec![
            (
                "w1",
                vec![rc("a", "L", 9.0), rc("feat", "R", 3.0), rc("b", "L", 2.0)],
            ),
            (
                "w2",
                vec![
                    rc("a", "L", 8.0),
                    rc("b", "L", 7.0),
                    rc("c", "R", 6.0),
                    rc("d", "R", 5.0),
                    rc("feat", "L", 1.0),
                ],
            ),
            ("lonely", vec![rc("x", "L", 4.0), rc("y", "R", 3.0)]),
            (
                "pal",
                vec![
                    rc("x", "L", 5.0),
                    rc("feat", "L", 2.5),
                    rc("feat", "R", 0.5),
                ],
            ),
            ("feat", vec![rc("q", "L", 1.0)]),
            ("friend", vec![rc("q", "L", 3.0), rc("lonely", "R", 2.0)]),
        ])
    }

    #[test]
    fn profile_cases() {
        let g = fixture();
        assert_eq!(g.query_profile("w1", "zzz"), FeatProfile::MISSING);
        assert_eq!(
            g.query_profile("w1", "feat"),
            FeatProfile {
                found: true,
                best_rank: 2,
                worst_rank: 2,
                total_score: 3.0,
                occurrences: 1
            }
        );
        let p = g.query_profile("pal", "feat");
        assert_eq!((p.occurrences, p.best_rank, p.worst_rank), (2, 2, 3));
        assert_eq!(p.total_score, 3.0);
    }

    #[test]
    fn direct_mode_by_hand() {
        let g = fixture();
        let b = g.jobim_feature_block("w1", "w2", "feat");
        assert_eq!(b.0[..8], [1.0, 1.0, 3.0, 2.0, 2.0, 1.0, 0.0, 0.0]);
        // both found directly, so the indirect modes replicate direct mode
        assert_eq!(b.0[8..16], b.0[..8]);
        assert_eq!(b.0[16..], b.0[..8]);

        let s = g.jobim_feature_block("w2", "w1", "feat");
        assert_eq!(s.0[..8], [0.0, 0.0, 3.0, 2.0, 2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn word_neighbor_substitution() {
        let g = fixture();
        // lonely's only neighbours: pal (shares x/L) and friend? friend has
        // q/L and lonely/R, no overlap. So pal at rank 1.
        assert_eq!(g.neighbors("lonely", 10), vec![("pal".to_string(), 1)]);
        let b = g.jobim_feature_block("lonely", "w2", "feat");
        // direct: lonely misses, w2 found at rank 5 score 1
        assert_eq!(b.0[..8], [0.0, 0.0, 1.0, 5.0, 5.0, 1.0, 0.0, 0.0]);
        // word-neighbour: lonely -> pal (rank 1), score 3.0 > 1.0
        assert_eq!(b.0[8..16], [1.0, 1.0, 3.0, 2.0, 3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn feat_neighbor_substitution() {
        let g = fixture();
        // feat's neighbours: friend (shares q/L)
        assert_eq!(g.neighbors("feat", 10), vec![("friend".to_string(), 1)]);
        let b = g.jobim_feature_block("lonely", "nobody", "feat");
        // friend lists lonely at rank 2 with score 2
        assert_eq!(b.0[16..], [1.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0, 1.0]);
        // nobody is absent everywhere; w2 side exhausted
        let c = g.jobim_feature_block("nobody", "lonely", "feat");
        assert_eq!(c.0[16..], [0.0, 0.0, 2.0, 2.0, 2.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn all_miss_is_sentinels() {
        let g = fixture();
        let b = g.jobim_feature_block("nobody", "none", "ghost");
        let direct = [0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0];
        assert_eq!(b.0[..8], direct);
        assert_eq!(b.0[8..16], [0.0, 0.0, 0.0, -1.0, -1.0, 0.0, -1.0, 0.0]);
        assert_eq!(b.0[16..], [0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn overlap_and_neighbors() {
        let g = graph(vec![
            ("a", vec![rc("x", "L", 2.0), rc("y", "L", 1.0)]),
            ("b", vec![rc("x", "L", 2.0), rc("y", "L", 1.0)]),
            ("c", vec![rc("z", "R", 1.0)]),
        ]);
        assert_eq!(g.context_overlap("a", "a"), 2);
        assert_eq!(g.context_overlap("a", "b"), 2);
        assert_eq!(g.context_overlap("a", "c"), 0);
        assert_eq!(g.neighbors("a", 10), vec![("b".to_string(), 2)]);
        assert_eq!(g.neighbors("b", 10), vec![("a".to_string(), 2)]);
        assert!(g.neighbors("c", 10).is_empty());
        assert!(g.neighbors("missing", 10).is_empty());
    }

    #[test]
    fn jsonl_roundtrip() {
        let g = fixture();
        let mut buf = Vec::new();
        g.write_jsonl(&mut buf).unwrap();
        let first = String::from_utf8(buf.clone()).unwrap();
        assert!(first.starts_with(r#"{"target":"feat","contexts":[["q","L",1.0]]}"#));
        let back = DistributionalGraph::read_jsonl(&buf[..]).unwrap();
        let mut again = Vec::new();
        back.write_jsonl(&mut again).unwrap();
        assert_eq!(buf, again);
        assert!(DistributionalGraph::read_jsonl(&b"{bad"[..]).is_err());
        assert!(DistributionalGraph::read_jsonl(
            &br#"{"target":"a","contexts":[["x","L",0.0]]}"#[..]
        )
        .is_err());
    }
}
