//! Example index, query generation and nearest-example retrieval.
//!
//! An example is indexed by the `(type, builtin)` pairs of its elements. A
//! query is built from a sampled design choice and the segmented statement.
//! The distance between an index and a query is a minimum-cost assignment:
//! same-type pairs cost `|b − b̃| / b̃` (relative to the query value),
//! cross-type pairs cost 1, and every descriptor left without a partner
//! costs 1.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::assets::{ChartSpec, IconAsset, IconLibrary, PictographSpec, DEFAULT_BAR_ASPECT};
use crate::corpus::{Category, DesignChoice, DesignChoiceDistribution, ElementType, ExampleLibrary};
use crate::rng::{self, Rng};
use crate::statement::{self, SegmentError, SegmentedStatement};

/// Icon count used for pictographs at query time; the final count is
/// searched during adaption.
pub const QUERY_PICTOGRAPH_COUNT: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementDescriptor {
    pub element_type: ElementType,
    pub builtin: f64,
}

impl ElementDescriptor {
    pub fn new(element_type: ElementType, builtin: f64) -> Self {
        ElementDescriptor { element_type, builtin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleIndex {
    pub example_id: String,
    pub descriptors: Vec<ElementDescriptor>,
}

pub fn build_index(lib: &ExampleLibrary) -> Vec<ExampleIndex> {
    lib.examples
        .iter()
        .map(|e| ExampleIndex {
            example_id: e.id.clone(),
            descriptors: e.elements.iter().map(|el| ElementDescriptor::new(el.element_type, el.builtin)).collect(),
        })
        .collect()
}

/// Generated content bound to one query descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Text(String),
    Icon(IconAsset),
    Chart(ChartSpec),
    Pictograph(PictographSpec),
}

impl Binding {
    /// Character count or aspect ratio of the content.
    pub fn builtin(&self) -> f64 {
        match self {
            Binding::Text(t) => t.chars().count() as f64,
            Binding::Icon(i) => i.aspect_ratio,
            Binding::Chart(c) => c.aspect_ratio,
            Binding::Pictograph(p) => p.aspect_ratio(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryElement {
    pub descriptor: ElementDescriptor,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub choice: DesignChoice,
    pub elements: Vec<QueryElement>,
}

impl Query {
    pub fn descriptors(&self) -> Vec<ElementDescriptor> {
        self.elements.iter().map(|e| e.descriptor).collect()
    }
}

/// Expands a design choice into concrete elements for one statement.
pub fn realize_query(choice: &DesignChoice, seg: &SegmentedStatement, icons: &IconLibrary) -> Query {
    let mut elements = Vec::new();
    let mut push = |t: ElementType, binding: Binding| {
        elements.push(QueryElement { descriptor: ElementDescriptor::new(t, binding.builtin()), binding });
    };
    let p = seg.percentage;
    for category in choice.categories() {
        match category {
            Category::Statement => push(ElementType::Statement, Binding::Text(seg.raw.clone())),
            Category::SemanticSegments => {
                for (t, text) in seg.segments() {
                    push(t, Binding::Text(text.to_string()));
                }
            }
            Category::Icon => push(ElementType::SingleIcon, Binding::Icon(icons.lookup_icon(seg))),
            Category::Bar => push(ElementType::Bar, Binding::Chart(ChartSpec::bar(p, DEFAULT_BAR_ASPECT))),
            Category::Pie => push(ElementType::Pie, Binding::Chart(ChartSpec::pie(p))),
            Category::Donut => push(ElementType::Donut, Binding::Chart(ChartSpec::donut(p))),
            Category::Pictograph => push(
                ElementType::Pictograph,
                Binding::Pictograph(PictographSpec {
                    icon: icons.lookup_icon(seg),
                    count: QUERY_PICTOGRAPH_COUNT,
                    percentage: p,
                }),
            ),
        }
    }
    Query { choice: choice.clone(), elements }
}

/// Draws up to `m_prime` distinct choices without replacement, each draw
/// proportional to the remaining counts.
pub fn sample_choices(dist: &DesignChoiceDistribution, m_prime: usize, rng: &mut Rng) -> Vec<DesignChoice> {
    let mut pool: Vec<(&DesignChoice, usize)> = dist.counts().iter().map(|(c, &n)| (c, n)).collect();
    let mut out = Vec::with_capacity(m_prime.min(pool.len()));
    while out.len() < m_prime && !pool.is_empty() {
        let total: usize = pool.iter().map(|(_, n)| n).sum();
        let mut r = rng.random_range(0..total);
        let pos = pool
            .iter()
            .position(|(_, n)| {
                if r < *n {
                    true
                } else {
                    r -= n;
                    false
                }
            })
            .expect("r < total");
        out.push(pool.remove(pos).0.clone());
    }
    out
}

pub fn sample_queries(
    u: &str,
    dist: &DesignChoiceDistribution,
    m_prime: usize,
    seed: u64,
) -> Result<Vec<Query>, SegmentError> {
    sample_queries_with(u, dist, m_prime, seed, IconLibrary::bundled())
}

pub fn sample_queries_with(
    u: &str,
    dist: &DesignChoiceDistribution,
    m_prime: usize,
    seed: u64,
    icons: &IconLibrary,
) -> Result<Vec<Query>, SegmentError> {
    assert!(m_prime >= 1, "m_prime must be at least 1");
    let seg = statement::segment(u)?;
    let mut rng = rng::seeded(seed);
    Ok(sample_choices(dist, m_prime, &mut rng).iter().map(|c| realize_query(c, &seg, icons)).collect())
}

/// Cost of pairing an index descriptor with a query descriptor.
pub fn pair_cost(index: &ElementDescriptor, query: &ElementDescriptor) -> f64 {
    if index.element_type == query.element_type {
        (index.builtin - query.builtin).abs() / query.builtin
    } else {
        1.0
    }
}

/// Optimal assignment between index and query descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub cost: f64,
    /// `(index position, query position)` pairs, sorted by query position.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_index: Vec<usize>,
    pub unmatched_query: Vec<usize>,
}

impl Matching {
    pub fn partner_of_query(&self, q: usize) -> Option<usize> {
        self.pairs.iter().find(|(_, j)| *j == q).map(|(i, _)| *i)
    }
}

/// Minimum-cost perfect assignment on a square matrix (Hungarian method with
/// potentials). Returns `col_of_row`.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        if row_of_col[j] > 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}

pub fn match_descriptors(index: &[ElementDescriptor], query: &[ElementDescriptor]) -> Matching {
    let (ni, nq) = (index.len(), query.len());
    let n = ni + nq;
    if n == 0 {
        return Matching { cost: 0.0, pairs: vec![], unmatched_index: vec![], unmatched_query: vec![] };
    }
    // rows: index then one dummy per query; columns: query then one dummy per index
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (index.get(i), query.get(j)) {
                    (Some(a), Some(b)) => pair_cost(a, b),
                    (None, None) => 0.0,
                    _ => 1.0,
                })
                .collect()
        })
        .collect();
    let col_of_row = hungarian(&cost);
    let mut pairs = Vec::new();
    let mut unmatched_index = Vec::new();
    let mut unmatched_query = Vec::new();
    let mut total = 0.0;
    for (i, &j) in col_of_row.iter().enumerate() {
        total += cost[i][j];
        match (i < ni, j < nq) {
            (true, true) => pairs.push((i, j)),
            (true, false) => unmatched_index.push(i),
            (false, true) => unmatched_query.push(j),
            (false, false) => {}
        }
    }
    pairs.sort_by_key(|&(_, j)| j);
    unmatched_query.sort_unstable();
    Matching { cost: total, pairs, unmatched_index, unmatched_query }
}

pub fn distance(index: &ExampleIndex, query: &Query) -> f64 {
    match_descriptors(&index.descriptors, &query.descriptors()).cost
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved<'a> {
    pub index: &'a ExampleIndex,
    pub distance: f64,
}

/// Nearest example; ties go to the lexicographically smallest id.
pub fn retrieve<'a>(indexes: &'a [ExampleIndex], query: &Query) -> Option<Retrieved<'a>> {
    let q = query.descriptors();
    let mut best: Option<Retrieved<'a>> = None;
    for idx in indexes {
        let d = match_descriptors(&idx.descriptors, &q).cost;
        let better = match &best {
            None => true,
            Some(b) => d < b.distance - 1e-12 || ((d - b.distance).abs() <= 1e-12 && idx.example_id < b.index.example_id),
        };
        if better {
            best = Some(Retrieved { index: idx, distance: d });
        }
    }
    best
}
