use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Sym, Word};
use super::graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Sym,
}

/// A finite labeled graph, trimmed to its essential part. The presented shift is the
/// set of label sequences of bi-infinite paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "PresentationDoc", try_from = "PresentationDoc")]
pub struct Presentation {
    alphabet: Alphabet,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    labeled: Vec<Vec<usize>>,
    injective: OnceLock<bool>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.vertices == other.vertices
            && self.edges == other.edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub label: String,
}

/// Serialized form of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub alphabet: Vec<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

impl Presentation {
    /// Builds and trims a presentation. Fails with `EmptyShift` when nothing essential remains.
    pub fn new(alphabet: Alphabet, vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let n = vertices.len();
        for e in &edges {
            if e.from >= n || e.to >= n {
                return Err(Error::InvalidInput(format!("edge {e:?} uses a missing vertex")));
            }
            if e.label as usize >= alphabet.len() {
                return Err(Error::InvalidInput(format!("edge {e:?} uses a missing label")));
            }
        }
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.from, e.to)).collect();
        let alive = graph::essential_vertices(n, &pairs);
        let mut remap = vec![usize::MAX; n];
        let mut kept = Vec::new();
        for v in 0..n {
            if alive[v] {
                remap[v] = kept.len();
                kept.push(vertices[v].clone());
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyShift);
        }
        let mut new_edges: Vec<Edge> = edges
            .into_iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| Edge {
                from: remap[e.from],
                to: remap[e.to],
                label: e.label,
            })
            .collect();
        new_edges.sort();
        let mut out = vec![Vec::new(); kept.len()];
        let mut labeled = vec![Vec::new(); alphabet.len()];
        for (i, e) in new_edges.iter().enumerate() {
            out[e.from].push(i);
            labeled[e.label as usize].push(i);
        }
        Ok(Presentation {
            alphabet,
            vertices: kept,
            edges: new_edges,
            out,
            labeled,
            injective: OnceLock::new(),
        })
    }

    /// Builds a presentation whose vertices are named by their indices.
    pub fn from_edges(alphabet: Alphabet, n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new(alphabet, (0..n).map(|i| i.to_string()).collect(), edges)
    }

    /// Convenience constructor from `(from, to, label)` triples over names.
    pub fn from_triples(alphabet: &[&str], triples: &[(&str, &str, &str)]) -> Result<Self> {
        let doc = PresentationDoc {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            vertices: {
                let mut v: Vec<String> = Vec::new();
                for (a, b, _) in triples {
                    for x in [a, b] {
                        if !v.iter().any(|y| y == x) {
                            v.push(x.to_string());
                        }
                    }
                }
                v
            },
            edges: triples
                .iter()
                .map(|(a, b, l)| EdgeDoc {
                    from: a.to_string(),
                    to: b.to_string(),
                    label: l.to_string(),
                })
                .collect(),
        };
        Self::from_doc(&doc)
    }

    /// The full shift on `k` symbols named 0..k-1.
    pub fn full_shift(k: usize) -> Self {
        let alphabet = Alphabet::digits(k);
        let edges = (0..k as Sym).map(|a| Edge { from: 0, to: 0, label: a }).collect();
        Self::from_edges(alphabet, 1, edges).expect("full shift is nonempty")
    }

    /// The full shift over a given alphabet.
    pub fn full_shift_over(alphabet: Alphabet) -> Self {
        let edges = alphabet.symbols().map(|a| Edge { from: 0, to: 0, label: a }).collect();
        Self::from_edges(alphabet, 1, edges).expect("full shift is nonempty")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.out[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn edges_labeled(&self, a: Sym) -> impl Iterator<Item = &Edge> {
        self.labeled[a as usize].iter().map(move |&i| &self.edges[i])
    }

    /// Vertex successor lists (with multiplicity).
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        adj
    }

    /// Relabels every edge through `f`, keeping the graph.
    pub fn relabel(&self, target: Alphabet, f: impl Fn(Sym) -> Sym) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { label: f(e.label), ..*e })
            .collect();
        Self::new(target, self.vertices.clone(), edges)
    }

    /// Vertices reachable from `from` by one edge labeled `a`.
    pub fn step(&self, from: &[bool], a: Sym) -> Vec<bool> {
        let mut next = vec![false; self.vertex_count()];
        for e in self.edges_labeled(a) {
            if from[e.from] {
                next[e.to] = true;
            }
        }
        next
    }

    /// Set of vertices at which a path labeled `w` can end, starting anywhere.
    pub fn follow(&self, w: &[Sym]) -> Vec<bool> {
        let mut cur = vec![true; self.vertex_count()];
        for &a in w {
            cur = self.step(&cur, a);
            if !cur.iter().any(|&b| b) {
                break;
            }
        }
        cur
    }

    /// No vertex has two outgoing edges with the same label.
    pub fn is_right_resolving(&self) -> bool {
        self.out.iter().all(|es| {
            let mut seen = std::collections::HashSet::new();
            es.iter().all(|&i| seen.insert(self.edges[i].label))
        })
    }

    /// Right-resolving and every label enters a single vertex: label sequences then form
    /// a 1-step SFT and determine their paths.
    pub fn is_one_step(&self) -> bool {
        if !self.is_right_resolving() {
            return false;
        }
        self.labeled.iter().all(|es| {
            es.windows(2)
                .all(|p| self.edges[p[0]].to == self.edges[p[1]].to)
        })
    }

    /// Target vertex of a label in a 1-step presentation.
    pub fn label_target(&self, a: Sym) -> Option<usize> {
        self.labeled[a as usize].first().map(|&i| self.edges[i].to)
    }

    /// The labeling is injective on bi-infinite paths, so the presented shift is
    /// conjugate to the edge shift (an SFT).
    pub fn sft_flag(&self) -> bool {
        *self.injective.get_or_init(|| self.labeling_is_injective())
    }

    fn labeling_is_injective(&self) -> bool {
        let n = self.vertex_count();
        let mut pair_edges: Vec<(usize, usize)> = Vec::new();
        let mut off_edge = Vec::new();
        for es in &self.labeled {
            for &i in es {
                for &j in es {
                    let (e, f) = (&self.edges[i], &self.edges[j]);
                    pair_edges.push((e.from * n + f.from, e.to * n + f.to));
                    off_edge.push(i != j);
                }
            }
        }
        let alive = graph::essential_vertices(n * n, &pair_edges);
        !pair_edges
            .iter()
            .zip(&off_edge)
            .any(|(&(a, b), &off)| off && alive[a] && alive[b])
    }

    pub fn to_doc(&self, canonical: bool) -> PresentationDoc {
        let mut vertices = self.vertices.clone();
        let mut edges: Vec<EdgeDoc> = self
            .edges
            .iter()
            .map(|e| EdgeDoc {
                from: self.vertices[e.from].clone(),
                to: self.vertices[e.to].clone(),
                label: self.alphabet.name(e.label).to_string(),
            })
            .collect();
        if canonical {
            vertices.sort();
            edges.sort_by(|a, b| {
                (&a.from, &a.to, &a.label).cmp(&(&b.from, &b.to, &b.label))
            });
        }
        PresentationDoc {
            alphabet: self.alphabet.names().to_vec(),
            vertices,
            edges,
        }
    }

    pub fn from_doc(doc: &PresentationDoc) -> Result<Self> {
        let alphabet = Alphabet::with_blank(doc.alphabet.clone())?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, v) in doc.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate vertex {v:?} at vertices[{i}]")));
            }
        }
        let edges = doc
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let from = *index.get(e.from.as_str()).ok_or_else(|| {
                    Error::Malformed(format!("edges[{i}].from: unknown vertex {:?}", e.from))
                })?;
                let to = *index.get(e.to.as_str()).ok_or_else(|| {
                    Error::Malformed(format!("edges[{i}].to: unknown vertex {:?}", e.to))
                })?;
                let label = alphabet.sym(&e.label).ok_or_else(|| {
                    Error::Malformed(format!("edges[{i}].label: unknown symbol {:?}", e.label))
                })?;
                Ok(Edge { from, to, label })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, doc.vertices.clone(), edges)
    }

    pub fn to_json(&self, canonical: bool) -> String {
        serde_json::to_string_pretty(&self.to_doc(canonical)).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PresentationDoc = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_doc(&doc)
    }

    /// Renames vertices to their indices (keeps everything else).
    pub fn with_index_names(&self) -> Self {
        let mut p = self.clone();
        p.vertices = (0..p.vertex_count()).map(|i| i.to_string()).collect();
        p
    }

    /// Counts edges between each ordered vertex pair.
    pub fn edge_multiplicities(&self) -> BTreeMap<(usize, usize), u64> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry((e.from, e.to)).or_insert(0) += 1;
        }
        m
    }

    /// A word realized by some path, or `None` when `w` is not in the language.
    pub fn accepts(&self, w: &Word) -> bool {
        self.follow(w).iter().any(|&b| b)
    }
}

impl From<Presentation> for PresentationDoc {
    fn from(p: Presentation) -> Self {
        p.to_doc(false)
    }
}

impl TryFrom<PresentationDoc> for Presentation {
    type Error = Error;

    fn try_from(doc: PresentationDoc) -> Result<Self> {
        Presentation::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn golden_mean() -> Presentation {
        Presentation::from_triples(&["0", "1"], &[("0", "0", "0"), ("0", "1", "1"), ("1", "0", "0")])
            .unwrap()
    }

    #[test]
    fn trimming_and_flags() {
        let gm = golden_mean();
        assert_eq!(gm.vertex_count(), 2);
        assert!(gm.is_one_step());
        assert!(gm.sft_flag());
        let even = Presentation::from_triples(
            &["0", "1"],
            &[("a", "a", "1"), ("a", "b", "0"), ("b", "a", "0")],
        )
        .unwrap();
        assert!(even.is_right_resolving());
        assert!(!even.is_one_step());
        assert!(!even.sft_flag());
        let dangling =
            Presentation::from_triples(&["0"], &[("a", "b", "0"), ("b", "b", "0")]).unwrap();
        assert_eq!(dangling.vertex_count(), 1);
        assert_eq!(
            Presentation::from_triples(&["0"], &[("a", "b", "0")]),
            Err(Error::EmptyShift)
        );
    }

    #[test]
    fn document_round_trip_is_canonical() {
        let gm = golden_mean();
        let text = gm.to_json(true);
        let back = Presentation::from_json(&text).unwrap();
        assert_eq!(back.to_json(true), text);
        let err = Presentation::from_json("{\"alphabet\": [\"0\"], \"vertices\": [}").unwrap_err();
        assert!(matches!(err, Error::Malformed(m) if m.contains("line 1")));
    }
}
