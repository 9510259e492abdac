//! Measure class graphs: the quotient of a factorization tree under the
//! equivalence "same level and same measure vector".
//!
//! Classes are numbered by first occurrence in the source arena, so the
//! graph is deterministic for a given tree. Edges carry no multiplicity;
//! an edge exists when some tree edge joins members of the two classes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::factorization::MeasureVector;
use crate::forest::{ExportFormat, FactorizationTree, NodeId, TreeKind};
use crate::rational::ReducedRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(usize);

impl ClassId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct MeasureClass {
    id: ClassId,
    level: usize,
    measure: MeasureVector,
    members: Vec<NodeId>,
}

impl MeasureClass {
    pub fn id(&self) -> ClassId {
        self.id
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn measure(&self) -> &MeasureVector {
        &self.measure
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }
}

#[derive(Debug, Clone)]
pub struct MeasureClassGraph {
    alpha: ReducedRational,
    source_kind: TreeKind,
    top_level: usize,
    classes: Vec<MeasureClass>,
    edges: BTreeSet<(usize, usize)>,
    projection: Vec<ClassId>,
}

/// Collapses a tree to its measure class graph.
pub fn quotient(tree: &FactorizationTree) -> MeasureClassGraph {
    let mut classes: Vec<MeasureClass> = Vec::new();
    let mut index: HashMap<(usize, MeasureVector), usize> = HashMap::new();
    let mut projection: Vec<ClassId> = Vec::with_capacity(tree.len());
    for node in tree.nodes() {
        let key = (node.level(), node.content().measure_vector());
        let slot = match index.get(&key) {
            Some(&i) => i,
            None => {
                let i = classes.len();
                classes.push(MeasureClass {
                    id: ClassId(i),
                    level: key.0,
                    measure: key.1.clone(),
                    members: Vec::new(),
                });
                index.insert(key, i);
                i
            }
        };
        classes[slot].members.push(node.id());
        projection.push(ClassId(slot));
    }
    let mut edges = BTreeSet::new();
    for node in tree.nodes() {
        if let Some(parent) = node.parent() {
            edges.insert((
                projection[parent.index()].0,
                projection[node.id().index()].0,
            ));
        }
    }
    MeasureClassGraph {
        alpha: tree.alpha().clone(),
        source_kind: tree.kind(),
        top_level: tree.ladder().len(),
        classes,
        edges,
        projection,
    }
}

impl MeasureClassGraph {
    pub fn alpha(&self) -> &ReducedRational {
        &self.alpha
    }

    pub fn source_kind(&self) -> TreeKind {
        self.source_kind
    }

    pub fn classes(&self) -> &[MeasureClass] {
        &self.classes
    }

    pub fn class(&self, id: ClassId) -> &MeasureClass {
        &self.classes[id.0]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (ClassId, ClassId)> + '_ {
        self.edges.iter().map(|&(a, b)| (ClassId(a), ClassId(b)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The class of a node of the source tree.
    pub fn class_of(&self, node: NodeId) -> ClassId {
        self.projection[node.index()]
    }

    pub fn in_degree(&self, id: ClassId) -> usize {
        self.edges.iter().filter(|&&(_, b)| b == id.0).count()
    }

    pub fn out_degree(&self, id: ClassId) -> usize {
        self.edges.iter().filter(|&&(a, _)| a == id.0).count()
    }

    /// Classes at the top level, i.e. images of the source tree's leaves.
    pub fn leaf_classes(&self) -> Vec<&MeasureClass> {
        self.classes
            .iter()
            .filter(|c| c.level == self.top_level)
            .collect()
    }

    /// True iff the graph is a rooted tree with in-degree at most one and
    /// out-degree at most two everywhere.
    pub fn is_binary_tree(&self) -> bool {
        let n = self.classes.len();
        let mut in_deg = vec![0usize; n];
        let mut out_deg = vec![0usize; n];
        for &(a, b) in &self.edges {
            out_deg[a] += 1;
            in_deg[b] += 1;
        }
        if in_deg.iter().any(|&d| d > 1) || out_deg.iter().any(|&d| d > 2) {
            return false;
        }
        let roots: Vec<usize> = (0..n).filter(|&i| in_deg[i] == 0).collect();
        if roots.len() != 1 || self.edges.len() != n - 1 {
            return false;
        }
        // In-degree <= 1 with |E| = |V| - 1 and one root forces a tree as
        // long as every class is reachable from the root.
        let mut seen = vec![false; n];
        let mut stack = vec![roots[0]];
        seen[roots[0]] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                if a == v && !seen[b] {
                    seen[b] = true;
                    reached += 1;
                    stack.push(b);
                }
            }
        }
        reached == n
    }

    /// Confirms the projection is a faithful quotient of `tree`: classes
    /// are keyed injectively by (level, measure), every class is hit, each
    /// tree edge descends to a graph edge, and each graph edge is witnessed
    /// by a tree edge.
    pub fn check_invariants(&self, tree: &FactorizationTree) -> std::result::Result<(), String> {
        if self.projection.len() != tree.len() {
            return Err("projection length differs from the source tree".into());
        }
        let mut labels = BTreeSet::new();
        for class in &self.classes {
            if !labels.insert((class.level, class.measure.clone())) {
                return Err(format!(
                    "two classes share level {} and measure {}",
                    class.level, class.measure
                ));
            }
            if class.members.is_empty() {
                return Err(format!("class {} has no members", class.id));
            }
            for &m in &class.members {
                let node = tree.node(m);
                if node.level() != class.level || node.content().measure_vector() != class.measure {
                    return Err(format!("node {m} does not match its class label"));
                }
                if self.projection[m.index()] != class.id {
                    return Err(format!("projection of node {m} disagrees with membership"));
                }
            }
        }
        let mut witnessed = BTreeSet::new();
        for node in tree.nodes() {
            if let Some(parent) = node.parent() {
                let e = (self.class_of(parent).0, self.class_of(node.id()).0);
                if !self.edges.contains(&e) {
                    return Err(format!(
                        "tree edge {parent} -> {} has no image edge",
                        node.id()
                    ));
                }
                witnessed.insert(e);
            }
        }
        if witnessed != self.edges {
            return Err("some graph edge is witnessed by no tree edge".into());
        }
        Ok(())
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Text => self.export_text(),
            ExportFormat::Dot => self.export_dot(),
            ExportFormat::Json => self.export_json(),
        }
    }

    fn class_label(&self, class: &MeasureClass) -> String {
        let mut label = format!("{} @{}", class.measure, class.level);
        if class.members.len() > 1 {
            label.push_str(&format!(" x{}", class.members.len()));
        }
        label
    }

    fn export_text(&self) -> String {
        let mut lines = vec![
            format!("classes {}", self.classes.len()),
            format!("edges {}", self.edges.len()),
            format!(
                "binary tree {}",
                if self.is_binary_tree() { "yes" } else { "no" }
            ),
        ];
        for class in &self.classes {
            lines.push(format!(
                "c{}: level {}, measure {}, members {}",
                class.id,
                class.level,
                class.measure,
                class.members.len()
            ));
        }
        for (a, b) in self.edges() {
            lines.push(format!("c{a} -> c{b}"));
        }
        lines.join("\n")
    }

    fn export_dot(&self) -> String {
        let mut out = String::from("digraph measure_class_graph {\n  rankdir=TB;\n");
        for class in &self.classes {
            out.push_str(&format!(
                "  {} [label=\"{}\"];\n",
                class.id,
                self.class_label(class)
            ));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  {a} -> {b};\n"));
        }
        out.push('}');
        out
    }

    fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct ClassJson {
            id: usize,
            level: usize,
            measure: Vec<String>,
            members: usize,
        }
        #[derive(Serialize)]
        struct GraphJson {
            alpha: String,
            kind: String,
            binary_tree: bool,
            classes: Vec<ClassJson>,
            edges: Vec<[usize; 2]>,
        }
        let doc = GraphJson {
            alpha: self.alpha.to_string(),
            kind: self.source_kind.to_string(),
            binary_tree: self.is_binary_tree(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    id: c.id.0,
                    level: c.level,
                    measure: c.measure.maxima().iter().map(|m| m.to_string()).collect(),
                    members: c.members.len(),
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
    }
}
