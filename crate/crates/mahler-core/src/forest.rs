//! Factorization trees over a prime ladder.
//!
//! Nodes live in a flat arena indexed by [`NodeId`]; ids are assigned in
//! level order during construction, so parents always precede children.
//! Two builders are provided: the maximal primitive tree (children are all
//! of Delta) and the canonical optimal tree (delta-children when any exist,
//! otherwise the epsilon-child).

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{is_direct_subfactorization, Factorization};
use crate::rational::{PrimeLadder, ReducedRational};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    MaximalPrimitive,
    CanonicalOptimal,
    User,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeKind::MaximalPrimitive => write!(f, "maximal-primitive"),
            TreeKind::CanonicalOptimal => write!(f, "canonical-optimal"),
            TreeKind::User => write!(f, "user"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    id: NodeId,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    content: Factorization,
}

impl TreeNode {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn content(&self) -> &Factorization {
        &self.content
    }

    pub fn level(&self) -> usize {
        self.content.level()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Child insertion order for builders. The isomorphism class of the result
/// never depends on it; `Reversed` and `Shuffled` exist so uniqueness
/// theorems can be exercised against independently built instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildOrder {
    InOrder,
    Reversed,
    Shuffled(u64),
}

#[derive(Debug, Clone)]
pub struct TreeBuilder {
    node_cap: usize,
    child_order: ChildOrder,
}

impl Default for TreeBuilder {
    fn default() -> Self {
        TreeBuilder {
            node_cap: DEFAULT_NODE_CAP,
            child_order: ChildOrder::InOrder,
        }
    }
}

impl TreeBuilder {
    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn with_child_order(mut self, order: ChildOrder) -> Self {
        self.child_order = order;
        self
    }

    /// Builds P: every node's children are exactly Delta of its content.
    pub fn maximal_primitive(&self, alpha: &ReducedRational) -> Result<FactorizationTree> {
        self.build(alpha, TreeKind::MaximalPrimitive)
    }

    /// Builds O: delta-children when non-empty, else the epsilon-child.
    pub fn canonical_optimal(&self, alpha: &ReducedRational) -> Result<FactorizationTree> {
        self.build(alpha, TreeKind::CanonicalOptimal)
    }

    fn build(&self, alpha: &ReducedRational, kind: TreeKind) -> Result<FactorizationTree> {
        let ladder = alpha.prime_ladder()?;
        let mut rng = match self.child_order {
            ChildOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut nodes = vec![TreeNode {
            id: NodeId(0),
            parent: None,
            children: Vec::new(),
            content: Factorization::empty(),
        }];
        let mut frontier = vec![NodeId(0)];
        for _ in 0..ladder.len() {
            let mut next = Vec::new();
            for &pid in &frontier {
                let content = nodes[pid.0].content.clone();
                let mut kids = match kind {
                    TreeKind::MaximalPrimitive => content.children(&ladder)?,
                    TreeKind::CanonicalOptimal => {
                        let d = content.delta(&ladder)?;
                        if d.is_empty() {
                            vec![content.epsilon(&ladder)?]
                        } else {
                            d
                        }
                    }
                    TreeKind::User => unreachable!("builders only grow P and O"),
                };
                match self.child_order {
                    ChildOrder::InOrder => {}
                    ChildOrder::Reversed => kids.reverse(),
                    ChildOrder::Shuffled(_) => {
                        kids.shuffle(rng.as_mut().expect("rng present when shuffled"))
                    }
                }
                for kid in kids {
                    if nodes.len() >= self.node_cap {
                        return Err(Error::CapacityExceeded(format!(
                            "tree for {alpha} exceeds the {}-node cap",
                            self.node_cap
                        )));
                    }
                    let id = NodeId(nodes.len());
                    nodes.push(TreeNode {
                        id,
                        parent: Some(pid),
                        children: Vec::new(),
                        content: kid,
                    });
                    nodes[pid.0].children.push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        Ok(FactorizationTree {
            alpha: alpha.clone(),
            ladder,
            kind,
            nodes,
        })
    }
}

pub fn build_maximal_primitive(alpha: &ReducedRational) -> Result<FactorizationTree> {
    TreeBuilder::default().maximal_primitive(alpha)
}

pub fn build_canonical_optimal(alpha: &ReducedRational) -> Result<FactorizationTree> {
    TreeBuilder::default().canonical_optimal(alpha)
}

#[derive(Debug, Clone)]
pub struct FactorizationTree {
    alpha: ReducedRational,
    ladder: PrimeLadder,
    kind: TreeKind,
    nodes: Vec<TreeNode>,
}

impl FactorizationTree {
    /// Wires an explicit node list into a tree. Entry 0 must be the root;
    /// every other entry's parent must appear earlier in the list. Contents
    /// are not validated here; `validate` reports axiom violations.
    pub fn from_nodes(
        alpha: &ReducedRational,
        kind: TreeKind,
        layout: Vec<(Option<usize>, Factorization)>,
    ) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::InvalidInput("a tree needs at least a root".into()));
        }
        let ladder = alpha.prime_ladder()?;
        let mut nodes: Vec<TreeNode> = Vec::with_capacity(layout.len());
        for (i, (parent, content)) in layout.into_iter().enumerate() {
            match (i, parent) {
                (0, None) => {}
                (0, Some(_)) => return Err(Error::InvalidInput("node 0 must be the root".into())),
                (_, None) => {
                    return Err(Error::InvalidInput(format!(
                        "node {i} lacks a parent; only node 0 is the root"
                    )))
                }
                (_, Some(p)) if p >= i => {
                    return Err(Error::InvalidInput(format!(
                        "node {i} references parent {p}, which does not precede it"
                    )))
                }
                (_, Some(_)) => {}
            }
            let id = NodeId(i);
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            nodes.push(TreeNode {
                id,
                parent: parent.map(NodeId),
                children: Vec::new(),
                content,
            });
        }
        Ok(FactorizationTree {
            alpha: alpha.clone(),
            ladder,
            kind,
            nodes,
        })
    }

    pub fn alpha(&self) -> &ReducedRational {
        &self.alpha
    }

    pub fn ladder(&self) -> &PrimeLadder {
        &self.ladder
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter()
    }

    /// Ids of all nodes at the given level, in construction order.
    pub fn level_ids(&self, level: usize) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.level() == level)
            .map(|n| n.id)
            .collect()
    }

    pub fn level_contents(&self, level: usize) -> Vec<&Factorization> {
        self.nodes
            .iter()
            .filter(|n| n.level() == level)
            .map(|n| &n.content)
            .collect()
    }

    pub fn leaf_ids(&self) -> Vec<NodeId> {
        self.level_ids(self.ladder.len())
    }

    /// Contents of all top-level nodes, in construction order.
    pub fn leaves(&self) -> Vec<&Factorization> {
        self.level_contents(self.ladder.len())
    }

    /// Checks the four tree axioms plus per-node content validity.
    pub fn validate(&self) -> TreeReport {
        let mut violations = Vec::new();
        let root = &self.nodes[0];
        if !root.content.is_empty() || root.content.level() != 0 {
            violations.push(TreeViolation::RootContentNotEmpty);
        }
        let n_total = self.ladder.len();
        for node in &self.nodes {
            let report = node.content.validate(&self.ladder);
            if !report.is_ok() {
                violations.push(TreeViolation::InvalidContent {
                    node: node.id,
                    detail: report.to_string(),
                });
            }
            if node.level() < n_total && node.children.is_empty() {
                violations.push(TreeViolation::MissingChildren { node: node.id });
            }
            for (i, &a) in node.children.iter().enumerate() {
                for &b in &node.children[i + 1..] {
                    if self.nodes[a.0].content.canonicalize()
                        == self.nodes[b.0].content.canonicalize()
                    {
                        violations.push(TreeViolation::DuplicateSiblings {
                            parent: node.id,
                            left: a,
                            right: b,
                        });
                    }
                }
            }
            if let Some(pid) = node.parent {
                if !is_direct_subfactorization(
                    &self.nodes[pid.0].content,
                    &node.content,
                    &self.ladder,
                ) {
                    violations.push(TreeViolation::NotDirectSubfactorization {
                        parent: pid,
                        child: node.id,
                    });
                }
            }
        }
        TreeReport { violations }
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Text => self.export_text(),
            ExportFormat::Dot => self.export_dot(),
            ExportFormat::Json => self.export_json(),
        }
    }

    fn export_text(&self) -> String {
        let mut lines = Vec::with_capacity(self.nodes.len());
        self.export_text_rec(self.root(), 0, &mut lines);
        lines.join("\n")
    }

    fn export_text_rec(&self, id: NodeId, depth: usize, lines: &mut Vec<String>) {
        let node = &self.nodes[id.0];
        lines.push(format!("{}{}", "  ".repeat(depth), node.content));
        for &c in &node.children {
            self.export_text_rec(c, depth + 1, lines);
        }
    }

    fn export_dot(&self) -> String {
        let mut out = String::from("digraph factorization_tree {\n  rankdir=TB;\n");
        for node in &self.nodes {
            out.push_str(&format!("  {} [label=\"{}\"];\n", node.id, node.content));
        }
        for node in &self.nodes {
            for &c in &node.children {
                out.push_str(&format!("  {} -> {};\n", node.id, c));
            }
        }
        out.push('}');
        out
    }

    fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct NodeJson {
            id: usize,
            parent: Option<usize>,
            level: usize,
            entries: Vec<[String; 2]>,
        }
        #[derive(Serialize)]
        struct TreeJson {
            alpha: String,
            kind: String,
            nodes: Vec<NodeJson>,
        }
        let doc = TreeJson {
            alpha: self.alpha.to_string(),
            kind: self.kind.to_string(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id.0,
                    parent: n.parent.map(NodeId::index),
                    level: n.level(),
                    entries: n
                        .content
                        .entries()
                        .iter()
                        .map(|e| [e.numerator().to_string(), e.denominator().to_string()])
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("tree serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Text,
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ExportFormat::Text),
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    RootContentNotEmpty,
    MissingChildren {
        node: NodeId,
    },
    DuplicateSiblings {
        parent: NodeId,
        left: NodeId,
        right: NodeId,
    },
    NotDirectSubfactorization {
        parent: NodeId,
        child: NodeId,
    },
    InvalidContent {
        node: NodeId,
        detail: String,
    },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::RootContentNotEmpty => {
                write!(f, "root content is not the empty factorization")
            }
            TreeViolation::MissingChildren { node } => {
                write!(f, "node {node} is below the top level but has no children")
            }
            TreeViolation::DuplicateSiblings {
                parent,
                left,
                right,
            } => write!(
                f,
                "children {left} and {right} of node {parent} carry equal content"
            ),
            TreeViolation::NotDirectSubfactorization { parent, child } => write!(
                f,
                "content of node {parent} is not a direct subfactorization of node {child}"
            ),
            TreeViolation::InvalidContent { node, detail } => {
                write!(f, "node {node} content invalid: {detail}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub violations: Vec<TreeViolation>,
}

impl TreeReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A content- and parent-preserving injection of one tree into another,
/// stored as a map from source arena index to target id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeHomomorphism {
    vertex_map: Vec<NodeId>,
}

impl TreeHomomorphism {
    pub fn map(&self, id: NodeId) -> NodeId {
        self.vertex_map[id.0]
    }

    pub fn vertex_map(&self) -> &[NodeId] {
        &self.vertex_map
    }

    pub fn len(&self) -> usize {
        self.vertex_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_map.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, id)| id.0 == i)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![
            false;
            self.vertex_map
                .len()
                .max(self.vertex_map.iter().map(|id| id.0 + 1).max().unwrap_or(0),)
        ];
        for id in &self.vertex_map {
            if seen[id.0] {
                return false;
            }
            seen[id.0] = true;
        }
        true
    }
}

/// Level-wise construction of the unique homomorphism from `t1` into `t2`:
/// root maps to root, and each node maps to the child of its parent's image
/// carrying the same content. Fails with `HomomorphismNotFound` when some
/// node has no matching child in the target.
pub fn find_homomorphism(
    t1: &FactorizationTree,
    t2: &FactorizationTree,
) -> Result<TreeHomomorphism> {
    if t1.alpha() != t2.alpha() {
        return Err(Error::AlphaMismatch {
            left: t1.alpha().to_string(),
            right: t2.alpha().to_string(),
        });
    }
    let root_1 = t1.node(t1.root());
    let root_2 = t2.node(t2.root());
    if root_1.content.canonicalize() != root_2.content.canonicalize() {
        return Err(Error::HomomorphismNotFound("root contents differ".into()));
    }
    let mut map = vec![t2.root(); t1.len()];
    for node in t1.nodes().skip(1) {
        let parent = node.parent.expect("non-root node has a parent");
        let image_parent = map[parent.0];
        let want = node.content.canonicalize();
        let image = t2
            .node(image_parent)
            .children()
            .iter()
            .copied()
            .find(|&c| t2.node(c).content.canonicalize() == want);
        match image {
            Some(c) => map[node.id.0] = c,
            None => {
                return Err(Error::HomomorphismNotFound(format!(
                    "no child of target node {image_parent} carries content {}",
                    node.content
                )))
            }
        }
    }
    let hom = TreeHomomorphism { vertex_map: map };
    verify_homomorphism(&hom, t1, t2)?;
    Ok(hom)
}

/// Confirms the constructed map is injective, content-preserving, and
/// parent-preserving; holds for valid inputs, rejects degenerate user trees.
fn verify_homomorphism(
    hom: &TreeHomomorphism,
    t1: &FactorizationTree,
    t2: &FactorizationTree,
) -> Result<()> {
    if !hom.is_injective() {
        return Err(Error::HomomorphismNotFound(
            "constructed map is not injective; source tree violates the sibling axiom".into(),
        ));
    }
    for node in t1.nodes() {
        let image = t2.node(hom.map(node.id));
        if image.content.canonicalize() != node.content.canonicalize() {
            return Err(Error::HomomorphismNotFound(format!(
                "map does not preserve content at node {}",
                node.id
            )));
        }
        match (node.parent, image.parent) {
            (None, None) => {}
            (Some(p), Some(q)) if hom.map(p) == q => {}
            _ => {
                return Err(Error::HomomorphismNotFound(format!(
                    "map does not preserve the parent of node {}",
                    node.id
                )))
            }
        }
    }
    Ok(())
}

/// True iff the unique homomorphism exists and is surjective.
pub fn is_isomorphic(t1: &FactorizationTree, t2: &FactorizationTree) -> Result<bool> {
    match find_homomorphism(t1, t2) {
        Ok(hom) => Ok(hom.len() == t2.len()),
        Err(Error::HomomorphismNotFound(_)) => Ok(false),
        Err(e) => Err(e),
    }
}
