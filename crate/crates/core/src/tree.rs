//! Rooted corner-labeled plane trees and the bubbles they encode.
//!
//! Every tree vertex is an open necklace on `d = 4` colors with
//! `C = {2, 4}`; a child of color `c ∈ {1, 3}` is inserted on a color-`c`
//! edge of its parent. Around a vertex, starting at the edge to the parent
//! (the open edge at the root) and going counter-clockwise, the corner
//! labels count the `MM^†` factors between consecutive insertions. A vertex
//! with `c` children has `c + 1` corners; `k_v` is the sum of its labels.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{catalan, Permutation};
use crate::bubble::Bubble;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CornerLabeledTree {
    /// Insertion color (1 or 3); the root carries 1.
    pub color: u8,
    pub labels: Vec<u32>,
    #[serde(default)]
    pub children: Vec<CornerLabeledTree>,
}

/// A tree bubble together with the tree vertex owning each white vertex.
#[derive(Clone, Debug)]
pub struct TreeBubble {
    pub bubble: Bubble,
    /// Preorder tree vertex of each white vertex.
    pub owner: Vec<usize>,
    /// `k_v` in preorder.
    pub vertex_totals: Vec<u32>,
    /// Preorder ids of the non-root vertices without children.
    pub leaves: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Item {
    Parent,
    Factor(usize),
    Slot { child: usize, color: u8 },
}

struct VertexLayout {
    items: Vec<Item>,
    color: u8,
    /// (parent vertex, item index of our slot in it)
    parent_slot: Option<(usize, usize)>,
}

impl CornerLabeledTree {
    pub fn leaf(color: u8, k: u32) -> Self {
        CornerLabeledTree {
            color,
            labels: vec![k],
            children: Vec::new(),
        }
    }

    pub fn new(color: u8, labels: Vec<u32>, children: Vec<CornerLabeledTree>) -> Self {
        CornerLabeledTree {
            color,
            labels,
            children,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.color != 1 {
            return Err(Error::InvalidTree(
                "the root insertion color must be 1".into(),
            ));
        }
        self.validate_vertex()
    }

    fn validate_vertex(&self) -> Result<()> {
        if self.color != 1 && self.color != 3 {
            return Err(Error::InvalidTree(format!(
                "insertion color {} is not 1 or 3",
                self.color
            )));
        }
        if self.labels.len() != self.children.len() + 1 {
            return Err(Error::InvalidTree(format!(
                "a vertex with {} children needs {} corner labels, found {}",
                self.children.len(),
                self.children.len() + 1,
                self.labels.len()
            )));
        }
        if self.total() == 0 {
            return Err(Error::InvalidTree("every vertex needs k_v >= 1".into()));
        }
        self.children.iter().try_for_each(Self::validate_vertex)
    }

    /// `k_v` of this vertex.
    pub fn total(&self) -> u32 {
        self.labels.iter().sum()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(Self::vertex_count).sum::<usize>()
    }

    /// `k_v` of every vertex in preorder.
    pub fn vertex_totals(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.preorder(&mut |t| out.push(t.total()));
        out
    }

    /// Sum of all labels = number of white vertices of the bubble.
    pub fn total_length(&self) -> u32 {
        self.vertex_totals().iter().sum()
    }

    fn preorder<'a>(&'a self, f: &mut impl FnMut(&'a CornerLabeledTree)) {
        f(self);
        for c in &self.children {
            c.preorder(f);
        }
    }

    /// `∏_v Cat_{k_v}`.
    pub fn catalan_product(&self) -> BigUint {
        self.vertex_totals()
            .into_iter()
            .fold(BigUint::one(), |acc, k| acc * catalan(k))
    }

    /// Chain lengths predicted from the corners: at a non-root vertex every
    /// insertion cuts the necklace, so each nonzero label is one chain; at the
    /// root the open edge does not cut, merging the first and last labels.
    pub fn predicted_chain_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let root = &self.labels;
        if root.len() == 1 {
            out.push(root[0] as usize);
        } else {
            out.push((root[0] + root[root.len() - 1]) as usize);
            out.extend(root[1..root.len() - 1].iter().map(|&k| k as usize));
        }
        for c in &self.children {
            c.preorder(&mut |t| out.extend(t.labels.iter().map(|&k| k as usize)));
        }
        out.retain(|&k| k > 0);
        out.sort_unstable();
        out
    }

    pub fn to_bubble(&self) -> Result<Bubble> {
        Ok(self.build()?.bubble)
    }

    /// Builds the bubble by piling up open necklaces.
    ///
    /// For each row color `c`, the black vertex of a factor is joined to the
    /// white vertex of the next factor met by walking around its necklace:
    /// a child slot of color `c` is entered (and its necklace walked until
    /// its parent edge leads back out), slots of the other color are passed
    /// by, and the vertex's own parent edge is left through only when it has
    /// color `c` (the root's open edge closes on itself).
    pub fn build(&self) -> Result<TreeBubble> {
        self.validate()?;
        let mut layout: Vec<VertexLayout> = Vec::new();
        let mut owner = Vec::new();
        let mut totals = Vec::new();
        let mut leaves = Vec::new();
        fn lay_out(
            t: &CornerLabeledTree,
            parent: Option<usize>,
            layout: &mut Vec<VertexLayout>,
            owner: &mut Vec<usize>,
            totals: &mut Vec<u32>,
            leaves: &mut Vec<usize>,
        ) -> usize {
            let v = layout.len();
            layout.push(VertexLayout {
                items: vec![Item::Parent],
                color: t.color,
                parent_slot: None,
            });
            totals.push(t.total());
            if parent.is_some() && t.children.is_empty() {
                leaves.push(v);
            }
            for (i, &k) in t.labels.iter().enumerate() {
                for _ in 0..k {
                    layout[v].items.push(Item::Factor(owner.len()));
                    owner.push(v);
                }
                if let Some(child) = t.children.get(i) {
                    let cid = lay_out(child, Some(v), layout, owner, totals, leaves);
                    let pos = layout[v].items.len();
                    layout[v].items.push(Item::Slot {
                        child: cid,
                        color: child.color,
                    });
                    layout[cid].parent_slot = Some((v, pos));
                }
            }
            v
        }
        lay_out(
            self,
            None,
            &mut layout,
            &mut owner,
            &mut totals,
            &mut leaves,
        );

        let n = owner.len();
        let mut row_maps = Vec::with_capacity(2);
        for color in [1u8, 3] {
            let mut images = vec![usize::MAX; n];
            for (v, vl) in layout.iter().enumerate() {
                for (k, item) in vl.items.iter().enumerate() {
                    let Item::Factor(black) = *item else { continue };
                    let (mut cv, mut ck) = (v, k);
                    loop {
                        let items = &layout[cv].items;
                        ck = (ck + 1) % items.len();
                        match items[ck] {
                            Item::Factor(white) => {
                                images[white] = black;
                                break;
                            }
                            Item::Slot { child, color: sc } if sc == color => {
                                cv = child;
                                ck = 0;
                            }
                            Item::Slot { .. } => {}
                            Item::Parent => {
                                if let Some((p, pos)) = layout[cv].parent_slot {
                                    if layout[cv].color == color {
                                        cv = p;
                                        ck = pos;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            row_maps.push(Permutation::from_images(images)?);
        }
        let id = Permutation::identity(n);
        let [m1, m3]: [Permutation; 2] = row_maps.try_into().expect("two row colors");
        let bubble = Bubble::new(vec![m1, id.clone(), m3, id])?;
        Ok(TreeBubble {
            bubble,
            owner,
            vertex_totals: totals,
            leaves,
        })
    }
}

pub fn tree_to_bubble(t: &CornerLabeledTree) -> Result<Bubble> {
    t.to_bubble()
}

pub fn catalan_product(t: &CornerLabeledTree) -> BigUint {
    t.catalan_product()
}

/// Plane tree shape: the ordered list of child shapes.
#[derive(Clone, Debug)]
struct Shape(Vec<Shape>);

fn shapes(vertices: usize) -> Vec<Shape> {
    forests(vertices - 1).into_iter().map(Shape).collect()
}

fn forests(vertices: usize) -> Vec<Vec<Shape>> {
    if vertices == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=vertices {
        for head in shapes(first) {
            for rest in forests(vertices - first) {
                let mut f = vec![head.clone()];
                f.extend(rest);
                out.push(f);
            }
        }
    }
    out
}

/// Weak compositions of `total` into `parts` parts, lexicographic.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for a in 0..=total {
        for mut rest in compositions(total - a, parts - 1) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

/// All decorations of `shape` with total label budget at most `budget`,
/// paired with the budget they use.
fn decorate(shape: &Shape, color: u8, budget: u32) -> Vec<(CornerLabeledTree, u32)> {
    let mut out = Vec::new();
    for k in 1..=budget {
        for labels in compositions(k, shape.0.len() + 1) {
            for (children, used) in decorate_children(&shape.0, budget - k) {
                out.push((
                    CornerLabeledTree {
                        color,
                        labels: labels.clone(),
                        children,
                    },
                    k + used,
                ));
            }
        }
    }
    out
}

fn decorate_children(shapes: &[Shape], budget: u32) -> Vec<(Vec<CornerLabeledTree>, u32)> {
    let Some((first, rest)) = shapes.split_first() else {
        return vec![(Vec::new(), 0)];
    };
    let mut out = Vec::new();
    for color in [1, 3] {
        for (child, used) in decorate(first, color, budget) {
            for (mut tail, used_tail) in decorate_children(rest, budget - used) {
                tail.insert(0, child.clone());
                out.push((tail, used + used_tail));
            }
        }
    }
    out
}

/// Every valid tree with at most `max_vertices` vertices and
/// `Σ k_v <= max_total_label`, each exactly once, ordered by vertex count,
/// then shape, then decoration.
pub fn enumerate_trees(
    max_vertices: usize,
    max_total_label: u32,
) -> impl Iterator<Item = CornerLabeledTree> {
    (1..=max_vertices)
        .flat_map(shapes)
        .flat_map(move |shape| decorate(&shape, 1, max_total_label))
        .map(|(t, _)| t)
}
