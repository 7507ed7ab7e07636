//! Blocks, substitution decomposition trees, inflation, and simple permutations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::{all_permutations, check_permutation, format_list, rank_compress};

/// Positions `[a, b]` map onto values `[c, d]` (all 1-based, inclusive).
/// Positions are access times and values are keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl Block {
    pub fn size(&self) -> usize {
        self.b + 1 - self.a
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    Leaf(Vec<usize>),
    Internal { skeleton: Vec<usize>, children: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub block: Block,
    pub parent: Option<usize>,
    pub content: Content,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self.content, Content::Leaf(_))
    }
    pub fn children(&self) -> &[usize] {
        match &self.content {
            Content::Leaf(_) => &[],
            Content::Internal { children, .. } => children,
        }
    }
    pub fn skeleton(&self) -> Option<&[usize]> {
        match &self.content {
            Content::Leaf(_) => None,
            Content::Internal { skeleton, .. } => Some(skeleton),
        }
    }
    /// The leaf permutation, or the skeleton for internal nodes.
    pub fn pattern(&self) -> &[usize] {
        match &self.content {
            Content::Leaf(p) => p,
            Content::Internal { skeleton, .. } => skeleton,
        }
    }
}

/// Arena-backed decomposition tree. Children of a node are ordered by
/// position (time).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTree {
    nodes: Vec<Node>,
    root: usize,
}

/// Post-order construction: add children before their parent.
#[derive(Default)]
pub struct TreeBuilder {
    contents: Vec<Content>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, perm: Vec<usize>) -> usize {
        self.contents.push(Content::Leaf(perm));
        self.contents.len() - 1
    }

    pub fn internal(&mut self, skeleton: Vec<usize>, children: Vec<usize>) -> usize {
        self.contents.push(Content::Internal { skeleton, children });
        self.contents.len() - 1
    }

    pub fn finish(self, root: usize) -> Result<DecompositionTree> {
        let cs = self.contents;
        if root >= cs.len() {
            return invalid("root id out of range");
        }
        let mut parent = vec![None; cs.len()];
        for (id, c) in cs.iter().enumerate() {
            match c {
                Content::Leaf(p) => {
                    if p.is_empty() {
                        return invalid("empty leaf");
                    }
                    check_permutation(p)?;
                }
                Content::Internal { skeleton, children } => {
                    check_permutation(skeleton)?;
                    if children.len() != skeleton.len() || children.len() < 2 {
                        return invalid(format!(
                            "node with skeleton ({}) has {} children",
                            format_list(skeleton),
                            children.len()
                        ));
                    }
                    for &ch in children {
                        if ch >= id || parent[ch].is_some() {
                            return invalid("children must be added once, before their parent");
                        }
                        parent[ch] = Some(id);
                    }
                }
            }
        }
        // ids below the root that are not reachable would be stray
        let mut size = vec![0usize; cs.len()];
        for (id, c) in cs.iter().enumerate() {
            size[id] = match c {
                Content::Leaf(p) => p.len(),
                Content::Internal { children, .. } => children.iter().map(|&ch| size[ch]).sum(),
            };
        }
        let n = size[root];
        let mut blocks = vec![Block { a: 0, b: 0, c: 0, d: 0 }; cs.len()];
        blocks[root] = Block { a: 1, b: n, c: 1, d: n };
        let mut reached = vec![false; cs.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            reached[id] = true;
            if let Content::Internal { skeleton, children } = &cs[id] {
                let bl = blocks[id];
                let mut a = bl.a;
                for (i, &ch) in children.iter().enumerate() {
                    let c = bl.c
                        + children
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| skeleton[j] < skeleton[i])
                            .map(|(_, &cj)| size[cj])
                            .sum::<usize>();
                    let s = size[ch];
                    blocks[ch] = Block { a, b: a + s - 1, c, d: c + s - 1 };
                    a += s;
                    stack.push(ch);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return invalid("tree has nodes unreachable from the root");
        }
        let nodes = cs
            .into_iter()
            .enumerate()
            .map(|(id, content)| Node { block: blocks[id], parent: parent[id], content })
            .collect();
        Ok(DecompositionTree { nodes, root })
    }
}

impl DecompositionTree {
    /// One leaf holding all of `p`.
    pub fn single_leaf(p: &[usize]) -> Result<Self> {
        let mut b = TreeBuilder::new();
        let r = b.leaf(p.to_vec());
        b.finish(r)
    }

    pub fn root(&self) -> usize {
        self.root
    }
    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }
    pub fn n(&self) -> usize {
        self.nodes[self.root].block.size()
    }
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }
    pub fn internals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }
    pub fn max_arity(&self) -> usize {
        self.nodes.iter().map(|n| n.children().len()).max().unwrap_or(0)
    }
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 1)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            for &c in self.nodes[id].children() {
                stack.push((c, d + 1));
            }
        }
        best
    }

    /// The permutation this tree describes.
    pub fn inflate(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for id in self.leaves() {
            let node = &self.nodes[id];
            if let Content::Leaf(p) = &node.content {
                for (i, &v) in p.iter().enumerate() {
                    out[node.block.a - 1 + i] = node.block.c - 1 + v;
                }
            }
        }
        out
    }

    pub fn check_matches(&self, x: &[usize]) -> Result<()> {
        if self.inflate() != x {
            return invalid("decomposition tree does not describe this permutation");
        }
        Ok(())
    }

    /// `(skeleton | child child ...)`, leaves as bare comma lists.
    pub fn to_text(&self) -> String {
        enum Step {
            Open(usize),
            Close,
        }
        let mut s = String::new();
        let mut stack = vec![Step::Open(self.root)];
        let mut need_space = false;
        while let Some(step) = stack.pop() {
            match step {
                Step::Close => {
                    s.push(')');
                    need_space = true;
                }
                Step::Open(id) => {
                    if need_space {
                        s.push(' ');
                    }
                    let node = &self.nodes[id];
                    match &node.content {
                        Content::Leaf(p) => {
                            s.push_str(&format_list(p));
                            need_space = true;
                        }
                        Content::Internal { skeleton, children } => {
                            s.push('(');
                            s.push_str(&format_list(skeleton));
                            s.push_str(" |");
                            need_space = true;
                            stack.push(Step::Close);
                            for &c in children.iter().rev() {
                                stack.push(Step::Open(c));
                            }
                        }
                    }
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut b = TreeBuilder::new();
        // (skeleton, collected children) per open parenthesis
        let mut open: Vec<(Option<Vec<usize>>, Vec<usize>)> = Vec::new();
        let mut done = None;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let perr = |m: &str| Error::Parse(format!("tree text: {m}"));
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '(' {
                if done.is_some() {
                    return Err(perr("trailing input"));
                }
                open.push((None, Vec::new()));
                i += 1;
            } else if c == '|' {
                match open.last_mut() {
                    Some((sk @ None, ch)) if ch.len() == 1 => {
                        let id = ch.pop().unwrap();
                        match &b.contents[id] {
                            Content::Leaf(p) => *sk = Some(p.clone()),
                            _ => return Err(perr("skeleton must be a list")),
                        }
                        b.contents.pop();
                    }
                    _ => return Err(perr("unexpected `|`")),
                }
                i += 1;
            } else if c == ')' {
                let (sk, ch) = open.pop().ok_or_else(|| perr("unbalanced `)`"))?;
                let sk = sk.ok_or_else(|| perr("missing `|`"))?;
                let id = b.internal(sk, ch);
                match open.last_mut() {
                    Some((_, ch)) => ch.push(id),
                    None => done = Some(id),
                }
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == ',') {
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                let perm = crate::perm::parse_list(&tok)?;
                let id = b.leaf(perm);
                match open.last_mut() {
                    Some((_, ch)) => ch.push(id),
                    None if done.is_none() => done = Some(id),
                    None => return Err(perr("trailing input")),
                }
            } else {
                return Err(perr(&format!("unexpected character {c:?}")));
            }
        }
        if !open.is_empty() {
            return Err(perr("unbalanced `(`"));
        }
        let root = done.ok_or_else(|| perr("empty"))?;
        b.finish(root).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        // flat node list keeps deep chains within serde_json's recursion limit
        let nodes: Vec<JsonNode> = self
            .nodes
            .iter()
            .map(|n| JsonNode {
                block: n.block,
                leaf: match &n.content {
                    Content::Leaf(p) => Some(p.clone()),
                    _ => None,
                },
                skeleton: n.skeleton().map(<[usize]>::to_vec),
                children: n.children().to_vec(),
            })
            .collect();
        serde_json::json!({ "root": self.root, "nodes": nodes })
    }
}

#[derive(Serialize)]
struct JsonNode {
    block: Block,
    #[serde(skip_serializing_if = "Option::is_none")]
    leaf: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skeleton: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    children: Vec<usize>,
}

/// Substitution product `skeleton[children...]`.
pub fn inflate(skeleton: &[usize], children: &[Vec<usize>]) -> Result<Vec<usize>> {
    if skeleton.len() != children.len() {
        return invalid(format!(
            "skeleton of size {} needs as many children, got {}",
            skeleton.len(),
            children.len()
        ));
    }
    check_permutation(skeleton)?;
    for c in children {
        check_permutation(c)?;
    }
    let mut out = Vec::new();
    for (i, ch) in children.iter().enumerate() {
        let off: usize = (0..children.len())
            .filter(|&j| skeleton[j] < skeleton[i])
            .map(|j| children[j].len())
            .sum();
        out.extend(ch.iter().map(|v| v + off));
    }
    Ok(out)
}

/// For each start `i` (0-based), the end of the longest block `[i, j]` other
/// than the whole permutation.
fn longest_proper_from(p: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut out = vec![0; n];
    for i in 0..n {
        let (mut lo, mut hi) = (p[i], p[i]);
        out[i] = i;
        for j in i + 1..n {
            lo = lo.min(p[j]);
            hi = hi.max(p[j]);
            if hi - lo == j - i && j - i + 1 < n {
                out[i] = j;
            }
        }
    }
    out
}

/// Inclusion-maximal blocks of size strictly between 1 and `n`.
pub fn find_blocks(p: &[usize]) -> Vec<Block> {
    let n = p.len();
    if n < 3 {
        return Vec::new();
    }
    let far = longest_proper_from(p);
    let mut out = Vec::new();
    let mut reach: Option<usize> = None; // furthest end among earlier candidates
    for i in 0..n {
        let j = far[i];
        let covered = reach.is_some_and(|r| r >= j);
        if j > i && !covered {
            let vals = &p[i..=j];
            out.push(Block {
                a: i + 1,
                b: j + 1,
                c: *vals.iter().min().unwrap(),
                d: *vals.iter().max().unwrap(),
            });
        }
        if j > i {
            reach = Some(reach.map_or(j, |r| r.max(j)));
        }
    }
    out
}

pub fn is_simple(p: &[usize]) -> bool {
    p.len() < 3 || find_blocks(p).is_empty()
}

/// Every simple permutation of size `k`; sizes above 8 are refused.
pub fn enumerate_simple(k: usize) -> Result<Vec<Vec<usize>>> {
    if k > 8 {
        return Err(Error::ResourceLimit {
            what: format!("enumerating S_{k} is capped at size 8"),
            upper_bound: None,
        });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    Ok(all_permutations(k).into_iter().filter(|p| is_simple(p)).collect())
}

/// How a pattern splits at the top level.
enum Split {
    Leaf,
    /// `(1,2)` or `(2,1)` around the last component.
    Linear { skeleton: Vec<usize>, cut: usize },
    Prime { skeleton: Vec<usize>, cuts: Vec<usize> },
}

fn split(p: &[usize]) -> Split {
    let n = p.len();
    if n == 1 {
        return Split::Leaf;
    }
    let mut hi = 0;
    let mut lo = usize::MAX;
    let mut sum_cut = None;
    let mut skew_cut = None;
    for i in 0..n - 1 {
        hi = hi.max(p[i]);
        lo = lo.min(p[i]);
        if hi == i + 1 {
            sum_cut = Some(i + 1);
        }
        if lo == n - i {
            skew_cut = Some(i + 1);
        }
    }
    if let Some(cut) = sum_cut {
        return Split::Linear { skeleton: vec![1, 2], cut };
    }
    if let Some(cut) = skew_cut {
        return Split::Linear { skeleton: vec![2, 1], cut };
    }
    let far = longest_proper_from(p);
    let mut cuts = Vec::new();
    let mut reps = Vec::new();
    let mut i = 0;
    while i < n {
        reps.push(p[i]);
        i = far[i] + 1;
        cuts.push(i);
    }
    Split::Prime { skeleton: rank_compress(&reps), cuts }
}

/// Canonical tree: linear nodes become left-leaning chains of `(1,2)` or
/// `(2,1)`, all other internal nodes carry a simple skeleton, and every leaf
/// is a single point.
pub fn decompose(p: &[usize]) -> Result<DecompositionTree> {
    check_permutation(p)?;
    if p.is_empty() {
        return invalid("cannot decompose the empty permutation");
    }
    let mut nodes: Vec<Node> = Vec::new();
    let n = p.len();
    nodes.push(Node {
        block: Block { a: 1, b: n, c: 1, d: n },
        parent: None,
        content: Content::Leaf(Vec::new()),
    });
    let mut work = vec![0usize];
    while let Some(id) = work.pop() {
        let bl = nodes[id].block;
        let sub = rank_compress(&p[bl.a - 1..bl.b]);
        let (skeleton, cuts) = match split(&sub) {
            Split::Leaf => {
                nodes[id].content = Content::Leaf(vec![1]);
                continue;
            }
            Split::Linear { skeleton, cut } => (skeleton, vec![cut, sub.len()]),
            Split::Prime { skeleton, cuts } => (skeleton, cuts),
        };
        let mut children = Vec::with_capacity(cuts.len());
        let mut start = 0;
        for &end in &cuts {
            let vals = &sub[start..end];
            let c = bl.c - 1 + vals.iter().min().unwrap();
            let block = Block { a: bl.a + start, b: bl.a + end - 1, c, d: c + (end - start) - 1 };
            nodes.push(Node { block, parent: Some(id), content: Content::Leaf(Vec::new()) });
            children.push(nodes.len() - 1);
            start = end;
        }
        work.extend(children.iter().rev());
        nodes[id].content = Content::Internal { skeleton, children };
    }
    Ok(DecompositionTree { nodes, root: 0 })
}

fn is_linear(s: &[usize]) -> bool {
    s.windows(2).all(|w| w[1] == w[0] + 1) || s.windows(2).all(|w| w[0] == w[1] + 1)
}

/// Rebuilds the canonical tree with each linear chain merged into nodes of
/// arity at most `k`. `None` if a simple skeleton is larger than `k`.
pub fn k_decomposition(p: &[usize], k: usize) -> Result<Option<DecompositionTree>> {
    if k < 2 {
        return invalid("k-decomposability needs k >= 2");
    }
    let canon = decompose(p)?;
    if canon
        .internals()
        .any(|id| !is_linear(canon.node(id).pattern()) && canon.node(id).pattern().len() > k)
    {
        return Ok(None);
    }
    let mut b = TreeBuilder::new();
    // Linear nodes stay pending until their parent decides whether to absorb
    // them, so that ids keep the children-before-parent order.
    enum Built {
        Done(usize),
        Linear(bool, Vec<usize>),
    }
    fn materialize(b: &mut TreeBuilder, x: Built) -> usize {
        match x {
            Built::Done(id) => id,
            Built::Linear(up, ch) => {
                let len = ch.len();
                let sk: Vec<usize> = if up { (1..=len).collect() } else { (1..=len).rev().collect() };
                b.internal(sk, ch)
            }
        }
    }
    let mut built: Vec<Option<Built>> = (0..canon.nodes().len()).map(|_| None).collect();
    let mut stack = vec![(canon.root(), false)];
    while let Some((id, expanded)) = stack.pop() {
        let node = canon.node(id);
        if node.is_leaf() {
            built[id] = Some(Built::Done(b.leaf(node.pattern().to_vec())));
            continue;
        }
        if !expanded {
            stack.push((id, true));
            for &c in node.children().iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let sk = node.pattern();
        let kids: Vec<Built> = node.children().iter().map(|&c| built[c].take().unwrap()).collect();
        let res = if sk.len() == 2 {
            let up = sk[0] < sk[1];
            let mut it = kids.into_iter();
            let first = it.next().unwrap();
            let second = it.next().unwrap();
            let mut ch = match first {
                Built::Linear(u, ch) if u == up && ch.len() < k => ch,
                other => vec![materialize(&mut b, other)],
            };
            ch.push(materialize(&mut b, second));
            Built::Linear(up, ch)
        } else {
            let ch: Vec<usize> = kids.into_iter().map(|x| materialize(&mut b, x)).collect();
            Built::Done(b.internal(sk.to_vec(), ch))
        };
        built[id] = Some(res);
    }
    let root = materialize(&mut b, built[canon.root()].take().unwrap());
    Ok(Some(b.finish(root)?))
}

pub fn is_k_decomposable(p: &[usize], k: usize) -> Result<bool> {
    Ok(k_decomposition(p, k)?.is_some())
}
