//! Strand diagrams as stack machines: construction from tree pairs,
//! concatenation, confluent reduction, annular closure with a maintained
//! cutting-path sequence (which records the radial order of loops), the
//! canonical conjugacy invariant, and dynamics readout from directed loops.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, TreePair};
use crate::word::{Letter, Word};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexKind {
    Source,
    Sink,
    Split,
    Merge,
}

#[derive(Clone, Copy, Debug)]
struct Vertex {
    kind: VertexKind,
    ins: [Option<EdgeId>; 2],
    outs: [Option<EdgeId>; 2],
    alive: bool,
}

impl Vertex {
    fn new(kind: VertexKind) -> Self {
        Vertex { kind, ins: [None, None], outs: [None, None], alive: true }
    }
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    src: (VertexId, u8),
    dst: (VertexId, u8),
    alive: bool,
}

/// A strand diagram: a plane DAG of splits and merges with one source and
/// one sink (open form), or the annular closure of one (no source/sink).
#[derive(Clone, Debug)]
pub struct StrandDiagram {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    source: Option<VertexId>,
    sink: Option<VertexId>,
}

impl StrandDiagram {
    fn add_vertex(&mut self, kind: VertexKind) -> VertexId {
        self.vertices.push(Vertex::new(kind));
        self.vertices.len() - 1
    }

    fn add_edge(&mut self, src: (VertexId, u8), dst: (VertexId, u8)) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge { src, dst, alive: true });
        self.vertices[src.0].outs[src.1 as usize] = Some(id);
        self.vertices[dst.0].ins[dst.1 as usize] = Some(id);
        id
    }

    pub fn live_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.alive).count()
    }

    pub fn live_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.alive).count()
    }

    /// Identity diagram: a single strand from source to sink.
    pub fn identity() -> Self {
        let mut d =
            StrandDiagram { vertices: Vec::new(), edges: Vec::new(), source: None, sink: None };
        let s = d.add_vertex(VertexKind::Source);
        let t = d.add_vertex(VertexKind::Sink);
        d.add_edge((s, 0), (t, 0));
        d.source = Some(s);
        d.sink = Some(t);
        d
    }

    /// Gluing a tree pair: the domain tree as splits from the source, the
    /// range tree upside down as merges into the sink, joined leaf to leaf.
    pub fn from_tree_pair(t: &TreePair) -> Self {
        let mut d =
            StrandDiagram { vertices: Vec::new(), edges: Vec::new(), source: None, sink: None };
        let src = d.add_vertex(VertexKind::Source);
        let snk = d.add_vertex(VertexKind::Sink);
        d.source = Some(src);
        d.sink = Some(snk);
        fn build_splits(
            d: &mut StrandDiagram,
            t: &BinaryTree,
            from: (VertexId, u8),
            leaves: &mut Vec<(VertexId, u8)>,
        ) {
            match t {
                BinaryTree::Leaf => leaves.push(from),
                BinaryTree::Caret(l, r) => {
                    let v = d.add_vertex(VertexKind::Split);
                    d.add_edge(from, (v, 0));
                    build_splits(d, l, (v, 0), leaves);
                    build_splits(d, r, (v, 1), leaves);
                }
            }
        }
        fn build_merges(
            d: &mut StrandDiagram,
            t: &BinaryTree,
            to: (VertexId, u8),
            leaves: &mut Vec<(VertexId, u8)>,
        ) {
            match t {
                BinaryTree::Leaf => leaves.push(to),
                BinaryTree::Caret(l, r) => {
                    let v = d.add_vertex(VertexKind::Merge);
                    d.add_edge((v, 0), to);
                    build_merges(d, l, (v, 0), leaves);
                    build_merges(d, r, (v, 1), leaves);
                }
            }
        }
        let mut top = Vec::new();
        let mut bot = Vec::new();
        build_splits(&mut d, &t.domain, (src, 0), &mut top);
        build_merges(&mut d, &t.range, (snk, 0), &mut bot);
        debug_assert_eq!(top.len(), bot.len());
        for (a, b) in top.into_iter().zip(bot) {
            d.add_edge(a, b);
        }
        d
    }

    /// Diagram of a single letter.
    pub fn from_letter(l: Letter) -> Self {
        let g = crate::plmap::PLMap::generator(l.index);
        let g = if l.sign < 0 { g.inverse() } else { g };
        let t = crate::tree::tree_pair_from_plmap(&g).expect("generators are rearrangements");
        Self::from_tree_pair(&t)
    }

    /// Diagram of a word (concatenation of letter diagrams, unreduced).
    pub fn from_word(w: &Word) -> Self {
        let mut acc = StrandDiagram::identity();
        for &l in w.letters() {
            acc = concatenate(&acc, &StrandDiagram::from_letter(l));
        }
        acc
    }

    /// The stack-machine evaluation: feed the bits of `prefix` into the
    /// source; splits consume a leading bit, merges prepend one.
    pub fn evaluate_bits(&self, prefix: &[bool]) -> Result<Vec<bool>> {
        let Some(src) = self.source else {
            return Err(Error::Precondition("evaluate_bits needs an open diagram".into()));
        };
        let mut bits: VecDeque<bool> = prefix.iter().copied().collect();
        let mut edge = self.vertices[src].outs[0].expect("source edge");
        loop {
            let (v, port) = self.edges[edge].dst;
            match self.vertices[v].kind {
                VertexKind::Sink => return Ok(bits.into_iter().collect()),
                VertexKind::Split => {
                    let Some(b) = bits.pop_front() else {
                        return Err(Error::Precondition("NeedMoreBits".into()));
                    };
                    edge = self.vertices[v].outs[b as usize].expect("split out");
                }
                VertexKind::Merge => {
                    bits.push_front(port == 1);
                    edge = self.vertices[v].outs[0].expect("merge out");
                }
                VertexKind::Source => unreachable!("edge into a source"),
            }
        }
    }

    /// DOT export with split/merge orientation encoded via port labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph strand {\n  rankdir=TB;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.alive {
                continue;
            }
            let (shape, label) = match v.kind {
                VertexKind::Source => ("circle", "src"),
                VertexKind::Sink => ("circle", "snk"),
                VertexKind::Split => ("triangle", "S"),
                VertexKind::Merge => ("invtriangle", "M"),
            };
            let _ = writeln!(s, "  v{i} [shape={shape}, label=\"{label}{i}\"];");
        }
        for e in self.edges.iter().filter(|e| e.alive) {
            let _ = writeln!(
                s,
                "  v{} -> v{} [taillabel=\"{}\", headlabel=\"{}\"];",
                e.src.0, e.dst.0, e.src.1, e.dst.1
            );
        }
        s.push_str("}\n");
        s
    }

    /// JSON export: vertex list plus ordered adjacency.
    pub fn to_json(&self) -> serde_json::Value {
        let verts: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.alive)
            .map(|(i, v)| {
                serde_json::json!({
                    "id": i,
                    "kind": format!("{:?}", v.kind).to_lowercase(),
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .filter(|e| e.alive)
            .map(|e| {
                serde_json::json!({
                    "from": [e.src.0, e.src.1],
                    "to": [e.dst.0, e.dst.1],
                })
            })
            .collect();
        serde_json::json!({ "vertices": verts, "edges": edges })
    }
}

/// Concatenation realizing the group product `a * b = a ∘ b`: `b`'s diagram
/// is stacked on top (the signal passes `b` first).
pub fn concatenate(a: &StrandDiagram, b: &StrandDiagram) -> StrandDiagram {
    let mut d = StrandDiagram { vertices: Vec::new(), edges: Vec::new(), source: None, sink: None };
    let off_v = b.vertices.len();
    let off_e = b.edges.len();
    d.vertices.extend(b.vertices.iter().copied());
    d.edges.extend(b.edges.iter().copied());
    d.vertices.extend(a.vertices.iter().map(|v| {
        let mut v = *v;
        for slot in v.ins.iter_mut().chain(v.outs.iter_mut()) {
            if let Some(e) = slot {
                *e += off_e;
            }
        }
        v
    }));
    d.edges.extend(a.edges.iter().map(|e| {
        let mut e = *e;
        e.src.0 += off_v;
        e.dst.0 += off_v;
        e
    }));
    // splice b.sink with a.source
    let bs = b.sink.expect("open diagram");
    let asrc = a.source.expect("open diagram") + off_v;
    let e_top = d.vertices[bs].ins[0].expect("sink in-edge");
    let e_bot = d.vertices[asrc].outs[0].expect("source out-edge");
    let dst = d.edges[e_bot].dst;
    d.edges[e_top].dst = dst;
    d.vertices[dst.0].ins[dst.1 as usize] = Some(e_top);
    d.edges[e_bot].alive = false;
    d.vertices[bs].alive = false;
    d.vertices[asrc].alive = false;
    d.source = Some(b.source.expect("open"));
    d.sink = Some(a.sink.expect("open") + off_v);
    d
}

/// An entry of the cutting-path sequence.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CutItem {
    Edge(EdgeId),
    FreeLoop(usize),
}

/// The annular closure of a (1,1)-strand diagram, with the cutting-path
/// crossing sequence maintained through reduction (outermost first).
#[derive(Clone, Debug)]
pub struct AnnularDiagram {
    pub graph: StrandDiagram,
    cut_items: Vec<CutItem>,
    cut_prev: Vec<usize>,
    cut_next: Vec<usize>,
    cut_dead: Vec<bool>,
    edge_positions: HashMap<EdgeId, Vec<usize>>,
    free_loops: usize,
}

const CUT_NIL: usize = usize::MAX;

impl AnnularDiagram {
    fn new(graph: StrandDiagram) -> Self {
        AnnularDiagram {
            graph,
            cut_items: Vec::new(),
            cut_prev: Vec::new(),
            cut_next: Vec::new(),
            cut_dead: Vec::new(),
            edge_positions: HashMap::new(),
            free_loops: 0,
        }
    }

    /// Append an item at the end of the cut sequence (init only).
    fn cut_push(&mut self, item: CutItem) -> usize {
        let pos = self.cut_items.len();
        self.cut_items.push(item);
        self.cut_dead.push(false);
        let mut last = CUT_NIL;
        for i in (0..pos).rev() {
            if !self.cut_dead[i] {
                last = i;
                break;
            }
        }
        self.cut_prev.push(last);
        self.cut_next.push(CUT_NIL);
        if last != CUT_NIL {
            self.cut_next[last] = pos;
        }
        if let CutItem::Edge(e) = item {
            self.edge_positions.entry(e).or_default().push(pos);
        }
        pos
    }

    fn cut_replace(&mut self, pos: usize, item: CutItem) {
        debug_assert!(!self.cut_dead[pos]);
        self.cut_items[pos] = item;
        if let CutItem::Edge(e) = item {
            self.edge_positions.entry(e).or_default().push(pos);
        }
    }

    fn cut_insert_after(&mut self, pos: usize, item: CutItem) -> usize {
        let np = self.cut_items.len();
        self.cut_items.push(item);
        self.cut_dead.push(false);
        let nxt = self.cut_next[pos];
        self.cut_prev.push(pos);
        self.cut_next.push(nxt);
        self.cut_next[pos] = np;
        if nxt != CUT_NIL {
            self.cut_prev[nxt] = np;
        }
        if let CutItem::Edge(e) = item {
            self.edge_positions.entry(e).or_default().push(np);
        }
        np
    }

    fn cut_remove(&mut self, pos: usize) {
        debug_assert!(!self.cut_dead[pos]);
        self.cut_dead[pos] = true;
        let (p, n) = (self.cut_prev[pos], self.cut_next[pos]);
        if p != CUT_NIL {
            self.cut_next[p] = n;
        }
        if n != CUT_NIL {
            self.cut_prev[n] = p;
        }
    }

    /// Current positions of crossings of `edge` (staleness filtered).
    fn positions_of(&mut self, edge: EdgeId) -> Vec<usize> {
        let mut out = Vec::new();
        let dead = &self.cut_dead;
        let items = &self.cut_items;
        if let Some(v) = self.edge_positions.get_mut(&edge) {
            v.retain(|&p| !dead[p] && items[p] == CutItem::Edge(edge));
            out.extend_from_slice(v);
        }
        out
    }

    /// The live cut sequence, outermost to innermost.
    pub fn cut_sequence(&self) -> Vec<CutItem> {
        let mut out = Vec::new();
        let mut head = CUT_NIL;
        for i in 0..self.cut_items.len() {
            if !self.cut_dead[i] && self.cut_prev[i] == CUT_NIL {
                head = i;
                break;
            }
        }
        let mut cur = head;
        while cur != CUT_NIL {
            out.push(self.cut_items[cur]);
            cur = self.cut_next[cur];
        }
        out
    }

    pub fn free_loop_count(&self) -> usize {
        self.cut_sequence()
            .iter()
            .filter(|i| matches!(i, CutItem::FreeLoop(_)))
            .count()
    }

    /// Attempt a Type I or Type II reduction involving `v`.
    fn try_reduce_at(&mut self, v: VertexId) -> Option<Vec<VertexId>> {
        let vert = self.graph.vertices[v];
        match vert.kind {
            VertexKind::Split => {
                let e0 = vert.outs[0]?;
                let e1 = vert.outs[1]?;
                let d0 = self.graph.edges[e0].dst;
                let d1 = self.graph.edges[e1].dst;
                if d0.0 == d1.0
                    && d0.0 != v
                    && self.graph.vertices[d0.0].kind == VertexKind::Merge
                {
                    debug_assert!(
                        d0.1 == 0 && d1.1 == 1,
                        "twisted Type I pattern cannot occur in plane diagrams"
                    );
                    let m = d0.0;
                    let e_in = vert.ins[0].expect("split in");
                    let e_out = self.graph.vertices[m].outs[0].expect("merge out");
                    self.collapse_bigon(e0, e1);
                    self.graph.vertices[v].alive = false;
                    self.graph.vertices[m].alive = false;
                    self.kill_edge(e0);
                    self.kill_edge(e1);
                    let items = self.splice(vec![(e_in, e_out)]);
                    self.rewrite_crossings(&[(e_in, items[0]), (e_out, items[0])]);
                    let mut touched = Vec::new();
                    if let CutItem::Edge(ne) = items[0] {
                        touched.push(self.graph.edges[ne].src.0);
                        touched.push(self.graph.edges[ne].dst.0);
                    }
                    Some(touched)
                } else {
                    None
                }
            }
            VertexKind::Merge => {
                let e_mid = vert.outs[0]?;
                let (s, _) = self.graph.edges[e_mid].dst;
                if self.graph.vertices[s].kind != VertexKind::Split || s == v {
                    return None;
                }
                let e_il = vert.ins[0].expect("merge inL");
                let e_ir = vert.ins[1].expect("merge inR");
                let e_ol = self.graph.vertices[s].outs[0].expect("split outL");
                let e_or = self.graph.vertices[s].outs[1].expect("split outR");
                let mid_positions = self.positions_of(e_mid);
                self.graph.vertices[v].alive = false;
                self.graph.vertices[s].alive = false;
                self.kill_edge(e_mid);
                let items = self.splice(vec![(e_il, e_ol), (e_ir, e_or)]);
                for pos in mid_positions {
                    self.cut_replace(pos, items[0]);
                    self.cut_insert_after(pos, items[1]);
                }
                self.rewrite_crossings(&[
                    (e_il, items[0]),
                    (e_ol, items[0]),
                    (e_ir, items[1]),
                    (e_or, items[1]),
                ]);
                let mut touched = Vec::new();
                for item in items {
                    if let CutItem::Edge(ne) = item {
                        touched.push(self.graph.edges[ne].src.0);
                        touched.push(self.graph.edges[ne].dst.0);
                    }
                }
                Some(touched)
            }
            _ => None,
        }
    }

    /// Resolve splice pairs `(a, b)` (the flow of `a` continues into `b`)
    /// after vertex deletion: chains become single new edges, cycles become
    /// free loops. Returns one item per input pair.
    fn splice(&mut self, pairs: Vec<(EdgeId, EdgeId)>) -> Vec<CutItem> {
        let mut nxt: HashMap<EdgeId, EdgeId> = HashMap::new();
        let mut is_val: HashMap<EdgeId, ()> = HashMap::new();
        for &(a, b) in &pairs {
            nxt.insert(a, b);
            is_val.insert(b, ());
        }
        let mut result: HashMap<EdgeId, CutItem> = HashMap::new();
        for &(start, _) in &pairs {
            if is_val.contains_key(&start) || result.contains_key(&start) {
                continue;
            }
            let mut chain = vec![start];
            let mut cur = start;
            while let Some(&n) = nxt.get(&cur) {
                chain.push(n);
                cur = n;
            }
            let src = self.graph.edges[start].src;
            let dst = self.graph.edges[cur].dst;
            for &e in &chain {
                self.kill_edge(e);
            }
            let ne = self.graph.add_edge(src, dst);
            for &e in &chain {
                result.insert(e, CutItem::Edge(ne));
            }
        }
        for &(a, _) in &pairs {
            if result.contains_key(&a) {
                continue;
            }
            let id = self.free_loops;
            self.free_loops += 1;
            let mut cur = a;
            loop {
                result.insert(cur, CutItem::FreeLoop(id));
                self.kill_edge(cur);
                cur = nxt[&cur];
                if cur == a {
                    break;
                }
            }
        }
        pairs.iter().map(|&(a, _)| result[&a]).collect()
    }

    fn kill_edge(&mut self, e: EdgeId) {
        if !self.graph.edges[e].alive {
            return;
        }
        self.graph.edges[e].alive = false;
        let Edge { src, dst, .. } = self.graph.edges[e];
        if self.graph.vertices[src.0].outs[src.1 as usize] == Some(e) {
            self.graph.vertices[src.0].outs[src.1 as usize] = None;
        }
        if self.graph.vertices[dst.0].ins[dst.1 as usize] == Some(e) {
            self.graph.vertices[dst.0].ins[dst.1 as usize] = None;
        }
    }

    /// Rewrite cut crossings of dead edges to their successor items.
    fn rewrite_crossings(&mut self, subs: &[(EdgeId, CutItem)]) {
        for &(old, item) in subs {
            for pos in self.positions_of(old) {
                self.cut_replace(pos, item);
            }
        }
    }

    /// Type I bigon: crossings of the two parallel edges pair up adjacently
    /// in the cut; each pair is a single crossing of the spliced strand.
    fn collapse_bigon(&mut self, e0: EdgeId, e1: EdgeId) {
        let p0 = self.positions_of(e0);
        for pos in p0 {
            if self.cut_dead[pos] {
                continue;
            }
            let nxt = self.cut_next[pos];
            let prv = self.cut_prev[pos];
            if nxt != CUT_NIL && !self.cut_dead[nxt] && self.cut_items[nxt] == CutItem::Edge(e1) {
                self.cut_remove(nxt);
            } else if prv != CUT_NIL
                && !self.cut_dead[prv]
                && self.cut_items[prv] == CutItem::Edge(e1)
            {
                self.cut_remove(prv);
            } else {
                debug_assert!(false, "bigon crossings must be adjacent");
            }
        }
        // remaining e1 entries (if the path crossed e1 without e0) become
        // crossings of the spliced strand, tracked via e0's id
        let p1 = self.positions_of(e1);
        for pos in p1 {
            self.cut_replace(pos, CutItem::Edge(e0));
        }
    }

    /// Type III: adjacent concentric free loops with nothing between merge.
    fn merge_adjacent_free_loops(&mut self) {
        loop {
            let positions: Vec<usize> = {
                let mut v = Vec::new();
                let mut head = CUT_NIL;
                for i in 0..self.cut_items.len() {
                    if !self.cut_dead[i] && self.cut_prev[i] == CUT_NIL {
                        head = i;
                        break;
                    }
                }
                let mut cur = head;
                while cur != CUT_NIL {
                    v.push(cur);
                    cur = self.cut_next[cur];
                }
                v
            };
            let mut merged = false;
            for w in positions.windows(2) {
                if let (CutItem::FreeLoop(_), CutItem::FreeLoop(_)) =
                    (self.cut_items[w[0]], self.cut_items[w[1]])
                {
                    self.cut_remove(w[1]);
                    merged = true;
                    break;
                }
            }
            if !merged {
                return;
            }
        }
    }
}

/// Close a (1,1)-strand diagram into an annular diagram and fully reduce it
/// (Types I, II, and III), maintaining the cutting sequence.
pub fn close_and_reduce(d: &StrandDiagram) -> AnnularDiagram {
    let mut graph = d.clone();
    let src = graph.source.take().expect("open diagram");
    let snk = graph.sink.take().expect("open diagram");
    let e_in = graph.vertices[snk].ins[0].expect("sink edge");
    let e_out = graph.vertices[src].outs[0].expect("source edge");
    graph.vertices[src].alive = false;
    graph.vertices[snk].alive = false;
    let mut ann = AnnularDiagram::new(graph);
    let items = if e_in == e_out {
        // the identity strand closes straight into a free loop
        ann.splice(vec![(e_in, e_in)])
    } else {
        ann.splice(vec![(e_in, e_out)])
    };
    debug_assert_eq!(items.len(), 1);
    ann.cut_push(items[0]);
    let verts: Vec<VertexId> = (0..ann.graph.vertices.len())
        .filter(|&v| ann.graph.vertices[v].alive)
        .collect();
    let mut queue: VecDeque<VertexId> = verts.into();
    while let Some(v) = queue.pop_front() {
        if !ann.graph.vertices[v].alive {
            continue;
        }
        if let Some(touched) = ann.try_reduce_at(v) {
            for t in touched {
                if ann.graph.vertices[t].alive {
                    queue.push_back(t);
                }
            }
        }
    }
    ann.merge_adjacent_free_loops();
    ann
}

/// Reduce an open strand diagram (Types I and II; no cut bookkeeping).
pub fn reduce_strand(d: &StrandDiagram) -> StrandDiagram {
    let mut ann = AnnularDiagram::new(d.clone());
    let verts: Vec<VertexId> = (0..ann.graph.vertices.len())
        .filter(|&v| ann.graph.vertices[v].alive)
        .collect();
    let mut queue: VecDeque<VertexId> = verts.into();
    while let Some(v) = queue.pop_front() {
        if !ann.graph.vertices[v].alive {
            continue;
        }
        if let Some(touched) = ann.try_reduce_at(v) {
            for t in touched {
                if ann.graph.vertices[t].alive {
                    queue.push_back(t);
                }
            }
        }
    }
    debug_assert_eq!(ann.free_loops, 0, "open reduction cannot shed free loops");
    let mut g = ann.graph;
    g.source = d.source;
    g.sink = d.sink;
    g
}

/// A directed loop of a reduced annular diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopKind {
    Free,
    Split,
    Merge,
}

#[derive(Clone, Debug)]
pub struct LoopInfo {
    pub kind: LoopKind,
    /// number of vertices on the loop (0 for free loops)
    pub size: usize,
    /// tail bits of the corresponding fixed point (empty for free loops)
    pub tail: Vec<bool>,
    /// index of the component this loop belongs to
    pub component: usize,
    /// an edge on the cycle, None for free loops
    pub anchor: Option<EdgeId>,
}

/// Loops in radial order (outermost first) with component grouping.
pub struct AnnularStructure {
    pub loops: Vec<LoopInfo>,
    /// per component: indices into `loops`, outermost first
    pub components: Vec<Vec<usize>>,
}

pub fn analyze(ann: &AnnularDiagram) -> AnnularStructure {
    let g = &ann.graph;
    let cyc = cycle_edges(g);
    let comp = undirected_components(g);
    let seq = ann.cut_sequence();
    let mut loops: Vec<LoopInfo> = Vec::new();
    let mut comp_keys: Vec<Option<usize>> = Vec::new(); // graph component or None (free)
    for item in &seq {
        match item {
            CutItem::FreeLoop(_) => {
                loops.push(LoopInfo {
                    kind: LoopKind::Free,
                    size: 0,
                    tail: Vec::new(),
                    component: 0,
                    anchor: None,
                });
                comp_keys.push(None);
            }
            CutItem::Edge(e) => {
                if !cyc.contains_key(e) {
                    continue;
                }
                let (info, gcomp) = loop_info_from_anchor(g, *e, &cyc, &comp);
                loops.push(info);
                comp_keys.push(Some(gcomp));
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut comp_map: HashMap<usize, usize> = HashMap::new();
    for (i, key) in comp_keys.iter().enumerate() {
        let idx = match key {
            None => {
                components.push(Vec::new());
                components.len() - 1
            }
            Some(gc) => *comp_map.entry(*gc).or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            }),
        };
        loops[i].component = idx;
        components[idx].push(i);
    }
    AnnularStructure { loops, components }
}

/// Map from each edge lying on a directed cycle to a cycle id.
fn cycle_edges(g: &StrandDiagram) -> HashMap<EdgeId, usize> {
    let n = g.vertices.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<VertexId> = Vec::new();
    let mut sccs: Vec<Vec<VertexId>> = Vec::new();
    let mut counter = 0usize;
    for root in 0..n {
        if !g.vertices[root].alive || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(VertexId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut slot)) = call.last_mut() {
            let outs = g.vertices[v].outs;
            if *slot < 2 {
                let s = *slot;
                *slot += 1;
                if let Some(e) = outs[s] {
                    let w = g.edges[e].dst.0;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
            } else {
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if scc.len() > 1 || has_self_loop(g, scc[0]) {
                        sccs.push(scc);
                    }
                }
            }
        }
    }
    let mut out = HashMap::new();
    for (id, scc) in sccs.iter().enumerate() {
        let inside: HashMap<VertexId, ()> = scc.iter().map(|&v| (v, ())).collect();
        for &v in scc {
            for e in g.vertices[v].outs.into_iter().flatten() {
                if inside.contains_key(&g.edges[e].dst.0) {
                    out.insert(e, id);
                }
            }
        }
    }
    out
}

fn has_self_loop(g: &StrandDiagram, v: VertexId) -> bool {
    g.vertices[v]
        .outs
        .into_iter()
        .flatten()
        .any(|e| g.edges[e].dst.0 == v)
}

fn undirected_components(g: &StrandDiagram) -> Vec<usize> {
    let n = g.vertices.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if !g.vertices[v].alive || comp[v] != usize::MAX {
            continue;
        }
        let mut stack = vec![v];
        comp[v] = next;
        while let Some(u) = stack.pop() {
            let vert = g.vertices[u];
            for e in vert.outs.into_iter().flatten().chain(vert.ins.into_iter().flatten()) {
                let edge = g.edges[e];
                for w in [edge.src.0, edge.dst.0] {
                    if g.vertices[w].alive && comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

/// Walk the cycle through `anchor`: kind, size, tail bits.
fn loop_info_from_anchor(
    g: &StrandDiagram,
    anchor: EdgeId,
    cyc: &HashMap<EdgeId, usize>,
    comp: &[usize],
) -> (LoopInfo, usize) {
    let my_cycle = cyc[&anchor];
    let mut verts = Vec::new();
    let mut bits = Vec::new();
    let mut e = anchor;
    loop {
        let (v, in_port) = g.edges[e].dst;
        verts.push(v);
        match g.vertices[v].kind {
            VertexKind::Merge => {
                bits.push(in_port == 1);
                e = g.vertices[v].outs[0].expect("merge out");
            }
            VertexKind::Split => {
                let mut chosen = None;
                for (i, oe) in g.vertices[v].outs.into_iter().enumerate() {
                    if let Some(oe) = oe {
                        if cyc.get(&oe) == Some(&my_cycle) {
                            chosen = Some((i as u8, oe));
                        }
                    }
                }
                let (port, oe) = chosen.expect("cycle continues");
                bits.push(port == 1);
                e = oe;
            }
            _ => unreachable!("annular diagrams have only splits and merges"),
        }
        if e == anchor {
            break;
        }
    }
    let kind = match g.vertices[verts[0]].kind {
        VertexKind::Merge => LoopKind::Merge,
        VertexKind::Split => LoopKind::Split,
        _ => unreachable!(),
    };
    debug_assert!(
        verts.iter().all(|&v| g.vertices[v].kind == g.vertices[verts[0]].kind),
        "reduced loops are homogeneous"
    );
    let tail = match kind {
        // merges prepend bits while traveling forward: the fixed-point tail
        // reads in reverse cycle order; splits consume in forward order
        LoopKind::Merge => bits.iter().rev().copied().collect(),
        _ => bits.clone(),
    };
    let gcomp = comp[verts[0]];
    (
        LoopInfo { kind, size: verts.len(), tail, component: 0, anchor: Some(anchor) },
        gcomp,
    )
}

/// Canonical form: ordered component encodings (outermost first), each the
/// lexicographically minimal rotation of a deterministic port-respecting
/// serialization.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct CanonicalForm(pub Vec<Vec<u8>>);

pub fn canonical_form(ann: &AnnularDiagram) -> CanonicalForm {
    let st = analyze(ann);
    let g = &ann.graph;
    let cyc = cycle_edges(g);
    let mut parts = Vec::new();
    for comp in &st.components {
        if comp.len() == 1 && st.loops[comp[0]].kind == LoopKind::Free {
            parts.push(b"O".to_vec());
            continue;
        }
        let outer = &st.loops[comp[0]];
        let anchor = outer.anchor.expect("ring loop");
        let my_cycle = cyc[&anchor];
        let mut starts = Vec::new();
        let mut e = anchor;
        loop {
            starts.push(e);
            let (v, _) = g.edges[e].dst;
            e = match g.vertices[v].kind {
                VertexKind::Merge => g.vertices[v].outs[0].unwrap(),
                VertexKind::Split => {
                    let mut chosen = None;
                    for oe in g.vertices[v].outs.into_iter().flatten() {
                        if cyc.get(&oe) == Some(&my_cycle) {
                            chosen = Some(oe);
                        }
                    }
                    chosen.unwrap()
                }
                _ => unreachable!(),
            };
            if e == anchor {
                break;
            }
        }
        let enc = starts
            .iter()
            .map(|&s| serialize_component(g, s))
            .min()
            .expect("nonempty rotations");
        parts.push(enc);
    }
    CanonicalForm(parts)
}

/// Deterministic serialization of the component containing `start`,
/// breadth-first over edges with port-ordered expansion.
fn serialize_component(g: &StrandDiagram, start: EdgeId) -> Vec<u8> {
    let mut edge_id: HashMap<EdgeId, u32> = HashMap::new();
    let mut vert_seen: HashMap<VertexId, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    edge_id.insert(start, 0);
    queue.push_back(start);
    let mut next_edge = 1u32;
    let mut next_vert = 0u32;
    while let Some(e) = queue.pop_front() {
        for (v, tag) in [(g.edges[e].src.0, b'S'), (g.edges[e].dst.0, b'D')] {
            out.push(tag);
            if let Some(&id) = vert_seen.get(&v) {
                out.push(b'v');
                out.extend_from_slice(&id.to_le_bytes());
                continue;
            }
            let id = next_vert;
            next_vert += 1;
            vert_seen.insert(v, id);
            let vert = &g.vertices[v];
            out.push(match vert.kind {
                VertexKind::Split => b's',
                VertexKind::Merge => b'm',
                _ => b'?',
            });
            for slot in vert.ins.into_iter().chain(vert.outs.into_iter()) {
                match slot {
                    None => out.push(b'.'),
                    Some(oe) => {
                        let eid = *edge_id.entry(oe).or_insert_with(|| {
                            let id = next_edge;
                            next_edge += 1;
                            queue.push_back(oe);
                            id
                        });
                        out.push(b'e');
                        out.extend_from_slice(&eid.to_le_bytes());
                    }
                }
            }
        }
    }
    out
}

/// Conjugacy test via canonical forms of the closed reduced diagrams.
pub fn conjugate_strand(u: &Word, v: &Word) -> bool {
    let du = close_and_reduce(&StrandDiagram::from_word(u));
    let dv = close_and_reduce(&StrandDiagram::from_word(v));
    canonical_form(&du) == canonical_form(&dv)
}

/// Fixed-point readout from a reduced annular diagram, outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointKind {
    Interval,
    Attractor,
    Repeller,
}

#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub kind: FixedPointKind,
    /// slope exponent: +n for repellers, -n for attractors, 0 for intervals
    pub slope_exp: i64,
    pub tail: Vec<bool>,
}

pub fn fixed_point_report(ann: &AnnularDiagram) -> Vec<FixedPointReport> {
    let st = analyze(ann);
    st.loops
        .iter()
        .map(|l| match l.kind {
            LoopKind::Free => FixedPointReport {
                kind: FixedPointKind::Interval,
                slope_exp: 0,
                tail: Vec::new(),
            },
            LoopKind::Merge => FixedPointReport {
                kind: FixedPointKind::Attractor,
                slope_exp: -(l.size as i64),
                tail: l.tail.clone(),
            },
            LoopKind::Split => FixedPointReport {
                kind: FixedPointKind::Repeller,
                slope_exp: l.size as i64,
                tail: l.tail.clone(),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::word_to_plmap;
    use crate::tree::tree_pair_from_plmap;

    fn word(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn identity_closes_to_single_free_loop() {
        let ann = close_and_reduce(&StrandDiagram::identity());
        assert_eq!(ann.free_loop_count(), 1);
        assert_eq!(ann.graph.live_vertex_count(), 0);
        let cf = canonical_form(&ann);
        assert_eq!(cf.0, vec![b"O".to_vec()]);
    }

    #[test]
    fn x0_closure_structure() {
        let ann = close_and_reduce(&StrandDiagram::from_word(&word("x0")));
        let rep = fixed_point_report(&ann);
        assert_eq!(rep.len(), 2);
        assert_eq!(rep[0].kind, FixedPointKind::Attractor);
        assert_eq!(rep[0].slope_exp, -1);
        assert_eq!(rep[0].tail, vec![false]);
        assert_eq!(rep[1].kind, FixedPointKind::Repeller);
        assert_eq!(rep[1].slope_exp, 1);
        assert_eq!(rep[1].tail, vec![true]);
    }

    #[test]
    fn x0_inverse_is_mirrored() {
        let a = close_and_reduce(&StrandDiagram::from_word(&word("x0")));
        let b = close_and_reduce(&StrandDiagram::from_word(&word("x0^-1")));
        assert_ne!(canonical_form(&a), canonical_form(&b));
        let rep = fixed_point_report(&b);
        assert_eq!(rep[0].kind, FixedPointKind::Repeller);
        assert_eq!(rep[1].kind, FixedPointKind::Attractor);
    }

    #[test]
    fn conjugates_match() {
        assert!(conjugate_strand(&word("x1"), &word("x2")));
        assert!(!conjugate_strand(&word("x0"), &word("x1")));
        assert!(!conjugate_strand(&word("x0"), &word("x0^-1")));
        let w = word("x0 x1^-1 x2");
        let g = word("x1 x0");
        let conj = g.inverse().concat(&w).concat(&g);
        assert!(conjugate_strand(&w, &conj));
    }

    #[test]
    fn x1_closure_has_free_loop_outermost() {
        let ann = close_and_reduce(&StrandDiagram::from_word(&word("x1")));
        let rep = fixed_point_report(&ann);
        assert_eq!(rep.len(), 3);
        assert_eq!(rep[0].kind, FixedPointKind::Interval);
        assert_eq!(rep[1].kind, FixedPointKind::Attractor);
        assert_eq!(rep[2].kind, FixedPointKind::Repeller);
    }

    #[test]
    fn evaluate_bits_x0_prefix_rule() {
        // x0 maps .0 b2 b3... to .00 b2 b3...
        let d = reduce_strand(&StrandDiagram::from_word(&word("x0")));
        let out = d.evaluate_bits(&[false, true, true]).unwrap();
        assert_eq!(out, vec![false, false, true, true]);
        assert!(d.evaluate_bits(&[]).is_err());
    }

    #[test]
    fn evaluate_bits_matches_plmap() {
        for s in ["x0", "x1", "x0^-1", "x0 x1", "x2 x1^-1"] {
            let w = word(s);
            let d = StrandDiagram::from_word(&w);
            let f = word_to_plmap(&w);
            let bits = vec![true, false, true, true, false, true];
            if let Ok(out) = d.evaluate_bits(&bits) {
                // t = .101101 exactly
                let t = crate::dyadic::Dyadic::ratio(45, 6);
                let ft = f.eval_dyadic(&t).unwrap();
                let expect = ft.frac_bits(out.len());
                assert_eq!(out, expect, "word {s}");
            }
        }
    }

    #[test]
    fn reduced_diagram_matches_tree_pair_size() {
        let w = word("x0 x1 x0^-1");
        let d = reduce_strand(&StrandDiagram::from_word(&w));
        let t = tree_pair_from_plmap(&word_to_plmap(&w)).unwrap();
        let splits = (0..d.vertices.len())
            .filter(|&v| d.vertices[v].alive && d.vertices[v].kind == VertexKind::Split)
            .count();
        let merges = (0..d.vertices.len())
            .filter(|&v| d.vertices[v].alive && d.vertices[v].kind == VertexKind::Merge)
            .count();
        assert_eq!(splits, t.domain.carets());
        assert_eq!(merges, t.range.carets());
    }

    #[test]
    fn concatenate_with_inverse_reduces_to_identity() {
        let w = word("x0 x2 x1^-1");
        let d = StrandDiagram::from_word(&w);
        let di = StrandDiagram::from_word(&w.inverse());
        let prod = reduce_strand(&concatenate(&d, &di));
        assert_eq!(prod.live_vertex_count(), 2);
        assert_eq!(prod.live_edge_count(), 1);
    }

    #[test]
    fn conjugation_invariance_randomish() {
        for g in ["x0", "x1", "x2 x0", "x0^-1 x1"] {
            let g = word(g);
            let conj = g.inverse().concat(&word("x0")).concat(&g);
            assert!(conjugate_strand(&word("x0"), &conj));
        }
    }
}
