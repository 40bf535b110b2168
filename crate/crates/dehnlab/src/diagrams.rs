//! Van Kampen diagrams as combinatorial 2-complexes.
//!
//! A diagram is stored as labeled edges, interior faces (closed dart
//! walks), and the outer boundary walk. Every directed edge is used exactly
//! once across the face walks and the boundary, which together with Euler
//! characteristic 1 pins the disk topology; no geometric embedding is ever
//! computed. Diagrams are built from certificates as a wedge of lollipops
//! (one stem and one relator cycle per factor) and then folded.
//!
//! Folding applies three kinds of moves until none fits: spur removal (a
//! boundary backtrack over one edge), boundary corner folds (two
//! consecutive boundary edges with cancelling labels are glued), and bigon
//! reduction (a stack of two-sided faces between two parallel edges with
//! matching labels is cut out and the edges identified — the 1-reduction
//! move). Each move removes an edge, so folding terminates; the free
//! reduction of the boundary label never changes. Identifications are
//! union-find aliases over edges (with an orientation bit) and vertices, so
//! folding costs near-linear time; face walks resolve their darts on read.

use std::cell::Cell;

use serde::Serialize;
use thiserror::Error;

use crate::certificates::{CertError, Certificate, Sign};
use crate::words::{Letter, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("certificate does not verify: {0}")]
    InvalidCertificate(String),
    #[error("{0}")]
    Cert(#[from] CertError),
}

/// A directed edge side: `forward` reads the stored label, the reverse
/// reads its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dart {
    edge: u32,
    forward: bool,
}

impl Dart {
    fn rev(self) -> Dart {
        Dart { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Debug, Clone)]
struct EdgeRec {
    from: u32,
    to: u32,
    /// label read in the from→to direction
    label: Letter,
    alive: bool,
}

#[derive(Debug, Clone)]
struct FaceRec {
    walk: Vec<Dart>,
    alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    pub v: usize,
    pub e: usize,
    pub f: usize,
}

impl CellCounts {
    pub fn euler(&self) -> i64 {
        self.v as i64 - self.e as i64 + self.f as i64
    }
}

#[derive(Debug, Clone)]
pub struct Diagram {
    vparent: Vec<Cell<u32>>,
    /// edge alias: (target, flip); an entry pointing at itself is a root
    eparent: Vec<Cell<(u32, bool)>>,
    edges: Vec<EdgeRec>,
    faces: Vec<FaceRec>,
    /// boundary as a doubly linked list over slots
    bslot: Vec<Dart>,
    bnext: Vec<u32>,
    bprev: Vec<u32>,
    bfirst: Option<u32>,
    blen: usize,
    basepoint: u32,
}

const NIL: u32 = u32::MAX;

impl Diagram {
    // -- construction --------------------------------------------------------

    /// Realizes a verifying certificate as a wedge of lollipops around a
    /// single basepoint: per factor a stem labeled by the conjugator and a
    /// relator cycle at its tip. The boundary label is the unreduced
    /// product word; folding brings it down to the free reduction of W.
    pub fn from_certificate(cert: &Certificate) -> Result<Diagram, DiagramError> {
        if !cert.verify()? {
            return Err(DiagramError::InvalidCertificate(cert.word.to_string()));
        }
        let mut d = Diagram {
            vparent: vec![Cell::new(0)],
            eparent: Vec::new(),
            edges: Vec::new(),
            faces: Vec::new(),
            bslot: Vec::new(),
            bnext: Vec::new(),
            bprev: Vec::new(),
            bfirst: None,
            blen: 0,
            basepoint: 0,
        };
        let mut walk: Vec<Dart> = Vec::new();
        for factor in &cert.factors {
            let mut at = d.basepoint;
            let mut stem: Vec<Dart> = Vec::new();
            for l in factor.conjugator.letters() {
                let next = d.new_vertex();
                let e = d.new_edge(at, next, l);
                stem.push(Dart { edge: e, forward: true });
                at = next;
            }
            let body = match factor.sign {
                Sign::Plus => factor.relator.clone(),
                Sign::Minus => factor.relator.inverse(),
            };
            let tip = at;
            let mut cycle: Vec<Dart> = Vec::new();
            let letters: Vec<Letter> = body.letters().collect();
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { tip } else { d.new_vertex() };
                let e = d.new_edge(at, next, l);
                cycle.push(Dart { edge: e, forward: true });
                at = next;
            }
            // The face consumes the reverse sides of the cycle.
            d.faces
                .push(FaceRec { walk: cycle.iter().rev().map(|d| d.rev()).collect(), alive: true });
            walk.extend(stem.iter().copied());
            walk.extend(cycle.iter().copied());
            walk.extend(stem.iter().rev().map(|d| d.rev()));
        }
        d.init_boundary(&walk);
        debug_assert!(d.check_consistency());
        Ok(d)
    }

    fn init_boundary(&mut self, walk: &[Dart]) {
        let n = walk.len();
        self.bslot = walk.to_vec();
        self.bnext = (0..n).map(|i| if i + 1 < n { i as u32 + 1 } else { NIL }).collect();
        self.bprev = (0..n).map(|i| if i > 0 { i as u32 - 1 } else { NIL }).collect();
        self.bfirst = if n > 0 { Some(0) } else { None };
        self.blen = n;
    }

    fn new_vertex(&mut self) -> u32 {
        let id = self.vparent.len() as u32;
        self.vparent.push(Cell::new(id));
        id
    }

    fn new_edge(&mut self, from: u32, to: u32, label: Letter) -> u32 {
        let id = self.edges.len() as u32;
        self.edges.push(EdgeRec { from, to, label, alive: true });
        self.eparent.push(Cell::new((id, false)));
        id
    }

    fn vfind(&self, v: u32) -> u32 {
        let mut root = v;
        while self.vparent[root as usize].get() != root {
            root = self.vparent[root as usize].get();
        }
        // path compression
        let mut cur = v;
        while cur != root {
            let next = self.vparent[cur as usize].get();
            self.vparent[cur as usize].set(root);
            cur = next;
        }
        root
    }

    fn vunion(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.vfind(a), self.vfind(b));
        if ra != rb {
            // Deterministic: the smaller id survives.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.vparent[hi as usize].set(lo);
        }
    }

    /// Root edge and accumulated orientation flip.
    fn efind(&self, e: u32) -> (u32, bool) {
        let (mut root, mut flip) = (e, false);
        loop {
            let (p, f) = self.eparent[root as usize].get();
            if p == root {
                break;
            }
            root = p;
            flip ^= f;
        }
        // path compression with orientation composition
        let mut cur = e;
        let mut cflip = flip;
        while cur != root {
            let (p, f) = self.eparent[cur as usize].get();
            self.eparent[cur as usize].set((root, cflip));
            cur = p;
            cflip ^= f;
        }
        (root, flip)
    }

    fn resolve(&self, d: Dart) -> Dart {
        let (root, flip) = self.efind(d.edge);
        Dart { edge: root, forward: d.forward ^ flip }
    }

    /// Aliases root edge `b` so that dart(b, bf) resolves to `target`.
    fn alias_edge(&mut self, b: u32, bf: bool, target: Dart) {
        debug_assert_eq!(self.eparent[b as usize].get().0, b);
        debug_assert_eq!(self.eparent[target.edge as usize].get().0, target.edge);
        let flip = bf ^ target.forward;
        self.eparent[b as usize].set((target.edge, flip));
        self.edges[b as usize].alive = false;
    }

    fn tail(&self, d: Dart) -> u32 {
        let d = self.resolve(d);
        let e = &self.edges[d.edge as usize];
        self.vfind(if d.forward { e.from } else { e.to })
    }

    fn head(&self, d: Dart) -> u32 {
        self.tail(d.rev())
    }

    fn label(&self, d: Dart) -> Letter {
        let d = self.resolve(d);
        let l = self.edges[d.edge as usize].label;
        if d.forward {
            l
        } else {
            l.inverse()
        }
    }

    // -- boundary list helpers -----------------------------------------------

    fn boundary_slots(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.blen);
        let mut cur = self.bfirst;
        while let Some(i) = cur {
            out.push(i);
            let n = self.bnext[i as usize];
            cur = (n != NIL).then_some(n);
        }
        out
    }

    fn remove_slot(&mut self, i: u32) {
        let (p, n) = (self.bprev[i as usize], self.bnext[i as usize]);
        if p != NIL {
            self.bnext[p as usize] = n;
        } else {
            self.bfirst = (n != NIL).then_some(n);
        }
        if n != NIL {
            self.bprev[n as usize] = p;
        }
        self.blen -= 1;
    }

    // -- reads -----------------------------------------------------------------

    pub fn counts(&self) -> CellCounts {
        let mut verts: Vec<u32> = vec![self.vfind(self.basepoint)];
        for (i, e) in self.edges.iter().enumerate() {
            if e.alive {
                verts.push(self.tail(Dart { edge: i as u32, forward: true }));
                verts.push(self.head(Dart { edge: i as u32, forward: true }));
            }
        }
        verts.sort_unstable();
        verts.dedup();
        CellCounts {
            v: verts.len(),
            e: self.edges.iter().filter(|e| e.alive).count(),
            f: self.faces.iter().filter(|f| f.alive).count(),
        }
    }

    /// The boundary label read from the basepoint.
    pub fn boundary_word(&self) -> Word {
        Word::from_letters(
            self.boundary_slots().iter().map(|&i| self.label(self.bslot[i as usize])),
        )
    }

    /// True iff no spur and no bigon reduction applies.
    pub fn is_one_regular(&self) -> bool {
        self.find_spur().is_none() && self.find_bigon_chain().is_none()
    }

    // -- folding -----------------------------------------------------------------

    /// Applies at most `max_steps` folding moves; returns how many were
    /// applied. Intended for inspecting intermediate states; `fold` is the
    /// fast path.
    pub fn fold_steps(&mut self, max_steps: usize) -> usize {
        let mut steps = 0;
        while steps < max_steps {
            if let Some(slot) = self.find_spur() {
                self.remove_spur(slot);
            } else if let Some(slot) = self.find_corner() {
                self.fold_corner(slot);
            } else if let Some(chain) = self.find_bigon_chain() {
                self.reduce_bigon_chain(chain);
            } else {
                break;
            }
            steps += 1;
            debug_assert!(self.check_consistency());
        }
        steps
    }

    /// Folds to a fixpoint: the boundary is zipped with a cursor (new
    /// opportunities only appear next to the previous move), then bigon
    /// chains are cut until none remains.
    pub fn fold(&mut self) {
        loop {
            self.zip_boundary();
            match self.find_bigon_chain() {
                Some(chain) => self.reduce_bigon_chain(chain),
                None => break,
            }
        }
        debug_assert!(self.check_consistency());
    }

    fn zip_boundary(&mut self) {
        let mut cur = self.bfirst;
        while let Some(i) = cur {
            let ni = self.bnext[i as usize];
            if ni == NIL {
                break;
            }
            let d = self.resolve(self.bslot[i as usize]);
            let f = self.resolve(self.bslot[ni as usize]);
            let back = self.bprev[i as usize];
            if self.spur_at(d, f) {
                self.remove_spur(i);
            } else if self.corner_at(d, f) {
                self.fold_corner(i);
            } else {
                cur = Some(ni);
                continue;
            }
            cur = if back != NIL { Some(back) } else { self.bfirst };
        }
    }

    fn spur_at(&self, d: Dart, f: Dart) -> bool {
        // A loop traversed back and forth is not removable: the tip would
        // survive and the Euler characteristic would jump.
        d.edge == f.edge && d.forward != f.forward && self.tail(d) != self.head(d)
    }

    fn corner_at(&self, d: Dart, f: Dart) -> bool {
        // Folding a corner whose far endpoints already coincide would close
        // the disk into a sphere; mirror-face pairs stall here instead, with
        // a boundary label that still freely reduces to the target word.
        d.edge != f.edge
            && self.label(f) == self.label(d).inverse()
            && self.head(f) != self.tail(d)
    }

    /// Slot whose dart is immediately undone by its successor. The wrap
    /// pair at the basepoint is excluded: folding there would cyclically
    /// reduce the boundary label rather than freely reduce it.
    fn find_spur(&self) -> Option<u32> {
        let slots = self.boundary_slots();
        slots.windows(2).find_map(|w| {
            let d = self.resolve(self.bslot[w[0] as usize]);
            let f = self.resolve(self.bslot[w[1] as usize]);
            self.spur_at(d, f).then_some(w[0])
        })
    }

    fn remove_spur(&mut self, i: u32) {
        let d = self.resolve(self.bslot[i as usize]);
        let n = self.bnext[i as usize];
        self.edges[d.edge as usize].alive = false;
        self.remove_slot(i);
        self.remove_slot(n);
    }

    fn find_corner(&self) -> Option<u32> {
        let slots = self.boundary_slots();
        slots.windows(2).find_map(|w| {
            let d = self.resolve(self.bslot[w[0] as usize]);
            let f = self.resolve(self.bslot[w[1] as usize]);
            self.corner_at(d, f).then_some(w[0])
        })
    }

    /// Glues the boundary successor of the dart at `slot` onto its reverse,
    /// merging the far endpoints.
    fn fold_corner(&mut self, slot: u32) {
        let n = self.bnext[slot as usize];
        let d = self.resolve(self.bslot[slot as usize]);
        let f = self.resolve(self.bslot[n as usize]);
        debug_assert_eq!(self.head(d), self.tail(f));
        self.vunion(self.head(f), self.tail(d));
        self.alias_edge(f.edge, f.forward, d.rev());
        self.remove_slot(slot);
        self.remove_slot(n);
    }

    /// A maximal chain of 2-gon faces between parallel edges whose free
    /// sides line up as a valid 1-reduction: returns (face ids, interior
    /// edge ids, end darts A and B), with B to be glued onto A reversed.
    #[allow(clippy::type_complexity)]
    fn find_bigon_chain(&self) -> Option<(Vec<u32>, Vec<u32>, Dart, Dart)> {
        // root edge → 2-gon faces using it
        let mut on_edge: std::collections::HashMap<u32, Vec<u32>> =
            std::collections::HashMap::new();
        let mut gons: std::collections::HashMap<u32, (Dart, Dart)> =
            std::collections::HashMap::new();
        for (fi, face) in self.faces.iter().enumerate() {
            if face.alive && face.walk.len() == 2 {
                let a = self.resolve(face.walk[0]);
                let b = self.resolve(face.walk[1]);
                gons.insert(fi as u32, (a, b));
                on_edge.entry(a.edge).or_default().push(fi as u32);
                on_edge.entry(b.edge).or_default().push(fi as u32);
            }
        }
        let mut seen = vec![false; self.faces.len()];
        for (fi, face) in self.faces.iter().enumerate() {
            if !face.alive || face.walk.len() != 2 || seen[fi] {
                continue;
            }
            let mut faces = vec![fi as u32];
            seen[fi] = true;
            let mut ends: Vec<Dart> = Vec::new(); // free darts at both chain ends
            let mut cyclic = false;
            let start_pair = gons[&(fi as u32)];
            for start in [start_pair.0, start_pair.1] {
                let mut dart = start; // the current face's dart on this side
                loop {
                    let next = on_edge[&dart.edge].iter().copied().find(|g| !faces.contains(g));
                    match next {
                        None => {
                            if on_edge[&dart.edge].len() > 1 {
                                cyclic = true; // both sides already swallowed
                            }
                            ends.push(dart.rev());
                            break;
                        }
                        Some(g) => {
                            faces.push(g);
                            seen[g as usize] = true;
                            let (ga, gb) = gons[&g];
                            dart = if ga.edge == dart.edge { gb } else { ga };
                        }
                    }
                }
            }
            if cyclic || ends.len() != 2 {
                continue;
            }
            let (a, b) = (ends[0], ends[1]);
            if a.edge == b.edge {
                continue;
            }
            // Valid when gluing b onto a⁻¹ keeps endpoints and labels
            // consistent: b runs opposite to a with the inverse label.
            if self.tail(b) == self.head(a)
                && self.head(b) == self.tail(a)
                && self.label(b) == self.label(a).inverse()
            {
                let mut edges: Vec<u32> = faces
                    .iter()
                    .flat_map(|g| {
                        let (ga, gb) = gons[g];
                        [ga.edge, gb.edge]
                    })
                    .collect();
                edges.sort_unstable();
                edges.dedup();
                edges.retain(|&e| e != a.edge && e != b.edge);
                return Some((faces, edges, a, b));
            }
        }
        None
    }

    fn reduce_bigon_chain(&mut self, chain: (Vec<u32>, Vec<u32>, Dart, Dart)) {
        let (faces, interior_edges, a, b) = chain;
        for f in faces {
            self.faces[f as usize].alive = false;
        }
        for e in interior_edges {
            self.edges[e as usize].alive = false;
        }
        self.alias_edge(b.edge, b.forward, a.rev());
    }

    // -- invariants ---------------------------------------------------------------

    /// Structural soundness: every live edge is used exactly once per side
    /// across faces and boundary, all walks are closed, and the Euler
    /// characteristic is 1.
    pub fn check_consistency(&self) -> bool {
        let mut fwd = vec![0u32; self.edges.len()];
        let mut bwd = vec![0u32; self.edges.len()];
        let boundary: Vec<Dart> =
            self.boundary_slots().iter().map(|&i| self.bslot[i as usize]).collect();
        let mut walks: Vec<Vec<Dart>> = vec![boundary];
        for f in &self.faces {
            if f.alive {
                walks.push(f.walk.clone());
            }
        }
        for walk in &walks {
            for w in walk.windows(2) {
                if self.head(w[0]) != self.tail(w[1]) {
                    return false;
                }
            }
            if let (Some(&first), Some(&last)) = (walk.first(), walk.last()) {
                if self.head(last) != self.tail(first) {
                    return false;
                }
            }
            for &d in walk {
                let d = self.resolve(d);
                if !self.edges[d.edge as usize].alive {
                    return false;
                }
                if d.forward {
                    fwd[d.edge as usize] += 1;
                } else {
                    bwd[d.edge as usize] += 1;
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.alive && (fwd[i] != 1 || bwd[i] != 1) {
                return false;
            }
        }
        self.counts().euler() == 1
    }

    /// Interior face boundary labels, for relator checks.
    pub fn face_labels(&self) -> Vec<Word> {
        self.faces
            .iter()
            .filter(|f| f.alive)
            .map(|f| Word::from_letters(f.walk.iter().map(|&d| self.label(d))))
            .collect()
    }
}

/// The JSON shape printed by `dehnlab diagram --stats`.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramStats {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub boundary: String,
    pub one_regular: bool,
}

impl DiagramStats {
    pub fn of(d: &Diagram) -> DiagramStats {
        let c = d.counts();
        DiagramStats {
            v: c.v,
            e: c.e,
            f: c.f,
            boundary: d.boundary_word().to_string(),
            one_regular: d.is_one_regular(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::Factor;
    use crate::presentations::{Presentation, RelatorFamily};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn lysenok() -> Presentation {
        Presentation::builtin("lysenok").unwrap()
    }

    #[test]
    fn empty_certificate_is_a_point() {
        let c = Certificate::empty(lysenok());
        let d = Diagram::from_certificate(&c).unwrap();
        assert_eq!(d.counts(), CellCounts { v: 1, e: 0, f: 0 });
        assert_eq!(d.counts().euler(), 1);
        assert!(d.boundary_word().is_empty());
        assert!(d.is_one_regular());
    }

    #[test]
    fn single_square_face() {
        let c = Certificate::new(w("aa"), lysenok(), vec![Factor::plus(w("aa"))]);
        let d = Diagram::from_certificate(&c).unwrap();
        assert_eq!(d.counts(), CellCounts { v: 2, e: 2, f: 1 });
        assert_eq!(d.counts().euler(), 1);
        assert_eq!(d.boundary_word(), w("aa"));
    }

    #[test]
    fn octagon_face() {
        let r = w("ad").repeat(4);
        let c = Certificate::new(r.clone(), lysenok(), vec![Factor::plus(r.clone())]);
        let mut d = Diagram::from_certificate(&c).unwrap();
        d.fold();
        assert_eq!(d.counts(), CellCounts { v: 8, e: 8, f: 1 });
        assert_eq!(d.boundary_word(), r);
        assert!(d.is_one_regular());
    }

    #[test]
    fn rejects_invalid_certificates() {
        let c = Certificate::new(w("ab"), lysenok(), vec![Factor::plus(w("aa"))]);
        assert!(matches!(Diagram::from_certificate(&c), Err(DiagramError::InvalidCertificate(_))));
    }

    #[test]
    fn boundary_reads_conjugated_relator() {
        let c =
            Certificate::new(w("abbA"), lysenok(), vec![Factor::new(w("a"), w("bb"), Sign::Plus)]);
        let mut d = Diagram::from_certificate(&c).unwrap();
        assert_eq!(d.boundary_word(), w("abbA"));
        d.fold();
        assert_eq!(d.boundary_word().free_reduce(), w("abbA"));
        assert_eq!(d.counts().euler(), 1);
    }

    #[test]
    fn two_lollipops_fold_keeps_euler() {
        let p = Presentation::new(b"ab".to_vec(), RelatorFamily::Explicit(vec![w("aa"), w("bb")]))
            .unwrap();
        let c = Certificate::new(w("aabb"), p, vec![Factor::plus(w("aa")), Factor::plus(w("bb"))]);
        let mut d = Diagram::from_certificate(&c).unwrap();
        d.fold();
        let counts = d.counts();
        assert_eq!(counts.euler(), 1);
        assert_eq!(d.boundary_word().free_reduce(), w("aabb"));
        assert_eq!(counts.f, 2);
    }

    #[test]
    fn mirror_pair_collapses_to_a_point() {
        // aa · (aa)⁻¹ proves the empty word; the folded diagram must be the
        // single vertex, exercising corner folds, the bigon chain and the
        // final spur.
        let c = Certificate::new(
            Word::empty(),
            lysenok(),
            vec![Factor::plus(w("aa")), Factor::new(Word::empty(), w("aa"), Sign::Minus)],
        );
        let mut d = Diagram::from_certificate(&c).unwrap();
        assert_eq!(d.boundary_word(), w("aaAA"));
        d.fold();
        assert_eq!(d.counts(), CellCounts { v: 1, e: 0, f: 0 });
        assert!(d.boundary_word().is_empty());
    }

    #[test]
    fn bigon_chain_detection_mid_fold() {
        let c = Certificate::new(
            Word::empty(),
            lysenok(),
            vec![Factor::plus(w("aa")), Factor::new(Word::empty(), w("aa"), Sign::Minus)],
        );
        let mut d = Diagram::from_certificate(&c).unwrap();
        // After the corner folds the two faces form a bigon stack: a double
        // edge with matching labels, exactly the non-1-regular shape.
        while d.find_bigon_chain().is_none() && d.fold_steps(1) == 1 {}
        assert!(!d.is_one_regular());
        let before = d.counts().e;
        assert!(d.fold_steps(1) == 1 && d.counts().e < before);
    }

    #[test]
    fn fold_preserves_boundary_reduction_and_euler() {
        let star = Presentation::builtin("lysenok_star").unwrap();
        let c = Certificate::new(
            w("acaaca"),
            star,
            vec![
                Factor::new(w("ac"), w("aa"), Sign::Plus),
                Factor::new(w("a"), w("cc"), Sign::Plus),
                Factor::plus(w("aa")),
            ],
        );
        let mut d = Diagram::from_certificate(&c).unwrap();
        let unfolded = d.counts();
        assert_eq!(unfolded.f, 3);
        d.fold();
        let folded = d.counts();
        assert_eq!(folded.euler(), 1);
        assert!(folded.e <= unfolded.e);
        assert!(folded.f <= unfolded.f);
        assert_eq!(d.boundary_word().free_reduce(), w("acaaca"));
        assert!(folded.v <= 2 * folded.e);
        assert!(folded.f <= 2 * folded.e);
    }

    #[test]
    fn monogon_faces_are_legal() {
        let p = Presentation::new(b"ab".to_vec(), RelatorFamily::Explicit(vec![w("a")])).unwrap();
        let c = Certificate::new(w("a"), p, vec![Factor::plus(w("a"))]);
        let mut d = Diagram::from_certificate(&c).unwrap();
        d.fold();
        let counts = d.counts();
        assert_eq!(counts.euler(), 1);
        assert_eq!(counts.f, 1);
        assert_eq!(d.boundary_word(), w("a"));
    }

    #[test]
    fn face_labels_stay_relators_up_to_inversion_and_rotation() {
        let star = Presentation::builtin("lysenok_star").unwrap();
        let c = Certificate::new(
            w("acaaca"),
            star.clone(),
            vec![
                Factor::new(w("ac"), w("aa"), Sign::Plus),
                Factor::new(w("a"), w("cc"), Sign::Plus),
                Factor::plus(w("aa")),
            ],
        );
        let mut d = Diagram::from_certificate(&c).unwrap();
        d.fold();
        for label in d.face_labels() {
            let (core, _) = label.cyclic_reduce();
            let hit = (0..core.len()).any(|k| {
                let rot = core.rotate(k);
                star.is_relator(&rot) || star.is_relator(&rot.inverse())
            });
            assert!(hit, "face label {label} is not a relator");
        }
    }

    #[test]
    fn large_certificate_folds_quickly() {
        // The square-peeling certificate of σ⁶(a²): hundreds of factors
        // with long conjugators; exercises the near-linear fold path.
        let star = Presentation::builtin("lysenok_star").unwrap();
        let r = crate::words::sigma_pow(&w("aa"), 6);
        let cert =
            Certificate::new(r.clone(), star, vec![Factor::plus(r.clone())]).eliminate_sigma_a2();
        assert_eq!(cert.len(), (1 << 7) - 1);
        let mut d = Diagram::from_certificate(&cert).unwrap();
        d.fold();
        assert_eq!(d.boundary_word().free_reduce(), r);
        assert_eq!(d.counts().euler(), 1);
    }
}
