//! Canonical labelling of subspace systems under `PGL(r, q)` or `PΓL(r, q)`.
//!
//! The system is encoded as the incidence graph of points, hyperplanes and
//! elements of `PG(r-1, q)`. Individualization-refinement produces discrete
//! orderings; each leaf fixes a projective frame (the first `r` independent
//! points, points on elements first, plus the first point in general position
//! with respect to them), and the leaf certificate is the system and the point
//! sequence written in that frame. Collineations act on leaves equivariantly,
//! so the least certificate is a class invariant, and two leaves with equal
//! certificates differ by an automorphism of the system.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::geometry::{self, GeometryError, ProjectiveSystem, Subspace};
use crate::linalg::MatrixFq;
use crate::packed::{self, Echelon, PVec, Packed};

/// Which collineation group defines equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// Projective linear group.
    #[default]
    Pgl,
    /// Projective semilinear group (adds the Frobenius automorphisms).
    Pgammal,
}

impl GroupKind {
    /// The group used when none is requested: over prime fields both coincide.
    pub fn default_for(field: &Field) -> GroupKind {
        if field.is_prime_field() {
            GroupKind::Pgl
        } else {
            GroupKind::Pgammal
        }
    }
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupKind::Pgl => "pgl",
            GroupKind::Pgammal => "pgammal",
        })
    }
}

impl std::str::FromStr for GroupKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pgl" => Ok(GroupKind::Pgl),
            "pgammal" => Ok(GroupKind::Pgammal),
            _ => Err(format!("unknown group `{s}` (expected pgl or pgammal)")),
        }
    }
}

/// A collineation `x ↦ σ^frob(x)·M` with `M` normalized modulo scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    matrix: MatrixFq,
    frob: u32,
}

impl GroupElement {
    /// Fails if `matrix` is singular or not square; scales it so the first
    /// nonzero entry of its first nonzero column is 1.
    pub fn new(matrix: MatrixFq, frob: u32) -> Option<GroupElement> {
        if matrix.rows() != matrix.cols() || matrix.inverse().is_none() {
            return None;
        }
        let f = matrix.field().clone();
        let frob = frob % f.e();
        let lead = (0..matrix.cols())
            .flat_map(|j| (0..matrix.rows()).map(move |i| (i, j)))
            .map(|(i, j)| matrix.get(i, j))
            .find(|&v| v != 0)
            .expect("invertible matrix has a nonzero entry");
        let s = f.inv(lead).expect("nonzero");
        let mut m = matrix;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = f.mul(s, m.get(i, j));
                m.set(i, j, v);
            }
        }
        Some(GroupElement { matrix: m, frob })
    }

    pub fn identity(field: &Field, r: usize) -> GroupElement {
        GroupElement { matrix: MatrixFq::identity(field, r), frob: 0 }
    }

    /// Uniformly random element of the group.
    pub fn random<R: Rng + ?Sized>(field: &Field, r: usize, group: GroupKind, rng: &mut R) -> GroupElement {
        let q = field.order();
        loop {
            let data: Vec<u32> = (0..r * r).map(|_| rng.gen_range(0..q)).collect();
            let m = MatrixFq::from_flat(field, r, r, data).expect("shape");
            let frob = match group {
                GroupKind::Pgl => 0,
                GroupKind::Pgammal => rng.gen_range(0..field.e()),
            };
            if let Some(g) = GroupElement::new(m, frob) {
                return g;
            }
        }
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.matrix
    }
    pub fn frob(&self) -> u32 {
        self.frob
    }

    pub fn apply_vector(&self, v: &[u32]) -> Vec<u32> {
        let f = self.matrix.field();
        let w: Vec<u32> = v.iter().map(|&x| frobenius_pow(f, x, self.frob)).collect();
        self.matrix.left_mul_vec(&w)
    }

    pub fn apply(&self, sys: &ProjectiveSystem) -> ProjectiveSystem {
        let els: Vec<Subspace> = sys
            .elements()
            .iter()
            .map(|e| {
                let rows: Vec<Vec<u32>> = e.basis().row_vecs().iter().map(|v| self.apply_vector(v)).collect();
                if rows.is_empty() {
                    Subspace::zero(sys.field(), sys.r())
                } else {
                    Subspace::from_rows(sys.field(), sys.r(), &rows).expect("shape")
                }
            })
            .collect();
        ProjectiveSystem::new(sys.field(), sys.r(), sys.h(), els).expect("same parameters")
    }
}

fn frobenius_pow(f: &Field, x: u32, k: u32) -> u32 {
    (0..k).fold(x, |y, _| f.frobenius(y))
}

/// Points and hyperplanes of `PG(r-1, q)` with their incidences, shared by all searches.
pub struct PointGeometry {
    pk: Packed,
    r: usize,
    points: Vec<PVec>,
    point_id: Vec<u32>,
    pt_hyp_start: Vec<u32>,
    pt_hyp: Vec<u32>,
    hyp_pt_start: Vec<u32>,
    hyp_pt: Vec<u32>,
    frob: Vec<u32>,
}

impl PointGeometry {
    pub fn new(field: &Field, r: usize) -> Result<PointGeometry, GeometryError> {
        let pk = geometry::packer_for(field, r)?;
        let q = field.order() as usize;
        let unit: Vec<PVec> = (0..r).map(|i| pk.set(0, i, 1)).collect();
        let mut points = Vec::new();
        packed::for_each_projective_point(&pk, &unit, |v| points.push(pk.normalize(v)));
        let mut point_id = vec![u32::MAX; q.pow(r as u32)];
        for (i, &p) in points.iter().enumerate() {
            point_id[pk.dense_index(p, r)] = i as u32;
        }
        let normals = geometry::hyperplane_normals(&pk, r);
        let mut hyp_pts: Vec<Vec<u32>> = vec![Vec::new(); normals.len()];
        let mut pt_hyps: Vec<Vec<u32>> = vec![Vec::new(); points.len()];
        for (j, &a) in normals.iter().enumerate() {
            for (i, &p) in points.iter().enumerate() {
                if pk.dot(a, p) == 0 {
                    hyp_pts[j].push(i as u32);
                    pt_hyps[i].push(j as u32);
                }
            }
        }
        let (pt_hyp_start, pt_hyp) = csr(&pt_hyps);
        let (hyp_pt_start, hyp_pt) = csr(&hyp_pts);
        let frob = (0..field.order()).map(|x| field.frobenius(x)).collect();
        Ok(PointGeometry { pk, r, points, point_id, pt_hyp_start, pt_hyp, hyp_pt_start, hyp_pt, frob })
    }

    pub fn packer(&self) -> &Packed {
        &self.pk
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn num_points(&self) -> usize {
        self.points.len()
    }
    pub fn num_hyperplanes(&self) -> usize {
        self.hyp_pt_start.len() - 1
    }
    pub fn point(&self, i: u32) -> PVec {
        self.points[i as usize]
    }

    /// Index of the projective point spanned by the nonzero vector `v`.
    #[inline]
    pub fn point_of(&self, v: PVec) -> u32 {
        self.point_id[self.pk.dense_index(self.pk.normalize(v), self.r)]
    }

    /// Point indices of the span of `rows` (assumed independent).
    pub fn points_of(&self, rows: &[PVec]) -> Vec<u32> {
        let mut out = Vec::new();
        packed::for_each_projective_point(&self.pk, rows, |v| out.push(self.point_of(v)));
        out.sort_unstable();
        out
    }

    fn frobenius(&self, v: PVec) -> PVec {
        let mut w = 0;
        for i in 0..self.r {
            let c = self.pk.get(v, i);
            if c != 0 {
                w = self.pk.set(w, i, self.frob[c as usize]);
            }
        }
        w
    }
}

fn csr(lists: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let mut start = Vec::with_capacity(lists.len() + 1);
    let mut flat = Vec::new();
    start.push(0);
    for l in lists {
        flat.extend_from_slice(l);
        start.push(flat.len() as u32);
    }
    (start, flat)
}

/// Ordered partition of the vertex set; cells are contiguous ranges of `lab`.
#[derive(Clone)]
pub(crate) struct Partition {
    pub lab: Vec<u32>,
    pos: Vec<u32>,
    /// Start position of the cell containing each vertex.
    cell: Vec<u32>,
    /// Cell length, indexed by start position.
    len: Vec<u32>,
    ncells: usize,
}

impl Partition {
    pub fn cell_of(&self, v: u32) -> (usize, usize) {
        let s = self.cell[v as usize] as usize;
        (s, self.len[s] as usize)
    }

    /// `(start, len)` of every cell starting in `range`, in position order.
    pub fn cells_in(&self, range: std::ops::Range<usize>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut s = range.start;
        while s < range.end {
            let l = self.len[s] as usize;
            out.push((s, l));
            s += l;
        }
        out
    }
}

struct Scratch {
    cnt: Vec<u32>,
    touched_v: Vec<u32>,
    touched_c: Vec<u32>,
    cmark: Vec<bool>,
    inq: Vec<bool>,
    tmp: Vec<(u32, u32)>,
}

/// A leaf of the search tree.
#[derive(Clone)]
struct Leaf {
    cert: Vec<u64>,
    elems: Vec<Vec<PVec>>,
    lab: Vec<u32>,
    path: Vec<u32>,
}

/// Outcome of a full search.
pub(crate) struct SearchResult {
    /// Elements of the canonical form (reduced bases, sorted).
    pub canon: Vec<Vec<PVec>>,
    /// Vertex order of the best leaf.
    pub best_lab: Vec<u32>,
    /// Automorphisms as vertex permutations.
    pub gens: Vec<Vec<u32>>,
    pub order: u128,
}

/// Incidence graph of one system: points `0..np`, hyperplanes `np..np+nh`, elements after.
pub(crate) struct Canon<'g> {
    geo: &'g PointGeometry,
    e: u32,
    elems: Vec<Vec<PVec>>,
    elem_pts: Vec<Vec<u32>>,
    pt_elems: Vec<Vec<u32>>,
    pub np: usize,
    pub nh: usize,
    pub nv: usize,
}

impl<'g> Canon<'g> {
    /// `elems` are reduced bases of the elements.
    pub fn new(geo: &'g PointGeometry, group: GroupKind, elems: Vec<Vec<PVec>>) -> Canon<'g> {
        let np = geo.num_points();
        let nh = geo.num_hyperplanes();
        let elem_pts: Vec<Vec<u32>> = elems.iter().map(|rows| geo.points_of(rows)).collect();
        let mut pt_elems = vec![Vec::new(); np];
        for (i, pts) in elem_pts.iter().enumerate() {
            for &p in pts {
                pt_elems[p as usize].push(i as u32);
            }
        }
        let e = match group {
            GroupKind::Pgl => 1,
            GroupKind::Pgammal => geo.pk.field().e(),
        };
        let nv = np + nh + elems.len();
        Canon { geo, e, elems, elem_pts, pt_elems, np, nh, nv }
    }

    pub fn elem_vertex(&self, i: usize) -> u32 {
        (self.np + self.nh + i) as u32
    }

    #[inline]
    fn for_neighbors(&self, v: u32, mut f: impl FnMut(u32)) {
        let v = v as usize;
        let g = self.geo;
        let (np, nh) = (self.np as u32, self.nh as u32);
        if v < self.np {
            let (a, b) = (g.pt_hyp_start[v] as usize, g.pt_hyp_start[v + 1] as usize);
            g.pt_hyp[a..b].iter().for_each(|&u| f(np + u));
            self.pt_elems[v].iter().for_each(|&u| f(np + nh + u));
        } else if v < self.np + self.nh {
            let j = v - self.np;
            let (a, b) = (g.hyp_pt_start[j] as usize, g.hyp_pt_start[j + 1] as usize);
            g.hyp_pt[a..b].iter().for_each(|&u| f(u));
        } else {
            self.elem_pts[v - self.np - self.nh].iter().for_each(|&u| f(u));
        }
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            cnt: vec![0; self.nv],
            touched_v: Vec::new(),
            touched_c: Vec::new(),
            cmark: vec![false; self.nv],
            inq: vec![false; self.nv],
            tmp: Vec::new(),
        }
    }

    /// Equitable refinement of `[points | hyperplanes | elements]`.
    pub fn root(&self) -> Partition {
        let mut sc = self.scratch();
        self.root_with(&mut sc)
    }

    fn root_with(&self, sc: &mut Scratch) -> Partition {
        let nv = self.nv;
        let mut p = Partition {
            lab: (0..nv as u32).collect(),
            pos: (0..nv as u32).collect(),
            cell: vec![0; nv],
            len: vec![0; nv],
            ncells: 0,
        };
        let mut queue = VecDeque::new();
        for (s, l) in [(0, self.np), (self.np, self.nh), (self.np + self.nh, self.elems.len())] {
            if l == 0 {
                continue;
            }
            for v in s..s + l {
                p.cell[v] = s as u32;
            }
            p.len[s] = l as u32;
            p.ncells += 1;
            queue.push_back(s as u32);
        }
        self.refine(&mut p, queue, sc);
        p
    }

    fn refine(&self, p: &mut Partition, mut queue: VecDeque<u32>, sc: &mut Scratch) {
        for &s in &queue {
            sc.inq[s as usize] = true;
        }
        while let Some(s) = queue.pop_front() {
            let s = s as usize;
            sc.inq[s] = false;
            let l = p.len[s] as usize;
            for i in s..s + l {
                let v = p.lab[i];
                self.for_neighbors(v, |u| {
                    let u = u as usize;
                    if sc.cnt[u] == 0 {
                        sc.touched_v.push(u as u32);
                        let c = p.cell[u] as usize;
                        if !sc.cmark[c] {
                            sc.cmark[c] = true;
                            sc.touched_c.push(c as u32);
                        }
                    }
                    sc.cnt[u] += 1;
                });
            }
            sc.touched_c.sort_unstable();
            let touched = std::mem::take(&mut sc.touched_c);
            for &c in &touched {
                let c = c as usize;
                sc.cmark[c] = false;
                let cl = p.len[c] as usize;
                if cl == 1 {
                    continue;
                }
                sc.tmp.clear();
                sc.tmp.extend(p.lab[c..c + cl].iter().map(|&v| (sc.cnt[v as usize], v)));
                if sc.tmp.iter().all(|&(k, _)| k == sc.tmp[0].0) {
                    continue;
                }
                sc.tmp.sort_unstable();
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut start = c;
                for (i, &(k, v)) in sc.tmp.iter().enumerate() {
                    let at = c + i;
                    if i > 0 && k != sc.tmp[i - 1].0 {
                        frags.push((start, at - start));
                        start = at;
                    }
                    p.lab[at] = v;
                    p.pos[v as usize] = at as u32;
                }
                frags.push((start, c + cl - start));
                for &(fs, fl) in &frags {
                    p.len[fs] = fl as u32;
                    for i in fs..fs + fl {
                        p.cell[p.lab[i] as usize] = fs as u32;
                    }
                }
                p.ncells += frags.len() - 1;
                if sc.inq[c] {
                    for &(fs, _) in &frags[1..] {
                        sc.inq[fs] = true;
                        queue.push_back(fs as u32);
                    }
                } else {
                    let mut big = 0;
                    for (i, &(_, fl)) in frags.iter().enumerate() {
                        if fl > frags[big].1 {
                            big = i;
                        }
                    }
                    for (i, &(fs, _)) in frags.iter().enumerate() {
                        if i != big {
                            sc.inq[fs] = true;
                            queue.push_back(fs as u32);
                        }
                    }
                }
            }
            sc.touched_c = touched;
            sc.touched_c.clear();
            for &u in &sc.touched_v {
                sc.cnt[u as usize] = 0;
            }
            sc.touched_v.clear();
        }
    }

    fn individualize(&self, p: &mut Partition, v: u32, sc: &mut Scratch) {
        let (s, l) = p.cell_of(v);
        if l > 1 {
            let pv = p.pos[v as usize] as usize;
            let u = p.lab[s];
            p.lab.swap(s, pv);
            p.pos[u as usize] = pv as u32;
            p.pos[v as usize] = s as u32;
            p.len[s] = 1;
            p.len[s + 1] = (l - 1) as u32;
            for i in s + 1..s + l {
                p.cell[p.lab[i] as usize] = (s + 1) as u32;
            }
            p.ncells += 1;
        }
        self.refine(p, VecDeque::from([s as u32]), sc);
    }

    /// Smallest non-singleton point cell (first on ties), else the first non-singleton cell.
    fn target(&self, p: &Partition) -> (usize, usize) {
        let mut best: Option<(usize, usize)> = None;
        for (s, l) in p.cells_in(0..self.np) {
            if l > 1 && best.is_none_or(|(_, bl)| l < bl) {
                best = Some((s, l));
            }
        }
        best.unwrap_or_else(|| {
            p.cells_in(0..self.nv).into_iter().find(|&(_, l)| l > 1).expect("partition is not discrete")
        })
    }

    /// Frame-normalized certificate of a discrete partition.
    fn certificate(&self, lab: &[u32]) -> (Vec<u64>, Vec<Vec<PVec>>) {
        let g = self.geo;
        let pk = &g.pk;
        let r = g.r;
        let pts = &lab[..self.np];
        let mut ech = Echelon::new();
        let mut frame: Vec<PVec> = Vec::with_capacity(r);
        let on_s = pts.iter().filter(|&&p| !self.pt_elems[p as usize].is_empty());
        let off_s = pts.iter().filter(|&&p| self.pt_elems[p as usize].is_empty());
        for &p in on_s.chain(off_s) {
            if frame.len() == r {
                break;
            }
            let v = g.points[p as usize];
            if ech.insert(pk, v) {
                frame.push(v);
            }
        }
        let f = pk.field();
        let b = MatrixFq::from_rows(f, r, &frame.iter().map(|&v| pk.to_vec(v, r)).collect::<Vec<_>>()).expect("shape");
        let binv = b.inverse().expect("frame is a basis");
        let binv_rows: Vec<PVec> = (0..r).map(|j| pk.from_slice(binv.row(j))).collect();
        let apply = |rows: &[PVec], v: PVec| -> PVec {
            (0..r).fold(0, |acc, j| match pk.get(v, j) {
                0 => acc,
                c => pk.axpy(acc, c, rows[j]),
            })
        };
        let lambda = pts
            .iter()
            .map(|&p| apply(&binv_rows, g.points[p as usize]))
            .find(|&c| (0..r).all(|i| pk.get(c, i) != 0))
            .expect("the all-ones point is in general position");
        let phi_rows: Vec<PVec> = binv_rows
            .iter()
            .map(|&row| {
                (0..r).fold(row, |acc, i| {
                    let c = pk.get(acc, i);
                    if c == 0 {
                        acc
                    } else {
                        pk.set(acc, i, pk.mul_scalar(c, pk.inv(pk.get(lambda, i))))
                    }
                })
            })
            .collect();
        let images: Vec<Vec<PVec>> =
            self.elems.iter().map(|rows| rows.iter().map(|&v| apply(&phi_rows, v)).collect()).collect();
        let point_images: Vec<PVec> = pts.iter().map(|&p| apply(&phi_rows, g.points[p as usize])).collect();
        let mut best: Option<(Vec<u64>, Vec<Vec<PVec>>)> = None;
        for s in 0..self.e {
            let tw = |v: PVec| (0..s).fold(v, |w, _| g.frobenius(w));
            let mut els: Vec<Vec<PVec>> =
                images.iter().map(|rows| packed::rref(pk, &rows.iter().map(|&v| tw(v)).collect::<Vec<_>>())).collect();
            els.sort_unstable();
            let mut cert = Vec::with_capacity(els.len() * (1 + r) + pts.len());
            for rows in &els {
                cert.push(rows.len() as u64);
                cert.extend_from_slice(rows);
            }
            cert.extend(point_images.iter().map(|&v| pk.dense_index(pk.normalize(tw(v)), r) as u64));
            if best.as_ref().is_none_or(|(c, _)| cert < *c) {
                best = Some((cert, els));
            }
        }
        best.expect("at least one field automorphism")
    }

    /// Full search: canonical form, automorphism generators and group order.
    pub fn search(&self) -> SearchResult {
        let mut sc = self.scratch();
        let root = self.root_with(&mut sc);
        let mut st = State { first: None, best: None, gens: Vec::new(), first_cells: Vec::new() };
        let mut path = Vec::new();
        self.dfs(root, &mut path, &mut st, &mut sc);
        let first = st.first.expect("search reaches a leaf");
        let best = st.best.expect("search reaches a leaf");
        let mut order: u128 = 1;
        for (i, cell) in st.first_cells.iter().enumerate() {
            let fixing: Vec<&Vec<u32>> =
                st.gens.iter().filter(|g| first.path[..i].iter().all(|&v| g[v as usize] == v)).collect();
            let orbits = orbits_of(self.nv, &fixing);
            let root = orbits[first.path[i] as usize];
            let size = cell.iter().filter(|&&w| orbits[w as usize] == root).count() as u128;
            order = order.checked_mul(size).expect("group order fits in u128");
        }
        SearchResult { canon: best.elems, best_lab: best.lab, gens: st.gens, order }
    }

    fn dfs(&self, part: Partition, path: &mut Vec<u32>, st: &mut State, sc: &mut Scratch) -> Option<usize> {
        if part.ncells == self.nv {
            return self.leaf(&part, path, st);
        }
        let level = path.len();
        let (s, l) = self.target(&part);
        let members: Vec<u32> = part.lab[s..s + l].to_vec();
        if st.first.is_none() {
            st.first_cells.push(members.clone());
        }
        let mut explored: Vec<u32> = Vec::new();
        let mut cached: Option<(usize, Vec<u32>)> = None;
        for &w in &members {
            if !explored.is_empty() {
                if cached.as_ref().is_none_or(|(n, _)| *n != st.gens.len()) {
                    let fixing: Vec<&Vec<u32>> =
                        st.gens.iter().filter(|g| path.iter().all(|&v| g[v as usize] == v)).collect();
                    cached = Some((st.gens.len(), orbits_of(self.nv, &fixing)));
                }
                let orb = &cached.as_ref().expect("just set").1;
                if explored.iter().any(|&x| orb[x as usize] == orb[w as usize]) {
                    continue;
                }
            }
            explored.push(w);
            let mut child = part.clone();
            self.individualize(&mut child, w, sc);
            path.push(w);
            let jump = self.dfs(child, path, st, sc);
            path.pop();
            if let Some(j) = jump {
                if j < level {
                    return Some(j);
                }
            }
        }
        None
    }

    fn leaf(&self, part: &Partition, path: &[u32], st: &mut State) -> Option<usize> {
        let (cert, elems) = self.certificate(&part.lab);
        let Some(first) = &st.first else {
            let leaf = Leaf { cert, elems, lab: part.lab.clone(), path: path.to_vec() };
            st.best = Some(leaf.clone());
            st.first = Some(leaf);
            return None;
        };
        if cert == first.cert {
            let g = perm_between(&first.lab, &part.lab);
            let l = common_prefix(path, &first.path);
            st.gens.push(g);
            return Some(l);
        }
        let best = st.best.as_ref().expect("set with first");
        if cert == best.cert {
            let g = perm_between(&best.lab, &part.lab);
            let l = common_prefix(path, &best.path);
            st.gens.push(g);
            return Some(l);
        }
        if cert < best.cert {
            st.best = Some(Leaf { cert, elems, lab: part.lab.clone(), path: path.to_vec() });
        }
        None
    }
}

struct State {
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    first_cells: Vec<Vec<u32>>,
}

fn perm_between(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut g = vec![0u32; a.len()];
    for (&x, &y) in a.iter().zip(b) {
        g[x as usize] = y;
    }
    g
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Orbit representative (least vertex) of every vertex under `gens`.
pub(crate) fn orbits_of(n: usize, gens: &[&Vec<u32>]) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let p = parent[x as usize];
            parent[x as usize] = parent[p as usize];
            x = p;
        }
        x
    }
    for g in gens {
        for v in 0..n as u32 {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g[v as usize]));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

/// Canonical representative of a system together with the order of its stabilizer.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub system: ProjectiveSystem,
    pub stabilizer_order: u128,
}

fn packed_elements(sys: &ProjectiveSystem, pk: &Packed) -> Vec<Vec<PVec>> {
    sys.elements().iter().map(|e| e.packed_rows(pk)).collect()
}

fn system_from_packed(sys: &ProjectiveSystem, pk: &Packed, els: &[Vec<PVec>]) -> ProjectiveSystem {
    let subs = els.iter().map(|rows| Subspace::from_packed(pk, sys.r(), rows)).collect();
    ProjectiveSystem::new(sys.field(), sys.r(), sys.h(), subs).expect("same parameters")
}

/// Canonical form under `group`: equal exactly for equivalent systems.
pub fn canonical_form(sys: &ProjectiveSystem, group: GroupKind) -> Result<CanonicalForm, GeometryError> {
    let geo = PointGeometry::new(sys.field(), sys.r())?;
    Ok(canonical_form_in(&geo, sys, group))
}

/// As [`canonical_form`], reusing a prebuilt point geometry of matching `(q, r)`.
pub fn canonical_form_in(geo: &PointGeometry, sys: &ProjectiveSystem, group: GroupKind) -> CanonicalForm {
    let pk = geo.packer();
    let canon = Canon::new(geo, group, packed_elements(sys, pk));
    let res = canon.search();
    CanonicalForm { system: system_from_packed(sys, pk, &res.canon), stabilizer_order: res.order }
}

/// Whether `a` and `b` lie in one orbit of `group`.
pub fn are_equivalent(a: &ProjectiveSystem, b: &ProjectiveSystem, group: GroupKind) -> Result<bool, GeometryError> {
    if a.field() != b.field() {
        return Err(GeometryError::FieldMismatch);
    }
    if a.r() != b.r() {
        return Err(GeometryError::AmbientMismatch(a.r(), b.r()));
    }
    if a.h() != b.h() || a.len() != b.len() {
        return Ok(false);
    }
    let geo = PointGeometry::new(a.field(), a.r())?;
    Ok(canonical_form_in(&geo, a, group).system == canonical_form_in(&geo, b, group).system)
}

/// Every element of the group, by enumerating normalized invertible matrices.
/// Only feasible for tiny `q^{r^2}`.
pub fn enumerate_group(field: &Field, r: usize, group: GroupKind) -> Vec<GroupElement> {
    let q = field.order() as u64;
    let total = q.pow((r * r) as u32);
    let frobs = match group {
        GroupKind::Pgl => 1,
        GroupKind::Pgammal => field.e(),
    };
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let data: Vec<u32> = (0..r * r)
            .map(|_| {
                let d = (c % q) as u32;
                c /= q;
                d
            })
            .collect();
        let m = MatrixFq::from_flat(field, r, r, data).expect("shape");
        if let Some(g) = GroupElement::new(m.clone(), 0) {
            if g.matrix == m {
                for f in 0..frobs {
                    out.push(GroupElement { matrix: m.clone(), frob: f });
                }
            }
        }
    }
    out
}

/// Least orbit member in the order of sorted element bases, and the stabilizer
/// order, by brute force over the whole group.
pub fn canonical_form_exhaustive(sys: &ProjectiveSystem, group: GroupKind) -> CanonicalForm {
    let mut best: Option<ProjectiveSystem> = None;
    let mut stab = 0u128;
    for g in enumerate_group(sys.field(), sys.r(), group) {
        let img = g.apply(sys);
        if img == *sys {
            stab += 1;
        }
        if best.as_ref().is_none_or(|b| img.elements() < b.elements()) {
            best = Some(img);
        }
    }
    CanonicalForm { system: best.expect("group is nonempty"), stabilizer_order: stab }
}

/// Shared handle used by the classifier's workers.
pub type SharedGeometry = Arc<PointGeometry>;
