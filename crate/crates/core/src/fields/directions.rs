use crate::{Error, Result};
use nalgebra::Vector3;
use std::collections::HashSet;

/// Unit directions with the neighbor graph of their spherical Voronoi
/// tessellation (equivalently, edges of the convex hull).
#[derive(Debug, Clone)]
pub struct DirectionSet {
    pub directions: Vec<Vector3<f64>>,
    pub neighbors: Vec<Vec<usize>>,
    /// Largest angle between a direction and a vertex of its Voronoi cell.
    pub cell_radius: Vec<f64>,
}

impl DirectionSet {
    /// Normalizes the inputs and builds the neighbor graph.
    pub fn new(dirs: Vec<Vector3<f64>>) -> Result<Self> {
        if dirs.is_empty() {
            return Err(Error::Contract("empty direction set".into()));
        }
        let mut directions = Vec::with_capacity(dirs.len());
        for d in dirs {
            let n = d.norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Domain("zero or non-finite direction".into()));
            }
            directions.push(d / n);
        }
        let k = directions.len();
        if k < 4 {
            let neighbors = (0..k).map(|i| (0..k).filter(|&j| j != i).collect()).collect();
            let cell_radius = vec![std::f64::consts::PI; k];
            return Ok(Self { directions, neighbors, cell_radius });
        }
        let faces = convex_hull(&directions)?;
        let mut nb: Vec<HashSet<usize>> = vec![HashSet::new(); k];
        let mut cell_radius = vec![0.0f64; k];
        for f in &faces {
            let [a, b, c] = *f;
            for (p, q) in [(a, b), (b, c), (c, a)] {
                nb[p].insert(q);
                nb[q].insert(p);
            }
            let (pa, pb, pc) = (directions[a], directions[b], directions[c]);
            let normal = (pb - pa).cross(&(pc - pa));
            if normal.norm() > 0.0 {
                let centre = normal.normalize();
                for &v in f {
                    let ang = directions[v].dot(&centre).clamp(-1.0, 1.0).acos();
                    cell_radius[v] = cell_radius[v].max(ang);
                }
            }
        }
        let neighbors = nb
            .into_iter()
            .map(|s| {
                let mut v: Vec<usize> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        Ok(Self { directions, neighbors, cell_radius })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Every direction together with its antipode.
    pub fn symmetrized(&self) -> Result<DirectionSet> {
        let mut v = self.directions.clone();
        v.extend(self.directions.iter().map(|d| -d));
        DirectionSet::new(v)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Index of the direction closest to `d`.
    pub fn nearest(&self, d: &Vector3<f64>) -> usize {
        let mut best = 0;
        let mut bv = f64::NEG_INFINITY;
        for (i, x) in self.directions.iter().enumerate() {
            let v = x.dot(d);
            if v > bv {
                bv = v;
                best = i;
            }
        }
        best
    }
}

struct Face {
    v: [usize; 3],
    normal: Vector3<f64>,
    offset: f64,
    alive: bool,
}

fn make_face(p: &[Vector3<f64>], a: usize, b: usize, c: usize, inside: &Vector3<f64>) -> Face {
    let mut v = [a, b, c];
    let mut normal = (p[b] - p[a]).cross(&(p[c] - p[a]));
    if normal.dot(&(p[a] - inside)) < 0.0 {
        v.swap(1, 2);
        normal = -normal;
    }
    let nn = normal.norm();
    if nn > 0.0 {
        normal /= nn;
    }
    Face { v, normal, offset: normal.dot(&p[v[0]]), alive: true }
}

/// Incremental hull for points on the unit sphere; returns triangles.
fn convex_hull(p: &[Vector3<f64>]) -> Result<Vec<[usize; 3]>> {
    let n = p.len();
    let i0 = 0;
    let i1 = (0..n).max_by(|&a, &b| (p[a] - p[i0]).norm().total_cmp(&(p[b] - p[i0]).norm())).unwrap();
    let line = (p[i1] - p[i0]).normalize();
    let dist_line = |k: usize| {
        let d = p[k] - p[i0];
        (d - line * d.dot(&line)).norm()
    };
    let i2 = (0..n).max_by(|&a, &b| dist_line(a).total_cmp(&dist_line(b))).unwrap();
    let pn = (p[i1] - p[i0]).cross(&(p[i2] - p[i0]));
    if pn.norm() < 1e-12 {
        return Err(Error::Domain("direction set is degenerate (collinear)".into()));
    }
    let pn = pn.normalize();
    let i3 = (0..n).max_by(|&a, &b| pn.dot(&(p[a] - p[i0])).abs().total_cmp(&pn.dot(&(p[b] - p[i0])).abs())).unwrap();
    if pn.dot(&(p[i3] - p[i0])).abs() < 1e-12 {
        return Err(Error::Domain("direction set is degenerate (coplanar)".into()));
    }
    let inside = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
    let mut faces = vec![
        make_face(p, i0, i1, i2, &inside),
        make_face(p, i0, i1, i3, &inside),
        make_face(p, i0, i2, i3, &inside),
        make_face(p, i1, i2, i3, &inside),
    ];
    let used: HashSet<usize> = [i0, i1, i2, i3].into_iter().collect();
    for k in 0..n {
        if used.contains(&k) {
            continue;
        }
        let mut visible: Vec<usize> =
            faces.iter().enumerate().filter(|(_, f)| f.alive && f.normal.dot(&p[k]) - f.offset > 1e-13).map(|(i, _)| i).collect();
        if visible.is_empty() {
            // co-planar with some face: attach to the closest one
            let best = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.alive)
                .max_by(|a, b| (a.1.normal.dot(&p[k]) - a.1.offset).total_cmp(&(b.1.normal.dot(&p[k]) - b.1.offset)))
                .map(|(i, _)| i)
                .unwrap();
            if faces[best].normal.dot(&p[k]) - faces[best].offset < -1e-9 {
                continue;
            }
            visible.push(best);
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                edges.insert((a, b));
            }
            faces[fi].alive = false;
        }
        let mut horizon: Vec<(usize, usize)> = edges.iter().filter(|(a, b)| !edges.contains(&(*b, *a))).copied().collect();
        horizon.sort_unstable();
        for (a, b) in horizon {
            let mut f = make_face(p, a, b, k, &inside);
            // keep orientation consistent with the horizon edge
            f.v = [a, b, k];
            let normal = (p[b] - p[a]).cross(&(p[k] - p[a]));
            let nn = normal.norm();
            f.normal = if nn > 0.0 { normal / nn } else { normal };
            f.offset = f.normal.dot(&p[a]);
            faces.push(f);
        }
    }
    Ok(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}
