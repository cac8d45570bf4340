//! Vascular map: multiscale Hessian vesselness, hysteresis, thinning and a
//! skeleton graph with spur pruning.

use std::collections::HashSet;

use crate::imgproc::{
    boundary_distance, hessian, label_components, masked_gaussian, percentile, thin, Connectivity, Grid,
};
use crate::model::{BreastMask, NodeKind, Side, SidePair, ThermalFrame, VascularGraph, VesselEdge, VesselNode};

use super::{canonical, SegmentationParams};

/// Blob-versus-line sensitivity of the vesselness measure.
pub const FRANGI_BETA: f64 = 0.5;
/// Structure-strength scale, in scale-normalised °C per px².
pub const FRANGI_C: f64 = 0.25;

/// Bright-ridge vesselness, maximised over `scales`.
///
/// Each scale smooths the masked frame (normalised convolution), takes the
/// scale-normalised Hessian and scores pixels whose dominant curvature is
/// negative. Pixels closer than two smoothing widths to the mask boundary
/// score 0 at that scale; the boundary itself is a step, not a ridge. A
/// pixel must also be concave at the finest scale.
pub fn vesselness(temps: &Grid<f64>, mask: &Grid<bool>, scales: &[f64]) -> Grid<f64> {
    let mut sorted = scales.to_vec();
    sorted.sort_by(f64::total_cmp);
    let dist = boundary_distance(mask);
    let (w, h) = (temps.width(), temps.height());
    let mut v = Grid::new(w, h, 0.0);
    let mut gate = Grid::new(w, h, false);
    for (si, &s) in sorted.iter().enumerate() {
        let hs = hessian(&masked_gaussian(temps, mask, s));
        let norm = s * s;
        for (x, y) in mask.points() {
            let (l1, l2) = hs.eigenvalues(x, y);
            let (l1, l2) = (l1 * norm, l2 * norm);
            if si == 0 {
                gate.set(x, y, l2 < 0.0);
            }
            if l2 >= 0.0 || *dist.get(x, y) + 0.5 < 2.0 * s {
                continue;
            }
            let rb = l1 / l2;
            let s2 = l1 * l1 + l2 * l2;
            let val = (-rb * rb / (2.0 * FRANGI_BETA * FRANGI_BETA)).exp()
                * (1.0 - (-s2 / (2.0 * FRANGI_C * FRANGI_C)).exp());
            if val > *v.get(x, y) {
                v.set(x, y, val);
            }
        }
    }
    for (i, g) in gate.as_slice().iter().enumerate() {
        if !g {
            v.as_mut_slice()[i] = 0.0;
        }
    }
    v
}

/// Two-level threshold: keep 8-connected regions above the low level that
/// contain at least one pixel above the high level. Levels are in-mask
/// percentiles, raised to the absolute floors when lower.
pub fn hysteresis(v: &Grid<f64>, mask: &Grid<bool>, pct: (f64, f64), floor: (f64, f64)) -> Grid<bool> {
    let values: Vec<f64> = mask.points().map(|(x, y)| *v.get(x, y)).collect();
    let Some(p_lo) = percentile(&values, pct.0) else {
        return Grid::new(v.width(), v.height(), false);
    };
    let p_hi = percentile(&values, pct.1).expect("non-empty");
    let low = p_lo.max(floor.0);
    let high = p_hi.max(floor.1);
    let weak = Grid::from_fn(v.width(), v.height(), |x, y| *mask.get(x, y) && *v.get(x, y) >= low);
    let labeling = label_components(&weak, Connectivity::Eight);
    let mut keep = vec![false; labeling.count() + 1];
    for (i, &l) in labeling.labels.as_slice().iter().enumerate() {
        if l > 0 && v.as_slice()[i] >= high {
            keep[l as usize] = true;
        }
    }
    labeling.labels.map(|&l| keep[l as usize])
}

const RING: [(isize, isize); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn neighbours(s: &Grid<bool>, (x, y): (usize, usize)) -> impl Iterator<Item = (usize, usize)> + '_ {
    RING.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x as isize + dx, y as isize + dy);
        match s.checked(nx, ny) {
            Some(true) => Some((nx as usize, ny as usize)),
            _ => None,
        }
    })
}

/// Walks from node pixel `start` through `first` along two-neighbour pixels
/// until a node pixel is reached.
fn trace(
    skeleton: &Grid<bool>,
    start: (usize, usize),
    first: (usize, usize),
    visited: &mut Grid<bool>,
    node_of: &Grid<usize>,
) -> Vec<(usize, usize)> {
    let mut path = vec![start, first];
    let (mut prev, mut cur) = (start, first);
    while *node_of.get(cur.0, cur.1) == usize::MAX {
        visited.set(cur.0, cur.1, true);
        let next = neighbours(skeleton, cur)
            .filter(|&q| q != prev)
            .find(|&q| *node_of.get(q.0, q.1) != usize::MAX || !*visited.get(q.0, q.1));
        let Some(q) = next else { break };
        path.push(q);
        prev = cur;
        cur = q;
    }
    path
}

struct RawEdge {
    from: usize,
    to: usize,
    pixels: Vec<(usize, usize)>,
}

struct RawNode {
    pixels: Vec<(usize, usize)>,
    is_loop: bool,
    /// Joined into a through edge; its pixels stay on the skeleton.
    dissolved: bool,
}

/// Graph of a 1-px skeleton.
///
/// Pixels with other than two skeleton neighbours are nodes; touching
/// junction pixels merge into one node. Runs of two-neighbour pixels become
/// edges. A closed ring without nodes gets an anchor node of kind `Loop`.
/// Spurs (an endpoint joined to a junction) and free fragments shorter than
/// `min_spur` pixels are pruned repeatedly; nodes left with two edges are
/// dissolved by joining those edges.
///
/// Returns the nodes, the edges (with caliber left at 0) and the skeleton
/// without the pruned pixels.
pub fn skeleton_graph(skeleton: &Grid<bool>, min_spur: usize) -> (Vec<VesselNode>, Vec<VesselEdge>, Grid<bool>) {
    let (w, h) = (skeleton.width(), skeleton.height());
    let degree = Grid::from_fn(w, h, |x, y| {
        if *skeleton.get(x, y) {
            neighbours(skeleton, (x, y)).count()
        } else {
            0
        }
    });
    let is_node_px = |p: (usize, usize)| *skeleton.get(p.0, p.1) && *degree.get(p.0, p.1) != 2;

    // node ids per pixel: junction pixels clustered, endpoints alone
    let junction = Grid::from_fn(w, h, |x, y| *skeleton.get(x, y) && *degree.get(x, y) >= 3);
    let jl = label_components(&junction, Connectivity::Eight);
    let mut node_of = Grid::new(w, h, usize::MAX);
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut cluster_node = vec![usize::MAX; jl.count() + 1];
    for (x, y) in skeleton.points() {
        if !is_node_px((x, y)) {
            continue;
        }
        let l = *jl.labels.get(x, y) as usize;
        let id = if l > 0 {
            if cluster_node[l] == usize::MAX {
                cluster_node[l] = nodes.len();
                nodes.push(RawNode {
                    pixels: Vec::new(),
                    is_loop: false,
                    dissolved: false,
                });
            }
            cluster_node[l]
        } else {
            nodes.push(RawNode {
                pixels: Vec::new(),
                is_loop: false,
                dissolved: false,
            });
            nodes.len() - 1
        };
        nodes[id].pixels.push((x, y));
        node_of.set(x, y, id);
    }

    let mut visited = Grid::new(w, h, false);
    let mut edges: Vec<RawEdge> = Vec::new();
    let mut direct: HashSet<((usize, usize), (usize, usize))> = HashSet::new();
    for id in 0..nodes.len() {
        let pixels = nodes[id].pixels.clone();
        for &p in &pixels {
            for q in neighbours(skeleton, p).collect::<Vec<_>>() {
                let other = *node_of.get(q.0, q.1);
                if other == id {
                    continue;
                }
                if other != usize::MAX {
                    let key = if p < q { (p, q) } else { (q, p) };
                    if direct.insert(key) {
                        edges.push(RawEdge {
                            from: id,
                            to: other,
                            pixels: vec![p, q],
                        });
                    }
                    continue;
                }
                if *visited.get(q.0, q.1) {
                    continue;
                }
                let path = trace(skeleton, p, q, &mut visited, &node_of);
                let end = *path.last().expect("non-empty");
                let to = *node_of.get(end.0, end.1);
                if to == usize::MAX {
                    continue;
                }
                // a bend hugging a junction cluster, not a real loop
                if to == id && path.len() <= 3 {
                    continue;
                }
                edges.push(RawEdge { from: id, to, pixels: path });
            }
        }
    }

    // rings without any node
    for (x, y) in skeleton.points().collect::<Vec<_>>() {
        if *visited.get(x, y) || *node_of.get(x, y) != usize::MAX {
            continue;
        }
        let id = nodes.len();
        nodes.push(RawNode {
            pixels: vec![(x, y)],
            is_loop: true,
            dissolved: false,
        });
        node_of.set(x, y, id);
        visited.set(x, y, true);
        if let Some(q) = neighbours(skeleton, (x, y)).next() {
            let path = trace(skeleton, (x, y), q, &mut visited, &node_of);
            if *path.last().unwrap() == (x, y) {
                edges.push(RawEdge { from: id, to: id, pixels: path });
            }
        }
    }

    let mut pruned = skeleton.clone();
    let mut live: Vec<Option<RawEdge>> = edges.into_iter().map(Some).collect();
    let degree_of = |live: &[Option<RawEdge>], n: usize| {
        live.iter()
            .flatten()
            .map(|e| (e.from == n) as usize + (e.to == n) as usize)
            .sum::<usize>()
    };
    loop {
        let degrees: Vec<usize> = (0..nodes.len()).map(|n| degree_of(&live, n)).collect();
        let mut changed = false;
        for slot in live.iter_mut() {
            let Some(e) = slot else { continue };
            let (da, db) = (degrees[e.from], degrees[e.to]);
            let short = e.pixels.len() < min_spur + 1;
            let spur = e.from != e.to && ((da == 1 && db >= 3) || (db == 1 && da >= 3));
            let fragment = e.from != e.to && da == 1 && db == 1 && e.pixels.len() < min_spur;
            if !(short && spur) && !fragment {
                continue;
            }
            let keep_end = if fragment {
                None
            } else if da >= 3 {
                Some(e.pixels[0])
            } else {
                Some(*e.pixels.last().unwrap())
            };
            for &p in &e.pixels {
                if Some(p) != keep_end {
                    pruned.set(p.0, p.1, false);
                }
            }
            if fragment {
                for n in [e.from, e.to] {
                    for &p in &nodes[n].pixels {
                        pruned.set(p.0, p.1, false);
                    }
                }
            } else {
                let end_node = if da == 1 { e.from } else { e.to };
                for &p in &nodes[end_node].pixels {
                    pruned.set(p.0, p.1, false);
                }
            }
            *slot = None;
            changed = true;
        }
        // dissolve nodes left with exactly two distinct edges
        for n in 0..nodes.len() {
            if nodes[n].is_loop {
                continue;
            }
            let incident: Vec<usize> = live
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.as_ref().filter(|e| e.from == n || e.to == n).map(|_| i))
                .collect();
            match incident[..] {
                [i] if live[i].as_ref().is_some_and(|e| e.from == n && e.to == n) => {
                    nodes[n].is_loop = true;
                    changed = true;
                }
                [i, j] => {
                    let mut a = live[i].take().unwrap();
                    let mut b = live[j].take().unwrap();
                    if a.to != n {
                        a.pixels.reverse();
                        std::mem::swap(&mut a.from, &mut a.to);
                    }
                    if b.from != n {
                        b.pixels.reverse();
                        std::mem::swap(&mut b.from, &mut b.to);
                    }
                    // paths may meet the node cluster at different pixels
                    let joint = b.pixels[0];
                    if a.pixels.last() == Some(&joint) {
                        a.pixels.pop();
                    }
                    a.pixels.extend(b.pixels);
                    a.to = b.to;
                    live[i] = Some(a);
                    nodes[n].dissolved = true;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    let live: Vec<RawEdge> = live.into_iter().flatten().collect();
    let mut index = vec![usize::MAX; nodes.len()];
    let mut out_nodes = Vec::new();
    for (n, node) in nodes.iter().enumerate() {
        let deg = live.iter().map(|e| (e.from == n) as usize + (e.to == n) as usize).sum::<usize>();
        if deg == 0 {
            continue;
        }
        let kind = if node.is_loop || deg == 2 {
            NodeKind::Loop
        } else if deg == 1 {
            NodeKind::Endpoint
        } else {
            NodeKind::Branch
        };
        index[n] = out_nodes.len();
        out_nodes.push(VesselNode {
            position: representative(&node.pixels),
            kind,
            degree: deg,
        });
    }
    // degree-0 leftovers (isolated pixels) leave the skeleton too
    for (n, node) in nodes.iter().enumerate() {
        if index[n] == usize::MAX && !node.dissolved {
            for &p in &node.pixels {
                pruned.set(p.0, p.1, false);
            }
        }
    }
    let out_edges = live
        .into_iter()
        .map(|e| VesselEdge {
            from: index[e.from],
            to: index[e.to],
            pixels: e.pixels,
            caliber_px: 0.0,
        })
        .collect();
    (out_nodes, out_edges, pruned)
}

/// Cluster pixel closest to the cluster centroid (first in raster order on ties).
fn representative(pixels: &[(usize, usize)]) -> (usize, usize) {
    let n = pixels.len() as i64;
    let sx: i64 = pixels.iter().map(|p| p.0 as i64).sum();
    let sy: i64 = pixels.iter().map(|p| p.1 as i64).sum();
    *pixels
        .iter()
        .min_by_key(|p| {
            let dx = p.0 as i64 * n - sx;
            let dy = p.1 as i64 * n - sy;
            (dx * dx + dy * dy, p.1, p.0)
        })
        .expect("node has pixels")
}

fn extract_canonical(temps: &Grid<f64>, mask: &Grid<bool>, side: Side, p: &SegmentationParams) -> VascularGraph {
    let v = vesselness(temps, mask, &p.vesselness_scales);
    let vessel_mask = hysteresis(&v, mask, p.vessel_hysteresis, p.vessel_floor);
    let (nodes, mut edges, skeleton) = skeleton_graph(&thin(&vessel_mask), p.min_spur_length);
    let dist = boundary_distance(&vessel_mask);
    for e in &mut edges {
        let mut d: Vec<f64> = e.pixels.iter().map(|&(x, y)| *dist.get(x, y)).collect();
        d.sort_by(f64::total_cmp);
        e.caliber_px = 2.0 * d.iter().sum::<f64>() / d.len() as f64;
    }
    VascularGraph {
        side,
        vessel_mask,
        skeleton,
        nodes,
        edges,
    }
}

fn mirror_graph(g: VascularGraph, width: usize) -> VascularGraph {
    let flip = |(x, y): (usize, usize)| (width - 1 - x, y);
    VascularGraph {
        side: g.side,
        vessel_mask: g.vessel_mask.mirrored(),
        skeleton: g.skeleton.mirrored(),
        nodes: g
            .nodes
            .into_iter()
            .map(|n| VesselNode {
                position: flip(n.position),
                ..n
            })
            .collect(),
        edges: g
            .edges
            .into_iter()
            .map(|e| VesselEdge {
                pixels: e.pixels.into_iter().map(flip).collect(),
                ..e
            })
            .collect(),
    }
}

pub fn extract_side_vascular_map(frame: &ThermalFrame, mask: &Grid<bool>, side: Side, p: &SegmentationParams) -> VascularGraph {
    let (temps, mask) = canonical(side, frame.temps(), mask);
    let g = extract_canonical(&temps, &mask, side, p);
    match side {
        Side::Left => g,
        Side::Right => mirror_graph(g, frame.width()),
    }
}

pub fn extract_vascular_map(frame: &ThermalFrame, mask: &BreastMask, p: &SegmentationParams) -> SidePair<VascularGraph> {
    SidePair::new(
        extract_side_vascular_map(frame, &mask.left, Side::Left, p),
        extract_side_vascular_map(frame, &mask.right, Side::Right, p),
    )
}
