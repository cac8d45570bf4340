use super::Grid;

const INF: f64 = 1e20;

/// Felzenszwalb–Huttenlocher 1-D squared distance transform in place.
fn edt_1d(f: &mut [f64]) {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    let mut k = 0usize;
    z[0] = -INF;
    z[1] = INF;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates from the left end
                v[0] = q;
                z[0] = -INF;
                z[1] = INF;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = INF;
            break;
        }
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
    f.copy_from_slice(&d);
}

/// Distance from each foreground pixel centre to the region boundary, in px.
///
/// Measured as the Euclidean distance to the nearest background pixel centre
/// minus half a pixel, so the centre line of a band `W` pixels wide scores
/// `W / 2`. Pixels outside the raster count as background; background
/// pixels score 0.
pub fn boundary_distance(mask: &Grid<bool>) -> Grid<f64> {
    let (w, h) = (mask.width() + 2, mask.height() + 2);
    let mut sq = Grid::from_fn(w, h, |x, y| {
        if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
            0.0
        } else if *mask.get(x - 1, y - 1) {
            INF
        } else {
            0.0
        }
    });
    let mut col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = *sq.get(x, y);
        }
        edt_1d(&mut col);
        for y in 0..h {
            sq.set(x, y, col[y]);
        }
    }
    let mut row = vec![0.0; w];
    for y in 0..h {
        row.copy_from_slice(&sq.as_slice()[y * w..(y + 1) * w]);
        edt_1d(&mut row);
        sq.as_mut_slice()[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    Grid::from_fn(mask.width(), mask.height(), |x, y| {
        if *mask.get(x, y) {
            sq.get(x + 1, y + 1).sqrt() - 0.5
        } else {
            0.0
        }
    })
}

// Neighbour order P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn ring(img: &Grid<bool>, x: usize, y: usize) -> [bool; 8] {
    let mut p = [false; 8];
    for (i, &(dx, dy)) in RING.iter().enumerate() {
        p[i] = img.checked(x as isize + dx, y as isize + dy) == Some(&true);
    }
    p
}

fn transitions(p: &[bool; 8]) -> usize {
    (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count()
}

/// Whether the set neighbours of a pixel form a single 8-connected group.
fn neighbours_connected(p: &[bool; 8]) -> bool {
    let set: Vec<usize> = (0..8).filter(|&i| p[i]).collect();
    if set.len() <= 1 {
        return true;
    }
    let adjacent = |a: usize, b: usize| {
        let (ax, ay) = RING[a];
        let (bx, by) = RING[b];
        (ax - bx).abs() <= 1 && (ay - by).abs() <= 1
    };
    let mut seen = vec![set[0]];
    let mut frontier = vec![set[0]];
    while let Some(a) = frontier.pop() {
        for &b in &set {
            if !seen.contains(&b) && adjacent(a, b) {
                seen.push(b);
                frontier.push(b);
            }
        }
    }
    seen.len() == set.len()
}

/// Zhang–Suen thinning followed by removal of staircase corner pixels, giving
/// an 8-connected skeleton one pixel wide.
pub fn thin(mask: &Grid<bool>) -> Grid<bool> {
    let mut img = mask.clone();
    let (w, h) = (img.width(), img.height());
    loop {
        let mut changed = false;
        for step in 0..2 {
            let mut kill = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if !*img.get(x, y) {
                        continue;
                    }
                    let p = ring(&img, x, y);
                    let b = p.iter().filter(|&&v| v).count();
                    if !(2..=6).contains(&b) || transitions(&p) != 1 {
                        continue;
                    }
                    let (n, e, s, wst) = (p[0], p[2], p[4], p[6]);
                    let ok = if step == 0 {
                        !(n && e && s) && !(e && s && wst)
                    } else {
                        !(n && e && wst) && !(n && s && wst)
                    };
                    if ok {
                        kill.push((x, y));
                    }
                }
            }
            changed |= !kill.is_empty();
            for (x, y) in kill {
                img.set(x, y, false);
            }
        }
        if !changed {
            break;
        }
    }
    for y in 0..h {
        for x in 0..w {
            if !*img.get(x, y) {
                continue;
            }
            let p = ring(&img, x, y);
            let b = p.iter().filter(|&&v| v).count();
            let (n, e, s, wst) = (p[0], p[2], p[4], p[6]);
            let corner = (n && e) || (e && s) || (s && wst) || (wst && n);
            if b >= 2 && corner && neighbours_connected(&p) {
                img.set(x, y, false);
            }
        }
    }
    img
}
