use std::collections::VecDeque;

use super::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(isize, isize); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Component labels `1..=K` numbered in raster order of each component's
/// first pixel; `0` is background.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub labels: Grid<u32>,
    /// `sizes[k - 1]` is the pixel count of label `k`.
    pub sizes: Vec<usize>,
}

impl Labeling {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn component(&self, label: u32) -> Grid<bool> {
        self.labels.map(|&l| l == label)
    }
}

pub fn label_components(mask: &Grid<bool>, conn: Connectivity) -> Labeling {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = Grid::new(w, h, 0u32);
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask.as_slice()[start] || labels.as_slice()[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        let mut size = 0;
        labels.as_mut_slice()[start] = label;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = mask.coords(i);
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if mask.checked(nx, ny) == Some(&true) {
                    let j = mask.index(nx as usize, ny as usize);
                    if labels.as_slice()[j] == 0 {
                        labels.as_mut_slice()[j] = label;
                        queue.push_back(j);
                    }
                }
            }
        }
        sizes.push(size);
    }
    Labeling { labels, sizes }
}

/// The largest component; ties go to the one met first in raster order.
pub fn largest_component(mask: &Grid<bool>, conn: Connectivity) -> Grid<bool> {
    let lab = label_components(mask, conn);
    let best = lab
        .sizes
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, usize)>, (i, &s)| match best {
            Some((_, bs)) if bs >= s => best,
            _ => Some((i, s)),
        });
    match best {
        Some((i, _)) => lab.component(i as u32 + 1),
        None => Grid::new(mask.width(), mask.height(), false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(rows: &[&str]) -> Grid<bool> {
        let w = rows[0].len();
        Grid::from_fn(w, rows.len(), |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn diagonal_touch_depends_on_connectivity() {
        let m = parse(&["#..", ".#.", "..#"]);
        assert_eq!(label_components(&m, Connectivity::Four).count(), 3);
        assert_eq!(label_components(&m, Connectivity::Eight).count(), 1);
    }

    #[test]
    fn labels_are_contiguous_and_sized() {
        let m = parse(&["##..#", "##..#", ".....", "#...."]);
        let lab = label_components(&m, Connectivity::Four);
        assert_eq!(lab.sizes, vec![4, 2, 1]);
        assert_eq!(*lab.labels.get(4, 0), 2);
        assert_eq!(*lab.labels.get(0, 3), 3);
        let big = largest_component(&m, Connectivity::Four);
        assert_eq!(big.count(), 4);
        assert!(*big.get(1, 1));
    }
}
