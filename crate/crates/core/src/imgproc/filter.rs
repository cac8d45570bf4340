use super::Grid;

/// Normalised 1-D Gaussian taps, radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn convolve_rows(src: &Grid<f64>, kernel: &[f64]) -> Grid<f64> {
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (src.width(), src.height());
    Grid::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (j, &k) in kernel.iter().enumerate() {
            if let Some(&v) = src.checked(x as isize + j as isize - r, y as isize) {
                acc += k * v;
            }
        }
        acc
    })
}

fn convolve_cols(src: &Grid<f64>, kernel: &[f64]) -> Grid<f64> {
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (src.width(), src.height());
    Grid::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (j, &k) in kernel.iter().enumerate() {
            if let Some(&v) = src.checked(x as isize, y as isize + j as isize - r) {
                acc += k * v;
            }
        }
        acc
    })
}

/// Normalised convolution: `G*(v·m) / G*m`.
///
/// Only pixels inside `mask` contribute, so a cold background never bleeds
/// into the smoothed foreground. Pixels with no support get 0.
pub fn masked_gaussian(values: &Grid<f64>, mask: &Grid<bool>, sigma: f64) -> Grid<f64> {
    assert!(values.same_shape(mask));
    let kernel = gaussian_kernel(sigma);
    let weighted = Grid::from_fn(values.width(), values.height(), |x, y| {
        if *mask.get(x, y) {
            *values.get(x, y)
        } else {
            0.0
        }
    });
    let support = mask.map(|&m| if m { 1.0 } else { 0.0 });
    let num = convolve_cols(&convolve_rows(&weighted, &kernel), &kernel);
    let den = convolve_cols(&convolve_rows(&support, &kernel), &kernel);
    Grid::from_fn(values.width(), values.height(), |x, y| {
        let d = *den.get(x, y);
        if d > 1e-12 {
            *num.get(x, y) / d
        } else {
            0.0
        }
    })
}

/// Second-derivative components of a raster.
pub struct Hessian {
    pub xx: Grid<f64>,
    pub xy: Grid<f64>,
    pub yy: Grid<f64>,
}

impl Hessian {
    /// Eigenvalues at a pixel ordered by magnitude, `|l1| <= |l2|`.
    pub fn eigenvalues(&self, x: usize, y: usize) -> (f64, f64) {
        let (a, b, d) = (*self.xx.get(x, y), *self.xy.get(x, y), *self.yy.get(x, y));
        let tmp = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
        let e1 = 0.5 * (a + d + tmp);
        let e2 = 0.5 * (a + d - tmp);
        if e1.abs() <= e2.abs() {
            (e1, e2)
        } else {
            (e2, e1)
        }
    }
}

/// Central-difference Hessian; the one-pixel border is left at zero.
pub fn hessian(s: &Grid<f64>) -> Hessian {
    let (w, h) = (s.width(), s.height());
    let mut xx = Grid::new(w, h, 0.0);
    let mut xy = Grid::new(w, h, 0.0);
    let mut yy = Grid::new(w, h, 0.0);
    if w < 3 || h < 3 {
        return Hessian { xx, xy, yy };
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let c = *s.get(x, y);
            xx.set(x, y, s.get(x + 1, y) - 2.0 * c + s.get(x - 1, y));
            yy.set(x, y, s.get(x, y + 1) - 2.0 * c + s.get(x, y - 1));
            xy.set(
                x,
                y,
                0.25 * (s.get(x + 1, y + 1) - s.get(x + 1, y - 1) - s.get(x - 1, y + 1)
                    + s.get(x - 1, y - 1)),
            );
        }
    }
    Hessian { xx, xy, yy }
}
