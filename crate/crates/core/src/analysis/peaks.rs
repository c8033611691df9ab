use crate::scalar::{lit, Real};
use crate::spectroscopy::SpectrumTrace;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakOptions<T: Real> {
    /// Apply a 5-point moving average before locating maxima.
    pub smooth: bool,
    /// Minimum prominence as a fraction of the global maximum.
    pub min_prominence: T,
}

impl<T: Real> Default for PeakOptions<T> {
    fn default() -> Self {
        Self {
            smooth: true,
            min_prominence: lit(0.05),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoubletReport<T: Real> {
    pub n_peaks: usize,
    /// `|c₂ − c₁|` when exactly two peaks survive, else zero (rad/µs).
    pub separation: T,
    pub centers: Vec<T>,
}

/// Transmission peaks of a spectrum with the default options.
pub fn find_doublet<T: Real>(trace: &SpectrumTrace<T>) -> DoubletReport<T> {
    find_doublet_with(trace, &PeakOptions::default())
}

pub fn find_doublet_with<T: Real>(trace: &SpectrumTrace<T>, opts: &PeakOptions<T>) -> DoubletReport<T> {
    let x = trace.deltas();
    let raw = trace.transmission();
    let y = if opts.smooth { moving_average(&raw, 2) } else { raw };
    let centers = locate_peaks(&x, &y, opts.min_prominence);
    let separation = if centers.len() == 2 {
        (centers[1] - centers[0]).abs()
    } else {
        T::zero()
    };
    DoubletReport {
        n_peaks: centers.len(),
        separation,
        centers,
    }
}

/// Centred moving average with window `2·half + 1`, shrinking at the edges.
pub fn moving_average<T: Real>(y: &[T], half: usize) -> Vec<T> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let sum = y[lo..=hi].iter().fold(T::zero(), |s, v| s + *v);
            sum / T::from_usize(hi - lo + 1).unwrap()
        })
        .collect()
}

/// Interior local maxima whose topographic prominence is at least
/// `min_prominence · max(y)`, refined by a three-point parabola.
pub fn locate_peaks<T: Real>(x: &[T], y: &[T], min_prominence: T) -> Vec<T> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let global = y.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
    let floor = min_prominence * global;
    let mut centers = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        if prominence(y, i) < floor {
            continue;
        }
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let denom = a - lit::<T>(2.0) * b + c;
        let shift = if denom < T::zero() {
            lit::<T>(0.5) * (a - c) / denom
        } else {
            T::zero()
        };
        let step = if shift >= T::zero() { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
        centers.push(x[i] + shift * step);
    }
    centers
}

fn prominence<T: Real>(y: &[T], i: usize) -> T {
    let peak = y[i];
    let mut left_min = peak;
    for j in (0..i).rev() {
        if y[j] > peak {
            break;
        }
        left_min = left_min.min(y[j]);
    }
    let mut right_min = peak;
    for &v in &y[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}
