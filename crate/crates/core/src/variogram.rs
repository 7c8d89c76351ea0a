//! Point data and the classical (Matheron) empirical semivariogram.
//!
//! ```text
//! γ̂(h) = 1 / (2 N(h)) Σ_{pairs in bin} (Z(u_i) - Z(u_j))²
//! ```
//!
//! Pairs are binned by distance into `n_bins` equal-width bins
//! `(0, w], (w, 2w], ..., ((k-1)w, max_lag]`; each bin is reported at the
//! mean distance of its pairs and empty bins are dropped.

use crate::error::{Error, Result};

/// A location in up to three dimensions; unused trailing coordinates are 0.
pub type Point = [f64; 3];

/// Locations closer than this are considered duplicates.
pub const DUPLICATE_TOL: f64 = 1e-9;

pub fn distance(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Scalar observations at distinct locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    locations: Vec<Point>,
    values: Vec<f64>,
}

impl Dataset {
    /// Validates and builds a dataset. Each coordinate slice must have
    /// exactly `dim` entries.
    pub fn new(dim: usize, coords: &[Vec<f64>], values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Data(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if coords.len() != values.len() {
            return Err(Error::Data(format!(
                "{} locations but {} values",
                coords.len(),
                values.len()
            )));
        }
        let mut locations = Vec::with_capacity(coords.len());
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::Data(format!(
                    "location {i} has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(c);
            locations.push(p);
        }
        Self::from_points(dim, locations, values)
    }

    pub fn from_points(dim: usize, locations: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Data(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if locations.len() != values.len() {
            return Err(Error::Data(format!(
                "{} locations but {} values",
                locations.len(),
                values.len()
            )));
        }
        if locations.len() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 points, got {}",
                locations.len()
            )));
        }
        for (i, (p, v)) in locations.iter().zip(&values).enumerate() {
            if !v.is_finite() || p.iter().any(|c| !c.is_finite()) {
                return Err(Error::Data(format!("point {i} has a non-finite entry")));
            }
            if p[dim..].iter().any(|&c| c != 0.0) {
                return Err(Error::Data(format!(
                    "point {i} has coordinates beyond dimension {dim}"
                )));
            }
        }
        let dups = duplicate_pairs(&locations);
        if !dups.is_empty() {
            let listed: Vec<String> = dups.iter().map(|(a, b)| format!("{a}~{b}")).collect();
            return Err(Error::Data(format!(
                "duplicate locations (within {DUPLICATE_TOL:e}): {}",
                listed.join(", ")
            )));
        }
        Ok(Self {
            dim,
            locations,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance of the values.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        ss / (self.values.len() - 1) as f64
    }

    /// Same locations, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::Data(format!(
                "expected {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value".into()));
        }
        Ok(Self {
            dim: self.dim,
            locations: self.locations.clone(),
            values,
        })
    }

    /// Smallest and largest distance over all unordered pairs.
    pub fn pair_distance_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (i, a) in self.locations.iter().enumerate() {
            for b in &self.locations[i + 1..] {
                let d = distance(a, b);
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        (lo, hi)
    }
}

fn duplicate_pairs(locations: &[Point]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..locations.len()).collect();
    order.sort_by(|&a, &b| locations[a][0].total_cmp(&locations[b][0]));
    let mut dups = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if locations[j][0] - locations[i][0] > DUPLICATE_TOL {
                break;
            }
            if distance(&locations[i], &locations[j]) <= DUPLICATE_TOL {
                dups.push((i.min(j), i.max(j)));
            }
        }
    }
    dups.sort_unstable();
    dups
}

/// Requested binning; `max_lag = None` means half the largest pair distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinningConfig {
    pub n_bins: usize,
    pub max_lag: Option<f64>,
}

impl BinningConfig {
    pub fn new(n_bins: usize, max_lag: Option<f64>) -> Self {
        Self { n_bins, max_lag }
    }

    /// Fixes `max_lag` against a dataset.
    pub fn resolve(&self, data: &Dataset) -> Result<Binning> {
        let max_lag = match self.max_lag {
            Some(l) => l,
            None => 0.5 * data.pair_distance_range().1,
        };
        Binning::new(self.n_bins, max_lag)
    }
}

/// Equal-width distance bins on `(0, max_lag]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    n_bins: usize,
    max_lag: f64,
}

impl Binning {
    pub fn new(n_bins: usize, max_lag: f64) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidParameter("n_bins must be at least 1".into()));
        }
        if !(max_lag.is_finite() && max_lag > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "max_lag must be positive and finite, got {max_lag}"
            )));
        }
        Ok(Self { n_bins, max_lag })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn max_lag(&self) -> f64 {
        self.max_lag
    }

    pub fn width(&self) -> f64 {
        self.max_lag / self.n_bins as f64
    }

    /// Bin of a pair at distance `d`, or `None` past `max_lag`.
    pub fn bin_of(&self, d: f64) -> Option<usize> {
        if d > self.max_lag {
            return None;
        }
        let idx = (d / self.width()).ceil() as usize;
        Some(idx.saturating_sub(1).min(self.n_bins - 1))
    }
}

/// Unordered pairs within `max_lag`, with their bins, computed once per set
/// of locations so that several value vectors can share the binning.
#[derive(Debug, Clone)]
pub struct LagPairs {
    binning: Binning,
    pairs: Vec<(u32, u32, u32)>,
    centers: Vec<f64>,
    counts: Vec<usize>,
}

impl LagPairs {
    pub fn new(locations: &[Point], binning: Binning) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut dist_sum = vec![0.0; binning.n_bins];
        let mut counts = vec![0usize; binning.n_bins];
        for (i, a) in locations.iter().enumerate() {
            for (j, b) in locations.iter().enumerate().skip(i + 1) {
                let d = distance(a, b);
                if let Some(bin) = binning.bin_of(d) {
                    pairs.push((i as u32, j as u32, bin as u32));
                    dist_sum[bin] += d;
                    counts[bin] += 1;
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::Data(format!(
                "no pairs within max_lag = {}",
                binning.max_lag
            )));
        }
        let centers = dist_sum
            .iter()
            .zip(&counts)
            .map(|(&s, &n)| if n > 0 { s / n as f64 } else { f64::NAN })
            .collect();
        Ok(Self {
            binning,
            pairs,
            centers,
            counts,
        })
    }

    pub fn binning(&self) -> Binning {
        self.binning
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Applies the moment estimator to `values` (indexed like the locations).
    pub fn estimate(&self, values: &[f64]) -> EmpiricalVariogram {
        let mut sums = vec![0.0; self.binning.n_bins];
        for &(i, j, bin) in &self.pairs {
            let diff = values[i as usize] - values[j as usize];
            sums[bin as usize] += diff * diff;
        }
        let mut out = EmpiricalVariogram {
            bin_centers: Vec::new(),
            estimates: Vec::new(),
            counts: Vec::new(),
            bin_index: Vec::new(),
            max_lag: self.binning.max_lag,
            n_bins: self.binning.n_bins,
        };
        for (bin, &n) in self.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            out.bin_centers.push(self.centers[bin]);
            out.estimates.push(sums[bin] / (2.0 * n as f64));
            out.counts.push(n);
            out.bin_index.push(bin);
        }
        out
    }
}

/// Binned semivariogram estimates with pair counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    bin_centers: Vec<f64>,
    estimates: Vec<f64>,
    counts: Vec<usize>,
    bin_index: Vec<usize>,
    max_lag: f64,
    n_bins: usize,
}

impl EmpiricalVariogram {
    /// Builds a variogram from already-binned values, e.g. for synthetic
    /// fitting problems. Centers must be strictly increasing and positive,
    /// estimates non-negative, counts positive.
    pub fn from_parts(bin_centers: Vec<f64>, estimates: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let k = bin_centers.len();
        if k == 0 || estimates.len() != k || counts.len() != k {
            return Err(Error::Data(format!(
                "inconsistent variogram lengths: {k} centers, {} estimates, {} counts",
                estimates.len(),
                counts.len()
            )));
        }
        if bin_centers.iter().any(|h| !(h.is_finite() && *h > 0.0))
            || bin_centers.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Data(
                "bin centers must be positive and strictly increasing".into(),
            ));
        }
        if estimates.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Data("estimates must be finite and non-negative".into()));
        }
        if counts.iter().any(|&n| n == 0) {
            return Err(Error::Data("pair counts must be positive".into()));
        }
        let max_lag = bin_centers[k - 1];
        Ok(Self {
            bin_centers,
            estimates,
            counts,
            bin_index: (0..k).collect(),
            max_lag,
            n_bins: k,
        })
    }

    pub fn bin_centers(&self) -> &[f64] {
        &self.bin_centers
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Index of each retained bin within the full binning.
    pub fn bin_index(&self) -> &[usize] {
        &self.bin_index
    }

    pub fn max_lag(&self) -> f64 {
        self.max_lag
    }

    /// Number of bins requested, including any that were dropped.
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Number of retained (non-empty) bins.
    pub fn len(&self) -> usize {
        self.bin_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bin_centers.is_empty()
    }
}

/// Empirical semivariogram of `data` with equal-width bins.
pub fn empirical_variogram(data: &Dataset, config: BinningConfig) -> Result<EmpiricalVariogram> {
    let binning = config.resolve(data)?;
    Ok(LagPairs::new(data.locations(), binning)?.estimate(data.values()))
}
