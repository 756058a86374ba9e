//! Signed peak layouts `P_i(r) = r B_i` and their pair statistics.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction_constants::ReductionParameters;
use crate::log_inv_eps2;

/// Distances closer than this are one spectrum entry.
pub const DISTANCE_TOL: f64 = 1e-12;
/// Spectrum multipliers are rounded to this grid so that configurations
/// differing by an orthogonal map produce identical spectra.
const CANONICAL_GRID: f64 = 1099511627776.0; // 2^40

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    Simplex,
    Hypercube,
    Cross,
    Dodecahedron,
    Icosahedron,
    Cell600,
}

impl PolytopeKind {
    pub const ALL: [PolytopeKind; 6] = [
        PolytopeKind::Simplex,
        PolytopeKind::Hypercube,
        PolytopeKind::Cross,
        PolytopeKind::Dodecahedron,
        PolytopeKind::Icosahedron,
        PolytopeKind::Cell600,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Hypercube => "hypercube",
            PolytopeKind::Cross => "cross",
            PolytopeKind::Dodecahedron => "dodecahedron",
            PolytopeKind::Icosahedron => "icosahedron",
            PolytopeKind::Cell600 => "cell600",
        }
    }

    /// The only realizable `h` for kinds tied to one dimension.
    fn fixed_rank(self) -> Option<usize> {
        match self {
            PolytopeKind::Dodecahedron | PolytopeKind::Icosahedron => Some(3),
            PolytopeKind::Cell600 => Some(4),
            _ => None,
        }
    }

    /// Vertices in `ℝʰ` with circumradius 1.
    pub fn vertices(self, h: usize) -> Result<Vec<Vec<f64>>> {
        if h < 2 {
            return Err(Error::UnknownPolytope(format!("{} in dimension {h}", self.name())));
        }
        if let Some(rank) = self.fixed_rank() {
            if rank != h {
                return Err(Error::UnknownPolytope(format!(
                    "{} exists only with h = {rank}, got h = {h}",
                    self.name()
                )));
            }
        }
        let raw = match self {
            PolytopeKind::Simplex => simplex(h),
            PolytopeKind::Hypercube => (0..1usize << h)
                .map(|bits| {
                    (0..h)
                        .map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 })
                        .collect()
                })
                .collect(),
            PolytopeKind::Cross => (0..h)
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| {
                        let mut v = vec![0.0; h];
                        v[i] = s;
                        v
                    })
                })
                .collect(),
            PolytopeKind::Dodecahedron => dodecahedron(),
            PolytopeKind::Icosahedron => icosahedron(),
            PolytopeKind::Cell600 => cell600(),
        };
        Ok(raw
            .into_iter()
            .map(|v| {
                let n = norm(&v);
                v.into_iter().map(|c| c / n).collect()
            })
            .collect())
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PolytopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolytopeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownPolytope(s.to_string()))
    }
}

fn simplex(h: usize) -> Vec<Vec<f64>> {
    let hf = h as f64;
    let c = (1.0 - (hf + 1.0).sqrt()) / hf;
    let mut pts: Vec<Vec<f64>> = (0..h)
        .map(|i| {
            let mut v = vec![0.0; h];
            v[i] = 1.0;
            v
        })
        .collect();
    pts.push(vec![c; h]);
    let centroid: Vec<f64> = (0..h)
        .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / (hf + 1.0))
        .collect();
    pts.iter()
        .map(|p| p.iter().zip(&centroid).map(|(a, b)| a - b).collect())
        .collect()
}

fn golden() -> f64 {
    0.5 * (1.0 + 5f64.sqrt())
}

fn dodecahedron() -> Vec<Vec<f64>> {
    let phi = golden();
    let inv = 1.0 / phi;
    let mut pts = Vec::with_capacity(20);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                pts.push(vec![a, b, c]);
            }
        }
    }
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            pts.push(vec![0.0, a * inv, b * phi]);
            pts.push(vec![a * inv, b * phi, 0.0]);
            pts.push(vec![a * phi, 0.0, b * inv]);
        }
    }
    pts
}

fn icosahedron() -> Vec<Vec<f64>> {
    let phi = golden();
    let mut pts = Vec::with_capacity(12);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            pts.push(vec![0.0, a, b * phi]);
            pts.push(vec![a, b * phi, 0.0]);
            pts.push(vec![b * phi, 0.0, a]);
        }
    }
    pts
}

fn cell600() -> Vec<Vec<f64>> {
    let phi = golden();
    let mut pts = Vec::with_capacity(120);
    for bits in 0..16usize {
        pts.push((0..4).map(|i| if bits >> i & 1 == 1 { -0.5 } else { 0.5 }).collect());
    }
    for i in 0..4 {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; 4];
            v[i] = s;
            pts.push(v);
        }
    }
    let base = [0.5 * phi, 0.5, 0.5 / phi, 0.0];
    for perm in even_permutations_4() {
        for bits in 0..8usize {
            // Signs on the three nonzero entries of the base vector.
            let mut v = vec![0.0; 4];
            for (slot, &src) in perm.iter().enumerate() {
                let mut c = base[src];
                if src < 3 && bits >> src & 1 == 1 {
                    c = -c;
                }
                v[slot] = c;
            }
            pts.push(v);
        }
    }
    pts
}

fn even_permutations_4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(12);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if !distinct {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    if inversions % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Which theorem family a configuration belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum Family {
    Polygon { k: usize },
    Polytope { kind: PolytopeKind, h: usize, q: usize },
    Nested { k: usize, m: usize },
    Rings { q: usize, m1: usize, m2: usize },
    Raw,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Polygon { .. } => "polygon",
            Family::Polytope { .. } => "polytope",
            Family::Nested { .. } => "nested",
            Family::Rings { .. } => "rings",
            Family::Raw => "raw",
        }
    }
}

/// One group of equal pair distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub multiplier: f64,
    pub same_sign: usize,
    pub opposite_sign: usize,
}

impl SpectrumEntry {
    pub fn count(&self) -> usize {
        self.same_sign + self.opposite_sign
    }

    /// `Σ λ_i λ_j` over the ordered pairs of this entry.
    pub fn sign_sum(&self) -> i64 {
        self.same_sign as i64 - self.opposite_sign as i64
    }
}

/// Ordered-pair distance statistics, sorted by multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl DistanceSpectrum {
    pub fn total_pairs(&self) -> usize {
        self.entries.iter().map(SpectrumEntry::count).sum()
    }

    pub fn min_multiplier(&self) -> Option<f64> {
        self.entries.first().map(|e| e.multiplier)
    }

    pub fn max_multiplier(&self) -> Option<f64> {
        self.entries.last().map(|e| e.multiplier)
    }
}

/// Signed base points; peaks sit at `r B_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakConfiguration {
    dimension: usize,
    points: Vec<Vec<f64>>,
    signs: Vec<i8>,
    family: Family,
    spectrum: DistanceSpectrum,
    dominant_gap: f64,
    d_max: f64,
}

impl PeakConfiguration {
    /// Center `+` and `k` vertices `-` of the unit regular `k`-gon.
    pub fn polygon(k: usize, dimension: usize) -> Result<Self> {
        if k <= 6 {
            return Err(Error::TooFewVertices(k));
        }
        check_dimension(dimension, 2)?;
        let mut points = vec![vec![0.0; dimension]];
        let mut signs = vec![1];
        for i in 0..k {
            points.push(planar(dimension, 1.0, 2.0 * PI * i as f64 / k as f64));
            signs.push(-1);
        }
        Self::build(dimension, points, signs, Family::Polygon { k }, Some(2.0))
    }

    /// Center `+` and the vertices `-` of a regular polytope in the first `h` coordinates.
    pub fn polytope(kind: PolytopeKind, h: usize, dimension: usize) -> Result<Self> {
        if h > dimension {
            return Err(Error::UnknownPolytope(format!(
                "{kind} needs h = {h} ≤ N = {dimension}"
            )));
        }
        check_dimension(dimension, h)?;
        let verts = kind.vertices(h)?;
        let mut points = vec![vec![0.0; dimension]];
        let mut signs = vec![1];
        for v in &verts {
            let mut p = vec![0.0; dimension];
            p[..h].copy_from_slice(v);
            points.push(p);
            signs.push(-1);
        }
        let side = verts[1..]
            .iter()
            .map(|v| distance(&verts[0], v))
            .fold(f64::INFINITY, f64::min);
        let q = verts[1..]
            .iter()
            .filter(|v| (distance(&verts[0], v) - side).abs() <= DISTANCE_TOL)
            .count();
        let unit = (side - 1.0).abs() <= DISTANCE_TOL;
        let ok = if h > 2 { side < 1.0 || unit } else { side < 1.0 && !unit };
        if !ok {
            let rule = if h > 2 { "s ≤ 1 (h > 2)" } else { "s < 1 (h = 2)" };
            return Err(Error::ConditionViolated(format!(
                "{kind} with h = {h} has side s = {side:.12}, violating {rule}"
            )));
        }
        if unit && q == 2 {
            return Err(Error::ConditionViolated(format!(
                "{kind} with h = {h}: s = 1 and q = 2 leave no leading interaction"
            )));
        }
        Self::build(dimension, points, signs, Family::Polytope { kind, h, q }, Some(2.0))
    }

    /// Center `+`, unit `k`-gon `-`, and the `km`-gon of radius 2 `+`.
    pub fn nested(k: usize, m: usize, dimension: usize) -> Result<Self> {
        if k < 2 || m < 1 {
            return Err(Error::DegenerateFamily(format!(
                "nested polygons need k ≥ 2 and m ≥ 1, got k = {k}, m = {m}"
            )));
        }
        check_dimension(dimension, 2)?;
        if !nested_condition(k, m) {
            return Err(Error::ConditionViolated(format!(
                "k > min{{6, π/(m·arcsin(1/4))}} fails: k = {k}, min{{6, {:.6}}}",
                PI / (m as f64 * 0.25f64.asin())
            )));
        }
        let km = k * m;
        let mut points = vec![vec![0.0; dimension]];
        let mut signs = vec![1];
        for j in 0..k {
            points.push(planar(dimension, 1.0, 2.0 * PI * (j * m) as f64 / km as f64));
            signs.push(-1);
        }
        for i in 0..km {
            points.push(planar(dimension, 2.0, 2.0 * PI * i as f64 / km as f64));
            signs.push(1);
        }
        Self::build(dimension, points, signs, Family::Nested { k, m }, Some(4.0))
    }

    /// `2q` rays at angles `π(i-1)/q`; odd rays carry `m1` peaks `-`,
    /// even rays `m2` peaks `+`, at radii `1 + (j-1) sin(π/2q)`.
    pub fn rings(q: usize, m1: usize, m2: usize, dimension: usize) -> Result<Self> {
        if q < 2 || m1 < 1 || m2 < 1 {
            return Err(Error::InvalidInput(format!(
                "rings need q ≥ 2, m1, m2 ≥ 1; got q = {q}, m1 = {m1}, m2 = {m2}"
            )));
        }
        if m1 == 1 && m2 == 1 {
            return Err(Error::DegenerateFamily(
                "rings with m1 = m2 = 1 have no same-ray pair; leading multiplicity 2(k+h)-4q = 0".into(),
            ));
        }
        check_dimension(dimension, 2)?;
        let sq = (PI / (2.0 * q as f64)).sin();
        let mut points = Vec::new();
        let mut signs = Vec::new();
        for i in 1..=2 * q {
            let odd = i % 2 == 1;
            let (count, sign) = if odd { (m1, -1) } else { (m2, 1) };
            let angle = PI * (i - 1) as f64 / q as f64;
            for j in 1..=count {
                points.push(planar(dimension, 1.0 + (j - 1) as f64 * sq, angle));
                signs.push(sign);
            }
        }
        let d = m1.max(m2) as f64;
        let bound = 2.0 * (1.0 + (d - 1.0) * sq);
        Self::build(dimension, points, signs, Family::Rings { q, m1, m2 }, Some(bound))
    }

    /// Arbitrary signed points; no admissibility guarantees.
    pub fn raw(points: Vec<Vec<f64>>, signs: Vec<i8>) -> Result<Self> {
        let dimension = points.first().map(Vec::len).unwrap_or(0);
        if points.is_empty() || points.iter().any(|p| p.len() != dimension) {
            return Err(Error::InvalidInput("points must be non-empty and share one dimension".into()));
        }
        if signs.len() != points.len() || signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidInput("one sign ±1 per point required".into()));
        }
        check_dimension(dimension, 1)?;
        Self::build(dimension, points, signs, Family::Raw, None)
    }

    fn build(
        dimension: usize,
        points: Vec<Vec<f64>>,
        signs: Vec<i8>,
        family: Family,
        d_bound: Option<f64>,
    ) -> Result<Self> {
        let spectrum = compute_spectrum(&points, &signs);
        if points.len() > 1 {
            let gap = spectrum.min_multiplier().unwrap_or(0.0);
            if gap <= DISTANCE_TOL {
                return Err(Error::InvalidInput("base points must be distinct".into()));
            }
        }
        let dominant_gap = spectrum.min_multiplier().unwrap_or(0.0);
        let d_max = d_bound.unwrap_or_else(|| spectrum.max_multiplier().unwrap_or(0.0));
        Ok(Self {
            dimension,
            points,
            signs,
            family,
            spectrum,
            dominant_gap,
            d_max,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Smallest pairwise `|B_i - B_j|`.
    pub fn dominant_gap(&self) -> f64 {
        self.dominant_gap
    }

    /// Diameter bound used for the upper end of the admissible range.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Exact largest pairwise distance.
    pub fn max_distance(&self) -> f64 {
        self.spectrum.max_multiplier().unwrap_or(0.0)
    }

    pub fn spectrum(&self) -> &DistanceSpectrum {
        &self.spectrum
    }

    /// Applies a linear map to every base point, keeping the family tag.
    pub fn transformed<F: Fn(&[f64]) -> Vec<f64>>(&self, map: F) -> Result<Self> {
        let points: Vec<Vec<f64>> = self.points.iter().map(|p| map(p)).collect();
        let mut out = Self::build(self.dimension, points, self.signs.clone(), self.family.clone(), None)?;
        out.d_max = self.d_max;
        Ok(out)
    }

    /// Same configuration with every sign flipped.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.signs.iter_mut().for_each(|s| *s = -*s);
        out
    }

    /// Whether `other` is the same signed point set up to ordering.
    pub fn same_signed_set(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut used = vec![false; other.len()];
        self.points.iter().zip(&self.signs).all(|(p, s)| {
            let hit = other.points.iter().zip(&other.signs).enumerate().find(|(j, (q, t))| {
                !used[*j] && s == *t && distance(p, q) <= 1e-10
            });
            match hit {
                Some((j, _)) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }

    /// Generators of the declared symmetry group, as maps on `ℝᴺ`.
    pub fn symmetry_generators(&self) -> Vec<SymmetryMap> {
        match &self.family {
            Family::Polygon { k } | Family::Nested { k, .. } => {
                vec![SymmetryMap::Rotation(2.0 * PI / *k as f64)]
            }
            Family::Rings { q, .. } => vec![SymmetryMap::Rotation(2.0 * PI / *q as f64)],
            Family::Polytope { .. } => {
                // Reflections swapping the first vertex with each neighbor
                // generate the Coxeter group.
                let v0 = &self.points[1];
                self.points[2..]
                    .iter()
                    .filter(|v| (distance(v0, v) - self.dominant_gap).abs() <= 1e-9)
                    .map(|v| {
                        let diff: Vec<f64> = v0.iter().zip(v.iter()).map(|(a, b)| a - b).collect();
                        let n = norm(&diff);
                        SymmetryMap::Reflection(diff.into_iter().map(|c| c / n).collect())
                    })
                    .collect()
            }
            Family::Raw => Vec::new(),
        }
    }

    /// True iff every pair distance `r|B_i - B_j|` lies strictly inside
    /// `(β² ε log(1/ε²), ε log(1/ε²)²)`.
    pub fn gamma_membership(&self, r: f64, eps: f64, params: &ReductionParameters) -> bool {
        if !(eps > 0.0 && eps < 1.0 && r > 0.0) {
            return false;
        }
        let l = log_inv_eps2(eps);
        let lo = params.beta * params.beta * eps * l;
        let hi = eps * l * l;
        match (self.spectrum.min_multiplier(), self.spectrum.max_multiplier()) {
            (Some(a), Some(b)) => r * a > lo && r * b < hi,
            _ => true,
        }
    }

    /// `R_ε = (s ε log(1/ε²), ε log(1/ε²)² / d_max)`.
    pub fn admissible_range(&self, eps: f64) -> Result<(f64, f64)> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::DomainViolation {
                value: eps,
                reason: "ε must lie in (0, 1)".into(),
            });
        }
        let l = log_inv_eps2(eps);
        let lo = self.dominant_gap * eps * l;
        let hi = eps * l * l / self.d_max;
        if lo >= hi {
            return Err(Error::EmptyRange { eps, lo, hi });
        }
        Ok((lo, hi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (family, params) = match serde_json::to_value(&self.family).expect("family serializes") {
            serde_json::Value::Object(mut m) => (
                m.remove("family").unwrap_or(serde_json::Value::Null),
                m.remove("params").unwrap_or(serde_json::Value::Null),
            ),
            v => (v, serde_json::Value::Null),
        };
        serde_json::json!({
            "family": family,
            "params": params,
            "dimension": self.dimension,
            "dominant_gap": self.dominant_gap,
            "d_max": self.d_max,
            "points": self.points,
            "signs": self.signs,
            "spectrum": self.spectrum.entries,
        })
    }

    /// `index,sign,x1,…,xN` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,sign");
        for i in 1..=self.dimension {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (i, (p, s)) in self.points.iter().zip(&self.signs).enumerate() {
            out.push_str(&format!("{i},{s}"));
            for c in p {
                out.push_str(&format!(",{}", crate::fmt_sig(*c)));
            }
            out.push('\n');
        }
        out
    }
}

/// An orthogonal map acting on the first coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryMap {
    /// Rotation in the `(x₁, x₂)` plane.
    Rotation(f64),
    /// Reflection across the hyperplane orthogonal to a unit vector.
    Reflection(Vec<f64>),
}

impl SymmetryMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SymmetryMap::Rotation(angle) => {
                let (s, c) = angle.sin_cos();
                let mut y = x.to_vec();
                y[0] = c * x[0] - s * x[1];
                y[1] = s * x[0] + c * x[1];
                y
            }
            SymmetryMap::Reflection(n) => {
                let dot: f64 = x.iter().zip(n).map(|(a, b)| a * b).sum();
                x.iter()
                    .enumerate()
                    .map(|(i, &a)| a - 2.0 * dot * n.get(i).copied().unwrap_or(0.0))
                    .collect()
            }
        }
    }
}

/// `k > min{6, π/(m arcsin ¼)}`.
pub fn nested_condition(k: usize, m: usize) -> bool {
    let bound = (PI / (m as f64 * 0.25f64.asin())).min(6.0);
    k as f64 > bound
}

/// `min{2 sin(π/k), 4 sin(π/(mk))}`.
pub fn nested_gap(k: usize, m: usize) -> f64 {
    let inner = 2.0 * (PI / k as f64).sin();
    let outer = 4.0 * (PI / (m * k) as f64).sin();
    inner.min(outer)
}

/// Leading multiplicity `C(k, m)` of the nested family.
pub fn nested_multiplicity(k: usize, m: usize) -> usize {
    let inner = 2.0 * (PI / k as f64).sin();
    let outer = 4.0 * (PI / (m * k) as f64).sin();
    if (inner - outer).abs() <= DISTANCE_TOL {
        2 * k * (1 + m)
    } else if inner < outer {
        2 * k
    } else {
        2 * k * m
    }
}

/// `s < 1`, with `s` within [`DISTANCE_TOL`] of 1 counted as equal.
pub fn gap_below_one(s: f64) -> bool {
    s < 1.0 - DISTANCE_TOL
}

fn check_dimension(dimension: usize, needed: usize) -> Result<()> {
    if dimension < needed.max(1) || dimension > 6 {
        return Err(Error::InvalidInput(format!(
            "dimension {dimension} cannot host this configuration (needs ≥ {needed}, ≤ 6)"
        )));
    }
    Ok(())
}

fn planar(dimension: usize, radius: f64, angle: f64) -> Vec<f64> {
    let mut p = vec![0.0; dimension];
    let (s, c) = angle.sin_cos();
    p[0] = radius * c;
    p[1] = radius * s;
    p
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn canonical(d: f64) -> f64 {
    (d * CANONICAL_GRID).round() / CANONICAL_GRID
}

/// Groups ordered-pair distances within [`DISTANCE_TOL`], tagged by sign product.
pub fn compute_spectrum(points: &[Vec<f64>], signs: &[i8]) -> DistanceSpectrum {
    let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(points.len() * points.len());
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j {
                pairs.push((canonical(distance(&points[i], &points[j])), signs[i] == signs[j]));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut anchor = f64::NAN;
    for (d, same) in pairs {
        let open = entries.last().is_some() && d - anchor <= DISTANCE_TOL;
        if !open {
            anchor = d;
            entries.push(SpectrumEntry {
                multiplier: d,
                same_sign: 0,
                opposite_sign: 0,
            });
        }
        let e = entries.last_mut().expect("entry pushed above");
        if same {
            e.same_sign += 1;
        } else {
            e.opposite_sign += 1;
        }
    }
    DistanceSpectrum { entries }
}
