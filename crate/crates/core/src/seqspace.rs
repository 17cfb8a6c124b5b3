//! Finite windows of the weighted sequence spaces `X_n` and `X_w`.
//!
//! Indices are absolute: a window `[k_min, k_max]` may straddle zero and weights are always
//! evaluated at the absolute index.

use std::fmt;
use std::io::{Read, Write};

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Closed integer index range `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub k_min: i64,
    pub k_max: i64,
}

impl Window {
    pub fn new(k_min: i64, k_max: i64) -> Self {
        assert!(k_min <= k_max, "empty window [{k_min}, {k_max}]");
        Window { k_min, k_max }
    }

    /// Symmetric window `[-half, half]`.
    pub fn centered(half: i64) -> Self {
        Window::new(-half, half)
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64) -> bool {
        self.k_min <= k && k <= self.k_max
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.k_min <= other.k_min && other.k_max <= self.k_max
    }

    pub fn shifted(&self, j: i64) -> Window {
        Window::new(self.k_min + j, self.k_max + j)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }

    /// Offset of `k` inside the window.
    pub fn offset(&self, k: i64) -> usize {
        debug_assert!(self.contains(k));
        (k - self.k_min) as usize
    }

    /// Largest `|k|` over the window.
    pub fn max_abs(&self) -> i64 {
        self.k_min.abs().max(self.k_max.abs())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.k_min, self.k_max)
    }
}

/// Grade `n` of the norm `||η||_n = sup_k exp(−|k|/n) |η_k|`; `Infinity` has weight 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grade {
    Finite(u32),
    Infinity,
}

impl Grade {
    pub fn finite(n: u32) -> Self {
        assert!(n >= 1, "grade must be >= 1");
        Grade::Finite(n)
    }

    /// `1/n`, zero for the infinite grade.
    pub fn inv(&self) -> f64 {
        match *self {
            Grade::Finite(n) => 1.0 / n as f64,
            Grade::Infinity => 0.0,
        }
    }

    pub fn weight(&self, k: i64) -> f64 {
        (-(k.abs() as f64) * self.inv()).exp()
    }

    /// Consecutive weight ratio bound `exp(1/n)`.
    pub fn ratio_bound(&self) -> f64 {
        self.inv().exp()
    }

    /// Doubles a finite grade; infinity stays infinity.
    pub fn doubled(&self) -> Grade {
        match *self {
            Grade::Finite(n) => Grade::Finite(2 * n),
            Grade::Infinity => Grade::Infinity,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Grade::Infinity)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Finite(n) => write!(f, "{n}"),
            Grade::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Grade::Finite(n) => s.serialize_u32(*n),
            Grade::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Grade {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(0) => Err(serde::de::Error::custom("grade must be >= 1")),
            Raw::N(n) => Ok(Grade::Finite(n)),
            Raw::S(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(Grade::Infinity),
                other => other
                    .parse::<u32>()
                    .ok()
                    .filter(|n| *n >= 1)
                    .map(Grade::Finite)
                    .ok_or_else(|| serde::de::Error::custom(format!("invalid grade {other:?}"))),
            },
        }
    }
}

/// Explicit positive weights over a window, as in `X_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    pub k_min: i64,
    pub weights: Vec<f64>,
    pub ratio_bound: f64,
}

impl WeightSequence {
    pub fn new(k_min: i64, weights: Vec<f64>) -> Result<Self> {
        let ratio_bound = validate_weights(&weights)?;
        Ok(WeightSequence { k_min, weights, ratio_bound })
    }

    pub fn window(&self) -> Window {
        Window::new(self.k_min, self.k_min + self.weights.len() as i64 - 1)
    }
}

/// Anything that assigns a weight to an absolute index.
pub trait Weighting {
    /// `None` when `k` lies outside the weight's domain.
    fn weight_at(&self, k: i64) -> Option<f64>;
}

impl Weighting for Grade {
    fn weight_at(&self, k: i64) -> Option<f64> {
        Some(self.weight(k))
    }
}

impl Weighting for WeightSequence {
    fn weight_at(&self, k: i64) -> Option<f64> {
        if k < self.k_min {
            return None;
        }
        self.weights.get((k - self.k_min) as usize).copied()
    }
}

/// Returns `max_k max(w_{k−1}/w_k, w_k/w_{k−1})`; any `b` above it satisfies the ratio
/// condition strictly. A single weight gives 1.
pub fn validate_weights(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::Validation("empty weight sequence".into()));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::Validation(format!("weight {i} is not a positive finite number: {w}")));
    }
    let b = weights
        .windows(2)
        .map(|p| (p[0] / p[1]).max(p[1] / p[0]))
        .fold(1.0_f64, f64::max);
    Ok(b)
}

/// Finite window of tangent vectors `η_k ∈ R^d`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSequence {
    k_min: i64,
    d: usize,
    data: Vec<f64>,
}

impl TangentSequence {
    pub fn new(k_min: i64, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Dimension("sequence needs at least one vector".into()));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::Dimension("vectors must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(d * vectors.len());
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::Dimension(format!(
                    "vector at k = {} has dimension {}, expected {d}",
                    k_min + i as i64,
                    v.len()
                )));
            }
            data.extend_from_slice(v);
        }
        Self::from_flat(k_min, d, data)
    }

    pub fn from_flat(k_min: i64, d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 || data.is_empty() || data.len() % d != 0 {
            return Err(Error::Dimension(format!(
                "flat data of length {} does not split into vectors of dimension {d}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("entry {} at k = {}", pos % d, k_min + (pos / d) as i64)));
        }
        Ok(TangentSequence { k_min, d, data })
    }

    pub fn zeros(window: Window, d: usize) -> Self {
        TangentSequence { k_min: window.k_min, d, data: vec![0.0; window.len() * d] }
    }

    /// `θ` at index `at`, zero elsewhere.
    pub fn delta(window: Window, at: i64, theta: &[f64]) -> Self {
        let mut s = Self::zeros(window, theta.len());
        s.get_mut(at).copy_from_slice(theta);
        s
    }

    pub fn window(&self) -> Window {
        Window::new(self.k_min, self.k_min + self.len() as i64 - 1)
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, k: i64) -> &[f64] {
        let o = (k - self.k_min) as usize * self.d;
        &self.data[o..o + self.d]
    }

    pub fn get_mut(&mut self, k: i64) -> &mut [f64] {
        let o = (k - self.k_min) as usize * self.d;
        &mut self.data[o..o + self.d]
    }

    pub fn vector(&self, k: i64) -> DVector<f64> {
        DVector::from_column_slice(self.get(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[f64])> {
        let k_min = self.k_min;
        self.data.chunks(self.d).enumerate().map(move |(i, v)| (k_min + i as i64, v))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    pub fn from_dvector(k_min: i64, d: usize, v: &DVector<f64>) -> Result<Self> {
        Self::from_flat(k_min, d, v.as_slice().to_vec())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.k_min != other.k_min || self.d != other.d || self.data.len() != other.data.len() {
            return Err(Error::Dimension(format!(
                "sequences on {} (d = {}) and {} (d = {})",
                self.window(),
                self.d,
                other.window(),
                other.d
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(TangentSequence { k_min: self.k_min, d: self.d, data })
    }

    pub fn scaled(&self, a: f64) -> Self {
        TangentSequence { k_min: self.k_min, d: self.d, data: self.data.iter().map(|x| a * x).collect() }
    }

    /// `sup_k |η_k|`.
    pub fn sup_norm(&self) -> f64 {
        self.data.chunks(self.d).map(euclid).fold(0.0, f64::max)
    }

    /// Copy restricted to a sub-window.
    pub fn restrict(&self, window: Window) -> Result<Self> {
        if !self.window().covers(&window) {
            return Err(Error::Dimension(format!("{} does not cover {}", self.window(), window)));
        }
        let o = self.window().offset(window.k_min) * self.d;
        Ok(TangentSequence {
            k_min: window.k_min,
            d: self.d,
            data: self.data[o..o + window.len() * self.d].to_vec(),
        })
    }

    /// CSV with header `k,v_1,...,v_d`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["k".to_string()];
        header.extend((1..=self.d).map(|i| format!("v_{i}")));
        wr.write_record(&header)?;
        for (k, v) in self.iter() {
            let mut row = vec![k.to_string()];
            row.extend(v.iter().map(|x| x.to_string()));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let rows = read_indexed_csv(r)?;
        let k_min = check_contiguous(&rows)?;
        Self::new(k_min, rows.into_iter().map(|(_, v)| v).collect())
    }

    /// JSON array of `{k, v}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter().map(|(k, v)| serde_json::json!({ "k": k, "v": v })).collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Entry {
            k: i64,
            v: Vec<f64>,
        }
        let entries: Vec<Entry> = serde_json::from_value(value.clone())?;
        let rows: Vec<(i64, Vec<f64>)> = entries.into_iter().map(|e| (e.k, e.v)).collect();
        let k_min = check_contiguous(&rows)?;
        Self::new(k_min, rows.into_iter().map(|(_, v)| v).collect())
    }
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Reads rows `k, x_1, ..., x_d` after a header line.
pub(crate) fn read_indexed_csv<R: Read>(r: R) -> Result<Vec<(i64, Vec<f64>)>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mut it = rec.iter();
        let k: i64 = it
            .next()
            .ok_or_else(|| Error::Parse("empty CSV row".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("index column: {e}")))?;
        let v = it
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row k = {k}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((k, v));
    }
    Ok(rows)
}

pub(crate) fn check_contiguous<T>(rows: &[(i64, T)]) -> Result<i64> {
    let Some((k_min, _)) = rows.first() else {
        return Err(Error::Parse("no rows".into()));
    };
    for (i, (k, _)) in rows.iter().enumerate() {
        if *k != k_min + i as i64 {
            return Err(Error::Parse(format!("indices must be contiguous; found {k} at row {i}")));
        }
    }
    Ok(*k_min)
}

/// `sup_k w(k)|η_k|`.
pub fn weighted_norm<W: Weighting + ?Sized>(seq: &TangentSequence, grade: &W) -> Result<f64> {
    let mut best = 0.0_f64;
    for (k, v) in seq.iter() {
        let w = grade
            .weight_at(k)
            .ok_or_else(|| Error::Dimension(format!("weights do not cover index {k}")))?;
        best = best.max(w * euclid(v));
    }
    Ok(best)
}

/// `(shift(s, j))_k = s_{k−j}`: the window moves by `j`.
pub fn shift(seq: &TangentSequence, j: i64) -> TangentSequence {
    TangentSequence { k_min: seq.k_min + j, d: seq.d, data: seq.data.clone() }
}
