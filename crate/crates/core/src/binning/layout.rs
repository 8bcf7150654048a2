use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Small-integer interval ratio `m:n`, sitting at rhythm ratio `m / (m + n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerRatio {
    pub m: u32,
    pub n: u32,
}

impl IntegerRatio {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain(format!(
                "integer ratio {m}:{n} needs positive parts"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn one_to_one() -> Self {
        Self { m: 1, n: 1 }
    }

    /// Position in rhythm-ratio space.
    pub fn ratio(&self) -> f64 {
        f64::from(self.m) / f64::from(self.m + self.n)
    }
}

impl fmt::Display for IntegerRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.m, self.n)
    }
}

impl FromStr for IntegerRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, n) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("integer ratio '{s}' must look like m:n")))?;
        let parse = |p: &str| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("integer ratio '{s}' must look like m:n")))
        };
        Self::new(parse(m)?, parse(n)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinRole {
    OnRatio,
    OffRatio,
}

/// How a layout's edges were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutConvention {
    /// The literature's 1:1 bins: off [2/5, 4/9), on [4/9, 5/9), off [5/9, 3/5].
    OneToOne,
    /// Gaps to neighbouring anchors split in thirds. A convention, not a
    /// published bin set (except where it coincides with the 1:1 on-edges).
    Thirds,
    /// Caller-supplied edges; outer bins off, inner bins on.
    Explicit,
}

/// Contiguous bins in rhythm-ratio space around one anchor. Bin `k` spans
/// `[edges[k], edges[k + 1])`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinLayout {
    anchor: Option<IntegerRatio>,
    anchor_r: f64,
    edges: Vec<f64>,
    roles: Vec<BinRole>,
    convention: LayoutConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub role: BinRole,
}

impl Bin {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl BinLayout {
    pub fn new(
        anchor: Option<IntegerRatio>,
        anchor_r: f64,
        edges: Vec<f64>,
        roles: Vec<BinRole>,
        convention: LayoutConvention,
    ) -> Result<Self> {
        if edges.len() < 3 || roles.len() + 1 != edges.len() {
            return Err(Error::invalid(format!(
                "layout needs at least two bins and one role per bin ({} edges, {} roles)",
                edges.len(),
                roles.len()
            )));
        }
        if edges.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::invalid(format!(
                "layout edges must lie in (0, 1): {edges:?}"
            )));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "layout edges must strictly increase: {edges:?}"
            )));
        }
        if !roles.contains(&BinRole::OnRatio) || !roles.contains(&BinRole::OffRatio) {
            return Err(Error::invalid(
                "layout needs at least one on-ratio and one off-ratio bin",
            ));
        }
        let layout = Self {
            anchor,
            anchor_r,
            edges,
            roles,
            convention,
        };
        if !layout
            .bins()
            .any(|b| b.role == BinRole::OnRatio && b.lo <= anchor_r && anchor_r <= b.hi)
        {
            return Err(Error::invalid(format!(
                "anchor {anchor_r} is not inside an on-ratio bin"
            )));
        }
        Ok(layout)
    }

    /// Off [0.4, 4/9), on [4/9, 5/9), off [5/9, 0.6] around 1:1.
    pub fn one_to_one() -> Self {
        Self {
            anchor: Some(IntegerRatio::one_to_one()),
            anchor_r: 0.5,
            edges: vec![0.4, 4.0 / 9.0, 5.0 / 9.0, 0.6],
            roles: vec![BinRole::OffRatio, BinRole::OnRatio, BinRole::OffRatio],
            convention: LayoutConvention::OneToOne,
        }
    }

    /// Explicit edges: the first and last bins are off-ratio, every bin in
    /// between is on-ratio. The anchor is the centre of the on-zone.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 4 {
            return Err(Error::invalid(
                "explicit layouts need at least 4 edges (3 bins)",
            ));
        }
        let bins = edges.len() - 1;
        let roles = (0..bins)
            .map(|k| {
                if k == 0 || k + 1 == bins {
                    BinRole::OffRatio
                } else {
                    BinRole::OnRatio
                }
            })
            .collect();
        let anchor_r = 0.5 * (edges[1] + edges[bins - 1]);
        Self::new(None, anchor_r, edges, roles, LayoutConvention::Explicit)
    }

    /// One layout per anchor. The gap to each neighbouring anchor is cut in
    /// three: the third touching the anchor is on-ratio, the middle third
    /// off-ratio. The outermost anchors mirror their only gap.
    pub fn thirds(anchors: &[IntegerRatio]) -> Result<Vec<Self>> {
        if anchors.len() < 2 {
            return Err(Error::invalid("thirds layout needs at least two anchors"));
        }
        let mut sorted: Vec<IntegerRatio> = anchors.to_vec();
        sorted.sort_by(|x, y| x.ratio().total_cmp(&y.ratio()));
        if let Some(w) = sorted.windows(2).find(|w| w[0].ratio() == w[1].ratio()) {
            return Err(Error::invalid(format!(
                "duplicate anchors {} and {}",
                w[0], w[1]
            )));
        }
        let rs: Vec<f64> = sorted.iter().map(IntegerRatio::ratio).collect();
        (0..sorted.len())
            .map(|i| {
                let r = rs[i];
                let left = if i > 0 { r - rs[i - 1] } else { rs[i + 1] - r };
                let right = if i + 1 < rs.len() {
                    rs[i + 1] - r
                } else {
                    r - rs[i - 1]
                };
                let edges = vec![
                    r - 2.0 * left / 3.0,
                    r - left / 3.0,
                    r,
                    r + right / 3.0,
                    r + 2.0 * right / 3.0,
                ];
                let roles = vec![
                    BinRole::OffRatio,
                    BinRole::OnRatio,
                    BinRole::OnRatio,
                    BinRole::OffRatio,
                ];
                Self::new(Some(sorted[i]), r, edges, roles, LayoutConvention::Thirds)
                    .map_err(|e| e.context(format!("anchor {}", sorted[i])))
            })
            .collect()
    }

    pub fn anchor(&self) -> Option<IntegerRatio> {
        self.anchor
    }

    pub fn anchor_r(&self) -> f64 {
        self.anchor_r
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn roles(&self) -> &[BinRole] {
        &self.roles
    }

    pub fn convention(&self) -> LayoutConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn bins(&self) -> impl Iterator<Item = Bin> + '_ {
        self.edges
            .windows(2)
            .zip(&self.roles)
            .map(|(w, &role)| Bin {
                lo: w[0],
                hi: w[1],
                role,
            })
    }

    pub fn total_width(&self) -> f64 {
        self.edges[self.edges.len() - 1] - self.edges[0]
    }

    /// Smallest interval covering all on-ratio bins.
    pub fn on_zone(&self) -> (f64, f64) {
        let on = self.bins().filter(|b| b.role == BinRole::OnRatio);
        on.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
            (lo.min(b.lo), hi.max(b.hi))
        })
    }

    /// Index of the bin holding `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let last = self.edges.len() - 1;
        if x < self.edges[0] || x > self.edges[last] || x.is_nan() {
            return None;
        }
        if x == self.edges[last] {
            return Some(self.roles.len() - 1);
        }
        Some(self.edges.partition_point(|&e| e <= x) - 1)
    }

    pub fn label(&self) -> String {
        match (self.convention, self.anchor) {
            (LayoutConvention::OneToOne, _) => "one-to-one".into(),
            (LayoutConvention::Thirds, Some(a)) => format!("thirds:{a}"),
            _ => format!(
                "edges:{}",
                self.edges
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }
}

pub fn one_to_one_layout() -> BinLayout {
    BinLayout::one_to_one()
}

pub fn thirds_layout(anchors: &[IntegerRatio]) -> Result<Vec<BinLayout>> {
    BinLayout::thirds(anchors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ratio(s: &str) -> IntegerRatio {
        s.parse().unwrap()
    }

    #[test]
    fn one_to_one_edges() {
        let l = one_to_one_layout();
        assert_eq!(l.edges(), &[0.4, 4.0 / 9.0, 5.0 / 9.0, 0.6]);
        let (lo, hi) = l.on_zone();
        assert!(lo <= 0.5 && 0.5 <= hi);
        assert_abs_diff_eq!(l.total_width(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn thirds_match_published_on_edges() {
        let ls = thirds_layout(&[ratio("1:2"), ratio("1:1")]).unwrap();
        let one = &ls[1];
        assert_eq!(one.anchor(), Some(IntegerRatio::one_to_one()));
        assert_abs_diff_eq!(one.edges()[1], 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one.edges()[3], 5.0 / 9.0, epsilon = 1e-15);

        let ls = thirds_layout(&[ratio("1:1"), ratio("2:1")]).unwrap();
        assert_abs_diff_eq!(ls[0].edges()[1], 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ls[0].edges()[3], 5.0 / 9.0, epsilon = 1e-15);
        // outer edges differ from the published 0.4 / 0.6
        assert_abs_diff_eq!(ls[0].edges()[0], 7.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn thirds_equal_widths() {
        let ls = thirds_layout(&[ratio("1:2"), ratio("1:1"), ratio("2:1")]).unwrap();
        for l in &ls {
            let w: Vec<f64> = l.bins().map(|b| b.width()).collect();
            assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-15);
            assert_abs_diff_eq!(w[2], w[3], epsilon = 1e-15);
            assert_eq!(l.roles()[1], BinRole::OnRatio);
        }
    }

    #[test]
    fn thirds_rejects_duplicates() {
        assert!(thirds_layout(&[ratio("1:1"), ratio("2:2")]).is_err());
        assert!(thirds_layout(&[ratio("1:1")]).is_err());
    }

    #[test]
    fn explicit_edges() {
        let l = BinLayout::from_edges(vec![0.4, 4.0 / 9.0, 0.5, 5.0 / 9.0, 0.6]).unwrap();
        assert_eq!(
            l.roles(),
            &[
                BinRole::OffRatio,
                BinRole::OnRatio,
                BinRole::OnRatio,
                BinRole::OffRatio
            ]
        );
        assert!(BinLayout::from_edges(vec![0.4, 0.3, 0.5, 0.6]).is_err());
        assert!(BinLayout::from_edges(vec![0.0, 0.3, 0.5, 0.6]).is_err());
    }

    #[test]
    fn half_open_location() {
        let l = one_to_one_layout();
        assert_eq!(l.locate(4.0 / 9.0), Some(1));
        assert_eq!(l.locate(0.4), Some(0));
        assert_eq!(l.locate(0.6), Some(2));
        assert_eq!(l.locate(0.39), None);
        assert_eq!(l.locate(0.9), None);
    }

    #[test]
    fn parse_ratio() {
        assert_eq!(ratio("3:1").ratio(), 0.75);
        assert!("3".parse::<IntegerRatio>().is_err());
        assert!("0:1".parse::<IntegerRatio>().is_err());
    }
}
