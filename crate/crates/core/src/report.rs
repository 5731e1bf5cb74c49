//! JSON run reports for the command line.

use serde::Serialize;

use crate::solver::SearchStats;

/// Which counting path produced a result.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Alg2,
    Alg3,
    Brute,
    PrimalPw,
    DualPw,
}

impl Algorithm {
    /// Growth base the branch count is compared against.
    pub fn reference_base(self) -> Option<f64> {
        match self {
            Algorithm::Alg2 => Some(1.1058),
            Algorithm::Alg3 => Some(1.4423),
            _ => None,
        }
    }
}

/// `log2(nodes) / m` next to `log2` of the reference base.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BoundRatio {
    pub exponent: f64,
    pub reference: f64,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub count: String,
    pub weighted: bool,
    pub n: usize,
    pub m: usize,
    pub wall_time: f64,
    #[serde(flatten)]
    pub stats: SearchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_ratio: Option<BoundRatio>,
}

impl RunReport {
    /// Fills in the bound comparison when the run branched at least once.
    pub fn new(
        algorithm: Algorithm,
        count: String,
        weighted: bool,
        n: usize,
        m: usize,
        wall_time: f64,
        stats: SearchStats,
    ) -> RunReport {
        let bound_ratio = match algorithm.reference_base() {
            Some(base) if stats.branches > 0 && m > 0 => Some(BoundRatio {
                exponent: (stats.nodes as f64).log2() / m as f64,
                reference: base.log2(),
            }),
            _ => None,
        };
        RunReport { algorithm, count, weighted, n, m, wall_time, stats, bound_ratio }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(branches: usize, algorithm: Algorithm) -> serde_json::Value {
        let stats = SearchStats { nodes: 5, branches, ..SearchStats::default() };
        let r = RunReport::new(algorithm, "12".into(), false, 4, 8, 0.0, stats);
        serde_json::from_str(&r.to_json()).unwrap()
    }

    #[test]
    fn bound_ratio_only_after_branching() {
        let v = report(2, Algorithm::Alg3);
        assert_eq!(v["nodes"], 5);
        assert_eq!(v["weighted"], false);
        assert_eq!(v["algorithm"], "alg3");
        let ratio = &v["bound_ratio"];
        assert!((ratio["exponent"].as_f64().unwrap() - 5f64.log2() / 8.0).abs() < 1e-12);
        assert!((ratio["reference"].as_f64().unwrap() - 1.4423f64.log2()).abs() < 1e-12);

        assert!(report(0, Algorithm::Alg2).get("bound_ratio").is_none());
        assert!(report(3, Algorithm::Brute).get("bound_ratio").is_none());
    }
}
