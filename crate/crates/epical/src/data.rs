//! Ingestion and preparation of daily count series.
//!
//! Case files are `date,count` CSVs; covariate files carry one row per date
//! with the six factors (five weather variables plus the intervention level).
//! Cumulative case files are auto-detected by monotonicity and differenced.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Covariate column names for the SIR application, in file order.
pub const SIR_FACTORS: [&str; 6] = [
    "temperature",
    "humidity",
    "wind_speed",
    "pressure",
    "precipitation",
    "intervention",
];

/// Aligned daily counts with covariate rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    /// 1-based day index of each observation (consecutive after alignment).
    pub days: Vec<usize>,
    /// Calendar dates, when the series came from dated files.
    pub dates: Option<Vec<NaiveDate>>,
    /// Daily reported counts.
    pub y: Vec<u64>,
    /// One covariate row per day.
    pub x: Vec<Vec<f64>>,
    /// Total population N.
    pub population: f64,
    /// Covariate column names.
    pub factor_names: Vec<String>,
    pub city: String,
}

impl ObservationSeries {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}

/// Whether the case file holds cumulative totals or daily counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountKind {
    /// Difference the series iff it is nondecreasing.
    #[default]
    Auto,
    Cumulative,
    Daily,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_date(path: &Path, line: usize, s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| parse_err(path, line, format!("bad date '{s}': {e}")))
}

/// Load and join a case CSV (`date,count`) with a covariate CSV
/// (`date,<factor columns...>`), differencing cumulative counts.
///
/// Negative daily differences (reporting corrections) are clamped to zero;
/// the number of clamped days is returned alongside the series.
pub fn load_series(
    cases_path: &Path,
    covariates_path: &Path,
    population: f64,
    kind: CountKind,
) -> Result<(ObservationSeries, usize)> {
    if population <= 0.0 {
        return Err(Error::NegativePopulation(population));
    }
    let case_lines = read_lines(cases_path)?;
    if case_lines.len() < 2 {
        return Err(parse_err(cases_path, 1, "need a header and at least one row"));
    }
    let mut dates = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    for (idx, line) in case_lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let d = parts
            .next()
            .ok_or_else(|| parse_err(cases_path, idx + 1, "missing date"))?;
        let c = parts
            .next()
            .ok_or_else(|| parse_err(cases_path, idx + 1, "missing count"))?;
        dates.push(parse_date(cases_path, idx + 1, d)?);
        let v: f64 = c
            .trim()
            .parse()
            .map_err(|e| parse_err(cases_path, idx + 1, format!("bad count '{c}': {e}")))?;
        counts.push(v);
    }
    // case dates must be consecutive days
    for w in dates.windows(2) {
        if w[1] != w[0].succ_opt().unwrap() {
            return Err(Error::DateGap {
                path: cases_path.to_path_buf(),
                date: w[0].succ_opt().unwrap().to_string(),
            });
        }
    }

    let cumulative = match kind {
        CountKind::Cumulative => true,
        CountKind::Daily => false,
        CountKind::Auto => counts.windows(2).all(|w| w[1] >= w[0]) && counts.len() > 1,
    };
    let mut clamped = 0usize;
    let daily: Vec<u64> = if cumulative {
        let mut out = Vec::with_capacity(counts.len());
        let mut prev = 0.0;
        for &c in &counts {
            let mut d = c - prev;
            if d < 0.0 {
                d = 0.0;
                clamped += 1;
            }
            out.push(d.round() as u64);
            prev = c;
        }
        out
    } else {
        counts
            .iter()
            .map(|&c| {
                if c < 0.0 {
                    clamped += 1;
                    0
                } else {
                    c.round() as u64
                }
            })
            .collect()
    };

    // covariates: header names the factors, rows keyed by date
    let cov_lines = read_lines(covariates_path)?;
    if cov_lines.len() < 2 {
        return Err(parse_err(covariates_path, 1, "need a header and at least one row"));
    }
    let header: Vec<String> = cov_lines[0].split(',').map(|s| s.trim().to_owned()).collect();
    if header.len() < 2 || header[0] != "date" {
        return Err(parse_err(
            covariates_path,
            1,
            "header must start with 'date'",
        ));
    }
    let factor_names: Vec<String> = header[1..].to_vec();
    let d = factor_names.len();
    let mut cov_map = std::collections::HashMap::new();
    for (idx, line) in cov_lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != d + 1 {
            return Err(parse_err(
                covariates_path,
                idx + 1,
                format!("expected {} columns, got {}", d + 1, parts.len()),
            ));
        }
        let date = parse_date(covariates_path, idx + 1, parts[0])?;
        let mut row = Vec::with_capacity(d);
        for p in &parts[1..] {
            row.push(p.trim().parse::<f64>().map_err(|e| {
                parse_err(covariates_path, idx + 1, format!("bad value '{p}': {e}"))
            })?);
        }
        cov_map.insert(date, row);
    }

    let mut x = Vec::with_capacity(dates.len());
    for date in &dates {
        match cov_map.get(date) {
            Some(row) => x.push(row.clone()),
            None => {
                return Err(Error::DateGap {
                    path: covariates_path.to_path_buf(),
                    date: date.to_string(),
                })
            }
        }
    }

    // city label from the cases file stem, or from the containing directory
    // for the common `<city>/cases.csv` layout
    let city = cases_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| s != "cases")
        .or_else(|| {
            cases_path
                .parent()
                .and_then(Path::file_name)
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "city".to_owned());
    let n = daily.len();
    Ok((
        ObservationSeries {
            days: (1..=n).collect(),
            dates: Some(dates),
            y: daily,
            x,
            population,
            factor_names,
            city,
        },
        clamped,
    ))
}

/// Pair the covariates of day t with the counts confirmed k days later,
/// reflecting the lag from infection to a reported positive test.
pub fn apply_infectious_shift(series: &ObservationSeries, k_days: usize) -> Result<ObservationSeries> {
    let n = series.len();
    if k_days >= n {
        return Err(Error::ShiftTooLarge {
            shift: k_days,
            len: n,
        });
    }
    let m = n - k_days;
    Ok(ObservationSeries {
        days: (1..=m).collect(),
        dates: series
            .dates
            .as_ref()
            .map(|d| d[k_days..].to_vec()),
        y: series.y[k_days..].to_vec(),
        x: series.x[..m].to_vec(),
        population: series.population,
        factor_names: series.factor_names.clone(),
        city: series.city.clone(),
    })
}

/// Per-column min–max ranges learned from training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRanges {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingRanges {
    pub fn fit(rows: &[Vec<f64>], names: &[String]) -> Result<ScalingRanges> {
        let d = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in rows {
            for j in 0..d {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        for j in 0..d {
            if max[j] <= min[j] {
                return Err(Error::ConstantColumn {
                    index: j,
                    name: names.get(j).cloned().unwrap_or_default(),
                });
            }
        }
        Ok(ScalingRanges { min, max })
    }

    /// Scale a row with the training ranges. Out-of-range values extrapolate
    /// outside [0, 1], which the kernel tolerates.
    pub fn scale_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.min[j]) / (self.max[j] - self.min[j]))
            .collect()
    }

    pub fn unscale_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| self.min[j] + v * (self.max[j] - self.min[j]))
            .collect()
    }
}

/// Min–max scale the covariates of `series` in place, returning the ranges so
/// test or query rows can be scaled consistently.
pub fn scale_covariates(series: &mut ObservationSeries) -> Result<ScalingRanges> {
    let ranges = ScalingRanges::fit(&series.x, &series.factor_names)?;
    for row in &mut series.x {
        *row = ranges.scale_row(row);
    }
    Ok(ranges)
}

/// True parameter functions of the synthetic study.
pub fn true_beta(x: f64) -> f64 {
    (3.0 * x).sin() * (-x).exp() + 0.2
}

pub fn true_gamma(x: f64) -> f64 {
    (3.0 * x).sin()
}

/// Ground truth bundled with a synthetic dataset.
#[derive(Debug, Clone)]
pub struct SyntheticTruth {
    pub x: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Generate the synthetic study: x₁..x₄₀ ~ U(0,1),
/// y_t ~ Poisson(5 β(x_t) + γ(x_t) (t/10)²) with β(x) = sin(3x) e^{−x} + 0.2
/// and γ(x) = sin(3x); first 30 days train, last 10 test.
pub fn make_synthetic(seed: u64) -> (ObservationSeries, ObservationSeries, SyntheticTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 40usize;
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut y = Vec::with_capacity(n);
    for (i, &xi) in x.iter().enumerate() {
        let t = (i + 1) as f64;
        let lam = 5.0 * true_beta(xi) + true_gamma(xi) * (t / 10.0) * (t / 10.0);
        y.push(Poisson::new(lam.max(1e-12)).unwrap().sample(&mut rng) as u64);
    }
    let truth = SyntheticTruth {
        x: x.clone(),
        beta: x.iter().map(|&v| true_beta(v)).collect(),
        gamma: x.iter().map(|&v| true_gamma(v)).collect(),
    };
    let mk = |range: std::ops::Range<usize>| ObservationSeries {
        days: range.clone().map(|i| i + 1).collect(),
        dates: None,
        y: y[range.clone()].to_vec(),
        x: x[range].iter().map(|&v| vec![v]).collect(),
        population: 0.0,
        factor_names: vec!["x".to_owned()],
        city: "synthetic".to_owned(),
    };
    (mk(0..30), mk(30..40), truth)
}

/// 17-significant-digit decimal form that round-trips f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a series back to `date,count` / covariate CSVs (inverse of
/// [`load_series`] for daily counts).
pub fn write_series(
    series: &ObservationSeries,
    cases_path: &Path,
    covariates_path: &Path,
) -> Result<()> {
    let dates = series
        .dates
        .as_ref()
        .ok_or_else(|| Error::Config("series has no dates to write".into()))?;
    let mut cases = String::from("date,count\n");
    for (d, y) in dates.iter().zip(&series.y) {
        let _ = writeln!(cases, "{d},{y}");
    }
    fs::write(cases_path, cases).map_err(|e| Error::io(cases_path, e))?;
    let mut cov = format!("date,{}\n", series.factor_names.join(","));
    for (d, row) in dates.iter().zip(&series.x) {
        let vals: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(cov, "{d},{}", vals.join(","));
    }
    fs::write(covariates_path, cov).map_err(|e| Error::io(covariates_path, e))
}

/// Write a synthetic series as a `day,x,y` CSV.
pub fn write_synthetic(series: &ObservationSeries, path: &Path) -> Result<()> {
    let mut out = String::from("day,x,y\n");
    for ((d, row), y) in series.days.iter().zip(&series.x).zip(&series.y) {
        let _ = writeln!(out, "{d},{},{y}", fmt_f64(row[0]));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a `day,x,y` CSV written by [`write_synthetic`].
pub fn read_synthetic(path: &Path) -> Result<ObservationSeries> {
    let lines = read_lines(path)?;
    let mut days = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(parse_err(path, idx + 1, "expected 3 columns"));
        }
        days.push(
            parts[0]
                .trim()
                .parse::<usize>()
                .map_err(|e| parse_err(path, idx + 1, e.to_string()))?,
        );
        x.push(vec![parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| parse_err(path, idx + 1, e.to_string()))?]);
        y.push(
            parts[2]
                .trim()
                .parse::<u64>()
                .map_err(|e| parse_err(path, idx + 1, e.to_string()))?,
        );
    }
    if days.is_empty() {
        return Err(parse_err(path, 1, "empty series"));
    }
    Ok(ObservationSeries {
        days,
        dates: None,
        y,
        x,
        population: 0.0,
        factor_names: vec!["x".to_owned()],
        city: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "synthetic".to_owned()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn toy_series(n: usize, d: usize) -> ObservationSeries {
        ObservationSeries {
            days: (1..=n).collect(),
            dates: None,
            y: (0..n).map(|i| (i % 5) as u64).collect(),
            x: (0..n)
                .map(|i| (0..d).map(|j| (i * d + j) as f64).collect())
                .collect(),
            population: 1000.0,
            factor_names: (0..d).map(|j| format!("f{j}")).collect(),
            city: "toy".to_owned(),
        }
    }

    #[test]
    fn cumulative_differencing() {
        let dir = tempdir().unwrap();
        let cases = dir.path().join("c.csv");
        let cov = dir.path().join("x.csv");
        fs::write(&cases, "date,count\n2020-07-01,1\n2020-07-02,3\n2020-07-03,6\n").unwrap();
        fs::write(
            &cov,
            "date,temperature\n2020-07-01,70\n2020-07-02,71\n2020-07-03,72\n",
        )
        .unwrap();
        let (s, clamped) = load_series(&cases, &cov, 1000.0, CountKind::Auto).unwrap();
        assert_eq!(s.y, vec![1, 2, 3]);
        assert_eq!(clamped, 0);
        assert_eq!(s.factor_names, vec!["temperature"]);
    }

    #[test]
    fn covariate_gap_is_error() {
        let dir = tempdir().unwrap();
        let cases = dir.path().join("c.csv");
        let cov = dir.path().join("x.csv");
        fs::write(&cases, "date,count\n2020-07-01,1\n2020-07-02,2\n").unwrap();
        fs::write(&cov, "date,temperature\n2020-07-01,70\n").unwrap();
        let err = load_series(&cases, &cov, 1000.0, CountKind::Auto).unwrap_err();
        assert!(matches!(err, Error::DateGap { .. }));
    }

    #[test]
    fn negative_daily_diff_clamped() {
        let dir = tempdir().unwrap();
        let cases = dir.path().join("c.csv");
        let cov = dir.path().join("x.csv");
        fs::write(&cases, "date,count\n2020-07-01,5\n2020-07-02,3\n2020-07-03,9\n").unwrap();
        fs::write(
            &cov,
            "date,t\n2020-07-01,1\n2020-07-02,2\n2020-07-03,3\n",
        )
        .unwrap();
        // non-monotone, so auto treats it as daily already; force cumulative
        let (s, clamped) = load_series(&cases, &cov, 1000.0, CountKind::Cumulative).unwrap();
        assert_eq!(s.y, vec![5, 0, 6]);
        assert_eq!(clamped, 1);
    }

    #[test]
    fn shift_pairs_early_covariates_with_late_counts() {
        let s = toy_series(100, 2);
        let shifted = apply_infectious_shift(&s, 11).unwrap();
        assert_eq!(shifted.len(), 89);
        assert_eq!(shifted.y[0], s.y[11]);
        assert_eq!(shifted.x[0], s.x[0]);
        // totals preserved over the retained window
        let total: u64 = shifted.y.iter().sum();
        let expect: u64 = s.y[11..].iter().sum();
        assert_eq!(total, expect);

        assert_eq!(apply_infectious_shift(&s, 0).unwrap(), {
            let mut c = s.clone();
            c.days = (1..=100).collect();
            c
        });
        assert!(matches!(
            apply_infectious_shift(&s, 100),
            Err(Error::ShiftTooLarge { .. })
        ));
    }

    #[test]
    fn scaling_roundtrip_and_edges() {
        let names = vec!["a".to_owned()];
        let ranges = ScalingRanges::fit(&[vec![10.0], vec![20.0], vec![30.0]], &names).unwrap();
        assert_eq!(ranges.scale_row(&[10.0]), vec![0.0]);
        assert_eq!(ranges.scale_row(&[20.0]), vec![0.5]);
        assert_eq!(ranges.scale_row(&[30.0]), vec![1.0]);
        assert_eq!(ranges.scale_row(&[35.0]), vec![1.25]);
        let v = ranges.unscale_row(&ranges.scale_row(&[17.3]));
        assert!((v[0] - 17.3).abs() < 1e-12);

        let levels = ScalingRanges::fit(
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![5.0]],
            &names,
        )
        .unwrap();
        let scaled: Vec<f64> = (1..=5).map(|l| levels.scale_row(&[l as f64])[0]).collect();
        assert_eq!(scaled, vec![0.0, 0.25, 0.5, 0.75, 1.0]);

        assert!(matches!(
            ScalingRanges::fit(&[vec![1.0], vec![1.0]], &names),
            Err(Error::ConstantColumn { .. })
        ));
    }

    #[test]
    fn synthetic_layout_and_determinism() {
        let (train, test, truth) = make_synthetic(7);
        assert_eq!(train.len(), 30);
        assert_eq!(test.len(), 10);
        assert_eq!(train.days[0], 1);
        assert_eq!(test.days[0], 31);
        assert_eq!(truth.x.len(), 40);
        assert!(truth.beta.iter().all(|&b| b >= 0.2 - 1e-12));
        assert!(truth.gamma.iter().all(|&g| g >= 0.0));

        let (train2, test2, _) = make_synthetic(7);
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        let (train3, _, _) = make_synthetic(8);
        assert_ne!(train, train3);
    }

    #[test]
    fn synthetic_file_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("train.csv");
        let (train, _, _) = make_synthetic(3);
        write_synthetic(&train, &path).unwrap();
        let back = read_synthetic(&path).unwrap();
        assert_eq!(back.days, train.days);
        assert_eq!(back.y, train.y);
        assert_eq!(back.x, train.x);
    }

    #[test]
    fn series_file_roundtrip() {
        let dir = tempdir().unwrap();
        let mut s = toy_series(5, 2);
        s.dates = Some(
            (0..5)
                .map(|i| NaiveDate::from_ymd_opt(2020, 7, 1 + i).unwrap())
                .collect(),
        );
        s.x[2][1] = 0.1 + 0.2; // value without a short decimal form
        let cases = dir.path().join("c.csv");
        let cov = dir.path().join("x.csv");
        write_series(&s, &cases, &cov).unwrap();
        let (back, _) = load_series(&cases, &cov, s.population, CountKind::Daily).unwrap();
        assert_eq!(back.y, s.y);
        assert_eq!(back.x, s.x);
        assert_eq!(back.dates, s.dates);
    }
}
