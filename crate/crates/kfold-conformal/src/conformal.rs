//! Split conformal and k-fold conformal prediction intervals.
//!
//! Both constructions wrap an arbitrary regression trainer. Split
//! conformal fits once on half the data and calibrates the interval
//! half-width from held-out residual quantiles; the k-fold construction
//! computes an out-of-fold residual for every training observation via
//! k-fold cross validation, takes a single quantile over all n residuals,
//! and centers test intervals on a regressor refit to the full training
//! set. Interval width is constant across test points by construction;
//! the guarantee is marginal coverage at the nominal level.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::DenseMatrix;
use crate::rng::RngStream;

/// A regression training set: an n x p predictor matrix paired with n
/// responses.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DenseMatrix,
    y: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("dataset needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("predictor matrix has {x_rows} rows but response has {y_len}")]
    RowMismatch { x_rows: usize, y_len: usize },
    #[error("response value at row {0} is not finite")]
    NonFiniteResponse(usize),
}

impl Dataset {
    pub fn new(x: DenseMatrix, y: Vec<f64>) -> Result<Self, DatasetError> {
        if x.rows() != y.len() {
            return Err(DatasetError::RowMismatch {
                x_rows: x.rows(),
                y_len: y.len(),
            });
        }
        if y.len() < 2 {
            return Err(DatasetError::TooFewRows(y.len()));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFiniteResponse(i));
        }
        Ok(Dataset { x, y })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Predictor row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        self.x.row(i)
    }

    /// Copy of the rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let p = self.p();
        let mut data = Vec::with_capacity(indices.len() * p);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Dataset {
            x: DenseMatrix::from_vec(indices.len(), p, data)
                .expect("subset of a valid dataset is valid"),
            y,
        }
    }
}

/// A fitted regression function.
pub trait Regressor: Send + Sync {
    fn predict(&self, x: &[f64]) -> Result<f64, RegressorError>;
}

#[derive(Debug, Error, PartialEq)]
pub enum RegressorError {
    #[error("predictor has {got} entries, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A procedure that fits a [`Regressor`] to a training set using draws
/// from the supplied stream.
pub trait Trainer: Sync {
    fn fit(
        &self,
        data: &Dataset,
        stream: &mut RngStream,
    ) -> Result<Box<dyn Regressor>, TrainerError>;
}

#[derive(Debug, Error)]
pub enum TrainerError {
    #[error("training diverged: loss became non-finite at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum ConformalError {
    #[error("residual set is empty")]
    EmptyResiduals,
    #[error("quantile level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("trainer failed: {0}")]
    Trainer(#[from] TrainerError),
    #[error(transparent)]
    Regressor(#[from] RegressorError),
}

/// Finite-sample conformal quantile of absolute residuals.
///
/// Returns the r-th smallest of |D_1|, ..., |D_m| where
/// r = ceil(level * (m + 1)), clipped to m. When the rank exceeds m the
/// clip is logged: finite-sample coverage may then fall short of `level`.
pub fn conformal_quantile(residuals: &[f64], level: f64) -> Result<f64, ConformalError> {
    if residuals.is_empty() {
        return Err(ConformalError::EmptyResiduals);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(ConformalError::InvalidLevel(level));
    }
    let m = residuals.len();
    let raw_rank = (level * (m as f64 + 1.0)).ceil() as usize;
    if raw_rank > m {
        log::warn!(
            "conformal rank {raw_rank} exceeds residual count {m}; clipping — \
             finite-sample coverage may fall short of {level}"
        );
    }
    let rank = raw_rank.clamp(1, m);
    let mut abs: Vec<f64> = residuals.iter().map(|d| d.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    Ok(abs[rank - 1])
}

/// Signed empirical quantile with the same finite-sample rank rule,
/// used by the signed-pair interval variant.
fn signed_quantile(residuals: &[f64], level: f64) -> f64 {
    let m = residuals.len();
    let rank = ((level * (m as f64 + 1.0)).ceil() as usize).clamp(1, m);
    let mut sorted = residuals.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    sorted[rank - 1]
}

/// How interval offsets are read off the residual distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileRule {
    /// Symmetric half-width from the (1 - alpha) quantile of |residuals|.
    #[default]
    Absolute,
    /// Signed pair: offsets at the alpha/2 and 1 - alpha/2 quantiles of
    /// the signed residuals. Comparison variant; with a heavily one-sided
    /// residual distribution the point prediction can fall outside the
    /// interval.
    SignedPair,
}

/// Which model centers k-fold test intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KfoldCenter {
    /// A regressor refit on all n training observations (default).
    #[default]
    Refit,
    /// The average of the k fold models' predictions.
    Average,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConformalOptions {
    pub quantile_rule: QuantileRule,
    pub kfold_center: KfoldCenter,
}

/// Which construction produced a [`ConformalModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConformalKind {
    Split,
    Kfold(usize),
}

/// Out-of-sample residuals and the fold each one came from, ordered by
/// original training index.
#[derive(Debug, Clone)]
pub struct ResidualSet {
    residuals: Vec<f64>,
    source_fold: Vec<usize>,
}

impl ResidualSet {
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn source_fold(&self) -> &[usize] {
        &self.source_fold
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// A prediction interval [lower, upper] around a point prediction at
/// nominal coverage 1 - alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionInterval {
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
}

impl PredictionInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.lower && y <= self.upper
    }
}

enum CenterModel {
    Single(Arc<dyn Regressor>),
    FoldAverage,
}

/// A fitted conformal interval constructor: fold models, the calibrated
/// half-width, and the regressor used for test-point centers.
pub struct ConformalModel {
    kind: ConformalKind,
    models: Vec<Arc<dyn Regressor>>,
    center: CenterModel,
    residuals: ResidualSet,
    half_width: f64,
    lower_offset: f64,
    upper_offset: f64,
    alpha: f64,
}

impl ConformalModel {
    pub fn kind(&self) -> ConformalKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The (1 - alpha) conformal quantile of the absolute residuals.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn residual_set(&self) -> &ResidualSet {
        &self.residuals
    }

    pub fn fold_model_count(&self) -> usize {
        self.models.len()
    }

    /// Point prediction used as the interval center at `x`.
    pub fn predict_center(&self, x: &[f64]) -> Result<f64, RegressorError> {
        match &self.center {
            CenterModel::Single(model) => model.predict(x),
            CenterModel::FoldAverage => {
                let mut sum = 0.0;
                for model in &self.models {
                    sum += model.predict(x)?;
                }
                Ok(sum / self.models.len() as f64)
            }
        }
    }

    /// Interval for a test point; width is identical for every `x`.
    pub fn predict_interval(&self, x: &[f64]) -> Result<PredictionInterval, RegressorError> {
        let center = self.predict_center(x)?;
        Ok(PredictionInterval {
            center,
            lower: center + self.lower_offset,
            upper: center + self.upper_offset,
            alpha: self.alpha,
        })
    }
}

/// Free-function form of [`ConformalModel::predict_interval`].
pub fn predict_interval(
    model: &ConformalModel,
    x: &[f64],
) -> Result<PredictionInterval, RegressorError> {
    model.predict_interval(x)
}

fn interval_offsets(
    residuals: &[f64],
    alpha: f64,
    rule: QuantileRule,
) -> Result<(f64, f64, f64), ConformalError> {
    let half_width = conformal_quantile(residuals, 1.0 - alpha)?;
    let (lo, hi) = match rule {
        QuantileRule::Absolute => (-half_width, half_width),
        QuantileRule::SignedPair => (
            signed_quantile(residuals, alpha / 2.0),
            signed_quantile(residuals, 1.0 - alpha / 2.0),
        ),
    };
    Ok((half_width, lo, hi))
}

/// A shuffled partition of {0, ..., n-1} into k folds whose sizes differ
/// by at most one; the remainder goes one-per-fold from the first fold on.
pub fn kfold_partition(n: usize, k: usize, stream: &mut RngStream) -> Vec<Vec<usize>> {
    assert!(k >= 1 && k <= n, "fold count must lie in [1, n]");
    let mut order: Vec<usize> = (0..n).collect();
    stream.shuffle(&mut order);
    let base = n / k;
    let remainder = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for j in 0..k {
        let size = base + usize::from(j < remainder);
        let mut fold: Vec<usize> = order[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    folds
}

/// Split conformal with default options: absolute-residual half-width,
/// centers from the model trained on the fitting half.
pub fn split_conformal(
    data: &Dataset,
    trainer: &dyn Trainer,
    alpha: f64,
    stream: &mut RngStream,
) -> Result<ConformalModel, ConformalError> {
    split_conformal_with(data, trainer, alpha, ConformalOptions::default(), stream)
}

/// Split conformal: fit on a random half L1, calibrate the width from
/// residuals on the held-out half L2. With odd n, L1 gets the extra row.
pub fn split_conformal_with(
    data: &Dataset,
    trainer: &dyn Trainer,
    alpha: f64,
    options: ConformalOptions,
    stream: &mut RngStream,
) -> Result<ConformalModel, ConformalError> {
    let n = data.n();
    if n < 4 {
        return Err(ConformalError::InsufficientData { needed: 4, got: n });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConformalError::InvalidAlpha(alpha));
    }

    let mut order: Vec<usize> = (0..n).collect();
    stream.child(0).shuffle(&mut order);
    let n_fit = n.div_ceil(2);
    let mut fit_idx: Vec<usize> = order[..n_fit].to_vec();
    let mut cal_idx: Vec<usize> = order[n_fit..].to_vec();
    fit_idx.sort_unstable();
    cal_idx.sort_unstable();

    let model: Arc<dyn Regressor> = trainer
        .fit(&data.subset(&fit_idx), &mut stream.child(1))?
        .into();

    let mut residuals = Vec::with_capacity(cal_idx.len());
    for &i in &cal_idx {
        residuals.push(data.y()[i] - model.predict(data.row(i))?);
    }
    let (half_width, lower_offset, upper_offset) =
        interval_offsets(&residuals, alpha, options.quantile_rule)?;

    Ok(ConformalModel {
        kind: ConformalKind::Split,
        models: vec![model.clone()],
        center: CenterModel::Single(model),
        residuals: ResidualSet {
            residuals,
            source_fold: vec![0; cal_idx.len()],
        },
        half_width,
        lower_offset,
        upper_offset,
        alpha,
    })
}

/// K-fold conformal with default options: absolute-residual half-width,
/// centers from a regressor refit on all n observations.
pub fn kfold_conformal(
    data: &Dataset,
    trainer: &dyn Trainer,
    k: usize,
    alpha: f64,
    stream: &mut RngStream,
) -> Result<ConformalModel, ConformalError> {
    kfold_conformal_with(data, trainer, k, alpha, ConformalOptions::default(), stream)
}

/// K-fold conformal: every training observation contributes one
/// out-of-fold residual; a single width quantile is taken over all n.
pub fn kfold_conformal_with(
    data: &Dataset,
    trainer: &dyn Trainer,
    k: usize,
    alpha: f64,
    options: ConformalOptions,
    stream: &mut RngStream,
) -> Result<ConformalModel, ConformalError> {
    let n = data.n();
    if k < 2 || n < 2 * k {
        return Err(ConformalError::InsufficientData {
            needed: 2 * k.max(2),
            got: n,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConformalError::InvalidAlpha(alpha));
    }

    let folds = kfold_partition(n, k, &mut stream.child(0));
    let fit_streams = stream.child(1);

    let mut models: Vec<Arc<dyn Regressor>> = Vec::with_capacity(k);
    let mut indexed: Vec<(usize, usize, f64)> = Vec::with_capacity(n);
    for (j, fold) in folds.iter().enumerate() {
        let held_out: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
        let train_idx: Vec<usize> = (0..n).filter(|i| !held_out.contains(i)).collect();
        let model: Arc<dyn Regressor> = trainer
            .fit(&data.subset(&train_idx), &mut fit_streams.child(j as u64))?
            .into();
        for &i in fold {
            indexed.push((i, j, data.y()[i] - model.predict(data.row(i))?));
        }
        models.push(model);
    }
    // Deterministic assembly ordered by training index, independent of
    // fold completion order.
    indexed.sort_unstable_by_key(|&(i, _, _)| i);
    debug_assert!(indexed.iter().enumerate().all(|(pos, &(i, _, _))| pos == i));
    let residuals: Vec<f64> = indexed.iter().map(|&(_, _, d)| d).collect();
    let source_fold: Vec<usize> = indexed.iter().map(|&(_, j, _)| j).collect();

    let (half_width, lower_offset, upper_offset) =
        interval_offsets(&residuals, alpha, options.quantile_rule)?;

    let center = match options.kfold_center {
        KfoldCenter::Refit => {
            let refit: Arc<dyn Regressor> = trainer.fit(data, &mut stream.child(2))?.into();
            CenterModel::Single(refit)
        }
        KfoldCenter::Average => CenterModel::FoldAverage,
    };

    Ok(ConformalModel {
        kind: ConformalKind::Kfold(k),
        models,
        center,
        residuals: ResidualSet {
            residuals,
            source_fold,
        },
        half_width,
        lower_offset,
        upper_offset,
        alpha,
    })
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Trainer that ignores the data and always predicts a constant.
    pub struct ConstantTrainer(pub f64);

    struct ConstantModel(f64);

    impl Regressor for ConstantModel {
        fn predict(&self, _x: &[f64]) -> Result<f64, RegressorError> {
            Ok(self.0)
        }
    }

    impl Trainer for ConstantTrainer {
        fn fit(
            &self,
            _data: &Dataset,
            _stream: &mut RngStream,
        ) -> Result<Box<dyn Regressor>, TrainerError> {
            Ok(Box::new(ConstantModel(self.0)))
        }
    }

    pub fn toy_dataset(y: Vec<f64>) -> Dataset {
        let n = y.len();
        let x = DenseMatrix::from_vec(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        Dataset::new(x, y).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    #[test]
    fn quantile_matches_hand_worked_example() {
        let residuals = [-1.0, 2.0, -3.0, 4.0, 5.0, -6.0, 7.0, 8.0, -9.0];
        assert_eq!(conformal_quantile(&residuals, 0.9).unwrap(), 9.0);
    }

    #[test]
    fn quantile_of_single_residual_is_its_magnitude() {
        for level in [0.05, 0.5, 0.95] {
            assert_eq!(conformal_quantile(&[-3.5], level).unwrap(), 3.5);
        }
    }

    #[test]
    fn quantile_of_zero_residuals_is_zero() {
        assert_eq!(conformal_quantile(&[0.0; 8], 0.9).unwrap(), 0.0);
    }

    #[test]
    fn quantile_rejects_empty_and_bad_level() {
        assert!(matches!(
            conformal_quantile(&[], 0.9),
            Err(ConformalError::EmptyResiduals)
        ));
        assert!(matches!(
            conformal_quantile(&[1.0], 0.0),
            Err(ConformalError::InvalidLevel(_))
        ));
        assert!(matches!(
            conformal_quantile(&[1.0], 1.0),
            Err(ConformalError::InvalidLevel(_))
        ));
    }

    #[test]
    fn quantile_clips_rank_to_largest_residual() {
        // m = 3, level 0.9: rank ceil(0.9 * 4) = 4 > m, clipped to 3.
        let residuals = [1.0, -2.0, 0.5];
        assert_eq!(conformal_quantile(&residuals, 0.9).unwrap(), 2.0);
    }

    #[test]
    fn split_constant_predictor_gives_unit_half_width() {
        let y: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let data = toy_dataset(y);
        let mut stream = derive_stream(1, &[0]);
        let model = split_conformal(&data, &ConstantTrainer(0.0), 0.1, &mut stream).unwrap();
        assert_eq!(model.half_width(), 1.0);
        let interval = model.predict_interval(&[0.0]).unwrap();
        assert_eq!((interval.lower, interval.upper), (-1.0, 1.0));
    }

    #[test]
    fn split_top_rank_level_returns_max_residual() {
        // Ten calibration residuals |y| = 1..=10; alpha = 1/(m+1) makes the
        // rank land exactly on the maximum.
        let y: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let data = toy_dataset(y);
        let mut stream = derive_stream(2, &[0]);
        let alpha = 1.0 / 11.0;
        let model = split_conformal(&data, &ConstantTrainer(0.0), alpha, &mut stream).unwrap();
        let max_cal = model
            .residual_set()
            .residuals()
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        assert_eq!(model.half_width(), max_cal);
    }

    #[test]
    fn split_is_deterministic_in_the_stream() {
        let y: Vec<f64> = (0..30).map(|i| (i as f64).sin() * 3.0).collect();
        let data = toy_dataset(y);
        let a = split_conformal(
            &data,
            &ConstantTrainer(0.25),
            0.1,
            &mut derive_stream(9, &[7]),
        )
        .unwrap();
        let b = split_conformal(
            &data,
            &ConstantTrainer(0.25),
            0.1,
            &mut derive_stream(9, &[7]),
        )
        .unwrap();
        assert_eq!(a.residual_set().residuals(), b.residual_set().residuals());
        assert_eq!(a.half_width(), b.half_width());
    }

    #[test]
    fn split_odd_n_puts_extra_row_in_fit_half() {
        let y: Vec<f64> = (0..21).map(|i| i as f64).collect();
        let data = toy_dataset(y);
        let mut stream = derive_stream(3, &[0]);
        let model = split_conformal(&data, &ConstantTrainer(0.0), 0.1, &mut stream).unwrap();
        // Calibration half holds floor(21 / 2) = 10 residuals.
        assert_eq!(model.residual_set().len(), 10);
    }

    #[test]
    fn split_requires_four_rows() {
        let data = toy_dataset(vec![1.0, 2.0, 3.0]);
        let mut stream = derive_stream(4, &[0]);
        assert!(matches!(
            split_conformal(&data, &ConstantTrainer(0.0), 0.1, &mut stream),
            Err(ConformalError::InsufficientData { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn kfold_constant_magnitude_residuals_fix_half_width() {
        let c = 2.5;
        let y: Vec<f64> = (0..24).map(|i| if i % 2 == 0 { c } else { -c }).collect();
        let data = toy_dataset(y);
        for k in [2, 5, 10] {
            let mut stream = derive_stream(5, &[k as u64]);
            let model =
                kfold_conformal(&data, &ConstantTrainer(0.0), k, 0.1, &mut stream).unwrap();
            assert_eq!(model.half_width(), c, "k = {k}");
        }
    }

    #[test]
    fn kfold_partition_covers_every_index_once() {
        let mut stream = derive_stream(6, &[0]);
        let folds = kfold_partition(100, 5, &mut stream);
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 20));
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn kfold_partition_balances_remainder() {
        let mut stream = derive_stream(6, &[1]);
        let folds = kfold_partition(23, 5, &mut stream);
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert_eq!(sizes, vec![5, 5, 4, 4, 4]);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn kfold_residual_count_equals_n() {
        let y: Vec<f64> = (0..100).map(|i| (i as f64) * 0.1).collect();
        let data = toy_dataset(y);
        let mut stream = derive_stream(7, &[0]);
        let model = kfold_conformal(&data, &ConstantTrainer(0.0), 5, 0.1, &mut stream).unwrap();
        assert_eq!(model.residual_set().len(), 100);
        assert_eq!(model.fold_model_count(), 5);
        // Every fold label in range, each fold non-empty.
        let mut counts = [0usize; 5];
        for &j in model.residual_set().source_fold() {
            counts[j] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), 100);
        assert!(counts.iter().all(|&c| c == 20));
    }

    #[test]
    fn kfold_rejects_too_small_n() {
        let data = toy_dataset((0..9).map(|i| i as f64).collect());
        let mut stream = derive_stream(8, &[0]);
        assert!(matches!(
            kfold_conformal(&data, &ConstantTrainer(0.0), 5, 0.1, &mut stream),
            Err(ConformalError::InsufficientData { .. })
        ));
    }

    #[test]
    fn split_and_kfold_agree_exactly_on_constant_response() {
        let y = vec![3.0; 40];
        let data = toy_dataset(y);
        let split = split_conformal(
            &data,
            &ConstantTrainer(1.0),
            0.1,
            &mut derive_stream(10, &[0]),
        )
        .unwrap();
        let kfold = kfold_conformal(
            &data,
            &ConstantTrainer(1.0),
            5,
            0.1,
            &mut derive_stream(10, &[1]),
        )
        .unwrap();
        // |residual| = 2 everywhere in both constructions.
        assert_eq!(split.half_width(), 2.0);
        assert_eq!(kfold.half_width(), 2.0);
    }

    #[test]
    fn interval_arithmetic_is_center_plus_minus_half_width() {
        let y = vec![2.0; 20];
        let data = toy_dataset(y);
        let mut stream = derive_stream(11, &[0]);
        // Constant prediction 2.0 on constant y = 2.0: zero residuals.
        let model = split_conformal(&data, &ConstantTrainer(2.0), 0.1, &mut stream).unwrap();
        let interval = model.predict_interval(&[0.0]).unwrap();
        assert_eq!(interval.center, 2.0);
        assert_eq!(interval.lower, 2.0);
        assert_eq!(interval.upper, 2.0);
        assert_eq!(interval.width(), 0.0);
    }

    #[test]
    fn interval_width_is_constant_across_test_points() {
        let y: Vec<f64> = (0..30).map(|i| (i as f64).cos()).collect();
        let data = toy_dataset(y);
        let mut stream = derive_stream(12, &[0]);
        let model = kfold_conformal(&data, &ConstantTrainer(0.1), 3, 0.2, &mut stream).unwrap();
        let a = model.predict_interval(&[1.0]).unwrap();
        let b = model.predict_interval(&[100.0]).unwrap();
        assert_eq!(a.width(), b.width());
        assert!(a.lower <= a.center && a.center <= a.upper);
    }

    #[test]
    fn signed_pair_variant_orders_offsets() {
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin() * 2.0).collect();
        let data = toy_dataset(y);
        let options = ConformalOptions {
            quantile_rule: QuantileRule::SignedPair,
            ..Default::default()
        };
        let mut stream = derive_stream(13, &[0]);
        let model =
            split_conformal_with(&data, &ConstantTrainer(0.0), 0.2, options, &mut stream)
                .unwrap();
        let interval = model.predict_interval(&[0.0]).unwrap();
        assert!(interval.lower <= interval.upper);
        // Half-width field still reports the absolute-residual quantile.
        assert!(model.half_width() > 0.0);
    }

    #[test]
    fn kfold_average_center_matches_fold_mean() {
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let data = toy_dataset(y);
        let options = ConformalOptions {
            kfold_center: KfoldCenter::Average,
            ..Default::default()
        };
        let mut stream = derive_stream(14, &[0]);
        let model =
            kfold_conformal_with(&data, &ConstantTrainer(4.0), 4, 0.1, options, &mut stream)
                .unwrap();
        // All fold models predict 4.0, so the average does too.
        assert_eq!(model.predict_center(&[0.0]).unwrap(), 4.0);
    }

    proptest! {
        // Quantile equals a brute-force sort-and-index oracle built with
        // partial selection rather than a full sort.
        #[test]
        fn quantile_matches_selection_oracle(
            residuals in proptest::collection::vec(-100.0f64..100.0, 1..60),
            level in 0.01f64..0.99,
        ) {
            let got = conformal_quantile(&residuals, level).unwrap();
            let m = residuals.len();
            let rank = ((level * (m as f64 + 1.0)).ceil() as usize).clamp(1, m);
            let mut abs: Vec<f64> = residuals.iter().map(|d| d.abs()).collect();
            for i in 0..rank {
                let mut min_at = i;
                for j in (i + 1)..m {
                    if abs[j] < abs[min_at] {
                        min_at = j;
                    }
                }
                abs.swap(i, min_at);
            }
            prop_assert_eq!(got, abs[rank - 1]);
        }

        // Half-width is non-increasing in alpha for a fixed residual set.
        #[test]
        fn half_width_monotone_in_alpha(
            residuals in proptest::collection::vec(-50.0f64..50.0, 1..40),
            a in 0.02f64..0.5,
            b in 0.5f64..0.98,
        ) {
            let wide = conformal_quantile(&residuals, 1.0 - a).unwrap();
            let narrow = conformal_quantile(&residuals, 1.0 - b).unwrap();
            prop_assert!(narrow <= wide);
        }
    }
}
