//! Feature spaces: how a user's daily time span is split across features, and
//! which sites offer each feature.
//!
//! A *region* is a set of sites; its share is the total time fraction spent
//! on features offered by exactly that set of sites. The novelty `x2` of a new
//! site is the share spent on features the new site offers and the old one
//! does not.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};

use thiserror::Error;

use crate::Scalar;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FeatureSpaceError {
    #[error("feature {feature:?} has a negative share")]
    NegativeShare { feature: String },
    #[error("feature shares sum to {total}, more than 1")]
    SharesExceedOne { total: f64 },
    #[error("feature {feature:?} is not offered by any site")]
    EmptyAvailability { feature: String },
    #[error("feature {feature:?} listed more than once")]
    DuplicateFeature { feature: String },
    #[error("site {sns:?} listed more than once")]
    DuplicateSns { sns: String },
    #[error("unknown site {sns:?}")]
    UnknownSns { sns: String },
    #[error("region must name at least one site")]
    EmptyRegion,
    #[error("new and old site are both {sns:?}")]
    SameSns { sns: String },
    #[error("row {row}: feature {feature:?} has no availability entry")]
    UnknownFeature { row: usize, feature: String },
    #[error("row {row}: rating {rating} outside 0..=5")]
    RatingOutOfRange { row: usize, rating: i64 },
    #[error("row {row}: respondent {respondent:?} rated feature {feature:?} twice")]
    DuplicateRating {
        row: usize,
        respondent: String,
        feature: String,
    },
    #[error("every rating is zero; no time share can be derived")]
    AllZeroRatings,
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
}

type Result<T> = std::result::Result<T, FeatureSpaceError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Feature<S> {
    pub id: String,
    pub availability: BTreeSet<String>,
    /// Fraction of the daily time span spent on this feature.
    pub share: S,
}

impl<S> Feature<S> {
    pub fn new<I, T>(id: impl Into<String>, availability: I, share: S) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Feature {
            id: id.into(),
            availability: availability.into_iter().map(Into::into).collect(),
            share,
        }
    }
}

/// Validated catalogue of features with their time shares.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace<S> {
    sns_ids: Vec<String>,
    features: Vec<Feature<S>>,
}

/// Converts a percentage to a fraction.
pub fn percent<S: Scalar>(value: S) -> S {
    value / S::from_count(100)
}

impl<S: Scalar> FeatureSpace<S> {
    pub fn new(sns_ids: Vec<String>, features: Vec<Feature<S>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for sns in &sns_ids {
            if !seen.insert(sns.as_str()) {
                return Err(FeatureSpaceError::DuplicateSns { sns: sns.clone() });
            }
        }
        let mut feature_ids = HashSet::new();
        let mut total = S::zero();
        for f in &features {
            if !feature_ids.insert(f.id.as_str()) {
                return Err(FeatureSpaceError::DuplicateFeature {
                    feature: f.id.clone(),
                });
            }
            if f.availability.is_empty() {
                return Err(FeatureSpaceError::EmptyAvailability {
                    feature: f.id.clone(),
                });
            }
            if let Some(sns) = f.availability.iter().find(|s| !seen.contains(s.as_str())) {
                return Err(FeatureSpaceError::UnknownSns { sns: sns.clone() });
            }
            if f.share < S::zero() {
                return Err(FeatureSpaceError::NegativeShare {
                    feature: f.id.clone(),
                });
            }
            total = total + f.share;
        }
        if total > S::one() + S::share_tolerance() {
            return Err(FeatureSpaceError::SharesExceedOne {
                total: total.to_f64_lossy(),
            });
        }
        Ok(FeatureSpace { sns_ids, features })
    }

    /// Builds a space whose site list is every site named by some feature,
    /// in order of first mention.
    pub fn from_features(features: Vec<Feature<S>>) -> Result<Self> {
        let mut sns_ids: Vec<String> = Vec::new();
        for f in &features {
            for s in &f.availability {
                if !sns_ids.contains(s) {
                    sns_ids.push(s.clone());
                }
            }
        }
        Self::new(sns_ids, features)
    }

    pub fn sns_ids(&self) -> &[String] {
        &self.sns_ids
    }

    pub fn features(&self) -> &[Feature<S>] {
        &self.features
    }

    pub fn total_share(&self) -> S {
        self.features.iter().fold(S::zero(), |acc, f| acc + f.share)
    }

    fn check_sns(&self, sns: &str) -> Result<()> {
        if self.sns_ids.iter().any(|s| s == sns) {
            Ok(())
        } else {
            Err(FeatureSpaceError::UnknownSns { sns: sns.into() })
        }
    }

    /// Share of features offered by exactly the sites in `region`.
    pub fn region_share<T: AsRef<str>>(&self, region: &[T]) -> Result<S> {
        if region.is_empty() {
            return Err(FeatureSpaceError::EmptyRegion);
        }
        let mut set = BTreeSet::new();
        for sns in region {
            self.check_sns(sns.as_ref())?;
            set.insert(sns.as_ref().to_owned());
        }
        Ok(self
            .features
            .iter()
            .filter(|f| f.availability == set)
            .fold(S::zero(), |acc, f| acc + f.share))
    }

    /// Every non-empty region that carries at least one feature, with its
    /// share, in order of first appearance.
    pub fn regions(&self) -> Vec<(BTreeSet<String>, S)> {
        let mut out: Vec<(BTreeSet<String>, S)> = Vec::new();
        for f in &self.features {
            match out.iter_mut().find(|(region, _)| *region == f.availability) {
                Some((_, share)) => *share = *share + f.share,
                None => out.push((f.availability.clone(), f.share)),
            }
        }
        out
    }

    /// Time share on features offered by `new_sns` but not by `old_sns`.
    ///
    /// With only two sites this is the share of the region `{new_sns}`.
    pub fn novelty(&self, new_sns: &str, old_sns: &str) -> Result<S> {
        self.check_sns(new_sns)?;
        self.check_sns(old_sns)?;
        if new_sns == old_sns {
            return Err(FeatureSpaceError::SameSns {
                sns: new_sns.into(),
            });
        }
        Ok(self
            .features
            .iter()
            .filter(|f| f.availability.contains(new_sns) && !f.availability.contains(old_sns))
            .fold(S::zero(), |acc, f| acc + f.share))
    }

    /// Writes `feature,sns_list,share` rows; shares are fractions.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(["feature", "sns_list", "share"])?;
        for f in &self.features {
            let sns_list = f.availability.iter().cloned().collect::<Vec<_>>().join(";");
            writer.write_record([
                f.id.as_str(),
                sns_list.as_str(),
                &f.share.to_f64_lossy().to_string(),
            ])?;
        }
        writer.flush()
    }

    /// Reads the format produced by [`FeatureSpace::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        check_header(&mut reader, &["feature", "sns_list", "share"])?;
        let mut features = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let row = row_of(&record);
            let share: f64 = record[2].parse().map_err(|_| FeatureSpaceError::Csv {
                row,
                message: format!("invalid share {:?}", &record[2]),
            })?;
            let share = S::from_f64(share).ok_or_else(|| FeatureSpaceError::Csv {
                row,
                message: format!("share {share} not representable"),
            })?;
            features.push(Feature::new(&record[0], split_sns_list(&record[1]), share));
        }
        Self::from_features(features)
    }
}

fn split_sns_list(list: &str) -> Vec<String> {
    list.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn row_of(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn csv_error(err: csv::Error) -> FeatureSpaceError {
    let row = err.position().map_or(0, |p| p.line() as usize);
    FeatureSpaceError::Csv {
        row,
        message: err.to_string(),
    }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = reader.headers().map_err(csv_error)?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(FeatureSpaceError::Csv {
            row: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingRow {
    pub respondent: String,
    pub feature: String,
    pub rating: u8,
    /// Source line, for error reporting; 0 when built in code.
    pub row: usize,
}

/// Survey answers: each respondent rates each feature from 0 (never used)
/// to 5 (most of their time).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyRatings {
    rows: Vec<RatingRow>,
    availability: Vec<(String, BTreeSet<String>)>,
}

impl SurveyRatings {
    pub fn new(
        rows: Vec<RatingRow>,
        availability: Vec<(String, BTreeSet<String>)>,
    ) -> Result<Self> {
        let mut features = HashSet::new();
        for (feature, sites) in &availability {
            if !features.insert(feature.as_str()) {
                return Err(FeatureSpaceError::DuplicateFeature {
                    feature: feature.clone(),
                });
            }
            if sites.is_empty() {
                return Err(FeatureSpaceError::EmptyAvailability {
                    feature: feature.clone(),
                });
            }
        }
        let mut rated = HashSet::new();
        for r in &rows {
            if r.rating > 5 {
                return Err(FeatureSpaceError::RatingOutOfRange {
                    row: r.row,
                    rating: r.rating.into(),
                });
            }
            if !features.contains(r.feature.as_str()) {
                return Err(FeatureSpaceError::UnknownFeature {
                    row: r.row,
                    feature: r.feature.clone(),
                });
            }
            if !rated.insert((r.respondent.as_str(), r.feature.as_str())) {
                return Err(FeatureSpaceError::DuplicateRating {
                    row: r.row,
                    respondent: r.respondent.clone(),
                    feature: r.feature.clone(),
                });
            }
        }
        Ok(SurveyRatings { rows, availability })
    }

    /// Reads `respondent,feature,rating` and `feature,sns_list` tables.
    pub fn read_csv<R1: Read, R2: Read>(ratings: R1, availability: R2) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(availability);
        check_header(&mut reader, &["feature", "sns_list"])?;
        let mut avail = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            avail.push((
                record[0].to_owned(),
                split_sns_list(&record[1]).into_iter().collect(),
            ));
        }

        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(ratings);
        check_header(&mut reader, &["respondent", "feature", "rating"])?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let row = row_of(&record);
            let rating: i64 = record[2].parse().map_err(|_| FeatureSpaceError::Csv {
                row,
                message: format!("invalid rating {:?}", &record[2]),
            })?;
            let rating = u8::try_from(rating)
                .ok()
                .filter(|r| *r <= 5)
                .ok_or(FeatureSpaceError::RatingOutOfRange { row, rating })?;
            rows.push(RatingRow {
                respondent: record[0].to_owned(),
                feature: record[1].to_owned(),
                rating,
                row,
            });
        }
        Self::new(rows, avail)
    }

    pub fn rows(&self) -> &[RatingRow] {
        &self.rows
    }

    /// Aggregates the ratings into time shares for a user of every site.
    ///
    /// Each feature's share is its mean rating over the respondents who rated
    /// it, divided by the sum of all such means. Features nobody rated get a
    /// share of zero.
    pub fn to_feature_space<S: Scalar>(&self) -> Result<FeatureSpace<S>> {
        let mut sums: HashMap<&str, (u64, usize)> = HashMap::new();
        for r in &self.rows {
            let entry = sums.entry(r.feature.as_str()).or_default();
            entry.0 += u64::from(r.rating);
            entry.1 += 1;
        }
        let means: Vec<S> = self
            .availability
            .iter()
            .map(|(feature, _)| match sums.get(feature.as_str()) {
                Some(&(sum, count)) => S::from_u64(sum).expect("rating sum") / S::from_count(count),
                None => S::zero(),
            })
            .collect();
        let total = means.iter().fold(S::zero(), |acc, &m| acc + m);
        if total <= S::zero() {
            return Err(FeatureSpaceError::AllZeroRatings);
        }
        let features = self
            .availability
            .iter()
            .zip(means)
            .map(|((feature, sites), mean)| Feature {
                id: feature.clone(),
                availability: sites.clone(),
                share: mean / total,
            })
            .collect();
        FeatureSpace::from_features(features)
    }
}
