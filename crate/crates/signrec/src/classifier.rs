//! Nearest-template classification: per-eigenvector Euclidean distances
//! weighted by eigenvalue differences, summed, argmin over the database.

use crate::error::{Error, Result};
use crate::features::{FeatureVector, TOP_K};

/// One enrolled feature set with its symbol label and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub label: String,
    pub features: FeatureVector,
    pub source_id: String,
}

impl Template {
    pub fn new(label: impl Into<String>, features: FeatureVector, source_id: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::InvalidLabel {
                label,
                reason: "label must be non-empty".into(),
            });
        }
        Ok(Self {
            label,
            features,
            source_id: source_id.into(),
        })
    }
}

/// Enrolled templates in enrollment order. Duplicate labels are expected;
/// recognition is nearest-template, not nearest-class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemplateDb {
    templates: Vec<Template>,
}

impl TemplateDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, template: Template) {
        self.templates.push(template);
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

impl FromIterator<Template> for TemplateDb {
    fn from_iter<I: IntoIterator<Item = Template>>(iter: I) -> Self {
        Self {
            templates: iter.into_iter().collect(),
        }
    }
}

/// Score of one template against the test features.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateScore {
    pub source_id: String,
    pub label: String,
    pub score: f64,
    pub terms: [f64; TOP_K],
}

/// Outcome of scoring the whole database: the argmin label plus every
/// per-template score for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub label: String,
    pub best_score: f64,
    pub per_template: Vec<TemplateScore>,
}

/// Euclidean distance between two eigenvectors of equal length.
pub fn eigvec_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum.sqrt())
}

/// Per-pair term `|lambda_test - lambda_db| * dist(v_test, v_db)`; the score
/// is the sum of the five terms.
pub fn weighted_score(test: &FeatureVector, db: &FeatureVector) -> Result<(f64, [f64; TOP_K])> {
    let mut terms = [0.0; TOP_K];
    for i in 0..TOP_K {
        let dist = eigvec_distance(&test.vectors[i], &db.vectors[i])?;
        terms[i] = (test.values[i] - db.values[i]).abs() * dist;
    }
    Ok((terms.iter().sum(), terms))
}

/// Scores every template and returns the one with the minimal score; ties
/// keep the earliest enrolled template.
pub fn classify(test: &FeatureVector, db: &TemplateDb) -> Result<RecognitionResult> {
    let result = classify_with_rejection(test, db, f64::INFINITY)?;
    Ok(result.expect("infinite threshold never rejects"))
}

/// Like [`classify`], but returns `None` when even the best template scores
/// above `max_score`. Off by default in the pipeline; recognition always
/// names some label unless a caller opts in.
pub fn classify_with_rejection(
    test: &FeatureVector,
    db: &TemplateDb,
    max_score: f64,
) -> Result<Option<RecognitionResult>> {
    if db.is_empty() {
        return Err(Error::EmptyDb);
    }
    let mut per_template = Vec::with_capacity(db.len());
    let mut best: Option<usize> = None;
    for (i, t) in db.templates().iter().enumerate() {
        let (score, terms) = weighted_score(test, &t.features)?;
        per_template.push(TemplateScore {
            source_id: t.source_id.clone(),
            label: t.label.clone(),
            score,
            terms,
        });
        let better = match best {
            None => true,
            Some(b) => score < per_template[b].score,
        };
        if better {
            best = Some(i);
        }
    }
    let best = best.expect("db checked non-empty");
    let winner = &per_template[best];
    if winner.score > max_score {
        return Ok(None);
    }
    Ok(Some(RecognitionResult {
        label: winner.label.clone(),
        best_score: winner.score,
        per_template,
    }))
}
