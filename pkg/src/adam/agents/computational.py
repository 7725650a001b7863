"""Computational agent: ensemble probability, diversity, attribution.

Assembles everything numeric the language agents consume. The deployed
model may use a feature subset; values are looked up by name from the
sample and imputed with the stored training medians, so the probability
here is exactly what the deployed ensemble predicts for this sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..attribution import Attribution, expected_margin, explain
from ..dataset import Sample
from ..diversity import DiversityProfile, diversity_profile
from ..ensemble.gbdt import GBDTModel
from ..errors import AlignmentError

TOP_FEATURE_COUNT = 10
TOP_TAXA_COUNT = 8


@dataclass(frozen=True)
class DeployedModel:
    """A fitted ensemble plus the feature contract it was trained under.

    :param feature_names: names the model consumes, in training order
        (possibly a selected subset of the dataset's columns).
    :param medians: per-name imputation values from the training
        partition only.
    """

    model: GBDTModel
    feature_names: tuple[str, ...]
    medians: dict[str, float]

    def __post_init__(self):
        if len(self.feature_names) != self.model.n_features:
            raise AlignmentError(
                f"model consumes {self.model.n_features} features but "
                f"{len(self.feature_names)} names were declared")
        missing = [n for n in self.feature_names if n not in self.medians]
        if missing:
            raise AlignmentError(f"no imputation median for: {missing[:5]}")

    def base_value(self) -> float:
        return expected_margin(self.model)


@dataclass(frozen=True)
class ComputationalOutput:
    """All numeric evidence for one sample."""

    sample_id: str
    study_id: str
    visit_index: int
    probability: float
    diversity: DiversityProfile
    attribution: Attribution
    top_features: tuple[tuple[str, float], ...]
    clinical_highlights: tuple[tuple[str, float], ...]
    taxa_highlights: tuple[tuple[str, float], ...]


def feature_vector(sample: Sample, clinical_names, taxon_names,
                   deployed: DeployedModel) -> np.ndarray:
    """Assemble the model input by name, imputing missing values."""
    values = dict(zip(clinical_names, sample.clinical))
    values.update(zip(taxon_names, sample.taxa))
    out = np.empty(len(deployed.feature_names))
    for i, name in enumerate(deployed.feature_names):
        if name not in values:
            raise AlignmentError(f"sample {sample.sample_id} has no feature {name!r}")
        v = float(values[name])
        out[i] = deployed.medians[name] if math.isnan(v) else v
    return out


def run_computational(sample: Sample, clinical_names, taxon_names,
                      deployed: DeployedModel, reference) -> ComputationalOutput:
    """Probability, diversity profile, and attribution for one sample.

    :param reference: SampleSet of healthy training samples; its taxa
        rows anchor the beta-diversity distances.
    """
    clinical_names = tuple(clinical_names)
    taxon_names = tuple(taxon_names)
    x = feature_vector(sample, clinical_names, taxon_names, deployed)
    attribution = explain(deployed.model, x, deployed.feature_names)
    if tuple(reference.taxon_names) != taxon_names:
        raise AlignmentError("reference taxon axis differs from the sample's")
    profile = diversity_profile(np.asarray(sample.taxa, dtype=float),
                                reference.taxa_matrix())
    clinical = tuple(zip(clinical_names,
                         (float(v) for v in sample.clinical)))
    taxa_ranked = sorted(zip(taxon_names, (float(v) for v in sample.taxa)),
                         key=lambda kv: (-kv[1], kv[0]))
    return ComputationalOutput(
        sample_id=sample.sample_id,
        study_id=sample.study_id,
        visit_index=sample.visit_index,
        probability=attribution.probability,
        diversity=profile,
        attribution=attribution,
        top_features=attribution.ranked()[:TOP_FEATURE_COUNT],
        clinical_highlights=clinical,
        taxa_highlights=tuple(taxa_ranked[:TOP_TAXA_COUNT]),
    )
