"""Sea turtle carapace re-identification.

HOG template matching under a nearest-neighbour distance ratio rule,
with an ORB-style keypoint baseline and a cross-validated evaluation
harness. The heavy lifting lives in the compiled ``_core`` module.
"""

import json as _json

from ._core import (
    DatasetStats,
    HogParams,
    Keypoint,
    MatchDecision,
    NndrScore,
    RoiRect,
    SampleKey,
    SampleRecord,
    TurtleidError,
    average_accuracy_from_proportions,
    classify,
    compute_hog,
    crop_roi,
    dataset_stats,
    descriptor_len,
    detect_fast,
    evaluate_manifest_json,
    gaussian_smooth,
    hog_distance,
    keypoint_image_score,
    load_image,
    load_manifest,
    load_pgm,
    make_sample_id,
    nndr_score,
    nndr_score_distances,
    random_guess_baseline,
    resize,
    rotate,
    save_pgm,
    to_grayscale,
    write_manifest,
)

__all__ = [
    "DatasetStats",
    "HogParams",
    "Keypoint",
    "MatchDecision",
    "NndrScore",
    "RoiRect",
    "SampleKey",
    "SampleRecord",
    "TurtleidError",
    "average_accuracy_from_proportions",
    "classify",
    "compute_hog",
    "crop_roi",
    "dataset_stats",
    "descriptor_len",
    "detect_fast",
    "evaluate_manifest",
    "evaluate_manifest_json",
    "gaussian_smooth",
    "hog_distance",
    "keypoint_image_score",
    "load_image",
    "load_manifest",
    "load_pgm",
    "make_sample_id",
    "nndr_score",
    "nndr_score_distances",
    "random_guess_baseline",
    "resize",
    "rotate",
    "save_pgm",
    "to_grayscale",
    "write_manifest",
]

__version__ = "0.1.0"


def evaluate_manifest(manifest, descriptor="hog", folds="loo", seed=0,
                      operating_threshold=0.9, jobs=1):
    """Run the full cross-validated evaluation and return the report dict."""
    return _json.loads(
        evaluate_manifest_json(
            str(manifest),
            descriptor=descriptor,
            folds=str(folds),
            seed=seed,
            operating_threshold=operating_threshold,
            jobs=jobs,
        )
    )
