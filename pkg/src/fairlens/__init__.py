"""Saliency-guided keep-original augmentation and diversity/fairness auditing."""

__version__ = "0.1.0"

from fairlens._backend import BACKEND
from fairlens.augops import AugOp, RandAugPolicy, apply_op, rand_augment
from fairlens.embedding import (
    EmbeddingSpec,
    embed_histogram,
    embed_saliency_weighted,
    l2_normalize,
    load_precomputed,
)
from fairlens.metrics import (
    Group,
    Weights,
    d_inter,
    d_within,
    fairness_diversity,
    iias,
    iss_cross,
    iss_intra,
)
from fairlens.pipeline import AugmentPart, PipelineConfig, augment_dataset, face_keep_original_augment
from fairlens.placement import Placement, choose_region, partition_regions, paste, resize_crop
from fairlens.saliency import (
    Rect,
    SalientBox,
    extract_salient_box,
    fine_grained_saliency,
    integral_image,
    to_grayscale,
)
