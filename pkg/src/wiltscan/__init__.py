"""Fusarium wilt detection in crop-field images.

The pipeline peels known scene categories out of an HSV image with
threshold boxes and morphology, clusters the leftover pixels with
k-means, selects the wilt cluster by its centroid hue, and maps the
surviving regions back onto the source image as contours.
"""

from wiltscan.clustering import (
    ClusterModel,
    ElbowScan,
    PixelSample,
    PixelSamples,
    choose_elbow_k,
    cluster_frames,
    cluster_mask,
    collect_samples,
    elbow_scan,
    kmeans,
    select_wilt_cluster,
)
from wiltscan.colorspace import (
    HsvPixel,
    hsv_to_rgb_image,
    normalize_hsv,
    rgb_to_hsv_image,
    rgb_to_hsv_pixel,
)
from wiltscan.config import (
    CategoryConfig,
    CleanupConfig,
    ClusteringConfig,
    ContourConfig,
    MorphologyConfig,
    OutputConfig,
    PipelineConfig,
    default_config,
    load_config,
    parse_config,
    serialize_config,
)
from wiltscan.contours import (
    Contour,
    ContourFilter,
    draw_contours,
    filter_contours,
    find_contours,
)
from wiltscan.errors import (
    ConfigError,
    CorruptDataError,
    DimensionMismatchError,
    EmptyDirectoryError,
    EmptyInputError,
    InfeasibleSpecError,
    InvalidColorspaceError,
    KExceedsSamplesError,
    OutOfBoundsError,
    PipelineStageError,
    UnsupportedFormatError,
    WiltscanError,
)
from wiltscan.image import (
    BinaryMask,
    RasterImage,
    load_image,
    mask_to_image,
    mask_to_rle,
    rle_to_mask,
    save_image,
)
from wiltscan.morphology import (
    StructuringElement,
    apply_sequence,
    close_mask,
    dilate,
    erode,
    open_mask,
)
from wiltscan.pipeline import (
    BatchSummary,
    PipelineResult,
    process_image,
    run_batch,
    run_pipeline,
)
from wiltscan.report import DetectionReport, validate_report, write_report
from wiltscan.segmentation import (
    CategoryProfile,
    HsvRange,
    SegmentationResult,
    apply_residual,
    default_profiles,
    segment_categories,
    threshold_mask,
)
from wiltscan.synth import (
    DetectionScore,
    GroundTruth,
    SceneSpec,
    WiltBlob,
    generate_scene,
    place_blobs,
    score_detection,
)

__version__ = "0.1.0"
