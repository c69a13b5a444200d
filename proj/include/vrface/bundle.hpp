#pragma once

#include <filesystem>
#include <memory>

#include "vrface/pipeline.hpp"

namespace vrface {

/// Calibrations and enrollment data named by a pipeline config file.
///
/// The config is a JSON object with the PipelineConfig fields plus paths
/// (relative to the config file) to the enrollment stream, the alignment
/// model, the eye calibration and the eye boundary:
///
///   {"source_stream": "source.jsonl", "alignment_model": "alignment.json",
///    "eye_calibration": "eyes.json", "eye_boundary": "eye_boundary.json",
///    "lambda_swap": 0.25, "lambda_c": 0.75, "source_frame_id": 0,
///    "blend": {...}, "gaze_index": 57}
///
/// Without an explicit "partition" the role layout is taken from the source
/// frames, with the gaze keypoint at "gaze_index".
struct PipelineBundle {
  PipelineConfig config;
  std::shared_ptr<const AlignmentModel> model;
  std::shared_ptr<const EyeCalibration> eyes;
  std::shared_ptr<const ExpressionStore> store;

  Pipeline make_pipeline() const { return Pipeline(config, model, eyes, store); }
};

/// Loads a bundle and applies environment overrides to its config.
PipelineBundle load_pipeline_bundle(const std::filesystem::path& config_path);

}  // namespace vrface
