#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vrface/driving.hpp"
#include "vrface/eyetrack.hpp"
#include "vrface/pipeline.hpp"
#include "vrface/serialization.hpp"

namespace vrface {

/// Raw keypoints from the two eye cameras for one frame.
struct EyeObservation {
  Keypoint left;
  Keypoint right;

  friend bool operator==(const EyeObservation&, const EyeObservation&) = default;
};

/// One line of a keypoint stream file. Live (mouth-camera) streams also
/// carry the eye observations captured with the frame.
struct StreamLine {
  FrameRecord frame;
  std::optional<EyeObservation> eyes;
  /// Provenance tag naming the enrollment sentence that was read aloud.
  std::optional<std::string> sentence;

  friend bool operator==(const StreamLine&, const StreamLine&) = default;
};

json stream_line_to_json(const StreamLine& line);
StreamLine stream_line_from_json(const json& j);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const json& value);

/// Parses a JSON-lines keypoint stream; blank lines are skipped. Errors carry
/// the 1-based line number.
std::vector<StreamLine> parse_stream(const std::string& text);
std::string format_stream(const std::vector<StreamLine>& lines);

std::vector<StreamLine> read_stream(const std::filesystem::path& path);
void write_stream(const std::filesystem::path& path, const std::vector<StreamLine>& lines);

std::vector<FrameRecord> frames_of(const std::vector<StreamLine>& lines);

/// Calibration triplets, one JSON object per line: {"left", "right", "gaze"}.
std::vector<CalibrationSample> parse_calibration_samples(const std::string& text);
std::string format_calibration_samples(const std::vector<CalibrationSample>& samples);

/// Five-point eye boundary annotation, one "label x y" per line; labels are
/// origin, pos_u, neg_u, pos_v, neg_v. '#' starts a comment.
EyeBoundary parse_boundary_annotation(const std::string& text);
std::string format_boundary_annotation(const EyeBoundary& boundary);

/// Overrides config values from VRFACE_LAMBDA_SWAP, VRFACE_LAMBDA_C and
/// VRFACE_SOURCE_FRAME_ID when set.
void apply_env_overrides(PipelineConfig& config);

/// Replay source over a JSON-lines live stream.
class JsonlReplaySource : public ReplaySource {
 public:
  explicit JsonlReplaySource(std::istream& in) : in_(in) {}
  std::optional<FrameInput> next() override;

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

/// Writes each render request as one JSON line.
class JsonLinesSink : public RenderSink {
 public:
  explicit JsonLinesSink(std::ostream& out) : out_(out) {}
  void consume(const RenderRequest& request) override;

 private:
  std::ostream& out_;
};

}  // namespace vrface
