#pragma once

// JSON mappings for the domain types. Doubles are written in shortest
// round-trip form, so a write/read cycle reproduces every value bit for bit.

#include <json.hpp>

#include "vrface/alignment.hpp"
#include "vrface/blend.hpp"
#include "vrface/core_types.hpp"
#include "vrface/driving.hpp"
#include "vrface/eyetrack.hpp"
#include "vrface/pipeline.hpp"
#include "vrface/retrieval.hpp"

namespace vrface {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

void to_json(json& j, const Keypoint& p);
void from_json(const json& j, Keypoint& p);

void to_json(json& j, const Gaze& g);
void from_json(const json& j, Gaze& g);

void to_json(json& j, const Transform2D& t);
void from_json(const json& j, Transform2D& t);

void to_json(json& j, const RolePartition& p);
void from_json(const json& j, RolePartition& p);

void to_json(json& j, const AlignmentModel& m);
void from_json(const json& j, AlignmentModel& m);

void to_json(json& j, const CorrespondencePair& p);

void to_json(json& j, const EyeCalibration& c);
void from_json(const json& j, EyeCalibration& c);

void to_json(json& j, const EyeBoundary& b);
void from_json(const json& j, EyeBoundary& b);

void to_json(json& j, const BlendConfig& c);
void from_json(const json& j, BlendConfig& c);

void to_json(json& j, const FeatureGrid& g);
void from_json(const json& j, FeatureGrid& g);

void to_json(json& j, const RetrievalState& s);
void from_json(const json& j, RetrievalState& s);

void to_json(json& j, const GazeState& s);
void from_json(const json& j, GazeState& s);

void to_json(json& j, const PipelineState& s);
void from_json(const json& j, PipelineState& s);

void to_json(json& j, const PipelineConfig& c);
void from_json(const json& j, PipelineConfig& c);

void to_json(json& j, const DrivingFrame& d);
void to_json(json& j, const RenderRequest& r);

void to_json(json& j, const LatencySummary& s);
void to_json(json& j, const ReplayReport& r);

/// One keypoint-stream line: frame record fields plus the schema version.
json frame_to_json(const FrameRecord& frame);
FrameRecord frame_from_json(const json& j);

/// Parses text as JSON, reporting failures as Error(Format).
json parse_json(const std::string& text, const std::string& context);

}  // namespace vrface
