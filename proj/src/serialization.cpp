#include "vrface/serialization.hpp"

namespace vrface {

void to_json(json& j, const Keypoint& p) { j = json::array({p.x, p.y}); }

void from_json(const json& j, Keypoint& p) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Format, "keypoint must be [x, y]");
  p = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const Gaze& g) { j = json::array({g.u, g.v}); }

void from_json(const json& j, Gaze& g) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Format, "gaze must be [u, v]");
  g = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const Transform2D& t) {
  const auto& m = t.matrix();
  j = json::array();
  for (int r = 0; r < 3; ++r) j.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
}

void from_json(const json& j, Transform2D& t) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::Format, "transform must be a 3x3 array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != 3) throw Error(ErrorKind::Format, "transform must be a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = row[c].get<double>();
  }
  t = Transform2D(m);
}

void to_json(json& j, const RolePartition& p) {
  json roles = json::array();
  for (Role r : p.roles()) roles.push_back(to_string(r));
  j = {{"roles", roles}, {"gaze_index", p.gaze_index()}};
}

void from_json(const json& j, RolePartition& p) {
  std::vector<Role> roles;
  for (const auto& r : j.at("roles")) roles.push_back(role_from_string(r.get<std::string>()));
  p = RolePartition(std::move(roles), j.at("gaze_index").get<std::size_t>());
}

void to_json(json& j, const AlignmentModel& m) {
  j = {{"transforms", m.transforms},
       {"rank_deficient", m.rank_deficient},
       {"iteration_count", m.iteration_count},
       {"final_residual", m.final_residual}};
}

void from_json(const json& j, AlignmentModel& m) {
  m.transforms = j.at("transforms").get<std::vector<Transform2D>>();
  m.rank_deficient = j.value("rank_deficient", std::vector<bool>(m.transforms.size(), false));
  if (m.rank_deficient.size() != m.transforms.size()) {
    throw Error(ErrorKind::Format, "rank_deficient flags do not match the transform count");
  }
  m.iteration_count = j.value("iteration_count", 0);
  m.final_residual = j.value("final_residual", 0.0);
}

void to_json(json& j, const CorrespondencePair& p) {
  j = {{"mouth_frame_id", p.mouth_frame_id}, {"source_frame_id", p.source_frame_id}, {"distance", p.distance}};
}

void to_json(json& j, const EyeCalibration& c) {
  j = {{"left_transform", c.left_transform}, {"right_transform", c.right_transform}, {"fit_residual", c.fit_residual}};
}

void from_json(const json& j, EyeCalibration& c) {
  c.left_transform = j.at("left_transform").get<Transform2D>();
  c.right_transform = j.at("right_transform").get<Transform2D>();
  c.fit_residual = j.value("fit_residual", 0.0);
}

void to_json(json& j, const EyeBoundary& b) {
  j = {{"origin", b.origin}, {"pos_u", b.pos_u}, {"neg_u", b.neg_u}, {"pos_v", b.pos_v}, {"neg_v", b.neg_v}};
}

void from_json(const json& j, EyeBoundary& b) {
  b.origin = j.at("origin").get<Keypoint>();
  b.pos_u = j.at("pos_u").get<Keypoint>();
  b.neg_u = j.at("neg_u").get<Keypoint>();
  b.pos_v = j.at("pos_v").get<Keypoint>();
  b.neg_v = j.at("neg_v").get<Keypoint>();
  b.validate();
}

void to_json(json& j, const BlendConfig& c) {
  j = {{"lambda_e", c.lambda_e}, {"lambda_e_tilde", c.lambda_e_tilde}, {"lambda_o", c.lambda_o}};
}

void from_json(const json& j, BlendConfig& c) {
  c.lambda_e = j.at("lambda_e").get<double>();
  c.lambda_e_tilde = j.at("lambda_e_tilde").get<double>();
  c.lambda_o = j.at("lambda_o").get<double>();
  c.validate();
}

void to_json(json& j, const FeatureGrid& g) {
  j = {{"shape", {g.height(), g.width(), g.channels()}}, {"data", g.data()}};
}

void from_json(const json& j, FeatureGrid& g) {
  const auto& shape = j.at("shape");
  if (!shape.is_array() || shape.size() != 3) throw Error(ErrorKind::Format, "grid shape must be [h, w, c]");
  g = FeatureGrid(shape[0].get<std::size_t>(), shape[1].get<std::size_t>(), shape[2].get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

void to_json(json& j, const RetrievalState& s) {
  j = {{"current_index", s.current_index ? json(*s.current_index) : json(nullptr)},
       {"current_distance", s.current_distance ? json(*s.current_distance) : json(nullptr)}};
}

void from_json(const json& j, RetrievalState& s) {
  s = {};
  if (!j.at("current_index").is_null()) s.current_index = j["current_index"].get<std::size_t>();
  if (!j.at("current_distance").is_null()) s.current_distance = j["current_distance"].get<double>();
}

void to_json(json& j, const GazeState& s) {
  j = {{"filtered", s.filtered}, {"last_confidence", s.last_confidence}, {"blink", s.blink}};
}

void from_json(const json& j, GazeState& s) {
  s.filtered = j.at("filtered").get<Gaze>();
  s.last_confidence = j.at("last_confidence").get<double>();
  s.blink = j.at("blink").get<bool>();
}

void to_json(json& j, const PipelineState& s) {
  j = {{"schema_version", kSchemaVersion},
       {"retrieval", s.retrieval},
       {"gaze", s.gaze},
       {"blended_expression", s.blended_expression ? json(*s.blended_expression) : json(nullptr)},
       {"last_output", s.last_output ? json(*s.last_output) : json(nullptr)},
       {"frame_counter", s.frame_counter},
       {"last_timestamp", s.last_timestamp ? json(*s.last_timestamp) : json(nullptr)}};
}

void from_json(const json& j, PipelineState& s) {
  s = {};
  s.retrieval = j.at("retrieval").get<RetrievalState>();
  s.gaze = j.at("gaze").get<GazeState>();
  if (!j.at("blended_expression").is_null()) s.blended_expression = j["blended_expression"].get<FeatureGrid>();
  if (!j.at("last_output").is_null()) s.last_output = j["last_output"].get<FeatureGrid>();
  s.frame_counter = j.at("frame_counter").get<std::uint64_t>();
  if (!j.at("last_timestamp").is_null()) s.last_timestamp = j["last_timestamp"].get<double>();
}

void to_json(json& j, const PipelineConfig& c) {
  j = {{"lambda_swap", c.lambda_swap},
       {"lambda_c", c.lambda_c},
       {"blend", c.blend},
       {"eye_boundary", c.eye_boundary},
       {"partition", c.partition},
       {"source_frame_id", c.source_frame_id}};
}

void from_json(const json& j, PipelineConfig& c) {
  c = {};
  c.lambda_swap = j.value("lambda_swap", kDefaultLambdaSwap);
  c.lambda_c = j.value("lambda_c", kDefaultLambdaC);
  if (j.contains("blend")) c.blend = j["blend"].get<BlendConfig>();
  if (j.contains("eye_boundary")) c.eye_boundary = j["eye_boundary"].get<EyeBoundary>();
  if (j.contains("partition")) c.partition = j["partition"].get<RolePartition>();
  c.source_frame_id = j.value("source_frame_id", std::int64_t{0});
}

void to_json(json& j, const DrivingFrame& d) {
  j = {{"keypoints", d.keypoints.points()},
       {"expression_index", d.expression_index},
       {"eye_coordinate", d.eye_coordinate},
       {"blink", d.blink}};
}

void to_json(json& j, const RenderRequest& r) {
  j = {{"frame_index", r.frame_index},
       {"timestamp", r.timestamp},
       {"driving", r.driving},
       {"source_payload_ref", r.source_payload_ref},
       {"expression_payload_ref", r.expression_payload_ref},
       {"blend_weights", r.blend_weights},
       {"switched", r.switched},
       {"confidence", r.confidence},
       {"expression_features", r.expression_features}};
}

void to_json(json& j, const LatencySummary& s) {
  j = {{"mean_us", s.mean_us}, {"p50_us", s.p50_us}, {"p90_us", s.p90_us}, {"p99_us", s.p99_us}, {"max_us", s.max_us}};
}

void to_json(json& j, const ReplayReport& r) {
  json drops = json::array();
  for (const auto& d : r.drops) drops.push_back({{"index", d.index}, {"reason", d.reason}});
  j = {{"frames", r.frames},
       {"processed", r.processed},
       {"dropped", r.dropped},
       {"drops", drops},
       {"switches", r.switches},
       {"blink_frames", r.blink_frames},
       {"latency",
        {{"gaze", r.gaze}, {"retrieval", r.retrieval}, {"driving", r.driving}, {"blend", r.blend}, {"total", r.total}}}};
}

json frame_to_json(const FrameRecord& frame) {
  json roles = json::array();
  for (Role r : frame.keypoints.roles()) roles.push_back(to_string(r));
  return {{"schema_version", kSchemaVersion},
          {"frame_id", frame.frame_id},
          {"timestamp", frame.timestamp},
          {"points", frame.keypoints.points()},
          {"roles", roles},
          {"payload_ref", frame.payload_ref}};
}

FrameRecord frame_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Format, "stream line is not a JSON object");
  if (!j.contains("schema_version")) throw Error(ErrorKind::Format, "missing schema_version");
  if (j["schema_version"].get<int>() != kSchemaVersion) {
    throw Error(ErrorKind::Format, "unsupported schema_version " + j["schema_version"].dump());
  }
  FrameRecord f;
  f.frame_id = j.at("frame_id").get<std::int64_t>();
  f.timestamp = j.at("timestamp").get<double>();
  f.payload_ref = j.value("payload_ref", std::string{});
  auto points = j.at("points").get<std::vector<Keypoint>>();
  std::vector<Role> roles;
  for (const auto& r : j.at("roles")) roles.push_back(role_from_string(r.get<std::string>()));
  f.keypoints = KeypointSet(std::move(points), std::move(roles));
  return f;
}

json parse_json(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, context + ": " + e.what());
  }
}

}  // namespace vrface
