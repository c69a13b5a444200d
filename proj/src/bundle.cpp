#include "vrface/bundle.hpp"

#include "vrface/stream_io.hpp"

namespace vrface {

namespace fs = std::filesystem;

PipelineBundle load_pipeline_bundle(const fs::path& config_path) {
  const json j = load_json_file(config_path);
  const fs::path dir = config_path.parent_path();
  auto resolve = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw Error(ErrorKind::Format, config_path.string() + ": missing path '" + key + "'");
    }
    const fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : dir / p;
  };

  try {
    PipelineBundle b;
    auto frames = frames_of(read_stream(resolve("source_stream")));
    b.store = std::make_shared<const ExpressionStore>(std::move(frames));
    b.model = std::make_shared<const AlignmentModel>(load_json_file(resolve("alignment_model")).get<AlignmentModel>());
    b.eyes = std::make_shared<const EyeCalibration>(load_json_file(resolve("eye_calibration")).get<EyeCalibration>());

    json cfg = j;
    cfg["eye_boundary"] = j["eye_boundary"].is_string() ? load_json_file(resolve("eye_boundary")) : j["eye_boundary"];
    if (!cfg.contains("partition")) {
      const auto& src = b.store->value(0).keypoints;
      json roles = json::array();
      for (Role r : src.roles()) roles.push_back(to_string(r));
      cfg["partition"] = {{"roles", roles}, {"gaze_index", j.value("gaze_index", RolePartition::landmarks68().gaze_index())}};
    }
    b.config = cfg.get<PipelineConfig>();
    apply_env_overrides(b.config);
    b.config.validate();
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, config_path.string() + ": " + e.what());
  }
}

}  // namespace vrface
