#include "vrface/stream_io.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace vrface {

namespace fs = std::filesystem;

json stream_line_to_json(const StreamLine& line) {
  json j = frame_to_json(line.frame);
  if (line.eyes) j["eyes"] = {{"left", line.eyes->left}, {"right", line.eyes->right}};
  if (line.sentence) j["sentence"] = *line.sentence;
  return j;
}

StreamLine stream_line_from_json(const json& j) {
  StreamLine line;
  line.frame = frame_from_json(j);
  if (j.contains("eyes")) {
    const auto& e = j["eyes"];
    line.eyes = EyeObservation{e.at("left").get<Keypoint>(), e.at("right").get<Keypoint>()};
  }
  if (j.contains("sentence")) line.sentence = j["sentence"].get<std::string>();
  return line;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Format, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::Format, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Format, "cannot move output into place at " + path.string());
  }
}

json load_json_file(const fs::path& path) { return parse_json(read_text_file(path), path.string()); }

void save_json_file(const fs::path& path, const json& value) { write_file_atomic(path, value.dump(2) + "\n"); }

namespace {

template <class Fn>
auto with_format_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, context + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), context + ": " + e.what());
  }
}

template <class Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, n);
  }
}

}  // namespace

std::vector<StreamLine> parse_stream(const std::string& text) {
  std::vector<StreamLine> out;
  for_each_line(text, [&](const std::string& line, std::size_t n) {
    const std::string ctx = "line " + std::to_string(n);
    out.push_back(with_format_context(ctx, [&] { return stream_line_from_json(parse_json(line, "json")); }));
  });
  return out;
}

std::string format_stream(const std::vector<StreamLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += stream_line_to_json(l).dump();
    out += '\n';
  }
  return out;
}

std::vector<StreamLine> read_stream(const fs::path& path) {
  return with_format_context(path.string(), [&] { return parse_stream(read_text_file(path)); });
}

void write_stream(const fs::path& path, const std::vector<StreamLine>& lines) {
  write_file_atomic(path, format_stream(lines));
}

std::vector<FrameRecord> frames_of(const std::vector<StreamLine>& lines) {
  std::vector<FrameRecord> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(l.frame);
  return out;
}

std::vector<CalibrationSample> parse_calibration_samples(const std::string& text) {
  std::vector<CalibrationSample> out;
  for_each_line(text, [&](const std::string& line, std::size_t n) {
    out.push_back(with_format_context("line " + std::to_string(n), [&] {
      const json j = parse_json(line, "json");
      return CalibrationSample{j.at("left").get<Keypoint>(), j.at("right").get<Keypoint>(),
                               j.at("gaze").get<Gaze>()};
    }));
  });
  return out;
}

std::string format_calibration_samples(const std::vector<CalibrationSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += json{{"left", s.left_raw}, {"right", s.right_raw}, {"gaze", s.gaze_gt}}.dump();
    out += '\n';
  }
  return out;
}

EyeBoundary parse_boundary_annotation(const std::string& text) {
  std::map<std::string, Keypoint> points;
  for_each_line(text, [&](const std::string& raw, std::size_t n) {
    const std::string line = raw.substr(0, raw.find('#'));
    std::istringstream in(line);
    std::string label;
    if (!(in >> label)) return;
    Keypoint p;
    std::string extra;
    if (!(in >> p.x >> p.y) || (in >> extra)) {
      throw Error(ErrorKind::Format, "line " + std::to_string(n) + ": expected 'label x y'");
    }
    if (label != "origin" && label != "pos_u" && label != "neg_u" && label != "pos_v" && label != "neg_v") {
      throw Error(ErrorKind::Format, "line " + std::to_string(n) + ": unknown label '" + label + "'");
    }
    if (!points.emplace(label, p).second) {
      throw Error(ErrorKind::Format, "line " + std::to_string(n) + ": duplicate label '" + label + "'");
    }
  });
  for (const char* label : {"origin", "pos_u", "neg_u", "pos_v", "neg_v"}) {
    if (!points.count(label)) throw Error(ErrorKind::Format, std::string("missing boundary point '") + label + "'");
  }
  EyeBoundary b{points["origin"], points["pos_u"], points["neg_u"], points["pos_v"], points["neg_v"]};
  b.validate();
  return b;
}

std::string format_boundary_annotation(const EyeBoundary& b) {
  std::ostringstream out;
  out.precision(17);
  out << "# label x y (normalized source-image coordinates)\n";
  out << "origin " << b.origin.x << ' ' << b.origin.y << '\n';
  out << "pos_u " << b.pos_u.x << ' ' << b.pos_u.y << '\n';
  out << "neg_u " << b.neg_u.x << ' ' << b.neg_u.y << '\n';
  out << "pos_v " << b.pos_v.x << ' ' << b.pos_v.y << '\n';
  out << "neg_v " << b.neg_v.x << ' ' << b.neg_v.y << '\n';
  return out.str();
}

namespace {

std::optional<double> env_double(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0') throw Error(ErrorKind::InvalidArgument, std::string(name) + " is not a number");
  return d;
}

}  // namespace

void apply_env_overrides(PipelineConfig& config) {
  if (auto v = env_double("VRFACE_LAMBDA_SWAP")) config.lambda_swap = *v;
  if (auto v = env_double("VRFACE_LAMBDA_C")) config.lambda_c = *v;
  if (auto v = env_double("VRFACE_SOURCE_FRAME_ID")) config.source_frame_id = static_cast<std::int64_t>(*v);
}

std::optional<FrameInput> JsonlReplaySource::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = "line " + std::to_string(line_no_);
    const json j = parse_json(line, ctx);
    StreamLine sl;
    try {
      sl = stream_line_from_json(j);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Format, ctx + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), ctx + ": " + e.what());
    }
    if (!sl.eyes) throw Error(ErrorKind::MalformedFrame, ctx + ": frame carries no eye observation");
    return FrameInput{sl.frame.frame_id, sl.frame.timestamp, sl.frame.keypoints, sl.eyes->left, sl.eyes->right};
  }
  return std::nullopt;
}

void JsonLinesSink::consume(const RenderRequest& request) {
  out_ << json(request).dump() << '\n';
}

}  // namespace vrface
