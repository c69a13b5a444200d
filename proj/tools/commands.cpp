#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vrface/bench.hpp"
#include "vrface/bundle.hpp"
#include "vrface/stream_io.hpp"
#include "vrface/synthetic.hpp"

namespace vrface::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string format = "json";
};

void print_report(const json& report, const Common& common) {
  std::cout << (common.format == "jsonl" ? report.dump() : report.dump(2)) << '\n';
}

// ---------------------------------------------------------------------------

struct GenOptions {
  std::size_t frames = 250;
  std::size_t keypoints = 20;
  std::uint64_t seed = 7;
  double noise = 0.01;
  double scale = 0.5;
  double linear_jitter = 0.1;
  double translation_jitter = 0.01;
  bool identity_permutation = false;
  bool lower_face_only = false;
  std::string output;
};

int gen_synthetic(const GenOptions& o, const Common& common) {
  SyntheticScenario sc;
  sc.frames = o.frames;
  sc.lower_face_keypoints = o.keypoints;
  sc.seed = o.seed;
  sc.noise_sigma = o.noise;
  sc.base_scale = o.scale;
  sc.linear_jitter = o.linear_jitter;
  sc.translation_jitter = o.translation_jitter;
  sc.identity_permutation = o.identity_permutation;
  sc.full_face = !o.lower_face_only;
  const auto data = generate_synthetic(sc);

  const fs::path dir = o.output;
  fs::create_directories(dir);
  write_stream(dir / "source.jsonl", data.source);
  write_stream(dir / "mouth.jsonl", data.mouth);
  write_file_atomic(dir / "eye_samples.jsonl", format_calibration_samples(data.eye_samples));
  write_file_atomic(dir / "eye_boundary.txt", format_boundary_annotation(data.eye_boundary));
  save_json_file(dir / "truth.json", json(data.truth));
  json config = {{"source_stream", "source.jsonl"},
                 {"alignment_model", "alignment.json"},
                 {"eye_calibration", "eyes.json"},
                 {"eye_boundary", "eye_boundary.json"},
                 {"lambda_swap", kDefaultLambdaSwap},
                 {"lambda_c", kDefaultLambdaC},
                 {"blend", BlendConfig{}},
                 {"source_frame_id", 0},
                 {"gaze_index", o.keypoints + 37}};
  save_json_file(dir / "pipeline.json", config);

  print_report({{"output", dir.string()},
                {"frames", o.frames},
                {"seed", o.seed},
                {"noise_sigma", o.noise},
                {"files",
                 {"source.jsonl", "mouth.jsonl", "eye_samples.jsonl", "eye_boundary.txt", "truth.json",
                  "pipeline.json"}}},
               common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CalibrateOptions {
  std::string source;
  std::string mouth;
  std::string output;
  std::string truth;
  double holdout = 0.1;
  int max_iterations = 1000;
};

int calibrate_alignment(const CalibrateOptions& o, const Common& common) {
  const auto source = frames_of(read_stream(o.source));
  const auto mouth = frames_of(read_stream(o.mouth));
  validate_sequence(source);
  validate_sequence(mouth);
  const Split split = holdout_split(mouth, o.holdout);

  CalibrationConfig cfg;
  cfg.max_iterations = o.max_iterations;
  const auto start = std::chrono::steady_clock::now();
  const AlignmentModel model = calibrate(source, split.train, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::size_t flagged = 0;
  for (bool b : model.rank_deficient) flagged += b;
  json report = {{"seconds", seconds},
                 {"calibration_frames", split.train.size()},
                 {"heldout_frames", split.test.size()},
                 {"iterations", model.iteration_count},
                 {"final_residual", model.final_residual},
                 {"rank_deficient_keypoints", flagged}};
  if (!split.test.empty()) {
    const auto pairs = find_correspondences(model, split.test, source);
    report["heldout_pair_residual"] = pair_residual(model, pairs, split.test, source);
  }
  if (!o.truth.empty()) {
    const auto truth = load_json_file(o.truth).get<SyntheticTruth>();
    report["heldout_reprojection_error"] = reprojection_error(model, truth.transforms, split.test);
    report["correspondence_agreement"] =
        correspondence_agreement(find_correspondences(model, mouth, source), truth.permutation);
  }
  if (!o.output.empty()) save_json_file(o.output, json(model));
  print_report(report, common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int calibrate_eyes(const std::string& samples_path, const std::string& output, const Common& common) {
  const auto samples = parse_calibration_samples(read_text_file(samples_path));
  const EyeCalibration cal = fit_calibration(samples);
  if (!output.empty()) save_json_file(output, json(cal));
  print_report({{"samples", samples.size()}, {"fit_residual", cal.fit_residual}}, common);
  return kExitOk;
}

int annotate_eye_boundary(const std::string& input, const std::string& output, const Common& common) {
  const EyeBoundary b = parse_boundary_annotation(read_text_file(input));
  if (!output.empty()) save_json_file(output, json(b));
  print_report(json(b), common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReplayOptions {
  std::string config;
  std::string stream;
  std::string output;
  std::string report;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::uint64_t max_frames = 0;
};

int replay(const ReplayOptions& o, const Common& common) {
  const PipelineBundle bundle = load_pipeline_bundle(o.config);
  const Pipeline pipeline = bundle.make_pipeline();

  PipelineState state = pipeline.initial_state();
  if (!o.checkpoint_in.empty()) state = load_json_file(o.checkpoint_in).get<PipelineState>();

  std::ifstream in(o.stream, std::ios::binary);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + o.stream);
  JsonlReplaySource source(in);

  std::ostringstream log;
  std::unique_ptr<RenderSink> sink;
  if (o.output.empty()) {
    sink = std::make_unique<NullSink>();
  } else {
    sink = std::make_unique<JsonLinesSink>(log);
  }
  std::optional<std::uint64_t> limit;
  if (o.max_frames > 0) limit = o.max_frames;
  const ReplayReport report = run_replay(pipeline, source, *sink, state, limit);

  if (!o.output.empty()) {
    if (o.output == "-") {
      std::cout << log.str();
    } else {
      write_file_atomic(o.output, log.str());
    }
  }
  if (!o.checkpoint_out.empty()) save_json_file(o.checkpoint_out, json(state));
  if (!o.report.empty()) save_json_file(o.report, json(report));
  if (o.output != "-") print_report(json(report), common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
  std::size_t frames = 250;
  std::size_t store = 350;
  std::size_t steps = 1000;
  std::uint64_t seed = 7;
  std::string output;
};

int bench(const BenchOptions& o, const Common& common) {
  const BenchReport r = run_bench(o.frames, o.store, o.steps, o.seed);
  const json report = r;
  if (!o.output.empty()) save_json_file(o.output, report);
  print_report(report, common);
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Keypoint engine for VR facial animation: calibration, retrieval, gaze and replay."};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "Report format on stdout")
      ->check(CLI::IsMember({"json", "jsonl"}))
      ->capture_default_str();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic capture with ground truth");
  gen_cmd->add_option("--frames", gen.frames, "Frames per stream")->capture_default_str();
  gen_cmd->add_option("--keypoints", gen.keypoints, "Lower-face keypoints")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Mouth keypoint noise sigma")->capture_default_str();
  gen_cmd->add_option("--scale", gen.scale, "Mouth->source base scale")->capture_default_str();
  gen_cmd->add_option("--linear-jitter", gen.linear_jitter, "Per-keypoint linear perturbation")->capture_default_str();
  gen_cmd->add_option("--translation-jitter", gen.translation_jitter, "Per-keypoint offset range")->capture_default_str();
  gen_cmd->add_flag("--identity-permutation", gen.identity_permutation, "Mouth frame j mirrors source frame j");
  gen_cmd->add_flag("--lower-face-only", gen.lower_face_only, "Source frames carry only lower-face keypoints");
  gen_cmd->add_option("--output", gen.output, "Output directory")->required();

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate-alignment", "Learn per-keypoint mouth->source transforms");
  cal_cmd->add_option("--source", cal.source, "Source enrollment stream (JSON lines)")->required();
  cal_cmd->add_option("--mouth", cal.mouth, "Mouth enrollment stream (JSON lines)")->required();
  cal_cmd->add_option("--output", cal.output, "Alignment model output (JSON)");
  cal_cmd->add_option("--truth", cal.truth, "Synthetic ground truth for recovery metrics");
  cal_cmd->add_option("--holdout", cal.holdout, "Fraction of trailing mouth frames held out")
      ->check(CLI::Range(0.0, 0.95))
      ->capture_default_str();
  cal_cmd->add_option("--max-iterations", cal.max_iterations, "Iteration cap")->capture_default_str();

  std::string eye_samples;
  std::string eye_output;
  auto* eyes_cmd = app.add_subcommand("calibrate-eyes", "Fit eye-camera -> display transforms");
  eyes_cmd->add_option("--samples", eye_samples, "Calibration triplets (JSON lines)")->required();
  eyes_cmd->add_option("--output", eye_output, "Eye calibration output (JSON)");

  std::string boundary_input;
  std::string boundary_output;
  auto* boundary_cmd = app.add_subcommand("annotate-eye-boundary", "Validate a five-point eye boundary annotation");
  boundary_cmd->add_option("--input", boundary_input, "Annotation file ('label x y' lines)")->required();
  boundary_cmd->add_option("--output", boundary_output, "Eye boundary output (JSON)");

  ReplayOptions rep;
  auto* replay_cmd = app.add_subcommand("replay", "Run the pipeline over a recorded live stream");
  replay_cmd->add_option("--config", rep.config, "Pipeline config (JSON)")->required();
  replay_cmd->add_option("--stream", rep.stream, "Live stream (JSON lines)")->required();
  replay_cmd->add_option("--output", rep.output, "Render request log (JSON lines, '-' for stdout)");
  replay_cmd->add_option("--report", rep.report, "Replay report output (JSON)");
  replay_cmd->add_option("--checkpoint-in", rep.checkpoint_in, "Resume from a saved pipeline state");
  replay_cmd->add_option("--checkpoint-out", rep.checkpoint_out, "Save the final pipeline state");
  replay_cmd->add_option("--max-frames", rep.max_frames, "Stop after this many frames (0 = all)");

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Time calibration and per-step pipeline latency");
  bench_cmd->add_option("--frames", bo.frames, "Calibration frames")->capture_default_str();
  bench_cmd->add_option("--store", bo.store, "Expression store size")->capture_default_str();
  bench_cmd->add_option("--steps", bo.steps, "Pipeline steps")->capture_default_str();
  bench_cmd->add_option("--seed", bo.seed, "RNG seed")->capture_default_str();
  bench_cmd->add_option("--output", bo.output, "Report output (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return gen_synthetic(gen, common);
    if (*cal_cmd) return calibrate_alignment(cal, common);
    if (*eyes_cmd) return calibrate_eyes(eye_samples, eye_output, common);
    if (*boundary_cmd) return annotate_eye_boundary(boundary_input, boundary_output, common);
    if (*replay_cmd) return replay(rep, common);
    if (*bench_cmd) return bench(bo, common);
  } catch (const Error& e) {
    std::cerr << "vrface: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "vrface: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace vrface::cli
