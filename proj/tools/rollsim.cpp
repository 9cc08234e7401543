// rollsim command line: plan, synthesize, corrupt, evaluate and sweep
// rolling-shutter laser attacks.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "rollsim/corpus_io.hpp"
#include "rollsim/corruption.hpp"
#include "rollsim/detection_eval.hpp"
#include "rollsim/detector.hpp"
#include "rollsim/errors.hpp"
#include "rollsim/exposure_validation.hpp"
#include "rollsim/pipeline.hpp"
#include "rollsim/run_config.hpp"
#include "rollsim/scene.hpp"

namespace fs = std::filesystem;
using namespace rollsim;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

RunConfig load_config(const Globals& g) {
  RunConfig cfg = g.config.empty() ? default_run_config() : load_run_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.out_dir = *g.out;
  if (g.jobs) {
    if (*g.jobs < 1) throw ConfigError("--jobs must be >= 1");
    cfg.jobs = *g.jobs;
  }
  return cfg;
}

void write_out(const RunConfig& cfg, const std::string& name, const std::string& text) {
  const fs::path path = cfg.out_dir / name;
  write_text_file(path, text);
  std::cerr << "wrote " << path.string() << "\n";
}

fs::path corpus_or(const RunConfig& cfg, const std::string& flag) {
  const fs::path root = flag.empty() ? cfg.corpus_root : fs::path(flag);
  if (root.empty()) throw ConfigError("no corpus given: pass --frames or set corpus.root");
  if (!fs::exists(root)) throw ConfigError("corpus path does not exist: '" + root.string() + "'");
  return root;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

int cmd_plan(const RunConfig& cfg) {
  const PlanReport r = run_plan(cfg);
  std::cout << r.text();
  write_out(cfg, "surface.csv", surface_csv(r.surface));
  return 0;
}

int cmd_synth(const RunConfig& cfg, int n_frames) {
  const PatternSequence seq = run_synth(cfg, n_frames > 0 ? n_frames : cfg.synth_frames);
  int hits = 0;
  for (const auto& p : seq.frames) hits += p.empty() ? 0 : 1;
  std::cout << "frames " << seq.frames.size() << ", with visible distortion " << hits << "\n";
  write_out(cfg, "patterns.json", patterns_to_json(seq));
  return 0;
}

int cmd_corrupt(const RunConfig& cfg, const std::string& frames_dir,
                const std::string& patterns_file, bool blinding, int every_k) {
  if (blinding == !patterns_file.empty()) {
    throw ConfigError("corrupt needs exactly one of --patterns FILE or --blinding");
  }
  const fs::path root = corpus_or(cfg, frames_dir);
  const Corpus corpus = load_frames(root, 1);
  AttackSource source = cfg.blinding;
  if (!blinding) source = load_patterns(patterns_file);
  const int k = every_k > 0 ? every_k : cfg.every_k;
  const CorruptedCorpus out = corrupt_corpus(corpus.frames, source, k, cfg.seed);
  save_frames(out.frames, cfg.out_dir / "frames");
  write_out(cfg, "manifest.json", manifest_to_json(out.manifest));
  std::cout << "corrupted " << out.frames.size() << " of " << corpus.frames.size() << " frames\n";
  return 0;
}

std::vector<BoxSet> boxes_for(const RunConfig& cfg, const std::string& boxes_file,
                              const std::string& frames_dir, std::vector<std::string>* ids) {
  if (!boxes_file.empty()) {
    const auto by_id = load_boxes(boxes_file);
    std::vector<BoxSet> out;
    for (const auto& [id, set] : by_id) {
      if (ids) ids->push_back(id);
      out.push_back(set);
    }
    return out;
  }
  if (frames_dir.empty()) throw ConfigError("evaluate needs a box file or a frame directory per side");
  const Corpus corpus = load_frames(frames_dir, 1);
  if (ids) ids->assign(corpus.frame_ids.begin(), corpus.frame_ids.end());
  return make_detector(cfg.detector_kind, cfg.detector_command)->detect(corpus.frames);
}

int cmd_evaluate(const RunConfig& cfg, const std::string& clean_boxes,
                 const std::string& corrupted_boxes, const std::string& clean_frames,
                 const std::string& corrupted_frames) {
  const auto clean = boxes_for(cfg, clean_boxes, clean_frames, nullptr);
  const auto corrupted = boxes_for(cfg, corrupted_boxes, corrupted_frames, nullptr);
  std::map<std::string, const BoxSet*> clean_by_id;
  for (const auto& s : clean) clean_by_id[s.frame_id] = &s;

  OutcomeReport report;
  if (cfg.exposure_us) report.params.t_exp_us = *cfg.exposure_us;
  report.params.f_hz = cfg.laser.frequency_hz;
  report.params.t_on_us = cfg.laser.on_time_us();
  report.group = "evaluate";
  std::ostringstream frames_csv;
  frames_csv << "frame_id,n_original,n_corrupted,hidden,misplaced,unaltered,appeared\n";
  for (const auto& c : corrupted) {
    const auto it = clean_by_id.find(c.frame_id);
    if (it == clean_by_id.end()) {
      throw DataError("corrupted frame '" + c.frame_id + "' has no clean counterpart");
    }
    FrameOutcome o = categorize(admit(*it->second, cfg.score_threshold),
                                admit(c, cfg.score_threshold));
    o.frame_id = c.frame_id;
    frames_csv << o.frame_id << ',' << o.n_original << ',' << o.n_corrupted << ',' << o.hidden
               << ',' << o.misplaced << ',' << o.unaltered << ',' << o.appeared << '\n';
    report.add(std::move(o));
  }
  if (report.frames.empty()) throw DataError("no corrupted frames to evaluate");
  write_out(cfg, "frame_outcomes.csv", frames_csv.str());
  write_out(cfg, "summary.csv", summary_csv(aggregate({report})));
  std::cout << "hidden " << fmt(report.hidden_fraction()) << ", misplaced "
            << fmt(report.misplaced_fraction()) << ", appeared "
            << fmt(report.appeared_fraction()) << "\n";
  return 0;
}

int cmd_stealth(const RunConfig& cfg, const std::string& frames_dir,
                const std::string& patterns_file, int per_config) {
  StealthInput in;
  in.videos = load_videos(corpus_or(cfg, frames_dir), 1);
  const int rows = in.videos.front().frames.front().height;
  if (!patterns_file.empty()) {
    const PatternSequence seq = load_patterns(patterns_file);
    for (const auto& p : seq.frames) {
      if (!p.empty()) in.patterns.push_back(rescale_pattern(p, seq.meta.camera.n_rows_visible, rows));
    }
  } else {
    in.patterns = pattern_pool(cfg, per_config, rows);
  }
  in.blinding = cfg.blinding;
  in.pairs_per_video = cfg.sweep.stealth_pairs;
  in.seed = cfg.seed;
  const auto records = run_stealth(in, cfg.jobs);
  const auto report = stealth_report(records);
  write_out(cfg, "stealth_records.csv", records_csv(records));
  write_out(cfg, "stealth_auc.csv", auc_csv(report));
  std::cout << auc_csv(report);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& frames_dir) {
  const auto videos = load_videos(corpus_or(cfg, frames_dir), cfg.every_k);
  const auto detector = make_detector(cfg.detector_kind, cfg.detector_command);
  const SweepResult r = run_sweep(cfg, videos, *detector, cfg.jobs);
  write_out(cfg, "summary.csv", r.summary_csv());
  write_out(cfg, "reports.csv", r.reports_csv());
  write_out(cfg, "stealth_records.csv", r.stealth_csv());
  std::cout << "sweep points " << r.summary.size() << ", videos " << videos.size() << "\n";
  return 0;
}

int cmd_validate_exposure(const RunConfig& cfg, const std::string& frame_file, double t_ref,
                          const std::vector<double>& offsets, double sigma) {
  Frame base;
  if (frame_file.empty()) {
    SceneSpec spec;
    spec.n_frames = 1;
    spec.seed = cfg.seed;
    base = render_scene(spec, "exposure").frames.front();
  } else {
    base = read_png(frame_file);
  }
  const auto rows = exposure_correlation(base, t_ref, offsets, sigma, cfg.seed);
  write_out(cfg, "exposure_correlation.csv", exposure_csv(rows));
  std::cout << exposure_csv(rows);
  return 0;
}

int cmd_gen_fixtures(const RunConfig& cfg, int n_videos, int n_frames, int width, int height) {
  const auto videos = make_fixture_corpus(n_videos, n_frames, width, height, cfg.seed);
  for (const auto& v : videos) {
    save_frames(v.frames, cfg.out_dir / v.video_id);
    save_boxes(v.truth, cfg.out_dir / (v.video_id + ".truth.jsonl"));
  }
  std::cout << "wrote " << videos.size() << " videos to " << cfg.out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-shutter laser attack simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override run.seed");
  app.add_option("--out", g.out, "Override run.out (output directory)");
  app.add_option("--jobs", g.jobs, "Override run.jobs (worker threads)");

  auto* plan = app.add_subcommand("plan", "Timing plan and misestimation table");

  int synth_frames = 0;
  auto* synth = app.add_subcommand("synth", "Synthesize distortion patterns");
  synth->add_option("--frames", synth_frames, "Frames to synthesize (default synth.n_frames)");

  std::string frames_dir, patterns_file;
  bool use_blinding = false;
  int every_k = 0;
  auto* corrupt = app.add_subcommand("corrupt", "Overlay patterns or blinding onto a frame directory");
  corrupt->add_option("--frames", frames_dir, "Frame directory (default corpus.root)");
  corrupt->add_option("--patterns", patterns_file, "Pattern file from synth");
  corrupt->add_flag("--blinding", use_blinding, "Use the blinding model");
  corrupt->add_option("--every-k", every_k, "Corrupt every k-th frame (default corpus.every_k)");

  std::string clean_boxes, corrupted_boxes, clean_frames, corrupted_frames;
  auto* evaluate = app.add_subcommand("evaluate", "Categorize detections on clean vs corrupted frames");
  evaluate->add_option("--clean-boxes", clean_boxes, "Box file for clean frames");
  evaluate->add_option("--corrupted-boxes", corrupted_boxes, "Box file for corrupted frames");
  evaluate->add_option("--clean-frames", clean_frames, "Clean frames (run the configured detector)");
  evaluate->add_option("--corrupted-frames", corrupted_frames, "Corrupted frames (run the configured detector)");

  int per_config = 2;
  auto* stealth = app.add_subcommand("stealth", "Frame-pair similarity and ROC-AUC per attack");
  stealth->add_option("--frames", frames_dir, "Corpus root with one subdirectory per video");
  stealth->add_option("--patterns", patterns_file, "Pattern file (default: synthesize over the sweep grid)");
  stealth->add_option("--per-config", per_config, "Patterns drawn per sweep point when synthesizing");

  auto* sweep = app.add_subcommand("sweep", "Full parameter sweep");
  sweep->add_option("--frames", frames_dir, "Corpus root with one subdirectory per video");

  std::string frame_file;
  double t_ref = 200.0;
  double sigma = 2.0;
  std::vector<double> offsets{1.0, 10.0, 50.0, 100.0};
  auto* validate = app.add_subcommand("validate-exposure", "Histogram correlation across exposure offsets");
  validate->add_option("--frame", frame_file, "Base scene PNG (default: a rendered scene)");
  validate->add_option("--t-ref", t_ref, "Reference exposure in microseconds");
  validate->add_option("--offsets", offsets, "Exposure offsets in microseconds")->delimiter(',');
  validate->add_option("--noise", sigma, "Sensor noise sigma in pixel values");

  int fx_videos = 20, fx_frames = 11, fx_width = 320, fx_height = 180;
  auto* fixtures = app.add_subcommand("gen-fixtures", "Write the synthetic street-scene corpus");
  fixtures->add_option("--videos", fx_videos, "Number of videos")->check(CLI::PositiveNumber);
  fixtures->add_option("--frames", fx_frames, "Frames per video")->check(CLI::PositiveNumber);
  fixtures->add_option("--width", fx_width, "Frame width in pixels");
  fixtures->add_option("--height", fx_height, "Frame height in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load_config(g);
    if (*plan) return cmd_plan(cfg);
    if (*synth) return cmd_synth(cfg, synth_frames);
    if (*corrupt) return cmd_corrupt(cfg, frames_dir, patterns_file, use_blinding, every_k);
    if (*evaluate) {
      return cmd_evaluate(cfg, clean_boxes, corrupted_boxes, clean_frames, corrupted_frames);
    }
    if (*stealth) return cmd_stealth(cfg, frames_dir, patterns_file, per_config);
    if (*sweep) return cmd_sweep(cfg, frames_dir);
    if (*validate) return cmd_validate_exposure(cfg, frame_file, t_ref, offsets, sigma);
    if (*fixtures) return cmd_gen_fixtures(cfg, fx_videos, fx_frames, fx_width, fx_height);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
