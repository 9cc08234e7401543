#include "rollsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "rollsim/corpus_io.hpp"
#include "rollsim/corruption.hpp"
#include "rollsim/errors.hpp"

namespace rollsim {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base ^ (stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ---- plan -------------------------------------------------------------------

std::string PlanReport::text() const {
  std::ostringstream out;
  out.precision(6);
  out << "delta_t_rst_us      " << delta_t_rst_us << "\n"
      << "t_exp_us            " << t_exp_us << " (" << t_exp_source << ")\n"
      << "t_on_us             " << t_on_us << "\n"
      << "n_o (offset 0)      " << timing.n_o << "\n"
      << "n_min               " << timing.n_min << "\n"
      << "n_min_effective     " << timing.n_min_effective << "\n"
      << "n_max               " << timing.n_max << "\n"
      << "distortions/frame   " << timing.n_d << "\n"
      << "\nmisestimation sensitivity (N_max(true) / N_max(estimate))\n"
      << "  grid rows           " << surface.rows.size() << "\n"
      << "  max ratio           " << surface.max_ratio << "\n"
      << "  within factor two   " << surface.fraction_within_two << "\n"
      << "  t_on_us,max_ratio,fraction_within_two\n";
  for (const auto& s : surface.slices) {
    out << "  " << s.t_on_us << ',' << s.max_ratio << ',' << s.fraction_within_two << "\n";
  }
  return out.str();
}

PlanReport run_plan(const RunConfig& cfg) {
  bool clamped = false;
  const EnvConditions env = cfg.resolve_env(&clamped);
  PlanReport r;
  r.t_exp_us = env.exposure_us;
  r.t_exp_source = cfg.exposure_us ? "config" : (clamped ? "estimated (clamped)" : "estimated");
  r.timing = make_plan(cfg.camera, cfg.laser, env.exposure_us);
  r.delta_t_rst_us = r.timing.delta_t_rst_us;
  r.t_on_us = cfg.laser.on_time_us();

  const ExposureRange exposure = cfg.camera.exposure_range.value_or(
      ExposureRange{env.exposure_us / 4.0, env.exposure_us * 4.0});
  ExposureRange on_range{r.t_on_us, r.t_on_us};
  for (const auto& p : sweep_points(cfg.sweep)) {
    on_range.min_us = std::min(on_range.min_us, p.params.t_on_us);
    on_range.max_us = std::max(on_range.max_us, p.params.t_on_us);
  }
  r.surface = misestimation_surface(
      default_surface_grid(exposure, on_range, r.delta_t_rst_us, cfg.surface_points));
  return r;
}

// ---- synth ------------------------------------------------------------------

PatternSequence run_synth(const RunConfig& cfg, int n_frames) {
  TimelineConfig tc;
  tc.spec = cfg.camera;
  tc.laser = cfg.laser;
  tc.env = cfg.resolve_env();
  tc.n_frames = n_frames;
  tc.dead_area_layout = cfg.layout;
  tc.seed = cfg.seed;
  tc.explicit_phase = cfg.laser_phase_explicit;
  SynthesisResult res = synthesize(tc);
  PatternSequence seq;
  seq.meta.camera = cfg.camera;
  seq.meta.laser = cfg.laser;
  seq.meta.laser.phase_s = res.phase_s;
  seq.meta.env = tc.env;
  seq.meta.seed = cfg.seed;
  seq.meta.layout = cfg.layout;
  seq.frames = std::move(res.patterns);
  return seq;
}

// ---- corpora ----------------------------------------------------------------

std::vector<Video> load_videos(const std::filesystem::path& root, int every_k) {
  if (!fs::is_directory(root)) throw DataError("corpus root is not a directory: '" + root.string() + "'");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) dirs.push_back(root);
  std::vector<Video> videos;
  for (const auto& d : dirs) {
    Corpus c = load_frames(d, every_k);
    videos.push_back({d.filename().string(), std::move(c.frames)});
  }
  const int h = videos.front().frames.front().height;
  const int w = videos.front().frames.front().width;
  for (const auto& v : videos) {
    if (v.frames.front().height != h || v.frames.front().width != w) {
      throw DataError("video '" + v.video_id + "' resolution differs from the rest of the corpus");
    }
  }
  return videos;
}

// ---- sweep ------------------------------------------------------------------

std::vector<SweepPoint> sweep_points(const SweepAxes& axes) {
  std::vector<SweepPoint> out;
  for (double f : axes.frequencies_hz) {
    for (double t_exp : axes.exposures_us) {
      for (double d : axes.duty_cycles) {
        out.push_back({{f, t_exp, d / f * 1e6}, d});
      }
    }
  }
  return out;
}

std::vector<DistortionPattern> pick_patterns(const SynthesisResult& synth, int count,
                                             std::uint64_t seed) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < synth.patterns.size(); ++i) {
    if (!synth.patterns[i].empty()) usable.push_back(i);
  }
  std::mt19937_64 rng(seed);
  // Fisher-Yates with our own index draw so the order is stdlib independent.
  for (std::size_t i = usable.size(); i > 1; --i) {
    std::swap(usable[i - 1], usable[rng() % i]);
  }
  usable.resize(std::min<std::size_t>(usable.size(), static_cast<std::size_t>(count)));
  std::sort(usable.begin(), usable.end());
  std::vector<DistortionPattern> out;
  for (auto i : usable) out.push_back(synth.patterns[i]);
  return out;
}

std::vector<int> pair_indices(int n_frames, int n_pairs) {
  std::vector<int> out;
  if (n_frames < 2 || n_pairs < 1) return out;
  const int available = n_frames - 1;
  const int count = std::min(n_pairs, available);
  for (int k = 0; k < count; ++k) {
    // Spread k over [1, n_frames - 1].
    const int idx = 1 + static_cast<int>((static_cast<long long>(k) * available) / count);
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

namespace {

struct SweepTask {
  OutcomeReport report;
  std::vector<StealthRecord> rolling;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string tuple_name(const ParamTuple& p) {
  return "sweep point f=" + fmt(p.f_hz) + " t_exp=" + fmt(p.t_exp_us) + " t_on=" + fmt(p.t_on_us);
}

// Adds the failing sweep point to the message, keeping the error category.
[[noreturn]] void rethrow_with_context(const std::string& where) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg, const std::vector<Video>& videos,
                      const Detector& detector, int jobs) {
  if (videos.empty()) throw DataError("sweep needs at least one video");
  const auto points = sweep_points(cfg.sweep);
  if (points.empty()) throw ConfigError("sweep grid is empty");
  const int frame_rows = videos.front().frames.front().height;

  // Clean detections and legit stealth records, once per video.
  std::vector<std::vector<BoxSet>> clean(videos.size());
  std::vector<std::vector<StealthRecord>> legit(videos.size());
  parallel_for(videos.size(), jobs, [&](std::size_t v) {
    for (auto& set : detector.detect(videos[v].frames)) {
      clean[v].push_back(admit(set, cfg.score_threshold));
    }
    std::vector<FramePair> pairs;
    for (int i : pair_indices(static_cast<int>(videos[v].frames.size()), cfg.sweep.stealth_pairs)) {
      pairs.push_back({videos[v].video_id, i, Scenario::kLegit, &videos[v].frames[i - 1],
                       &videos[v].frames[i]});
    }
    legit[v] = build_records(pairs);
  });

  // Pattern sets per sweep point.
  std::vector<std::vector<DistortionPattern>> pattern_sets(points.size());
  std::vector<PatternMeta> metas(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t t) {
    const auto& p = points[t];
    TimelineConfig tc;
    tc.spec = cfg.camera;
    tc.laser = cfg.laser;
    tc.laser.frequency_hz = p.params.f_hz;
    tc.laser.duty_cycle = p.duty_cycle;
    tc.env.exposure_us = p.params.t_exp_us;
    if (cfg.illuminance_lux) tc.env.illuminance_lux = *cfg.illuminance_lux;
    tc.n_frames = cfg.sweep.synth_frames;
    tc.dead_area_layout = cfg.layout;
    tc.seed = derive_seed(cfg.seed, 2 * t);
    tc.explicit_phase = cfg.laser_phase_explicit;
    try {
      const SynthesisResult synth = synthesize(tc);
      for (auto& pat : pick_patterns(synth, cfg.sweep.patterns_per_config,
                                     derive_seed(cfg.seed, 2 * t + 1))) {
        pattern_sets[t].push_back(
            rescale_pattern(pat, cfg.camera.n_rows_visible, frame_rows));
      }
      metas[t] = {tc.spec, tc.laser, tc.env, tc.seed, tc.dead_area_layout};
      metas[t].laser.phase_s = synth.phase_s;
      metas[t].camera.n_rows_visible = frame_rows;
    } catch (...) {
      rethrow_with_context(tuple_name(p.params));
    }
  });

  const std::size_t n_tasks = points.size() * videos.size();
  std::vector<SweepTask> tasks(n_tasks);
  parallel_for(n_tasks, jobs, [&](std::size_t task) {
    const std::size_t t = task / videos.size();
    const std::size_t v = task % videos.size();
    const auto& p = points[t];
    const Video& video = videos[v];
    SweepTask& out = tasks[task];
    out.report.params = p.params;
    out.report.group = video.video_id;
    try {
      std::vector<Frame> corrupted;
      // Remove patterns that vanished when rescaled to the frame height.
      std::vector<DistortionPattern> usable;
      for (const auto& pat : pattern_sets[t]) {
        if (!pat.empty()) usable.push_back(pat);
      }
      if (usable.empty()) {
        corrupted = video.frames;
      } else {
        PatternSequence seq{metas[t], usable};
        corrupted = corrupt_corpus(video.frames, seq, 1, derive_seed(cfg.seed, 1'000'003 * (t + 1) + v))
                        .frames;
      }
      const auto boxes = detector.detect(corrupted);
      for (std::size_t i = 0; i < corrupted.size(); ++i) {
        out.report.add(categorize(clean[v][i], admit(boxes[i], cfg.score_threshold)));
      }
      std::vector<FramePair> pairs;
      for (int i : pair_indices(static_cast<int>(video.frames.size()), cfg.sweep.stealth_pairs)) {
        pairs.push_back({video.video_id, i, Scenario::kRolling, &video.frames[i - 1], &corrupted[i]});
      }
      out.rolling = build_records(pairs);
    } catch (...) {
      rethrow_with_context(tuple_name(p.params) + " video " + video.video_id);
    }
  });

  SweepResult result;
  for (std::size_t t = 0; t < points.size(); ++t) {
    for (std::size_t v = 0; v < videos.size(); ++v) {
      SweepTask& task = tasks[t * videos.size() + v];
      result.reports.push_back(std::move(task.report));
      for (const auto& r : legit[v]) result.stealth.push_back({points[t].params, r});
      for (auto& r : task.rolling) result.stealth.push_back({points[t].params, std::move(r)});
    }
  }
  result.summary = aggregate(result.reports);
  return result;
}

std::string SweepResult::summary_csv() const { return rollsim::summary_csv(summary); }

std::string SweepResult::reports_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "f_hz,t_exp_us,t_on_us,video_id,n_original,n_corrupted,hidden,misplaced,unaltered,"
         "appeared,hidden_fraction,misplaced_fraction,appeared_fraction\n";
  for (const auto& r : reports) {
    out << r.params.f_hz << ',' << r.params.t_exp_us << ',' << r.params.t_on_us << ','
        << r.group << ',' << r.n_original << ',' << r.n_corrupted << ',' << r.hidden << ','
        << r.misplaced << ',' << r.unaltered << ',' << r.appeared << ',' << r.hidden_fraction()
        << ',' << r.misplaced_fraction() << ',' << r.appeared_fraction() << '\n';
  }
  return out.str();
}

std::string SweepResult::stealth_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "f_hz,t_exp_us,t_on_us,video_id,pair_index,scenario,metric,dissimilarity\n";
  for (const auto& s : stealth) {
    for (Metric m : kAllMetrics) {
      out << s.params.f_hz << ',' << s.params.t_exp_us << ',' << s.params.t_on_us << ','
          << s.record.video_id << ',' << s.record.pair_index << ','
          << scenario_name(s.record.scenario) << ',' << metric_name(m) << ','
          << s.record.value(m) << '\n';
    }
  }
  return out.str();
}

// ---- stealth ----------------------------------------------------------------

std::vector<StealthRecord> run_stealth(const StealthInput& input, int jobs) {
  std::vector<DistortionPattern> pool;
  for (const auto& p : input.patterns) {
    if (!p.empty()) pool.push_back(p);
  }
  if (pool.empty()) throw DataError("stealth comparison needs at least one non-empty pattern");
  input.blinding.validate();

  std::vector<std::vector<StealthRecord>> per_video(input.videos.size());
  parallel_for(input.videos.size(), jobs, [&](std::size_t v) {
    const Video& video = input.videos[v];
    std::mt19937_64 rng(derive_seed(input.seed, v));
    const auto idx = pair_indices(static_cast<int>(video.frames.size()), input.pairs_per_video);
    std::vector<Frame> rolling;
    std::vector<Frame> blinded;
    rolling.reserve(idx.size());
    blinded.reserve(idx.size());
    for (int i : idx) {
      rolling.push_back(overlay(video.frames[i], pool[rng() % pool.size()]));
      blinded.push_back(blind(video.frames[i], input.blinding));
    }
    std::vector<FramePair> pairs;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Frame* prev = &video.frames[idx[k] - 1];
      pairs.push_back({video.video_id, idx[k], Scenario::kLegit, prev, &video.frames[idx[k]]});
      pairs.push_back({video.video_id, idx[k], Scenario::kRolling, prev, &rolling[k]});
      pairs.push_back({video.video_id, idx[k], Scenario::kBlinding, prev, &blinded[k]});
    }
    per_video[v] = build_records(pairs);
  });
  std::vector<StealthRecord> out;
  for (auto& recs : per_video) {
    for (auto& r : recs) out.push_back(std::move(r));
  }
  return out;
}

std::vector<DistortionPattern> pattern_pool(const RunConfig& cfg, int per_config,
                                            int target_rows) {
  std::vector<DistortionPattern> pool;
  const auto points = sweep_points(cfg.sweep);
  for (std::size_t t = 0; t < points.size(); ++t) {
    TimelineConfig tc;
    tc.spec = cfg.camera;
    tc.laser = cfg.laser;
    tc.laser.frequency_hz = points[t].params.f_hz;
    tc.laser.duty_cycle = points[t].duty_cycle;
    tc.env.exposure_us = points[t].params.t_exp_us;
    tc.n_frames = cfg.sweep.synth_frames;
    tc.dead_area_layout = cfg.layout;
    tc.seed = derive_seed(cfg.seed, 2 * t);
    const SynthesisResult synth = synthesize(tc);
    for (const auto& p : pick_patterns(synth, per_config, derive_seed(cfg.seed, 2 * t + 1))) {
      auto scaled = rescale_pattern(p, cfg.camera.n_rows_visible, target_rows);
      if (!scaled.empty()) pool.push_back(std::move(scaled));
    }
  }
  return pool;
}

}  // namespace rollsim
