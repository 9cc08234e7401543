#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rollsim/corpus_io.hpp"
#include "rollsim/errors.hpp"
#include "rollsim/pattern_synth.hpp"

using namespace rollsim;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("rollsim-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "-" + std::to_string(counter++) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

void write_frames(const fs::path& dir, int n, int w, int h) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) {
    Frame f = oracle::textured(w, h, i);
    f.frame_id = std::to_string(i);
    frames.push_back(f);
  }
  save_frames(frames, dir);
}

}  // namespace

TEST(Png, RoundTrip) {
  TempDir t;
  const Frame f = oracle::textured(33, 17, 1);
  write_png(f, t.path() / "a.png");
  const Frame back = read_png(t.path() / "a.png");
  EXPECT_EQ(back.width, 33);
  EXPECT_EQ(back.height, 17);
  EXPECT_EQ(back.pixels, f.pixels);
  EXPECT_EQ(back.frame_id, "a");
}

TEST(LoadFrames, EveryKth) {
  TempDir t;
  write_frames(t.path(), 100, 8, 6);
  const Corpus c = load_frames(t.path(), 10);
  ASSERT_EQ(c.frames.size(), 10u);
  EXPECT_EQ(c.frame_ids[0], "000000");
  EXPECT_EQ(c.frame_ids[1], "000010");
  EXPECT_EQ(c.frames[9].frame_id, "000090");
  EXPECT_EQ(c.width, 8);
  EXPECT_EQ(load_frames(t.path(), 1).frames.size(), 100u);
}

TEST(LoadFrames, NumericOrder) {
  TempDir t;
  for (const char* name : {"2", "10", "1"}) write_png(Frame(4, 4), t.path() / (std::string(name) + ".png"));
  EXPECT_EQ(list_frame_ids(t.path()), (std::vector<std::string>{"1", "2", "10"}));
  EXPECT_EQ(sample_ids({"a", "b", "c", "d", "e"}, 2), (std::vector<std::string>{"a", "c", "e"}));
}

TEST(LoadFrames, Errors) {
  TempDir t;
  EXPECT_NE(error_of([&] { load_frames(t.path(), 1); }).find("no PNG frames"), std::string::npos);
  write_frames(t.path(), 3, 8, 6);
  write_png(Frame(9, 6), t.path() / "000003.png");
  EXPECT_NE(error_of([&] { load_frames(t.path(), 1); }).find("resolution mismatch"), std::string::npos);
  fs::remove(t.path() / "000003.png");
  std::ofstream(t.path() / "000004.png") << "not a png";
  EXPECT_NE(error_of([&] { load_frames(t.path(), 1); }).find("000004.png"), std::string::npos);
  EXPECT_THROW(load_frames(t.path() / "missing", 1), DataError);
  EXPECT_THROW(load_frames(t.path(), 0), ConfigError);
}

TEST(Boxes, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  std::vector<BoxSet> sets;
  for (int i = 0; i < 20; ++i) {
    BoxSet s;
    s.frame_id = "f" + std::to_string(i);
    for (int k = 0; k < i % 4; ++k) {
      const double x = (rng() % 100000) / 7.0;
      s.boxes.push_back({x, x / 3, x + 0.1 + (rng() % 1000) / 3.0, x / 3 + 1e-7, "car",
                         (rng() % 1000) / 999.0});
    }
    sets.push_back(s);
  }
  EXPECT_EQ(boxes_from_jsonl(boxes_to_jsonl(sets)), sets);
}

TEST(Boxes, EmptyListIsValid) {
  const auto sets = boxes_from_jsonl("{\"frame_id\": \"000001\", \"boxes\": []}\n");
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_TRUE(sets[0].boxes.empty());
}

TEST(Boxes, SchemaErrorsNameLineAndField) {
  const std::string ok = "{\"frame_id\": \"a\", \"boxes\": []}\n";
  const std::string bad =
      "{\"frame_id\": \"b\", \"boxes\": [{\"x1\": 5, \"y1\": 0, \"x2\": 5, \"y2\": 4, "
      "\"class\": \"car\", \"score\": 0.9}]}\n";
  EXPECT_EQ(error_of([&] { boxes_from_jsonl(ok + bad); }),
            "line 2: boxes[0].x2: must be greater than x1");
  EXPECT_NE(error_of([&] { boxes_from_jsonl("{\"frame_id\": 3, \"boxes\": []}"); }).find("line 1: frame_id"),
            std::string::npos);
  EXPECT_NE(error_of([&] { boxes_from_jsonl("{\"frame_id\": \"a\", \"boxes\": [{\"x1\": 0}]}"); })
                .find("boxes[0].y1: missing"),
            std::string::npos);
  EXPECT_NE(error_of([&] { boxes_from_jsonl("not json"); }).find("line 1"), std::string::npos);
  EXPECT_NE(error_of([&] {
              boxes_from_jsonl("{\"frame_id\": \"a\", \"boxes\": [{\"x1\": 0, \"y1\": 0, \"x2\": 1, "
                               "\"y2\": 1, \"class\": \"car\", \"score\": 1.5}]}");
            }).find("score"),
            std::string::npos);
}

TEST(Boxes, LoadRejectsDuplicates) {
  TempDir t;
  write_text_file(t.path() / "b.jsonl", "{\"frame_id\": \"a\", \"boxes\": []}\n"
                                        "{\"frame_id\": \"a\", \"boxes\": []}\n");
  EXPECT_THROW(load_boxes(t.path() / "b.jsonl"), DataError);
}

TEST(Patterns, RoundTripIsBitExact) {
  TimelineConfig tc;
  tc.spec.frame_rate = 25;
  tc.spec.n_rows_total = 2160;
  tc.spec.n_rows_visible = 1080;
  tc.spec.min_luminous_exposure = 0.25;
  tc.spec.exposure_range = ExposureRange{32, 1000};
  tc.laser.frequency_hz = 750;
  tc.laser.duty_cycle = 0.4;
  tc.env.exposure_us = 625;
  tc.n_frames = 3;
  tc.seed = 12345678901234ULL;
  const auto res = synthesize(tc);
  PatternSequence seq;
  seq.meta = {tc.spec, tc.laser, tc.env, tc.seed, DeadAreaLayout::kSplit};
  seq.meta.laser.phase_s = res.phase_s;
  seq.frames = res.patterns;
  const std::string text = patterns_to_json(seq);
  const auto back = patterns_from_json(text);
  EXPECT_EQ(back.frames, seq.frames);
  EXPECT_EQ(back.meta.seed, seq.meta.seed);
  EXPECT_EQ(back.meta.laser.phase_s, seq.meta.laser.phase_s);
  EXPECT_EQ(back.meta.layout, DeadAreaLayout::kSplit);
  EXPECT_EQ(back.meta.camera.exposure_range->max_us, 1000.0);
  EXPECT_FALSE(back.meta.camera.reset_interval_us.has_value());
  EXPECT_EQ(patterns_to_json(back), text);

  TempDir t;
  save_patterns(seq, t.path() / "p.json");
  EXPECT_EQ(load_patterns(t.path() / "p.json").frames, seq.frames);
}

TEST(Patterns, SchemaErrors) {
  EXPECT_NE(error_of([] { patterns_from_json("{}"); }).find("$.meta"), std::string::npos);
  EXPECT_NE(error_of([] { patterns_from_json("[1"); }).find("not valid JSON"), std::string::npos);
  PatternSequence seq;
  seq.meta.camera.n_rows_total = 10;
  seq.meta.camera.n_rows_visible = 10;
  seq.frames.push_back({0, {1, 1, 1}, {{8, 12, {1, 1, 1, 1, 1}}}});
  EXPECT_THROW(patterns_from_json(patterns_to_json(seq)), DataError);
}

TEST(Manifest, RoundTrip) {
  Manifest m;
  m.seed = 77;
  m.every_k = 10;
  m.attack = "rolling";
  m.parameters_json = "{\"a\":1}";
  m.entries = {{"000000", "3", 12}, {"000010", "blinding", -1}};
  EXPECT_EQ(manifest_from_json(manifest_to_json(m)), m);
  EXPECT_THROW(manifest_from_json("{"), DataError);
}

TEST(TextFiles, CreateParentsAndReportMissing) {
  TempDir t;
  write_text_file(t.path() / "a" / "b" / "c.txt", "hi");
  EXPECT_EQ(read_text_file(t.path() / "a" / "b" / "c.txt"), "hi");
  EXPECT_THROW(read_text_file(t.path() / "nope.txt"), DataError);
}
