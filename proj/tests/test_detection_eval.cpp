#include <gtest/gtest.h>

#include <random>

#include "rollsim/detection_eval.hpp"
#include "rollsim/errors.hpp"

using namespace rollsim;

namespace {

DetectionBox box(double x1, double y1, double x2, double y2, std::string cls = "car",
                 double score = 0.9) {
  return {x1, y1, x2, y2, std::move(cls), score};
}

BoxSet random_set(std::mt19937_64& rng, int n) {
  const char* classes[] = {"car", "person", "truck"};
  BoxSet s;
  s.frame_id = "000001";
  for (int i = 0; i < n; ++i) {
    const double x = rng() % 300, y = rng() % 150;
    s.boxes.push_back(box(x, y, x + 1 + rng() % 60, y + 1 + rng() % 40, classes[rng() % 3]));
  }
  return s;
}

}  // namespace

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou(box(0, 0, 10, 10), box(0, 0, 10, 10)), 1.0);
  EXPECT_DOUBLE_EQ(iou(box(0, 0, 10, 10), box(20, 20, 30, 30)), 0.0);
  EXPECT_DOUBLE_EQ(iou(box(0, 0, 10, 10), box(10, 0, 20, 10)), 0.0);  // touching edge
  EXPECT_NEAR(iou(box(0, 0, 10, 10), box(5, 0, 15, 10)), 1.0 / 3, 1e-12);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_set(rng, 2);
    const double a = iou(s.boxes[0], s.boxes[1]);
    EXPECT_EQ(a, iou(s.boxes[1], s.boxes[0]));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_DOUBLE_EQ(iou(s.boxes[0], s.boxes[0]), 1.0);
  }
}

TEST(Categorize, IdenticalSetsAreClean) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_set(rng, static_cast<int>(rng() % 12));
    const auto o = categorize(s, s);
    EXPECT_EQ(o.hidden, 0);
    EXPECT_EQ(o.misplaced, 0);
    EXPECT_EQ(o.appeared, 0);
    EXPECT_EQ(o.unaltered, static_cast<int>(s.boxes.size()));
  }
}

TEST(Categorize, AllHiddenWhenCorruptedEmpty) {
  BoxSet a{"1", {box(0, 0, 10, 10)}};
  const auto o = categorize(a, BoxSet{"1", {}});
  EXPECT_EQ(o.hidden, 1);
  EXPECT_EQ(o.appeared, 0);
  const auto e = categorize(BoxSet{}, a);
  EXPECT_EQ(e.appeared, 1);
  EXPECT_EQ(e.n_original, 0);
}

TEST(Categorize, HalfBoundaryIsHiddenAndAppeared) {
  const auto o = categorize(BoxSet{"1", {box(0, 0, 10, 10)}}, BoxSet{"1", {box(0, 0, 10, 5)}});
  EXPECT_EQ(o.hidden, 1);
  EXPECT_EQ(o.appeared, 1);
  EXPECT_EQ(o.misplaced, 0);
}

TEST(Categorize, BoundariesFlipOutcomes) {
  const BoxSet orig{"1", {box(0, 0, 100, 10)}};
  // IoU just above 0.5: misplaced, not appeared.
  auto o = categorize(orig, BoxSet{"1", {box(0, 0, 51, 10)}});
  EXPECT_EQ(o.misplaced, 1);
  EXPECT_EQ(o.appeared, 0);
  // IoU 0.95 exactly: unaltered.
  o = categorize(orig, BoxSet{"1", {box(0, 0, 95, 10)}});
  EXPECT_EQ(o.unaltered, 1);
  // IoU 0.94: misplaced.
  o = categorize(orig, BoxSet{"1", {box(0, 0, 94, 10)}});
  EXPECT_EQ(o.misplaced, 1);
}

TEST(Categorize, ClassChangeHidesButDoesNotAppear) {
  const auto o = categorize(BoxSet{"1", {box(0, 0, 10, 10, "car")}},
                            BoxSet{"1", {box(0, 0, 10, 10, "truck")}});
  EXPECT_EQ(o.hidden, 1);
  EXPECT_EQ(o.appeared, 0);
}

TEST(Categorize, NonExclusiveMatching) {
  // Two originals both match the same corrupted box.
  const auto o = categorize(BoxSet{"1", {box(0, 0, 10, 10), box(0, 0, 10, 9.8)}},
                            BoxSet{"1", {box(0, 0, 10, 10)}});
  EXPECT_EQ(o.hidden, 0);
  EXPECT_EQ(o.unaltered, 2);
}

TEST(Categorize, CountsPartitionOriginals) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_set(rng, static_cast<int>(rng() % 8));
    const auto b = random_set(rng, static_cast<int>(rng() % 8));
    const auto o = categorize(a, b);
    EXPECT_EQ(o.hidden + o.misplaced + o.unaltered, o.n_original);
    EXPECT_LE(o.appeared, o.n_corrupted);
  }
}

TEST(Admit, ScoreThreshold) {
  BoxSet s{"1", {box(0, 0, 1, 1, "car", 0.49), box(0, 0, 1, 1, "car", 0.5), box(0, 0, 1, 1, "car", 0.9)}};
  EXPECT_EQ(admit(s, 0.5).boxes.size(), 2u);
  EXPECT_EQ(admit(s, 0.0).boxes.size(), 3u);
}

TEST(Aggregate, Examples) {
  OutcomeReport a;
  a.params = {750, 200, 533.3};
  a.n_original = 10;
  a.hidden = 4;
  OutcomeReport b = a;
  b.hidden = 6;
  auto rows = aggregate({a});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].hidden, 0.4);
  EXPECT_DOUBLE_EQ(rows[0].hidden_std, 0.0);
  rows = aggregate({a, a});
  EXPECT_DOUBLE_EQ(rows[0].hidden_std, 0.0);
  rows = aggregate({a, b});
  EXPECT_NEAR(rows[0].hidden, 0.5, 1e-12);
  EXPECT_NEAR(rows[0].hidden_std, 0.1, 1e-12);
  EXPECT_EQ(rows[0].n_reports, 2);
  EXPECT_THROW(aggregate({}), DataError);
}

TEST(Aggregate, GroupsByTupleInOrder) {
  OutcomeReport a, b, c;
  a.params = {750, 200, 10};
  b.params = {25, 32, 10};
  c.params = {750, 200, 10};
  const auto rows = aggregate({a, b, c});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].params.f_hz, 25);
  EXPECT_EQ(rows[1].n_reports, 2);
}

TEST(Aggregate, CsvHeader) {
  OutcomeReport a;
  a.params = {750, 200, 533.3333333};
  a.n_original = 4;
  a.hidden = 1;
  const auto csv = summary_csv(aggregate({a}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "f_hz,t_exp_us,t_on_us,hidden,misplaced,appeared,hidden_std,misplaced_std,"
            "appeared_std,n_reports");
  EXPECT_NE(csv.find("750,200,533.3333333,0.25,0,0,0,0,0,1"), std::string::npos);
}

TEST(OutcomeReport, FractionsAndAdd) {
  OutcomeReport r;
  EXPECT_DOUBLE_EQ(r.hidden_fraction(), 0.0);
  FrameOutcome f = categorize(BoxSet{"1", {box(0, 0, 10, 10), box(50, 50, 60, 60)}},
                              BoxSet{"1", {box(0, 0, 10, 10), box(100, 100, 120, 120)}});
  r.add(f);
  EXPECT_EQ(r.n_original, 2);
  EXPECT_DOUBLE_EQ(r.hidden_fraction(), 0.5);
  EXPECT_DOUBLE_EQ(r.unaltered_fraction(), 0.5);
  EXPECT_DOUBLE_EQ(r.appeared_fraction(), 0.5);
  EXPECT_EQ(r.frames.size(), 1u);
}
