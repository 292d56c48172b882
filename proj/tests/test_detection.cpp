#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fcorr/detection.hpp"
#include "fcorr/synth.hpp"

using namespace fcorr;

namespace {

// Two-frame scene with the boat moved by (sx, sy) and rotated by theta
// between frames; the sea decorrelates completely.
Scene boat_pair(std::uint64_t seed, double sx, double sy, double theta, double dt) {
  SceneSpec spec;
  spec.seed = seed;
  spec.fps = 1.0 / dt;
  spec.poses = {AffineTransform::identity(), {Mat2::rotation(theta), {sx, sy}}};
  return generate(spec);
}

Scene sea_pair(std::uint64_t seed, double dt) {
  SceneSpec spec;
  spec.seed = seed;
  spec.fps = 1.0 / dt;
  spec.has_boat = false;
  spec.poses = {AffineTransform::identity(), AffineTransform::identity()};
  return generate(spec);
}

}  // namespace

TEST_CASE("a moved boat over fresh sea is detected with the right shift") {
  Scene sc = boat_pair(4242, 8.0, 2.0, 0.0, 2.0);
  DetectionVerdict v = detect(sc.frames[0], sc.frames[1], 2.0);
  CHECK(v.present);
  CHECK(v.best_snr > 7.0);
  CHECK(v.shift_x == 8);
  CHECK(v.shift_y == 2);
  CHECK_FALSE(v.low_confidence);
  CHECK(v.per_method.size() == 2);
  // The winning score is one of the per-method entries.
  bool found = false;
  for (const MethodScore& ms : v.per_method)
    if (ms.method == v.best_method && ms.snr == v.best_snr) found = true;
  CHECK(found);
}

TEST_CASE("plain sea yields no detection") {
  Scene sc = sea_pair(77, 2.0);
  DetectionVerdict v = detect(sc.frames[0], sc.frames[1], 2.0);
  CHECK_FALSE(v.present);
  CHECK(v.best_snr < 7.0);
}

TEST_CASE("pairs closer than the sea decorrelation time never count") {
  Scene sc = boat_pair(4242, 8.0, 2.0, 0.0, 2.0);
  // Same frames, but claim dt = 0.5 s: inside the sea correlation window.
  DetectionVerdict v = detect(sc.frames[0], sc.frames[1], 0.5);
  CHECK(v.best_snr > 7.0);  // the peak is there...
  CHECK_FALSE(v.present);   // ...but it could still be sea
  CHECK_FALSE(v.low_confidence);
}

TEST_CASE("pairs beyond t_max are flagged low confidence and not reported present") {
  Scene sc = boat_pair(4242, 8.0, 2.0, 0.0, 2.0);
  DetectionVerdict v = detect(sc.frames[0], sc.frames[1], 5.0);
  CHECK(v.low_confidence);
  CHECK_FALSE(v.present);
}

TEST_CASE("detect validates its inputs") {
  Scene sc = boat_pair(1, 4.0, 0.0, 0.0, 2.0);
  CHECK_THROWS_AS(detect(sc.frames[0], sc.frames[1], 0.0), invalid_input);
  CHECK_THROWS_AS(detect(sc.frames[0], sc.frames[1], -1.0), invalid_input);

  DetectionConfig bad;
  bad.t_sea = 4.0;  // >= t_max
  CHECK_THROWS_AS(detect(sc.frames[0], sc.frames[1], 2.0, bad), invalid_input);
  DetectionConfig bad2;
  bad2.snr_sea = 0.5;
  CHECK_THROWS_AS(detect(sc.frames[0], sc.frames[1], 2.0, bad2), invalid_input);
  DetectionConfig bad3;
  bad3.consecutive = 0;
  CHECK_THROWS_AS(detect(sc.frames[0], sc.frames[1], 2.0, bad3), invalid_input);
}

TEST_CASE("sequence detection pairs every frame with the first") {
  SceneSpec spec;
  spec.seed = 5;
  spec.width = 128;
  spec.height = 128;
  spec.boat.half_length = 28;
  spec.boat.half_width = 9;
  spec.fps = 1.0;
  spec.poses = {AffineTransform::identity(), AffineTransform::translate(2.0, 1.0),
                AffineTransform::translate(4.0, 2.0), AffineTransform::translate(6.0, 3.0)};
  Scene sc = generate(spec);

  std::vector<DetectionVerdict> vs = detect_sequence(sc.frames, sc.timestamps);
  REQUIRE(vs.size() == 3);
  CHECK(vs[0].dt == Catch::Approx(1.0));
  CHECK(vs[2].dt == Catch::Approx(3.0));
  // dt = 1 sits on the sea boundary: excluded. dt = 2 and 3 are in-window.
  CHECK_FALSE(vs[0].present);
  CHECK(vs[1].present);
  CHECK(vs[2].present);
  CHECK(vs[1].shift_x == 4);
  CHECK(vs[1].shift_y == 2);

  // Requiring two consecutive agreeing pairs suppresses the first hit only.
  DetectionConfig cfg;
  cfg.consecutive = 2;
  std::vector<DetectionVerdict> vs2 = detect_sequence(sc.frames, sc.timestamps, cfg);
  CHECK_FALSE(vs2[0].present);
  CHECK_FALSE(vs2[1].present);  // previous pair (dt=1) did not agree
  CHECK(vs2[2].present);

  CHECK_THROWS_AS(detect_sequence({sc.frames[0]}, {0.0}), invalid_input);
}

TEST_CASE("snr series covers all four methods in timestamp order") {
  Scene sc = sea_pair(9, 1.0);
  SceneSpec spec;
  spec.seed = 9;
  spec.has_boat = false;
  spec.fps = 1.0;
  spec.poses = std::vector<AffineTransform>(3, AffineTransform::identity());
  Scene sc3 = generate(spec);

  SnrSeries series = snr_series(sc3.frames, sc3.timestamps);
  REQUIRE(series.size() == 8);  // 2 later frames x 4 methods
  CHECK(series[0].timestamp == Catch::Approx(1.0));
  CHECK(series[4].timestamp == Catch::Approx(2.0));
  for (const SnrSample& s : series) CHECK(s.region == "full");

  // Region crops tag their samples and change the statistics' support.
  SnrSeries strip = snr_series(sc3.frames, sc3.timestamps, {}, left_third(sc3.frames[0]),
                               "left_third");
  REQUIRE(strip.size() == 8);
  for (const SnrSample& s : strip) CHECK(s.region == "left_third");

  std::vector<double> bad_ts = {0.0, 0.0, 1.0};
  CHECK_THROWS_AS(snr_series(sc3.frames, bad_ts), invalid_input);
}

TEST_CASE("threshold estimation finds the decorrelation knee") {
  // Fabricated boatless series: still correlated at t=0.5, noise-level after.
  SnrSeries series;
  auto add = [&](double t, double snr) {
    for (Method m : {Method::orientation, Method::phase, Method::focused_orientation,
                     Method::focused_phase})
      series.push_back({t, m, "full", snr});
  };
  add(0.5, 9.0);
  add(1.0, 5.2);
  add(1.5, 4.9);
  add(2.0, 5.0);

  std::size_t n = 512ull * 512ull;  // bound = sqrt(2 ln n) ~ 5.0
  ThresholdEstimate est = estimate_thresholds(series, n, 1.4);
  CHECK(est.noise_bound == Catch::Approx(std::sqrt(2.0 * std::log(262144.0))));
  CHECK(est.t_sea == Catch::Approx(1.0));
  // Threshold covers both the theoretical ceiling and the observed tail.
  CHECK(est.snr_sea >= 5.0);
  CHECK(est.snr_sea == Catch::Approx(5.2));

  // A series that never settles cannot be calibrated.
  SnrSeries hot;
  for (double t : {1.0, 2.0, 3.0}) hot.push_back({t, Method::orientation, "full", 50.0});
  CHECK_THROWS_AS(estimate_thresholds(hot, n, 1.4), numerical_error);

  CHECK_THROWS_AS(estimate_thresholds({}, n, 1.4), invalid_input);
}

TEST_CASE("threshold estimation needs a settled tail, not one lucky sample") {
  SnrSeries series;
  series.push_back({1.0, Method::orientation, "full", 4.0});
  // Single settled timestamp: no tail to confirm stability.
  CHECK_THROWS_AS(estimate_thresholds(series, 65536, 1.4), numerical_error);
}
