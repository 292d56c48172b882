#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "fcorr/image_io.hpp"
#include "fcorr/segmentation.hpp"
#include "fcorr/synth.hpp"

using namespace fcorr;
namespace fs = std::filesystem;

namespace {

SceneSpec pair_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  spec.poses = {AffineTransform::identity(), AffineTransform::identity()};
  return spec;
}

double pearson(const ImageF& a, const ImageF& b) {
  double ma = mean(a), mb = mean(b), num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.pixels(); ++i) {
    num += (a.data[i] - ma) * (b.data[i] - mb);
    da += (a.data[i] - ma) * (a.data[i] - ma);
    db += (b.data[i] - mb) * (b.data[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  SceneSpec spec = pair_spec(12345);
  Scene a = generate(spec);
  Scene b = generate(spec);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    CHECK(a.frames[k].data == b.frames[k].data);  // bitwise
    CHECK(a.truth.masks[k].data == b.truth.masks[k].data);
  }

  Scene c = generate(pair_spec(12346));
  CHECK(a.frames[0].data != c.frames[0].data);
}

TEST_CASE("full sea memory freezes the scene") {
  SceneSpec spec = pair_spec(6);
  spec.sea_memory = 1.0;
  spec.poses.push_back(AffineTransform::identity());
  Scene sc = generate(spec);
  CHECK(sc.frames[1].data == sc.frames[0].data);
  CHECK(sc.frames[2].data == sc.frames[0].data);
}

TEST_CASE("zero sea memory decorrelates consecutive frames") {
  SceneSpec spec = pair_spec(7);
  spec.has_boat = false;
  Scene sc = generate(spec);
  CHECK(std::abs(pearson(sc.frames[0], sc.frames[1])) < 0.05);
}

TEST_CASE("intermediate memory keeps frames partially correlated") {
  SceneSpec spec = pair_spec(8);
  spec.has_boat = false;
  spec.sea_memory = 0.9;
  Scene sc = generate(spec);
  double r = pearson(sc.frames[0], sc.frames[1]);
  CHECK(r > 0.6);
  CHECK(r < 0.99);
}

TEST_CASE("frames are valid gray images with sane sea statistics") {
  SceneSpec spec = pair_spec(9);
  Scene sc = generate(spec);
  for (const ImageF& f : sc.frames) {
    CHECK(all_finite(f));
    CHECK(min_value(f) >= 0.0);
    CHECK(max_value(f) <= 1.0);
  }
  // Sea sits around its design level with visible texture.
  SceneSpec bare = pair_spec(9);
  bare.has_boat = false;
  Scene sea = generate(bare);
  CHECK(mean(sea.frames[0]) == Catch::Approx(0.45).margin(0.02));
  CHECK(stdev(sea.frames[0]) > 0.05);
}

namespace {

// Pearson autocorrelation of a scalar image at an (dx, dy) circular lag.
double scalar_autocorr(const ImageF& f, int dx, int dy) {
  double m = mean(f), num = 0.0, den = 0.0;
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      double u = f.at(x, y) - m;
      double v = f.at((x + dx) % f.width, (y + dy) % f.height) - m;
      num += u * v;
      den += u * u;
    }
  return num / den;
}

// Autocorrelation of a unit-vector field: mean dot product between a pixel's
// vector and the one a circular lag away. This is the per-pixel quantity the
// field matching surface sums, so it is the relevant notion of whiteness.
double vector_autocorr(const GradientField& o, int dx, int dy) {
  double num = 0.0;
  for (int y = 0; y < o.x.height; ++y)
    for (int x = 0; x < o.x.width; ++x) {
      int xs = (x + dx) % o.x.width;
      int ys = (y + dy) % o.x.height;
      num += o.x.at(x, y) * o.x.at(xs, ys) + o.y.at(x, y) * o.y.at(xs, ys);
    }
  return num / double(o.x.width * o.x.height);
}

}  // namespace

TEST_CASE("whitened sea decorrelates past the correlation length") {
  SceneSpec spec = pair_spec(10);
  spec.has_boat = false;
  spec.sea_corr_length = 1.0;
  Scene sc = generate(spec);
  GradientField o = orientation_operator(sc.frames[0]);

  // The raw sea is still strongly correlated just past its correlation
  // length; whitening knocks that down by an order of magnitude.
  double raw2 = scalar_autocorr(sc.frames[0], 2, 0);
  CHECK(raw2 > 0.3);
  CHECK(std::abs(vector_autocorr(o, 2, 0)) < 0.1);
  CHECK(std::abs(vector_autocorr(o, 0, 2)) < 0.1);
  CHECK(std::abs(vector_autocorr(o, 2, 0)) < raw2 / 3.0);

  // The gradient stencil spans one pixel each way, so a small structural
  // ripple survives out to roughly twice that reach; cap it.
  CHECK(std::abs(vector_autocorr(o, 3, 0)) < 0.2);
  CHECK(std::abs(vector_autocorr(o, 0, 3)) < 0.2);

  // Beyond the combined support of sea smoothing and stencil, the field is
  // effectively white in both axes.
  for (int lag = 4; lag <= 8; ++lag) {
    CHECK(std::abs(vector_autocorr(o, lag, 0)) < 0.1);
    CHECK(std::abs(vector_autocorr(o, 0, lag)) < 0.1);
  }
}

TEST_CASE("boat patch carries plausible alpha and texture") {
  BoatPatch patch = make_boat_patch(BoatSpec{});
  CHECK(patch.texture.width == 129);  // 2*60 + 9
  CHECK(patch.alpha.height == 49);    // 2*20 + 9
  CHECK(max_value(patch.alpha) == 1.0);
  // Border ring is fully transparent so compositing never clips content.
  for (int x = 0; x < patch.alpha.width; ++x) {
    CHECK(patch.alpha.at(x, 0) == 0.0);
    CHECK(patch.alpha.at(x, patch.alpha.height - 1) == 0.0);
  }
  CHECK(min_value(patch.texture) >= 0.0);
  CHECK(max_value(patch.texture) <= 1.0);
  CHECK_THROWS_AS(make_boat_patch(BoatSpec{7, 1.0, 1.0, 2.0, 0.35}), invalid_input);
}

TEST_CASE("composite equals sea plus boat and the truth mask marks the hull") {
  SceneSpec spec = pair_spec(4242);
  Scene with = generate(spec);
  SceneSpec bare = spec;
  bare.has_boat = false;
  Scene without = generate(bare);

  // Same seed: identical sea. Compositing the patch onto the bare sea
  // reproduces the boat frame bit for bit.
  BoatPatch patch = make_boat_patch(spec.boat);
  ImageF rebuilt = without.frames[0];
  BinaryMask mask(rebuilt.width, rebuilt.height, 0);
  composite_boat(rebuilt, patch, spec.poses[0], &mask);
  CHECK(rebuilt.data == with.frames[0].data);
  CHECK(mask.data == with.truth.masks[0].data);

  // Mask area is in the right ballpark for the default hull.
  std::size_t area = mask_area(with.truth.masks[0]);
  CHECK(area > 3000);
  CHECK(area < 6000);

  // Boatless scenes have empty truth masks.
  CHECK(mask_area(without.truth.masks[0]) == 0);
}

TEST_CASE("ground truth records relative shifts and distortions") {
  SceneSpec spec;
  spec.seed = 3;
  spec.poses = {AffineTransform::translate(-2.0, 1.0),
                {Mat2::rotation(0.1), {6.0, 3.0}},
                {Mat2{0.92, -0.20, 0.08, 0.87}, {-2.0, 1.0}}};
  spec.fps = 2.0;
  Scene sc = generate(spec);

  CHECK(sc.timestamps[1] == Catch::Approx(0.5));
  CHECK(sc.truth.shifts[0].x == 0.0);
  CHECK(sc.truth.shifts[1].x == Catch::Approx(8.0));
  CHECK(sc.truth.shifts[1].y == Catch::Approx(2.0));
  CHECK(distortion_norm(sc.truth.distortions[0]) == Catch::Approx(0.0).margin(1e-12));
  CHECK(distortion_norm(sc.truth.distortions[1]) ==
        Catch::Approx(2.0 * std::sin(0.05)).epsilon(1e-9));
  CHECK(distortion_norm(sc.truth.distortions[2]) == Catch::Approx(0.2400).margin(5e-4));
}

TEST_CASE("poses that push the boat out of frame are rejected") {
  SceneSpec spec = pair_spec(11);
  spec.poses[1] = AffineTransform::translate(200.0, 0.0);
  CHECK_THROWS_AS(generate(spec), invalid_input);

  SceneSpec tiny = pair_spec(12);
  tiny.width = 64;
  tiny.height = 64;  // default 129 px hull cannot fit
  CHECK_THROWS_AS(generate(tiny), invalid_input);
}

TEST_CASE("rocking poses sample a sinusoid") {
  std::vector<AffineTransform> poses = rocking_poses(0.1, 4.0, 1.0, 12.0);
  REQUIRE(poses.size() == 13);
  CHECK(distortion_norm(poses[0]) == Catch::Approx(0.0).margin(1e-12));
  CHECK(distortion_norm(poses[1]) == Catch::Approx(2.0 * std::sin(0.05)).epsilon(1e-9));
  CHECK(distortion_norm(poses[2]) == Catch::Approx(0.0).margin(1e-9));
  CHECK(poses[3].linear.b == Catch::Approx(std::sin(0.1)));  // theta = -0.1
  CHECK_THROWS_AS(rocking_poses(0.1, 0.0, 1.0, 12.0), invalid_input);
}

TEST_CASE("scene round trips through the directory format") {
  SceneSpec spec = pair_spec(13);
  spec.poses[1] = AffineTransform::translate(5.0, -3.0);
  spec.fps = 0.5;
  Scene sc = generate(spec);

  std::string dir = (fs::temp_directory_path() / "fcorr_scene_rt").string();
  fs::remove_all(dir);
  write_scene(dir, sc);

  std::vector<std::string> paths;
  std::vector<double> ts;
  load_manifest((fs::path(dir) / "manifest.tsv").string(), paths, ts);
  REQUIRE(paths.size() == 2);
  CHECK(ts[0] == 0.0);
  CHECK(ts[1] == Catch::Approx(2.0));

  ImageF frame0 = load_image(paths[0]);
  REQUIRE(frame0.width == sc.frames[0].width);
  double worst = 0.0;
  for (std::size_t i = 0; i < frame0.pixels(); ++i)
    worst = std::max(worst, std::abs(frame0.data[i] - sc.frames[0].data[i]));
  CHECK(worst <= 0.51 / 65535.0);  // 16-bit quantization only

  std::vector<TruthRow> truth = load_truth((fs::path(dir) / "truth.tsv").string());
  REQUIRE(truth.size() == 2);
  CHECK(truth[1].shift_x == Catch::Approx(5.0));
  CHECK(truth[1].shift_y == Catch::Approx(-3.0));
  CHECK(truth[1].linear.a == Catch::Approx(1.0));
  CHECK(truth[1].mask_path == "mask_001.png");

  ImageF mask = load_image((fs::path(dir) / truth[0].mask_path).string());
  std::size_t on = 0;
  for (double v : mask.data) on += v > 0.5 ? 1 : 0;
  CHECK(on == mask_area(sc.truth.masks[0]));

  fs::remove_all(dir);
}

TEST_CASE("generation validates its spec") {
  SceneSpec spec;
  CHECK_THROWS_AS(generate(spec), invalid_input);  // no poses
  spec.poses = {AffineTransform::identity()};
  spec.fps = 0.0;
  CHECK_THROWS_AS(generate(spec), invalid_input);
  spec.fps = 1.0;
  spec.sea_memory = 1.5;
  CHECK_THROWS_AS(generate(spec), invalid_input);
}
