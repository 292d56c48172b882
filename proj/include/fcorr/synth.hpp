#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "image.hpp"
#include "image_io.hpp"
#include "spectral.hpp"

namespace fcorr {

// Seeded generator with a portable gaussian (Box-Muller on the raw 64-bit
// stream); identical seeds give identical scenes.
struct Rng {
  std::mt19937_64 gen;
  bool have_cached = false;
  double cached = 0.0;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_cached) {
      have_cached = false;
      return cached;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached = r * std::sin(a);
    have_cached = true;
    return r * std::cos(a);
  }
};

inline ImageF white_noise(Rng& rng, int width, int height) {
  ImageF out(width, height);
  for (double& v : out.data) v = rng.gaussian();
  return out;
}

struct BoatSpec {
  std::uint64_t texture_seed = 7;
  double half_length = 60.0;  // pixels along the hull
  double half_width = 20.0;
  double texture_corr = 2.0;  // correlation length of the deck texture
  double contrast = 0.35;
};

struct BoatPatch {
  ImageF texture;
  ImageF alpha;  // soft hull coverage in [0,1]
};

// Superellipse hull with a soft edge, carrying smooth noise texture plus
// longitudinal deck stripes so both gradient and phase whitening see
// structure.
inline BoatPatch make_boat_patch(const BoatSpec& spec) {
  if (spec.half_length < 2 || spec.half_width < 2) throw invalid_input("boat too small");
  int pw = 2 * static_cast<int>(std::lround(spec.half_length)) + 9;
  int ph = 2 * static_cast<int>(std::lround(spec.half_width)) + 9;
  double cx = (pw - 1) / 2.0, cy = (ph - 1) / 2.0;

  Rng rng(spec.texture_seed);
  ImageF noise = gaussian_blur(white_noise(rng, pw, ph), spec.texture_corr);
  double ns = stdev(noise);
  if (ns > 0)
    for (double& v : noise.data) v /= ns;

  BoatPatch patch{ImageF(pw, ph), ImageF(pw, ph)};
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) {
      double rx = std::abs((x - cx) / spec.half_length);
      double ry = std::abs((y - cy) / spec.half_width);
      double r = std::pow(rx, 2.5) + std::pow(ry, 2.5);
      patch.alpha.at(x, y) = std::clamp((1.0 - r) * 6.0, 0.0, 1.0);
      double taper = std::clamp(1.0 - rx, 0.0, 1.0);
      double stripes = 0.5 * std::sin(2.0 * std::numbers::pi * y / 7.0) * taper;
      double tex = 0.68 + spec.contrast * (0.55 * noise.at(x, y) + 0.6 * stripes);
      patch.texture.at(x, y) = std::clamp(tex, 0.0, 1.0);
    }
  return patch;
}

struct SceneSpec {
  int width = 256;
  int height = 256;
  std::uint64_t seed = 1;
  double sea_corr_length = 1.2;  // spatial correlation of the sea texture, px
  double sea_memory = 0.0;       // per-frame retention; 0 = fresh sea each frame
  double sea_noise = 0.03;       // fine per-frame sensor/water micro-pattern
  double fps = 1.0;
  bool has_boat = true;
  BoatSpec boat;
  std::vector<AffineTransform> poses;  // boat pose per frame, about image center
};

struct GroundTruth {
  std::vector<BinaryMask> masks;
  std::vector<Vec2> shifts;                  // pose translation relative to frame 0
  std::vector<AffineTransform> distortions;  // pose_k composed with pose_0^-1
};

struct Scene {
  std::vector<ImageF> frames;
  std::vector<double> timestamps;
  GroundTruth truth;
};

namespace detail {

inline ImageF sea_frame(const ImageF& smooth, const ImageF& white, double sea_noise) {
  ImageF out(smooth.width, smooth.height);
  for (std::size_t i = 0; i < out.pixels(); ++i)
    out.data[i] = std::clamp(0.45 + 0.13 * smooth.data[i] + sea_noise * white.data[i], 0.0, 1.0);
  return out;
}

}  // namespace detail

// The sea fields of a scene: a standardized smoothed-noise texture plus a
// white fine-pattern component, each evolved per frame as a memory-weighted
// mix of the previous field and fresh noise.
inline std::vector<ImageF> sea_sequence(const SceneSpec& spec, int nframes) {
  if (spec.sea_memory < 0.0 || spec.sea_memory > 1.0)
    throw invalid_input("sea_memory must be in [0, 1]");
  Rng rng(spec.seed);
  ImageF smooth =
      standardized(gaussian_blur_wrap(white_noise(rng, spec.width, spec.height), spec.sea_corr_length));
  ImageF white = white_noise(rng, spec.width, spec.height);

  std::vector<ImageF> seas;
  seas.reserve(nframes);
  for (int k = 0; k < nframes; ++k) {
    if (k > 0 && spec.sea_memory < 1.0) {
      double m = spec.sea_memory;
      double a = std::sqrt(1.0 - m * m);
      ImageF fresh_s =
          standardized(gaussian_blur_wrap(white_noise(rng, spec.width, spec.height), spec.sea_corr_length));
      ImageF fresh_w = white_noise(rng, spec.width, spec.height);
      for (std::size_t i = 0; i < smooth.pixels(); ++i) {
        smooth.data[i] = m * smooth.data[i] + a * fresh_s.data[i];
        white.data[i] = m * white.data[i] + a * fresh_w.data[i];
      }
      smooth = standardized(smooth);
    }
    seas.push_back(detail::sea_frame(smooth, white, spec.sea_noise));
  }
  return seas;
}

// Paste the boat over the sea at the given pose (boat-local coordinates map
// through pose.linear, then shift by image center + pose.translation).
// Bilinear inverse mapping; alpha blending; mask = hull coverage > 1/2.
inline void composite_boat(ImageF& frame, const BoatPatch& patch, const AffineTransform& pose,
                           BinaryMask* mask_out) {
  int w = frame.width, h = frame.height;
  int pw = patch.texture.width, ph = patch.texture.height;
  double bcx = (pw - 1) / 2.0, bcy = (ph - 1) / 2.0;
  double cx = w / 2.0, cy = h / 2.0;
  Mat2 inv = pose.linear.inverse();

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Vec2 d{x - cx - pose.translation.x, y - cy - pose.translation.y};
      Vec2 local = inv * d;
      double lx = local.x + bcx, ly = local.y + bcy;
      if (lx < 0.0 || ly < 0.0 || lx > pw - 1.001 || ly > ph - 1.001) continue;
      double a = bilinear_sample(patch.alpha, lx, ly, 0.0);
      if (a <= 0.0) continue;
      double t = bilinear_sample(patch.texture, lx, ly, 0.0);
      frame.at(x, y) = frame.at(x, y) * (1.0 - a) + t * a;
      if (mask_out && a > 0.5) mask_out->at(x, y) = 1;
    }
}

inline void require_boat_fits(const SceneSpec& spec, const BoatPatch& patch,
                              const AffineTransform& pose) {
  double bcx = (patch.texture.width - 1) / 2.0, bcy = (patch.texture.height - 1) / 2.0;
  double cx = spec.width / 2.0, cy = spec.height / 2.0;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      Vec2 corner = pose({sx * bcx, sy * bcy});
      double fx = corner.x + cx, fy = corner.y + cy;
      if (fx < 0 || fy < 0 || fx > spec.width - 1 || fy > spec.height - 1)
        throw invalid_input("boat does not fit within the frame at a requested pose");
    }
}

inline Scene generate(const SceneSpec& spec) {
  if (spec.poses.empty()) throw invalid_input("scene needs at least one pose/frame");
  if (!(spec.fps > 0.0)) throw invalid_input("fps must be positive");
  int n = static_cast<int>(spec.poses.size());

  Scene scene;
  scene.frames = sea_sequence(spec, n);
  BoatPatch patch;
  if (spec.has_boat) {
    patch = make_boat_patch(spec.boat);
    for (const AffineTransform& pose : spec.poses) require_boat_fits(spec, patch, pose);
  }

  AffineTransform inv0 = spec.poses[0].inverse();
  for (int k = 0; k < n; ++k) {
    BinaryMask mask(spec.width, spec.height, 0);
    if (spec.has_boat) composite_boat(scene.frames[k], patch, spec.poses[k], &mask);
    scene.truth.masks.push_back(std::move(mask));
    scene.truth.shifts.push_back(spec.poses[k].translation - spec.poses[0].translation);
    scene.truth.distortions.push_back(spec.poses[k] * inv0);
    scene.timestamps.push_back(k / spec.fps);
  }
  return scene;
}

// Sinusoidal rocking about the boat center: amplitude in radians, one pose
// per frame covering t = 0 .. duration.
inline std::vector<AffineTransform> rocking_poses(double amplitude, double period, double fps,
                                                  double duration) {
  if (!(period > 0.0) || !(fps > 0.0) || duration < 0.0 || amplitude < 0.0)
    throw invalid_input("rocking parameters must be positive");
  int n = static_cast<int>(std::lround(duration * fps)) + 1;
  std::vector<AffineTransform> poses;
  poses.reserve(n);
  for (int k = 0; k < n; ++k) {
    double t = k / fps;
    double theta = amplitude * std::sin(2.0 * std::numbers::pi * t / period);
    poses.push_back({Mat2::rotation(theta), {0.0, 0.0}});
  }
  return poses;
}

// ---- scene directory IO -------------------------------------------------
//
// A written scene contains numbered 16-bit PNG frames and masks plus two
// sidecars: manifest.tsv (path<TAB>seconds) and truth.tsv (per-frame shift,
// 2x2 pose-vs-frame-0 matrix and mask path).

struct TruthRow {
  int frame = 0;
  std::string path;
  double t = 0.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  Mat2 linear;
  std::string mask_path;
};

inline void write_scene(const std::string& dir, const Scene& scene) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.tsv");
  std::ofstream truth(fs::path(dir) / "truth.tsv");
  if (!manifest || !truth) throw io_error("cannot write scene sidecars in " + dir);
  truth << "# frame\tpath\tt\tshift_x\tshift_y\tc00\tc01\tc10\tc11\tmask\n";
  char buf[512];
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    std::snprintf(buf, sizeof buf, "frame_%03zu.png", k);
    std::string frame_name = buf;
    std::snprintf(buf, sizeof buf, "mask_%03zu.png", k);
    std::string mask_name = buf;
    save_image((fs::path(dir) / frame_name).string(), scene.frames[k], 16);
    save_mask((fs::path(dir) / mask_name).string(), scene.truth.masks[k]);
    std::snprintf(buf, sizeof buf, "%s\t%.17g\n", frame_name.c_str(), scene.timestamps[k]);
    manifest << buf;
    const AffineTransform& d = scene.truth.distortions[k];
    std::snprintf(buf, sizeof buf, "%zu\t%s\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%s\n",
                  k, frame_name.c_str(), scene.timestamps[k], scene.truth.shifts[k].x,
                  scene.truth.shifts[k].y, d.linear.a, d.linear.b, d.linear.c, d.linear.d,
                  mask_name.c_str());
    truth << buf;
  }
  if (!manifest || !truth) throw io_error("cannot write scene sidecars in " + dir);
}

// manifest.tsv loader; returned paths are resolved against the manifest's
// directory.
inline void load_manifest(const std::string& path, std::vector<std::string>& paths,
                          std::vector<double>& timestamps) {
  std::ifstream in(path);
  if (!in) throw io_error("unreadable file: " + path);
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw io_error("bad manifest line: " + line);
    std::string p = line.substr(0, tab);
    double t;
    try {
      t = std::stod(line.substr(tab + 1));
    } catch (...) {
      throw io_error("bad manifest line: " + line);
    }
    paths.push_back((base / p).string());
    timestamps.push_back(t);
  }
  if (paths.empty()) throw io_error("empty manifest: " + path);
}

inline std::vector<TruthRow> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("unreadable file: " + path);
  std::vector<TruthRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    TruthRow r;
    char fpath[256], mpath[256];
    if (std::sscanf(line.c_str(), "%d\t%255s\t%lg\t%lg\t%lg\t%lg\t%lg\t%lg\t%lg\t%255s", &r.frame,
                    fpath, &r.t, &r.shift_x, &r.shift_y, &r.linear.a, &r.linear.b, &r.linear.c,
                    &r.linear.d, mpath) != 10)
      throw io_error("bad truth line: " + line);
    r.path = fpath;
    r.mask_path = mpath;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fcorr
