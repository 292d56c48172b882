// fcorr: focused-correlation ship detection on image sequences.
//
// Subcommands: synth, detect, compare, segment, estimate. All numeric
// defaults match the library defaults, so a bare invocation reproduces the
// reference pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcorr/correlation.hpp"
#include "fcorr/detection.hpp"
#include "fcorr/errors.hpp"
#include "fcorr/image_io.hpp"
#include "fcorr/segmentation.hpp"
#include "fcorr/synth.hpp"

namespace fs = std::filesystem;
using namespace fcorr;

namespace {

struct FrameInputs {
  std::string manifest;
  std::vector<std::string> images;
  double fps = 1.0;
  double dt = 0.0;  // overrides fps spacing for a bare image pair when > 0

  void add_flags(CLI::App* cmd, int min_images) {
    cmd->add_option("--manifest", manifest, "manifest.tsv listing path<TAB>seconds per frame");
    cmd->add_option("images", images, "input frames (PNG or PGM), oldest first")
        ->expected(0, -1);
    cmd->add_option("--fps", fps, "frame rate used to timestamp bare image lists")
        ->check(CLI::PositiveNumber);
    if (min_images == 2)
      cmd->add_option("--dt", dt, "seconds between the two frames of a bare pair");
  }

  void load(std::vector<ImageF>& frames, std::vector<double>& timestamps) const {
    std::vector<std::string> paths = images;
    if (!manifest.empty()) {
      if (!paths.empty()) throw invalid_input("give either --manifest or image paths, not both");
      load_manifest(manifest, paths, timestamps);
    } else {
      if (paths.size() < 2) throw invalid_input("need at least two frames");
      for (std::size_t k = 0; k < paths.size(); ++k) timestamps.push_back(k / fps);
      if (dt > 0.0) {
        if (paths.size() != 2) throw invalid_input("--dt only applies to a bare image pair");
        timestamps[1] = dt;
      }
    }
    for (const std::string& p : paths) frames.push_back(load_image(p));
  }
};

void add_focus_flags(CLI::App* cmd, FocusConfig& cfg) {
  cmd->add_option("--epsilon", cfg.epsilon, "focusing slope; 0 disables focusing");
  cmd->add_option("--focus-x", cfg.focus_x, "focus point x (default: image center)");
  cmd->add_option("--focus-y", cfg.focus_y, "focus point y (default: image center)");
  cmd->add_option("--levels", cfg.levels, "blur stack size for focusing");
  cmd->add_option("--sigma-max", cfg.sigma_max, "blur cap in px (default: epsilon*diag/2)");
}

void add_detect_flags(CLI::App* cmd, DetectionConfig& cfg) {
  cmd->add_option("--snr-sea", cfg.snr_sea, "SNR a ship must exceed");
  cmd->add_option("--t-sea", cfg.t_sea, "seconds until the sea has decorrelated");
  cmd->add_option("--t-max", cfg.t_max, "seconds beyond which the ship itself decorrelates");
  cmd->add_option("--consecutive", cfg.consecutive,
                  "pairs in a row that must agree before reporting presence");
  add_focus_flags(cmd, cfg.focus);
}

std::optional<Rect> region_from_flags(const std::vector<int>& crop_xywh, bool use_left_third,
                                      const ImageF& sample, std::string& tag) {
  if (!crop_xywh.empty() && use_left_third)
    throw invalid_input("give either --crop or --left-third, not both");
  if (use_left_third) {
    tag = "left_third";
    return left_third(sample);
  }
  if (!crop_xywh.empty()) {
    if (crop_xywh.size() != 4) throw invalid_input("--crop wants x,y,w,h");
    tag = "crop";
    return Rect{crop_xywh[0], crop_xywh[1], crop_xywh[2], crop_xywh[3]};
  }
  return std::nullopt;
}

void write_series_csv(std::ostream& out, const SnrSeries& series) {
  out << "timestamp,method,region,snr\n";
  char buf[256];
  for (const SnrSample& s : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%s,%.17g\n", s.timestamp, method_name(s.method),
                  s.region.c_str(), s.snr);
    out << buf;
  }
}

std::ofstream open_out_file(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("cannot write " + path);
  return f;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SceneSpec spec;
  int frames = 13;
  double rock_amplitude = 0.1;
  double rock_period = 4.0;
  double shift_x = 0.0, shift_y = 0.0;
  bool no_boat = false;
  bool final_distortion = false;
};

void run_synth(const SynthArgs& a) {
  SceneSpec spec = a.spec;
  spec.has_boat = !a.no_boat;
  if (a.frames < 1) throw invalid_input("need at least one frame");

  std::vector<AffineTransform> poses =
      rocking_poses(a.rock_amplitude, a.rock_period, spec.fps, (a.frames - 1) / spec.fps);
  for (int k = 0; k < a.frames; ++k) {
    double ramp = a.frames > 1 ? static_cast<double>(k) / (a.frames - 1) : 0.0;
    poses[k].translation = {ramp * a.shift_x, ramp * a.shift_y};
  }
  if (a.final_distortion)
    poses.back().linear = Mat2{0.92, -0.20, 0.08, 0.87} * poses.front().linear;
  spec.poses = poses;

  Scene scene = generate(spec);
  write_scene(a.out_dir, scene);
  std::printf("wrote %d frame(s) to %s (boat=%d, distortion of last pose=%.4f)\n", a.frames,
              a.out_dir.c_str(), spec.has_boat ? 1 : 0,
              distortion_norm(scene.truth.distortions.back()));
}

// ---- detect ----------------------------------------------------------

void run_detect(const FrameInputs& in, const DetectionConfig& cfg, const std::string& out_path) {
  std::vector<ImageF> frames;
  std::vector<double> ts;
  in.load(frames, ts);
  std::vector<DetectionVerdict> verdicts = detect_sequence(frames, ts, cfg);

  std::ostringstream csv;
  csv << "dt,method,snr,shift_x,shift_y,present\n";
  char buf[256];
  for (const DetectionVerdict& v : verdicts)
    for (const MethodScore& ms : v.per_method) {
      std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%d,%d,%d\n", v.dt, method_name(ms.method),
                    ms.snr, ms.shift_x, ms.shift_y, v.present ? 1 : 0);
      csv << buf;
    }
  if (out_path.empty() || out_path == "-") {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    open_out_file(out_path) << csv.str();
  }

  const DetectionVerdict& last = verdicts.back();
  std::fprintf(stderr,
               "verdict: present=%d method=%s snr=%.3f shift=(%d,%d) dt=%g low_confidence=%d\n",
               last.present ? 1 : 0, method_name(last.best_method), last.best_snr, last.shift_x,
               last.shift_y, last.dt, last.low_confidence ? 1 : 0);
}

// ---- compare ---------------------------------------------------------

struct CompareArgs {
  FrameInputs in;
  DetectionConfig cfg;
  std::vector<int> crop_xywh;
  bool use_left_third = false;
  std::string out_path;
  std::string surfaces_dir;
};

void run_compare(const CompareArgs& a) {
  std::vector<ImageF> frames;
  std::vector<double> ts;
  a.in.load(frames, ts);

  SnrSeries series = snr_series(frames, ts, a.cfg);
  std::string tag;
  std::optional<Rect> region = region_from_flags(a.crop_xywh, a.use_left_third, frames[0], tag);
  if (region) {
    SnrSeries extra = snr_series(frames, ts, a.cfg, region, tag);
    series.insert(series.end(), extra.begin(), extra.end());
  }

  if (a.out_path.empty() || a.out_path == "-") {
    write_series_csv(std::cout, series);
  } else {
    std::ofstream f = open_out_file(a.out_path);
    write_series_csv(f, series);
  }

  if (!a.surfaces_dir.empty()) {
    fs::create_directories(a.surfaces_dir);
    for (std::size_t k = 1; k < frames.size(); ++k)
      for (Method m : {Method::orientation, Method::phase, Method::focused_orientation,
                       Method::focused_phase}) {
        MatchingSurface s = compute_surface(m, frames[0], frames[k], a.cfg.focus);
        char name[128];
        std::snprintf(name, sizeof name, "surface_%03zu_%s", k, method_name(m));
        save_normalized_pgm((fs::path(a.surfaces_dir) / (std::string(name) + ".pgm")).string(),
                            s.surface);
        save_csv_grid((fs::path(a.surfaces_dir) / (std::string(name) + ".csv")).string(),
                      s.surface);
      }
  }
}

// ---- segment ---------------------------------------------------------

struct SegmentArgs {
  FrameInputs in;
  DetectionConfig cfg;
  SegmentParams params;
  std::string out_dir;
  std::string truth_mask;
  bool force = false;
  bool keep_wrap_band = false;
};

void run_segment(const SegmentArgs& a) {
  std::vector<ImageF> frames;
  std::vector<double> ts;
  a.in.load(frames, ts);
  if (frames.size() != 2) throw invalid_input("segment wants exactly two frames");
  double dt = ts[1] - ts[0];

  DetectionVerdict v = detect(frames[0], frames[1], dt, a.cfg);
  std::fprintf(stderr,
               "verdict: present=%d method=%s snr=%.3f shift=(%d,%d) dt=%g low_confidence=%d\n",
               v.present ? 1 : 0, method_name(v.best_method), v.best_snr, v.shift_x, v.shift_y,
               v.dt, v.low_confidence ? 1 : 0);
  if (!v.present && !a.force)
    throw io_error("no ship detected in this pair; rerun with --force to segment anyway");

  SegmentParams params = a.params;
  params.exclude_wrap_band = !a.keep_wrap_band;
  SegmentationResult seg = segment_pair(frames[0], frames[1], v.shift_x, v.shift_y, params);

  fs::create_directories(a.out_dir);
  save_normalized_pgm((fs::path(a.out_dir) / "map.pgm").string(), seg.map);
  save_csv_grid((fs::path(a.out_dir) / "map.csv").string(), seg.map);
  save_mask((fs::path(a.out_dir) / "mask.png").string(), seg.mask);
  save_mask((fs::path(a.out_dir) / "mask_raw.png").string(), seg.raw_mask);

  ImageF map01(seg.map.width, seg.map.height);
  for (std::size_t i = 0; i < map01.pixels(); ++i) map01.data[i] = 0.5 * (seg.map.data[i] + 1.0);
  ImageF maskf(seg.mask.width, seg.mask.height);
  for (std::size_t i = 0; i < maskf.pixels(); ++i) maskf.data[i] = seg.mask.data[i];
  ImageF strip = panel_strip({&frames[0], &map01, &maskf});
  save_image((fs::path(a.out_dir) / "composite.png").string(), strip, 8);

  std::printf("mask area: %zu px (%.2f%% of frame)\n", mask_area(seg.mask),
              100.0 * mask_area(seg.mask) / static_cast<double>(seg.mask.pixels()));
  if (!a.truth_mask.empty()) {
    ImageF t = load_image(a.truth_mask);
    require_same_size(t, seg.mask);
    BinaryMask truth(t.width, t.height);
    for (std::size_t i = 0; i < t.pixels(); ++i) truth.data[i] = t.data[i] > 0.5 ? 1 : 0;
    std::printf("iou: %.4f\n", mask_iou(seg.mask, truth));
  }
  std::printf("outputs in %s: map.pgm map.csv mask.png mask_raw.png composite.png\n",
              a.out_dir.c_str());
}

// ---- estimate --------------------------------------------------------

struct EstimateArgs {
  FrameInputs in;
  DetectionConfig cfg;
  std::vector<int> crop_xywh;
  bool use_left_third = false;
  double margin = 1.4;
  std::string out_path;
};

void run_estimate(const EstimateArgs& a) {
  std::vector<ImageF> frames;
  std::vector<double> ts;
  a.in.load(frames, ts);

  std::string tag = "full";
  std::optional<Rect> region = region_from_flags(a.crop_xywh, a.use_left_third, frames[0], tag);
  std::size_t pixels = region ? static_cast<std::size_t>(region->width) * region->height
                              : frames[0].pixels();

  SnrSeries series = snr_series(frames, ts, a.cfg, region, tag);
  if (!a.out_path.empty()) {
    std::ofstream f = open_out_file(a.out_path);
    write_series_csv(f, series);
  }
  ThresholdEstimate est = estimate_thresholds(series, pixels, a.margin);
  std::printf("region=%s pixels=%zu noise_bound=%.4f\n", tag.c_str(), pixels, est.noise_bound);
  std::printf("t_sea=%.17g\nsnr_sea=%.17g\n", est.t_sea, est.snr_sea);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Focused correlation: detect and segment a ship against a moving sea"};
  app.require_subcommand(1);

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene directory");
  synth->add_option("--out", sy.out_dir, "output directory")->required();
  synth->add_option("--width", sy.spec.width);
  synth->add_option("--height", sy.spec.height);
  synth->add_option("--seed", sy.spec.seed);
  synth->add_option("--frames", sy.frames, "number of frames");
  synth->add_option("--fps", sy.spec.fps)->check(CLI::PositiveNumber);
  synth->add_option("--sea-corr", sy.spec.sea_corr_length, "sea texture correlation length, px");
  synth->add_option("--sea-memory", sy.spec.sea_memory, "per-frame sea retention in [0,1]");
  synth->add_option("--sea-noise", sy.spec.sea_noise, "fine per-frame pattern amplitude");
  synth->add_flag("--no-boat", sy.no_boat, "sea only");
  synth->add_option("--boat-seed", sy.spec.boat.texture_seed);
  synth->add_option("--half-length", sy.spec.boat.half_length);
  synth->add_option("--half-width", sy.spec.boat.half_width);
  synth->add_option("--boat-contrast", sy.spec.boat.contrast);
  synth->add_option("--boat-corr", sy.spec.boat.texture_corr);
  synth->add_option("--rock-amplitude", sy.rock_amplitude, "rocking amplitude, radians");
  synth->add_option("--rock-period", sy.rock_period, "rocking period, seconds");
  synth->add_option("--shift-x", sy.shift_x, "boat drift, px from first to last frame");
  synth->add_option("--shift-y", sy.shift_y);
  synth->add_flag("--final-distortion", sy.final_distortion,
                  "apply a fixed shear/scale to the last pose");
  synth->callback([&] { run_synth(sy); });

  FrameInputs din;
  DetectionConfig dcfg;
  std::string dout;
  CLI::App* det = app.add_subcommand("detect", "decide ship presence for an image sequence");
  din.add_flags(det, 2);
  add_detect_flags(det, dcfg);
  det->add_option("--out", dout, "verdict CSV path ('-' = stdout)");
  det->callback([&] { run_detect(din, dcfg, dout); });

  CompareArgs co;
  CLI::App* cmp = app.add_subcommand("compare", "SNR of all four matching methods per pair");
  co.in.add_flags(cmp, 2);
  add_detect_flags(cmp, co.cfg);
  cmp->add_option("--crop", co.crop_xywh, "also report a crop region: x,y,w,h")->delimiter(',');
  cmp->add_flag("--left-third", co.use_left_third, "also report the left third of the frame");
  cmp->add_option("--out", co.out_path, "series CSV path ('-' = stdout)");
  cmp->add_option("--export-surfaces", co.surfaces_dir,
                  "write matching surfaces (PGM + CSV) to this directory");
  cmp->callback([&] { run_compare(co); });

  SegmentArgs se;
  CLI::App* seg = app.add_subcommand("segment", "segment the ship in a frame pair");
  se.in.add_flags(seg, 2);
  add_detect_flags(seg, se.cfg);
  seg->add_option("--out", se.out_dir, "output directory")->required();
  seg->add_option("--cos-threshold", se.params.cos_threshold, "matchability threshold in (-1,1)");
  seg->add_option("--smooth-radius", se.params.smooth_radius, "box smoothing radius; 0 disables");
  seg->add_option("--closing-radius", se.params.closing_radius, "closing radius; 0 disables");
  seg->add_option("--min-area", se.params.min_area_fraction,
                  "drop components smaller than this fraction of the frame");
  seg->add_flag("--keep-wrap-band", se.keep_wrap_band, "keep the circular-shift wrap band");
  seg->add_flag("--force", se.force, "segment even when detection says absent");
  seg->add_option("--truth", se.truth_mask, "ground-truth mask image; prints IoU");
  seg->callback([&] { run_segment(se); });

  EstimateArgs es;
  CLI::App* est = app.add_subcommand("estimate", "calibrate t_sea/snr_sea from boatless frames");
  es.in.add_flags(est, 2);
  add_detect_flags(est, es.cfg);
  est->add_option("--crop", es.crop_xywh, "restrict to a crop region: x,y,w,h")->delimiter(',');
  est->add_flag("--left-third", es.use_left_third, "restrict to the left third of the frame");
  est->add_option("--margin", es.margin, "stabilization cutoff = margin * noise bound");
  est->add_option("--out", es.out_path, "also write the SNR series CSV here");
  est->callback([&] { run_estimate(es); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const invalid_input& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
