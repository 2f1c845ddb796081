#pragma once

// Synthetic blurred/sharp pairs driven by recorded gyro motion.
//
// An "exact" field blurs the sharp image; a "noisy" field, computed from a
// delayed exposure start and rescaled gyro rates, stands in for the imperfect
// gyro-derived estimate a deblurring method would receive.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gyrodeblur/blurfield.hpp"
#include "gyrodeblur/image.hpp"
#include "gyrodeblur/imu_io.hpp"

namespace gyrodeblur {

enum class NoiseReference {
  Psnr,  // sigma = 10^(-dB/20) of full scale
  Snr,   // sigma^2 = mean(x^2) / 10^(dB/10)
};

enum class ScaleMode {
  OnePlusK,  // omega * (1 + k)
  LiteralK,  // omega * k
};

struct PerturbParams {
  double sigma_delay = 1e-5;  // s
  double sigma_scale = 0.2;
  ScaleMode scale_mode = ScaleMode::OnePlusK;
  std::uint64_t seed = 0;
};

struct GenParams {
  double t_e = 0.030;       // s
  double t_r_min = 0.0;     // s
  double t_r_max = 0.030;   // s
  double omega_multiplier = 2.0;
  double max_blur_px = 100.0;
  bool add_noise = false;
  double noise_db = 30.0;
  NoiseReference noise_reference = NoiseReference::Psnr;
  std::optional<double> fixed_t_f;  // exposure start; drawn uniformly when unset
  double step = 1e-4;       // integration step, s
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mean of bilinear samples along each pixel's blur segment, clamp-to-edge.
/// Throws DimensionMismatch.
ImageBuf apply_blur_field(const ImageBuf& sharp, const BlurField& field);

/// Adds i.i.d. zero-mean Gaussian noise and clamps to [0, 1].
ImageBuf add_gaussian_noise(const ImageBuf& img, double level_db, std::uint64_t seed,
                            NoiseReference reference = NoiseReference::Psnr);

struct Perturbation {
  FrameMeta meta;    // t_f shifted by t_d
  GyroTrack track;   // rates scaled
  double t_d = 0.0;  // s
  double k = 0.0;
};

/// Deterministic part of the perturbation: shift t_f by t_d, scale rates by
/// (1 + k) or k depending on the mode.
Perturbation apply_perturbation(const GyroTrack& track, const FrameMeta& meta, double t_d, double k, ScaleMode mode);
/// Draws t_d ~ N(0, sigma_delay) then k ~ N(0, sigma_scale) from params.seed.
Perturbation perturb_track(const GyroTrack& track, const FrameMeta& meta, const PerturbParams& params);

struct SampleRecord {
  std::int64_t index = 0;
  std::uint64_t seed = 0;
  double t_f = 0.0;
  double t_e = 0.0;
  double t_r = 0.0;
  double omega_multiplier_effective = 0.0;
  double k = 0.0;
  double t_d = 0.0;
};

struct DatasetSample {
  ImageBuf sharp;
  ImageBuf blurred;
  BlurField exact_field;
  BlurField noisy_field;
  SampleRecord record;
};

/// One training pair. Throws TrackTooShort when no exposure window fits.
DatasetSample generate_sample(const ImageBuf& sharp, const GyroTrack& track, const Intrinsics& k,
                              const GenParams& gp, const PerturbParams& pp);

struct DatasetConfig {
  std::filesystem::path image_dir;
  std::filesystem::path imu_dir;
  std::filesystem::path out_dir;
  std::int64_t count = 0;
  std::uint64_t master_seed = 0;
  GenParams gen;
  PerturbParams perturb;
  std::optional<Intrinsics> intrinsics;  // else imu_dir/intrinsics.json, else a default from image size
  int crop_width = 0;   // 0 keeps full image width
  int crop_height = 0;
  int jobs = 1;
  bool srgb_decode = false;
};

/// Writes sharp_%06d.png, blur_%06d.png, exact_%06d.blf, noisy_%06d.blf and
/// manifest.jsonl under out_dir. Returns the manifest lines.
std::vector<std::string> generate_dataset(const DatasetConfig& config);

/// Intrinsics used when a dataset provides none: f = max(w, h), centred.
Intrinsics default_intrinsics(int width, int height);

}  // namespace gyrodeblur
