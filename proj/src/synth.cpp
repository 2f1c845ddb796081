#include "gyrodeblur/synth.hpp"

#include <algorithm>
#include <cmath>

#include "gyrodeblur/error.hpp"
#include "gyrodeblur/rng.hpp"
#include "line_kernel.hpp"

namespace gyrodeblur {

namespace {

// Stream ids under a sample seed.
constexpr std::uint64_t kNoiseStream = 2;

void check_shape(const ImageBuf& img, const BlurField& field) {
  if (img.width != field.width || img.height != field.height) {
    throw Error(ErrorCode::DimensionMismatch, "image is " + std::to_string(img.width) + "x" +
                                                  std::to_string(img.height) + ", field is " +
                                                  std::to_string(field.width) + "x" + std::to_string(field.height));
  }
}

}  // namespace

void GenParams::validate() const {
  if (!(t_e > 0.0)) throw Error(ErrorCode::InvalidParameter, "exposure time must be > 0");
  if (!(t_r_min >= 0.0) || !(t_r_max >= t_r_min)) throw Error(ErrorCode::InvalidParameter, "readout range invalid");
  if (!(omega_multiplier >= 0.0)) throw Error(ErrorCode::InvalidParameter, "omega multiplier must be >= 0");
  if (!(max_blur_px > 0.0)) throw Error(ErrorCode::InvalidParameter, "max blur must be > 0");
  if (add_noise && !(noise_db > 0.0)) throw Error(ErrorCode::InvalidParameter, "noise level must be > 0 dB");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidStep, "integration step must be > 0");
}

ImageBuf apply_blur_field(const ImageBuf& sharp, const BlurField& field) {
  check_shape(sharp, field);
  ImageBuf out(sharp.width, sharp.height, sharp.channels);
  std::vector<double> in_plane(sharp.plane_size()), out_plane(sharp.plane_size());
  for (int c = 0; c < sharp.channels; ++c) {
    std::copy(sharp.plane(c).begin(), sharp.plane(c).end(), in_plane.begin());
    detail::forward_plane(in_plane, out_plane, field);
    std::transform(out_plane.begin(), out_plane.end(), out.plane(c).begin(),
                   [](double d) { return static_cast<float>(d); });
  }
  return out;
}

ImageBuf add_gaussian_noise(const ImageBuf& img, double level_db, std::uint64_t seed, NoiseReference reference) {
  if (!(level_db > 0.0)) throw Error(ErrorCode::InvalidParameter, "noise level must be > 0 dB");
  double sigma = 0.0;
  if (reference == NoiseReference::Psnr) {
    sigma = std::pow(10.0, -level_db / 20.0);
  } else {
    double power = 0.0;
    for (float f : img.data) power += double(f) * f;
    power /= std::max<std::size_t>(1, img.data.size());
    sigma = std::sqrt(power / std::pow(10.0, level_db / 10.0));
  }
  Rng rng(seed);
  ImageBuf out = img;
  for (float& f : out.data) {
    const double noisy = f + sigma * rng.normal();
    f = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
  }
  return out;
}

Perturbation apply_perturbation(const GyroTrack& track, const FrameMeta& meta, double t_d, double k, ScaleMode mode) {
  Perturbation p{meta, track.scaled(mode == ScaleMode::OnePlusK ? 1.0 + k : k), t_d, k};
  p.meta.t_f += t_d;
  return p;
}

Perturbation perturb_track(const GyroTrack& track, const FrameMeta& meta, const PerturbParams& params) {
  if (!(params.sigma_delay >= 0.0) || !(params.sigma_scale >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "perturbation sigmas must be >= 0");
  }
  Rng rng(params.seed);
  const double t_d = params.sigma_delay * rng.normal();
  const double k = params.sigma_scale * rng.normal();
  return apply_perturbation(track, meta, t_d, k, params.scale_mode);
}

DatasetSample generate_sample(const ImageBuf& sharp, const GyroTrack& track, const Intrinsics& k,
                              const GenParams& gp, const PerturbParams& pp) {
  gp.validate();
  if (track.size() < 2) throw Error(ErrorCode::TrackTooShort, "track needs at least 2 samples");
  const double start = track.start_time();
  const double end = track.end_time();
  const double margin = 6.0 * pp.sigma_delay;

  Rng rng(gp.seed);
  const double t_r = gp.t_r_max > gp.t_r_min ? rng.uniform(gp.t_r_min, gp.t_r_max) : gp.t_r_min;

  FrameMeta meta;
  meta.t_e = gp.t_e;
  meta.t_r = t_r;
  meta.rows = sharp.height;
  meta.cols = sharp.width;
  // Latest exposure start that keeps every row inside the track.
  const double last_start = end - t_r - gp.t_e;
  if (gp.fixed_t_f) {
    meta.t_f = *gp.fixed_t_f;
    if (meta.t_f < start || meta.t_f > last_start) {
      throw Error(ErrorCode::TrackTooShort, "exposure window does not fit inside the gyro track");
    }
  } else {
    if (end - start < gp.t_r_max + gp.t_e + 2.0 * margin) {
      throw Error(ErrorCode::TrackTooShort, "gyro track shorter than readout + exposure");
    }
    meta.t_f = rng.uniform(start + margin, last_start - margin);
  }

  // Exact field; rates are rescaled until the largest blur honours the cap.
  // The target sits a hair under the cap so the f32 copy on disk stays below it too.
  const double target = gp.max_blur_px * (1.0 - 1e-6);
  double multiplier = gp.omega_multiplier;
  BlurField exact = compute_blur_field(track.scaled(multiplier), meta, k, gp.step);
  for (int attempt = 0; attempt < 50; ++attempt) {
    const double peak = exact.max_magnitude();
    if (peak <= target) break;
    multiplier *= target / peak * (1.0 - 1e-9);
    exact = compute_blur_field(track.scaled(multiplier), meta, k, gp.step);
  }
  if (exact.max_magnitude() > target) {
    throw Error(ErrorCode::InvalidParameter, "could not bring blur below the cap");
  }
  const GyroTrack effective = track.scaled(multiplier);

  DatasetSample sample;
  sample.sharp = sharp;
  sample.blurred = apply_blur_field(sharp, exact);
  if (gp.add_noise) {
    sample.blurred = add_gaussian_noise(sample.blurred, gp.noise_db, derive_seed(gp.seed, kNoiseStream),
                                        gp.noise_reference);
  }

  Perturbation noisy = perturb_track(effective, meta, pp);
  const double shifted = std::clamp(noisy.meta.t_f, start, last_start);
  if (shifted != noisy.meta.t_f) {
    noisy.meta.t_f = shifted;
    noisy.t_d = shifted - meta.t_f;
  }
  sample.noisy_field = compute_blur_field(noisy.track, noisy.meta, k, gp.step);
  sample.exact_field = std::move(exact);

  sample.record.seed = gp.seed;
  sample.record.t_f = meta.t_f;
  sample.record.t_e = meta.t_e;
  sample.record.t_r = meta.t_r;
  sample.record.omega_multiplier_effective = multiplier;
  sample.record.k = noisy.k;
  sample.record.t_d = noisy.t_d;
  return sample;
}

Intrinsics default_intrinsics(int width, int height) {
  Intrinsics k;
  k.fx = k.fy = static_cast<double>(std::max(width, height));
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  return k;
}

}  // namespace gyrodeblur
