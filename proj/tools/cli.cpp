#include "cli.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gyrodeblur/blf.hpp"
#include "gyrodeblur/blurfield.hpp"
#include "gyrodeblur/deconv.hpp"
#include "gyrodeblur/error.hpp"
#include "gyrodeblur/file_io.hpp"
#include "gyrodeblur/imu_io.hpp"
#include "gyrodeblur/metrics.hpp"
#include "gyrodeblur/rng.hpp"
#include "gyrodeblur/synth.hpp"

namespace gyrodeblur::cli {

namespace {

using nlohmann::ordered_json;

// Flags shared by `synth` and `gen-dataset`.
struct GenFlags {
  double t_e = 0.030;
  double t_r_min = 0.0;
  double t_r_max = 0.030;
  double omega_multiplier = 2.0;
  double max_blur = 100.0;
  bool add_noise = false;
  double noise_db = 30.0;
  std::string noise_ref = "psnr";
  double sigma_delay = 1e-5;
  double sigma_scale = 0.2;
  std::string scale_mode = "one_plus_k";
  double step = 1e-4;

  void attach(CLI::App* app) {
    app->add_option("--exposure", t_e, "Exposure time t_e [s]")->capture_default_str();
    app->add_option("--readout-min", t_r_min, "Lower bound of the random readout time t_r [s]")->capture_default_str();
    app->add_option("--readout-max", t_r_max, "Upper bound of the random readout time t_r [s]")->capture_default_str();
    app->add_option("--omega-multiplier", omega_multiplier, "Gyro rate multiplier [-]")->capture_default_str();
    app->add_option("--max-blur", max_blur, "Largest allowed blur vector length [px]")->capture_default_str();
    app->add_flag("--add-noise", add_noise, "Add Gaussian noise to the blurred image");
    app->add_option("--noise-db", noise_db, "Noise level when --add-noise is set [dB]")->capture_default_str();
    app->add_option("--noise-ref", noise_ref, "Noise level reference: psnr (full scale) or snr (signal power)")
        ->check(CLI::IsMember({"psnr", "snr"}))
        ->capture_default_str();
    app->add_option("--sigma-delay", sigma_delay, "Std-dev of the noisy-field exposure delay t_d [s]")
        ->capture_default_str();
    app->add_option("--sigma-scale", sigma_scale, "Std-dev of the noisy-field gyro scale k [-]")->capture_default_str();
    app->add_option("--scale-mode", scale_mode, "Gyro scaling for the noisy field: one_plus_k or literal_k")
        ->check(CLI::IsMember({"one_plus_k", "literal_k"}))
        ->capture_default_str();
    app->add_option("--step", step, "RK4 integration step [s]")->capture_default_str();
  }

  GenParams gen() const {
    GenParams gp;
    gp.t_e = t_e;
    gp.t_r_min = t_r_min;
    gp.t_r_max = t_r_max;
    gp.omega_multiplier = omega_multiplier;
    gp.max_blur_px = max_blur;
    gp.add_noise = add_noise;
    gp.noise_db = noise_db;
    gp.noise_reference = noise_ref == "snr" ? NoiseReference::Snr : NoiseReference::Psnr;
    gp.step = step;
    return gp;
  }

  PerturbParams perturb() const {
    PerturbParams pp;
    pp.sigma_delay = sigma_delay;
    pp.sigma_scale = sigma_scale;
    pp.scale_mode = scale_mode == "literal_k" ? ScaleMode::LiteralK : ScaleMode::OnePlusK;
    return pp;
  }
};

int exit_code_for(ErrorCode code) {
  switch (error_class(code)) {
    case ErrorClass::Io: return kExitIo;
    case ErrorClass::Format: return kExitFormat;
    case ErrorClass::Domain: return kExitDomain;
  }
  return kExitDomain;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gyro-driven blur fields, synthetic blur data and non-blind deblurring", "gyrodeblur"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 2 usage, 3 io, 4 format, 5 numeric/domain");

  // field
  struct {
    std::string imu, meta, intrinsics, out, viz;
    double step = 1e-4;
  } field_opts;
  auto* field_cmd = app.add_subcommand("field", "Compute the blur field of one frame and write it as BLF");
  field_cmd->add_option("--imu", field_opts.imu, "Gyro CSV (timestamp_ns, gx, gy, gz in rad/s)")->required();
  field_cmd->add_option("--meta", field_opts.meta, "Frame metadata JSON (t_f, t_e, t_r in s; rows, cols)")->required();
  field_cmd->add_option("--intrinsics", field_opts.intrinsics, "Intrinsics JSON (fx, fy, cx, cy in px)")->required();
  field_cmd->add_option("--out", field_opts.out, "Output BLF path")->required();
  field_cmd->add_option("--viz", field_opts.viz, "Optional colour-wheel PNG of the field");
  field_cmd->add_option("--step", field_opts.step, "RK4 integration step [s]")->capture_default_str();

  // field-viz
  struct {
    std::string field, out;
  } viz_opts;
  auto* viz_cmd = app.add_subcommand("field-viz", "Render a BLF field as a colour-wheel PNG");
  viz_cmd->add_option("--field", viz_opts.field, "Input BLF")->required();
  viz_cmd->add_option("--out", viz_opts.out, "Output PNG (8-bit RGB)")->required();

  // synth
  struct {
    std::string sharp, imu, meta, intrinsics, out_blur, out_exact, out_noisy;
    std::uint64_t seed = 0;
    bool srgb = false;
    GenFlags gen;
  } synth_opts;
  auto* synth_cmd = app.add_subcommand("synth", "Blur one sharp image with gyro motion; write exact and noisy fields");
  synth_cmd->add_option("--sharp", synth_opts.sharp, "Sharp input PNG")->required();
  synth_cmd->add_option("--imu", synth_opts.imu, "Gyro CSV")->required();
  synth_cmd->add_option("--meta", synth_opts.meta,
                        "Optional frame metadata JSON; fixes t_f, t_e and t_r instead of drawing them");
  synth_cmd->add_option("--intrinsics", synth_opts.intrinsics, "Intrinsics JSON (default: f = max(w, h), centred)");
  synth_cmd->add_option("--out-blur", synth_opts.out_blur, "Blurred output PNG (16-bit)")->required();
  synth_cmd->add_option("--out-exact", synth_opts.out_exact, "Exact field BLF")->required();
  synth_cmd->add_option("--out-noisy", synth_opts.out_noisy, "Noisy field BLF")->required();
  synth_cmd->add_option("--seed", synth_opts.seed, "Random seed")->capture_default_str();
  synth_cmd->add_flag("--srgb", synth_opts.srgb, "Decode/encode PNG values as sRGB instead of linear");
  synth_opts.gen.attach(synth_cmd);

  // gen-dataset
  struct {
    std::string images, imu, out, intrinsics;
    std::int64_t count = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    int crop_width = 0, crop_height = 0;
    bool srgb = false;
    GenFlags gen;
  } ds_opts;
  auto* ds_cmd = app.add_subcommand("gen-dataset", "Generate a training set with a JSON-lines manifest");
  ds_cmd->add_option("--images", ds_opts.images, "Directory of sharp PNG images")->required();
  ds_cmd->add_option("--imu", ds_opts.imu, "Directory of gyro CSV logs (optional intrinsics.json)")->required();
  ds_cmd->add_option("--count", ds_opts.count, "Number of samples")->required()->check(CLI::NonNegativeNumber);
  ds_cmd->add_option("--out", ds_opts.out, "Output directory")->required();
  ds_cmd->add_option("--seed", ds_opts.seed, "Master seed")->capture_default_str();
  ds_cmd->add_option("--jobs", ds_opts.jobs, "Parallel workers")->capture_default_str()->check(CLI::PositiveNumber);
  ds_cmd->add_option("--intrinsics", ds_opts.intrinsics, "Intrinsics JSON for every sample");
  ds_cmd->add_option("--crop-width", ds_opts.crop_width, "Random crop width [px], 0 = full image")->capture_default_str();
  ds_cmd->add_option("--crop-height", ds_opts.crop_height, "Random crop height [px], 0 = full image")
      ->capture_default_str();
  ds_cmd->add_flag("--srgb", ds_opts.srgb, "Decode input PNG values as sRGB");
  ds_opts.gen.attach(ds_cmd);

  // deblur
  struct {
    std::string image, field, out;
    int iters = 50;
    bool srgb = false;
  } deblur_opts;
  auto* deblur_cmd = app.add_subcommand("deblur", "Richardson-Lucy deblurring with a known blur field");
  deblur_cmd->add_option("--image", deblur_opts.image, "Blurred PNG")->required();
  deblur_cmd->add_option("--field", deblur_opts.field, "Blur field BLF")->required();
  deblur_cmd->add_option("--iters", deblur_opts.iters, "Iterations")->capture_default_str();
  deblur_cmd->add_option("--out", deblur_opts.out, "Output PNG (16-bit)")->required();
  deblur_cmd->add_flag("--srgb", deblur_opts.srgb, "Decode/encode PNG values as sRGB");

  // eval
  struct {
    std::string ref, test;
  } eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR [dB] and SSIM of a test image against a reference");
  eval_cmd->add_option("--ref", eval_opts.ref, "Reference PNG")->required();
  eval_cmd->add_option("--test", eval_opts.test, "Test PNG")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*field_cmd) {
      const GyroTrack track = parse_gyro_csv(read_file(field_opts.imu));
      const FrameMeta meta = load_frame_meta(read_file(field_opts.meta));
      const Intrinsics k = load_intrinsics(read_file(field_opts.intrinsics));
      const BlurField field = compute_blur_field(track, meta, k, field_opts.step);
      write_blf(field, field_opts.out);
      if (!field_opts.viz.empty()) write_png(render_field(field), field_opts.viz, 8);
      ordered_json summary{{"width", field.width}, {"height", field.height}, {"max_blur_px", field.max_magnitude()}};
      out << summary.dump() << "\n";
    } else if (*viz_cmd) {
      write_png(render_field(read_blf(viz_opts.field)), viz_opts.out, 8);
    } else if (*synth_cmd) {
      const ImageBuf sharp = read_png(synth_opts.sharp, synth_opts.srgb);
      const GyroTrack track = parse_gyro_csv(read_file(synth_opts.imu));
      const Intrinsics k = synth_opts.intrinsics.empty() ? default_intrinsics(sharp.width, sharp.height)
                                                         : load_intrinsics(read_file(synth_opts.intrinsics));
      GenParams gp = synth_opts.gen.gen();
      gp.seed = derive_seed(synth_opts.seed, 0);
      PerturbParams pp = synth_opts.gen.perturb();
      pp.seed = derive_seed(synth_opts.seed, 1);
      if (!synth_opts.meta.empty()) {
        const FrameMeta meta = load_frame_meta(read_file(synth_opts.meta));
        if (meta.rows != sharp.height || meta.cols != sharp.width) {
          throw Error(ErrorCode::DimensionMismatch, "frame metadata size differs from the sharp image");
        }
        gp.t_e = meta.t_e;
        gp.t_r_min = gp.t_r_max = meta.t_r;
        gp.fixed_t_f = meta.t_f;
      }
      const DatasetSample sample = generate_sample(sharp, track, k, gp, pp);
      write_png(sample.blurred, synth_opts.out_blur, 16, synth_opts.srgb);
      write_blf(sample.exact_field, synth_opts.out_exact);
      write_blf(sample.noisy_field, synth_opts.out_noisy);
      const SampleRecord& r = sample.record;
      ordered_json summary{{"seed", synth_opts.seed},
                           {"t_f", r.t_f},
                           {"t_e", r.t_e},
                           {"t_r", r.t_r},
                           {"omega_multiplier_effective", r.omega_multiplier_effective},
                           {"k", r.k},
                           {"t_d", r.t_d},
                           {"max_blur_px", sample.exact_field.max_magnitude()}};
      out << summary.dump() << "\n";
    } else if (*ds_cmd) {
      DatasetConfig config;
      config.image_dir = ds_opts.images;
      config.imu_dir = ds_opts.imu;
      config.out_dir = ds_opts.out;
      config.count = ds_opts.count;
      config.master_seed = ds_opts.seed;
      config.gen = ds_opts.gen.gen();
      config.perturb = ds_opts.gen.perturb();
      config.jobs = ds_opts.jobs;
      config.crop_width = ds_opts.crop_width;
      config.crop_height = ds_opts.crop_height;
      config.srgb_decode = ds_opts.srgb;
      if (!ds_opts.intrinsics.empty()) config.intrinsics = load_intrinsics(read_file(ds_opts.intrinsics));
      const auto lines = generate_dataset(config);
      err << "wrote " << lines.size() << " samples to " << ds_opts.out << "\n";
      ordered_json summary{{"count", lines.size()},
                           {"manifest", (std::filesystem::path(ds_opts.out) / "manifest.jsonl").string()}};
      out << summary.dump() << "\n";
    } else if (*deblur_cmd) {
      const ImageBuf blurred = read_png(deblur_opts.image, deblur_opts.srgb);
      const BlurField field = read_blf(deblur_opts.field);
      const ImageBuf restored = richardson_lucy_sv(blurred, field, deblur_opts.iters);
      write_png(restored, deblur_opts.out, 16, deblur_opts.srgb);
    } else if (*eval_cmd) {
      const ImageBuf ref = read_png(eval_opts.ref);
      const ImageBuf test = read_png(eval_opts.test);
      const double p = psnr(ref, test);
      const double s = ssim(ref, test);
      ordered_json result;
      if (std::isinf(p)) {
        result["psnr"] = "inf";
      } else {
        result["psnr"] = p;
      }
      result["ssim"] = s;
      out << result.dump() << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace gyrodeblur::cli
