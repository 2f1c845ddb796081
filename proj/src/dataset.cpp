#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "gyrodeblur/blf.hpp"
#include "gyrodeblur/error.hpp"
#include "gyrodeblur/file_io.hpp"
#include "gyrodeblur/rng.hpp"
#include "gyrodeblur/synth.hpp"

namespace gyrodeblur {

namespace {

namespace fs = std::filesystem;

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: '" + dir.string() + "'");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == extension) out.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot list '" + dir.string() + "': " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::string numbered(const char* prefix, std::int64_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06lld.%s", prefix, static_cast<long long>(index), ext);
  return buf;
}

struct SampleFiles {
  std::string sharp, blurred, exact, noisy;
};

SampleFiles files_for(std::int64_t index) {
  return {numbered("sharp", index, "png"), numbered("blur", index, "png"), numbered("exact", index, "blf"),
          numbered("noisy", index, "blf")};
}

std::string manifest_line(const SampleRecord& r, const SampleFiles& f) {
  nlohmann::ordered_json line;
  line["index"] = r.index;
  line["sharp"] = f.sharp;
  line["blurred"] = f.blurred;
  line["exact_field"] = f.exact;
  line["noisy_field"] = f.noisy;
  line["seed"] = r.seed;
  line["t_f"] = r.t_f;
  line["t_e"] = r.t_e;
  line["t_r"] = r.t_r;
  line["omega_multiplier_effective"] = r.omega_multiplier_effective;
  line["k"] = r.k;
  line["t_d"] = r.t_d;
  return line.dump();
}

}  // namespace

std::vector<std::string> generate_dataset(const DatasetConfig& config) {
  config.gen.validate();
  std::error_code ec;
  if (!fs::is_directory(config.image_dir, ec)) {
    throw Error(ErrorCode::IoError, "image directory not found: '" + config.image_dir.string() + "'");
  }
  if (!fs::is_directory(config.imu_dir, ec)) {
    throw Error(ErrorCode::IoError, "IMU directory not found: '" + config.imu_dir.string() + "'");
  }
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + config.out_dir.string() + "': " + ec.message());

  const fs::path manifest_path = config.out_dir / "manifest.jsonl";
  if (config.count <= 0) {
    write_file(manifest_path, "");
    return {};
  }

  const auto images = list_files(config.image_dir, ".png");
  if (images.empty()) throw Error(ErrorCode::NoImagesFound, "no PNG files in '" + config.image_dir.string() + "'");
  const auto track_paths = list_files(config.imu_dir, ".csv");
  if (track_paths.empty()) throw Error(ErrorCode::NoTracksFound, "no CSV files in '" + config.imu_dir.string() + "'");
  std::vector<GyroTrack> tracks;
  tracks.reserve(track_paths.size());
  for (const auto& p : track_paths) tracks.push_back(parse_gyro_csv(read_file(p)));

  std::optional<Intrinsics> intrinsics = config.intrinsics;
  if (!intrinsics && fs::exists(config.imu_dir / "intrinsics.json")) {
    intrinsics = load_intrinsics(read_file(config.imu_dir / "intrinsics.json"));
  }

  std::vector<std::string> lines(static_cast<std::size_t>(config.count));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= config.count) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(i));
        Rng pick(seed);
        const auto& image_path = images[pick.index(images.size())];
        const GyroTrack& track = tracks[pick.index(tracks.size())];

        ImageBuf sharp = read_png(image_path, config.srgb_decode);
        const int cw = config.crop_width > 0 ? config.crop_width : sharp.width;
        const int ch = config.crop_height > 0 ? config.crop_height : sharp.height;
        if (cw > sharp.width || ch > sharp.height) {
          throw Error(ErrorCode::InvalidParameter, "crop larger than image '" + image_path.string() + "'");
        }
        if (cw != sharp.width || ch != sharp.height) {
          const int x0 = static_cast<int>(pick.index(std::uint64_t(sharp.width - cw) + 1));
          const int y0 = static_cast<int>(pick.index(std::uint64_t(sharp.height - ch) + 1));
          sharp = crop(sharp, x0, y0, cw, ch);
        }

        GenParams gp = config.gen;
        gp.seed = derive_seed(seed, 0);
        PerturbParams pp = config.perturb;
        pp.seed = derive_seed(seed, 1);
        const Intrinsics k = intrinsics ? *intrinsics : default_intrinsics(sharp.width, sharp.height);

        DatasetSample sample = generate_sample(sharp, track, k, gp, pp);
        sample.record.index = i;
        sample.record.seed = seed;

        const SampleFiles files = files_for(i);
        write_png(sample.sharp, config.out_dir / files.sharp);
        write_png(sample.blurred, config.out_dir / files.blurred);
        write_blf(sample.exact_field, config.out_dir / files.exact);
        write_blf(sample.noisy_field, config.out_dir / files.noisy);
        lines[static_cast<std::size_t>(i)] = manifest_line(sample.record, files);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::clamp(config.jobs, 1, 256);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::string manifest;
  for (const auto& line : lines) manifest += line + '\n';
  write_file(manifest_path, manifest);
  return lines;
}

}  // namespace gyrodeblur
