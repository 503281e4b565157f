#include "signcurator/video/frames.hpp"

#include "signcurator/common/hash.hpp"
#include "signcurator/common/subprocess.hpp"
#include "signcurator/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <system_error>

namespace signcurator::video {

FramePlan plan_frame_samples(double duration_s, double rate_hz,
                             int max_frames) {
  if (!(duration_s > 0.0)) {
    throw MediaError("media duration must be positive, got " +
                     std::to_string(duration_s));
  }
  if (!(rate_hz > 0.0)) {
    throw ConfigError("sampling rate_hz must be positive");
  }
  if (max_frames < 1) {
    throw ConfigError("sampling max_frames must be at least 1");
  }
  FramePlan plan;
  plan.source_duration_s = duration_s;
  const double wanted = std::ceil(duration_s * rate_hz);
  const int n = static_cast<int>(
      std::min<double>(wanted, static_cast<double>(max_frames)));
  plan.timestamps_s.reserve(static_cast<std::size_t>(n));
  if (wanted <= static_cast<double>(max_frames)) {
    for (int k = 0; k < n; ++k) {
      double t = (k + 0.5) / rate_hz;
      if (t >= duration_s) {
        // Midpoint of the partial trailing segment [k/rate, duration).
        t = (k / rate_hz + duration_s) / 2.0;
      }
      plan.timestamps_s.push_back(t);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      plan.timestamps_s.push_back((k + 0.5) * duration_s /
                                  static_cast<double>(max_frames));
    }
  }
  return plan;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out += "'";
  return out;
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& replacement) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

std::string timestamps_csv(const std::vector<double>& timestamps) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.3f", timestamps[i]);
    if (i != 0) {
      out += ',';
    }
    out += buf;
  }
  return out;
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MediaError("cannot open decoded frame: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    char tmpl[] = "/tmp/signcurator_frames_XXXXXX";
    if (mkdtemp(tmpl) == nullptr) {
      throw IoError("cannot create frame output directory");
    }
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace

FrameSequence decode_frames(const std::string& decoder_command,
                            const std::string& media_path,
                            const FramePlan& plan) {
  if (plan.timestamps_s.empty()) {
    throw MediaError("frame plan has no timestamps");
  }
  std::string digest;
  try {
    digest = sha256_file_hex(media_path);
  } catch (const IoError& e) {
    throw MediaError(std::string("cannot read media: ") + e.what());
  }
  TempDir outdir;
  std::string command = decoder_command;
  command = replace_all(command, "{input}", shell_quote(media_path));
  command =
      replace_all(command, "{timestamps_csv}", timestamps_csv(plan.timestamps_s));
  command = replace_all(command, "{outdir}", shell_quote(outdir.path.string()));
  const CommandResult result = run_shell_command(command);
  if (result.exit_code != 0) {
    throw MediaError("decoder exited with status " +
                         std::to_string(result.exit_code) + " for " +
                         media_path,
                     result.stderr_text);
  }
  FrameSequence seq;
  seq.plan = plan;
  seq.media_digest = digest;
  for (std::size_t i = 1; i <= plan.timestamps_s.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu", i);
    std::filesystem::path frame_path;
    for (const auto& entry : std::filesystem::directory_iterator(outdir.path)) {
      if (entry.path().stem() == name || entry.path().filename() == name) {
        frame_path = entry.path();
        break;
      }
    }
    if (frame_path.empty()) {
      throw MediaError("decoder produced no file for frame " +
                           std::string(name) + " (expected " +
                           std::to_string(plan.timestamps_s.size()) +
                           " frames)",
                       result.stderr_text);
    }
    const auto bytes = read_binary(frame_path);
    seq.frames.push_back(normalize_frame(
        parse_pnm(std::span<const std::uint8_t>(bytes.data(), bytes.size()))));
  }
  return seq;
}

}  // namespace signcurator::video
