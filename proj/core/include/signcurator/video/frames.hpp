#pragma once

#include "signcurator/video/image.hpp"

#include <string>
#include <vector>

namespace signcurator::video {

struct SamplingConfig {
  double rate_hz = 1.0;
  int max_frames = 32;
};

// Where to sample a video, before any decoding happens.
struct FramePlan {
  std::vector<double> timestamps_s;  // strictly ascending, all in [0, duration)
  int target_width = kTargetSize;
  int target_height = kTargetSize;
  double source_duration_s = 0.0;
};

// Decoded, normalized frames ready for the gateway.
struct FrameSequence {
  std::vector<Image> frames;  // one 224x224 image per planned timestamp
  FramePlan plan;
  std::string media_digest;  // content digest of the source bytes
};

// Midpoint sampling at rate_hz, capped at max_frames. Under the cap, sample
// k at (k + 0.5)/rate_hz; the final sample is pulled back to the midpoint of
// its partial trailing segment when (k + 0.5)/rate_hz would land past the
// end. Over the cap, max_frames samples at (k + 0.5) * duration/max_frames.
// duration_s <= 0 raises MediaError; rate_hz <= 0 or max_frames < 1 raise
// ConfigError.
FramePlan plan_frame_samples(double duration_s, double rate_hz,
                             int max_frames);

// Runs the configured decoder command and reads back one frame per planned
// timestamp, normalized to 224x224. The command template must use the
// placeholders {input}, {timestamps_csv} and {outdir}; the decoder must
// write frame_%05d files (PPM/PGM), numbered from 1, into {outdir}.
// Nonzero decoder exit raises MediaError carrying the decoder's stderr.
FrameSequence decode_frames(const std::string& decoder_command,
                            const std::string& media_path,
                            const FramePlan& plan);

}  // namespace signcurator::video
