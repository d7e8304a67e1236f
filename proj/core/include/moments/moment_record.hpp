#pragma once

#include <string>

#include "moments/types.hpp"

namespace moments {

// One labeled dataset sample: a clip span in G with its EVS-extended audio
// span, transcript text, and importance label.
struct MomentRecord {
  std::string id;
  std::string game_id;
  int label = 0;  // 1 = important, 0 = non-important
  TimeSpan video_span;
  TimeSpan audio_span;
  std::string transcript_text;
  std::string video_path;
  std::string audio_path;
};

}  // namespace moments
