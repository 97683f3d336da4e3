#pragma once

// Deterministic synthetic content: the bundled evaluation clip (a static,
// smoothly textured scene with one moving object) and smooth random
// textures for motion tests.

#include <cstdint>
#include <string>
#include <vector>

#include "ssvc/frame.hpp"
#include "ssvc/objects.hpp"
#include "ssvc/semantics.hpp"

namespace ssvc::synthetic {

struct Clip {
  std::vector<Frame> frames;
  std::vector<PixelBox> track;  // object box per frame
  std::uint16_t class_id = 0;   // "person"

  // One annotation per frame, in the sidecar text format.
  std::string annotation_text() const;
  semantics::AnnotationSet annotations() const;
};

Clip test_clip(int width = 352, int height = 288, int frames = 32);

// Sum of random low-frequency sinusoids plus a little fine grain, sampled at
// integer offsets (ox, oy) into an unbounded texture: translating the offset
// translates the content exactly.
Frame texture_window(int width, int height, int ox, int oy, std::uint64_t seed);

}  // namespace ssvc::synthetic
