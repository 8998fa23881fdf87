#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aerocap/capture.hpp"
#include "aerocap/skeleton.hpp"

namespace aerocap {

/// Malformed or inconsistent capture input.
class CaptureFormatError : public std::runtime_error {
 public:
  explicit CaptureFormatError(const std::string& what) : std::runtime_error(what) {}
};

/// One JSON object per (frame, camera):
///   {"frame":k,"t":s,"camera":id,
///    "pose":{"x","y","z","heading","tilt"},
///    "intrinsics":{"fx","fy","cx","cy","width","height"},
///    "joints":[[u,v,confidence,visible],...]}
void write_capture_jsonl(std::ostream& os, const std::vector<CaptureFrame>& frames);

/// Groups lines by frame index. Lines of one frame carrying different
/// timestamps raise CaptureFormatError naming the offending timestamps.
std::vector<CaptureFrame> read_capture_jsonl(std::istream& is);

/// {"frame":k,"t":s,"joints":[[x,y,z],...]} per frame; "carried" is added when
/// flags are present.
void write_skeleton_jsonl(std::ostream& os, const SkeletonSequence& seq);
SkeletonSequence read_skeleton_jsonl(std::istream& is);

/// frame,t,joint,x,y,z,carried
void write_skeleton_csv(std::ostream& os, const SkeletonSequence& seq);

}  // namespace aerocap
