#include <sstream>

#include <gtest/gtest.h>

#include "aerocap/capture_io.hpp"

using namespace aerocap;

namespace {

std::vector<CaptureFrame> sample_frames() {
  std::vector<CaptureFrame> frames(2);
  for (int f = 0; f < 2; ++f) {
    frames[f].timestamp = 0.1 * f + 1.0 / 3.0;
    for (int c = 0; c < 2; ++c) {
      CameraFrame cam;
      cam.camera_id = c;
      cam.pose = look_at(Vec3(10.0 / 7.0 + c, -2.5, 3.1), Vec3(0, 0, 1));
      cam.detection.joints.resize(kJointCount);
      for (int j = 0; j < kJointCount; ++j) cam.detection.joints[j] = {100.0 / 3.0 + j, 200.1 + f, 0.83, j % 3 != 0};
      frames[f].cameras.push_back(cam);
    }
  }
  return frames;
}

}  // namespace

TEST(CaptureIo, RoundTripIsExact) {
  const auto frames = sample_frames();
  std::stringstream ss;
  write_capture_jsonl(ss, frames);
  const auto back = read_capture_jsonl(ss);
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    EXPECT_EQ(back[f].timestamp, frames[f].timestamp);
    ASSERT_EQ(back[f].cameras.size(), 2u);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& a = frames[f].cameras[c];
      const auto& b = back[f].cameras[c];
      EXPECT_EQ(a.camera_id, b.camera_id);
      EXPECT_EQ(a.pose.position, b.pose.position);
      EXPECT_EQ(a.pose.heading, b.pose.heading);
      EXPECT_EQ(a.pose.camera_tilt, b.pose.camera_tilt);
      for (int j = 0; j < kJointCount; ++j) {
        EXPECT_EQ(a.detection.joints[j].u, b.detection.joints[j].u);
        EXPECT_EQ(a.detection.joints[j].visible, b.detection.joints[j].visible);
      }
    }
  }
  std::stringstream again;
  write_capture_jsonl(again, back);
  std::stringstream first;
  write_capture_jsonl(first, frames);
  EXPECT_EQ(again.str(), first.str());
}

TEST(CaptureIo, UnsynchronizedFramesNameTimestamps) {
  auto frames = sample_frames();
  std::stringstream ss;
  write_capture_jsonl(ss, frames);
  std::string text = ss.str();
  // Give camera 1 of frame 0 a different timestamp.
  const auto second_line = text.find('\n') + 1;
  const auto t_pos = text.find("\"t\":", second_line);
  const auto t_end = text.find_first_of(",}", t_pos);
  text.replace(t_pos, t_end - t_pos, "\"t\":0.5");
  std::istringstream is(text);
  try {
    read_capture_jsonl(is);
    FAIL() << "expected CaptureFormatError";
  } catch (const CaptureFormatError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("frame 0"), std::string::npos) << what;
    EXPECT_NE(what.find("0.5"), std::string::npos) << what;
  }
}

TEST(CaptureIo, RejectsDuplicateCameraAndBadJson) {
  auto frames = sample_frames();
  frames[0].cameras[1].camera_id = 0;
  std::stringstream ss;
  write_capture_jsonl(ss, frames);
  EXPECT_THROW(read_capture_jsonl(ss), CaptureFormatError);

  std::istringstream broken("{\"frame\": 0, \"t\": 0.0\n");
  EXPECT_THROW(read_capture_jsonl(broken), CaptureFormatError);
  std::istringstream missing("{\"frame\": 0, \"t\": 0.0, \"camera\": 0}\n");
  EXPECT_THROW(read_capture_jsonl(missing), CaptureFormatError);
}

TEST(SkeletonIo, JsonlRoundTripAndCsv) {
  SkeletonSequence seq;
  seq.timestamps = {0.0, 0.1};
  seq.frames = {walking_pose(Vec3(0, 0, kPelvisHeight), 0.0, 0.0), walking_pose(Vec3(0.1, 0, kPelvisHeight), 0.0, 0.2)};
  seq.carried = {std::vector<bool>(kJointCount, false), std::vector<bool>(kJointCount, false)};
  seq.carried[1][4] = true;
  std::stringstream ss;
  write_skeleton_jsonl(ss, seq);
  const SkeletonSequence back = read_skeleton_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t f = 0; f < 2; ++f)
    for (int j = 0; j < kJointCount; ++j) EXPECT_EQ(back.frames[f].joints[j], seq.frames[f].joints[j]);
  ASSERT_EQ(back.carried.size(), 2u);
  EXPECT_TRUE(back.carried[1][4]);

  std::ostringstream csv;
  write_skeleton_csv(csv, seq);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "frame,t,joint,x,y,z,carried");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 2 * kJointCount);
}
