#include "aerocap/capture_io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aerocap {

using nlohmann::json;

namespace {

json pose_to_json(const Pose& p) {
  return {{"x", p.position.x()}, {"y", p.position.y()}, {"z", p.position.z()},
          {"heading", p.heading}, {"tilt", p.camera_tilt}};
}

Pose pose_from_json(const json& j) {
  Pose p;
  p.position = Vec3(j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>());
  p.heading = j.at("heading").get<double>();
  p.camera_tilt = j.at("tilt").get<double>();
  return p;
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  k.validate();
  return k;
}

template <typename Fn>
void for_each_line(std::istream& is, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
      fn(j);
    } catch (const json::exception& e) {
      throw CaptureFormatError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw CaptureFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

void write_capture_jsonl(std::ostream& os, const std::vector<CaptureFrame>& frames) {
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& cam : frames[f].cameras) {
      json joints = json::array();
      for (const auto& d : cam.detection.joints) joints.push_back({d.u, d.v, d.confidence, d.visible ? 1 : 0});
      json line = {{"frame", f},
                   {"t", frames[f].timestamp},
                   {"camera", cam.camera_id},
                   {"pose", pose_to_json(cam.pose)},
                   {"intrinsics", intrinsics_to_json(cam.intrinsics)},
                   {"joints", std::move(joints)}};
      os << line.dump() << '\n';
    }
  }
}

std::vector<CaptureFrame> read_capture_jsonl(std::istream& is) {
  std::map<std::int64_t, CaptureFrame> by_frame;
  std::map<std::int64_t, std::set<double>> stamps;
  std::map<std::int64_t, std::set<int>> seen_cameras;
  for_each_line(is, [&](const json& j) {
    const auto frame = j.at("frame").get<std::int64_t>();
    CameraFrame cam;
    cam.camera_id = j.at("camera").get<int>();
    cam.pose = pose_from_json(j.at("pose"));
    cam.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    for (const auto& jj : j.at("joints")) {
      JointDetection d;
      d.u = jj.at(0).get<double>();
      d.v = jj.at(1).get<double>();
      d.confidence = jj.at(2).get<double>();
      d.visible = jj.at(3).get<int>() != 0;
      cam.detection.joints.push_back(d);
    }
    if (!seen_cameras[frame].insert(cam.camera_id).second)
      throw CaptureFormatError("frame " + std::to_string(frame) + ": camera " + std::to_string(cam.camera_id) +
                               " appears twice");
    const double t = j.at("t").get<double>();
    stamps[frame].insert(t);
    CaptureFrame& cf = by_frame[frame];
    cf.timestamp = t;
    cf.cameras.push_back(std::move(cam));
  });

  std::ostringstream bad;
  for (const auto& [frame, ts] : stamps) {
    if (ts.size() <= 1) continue;
    bad << " frame " << frame << ":";
    for (double t : ts) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %.17g", t);
      bad << buf;
    }
  }
  if (!bad.str().empty()) throw CaptureFormatError("unsynchronized frames:" + bad.str());

  std::vector<CaptureFrame> out;
  out.reserve(by_frame.size());
  for (auto& [frame, cf] : by_frame) out.push_back(std::move(cf));
  return out;
}

void write_skeleton_jsonl(std::ostream& os, const SkeletonSequence& seq) {
  for (std::size_t f = 0; f < seq.size(); ++f) {
    json joints = json::array();
    for (const auto& p : seq.frames[f].joints) joints.push_back({p.x(), p.y(), p.z()});
    json line = {{"frame", f}, {"t", seq.timestamps.at(f)}, {"joints", std::move(joints)}};
    if (f < seq.carried.size()) {
      json flags = json::array();
      for (bool c : seq.carried[f]) flags.push_back(c ? 1 : 0);
      line["carried"] = std::move(flags);
    }
    os << line.dump() << '\n';
  }
}

SkeletonSequence read_skeleton_jsonl(std::istream& is) {
  SkeletonSequence seq;
  for_each_line(is, [&](const json& j) {
    const auto frame = j.at("frame").get<std::size_t>();
    if (frame != seq.size()) throw InvalidArgument("skeleton frames must be consecutive from 0");
    std::vector<Vec3> joints;
    for (const auto& p : j.at("joints"))
      joints.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    seq.timestamps.push_back(j.at("t").get<double>());
    std::vector<bool> carried(joints.size(), false);
    if (j.contains("carried")) {
      const auto& flags = j.at("carried");
      for (std::size_t i = 0; i < flags.size() && i < carried.size(); ++i) carried[i] = flags[i].get<int>() != 0;
    }
    seq.frames.emplace_back(std::move(joints));
    seq.carried.push_back(std::move(carried));
  });
  return seq;
}

void write_skeleton_csv(std::ostream& os, const SkeletonSequence& seq) {
  os << "frame,t,joint,x,y,z,carried\n";
  char buf[256];
  for (std::size_t f = 0; f < seq.size(); ++f) {
    for (std::size_t j = 0; j < seq.frames[f].joints.size(); ++j) {
      const Vec3& p = seq.frames[f].joints[j];
      const bool carried = f < seq.carried.size() && j < seq.carried[f].size() && seq.carried[f][j];
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%zu,%.17g,%.17g,%.17g,%d\n", f, seq.timestamps.at(f), j, p.x(),
                    p.y(), p.z(), carried ? 1 : 0);
      os << buf;
    }
  }
}

}  // namespace aerocap
