#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trifuse/binary_io.hpp"
#include "trifuse/core.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/format.hpp"
#include "trifuse/mask.hpp"

namespace trifuse {

inline constexpr std::uint32_t kFlowFormatVersion = 1;

/// "TFFL": version, width, height, then width*height little-endian f32
/// (u, v) pairs, row-major.
inline void write_flow_field(const FlowField& flow,
                             const std::filesystem::path& path) {
  detail::ByteWriter out(path);
  out.magic("TFFL");
  out.u32(kFlowFormatVersion);
  out.u32(static_cast<std::uint32_t>(flow.width));
  out.u32(static_cast<std::uint32_t>(flow.height));
  for (const auto& v : flow.vectors) {
    out.f32(v.u);
    out.f32(v.v);
  }
  out.finish();
}

inline FlowField read_flow_field(const std::filesystem::path& path) {
  detail::ByteReader in(path);
  in.expect_magic("TFFL");
  const std::uint32_t version = in.u32();
  if (version != kFlowFormatVersion) {
    throw DataError(in.path() + ": unsupported TFFL version " +
                    std::to_string(version));
  }
  FlowField flow;
  flow.width = static_cast<int>(in.u32());
  flow.height = static_cast<int>(in.u32());
  if (flow.width <= 0 || flow.height <= 0 || flow.width > 1 << 16 ||
      flow.height > 1 << 16) {
    throw DataError(in.path() + ": implausible flow dimensions");
  }
  const std::size_t count =
      static_cast<std::size_t>(flow.width) * static_cast<std::size_t>(flow.height);
  flow.vectors.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    FlowVector& v = flow.vectors[i];
    v.u = in.f32();
    v.v = in.f32();
    if (!std::isfinite(v.u) || !std::isfinite(v.v)) {
      throw DataError(in.path() + ": non-finite flow component at pixel " +
                      std::to_string(i));
    }
  }
  in.expect_eof();
  return flow;
}

/// One split of a dataset. Flow fields cover every frame of the split; masks
/// exist only for the testing split.
struct SplitData {
  std::vector<Detection> detections;
  std::vector<TrackSegment> segments;
  std::map<int, FlowField> flows;
  std::map<int, Mask> masks;

  bool operator==(const SplitData&) const = default;
};

struct Dataset {
  int frame_width = 0;
  int frame_height = 0;
  int train_frame_count = 0;
  int test_frame_count = 0;
  SplitData training;
  SplitData testing;

  bool operator==(const Dataset&) const = default;
};

namespace detail {

inline std::string frame_file_name(int frame, const char* extension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.%s", frame, extension);
  return buf;
}

inline void write_detections(const std::vector<Detection>& detections,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "# frame target x y w h label confidence\n";
  for (const auto& d : detections) {
    out << d.frame_index << ' ' << d.target_id << ' ' << d.bbox.x << ' '
        << d.bbox.y << ' ' << d.bbox.width << ' ' << d.bbox.height << ' '
        << d.object_label << ' ' << format_double(d.object_confidence) << '\n';
  }
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

inline void write_segments(const std::vector<TrackSegment>& segments,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "# target action confidence count (frame x y w h)...\n";
  for (const auto& s : segments) {
    out << s.target_id << ' ' << s.action_label << ' '
        << format_double(s.action_confidence) << ' ' << s.frames.size();
    for (const auto& [frame, box] : s.frames) {
      out << ' ' << frame << ' ' << box.x << ' ' << box.y << ' ' << box.width
          << ' ' << box.height;
    }
    out << '\n';
  }
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

struct SplitContext {
  std::string name;   // "training" / "testing"
  int frame_count = 0;
  int frame_width = 0;
  int frame_height = 0;
};

inline void check_frame_reference(int frame, const SplitContext& ctx,
                                  const std::string& where) {
  if (frame < 0 || frame >= ctx.frame_count) {
    throw DataError(where + ": dangling frame reference " +
                    std::to_string(frame) + " (" + ctx.name + " split has " +
                    std::to_string(ctx.frame_count) + " frames)");
  }
}

inline void check_box(const BoundingBox& box, const SplitContext& ctx,
                      const std::string& where) {
  if (!box_in_frame(box, ctx.frame_width, ctx.frame_height)) {
    throw DataError(where + ": box (" + std::to_string(box.x) + "," +
                    std::to_string(box.y) + "," + std::to_string(box.width) +
                    "," + std::to_string(box.height) + ") outside " +
                    std::to_string(ctx.frame_width) + "x" +
                    std::to_string(ctx.frame_height) + " frame");
  }
}

inline std::vector<Detection> read_detections(const std::filesystem::path& path,
                                              const SplitContext& ctx) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Detection> detections;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = path.string() + " line " + std::to_string(line_number);
    const auto fields = split_fields(text);
    if (fields.size() != 8) {
      throw DataError(where + ": expected 8 fields, got " +
                      std::to_string(fields.size()));
    }
    Detection d;
    d.frame_index = static_cast<int>(parse_int(fields[0], where));
    d.target_id = fields[1];
    d.bbox.x = static_cast<int>(parse_int(fields[2], where));
    d.bbox.y = static_cast<int>(parse_int(fields[3], where));
    d.bbox.width = static_cast<int>(parse_int(fields[4], where));
    d.bbox.height = static_cast<int>(parse_int(fields[5], where));
    d.object_label = fields[6];
    d.object_confidence = parse_double(fields[7], where);
    check_frame_reference(d.frame_index, ctx, where);
    check_box(d.bbox, ctx, where);
    if (d.object_confidence < 0.0 || d.object_confidence > 1.0) {
      throw DataError(where + ": confidence outside [0,1]");
    }
    if (!seen.emplace(d.target_id, d.frame_index).second) {
      throw DataError(where + ": duplicate detection for target '" +
                      d.target_id + "' in frame " +
                      std::to_string(d.frame_index));
    }
    detections.push_back(std::move(d));
  }
  return detections;
}

inline std::vector<TrackSegment> read_segments(const std::filesystem::path& path,
                                               const SplitContext& ctx) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<TrackSegment> segments;
  std::set<std::pair<std::string, int>> seen_last;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = path.string() + " line " + std::to_string(line_number);
    const auto fields = split_fields(text);
    if (fields.size() < 4) {
      throw DataError(where + ": expected at least 4 fields");
    }
    TrackSegment s;
    s.target_id = fields[0];
    s.action_label = fields[1];
    s.action_confidence = parse_double(fields[2], where);
    const long long count = parse_int(fields[3], where);
    if (count < 1) throw DataError(where + ": segment frame count must be >= 1");
    if (fields.size() != 4 + static_cast<std::size_t>(count) * 5) {
      throw DataError(where + ": expected " +
                      std::to_string(4 + count * 5) + " fields, got " +
                      std::to_string(fields.size()));
    }
    if (s.action_confidence < 0.0 || s.action_confidence > 1.0) {
      throw DataError(where + ": confidence outside [0,1]");
    }
    for (long long i = 0; i < count; ++i) {
      const std::size_t base = 4 + static_cast<std::size_t>(i) * 5;
      const int frame = static_cast<int>(parse_int(fields[base], where));
      BoundingBox box;
      box.x = static_cast<int>(parse_int(fields[base + 1], where));
      box.y = static_cast<int>(parse_int(fields[base + 2], where));
      box.width = static_cast<int>(parse_int(fields[base + 3], where));
      box.height = static_cast<int>(parse_int(fields[base + 4], where));
      check_frame_reference(frame, ctx, where);
      check_box(box, ctx, where);
      if (!s.frames.empty() && frame != s.frames.back().first + 1) {
        throw DataError(where + ": segment frames must be strictly consecutive");
      }
      s.frames.emplace_back(frame, box);
    }
    if (!seen_last.emplace(s.target_id, s.last_frame()).second) {
      throw DataError(where + ": duplicate segment for target '" + s.target_id +
                      "' ending at frame " + std::to_string(s.last_frame()));
    }
    segments.push_back(std::move(s));
  }
  return segments;
}

}  // namespace detail

inline void save_dataset(const Dataset& dataset,
                         const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  fs::create_directories(root / "training" / "flow");
  fs::create_directories(root / "testing" / "flow");
  fs::create_directories(root / "testing" / "masks");

  {
    std::ofstream out(root / "manifest.txt", std::ios::binary);
    if (!out) throw DataError("cannot open manifest.txt for writing");
    out << "dataset.width = " << dataset.frame_width << '\n'
        << "dataset.height = " << dataset.frame_height << '\n'
        << "dataset.train_frames = " << dataset.train_frame_count << '\n'
        << "dataset.test_frames = " << dataset.test_frame_count << '\n';
    if (!out.flush()) throw DataError("write failed: manifest.txt");
  }

  detail::write_detections(dataset.training.detections,
                           root / "training" / "detections.txt");
  detail::write_segments(dataset.training.segments,
                         root / "training" / "segments.txt");
  detail::write_detections(dataset.testing.detections,
                           root / "testing" / "detections.txt");
  detail::write_segments(dataset.testing.segments,
                         root / "testing" / "segments.txt");
  for (const auto& [frame, flow] : dataset.training.flows) {
    write_flow_field(flow, root / "training" / "flow" /
                               detail::frame_file_name(frame, "tffl"));
  }
  for (const auto& [frame, flow] : dataset.testing.flows) {
    write_flow_field(flow, root / "testing" / "flow" /
                               detail::frame_file_name(frame, "tffl"));
  }
  for (const auto& [frame, mask] : dataset.testing.masks) {
    write_pgm(mask,
              root / "testing" / "masks" / detail::frame_file_name(frame, "pgm"));
  }
}

/// Loads and fully validates a dataset directory: manifest, record files,
/// per-frame flow fields, and test masks. Referential integrity is enforced
/// here so the pipeline can trust every frame index and box it sees.
inline Dataset load_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  Dataset dataset;

  const fs::path manifest = root / "manifest.txt";
  for (const auto& entry : detail::read_key_value_file(manifest)) {
    const std::string where =
        manifest.string() + " line " + std::to_string(entry.line_number);
    if (entry.key == "dataset.width") {
      dataset.frame_width = static_cast<int>(detail::parse_int(entry.value, where));
    } else if (entry.key == "dataset.height") {
      dataset.frame_height = static_cast<int>(detail::parse_int(entry.value, where));
    } else if (entry.key == "dataset.train_frames") {
      dataset.train_frame_count =
          static_cast<int>(detail::parse_int(entry.value, where));
    } else if (entry.key == "dataset.test_frames") {
      dataset.test_frame_count =
          static_cast<int>(detail::parse_int(entry.value, where));
    } else {
      throw DataError(where + ": unknown manifest key '" + entry.key + "'");
    }
  }
  if (dataset.frame_width <= 0 || dataset.frame_height <= 0) {
    throw DataError(manifest.string() + ": missing or invalid frame dimensions");
  }
  if (dataset.train_frame_count <= 0 || dataset.test_frame_count < 0) {
    throw DataError(manifest.string() + ": invalid frame counts");
  }

  auto load_split = [&](const char* name, int frame_count, bool with_masks) {
    SplitData split;
    const detail::SplitContext ctx{name, frame_count, dataset.frame_width,
                                   dataset.frame_height};
    const fs::path dir = root / name;
    split.detections = detail::read_detections(dir / "detections.txt", ctx);
    split.segments = detail::read_segments(dir / "segments.txt", ctx);
    std::set<std::string> known_targets;
    for (const auto& d : split.detections) known_targets.insert(d.target_id);
    for (const auto& s : split.segments) {
      if (!known_targets.contains(s.target_id)) {
        throw DataError(std::string(name) +
                        "/segments.txt: segment references target '" +
                        s.target_id + "' with no detections in this split");
      }
    }
    for (int frame = 0; frame < frame_count; ++frame) {
      const fs::path flow_path =
          dir / "flow" / detail::frame_file_name(frame, "tffl");
      if (!fs::exists(flow_path)) {
        throw DataError(flow_path.string() + ": missing flow field for frame " +
                        std::to_string(frame));
      }
      FlowField flow = read_flow_field(flow_path);
      if (flow.width != dataset.frame_width ||
          flow.height != dataset.frame_height) {
        throw DataError(flow_path.string() + ": flow dimensions " +
                        std::to_string(flow.width) + "x" +
                        std::to_string(flow.height) + " do not match dataset");
      }
      split.flows.emplace(frame, std::move(flow));
    }
    if (with_masks) {
      for (int frame = 0; frame < frame_count; ++frame) {
        const fs::path mask_path =
            dir / "masks" / detail::frame_file_name(frame, "pgm");
        if (!fs::exists(mask_path)) {
          throw DataError(mask_path.string() + ": missing mask for frame " +
                          std::to_string(frame));
        }
        Mask mask = read_pgm(mask_path);
        if (mask.width != dataset.frame_width ||
            mask.height != dataset.frame_height) {
          throw DataError(mask_path.string() + ": mask dimensions do not match dataset");
        }
        split.masks.emplace(frame, std::move(mask));
      }
    }
    return split;
  };

  dataset.training = load_split("training", dataset.train_frame_count, false);
  dataset.testing = load_split("testing", dataset.test_frame_count, true);
  return dataset;
}

}  // namespace trifuse
