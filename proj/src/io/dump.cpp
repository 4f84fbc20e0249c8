#include "mitofuse/io/dump.hpp"

#include "mitofuse/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>

namespace mitofuse::io {

using ordered_json = nlohmann::ordered_json;

std::string to_json_line(const Detection& d) {
  ordered_json j;
  j["slide_id"] = d.slide_id;
  if (const auto* local = std::get_if<TileLocal>(&d.frame)) {
    j["tile_index"] = local->tile_index;
    j["frame"] = "local";
  } else {
    j["frame"] = "global";
  }
  j["box"] = {d.bbox.x1(), d.bbox.y1(), d.bbox.x2(), d.bbox.y2()};
  j["score"] = d.score;
  j["model_id"] = d.model_id;
  return j.dump();
}

namespace {

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& source, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(source, line, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(source, line, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

Detection parse_json_line(std::string_view text, const std::string& source, std::size_t line) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(source, line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError(source, line, "record is not a JSON object");

  Detection d{BBox(0, 0, 1, 1), 0.0, {}, {}, SlideGlobal{}};
  d.slide_id = field<std::string>(j, "slide_id", source, line);
  d.model_id = field<std::string>(j, "model_id", source, line);

  const auto frame = field<std::string>(j, "frame", source, line);
  const bool has_tile = j.contains("tile_index") && !j["tile_index"].is_null();
  if (frame == "local") {
    if (!has_tile || !j["tile_index"].is_number_unsigned()) {
      throw FormatError(source, line, "local record needs a non-negative integer 'tile_index'");
    }
    d.frame = TileLocal{j["tile_index"].get<std::size_t>()};
  } else if (frame == "global") {
    if (has_tile) throw FormatError(source, line, "global record must not carry 'tile_index'");
  } else {
    throw FormatError(source, line, "frame must be \"local\" or \"global\", got \"" + frame + "\"");
  }

  const auto box = field<std::vector<double>>(j, "box", source, line);
  if (box.size() != 4) throw FormatError(source, line, "box must have 4 coordinates");
  const auto b = BBox::try_make(box[0], box[1], box[2], box[3]);
  if (!b) throw FormatError(source, line, "box must be finite with x1 < x2 and y1 < y2");
  d.bbox = *b;

  d.score = field<double>(j, "score", source, line);
  if (!valid_score(d.score)) {
    throw FormatError(source, line, "score " + j["score"].dump() + " outside [0, 1]");
  }
  return d;
}

std::vector<Detection> read_dump_records(std::istream& in, const std::string& source) {
  std::vector<Detection> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(text, source, line));
  }
  if (in.bad()) throw FormatError(source, line, "read error");
  return out;
}

std::vector<Detection> read_dump_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string(), 0, "cannot open for reading");
  return read_dump_records(in, path.string());
}

std::vector<ModelDump> group_by_model(const std::vector<Detection>& records) {
  std::vector<ModelDump> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& d : records) {
    const auto [it, inserted] = slot.emplace(d.model_id, out.size());
    if (inserted) out.push_back(ModelDump{d.model_id, {}});
    out[it->second].detections.push_back(d);
  }
  return out;
}

std::vector<ModelDump> read_dump(const std::filesystem::path& path) {
  return group_by_model(read_dump_records(path));
}

void write_dump(std::ostream& out, std::span<const Detection> dets) {
  for (const auto& d : dets) out << to_json_line(d) << '\n';
}

void write_dump(const std::filesystem::path& path, std::span<const Detection> dets) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open for writing");
  write_dump(out, dets);
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

}  // namespace mitofuse::io
