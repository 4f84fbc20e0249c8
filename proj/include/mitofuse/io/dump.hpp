#ifndef MITOFUSE_IO_DUMP_HPP
#define MITOFUSE_IO_DUMP_HPP

#include "mitofuse/fusion.hpp"
#include "mitofuse/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mitofuse::io {

// Detection dump: one JSON object per line,
//   {"slide_id":"s1","tile_index":3,"frame":"local","box":[x1,y1,x2,y2],"score":0.9,"model_id":"m"}
// tile_index is present exactly when frame is "local". Numbers are written in
// shortest round-trip form, so parse -> serialize is the identity on files
// this module wrote.
std::string to_json_line(const Detection& d);

// Throws FormatError naming `source` and `line` on any schema violation.
Detection parse_json_line(std::string_view text, const std::string& source, std::size_t line);

// Records in file order. Blank lines are skipped.
std::vector<Detection> read_dump_records(std::istream& in, const std::string& source);
std::vector<Detection> read_dump_records(const std::filesystem::path& path);

// Records grouped by model_id in order of first appearance.
std::vector<ModelDump> group_by_model(const std::vector<Detection>& records);
std::vector<ModelDump> read_dump(const std::filesystem::path& path);

void write_dump(std::ostream& out, std::span<const Detection> dets);
void write_dump(const std::filesystem::path& path, std::span<const Detection> dets);

}  // namespace mitofuse::io

#endif  // MITOFUSE_IO_DUMP_HPP
