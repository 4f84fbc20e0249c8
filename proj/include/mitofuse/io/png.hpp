#ifndef MITOFUSE_IO_PNG_HPP
#define MITOFUSE_IO_PNG_HPP

#include "mitofuse/augmentation.hpp"

#include <filesystem>

namespace mitofuse::io {

// Any PNG color type is converted to 8-bit RGB (alpha dropped, gray expanded).
Patch read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Patch& patch);

}  // namespace mitofuse::io

#endif  // MITOFUSE_IO_PNG_HPP
