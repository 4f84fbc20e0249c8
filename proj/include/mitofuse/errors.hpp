#ifndef MITOFUSE_ERRORS_HPP
#define MITOFUSE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mitofuse {

// Detection is in the wrong coordinate frame, references the wrong tile, or
// belongs to a different slide than its peers.
class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the file path and 1-based line (0 when unknown).
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace mitofuse

#endif  // MITOFUSE_ERRORS_HPP
