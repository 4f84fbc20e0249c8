#ifndef MITOFUSE_IO_MANIFEST_HPP
#define MITOFUSE_IO_MANIFEST_HPP

#include "mitofuse/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mitofuse::io {

enum class Split { kTrain, kTest };

const char* to_string(Split s);

// One ROI image (or slide) with its ground-truth mitosis centers.
struct ManifestSlide {
  SlideInfo info;
  std::vector<Point2d> centers;
  std::optional<Split> split;
};

// Manifest JSON:
//   {"box_size": 50,
//    "slides": [{"slide_id": "a", "width": 2048, "height": 2048,
//                "microns_per_pixel": 0.25, "split": "train",
//                "annotations": [[x, y], ...]}]}
// microns_per_pixel and split are optional.
struct DatasetManifest {
  double box_size = 0.0;
  std::vector<ManifestSlide> slides;

  AnnotationSet annotations(std::size_t i) const;
  std::vector<AnnotationSet> all_annotations() const;
  const ManifestSlide* find(const std::string& slide_id) const;
};

// Throws std::invalid_argument on duplicate slides, box_size <= 0, or
// annotation centers outside their slide.
void validate(const DatasetManifest& m);

DatasetManifest parse_manifest(std::istream& in, const std::string& source);
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const DatasetManifest& m);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

// Seeded shuffle of the ROIs, then the first floor(fraction * N) become
// "train" and the rest "test". When that rounds to zero, one ROI is still
// assigned to train. Slide order in the result is unchanged.
DatasetManifest split_rois(const DatasetManifest& m, double fraction, std::uint64_t seed);

struct SplitSummary {
  std::size_t train = 0;
  std::size_t test = 0;
  std::size_t unassigned = 0;
  double train_fraction = 0.0;  // train / (train + test), 0 when nothing is assigned
};

SplitSummary summarize_split(const DatasetManifest& m);

}  // namespace mitofuse::io

#endif  // MITOFUSE_IO_MANIFEST_HPP
