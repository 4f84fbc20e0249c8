#include "mitofuse/io/manifest.hpp"

#include "mitofuse/errors.hpp"
#include "mitofuse/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mitofuse::io {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Split s) { return s == Split::kTrain ? "train" : "test"; }

AnnotationSet DatasetManifest::annotations(std::size_t i) const {
  return AnnotationSet{slides.at(i).info.slide_id, box_size, slides.at(i).centers};
}

std::vector<AnnotationSet> DatasetManifest::all_annotations() const {
  std::vector<AnnotationSet> out;
  out.reserve(slides.size());
  for (std::size_t i = 0; i < slides.size(); ++i) out.push_back(annotations(i));
  return out;
}

const ManifestSlide* DatasetManifest::find(const std::string& slide_id) const {
  const auto it = std::find_if(slides.begin(), slides.end(),
                               [&](const ManifestSlide& s) { return s.info.slide_id == slide_id; });
  return it == slides.end() ? nullptr : &*it;
}

void validate(const DatasetManifest& m) {
  if (!(m.box_size > 0.0) || !std::isfinite(m.box_size)) throw std::invalid_argument("manifest box_size must be > 0");
  std::set<std::string> seen;
  for (const auto& s : m.slides) {
    validate(s.info);
    if (!seen.insert(s.info.slide_id).second) {
      throw std::invalid_argument("manifest lists slide '" + s.info.slide_id + "' twice");
    }
    const BBox bounds = s.info.bounds();
    for (const auto& c : s.centers) {
      if (!bounds.contains(c)) {
        throw std::invalid_argument("annotation (" + std::to_string(c.x()) + ", " + std::to_string(c.y()) +
                                    ") lies outside slide '" + s.info.slide_id + "'");
      }
    }
  }
}

DatasetManifest parse_manifest(std::istream& in, const std::string& source) {
  DatasetManifest m;
  try {
    const auto j = ordered_json::parse(in);
    m.box_size = j.at("box_size").get<double>();
    for (const auto& js : j.at("slides")) {
      ManifestSlide s;
      s.info.slide_id = js.at("slide_id").get<std::string>();
      s.info.width = js.at("width").get<std::int64_t>();
      s.info.height = js.at("height").get<std::int64_t>();
      if (js.contains("microns_per_pixel") && !js["microns_per_pixel"].is_null()) {
        s.info.microns_per_pixel = js["microns_per_pixel"].get<double>();
      }
      if (js.contains("split") && !js["split"].is_null()) {
        const auto split = js["split"].get<std::string>();
        if (split == "train") {
          s.split = Split::kTrain;
        } else if (split == "test") {
          s.split = Split::kTest;
        } else {
          throw FormatError(source, 0, "slide '" + s.info.slide_id + "': split must be \"train\" or \"test\"");
        }
      }
      if (js.contains("annotations")) {
        for (const auto& c : js["annotations"]) {
          const auto xy = c.get<std::vector<double>>();
          if (xy.size() != 2) throw FormatError(source, 0, "annotation centers must be [x, y] pairs");
          s.centers.emplace_back(xy[0], xy[1]);
        }
      }
      m.slides.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source, 0, std::string("invalid manifest: ") + e.what());
  }
  try {
    validate(m);
  } catch (const std::invalid_argument& e) {
    throw FormatError(source, 0, e.what());
  }
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string(), 0, "cannot open for reading");
  return parse_manifest(in, path.string());
}

void write_manifest(std::ostream& out, const DatasetManifest& m) {
  ordered_json j;
  j["box_size"] = m.box_size;
  j["slides"] = ordered_json::array();
  for (const auto& s : m.slides) {
    ordered_json js;
    js["slide_id"] = s.info.slide_id;
    js["width"] = s.info.width;
    js["height"] = s.info.height;
    if (s.info.microns_per_pixel) js["microns_per_pixel"] = *s.info.microns_per_pixel;
    if (s.split) js["split"] = to_string(*s.split);
    js["annotations"] = ordered_json::array();
    for (const auto& c : s.centers) js["annotations"].push_back({c.x(), c.y()});
    j["slides"].push_back(std::move(js));
  }
  out << j.dump(2) << '\n';
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open for writing");
  write_manifest(out, m);
}

DatasetManifest split_rois(const DatasetManifest& m, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  if (m.slides.empty()) throw std::invalid_argument("cannot split an empty manifest");

  const std::size_t n = m.slides.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0x73706c6974ULL);
  // Fisher-Yates with our own index draw keeps the split identical across standard libraries.
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
    std::swap(order[i], order[j]);
  }

  // The epsilon absorbs products like 0.29 * 100 = 28.999999999999996.
  auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n);

  DatasetManifest out = m;
  for (std::size_t r = 0; r < n; ++r) out.slides[order[r]].split = r < n_train ? Split::kTrain : Split::kTest;
  return out;
}

SplitSummary summarize_split(const DatasetManifest& m) {
  SplitSummary s;
  for (const auto& slide : m.slides) {
    if (!slide.split) {
      ++s.unassigned;
    } else if (*slide.split == Split::kTrain) {
      ++s.train;
    } else {
      ++s.test;
    }
  }
  const std::size_t assigned = s.train + s.test;
  s.train_fraction = assigned ? static_cast<double>(s.train) / static_cast<double>(assigned) : 0.0;
  return s;
}

}  // namespace mitofuse::io
