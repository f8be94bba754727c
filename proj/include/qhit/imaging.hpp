#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qhit/error.hpp"
#include "qhit/graph.hpp"

namespace qhit {

/// Row-major grid of non-negative intensities.
struct PixelImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> intensities;

  PixelImage() = default;
  PixelImage(std::size_t r, std::size_t c) : rows(r), cols(c), intensities(r * c, 0.0) {}

  double& at(std::size_t row, std::size_t col) { return intensities[row * cols + col]; }
  double at(std::size_t row, std::size_t col) const { return intensities[row * cols + col]; }

  double total() const {
    double s = 0.0;
    for (double v : intensities) s += v;
    return s;
  }
};

/// One circle per waveguide; cx is the column, cy the row, both in pixels.
struct MaskEntry {
  NodeId node_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

struct MaskSpec {
  std::vector<MaskEntry> entries;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

inline bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Whitespace-separated numeric rows of equal length. Blank lines are skipped.
inline PixelImage parse_image(std::string_view text) {
  PixelImage img;
  const auto lines = detail::split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (detail::is_blank(line)) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      const auto token = line.substr(pos, end - pos);
      double v = 0.0;
      if (!detail::parse_double(token, v)) throw ParseError(ln + 1, "non-numeric token '" + std::string(token) + "'");
      if (v < 0.0) throw ParseError(ln + 1, "negative intensity '" + std::string(token) + "'");
      img.intensities.push_back(v);
      ++count;
      pos = end;
    }
    if (img.rows == 0) {
      img.cols = count;
    } else if (count != img.cols) {
      throw ParseError(ln + 1, "row has " + std::to_string(count) + " values, expected " + std::to_string(img.cols));
    }
    ++img.rows;
  }
  if (img.rows == 0) throw ParseError(1, "image is empty");
  return img;
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Inverse of parse_image; values use shortest round-trip formatting.
inline std::string format_image(const PixelImage& img) {
  std::string out;
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      if (c) out += ' ';
      out += format_number(img.at(r, c));
    }
    out += '\n';
  }
  return out;
}

/// CSV with header `node_id,cx,cy,radius`.
inline MaskSpec parse_mask(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t ln = 0;
  while (ln < lines.size() && (detail::is_blank(lines[ln]) || lines[ln].front() == '#')) ++ln;
  if (ln >= lines.size() || detail::trim(lines[ln]) != "node_id,cx,cy,radius")
    throw ParseError(ln + 1, "expected header 'node_id,cx,cy,radius'");
  MaskSpec mask;
  for (++ln; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    if (detail::is_blank(line)) continue;
    double fields[4];
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      auto comma = line.find(',', start);
      if ((f < 3) == (comma == std::string_view::npos))
        throw ParseError(ln + 1, "expected 4 comma-separated fields");
      auto token = detail::trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                     : comma - start));
      if (!detail::parse_double(token, fields[f]))
        throw ParseError(ln + 1, "non-numeric field '" + std::string(token) + "'");
      start = comma + 1;
    }
    if (fields[0] < 0.0 || fields[0] != std::floor(fields[0]))
      throw ParseError(ln + 1, "node_id must be a non-negative integer");
    if (fields[3] <= 0.0) throw ParseError(ln + 1, "radius must be > 0");
    mask.entries.push_back({NodeId(fields[0]), fields[1], fields[2], fields[3]});
  }
  return mask;
}

inline std::string format_mask(const MaskSpec& mask) {
  std::string out = "node_id,cx,cy,radius\n";
  for (const auto& e : mask.entries) {
    out += std::to_string(e.node_id) + ',' + format_number(e.cx) + ',' + format_number(e.cy) + ',' +
           format_number(e.radius) + '\n';
  }
  return out;
}

/// Unique ids, circles inside the image, no two closed disks touching.
inline void validate_mask(const MaskSpec& mask, std::size_t rows, std::size_t cols) {
  require(!mask.entries.empty(), ErrorKind::MaskError, "mask is empty");
  std::set<NodeId> ids;
  for (const auto& e : mask.entries) {
    require(ids.insert(e.node_id).second, ErrorKind::MaskError, "duplicate node_id " + std::to_string(e.node_id));
    require(e.radius > 0.0, ErrorKind::MaskError, "radius must be > 0");
    require(e.cx - e.radius >= 0.0 && e.cx + e.radius <= double(cols) - 1.0 && e.cy - e.radius >= 0.0 &&
                e.cy + e.radius <= double(rows) - 1.0,
            ErrorKind::MaskError, "circle for node " + std::to_string(e.node_id) + " leaves the image");
  }
  for (std::size_t i = 0; i < mask.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < mask.entries.size(); ++j) {
      const auto& a = mask.entries[i];
      const auto& b = mask.entries[j];
      const double d2 = (a.cx - b.cx) * (a.cx - b.cx) + (a.cy - b.cy) * (a.cy - b.cy);
      const double r = a.radius + b.radius;
      require(d2 > r * r, ErrorKind::MaskError,
              "circles for nodes " + std::to_string(a.node_id) + " and " + std::to_string(b.node_id) + " overlap");
    }
  }
}

/// Mask ids must be exactly the graph's node set.
inline void validate_mask(const MaskSpec& mask, const Graph& g) {
  std::vector<NodeId> ids;
  for (const auto& e : mask.entries) ids.push_back(e.node_id);
  std::sort(ids.begin(), ids.end());
  bool covers = ids.size() == g.size();
  for (std::size_t i = 0; covers && i < ids.size(); ++i) covers = ids[i] == i;
  require(covers, ErrorKind::MaskError, "mask node ids do not match the graph's " + std::to_string(g.size()) + " nodes");
}

namespace detail {

template <typename Visit>
void for_each_pixel_in_disk(std::size_t rows, std::size_t cols, double cx, double cy, double radius, Visit&& visit) {
  const double r2 = radius * radius;
  const auto r0 = static_cast<long>(std::max(0.0, std::floor(cy - radius)));
  const auto r1 = static_cast<long>(std::min(double(rows) - 1.0, std::ceil(cy + radius)));
  const auto c0 = static_cast<long>(std::max(0.0, std::floor(cx - radius)));
  const auto c1 = static_cast<long>(std::min(double(cols) - 1.0, std::ceil(cx + radius)));
  for (long r = r0; r <= r1; ++r) {
    for (long c = c0; c <= c1; ++c) {
      const double dx = double(c) - cx, dy = double(r) - cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= r2) visit(std::size_t(r), std::size_t(c), d2);
    }
  }
}

}  // namespace detail

/// Raw per-circle intensity sums, aligned with mask.entries.
inline std::vector<double> circle_sums(const PixelImage& img, const MaskSpec& mask) {
  validate_mask(mask, img.rows, img.cols);
  std::vector<double> sums;
  sums.reserve(mask.entries.size());
  for (const auto& e : mask.entries) {
    double s = 0.0;
    detail::for_each_pixel_in_disk(img.rows, img.cols, e.cx, e.cy, e.radius,
                                   [&](std::size_t r, std::size_t c, double) { s += img.at(r, c); });
    sums.push_back(s);
  }
  return sums;
}

struct Extraction {
  std::vector<NodeId> node_ids;       // ascending
  std::vector<double> probabilities;  // aligned with node_ids
  double efficiency = 0.0;            // share of the exit node

  double probability_of(NodeId id) const {
    auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
    require(it != node_ids.end() && *it == id, ErrorKind::MaskError, "node not in mask");
    return probabilities[std::size_t(it - node_ids.begin())];
  }
};

/// Normalized circle intensities; the hitting efficiency is the exit node's share.
inline Extraction extract_probabilities(const PixelImage& img, const MaskSpec& mask, NodeId exit) {
  const auto sums = circle_sums(img, mask);
  std::vector<std::size_t> order(mask.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mask.entries[a].node_id < mask.entries[b].node_id; });
  double total = 0.0;
  for (std::size_t i : order) total += sums[i];
  require(total > 0.0, ErrorKind::DegenerateImage, "no intensity inside the mask circles");
  Extraction out;
  bool found_exit = false;
  for (std::size_t i : order) {
    out.node_ids.push_back(mask.entries[i].node_id);
    out.probabilities.push_back(sums[i] / total);
    if (mask.entries[i].node_id == exit) {
      out.efficiency = out.probabilities.back();
      found_exit = true;
    }
  }
  require(found_exit, ErrorKind::MaskError, "exit node " + std::to_string(exit) + " has no mask circle");
  return out;
}

struct SyntheticImage {
  PixelImage image;
  std::vector<std::string> warnings;
};

/// Isotropic Gaussian spot per mask circle, truncated at 4 sigma, with total
/// spot mass `scale * p(node_id)`.
inline SyntheticImage render_synthetic(const Eigen::VectorXd& p, const MaskSpec& mask, std::size_t rows,
                                       std::size_t cols, double sigma, double scale = 1000.0) {
  require(sigma > 0.0, ErrorKind::InvalidParameter, "sigma must be > 0");
  validate_mask(mask, rows, cols);
  SyntheticImage out{PixelImage(rows, cols), {}};
  for (const auto& e : mask.entries) {
    require(e.node_id < std::size_t(p.size()), ErrorKind::DimensionMismatch,
            "no probability for node " + std::to_string(e.node_id));
    if (sigma >= e.radius) {
      out.warnings.push_back("oracle-warning: sigma >= radius for node " + std::to_string(e.node_id) +
                             "; spot leaks outside its circle");
    }
    const double mass = scale * p(Eigen::Index(e.node_id));
    require(mass >= 0.0, ErrorKind::InvalidParameter, "probabilities must be non-negative");
    if (mass == 0.0) continue;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double norm = 0.0;
    detail::for_each_pixel_in_disk(rows, cols, e.cx, e.cy, 4.0 * sigma,
                                   [&](std::size_t, std::size_t, double d2) { norm += std::exp(-d2 * inv); });
    detail::for_each_pixel_in_disk(rows, cols, e.cx, e.cy, 4.0 * sigma, [&](std::size_t r, std::size_t c, double d2) {
      out.image.at(r, c) += mass * std::exp(-d2 * inv) / norm;
    });
  }
  return out;
}

}  // namespace qhit
