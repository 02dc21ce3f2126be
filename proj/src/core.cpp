#include "pwspd/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace pwspd {

PointCloud::PointCloud(PointMatrix points, int intrinsic_dim, std::optional<std::vector<int>> labels)
    : points_(std::move(points)), intrinsic_dim_(intrinsic_dim), labels_(std::move(labels)) {
  if (points_.rows() < 1) throw InvalidArgument("point cloud must contain at least one point");
  if (points_.cols() < 1) throw InvalidArgument("point cloud must have ambient dimension >= 1");
  if (intrinsic_dim_ < 1 || intrinsic_dim_ > points_.cols())
    throw InvalidArgument("intrinsic dimension must satisfy 1 <= d <= D (d=" +
                          std::to_string(intrinsic_dim_) + ", D=" + std::to_string(points_.cols()) +
                          ")");
  if (!points_.allFinite()) throw InvalidArgument("point coordinates must be finite");
  if (labels_ && static_cast<Index>(labels_->size()) != points_.rows())
    throw InvalidArgument("label count does not match point count");
}

const std::vector<int>& PointCloud::labels() const {
  if (!labels_) throw InvalidArgument("point cloud has no labels");
  return *labels_;
}

NeighborGraph::NeighborGraph(Index n, const std::vector<Edge>& edges, Index k) : n_(n), k_(k) {
  // Bucket both orientations by source, then sort and dedupe each bucket.
  std::vector<Index> count(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw InvalidArgument("edge endpoint out of range");
    if (e.i == e.j || !(e.length > 0.0)) continue;
    ++count[e.i + 1];
    ++count[e.j + 1];
  }
  for (Index i = 0; i < n; ++i) count[i + 1] += count[i];
  std::vector<std::pair<Index, double>> slots(static_cast<std::size_t>(count[n]));
  std::vector<Index> fill(count.begin(), count.end() - 1);
  for (const auto& e : edges) {
    if (e.i == e.j || !(e.length > 0.0)) continue;
    slots[fill[e.i]++] = {e.j, e.length};
    slots[fill[e.j]++] = {e.i, e.length};
  }
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  targets_.clear();
  lengths_.clear();
  targets_.reserve(slots.size());
  lengths_.reserve(slots.size());
  for (Index i = 0; i < n; ++i) {
    auto b = slots.begin() + count[i];
    auto e = slots.begin() + count[i + 1];
    std::sort(b, e, [](const auto& a, const auto& c) { return a.first < c.first; });
    for (auto it = b; it != e; ++it) {
      if (it != b && it->first == (it - 1)->first) continue;
      targets_.push_back(it->first);
      lengths_.push_back(it->second);
    }
    offsets_[i + 1] = static_cast<Index>(targets_.size());
  }
}

NeighborGraph NeighborGraph::from_adjacency(Index n, Index k, std::vector<Index> offsets,
                                            std::vector<Index> targets, std::vector<double> lengths) {
  if (static_cast<Index>(offsets.size()) != n + 1 || targets.size() != lengths.size() ||
      offsets.back() != static_cast<Index>(targets.size()))
    throw InvalidArgument("inconsistent adjacency arrays");
  NeighborGraph g;
  g.n_ = n;
  g.k_ = k;
  g.offsets_ = std::move(offsets);
  g.targets_ = std::move(targets);
  g.lengths_ = std::move(lengths);
  return g;
}

bool NeighborGraph::has_edge(Index i, Index j) const {
  auto [b, e] = neighbors(i);
  return std::binary_search(b, e, j);
}

std::vector<NeighborGraph::Edge> NeighborGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(targets_.size() / 2);
  for (Index i = 0; i < n_; ++i)
    for (Index s = offsets_[i]; s < offsets_[i + 1]; ++s)
      if (targets_[s] > i) out.push_back({i, targets_[s], lengths_[s]});
  return out;
}

DistanceMatrix pairwise_euclidean(const PointCloud& cloud) {
  DistanceMatrix out;
  out.values = pairwise_distances(cloud.points());
  out.p = 1.0;
  out.euclidean = true;
  return out;
}

void validate_power(double p, PowerOptions options) {
  if (!std::isfinite(p) || p <= 0.0) throw InvalidArgument("p must be finite and positive");
  if (p < 1.0 && !options.allow_non_metric)
    throw InvalidArgument("p < 1 gives a non-metric; pass the non-metric flag to allow it");
}

std::vector<double> power_weights(const NeighborGraph& graph, double p, PowerOptions options) {
  validate_power(p, options);
  std::vector<double> w(graph.lengths().size());
  std::transform(graph.lengths().begin(), graph.lengths().end(), w.begin(),
                 [p](double l) { return p == 1.0 ? l : std::pow(l, p); });
  return w;
}

// --- I/O --------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

bool skip_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

PointCloud parse_point_cloud(std::istream& in, int intrinsic_dim, CsvOptions options) {
  std::vector<double> coords;
  std::vector<int> labels;
  Index dims = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    const Index ncoord = static_cast<Index>(fields.size()) - (options.label_column ? 1 : 0);
    if (ncoord < 1) throw ParseError("row has no coordinate columns", line_no);
    if (dims < 0) dims = ncoord;
    if (ncoord != dims)
      throw ParseError("expected " + std::to_string(dims) + " coordinates, found " + std::to_string(ncoord),
                       line_no);
    for (Index c = 0; c < ncoord; ++c) {
      double v;
      if (!parse_number(fields[c], v))
        throw ParseError("invalid number '" + std::string(fields[c]) + "'", line_no);
      if (!std::isfinite(v)) throw ParseError("non-finite coordinate", line_no);
      coords.push_back(v);
    }
    if (options.label_column) {
      int label;
      if (!parse_number(fields.back(), label))
        throw ParseError("invalid integer label '" + std::string(fields.back()) + "'", line_no);
      labels.push_back(label);
    }
  }
  if (dims < 0) throw ParseError("point file contains no data rows", line_no);
  const Index n = static_cast<Index>(coords.size()) / dims;
  PointMatrix pts = Eigen::Map<PointMatrix>(coords.data(), n, dims);
  std::optional<std::vector<int>> lab;
  if (options.label_column) lab = std::move(labels);
  return PointCloud(std::move(pts), intrinsic_dim, std::move(lab));
}

PointCloud load_point_cloud(const std::string& path, int intrinsic_dim, CsvOptions options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file: " + path);
  return parse_point_cloud(in, intrinsic_dim, options);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
  const auto& pts = cloud.points();
  for (Index i = 0; i < pts.rows(); ++i) {
    for (Index c = 0; c < pts.cols(); ++c) {
      if (c) out << ',';
      out << format_double(pts(i, c));
    }
    if (cloud.has_labels()) out << ',' << cloud.labels()[i];
    out << '\n';
  }
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& dist) {
  const Index n = dist.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(dist.values(i, j));
    }
    out << '\n';
  }
}

DistanceMatrix parse_distance_csv(std::istream& in) {
  std::vector<double> vals;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    if (cols < 0) cols = static_cast<Index>(fields.size());
    if (static_cast<Index>(fields.size()) != cols) throw ParseError("ragged distance matrix row", line_no);
    for (auto f : fields) {
      double v;
      if (f == "inf") v = kInfinity;
      else if (!parse_number(f, v)) throw ParseError("invalid number '" + std::string(f) + "'", line_no);
      vals.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("distance file contains no data rows", line_no);
  if (rows != cols) throw InvalidArgument("distance matrix must be square");
  DistanceMatrix out;
  out.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      vals.data(), rows, cols);
  return out;
}

std::string checksum(const Eigen::MatrixXd& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace pwspd
