#include "subgcn/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "subgcn/errors.hpp"

namespace subgcn {

namespace {

// Reads whitespace-separated tokens line by line, reporting file:line on error.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  // Next non-empty line split into tokens; false at end of file.
  bool next(std::vector<std::string_view>& tokens) {
    tokens.clear();
    while (std::getline(in_, line_)) {
      ++line_no_;
      std::size_t i = 0;
      while (i < line_.size()) {
        while (i < line_.size() && (line_[i] == ' ' || line_[i] == '\t' || line_[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line_.size() && line_[j] != ' ' && line_[j] != '\t' && line_[j] != '\r') ++j;
        if (j > i) tokens.emplace_back(line_.data() + i, j - i);
        i = j;
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(path_.filename().string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  template <typename T>
  T parse(std::string_view token, const char* what) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail(std::string("invalid ") + what + " '" + std::string(token) + "'");
    }
    return value;
  }

  void expect_count(const std::vector<std::string_view>& tokens, std::size_t n, const char* what) const {
    if (tokens.size() != n) {
      fail(std::string(what) + ": expected " + std::to_string(n) + " fields, found " + std::to_string(tokens.size()));
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void append_double(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("write failed for " + path.string());
}

Graph read_graph(const std::filesystem::path& path, bool self_loops) {
  LineReader in(path);
  std::vector<std::string_view> t;
  if (!in.next(t)) in.fail("missing header");
  in.expect_count(t, 2, "header");
  const auto num_nodes = in.parse<NodeId>(t[0], "node count");
  const auto num_edges = in.parse<std::uint64_t>(t[1], "edge count");
  if (num_nodes == 0) in.fail("graph has no nodes");

  std::vector<Edge> edges;
  edges.reserve(num_edges);
  while (in.next(t)) {
    in.expect_count(t, 2, "edge");
    const Edge e{in.parse<NodeId>(t[0], "node id"), in.parse<NodeId>(t[1], "node id")};
    if (e.u >= num_nodes || e.v >= num_nodes) in.fail("node id out of range");
    if (e.u >= e.v) in.fail("edge must satisfy u < v");
    if (!edges.empty() && (e.u < edges.back().u || (e.u == edges.back().u && e.v <= edges.back().v))) {
      in.fail("edges must be unique and in ascending order");
    }
    edges.push_back(e);
  }
  if (edges.size() != num_edges) {
    in.fail("header declares " + std::to_string(num_edges) + " edges, body has " + std::to_string(edges.size()));
  }
  return Graph::build(edges, num_nodes, self_loops);
}

Matrix read_features(const std::filesystem::path& path, NodeId num_nodes) {
  LineReader in(path);
  std::vector<std::string_view> t;
  if (!in.next(t)) in.fail("missing header");
  in.expect_count(t, 2, "header");
  const auto rows = in.parse<std::uint64_t>(t[0], "row count");
  const auto dim = in.parse<std::uint64_t>(t[1], "feature dim");
  if (rows != num_nodes) in.fail("feature rows " + std::to_string(rows) + " != node count " + std::to_string(num_nodes));
  if (dim == 0) in.fail("feature dim must be positive");
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < rows; ++i) {
    if (!in.next(t)) in.fail("missing feature row " + std::to_string(i));
    in.expect_count(t, dim, "feature row");
    for (std::uint64_t j = 0; j < dim; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = in.parse<double>(t[j], "feature value");
    }
  }
  if (in.next(t)) in.fail("trailing data after last feature row");
  return x;
}

void read_labels(const std::filesystem::path& path, NodeId num_nodes, Dataset& ds) {
  LineReader in(path);
  std::vector<std::string_view> t;
  if (!in.next(t)) in.fail("missing header");
  in.expect_count(t, 2, "header");
  if (t[0] == "single") {
    ds.mode = LabelMode::Single;
  } else if (t[0] == "multi") {
    ds.mode = LabelMode::Multi;
  } else {
    in.fail("label mode must be 'single' or 'multi'");
  }
  ds.num_classes = in.parse<std::uint32_t>(t[1], "class count");
  if (ds.num_classes == 0) in.fail("class count must be positive");
  const auto classes = static_cast<Eigen::Index>(ds.num_classes);
  ds.targets = Matrix::Zero(num_nodes, classes);
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (!in.next(t)) in.fail("missing label row " + std::to_string(v));
    if (ds.mode == LabelMode::Single) {
      if (t.size() != 1) in.fail("single-label row must hold exactly one class id (label mode mismatch?)");
      const auto c = in.parse<std::uint32_t>(t[0], "class id");
      if (c >= ds.num_classes) in.fail("class id " + std::to_string(c) + " >= class count");
      ds.targets(v, c) = 1.0;
    } else {
      if (t.size() != ds.num_classes) in.fail("multi-label row must hold num_classes 0/1 values (label mode mismatch?)");
      for (Eigen::Index c = 0; c < classes; ++c) {
        const auto bit = in.parse<int>(t[static_cast<std::size_t>(c)], "label bit");
        if (bit != 0 && bit != 1) in.fail("label bits must be 0 or 1");
        ds.targets(v, c) = bit;
      }
    }
  }
  if (in.next(t)) in.fail("trailing data after last label row");
}

std::vector<Split> read_split(const std::filesystem::path& path, NodeId num_nodes) {
  LineReader in(path);
  std::vector<std::string_view> t;
  std::vector<Split> split;
  split.reserve(num_nodes);
  while (in.next(t)) {
    in.expect_count(t, 1, "split");
    const auto tag = in.parse<int>(t[0], "split tag");
    if (tag < 0 || tag > 2) in.fail("split tag must be 0, 1 or 2");
    if (split.size() == num_nodes) in.fail("more split tags than nodes");
    split.push_back(static_cast<Split>(tag));
  }
  if (split.size() != num_nodes) {
    in.fail("expected " + std::to_string(num_nodes) + " split tags, found " + std::to_string(split.size()));
  }
  return split;
}

}  // namespace

void Dataset::validate() const {
  const auto n = static_cast<Eigen::Index>(graph.num_nodes());
  if (features.rows() != n) throw DataError("features have " + std::to_string(features.rows()) + " rows for " +
                                            std::to_string(n) + " nodes");
  if (targets.rows() != n || targets.cols() != static_cast<Eigen::Index>(num_classes)) {
    throw DataError("targets shape does not match node and class counts");
  }
  if (split.size() != graph.num_nodes()) throw DataError("split size does not match node count");
  for (Eigen::Index i = 0; i < n; ++i) {
    double ones = 0.0;
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
      const double y = targets(i, c);
      if (y != 0.0 && y != 1.0) throw DataError("targets must be 0/1");
      ones += y;
    }
    if (mode == LabelMode::Single && ones != 1.0) throw DataError("single-label row " + std::to_string(i) + " is not one-hot");
  }
  bool has_train = false;
  for (Split s : split) has_train = has_train || s == Split::Train;
  if (!has_train) throw DataError("split has no training nodes");
}

std::vector<NodeId> Dataset::nodes_in(Split which) const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < split.size(); ++v) {
    if (split[v] == which) out.push_back(v);
  }
  return out;
}

std::vector<std::uint8_t> Dataset::mask(Split which) const {
  std::vector<std::uint8_t> out(split.size());
  for (std::size_t v = 0; v < split.size(); ++v) out[v] = split[v] == which ? 1 : 0;
  return out;
}

Matrix one_hot(std::span<const std::uint32_t> labels, std::uint32_t num_classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) throw std::out_of_range("class id out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

Dataset load_dataset(const std::filesystem::path& dir, bool self_loops) {
  Dataset ds;
  ds.graph = read_graph(dir / "graph.txt", self_loops);
  ds.features = read_features(dir / "features.txt", ds.graph.num_nodes());
  read_labels(dir / "labels.txt", ds.graph.num_nodes(), ds);
  ds.split = read_split(dir / "split.txt", ds.graph.num_nodes());
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  ds.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  const Graph& g = ds.graph;
  std::string out;
  std::size_t plain_edges = 0;
  for (const Edge& e : g.edges()) plain_edges += e.u != e.v ? 1 : 0;
  out += std::to_string(g.num_nodes()) + " " + std::to_string(plain_edges) + "\n";
  for (const Edge& e : g.edges()) {
    if (e.u != e.v) out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  }
  write_file(dir / "graph.txt", out);

  out.clear();
  out += std::to_string(ds.features.rows()) + " " + std::to_string(ds.features.cols()) + "\n";
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      if (j > 0) out += ' ';
      append_double(out, ds.features(i, j));
    }
    out += '\n';
  }
  write_file(dir / "features.txt", out);

  out.clear();
  out += std::string(ds.mode == LabelMode::Single ? "single" : "multi") + " " + std::to_string(ds.num_classes) + "\n";
  for (Eigen::Index i = 0; i < ds.targets.rows(); ++i) {
    if (ds.mode == LabelMode::Single) {
      Eigen::Index c = 0;
      ds.targets.row(i).maxCoeff(&c);
      out += std::to_string(c) + "\n";
    } else {
      for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) {
        if (c > 0) out += ' ';
        out += ds.targets(i, c) > 0.5 ? '1' : '0';
      }
      out += '\n';
    }
  }
  write_file(dir / "labels.txt", out);

  out.clear();
  for (Split s : ds.split) out += std::to_string(static_cast<int>(s)) + "\n";
  write_file(dir / "split.txt", out);
}

}  // namespace subgcn
