#include "tgp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tgp {

namespace {

// Line-oriented reader; `#` starts a comment, blank lines are skipped.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) return true;
    }
    return false;
  }

  std::istringstream require(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(std::string("unexpected end of input reading ") + what);
    return std::istringstream(line);
  }

 private:
  std::istream& in_;
};

template <typename T>
T field(std::istringstream& ss, const char* what) {
  T v;
  if (!(ss >> v)) throw ParseError(std::string("bad or missing field: ") + what);
  return v;
}

}  // namespace

Graph read_graph(std::istream& in) {
  LineReader lr(in);
  auto header = lr.require("header");
  const auto n = field<std::size_t>(header, "N");
  const auto m = field<std::size_t>(header, "M");
  const auto f = field<std::size_t>(header, "F");
  std::size_t label_flag = 0;
  header >> label_flag;  // optional

  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto line = lr.require("edge");
    Edge e;
    e.src = field<std::size_t>(line, "edge src");
    e.dst = field<std::size_t>(line, "edge dst");
    e.weight = field<double>(line, "edge weight");
    edges.push_back(e);
  }

  Eigen::MatrixXd feat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  if (f > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      auto line = lr.require("feature row");
      for (std::size_t j = 0; j < f; ++j) {
        feat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            field<double>(line, "feature");
      }
    }
  }

  std::optional<std::vector<int>> labels;
  if (label_flag != 0) {
    labels.emplace();
    labels->reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto line = lr.require("label");
      labels->push_back(field<int>(line, "label"));
    }
  }
  return Graph(n, std::move(edges), std::move(feat), std::move(labels));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << ' ' << g.feature_dim() << ' '
      << (g.labels() ? 1 : 0) << '\n';
  out << std::setprecision(17);
  for (const auto& e : g.edges()) {
    out << e.src << ' ' << e.dst << ' ' << e.weight << '\n';
  }
  for (std::size_t i = 0; i < g.num_nodes() && g.feature_dim() > 0; ++i) {
    for (std::size_t j = 0; j < g.feature_dim(); ++j) {
      if (j) out << ' ';
      out << g.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    out << '\n';
  }
  if (g.labels()) {
    for (int l : *g.labels()) out << l << '\n';
  }
}

void write_graph_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_graph(out, g);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace tgp
