#include "tgp/objectives.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tgp {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// S^T A S trace and A S product from an edge list.
struct CutPieces {
  double trace_num{0.0};   // Tr(S^T A S)
  double trace_den{0.0};   // Tr(S^T D S)
  Eigen::MatrixXd as;      // A S
  Eigen::VectorXd deg;
};

CutPieces cut_pieces(const Eigen::MatrixXd& s, const std::vector<Triplet>& adj,
                     std::size_t n) {
  CutPieces p;
  p.as = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  p.deg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& t : adj) {
    const auto i = static_cast<Eigen::Index>(t.row);
    const auto j = static_cast<Eigen::Index>(t.col);
    p.as.row(i) += t.value * s.row(j);
    p.deg(i) += t.value;
    p.trace_num += t.value * s.row(i).dot(s.row(j));
  }
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    p.trace_den += p.deg(i) * s.row(i).squaredNorm();
  }
  return p;
}

LossValue cut_ratio_loss(const std::string& name, const Eigen::MatrixXd& s,
                         const std::vector<Triplet>& adj, std::size_t n) {
  CutPieces p = cut_pieces(s, adj, n);
  if (p.trace_den == 0.0) throw ZeroDegreeTrace(name + ": zero degree trace");
  LossValue lv{name, -p.trace_num / p.trace_den, {}};
  Eigen::MatrixXd ds = p.deg.asDiagonal() * s;
  lv.grad_s = (-2.0 / p.trace_den) * p.as +
              (2.0 * p.trace_num / (p.trace_den * p.trace_den)) * ds;
  return lv;
}

std::vector<Triplet> edge_triplets(const Graph& g) {
  std::vector<Triplet> tr;
  tr.reserve(g.num_edges());
  for (const auto& e : g.edges()) tr.push_back({e.src, e.dst, e.weight});
  return tr;
}

}  // namespace

LossValue loss_mincut_cut(const Eigen::MatrixXd& s, const Graph& g) {
  return cut_ratio_loss("mincut-cut", s, edge_triplets(g), g.num_nodes());
}

LossValue loss_mincut_ortho(const Eigen::MatrixXd& s) {
  const auto k = s.cols();
  const Eigen::MatrixXd m = s.transpose() * s;
  const double mnorm = m.norm();
  const Eigen::MatrixXd gmat =
      m / mnorm - Eigen::MatrixXd::Identity(k, k) / std::sqrt(static_cast<double>(k));
  const double value = gmat.norm();
  LossValue lv{"mincut-ortho", value, Eigen::MatrixXd::Zero(s.rows(), k)};
  if (value > 0.0) {
    const double gm = (gmat.array() * m.array()).sum();
    const Eigen::MatrixXd p =
        (gmat / mnorm - (gm / (mnorm * mnorm * mnorm)) * m) / value;
    lv.grad_s = 2.0 * s * p;
  }
  return lv;
}

LossValue loss_dmon_mod(const Eigen::MatrixXd& s, const Graph& g) {
  const double two_m = std::accumulate(g.degrees().begin(), g.degrees().end(), 0.0);
  if (two_m == 0.0) throw ZeroEdges("dmon-mod on an edgeless graph");
  Eigen::VectorXd d(static_cast<Eigen::Index>(g.num_nodes()));
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    d(static_cast<Eigen::Index>(i)) = g.degree(i);
  }
  Eigen::MatrixXd as = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  double tr_as = 0.0;
  for (const auto& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.src);
    const auto j = static_cast<Eigen::Index>(e.dst);
    as.row(i) += e.weight * s.row(j);
    tr_as += e.weight * s.row(i).dot(s.row(j));
  }
  const Eigen::RowVectorXd dts = d.transpose() * s;
  const double value = -(tr_as - dts.squaredNorm() / two_m) / two_m;
  LossValue lv{"dmon-mod", value, {}};
  lv.grad_s = -(2.0 / two_m) * (as - d * dts / two_m);
  return lv;
}

LossValue loss_dmon_collapse(const Eigen::MatrixXd& s) {
  const double n = static_cast<double>(s.rows());
  const double k = static_cast<double>(s.cols());
  const Eigen::RowVectorXd c = s.colwise().sum();
  const double cnorm = c.norm();
  LossValue lv{"dmon-collapse", std::sqrt(k) / n * cnorm - 1.0,
               Eigen::MatrixXd::Zero(s.rows(), s.cols())};
  if (cnorm > 0.0) {
    lv.grad_s.rowwise() = (std::sqrt(k) / (n * cnorm)) * c;
  }
  return lv;
}

LossValue loss_diff_lp(const Eigen::MatrixXd& s, const Graph& g) {
  const double n = static_cast<double>(s.rows());
  const Eigen::MatrixXd r = g.dense_adjacency() - s * s.transpose();
  const double rnorm = r.norm();
  LossValue lv{"diff-lp", rnorm / (n * n), Eigen::MatrixXd::Zero(s.rows(), s.cols())};
  if (rnorm > 0.0) {
    lv.grad_s = -2.0 * r * s / (n * n * rnorm);
  }
  return lv;
}

LossValue loss_diff_ent(const Eigen::MatrixXd& s) {
  const double n = static_cast<double>(s.rows());
  LossValue lv{"diff-ent", 0.0, Eigen::MatrixXd::Zero(s.rows(), s.cols())};
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
      const double v = s(i, k);
      if (v > 0.0) {
        lv.value -= v * std::log(v) / n;
        lv.grad_s(i, k) = -(std::log(v) + 1.0) / n;
      }
    }
  }
  return lv;
}

LossValue loss_justbalance(const Eigen::MatrixXd& s) {
  const double n = static_cast<double>(s.rows());
  const double k = static_cast<double>(s.cols());
  const Eigen::MatrixXd m = s.transpose() * s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const double trace_sqrt = lam.array().sqrt().sum();
  const double norm = std::sqrt(n * k);
  LossValue lv{"justbalance", -trace_sqrt / norm, {}};
  // grad = -S M^{-1/2} / sqrt(NK), eigenvalues clamped away from zero
  const Eigen::VectorXd inv_sqrt =
      lam.array().max(1e-12).sqrt().inverse().matrix();
  const Eigen::MatrixXd m_inv_sqrt = eig.eigenvectors() * inv_sqrt.asDiagonal() *
                                     eig.eigenvectors().transpose();
  lv.grad_s = -s * m_inv_sqrt / norm;
  return lv;
}

LossValue loss_tv(const Eigen::MatrixXd& s, const Graph& g) {
  const double vol = std::accumulate(g.degrees().begin(), g.degrees().end(), 0.0);
  LossValue lv{"tv", 0.0, Eigen::MatrixXd::Zero(s.rows(), s.cols())};
  if (vol == 0.0) return lv;
  for (const auto& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.src);
    const auto j = static_cast<Eigen::Index>(e.dst);
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      const double diff = s(i, c) - s(j, c);
      lv.value += e.weight * std::abs(diff);
      const double gsign = e.weight * sgn(diff);
      lv.grad_s(i, c) += gsign;
      lv.grad_s(j, c) -= gsign;
    }
  }
  lv.value /= 2.0 * vol;
  lv.grad_s /= 2.0 * vol;
  return lv;
}

LossValue loss_asym_balance(const Eigen::MatrixXd& s) {
  const double n = static_cast<double>(s.rows());
  const double k = static_cast<double>(s.cols());
  if (k < 2.0) throw InvalidConfig("asym-balance requires K >= 2");
  const double scale = 1.0 / (n * (k - 1.0));  // K/(N(K-1)) * 1/K
  const Eigen::RowVectorXd mean = s.colwise().mean();
  double total = 0.0;
  Eigen::MatrixXd signs(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      const double diff = s(i, c) - mean(c);
      total += std::abs(diff);
      signs(i, c) = sgn(diff);
    }
  }
  LossValue lv{"asym-balance", 1.0 - scale * total, {}};
  const Eigen::RowVectorXd colsign = signs.colwise().sum();
  lv.grad_s = -scale * signs;
  lv.grad_s.rowwise() += (scale / n) * colsign;
  return lv;
}

LossValue loss_hosc_cut(const Eigen::MatrixXd& s, const Graph& g, double alpha) {
  if (g.num_edges() / 2 > 50000) {
    throw GraphTooLarge("hosc-cut rejects graphs above 50k edges");
  }
  std::vector<Triplet> adj;
  adj.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    if (e.src == e.dst) {
      adj.push_back({e.src, e.dst, alpha * e.weight});
      continue;
    }
    // triangles through (src,dst) = common neighbors, excluding the endpoints
    auto a = g.neighbors(e.src);
    auto b = g.neighbors(e.dst);
    std::size_t ia = 0, ib = 0, common = 0;
    while (ia < a.size() && ib < b.size()) {
      if (a[ia].dst == b[ib].dst) {
        if (a[ia].dst != e.src && a[ia].dst != e.dst) ++common;
        ++ia;
        ++ib;
      } else if (a[ia].dst < b[ib].dst) {
        ++ia;
      } else {
        ++ib;
      }
    }
    adj.push_back({e.src, e.dst,
                   alpha * e.weight + (1.0 - alpha) * static_cast<double>(common)});
  }
  LossValue lv = cut_ratio_loss("hosc-cut", s, adj, g.num_nodes());
  return lv;
}

Eigen::MatrixXd softmax_chain(const Eigen::MatrixXd& grad_s, const Eigen::MatrixXd& s) {
  Eigen::MatrixXd out(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double dot = s.row(i).dot(grad_s.row(i));
    out.row(i) = s.row(i).array() * (grad_s.row(i).array() - dot);
  }
  return out;
}

const std::vector<std::string>& loss_names() {
  static const std::vector<std::string> names = {
      "mincut-cut", "mincut-ortho", "dmon-mod",  "dmon-collapse", "diff-lp",
      "diff-ent",   "justbalance",  "tv",        "asym-balance",  "hosc-cut"};
  return names;
}

LossValue evaluate_loss(const std::string& name, const Eigen::MatrixXd& s,
                        const Graph& g) {
  if (name == "mincut-cut") return loss_mincut_cut(s, g);
  if (name == "mincut-ortho") return loss_mincut_ortho(s);
  if (name == "dmon-mod") return loss_dmon_mod(s, g);
  if (name == "dmon-collapse") return loss_dmon_collapse(s);
  if (name == "diff-lp") return loss_diff_lp(s, g);
  if (name == "diff-ent") return loss_diff_ent(s);
  if (name == "justbalance") return loss_justbalance(s);
  if (name == "tv") return loss_tv(s, g);
  if (name == "asym-balance") return loss_asym_balance(s);
  if (name == "hosc-cut") return loss_hosc_cut(s, g);
  throw UnknownLoss("unknown loss: " + name);
}

ObjectiveSpec ObjectiveSpec::parse(const std::string& text) {
  ObjectiveSpec spec;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    std::string name = item.substr(0, colon);
    double weight = 1.0;
    if (colon != std::string::npos) {
      std::istringstream ws(item.substr(colon + 1));
      if (!(ws >> weight) || !std::isfinite(weight)) {
        throw InvalidConfig("bad weight in objective term: " + item);
      }
    }
    spec.terms.emplace_back(std::move(name), weight);
  }
  spec.validate();
  return spec;
}

void ObjectiveSpec::validate() const {
  if (terms.empty()) throw InvalidConfig("objective needs at least one term");
  const auto& names = loss_names();
  for (const auto& [name, weight] : terms) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw UnknownLoss("unknown loss: " + name);
    }
    if (!std::isfinite(weight)) throw InvalidConfig("non-finite weight");
  }
}

std::string ObjectiveSpec::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out << ',';
    out << terms[i].first << ':' << terms[i].second;
  }
  return out.str();
}

}  // namespace tgp
