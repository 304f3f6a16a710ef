#include "tgp/pipeline.hpp"

#include <array>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <thread>

namespace tgp {

namespace {

constexpr std::uint32_t kMagic = 0x54475043;  // "TGPC"
constexpr std::uint16_t kVersion = 1;

// little-endian byte buffer writer/reader
struct Writer {
  std::vector<std::uint8_t> buf;

  void u8(std::uint8_t v) { buf.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct Reader {
  const std::uint8_t* data;
  std::size_t len;
  std::size_t pos{0};

  void need(std::size_t n) const {
    if (pos + n > len) throw CorruptRecord("truncated record");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

void write_sparse(Writer& w, const SparseMatrix& m) {
  w.u64(m.rows);
  w.u64(m.cols);
  w.u64(m.entries.size());
  for (const auto& t : m.entries) {
    w.u64(t.row);
    w.u64(t.col);
    w.f64(t.value);
  }
}

SparseMatrix read_sparse(Reader& r) {
  SparseMatrix m;
  m.rows = r.u64();
  m.cols = r.u64();
  const auto nnz = r.u64();
  m.entries.reserve(nnz);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    Triplet t;
    t.row = r.u64();
    t.col = r.u64();
    t.value = r.f64();
    m.entries.push_back(t);
  }
  return m;
}

void write_select(Writer& w, const SelectOutput& so) {
  w.u64(so.num_nodes);
  w.u64(so.num_clusters);
  w.u8(so.is_sparse() ? 0 : 1);
  if (so.is_sparse()) {
    const auto& e = so.sparse().entries;
    w.u64(e.size());
    for (const auto& a : e) {
      w.u64(a.node);
      w.u64(a.cluster);
      w.f64(a.value);
    }
  } else {
    const auto& s = so.dense().s;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      for (Eigen::Index j = 0; j < s.cols(); ++j) w.f64(s(i, j));
    }
  }
  w.u8(so.kept_nodes ? 1 : 0);
  if (so.kept_nodes) {
    w.u64(so.kept_nodes->size());
    for (auto v : *so.kept_nodes) w.u64(v);
  }
  w.u8(so.extra ? 1 : 0);
  if (so.extra) {
    w.u64(so.extra->size());
    for (double v : *so.extra) w.f64(v);
  }
}

SelectOutput read_select(Reader& r) {
  SelectOutput so;
  so.num_nodes = r.u64();
  so.num_clusters = r.u64();
  const auto tag = r.u8();
  if (tag == 0) {
    SparseAssign sa;
    const auto nnz = r.u64();
    sa.entries.reserve(nnz);
    for (std::uint64_t i = 0; i < nnz; ++i) {
      AssignEntry a;
      a.node = r.u64();
      a.cluster = r.u64();
      a.value = r.f64();
      sa.entries.push_back(a);
    }
    so.repr = std::move(sa);
  } else if (tag == 1) {
    Eigen::MatrixXd s(static_cast<Eigen::Index>(so.num_nodes),
                      static_cast<Eigen::Index>(so.num_clusters));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = r.f64();
    }
    so.repr = DenseAssign{std::move(s)};
  } else {
    throw CorruptRecord("bad assignment tag");
  }
  if (r.u8()) {
    const auto cnt = r.u64();
    std::vector<std::size_t> kept(cnt);
    for (auto& v : kept) v = r.u64();
    so.kept_nodes = std::move(kept);
  }
  if (r.u8()) {
    const auto cnt = r.u64();
    std::vector<double> extra(cnt);
    for (auto& v : extra) v = r.f64();
    so.extra = std::move(extra);
  }
  return so;
}

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) {
    crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

std::uint64_t pooler_fingerprint(const SelectorConfig& cfg, ConnectorKind connector) {
  std::uint64_t h = selector_fingerprint(cfg);
  h ^= static_cast<std::uint64_t>(connector) + 0x9E3779B97F4A7C15ULL;
  h *= 1099511628211ULL;
  return h;
}

std::uint64_t structural_hash(const Graph& g) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix64 = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  mix64(g.num_nodes());
  for (const auto& e : g.edges()) {
    mix64(e.src);
    mix64(e.dst);
    mix64(std::bit_cast<std::uint64_t>(e.weight));
  }
  return h;
}

std::vector<std::uint8_t> serialize_record(const CacheRecord& rec) {
  Writer w;
  w.u64(rec.graph_id);
  w.u64(rec.pooler_fingerprint);
  w.u8(rec.converged ? 1 : 0);
  if (rec.converged) {
    write_select(w, rec.select);
    write_sparse(w, rec.adj_pooled);
  }
  return std::move(w.buf);
}

CacheRecord deserialize_record(const std::uint8_t* data, std::size_t len) {
  Reader r{data, len};
  CacheRecord rec;
  rec.graph_id = r.u64();
  rec.pooler_fingerprint = r.u64();
  rec.converged = r.u8() != 0;
  if (rec.converged) {
    rec.select = read_select(r);
    rec.adj_pooled = read_sparse(r);
  }
  if (r.pos != len) throw CorruptRecord("trailing bytes in record");
  return rec;
}

void write_cache_file(const std::string& path, const std::vector<CacheRecord>& records) {
  Writer header;
  header.u32(kMagic);
  header.u16(kVersion);
  header.u64(records.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(header.buf.data()),
            static_cast<std::streamsize>(header.buf.size()));
  for (const auto& rec : records) {
    const auto payload = serialize_record(rec);
    Writer w;
    w.u64(payload.size());
    w.buf.insert(w.buf.end(), payload.begin(), payload.end());
    w.u32(crc32(payload.data(), payload.size()));
    out.write(reinterpret_cast<const char*>(w.buf.data()),
              static_cast<std::streamsize>(w.buf.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<CacheRecord> read_cache_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Reader r{bytes.data(), bytes.size()};
  if (r.u32() != kMagic) throw CorruptRecord("bad magic");
  if (r.u16() != kVersion) throw CorruptRecord("unsupported version");
  const auto count = r.u64();
  std::vector<CacheRecord> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.u64();
    r.need(len + 4);
    const std::uint8_t* payload = bytes.data() + r.pos;
    r.pos += len;
    const auto stored_crc = r.u32();
    if (crc32(payload, len) != stored_crc) {
      throw CorruptRecord("CRC mismatch in record " + std::to_string(i));
    }
    records.push_back(deserialize_record(payload, len));
  }
  return records;
}

void precoarsen_dataset(const std::vector<Graph>& graphs, const SelectorConfig& sel,
                        ConnectorKind connector, const std::string& path,
                        std::size_t parallelism) {
  const std::uint64_t fp = pooler_fingerprint(sel, connector);
  std::vector<CacheRecord> records(graphs.size());
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= graphs.size()) return;
      CacheRecord rec;
      rec.graph_id = i;
      rec.pooler_fingerprint = fp;
      try {
        rec.select = run_selector(graphs[i], sel);
        if (connector == ConnectorKind::Kron) {
          if (!rec.select.kept_nodes) {
            throw IncompatibleConnector("kron requires a kept-node selector");
          }
          rec.adj_pooled = connect_kron(graphs[i], *rec.select.kept_nodes);
        } else {
          rec.adj_pooled = connect_sparse(graphs[i], rec.select);
        }
      } catch (const NoConvergence&) {
        rec.converged = false;
        rec.select = SelectOutput{};
        rec.select.num_clusters = 1;
        rec.adj_pooled = SparseMatrix{};
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      records[i] = std::move(rec);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, parallelism);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  write_cache_file(path, records);
}

PooledBatch load_and_collate(const std::vector<CacheRecord>& cache,
                             const std::vector<Graph>& graphs,
                             const std::vector<std::size_t>& graph_ids,
                             std::uint64_t expected_fingerprint) {
  std::vector<const Graph*> batch_graphs;
  std::vector<const CacheRecord*> recs;
  for (std::size_t id : graph_ids) {
    const CacheRecord* found = nullptr;
    for (const auto& r : cache) {
      if (r.graph_id == id) {
        found = &r;
        break;
      }
    }
    if (!found) throw MissingRecord("no cache record for graph " + std::to_string(id));
    if (found->pooler_fingerprint != expected_fingerprint) {
      throw StaleCache("fingerprint mismatch for graph " + std::to_string(id));
    }
    if (!found->converged) {
      throw NoConvergence("graph " + std::to_string(id) + " has an N/C record");
    }
    if (id >= graphs.size()) throw MissingRecord("graph id beyond dataset");
    recs.push_back(found);
    batch_graphs.push_back(&graphs[id]);
  }

  PooledBatch out{to_sparse_batch(batch_graphs), {}, {}, {}};

  std::size_t node_off = 0, cluster_off = 0;
  bool sparse_repr = recs.empty() || recs[0]->select.is_sparse();
  std::size_t total_nodes = 0, total_clusters = 0;
  for (const auto* r : recs) {
    total_nodes += r->select.num_nodes;
    total_clusters += r->select.num_clusters;
  }

  SelectOutput block;
  block.num_nodes = total_nodes;
  block.num_clusters = total_clusters;
  SparseAssign sa;
  Eigen::MatrixXd dense_block;
  if (!sparse_repr) {
    dense_block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_nodes),
                                        static_cast<Eigen::Index>(total_clusters));
  }
  std::vector<std::size_t> kept;
  std::vector<double> extra;
  bool any_kept = false, any_extra = false;
  std::vector<Triplet> adj_union;
  std::size_t total_select = 0, total_adj = 0;
  for (const auto* r : recs) {
    if (r->select.is_sparse()) total_select += r->select.sparse().entries.size();
    total_adj += r->adj_pooled.entries.size();
  }
  sa.entries.reserve(total_select);
  adj_union.reserve(total_adj);
  out.batch_pooled.clear();
  out.batch_pooled.reserve(total_clusters);

  for (std::size_t b = 0; b < recs.size(); ++b) {
    const auto& so = recs[b]->select;
    if (so.is_sparse() != sparse_repr) {
      throw StaleCache("mixed assignment representations in one batch");
    }
    if (so.is_sparse()) {
      for (const auto& e : so.sparse().entries) {
        sa.entries.push_back({e.node + node_off, e.cluster + cluster_off, e.value});
      }
    } else {
      dense_block.block(static_cast<Eigen::Index>(node_off),
                        static_cast<Eigen::Index>(cluster_off),
                        static_cast<Eigen::Index>(so.num_nodes),
                        static_cast<Eigen::Index>(so.num_clusters)) = so.dense().s;
    }
    if (so.kept_nodes) {
      any_kept = true;
      for (auto v : *so.kept_nodes) kept.push_back(v + node_off);
    }
    if (so.extra) {
      any_extra = true;
      extra.resize(node_off);
      extra.insert(extra.end(), so.extra->begin(), so.extra->end());
    }
    for (const auto& t : recs[b]->adj_pooled.entries) {
      adj_union.push_back({t.row + cluster_off, t.col + cluster_off, t.value});
    }
    for (std::size_t c = 0; c < so.num_clusters; ++c) out.batch_pooled.push_back(b);
    node_off += so.num_nodes;
    cluster_off += so.num_clusters;
  }

  if (sparse_repr) {
    block.repr = std::move(sa);
  } else {
    block.repr = DenseAssign{std::move(dense_block)};
  }
  if (any_kept) block.kept_nodes = std::move(kept);
  if (any_extra) {
    extra.resize(total_nodes, 0.0);
    block.extra = std::move(extra);
  }
  out.select_block = std::move(block);
  // Each record's entries are sorted and coalesced and the cluster offsets are
  // strictly increasing, so the concatenation is already in canonical order.
  out.adj_pooled_union = SparseMatrix{total_clusters, total_clusters, std::move(adj_union)};
  return out;
}

CachedPooler::CachedPooler(SelectorConfig cfg, ConnectorKind connector, ReduceOp aggr)
    : cfg_(std::move(cfg)), connector_(connector), aggr_(aggr) {}

PoolingOutput CachedPooler::pool(const Graph& g) {
  const std::uint64_t h = structural_hash(g);
  SelectOutput so;
  SparseMatrix adj;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (cached_hash_ && *cached_hash_ == h) {
      so = cached_select_;
      adj = cached_adj_;
    } else {
      ++select_calls_;
      so = run_selector(g, cfg_);
      if (connector_ == ConnectorKind::Kron) {
        if (!so.kept_nodes) {
          throw IncompatibleConnector("kron requires a kept-node selector");
        }
        adj = connect_kron(g, *so.kept_nodes);
      } else {
        adj = connect_sparse(g, so);
      }
      cached_hash_ = h;
      cached_select_ = so;
      cached_adj_ = adj;
    }
  }
  return pool_with_precomputed(g, so, std::move(adj), aggr_);
}

std::size_t CachedPooler::select_invocations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return select_calls_;
}

}  // namespace tgp
