#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tgp/rcl.hpp"

namespace tgp {

/// Serialized Select+Connect result for one graph; the unit of the TGPC
/// cache format. converged == false marks an N/C outcome.
struct CacheRecord {
  std::uint64_t graph_id{0};
  std::uint64_t pooler_fingerprint{0};
  bool converged{true};
  SelectOutput select;
  SparseMatrix adj_pooled;
};

/// Mini-batch of pre-coarsened graphs: disjoint-union base graph plus a
/// block-diagonal assignment and the union of pooled adjacencies.
struct PooledBatch {
  SparseBatch base;
  SelectOutput select_block;
  SparseMatrix adj_pooled_union;
  std::vector<std::size_t> batch_pooled;  // length = sum of K_b
};

std::uint64_t pooler_fingerprint(const SelectorConfig& cfg, ConnectorKind connector);

/// 64-bit FNV-1a over the graph topology (N and sorted edge triples).
std::uint64_t structural_hash(const Graph& g);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

// ---- TGPC file format --------------------------------------------------
// magic u32 0x54475043, version u16, record count u64, then per record a
// u64 length prefix, the payload, and a u32 CRC of the payload. All integers
// little-endian, reals 64-bit IEEE-754 little-endian.

void write_cache_file(const std::string& path, const std::vector<CacheRecord>& records);
std::vector<CacheRecord> read_cache_file(const std::string& path);

std::vector<std::uint8_t> serialize_record(const CacheRecord& rec);
CacheRecord deserialize_record(const std::uint8_t* data, std::size_t len);

/// Runs Select and Connect on every graph and writes one record per graph,
/// in graph order regardless of worker scheduling. NMF non-convergence is
/// stored as an explicit N/C record.
void precoarsen_dataset(const std::vector<Graph>& graphs, const SelectorConfig& sel,
                        ConnectorKind connector, const std::string& path,
                        std::size_t parallelism = 1);

/// Assembles the requested records into a PooledBatch. graphs must be the
/// full dataset the cache was built from (indexed by graph id).
PooledBatch load_and_collate(const std::vector<CacheRecord>& cache,
                             const std::vector<Graph>& graphs,
                             const std::vector<std::size_t>& graph_ids,
                             std::uint64_t expected_fingerprint);

/// Single-slot in-memory cache for one static graph: the first call runs
/// Select and Connect, later calls with the same topology run only Reduce.
class CachedPooler {
 public:
  CachedPooler(SelectorConfig cfg, ConnectorKind connector,
               ReduceOp aggr = ReduceOp::Mean);

  PoolingOutput pool(const Graph& g);

  std::size_t select_invocations() const;

 private:
  SelectorConfig cfg_;
  ConnectorKind connector_;
  ReduceOp aggr_;
  mutable std::mutex mu_;
  std::optional<std::uint64_t> cached_hash_;
  SelectOutput cached_select_;
  SparseMatrix cached_adj_;
  std::size_t select_calls_{0};
};

}  // namespace tgp
