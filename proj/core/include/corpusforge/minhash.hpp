#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "corpusforge/doc_id.hpp"

namespace corpusforge {

/// Set of 64-bit hashes of character n-grams over canonicalized text
/// (NFKC, collapsed whitespace, case-folded). Stored sorted and unique.
struct ShingleSet {
  std::vector<std::uint64_t> hashes;

  std::size_t size() const { return hashes.size(); }
};

/// Hashes all length-n scalar windows (stride 1) of already-canonicalized
/// text. Throws TooShort when the text has fewer than n scalar values.
ShingleSet shingle_text(std::string_view canonical_text, unsigned n);

struct MinHashParams {
  std::uint16_t k = 128;   // signature length
  std::uint16_t ngram = 5; // shingle width in characters
  std::uint64_t seed = 0;

  std::uint64_t params_id() const;
};

struct MinHashSignature {
  std::vector<std::uint64_t> values;
  std::uint64_t params_id = 0;
};

/// values[i] = min over shingles of h_i(shingle), where h_i is a bijective
/// 64-bit mix keyed on (seed, i). Deterministic in (set, params).
MinHashSignature minhash_signature(const ShingleSet& s, const MinHashParams& params);

/// Coordinate agreement rate; the standard unbiased Jaccard estimator.
/// Throws ParamsMismatch when the signatures are not comparable.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// |a∩b| / |a∪b|; 1.0 when both sets are empty.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

struct BandKey {
  std::uint32_t band = 0;
  std::uint64_t hash = 0;

  bool operator==(const BandKey&) const = default;
};

/// Splits a signature into b bands of r rows and hashes each band.
/// Two documents are duplicate candidates iff they share any band key.
/// Throws BandShapeError unless b*r equals the signature length.
std::vector<BandKey> band_partition(const MinHashSignature& sig, unsigned b, unsigned r);

struct SignatureRecord {
  DocId id;
  MinHashSignature sig;
};

struct CandidateStats {
  std::uint64_t buckets = 0;
  std::uint64_t oversized_buckets = 0;  // buckets past the warn cap, still expanded
  std::uint64_t largest_bucket = 0;
};

/// All within-bucket pairs over the banded signature table, deduplicated.
/// Pairs are (i, j) indices into docs with i < j.
std::vector<std::pair<std::uint32_t, std::uint32_t>> build_candidate_pairs(
    std::span<const SignatureRecord> docs, unsigned b, unsigned r,
    std::size_t bucket_warn_cap = 5000, CandidateStats* stats = nullptr);

enum class DedupMode { approx, verify };

/// Disjoint-set partition of documents into near-duplicate clusters.
/// The survivor of each cluster is its minimum doc id.
class DuplicateClusters {
 public:
  explicit DuplicateClusters(std::vector<DocId> docs);

  void merge(std::size_t a, std::size_t b);
  std::size_t find(std::size_t i) const;

  const std::vector<DocId>& docs() const { return docs_; }

  /// Clusters with 1+ members, each sorted ascending (survivor first);
  /// cluster list sorted by survivor. Deterministic regardless of merge order.
  std::vector<std::vector<DocId>> clusters() const;

  std::vector<DocId> survivors() const;

 private:
  std::vector<DocId> docs_;
  mutable std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Unions candidate pairs into clusters. approx mode unions every pair;
/// verify mode unions only pairs whose exact Jaccard reaches the threshold
/// and requires the shingle sets (MissingShingles otherwise).
DuplicateClusters cluster_duplicates(std::vector<DocId> docs,
                                     std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs,
                                     DedupMode mode, double threshold,
                                     const std::vector<ShingleSet>* shingles);

std::vector<DocId> select_survivors(const DuplicateClusters& clusters);

// Signature file: binary little-endian. Header: magic "MHSG", version u16,
// k u16, n u16, seed u64. Per document: u32 byte length + UTF-8 doc id,
// then k u64 signature values.
void write_signature_file(const std::filesystem::path& path, const MinHashParams& params,
                          std::span<const SignatureRecord> records);
std::vector<SignatureRecord> read_signature_file(const std::filesystem::path& path,
                                                 MinHashParams* params_out = nullptr);

}  // namespace corpusforge
