#include "corpusforge/minhash.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "corpusforge/errors.hpp"
#include "corpusforge/hashing.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

ShingleSet shingle_text(std::string_view canonical_text, unsigned n) {
  if (n < 2) throw TooShort("shingle width must be at least 2");
  std::u32string cps = decode_utf8(canonical_text);
  if (cps.size() < n) {
    throw TooShort("text shorter than shingle width (" + std::to_string(cps.size()) + " < " +
                   std::to_string(n) + ")");
  }
  ShingleSet out;
  out.hashes.reserve(cps.size() - n + 1);
  for (std::size_t i = 0; i + n <= cps.size(); ++i) {
    std::string_view window(reinterpret_cast<const char*>(cps.data() + i), n * sizeof(char32_t));
    out.hashes.push_back(hash_bytes64(window));
  }
  std::sort(out.hashes.begin(), out.hashes.end());
  out.hashes.erase(std::unique(out.hashes.begin(), out.hashes.end()), out.hashes.end());
  return out;
}

std::uint64_t MinHashParams::params_id() const {
  return hash_combine64(hash_combine64(k, ngram), mix64(seed ^ 0x4d485347ULL));  // "MHSG"
}

MinHashSignature minhash_signature(const ShingleSet& s, const MinHashParams& params) {
  if (params.k == 0) throw ParamsMismatch("signature length k must be >= 1");
  MinHashSignature sig;
  sig.params_id = params.params_id();
  sig.values.assign(params.k, std::numeric_limits<std::uint64_t>::max());

  // Per-coordinate salts derived once from the seed; h_i(x) = mix64(x ^ salt_i)
  // is a bijection on u64, i.e. a deterministic permutation per coordinate.
  std::vector<std::uint64_t> salts(params.k);
  SplitMix64 gen(params.seed);
  for (auto& salt : salts) salt = gen.next();

  for (std::uint64_t shingle : s.hashes) {
    for (std::size_t i = 0; i < salts.size(); ++i) {
      std::uint64_t h = mix64(shingle ^ salts[i]);
      if (h < sig.values[i]) sig.values[i] = h;
    }
  }
  return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.params_id != b.params_id || a.values.size() != b.values.size()) {
    throw ParamsMismatch("signatures built with different parameters");
  }
  if (a.values.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] == b.values[i]) ++agree;
  }
  return double(agree) / double(a.values.size());
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.hashes.empty() && b.hashes.empty()) return 1.0;
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.hashes.size() && j < b.hashes.size()) {
    if (a.hashes[i] == b.hashes[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a.hashes[i] < b.hashes[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  std::size_t uni = a.hashes.size() + b.hashes.size() - inter;
  return double(inter) / double(uni);
}

std::vector<BandKey> band_partition(const MinHashSignature& sig, unsigned b, unsigned r) {
  if (b == 0 || r == 0 || std::size_t(b) * r != sig.values.size()) {
    throw BandShapeError("bands*rows (" + std::to_string(b) + "*" + std::to_string(r) +
                         ") must equal signature length " + std::to_string(sig.values.size()));
  }
  std::vector<BandKey> keys(b);
  for (unsigned band = 0; band < b; ++band) {
    std::string_view rows(reinterpret_cast<const char*>(sig.values.data() + std::size_t(band) * r),
                          std::size_t(r) * sizeof(std::uint64_t));
    keys[band] = BandKey{band, hash_bytes64(rows)};
  }
  return keys;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> build_candidate_pairs(
    std::span<const SignatureRecord> docs, unsigned b, unsigned r, std::size_t bucket_warn_cap,
    CandidateStats* stats) {
  CandidateStats local;
  std::unordered_set<std::uint64_t> pair_set;

  // One bucket table per band; keys from different bands never mix.
  for (unsigned band = 0; band < b; ++band) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve(docs.size() * 2);
    for (std::uint32_t i = 0; i < docs.size(); ++i) {
      const auto& sig = docs[i].sig;
      if (std::size_t(b) * r != sig.values.size()) {
        throw BandShapeError("bands*rows must equal signature length");
      }
      std::string_view rows(reinterpret_cast<const char*>(sig.values.data() + std::size_t(band) * r),
                            std::size_t(r) * sizeof(std::uint64_t));
      buckets[hash_bytes64(rows)].push_back(i);
    }
    for (const auto& [key, members] : buckets) {
      (void)key;
      if (members.size() < 2) continue;
      ++local.buckets;
      local.largest_bucket = std::max<std::uint64_t>(local.largest_bucket, members.size());
      if (members.size() > bucket_warn_cap) ++local.oversized_buckets;
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          std::uint32_t lo = std::min(members[x], members[y]);
          std::uint32_t hi = std::max(members[x], members[y]);
          pair_set.insert((std::uint64_t(lo) << 32) | hi);
        }
      }
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(pair_set.size());
  for (std::uint64_t packed : pair_set) {
    pairs.emplace_back(std::uint32_t(packed >> 32), std::uint32_t(packed & 0xffffffffu));
  }
  std::sort(pairs.begin(), pairs.end());
  if (stats) *stats = local;
  return pairs;
}

DuplicateClusters::DuplicateClusters(std::vector<DocId> docs) : docs_(std::move(docs)) {
  parent_.resize(docs_.size());
  std::iota(parent_.begin(), parent_.end(), 0);
  size_.assign(docs_.size(), 1);
}

std::size_t DuplicateClusters::find(std::size_t i) const {
  std::uint32_t root = static_cast<std::uint32_t>(i);
  while (parent_[root] != root) root = parent_[root];
  // Path compression; the partition itself is unaffected.
  std::uint32_t walk = static_cast<std::uint32_t>(i);
  while (parent_[walk] != root) {
    std::uint32_t next = parent_[walk];
    parent_[walk] = root;
    walk = next;
  }
  return root;
}

void DuplicateClusters::merge(std::size_t a, std::size_t b) {
  std::uint32_t ra = static_cast<std::uint32_t>(find(a));
  std::uint32_t rb = static_cast<std::uint32_t>(find(b));
  if (ra == rb) return;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] += size_[rb];
}

std::vector<std::vector<DocId>> DuplicateClusters::clusters() const {
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_root;
  by_root.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    by_root[static_cast<std::uint32_t>(find(i))].push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::vector<DocId>> out;
  out.reserve(by_root.size());
  for (auto& [root, members] : by_root) {
    (void)root;
    std::vector<DocId> cluster;
    cluster.reserve(members.size());
    for (auto m : members) cluster.push_back(docs_[m]);
    std::sort(cluster.begin(), cluster.end());
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<DocId> DuplicateClusters::survivors() const {
  std::vector<DocId> out;
  for (auto& cluster : clusters()) out.push_back(cluster.front());
  return out;
}

DuplicateClusters cluster_duplicates(std::vector<DocId> docs,
                                     std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs,
                                     DedupMode mode, double threshold,
                                     const std::vector<ShingleSet>* shingles) {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw Error("dedup threshold must be in (0,1]");
  }
  if (mode == DedupMode::verify && (!shingles || shingles->size() != docs.size())) {
    throw MissingShingles("verify mode requires a shingle set per document");
  }
  DuplicateClusters clusters(std::move(docs));
  for (const auto& [a, b] : pairs) {
    if (a >= clusters.docs().size() || b >= clusters.docs().size()) {
      throw Error("candidate pair index out of range");
    }
    if (mode == DedupMode::verify) {
      if (exact_jaccard((*shingles)[a], (*shingles)[b]) < threshold) continue;
    }
    clusters.merge(a, b);
  }
  return clusters;
}

std::vector<DocId> select_survivors(const DuplicateClusters& clusters) {
  return clusters.survivors();
}

namespace {

constexpr char kMagic[4] = {'M', 'H', 'S', 'G'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = char((value >> (8 * i)) & 0xff);
  out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= T(buf[i]) << (8 * i);
  return value;
}

}  // namespace

void write_signature_file(const std::filesystem::path& path, const MinHashParams& params,
                          std::span<const SignatureRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open signature file for write: " + path.string());
  out.write(kMagic, 4);
  write_le<std::uint16_t>(out, kVersion);
  write_le<std::uint16_t>(out, params.k);
  write_le<std::uint16_t>(out, params.ngram);
  write_le<std::uint64_t>(out, params.seed);
  const std::uint64_t expected_id = params.params_id();
  for (const auto& rec : records) {
    if (rec.sig.params_id != expected_id || rec.sig.values.size() != params.k) {
      throw ParamsMismatch("signature record does not match file parameters");
    }
    std::string id = rec.id.str();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (std::uint64_t v : rec.sig.values) write_le<std::uint64_t>(out, v);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SignatureRecord> read_signature_file(const std::filesystem::path& path,
                                                 MinHashParams* params_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open signature file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad signature file magic: " + path.string());
  }
  std::uint16_t version = read_le<std::uint16_t>(in);
  if (version != kVersion) {
    throw IoError("unsupported signature file version " + std::to_string(version));
  }
  MinHashParams params;
  params.k = read_le<std::uint16_t>(in);
  params.ngram = read_le<std::uint16_t>(in);
  params.seed = read_le<std::uint64_t>(in);
  const std::uint64_t id = params.params_id();

  std::vector<SignatureRecord> records;
  while (true) {
    std::uint32_t len = read_le<std::uint32_t>(in);
    if (!in) break;
    std::string doc_id(len, '\0');
    in.read(doc_id.data(), len);
    SignatureRecord rec;
    rec.sig.values.resize(params.k);
    for (auto& v : rec.sig.values) v = read_le<std::uint64_t>(in);
    if (!in) throw IoError("truncated signature file: " + path.string());
    auto parsed = DocId::parse(doc_id);
    if (!parsed) throw IoError("bad doc id in signature file: " + doc_id);
    rec.id = *parsed;
    rec.sig.params_id = id;
    records.push_back(std::move(rec));
  }
  if (params_out) *params_out = params;
  return records;
}

}  // namespace corpusforge
