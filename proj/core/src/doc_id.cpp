#include "corpusforge/doc_id.hpp"

#include <charconv>

namespace corpusforge {

std::string DocId::str() const {
  return dump + "/" + std::to_string(file) + "/" + std::to_string(record);
}

std::optional<DocId> DocId::parse(std::string_view s) {
  // dump labels may themselves contain '/', so split at the last two slashes.
  auto last = s.rfind('/');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  auto mid = s.rfind('/', last - 1);
  if (mid == std::string_view::npos || mid == 0) return std::nullopt;

  DocId id;
  id.dump = std::string(s.substr(0, mid));
  auto file_part = s.substr(mid + 1, last - mid - 1);
  auto rec_part = s.substr(last + 1);
  if (file_part.empty() || rec_part.empty()) return std::nullopt;

  auto parse_u32 = [](std::string_view v, std::uint32_t& out) {
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    return ec == std::errc() && ptr == v.data() + v.size();
  };
  if (!parse_u32(file_part, id.file) || !parse_u32(rec_part, id.record)) return std::nullopt;
  return id;
}

std::size_t DocIdHash::operator()(const DocId& id) const {
  std::size_t h = std::hash<std::string>{}(id.dump);
  h ^= std::hash<std::uint64_t>{}((std::uint64_t(id.file) << 32) | id.record) + 0x9e3779b97f4a7c15ULL +
       (h << 6) + (h >> 2);
  return h;
}

}  // namespace corpusforge
