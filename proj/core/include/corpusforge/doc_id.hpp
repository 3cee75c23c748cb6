#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace corpusforge {

/// Positional document identity: (dump label, file index, record index).
/// Ordering is the lexicographic triple order, which makes the earliest
/// dump/file/record the canonical survivor of a duplicate cluster.
struct DocId {
  std::string dump;
  std::uint32_t file = 0;
  std::uint32_t record = 0;

  auto operator<=>(const DocId&) const = default;

  /// "dump/file/record" with decimal indices, e.g. "2017-04/3/127".
  std::string str() const;

  /// Parses the str() form. Returns nullopt on malformed input.
  static std::optional<DocId> parse(std::string_view s);
};

struct DocIdHash {
  std::size_t operator()(const DocId& id) const;
};

}  // namespace corpusforge
