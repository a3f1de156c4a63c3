#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace defembed {

// Bidirectional word <-> dense id map. Ids are assigned by sorted-unique
// order of the word list, so a given word set always yields the same ids.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Sorts and dedupes `words`, then assigns ids 0..V-1 in that order.
  static Vocabulary from_words(std::vector<std::string> words);

  // -1 when the word is unknown.
  int id(std::string_view word) const;
  const std::string& word(int id) const;
  bool contains(std::string_view word) const { return id(word) >= 0; }
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

// The fixed set of definition semantic roles, in table order.
class RoleSet {
 public:
  static constexpr int kCount = 11;
  static const std::array<std::string_view, kCount>& names();

  // -1 when the name is not a role.
  static int id(std::string_view name);
  static std::string_view name(int id);
};

std::string to_lower(std::string_view s);

}  // namespace defembed
