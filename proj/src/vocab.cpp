#include "vocab.h"

#include <algorithm>
#include <cctype>

#include "error.h"

namespace defembed {

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  Vocabulary v;
  v.words_ = std::move(words);
  v.ids_.reserve(v.words_.size());
  for (int i = 0; i < static_cast<int>(v.words_.size()); ++i) {
    v.ids_.emplace(v.words_[i], i);
  }
  return v;
}

int Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? -1 : it->second;
}

const std::string& Vocabulary::word(int id) const {
  if (id < 0 || id >= size()) {
    throw UsageError("entity id out of range: " + std::to_string(id));
  }
  return words_[id];
}

const std::array<std::string_view, RoleSet::kCount>& RoleSet::names() {
  static const std::array<std::string_view, kCount> kNames = {
      "supertype",          "differentia_quality", "differentia_event",
      "event_location",     "event_time",          "origin_location",
      "quality_modifier",   "purpose",             "associated_fact",
      "accessory_determiner", "accessory_quality",
  };
  return kNames;
}

int RoleSet::id(std::string_view name) {
  const auto& all = names();
  for (int i = 0; i < kCount; ++i) {
    if (all[i] == name) return i;
  }
  return -1;
}

std::string_view RoleSet::name(int id) {
  if (id < 0 || id >= kCount) {
    throw UsageError("role id out of range: " + std::to_string(id));
  }
  return names()[id];
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) {
    return static_cast<char>(std::tolower(ch));
  });
  return out;
}

}  // namespace defembed
