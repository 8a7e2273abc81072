#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metastab/errors.hpp"

namespace metastab {

// A finite set of sequence positions. Stored sorted and deduplicated; may be
// empty or a singleton.
class index_set {
public:
  index_set() = default;
  index_set(std::initializer_list<std::size_t> indices)
      : index_set(std::vector<std::size_t>(indices)) {}
  explicit index_set(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  bool empty() const noexcept { return indices_.empty(); }
  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t min() const { return indices_.front(); }
  std::size_t max() const { return indices_.back(); }
  bool contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }
  bool subset_of(const index_set& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(),
                         indices_.begin(), indices_.end());
  }

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }
  const std::vector<std::size_t>& values() const noexcept { return indices_; }

  bool operator==(const index_set&) const = default;

private:
  std::vector<std::size_t> indices_;
};

// A finite prefix eta_0, ..., eta_{L-1} of a sampling of omega. Validity:
// every index of eta_m is >= m. Construction enforces it.
class sampling_prefix {
public:
  explicit sampling_prefix(std::vector<index_set> levels) : levels_(std::move(levels)) {
    if (levels_.empty())
      throw config_error("sampling prefix must have length >= 1");
    for (std::size_t m = 0; m < levels_.size(); ++m) {
      if (!levels_[m].empty() && levels_[m].min() < m)
        throw config_error("invalid sampling: level " + std::to_string(m) +
                           " contains index " + std::to_string(levels_[m].min()) +
                           " < " + std::to_string(m));
    }
  }

  std::size_t length() const noexcept { return levels_.size(); }
  const index_set& level(std::size_t m) const {
    if (m >= levels_.size())
      throw lookup_error("sampling level " + std::to_string(m) + " out of range (length " +
                         std::to_string(levels_.size()) + ")");
    return levels_[m];
  }
  const std::vector<index_set>& levels() const noexcept { return levels_; }

  // Largest index referenced anywhere; 0 when all levels are empty.
  std::size_t max_index() const {
    std::size_t mx = 0;
    for (const auto& s : levels_)
      if (!s.empty()) mx = std::max(mx, s.max());
    return mx;
  }

  std::size_t max_eta0() const { return levels_.front().empty() ? 0 : levels_.front().max(); }

  bool operator==(const sampling_prefix&) const = default;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& s : levels_) {
      nlohmann::ordered_json lvl = nlohmann::ordered_json::array();
      for (std::size_t i : s) lvl.push_back(i);
      levels.push_back(std::move(lvl));
    }
    nlohmann::ordered_json j;
    j["levels"] = std::move(levels);
    return j;
  }

  static sampling_prefix from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("levels") || !j["levels"].is_array())
      throw config_error("sampling file: expected object {\"levels\": [[...], ...]}");
    std::vector<index_set> levels;
    for (const auto& lvl : j["levels"]) {
      if (!lvl.is_array())
        throw config_error("sampling file: level " + std::to_string(levels.size()) +
                           " is not an array");
      std::vector<std::size_t> ix;
      for (const auto& v : lvl) {
        if (!v.is_number_unsigned())
          throw config_error("sampling file: level " + std::to_string(levels.size()) +
                             " contains a non-natural entry " + v.dump());
        ix.push_back(v.get<std::size_t>());
      }
      levels.emplace_back(std::move(ix));
    }
    return sampling_prefix(std::move(levels));
  }

private:
  std::vector<index_set> levels_;
};

// Built-in generators.

// eta_m = {m, m+1}, m < length.
inline sampling_prefix pairs_sampling(std::size_t length) {
  if (length == 0) throw config_error("pairs sampling needs length >= 1");
  std::vector<index_set> levels;
  levels.reserve(length);
  for (std::size_t m = 0; m < length; ++m) levels.push_back(index_set{m, m + 1});
  return sampling_prefix(std::move(levels));
}

// eta_m = {m, ..., m+width}, m < length.
inline sampling_prefix interval_sampling(std::size_t width, std::size_t length) {
  if (length == 0) throw config_error("interval sampling needs length >= 1");
  std::vector<index_set> levels;
  levels.reserve(length);
  for (std::size_t m = 0; m < length; ++m) {
    std::vector<std::size_t> ix;
    for (std::size_t i = m; i <= m + width; ++i) ix.push_back(i);
    levels.emplace_back(std::move(ix));
  }
  return sampling_prefix(std::move(levels));
}

// eta_m = {m, center} while m <= center, singleton {m} beyond. Default length
// is center+1 (no extension).
inline sampling_prefix straddle_sampling(std::size_t center, std::size_t length = 0) {
  if (length == 0) length = center + 1;
  std::vector<index_set> levels;
  levels.reserve(length);
  for (std::size_t m = 0; m < length; ++m) {
    if (m <= center)
      levels.push_back(index_set{m, center});
    else
      levels.push_back(index_set{m});
  }
  return sampling_prefix(std::move(levels));
}

inline void save_sampling(std::ostream& os, const sampling_prefix& eta) {
  os << eta.to_json().dump(2) << "\n";
}

inline sampling_prefix load_sampling(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("sampling file: invalid JSON: ") + e.what());
  }
  return sampling_prefix::from_json(j);
}

} // namespace metastab
