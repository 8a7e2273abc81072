#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metastab/errors.hpp"
#include "metastab/numeric.hpp"

namespace metastab {

enum class source_kind { closed_form, expression, trace };

inline const char* to_string(source_kind k) {
  switch (k) {
    case source_kind::closed_form: return "closed-form";
    case source_kind::expression: return "expression";
    case source_kind::trace: return "trace";
  }
  return "?";
}

// A horizon-bounded real-valued sequence, materialized. Values are immutable
// after construction, so evaluation is trivially deterministic and the value
// is safe to share across threads.
template <class Num>
class basic_sequence {
public:
  basic_sequence(std::vector<Num> values, source_kind kind, std::string label = "")
      : values_(std::move(values)), kind_(kind), label_(std::move(label)) {
    if (values_.empty()) throw config_error("sequence horizon must be >= 1");
  }

  std::size_t horizon() const noexcept { return values_.size(); }
  source_kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  const Num& at(std::size_t i) const {
    if (i >= values_.size()) throw out_of_horizon_error(i, values_.size());
    return values_[i];
  }

  const std::vector<Num>& values() const noexcept { return values_; }

private:
  std::vector<Num> values_;
  source_kind kind_;
  std::string label_;
};

using exact_sequence = basic_sequence<rational>;
using trace_sequence = basic_sequence<double>;

} // namespace metastab
