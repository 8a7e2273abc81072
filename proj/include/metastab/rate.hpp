#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "metastab/expr.hpp"
#include "metastab/rational.hpp"
#include "metastab/sampling.hpp"

namespace metastab {

// A candidate uniform rate E_{eps,eta}. Evaluation is total on valid inputs,
// deterministic, and always >= 1.
//
//   constant         E(eps, eta) = value
//   max_eta0_plus_1  E(eps, eta) = max(eta_0) + 1   (1 when eta_0 is empty)
//   table            lookup on (epsilon index, sampling index) in the tested
//                    collections, with optional default
//   expression       grammar of the sequence-expression language over the
//                    variables eps, maxeta0, len; the rational value is
//                    ceiled and clamped to >= 1
class rate_bound {
public:
  enum class kind { constant, max_eta0_plus_1, table, expression };

  struct eval_context {
    std::size_t eps_index;
    rational eps;
    std::size_t sampling_index;
    const sampling_prefix& eta;
  };

  static rate_bound constant(std::size_t value) {
    if (value < 1) throw config_error("constant rate bound must be >= 1");
    rate_bound r;
    r.kind_ = kind::constant;
    r.value_ = value;
    return r;
  }

  static rate_bound max_eta0_plus_1() {
    rate_bound r;
    r.kind_ = kind::max_eta0_plus_1;
    return r;
  }

  static rate_bound table(std::map<std::pair<std::size_t, std::size_t>, std::size_t> entries,
                          std::optional<std::size_t> default_bound = std::nullopt) {
    for (const auto& [key, bound] : entries)
      if (bound < 1)
        throw config_error("table rate bound must be >= 1 (entry " +
                           std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    if (default_bound && *default_bound < 1)
      throw config_error("table default bound must be >= 1");
    rate_bound r;
    r.kind_ = kind::table;
    r.entries_ = std::move(entries);
    r.default_ = default_bound;
    return r;
  }

  static rate_bound expression(const std::string& text) {
    rate_bound r;
    r.kind_ = kind::expression;
    r.expr_ = parse_expr_with_vars(text, {"eps", "maxeta0", "len"});
    r.expr_text_ = text;
    return r;
  }

  kind which() const { return kind_; }

  std::size_t eval(const eval_context& ctx) const {
    switch (kind_) {
      case kind::constant: return value_;
      case kind::max_eta0_plus_1:
        return ctx.eta.level(0).empty() ? 1 : ctx.eta.level(0).max() + 1;
      case kind::table: {
        auto it = entries_.find({ctx.eps_index, ctx.sampling_index});
        if (it != entries_.end()) return it->second;
        if (default_) return *default_;
        throw config_error("rate table has no entry for epsilon index " +
                           std::to_string(ctx.eps_index) + ", sampling index " +
                           std::to_string(ctx.sampling_index) + " and no default");
      }
      case kind::expression: {
        expr_env env;
        env.emplace("eps", ctx.eps);
        env.emplace("maxeta0", rational(ctx.eta.level(0).empty() ? 0 : ctx.eta.level(0).max()));
        env.emplace("len", rational(ctx.eta.length()));
        bigint b = rational_ceil(eval_expr_env(expr_, env));
        if (b < 1) return 1;
        return b.convert_to<std::size_t>();
      }
    }
    throw internal_error("unhandled rate kind");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    switch (kind_) {
      case kind::constant:
        j["kind"] = "const";
        j["value"] = value_;
        break;
      case kind::max_eta0_plus_1:
        j["kind"] = "maxeta0plus1";
        break;
      case kind::table: {
        j["kind"] = "table";
        nlohmann::ordered_json entries = nlohmann::ordered_json::array();
        for (const auto& [key, bound] : entries_) {
          nlohmann::ordered_json e;
          e["eps_index"] = key.first;
          e["sampling_index"] = key.second;
          e["bound"] = bound;
          entries.push_back(std::move(e));
        }
        j["entries"] = std::move(entries);
        if (default_) j["default"] = *default_;
        break;
      }
      case kind::expression:
        j["kind"] = "expr";
        j["text"] = expr_text_;
        break;
    }
    return j;
  }

  static rate_bound from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
      throw config_error("rate file: expected object with a \"kind\" string");
    std::string k = j["kind"].get<std::string>();
    if (k == "const") {
      if (!j.contains("value") || !j["value"].is_number_unsigned())
        throw config_error("rate file: const kind needs a natural \"value\"");
      return constant(j["value"].get<std::size_t>());
    }
    if (k == "maxeta0plus1") return max_eta0_plus_1();
    if (k == "table") {
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> entries;
      if (!j.contains("entries") || !j["entries"].is_array())
        throw config_error("rate file: table kind needs an \"entries\" array");
      for (const auto& e : j["entries"]) {
        if (!e.is_object() || !e.contains("eps_index") || !e.contains("sampling_index") ||
            !e.contains("bound"))
          throw config_error("rate file: table entry needs eps_index, sampling_index, bound");
        entries[{e["eps_index"].get<std::size_t>(), e["sampling_index"].get<std::size_t>()}] =
            e["bound"].get<std::size_t>();
      }
      std::optional<std::size_t> default_bound;
      if (j.contains("default")) default_bound = j["default"].get<std::size_t>();
      return table(std::move(entries), default_bound);
    }
    if (k == "expr") {
      if (!j.contains("text") || !j["text"].is_string())
        throw config_error("rate file: expr kind needs a \"text\" string");
      return expression(j["text"].get<std::string>());
    }
    throw config_error("rate file: unknown kind '" + k + "'");
  }

private:
  rate_bound() = default;

  kind kind_ = kind::constant;
  std::size_t value_ = 1;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> entries_;
  std::optional<std::size_t> default_;
  expr expr_;
  std::string expr_text_;
};

} // namespace metastab
