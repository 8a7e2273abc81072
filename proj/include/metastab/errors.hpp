#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metastab {

// Base for everything the library throws on purpose.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A sequence index at or beyond the horizon was dereferenced.
class out_of_horizon_error : public error {
public:
  out_of_horizon_error(std::size_t index, std::size_t horizon)
      : error("index " + std::to_string(index) + " beyond horizon " +
              std::to_string(horizon)),
        index_(index), horizon_(horizon) {}

  std::size_t index() const noexcept { return index_; }
  std::size_t horizon() const noexcept { return horizon_; }

private:
  std::size_t index_;
  std::size_t horizon_;
};

// Malformed textual input (expressions, formulas). `position` is a 0-based
// character offset into the input.
class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t position)
      : error(what + " (at position " + std::to_string(position) + ")"),
        raw_(what), position_(position) {}

  // Message without the position suffix, for wrappers that add context.
  const std::string& raw_message() const noexcept { return raw_; }
  std::size_t position() const noexcept { return position_; }

private:
  std::string raw_;
  std::size_t position_;
};

// Expression evaluation failed at a concrete index (division by zero and
// friends that were not statically detectable).
class eval_error : public error {
public:
  eval_error(const std::string& what, std::size_t index)
      : error(what + " (at index n=" + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

// Invalid configuration or input data (bad sampling, bad epsilon, ragged
// trace, unresolvable file, ...).
class config_error : public error {
public:
  explicit config_error(const std::string& what) : error(what) {}
};

// Trace / matrix ingestion failure; names row and (when known) column,
// both 1-based as users count lines.
class ingest_error : public config_error {
public:
  ingest_error(const std::string& what, std::size_t row, std::size_t column = 0)
      : config_error(what + " (row " + std::to_string(row) +
                     (column ? ", column " + std::to_string(column) : std::string()) + ")"),
        row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

// A referenced member / atom / entry does not exist.
class lookup_error : public error {
public:
  explicit lookup_error(const std::string& what) : error(what) {}
};

// The toolkit contradicted itself (e.g. an adversary move that fails its own
// replay). Tests must fail loudly on this.
class internal_error : public error {
public:
  explicit internal_error(const std::string& what) : error(what) {}
};

} // namespace metastab
