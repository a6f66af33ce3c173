#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stopscape {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad N, non-positive area, empty set...).
struct domain_error : error {
  using error::error;
};

struct degenerate_geometry_error : domain_error {
  using domain_error::domain_error;
};

struct parse_error : error {
  parse_error(std::string const& msg, std::size_t byte_offset)
      : error{msg + " (at byte " + std::to_string(byte_offset) + ")"},
        byte_offset_{byte_offset} {}

  // Zero-based offset of the offending byte.
  std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
  std::size_t byte_offset_;
};

struct ingest_error : error {
  ingest_error(std::string const& msg, bool retryable)
      : error{msg}, retryable_{retryable} {}

  bool retryable() const noexcept { return retryable_; }

private:
  bool retryable_;
};

struct store_error : error {
  using error::error;
};

struct consistency_error : error {
  using error::error;
};

struct stage_error : error {
  stage_error(std::string stage, std::string const& cause)
      : error{"[" + stage + "] " + cause}, stage_{std::move(stage)} {}

  std::string const& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace stopscape
