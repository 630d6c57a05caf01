#pragma once

#include <stdexcept>
#include <string>

namespace gossip {

enum class Errc {
  invalid_vertex,
  invalid_distribution,
  invalid_schedule,
  missing_snapshot,
  replay,
  instability,
  undefined_moment,
  size_cap,
  invalid_measure,
  alignment,
  invalid_config,
  io,
};

const char* to_string(Errc code) noexcept;

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
constexpr bool is_numerical(Errc code) noexcept {
  return code == Errc::instability || code == Errc::undefined_moment;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gossip
