#pragma once

#include <functional>
#include <optional>

#include "qw/error.hpp"
#include "qw/fixtures.hpp"
#include "qw/tailed_graph.hpp"

namespace qwtest {

// Kind of the qw::Error thrown by fn, or nullopt if it returns normally.
inline std::optional<qw::ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const qw::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline qw::TailedGraph tailed(const std::string& preset, const std::string& tails) {
  return qw::attach_tails(qw::preset_graph(preset), qw::parse_tails(tails));
}

}  // namespace qwtest
