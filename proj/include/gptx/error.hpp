#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace gptx {

// Error categories. The CLI maps each category to a distinct exit code,
// so the set below is a stable enumeration, not an implementation detail.
enum class Errc {
  MalformedDocument,  // unreadable or schema-violating input file
  DuplicateId,        // two nodes share an id within one tree
  UnknownNode,        // a query referenced an id the tree does not contain
  NotAction,          // operation requires an action node
  InvalidQuery,       // structurally invalid query (e.g. ca of ancestor pair)
  NotInTrace,         // queried action does not occur in the trace
  InvalidFoil,        // foil equals the fact or fails the valid-foil test
  NoValidFoils,       // implicit query on a fact with no valid foils
  InvalidParams,      // generation/evaluation parameters out of range
  IoError,            // filesystem failure
};

std::string_view to_string(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc c) noexcept {
  switch (c) {
    case Errc::MalformedDocument: return "malformed-document";
    case Errc::DuplicateId: return "duplicate-id";
    case Errc::UnknownNode: return "unknown-node";
    case Errc::NotAction: return "not-action";
    case Errc::InvalidQuery: return "invalid-query";
    case Errc::NotInTrace: return "not-in-trace";
    case Errc::InvalidFoil: return "invalid-foil";
    case Errc::NoValidFoils: return "no-valid-foils";
    case Errc::InvalidParams: return "invalid-params";
    case Errc::IoError: return "io-error";
  }
  return "unknown";
}

[[noreturn]] inline void raise(Errc code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace gptx
