#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "simrel/model.hpp"

namespace simrel {

/// Parse or validation failure; line is 1-based, 0 when not line-specific.
struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line(line) {}
  int line;
};

/// Parses the model text format:
///
///   MODEL <FPS|DTMC|CTMC|PA|CPA>
///   STATES <n>
///   NAMES                          # optional
///   <state> <name>
///   LABELS                         # optional
///   <state> [prop ...]
///   TRANSITIONS
///   <src> <dst> <value>                        # FPS/DTMC/CTMC
///   <src> <action> <dist-index> <dst> <value>  # PA/CPA
///   END
///
/// '#' starts a comment; blank lines are ignored; values are nonnegative
/// decimals or a/b fractions, parsed exactly. Zero-valued and duplicate
/// transition lines are rejected, as are DTMC rows that are neither
/// stochastic nor absorbing.
Model parse_model(std::istream& in);
Model parse_model_string(const std::string& text);
Model parse_model_file(const std::string& path);

/// Canonical text form; parse_model(serialize_model(m)) reproduces m and
/// serialising again yields byte-identical text.
std::string serialize_model(const Model& model);

} // namespace simrel
