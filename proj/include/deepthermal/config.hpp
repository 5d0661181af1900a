#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "deepthermal/experiments.hpp"

namespace deepthermal::config {

enum class ExperimentKind { Quench, Scaling, Eigenstates, Benchmark, Bloch };
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& text);

struct RunConfig {
  ExperimentKind kind = ExperimentKind::Quench;
  experiments::ExperimentConfig exp;
  std::string out_dir = "out";
  std::string out_name;  // empty: derived from experiment, model and N

  bool operator==(const RunConfig&) const = default;
};

/// Flat key=value text with dotted keys. '#' starts a comment; blank lines are
/// ignored; keys may appear once. Keys under "manifest." carry provenance and
/// are skipped. Syntax problems raise ParseError, bad values ValidationError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text with every key resolved; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& cfg);

/// Structural checks that do not need a diagonalization: the space,
/// bipartition, initial state and window all build.
void validate(const RunConfig& cfg);

/// Output file stem for a run.
std::string output_stem(const RunConfig& cfg);

/// Every key the parser accepts, with a one-line description.
const std::map<std::string, std::string>& known_keys();

}  // namespace deepthermal::config
