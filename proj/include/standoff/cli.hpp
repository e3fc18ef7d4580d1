#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "standoff/config.hpp"
#include "standoff/inline_converter.hpp"

namespace standoff {

// Process exit codes. 0-5 are the documented categories; 64 and 65 follow
// the BSD sysexits convention for bad usage and bad input.
enum ExitCode : int {
  kExitOk = 0,
  kExitPartial = 1,
  kExitStoreUnreachable = 2,
  kExitMissingPrerequisite = 3,
  kExitUnknownRelation = 4,
  kExitMalformedXml = 5,
  kExitUsage = 64,
  kExitInvalidInput = 65,
};

// Settings for every command, read from the key=value config file (and
// STANDOFF_* environment overrides), then command-line flags.
struct PipelineConfig {
  std::string store = "sqlite:standoff.db";
  std::optional<std::filesystem::path> guideline;
  std::optional<std::filesystem::path> lexicon_terms;
  std::optional<std::filesystem::path> lexicon_tui;
  std::optional<std::filesystem::path> lexicon_pos;
  std::optional<std::filesystem::path> lexicon_function_words;
  std::optional<std::filesystem::path> abbreviations;
  std::size_t max_phrase_tokens = 12;
  std::size_t min_support = 2;
  std::size_t max_nodes = 4;
  OffsetConvention convention = OffsetConvention::kHalfOpen0;
  std::size_t jobs = 1;

  // Throws ValidationError for a missing file or a non-positive number.
  static PipelineConfig from(const Config& config);
};

// Runs one command line (argv[0] is the program name). Never throws; the
// return value is an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace standoff
