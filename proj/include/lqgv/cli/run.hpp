#pragma once

#include <iosfwd>

#include "lqgv/cli/config.hpp"

namespace lqgv::cli {

/// Exit statuses.
inline constexpr int kStatusOk = 0;
inline constexpr int kStatusAssertion = 1;
inline constexpr int kStatusConfig = 2;

/// Runs one configured pipeline, writing artifacts, a copy of the config and a
/// hash manifest into c.out. Returns 0 when every declared assertion passes,
/// 1 on a failed assertion or I/O error, 2 on an invalid config.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Builds the report for mode=verify without writing anything.
ExperimentReport run_suite(const RunConfig& c);

}  // namespace lqgv::cli
