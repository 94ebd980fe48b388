#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spdelab/experiments.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/rate.hpp"

namespace spdelab {

/// Formats a double with enough digits to round-trip exactly, so repeated
/// runs produce byte-identical files.
std::string format_double(double v);

/// Writes one CSV per series (columns epsilon, lambda, estimate, std_error,
/// n_effective, then a summary row with the fitted slope/intercept/r^2) plus
/// one JSON mirror of the whole report. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const ScalingReport& report,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats);

std::vector<std::filesystem::path> emit_report(const KernelReport& report,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats);

std::vector<std::filesystem::path> emit_report(const RateResult& result,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats);

/// Reads back a series CSV written by emit_report (used to verify that the
/// on-disk form reproduces the in-memory report exactly).
Series parse_series_csv(const std::filesystem::path& path);

}  // namespace spdelab
