#pragma once

#include <string>

#include "defectscan/config.hpp"
#include "defectscan/inversion.hpp"

namespace defectscan {

/// Report files are `key value` text. Lines starting with '#' are
/// non-normative (timings, notes); everything else is the payload and is
/// byte-reproducible for a fixed seed. Numeric payload values use hex
/// floats so reproduction is exact.
void write_inversion_report(const std::string& path, const ExperimentSpec& spec,
                            const InversionResult& result);

void write_mc_report(const std::string& path, const ExperimentSpec& spec,
                     const McInversion& mc);

/// Per-index residual curve CSV: j, residual_log10, k_best.
void write_per_index_csv(const std::string& path, const InversionResult& result);

/// Per-run Monte Carlo estimates CSV: run, seed, j_hat, k_hat, residual_log10.
void write_mc_runs_csv(const std::string& path, const McInversion& mc);

/// Landscape matrix CSV: header row of k values, then one row per j.
void write_landscape_csv(const std::string& path, const Landscape& ls);

/// In-memory payload builders (used by the writers and by determinism
/// checks that compare payloads without touching the filesystem).
std::string inversion_report_payload(const ExperimentSpec& spec,
                                     const InversionResult& result);
std::string mc_report_payload(const ExperimentSpec& spec, const McInversion& mc);

/// Read a report back and strip the non-normative '#' lines.
std::string read_report_payload(const std::string& path);

} // namespace defectscan
