#pragma once

#include <string>
#include <vector>

#include "cmpw/cm_solver.hpp"
#include "cmpw/cpw_builder.hpp"
#include "cmpw/cpw_transform.hpp"

namespace cmpw {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest round-trip decimal text for v; identical inputs give identical
/// bytes on every run.
std::string format_double(double v);

/// RFC 4180 quoting for one cell (numbers pass through unquoted).
std::string csv_cell(const std::string& raw);

/// Generic table: '#' comment lines, one header row, numeric rows.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& notes,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

void write_modeset_csv(const std::string& path, const ModeSet& ms,
                       const std::vector<std::string>& notes = {});

/// Versioned little-endian binary round trip for a ModeSet.
void write_modeset_binary(const std::string& path, const ModeSet& ms);
ModeSet read_modeset_binary(const std::string& path);

void write_bcpw_csv(const std::string& path, const BcpwSet& set,
                    const std::vector<std::string>& notes = {});

/// JSON sidecar: grid, shift, sparsity, per-level support and constraint
/// residuals; stable key order.
void write_bcpw_sidecar(const std::string& path, const BcpwSet& set);

/// Coefficient rows (level, shift, value).
void write_coeffs_csv(const std::string& path, const CpwCoeffs& c,
                      const std::vector<std::string>& notes = {});

}  // namespace cmpw
