#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smm/moments.hpp"

namespace smm::harness {

/// Sample files hold one record per observation block: Q rows, each row the N
/// entries of one column of X followed by the matching entry of y.
///
/// binary: row-major little-endian float64, no header; the file size must be a
///         multiple of Q (N + 1) values.
/// csv:    one row per line, comma separated; blank lines and lines starting
///         with '#' are skipped.
void write_samples_binary(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_samples_binary(std::istream& in, Index n, Index q);

void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_samples_csv(std::istream& in, Index n, Index q);

/// Dispatches on format ("binary" or "csv").
std::vector<Sample> load_samples(const std::string& path, const std::string& format, Index n,
                                 Index q);

}  // namespace smm::harness
