#pragma once

#include <string>

namespace cascade {

struct ErrorSeries;

// 12 significant digits, '.' decimal separator, locale-independent.
std::string fmt12(double x);

// "# cascade-lab <version> config=<digest>"
std::string output_header(const std::string& digest);

// The experiment CSV: header comment, then
// t,p_t,q_t,err_count,trials,p_hat,stderr rows. Byte-identical for identical
// config + seed + version, whatever the worker count.
std::string error_series_csv(const ErrorSeries& series,
                             const std::string& digest);

// Write via temp file + rename in the target directory.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace cascade
