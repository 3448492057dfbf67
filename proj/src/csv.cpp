#include "cascade/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cascade/montecarlo.hpp"
#include "cascade/version.hpp"

namespace cascade {

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string output_header(const std::string& digest) {
  std::string line = "# ";
  line += kToolName;
  line += " ";
  line += kToolVersion;
  line += " config=";
  line += digest;
  return line;
}

std::string error_series_csv(const ErrorSeries& series,
                             const std::string& digest) {
  std::string csv = output_header(digest) + "\n";
  csv += "t,p_t,q_t,err_count,trials,p_hat,stderr\n";
  for (size_t i = 0; i < series.checkpoints.size(); ++i) {
    csv += std::to_string(series.checkpoints[i]) + "," +
           fmt12(series.p_at[i]) + "," + fmt12(series.q_at[i]) + "," +
           std::to_string(series.error_counts[i]) + "," +
           std::to_string(series.trials) + "," + fmt12(series.p_hat(i)) +
           "," + fmt12(series.stderr_at(i)) + "\n";
  }
  return csv;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace cascade
