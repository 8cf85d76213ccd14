#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rmt/rng.hpp"
#include "rmt/spectra.hpp"
#include "rmt/types.hpp"

namespace rmt {

// Shortest exact decimal form: rows written from identical doubles are
// byte-identical across runs.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_)
      throw ValidationError("cannot open output path for writing: " + path);
    write_row(columns);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw ValidationError("failed to flush CSV output");
  }

 private:
  std::ofstream out_;
};

// One-column eigenvalue export with a commented metadata header.
inline void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                               SeedSpec seed, const std::string& label) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot open output path for writing: " + path);
  out << "# N=" << spectrum.size() << '\n';
  out << "# master_seed=" << seed.master << " stream=" << seed.stream << '\n';
  out << "# ensemble=" << label << '\n';
  out << "eigenvalue\n";
  for (Index i = 0; i < spectrum.size(); ++i)
    out << format_double(spectrum.values[i]) << '\n';
  out.close();
  if (!out) throw ValidationError("failed to flush spectrum CSV");
}

}  // namespace rmt
