#pragma once

// Command-line front end. Subcommands: teleport, sweep, noise, keyrate, shots, ingest.
// Exit codes: 0 success, 2 validation error, 1 numerical failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qct::cli {

/// One output row; empty optionals serialize as empty CSV cells / JSON null.
struct ResultRow {
  std::string model;
  int n = 0;
  double j = 0.0;
  double h = 0.0;
  std::string basis;
  std::optional<int> a;
  std::string observable;
  std::optional<std::string> noise_kind;
  std::optional<int> noise_site;
  std::optional<double> p;
  std::optional<double> alpha;
  std::optional<double> xi;
  std::optional<double> eta;
  std::optional<double> theta;
  std::optional<double> delta_exact;
  std::optional<long long> n_shots;
  std::optional<double> mean;
  std::optional<double> sem;
  std::optional<double> e_bit;
  std::optional<double> e_ph;
  std::optional<double> k_asym;
  std::optional<std::uint64_t> seed;

  bool operator==(const ResultRow&) const = default;
};

/// Column names, fixed order.
const std::vector<std::string>& columns();

std::string format_number(double value);

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

std::string to_json(const std::vector<ResultRow>& rows, const std::string& config_json);
std::vector<ResultRow> parse_json(const std::string& text);

/// Worker count from QCT_THREADS (integer >= 1), else the hardware concurrency.
int thread_count();

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qct::cli
