#pragma once

// Batch front-end. run() is the whole program minus process exit, so tests
// can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rdmft::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2, kNonConverged = 3 };

struct RunConfig {
  std::string subcommand;
  int n = 2;
  double u = 1;
  double t = 1;
  double vl = 0;
  double vr = 0;
  std::optional<std::string> grid;  // "DxP"
  std::optional<double> d_min;
  std::optional<double> d_max;
  std::string format = "csv";
  std::string out = "-";
  std::uint64_t seed = 0x5eed;
  int workers = 1;
  std::optional<double> phi;
  std::optional<std::string> functional;
  double nw0 = 1;
  double np_min = 1e-3;
  double np_max = 1e3;
  int modes = 1;
  std::string sweep = "modes";
};

/// Parses "DxP"; throws InvalidArgument on malformed text or a dimension below 2.
std::pair<int, int> parse_grid(const std::string& text);

/// Decimal with 17 significant digits.
std::string format_double(double value);

/// RFC 4180 writer: CRLF records, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace rdmft::cli
