#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadlab/haar.hpp"
#include "dyadlab/open_set.hpp"
#include "dyadlab/scalar.hpp"

namespace dyadlab {

using Json = nlohmann::ordered_json;

struct RunConfig {
  int depth = 3;
  std::string backend = "rational";  // rational | float
  std::uint64_t seed = 1;
  int trials = 50;
  int epsMin = 3, epsMax = 7;  // eps = 2^-e
  int hRatio = 16;
  long lambdaNum = 1, lambdaDen = 16;
  double eps0 = 1e-2, eps1 = 1e-2, eps2 = 1e-4;
  std::string out = "out";
  std::string strategy = "heuristic";  // exact | heuristic
  std::string generator = "general";
  long budget = 2000;
  std::string symbol;  // optional path to a symbol JSON file

  // canonical key=value text, one entry per line, sorted by key
  std::string serialize() const;
  std::string hash() const;  // FNV-1a 64 of serialize(), hex
  void set(const std::string& key, const std::string& value);
  static std::vector<std::string> keys();
};

std::uint64_t fnv1a64(const std::string& text);
std::map<std::string, std::string> parseKeyValueText(const std::string& text);
RunConfig loadConfigFile(const std::string& path, RunConfig base = {});

std::string rationalString(const mpq_class& q);

// {"N": n, "coeffs": [{"rect": "lx:kx|ly:ky", "num": p, "den": q}, ...]}; a constant factor is written "c".
Json symbolToJson(const HaarExpansion<Surd>& b);
HaarExpansion<Surd> symbolFromJson(const Json& j);
HaarExpansion<Surd> loadSymbol(const std::string& path);
// float symbols carry "value" instead of num/den
Json floatSymbolToJson(const HaarExpansion<double>& b);

Json openSetToJson(const DyadicOpenSet& U);
DyadicOpenSet openSetFromJson(const Json& j);

// factor index 0 is "c"; index >= 1 is the interval of that Haar function
std::string factorName(int index);
int factorIndex(const std::string& text);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string fmt(double v);
std::filesystem::path artifactPath(const RunConfig& cfg, const std::string& suite, const std::string& ext);
void writeJson(const std::filesystem::path& path, const Json& j);

}  // namespace dyadlab
