#include "dyadlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace dyadlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long toLong(const std::string& key, const std::string& v) {
  long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw Error("config key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

double toDoubleValue(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw Error("");
    return d;
  } catch (...) {
    throw Error("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> RunConfig::keys() {
  return {"backend", "budget", "depth", "eps-grid", "eps0", "eps1", "eps2", "generator", "h-ratio",
          "lambda", "out", "seed", "strategy", "symbol", "trials"};
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "backend=" << backend << "\n"
     << "budget=" << budget << "\n"
     << "depth=" << depth << "\n"
     << "eps-grid=" << epsMin << ":" << epsMax << "\n"
     << "eps0=" << fmt(eps0) << "\n"
     << "eps1=" << fmt(eps1) << "\n"
     << "eps2=" << fmt(eps2) << "\n"
     << "generator=" << generator << "\n"
     << "h-ratio=" << hRatio << "\n"
     << "lambda=" << lambdaNum << "/" << lambdaDen << "\n"
     << "seed=" << seed << "\n"
     << "strategy=" << strategy << "\n"
     << "symbol=" << symbol << "\n"
     << "trials=" << trials << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "depth") {
    depth = static_cast<int>(toLong(key, v));
    if (depth < 1 || depth > 10) throw Error("depth must lie in 1..10");
  } else if (key == "backend") {
    if (v != "rational" && v != "float") throw Error("backend must be 'rational' or 'float'");
    backend = v;
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(toLong(key, v));
  } else if (key == "trials") {
    trials = static_cast<int>(toLong(key, v));
    if (trials < 1) throw Error("trials must be positive");
  } else if (key == "eps-grid") {
    auto colon = v.find(':');
    if (colon == std::string::npos) throw Error("eps-grid expects a:b");
    epsMin = static_cast<int>(toLong(key, v.substr(0, colon)));
    epsMax = static_cast<int>(toLong(key, v.substr(colon + 1)));
    if (epsMin < 2 || epsMax < epsMin || epsMax > 14) throw Error("eps-grid a:b needs 2 <= a <= b <= 14");
  } else if (key == "h-ratio") {
    hRatio = static_cast<int>(toLong(key, v));
    if (hRatio < 8 || (hRatio & (hRatio - 1))) throw Error("h-ratio must be a power of two >= 8");
  } else if (key == "lambda") {
    auto slash = v.find('/');
    if (slash == std::string::npos) {
      lambdaNum = toLong(key, v);
      lambdaDen = 1;
    } else {
      lambdaNum = toLong(key, v.substr(0, slash));
      lambdaDen = toLong(key, v.substr(slash + 1));
    }
    if (lambdaNum <= 0 || lambdaDen <= 0 || lambdaNum > lambdaDen) throw Error("lambda must be a fraction in (0, 1]");
  } else if (key == "eps0") {
    eps0 = toDoubleValue(key, v);
  } else if (key == "eps1") {
    eps1 = toDoubleValue(key, v);
  } else if (key == "eps2") {
    eps2 = toDoubleValue(key, v);
  } else if (key == "out") {
    out = v;
  } else if (key == "strategy") {
    if (v != "exact" && v != "heuristic") throw Error("strategy must be 'exact' or 'heuristic'");
    strategy = v;
  } else if (key == "generator") {
    if (v != "general" && v != "scaleSkipping" && v != "rectangleLocalized")
      throw Error("generator must be general, scaleSkipping or rectangleLocalized");
    generator = v;
  } else if (key == "budget") {
    budget = toLong(key, v);
    if (budget < 1) throw Error("budget must be positive");
  } else if (key == "symbol") {
    symbol = v;
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> parseKeyValueText(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto hashPos = line.find('#');
    if (hashPos != std::string::npos) line = line.substr(0, hashPos);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineNo) + " is not key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig loadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : parseKeyValueText(ss.str())) base.set(k, v);
  return base;
}

std::string rationalString(const mpq_class& q) { return q.get_str(); }

std::string factorName(int index) { return index == 0 ? "c" : intervalOfIndex(index).str(); }

int factorIndex(const std::string& text) {
  if (text == "c") return 0;
  return basisIndex(parseInterval(text));
}

Json symbolToJson(const HaarExpansion<Surd>& b) {
  Json j;
  j["N"] = b.N;
  Json coeffs = Json::array();
  const int n = b.side();
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const Surd& v = b.at(a, c);
      if (v.isZero()) continue;
      if (!v.isRational()) throw Error("symbol coefficients must be rational to serialize");
      const mpq_class& q = v.rational();
      if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) throw Error("coefficient too large to serialize");
      Json e;
      e["rect"] = factorName(a) + "|" + factorName(c);
      e["num"] = q.get_num().get_si();
      e["den"] = q.get_den().get_si();
      coeffs.push_back(e);
    }
  j["coeffs"] = coeffs;
  return j;
}

HaarExpansion<Surd> symbolFromJson(const Json& j) {
  if (!j.contains("N") || !j.contains("coeffs")) throw Error("symbol JSON needs N and coeffs");
  const int N = j.at("N").get<int>();
  if (N < 1 || N > 10) throw Error("symbol depth out of range");
  HaarExpansion<Surd> b(N);
  for (const auto& e : j.at("coeffs")) {
    const std::string rect = e.at("rect").get<std::string>();
    auto bar = rect.find('|');
    if (bar == std::string::npos) throw Error("bad rectangle '" + rect + "'");
    const int a = factorIndex(rect.substr(0, bar)), c = factorIndex(rect.substr(bar + 1));
    if (a >= b.side() || c >= b.side()) throw Error("rectangle " + rect + " is too fine for depth " + std::to_string(N));
    const long den = e.value("den", 1L);
    if (den == 0) throw Error("zero denominator");
    b.at(a, c) = Surd::fraction(e.at("num").get<long>(), den);
  }
  return b;
}

HaarExpansion<Surd> loadSymbol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read symbol file " + path);
  try {
    return symbolFromJson(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed symbol file " + path + ": " + e.what());
  }
}

Json floatSymbolToJson(const HaarExpansion<double>& b) {
  Json j;
  j["N"] = b.N;
  Json coeffs = Json::array();
  const int n = b.side();
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      if (b.at(a, c) != 0.0) coeffs.push_back({{"rect", factorName(a) + "|" + factorName(c)}, {"value", b.at(a, c)}});
  j["coeffs"] = coeffs;
  return j;
}

Json openSetToJson(const DyadicOpenSet& U) {
  return {{"N", U.depth()}, {"cells", U.count()}, {"measure", U.measure()}, {"rle", U.runLengths()}};
}

DyadicOpenSet openSetFromJson(const Json& j) {
  return DyadicOpenSet::fromRunLengths(j.at("N").get<int>(), j.at("rle").get<std::vector<std::int64_t>>());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (i) out_ << ',';
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out_ << '"';
      for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    } else {
      out_ << c;
    }
  }
  out_ << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::filesystem::path artifactPath(const RunConfig& cfg, const std::string& suite, const std::string& ext) {
  std::filesystem::create_directories(cfg.out);
  return std::filesystem::path(cfg.out) / (suite + "-" + cfg.hash() + "." + ext);
}

void writeJson(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dyadlab
