#include "landau_ee/calibration.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "landau_ee/errors.hpp"

namespace landau_ee {

namespace {

// Generated by `landau_ee calibrate` on the default K = 100 grid; mirrors
// data/calibration.txt.
constexpr const char* kBuiltin = R"(# landau_ee calibration constants version=1
g_airy_transition C=9.1208725424e-02 beta=0.0000000000e+00 grid_hash=18c219df09ea63a0
g_bessel_small C=4.1694925109e-02 beta=0.0000000000e+00 grid_hash=18c219df09ea63a0
g_exponential_tail C=5.2220416184e-05 beta=3.4459376997e-01 grid_hash=18c219df09ea63a0
g_oscillatory_bulk C=1.0633828494e-02 beta=0.0000000000e+00 grid_hash=18c219df09ea63a0
)";

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

std::string grid_hash(std::string_view description) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : description) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const CalibrationTable& CalibrationTable::builtin() {
  static const CalibrationTable table = parse(kBuiltin);
  return table;
}

CalibrationTable CalibrationTable::parse(std::string_view text) {
  CalibrationTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      auto pos = s.find("version=");
      if (pos != std::string::npos) t.version = std::stoi(s.substr(pos + 8));
      continue;
    }
    std::istringstream fields(s);
    std::string id, tok;
    fields >> id;
    BoundConstants c;
    bool have_c = false;
    while (fields >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw DomainError("calibration line " + std::to_string(lineno) + ": expected key=value");
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "C") {
          c.C = std::stod(val);
          have_c = true;
        } else if (key == "beta") {
          c.beta = std::stod(val);
        } else if (key == "grid_hash") {
          c.grid_hash = val;
        } else {
          throw DomainError("calibration line " + std::to_string(lineno) + ": unknown key " + key);
        }
      } catch (const std::logic_error& e) {
        if (dynamic_cast<const DomainError*>(&e)) throw;
        throw DomainError("calibration line " + std::to_string(lineno) + ": bad number " + val);
      }
    }
    if (!have_c) throw DomainError("calibration line " + std::to_string(lineno) + ": missing C");
    t.entries_[id] = c;
  }
  return t;
}

CalibrationTable CalibrationTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open calibration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string CalibrationTable::serialize() const {
  std::ostringstream os;
  os << "# landau_ee calibration constants version=" << version << "\n";
  char buf[64];
  for (const auto& [id, c] : entries_) {
    os << id;
    std::snprintf(buf, sizeof buf, " C=%.10e", c.C);
    os << buf;
    std::snprintf(buf, sizeof buf, " beta=%.10e", c.beta);
    os << buf << " grid_hash=" << (c.grid_hash.empty() ? "none" : c.grid_hash) << "\n";
  }
  return os.str();
}

void CalibrationTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write calibration file " + path);
  out << serialize();
}

const BoundConstants& CalibrationTable::at(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw DomainError("calibration table has no bound " + id);
  return it->second;
}

}  // namespace landau_ee
