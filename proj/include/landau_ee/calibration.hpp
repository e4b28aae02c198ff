#pragma once

#include <map>
#include <string>
#include <string_view>

namespace landau_ee {

// Fitted constant of one error or magnitude bound.
struct BoundConstants {
  double C = 1.0;
  double beta = 0.0;
  std::string grid_hash;
};

// Immutable-after-load table of fitted bound constants, keyed by bound id.
// Text format, one entry per line:  <bound_id> C=<value> beta=<value> grid_hash=<hex>
// Lines starting with '#' are comments; the first comment may carry "version=<n>".
class CalibrationTable {
 public:
  static const CalibrationTable& builtin();
  static CalibrationTable parse(std::string_view text);
  static CalibrationTable load(const std::string& path);

  std::string serialize() const;
  void save(const std::string& path) const;

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  const BoundConstants& at(const std::string& id) const;
  void set(const std::string& id, BoundConstants c) { entries_[id] = std::move(c); }
  const std::map<std::string, BoundConstants>& entries() const { return entries_; }

  int version = 1;

 private:
  std::map<std::string, BoundConstants> entries_;
};

// 64-bit FNV-1a of a grid description, rendered as 16 hex digits.
std::string grid_hash(std::string_view description);

namespace bound_id {
inline constexpr const char* kBesselSmall = "g_bessel_small";
inline constexpr const char* kOscillatoryBulk = "g_oscillatory_bulk";
inline constexpr const char* kAiryTransition = "g_airy_transition";
inline constexpr const char* kExponentialTail = "g_exponential_tail";
}  // namespace bound_id

}  // namespace landau_ee
