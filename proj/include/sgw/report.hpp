#ifndef SGW_REPORT_HPP
#define SGW_REPORT_HPP

#include <string>
#include <vector>

namespace sgw {

/// One numerical check: the measured residual against the tolerance it was
/// tested with.
struct CheckEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
  bool informational = false;  // reported, not part of pass()
};

/// Structured pass/fail record. `pass()` is true iff every entry passed.
struct VerificationReport {
  std::string subject;
  std::vector<CheckEntry> entries;

  void add(std::string name, double residual, double tolerance, std::string note = {}) {
    const bool ok = residual <= tolerance;
    entries.push_back({std::move(name), residual, tolerance, ok, std::move(note)});
  }
  void add_info(std::string name, double residual, double tolerance, std::string note = {}) {
    const bool ok = residual <= tolerance;
    entries.push_back({std::move(name), residual, tolerance, ok, std::move(note), true});
  }
  void add_flag(std::string name, bool ok, std::string note = {}) {
    entries.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(note)});
  }
  void merge(const VerificationReport& other) {
    for (const auto& e : other.entries) {
      auto copy = e;
      copy.name = other.subject.empty() ? e.name : other.subject + "/" + e.name;
      entries.push_back(std::move(copy));
    }
  }
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass && !e.informational) return false;
    return true;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = e.residual > m ? e.residual : m;
    return m;
  }
};

}  // namespace sgw

#endif  // SGW_REPORT_HPP
