#ifndef PCOR_ACCEPTANCE_HARNESS_HPP
#define PCOR_ACCEPTANCE_HARNESS_HPP

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace acceptance {

/// Collects assertion outcomes and published (non-asserted) figures for one
/// criterion.
class Checker {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) problems_.push_back(what);
  }

  template <typename A, typename B>
  void check_le(A a, B b, const std::string& what) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    check(a <= b, os.str());
  }

  template <typename A, typename B>
  void check_ge(A a, B b, const std::string& what) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    check(a >= b, os.str());
  }

  template <typename A, typename B>
  void check_eq(A a, B b, const std::string& what) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    check(a == b, os.str());
  }

  /// A figure the criterion publishes without asserting.
  void note(const std::string& line) { notes_.push_back(line); }

  bool passed() const { return problems_.empty(); }
  int checks() const { return checks_; }
  const std::vector<std::string>& problems() const { return problems_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int checks_ = 0;
  std::vector<std::string> problems_;
  std::vector<std::string> notes_;
};

struct Criterion {
  int number;
  std::string name;
  std::function<void(Checker&)> run;
};

}  // namespace acceptance

#endif  // PCOR_ACCEPTANCE_HARNESS_HPP
