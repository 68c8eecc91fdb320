#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collapse/rational.hpp"

namespace collapse {

// Where a check attains its largest violation. Continuous checks fill
// `point`, discrete ones `cells`; `values` holds the compared quantities.
struct Witness {
  std::vector<std::pair<std::string, double>> point;
  std::vector<std::pair<std::string, std::string>> cells;
  std::vector<std::pair<std::string, double>> values;
};

struct Verdict {
  std::string property;
  bool applicable = true;
  bool holds = true;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool exact = false;
  std::optional<Rational> exact_violation;
  std::optional<Witness> witness;  // present iff !holds
  std::string method;
  std::vector<std::string> notes;
};

// Running maximum of a violation over a grid. The first point reaching the
// maximum is kept as witness so results do not depend on evaluation order.
class ViolationTracker {
 public:
  ViolationTracker(std::string property, double tolerance, std::string method);
  static ViolationTracker exact(std::string property, std::string method);

  void observe(double violation, const std::function<Witness()>& witness);
  void observe(const Rational& violation, const std::function<Witness()>& witness);
  void note(std::string text) { notes_.push_back(std::move(text)); }
  void skip(const std::string& reason);
  std::size_t observed() const { return observed_; }

  Verdict finish() const;

 private:
  std::string property_;
  double tolerance_;
  std::string method_;
  bool exact_ = false;
  double max_ = 0.0;
  Rational max_exact_ = 0;
  std::optional<Witness> witness_;
  std::vector<std::string> notes_;
  std::size_t observed_ = 0;
  std::size_t skipped_ = 0;
  std::string first_skip_;
};

Verdict not_applicable(std::string property, std::string reason);

}  // namespace collapse
