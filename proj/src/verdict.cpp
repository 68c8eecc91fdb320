#include "collapse/verdict.hpp"

#include <cmath>

namespace collapse {

ViolationTracker::ViolationTracker(std::string property, double tolerance, std::string method)
    : property_(std::move(property)), tolerance_(tolerance), method_(std::move(method)) {}

ViolationTracker ViolationTracker::exact(std::string property, std::string method) {
  ViolationTracker t(std::move(property), 0.0, std::move(method));
  t.exact_ = true;
  return t;
}

void ViolationTracker::observe(double violation, const std::function<Witness()>& witness) {
  if (std::isnan(violation)) {
    skip("violation not computable (NaN)");
    return;
  }
  ++observed_;
  if (observed_ == 1 || violation > max_) {
    max_ = violation;
    witness_ = witness();
  }
}

void ViolationTracker::observe(const Rational& violation, const std::function<Witness()>& witness) {
  ++observed_;
  if (observed_ == 1 || violation > max_exact_) {
    max_exact_ = violation;
    max_ = to_double(violation);
    witness_ = witness();
  }
}

void ViolationTracker::skip(const std::string& reason) {
  if (skipped_++ == 0) first_skip_ = reason;
}

Verdict ViolationTracker::finish() const {
  Verdict v;
  v.property = property_;
  v.tolerance = tolerance_;
  v.method = method_;
  v.exact = exact_;
  v.notes = notes_;
  v.max_violation = max_;
  if (exact_) {
    v.exact_violation = max_exact_;
    v.holds = max_exact_ == 0;
  } else {
    v.holds = max_ <= tolerance_;
  }
  if (!v.holds) v.witness = witness_;
  if (skipped_) {
    v.notes.push_back(std::to_string(skipped_) + " point(s) skipped; first: " + first_skip_);
  }
  if (observed_ == 0) {
    v.applicable = false;
    v.notes.push_back("no point could be evaluated");
  }
  return v;
}

Verdict not_applicable(std::string property, std::string reason) {
  Verdict v;
  v.property = std::move(property);
  v.applicable = false;
  v.notes.push_back(std::move(reason));
  return v;
}

}  // namespace collapse
