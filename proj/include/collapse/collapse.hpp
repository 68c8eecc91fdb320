#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/dependence.hpp"
#include "collapse/model.hpp"
#include "collapse/parallel.hpp"
#include "collapse/verdict.hpp"

namespace collapse {

enum class Independence { y_w_given_x, x_w };

const char* to_string(Independence which);

// Grid, tolerance and numerical settings shared by the continuous checks.
struct CheckContext {
  EvalGrid grid;
  double tolerance = 1e-6;
  NumericOptions numeric{};
  Execution exec = Execution::parallel;
};

// 1e-3 for support-clamped families, 1e-6 otherwise.
double default_tolerance(const ContinuousModel& model);

struct ClassMembership {
  bool in_C_H = false;  // homogeneous
  bool in_C_W = false;  // collapsible
  bool in_C_A = false;  // A-collapsible
  bool in_C1 = false;   // Y independent of W given X
  bool in_C2 = false;   // X independent of W
};

// Containment failures: C_W within C_H and C_A, and C_H with C_A inside C_W.
std::vector<std::string> lattice_violations(const ClassMembership& m);

struct SufficiencyNecessity {
  Verdict c1, c2, a_collapsible;
  bool binary_w = false;
  bool sufficiency_consistent = true;
  std::optional<bool> necessity_consistent;  // only evaluated for binary W
  std::string status;
};

// ---------------------------------------------------------------------------
// Discrete tables (exact)

Verdict check_homogeneity(const DiscreteJoint& joint);
Verdict check_collapsibility(const DiscreteJoint& joint);
Verdict check_uniform_collapsibility(const DiscreteJoint& joint);
Verdict check_A_collapsibility(const DiscreteJoint& joint);
Verdict check_independence(const DiscreteJoint& joint, Independence which);
Verdict detect_reversal(const DiscreteJoint& joint);
SufficiencyNecessity sufficiency_necessity(const DiscreteJoint& joint);
ClassMembership class_membership(const DiscreteJoint& joint);

// ---------------------------------------------------------------------------
// Continuous models on a grid

Verdict check_homogeneity(const DependenceField& conditional, double tolerance);
Verdict check_collapsibility(const DependenceField& conditional, const DependenceField& marginal, double tolerance);
Verdict detect_reversal(const DependenceField& conditional, const DependenceField& marginal, double tolerance);

// int F(y|x,w) df(w|x)/dx dw.
double residual_integral(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

struct ACollapsibility {
  Verdict verdict;             // |E_{W|x} F_x(y|x,W) - F_x(y|x)|
  double max_residual = 0.0;   // max |residual_integral| over the same points
};

ACollapsibility check_A_collapsibility(const ContinuousModel& model, const CheckContext& ctx);
Verdict check_residual(const ContinuousModel& model, const CheckContext& ctx);
Verdict check_density_A_collapsibility(const ContinuousModel& model, const CheckContext& ctx);
Verdict check_independence(const ContinuousModel& model, Independence which, const CheckContext& ctx);
SufficiencyNecessity sufficiency_necessity(const ContinuousModel& model, const CheckContext& ctx);
ClassMembership class_membership(const ContinuousModel& model, const CheckContext& ctx);

}  // namespace collapse
