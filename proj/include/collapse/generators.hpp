#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "collapse/families.hpp"
#include "collapse/model.hpp"

namespace collapse {

using Rng = std::mt19937_64;

// Construction class of a random table.
//   free            independent positive counts
//   c1              Y independent of W given X
//   c2              X independent of W
//   homogeneous     P(y|x,w) = (u_w(y) + v_x(y)) / 2
//   c2_homogeneous  both of the last two
enum class Stratum { free, c1, c2, homogeneous, c2_homogeneous };

const char* to_string(Stratum s);

struct TableShape {
  std::size_t ny = 2, nx = 2, nw = 2;
};

// 2-3 levels of Y and X, 2-4 of W (2 when binary_w), so 8 to 36 cells.
TableShape random_shape(Rng& rng, bool binary_w);

// Positive rational counts built from integer weights in [1, 20].
DiscreteJoint random_table(Rng& rng, Stratum stratum, TableShape shape);

// Gaussian families with random parameters.
ModelPtr random_ci_yw(Rng& rng);
ModelPtr random_indep_xw(Rng& rng);
ModelPtr random_linear_interaction(Rng& rng);

// Searches binary 2x2x2 integer tables with counts in [1, max_count] for a
// Yule-Simpson reversal; nullopt if max_tries draws find none.
std::optional<DiscreteJoint> find_reversal_table(std::uint64_t seed, int max_count = 100,
                                                 std::size_t max_tries = 1'000'000);

}  // namespace collapse
