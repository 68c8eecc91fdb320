#include "collapse/generators.hpp"

#include <array>

namespace collapse {

const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::free:
      return "free";
    case Stratum::c1:
      return "c1";
    case Stratum::c2:
      return "c2";
    case Stratum::homogeneous:
      return "homogeneous";
    case Stratum::c2_homogeneous:
      return "c2_homogeneous";
  }
  return "?";
}

namespace {

int weight(Rng& rng) { return std::uniform_int_distribution<int>(1, 20)(rng); }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t k = 1; k <= n; ++k) v.push_back(std::to_string(k));
  return v;
}

// n pmfs over ny levels.
std::vector<std::vector<Rational>> pmfs(Rng& rng, std::size_t n, std::size_t ny) {
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(ny));
  for (auto& p : out) {
    Rational sum = 0;
    for (auto& v : p) sum += (v = weight(rng));
    for (auto& v : p) v /= sum;
  }
  return out;
}

}  // namespace

TableShape random_shape(Rng& rng, bool binary_w) {
  TableShape s;
  s.ny = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  s.nx = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  s.nw = binary_w ? 2 : std::uniform_int_distribution<std::size_t>(2, 4)(rng);
  return s;
}

DiscreteJoint random_table(Rng& rng, Stratum stratum, TableShape shape) {
  const std::size_t ny = shape.ny, nx = shape.nx, nw = shape.nw;
  std::vector<Rational> counts(ny * nx * nw);
  auto at = [&](std::size_t y, std::size_t x, std::size_t w) -> Rational& { return counts[(y * nx + x) * nw + w]; };

  switch (stratum) {
    case Stratum::free:
      for (auto& c : counts) c = weight(rng);
      break;
    case Stratum::c1: {
      const auto py = pmfs(rng, nx, ny);  // P(y|x)
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t w = 0; w < nw; ++w) {
          const int m = weight(rng);  // mass of (x, w)
          for (std::size_t y = 0; y < ny; ++y) at(y, x, w) = m * py[x][y];
        }
      break;
    }
    case Stratum::c2: {
      std::vector<int> px(nx), pw(nw);
      for (auto& v : px) v = weight(rng);
      for (auto& v : pw) v = weight(rng);
      const auto py = pmfs(rng, nx * nw, ny);  // P(y|x,w)
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t w = 0; w < nw; ++w)
          for (std::size_t y = 0; y < ny; ++y) at(y, x, w) = px[x] * pw[w] * py[x * nw + w][y];
      break;
    }
    case Stratum::homogeneous:
    case Stratum::c2_homogeneous: {
      const auto u = pmfs(rng, nw, ny);
      const auto v = pmfs(rng, nx, ny);
      std::vector<int> px(nx), pw(nw);
      for (auto& c : px) c = weight(rng);
      for (auto& c : pw) c = weight(rng);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t w = 0; w < nw; ++w) {
          const Rational m = stratum == Stratum::c2_homogeneous ? Rational(px[x] * pw[w]) : Rational(weight(rng));
          for (std::size_t y = 0; y < ny; ++y) at(y, x, w) = m * (u[w][y] + v[x][y]) / 2;
        }
      break;
    }
  }
  return DiscreteJoint::from_counts(labels(ny), labels(nx), labels(nw), std::move(counts));
}

ModelPtr random_ci_yw(Rng& rng) {
  return make_model("ci-yw", {{"beta", uniform(rng, -2.0, 2.0)},
                              {"sigma", uniform(rng, 0.5, 2.0)},
                              {"w_mean", uniform(rng, -1.0, 1.0)},
                              {"w_slope", uniform(rng, -1.0, 1.0)},
                              {"w_sd", uniform(rng, 0.5, 1.5)}});
}

ModelPtr random_indep_xw(Rng& rng) {
  return make_model("indep-xw", {{"alpha1", uniform(rng, -1.0, 1.0)},
                                 {"alpha2", uniform(rng, -1.0, 1.0)},
                                 {"alpha3", uniform(rng, -1.0, 1.0)},
                                 {"sigma", uniform(rng, 0.5, 2.0)},
                                 {"w_mean", uniform(rng, -1.0, 1.0)},
                                 {"w_sd", uniform(rng, 0.5, 1.5)}});
}

ModelPtr random_linear_interaction(Rng& rng) {
  return make_model("linear-interaction", {{"alpha1", uniform(rng, -1.0, 1.0)},
                                           {"alpha2", uniform(rng, -1.0, 1.0)},
                                           {"alpha3", uniform(rng, -1.0, 1.0)},
                                           {"sigma", uniform(rng, 0.5, 2.0)},
                                           {"w_mean", uniform(rng, -1.0, 1.0)},
                                           {"w_slope", uniform(rng, -1.0, 1.0)},
                                           {"w_sd", uniform(rng, 0.5, 1.5)}});
}

std::optional<DiscreteJoint> find_reversal_table(std::uint64_t seed, int max_count, std::size_t max_tries) {
  Rng rng(seed);
  std::uniform_int_distribution<int> cell(1, max_count);
  for (std::size_t t = 0; t < max_tries; ++t) {
    std::array<int, 8> c{};  // [y][x][w]
    for (auto& v : c) v = cell(rng);
    auto n = [&](int y, int x, int w) { return static_cast<double>(c[(y * 2 + x) * 2 + w]); };
    // P(Y = first level | x, w) and | x, the CDF at the lower Y level.
    auto f = [&](int x, int w) { return n(0, x, w) / (n(0, x, w) + n(1, x, w)); };
    auto fm = [&](int x) { return (n(0, x, 0) + n(0, x, 1)) / (n(0, x, 0) + n(0, x, 1) + n(1, x, 0) + n(1, x, 1)); };
    const double d0 = f(1, 0) - f(0, 0), d1 = f(1, 1) - f(0, 1), dm = fm(1) - fm(0);
    const bool reversed = (d0 > 0 && d1 > 0 && dm < 0) || (d0 < 0 && d1 < 0 && dm > 0);
    if (!reversed) continue;
    std::vector<Rational> counts(c.begin(), c.end());
    return DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"}, std::move(counts));
  }
  return std::nullopt;
}

}  // namespace collapse
