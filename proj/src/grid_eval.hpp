#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/collapse.hpp"
#include "collapse/error.hpp"

namespace collapse::detail {

// Runs f over every (y, x) grid point; DomainErrors become skipped points.
template <class T, class F>
std::vector<std::optional<T>> over_yx(const CheckContext& ctx, F&& f, std::vector<std::string>& skips) {
  const std::size_t nx = ctx.grid.xs.size();
  struct Slot {
    std::optional<T> value;
    std::string skip;
  };
  auto slots = evaluate_indexed<Slot>(
      ctx.grid.ys.size() * nx,
      [&](std::size_t k) {
        Slot s;
        try {
          s.value = f(ctx.grid.ys[k / nx], ctx.grid.xs[k % nx]);
        } catch (const DomainError& e) {
          s.skip = e.what();
        }
        return s;
      },
      ctx.exec);
  std::vector<std::optional<T>> out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    if (!s.skip.empty()) skips.push_back(std::move(s.skip));
    out.push_back(std::move(s.value));
  }
  return out;
}

}  // namespace collapse::detail
