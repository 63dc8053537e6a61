#include "imprint/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace imprint {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Vertex {
  std::vector<double> x;
  double f;
};

class Search {
 public:
  Search(const std::function<double(const std::vector<double>&)>& f, const NelderMeadOptions& opt)
      : f_(f), opt_(opt) {}

  double eval(const std::vector<double>& x) {
    ++evaluations_;
    const double v = f_(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  // One simplex run from `start` (whose value is already known).
  bool run(Vertex& best) {
    const std::size_t n = best.x.size();
    std::vector<Vertex> simplex;
    simplex.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      Vertex v{best.x, 0.0};
      v.x[i] += opt_.initial_step;
      v.f = eval(v.x);
      if (!std::isfinite(v.f)) {
        v.x[i] = best.x[i] - opt_.initial_step;
        v.f = eval(v.x);
      }
      simplex.push_back(std::move(v));
    }

    bool converged = false;
    std::vector<double> centroid(n);
    auto point = [&](double coef, const std::vector<double>& worst) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (worst[j] - centroid[j]);
      return p;
    };

    while (evaluations_ < opt_.max_evaluations) {
      std::stable_sort(simplex.begin(), simplex.end(),
                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      const double fbest = simplex.front().f;
      const double fworst = simplex.back().f;
      double diameter = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          diameter = std::max(diameter, std::abs(simplex[i].x[j] - simplex[0].x[j]));
        }
      }
      if (std::isfinite(fworst) &&
          fworst - fbest <= opt_.f_tolerance * (std::abs(fbest) + 1e-12) &&
          diameter <= opt_.x_tolerance) {
        converged = true;
        break;
      }
      if (diameter <= 1e-14) {
        converged = std::isfinite(fworst);
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      Vertex& worst = simplex.back();
      const double fsecond = simplex[n - 1].f;
      Vertex reflected{point(-kReflect, worst.x), 0.0};
      reflected.f = eval(reflected.x);
      if (reflected.f < fbest) {
        Vertex expanded{point(-kReflect * kExpand, worst.x), 0.0};
        expanded.f = eval(expanded.x);
        worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
        continue;
      }
      if (reflected.f < fsecond) {
        worst = std::move(reflected);
        continue;
      }
      const bool outside = reflected.f < worst.f;
      Vertex contracted{point(outside ? -kReflect * kContract : kContract, worst.x), 0.0};
      contracted.f = eval(contracted.x);
      if (contracted.f < std::min(reflected.f, worst.f)) {
        worst = std::move(contracted);
        continue;
      }
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          simplex[i].x[j] = simplex[0].x[j] + kShrink * (simplex[i].x[j] - simplex[0].x[j]);
        }
        simplex[i].f = eval(simplex[i].x);
      }
    }
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (simplex.front().f < best.f) best = simplex.front();
    return converged;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const std::function<double(const std::vector<double>&)>& f_;
  NelderMeadOptions opt_;
  std::size_t evaluations_ = 0;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
  Search search(f, options);
  Vertex best{std::move(start), 0.0};
  best.f = search.eval(best.x);
  NelderMeadResult out;
  if (best.x.empty()) {
    out.x = best.x;
    out.value = best.f;
    out.evaluations = search.evaluations();
    out.converged = true;
    return out;
  }
  bool converged = search.run(best);
  NelderMeadOptions restart = options;
  for (int r = 0; r < options.restarts && search.evaluations() < options.max_evaluations; ++r) {
    restart.initial_step = std::max(options.initial_step * 0.1, 1e-4);
    Search again(f, restart);
    const double before = best.f;
    converged = again.run(best) && converged;
    out.evaluations += again.evaluations();
    if (!(best.f < before)) break;
  }
  out.x = best.x;
  out.value = best.f;
  out.evaluations += search.evaluations();
  out.converged = converged;
  return out;
}

}  // namespace imprint
