#include "rebarflow/micro/homogenized_law.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace rebarflow::micro {

using constitutive::LawKind;

HomogenizedLaw::HomogenizedLaw(std::shared_ptr<const RveProblem> rve, int threads, double rotation)
    : rve_(std::move(rve)), threads_(std::max(1, threads)), rotation_(rotation) {
  if (!rve_) throw SolverError("homogenized law without a cell problem");
  const double c = std::cos(rotation), s = std::sin(rotation);
  frame_ << c, -s, s, c;
}

HomogenizedLaw::Key HomogenizedLaw::make_key(const Vec2& g, const Vec2& b) {
  return {std::bit_cast<std::uint64_t>(g.x()), std::bit_cast<std::uint64_t>(g.y()),
          std::bit_cast<std::uint64_t>(b.x()), std::bit_cast<std::uint64_t>(b.y())};
}

CellSolution HomogenizedLaw::cell_solution(int element, const Vec2& gradient, const Vec2& body) {
  return solve_cell_frame(element, frame_.transpose() * gradient, frame_.transpose() * body);
}

fem::DarcyLaw::Response HomogenizedLaw::evaluate_one(int element, const Vec2& gradient, const Vec2& body) {
  if (rotation_ == 0.0) return evaluate_cell_frame(element, gradient, body);
  const Response r = evaluate_cell_frame(element, frame_.transpose() * gradient, frame_.transpose() * body);
  return {frame_ * r.flux, frame_ * r.dflux_dgrad * frame_.transpose()};
}

CellSolution HomogenizedLaw::solve_cell_frame(int element, const Vec2& gradient, const Vec2& body) {
  std::shared_ptr<const CellSolution> warm;
  {
    std::lock_guard lock(mutex_);
    if (auto it = warm_.find(element); it != warm_.end()) warm = it->second;
  }
  CellSolution s = rve_->solve_cell(gradient, body, warm.get());
  ++solves_;
  if (rve_->law().kind() == LawKind::Bingham) {
    std::lock_guard lock(mutex_);
    warm_[element] = std::make_shared<const CellSolution>(s);
  }
  return s;
}

fem::DarcyLaw::Response HomogenizedLaw::evaluate_cell_frame(int element, const Vec2& gradient, const Vec2& body) {
  if (rve_->law().kind() == LawKind::Newtonian) {
    // Linear law: one permeability for every state.
    Mat2 k;
    {
      std::lock_guard lock(mutex_);
      const Key zero = make_key(Vec2::Zero(), Vec2::Zero());
      auto it = cache_.find(zero);
      if (it == cache_.end()) {
        const CellSolution s = rve_->solve_cell(Vec2::Zero(), Vec2::Zero());
        solves_ += 2;  // the two unit drives behind K
        it = cache_.emplace(zero, Response{Vec2::Zero(), -rve_->tangent_permeability(s)}).first;
      } else {
        ++hits_;
      }
      k = -it->second.dflux_dgrad;
    }
    return {k * (body - gradient), -k};
  }

  const Key key = make_key(gradient, body);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  Response r;
  try {
    const CellSolution s = solve_cell_frame(element, gradient, body);
    r.flux = rve_->seepage_flux(s);
    r.dflux_dgrad = -rve_->tangent_permeability(s);
  } catch (const SolverError& e) {
    throw SolverError("cell solve failed for Darcy element " + std::to_string(element) + ": " + e.what());
  }
  std::lock_guard lock(mutex_);
  cache_[key] = r;
  return r;
}

std::vector<fem::DarcyLaw::Response> HomogenizedLaw::evaluate(std::span<const int> elements,
                                                              std::span<const Vec2> gradients, const Vec2& body) {
  const std::size_t n = elements.size();
  std::vector<Response> out(n);
  const int workers = static_cast<int>(std::min<std::size_t>(threads_, n));
  if (workers <= 1 || rve_->law().kind() == LawKind::Newtonian) {
    for (std::size_t i = 0; i < n; ++i) out[i] = evaluate_one(elements[i], gradients[i], body);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) out[i] = evaluate_one(elements[i], gradients[i], body);
        } catch (...) {
          errors[w] = std::current_exception();
          next = n;
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace rebarflow::micro
