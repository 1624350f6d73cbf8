#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/micro/rve_problem.hpp"

namespace rebarflow::micro {

/// Seepage law wbar(g, rho_b) from cell solves, one per Darcy element
/// evaluation. Results are cached by the exact bit pattern of (g, rho_b);
/// Bingham cell solves warm-start from the element's previous solution.
/// With a nonzero `rotation` the cells are rotated by that angle in the
/// macro frame; inputs and outputs are transformed accordingly.
class HomogenizedLaw : public fem::DarcyLaw {
 public:
  explicit HomogenizedLaw(std::shared_ptr<const RveProblem> rve, int threads = 1, double rotation = 0.0);

  Response evaluate_one(int element, const Vec2& gradient, const Vec2& body);
  std::vector<Response> evaluate(std::span<const int> elements, std::span<const Vec2> gradients,
                                 const Vec2& body) override;
  long solve_count() const override { return solves_.load(); }
  long cache_hits() const { return hits_.load(); }

  const RveProblem& rve() const { return *rve_; }
  int threads() const { return threads_; }

  double rotation() const { return rotation_; }
  /// Rotation taking cell-frame vectors to the macro frame.
  const Mat2& frame() const { return frame_; }

  /// Cell solution for macro-frame (g, rho_b), warm-started from the
  /// element's last state. The solution lives in the cell frame.
  CellSolution cell_solution(int element, const Vec2& gradient, const Vec2& body);

 private:
  using Key = std::array<std::uint64_t, 4>;
  static Key make_key(const Vec2& g, const Vec2& b);

  Response evaluate_cell_frame(int element, const Vec2& gradient, const Vec2& body);
  CellSolution solve_cell_frame(int element, const Vec2& gradient, const Vec2& body);

  std::shared_ptr<const RveProblem> rve_;
  int threads_ = 1;
  double rotation_ = 0.0;
  Mat2 frame_ = Mat2::Identity();
  std::mutex mutex_;
  std::map<Key, Response> cache_;
  std::unordered_map<int, std::shared_ptr<const CellSolution>> warm_;
  std::atomic<long> solves_{0};
  std::atomic<long> hits_{0};
};

}  // namespace rebarflow::micro
