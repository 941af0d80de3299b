// Serial reference vs OpenMP path for each parallel kernel. Prints wall time
// of both, the speedup, and the largest absolute disagreement.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <vector>

#include "strassen/finite_n.hpp"
#include "strassen/ldp.hpp"
#include "strassen/mdp.hpp"
#include "strassen/parallel.hpp"
#include "strassen/transport.hpp"
#include "strassen/types.hpp"

using namespace strassen;

namespace {

template <class F>
double seconds(F&& f, std::vector<double>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<std::vector<double>(Exec)>& kernel) {
  std::vector<double> serial, parallel;
  clear_inner_cost_cache();
  const double ts = seconds([&] { return kernel(Exec::serial); }, serial);
  clear_inner_cost_cache();
  const double tp = seconds([&] { return kernel(Exec::parallel); }, parallel);
  double diff = 0.0;
  for (std::size_t i = 0; i < std::min(serial.size(), parallel.size()); ++i)
    if (serial[i] != parallel[i]) diff = std::max(diff, std::abs(serial[i] - parallel[i]));
  if (serial.size() != parallel.size()) diff = INFINITY;
  fmt::print("{:<28} {:>10.4f} {:>10.4f} {:>8.2f} {:>12.3g}\n", name, ts, tp, ts / tp, diff);
}

}  // namespace

int main() {
  const Dist px = Dist::bernoulli(0.1), py = Dist::bernoulli(0.5);
  const CostMatrix ham = CostMatrix::hamming(2);
  const Dist p3({0.2, 0.3, 0.5}), q3({0.4, 0.4, 0.2});
  const CostMatrix c3(Table::from_rows({{0.0, 0.7, 1.0}, {0.4, 0.0, 0.6}, {1.0, 0.3, 0.0}}));

  fmt::print("threads: {}\n", thread_budget());
  fmt::print("{:<28} {:>10} {:>10} {:>8} {:>12}\n", "kernel", "serial_s", "parallel_s", "speedup", "max_diff");

  row("inner_cost_table k=3 n=40", [&](Exec e) {
    const auto tx = enum_types(40, 3), ty = enum_types(40, 3);
    const auto t = inner_cost_table(tx, ty, c3, e);
    return std::vector<double>(t->data().begin(), t->data().end());
  });
  row("exponent_series binary", [&](Exec e) {
    std::vector<double> out;
    for (const auto& r : exponent_series(px, py, ham, [](int) { return 0.2; }, {50, 100, 200, 400, 800}, Tail::lower, e))
      out.push_back(r.exponent);
    return out;
  });
  row("optimal_support 6x6", [&](Exec e) {
    const Dist a({0.1, 0.2, 0.15, 0.25, 0.2, 0.1}), b({0.3, 0.1, 0.1, 0.2, 0.2, 0.1});
    Table t(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) t(i, j) = std::abs(double(i) - double(j)) * 0.5;
    const auto s = optimal_support(a, b, CostMatrix(t), 1e-9, e);
    std::vector<double> out;
    for (auto [x, y] : s.cells()) out.push_back(double(x * 6 + y));
    return out;
  });
  row("rate_g 3x3", [&](Exec e) {
    RateOptions opt;
    opt.exec = e;
    return std::vector<double>{rate_g({p3, q3, c3, 0.45}, opt)};
  });
  row("rate_f 3x3", [&](Exec e) {
    RateOptions opt;
    opt.exec = e;
    return std::vector<double>{rate_f({p3, q3, c3, 0.05}, opt)};
  });
  row("mdp_rate_upper 3x3", [&](Exec e) {
    MdpOptions opt;
    opt.exec = e;
    return std::vector<double>{mdp_rate_upper(p3, q3, c3, 1.0, opt)};
  });
  return 0;
}
