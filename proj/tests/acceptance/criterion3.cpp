// Rank bijection: for every compressed buffer of the twelve evaluation
// kernels, the strided diagonals (stride 1, 2, 3) and the sub-triangle, and
// every binding of the symbols it depends on over {1..8}, rank maps the
// lexicographically ordered accessed points onto 0, 1, ..., size - 1.
#include <iostream>

#include "kernel_suite.hpp"
#include "report.hpp"

using namespace polypack;

int main() {
  acceptance::Clock clock;
  std::size_t buffers = 0, bindings = 0, points = 0, failures = 0;
  std::string first_failure;
  for (const auto& name : suite::all_kernels()) {
    for (auto level : {Compression::Input, Compression::InputOutput}) {
      const auto plan = suite::compile(name, level).plan;
      for (const auto& buf : plan.registry.buffers) {
        if (buf.dense) continue;
        ++buffers;
        const auto& f = buf.index;
        CompiledPiecewise rank(f.rank, [&] {
          SlotMap s;
          for (const auto& d : f.accessed.dims) s.add(d);
          for (const auto& p : f.accessed.params) s.add(p);
          return s;
        }());
        for (const auto& partial : acceptance::all_bindings(acceptance::relevant_params(f))) {
          ++bindings;
          const Binding b = acceptance::complete(partial, f.accessed.params);
          const auto pts = oracle::points(f.accessed, b);
          points += pts.size();
          bool ok = f.size.evaluate_or(b, 0) == static_cast<std::int64_t>(pts.size());
          std::vector<std::int64_t> values(f.accessed.dims.size() + f.accessed.params.size());
          for (std::size_t k = 0; k < f.accessed.params.size(); ++k) {
            values[f.accessed.dims.size() + k] = b.at(f.accessed.params[k]);
          }
          for (std::size_t r = 0; ok && r < pts.size(); ++r) {
            std::copy(pts[r].begin(), pts[r].end(), values.begin());
            // Lex order of points is sorted order, so rank must equal position.
            ok = rank.try_eval(values) == static_cast<std::int64_t>(r);
            if (ok && r % 7 == 0) ok = f.rank.evaluate(oracle::with_point(b, f.accessed.dims, pts[r])) ==
                                       static_cast<std::int64_t>(r);
          }
          if (!ok && failures++ == 0) {
            first_failure = name + "/" + buf.tensor + " at";
            for (const auto& [k, val] : b) first_failure += " " + k + "=" + std::to_string(val);
          }
        }
      }
    }
  }
  const double t = clock.seconds();
  std::string detail = std::to_string(buffers) + " buffers, " + std::to_string(bindings) + " bindings, " +
                       std::to_string(points) + " points";
  if (failures) detail += ", " + std::to_string(failures) + " failures, first " + first_failure;
  return acceptance::report(3, failures == 0 && t < 60.0, detail, clock);
}
