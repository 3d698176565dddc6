#include <cmath>
#include <cstdio>

#include "cot/drm.hpp"
#include "cot/generate.hpp"

int main() {
  cot::GenSpec spec;
  spec.family = cot::Family::kMarginal1D;
  spec.n = 10;
  const cot::ProblemInstance inst = cot::generate(spec).instance;
  cot::DrmConfig cfg;
  cfg.epsilon = 1e-2;
  const cot::DrmResult r = cot::drm_solve(inst, cfg);
  std::printf("converged=%d objective=%.6f\n", r.report.converged ? 1 : 0, cot::objective(inst.cost(), r.plan));
  return r.report.converged ? 0 : 1;
}
