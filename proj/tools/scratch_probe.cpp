// Throwaway probe used while sizing the case study; not installed.
#include <chrono>
#include <cstdio>

#include "flexroc/casestudy.hpp"
#include "flexroc/runner.hpp"

using namespace flexroc;

int main(int argc, char** argv) {
  int umin = 4, umax = 8;
  if (argc > 1) umin = std::atoi(argv[1]);
  if (argc > 2) umax = std::atoi(argv[2]);
  for (int u = umin; u <= umax; ++u) {
    CaseStudyParams p = CaseStudyParams::compact_preset();
    p.window_size = u;
    ScenarioConfig cfg = generate_building_case(p);
    for (int scheme : {1, 2, 3}) {
      auto t0 = std::chrono::steady_clock::now();
      RunReport rep = run_scheme(cfg, scheme);
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("u=%2d scheme=%d status=%-10s gamma=%2d rows=%6lld nodes=%6ld lp_iters=%8ld wall=%8.3fs scen=%llu viol=%zu\n",
                  u, scheme, to_string(rep.status).c_str(), rep.gamma_star, rep.model_rows,
                  rep.stats.nodes, rep.stats.lp_iterations, dt, rep.scenarios_checked,
                  rep.verification ? rep.verification->violations.size() : 0);
      std::fflush(stdout);
    }
  }
  return 0;
}
