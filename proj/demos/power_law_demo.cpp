// Simulates a host and a faster-growing parasite technology, fits the
// log-log evolution model and prints the report.

#include <iostream>

#include "parasitech/parasitech.hpp"

int main() {
  using namespace parasitech;

  sim::SimConfig config;
  config.host = LogisticParams::from_midpoint(100.0, 0.05, 2060.0);
  config.parasites = {LogisticParams::from_midpoint(100.0, 0.087, 2025.0)};
  config.t_start = 1920.0;
  config.t_end = 1963.0;
  config.n_points = 44;
  config.noise_sigma = 0.03;
  config.seed = 7;

  const auto system = sim::simulate_pair(config);
  const auto law = derive_power_law(config.host, config.parasites.front());
  std::cout << "generating law: P = " << law.A << " * H^" << law.B << "\n\n";

  ReportRequest request{system.host, system.parasites, true, false};
  const auto report = build_report(request, ReportOptions{});
  std::cout << io::render_report(report, io::ReportFormat::text);
}
