#pragma once

#include "chevetlab/harness.hpp"

namespace chevetlab::detail {

void run_chevet_ratio(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_lone_scaling(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_gamma_km_scaling(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_tails(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_l1_sharpness(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_rotation_gap(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_rip_grid(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_latala_comparison(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_gamma_sandwich(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);
void run_net_audit(const ExperimentSpec& spec, unsigned workers, ExperimentReport& report);

/// N = ceil(e^(c n)) used by the sharpness and rotation experiments.
int exponential_width(int n, double c);

inline constexpr int kMaxExponentialWidth = 1'000'000;

}  // namespace chevetlab::detail
