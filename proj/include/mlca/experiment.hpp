#pragma once

#include <cstdint>
#include <vector>

#include "mlca/data.hpp"
#include "mlca/learner.hpp"

namespace mlca {

// Cumulative continual-learning protocol: train each phase block in order;
// after each phase, evaluate on fresh draws from every phase seen so far,
// with truth truncated to the label vocabulary in force at measurement time.
struct PhaseReport {
  int phase = 0;           // 1-based
  Eigen::Index vocab = 0;  // labels known after this phase
  std::size_t nodes = 0;
  double exact_match = 0.0;  // over the union of all seen phases' draws
  double hamming_loss = 0.0;
  std::vector<double> exact_match_by_source;  // one entry per seen phase
  // Exact Match on the phase-1 test block scored as the phase-1 task: truth
  // and predictions both restricted to the labels that existed after phase 1.
  // Comparing this value across phases isolates forgetting from vocabulary
  // growth.
  double first_task_em = 0.0;
};

std::vector<PhaseReport> run_continual(MlcaModel& model, const StreamScenario& scenario,
                                       std::size_t test_per_phase, std::uint64_t seed);

}  // namespace mlca
