#include "mlca/experiment.hpp"

#include "mlca/metrics.hpp"

namespace mlca {

std::vector<PhaseReport> run_continual(MlcaModel& model, const StreamScenario& scenario,
                                       std::size_t test_per_phase, std::uint64_t seed) {
  require(test_per_phase > 0, "run_continual: test_per_phase must be positive");
  const std::size_t n_phases = scenario.phases.size();
  std::vector<Dataset> draws;
  draws.reserve(n_phases);
  std::vector<PhaseReport> reports;
  reports.reserve(n_phases);

  for (std::size_t p = 0; p < n_phases; ++p) {
    for (const LabeledInstance& inst : scenario.phases[p].block.instances) {
      model.train_step(inst.features, inst.labels);
    }
    draws.push_back(synthetic_test_block(scenario.kind, p, test_per_phase, seed));

    const Eigen::Index vocab = model.label_count();
    const auto rows = static_cast<Eigen::Index>((p + 1) * test_per_phase);
    BinaryMatrix pred(rows, vocab);
    BinaryMatrix truth(rows, vocab);
    Eigen::Index r = 0;
    for (std::size_t q = 0; q <= p; ++q) {
      for (const LabeledInstance& inst : draws[q].instances) {
        pred.row(r) = model.predict(inst.features).labels.transpose();
        truth.row(r) = inst.labels.head(vocab).transpose();
        ++r;
      }
    }

    PhaseReport rep;
    rep.phase = static_cast<int>(p) + 1;
    rep.vocab = vocab;
    rep.nodes = model.node_count();
    rep.exact_match = exact_match(pred, truth);
    rep.hamming_loss = hamming_loss(pred, truth);
    for (std::size_t q = 0; q <= p; ++q) {
      const auto lo = static_cast<Eigen::Index>(q * test_per_phase);
      const auto nq = static_cast<Eigen::Index>(test_per_phase);
      rep.exact_match_by_source.push_back(
          exact_match(pred.middleRows(lo, nq), truth.middleRows(lo, nq)));
    }

    const Eigen::Index first_vocab = reports.empty() ? vocab : reports.front().vocab;
    const auto nq = static_cast<Eigen::Index>(test_per_phase);
    rep.first_task_em = exact_match(pred.topRows(nq).leftCols(first_vocab),
                                    truth.topRows(nq).leftCols(first_vocab));
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace mlca
