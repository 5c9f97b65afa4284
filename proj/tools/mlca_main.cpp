#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mlca/data.hpp"
#include "mlca/experiment.hpp"
#include "mlca/learner.hpp"
#include "mlca/metrics.hpp"
#include "mlca/model_io.hpp"

namespace {

using namespace mlca;

struct ModelOpts {
  std::string variant = "mlca";
  double v_threshold = 0.10;
  int lambda = 50;
  int n_y = 10;
};

struct DataOpts {
  std::string arff;
  std::string label_spec;
  std::string features_csv;
  std::string labels_csv;
};

void add_model_opts(CLI::App* sub, ModelOpts& m) {
  sub->add_option("--variant", m.variant, "mlca, mlca-i, or mlca-c")->capture_default_str();
  sub->add_option("--v-threshold", m.v_threshold, "vigilance threshold in (0,1)")
      ->capture_default_str();
  sub->add_option("--lambda", m.lambda, "bandwidth estimation window length")
      ->capture_default_str();
  sub->add_option("--ny", m.n_y, "winner neighborhood size")->capture_default_str();
}

void add_data_opts(CLI::App* sub, DataOpts& d) {
  sub->add_option("--arff", d.arff, "ARFF file holding features and labels");
  sub->add_option("--label-spec", d.label_spec, "text file naming the label attributes");
  sub->add_option("--features-csv", d.features_csv, "numeric CSV of features");
  sub->add_option("--labels-csv", d.labels_csv, "0/1 CSV of labels");
}

Params make_params(const ModelOpts& m) {
  Params p;
  p.v_threshold = m.v_threshold;
  p.lambda = m.lambda;
  p.n_y = m.n_y;
  p.validate();
  return p;
}

Dataset load_dataset(const DataOpts& d) {
  const bool arff = !d.arff.empty() || !d.label_spec.empty();
  const bool csv = !d.features_csv.empty() || !d.labels_csv.empty();
  if (arff == csv) {
    throw ConfigError("provide either --arff with --label-spec or --features-csv with --labels-csv");
  }
  if (arff) {
    if (d.arff.empty() || d.label_spec.empty()) {
      throw ConfigError("--arff and --label-spec go together");
    }
    return load_arff_multilabel(d.arff, d.label_spec);
  }
  if (d.features_csv.empty() || d.labels_csv.empty()) {
    throw ConfigError("--features-csv and --labels-csv go together");
  }
  return load_csv(d.features_csv, d.labels_csv);
}

void write_report(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw DataError("cannot open '" + out + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + out + "'");
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string gshort(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_compatible(const MlcaModel& model, const Dataset& ds) {
  if (ds.size() == 0) throw DataError("empty test set");
  if (ds.label_count() != model.label_count()) {
    throw DataError("label vocabulary mismatch: dataset has " + std::to_string(ds.label_count()) +
                    ", model has " + std::to_string(model.label_count()));
  }
  if (ds.dim() != model.dim()) {
    throw DataError("feature dimension mismatch: dataset has " + std::to_string(ds.dim()) +
                    ", model has " + std::to_string(model.dim()));
  }
}

void cmd_train(const ModelOpts& mo, const DataOpts& dopt, int epochs, std::uint64_t seed,
               const std::string& resume, const std::string& model_out, bool params_given) {
  Dataset ds = load_dataset(dopt);
  MlcaModel model = [&] {
    if (resume.empty()) return MlcaModel(parse_variant(mo.variant), make_params(mo));
    if (params_given) {
      throw ConfigError("--model resumes a saved model; --variant/--v-threshold/--lambda/--ny "
                        "are fixed at its original values");
    }
    return load_model(resume);
  }();
  model.train_epochs(ds.instances, epochs, seed);
  if (static_cast<std::size_t>(model.label_count()) == ds.label_names.size()) {
    model.rename_labels(ds.label_names);
  }
  save_model(model, model_out);
  std::cerr << "trained instances=" << ds.size() << " epochs=" << epochs
            << " nodes=" << model.node_count() << " labels=" << model.label_count() << " -> "
            << model_out << "\n";
}

void cmd_predict(const std::string& model_path, const DataOpts& dopt, const std::string& out) {
  const MlcaModel model = load_model(model_path);
  std::vector<Vector> feats;
  if (!dopt.features_csv.empty() && dopt.labels_csv.empty() && dopt.arff.empty()) {
    feats = load_features_csv(dopt.features_csv);
  } else {
    Dataset ds = load_dataset(dopt);
    feats.reserve(ds.size());
    for (auto& inst : ds.instances) feats.push_back(std::move(inst.features));
  }

  std::ostringstream buf;
  for (Eigen::Index i = 0; i < model.label_count(); ++i) {
    buf << (i ? "," : "") << "p_" << model.label_names()[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < model.label_count(); ++i) {
    buf << ",y_" << model.label_names()[static_cast<std::size_t>(i)];
  }
  buf << "\n";
  for (const Vector& x : feats) {
    const Prediction pred = model.predict(x);
    for (Eigen::Index i = 0; i < pred.posterior.size(); ++i) {
      buf << (i ? "," : "") << full_precision(pred.posterior[i]);
    }
    for (Eigen::Index i = 0; i < pred.labels.size(); ++i) buf << "," << pred.labels[i];
    buf << "\n";
  }
  write_report(out, buf.str());
  std::cerr << "predicted instances=" << feats.size() << " labels=" << model.label_count()
            << "\n";
}

void cmd_eval(const std::string& model_path, const DataOpts& dopt, const std::string& format,
              const std::string& out) {
  const MlcaModel model = load_model(model_path);
  const Dataset ds = load_dataset(dopt);
  check_compatible(model, ds);

  const auto n = static_cast<Eigen::Index>(ds.size());
  const Eigen::Index n_labels = model.label_count();
  Matrix scores(n, n_labels);
  BinaryMatrix pred(n, n_labels);
  BinaryMatrix truth(n, n_labels);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& inst = ds.instances[static_cast<std::size_t>(r)];
    const Prediction p = model.predict(inst.features);
    scores.row(r) = p.posterior.transpose();
    pred.row(r) = p.labels.transpose();
    truth.row(r) = inst.labels.transpose();
  }

  EvalReport rep = evaluate(scores, pred, truth);
  rep.node_count = static_cast<std::int64_t>(model.node_count());
  rep.label_count = n_labels;
  write_report(out, format == "lines" ? rep.to_lines() : rep.to_table());
  std::cerr << "evaluated instances=" << ds.size() << " nodes=" << model.node_count() << "\n";
}

void cmd_grid_search(const ModelOpts& mo, const DataOpts& dopt, int epochs, std::uint64_t seed,
                     std::vector<double> v_values, const std::string& format,
                     const std::string& out) {
  Dataset ds = load_dataset(dopt);
  if (v_values.empty()) {
    v_values.push_back(0.01);
    for (int i = 1; i <= 19; ++i) v_values.push_back(0.05 * i);
  }

  struct Row {
    double v;
    double em;
    std::size_t nodes;
  };
  std::vector<Row> rows;
  const Variant variant = parse_variant(mo.variant);
  for (double v : v_values) {
    ModelOpts cell = mo;
    cell.v_threshold = v;
    MlcaModel model(variant, make_params(cell));
    model.train_epochs(ds.instances, epochs, seed);

    // The selection metric is Exact Match on the training instances themselves.
    const auto n = static_cast<Eigen::Index>(ds.size());
    const Eigen::Index n_labels = model.label_count();
    BinaryMatrix pred(n, n_labels);
    BinaryMatrix truth(n, n_labels);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& inst = ds.instances[static_cast<std::size_t>(r)];
      pred.row(r) = model.predict(inst.features).labels.transpose();
      truth.row(r).setZero();
      truth.row(r).head(inst.labels.size()) = inst.labels.transpose();
    }
    rows.push_back({v, exact_match(pred, truth), model.node_count()});
    std::cerr << "grid v=" << gshort(v) << " exact_match=" << fixed6(rows.back().em)
              << " nodes=" << rows.back().nodes << "\n";
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.em != b.em) return a.em > b.em;
    return a.v < b.v;
  });

  std::ostringstream buf;
  if (format == "lines") {
    for (const Row& r : rows) {
      buf << "v=" << gshort(r.v) << " exact_match=" << fixed6(r.em) << " nodes=" << r.nodes
          << "\n";
    }
  } else {
    char line[128];
    std::snprintf(line, sizeof line, "%-12s %-12s %s\n", "v_threshold", "exact_match", "nodes");
    buf << line;
    for (const Row& r : rows) {
      std::snprintf(line, sizeof line, "%-12s %-12s %zu\n", gshort(r.v).c_str(),
                    fixed6(r.em).c_str(), r.nodes);
      buf << line;
    }
  }
  buf << "best_v=" << gshort(rows.front().v) << "\n";
  write_report(out, buf.str());
}

void cmd_continual(const std::string& scenario_name, const ModelOpts& mo, std::size_t n_per_dist,
                   std::size_t test_per_phase, std::uint64_t seed, const std::string& model_out,
                   const std::string& format, const std::string& out) {
  const Scenario sc = parse_scenario(scenario_name);
  const StreamScenario scen = generate_synthetic(sc, n_per_dist, seed);
  MlcaModel model(parse_variant(mo.variant), make_params(mo));
  const std::vector<PhaseReport> reports = run_continual(model, scen, test_per_phase, seed);
  if (!model_out.empty()) save_model(model, model_out);

  std::ostringstream buf;
  if (format == "lines") {
    for (const PhaseReport& r : reports) {
      buf << "phase=" << r.phase << " vocab=" << r.vocab << " nodes=" << r.nodes
          << " exact_match=" << fixed6(r.exact_match)
          << " hamming_loss=" << fixed6(r.hamming_loss) << "\n";
    }
  } else {
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %-6s %-7s %-12s %s\n", "phase", "vocab", "nodes",
                  "exact_match", "hamming_loss");
    buf << line;
    for (const PhaseReport& r : reports) {
      std::snprintf(line, sizeof line, "%-6d %-6lld %-7zu %-12s %s\n", r.phase,
                    static_cast<long long>(r.vocab), r.nodes, fixed6(r.exact_match).c_str(),
                    fixed6(r.hamming_loss).c_str());
      buf << line;
    }
  }
  write_report(out, buf.str());
  std::size_t trained = 0;
  for (const Phase& p : scen.phases) trained += p.block.size();
  std::cerr << "scenario=" << to_string(sc) << " phases=" << scen.phases.size()
            << " instances=" << trained << " nodes=" << model.node_count() << "\n";
}

void cmd_synth(const std::string& scenario_name, std::size_t n_per_dist, std::uint64_t seed,
               const std::string& out_dir) {
  const Scenario sc = parse_scenario(scenario_name);
  const StreamScenario scen = generate_synthetic(sc, n_per_dist, seed);
  for (std::size_t p = 0; p < scen.phases.size(); ++p) {
    const std::string stem =
        out_dir + "/" + to_string(sc) + "_phase" + std::to_string(p + 1);
    write_csv(scen.phases[p].block, stem + "_features.csv", stem + "_labels.csv");
    std::cerr << "wrote " << stem << "_features.csv and " << stem << "_labels.csv ("
              << scen.phases[p].block.size() << " instances, vocab " << scen.phases[p].vocab
              << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continual multi-label prototype classifier"};
  app.require_subcommand(1);

  ModelOpts train_mo, grid_mo, cont_mo;
  DataOpts train_data, pred_data, eval_data, grid_data;
  std::string train_resume, train_model_out;
  std::string pred_model, pred_out;
  std::string eval_model, eval_format = "table", eval_out;
  std::string grid_format = "table", grid_out;
  std::vector<double> grid_vs;
  std::string cont_scenario, cont_model_out, cont_format = "table", cont_out;
  std::string synth_scenario, synth_dir = ".";
  int train_epochs = 1, grid_epochs = 1;
  std::uint64_t train_seed = 1, grid_seed = 1, cont_seed = 1, synth_seed = 1;
  std::size_t cont_n = 10000, cont_test = 1000, synth_n = 10000;

  CLI::App* train = app.add_subcommand("train", "Train on a labeled dataset and save the model");
  add_model_opts(train, train_mo);
  add_data_opts(train, train_data);
  train->add_option("--epochs", train_epochs, "training passes over the data")
      ->capture_default_str();
  train->add_option("--seed", train_seed, "shuffle seed for epochs past the first")
      ->capture_default_str();
  train->add_option("--model", train_resume, "resume training from this saved model");
  train->add_option("--model-out", train_model_out, "where to write the trained model")
      ->required();
  train->callback([&] {
    const bool params_given = train->count("--variant") || train->count("--v-threshold") ||
                              train->count("--lambda") || train->count("--ny");
    cmd_train(train_mo, train_data, train_epochs, train_seed, train_resume, train_model_out,
              params_given);
  });

  CLI::App* predict = app.add_subcommand("predict", "Write per-instance posteriors and labels");
  predict->add_option("--model", pred_model, "saved model")->required();
  add_data_opts(predict, pred_data);
  predict->add_option("--out", pred_out, "output CSV (default: standard output)");
  predict->callback([&] { cmd_predict(pred_model, pred_data, pred_out); });

  CLI::App* eval = app.add_subcommand("eval", "Score a model on a labeled dataset");
  eval->add_option("--model", eval_model, "saved model")->required();
  add_data_opts(eval, eval_data);
  eval->add_option("--format", eval_format, "table or lines")
      ->check(CLI::IsMember({"table", "lines"}))
      ->capture_default_str();
  eval->add_option("--out", eval_out, "report file (default: standard output)");
  eval->callback([&] { cmd_eval(eval_model, eval_data, eval_format, eval_out); });

  CLI::App* grid = app.add_subcommand(
      "grid-search", "Train once per vigilance candidate, rank by training-set Exact Match");
  add_model_opts(grid, grid_mo);
  add_data_opts(grid, grid_data);
  grid->add_option("--v-values", grid_vs, "candidate thresholds (default 0.01 and 0.05..0.95)")
      ->delimiter(',');
  grid->add_option("--epochs", grid_epochs, "training passes per candidate")
      ->capture_default_str();
  grid->add_option("--seed", grid_seed, "shuffle seed for epochs past the first")
      ->capture_default_str();
  grid->add_option("--format", grid_format, "table or lines")
      ->check(CLI::IsMember({"table", "lines"}))
      ->capture_default_str();
  grid->add_option("--out", grid_out, "report file (default: standard output)");
  grid->callback([&] {
    cmd_grid_search(grid_mo, grid_data, grid_epochs, grid_seed, grid_vs, grid_format, grid_out);
  });

  CLI::App* cont = app.add_subcommand(
      "continual", "Stream a synthetic scenario phase by phase, evaluating cumulatively");
  cont->add_option("--scenario", cont_scenario, "stationary, seq3, or seq7")->required();
  add_model_opts(cont, cont_mo);
  cont->add_option("--n-per-dist", cont_n, "training draws per distribution")
      ->capture_default_str();
  cont->add_option("--test-per-phase", cont_test, "fresh test draws per phase")
      ->capture_default_str();
  cont->add_option("--seed", cont_seed, "generator seed")->capture_default_str();
  cont->add_option("--model-out", cont_model_out, "optionally save the final model");
  cont->add_option("--format", cont_format, "table or lines")
      ->check(CLI::IsMember({"table", "lines"}))
      ->capture_default_str();
  cont->add_option("--out", cont_out, "report file (default: standard output)");
  cont->callback([&] {
    cmd_continual(cont_scenario, cont_mo, cont_n, cont_test, cont_seed, cont_model_out,
                  cont_format, cont_out);
  });

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic scenario as CSV phase files");
  synth->add_option("--scenario", synth_scenario, "stationary, seq3, or seq7")->required();
  synth->add_option("--n-per-dist", synth_n, "training draws per distribution")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--out-dir", synth_dir, "directory for the CSV files")
      ->capture_default_str();
  synth->callback([&] { cmd_synth(synth_scenario, synth_n, synth_seed, synth_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const mlca::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mlca::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const mlca::ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
