#pragma once

#include "mlca/common.hpp"

#include <string>
#include <vector>

namespace mlca {

struct Dataset {
  std::vector<LabeledInstance> instances;
  std::vector<std::string> label_names;
  std::vector<std::string> attr_names;
  std::string provenance;

  Eigen::Index dim() const { return instances.empty() ? 0 : instances.front().features.size(); }
  Eigen::Index label_count() const { return static_cast<Eigen::Index>(label_names.size()); }
  std::size_t size() const { return instances.size(); }
};

// Mulan-style pair: ARFF file holding features and labels as attributes, plus
// a plain-text spec naming the label attributes (one per line, spec order =
// label order). Accepted attribute types: numeric/real/integer and the {0,1}
// nominal; dense and sparse ({index value, ...}) data rows; '?' is rejected.
Dataset load_arff_multilabel(const std::string& arff_path, const std::string& label_spec_path);

// Two numeric CSV files with equal row counts; a header row is detected per
// file (any non-numeric first-line cell). Label cells must be 0 or 1.
Dataset load_csv(const std::string& features_path, const std::string& labels_path);

// Features-only variant for prediction inputs; same header detection.
std::vector<Vector> load_features_csv(const std::string& path);

void write_arff(const Dataset& ds, const std::string& arff_path);
void write_label_spec(const Dataset& ds, const std::string& spec_path);
void write_csv(const Dataset& ds, const std::string& features_path,
               const std::string& labels_path);

enum class Scenario { kStationary, kSeq3, kSeq7 };
Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario s);

// One training block plus the label-vocabulary size in force while it streams.
struct Phase {
  Dataset block;
  Eigen::Index vocab;
};

struct StreamScenario {
  Scenario kind;
  std::vector<Phase> phases;
  std::uint64_t seed = 0;
};

// Three overlapping uniform squares S1=[0,2]x[0,2], S2=[1,3]x[0,2],
// S3=[0.5,2.5]x[1,3]; a point's label is its membership vector over
// (S1,S2,S3), giving the seven region label sets
//   A=(1,0,0) B=(0,1,0) C=(1,1,0) D=(1,0,1) E=(1,1,1) F=(0,1,1) G=(0,0,1).
// stationary: one shuffled phase of all 3*n draws, 3-bit labels.
// seq3: the three squares in order, vocabulary growing 1 -> 2 -> 3.
// seq7: the same draws partitioned by region, blocks A..G, vocabulary
//       1,2,2,3,3,3,3 (bit 2 first appears with B, bit 3 with D).
StreamScenario generate_synthetic(Scenario scenario, std::size_t n_per_dist, std::uint64_t seed);

// Fresh evaluation draws for one phase of a scenario, full 3-bit truth:
// stationary = equal-weight square mixture; seq3 = the phase's square;
// seq7 = rejection-sampled points of the phase's region.
Dataset synthetic_test_block(Scenario scenario, std::size_t phase, std::size_t n,
                             std::uint64_t seed);

// Membership vector over (S1,S2,S3) and the region id 0..6 (A..G), -1 outside.
LabelVector square_membership(double x, double y);
int region_of(double x, double y);

// Truncates every label vector (and the name list) to the first k labels.
void truncate_labels(Dataset& ds, Eigen::Index k);

// repeats*folds test-index lists, ordered repeat-major; within a repeat the
// folds partition [0,n). Stratification-free, deterministic under seed.
std::vector<std::vector<std::size_t>> split_cv(std::size_t n, int folds, int repeats,
                                               std::uint64_t seed);

}  // namespace mlca
