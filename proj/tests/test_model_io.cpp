#include "doctest.h"

#include "mlca/data.hpp"
#include "mlca/learner.hpp"
#include "mlca/model_io.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct TempDir {
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("mlca_io_test_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
  fs::path path;
};

mlca::MlcaModel trained_model(mlca::Variant variant) {
  mlca::MlcaModel m(variant, mlca::Params{});
  const mlca::StreamScenario scen = mlca::generate_synthetic(mlca::Scenario::kStationary, 40, 5);
  for (const mlca::LabeledInstance& inst : scen.phases[0].block.instances) {
    m.train_step(inst.features, inst.labels);
  }
  return m;
}

std::vector<mlca::Vector> probe_points(int n) {
  std::vector<mlca::Vector> probes;
  mlca::Rng rng = mlca::make_rng(6, 0);
  for (int i = 0; i < n; ++i) {
    mlca::Vector v(2);
    v[0] = mlca::uniform_in(rng, 0.0, 3.0);
    v[1] = mlca::uniform_in(rng, 0.0, 3.0);
    probes.push_back(std::move(v));
  }
  return probes;
}

// Parses, applies `mutate`, and re-serializes a trained base model's document.
template <typename F>
std::string tampered(const std::string& text, F mutate) {
  nlohmann::json j = nlohmann::json::parse(text);
  mutate(j);
  return j.dump();
}

}  // namespace

TEST_CASE("a reloaded model is indistinguishable from the original") {
  for (mlca::Variant v :
       {mlca::Variant::kBase, mlca::Variant::kIndividual, mlca::Variant::kClustered}) {
    CAPTURE(mlca::to_string(v));
    const mlca::MlcaModel original = trained_model(v);
    const std::string text = mlca::model_to_json(original);
    const mlca::MlcaModel reloaded = mlca::model_from_json(text);

    CHECK(mlca::model_to_json(reloaded) == text);
    CHECK(reloaded.variant() == original.variant());
    CHECK(reloaded.node_count() == original.node_count());
    CHECK(reloaded.instances_seen() == original.instances_seen());
    CHECK(reloaded.label_names() == original.label_names());
    for (const mlca::Vector& x : probe_points(10)) {
      const mlca::Prediction a = original.predict(x);
      const mlca::Prediction b = reloaded.predict(x);
      REQUIRE(a.posterior == b.posterior);
      REQUIRE(a.labels == b.labels);
    }
  }
}

TEST_CASE("clustered models keep their attribute grouping across a reload") {
  const mlca::MlcaModel original = trained_model(mlca::Variant::kClustered);
  REQUIRE(original.grouping().has_value());
  const mlca::MlcaModel reloaded = mlca::model_from_json(mlca::model_to_json(original));
  REQUIRE(reloaded.grouping().has_value());
  CHECK(reloaded.grouping()->assignments() == original.grouping()->assignments());
}

TEST_CASE("training resumes in lockstep after a save/load cycle") {
  const mlca::StreamScenario scen = mlca::generate_synthetic(mlca::Scenario::kSeq3, 60, 13);
  std::vector<mlca::LabeledInstance> stream;
  for (const mlca::Phase& p : scen.phases) {
    stream.insert(stream.end(), p.block.instances.begin(), p.block.instances.end());
  }
  REQUIRE(stream.size() == 180);

  mlca::MlcaModel uninterrupted(mlca::Variant::kBase, mlca::Params{});
  for (const auto& inst : stream) uninterrupted.train_step(inst.features, inst.labels);

  mlca::MlcaModel first_half(mlca::Variant::kBase, mlca::Params{});
  for (std::size_t i = 0; i < 137; ++i) {
    first_half.train_step(stream[i].features, stream[i].labels);
  }
  mlca::MlcaModel resumed = mlca::model_from_json(mlca::model_to_json(first_half));
  for (std::size_t i = 137; i < stream.size(); ++i) {
    resumed.train_step(stream[i].features, stream[i].labels);
  }

  CHECK(mlca::model_to_json(resumed) == mlca::model_to_json(uninterrupted));
  for (const mlca::Vector& x : probe_points(10)) {
    REQUIRE(resumed.predict(x).posterior == uninterrupted.predict(x).posterior);
  }
}

TEST_CASE("an untrained model survives the round trip") {
  const mlca::MlcaModel empty(mlca::Variant::kIndividual, mlca::Params{0.2, 7, 4});
  const std::string text = mlca::model_to_json(empty);
  mlca::MlcaModel reloaded = mlca::model_from_json(text);
  CHECK(mlca::model_to_json(reloaded) == text);
  CHECK(reloaded.node_count() == 0);
  CHECK(reloaded.dim() == -1);
  CHECK(reloaded.params().lambda == 7);
  // And it is still trainable.
  mlca::Vector x(3);
  x << 1.0, 2.0, 3.0;
  mlca::LabelVector y(1);
  y << 1;
  reloaded.train_step(x, y);
  CHECK(reloaded.node_count() == 1);
}

TEST_CASE("documents that are not valid model snapshots are data errors") {
  const std::string good = mlca::model_to_json(trained_model(mlca::Variant::kBase));

  SUBCASE("not JSON at all") {
    CHECK_THROWS_WITH_AS(mlca::model_from_json("{nope"), doctest::Contains("not valid JSON"),
                         mlca::DataError);
  }
  SUBCASE("unknown format version") {
    const std::string text = tampered(good, [](nlohmann::json& j) { j["format_version"] = 2; });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text),
                         doctest::Contains("only version 1 is supported"), mlca::DataError);
  }
  SUBCASE("missing sections name the field") {
    const std::string text = tampered(good, [](nlohmann::json& j) { j.erase("nodes"); });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("missing 'nodes'"),
                         mlca::DataError);
    const std::string text2 =
        tampered(good, [](nlohmann::json& j) { j["params"].erase("v_threshold"); });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text2), doctest::Contains("missing 'v_threshold'"),
                         mlca::DataError);
  }
  SUBCASE("out-of-range parameters are rejected on load") {
    const std::string text =
        tampered(good, [](nlohmann::json& j) { j["params"]["v_threshold"] = 2.0; });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("params"),
                         mlca::DataError);
  }
  SUBCASE("label tallies cannot exceed the node's win count") {
    const std::string text = tampered(good, [](nlohmann::json& j) {
      j["nodes"][0]["beta"][0] = j["nodes"][0]["alpha"].get<std::int64_t>() + 1;
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("[0, alpha]"),
                         mlca::DataError);
  }
  SUBCASE("the window length must match the training position") {
    const std::string text = tampered(good, [](nlohmann::json& j) {
      j["window"].erase(j["window"].size() - 1);
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("window"),
                         mlca::DataError);
  }
  SUBCASE("event-count rows must all carry the same mass") {
    const std::string text = tampered(good, [](nlohmann::json& j) {
      j["counters"]["c_pos"][1][0] = j["counters"]["c_pos"][1][0].get<std::int64_t>() + 1;
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text),
                         doctest::Contains("does not sum to n_events"), mlca::DataError);
  }
  SUBCASE("negative counts are rejected") {
    const std::string text =
        tampered(good, [](nlohmann::json& j) { j["counters"]["c_neg"][0][0] = -1; });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("non-negative"),
                         mlca::DataError);
  }
  SUBCASE("the event total cannot exceed the instance total") {
    const std::string text = tampered(good, [](nlohmann::json& j) {
      const auto n_seen = j["n_seen"].get<std::int64_t>();
      const auto delta = n_seen + 5 - j["counters"]["n_events"].get<std::int64_t>();
      j["counters"]["n_events"] = n_seen + 5;
      // Keep rows consistent so the range check is what fires.
      for (auto& row : j["counters"]["c_neg"]) {
        row[0] = row[0].get<std::int64_t>() + delta;
      }
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("[0, n_seen]"),
                         mlca::DataError);
  }
  SUBCASE("node bandwidths must match the variant") {
    const std::string text = tampered(good, [](nlohmann::json& j) {
      j["nodes"][0]["sigma"].erase("scalar");
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text), doctest::Contains("nodes[0].sigma"),
                         mlca::DataError);
  }
  SUBCASE("clustered documents need one group id per attribute") {
    const std::string ctext = mlca::model_to_json(trained_model(mlca::Variant::kClustered));
    const std::string text = tampered(ctext, [](nlohmann::json& j) {
      j["grouping"].erase(j["grouping"].size() - 1);
    });
    CHECK_THROWS_WITH_AS(mlca::model_from_json(text),
                         doctest::Contains("one group id per attribute"), mlca::DataError);
  }
}

TEST_CASE("model files") {
  TempDir tmp;
  const mlca::MlcaModel m = trained_model(mlca::Variant::kBase);
  const std::string path = tmp.file("model.json");
  mlca::save_model(m, path);
  const mlca::MlcaModel loaded = mlca::load_model(path);
  CHECK(mlca::model_to_json(loaded) == mlca::model_to_json(m));

  CHECK_THROWS_WITH_AS(mlca::load_model(tmp.file("absent.json")), doctest::Contains("cannot open"),
                       mlca::DataError);
  CHECK_THROWS_WITH_AS(mlca::save_model(m, tmp.file("no_such_dir/model.json")),
                       doctest::Contains("for writing"), mlca::DataError);
}
