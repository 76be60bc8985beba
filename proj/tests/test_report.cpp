#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "frozen.hpp"
#include "gbf/csv.hpp"
#include "gbf/report.hpp"
#include "gbf/selection.hpp"
#include "gbf/shrinkage.hpp"
#include "gbf/simbench.hpp"

using gbf::Criterion;
using gbf::Hyperparams;
using gbf::ModelId;
using gbf::SelectionConfig;
using gbf::StandardizedDesign;
using gbf::standardize;
using nlohmann::json;

namespace {

gbf::SelectionResult reference_result() {
  const StandardizedDesign d = standardize(frozen::d1());
  SelectionConfig cfg;
  cfg.top_k = 4;
  return gbf::rank_models(d, cfg);
}

}  // namespace

TEST_CASE("selection reports are self-describing json") {
  const auto res = reference_result();
  const std::string text = gbf::selection_json(res);
  const json doc = json::parse(text);

  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("kind") == "selection");
  CHECK(doc.at("criterion") == "gbf");
  CHECK(double(doc.at("hyper").at("a")) == doctest::Approx(-0.75));
  CHECK(doc.at("hyper").at("nu") == "paper");
  CHECK(doc.at("n") == 8);
  CHECK(doc.at("p") == 3);
  CHECK(doc.at("models_scored") == 8);
  REQUIRE(doc.at("models").is_array());
  REQUIRE(doc.at("models").size() == 4);
  const auto& top = doc.at("models").at(0);
  CHECK(top.at("rank") == 1);
  CHECK(top.at("model") == "x2+x3");
  CHECK(top.at("bitmask") == 6);
  CHECK(top.at("q") == 2);
  CHECK(double(top.at("score")) == doctest::Approx(frozen::mask6_log_gbf).epsilon(1e-10));
  CHECK(double(top.at("posterior")) == doctest::Approx(frozen::d1_posterior[6]).epsilon(1e-8));
  REQUIRE(doc.at("inclusion").is_object());
  CHECK(double(doc.at("inclusion").at("x2")) ==
        doctest::Approx(frozen::d1_inclusion[1]).epsilon(1e-8));

  // run-invariance: no timing in the payload, repeated calls identical
  CHECK(text.find("wall") == std::string::npos);
  CHECK(text.find("seconds") == std::string::npos);
  CHECK(gbf::selection_json(res) == text);
}

TEST_CASE("ranking tables and csv share the json content") {
  const auto res = reference_result();
  const std::string csv = gbf::selection_csv(res);
  CHECK(csv.rfind("rank,model,bitmask,q,score,posterior,r2,cond", 0) == 0);
  // header + 4 entries
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("x2+x3") != std::string::npos);

  const std::string table = gbf::selection_table(res);
  CHECK(table.find("x2+x3") != std::string::npos);
  CHECK(table.find("posterior") != std::string::npos);

  // information criteria drop the posterior column
  const StandardizedDesign d = standardize(frozen::d1());
  SelectionConfig cfg;
  cfg.criterion = Criterion::bic;
  cfg.top_k = 2;
  const std::string icsv = gbf::selection_csv(gbf::rank_models(d, cfg));
  CHECK(icsv.rfind("rank,model,bitmask,q,score,r2,cond", 0) == 0);
}

TEST_CASE("null models print a readable placeholder") {
  gbf::RawDataset ds = frozen::d2();
  ds.y.resize(8);
  ds.y << 1, -1, -1, 1, 1, -1, -1, 1;
  ds.y.array() += 5.0;
  SelectionConfig cfg;
  cfg.top_k = 1;
  const auto res = gbf::rank_models(standardize(ds), cfg);
  const json doc = json::parse(gbf::selection_json(res));
  CHECK(doc.at("models").at(0).at("model") == "(null)");
  CHECK(doc.at("models").at(0).at("bitmask") == 0);
}

TEST_CASE("estimate reports carry the component weights") {
  const StandardizedDesign d = standardize(frozen::d1());
  Hyperparams paper;
  const auto sp = gbf::model_spectrum(d, ModelId{0b101});
  const auto st = gbf::fit_statistics(sp, paper, d.n);
  const auto fit = gbf::fitted_values(sp, d, gbf::shrink_factor(st, paper), paper);

  const json doc = json::parse(gbf::estimate_json(fit, d, paper));
  CHECK(doc.at("kind") == "estimate");
  CHECK(doc.at("model") == "x1+x3");
  CHECK(doc.at("q") == 2);
  CHECK(double(doc.at("shrink_factor")) == doctest::Approx(frozen::m13_H).epsilon(1e-10));
  REQUIRE(doc.at("component_weights").size() == 2);
  CHECK(double(doc.at("component_weights").at(0)) ==
        doctest::Approx(frozen::m13_weights[0]).epsilon(1e-10));
  REQUIRE(doc.at("fitted").size() == 8);
  CHECK(double(doc.at("fitted").at(3)) == doctest::Approx(frozen::m13_fitted[3]).epsilon(1e-10));

  const std::string csv = gbf::estimate_csv(fit);
  CHECK(csv.rfind("obs,fitted", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(gbf::estimate_table(fit, d).find("shrink factor") != std::string::npos);
}

TEST_CASE("benchmark and trend reports expose the headline numbers") {
  gbf::Scenario sc;
  sc.kind = gbf::ScenarioKind::simple;
  sc.n = 25;
  sc.p = 5;
  sc.true_set = ModelId{0b00011};
  sc.reps = 5;
  sc.seed = 71;
  SelectionConfig cfg;
  const auto rep = gbf::run_replications(sc, {Criterion::gbf, Criterion::aic}, cfg);
  const std::string text = gbf::bench_json(rep);
  const json doc = json::parse(text);
  CHECK(doc.at("kind") == "benchmark");
  CHECK(doc.at("scenario").at("kind") == "simple");
  CHECK(doc.at("scenario").at("n") == 25);
  CHECK(doc.at("scenario").at("reps") == 5);
  CHECK(doc.at("scenario").at("seed") == 71);
  CHECK(doc.at("scenario").at("true_set") == json::array({1, 2}));
  REQUIRE(doc.at("criteria").is_object());
  REQUIRE(doc.at("criteria").contains("gbf"));
  const auto& g = doc.at("criteria").at("gbf");
  CHECK(g.contains("freq_first"));
  CHECK(g.contains("pred_mean"));
  CHECK(g.at("size_freq").size() == 6);
  CHECK(g.at("rel_rank").contains("mean"));
  CHECK(doc.contains("oracle"));
  CHECK(text.find("wall") == std::string::npos);
  CHECK(gbf::bench_table(rep).find("gbf") != std::string::npos);

  const auto rows = gbf::consistency_sweep(sc, {15, 25}, cfg);
  const json trend = json::parse(gbf::trend_json(rows, sc, cfg.hp));
  CHECK(trend.at("kind") == "consistency");
  REQUIRE(trend.at("trend").size() == 2);
  CHECK(trend.at("trend").at(0).at("n") == 15);
  CHECK(trend.at("trend").at(1).at("freq_first").is_number());
  CHECK(gbf::trend_table(rows).find("15") != std::string::npos);
}

TEST_CASE("csv loader round-trips a small file") {
  const std::string path = "report_roundtrip_tmp.csv";
  {
    std::ofstream out(path);
    out << "y,x1,x2\n1.5,0.25,-3\n2.5,1.25,4\n0.5,-0.75,2\n3.5,2.,0\n";
  }
  const gbf::RawDataset ds = gbf::load_csv(path, "y");
  CHECK(ds.n() == 4);
  CHECK(ds.p() == 2);
  CHECK(ds.names == std::vector<std::string>{"x1", "x2"});
  CHECK(ds.y(1) == 2.5);
  CHECK(ds.X(3, 0) == 2.0);

  const gbf::RawDataset dropped = gbf::load_csv(path, "y", {"x2"});
  CHECK(dropped.p() == 1);

  CHECK_THROWS_AS(gbf::load_csv(path, "nope"), gbf::Error);
  std::remove(path.c_str());
}
