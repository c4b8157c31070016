#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "mvpb/certify.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/errors.hpp"
#include "mvpb/io.hpp"
#include "support.hpp"

using namespace mvpb;

TEST_CASE("real formatting round-trips doubles") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(0.0) == "0");
  RngStream rng(88);
  for (int i = 0; i < 200; ++i) {
    double x = (rng.next_unit() - 0.5) * std::pow(10.0, i % 17);
    CHECK(std::stod(format_real(x)) == x);
  }
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
}

TEST_CASE("sample files round-trip") {
  RngStream rng(901);
  ViewSchema schema = mvpbtest::random_schema(rng, 2, 3, 3);
  FiniteDomain d = mvpbtest::random_domain(rng, schema, 7);
  SampleSet s = draw_sample(d, 25, true, 5);

  std::string text = write_sample_jsonl(s);
  CHECK(text.find("\"labeled\":true") != std::string::npos);
  SampleSet back = read_sample_jsonl(text);
  REQUIRE(back.size() == s.size());
  CHECK(back.labeled());
  CHECK(back.schema() == s.schema());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.point(i).views == s.point(i).views);
    CHECK(back.label(i) == s.label(i));
  }
  // Writing the parsed set reproduces the bytes.
  CHECK(write_sample_jsonl(back) == text);

  SampleSet bare = strip_labels(s);
  std::string bare_text = write_sample_jsonl(bare);
  SampleSet bare_back = read_sample_jsonl(bare_text);
  CHECK_FALSE(bare_back.labeled());
  CHECK(write_sample_jsonl(bare_back) == bare_text);
}

TEST_CASE("domain files round-trip with their role") {
  RngStream rng(902);
  ViewSchema schema = mvpbtest::random_schema(rng, 2, 2, 2);
  FiniteDomain d = mvpbtest::random_domain(rng, schema, 9);
  std::string text = write_domain_jsonl(d, "target");
  DomainFile back = read_domain_jsonl(text);
  CHECK(back.role == "target");
  REQUIRE(back.domain.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.domain.atom(i).point.views == d.atom(i).point.views);
    CHECK(back.domain.atom(i).label == d.atom(i).label);
    CHECK(back.domain.atom(i).probability == d.atom(i).probability);
  }
  CHECK(write_domain_jsonl(back.domain, back.role) == text);
}

TEST_CASE("ensemble files round-trip bit-exactly") {
  RngStream rng(903);
  ViewSchema schema = mvpbtest::random_schema(rng, 2, 3, 2);
  PosteriorEnsemble E = mvpbtest::random_ensemble(rng, schema, 2, 5);
  std::string text = write_ensemble_json(E);
  PosteriorEnsemble back = read_ensemble_json(text);

  REQUIRE(back.hypotheses.views.size() == E.hypotheses.views.size());
  for (std::size_t v = 0; v < E.hypotheses.views.size(); ++v) {
    REQUIRE(back.hypotheses.views[v].size() == E.hypotheses.views[v].size());
    for (std::size_t k = 0; k < E.hypotheses.views[v].size(); ++k)
      CHECK(back.hypotheses.views[v][k] == E.hypotheses.views[v][k]);
    for (std::size_t k = 0; k < E.posteriors[v].size(); ++k) {
      CHECK(back.posteriors[v][k] == E.posteriors[v][k]);
      CHECK(back.priors[v][k] == E.priors[v][k]);
    }
  }
  for (std::size_t v = 0; v < E.hyper_posterior.size(); ++v) {
    CHECK(back.hyper_posterior[v] == E.hyper_posterior[v]);
    CHECK(back.hyper_prior[v] == E.hyper_prior[v]);
  }
  CHECK(write_ensemble_json(back) == text);
}

TEST_CASE("malformed inputs raise schema mismatches") {
  CHECK_THROWS_AS(read_sample_jsonl("not json\n"), SchemaMismatch);
  CHECK_THROWS_AS(read_sample_jsonl(""), SchemaMismatch);
  CHECK_THROWS_AS(read_sample_jsonl("{\"labeled\":true}\n"), SchemaMismatch);
  // Row width disagrees with the header.
  CHECK_THROWS_AS(
      read_sample_jsonl("{\"schema\":{\"views\":1,\"dims\":[2]},\"labeled\":"
                        "false}\n{\"views\":[[1.0]]}\n"),
      SchemaMismatch);
  // Label on an unlabeled file.
  CHECK_THROWS_AS(
      read_sample_jsonl("{\"schema\":{\"views\":1,\"dims\":[1]},\"labeled\":"
                        "false}\n{\"views\":[[1.0]],\"label\":1}\n"),
      SchemaMismatch);
  // A sample file is not a domain file.
  CHECK_THROWS_AS(
      read_domain_jsonl("{\"schema\":{\"views\":1,\"dims\":[1]},\"labeled\":"
                        "true}\n"),
      SchemaMismatch);
  // Probabilities must form a simplex.
  CHECK_THROWS_AS(
      read_domain_jsonl(
          "{\"schema\":{\"views\":1,\"dims\":[1]},\"labeled\":true,\"kind\":"
          "\"domain\",\"role\":\"source\"}\n"
          "{\"views\":[[1.0]],\"label\":1,\"probability\":0.4}\n"),
      SchemaMismatch);
  CHECK_THROWS_AS(read_ensemble_json("{}"), SchemaMismatch);
  CHECK_THROWS_AS(read_ensemble_json("[1,2]"), SchemaMismatch);
}

TEST_CASE("missing files raise missing input") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/path/x.json"), MissingInput);
}

TEST_CASE("report csv has the fixed column order") {
  BoundParams p;
  p.m = 100;
  p.n = 50;
  p.delta = 0.05;
  BoundReport r = mcallester_bound(0.25, p);
  std::string csv = write_reports_csv({r});
  CHECK(csv.rfind("bound_id,m,n,delta,c,alpha,kl_posterior,kl_hyper,"
                  "emp_value,lambda,rhs,rhs_clamped,interval_lo,interval_hi,"
                  "vacuous\n",
                  0) == 0);
  CHECK(csv.find("mcallester,100,50,0.050000000000000003,1,1,0,0,0.25,0,") !=
        std::string::npos);
  // One header plus one row, LF endings.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("certification json carries the reading and echo fields") {
  CertificationResult res;
  res.bound_id = "catoni";
  res.params.m = 200;
  res.params.delta = 0.05;
  res.trials = 2000;
  res.violations = 5;
  res.rate = 0.0025;
  res.wilson_ci = wilson_interval(5, 2000);
  res.seed = 42;
  res.reading = Reading::per_sample;
  res.pass = true;
  std::string text = write_certification_json({res});
  CHECK(text.find("\"bound_id\":\"catoni\"") != std::string::npos);
  CHECK(text.find("\"reading\":\"per_sample\"") != std::string::npos);
  CHECK(text.find("\"violations\":5") != std::string::npos);
  CHECK(text.find("\"pass\":true") != std::string::npos);
  std::string ci = "\"wilson_ci\":[" + format_real(res.wilson_ci.lo) + "," +
                   format_real(res.wilson_ci.hi) + "]";
  CHECK(text.find(ci) != std::string::npos);
}
