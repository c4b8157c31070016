// File-driven experiment runner. Four commands share one config document:
//
//   gen      synthesize a shifted source/target domain pair (plus optional
//            drawn samples) and write them as JSON lines
//   eval     evaluate requested bounds on sample files, write a CSV report
//   certify  statistically certify bounds on a domain pair, write JSON
//   learn    minimize the adaptation bound over the posterior weights
//
// Every command is a pure function of its config (all seeds explicit), so
// repeated runs produce byte-identical outputs. Exit codes: 0 success,
// 2 config error, 3 missing input, 4 schema mismatch, 5 certification
// failure, 1 anything unexpected.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mvpb/bounds.hpp"
#include "mvpb/certify.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/errors.hpp"
#include "mvpb/io.hpp"
#include "mvpb/learner.hpp"
#include "mvpb/risks.hpp"
#include "mvpb/rng.hpp"

namespace {

using nlohmann::json;
using namespace mvpb;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

json load_config(const std::string& path, const std::vector<std::string>& sets) {
  json cfg = json::object();
  if (!path.empty()) {
    json parsed = json::parse(read_text_file(path), nullptr, false);
    if (parsed.is_discarded())
      throw ConfigError("config file is not valid JSON: " + path);
    if (!parsed.is_object())
      throw ConfigError("config root must be a JSON object: " + path);
    cfg = std::move(parsed);
  }
  for (const std::string& kv : sets) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got: " + kv);
    std::string key = kv.substr(0, eq);
    json value = json::parse(kv.substr(eq + 1), nullptr, false);
    if (value.is_discarded()) value = kv.substr(eq + 1);

    json* node = &cfg;
    std::size_t start = 0;
    for (;;) {
      std::size_t dot = key.find('.', start);
      std::string part =
          key.substr(start, dot == std::string::npos ? dot : dot - start);
      if (part.empty())
        throw ConfigError("--set key has an empty path segment: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = std::move(value);
        break;
      }
      if (!node->contains(part) || !(*node)[part].is_object())
        (*node)[part] = json::object();
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return cfg;
}

const json& need(const json& cfg, const char* key) {
  if (!cfg.is_object() || !cfg.contains(key))
    throw ConfigError(std::string("config lacks required field: ") + key);
  return cfg.at(key);
}

template <typename T>
T need_as(const json& cfg, const char* key) {
  try {
    return need(cfg, key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field has the wrong type: ") + key);
  }
}

template <typename T>
T get_or(const json& cfg, const char* key, T fallback) {
  if (!cfg.is_object() || !cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field has the wrong type: ") + key);
  }
}

std::size_t need_count(const json& cfg, const char* key) {
  const json& v = need(cfg, key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError(std::string(key) + " must be an integer");
  if (v.is_number_integer() && v.get<long long>() < 0)
    throw ConfigError(std::string(key) + " must be non-negative");
  return v.get<std::size_t>();
}

// Randomized steps never invent their own seeds; absence is a config error.
std::uint64_t need_seed(const json& cfg, const char* key) {
  const json& v = need(cfg, key);
  if (!v.is_number_unsigned() &&
      !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(std::string(key) + " must be a non-negative integer seed");
  return v.get<std::uint64_t>();
}

struct Emitter {
  std::filesystem::path dir;

  void write(const std::string& name, const std::string& content) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      throw ConfigError("cannot create output directory: " + dir.string());
    std::filesystem::path path = dir / name;
    try {
      write_text_file(path.string(), content);
    } catch (const std::exception&) {
      throw ConfigError("unwritable path: " + path.string());
    }
    std::printf("%s %s\n", name.c_str(), fnv1a64_hex(content).c_str());
  }
};

BoundParams params_from(const json& cfg) {
  BoundParams p;
  if (!cfg.contains("params")) return p;
  const json& q = cfg.at("params");
  if (!q.is_object()) throw ConfigError("params must be an object");
  p.delta = get_or(q, "delta", p.delta);
  p.c = get_or(q, "c", p.c);
  p.alpha = get_or(q, "alpha", p.alpha);
  return p;
}

FiniteDomain load_domain(const json& cfg, const char* key) {
  return read_domain_jsonl(read_text_file(need_as<std::string>(cfg, key)))
      .domain;
}

SampleSet load_sample(const json& cfg, const char* key) {
  return read_sample_jsonl(read_text_file(need_as<std::string>(cfg, key)));
}

// Either a serialized ensemble file or an ensemble_spec that builds a stump
// grid over the given domain's atoms (or the given sample's points) with
// uniform priors and optionally tilted posteriors.
PosteriorEnsemble load_ensemble(const json& cfg, const FiniteDomain* grid_domain,
                                const SampleSet* grid_sample) {
  if (cfg.contains("ensemble"))
    return read_ensemble_json(
        read_text_file(need_as<std::string>(cfg, "ensemble")));
  if (!cfg.contains("ensemble_spec"))
    throw ConfigError("config needs ensemble (a file path) or ensemble_spec");
  const json& s = cfg.at("ensemble_spec");
  int per_feature = need_as<int>(s, "thresholds_per_feature");
  ViewHypothesisSet grid;
  if (grid_domain)
    grid = build_stump_grid(*grid_domain, per_feature);
  else
    grid = build_stump_grid(*grid_sample, per_feature);
  PosteriorEnsemble E = uniform_ensemble(std::move(grid));
  double tilt = get_or(s, "tilt", 0.0);
  if (tilt != 0.0) E = tilt_posteriors(E, tilt, need_seed(s, "tilt_seed"));
  return E;
}

int cmd_gen(const json& cfg, const Emitter& out) {
  ShiftSpec spec;
  spec.dims = need_as<std::vector<int>>(cfg, "dims");
  spec.atoms = need_count(cfg, "atoms");
  spec.shift = need_as<double>(cfg, "shift");
  spec.noisy_views = get_or(cfg, "noisy_views", std::vector<int>{});
  spec.seed = need_seed(cfg, "seed");

  auto [source, target] = synth_shift_pair(spec);
  out.write("source_domain.jsonl", write_domain_jsonl(source, "source"));
  out.write("target_domain.jsonl", write_domain_jsonl(target, "target"));

  if (cfg.contains("sample")) {
    const json& s = cfg.at("sample");
    std::size_t m = need_count(s, "m");
    std::size_t n = need_count(s, "n");
    std::uint64_t seed = need_seed(s, "seed");
    SampleSet S = draw_sample(source, m, true, counter_bits(seed, 0));
    SampleSet T_X = draw_sample(target, n, false, counter_bits(seed, 1));
    out.write("source_sample.jsonl", write_sample_jsonl(S));
    out.write("target_sample.jsonl", write_sample_jsonl(T_X));
  }
  return 0;
}

bool is_flattened_id(const std::string& id) {
  return id == "mcallester" || id == "seeger" || id == "catoni" ||
         id == "germain_dis";
}

BoundReport eval_one(const std::string& id, const RiskProfile& prof,
                     const PosteriorEnsemble& E, BoundParams p, double lambda) {
  auto gibbs = [&] {
    if (!prof.gibbs_risk)
      throw SchemaMismatch(id + " needs a labeled source sample");
    return *prof.gibbs_risk;
  };
  auto domain_dis = [&] {
    if (!prof.domain_disagreement)
      throw SchemaMismatch(id + " needs source and target samples");
    return *prof.domain_disagreement;
  };
  if (is_flattened_id(id)) {
    p.kl_posterior = flattened_kl(E);
    p.kl_hyper = 0.0;
  } else {
    p.kl_posterior = expected_view_kl(E);
    p.kl_hyper = hyper_kl(E);
  }
  if (id == "mcallester") return mcallester_bound(gibbs(), p);
  if (id == "seeger") return seeger_bound(gibbs(), p);
  if (id == "catoni") return catoni_bound(gibbs(), p);
  if (id == "germain_dis") return germain_dis_bound(*prof.mv_disagreement, p);
  if (id == "dis_mcallester") return dis_mcallester_bound(domain_dis(), p);
  if (id == "dis_catoni") return dis_catoni_bound(domain_dis(), p);
  if (id == "dis_kl") return dis_kl_bound(domain_dis(), p);
  if (id == "dis_two_sample") return dis_two_sample_bound(domain_dis(), p);
  if (id == "mv_gibbs_catoni") return mv_gibbs_catoni_bound(gibbs(), p);
  if (id == "da_catoni") return da_catoni_bound(gibbs(), domain_dis(), lambda, p);
  throw ConfigError("unknown bound id: " + id);
}

int cmd_eval(const json& cfg, const Emitter& out) {
  SampleSet S = load_sample(cfg, "source_sample");
  SampleSet T_X = load_sample(cfg, "target_sample");
  std::vector<std::string> bounds =
      need_as<std::vector<std::string>>(cfg, "bounds");
  if (bounds.empty()) throw ConfigError("bounds must name at least one bound");

  std::optional<FiniteDomain> src_dom, tgt_dom;
  if (cfg.contains("source_domain")) src_dom = load_domain(cfg, "source_domain");
  if (cfg.contains("target_domain")) tgt_dom = load_domain(cfg, "target_domain");

  PosteriorEnsemble E = load_ensemble(cfg, src_dom ? &*src_dom : nullptr,
                                      src_dom ? nullptr : &S);

  BoundParams p = params_from(cfg);
  p.m = S.size();
  p.n = T_X.size();

  RiskProfile prof = empirical_profile(E, S, T_X);

  // The joint-error gap is a population quantity; it comes from the exact
  // domain pair, never from samples.
  double lambda = 0.0;
  for (const std::string& id : bounds) {
    if (id != "da_catoni") continue;
    if (!src_dom || !tgt_dom)
      throw ConfigError(
          "da_catoni needs source_domain and target_domain for the exact "
          "joint-error gap");
    lambda = exact_oracle(E, *src_dom, *tgt_dom).lambda;
    break;
  }

  std::vector<BoundReport> reports;
  reports.reserve(bounds.size());
  for (const std::string& id : bounds)
    reports.push_back(eval_one(id, prof, E, p, lambda));
  out.write("bounds.csv", write_reports_csv(reports));
  return 0;
}

int cmd_certify(const json& cfg, const Emitter& out, int threads) {
  FiniteDomain src = load_domain(cfg, "source_domain");
  FiniteDomain tgt = load_domain(cfg, "target_domain");
  PosteriorEnsemble E = load_ensemble(cfg, &src, nullptr);
  std::vector<std::string> bounds =
      need_as<std::vector<std::string>>(cfg, "bounds");
  if (bounds.empty()) throw ConfigError("bounds must name at least one bound");

  BoundParams p = params_from(cfg);
  p.m = need_count(need(cfg, "params"), "m");
  p.n = get_or(cfg.at("params"), "n", p.m);

  std::size_t trials = need_count(cfg, "trials");
  std::size_t expectation_trials = get_or(cfg, "expectation_trials",
                                          std::size_t{500});
  std::uint64_t seed = need_seed(cfg, "seed");
  std::vector<std::string> readings = get_or(
      cfg, "readings", std::vector<std::string>{"per_sample"});

  std::vector<CertificationResult> results;
  bool all_pass = true;
  std::uint64_t pair_index = 0;
  for (const std::string& id : bounds) {
    for (const std::string& r : readings) {
      Reading reading;
      if (r == "per_sample")
        reading = Reading::per_sample;
      else if (r == "expectation")
        reading = Reading::expectation;
      else
        throw ConfigError("unknown reading: " + r);
      std::size_t t =
          reading == Reading::per_sample ? trials : expectation_trials;
      results.push_back(certify_bound(id, E, src, tgt, p, t,
                                      counter_bits(seed, pair_index++),
                                      reading, PairSemantics::first_view,
                                      threads));
      all_pass = all_pass && results.back().pass;
    }
  }
  out.write("certification.json", write_certification_json(results));
  return all_pass ? 0 : 5;
}

int cmd_learn(const json& cfg, const Emitter& out) {
  SampleSet S = load_sample(cfg, "source_sample");
  SampleSet T_X = load_sample(cfg, "target_sample");
  if (!S.labeled()) throw SchemaMismatch("source sample must be labeled");
  PosteriorEnsemble E0 = load_ensemble(cfg, nullptr, &S);

  BoundParams p = params_from(cfg);
  p.m = S.size();
  p.n = T_X.size();

  std::size_t max_iters = need_count(cfg, "max_iters");
  double eta0 = get_or(cfg, "eta0", 1.0);
  std::uint64_t seed = need_seed(cfg, "seed");

  LearnTrace trace = minimize_da_bound(E0, S, T_X, p, max_iters, eta0, seed);
  out.write("trace.json", write_trace_json(trace));
  out.write("ensemble.json", write_ensemble_json(trace.final_ensemble));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view adaptation bounds: generate, evaluate, certify, learn"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  int threads = 0;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", sets,
                 "override a config field: dotted.path=value (value parsed "
                 "as JSON, else taken as a string)");
  app.add_option("--threads", threads,
                 "worker cap for certification trials (0 = hardware)");
  app.add_option("--out-dir", out_dir, "directory for output files");

  CLI::App* gen_cmd =
      app.add_subcommand("gen", "synthesize a shifted domain pair");
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate bounds on samples, write CSV");
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "statistically certify bounds");
  CLI::App* learn_cmd =
      app.add_subcommand("learn", "minimize the adaptation bound");
  for (CLI::App* sub : {gen_cmd, eval_cmd, certify_cmd, learn_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = load_config(config_path, sets);
    Emitter out{std::filesystem::path(out_dir)};
    if (gen_cmd->parsed()) return cmd_gen(cfg, out);
    if (eval_cmd->parsed()) return cmd_eval(cfg, out);
    if (certify_cmd->parsed()) return cmd_certify(cfg, out, threads);
    return cmd_learn(cfg, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const MissingInput& e) {
    std::fprintf(stderr, "missing input: %s\n", e.what());
    return 3;
  } catch (const SchemaMismatch& e) {
    std::fprintf(stderr, "schema mismatch: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
