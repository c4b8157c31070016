#include "mvpb/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mvpb {

namespace {

using nlohmann::json;

json parse_or_mismatch(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw SchemaMismatch(std::string("malformed JSON in ") + what);
  return j;
}

json parse_line(const std::string& line, const char* what) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    throw SchemaMismatch(std::string("malformed JSON line in ") + what);
  return j;
}

void append_escaped(std::string& out, std::string_view s) {
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
}

void append_quoted(std::string& out, std::string_view s) {
  out += '"';
  append_escaped(out, s);
  out += '"';
}

void append_schema(std::string& out, const ViewSchema& schema) {
  out += "{\"views\":";
  out += std::to_string(schema.views());
  out += ",\"dims\":[";
  for (int v = 0; v < schema.views(); ++v) {
    if (v) out += ',';
    out += std::to_string(schema.dims[v]);
  }
  out += "]}";
}

void append_point(std::string& out, const MultiViewPoint& x) {
  out += "\"views\":[";
  for (std::size_t v = 0; v < x.views.size(); ++v) {
    if (v) out += ',';
    out += '[';
    for (std::size_t f = 0; f < x.views[v].size(); ++f) {
      if (f) out += ',';
      out += format_real(x.views[v][f]);
    }
    out += ']';
  }
  out += ']';
}

void append_weights(std::string& out, const Categorical& c) {
  out += '[';
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    out += format_real(c[i]);
  }
  out += ']';
}

ViewSchema schema_from_json(const json& j) {
  if (!j.is_object() || !j.contains("views") || !j.contains("dims"))
    throw SchemaMismatch("header lacks a schema object");
  ViewSchema schema;
  for (const json& d : j.at("dims")) schema.dims.push_back(d.get<int>());
  if (j.at("views").get<int>() != schema.views())
    throw SchemaMismatch("schema view count disagrees with dims");
  return schema;
}

MultiViewPoint point_from_json(const json& row, const ViewSchema& schema) {
  MultiViewPoint x;
  const json& views = row.at("views");
  if (static_cast<int>(views.size()) != schema.views())
    throw SchemaMismatch("row view count does not match header");
  x.views.resize(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (static_cast<int>(views[v].size()) != schema.dims[v])
      throw SchemaMismatch("row feature count does not match header dims");
    for (const json& val : views[v]) x.views[v].push_back(val.get<double>());
  }
  return x;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw MissingInput("cannot read " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string write_sample_jsonl(const SampleSet& s) {
  std::string out = "{\"schema\":";
  append_schema(out, s.schema());
  out += ",\"labeled\":";
  out += s.labeled() ? "true" : "false";
  out += "}\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += '{';
    append_point(out, s.point(i));
    if (s.labeled()) {
      out += ",\"label\":";
      out += std::to_string(s.label(i));
    }
    out += "}\n";
  }
  return out;
}

SampleSet read_sample_jsonl(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw SchemaMismatch("empty sample file");
  json header = parse_line(lines[0], "sample header");
  if (!header.contains("schema") || !header.contains("labeled"))
    throw SchemaMismatch("sample header must carry schema and labeled");
  ViewSchema schema = schema_from_json(header.at("schema"));
  bool labeled = header.at("labeled").get<bool>();

  std::vector<MultiViewPoint> points;
  std::vector<int> labels;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    json row = parse_line(lines[i], "sample row");
    points.push_back(point_from_json(row, schema));
    if (labeled) {
      if (!row.contains("label"))
        throw SchemaMismatch("labeled sample row lacks a label");
      labels.push_back(row.at("label").get<int>());
    } else if (row.contains("label")) {
      throw SchemaMismatch("unlabeled sample row carries a label");
    }
  }
  return SampleSet(std::move(schema), std::move(points), std::move(labels), 0);
}

std::string write_domain_jsonl(const FiniteDomain& d, const std::string& role) {
  std::string out = "{\"schema\":";
  append_schema(out, d.schema());
  out += ",\"labeled\":true,\"kind\":\"domain\",\"role\":";
  append_quoted(out, role);
  out += "}\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Atom& a = d.atom(i);
    out += '{';
    append_point(out, a.point);
    out += ",\"label\":";
    out += std::to_string(a.label);
    out += ",\"probability\":";
    out += format_real(a.probability);
    out += "}\n";
  }
  return out;
}

DomainFile read_domain_jsonl(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw SchemaMismatch("empty domain file");
  json header = parse_line(lines[0], "domain header");
  if (!header.contains("kind") || header.at("kind").get<std::string>() != "domain")
    throw SchemaMismatch("domain header must declare kind: domain");
  ViewSchema schema = schema_from_json(header.at("schema"));
  std::string role =
      header.contains("role") ? header.at("role").get<std::string>() : "";

  std::vector<Atom> atoms;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    json row = parse_line(lines[i], "domain row");
    Atom a;
    a.point = point_from_json(row, schema);
    a.label = row.at("label").get<int>();
    a.probability = row.at("probability").get<double>();
    atoms.push_back(std::move(a));
  }
  try {
    return DomainFile{FiniteDomain(std::move(schema), std::move(atoms)), role};
  } catch (const std::invalid_argument& e) {
    throw SchemaMismatch(e.what());
  }
}

std::string write_ensemble_json(const PosteriorEnsemble& E) {
  std::string out = "{\n  \"schema\":";
  // The schema is implied by the voter pool shape; recorded explicitly so a
  // reader can validate against data files without the pool.
  ViewSchema schema;
  for (const auto& hv : E.hypotheses.views) {
    int max_feature = 0;
    for (const Voter& h : hv)
      if (h.feature + 1 > max_feature) max_feature = h.feature + 1;
    schema.dims.push_back(max_feature);
  }
  append_schema(out, schema);
  out += ",\n  \"voters\":[\n";
  for (std::size_t v = 0; v < E.hypotheses.views.size(); ++v) {
    if (v) out += ",\n";
    out += "    [";
    const auto& hv = E.hypotheses.views[v];
    for (std::size_t k = 0; k < hv.size(); ++k) {
      if (k) out += ',';
      out += "{\"view\":";
      out += std::to_string(hv[k].view);
      out += ",\"feature\":";
      out += std::to_string(hv[k].feature);
      out += ",\"threshold\":";
      out += format_real(hv[k].threshold);
      out += ",\"polarity\":";
      out += std::to_string(hv[k].polarity);
      out += '}';
    }
    out += ']';
  }
  out += "\n  ],\n  \"posteriors\":[";
  for (std::size_t v = 0; v < E.posteriors.size(); ++v) {
    if (v) out += ',';
    append_weights(out, E.posteriors[v]);
  }
  out += "],\n  \"hyper_posterior\":";
  append_weights(out, E.hyper_posterior);
  out += ",\n  \"priors\":[";
  for (std::size_t v = 0; v < E.priors.size(); ++v) {
    if (v) out += ',';
    append_weights(out, E.priors[v]);
  }
  out += "],\n  \"hyper_prior\":";
  append_weights(out, E.hyper_prior);
  out += "\n}\n";
  return out;
}

PosteriorEnsemble read_ensemble_json(const std::string& text) {
  json j = parse_or_mismatch(text, "ensemble file");
  for (const char* key :
       {"voters", "posteriors", "hyper_posterior", "priors", "hyper_prior"}) {
    if (!j.contains(key))
      throw SchemaMismatch(std::string("ensemble file lacks ") + key);
  }
  ViewHypothesisSet hs;
  for (const json& view : j.at("voters")) {
    std::vector<Voter> hv;
    for (const json& vj : view) {
      Voter h;
      h.view = vj.at("view").get<int>();
      h.feature = vj.at("feature").get<int>();
      h.threshold = vj.at("threshold").get<double>();
      h.polarity = vj.at("polarity").get<int>();
      hv.push_back(h);
    }
    hs.views.push_back(std::move(hv));
  }
  auto weights = [](const json& arr) {
    std::vector<double> w;
    for (const json& x : arr) w.push_back(x.get<double>());
    return Categorical(std::move(w));
  };
  try {
    std::vector<Categorical> post, prior;
    for (const json& arr : j.at("posteriors")) post.push_back(weights(arr));
    for (const json& arr : j.at("priors")) prior.push_back(weights(arr));
    return make_ensemble(std::move(hs), std::move(post),
                         weights(j.at("hyper_posterior")), std::move(prior),
                         weights(j.at("hyper_prior")));
  } catch (const std::invalid_argument& e) {
    throw SchemaMismatch(e.what());
  }
}

std::string write_reports_csv(const std::vector<BoundReport>& reports) {
  std::string out =
      "bound_id,m,n,delta,c,alpha,kl_posterior,kl_hyper,emp_value,lambda,rhs,"
      "rhs_clamped,interval_lo,interval_hi,vacuous\n";
  for (const BoundReport& r : reports) {
    out += r.bound_id;
    out += ',';
    out += std::to_string(r.params.m);
    out += ',';
    out += std::to_string(r.params.n);
    for (double x : {r.params.delta, r.params.c, r.params.alpha,
                     r.params.kl_posterior, r.params.kl_hyper, r.emp_value,
                     r.lambda, r.rhs, r.rhs_clamped, r.interval.lo,
                     r.interval.hi}) {
      out += ',';
      out += format_real(x);
    }
    out += ',';
    out += r.vacuous ? "true" : "false";
    out += '\n';
  }
  return out;
}

namespace {

void append_params(std::string& out, const BoundParams& p) {
  out += "{\"m\":";
  out += std::to_string(p.m);
  out += ",\"n\":";
  out += std::to_string(p.n);
  out += ",\"delta\":";
  out += format_real(p.delta);
  out += ",\"c\":";
  out += format_real(p.c);
  out += ",\"alpha\":";
  out += format_real(p.alpha);
  out += ",\"kl_posterior\":";
  out += format_real(p.kl_posterior);
  out += ",\"kl_hyper\":";
  out += format_real(p.kl_hyper);
  if (p.renyi_alpha) {
    out += ",\"renyi_alpha\":";
    out += format_real(*p.renyi_alpha);
  }
  if (p.renyi_divergence) {
    out += ",\"renyi_divergence\":";
    out += format_real(*p.renyi_divergence);
  }
  out += '}';
}

}  // namespace

std::string write_certification_json(
    const std::vector<CertificationResult>& results) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CertificationResult& r = results[i];
    out += "  {\"bound_id\":";
    append_quoted(out, r.bound_id);
    out += ",\"params\":";
    append_params(out, r.params);
    out += ",\"trials\":";
    out += std::to_string(r.trials);
    out += ",\"violations\":";
    out += std::to_string(r.violations);
    out += ",\"rate\":";
    out += format_real(r.rate);
    out += ",\"wilson_ci\":[";
    out += format_real(r.wilson_ci.lo);
    out += ',';
    out += format_real(r.wilson_ci.hi);
    out += "],\"seed\":";
    out += std::to_string(r.seed);
    out += ",\"reading\":";
    append_quoted(out,
                  r.reading == Reading::per_sample ? "per_sample" : "expectation");
    out += ",\"pass\":";
    out += r.pass ? "true" : "false";
    out += '}';
    if (i + 1 < results.size()) out += ',';
    out += '\n';
  }
  out += "]\n";
  return out;
}

std::string write_trace_json(const LearnTrace& trace) {
  std::string out = "{\n  \"steps\":[\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const LearnStep& s = trace.steps[i];
    out += "    {\"iter\":";
    out += std::to_string(s.iter);
    out += ",\"objective\":";
    out += format_real(s.objective);
    out += ",\"eta\":";
    out += format_real(s.eta);
    out += ",\"accepted\":";
    out += s.accepted ? "true" : "false";
    out += '}';
    if (i + 1 < trace.steps.size()) out += ',';
    out += '\n';
  }
  out += "  ],\n  \"ensemble\":";
  std::string ens = write_ensemble_json(trace.final_ensemble);
  while (!ens.empty() && ens.back() == '\n') ens.pop_back();
  out += ens;
  out += "\n}\n";
  return out;
}

}  // namespace mvpb
