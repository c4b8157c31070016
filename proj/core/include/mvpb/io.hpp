#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mvpb/bounds.hpp"
#include "mvpb/certify.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/errors.hpp"
#include "mvpb/learner.hpp"

namespace mvpb {

/// 17 significant digits, enough to reparse to the identical double.
std::string format_real(double x);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Throws MissingInput when the file is absent or unreadable.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// JSON-lines sample format: a header line
///   {"schema":{"views":V,"dims":[...]},"labeled":bool}
/// then one {"views":[[...],...]} row per point, each with "label" when
/// labeled. LF endings.
std::string write_sample_jsonl(const SampleSet& s);
SampleSet read_sample_jsonl(const std::string& text);

/// Same row format plus "kind":"domain" and a role in the header and a
/// "probability" per row. Domains are always labeled.
std::string write_domain_jsonl(const FiniteDomain& d, const std::string& role);

struct DomainFile {
  FiniteDomain domain;
  std::string role;  // "source" or "target"
};
DomainFile read_domain_jsonl(const std::string& text);

/// Single JSON document: schema, per-view voter arrays, and the four weight
/// vectors. Serializing what was read back yields identical bytes.
std::string write_ensemble_json(const PosteriorEnsemble& E);
PosteriorEnsemble read_ensemble_json(const std::string& text);

/// One header plus one row per report:
/// bound_id,m,n,delta,c,alpha,kl_posterior,kl_hyper,emp_value,lambda,rhs,
/// rhs_clamped,interval_lo,interval_hi,vacuous
std::string write_reports_csv(const std::vector<BoundReport>& reports);

std::string write_certification_json(const std::vector<CertificationResult>& results);

/// {"steps":[{iter, objective, eta, accepted},...],"ensemble":{...}}
std::string write_trace_json(const LearnTrace& trace);

}  // namespace mvpb
