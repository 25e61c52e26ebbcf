#pragma once
// Report emission: plot-ready CSV bodies, JSON sidecars and verdicts with
// embedded resolved configuration.  All numbers are printed with %.17g so
// repeated runs with the same seed write byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mongelab/config.hpp"
#include "mongelab/convex.hpp"
#include "mongelab/norms.hpp"
#include "mongelab/pogorelov.hpp"
#include "mongelab/quadrature.hpp"
#include "mongelab/singularity.hpp"

namespace mongelab {

using Json = nlohmann::json;

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw ReportError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV bodies.

inline std::string annulus_profile_csv(const AnnulusProfile& prof) {
  std::string out = "j,r_j,mass,stderr,cumulative\n";
  for (const auto& bin : prof.bins) {
    if (bin.dropped) continue;
    out += std::to_string(bin.j) + "," + format_number(bin.r_outer) + "," +
           format_number(bin.mass) + "," + format_number(bin.stderr_) + "," +
           format_number(bin.cumulative) + "\n";
  }
  return out;
}

inline std::string section_csv(const Section& sec) {
  if (sec.members.empty()) return "";
  std::string header;
  const int d = static_cast<int>(sec.members.front().size());
  for (int i = 0; i < d; ++i) header += (i ? ",x" : "x") + std::to_string(i);
  std::string out = header + "\n";
  for (const auto& m : sec.members) {
    for (int i = 0; i < d; ++i) out += (i ? "," : "") + format_number(m[i]);
    out += "\n";
  }
  return out;
}

inline std::string profile_grid_csv(const PogorelovProfile& prof) {
  std::string out = "t,f,fp,fpp\n";
  for (std::size_t i = 0; i < prof.t.size(); ++i)
    out += format_number(prof.t[i]) + "," + format_number(prof.f[i]) + "," +
           format_number(prof.fp[i]) + "," + format_number(prof.fpp[i]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// JSON builders.

inline Json config_json(const ExperimentConfig& cfg) {
  Json j;
  for (const auto& [key, value] : cfg.resolved()) j[key] = value;
  Json prov;
  for (const auto& [key, where] : cfg.provenance) prov[key] = where;
  j["provenance"] = prov;
  return j;
}

inline Json fit_json(double slope, double stderr_, double intercept, double r2,
                     const std::string& verdict) {
  Json j;
  j["slope"] = slope;
  j["stderr"] = stderr_;
  j["intercept"] = intercept;
  j["r2"] = r2;
  j["verdict"] = verdict;
  return j;
}

inline Json fit_json(const LogFitReport& rep) {
  Json j = fit_json(rep.slope, rep.stderr_, rep.intercept, rep.r2, rep.verdict);
  j["mass_flatness"] = rep.mass_flatness;
  return j;
}

inline Json membership_json(const MembershipReport& rep) {
  Json j;
  j["verdict"] = membership_name(rep.verdict);
  j["decay_exponent"] = rep.decay_exponent;
  j["decay_stderr"] = rep.decay_stderr;
  j["per_annulus_ratio"] = rep.per_annulus_ratio;
  j["log_fit"] = fit_json(rep.log_fit);
  j["field"] = rep.profile.field_name;
  j["quantity"] = rep.profile.quantity;
  j["power"] = rep.profile.power;
  return j;
}

inline Json profile_sidecar_json(const PogorelovProfile& prof) {
  Json j;
  j["n"] = prof.n;
  j["alpha"] = prof.alpha;
  j["f0"] = prof.f0;
  j["fp0"] = prof.fp0;
  j["rho"] = prof.rho;
  j["valid_radius"] = prof.valid_radius;
  j["node_spacing"] = prof.h;
  j["truncated"] = prof.truncated;
  j["residual_ode"] = prof.residual_ode;
  j["residual_consistency"] = prof.residual_consistency;
  return j;
}

inline Json section_sidecar_json(const Section& sec) {
  Json j;
  j["h"] = sec.h;
  j["volume"] = sec.volume;
  j["volume_stderr"] = sec.volume_stderr;
  j["diameter"] = sec.diameter;
  j["compactly_contained"] = sec.compactly_contained;
  j["empty"] = sec.empty;
  j["members"] = sec.members.size();
  Json base = Json::array();
  for (int i = 0; i < sec.base.size(); ++i) base.push_back(sec.base[i]);
  j["base"] = base;
  Json slope = Json::array();
  for (int i = 0; i < sec.plane.slope.size(); ++i) slope.push_back(sec.plane.slope[i]);
  j["plane"] = Json{{"slope", slope}, {"offset", sec.plane.offset}, {"min_gap", sec.plane.min_gap}};
  return j;
}

inline Json sharpness_json(const SharpnessReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json r;
    r["multiplier"] = row.multiplier;
    r["p"] = row.p;
    r["verdict"] = membership_name(row.verdict);
    r["expected"] = membership_name(row.expected);
    r["expected_ok"] = row.expected_ok;
    r["per_annulus_ratio"] = row.per_annulus_ratio;
    r["ratio_expected"] = row.ratio_expected;
    r["decay_stderr"] = row.report.decay_stderr;
    rows.push_back(r);
  }
  Json growth;
  growth["exponent"] = rep.growth.exponent;
  growth["stderr"] = rep.growth.exponent_stderr;
  growth["bound"] = rep.growth.bound;
  growth["c_fit"] = rep.growth.c_fit;
  growth["pass"] = rep.growth.pass;
  Json j;
  j["n"] = rep.spec.n;
  j["k"] = rep.spec.k;
  j["setting"] = rep.spec.setting == Field::Setting::Real ? "real" : "complex";
  j["p_crit"] = rep.exponents.p_crit.value();
  j["zero_set_ok"] = rep.zero_set_ok;
  j["zero_set_max_on"] = rep.zero_set_max_on;
  j["zero_set_min_off"] = rep.zero_set_min_off;
  j["rows"] = rows;
  j["growth"] = growth;
  j["slice_masses"] = rep.slice_masses;
  j["pass"] = rep.pass;
  return j;
}

inline Json dichotomy_json(const DichotomyCorpus& corpus) {
  Json j;
  j["delta_emp"] = corpus.delta_emp;
  j["c0_emp"] = corpus.c0_emp;
  j["min_inner_sigma"] = corpus.min_inner_sigma;
  j["all_pass"] = corpus.all_pass;
  j["members"] = corpus.reports.size();
  Json rows = Json::array();
  for (const auto& rep : corpus.reports) {
    Json r;
    r["field"] = rep.field_name;
    r["p"] = rep.p;
    r["eps"] = rep.eps;
    r["sup"] = rep.sup_unit_sphere;
    r["annulus_ratio"] = rep.annulus_ratio;
    r["inner_ratio"] = rep.inner_ratio;
    r["annulus_stderr"] = rep.annulus_stderr;
    r["inner_stderr"] = rep.inner_stderr;
    r["branch"] = rep.branch;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace mongelab
