// Batch experiment runner: parses configuration (file < environment < command
// line), dispatches the named experiment, persists CSV/JSON reports, and
// returns a nonzero exit status when a pass-criterion fails.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mongelab/mongelab.hpp"

namespace fs = std::filesystem;
using namespace mongelab;

namespace {

// "3" -> "3.0", "2.7" -> "2.7": stable file names for profile CSVs.
std::string format_p_tag(double p) {
  std::string s = format_number(p);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", p);
  s = buf;
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
  return s;
}

ExampleSpec spec_from(const ExperimentConfig& cfg) {
  ExampleSpec spec;
  spec.setting = cfg.field_setting();
  spec.n = cfg.n;
  spec.k = cfg.k;
  if (cfg.family == "ode-exact")
    spec.family = ExampleSpec::Family::OdeExact;
  else if (cfg.family == "power-quadratic")
    spec.family = ExampleSpec::Family::PowerTimesQuadratic;
  else  // auto
    spec.family = (spec.setting == Field::Setting::Real && cfg.k == 1)
                      ? ExampleSpec::Family::OdeExact
                      : ExampleSpec::Family::PowerTimesQuadratic;
  return spec;
}

MembershipOptions membership_options(const ExperimentConfig& cfg) {
  MembershipOptions mo;
  mo.r_outer = cfg.r_outer;
  mo.annuli = cfg.annuli;
  mo.budget = cfg.budget;
  mo.seed = cfg.seed;
  return mo;
}

double default_power(const ExperimentConfig& cfg) {
  if (cfg.p > 0.0) return cfg.p;
  return critical_exponent(cfg.field_setting(), cfg.n, cfg.k).p_crit.value();
}

int run_pogorelov_solve(const ExperimentConfig& cfg) {
  PogorelovProfile prof = solve_profile_ode(cfg.n);
  fs::path out(cfg.out_dir);
  write_text(out / ("pogorelov_n" + std::to_string(cfg.n) + ".csv"), profile_grid_csv(prof));
  Json j = profile_sidecar_json(prof);
  j["config"] = config_json(cfg);
  write_json(out / ("pogorelov_n" + std::to_string(cfg.n) + ".json"), j);
  bool ok = prof.residual_ode < 1e-10 && prof.residual_consistency < 1e-10;
  std::cout << "pogorelov-solve n=" << cfg.n << " valid radius " << format_number(prof.valid_radius)
            << " residual " << format_number(prof.residual_ode) << (ok ? " [ok]" : " [FAIL]")
            << "\n";
  return ok ? 0 : 1;
}

int run_annulus_profile(const ExperimentConfig& cfg) {
  double p = default_power(cfg);
  MembershipReport rep = sobolev_membership(spec_from(cfg), p, membership_options(cfg));
  fs::path out(cfg.out_dir);
  std::string tag = format_p_tag(p);
  write_text(out / ("profile_p" + tag + ".csv"), annulus_profile_csv(rep.profile));
  write_json(out / ("fit_p" + tag + ".json"), fit_json(rep.log_fit));
  Json verdict;
  verdict["config"] = config_json(cfg);
  verdict["membership"] = membership_json(rep);
  write_json(out / "verdict.json", verdict);
  std::cout << "annulus-profile p=" << tag << " verdict " << membership_name(rep.verdict)
            << " (per-annulus ratio " << format_number(rep.per_annulus_ratio) << ")\n";
  return 0;
}

int run_growth_fit(const ExperimentConfig& cfg) {
  Field u = build_example(spec_from(cfg));
  const double q = 2.0 - 2.0 * cfg.k / cfg.n;
  Json j;
  bool pass = false;
  if (cfg.field_setting() == Field::Setting::Complex) {
    GrowthScan scan = complex_growth_scan(u, q, cfg.radii, 16, 400, cfg.seed);
    j = fit_json(scan.exponent, scan.exponent_stderr, 0.0, 0.0,
                 scan.pass ? "dominates" : "fails-lower-bound");
    j["bound"] = scan.bound;
    j["c_fit"] = scan.c_fit;
    pass = scan.pass;
  } else {
    GrowthCheck g = growth_exponent_fit(u, q, cfg.radii, 16, 400, cfg.seed);
    j = fit_json(g.exponent, g.exponent_stderr, 0.0, 0.0,
                 g.pass ? "within-bound" : "exceeds-bound");
    j["bound"] = g.bound;
    pass = g.pass;
  }
  j["config"] = config_json(cfg);
  write_json(fs::path(cfg.out_dir) / "growth.json", j);
  std::cout << "growth-fit exponent " << format_number(j["slope"].get<double>()) << " vs bound "
            << format_number(q) << (pass ? " [ok]" : " [FAIL]") << "\n";
  return pass ? 0 : 1;
}

int run_dichotomy(const ExperimentConfig& cfg) {
  double p = cfg.p > 0.0 ? cfg.p : 4.0;
  DichotomyCorpus corpus =
      dichotomy_corpus(cfg.count, cfg.dim, p, cfg.eps, cfg.budget, cfg.seed, cfg.pieces);
  Json j = dichotomy_json(corpus);
  j["config"] = config_json(cfg);
  write_json(fs::path(cfg.out_dir) / "dichotomy.json", j);
  bool pass = corpus.all_pass && corpus.delta_emp > 0.0 && corpus.c0_emp > 0.0;
  std::cout << "dichotomy corpus " << corpus.reports.size() << " probes, delta_emp "
            << format_number(corpus.delta_emp) << ", c0_emp " << format_number(corpus.c0_emp)
            << (pass ? " [ok]" : " [FAIL]") << "\n";
  return pass ? 0 : 1;
}

int run_sections(const ExperimentConfig& cfg) {
  Field u = (cfg.family == "ode-exact") ? build_example(spec_from(cfg))
                                        : builtin::paraboloid(cfg.dim);
  fs::path out(cfg.out_dir);
  Json rows = Json::array();
  for (double h : cfg.heights) {
    Section sec = section_extract(u, Vector::Zero(u.domain().dim()), h, cfg.budget, cfg.seed);
    std::string tag = format_p_tag(h);
    write_text(out / ("section_h" + tag + ".csv"), section_csv(sec));
    write_json(out / ("section_h" + tag + ".json"), section_sidecar_json(sec));
    rows.push_back(section_sidecar_json(sec));
  }
  GrowthCheck g = sublevel_growth_check(u, cfg.heights, cfg.budget, cfg.seed);
  Json j;
  j["config"] = config_json(cfg);
  j["sections"] = rows;
  j["sublevel"] = fit_json(g.exponent, g.exponent_stderr, 0.0, 0.0,
                           g.pass ? "at-least-half-dimension" : "too-slow");
  j["sublevel"]["bound"] = g.bound;
  write_json(out / "sections.json", j);
  std::cout << "sections: " << cfg.heights.size() << " heights, sublevel exponent "
            << format_number(g.exponent) << (g.pass ? " [ok]" : " [FAIL]") << "\n";
  return g.pass ? 0 : 1;
}

int run_orlicz(const ExperimentConfig& cfg) {
  const bool pure = !cfg.explicit_key("gauge_s");
  OrliczGauge gauge = pure ? OrliczGauge::power(cfg.gauge_m)
                           : OrliczGauge::power_log(cfg.gauge_m, cfg.gauge_s);
  OrliczVerdict verdict = orlicz_divergence_test(gauge, cfg.field_setting(), cfg.n, cfg.k);

  Field w = builtin::paraboloid(cfg.dim);
  Domain ann = Domain::annulus(cfg.dim, 0.5, 1.0);
  auto g = [&w](const Vector& x) { return w.jet(x).laplacian(); };
  double lux =
      luxemburg_norm(g, ann, OrliczGauge::power(cfg.gauge_m), cfg.budget, cfg.seed, 1e-6);
  double closed = cfg.dim * std::pow(ann.volume(), 1.0 / cfg.gauge_m);

  Json j;
  j["config"] = config_json(cfg);
  j["gauge_m"] = cfg.gauge_m;
  j["gauge_s"] = pure ? 0.0 : cfg.gauge_s;
  j["pure_power"] = pure;
  j["p_crit"] = critical_exponent(cfg.field_setting(), cfg.n, cfg.k).p_crit.value();
  j["verdict"] = verdict == OrliczVerdict::Diverges ? "diverges" : "converges";
  j["convexity_certified"] = gauge.convexity_certified();
  j["luxemburg_demo"] = lux;
  j["luxemburg_closed_form"] = closed;
  j["luxemburg_tolerance"] = 1e-4;
  write_json(fs::path(cfg.out_dir) / "orlicz.json", j);
  bool ok = std::abs(lux - closed) <= 1e-4 * closed;
  std::cout << "orlicz m=" << format_number(cfg.gauge_m) << " verdict " << j["verdict"]
            << ", Luxemburg demo within " << format_number(std::abs(lux - closed) / closed)
            << (ok ? " [ok]" : " [FAIL]") << "\n";
  return ok ? 0 : 1;
}

int run_sharpness(const ExperimentConfig& cfg) {
  SharpnessReport rep = sharpness_experiment(spec_from(cfg), cfg.multipliers,
                                             membership_options(cfg));
  fs::path out(cfg.out_dir);
  Json j = sharpness_json(rep);
  j["config"] = config_json(cfg);
  Json profile_files = Json::array();
  for (const auto& row : rep.rows) {
    std::string name = "profile_p" + format_p_tag(row.p) + ".csv";
    write_text(out / name, annulus_profile_csv(row.report.profile));
    profile_files.push_back(name);
  }
  j["profile_files"] = profile_files;
  write_json(out / "verdict.json", j);
  for (const auto& row : rep.rows)
    std::cout << "  p = " << format_p_tag(row.p) << " -> " << membership_name(row.verdict)
              << " (expected " << membership_name(row.expected) << ")\n";
  std::cout << "sharpness " << (rep.pass ? "[ok]" : "[FAIL]") << "\n";
  return rep.pass ? 0 : 1;
}

int run_verify_all(const ExperimentConfig& cfg) {
  VerifyOptions opt;
  opt.tier = cfg.tier;
  opt.seed = cfg.seed;
  opt.scratch = (fs::path(cfg.out_dir) / "determinism").string();
  VerifySummary summary = verify_all(opt);
  Json rows = Json::array();
  for (const auto& r : summary.results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " ("
              << format_number(r.seconds) << " s) " << r.details << "\n";
    Json row;
    row["id"] = r.id;
    row["name"] = r.name;
    row["pass"] = r.pass;
    row["details"] = r.details;
    row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  Json j;
  j["config"] = config_json(cfg);
  j["criteria"] = rows;
  j["all_pass"] = summary.all_pass;
  j["tier"] = summary.tier;
  write_json(fs::path(cfg.out_dir) / "verify.json", j);
  std::cout << (summary.all_pass ? "verify-all: all criteria passed"
                                 : "verify-all: FAILURES present")
            << "\n";
  return summary.all_pass ? 0 : 1;
}

int dispatch(const ExperimentConfig& cfg) {
  if (cfg.experiment == "pogorelov-solve") return run_pogorelov_solve(cfg);
  if (cfg.experiment == "annulus-profile") return run_annulus_profile(cfg);
  if (cfg.experiment == "growth-fit") return run_growth_fit(cfg);
  if (cfg.experiment == "dichotomy") return run_dichotomy(cfg);
  if (cfg.experiment == "sections") return run_sections(cfg);
  if (cfg.experiment == "orlicz") return run_orlicz(cfg);
  if (cfg.experiment == "sharpness") return run_sharpness(cfg);
  if (cfg.experiment == "verify-all") return run_verify_all(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mongelab: numerical experiments on singular Monge-Ampere solution families"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, tier;
  std::uint64_t seed = 0;
  bool seed_set = false, out_set = false, tier_set = false;
  app.add_option("--config", config_path, "configuration file (key = value grammar)");
  app.add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--out", out_dir, "output directory override")->each([&](const std::string&) {
    out_set = true;
  });
  app.add_option("--tier", tier, "budget tier: smoke | full")
      ->check(CLI::IsMember({"smoke", "full"}))
      ->each([&](const std::string&) { tier_set = true; });

  const std::vector<std::string> experiments = {"pogorelov-solve", "annulus-profile", "growth-fit",
                                                "dichotomy",       "sections",        "orlicz",
                                                "sharpness",       "verify-all"};
  // fallthrough lets the global --config/--seed/--out/--tier flags appear
  // after the experiment name as well as before it.
  for (const auto& name : experiments) app.add_subcommand(name)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty())
      cfg = parse_config(read_file(config_path), config_path, /*validate_after=*/false);
    apply_env_overrides(cfg);
    if (seed_set) {
      cfg.seed = seed;
      cfg.provenance["seed"] = "cli";
    }
    if (out_set) {
      cfg.out_dir = out_dir;
      cfg.provenance["out"] = "cli";
    }
    if (tier_set) {
      cfg.tier = tier;
      cfg.provenance["tier"] = "cli";
    }
    for (const auto* sub : app.get_subcommands()) {
      cfg.experiment = sub->get_name();
      cfg.provenance["experiment"] = "cli";
    }
    cfg.validate();
    return dispatch(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
