#pragma once
// Acceptance suite: one runner per criterion, each returning a pass flag with
// a human-readable detail line and its runtime, plus the tiered driver.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mongelab/config.hpp"
#include "mongelab/convex.hpp"
#include "mongelab/field.hpp"
#include "mongelab/norms.hpp"
#include "mongelab/pogorelov.hpp"
#include "mongelab/quadrature.hpp"
#include "mongelab/reports.hpp"
#include "mongelab/singularity.hpp"

namespace mongelab {

struct VerifyOptions {
  std::string tier = "full";  // smoke: 10x reduced budgets
  std::uint64_t seed = 20260823;
  std::string scratch;  // determinism-check output directory; empty = temp dir

  int scale(int full_budget) const {
    return tier == "smoke" ? std::max(500, full_budget / 10) : full_budget;
  }
  int scale_count(int full_count) const {
    return tier == "smoke" ? std::max(5, full_count / 10) : full_count;
  }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

namespace detail {

template <typename Fn>
CriterionResult timed_criterion(int id, const std::string& name, double time_limit, Fn&& body) {
  CriterionResult res;
  res.id = id;
  res.name = name;
  auto start = std::chrono::steady_clock::now();
  try {
    res.pass = body(res.details);
  } catch (const std::exception& e) {
    res.pass = false;
    res.details = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.seconds > time_limit) {
    res.pass = false;
    res.details += " [exceeded " + format_number(time_limit) + " s time limit]";
  }
  return res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Pogorelov exactness.

inline CriterionResult criterion_pogorelov_exactness(const VerifyOptions& opt) {
  return detail::timed_criterion(1, "pogorelov-exactness", 10.0, [&](std::string& details) {
    bool ok = true;
    std::ostringstream line;
    const int points = opt.scale_count(1000);
    for (int n : {3, 4}) {
      PogorelovProfile prof = solve_profile_ode(n);
      const double fpp_closed = std::pow(prof.alpha, 1.0 - n) / (prof.alpha - 1.0);
      const double fpp_err = std::abs(prof.eval_fpp(0.0) - fpp_closed);
      Field u = build_ode_exact_field(std::make_shared<PogorelovProfile>(prof));
      double max_dev = 0.0;
      Rng rng(stream_seed(opt.seed, "c1", n));
      for (int i = 0; i < points; ++i) {
        Vector x(n);
        x.head(n - 1) = rng.unit_vector(n - 1) * (0.05 + 0.45 * rng.uniform());
        x[n - 1] = prof.valid_radius * rng.uniform(-0.5, 0.5);
        DetCertificate cert =
            determinant_check(u, x, Field::Setting::Real, DerivativeMode::FiniteDifference);
        max_dev = std::max(max_dev, std::abs(cert.det - 1.0));
      }
      ok = ok && max_dev < 1e-6 && prof.residual_ode < 1e-10 &&
           prof.residual_consistency < 1e-10 && fpp_err < 1e-9;
      line << "n=" << n << ": |det-1|<=" << format_number(max_dev)
           << " residual=" << format_number(prof.residual_ode)
           << " f''(0) err=" << format_number(fpp_err) << "; ";
    }
    details = line.str();
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 2. Critical log-divergence.

inline CriterionResult criterion_critical_blowup(const VerifyOptions& opt) {
  return detail::timed_criterion(2, "critical-log-divergence", 60.0, [&](std::string& details) {
    const double oracle = std::pow(28.0 / 9.0, 4.5) * 4.0 * M_PI * std::log(2.0);
    AnnulusScheme scheme;
    scheme.r_outer = 1.0;
    scheme.annuli = 8;
    scheme.budget = opt.scale(25000);
    scheme.seed = opt.seed;
    Field w = builtin::power_norm(3, 4.0 / 3.0);
    AnnulusProfile prof = dyadic_annulus_profile(w, DerivedQuantity::Laplacian, 4.5, scheme);
    double worst = 0.0;
    for (const auto& bin : prof.bins)
      if (!bin.dropped) worst = std::max(worst, std::abs(bin.mass - oracle) / oracle);
    LogFitReport fit = log_divergence_fit(prof);
    bool ok = worst < 0.01 && fit.r2 > 0.999 && fit.verdict == "log-divergent";
    details = "per-annulus mass within " + format_number(worst) + " of " + format_number(oracle) +
              ", cumulative fit R2=" + format_number(fit.r2) + " (" + fit.verdict + ")";
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 3. Sharpness thresholds.

inline CriterionResult criterion_sharpness(const VerifyOptions& opt) {
  return detail::timed_criterion(3, "sharpness-thresholds", 900.0, [&](std::string& details) {
    MembershipOptions mo;
    mo.budget = opt.scale(50000);
    mo.seed = opt.seed;
    bool ok = true;
    std::ostringstream line;
    struct Case {
      Field::Setting setting;
      int n, k;
      ExampleSpec::Family family;
    };
    const std::vector<Case> cases = {
        {Field::Setting::Real, 3, 1, ExampleSpec::Family::OdeExact},
        {Field::Setting::Real, 5, 2, ExampleSpec::Family::PowerTimesQuadratic},
        {Field::Setting::Complex, 2, 1, ExampleSpec::Family::PowerTimesQuadratic},
    };
    for (const auto& c : cases) {
      ExampleSpec spec;
      spec.setting = c.setting;
      spec.n = c.n;
      spec.k = c.k;
      spec.family = c.family;
      SharpnessReport rep = sharpness_experiment(spec, {0.9, 1.0}, mo);
      for (const auto& row : rep.rows) ok = ok && row.expected_ok;
      ok = ok && rep.zero_set_ok;
      line << (c.setting == Field::Setting::Real ? "real" : "complex") << "(" << c.n << ","
           << c.k << "): " << membership_name(rep.rows[0].verdict) << "/"
           << membership_name(rep.rows[1].verdict);
      if (c.setting == Field::Setting::Real && c.n == 3 && c.k == 1) {
        double ratio_dev = std::abs(rep.rows[0].per_annulus_ratio / std::pow(2.0, -0.2) - 1.0);
        ok = ok && ratio_dev <= 0.05;
        line << " subcritical ratio dev=" << format_number(ratio_dev);
      }
      line << "; ";
    }
    details = line.str();
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 4. Annulus mass bound property suite.

inline CriterionResult criterion_annulus_mass(const VerifyOptions& opt) {
  return detail::timed_criterion(4, "annulus-mass-bound", 300.0, [&](std::string& details) {
    const int per_dim = opt.scale_count(500);
    const int budget = opt.scale(4000);
    int failures = 0, total = 0;
    std::ostringstream line;
    for (int d : {2, 3, 4}) {
      double worst_margin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < per_dim; ++i) {
        int pieces = d + 1 + (i % 8);
        ConvexSample s = random_convex(d, pieces, stream_seed(opt.seed, "c4", d * 100000 + i));
        MassBoundReport rep = annulus_mass_bound_check(s, budget, stream_seed(opt.seed, "c4b", i));
        ++total;
        if (!rep.pass) ++failures;
        worst_margin = std::min(worst_margin, rep.mass / rep.bound);
      }
      line << "d=" << d << " min mass/bound=" << format_number(worst_margin) << "; ";
    }
    details = std::to_string(failures) + "/" + std::to_string(total) + " failures; " + line.str();
    return failures == 0;
  });
}

// ---------------------------------------------------------------------------
// 5. Scaling invariance.

inline CriterionResult criterion_scaling(const VerifyOptions& opt) {
  return detail::timed_criterion(5, "scaling-invariance", 120.0, [&](std::string& details) {
    const int budget = opt.scale(40000);
    const std::vector<double> radii = {0.5, 0.25, 0.125};
    Field w = builtin::power_norm(3, 4.0 / 3.0);
    ScalingCheck real_check = scaling_invariance_real(w, 4.0 / 3.0, 3.0, radii, budget, opt.seed);
    ExampleSpec spec;
    spec.setting = Field::Setting::Complex;
    spec.n = 2;
    spec.k = 1;
    spec.family = ExampleSpec::Family::PowerTimesQuadratic;
    Field u = build_example(spec);
    ScalingCheck cx_check = scaling_invariance_complex(u, 2, 1, radii, budget, opt.seed);
    bool ok = real_check.max_rel_deviation < 1e-3 && cx_check.max_rel_deviation < 1e-2;
    details = "real deviation " + format_number(real_check.max_rel_deviation) +
              ", complex deviation " + format_number(cx_check.max_rel_deviation);
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 6. Growth scans.

inline CriterionResult criterion_growth(const VerifyOptions& opt) {
  return detail::timed_criterion(6, "growth-exponents", 300.0, [&](std::string& details) {
    const std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    const int sup_budget = opt.scale(400);
    std::ostringstream line;
    bool ok = true;

    ExampleSpec ode;
    ode.setting = Field::Setting::Real;
    ode.n = 3;
    ode.k = 1;
    ode.family = ExampleSpec::Family::OdeExact;
    GrowthCheck g1 =
        growth_exponent_fit(build_example(ode), 4.0 / 3.0, radii, 16, sup_budget, opt.seed);
    ok = ok && std::abs(g1.exponent - 4.0 / 3.0) <= 0.02;
    line << "ode(3,1)=" << format_number(g1.exponent);

    ExampleSpec ptq;
    ptq.setting = Field::Setting::Real;
    ptq.n = 5;
    ptq.k = 2;
    ptq.family = ExampleSpec::Family::PowerTimesQuadratic;
    GrowthCheck g2 = growth_exponent_fit(build_example(ptq), 1.2, radii, 16, sup_budget, opt.seed);
    ok = ok && std::abs(g2.exponent - 1.2) <= 0.03;
    line << " ptq(5,2)=" << format_number(g2.exponent);

    ExampleSpec cx;
    cx.setting = Field::Setting::Complex;
    cx.n = 2;
    cx.k = 1;
    cx.family = ExampleSpec::Family::PowerTimesQuadratic;
    GrowthScan g3 = complex_growth_scan(build_example(cx), 1.0, radii, 16, sup_budget, opt.seed);
    ok = ok && std::abs(g3.exponent - 1.0) <= 0.02 && g3.pass;
    line << " blocki(2,1)=" << format_number(g3.exponent);

    details = line.str();
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 7. Section geometry.

inline CriterionResult criterion_sections(const VerifyOptions& opt) {
  return detail::timed_criterion(7, "section-geometry", 300.0, [&](std::string& details) {
    bool ok = true;
    std::ostringstream line;

    // Paraboloid section volumes on a snug domain: equal-volume strata keep
    // the rejection variance far below the 1% tolerance.
    double worst_vol = 0.0;
    for (int d : {2, 3}) {
      for (double h : {0.02, 0.05}) {
        double R = 1.25 * std::sqrt(2.0 * h);
        Field u = Field::analytic(
            "section_paraboloid", Domain::ball(d, R),
            [](const Vector& x) { return 0.5 * x.squaredNorm(); },
            [](const Vector& x) {
              Jet2 j;
              j.value = 0.5 * x.squaredNorm();
              j.grad = x;
              j.hess = Matrix::Identity(x.size(), x.size());
              return j;
            });
        Section sec = section_extract(u, Vector::Zero(d), h, opt.scale(200000), opt.seed);
        double oracle = unit_ball_volume(d) * std::pow(2.0 * h, 0.5 * d);
        worst_vol = std::max(worst_vol, std::abs(sec.volume - oracle) / oracle);
      }
    }
    ok = ok && worst_vol < 0.01;
    line << "paraboloid volume dev=" << format_number(worst_vol);

    // Pogorelov tangent sections at the origin reach the boundary segment.
    ExampleSpec ode;
    ode.setting = Field::Setting::Real;
    ode.n = 3;
    ode.k = 1;
    ode.family = ExampleSpec::Family::OdeExact;
    Field pg = build_example(ode);
    bool never_compact = true;
    for (double h : {1e-3, 1e-2, 1e-1}) {
      Section sec = section_extract(pg, Vector::Zero(3), h, opt.scale(50000), opt.seed);
      never_compact = never_compact && !sec.compactly_contained;
    }
    ok = ok && never_compact;
    line << ", pogorelov sections compact=" << (never_compact ? "never" : "SOMETIMES");

    // Sub-level growth exponents on det >= 1 families.
    const std::vector<double> heights = {0.01, 0.0148, 0.0219, 0.0324, 0.0479, 0.0708, 0.1047};
    double worst_exp_margin = std::numeric_limits<double>::infinity();
    for (int d : {2, 3}) {
      GrowthCheck g =
          sublevel_growth_check(builtin::paraboloid(d), heights, opt.scale(100000), opt.seed);
      worst_exp_margin = std::min(worst_exp_margin, g.exponent - (0.5 * d - 0.05));
      ok = ok && g.pass;
    }
    GrowthCheck gpg = sublevel_growth_check(pg, heights, opt.scale(100000), opt.seed);
    worst_exp_margin = std::min(worst_exp_margin, gpg.exponent - (1.5 - 0.05));
    ok = ok && gpg.pass;
    line << ", sublevel exponent margin=" << format_number(worst_exp_margin);

    details = line.str();
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 8. Orlicz machinery.

inline CriterionResult criterion_orlicz(const VerifyOptions& opt) {
  return detail::timed_criterion(8, "orlicz-machinery", 60.0, [&](std::string& details) {
    bool ok = true;
    std::ostringstream line;

    // Luxemburg norms against L^p closed forms: constant-Laplacian fields make
    // the stratified estimate exact, so the comparison is pure bisection error.
    double worst = 0.0;
    const int budget = opt.scale(20000);
    for (int d : {2, 3}) {
      Field w = builtin::paraboloid(d);
      Domain ann = Domain::annulus(d, 0.5, 1.0);
      double vol = ann.volume();
      for (double p : {2.0, 3.0, 4.5}) {
        auto g = [&w](const Vector& x) { return w.jet(x).laplacian(); };
        double lux = luxemburg_norm(g, ann, OrliczGauge::power(p), budget, opt.seed, 1e-6);
        double closed = d * std::pow(vol, 1.0 / p);  // Delta(|x|^2/2) = d
        worst = std::max(worst, std::abs(lux - closed) / closed);
      }
    }
    ok = ok && worst < 1e-4;
    line << "Luxemburg closed-form dev=" << format_number(worst);

    // 20-case divergence truth table at the real (3,1) critical power 3.
    struct TableCase {
      double m, s;
      bool pure;
      bool diverges;
    };
    const std::vector<TableCase> table = {
        {2.0, 0.0, true, false},  {2.5, 0.0, true, false},  {2.9, 0.0, true, false},
        {3.0, 0.0, true, true},   {3.1, 0.0, true, true},   {3.5, 0.0, true, true},
        {4.0, 0.0, true, true},   {2.5, 0.5, false, false}, {2.5, 1.5, false, false},
        {2.9, 2.0, false, false}, {3.0, 0.5, false, true},  {3.0, 0.9, false, true},
        {3.0, 1.0, false, true},  {3.0, 1.1, false, false}, {3.0, 1.5, false, false},
        {3.0, 2.0, false, false}, {3.1, 0.5, false, true},  {3.1, 2.0, false, true},
        {3.5, 1.5, false, true},  {4.0, 3.0, false, true},
    };
    int mismatches = 0;
    for (const auto& c : table) {
      OrliczGauge gauge = c.pure ? OrliczGauge::power(c.m) : OrliczGauge::power_log(c.m, c.s);
      OrliczVerdict v = orlicz_divergence_test(gauge, Field::Setting::Real, 3, 1);
      bool diverges = v == OrliczVerdict::Diverges;
      if (diverges != c.diverges) ++mismatches;
    }
    ok = ok && mismatches == 0;
    line << ", truth table mismatches=" << mismatches << "/20";

    details = line.str();
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 9. Dichotomy corpus.

inline CriterionResult criterion_dichotomy(const VerifyOptions& opt) {
  return detail::timed_criterion(9, "dichotomy-corpus", 600.0, [&](std::string& details) {
    DichotomyCorpus corpus = dichotomy_corpus(opt.scale_count(200), 3, 4.0, {0.05, 0.1},
                                              opt.scale(20000), opt.seed);
    bool ok = corpus.all_pass && corpus.delta_emp > 0.0 && corpus.c0_emp > 0.0;
    details = "delta_emp=" + format_number(corpus.delta_emp) +
              " c0_emp=" + format_number(corpus.c0_emp) +
              " min inner significance=" + format_number(corpus.min_inner_sigma) + " sigma over " +
              std::to_string(corpus.reports.size()) + " probes";
    return ok;
  });
}

// ---------------------------------------------------------------------------
// 10. Determinism.

/// Small representative output set used by the determinism criterion and the
/// CLI smoke paths.
inline void write_demo_outputs(const std::filesystem::path& dir, std::uint64_t seed, int budget) {
  AnnulusScheme scheme;
  scheme.r_outer = 1.0;
  scheme.annuli = 6;
  scheme.budget = budget;
  scheme.seed = seed;
  Field w = builtin::power_norm(3, 4.0 / 3.0);
  AnnulusProfile prof = dyadic_annulus_profile(w, DerivedQuantity::Laplacian, 4.5, scheme);
  write_text(dir / "profile.csv", annulus_profile_csv(prof));
  write_json(dir / "fit.json", fit_json(log_divergence_fit(prof)));

  Section sec = section_extract(builtin::paraboloid(2), Vector::Zero(2), 0.05, budget, seed);
  write_text(dir / "section.csv", section_csv(sec));
  write_json(dir / "section.json", section_sidecar_json(sec));

  PogorelovProfile pg = solve_profile_ode(3);
  write_text(dir / "pogorelov.csv", profile_grid_csv(pg));
  write_json(dir / "pogorelov.json", profile_sidecar_json(pg));
}

inline CriterionResult criterion_determinism(const VerifyOptions& opt) {
  return detail::timed_criterion(10, "determinism", 900.0, [&](std::string& details) {
    namespace fs = std::filesystem;
    fs::path base = opt.scratch.empty() ? fs::temp_directory_path() / "mongelab_verify"
                                        : fs::path(opt.scratch);
    const int budget = opt.scale(20000);
    write_demo_outputs(base / "run1", opt.seed, budget);
    write_demo_outputs(base / "run2", opt.seed, budget);
    const std::vector<std::string> files = {"profile.csv",   "fit.json",       "section.csv",
                                            "section.json",  "pogorelov.csv",  "pogorelov.json"};
    int mismatched = 0;
    for (const auto& f : files)
      if (read_file(base / "run1" / f) != read_file(base / "run2" / f)) ++mismatched;
    details = std::to_string(files.size() - mismatched) + "/" + std::to_string(files.size()) +
              " files byte-identical";
    return mismatched == 0;
  });
}

// ---------------------------------------------------------------------------
// Driver.

struct VerifySummary {
  std::vector<CriterionResult> results;
  bool all_pass = false;
  std::string tier;
};

inline VerifySummary verify_all(const VerifyOptions& opt = {}) {
  VerifySummary summary;
  summary.tier = opt.tier;
  summary.results.push_back(criterion_pogorelov_exactness(opt));
  summary.results.push_back(criterion_critical_blowup(opt));
  summary.results.push_back(criterion_sharpness(opt));
  summary.results.push_back(criterion_annulus_mass(opt));
  summary.results.push_back(criterion_scaling(opt));
  summary.results.push_back(criterion_growth(opt));
  summary.results.push_back(criterion_sections(opt));
  summary.results.push_back(criterion_orlicz(opt));
  summary.results.push_back(criterion_dichotomy(opt));
  summary.results.push_back(criterion_determinism(opt));
  summary.all_pass = true;
  for (const auto& r : summary.results) summary.all_pass = summary.all_pass && r.pass;
  return summary;
}

}  // namespace mongelab
