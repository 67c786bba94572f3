#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relosc/diagnostics.hpp"
#include "relosc/level_solver.hpp"
#include "relosc/results.hpp"
#include "relosc/scalar.hpp"
#include "relosc/verify.hpp"

namespace relosc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class FrameKind { real, translated, dilated };

struct RunConfig {
  std::vector<std::string> omegas;
  std::vector<int> levels{0};
  std::vector<FrameKind> frames{FrameKind::translated};
  Variant variant = Variant::dirac_titchmarsh;
  Branch branch = Branch::plus;
  std::string y = "3";
  std::string theta = "0.3";
  std::string sigma = "1";
  int digits = 40;
  int blocks = 100;
  int curve_step = 50;
  bool theta_check = true;
  bool timing = true;
  OutputFormat format = OutputFormat::csv;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s + ",") {
    if (c == ',' || c == ' ' || c == ';') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  return out;
}

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// "0.002,0.003" or "0.002:0.005:0.0005" (inclusive range), mixed freely.
inline std::vector<std::string> parse_omega_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& item : split_list(s)) {
    const auto parts = [&] {
      std::vector<std::string> p;
      std::stringstream ss(item);
      std::string x;
      while (std::getline(ss, x, ':')) p.push_back(x);
      return p;
    }();
    auto positive = [&](const std::string& t) {
      double v = 0;
      try {
        size_t used = 0;
        v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw UsageError("malformed omega: " + t);
      }
      if (!(v > 0)) throw UsageError("omega must be positive: " + t);
      return v;
    };
    if (parts.size() == 1) {
      positive(parts[0]);
      out.push_back(parts[0]);
    } else if (parts.size() == 3) {
      const double a = positive(parts[0]);
      const double b = positive(parts[1]);
      const double step = positive(parts[2]);
      if (b < a) throw UsageError("empty omega range: " + item);
      const long count = std::lround((b - a) / step);
      for (long k = 0; k <= count; ++k) out.push_back(format_number(a + static_cast<double>(k) * step));
    } else {
      throw UsageError("omega range must be a:b:step: " + item);
    }
  }
  return out;
}

/// "0,1,2" or "0:3".
inline std::vector<int> parse_level_list(const std::string& s) {
  std::vector<int> out;
  auto to_int = [](const std::string& t) {
    try {
      size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size() || v < 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw UsageError("level must be a non-negative integer: " + t);
    }
  };
  for (const auto& item : split_list(s)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int a = to_int(item.substr(0, colon));
    const int b = to_int(item.substr(colon + 1));
    for (int n = a; n <= b; ++n) out.push_back(n);
  }
  return out;
}

inline FrameKind parse_frame(const std::string& s) {
  if (s == "r" || s == "real") return FrameKind::real;
  if (s == "t" || s == "translated") return FrameKind::translated;
  if (s == "d" || s == "dilated") return FrameKind::dilated;
  throw UsageError("unknown frame: " + s);
}

inline std::vector<FrameKind> parse_frame_list(const std::string& s) {
  std::vector<FrameKind> out;
  for (const auto& item : split_list(s)) out.push_back(parse_frame(item));
  if (out.empty()) throw UsageError("no frame given");
  return out;
}

inline std::string frame_label(FrameKind f) {
  switch (f) {
    case FrameKind::real:
      return "real";
    case FrameKind::translated:
      return "translated";
    default:
      return "dilated";
  }
}

inline SolverConfig<hp_real> solver_config(const RunConfig& rc) {
  SolverConfig<hp_real> cfg;
  cfg.ctx = make_context(rc.digits);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  cfg.sigma = parse_real(rc.sigma);
  cfg.n_blocks = rc.blocks;
  cfg.variant = rc.variant;
  cfg.branch = rc.branch;
  if (!rc.theta_check) cfg.theta_shift = 0;
  return cfg;
}

inline LevelResult<hp_real> solve_frame(const RunConfig& rc, const SolverConfig<hp_real>& cfg, const hp_real& om,
                                        int n, FrameKind f) {
  switch (f) {
    case FrameKind::real:
      return solve_level(om, n, Frame<hp_real>{RealFrame<hp_real>{}}, cfg);
    case FrameKind::translated:
      return solve_level(om, n, Frame<hp_real>{TranslatedFrame<hp_real>{parse_real(rc.y)}}, cfg);
    default:
      return solve_resonance(om, n, parse_real(rc.theta), cfg);
  }
}

inline std::string error_text(const std::exception& e) {
  if (const auto* s = dynamic_cast<const SolverError*>(&e)) return solver_error_name(s->kind()) + ": " + e.what();
  return e.what();
}

/// One row; solver failures land in the error column.
inline ResultRow solve_row(const RunConfig& rc, const std::string& omega, int n, FrameKind f) {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = solver_config(rc);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  ResultRow row;
  try {
    row = make_row(solve_frame(rc, cfg, parse_real(omega), n, f), rc.digits, omega);
  } catch (const std::exception& e) {
    row.omega = omega;
    row.n = n;
    row.frame = frame_label(f);
    row.variant = variant_name(rc.variant);
    row.branch = branch_name(rc.branch);
    row.basis_blocks = rc.blocks;
    row.digits = rc.digits;
    row.sigma = to_decimal_string(cfg.sigma, 6);
    row.y_or_theta = f == FrameKind::real ? "0" : f == FrameKind::translated ? rc.y : rc.theta;
    row.error = error_text(e);
  }
  if (rc.timing) {
    row.wall_time_s = format_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return row;
}

/// Rows for every (Omega, n, frame); solves run one at a time since the MPFR
/// default precision is process-wide.
inline std::vector<ResultRow> level_rows(const RunConfig& rc) {
  std::vector<ResultRow> rows;
  for (const auto& om : rc.omegas) {
    for (int n : rc.levels) {
      for (auto f : rc.frames) rows.push_back(solve_row(rc, om, n, f));
    }
  }
  return rows;
}

inline bool any_error(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) {
    if (!r.error.empty()) return true;
  }
  return false;
}

/// Lambda(n) curve and kappa, delta, ratio per Omega, followed by fits over
/// Omega. kind is one of curve, record, kappa_fit, delta_fit, ratio_limit.
inline Table diagnostics_table(const RunConfig& rc, std::ostream& err, bool& failed) {
  Table t;
  for (const char* c : {"kind", "omega", "blocks", "Lambda", "width_log", "ratio", "kappa", "delta", "intercept",
                        "slope", "error"}) {
    t.add_column(c, std::string(c) == "blocks");
  }
  auto cfg = solver_config(rc);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  auto cfg_r = cfg;
  cfg_r.variant = Variant::klein_gordon;
  const int shown = std::min(rc.digits, 20);
  auto num = [&](const hp_real& x) { return to_decimal_string(x, shown); };
  const hp_real y = parse_real(rc.y);
  const hp_real theta = parse_real(rc.theta);

  std::vector<hp_real> xs, kappas, deltas, ratio_x, ratios;
  for (const auto& om_text : rc.omegas) {
    const hp_real om = parse_real(om_text);
    auto row = [&](const std::string& kind) {
      std::vector<std::string> r(t.columns.size());
      r[0] = kind;
      r[1] = om_text;
      return r;
    };
    try {
      const auto d = solve_resonance(om, 0, theta, cfg);
      std::optional<LambdaGap<hp_real>> full;
      std::vector<LevelResult<hp_real>> lt, lr;
      for (int nb = std::min(rc.curve_step, rc.blocks);; nb = std::min(nb + rc.curve_step, rc.blocks)) {
        auto c = cfg;
        c.n_blocks = nb;
        const auto lev = solve_level(om, 0, Frame<hp_real>{TranslatedFrame<hp_real>{y}}, c);
        auto r = row("curve");
        r[2] = std::to_string(nb);
        try {
          const auto g = lambda_gap(lev.energy.real(), d.energy);
          r[3] = num(g.Lambda);
          r[4] = num(g.width_log);
          r[5] = num(g.ratio);
          if (nb == rc.blocks) full = g;
        } catch (const SolverError& e) {
          r[10] = error_text(e);
        }
        t.rows.push_back(std::move(r));
        if (nb == rc.blocks) {
          lt.push_back(lev);
          break;
        }
      }
      lt.push_back(solve_level(om, 1, Frame<hp_real>{TranslatedFrame<hp_real>{y}}, cfg));
      for (int n : {0, 1}) lr.push_back(solve_level(om, n, Frame<hp_real>{RealFrame<hp_real>{}}, cfg_r));
      const auto [kappa, delta] = kappa_delta(lt, lr, om);
      auto r = row("record");
      r[2] = std::to_string(rc.blocks);
      if (full) {
        r[3] = num(full->Lambda);
        r[4] = num(full->width_log);
        r[5] = num(full->ratio);
        ratio_x.push_back(om);
        ratios.push_back(full->ratio);
      }
      r[6] = num(kappa);
      r[7] = num(delta);
      t.rows.push_back(std::move(r));
      xs.push_back(om);
      kappas.push_back(kappa);
      deltas.push_back(delta);
    } catch (const std::exception& e) {
      auto r = row("record");
      r[2] = std::to_string(rc.blocks);
      r[10] = error_text(e);
      t.rows.push_back(std::move(r));
      failed = true;
    }
  }
  auto fit_row = [&](const std::string& kind) {
    std::vector<std::string> r(t.columns.size());
    r[0] = kind;
    return r;
  };
  if (xs.size() >= 2) {
    for (auto [kind, ys] : {std::pair{"kappa_fit", &kappas}, std::pair{"delta_fit", &deltas}}) {
      const auto fit = least_squares_line(xs, *ys);
      auto r = fit_row(kind);
      r[8] = num(fit.intercept);
      r[9] = num(fit.slope);
      t.rows.push_back(std::move(r));
    }
  } else if (!rc.omegas.empty()) {
    err << "warning: fits need at least two omega values; skipped\n";
  }
  if (ratio_x.size() >= 2) {
    auto r = fit_row("ratio_limit");
    r[8] = num(lagrange_extrapolate(ratio_x, ratios, hp_real(0)));
    t.rows.push_back(std::move(r));
  }
  return t;
}

inline void emit(const Table& t, const RunConfig& rc, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    write_table(out, t, rc.format);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + out_path);
  write_table(f, t, rc.format);
}

/// Parses argv and runs the subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Spectral solver for the Titchmarsh and Klein-Gordon quartic oscillators"};
  app.set_config("--config", "", "TOML or INI file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig rc;
  std::string omega_text, levels_text = "0", frame_text, format_text = "csv", out_path, variant_text = "dirac",
                                branch_text = "plus", verify_level = "quick";
  bool no_timing = false, no_theta_check = false;

  auto add_common = [&](CLI::App* sub, bool frames) {
    sub->add_option("--omega", omega_text, "values and a:b:step ranges, comma separated");
    sub->add_option("--levels", levels_text, "level indices, e.g. 0,1,2 or 0:3");
    if (frames) sub->add_option("--frame", frame_text, "r|t|d (real, translated, dilated), comma separated");
    sub->add_option("--y", rc.y, "imaginary translation")->capture_default_str();
    sub->add_option("--theta", rc.theta, "dilation angle")->capture_default_str();
    sub->add_option("--sigma", rc.sigma, "basis frequency")->capture_default_str();
    sub->add_option("--digits", rc.digits, "decimal digits")->capture_default_str();
    sub->add_option("--blocks", rc.blocks, "4x4 blocks in the recurrence")->capture_default_str();
    sub->add_option("--variant", variant_text, "dirac|klein-gordon")->capture_default_str();
    sub->add_option("--branch", branch_text, "plus|minus")->capture_default_str();
    sub->add_flag("--no-timing", no_timing, "leave wall_time_s empty");
    sub->add_flag("--no-theta-check", no_theta_check, "skip the second-angle check of resonances");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format_text, "csv|json")->capture_default_str();
    sub->add_option("--out", out_path, "output file (default stdout)");
  };

  auto* levels = app.add_subcommand("levels", "self-consistent levels, one row per (omega, n)");
  add_common(levels, true);
  add_output(levels);
  auto* resonance = app.add_subcommand("resonance", "complex levels in the dilated frame");
  add_common(resonance, false);
  add_output(resonance);
  auto* diagnostics = app.add_subcommand("diagnostics", "Lambda curves, kappa, delta and fits");
  add_common(diagnostics, false);
  add_output(diagnostics);
  diagnostics->add_option("--curve-step", rc.curve_step, "block step of the Lambda(n) curve")->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "levels over every frame (default r,t,d)");
  add_common(sweep, true);
  add_output(sweep);
  auto* verify = app.add_subcommand("verify", "acceptance checks");
  verify->add_option("level", verify_level, "quick|full")->capture_default_str();
  verify->add_flag("--no-timing", no_timing, "leave wall_time_s out");
  add_output(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (format_text == "csv") {
      rc.format = OutputFormat::csv;
    } else if (format_text == "json") {
      rc.format = OutputFormat::json;
    } else {
      throw UsageError("unknown format: " + format_text);
    }
    rc.timing = !no_timing;

    if (verify->parsed()) {
      const auto level = parse_verify_level(verify_level);
      if (!level) throw UsageError("unknown verify level: " + verify_level);
      std::vector<CriterionResult> results;
      bool ok = true;
      for (int id : criteria_for(*level)) {
        results.push_back(run_criterion(id));
        ok = ok && results.back().passed;
        err << (results.back().passed ? "PASS " : "FAIL ") << id << " " << results.back().name << "\n";
      }
      emit(verify_table(results, rc.timing), rc, out_path, out);
      return ok ? kExitOk : kExitSolver;
    }

    if (variant_text == "dirac") {
      rc.variant = Variant::dirac_titchmarsh;
    } else if (variant_text == "klein-gordon" || variant_text == "klein_gordon") {
      rc.variant = Variant::klein_gordon;
    } else {
      throw UsageError("unknown variant: " + variant_text);
    }
    if (branch_text == "plus") {
      rc.branch = Branch::plus;
    } else if (branch_text == "minus") {
      rc.branch = Branch::minus;
    } else {
      throw UsageError("unknown branch: " + branch_text);
    }
    rc.theta_check = !no_theta_check;
    rc.omegas = parse_omega_list(omega_text);
    rc.levels = parse_level_list(levels_text);
    if (rc.blocks < 2) throw UsageError("--blocks must be at least 2");
    if (rc.curve_step < 1) throw UsageError("--curve-step must be positive");
    try {
      make_context(rc.digits);
      WorkingPrecision<hp_real> wp(make_context(rc.digits));
      BasisSpec<hp_real>{parse_real(rc.sigma), 4 * rc.blocks}.validate();
      validate_frame(Frame<hp_real>{TranslatedFrame<hp_real>{parse_real(rc.y)}});
      validate_frame(Frame<hp_real>{DilatedFrame<hp_real>{parse_real(rc.theta)}});
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    if (diagnostics->parsed()) {
      bool failed = false;
      const auto t = diagnostics_table(rc, err, failed);
      emit(t, rc, out_path, out);
      return failed ? kExitSolver : kExitOk;
    }
    if (resonance->parsed()) {
      rc.frames = {FrameKind::dilated};
    } else if (sweep->parsed()) {
      rc.frames = parse_frame_list(frame_text.empty() ? "r,t,d" : frame_text);
    } else {
      rc.frames = parse_frame_list(frame_text.empty() ? "t" : frame_text);
    }
    const auto rows = level_rows(rc);
    emit(level_table(rows), rc, out_path, out);
    return any_error(rows) ? kExitSolver : kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace relosc::cli
