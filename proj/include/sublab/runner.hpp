#pragma once
// Config-driven runs and sweeps: evaluate (size, coupling) points, fold size
// families, write report.txt, per-task CSVs and summary.json.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bernstein.hpp"
#include "checks.hpp"
#include "config.hpp"
#include "criticality.hpp"
#include "hardy.hpp"
#include "lattice.hpp"
#include "spectral.hpp"
#include "wave.hpp"

namespace sublab {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitViolation = 2 };

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

struct PointSetup {
  int n = 0;
  double lambda = 0.0;
  DiscreteSpace space;
  SignedMeasure mu;
  SchrodingerOperator plus;  // base + mu+
  SchrodingerOperator op;    // base + mu+ - mu-, with certificate
  VectorXd g;
};

// Turns a config into (size, coupling) -> operator.
class ScenarioModel {
 public:
  explicit ScenarioModel(const RunConfig& c) : c_(c) {
    if (c.scenario == "hardy" || c.scenario == "trace_hardy") {
      ScenarioSpec s;
      s.kind = c.scenario == "hardy" ? HardyKind::hardy : HardyKind::trace_hardy;
      s.dim = c.dim;
      s.alpha = c.alpha;
      s.p = c.p;
      s.h = c.h;
      s.eps = c.eps;
      s.form_scale = c.form_scale.value_or(0.5);
      s.profile = c.profile == "ground_state" ? Profile::ground_state : Profile::power;
      hardy_.emplace(s);
    }
  }

  const std::optional<HardyScenario>& hardy() const { return hardy_; }

  DiscreteSpace space(int n) const {
    if (c_.scenario == "single_node") return single_node(c_.killing);
    if (hardy_) return hardy_->space(n);
    GridSpec g;
    g.dim = c_.dim;
    g.n = n;
    g.h = c_.h;
    g.boundary = c_.boundary == "free" ? Boundary::free : Boundary::dirichlet;
    g.form_scale = c_.form_scale.value_or(1.0);
    if (c_.glue_dim > 0) {
      GlueSpec gl;
      gl.grid = g;
      gl.grid.dim = c_.glue_dim;
      gl.grid.n = c_.glue_n > 0 ? c_.glue_n : n;
      return build_space(g, gl);
    }
    return build_space(g);
  }

  SignedMeasure measure(const DiscreteSpace& sp, double lambda) const {
    if (c_.scenario == "single_node") {
      auto mu = SignedMeasure::zero(sp.size());
      mu.minus(0) = lambda;
      return mu;
    }
    if (hardy_) return hardy_->measure(sp, lambda);
    if (c_.measure == "none") return SignedMeasure::zero(sp.size());
    MeasureSpec ms;
    if (c_.measure == "uniform") ms = MeasureSpec::uniform(lambda);
    else if (c_.measure == "radial") ms = MeasureSpec::radial(lambda, c_.p.value_or(2.0), c_.eps);
    else ms = MeasureSpec::plane(lambda, c_.p.value_or(1.0), -1, c_.eps);
    return attach_measure(sp, ms, c_.sign == "plus" ? Sign::plus : Sign::minus);
  }

  SchrodingerOperator base(const DiscreteSpace& sp) const {
    if (hardy_) return hardy_->base(sp);
    SchrodingerOperator op;
    op.K = sp.form_matrix();
    op.m = sp.mass;
    return op;
  }

  VectorXd weight(const DiscreteSpace& sp) const {
    if (c_.g == "ones") return VectorXd::Ones(sp.size());
    VectorXd g = VectorXd::Zero(sp.size());
    int c = sp.grids.empty() ? 0 : sp.origin(0);
    if (c < 0) c = sp.size() / 2;
    g(c) = 1.0;
    return g;
  }

  PointSetup setup(int n, double lambda, int dense_limit = 1500) const {
    PointSetup s;
    s.n = n;
    s.lambda = lambda;
    s.space = space(n);
    if (!s.space.connected()) throw std::invalid_argument("scenario space is not connected");
    s.mu = measure(s.space, lambda);
    auto b = base(s.space);
    s.plus = HardyScenario::perturb(b, s.mu.plus, VectorXd::Zero(s.space.size()));
    s.op = HardyScenario::perturb(b, s.mu.plus, s.mu.minus);
    certify(s.op, s.mu.minus, dense_limit);
    s.g = weight(s.space);
    return s;
  }

  // Coupling where lambda(mu) = 1 on the size-n space.
  double critical(int n) const {
    auto sp = space(n);
    auto mu = measure(sp, 1.0);
    auto plus = HardyScenario::perturb(base(sp), mu.plus, VectorXd::Zero(sp.size()));
    double l = lambda_of(plus, mu.minus);
    if (!std::isfinite(l)) throw std::invalid_argument("coupling_unit = critical needs a negative measure");
    return l;
  }

  double coupling(int n, double value) const {
    if (c_.coupling_unit == "critical") return value * critical(n);
    if (c_.coupling_unit == "star") return value * hardy_->lambda_star();
    return value;
  }

 private:
  RunConfig c_;
  std::optional<HardyScenario> hardy_;
};

struct PointResult {
  int n = 0;
  double value = 0.0;   // coupling as written in the config
  double lambda = 0.0;  // absolute coupling
  double beta = std::nan("");
  int nodes = 0;
  std::string entry;
  std::optional<Classification> cls;
  double green = std::nan("");
  std::string green_method;
  std::optional<Boundedness> wave;
  double seminorm = std::nan("");
  double range_norm = std::nan("");
  double energy_max = std::nan("");
  std::string wave_note;
  std::string trace_csv;
  std::string coo;
  std::vector<std::string> violations;
  std::vector<std::string> errors;
};

struct PointRequest {
  int n = 0;
  double value = 0.0;
  BernsteinEntry entry;
  double beta = std::nan("");
  bool classify = true, green = false, wave = false, check = false, trace = false;
};

inline PointResult evaluate_point(const ScenarioModel& model, const RunConfig& cfg, const PointRequest& req) {
  PointResult r;
  r.n = req.n;
  r.value = req.value;
  r.beta = req.beta;
  r.entry = req.entry.name;
  try {
    r.lambda = model.coupling(req.n, req.value);
    auto s = model.setup(req.n, r.lambda);
    r.nodes = s.space.size();
    if (cfg.export_coo) {
      std::ostringstream os;
      s.op.export_coo(os);
      r.coo = os.str();
    }
    if (req.classify) {
      r.cls = classify_from(lambda_of(s.plus, s.mu.minus), s.op, cfg.tol_trichotomy);
      if (req.check && r.cls->evidence["gamma_sign_consistent"] != "true")
        r.violations.push_back("lambda(mu) and the spectral certificate disagree in sign");
    }
    std::optional<SpectralDecomposition> d;
    bool small = s.op.size() <= cfg.budget;
    if (small && (req.green || req.wave)) d = decompose(s.op, cfg.budget);
    if (req.green) {
      if (s.op.negative) {
        r.green_method = "refused";
      } else if (d) {
        r.green = green_form(*d, req.entry, s.g);
        r.green_method = "spectral";
      } else {
        auto kg = green_form_krylov(s.op, {req.entry}, s.g);
        r.green = kg.values[0];
        r.green_method = kg.converged ? "krylov" : "krylov(unconverged)";
      }
    }
    if (req.wave) {
      if (!d) {
        r.wave_note = "skipped: " + std::to_string(s.op.size()) + " nodes exceed the dense budget";
      } else {
        try {
          auto times = wave_time_grid(*d, req.entry, cfg.wave_decades);
          auto tr = solve_wave(*d, req.entry, s.g, times);
          r.wave = boundedness_verdict(tr);
          r.seminorm = tr.range_seminorm;
          r.range_norm = tr.range_norm;
          r.energy_max = *std::max_element(tr.energy_residuals.begin(), tr.energy_residuals.end());
          r.wave_note = r.wave->bounded ? "bounded" : "growing";
          if (req.check) {
            if (r.energy_max > cfg.tol_energy * std::max(tr.g_norm2, 1e-300))
              r.violations.push_back("energy residual " + fmt(r.energy_max) + " above tolerance");
            if (r.wave->bounded && !r.wave->within_seminorm)
              r.violations.push_back("bounded wave exceeds the range seminorm");
          }
          if (req.trace) {
            std::ostringstream os;
            os << std::setprecision(15) << "t,norm,energy_residual\n";
            for (std::size_t i = 0; i < tr.times.size(); ++i)
              os << tr.times[i] << "," << tr.l2_norms[i] << "," << tr.energy_residuals[i] << "\n";
            r.trace_csv = os.str();
          }
        } catch (const SupercriticalRefusal& e) {
          r.wave_note = std::string("refused: ") + e.what();
        }
      }
    }
    if (req.check && d && !s.op.negative && req.entry.has_levy() && s.op.size() <= 200) {
      double res = okura_residual(*d, req.entry, s.g, s.g);
      if (res > cfg.tol_identity) r.violations.push_back("Levy-Khintchine residual " + fmt(res));
    }
  } catch (const std::exception& e) {
    r.errors.push_back(e.what());
  }
  return r;
}

// Runs fn(i) for i in [0, count) on `workers` threads.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct FamilyResult {
  double value = 0.0;
  std::string entry;
  std::optional<Classification> cls;
  std::string error;
};

struct RunOutcome {
  RunConfig config;
  std::vector<PointResult> points;
  std::vector<FamilyResult> families;
  std::vector<CheckResult> checks;
  int violations = 0;
  int errors = 0;
  int exit_code = kExitOk;
};

namespace detail {

inline nlohmann::json jnum(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

inline nlohmann::json point_json(const PointResult& p) {
  nlohmann::json j;
  j["n"] = p.n;
  j["coupling"] = jnum(p.value);
  j["lambda"] = jnum(p.lambda);
  j["nodes"] = p.nodes;
  j["entry"] = p.entry;
  if (!std::isnan(p.beta)) j["beta"] = p.beta;
  if (p.cls) {
    j["verdict"] = to_string(p.cls->verdict);
    j["lambda_mu"] = jnum(p.cls->lambda_mu);
    j["gamma_mu"] = jnum(p.cls->gamma_mu);
    j["evidence"] = p.cls->evidence;
  }
  if (!p.green_method.empty()) {
    j["green"] = jnum(p.green);
    j["green_method"] = p.green_method;
  }
  if (!p.wave_note.empty()) {
    j["wave"] = p.wave_note;
    if (p.wave) {
      j["wave_sup"] = jnum(p.wave->sup);
      j["wave_rate"] = jnum(p.wave->rate);
      j["range_seminorm"] = jnum(p.seminorm);
      j["energy_residual_max"] = jnum(p.energy_max);
    }
  }
  j["violations"] = p.violations;
  j["errors"] = p.errors;
  return j;
}

inline std::string describe_scenario(const RunConfig& c) {
  std::ostringstream os;
  os << c.scenario;
  if (c.scenario == "single_node") {
    os << " k=" << fmt(c.killing);
  } else {
    os << " dim=" << c.dim << " h=" << fmt(c.h);
    if (c.scenario == "grid")
      os << " boundary=" << c.boundary << " measure=" << c.measure << " sign=" << c.sign;
    else
      os << " alpha=" << fmt(c.alpha) << " profile=" << c.profile;
    if (c.p) os << " p=" << fmt(*c.p);
    if (c.glue_dim > 0) os << " glue_dim=" << c.glue_dim << " glue_n=" << c.glue_n;
  }
  os << " coupling_unit=" << c.coupling_unit;
  return os.str();
}

}  // namespace detail

inline RunOutcome execute_run(const RunConfig& cfg) {
  RunOutcome out;
  out.config = cfg;
  ScenarioModel model(cfg);
  auto entry = catalog_lookup(cfg.subordinator, cfg.sub_params);
  std::vector<PointRequest> reqs;
  for (int n : cfg.sizes)
    for (double v : cfg.couplings) {
      PointRequest q;
      q.n = n;
      q.value = v;
      q.entry = entry;
      q.classify = cfg.has(Task::classify) || cfg.has(Task::check);
      q.green = cfg.has(Task::green);
      q.wave = cfg.has(Task::wave);
      q.check = cfg.has(Task::check);
      q.trace = q.wave;
      reqs.push_back(q);
    }
  out.points.resize(reqs.size());
  parallel_for(static_cast<int>(reqs.size()), cfg.workers,
               [&](int i) { out.points[i] = evaluate_point(model, cfg, reqs[i]); });

  if (cfg.has(Task::green) && cfg.sizes.size() >= 3) {
    out.families.resize(cfg.couplings.size());
    parallel_for(static_cast<int>(cfg.couplings.size()), cfg.workers, [&](int j) {
      FamilyResult f;
      f.value = cfg.couplings[j];
      f.entry = entry.name;
      try {
        std::vector<FamilyMember> fam;
        for (int n : cfg.sizes) {
          auto s = model.setup(n, model.coupling(n, f.value));
          fam.push_back({n, std::move(s.op), std::move(s.g)});
        }
        FamilyOptions o;
        o.cauchy_tol = cfg.tol_cauchy;
        o.slope_tol = cfg.tol_slope;
        o.growth_slope = cfg.tol_growth;
        o.budget = cfg.budget;
        f.cls = classify_subordinated(fam, entry, o);
      } catch (const std::exception& e) {
        f.error = e.what();
      }
      out.families[j] = std::move(f);
    });
  }
  if (cfg.has(Task::check)) out.checks = run_battery(cfg.seed);

  for (auto& p : out.points) {
    out.violations += static_cast<int>(p.violations.size());
    out.errors += static_cast<int>(p.errors.size());
  }
  for (auto& f : out.families) out.errors += f.error.empty() ? 0 : 1;
  for (auto& c : out.checks) out.violations += c.passed ? 0 : 1;
  out.exit_code = out.violations ? kExitViolation : (out.errors ? kExitUsage : kExitOk);
  return out;
}

inline void write_run(const RunOutcome& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& cfg = r.config;
  auto entry = catalog_lookup(cfg.subordinator, cfg.sub_params);

  std::ostringstream rep;
  rep << "sublab run report\n";
  rep << "config: " << cfg.path << "\n";
  rep << "seed: " << cfg.seed << "\n";
  rep << "scenario: " << detail::describe_scenario(cfg) << "\n";
  rep << "subordinator: " << entry.describe() << "\n";
  rep << "tasks:";
  for (auto t : cfg.tasks) rep << " " << to_string(t);
  rep << "\n\n";

  std::ostringstream cls_csv, green_csv, wave_csv;
  cls_csv << "n,coupling,lambda,lambda_mu,gamma_mu,verdict,kernel_dim\n";
  green_csv << "n,coupling,lambda,entry,G,method\n";
  wave_csv << "n,coupling,lambda,entry,verdict,sup,rate,range_seminorm,range_norm,energy_residual_max\n";
  int idx = 0;
  for (const auto& p : r.points) {
    rep << "point n=" << p.n << " coupling=" << fmt(p.value) << " lambda=" << fmt(p.lambda) << " nodes=" << p.nodes
        << "\n";
    if (p.cls) {
      rep << "  classify: " << to_string(p.cls->verdict) << " lambda_mu=" << fmt(p.cls->lambda_mu)
          << " gamma_mu=" << fmt(p.cls->gamma_mu) << "\n";
      for (auto& [k, v] : p.cls->evidence) rep << "    " << k << " = " << v << "\n";
      auto kd = p.cls->evidence.find("kernel_dim");
      cls_csv << p.n << "," << fmt(p.value) << "," << fmt(p.lambda) << "," << fmt(p.cls->lambda_mu) << ","
              << fmt(p.cls->gamma_mu) << "," << to_string(p.cls->verdict) << ","
              << (kd == p.cls->evidence.end() ? "" : kd->second) << "\n";
    }
    if (!p.green_method.empty()) {
      rep << "  green: " << p.entry << " G=" << fmt(p.green) << " (" << p.green_method << ")\n";
      green_csv << p.n << "," << fmt(p.value) << "," << fmt(p.lambda) << "," << p.entry << "," << fmt(p.green) << ","
                << p.green_method << "\n";
    }
    if (!p.wave_note.empty()) {
      rep << "  wave: " << p.wave_note;
      if (p.wave)
        rep << " sup=" << fmt(p.wave->sup) << " rate=" << fmt(p.wave->rate) << " range_seminorm=" << fmt(p.seminorm)
            << " energy_residual_max=" << fmt(p.energy_max);
      rep << "\n";
      wave_csv << p.n << "," << fmt(p.value) << "," << fmt(p.lambda) << "," << p.entry << ","
               << (p.wave ? (p.wave->bounded ? "bounded" : "growing") : "refused") << ","
               << (p.wave ? fmt(p.wave->sup) : "") << "," << (p.wave ? fmt(p.wave->rate) : "") << ","
               << fmt(p.seminorm) << "," << fmt(p.range_norm) << "," << fmt(p.energy_max) << "\n";
    }
    for (auto& v : p.violations) rep << "  VIOLATION: " << v << "\n";
    for (auto& e : p.errors) rep << "  ERROR: " << e << "\n";
    if (!p.trace_csv.empty()) detail::write_file(dir / ("wave_trace_" + std::to_string(idx) + ".csv"), p.trace_csv);
    if (!p.coo.empty()) detail::write_file(dir / ("operator_" + std::to_string(idx) + ".coo"), p.coo);
    ++idx;
  }

  std::ostringstream fam_csv;
  fam_csv << "coupling,entry,verdict,conclusive,slope,last_increment,greens\n";
  for (const auto& f : r.families) {
    rep << "\nfamily coupling=" << fmt(f.value) << " entry=" << f.entry << "\n";
    if (!f.cls) {
      rep << "  ERROR: " << f.error << "\n";
      continue;
    }
    rep << "  verdict: " << to_string(f.cls->verdict) << (f.cls->conclusive ? "" : " (inconclusive)") << "\n";
    for (auto& [k, v] : f.cls->evidence) rep << "    " << k << " = " << v << "\n";
    std::ostringstream gs;
    for (std::size_t i = 0; i < f.cls->greens.size(); ++i) gs << (i ? " " : "") << fmt(f.cls->greens[i]);
    fam_csv << fmt(f.value) << "," << f.entry << "," << to_string(f.cls->verdict) << ","
            << (f.cls->conclusive ? "true" : "false") << "," << fmt(f.cls->slope) << ","
            << fmt(f.cls->last_increment) << "," << gs.str() << "\n";
  }

  std::ostringstream chk_csv;
  chk_csv << "check,passed,worst,threshold\n";
  if (!r.checks.empty()) rep << "\ninvariant battery (seed " << cfg.seed << ")\n";
  for (const auto& c : r.checks) {
    rep << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << fmt(c.worst)
        << " threshold=" << fmt(c.threshold) << (c.detail.empty() ? "" : " " + c.detail) << "\n";
    chk_csv << c.name << "," << (c.passed ? "true" : "false") << "," << fmt(c.worst) << "," << fmt(c.threshold)
            << "\n";
  }
  rep << "\nstatus: "
      << (r.exit_code == kExitOk ? "ok"
                                 : r.violations ? std::to_string(r.violations) + " invariant violation(s)"
                                                : std::to_string(r.errors) + " error(s)")
      << "\n";

  detail::write_file(dir / "report.txt", rep.str());
  if (cfg.has(Task::classify) || cfg.has(Task::check)) detail::write_file(dir / "classify.csv", cls_csv.str());
  if (cfg.has(Task::green)) detail::write_file(dir / "green.csv", green_csv.str());
  if (!r.families.empty()) detail::write_file(dir / "family.csv", fam_csv.str());
  if (cfg.has(Task::wave)) detail::write_file(dir / "wave.csv", wave_csv.str());
  if (!r.checks.empty()) detail::write_file(dir / "checks.csv", chk_csv.str());

  nlohmann::json j;
  j["config"] = cfg.path;
  j["seed"] = cfg.seed;
  j["scenario"] = detail::describe_scenario(cfg);
  j["subordinator"] = entry.name;
  j["exit_code"] = r.exit_code;
  j["violations"] = r.violations;
  j["errors"] = r.errors;
  j["points"] = nlohmann::json::array();
  for (auto& p : r.points) j["points"].push_back(detail::point_json(p));
  j["families"] = nlohmann::json::array();
  for (auto& f : r.families) {
    nlohmann::json fj;
    fj["coupling"] = detail::jnum(f.value);
    fj["entry"] = f.entry;
    if (f.cls) {
      fj["verdict"] = to_string(f.cls->verdict);
      fj["conclusive"] = f.cls->conclusive;
      fj["slope"] = detail::jnum(f.cls->slope);
      fj["last_increment"] = detail::jnum(f.cls->last_increment);
      fj["greens"] = nlohmann::json::array();
      for (double g : f.cls->greens) fj["greens"].push_back(detail::jnum(g));
    } else {
      fj["error"] = f.error;
    }
    j["families"].push_back(fj);
  }
  j["checks"] = nlohmann::json::array();
  for (auto& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"worst", detail::jnum(c.worst)}});
  detail::write_file(dir / "summary.json", j.dump(2) + "\n");
}

enum class SweepAxis { lambda, size, beta };

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "lambda") return SweepAxis::lambda;
  if (s == "size") return SweepAxis::size;
  if (s == "beta") return SweepAxis::beta;
  throw ConfigError("unknown sweep axis '" + s + "' (expected lambda, size or beta)");
}

struct SweepOutcome {
  std::string axis;
  std::vector<PointResult> points;
  std::string csv;
  int errors = 0;
  int exit_code = kExitOk;
};

inline SweepOutcome execute_sweep(const RunConfig& cfg, SweepAxis axis) {
  SweepOutcome out;
  ScenarioModel model(cfg);
  auto entry = catalog_lookup(cfg.subordinator, cfg.sub_params);
  std::vector<PointRequest> reqs;
  auto base_req = [&](int n, double v) {
    PointRequest q;
    q.n = n;
    q.value = v;
    q.entry = entry;
    q.green = true;
    q.wave = true;
    return q;
  };
  if (axis == SweepAxis::lambda) {
    out.axis = "coupling";
    if (cfg.sweep_lambda.empty()) throw ConfigError(cfg.path + ": [sweep] lambda is required for this axis");
    for (int n : cfg.sizes)
      for (double v : cfg.sweep_lambda) reqs.push_back(base_req(n, v));
  } else if (axis == SweepAxis::size) {
    out.axis = "n";
    const auto& sizes = cfg.sweep_sizes.empty() ? cfg.sizes : cfg.sweep_sizes;
    for (double v : cfg.couplings)
      for (int n : sizes) reqs.push_back(base_req(n, v));
  } else {
    out.axis = "beta";
    if (cfg.sweep_beta.empty()) throw ConfigError(cfg.path + ": [sweep] beta is required for this axis");
    for (int n : cfg.sizes)
      for (double v : cfg.couplings)
        for (double b : cfg.sweep_beta) {
          auto q = base_req(n, v);
          q.entry = catalog_lookup("stable", {{"beta", b}});
          q.beta = b;
          reqs.push_back(q);
        }
  }
  out.points.resize(reqs.size());
  parallel_for(static_cast<int>(reqs.size()), cfg.workers,
               [&](int i) { out.points[i] = evaluate_point(model, cfg, reqs[i]); });
  std::ostringstream csv;
  if (axis == SweepAxis::size)
    csv << "n,lambda,lambda_mu,verdict,G,wave_sup,energy_residual_max\n";
  else
    csv << out.axis << ",n,lambda,lambda_mu,verdict,G,wave_sup,energy_residual_max\n";
  for (const auto& p : out.points) {
    if (axis == SweepAxis::lambda) csv << fmt(p.value) << ",";
    if (axis == SweepAxis::beta) csv << fmt(p.beta) << ",";
    csv << p.n << "," << fmt(p.lambda) << "," << (p.cls ? fmt(p.cls->lambda_mu) : "") << ","
        << (p.cls ? to_string(p.cls->verdict) : "error") << "," << fmt(p.green) << ","
        << (p.wave ? fmt(p.wave->sup) : "") << "," << fmt(p.energy_max) << "\n";
    out.errors += static_cast<int>(p.errors.size());
  }
  out.csv = csv.str();
  out.exit_code = out.errors ? kExitUsage : kExitOk;
  return out;
}

}  // namespace sublab
