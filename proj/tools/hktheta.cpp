// Command-line front end: Hilbert-Kunz values, phi samples, theta series,
// Hadamard products, identity suites, and the constant checks, with optional
// persistent caching of colength results.
//
// Exit codes: 0 success, 1 identity-check failure, 2 usage/parse error,
// 3 resource guard.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hk2/constants.hpp"
#include "hk2/error.hpp"
#include "hk2/hilbert_kunz.hpp"
#include "hk2/theta.hpp"

using nlohmann::json;

namespace {

constexpr std::uint64_t kHardSizeCeiling = std::uint64_t{1} << 26;
constexpr const char* kCacheFileName = "hk_records.csv";

struct RunConfig {
  std::string cache_dir;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t size_limit = hk2::kDefaultSizeLimit;
  std::string format = "text";

  std::filesystem::path cache_file() const {
    return std::filesystem::path(cache_dir) / kCacheFileName;
  }
};

std::vector<std::string> split_vars(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= csv.size(); ++i) {
    if (i == csv.size() || csv[i] == ',') {
      if (i > start) out.push_back(csv.substr(start, i - start));
      start = i + 1;
    }
  }
  if (out.empty()) throw hk2::parse_error("empty variable list");
  return out;
}

// Cache lifetime around a computation: load before, save after.
class CacheSession {
 public:
  explicit CacheSession(const RunConfig& cfg) : cfg_(cfg) {
    if (!cfg_.cache_dir.empty()) {
      cache_.load_file(cfg_.cache_file());
      for (const auto& w : cache_.load_warnings()) std::cerr << "cache: " << w << "\n";
      active_ = true;
    }
  }

  hk2::HKOptions options() {
    return {cfg_.size_limit, cfg_.threads, active_ ? &cache_ : nullptr};
  }

  void finish() {
    if (active_) cache_.save_file(cfg_.cache_file());
  }

  hk2::HKCache& cache() { return cache_; }

 private:
  const RunConfig& cfg_;
  hk2::HKCache cache_;
  bool active_ = false;
};

json enclosure_json(const hk2::RationalEnclosure& e) {
  return json{{"value", hk2::rat_string(e.value)},
              {"error", hk2::rat_string(e.error_bound)},
              {"decimal", hk2::decimal_string(e.value, 20)}};
}

json series_json(const hk2::ThetaSeries& t) {
  json coeffs = json::array();
  for (const auto& a : t.coeffs) coeffs.push_back(a.get_str());
  return json{{"coeffs", coeffs},
              {"source", hk2::theta_source_name(t.source)},
              {"r", t.r},
              {"N", t.order()}};
}

void print_series(const hk2::ThetaSeries& t, const std::optional<hk2::Rat>& eval_at,
                  const RunConfig& cfg) {
  std::optional<hk2::RationalEnclosure> enc;
  if (eval_at) enc = hk2::evaluate(t, *eval_at);
  if (cfg.format == "json") {
    json out = series_json(t);
    if (enc) {
      json e = enclosure_json(*enc);
      e["point"] = hk2::rat_string(*eval_at);
      out["eval"] = e;
    }
    std::cout << out.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    for (std::size_t n = 0; n < t.coeffs.size(); ++n)
      std::cout << n << "," << t.coeffs[n].get_str() << "\n";
    if (enc)
      std::cout << "eval," << hk2::rat_string(*eval_at) << "," << hk2::rat_string(enc->value)
                << "," << hk2::rat_string(enc->error_bound) << "\n";
  } else {
    std::cout << "source: " << hk2::theta_source_name(t.source) << "  r=" << t.r
              << "  order=" << t.order() << "\n";
    std::cout << "coeffs:";
    for (const auto& a : t.coeffs) std::cout << ' ' << a.get_str();
    std::cout << "\n";
    if (enc)
      std::cout << "value at " << hk2::rat_string(*eval_at) << ": " << hk2::rat_string(enc->value)
                << " +/- " << hk2::rat_string(enc->error_bound) << "  ("
                << hk2::decimal_string(enc->value, 20) << ")\n";
  }
}

int print_verify(const hk2::VerifyReport& rep, const RunConfig& cfg) {
  if (cfg.format == "json") {
    json checks = json::array();
    for (const auto& c : rep.checks)
      checks.push_back(json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    std::cout << json{{"suite", rep.suite}, {"ok", rep.ok()}, {"checks", checks}}.dump(2) << "\n";
  } else {
    for (const auto& c : rep.checks)
      std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "  [" << c.detail << "]\n";
    std::cout << (rep.ok() ? "suite passed: " : "suite FAILED: ") << rep.suite << "\n";
  }
  return rep.ok() ? 0 : 1;
}

hk2::ThetaSeries build_factor(const std::string& desc, std::size_t N, CacheSession& session) {
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon == std::string::npos ? desc.size() : colon);
  const std::string rest = colon == std::string::npos ? "" : desc.substr(colon + 1);
  if (kind == "monomial") {
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
      throw hk2::parse_error("factor 'monomial' needs an exponent, e.g. monomial:3");
    return hk2::theta_monomial(std::stoull(rest), N);
  }
  if (kind == "nodal") return hk2::theta_nodal_conjectural(N);
  if (kind == "selector") {
    if (rest == "even") return hk2::selector_even_powers(N);
    if (rest == "odd") return hk2::selector_odd_powers(N);
    throw hk2::parse_error("selector must be 'even' or 'odd'");
  }
  if (kind == "poly") {
    const auto at = rest.find('@');
    if (at == std::string::npos)
      throw hk2::parse_error("factor 'poly' is poly:<text>@<comma-separated vars>");
    return hk2::theta_empirical(hk2::parse_poly(rest.substr(0, at), split_vars(rest.substr(at + 1))),
                                N, session.options());
  }
  throw hk2::parse_error("unknown factor kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact theta-series calculus for characteristic-2 Hilbert-Kunz multiplicities"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--cache-dir", cfg.cache_dir, "Directory for persisted colength records")
      ->envname("HKTHETA_CACHE_DIR");
  app.add_option("--threads", cfg.threads, "Worker threads for independent colength jobs")
      ->envname("HKTHETA_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--size-limit", cfg.size_limit, "Maximum admissible q^r")
      ->check(CLI::Range(std::uint64_t{1}, kHardSizeCeiling));
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  // hk ------------------------------------------------------------------
  auto* hk_cmd = app.add_subcommand("hk", "e_n(f^i) for a polynomial f");
  std::string hk_poly, hk_vars;
  std::uint64_t hk_i = 1;
  unsigned hk_n = 0;
  hk_cmd->add_option("--poly", hk_poly, "Polynomial text")->required();
  hk_cmd->add_option("--vars", hk_vars, "Comma-separated variables")->required();
  hk_cmd->add_option("--i", hk_i, "Power of f");
  hk_cmd->add_option("--n", hk_n, "Level (q = 2^n)")->required();

  // phi -----------------------------------------------------------------
  auto* phi_cmd = app.add_subcommand("phi", "phi_f sampled at level n");
  std::string phi_poly, phi_vars;
  unsigned phi_n = 0;
  phi_cmd->add_option("--poly", phi_poly, "Polynomial text")->required();
  phi_cmd->add_option("--vars", phi_vars, "Comma-separated variables")->required();
  phi_cmd->add_option("--n", phi_n, "Level (q = 2^n)")->required();

  // theta ---------------------------------------------------------------
  auto* theta_cmd = app.add_subcommand("theta", "Build a theta series");
  std::string th_poly, th_vars, th_selector, th_eval;
  std::uint64_t th_monomial = 0;
  bool th_nodal = false;
  int th_order = -1;
  std::size_t th_square = 0;
  theta_cmd->add_option("--poly", th_poly, "Empirical series of this polynomial");
  theta_cmd->add_option("--vars", th_vars, "Variables for --poly");
  theta_cmd->add_option("--monomial", th_monomial, "Closed form for x^k");
  theta_cmd->add_flag("--nodal", th_nodal, "Conjectural nodal-cubic series");
  theta_cmd->add_option("--selector", th_selector, "Parity selector: even or odd")
      ->check(CLI::IsMember({"even", "odd"}));
  theta_cmd->add_option("--N", th_order, "Truncation order");
  theta_cmd->add_flag_function(
      "--square", [&th_square](std::int64_t count) { th_square = static_cast<std::size_t>(count); },
      "Apply the g -> g^2 rule (repeatable)");
  theta_cmd->add_option("--eval", th_eval, "Evaluate at this rational point, e.g. 1/16");

  // hadamard --------------------------------------------------------------
  auto* had_cmd = app.add_subcommand("hadamard", "Coefficientwise product of theta series");
  std::vector<std::string> had_factors;
  std::size_t had_order = 12;
  std::string had_eval;
  had_cmd->add_option("--factor", had_factors,
                      "monomial:K | nodal | selector:even|odd | poly:<text>@<vars> (repeatable)")
      ->required();
  had_cmd->add_option("--N", had_order, "Truncation order for every factor");
  had_cmd->add_option("--eval", had_eval, "Evaluate at this rational point");

  // verify ----------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Run an exact identity suite");
  std::string verify_suite;
  int verify_order = -1;
  verify_cmd->add_option("--suite", verify_suite, "lemma19 | thm16 | thm18 | cor14")
      ->required()
      ->check(CLI::IsMember({"lemma19", "thm16", "thm18", "cor14"}));
  verify_cmd->add_option("--N", verify_order, "Order / level budget");

  // constant ----------------------------------------------------------------
  auto* const_cmd = app.add_subcommand("constant", "Central-binomial constant checks");
  std::string const_check = "sum", const_lambda = "1/256";
  unsigned const_digits = 14;
  double const_tol = 1e-10;
  std::size_t const_order = 20;
  const_cmd->add_option("--check", const_check, "sum | euler | thm22")
      ->check(CLI::IsMember({"sum", "euler", "thm22"}));
  const_cmd->add_option("--lambda", const_lambda, "Rational in (0, 1/4)");
  const_cmd->add_option("--digits", const_digits, "Requested enclosure digits");
  const_cmd->add_option("--tol", const_tol, "Quadrature comparison tolerance");
  const_cmd->add_option("--N", const_order, "Identity order for thm22");

  // cache ----------------------------------------------------------------
  auto* cache_cmd = app.add_subcommand("cache", "Inspect the persisted record store");
  std::string cache_action = "stats";
  cache_cmd->add_option("action", cache_action, "stats | check")
      ->check(CLI::IsMember({"stats", "check"}));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*hk_cmd) {
      CacheSession session(cfg);
      const hk2::Poly2 f = hk2::parse_poly(hk_poly, split_vars(hk_vars));
      const std::uint64_t v = hk2::hk_value(f, hk_i, hk_n, session.options());
      session.finish();
      if (cfg.format == "json")
        std::cout << json{{"poly", f.to_string()},
                          {"key", f.cache_key()},
                          {"i", hk_i},
                          {"n", hk_n},
                          {"value", v}}
                         .dump(2)
                  << "\n";
      else if (cfg.format == "csv")
        std::cout << f.cache_key() << "," << hk_i << "," << hk_n << "," << v << "\n";
      else
        std::cout << v << "\n";
      return 0;
    }

    if (*phi_cmd) {
      CacheSession session(cfg);
      const hk2::Poly2 f = hk2::parse_poly(phi_poly, split_vars(phi_vars));
      const hk2::PhiSample phi = hk2::phi_sample(f, phi_n, session.options());
      session.finish();
      if (cfg.format == "json") {
        json values = json::array();
        for (const auto& v : phi.values) values.push_back(hk2::rat_string(v));
        std::cout << json{{"poly", f.to_string()}, {"level", phi.level}, {"values", values}}.dump(2)
                  << "\n";
      } else if (cfg.format == "csv") {
        for (std::size_t i = 0; i < phi.values.size(); ++i)
          std::cout << i << "," << hk2::rat_string(phi.values[i]) << "\n";
      } else {
        for (std::size_t i = 0; i < phi.values.size(); ++i)
          std::cout << (i ? " " : "") << hk2::rat_string(phi.values[i]);
        std::cout << "\n";
      }
      return 0;
    }

    if (*theta_cmd) {
      CacheSession session(cfg);
      const int sources = (!th_poly.empty()) + (th_monomial > 0) + th_nodal + !th_selector.empty();
      if (sources != 1)
        throw hk2::parse_error("choose exactly one of --poly, --monomial, --nodal, --selector");
      hk2::ThetaSeries t;
      if (!th_poly.empty()) {
        if (th_vars.empty()) throw hk2::parse_error("--poly needs --vars");
        const std::size_t N = th_order >= 0 ? static_cast<std::size_t>(th_order) : 4;
        t = hk2::theta_empirical(hk2::parse_poly(th_poly, split_vars(th_vars)), N,
                                 session.options());
      } else {
        const std::size_t N = th_order >= 0 ? static_cast<std::size_t>(th_order) : 12;
        if (th_monomial > 0)
          t = hk2::theta_monomial(th_monomial, N);
        else if (th_nodal)
          t = hk2::theta_nodal_conjectural(N);
        else
          t = th_selector == "even" ? hk2::selector_even_powers(N) : hk2::selector_odd_powers(N);
      }
      for (std::size_t s = 0; s < th_square; ++s) t = hk2::theta_square(t);
      session.finish();
      std::optional<hk2::Rat> at;
      if (!th_eval.empty()) at = hk2::parse_rat(th_eval);
      print_series(t, at, cfg);
      return 0;
    }

    if (*had_cmd) {
      CacheSession session(cfg);
      std::vector<hk2::ThetaSeries> factors;
      factors.reserve(had_factors.size());
      for (const auto& d : had_factors) factors.push_back(build_factor(d, had_order, session));
      const hk2::ThetaSeries t = hk2::hadamard(factors);
      session.finish();
      std::optional<hk2::Rat> at;
      if (!had_eval.empty()) at = hk2::parse_rat(had_eval);
      print_series(t, at, cfg);
      return 0;
    }

    if (*verify_cmd) {
      CacheSession session(cfg);
      hk2::VerifySuite suite = hk2::VerifySuite::lemma19;
      if (verify_suite == "thm16") suite = hk2::VerifySuite::thm16;
      if (verify_suite == "thm18") suite = hk2::VerifySuite::thm18;
      if (verify_suite == "cor14") suite = hk2::VerifySuite::cor14;
      const std::size_t N = verify_order >= 0 ? static_cast<std::size_t>(verify_order)
                                              : hk2::default_verify_order(suite);
      const hk2::VerifyReport rep = hk2::run_verify_suite(suite, N, session.options());
      session.finish();
      return print_verify(rep, cfg);
    }

    if (*const_cmd) {
      const hk2::Rat lambda = hk2::parse_rat(const_lambda);
      if (const_check == "sum") {
        const hk2::RationalEnclosure e = hk2::schneider_sum(lambda, const_digits);
        if (cfg.format == "json") {
          json out = enclosure_json(e);
          out["lambda"] = hk2::rat_string(lambda);
          out["digits"] = const_digits;
          std::cout << out.dump(2) << "\n";
        } else {
          std::cout << "sum A_n^2 lambda^{2n} at lambda=" << hk2::rat_string(lambda) << ": "
                    << hk2::decimal_string(e.value, const_digits + 2) << " +/- "
                    << hk2::rat_string(e.error_bound) << "\n";
        }
        return 0;
      }
      if (const_check == "euler") {
        const hk2::QuadratureReport rep = hk2::euler_integral_check(lambda, const_tol);
        if (cfg.format == "json")
          std::cout << json{{"lambda", hk2::rat_string(rep.lambda)},
                            {"integral_over_pi", rep.integral_over_pi},
                            {"series_value", rep.series_value},
                            {"difference", rep.difference},
                            {"tol", rep.tol},
                            {"refinements", rep.refinements},
                            {"ok", rep.ok}}
                           .dump(2)
                    << "\n";
        else
          std::cout << (rep.ok ? "PASS" : "FAIL") << " euler integral at lambda="
                    << hk2::rat_string(rep.lambda) << ": |quadrature/pi - series| = "
                    << rep.difference << " (tol " << rep.tol << ")\n";
        return rep.ok ? 0 : 1;
      }
      // thm22
      const hk2::DecompositionReport rep = hk2::schneider_decomposition(const_order, const_digits);
      if (cfg.format == "json") {
        json checks = json::array();
        for (const auto& c : rep.identity_checks)
          checks.push_back(json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
        json weights = json::object();
        for (const auto& [label, w] : rep.sum_weights) weights[label] = w.get_str();
        json sums = json::object();
        for (const auto& s : rep.sums) sums[s.label] = enclosure_json(s.enclosure);
        std::cout << json{{"order", rep.order},
                          {"digits", rep.digits},
                          {"identities_ok", rep.identities_ok},
                          {"identity_checks", checks},
                          {"weights", weights},
                          {"constant", rep.constant_term.get_str()},
                          {"sums", sums},
                          {"lhs", enclosure_json(rep.lhs)},
                          {"rhs", enclosure_json(rep.rhs)},
                          {"sides_agree", rep.sides_agree},
                          {"ok", rep.ok()}}
                         .dump(2)
                  << "\n";
      } else {
        for (const auto& c : rep.identity_checks)
          std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "  [" << c.detail << "]\n";
        std::cout << "weights:";
        for (const auto& [label, w] : rep.sum_weights) std::cout << ' ' << label << '=' << w.get_str();
        std::cout << " constant=" << rep.constant_term.get_str() << "\n";
        std::cout << "lhs  = " << hk2::decimal_string(rep.lhs.value, rep.digits) << " +/- "
                  << hk2::rat_string(rep.lhs.error_bound) << "\n";
        std::cout << "rhs  = " << hk2::decimal_string(rep.rhs.value, rep.digits) << " +/- "
                  << hk2::rat_string(rep.rhs.error_bound) << "\n";
        std::cout << (rep.ok() ? "PASS" : "FAIL") << " decomposition agreement\n";
      }
      return rep.ok() ? 0 : 1;
    }

    if (*cache_cmd) {
      if (cfg.cache_dir.empty())
        throw hk2::parse_error("cache inspection needs --cache-dir or HKTHETA_CACHE_DIR");
      hk2::HKCache cache;
      const std::size_t merged = cache.load_file(cfg.cache_file());
      for (const auto& w : cache.load_warnings()) std::cerr << "cache: " << w << "\n";
      const bool clean = cache.load_warnings().empty();
      if (cfg.format == "json")
        std::cout << json{{"file", cfg.cache_file().string()},
                          {"records", merged},
                          {"corrupt_lines", cache.load_warnings().size()},
                          {"clean", clean}}
                         .dump(2)
                  << "\n";
      else
        std::cout << cfg.cache_file().string() << ": " << merged << " records, "
                  << cache.load_warnings().size() << " corrupt lines skipped\n";
      if (cache_action == "check") return clean ? 0 : 1;
      return 0;
    }
  } catch (const hk2::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hk2::size_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hk2::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
