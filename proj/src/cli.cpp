#include "exlift/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "exlift/detectors.hpp"
#include "exlift/exchange.hpp"
#include "exlift/ground.hpp"
#include "exlift/inference.hpp"
#include "exlift/log_space.hpp"
#include "exlift/oracle.hpp"
#include "exlift/parser.hpp"
#include "json.hpp"

namespace exlift {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Failure : std::runtime_error {
  Failure(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

std::string format_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kExitParse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MLNModel load_model(const RunConfig& config) {
  if (config.model_path.empty()) throw Failure(kExitFailure, "--model is required");
  try {
    return parse_model(read_file(config.model_path));
  } catch (const ParseError& e) {
    throw Failure(kExitParse, config.model_path + ":" + std::to_string(e.line()) + ":" +
                                  std::to_string(e.column()) + ": " + e.what());
  }
}

struct Inputs {
  Evidence evidence;
  Evidence query;
};

Inputs load_inputs(const RunConfig& config, const AtomTable& atoms) {
  Inputs in;
  try {
    if (!config.evidence_path.empty()) in.evidence = parse_evidence(read_file(config.evidence_path), atoms);
  } catch (const ParseError& e) {
    throw Failure(kExitParse, config.evidence_path + ":" + std::to_string(e.line()) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw Failure(kExitParse, config.evidence_path + ": " + e.what());
  }
  try {
    if (!config.query.empty()) in.query = parse_query(config.query, atoms);
  } catch (const std::exception& e) {
    throw Failure(kExitParse, std::string("query: ") + e.what());
  }
  return in;
}

void check_config(const RunConfig& config) {
  if (config.mode != "marginal" && config.mode != "mpe") throw Failure(kExitFailure, "unknown mode " + config.mode);
  if (config.engine != "auto" && config.engine != "lifted" && config.engine != "oracle")
    throw Failure(kExitFailure, "unknown engine " + config.engine);
  if (config.format != "json" && config.format != "text")
    throw Failure(kExitFailure, "unknown format " + config.format);
}

EngineOptions engine_options(const RunConfig& config) {
  EngineOptions o;
  o.jobs = config.jobs;
  o.memoize = config.memoize;
  o.k_bound = config.k_bound;
  o.count_hook = config.count_hook;
  return o;
}

OracleOptions oracle_options(const RunConfig& config) { return {config.oracle_cap, config.jobs}; }

std::vector<std::size_t> off_diagonal_constants(const AtomTable& atoms, const Evidence& e) {
  std::vector<std::size_t> out;
  for (auto [a, v] : e) {
    (void)v;
    GroundAtom g = atoms.atom(a);
    if (g.args.size() == 2 && g.args[0] != g.args[1]) out.insert(out.end(), g.args.begin(), g.args.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Why the lifted engine cannot answer, or nullopt if it can.
std::optional<std::string> lifted_obstacle(const FragmentClass& cls, const AtomTable& atoms, const Evidence& joint,
                                           bool mpe, std::size_t k_bound) {
  if (cls.kind == FragmentKind::Unsupported) return "model is outside the lifted fragments: " + cls.reason;
  if (cls.kind == FragmentKind::Monadic) return std::nullopt;
  const auto k = off_diagonal_constants(atoms, joint);
  if (mpe && !k.empty()) return std::string("MPE evidence on off-diagonal binary atoms");
  if (k.size() > k_bound)
    return "binary atoms touch " + std::to_string(k.size()) + " constants; the bound is " + std::to_string(k_bound);
  return std::nullopt;
}

// Ground model and Y/Z structure, built on demand.
struct Grounded {
  explicit Grounded(const MLNModel& model) : model(model) {}
  const GroundModel& ground() {
    if (!g) g.emplace(model);
    return *g;
  }
  const ConditionalStructure& structure() {
    if (!s) s = two_var_structure(ground());
    return *s;
  }
  const MLNModel& model;
  std::optional<GroundModel> g;
  std::optional<ConditionalStructure> s;
};

OrbitSums lifted_masses(const FragmentClass& cls, Grounded& grounded, std::span<const Evidence> sets,
                        const EngineOptions& options) {
  if (cls.kind == FragmentKind::Monadic) return monadic_log_masses(grounded.model, sets, options);
  return conditional_log_masses(grounded.ground(), grounded.structure(), sets, options);
}

std::vector<AtomId> y_atoms(const ConditionalStructure& s) {
  std::vector<AtomId> out;
  for (const auto& block : s.y_decomp.blocks()) out.insert(out.end(), block.begin(), block.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string evidence_string(const AtomTable& atoms, const Evidence& e) {
  std::string out;
  for (auto [a, v] : e) {
    if (!out.empty()) out += ",";
    out += atoms.name(a) + "=" + (v ? "1" : "0");
  }
  return out;
}

// Report fields rendered as JSON or as "key: value" lines.
std::string render(const Json& fields, const std::string& format) {
  if (format == "json") return fields.dump(2) + "\n";
  std::string out;
  for (const auto& [key, value] : fields.items()) {
    out += key + ": ";
    if (value.is_number_float())
      out += format_double(value.get<double>());
    else if (value.is_string())
      out += value.get<std::string>();
    else if (value.is_object()) {
      std::string line;
      for (const auto& [atom, bit] : value.items()) line += (line.empty() ? "" : ",") + atom + "=" + bit.dump();
      out += line;
    } else
      out += value.dump();
    out += "\n";
  }
  return out;
}

template <class Fn>
CommandOutput guarded(Fn&& fn) {
  CommandOutput out;
  try {
    out = fn();
  } catch (const Failure& f) {
    out.exit_code = f.code;
    out.err = std::string("error: ") + f.what() + "\n";
  } catch (const OracleCapError& e) {
    out.exit_code = kExitUnsupported;
    out.err = std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    out.exit_code = kExitFailure;
    out.err = std::string("error: ") + e.what() + "\n";
  }
  return out;
}

double relative_error(double value, double reference) {
  const double diff = std::fabs(value - reference);
  return reference == 0.0 ? diff : diff / std::fabs(reference);
}

}  // namespace

CommandOutput cmd_infer(const RunConfig& config) {
  return guarded([&] {
    const auto start = Clock::now();
    check_config(config);
    const MLNModel model = load_model(config);
    const AtomTable atoms(model.predicates, model.constants);
    const Inputs in = load_inputs(config, atoms);
    const FragmentClass cls = classify(model);
    const bool mpe = config.mode == "mpe";
    const std::optional<Evidence> joint = merge(in.evidence, in.query);
    if (mpe && !joint) throw Failure(kExitInfeasible, "query contradicts the evidence");

    const auto obstacle =
        lifted_obstacle(cls, atoms, joint ? *joint : in.evidence, mpe, config.k_bound);
    const bool oracle_fits = atoms.size() <= config.oracle_cap;
    bool lifted = false;
    if (config.engine == "lifted") {
      if (obstacle) throw Failure(kExitUnsupported, "lifted engine does not apply: " + *obstacle);
      lifted = true;
    } else if (config.engine == "oracle") {
      if (!oracle_fits) throw OracleCapError(atoms.size(), config.oracle_cap);
    } else {
      lifted = !obstacle;
      if (!lifted && !oracle_fits)
        throw Failure(kExitUnsupported, *obstacle + "; the oracle would enumerate " + std::to_string(atoms.size()) +
                                            " atoms, over the cap of " + std::to_string(config.oracle_cap));
    }

    Grounded grounded(model);
    const EngineOptions options = engine_options(config);
    Json fields;
    fields["mode"] = config.mode;
    fields["engine"] = lifted ? "lifted" : "oracle";
    fields["fragment"] = to_string(cls.kind);
    double log_partition = 0.0;
    std::uint64_t visited = 0;

    if (!mpe) {
      std::vector<Evidence> sets;
      if (joint) sets.push_back(*joint);
      sets.push_back(in.evidence);
      double mass_joint = kNegInf, mass_e, log_z;
      if (lifted) {
        sets.push_back(Evidence{});
        OrbitSums sums = lifted_masses(cls, grounded, sets, options);
        visited = sums.diagnostics.statistics_visited;
        log_z = sums.log_mass.back();
        mass_e = sums.log_mass[sums.log_mass.size() - 2];
        if (joint) mass_joint = sums.log_mass[0];
      } else {
        auto masses = brute_log_masses(grounded.ground(), sets, oracle_options(config));
        log_z = masses.back();
        mass_e = masses[masses.size() - 2];
        if (joint) mass_joint = masses[0];
      }
      if (mass_e == kNegInf) throw Failure(kExitInfeasible, "evidence has probability zero");
      fields["probability"] = mass_joint == kNegInf ? 0.0 : std::exp(mass_joint - mass_e);
      log_partition = log_z;
    } else {
      const Evidence& e = *joint;
      Evidence assignment;
      double log_weight = 0.0;
      std::string scope = cls.kind == FragmentKind::TwoVariable ? "Y" : "all";
      if (lifted) {
        QueryResult r;
        try {
          r = cls.kind == FragmentKind::Monadic
                  ? monadic_mpe(model, e, options)
                  : conditional_mpe(grounded.ground(), grounded.structure(), e, options);
        } catch (const std::domain_error& err) {
          throw Failure(kExitInfeasible, err.what());
        }
        assignment = r.assignment;
        log_weight = r.log_weight;
        visited = r.diagnostics.statistics_visited;
        const Evidence empty[] = {Evidence{}};
        log_partition = lifted_masses(cls, grounded, empty, options).log_mass[0];
      } else {
        OracleResult r;
        if (cls.kind == FragmentKind::TwoVariable) {
          const auto y = y_atoms(grounded.structure());
          r = brute_marginal_mpe(grounded.ground(), y, e, oracle_options(config));
          if (r.feasible)
            for (auto a : y) assignment.assign(a, r.world[a]);
        } else {
          r = brute_mpe(grounded.ground(), e, oracle_options(config));
          if (r.feasible)
            for (AtomId a = 0; a < atoms.size(); ++a) assignment.assign(a, r.world[a]);
        }
        if (!r.feasible) throw Failure(kExitInfeasible, "no world is compatible with the evidence");
        log_weight = r.log_weight;
        log_partition = r.log_partition;
      }
      Json values = Json::object();
      for (auto [a, v] : assignment) values[atoms.name(a)] = v ? 1 : 0;
      fields["mpe_assignment"] = values;
      fields["mpe_scope"] = scope;
      fields["log_weight"] = log_weight;
    }
    fields["log_partition"] = log_partition;
    fields["statistics_visited"] = visited;
    fields["elapsed_ms"] = ms_since(start);
    return CommandOutput{kExitOk, render(fields, config.format), {}};
  });
}

CommandOutput cmd_validate(const RunConfig& config) {
  return guarded([&] {
    check_config(config);
    const MLNModel model = load_model(config);
    const FragmentClass cls = classify(model);
    if (cls.kind == FragmentKind::Unsupported)
      throw Failure(kExitUnsupported, "validate needs a lifted fragment: " + cls.reason);
    const AtomTable atoms(model.predicates, model.constants);
    if (atoms.size() > config.oracle_cap) throw OracleCapError(atoms.size(), config.oracle_cap);

    Grounded grounded(model);
    const GroundModel& g = grounded.ground();
    const bool two_var = cls.kind == FragmentKind::TwoVariable;
    std::vector<AtomId> pool, off;
    if (two_var) {
      pool = y_atoms(grounded.structure());
      for (const auto& p : grounded.structure().pairs) off.insert(off.end(), p.atoms.begin(), p.atoms.end());
      std::sort(off.begin(), off.end());
    } else {
      for (AtomId a = 0; a < atoms.size(); ++a) pool.push_back(a);
    }

    EngineOptions options = engine_options(config);
    const OracleOptions oracle = oracle_options(config);
    std::mt19937_64 rng(config.seed);
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };
    auto pick = [&](const std::vector<AtomId>& from) {
      return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
    };

    double max_marginal = 0.0, max_mpe = 0.0;
    std::size_t marginal_checks = 0, mpe_checks = 0, failures = 0;
    std::string worst;
    for (std::size_t i = 0; i < config.queries; ++i) {
      Evidence e;
      for (auto a : pool)
        if (coin(0.3)) e.assign(a, coin(0.5));
      if (!off.empty() && coin(0.25)) e.assign(pick(off), coin(0.5));
      std::vector<AtomId> open;
      for (auto a : pool)
        if (!e.contains(a)) open.push_back(a);
      AtomId target;
      if (!off.empty() && off_diagonal_constants(atoms, e).empty() && coin(0.25))
        target = pick(off);
      else if (!open.empty())
        target = pick(open);
      else
        continue;
      Evidence joint = e;
      joint.assign(target, coin(0.5));

      const Evidence sets[] = {joint, e, Evidence{}};
      OrbitSums sums = lifted_masses(cls, grounded, sets, options);
      const double lifted_p = std::exp(sums.log_mass[0] - sums.log_mass[1]);
      auto masses = brute_log_masses(g, std::span<const Evidence>(sets, 2), oracle);
      const double oracle_p = std::exp(masses[0] - masses[1]);
      const double err = relative_error(lifted_p, oracle_p);
      ++marginal_checks;
      if (!(err <= 1e-10)) ++failures;
      if (!(err <= max_marginal)) {
        max_marginal = err;
        worst = evidence_string(atoms, joint);
      }

      if (off_diagonal_constants(atoms, e).empty()) {
        double lifted_w, oracle_w;
        if (two_var) {
          lifted_w = conditional_mpe(g, grounded.structure(), e, options).log_weight;
          oracle_w = brute_marginal_mpe(g, pool, e, oracle).log_weight;
        } else {
          lifted_w = monadic_mpe(model, e, options).log_weight;
          oracle_w = brute_mpe(g, e, oracle).log_weight;
        }
        const double d = std::fabs(lifted_w - oracle_w);
        ++mpe_checks;
        if (!(d <= 1e-10)) ++failures;
        if (!(d <= max_mpe)) max_mpe = d;
      }
    }

    Json fields;
    fields["fragment"] = to_string(cls.kind);
    fields["atoms"] = atoms.size();
    fields["seed"] = config.seed;
    fields["marginal_checks"] = marginal_checks;
    fields["mpe_checks"] = mpe_checks;
    fields["max_marginal_error"] = format_double(max_marginal, "%.3e");
    fields["max_mpe_error"] = format_double(max_mpe, "%.3e");
    fields["worst_marginal_query"] = worst;
    fields["discrepancies"] = failures;
    fields["result"] = failures == 0 ? "PASS" : "FAIL";
    return CommandOutput{failures == 0 ? kExitOk : kExitFailure, render(fields, config.format), {}};
  });
}

CommandOutput cmd_bench(const RunConfig& config) {
  return guarded([&] {
    const MLNModel base = load_model(config);
    const FragmentClass cls = classify(base);
    if (cls.kind == FragmentKind::Unsupported)
      throw Failure(kExitUnsupported, "bench needs a lifted fragment: " + cls.reason);
    if (config.domain_sizes.empty()) throw Failure(kExitFailure, "bench needs at least one domain size");

    const EngineOptions options = engine_options(config);
    std::string out = "k,statistics,elapsed_ms,engine,oracle\n";
    for (auto k : config.domain_sizes) {
      const MLNModel model = with_domain_size(base, k);
      const auto start = Clock::now();
      Grounded grounded(model);
      const Evidence empty[] = {Evidence{}};
      OrbitSums sums = lifted_masses(cls, grounded, empty, options);
      const double elapsed = ms_since(start);

      const AtomTable atoms(model.predicates, model.constants);
      std::string oracle = "infeasible";
      if (atoms.size() <= config.oracle_cap) {
        const auto t0 = Clock::now();
        brute_log_masses(grounded.ground(), {}, oracle_options(config));
        oracle = format_double(ms_since(t0), "%.3f");
      }
      out += std::to_string(k) + "," + std::to_string(sums.diagnostics.statistics_visited) + "," +
             format_double(elapsed, "%.3f") + ",lifted," + oracle + "\n";
    }
    return CommandOutput{kExitOk, out, {}};
  });
}

CommandOutput cmd_describe(const RunConfig& config) {
  return guarded([&] {
    const MLNModel model = load_model(config);
    const FragmentClass cls = classify(model);
    const std::size_t k = model.domain_size();
    auto space = [&](std::size_t width) {
      const std::size_t m = std::size_t{1} << width;
      return "|T| = C(" + std::to_string(k + m - 1) + "," + std::to_string(m - 1) +
             ") = " + statistic_count(static_cast<std::uint32_t>(k), width).get_str();
    };
    std::string out;
    switch (cls.kind) {
      case FragmentKind::Monadic: {
        const std::size_t w = model.predicates.size();
        out = "Monadic, width " + std::to_string(w) + ", " + std::to_string(k) + " blocks, " + space(w) + "\n";
        break;
      }
      case FragmentKind::TwoVariable: {
        std::size_t unary = 0, binary = 0;
        for (const auto& p : model.predicates) (p.arity == 2 ? binary : unary) += 1;
        const std::size_t y = unary + binary;
        const std::size_t pairs = k * (k - (k > 0 ? 1 : 0)) / 2;
        out = "TwoVariable, Y width " + std::to_string(y) + ", " + std::to_string(pairs) + " pairs\n";
        out += "Y: " + std::to_string(k) + " blocks of width " + std::to_string(y) + ", " + space(y) + "\n";
        out += "Z: " + std::to_string(pairs) + " pairs of " + std::to_string(2 * binary) + " atoms\n";
        break;
      }
      case FragmentKind::Unsupported:
        out = "Unsupported (oracle only)\nreason: " + cls.reason + "\n";
        break;
    }
    return CommandOutput{kExitOk, out, {}};
  });
}

}  // namespace exlift
