#include "cli.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "simrel/model_io.hpp"
#include "simrel/oracles.hpp"
#include "simrel/probsim.hpp"
#include "simrel/strongsim.hpp"
#include "simrel/weaksim.hpp"

namespace simrel {

namespace {

using nlohmann::json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string relation = "strong";
  std::string engine = "parametric";
  std::vector<std::string> pair;
  bool stats = false;
  bool improved = false;
  bool incomplete = false;
  bool json_output = false;
  bool witness = false;
  std::string dump_dir;
};

void validate(const Model& m, const RunConfig& cfg) {
  bool markov = m.kind == ModelKind::FPS || m.kind == ModelKind::DTMC || m.kind == ModelKind::CTMC;
  if (cfg.relation == "weak" && m.kind != ModelKind::DTMC && m.kind != ModelKind::CTMC)
    throw CliError("weak simulation needs a DTMC or CTMC input");
  if (cfg.relation == "strong-prob" && markov)
    throw CliError("strong probabilistic simulation needs a PA or CPA input");
  if (cfg.incomplete && !cfg.improved)
    throw CliError("--incomplete-iterations requires --improved");
}

Relation compute_relation(const Model& m, const RunConfig& cfg, RunStats& stats) {
  if (cfg.relation == "strong") {
    if (cfg.engine == "oracle") return naive_simrel(m, RelationKind::Strong, &stats.lp);
    if (cfg.engine == "basic") return simrel_basic(m, &stats);
    if (m.kind == ModelKind::PA || m.kind == ModelKind::CPA) return simrel_pa(m, &stats);
    return simrel_fps(m, &stats);
  }
  if (cfg.relation == "strong-prob") {
    if (cfg.engine == "oracle") return naive_simrel(m, RelationKind::StrongProbabilistic, &stats.lp);
    return simrel_prob(m, &stats);
  }
  if (cfg.engine == "oracle") return naive_simrel(m, RelationKind::Weak, &stats.lp);
  WeakOptions opts;
  opts.improved = cfg.engine != "basic" && cfg.improved;
  opts.incomplete_heuristic = opts.improved && cfg.incomplete;
  return simrel_w(m, opts, &stats);
}

json stats_json(const RunStats& s) {
  return json{{"iterations", s.iterations},
              {"pushes", s.flow.pushes},
              {"relabels", s.flow.relabels},
              {"restarts", s.flow.restarts},
              {"fresh_networks", s.flow.fresh_networks},
              {"smf_updates", s.flow.smf_updates},
              {"breakpoint_computations", s.flow.breakpoint_computations},
              {"classify_calls", s.flow.classify_calls},
              {"lp_problems", s.lp.problems},
              {"lp_pivots", s.lp.pivots},
              {"lp_max_constraints", s.lp.max_constraints},
              {"branch_a", s.branch_a},
              {"branch_b", s.branch_b},
              {"branch_c", s.branch_c}};
}

void print_stats_text(std::ostream& out, const RunStats& s) {
  json j = stats_json(s);
  out << "stats:";
  for (auto it = j.begin(); it != j.end(); ++it) out << " " << it.key() << "=" << it.value();
  out << "\n";
}

json model_json(const Model& m) {
  return json{{"kind", kind_name(m.kind)}, {"n", m.n}, {"m", m.transition_count()}};
}

std::string aux_name(StateId s, const Model& m) {
  return s == kAuxVertex ? std::string("bottom") : m.name(s);
}

std::vector<Distribution> markov_rows(const Model& m) {
  if (m.kind == ModelKind::CTMC) {
    std::vector<Distribution> rows(m.n);
    for (StateId s = 0; s < m.n; ++s) rows[s] = induced_distribution(m.rate[s]);
    return rows;
  }
  return m.prob;
}

// Witness extraction for a related pair against the final relation. These
// re-derive certificates with the LP oracles so they can be printed exactly.
json witness_json(const Model& m, StateId a, StateId b, const Relation& rel,
                  const RunConfig& cfg) {
  json w;
  if (cfg.relation == "strong") {
    if (m.kind == ModelKind::PA || m.kind == ModelKind::CPA) {
      w["kind"] = "per-distribution-weight-functions";
      json arcs = json::array();
      for (ActionId act : m.enabled_actions(a)) {
        size_t k1 = m.kind == ModelKind::PA ? m.pa[a].steps.at(act).size() : m.cpa[a].steps.at(act).size();
        for (size_t i = 0; i < k1; ++i) {
          Distribution mu1 = m.kind == ModelKind::PA
                                 ? m.pa[a].steps.at(act)[i]
                                 : induced_distribution(m.cpa[a].steps.at(act)[i]);
          size_t k2 = m.kind == ModelKind::PA ? m.pa[b].steps.at(act).size() : m.cpa[b].steps.at(act).size();
          for (size_t j = 0; j < k2; ++j) {
            Distribution mu2 = m.kind == ModelKind::PA
                                   ? m.pa[b].steps.at(act)[j]
                                   : induced_distribution(m.cpa[b].steps.at(act)[j]);
            if (m.kind == ModelKind::CPA &&
                !(m.cpa[a].steps.at(act)[i].exit_rate() <= m.cpa[b].steps.at(act)[j].exit_rate()))
              continue;
            WeightLp wlp = build_weight_lp(mu1, mu2, rel);
            if (auto sol = lp_feasible(wlp.lp)) {
              json delta = json::array();
              for (const auto& [st, v] : wlp.delta_vars)
                if ((*sol)[v] != 0)
                  delta.push_back({aux_name(st.first, m), aux_name(st.second, m), to_string((*sol)[v])});
              arcs.push_back({{"action", m.actions[act]},
                              {"mu1", i},
                              {"mu2", j},
                              {"delta", delta}});
              goto next_mu1;
            }
          }
        next_mu1:;
        }
      }
      w["arcs"] = arcs;
    } else {
      auto rows = markov_rows(m);
      WeightLp wlp = build_weight_lp(rows[a], rows[b], rel);
      auto sol = lp_feasible(wlp.lp);
      w["kind"] = "weight-function";
      json delta = json::array();
      if (sol)
        for (const auto& [st, v] : wlp.delta_vars)
          if ((*sol)[v] != 0)
            delta.push_back({aux_name(st.first, m), aux_name(st.second, m), to_string((*sol)[v])});
      w["delta"] = delta;
    }
  } else if (cfg.relation == "strong-prob") {
    w["kind"] = "combined-transitions";
    json arcs = json::array();
    if (m.kind == ModelKind::PA) {
      for (ActionId act : m.enabled_actions(a)) {
        const auto& dists = m.pa[a].steps.at(act);
        for (size_t i = 0; i < dists.size(); ++i) {
          CombinedLp clp = build_lp_pa(m, a, act, dists[i], b, rel);
          auto sol = lp_feasible(clp.lp);
          json arc{{"action", m.actions[act]}, {"mu1", i}};
          json cs = json::array();
          if (sol)
            for (int v : clp.c_vars) cs.push_back(to_string((*sol)[v]));
          arc["coefficients"] = cs;
          arcs.push_back(arc);
        }
      }
    } else {
      for (ActionId act : m.enabled_actions(a)) {
        const auto& rates = m.cpa[a].steps.at(act);
        for (size_t i = 0; i < rates.size(); ++i) {
          json arc{{"action", m.actions[act]}, {"r1", i}};
          if (rates[i].exit_rate() == 0) {
            arc["vacuous"] = true;
            arcs.push_back(arc);
            continue;
          }
          for (const Rational& e : exit_rate_classes(m, b, act)) {
            if (e < rates[i].exit_rate()) continue;
            CombinedLp clp = build_lp_cpa(m, a, act, rates[i], b, e, rel);
            if (auto sol = lp_feasible(clp.lp)) {
              arc["exit_rate"] = to_string(e);
              json cs = json::array();
              for (int v : clp.c_vars) cs.push_back(to_string((*sol)[v]));
              arc["coefficients"] = cs;
              break;
            }
          }
          arcs.push_back(arc);
        }
      }
    }
    w["arcs"] = arcs;
  } else {
    // Weak: report the branch; for the parametric branch also a valid gamma
    // together with a flow saturating the mandatory edges.
    bool stutter = true;
    for (StateId u : m.post(a)) stutter &= rel.contains(u, b);
    if (stutter) {
      w["kind"] = "stutter-only";
      return w;
    }
    if (m.kind == ModelKind::DTMC) {
      bool post2_sim = true;
      for (StateId t : m.post(b)) post2_sim &= rel.contains(a, t);
      if (post2_sim) {
        w["kind"] = "reachability";
        return w;
      }
    }
    auto rows = markov_rows(m);
    ParametricNetwork pn = build_parametric(m, rows, a, b, rel);
    std::optional<Rational> bound;
    if (m.kind == ModelKind::CTMC) bound = m.exit_rate(b) / m.exit_rate(a);
    std::optional<Rational> gamma = find_valid_breakpoint(pn, bound, true);
    if (!gamma && bound && classify_gamma(pn, *bound) == GammaClass::Valid) gamma = bound;
    w["kind"] = "valid-gamma";
    if (gamma) {
      w["gamma"] = to_string(*gamma);
      FlowNetwork shape = pn.fresh_network(*gamma);
      std::vector<std::pair<EdgeRef, Rational>> lower;
      for (const auto& l : pn.left())
        if (l.mandatory) lower.push_back({EdgeRef::source(l.id), l.cap});
      for (const auto& r : pn.right())
        if (r.mandatory) lower.push_back({EdgeRef::sink(r.id), r.base * *gamma});
      if (auto flow = feasible_flow(shape, lower)) {
        json edges = json::array();
        for (const auto& [lr, f] : flow->inner)
          if (f != 0) edges.push_back({m.name(lr.first), m.name(lr.second), to_string(f)});
        w["flow"] = edges;
        w["k1"] = to_string(flow->value);
        w["k2"] = to_string(Rational(flow->value / *gamma));
      }
    }
  }
  return w;
}

void dump_networks(const Model& m, StateId a, StateId b, const Relation& rel,
                   const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.dump_dir);
  auto write = [&](const std::string& name, const FlowNetwork& net) {
    std::ofstream f(fs::path(cfg.dump_dir) / (name + ".dot"));
    f << net.to_dot(name);
  };
  auto safe = [](std::string s) {
    for (char& c : s)
      if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
  };
  std::string base = "check_" + safe(m.name(a)) + "_" + safe(m.name(b));
  if (cfg.relation == "weak") {
    auto rows = markov_rows(m);
    ParametricNetwork pn = build_parametric(m, rows, a, b, rel);
    FlowNetwork net = pn.fresh_network(pn.gamma());
    net.max_flow();
    write(base + "_gamma1", net);
  } else if (m.kind == ModelKind::PA || m.kind == ModelKind::CPA) {
    for (ActionId act : m.enabled_actions(a)) {
      size_t k1 = m.kind == ModelKind::PA ? m.pa[a].steps.at(act).size() : m.cpa[a].steps.at(act).size();
      size_t k2 = m.kind == ModelKind::PA ? m.pa[b].steps.at(act).size() : m.cpa[b].steps.at(act).size();
      for (size_t i = 0; i < k1; ++i) {
        Distribution mu1 = m.kind == ModelKind::PA ? m.pa[a].steps.at(act)[i]
                                                   : induced_distribution(m.cpa[a].steps.at(act)[i]);
        for (size_t j = 0; j < k2; ++j) {
          Distribution mu2 = m.kind == ModelKind::PA
                                 ? m.pa[b].steps.at(act)[j]
                                 : induced_distribution(m.cpa[b].steps.at(act)[j]);
          FlowNetwork net = build_network(mu1, mu2, rel);
          net.max_flow();
          write(base + "_" + safe(m.actions[act]) + "_" + std::to_string(i) + "_" + std::to_string(j), net);
        }
      }
    }
  } else {
    auto rows = markov_rows(m);
    FlowNetwork net = build_network(rows[a], rows[b], rel);
    net.max_flow();
    write(base, net);
  }
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  Model m = parse_model_file(cfg.input);
  validate(m, cfg);
  auto a = m.state_by_name(cfg.pair[0]);
  auto b = m.state_by_name(cfg.pair[1]);
  if (!a) throw CliError("unknown state '" + cfg.pair[0] + "'");
  if (!b) throw CliError("unknown state '" + cfg.pair[1] + "'");
  RunStats stats;
  Relation rel = compute_relation(m, cfg, stats);
  bool related = rel.contains(*a, *b);
  if (cfg.json_output) {
    json j{{"model", model_json(m)},
           {"relation", cfg.relation},
           {"engine", cfg.engine},
           {"pair", {m.name(*a), m.name(*b)}},
           {"related", related},
           {"stats", stats_json(stats)}};
    if (related && cfg.witness) j["witness"] = witness_json(m, *a, *b, rel, cfg);
    out << j.dump(2) << "\n";
  } else {
    out << m.name(*a) << (related ? " ⊑ " : " ⋢ ") << m.name(*b) << "\n";
    if (related && cfg.witness) out << witness_json(m, *a, *b, rel, cfg).dump(2) << "\n";
    if (cfg.stats) print_stats_text(out, stats);
  }
  if (!cfg.dump_dir.empty()) dump_networks(m, *a, *b, rel, cfg);
  return related ? 0 : 1;
}

int cmd_preorder(const RunConfig& cfg, std::ostream& out) {
  Model m = parse_model_file(cfg.input);
  validate(m, cfg);
  RunStats stats;
  Relation rel = compute_relation(m, cfg, stats);
  // Lexicographic in the printed names, ties by index for determinism.
  std::vector<std::tuple<std::string, std::string, StateId, StateId>> lines;
  for (const auto& [a, b] : rel.pairs()) lines.push_back({m.name(a), m.name(b), a, b});
  std::sort(lines.begin(), lines.end());
  if (cfg.json_output) {
    json pairs = json::array();
    for (const auto& [na, nb, a, b] : lines) pairs.push_back({na, nb});
    json j{{"model", model_json(m)},
           {"relation", cfg.relation},
           {"engine", cfg.engine},
           {"pairs", pairs},
           {"stats", stats_json(stats)}};
    out << j.dump(2) << "\n";
  } else {
    for (const auto& [na, nb, a, b] : lines) out << na << " ⊑ " << nb << "\n";
    if (cfg.stats) print_stats_text(out, stats);
  }
  return 0;
}

} // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  CliResult result;
  std::ostringstream out, err;

  CLI::App app{"Decision engine for strong, strong probabilistic and weak simulation preorders "
               "on Markov models and probabilistic automata"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", cfg.input, "model file")->required();
    cmd->add_option("--rel", cfg.relation, "relation to decide")
        ->check(CLI::IsMember({"strong", "strong-prob", "weak"}))
        ->capture_default_str();
    cmd->add_option("--engine", cfg.engine, "decision engine")
        ->check(CLI::IsMember({"parametric", "basic", "oracle"}))
        ->capture_default_str();
    cmd->add_flag("--stats", cfg.stats, "print statistics counters");
    cmd->add_flag("--improved", cfg.improved, "partition-based weak checks (WsImproved)");
    cmd->add_flag("--incomplete-iterations", cfg.incomplete,
                  "skip unpartitionable pairs in some iterations (needs --improved)");
    cmd->add_flag("--json", cfg.json_output, "machine-readable output");
  };

  CLI::App* check = app.add_subcommand("check", "decide one pair; exit 0 related, 1 not, 2 error");
  add_common(check);
  check->add_option("--pair", cfg.pair, "the two states to compare")->expected(2)->required();
  check->add_flag("--witness", cfg.witness, "print a certificate when related");
  check->add_option("--dump-networks", cfg.dump_dir, "write DOT dumps of the pair's networks");

  CLI::App* preorder = app.add_subcommand("preorder", "list all related pairs");
  add_common(preorder);

  std::vector<const char*> argv;
  argv.push_back("simrel");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    result.exit_code = app.exit(e, out, err) == 0 ? 0 : 2;
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  try {
    if (app.got_subcommand(check)) result.exit_code = cmd_check(cfg, out);
    else result.exit_code = cmd_preorder(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = 2;
  }
  result.out = out.str();
  result.err = err.str();
  return result;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CliResult r = run_cli(args);
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

} // namespace simrel
