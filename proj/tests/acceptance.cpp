// Acceptance suite: one verdict line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "simrel/model_io.hpp"
#include "simrel/oracles.hpp"
#include "simrel/probsim.hpp"
#include "simrel/strongsim.hpp"
#include "simrel/weaksim.hpp"
#include "support/support.hpp"
#include "support/witness.hpp"

using namespace simrel;
using namespace simrel::test;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw Failure(what);
}

int g_failures = 0;

void criterion(int id, const std::string& title, const std::function<void()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    body();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::printf("[PASS] criterion %2d (%6lld ms): %s\n", id, static_cast<long long>(ms),
                title.c_str());
  } catch (const std::exception& e) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::printf("[FAIL] criterion %2d (%6lld ms): %s -- %s\n", id, static_cast<long long>(ms),
                title.c_str(), e.what());
    ++g_failures;
  }
  std::fflush(stdout);
}

long elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return static_cast<long>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count());
}

Relation partition_relation(const Model& m) {
  return make_relation(m, {{"s1", "s2"},
                           {"s1", "v2"},
                           {"v1", "s2"},
                           {"u1", "u2"},
                           {"o1", "o2"},
                           {"o1", "v2"},
                           {"v1", "o3"},
                           {"v1", "v2"},
                           {"o2", "o1"}});
}

ParametricNetwork three_breakpoints_network() {
  std::vector<ParametricNetwork::LeftSpec> left{{0, rat(1, 4), false},
                                                {1, rat(1, 4), true},
                                                {2, rat(1, 8), false},
                                                {3, rat(1, 8), false},
                                                {4, rat(1, 4), false}};
  std::vector<ParametricNetwork::RightSpec> right{{10, rat(1, 4), false},
                                                  {11, rat(1, 4), true},
                                                  {12, rat(1, 4), false},
                                                  {13, rat(1, 8), false},
                                                  {14, rat(1, 8), false}};
  std::vector<std::pair<StateId, StateId>> edges{{2, 12}, {1, 11}, {1, 10}, {3, 13}, {4, 14}, {0, 10}};
  return ParametricNetwork(std::move(left), std::move(right), std::move(edges), Rational(1));
}

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  Model m = load("three_roots.fps");
  Relation rel = simrel_fps(m);
  require(rel.contains(sid(m, "s1"), sid(m, "s2")), "(s1,s2) missing");
  require(!rel.contains(sid(m, "s2"), sid(m, "s3")), "(s2,s3) must be excluded");
  std::vector<std::string> yellow{"u1", "q1", "u2", "q2", "u3", "q4"};
  for (const auto& a : yellow)
    for (const auto& b : yellow)
      require(rel.contains(sid(m, a), sid(m, b)), "yellow pair (" + a + "," + b + ") missing");
  std::vector<std::string> green{"q3", "q5"};
  for (const auto& a : green)
    for (const auto& b : green)
      require(rel.contains(sid(m, a), sid(m, b)), "green pair (" + a + "," + b + ") missing");
  require(elapsed_ms(t0) < 1000, "must finish below one second");
}

void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  Model c = load("two_trees.ctmc");
  RunStats stats;
  SimTrace trace;
  Relation rel = simrel_fps(c, &stats, &trace);
  StateId s1 = sid(c, "s1"), s2 = sid(c, "s2"), u2 = sid(c, "u2"), u4 = sid(c, "u4");
  require(rel.contains(s1, s2), "(s1,s2) missing");
  require(trace.pair_removed_in(1, u2, u4), "(u2,u4) not removed in iteration 1");
  require(trace.pair_updated_in(2, s1, s2), "smf_update not used for (s1,s2) in iteration 2");
  require(!trace.pair_fresh_in(2, s1, s2), "(s1,s2) must not be rebuilt fresh in iteration 2");
  require(stats.flow.smf_updates > 0, "no smf_update recorded");
  require(elapsed_ms(t0) < 1000, "must finish below one second");
}

void criterion_3() {
  Model m = load("convex.pa");
  Relation strong = simrel_pa(m);
  require(strong.contains(sid(m, "s1"), sid(m, "s2")), "strong (s1,s2) missing");
  require(!strong.contains(sid(m, "s2"), sid(m, "s1")), "strong must exclude (s2,s1)");
  Relation prob = simrel_pa_prob(m);
  require(prob.contains(sid(m, "s2"), sid(m, "s1")), "strong-prob (s2,s1) missing");
}

void criterion_4() {
  Model m = load("exit_classes.cpa");
  Relation prob = simrel_cpa_prob(m);
  require(prob.contains(sid(m, "s0"), sid(m, "s2")), "strong-prob (s0,s2) missing");
  require(!prob.contains(sid(m, "s0"), sid(m, "s1")), "strong-prob must exclude (s0,s1)");
}

void criterion_5() {
  Model m = load("partition.dtmc");
  ParametricNetwork pn =
      build_parametric(m, m.prob, sid(m, "s1"), sid(m, "s2"), partition_relation(m));
  BreakpointList bl = breakpoints(pn);
  require(bl.points == std::vector<Rational>{rat(6, 7), Rational(2)},
          "breakpoints must be exactly {6/7, 2}");
  require(bl.kappa(rat(1, 2)) == rat(1, 2), "kappa(1/2) must be 1/2");
  require(bl.kappa(Rational(1)) == rat(7, 8), "kappa(1) must be 7/8");
  require(bl.kappa(Rational(2)) == Rational(1), "kappa(2) must be 1");
  require(classify_gamma(pn, rat(6, 7)) == GammaClass::TooSmall, "classify(6/7) != too-small");
  require(classify_gamma(pn, Rational(2)) == GammaClass::Valid, "classify(2) != valid");
}

void criterion_6() {
  ParametricNetwork pn = three_breakpoints_network();
  BreakpointList bl = breakpoints(pn);
  require(bl.points == std::vector<Rational>{rat(1, 2), Rational(1), Rational(2)},
          "breakpoints must be exactly {1/2, 1, 2}");
  for (const Rational& g : {rat(1, 2), rat(3, 4), Rational(1)})
    require(classify_gamma(pn, g) == GammaClass::Valid, "classify(" + to_string(g) + ") != valid");
  auto minimal = find_valid_breakpoint(pn, std::nullopt, true);
  require(minimal.has_value() && *minimal == rat(1, 2), "minimal valid breakpoint must be 1/2");
}

void criterion_7() {
  Model m = load("splitting.dtmc");
  Relation rel = simrel_w(m);
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"s1", "s3"}, {"s1", "s4"}, {"s2", "s4"}, {"s2", "s5"}, {"u1", "v1"}})
    require(rel.contains(sid(m, a), sid(m, b)),
            std::string("weak pair (") + a + "," + b + ") missing");
  require(!rel.contains(sid(m, "s2"), sid(m, "s3")), "weak must exclude (s2,s3)");
}

void criterion_8() {
  Model m = load("upto.fps");
  StateId s1 = sid(m, "s1"), s2 = sid(m, "s2");
  require(strong_sim_upto(m, s1, s2, make_relation(m, {{"s1", "s2"}, {"w1", "w2"}})),
          "s1 must simulate up to {(s1,s2),(w1,w2)}");
  require(!strong_sim_upto(m, s1, s2, make_relation(m, {{"s1", "s2"}})),
          "s1 must not simulate up to {(s1,s2)}");
}

void criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(900);
  for (int round = 0; round < 200; ++round) {
    ModelKind kind =
        round % 3 == 0 ? ModelKind::FPS : (round % 3 == 1 ? ModelKind::DTMC : ModelKind::CTMC);
    Model m = random_markov(rng, kind, 10, 4, 2);
    Relation fps = simrel_fps(m);
    require(fps == simrel_basic(m), "simrel_fps != simrel_basic on a random Markov model");
    require(fps == naive_simrel(m, RelationKind::Strong),
            "engines disagree with naive_simrel on a random Markov model");
  }
  for (int round = 0; round < 100; ++round) {
    Model m = random_pa(rng, round % 2 == 1, 8, 2, 3, 2);
    require(simrel_pa(m) == naive_simrel(m, RelationKind::Strong),
            "simrel_pa disagrees with naive_simrel on a random PA/CPA");
  }
  require(elapsed_ms(t0) < 300000, "equivalence suite must finish below five minutes");
}

void criterion_10() {
  Rng rng(1000);
  // smf_update against from-scratch recomputation, >= 1000 nonempty deletion
  // sequences.
  for (long sequences = 0; sequences < 1000;) {
    int n = 7;
    Distribution mu1 = random_distribution(rng, n, 4, rng.chance(50));
    Distribution mu2 = random_distribution(rng, n, 4, rng.chance(50));
    Relation rel(n);
    std::vector<std::pair<StateId, StateId>> deletable;
    for (StateId a = 0; a < n; ++a)
      for (StateId b = 0; b < n; ++b)
        if (rng.chance(45)) {
          rel.insert(a, b);
          if (mu1.contains(a) && mu2.contains(b)) deletable.push_back({a, b});
        }
    if (deletable.empty()) continue;
    ++sequences;
    FlowNetwork net = build_network(mu1, mu2, rel);
    net.max_flow();
    std::shuffle(deletable.begin(), deletable.end(), rng.raw());
    Relation shrunk = rel;
    size_t cursor = 0;
    while (cursor < deletable.size()) {
      size_t batch = 1 + rng.below(2);
      std::vector<std::pair<StateId, StateId>> step;
      while (batch-- > 0 && cursor < deletable.size()) {
        step.push_back(deletable[cursor]);
        shrunk.erase(deletable[cursor].first, deletable[cursor].second);
        ++cursor;
      }
      Rational incremental = net.smf_update(step);
      FlowNetwork fresh = build_network(mu1, mu2, shrunk);
      require(incremental == fresh.max_flow(), "smf_update differs from fresh recomputation");
    }
  }
  // Push-relabel against the augmenting-path oracle, >= 1000 networks.
  for (int round = 0; round < 1000; ++round) {
    int n = 8;
    Distribution mu1 = random_distribution(rng, n, 4, rng.chance(50));
    Distribution mu2 = random_distribution(rng, n, 4, rng.chance(50));
    Relation rel(n);
    for (StateId a = 0; a < n; ++a)
      for (StateId b = 0; b < n; ++b)
        if (rng.chance(40)) rel.insert(a, b);
    FlowNetwork net = build_network(mu1, mu2, rel);
    AugmentingOracle oracle(net);
    require(net.max_flow() == oracle.max_flow(), "push-relabel differs from the oracle");
  }
  // Concavity and breakpoint bound, >= 200 parametric networks.
  for (int round = 0; round < 200; ++round) {
    int L = 1 + rng.below(4), R = 1 + rng.below(4);
    std::vector<ParametricNetwork::LeftSpec> left;
    std::vector<ParametricNetwork::RightSpec> right;
    std::vector<std::pair<StateId, StateId>> edges;
    for (int i = 0; i < L; ++i)
      left.push_back({i, rat(1 + rng.below(5), 1 + rng.below(4)), rng.chance(30)});
    for (int j = 0; j < R; ++j)
      right.push_back({100 + j, rat(1 + rng.below(5), 1 + rng.below(4)), rng.chance(30)});
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < R; ++j)
        if (rng.chance(55)) edges.push_back({i, 100 + j});
    ParametricNetwork pn(left, right, edges, Rational(1));
    BreakpointList bl = breakpoints(pn);
    require(static_cast<int>(bl.points.size()) <= pn.network().vertex_count() - 2,
            "breakpoint count exceeds |V| - 2");
    for (size_t i = 0; i + 1 < bl.segments.size(); ++i) {
      require(bl.segments[i].slope > bl.segments[i + 1].slope, "kappa slopes must decrease");
      require(bl.segments[i].at(bl.points[i]) == bl.segments[i + 1].at(bl.points[i]),
              "kappa segments must agree at breakpoints");
    }
    for (int probe = 0; probe < 2; ++probe) {
      Rational g1(rng.below(5), 1 + rng.below(3));
      Rational g3 = g1 + rat(1 + rng.below(4), 1 + rng.below(2));
      Rational g2 = (g1 + g3) / 2;
      auto value_at = [&](const Rational& g) {
        FlowNetwork net = pn.fresh_network(g);
        return net.max_flow();
      };
      Rational v1 = value_at(g1), v2 = value_at(g2), v3 = value_at(g3);
      require(v2 * 2 >= v1 + v3, "kappa must be concave");
      require(v2 == bl.kappa(g2), "kappa segments must reproduce flow values");
    }
  }
}

void criterion_11() {
  Rng rng(1100);
  for (int round = 0; round < 200; ++round) {
    Model m = random_markov(rng, ModelKind::DTMC, 8, 3, 2);
    Relation plain = simrel_w(m);
    require(plain == naive_simrel(m, RelationKind::Weak), "weak engine disagrees with the oracle");
    require(plain == simrel_w(m, WeakOptions{true, false}),
            "improved weak engine disagrees with the plain one");
  }
  for (int round = 0; round < 100; ++round) {
    Model m = random_markov(rng, ModelKind::CTMC, 8, 3, 2);
    Relation plain = simrel_w(m);
    require(plain == naive_simrel(m, RelationKind::Weak),
            "weak CTMC engine disagrees with the oracle");
    require(plain == simrel_w(m, WeakOptions{true, false}),
            "improved weak CTMC engine disagrees with the plain one");
  }
}

void criterion_12() {
  // All sub-distributions over three states on the quarter grid, against all
  // 512 relations; the flow route and the weight-LP route must agree
  // everywhere. Relations agreeing on the supports give literally identical
  // questions, so each distinct restriction is decided once.
  std::vector<Distribution> grid;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c) {
        Distribution d;
        if (a) d.set(0, rat(a, 4));
        if (b) d.set(1, rat(b, 4));
        if (c) d.set(2, rat(c, 4));
        grid.push_back(d);
      }
  require(grid.size() == 35, "grid enumeration is off");
  long checked = 0;
  for (const Distribution& mu1 : grid) {
    for (const Distribution& mu2 : grid) {
      int relevant = 0;
      for (StateId a : mu1.support())
        for (StateId b : mu2.support()) relevant |= 1 << (3 * a + b);
      std::map<int, bool> memo;
      for (int mask = 0; mask < 512; ++mask) {
        int key = mask & relevant;
        auto it = memo.find(key);
        if (it == memo.end()) {
          Relation rel(3);
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              if (key & (1 << (3 * a + b))) rel.insert(a, b);
          bool flow = weight_check(mu1, mu2, rel);
          bool lp = weight_oracle(mu1, mu2, rel);
          require(flow == lp, "flow and weight-LP verdicts differ");
          memo.emplace(key, flow);
          ++checked;
        }
      }
    }
  }
  require(checked > 20000, "exhaustive check did not cover the distinct instances");
}

void criterion_13() {
  Rng rng(1300);
  for (int round = 0; round < 60; ++round) {
    Model m = random_pa(rng, round % 2 == 1, 7, 2, 3, 2);
    require(simrel_pa(m).subset_of(simrel_prob(m)),
            "strong must refine strong probabilistic simulation");
  }
  for (int round = 0; round < 60; ++round) {
    ModelKind kind = round % 2 ? ModelKind::CTMC : ModelKind::DTMC;
    Model m = random_markov(rng, kind, 7, 3, 2);
    require(simrel_fps(m).subset_of(simrel_w(m)), "strong must refine weak simulation");
  }
  for (int round = 0; round < 40; ++round) {
    Model c = random_markov(rng, ModelKind::CTMC, 7, 3, 2);
    require(simrel_fps(c).subset_of(simrel_fps(embedded_dtmc(c))),
            "CTMC strong simulation must refine the embedded-DTMC one");
  }
  for (int round = 0; round < 40; ++round) {
    Model m = random_pa(rng, false, 7, 2, 1, 2, /*mdp=*/true);
    require(simrel_pa(m) == simrel_pa_prob(m), "MDP strong and strong-prob must coincide");
  }
}

} // namespace

int main() {
  criterion(1, "worked example: three-root FPS strong preorder", criterion_1);
  criterion(2, "worked example: CTMC strong preorder with incremental instrumentation", criterion_2);
  criterion(3, "worked example: PA strong vs strong probabilistic", criterion_3);
  criterion(4, "worked example: CPA strong probabilistic verdicts", criterion_4);
  criterion(5, "worked example: parametric network breakpoints and kappa", criterion_5);
  criterion(6, "worked example: three-breakpoint network validity", criterion_6);
  criterion(7, "worked example: weak preorder with state splitting", criterion_7);
  criterion(8, "worked example: simulation up to a fixed relation", criterion_8);
  criterion(9, "engine equivalence on random models", criterion_9);
  criterion(10, "flow-kernel properties", criterion_10);
  criterion(11, "weak-simulation oracle equivalence", criterion_11);
  criterion(12, "weight function iff flow value one (exhaustive)", criterion_12);
  criterion(13, "inclusion chains between the preorders", criterion_13);
  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 13 criteria passed\n");
  return 0;
}
