#include "simrel/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace simrel {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::string stripped = line.substr(0, line.find('#'));
  std::istringstream ss(stripped);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

int parse_state(const std::string& tok, int n, int line) {
  if (tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, "expected state index, got '" + tok + "'");
  long v = std::stol(tok);
  if (v >= n) throw ParseError(line, "state index " + tok + " out of range (n=" + std::to_string(n) + ")");
  return static_cast<int>(v);
}

Rational parse_value(const std::string& tok, int line) {
  auto v = parse_rational(tok);
  if (!v) throw ParseError(line, "malformed value '" + tok + "'");
  return *v;
}

struct Line {
  int number;
  std::vector<std::string> tokens;
};

} // namespace

Model parse_model(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto tokens = tokenize(raw);
    if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
  }
  size_t pos = 0;
  auto need = [&](const char* what) -> const Line& {
    if (pos >= lines.size()) throw ParseError(number + 1, std::string("unexpected end of input, expected ") + what);
    return lines[pos];
  };

  Model model;
  {
    const Line& l = need("MODEL");
    if (l.tokens.size() != 2 || l.tokens[0] != "MODEL")
      throw ParseError(l.number, "expected 'MODEL <kind>'");
    const std::string& k = l.tokens[1];
    if (k == "FPS") model.kind = ModelKind::FPS;
    else if (k == "DTMC") model.kind = ModelKind::DTMC;
    else if (k == "CTMC") model.kind = ModelKind::CTMC;
    else if (k == "PA") model.kind = ModelKind::PA;
    else if (k == "CPA") model.kind = ModelKind::CPA;
    else throw ParseError(l.number, "unknown model kind '" + k + "'");
    ++pos;
  }
  {
    const Line& l = need("STATES");
    if (l.tokens.size() != 2 || l.tokens[0] != "STATES")
      throw ParseError(l.number, "expected 'STATES <n>'");
    if (l.tokens[1].find_first_not_of("0123456789") != std::string::npos)
      throw ParseError(l.number, "state count must be a nonnegative integer");
    model.n = static_cast<int>(std::stol(l.tokens[1]));
    if (model.n <= 0) throw ParseError(l.number, "state count must be positive");
    ++pos;
  }

  model.labels.assign(model.n, {});
  model.names.resize(model.n);
  for (int s = 0; s < model.n; ++s) model.names[s] = std::to_string(s);
  switch (model.kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC: model.prob.resize(model.n); break;
    case ModelKind::CTMC: model.rate.resize(model.n); break;
    case ModelKind::PA: model.pa.resize(model.n); break;
    case ModelKind::CPA: model.cpa.resize(model.n); break;
  }

  if (pos < lines.size() && lines[pos].tokens[0] == "NAMES") {
    ++pos;
    std::set<std::string> seen;
    while (pos < lines.size() && lines[pos].tokens[0] != "LABELS" && lines[pos].tokens[0] != "TRANSITIONS") {
      const Line& l = lines[pos];
      if (l.tokens.size() != 2) throw ParseError(l.number, "expected '<state> <name>'");
      int s = parse_state(l.tokens[0], model.n, l.number);
      if (!seen.insert(l.tokens[1]).second)
        throw ParseError(l.number, "duplicate state name '" + l.tokens[1] + "'");
      model.names[s] = l.tokens[1];
      ++pos;
    }
  }

  if (pos < lines.size() && lines[pos].tokens[0] == "LABELS") {
    ++pos;
    std::set<int> labelled;
    while (pos < lines.size() && lines[pos].tokens[0] != "TRANSITIONS") {
      const Line& l = lines[pos];
      int s = parse_state(l.tokens[0], model.n, l.number);
      if (!labelled.insert(s).second)
        throw ParseError(l.number, "state " + l.tokens[0] + " labelled twice");
      for (size_t i = 1; i < l.tokens.size(); ++i) model.labels[s].insert(l.tokens[i]);
      ++pos;
    }
  }

  {
    const Line& l = need("TRANSITIONS");
    if (l.tokens[0] != "TRANSITIONS") throw ParseError(l.number, "expected 'TRANSITIONS'");
    ++pos;
  }

  std::map<std::string, ActionId> action_ids;
  auto intern = [&](const std::string& name) {
    auto it = action_ids.find(name);
    if (it != action_ids.end()) return it->second;
    ActionId id = static_cast<ActionId>(model.actions.size());
    model.actions.push_back(name);
    action_ids.emplace(name, id);
    return id;
  };

  // (src, action, index) -> per-target value, for duplicate detection and
  // deferred distribution assembly in index order.
  std::map<std::tuple<int, ActionId, long>, std::map<int, Rational>> pa_rows;
  std::map<std::tuple<int, ActionId, long>, int> pa_row_line;

  bool ended = false;
  while (pos < lines.size()) {
    const Line& l = lines[pos];
    if (l.tokens[0] == "END") {
      ended = true;
      ++pos;
      break;
    }
    if (model.kind == ModelKind::PA || model.kind == ModelKind::CPA) {
      if (l.tokens.size() != 5)
        throw ParseError(l.number, "expected '<src> <action> <dist-index> <dst> <value>'");
      int src = parse_state(l.tokens[0], model.n, l.number);
      if (l.tokens[1].empty()) throw ParseError(l.number, "empty action name");
      ActionId a = intern(l.tokens[1]);
      if (l.tokens[2].find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(l.number, "distribution index must be a nonnegative integer");
      long idx = std::stol(l.tokens[2]);
      int dst = parse_state(l.tokens[3], model.n, l.number);
      Rational v = parse_value(l.tokens[4], l.number);
      if (v == 0) throw ParseError(l.number, "zero-valued transition");
      auto key = std::make_tuple(src, a, idx);
      auto& row = pa_rows[key];
      if (!row.emplace(dst, v).second)
        throw ParseError(l.number, "duplicate transition entry");
      pa_row_line.emplace(key, l.number);
    } else {
      if (l.tokens.size() != 3) throw ParseError(l.number, "expected '<src> <dst> <value>'");
      int src = parse_state(l.tokens[0], model.n, l.number);
      int dst = parse_state(l.tokens[1], model.n, l.number);
      Rational v = parse_value(l.tokens[2], l.number);
      if (v == 0) throw ParseError(l.number, "zero-valued transition");
      if (model.kind == ModelKind::CTMC) {
        if (model.rate[src].contains(dst)) throw ParseError(l.number, "duplicate transition entry");
        model.rate[src].set(dst, v);
      } else {
        if (model.prob[src].contains(dst)) throw ParseError(l.number, "duplicate transition entry");
        if (v > 1) throw ParseError(l.number, "probability exceeds 1");
        model.prob[src].set(dst, v);
      }
    }
    ++pos;
  }
  if (!ended) throw ParseError(number + 1, "missing END");
  if (pos < lines.size()) throw ParseError(lines[pos].number, "trailing content after END");

  // Assemble PA/CPA rows; indices per (src, action) must be 0..k-1.
  if (model.kind == ModelKind::PA || model.kind == ModelKind::CPA) {
    std::map<std::pair<int, ActionId>, std::vector<long>> indices;
    for (const auto& [key, row] : pa_rows)
      indices[{std::get<0>(key), std::get<1>(key)}].push_back(std::get<2>(key));
    for (const auto& [sa, idxs] : indices) {
      for (size_t i = 0; i < idxs.size(); ++i)
        if (idxs[i] != static_cast<long>(i))
          throw ParseError(pa_row_line[{sa.first, sa.second, idxs[i]}],
                           "distribution indices for a (state, action) pair must be 0..k-1");
    }
    for (const auto& [key, row] : pa_rows) {
      auto [src, a, idx] = key;
      if (model.kind == ModelKind::PA) {
        Distribution d;
        Rational sum(0);
        for (const auto& [dst, v] : row) {
          d.set(dst, v);
          sum += v;
        }
        if (sum > 1)
          throw ParseError(pa_row_line[key], "distribution mass exceeds 1");
        auto& vec = model.pa[src].steps[a];
        if (vec.size() != static_cast<size_t>(idx)) vec.resize(idx);
        vec.push_back(std::move(d));
      } else {
        RateFunction r;
        for (const auto& [dst, v] : row) r.set(dst, v);
        auto& vec = model.cpa[src].steps[a];
        if (vec.size() != static_cast<size_t>(idx)) vec.resize(idx);
        vec.push_back(std::move(r));
      }
    }
  }

  // Row validation.
  if (model.kind == ModelKind::FPS || model.kind == ModelKind::DTMC) {
    for (int s = 0; s < model.n; ++s) {
      Rational sum = model.prob[s].total();
      if (sum > 1) throw ParseError(0, "row of state " + model.names[s] + " sums above 1");
      if (model.kind == ModelKind::DTMC && sum != 0 && sum != 1)
        throw ParseError(0, "DTMC row of state " + model.names[s] +
                                " is neither stochastic nor absorbing (sum " + to_string(sum) + ")");
    }
  }

  model.finalize();
  return model;
}

Model parse_model_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_model(ss);
}

Model parse_model_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(0, "cannot open '" + path + "'");
  return parse_model(f);
}

std::string serialize_model(const Model& model) {
  std::ostringstream out;
  out << "MODEL " << kind_name(model.kind) << "\n";
  out << "STATES " << model.n << "\n";
  bool any_name = false;
  for (int s = 0; s < model.n; ++s)
    if (model.names[s] != std::to_string(s)) any_name = true;
  if (any_name) {
    out << "NAMES\n";
    for (int s = 0; s < model.n; ++s)
      if (model.names[s] != std::to_string(s)) out << s << " " << model.names[s] << "\n";
  }
  bool any_label = false;
  for (const auto& props : model.labels) any_label |= !props.empty();
  if (any_label) {
    out << "LABELS\n";
    for (int s = 0; s < model.n; ++s) {
      if (model.labels[s].empty()) continue;
      out << s;
      for (const auto& p : model.labels[s]) out << " " << p;
      out << "\n";
    }
  }
  out << "TRANSITIONS\n";
  switch (model.kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC:
      for (int s = 0; s < model.n; ++s)
        for (const auto& [t, v] : model.prob[s].entries())
          out << s << " " << t << " " << to_string(v) << "\n";
      break;
    case ModelKind::CTMC:
      for (int s = 0; s < model.n; ++s)
        for (const auto& [t, v] : model.rate[s].entries())
          out << s << " " << t << " " << to_string(v) << "\n";
      break;
    case ModelKind::PA:
      for (int s = 0; s < model.n; ++s)
        for (const auto& [a, dists] : model.pa[s].steps)
          for (size_t i = 0; i < dists.size(); ++i)
            for (const auto& [t, v] : dists[i].entries())
              out << s << " " << model.actions[a] << " " << i << " " << t << " " << to_string(v) << "\n";
      break;
    case ModelKind::CPA:
      for (int s = 0; s < model.n; ++s)
        for (const auto& [a, rates] : model.cpa[s].steps)
          for (size_t i = 0; i < rates.size(); ++i)
            for (const auto& [t, v] : rates[i].entries())
              out << s << " " << model.actions[a] << " " << i << " " << t << " " << to_string(v) << "\n";
      break;
  }
  out << "END\n";
  return out.str();
}

} // namespace simrel
