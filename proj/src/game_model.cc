// Copyright 2026 The asymgame Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asymgame/game_model.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace asymgame {
namespace {

using nlohmann::json;

std::string FormatNumber(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

[[noreturn]] void Fail(SpecError::Kind kind, const std::string& what) {
  throw SpecError(kind, what);
}

const json& Require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) Fail(SpecError::Kind::kParse, "missing key '" + key + "'");
  return doc.at(key);
}

std::vector<std::string> ParseLabels(const json& doc, const std::string& key) {
  const json& node = Require(doc, key);
  if (!node.is_array() || node.empty()) {
    Fail(SpecError::Kind::kParse, "'" + key + "' must be a non-empty array");
  }
  std::vector<std::string> labels;
  for (const json& item : node) {
    if (item.is_string()) {
      labels.push_back(item.get<std::string>());
    } else if (item.is_number()) {
      labels.push_back(item.dump());
    } else {
      Fail(SpecError::Kind::kParse, "'" + key + "' entries must be strings");
    }
  }
  return labels;
}

double ParseNumber(const json& node, const std::string& path) {
  if (!node.is_number()) Fail(SpecError::Kind::kParse, path + " is not a number");
  return node.get<double>();
}

// Reads a rows x cols array of numbers.
Matrix ParseMatrix(const json& node, int rows, int cols,
                   const std::string& path) {
  if (!node.is_array()) Fail(SpecError::Kind::kParse, path + " is not an array");
  if (static_cast<int>(node.size()) != rows) {
    Fail(SpecError::Kind::kDimension, path + " has " +
                                          std::to_string(node.size()) +
                                          " rows, expected " +
                                          std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = node[i];
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!row.is_array()) Fail(SpecError::Kind::kParse, row_path + " is not an array");
    if (static_cast<int>(row.size()) != cols) {
      Fail(SpecError::Kind::kDimension, row_path + " has " +
                                            std::to_string(row.size()) +
                                            " entries, expected " +
                                            std::to_string(cols));
    }
    for (int j = 0; j < cols; ++j) {
      m(i, j) = ParseNumber(row[j], row_path + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

Belief ParseBelief(const json& node, int dim, const std::string& path) {
  if (!node.is_array()) Fail(SpecError::Kind::kParse, path + " is not an array");
  if (static_cast<int>(node.size()) != dim) {
    Fail(SpecError::Kind::kDimension, path + " has " +
                                          std::to_string(node.size()) +
                                          " entries, expected " +
                                          std::to_string(dim));
  }
  Belief p(dim);
  for (int i = 0; i < dim; ++i) {
    p(i) = ParseNumber(node[i], path + "[" + std::to_string(i) + "]");
  }
  const double sum = p.sum();
  if ((p.array() >= 0.0).all() && std::abs(sum - 1.0) <= kRenormalizeTolerance &&
      sum > 0.0) {
    p /= sum;
  }
  return p;
}

// Pulls element [i][j] out of a nested 4-level array, checking shape.
const json& Nested(const json& node, std::initializer_list<int> index,
                   std::initializer_list<int> dims, const std::string& path) {
  const json* cur = &node;
  std::string p = path;
  auto d = dims.begin();
  for (int i : index) {
    if (!cur->is_array()) Fail(SpecError::Kind::kParse, p + " is not an array");
    if (static_cast<int>(cur->size()) != *d) {
      Fail(SpecError::Kind::kDimension, p + " has " + std::to_string(cur->size()) +
                                            " entries, expected " +
                                            std::to_string(*d));
    }
    cur = &(*cur)[i];
    p += "[" + std::to_string(i) + "]";
    ++d;
  }
  return *cur;
}

void CheckDuplicates(const std::vector<std::string>& labels,
                     const std::string& field, std::vector<Violation>* out) {
  std::set<std::string> seen;
  for (const std::string& l : labels) {
    if (!seen.insert(l).second) {
      out->push_back({field, "duplicate label '" + l + "'"});
    }
  }
}

void CheckDiscount(double r, std::vector<Violation>* out) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    out->push_back({"discount", "discount must be positive, got " + FormatNumber(r)});
  }
}

void CheckFinite(const Matrix& m, const std::string& field,
                 std::vector<Violation>* out) {
  if (!m.allFinite()) out->push_back({field, "contains non-finite entries"});
}

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json VectorToJson(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

GameSpec ParseOneSided(const json& doc) {
  GameSpec spec;
  spec.states = ParseLabels(doc, "states");
  spec.actions1 = ParseLabels(doc, "actions1");
  spec.actions2 = ParseLabels(doc, "actions2");
  const int ns = spec.NumStates();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();

  const json& payoff = Require(doc, "payoff");
  if (!payoff.is_array()) Fail(SpecError::Kind::kParse, "payoff is not an array");
  if (static_cast<int>(payoff.size()) != ns) {
    Fail(SpecError::Kind::kDimension, "payoff has " + std::to_string(payoff.size()) +
                                          " state slices, expected " +
                                          std::to_string(ns));
  }
  for (int s = 0; s < ns; ++s) {
    spec.payoff.push_back(
        ParseMatrix(payoff[s], na, nb, "payoff[" + std::to_string(s) + "]"));
  }

  const json& rate = Require(doc, "rate");
  const std::string kind = Require(rate, "kind").get<std::string>();
  if (kind == "exogenous") {
    spec.rate.kind = RateKind::kExogenous;
    spec.rate.exogenous = ParseMatrix(Require(rate, "matrix"), ns, ns, "rate.matrix");
  } else if (kind == "endogenous") {
    spec.rate.kind = RateKind::kEndogenous;
    const json& tensor = Require(rate, "tensor");
    spec.rate.endogenous.assign(na, std::vector<Matrix>(nb, Matrix::Zero(ns, ns)));
    for (int s = 0; s < ns; ++s) {
      for (int t = 0; t < ns; ++t) {
        const json& block = Nested(tensor, {s, t}, {ns, ns}, "rate.tensor");
        const std::string path =
            "rate.tensor[" + std::to_string(s) + "][" + std::to_string(t) + "]";
        Matrix ab = ParseMatrix(block, na, nb, path);
        for (int a = 0; a < na; ++a) {
          for (int b = 0; b < nb; ++b) spec.rate.endogenous[a][b](s, t) = ab(a, b);
        }
      }
    }
  } else {
    Fail(SpecError::Kind::kParse, "rate.kind must be 'exogenous' or 'endogenous'");
  }
  spec.discount = ParseNumber(Require(doc, "discount"), "discount");
  spec.initial_belief = ParseBelief(Require(doc, "initial_belief"), ns, "initial_belief");
  return spec;
}

GameSpecTwoSided ParseTwoSided(const json& doc) {
  GameSpecTwoSided spec;
  spec.states1 = ParseLabels(doc, "states1");
  spec.states2 = ParseLabels(doc, "states2");
  spec.actions1 = ParseLabels(doc, "actions1");
  spec.actions2 = ParseLabels(doc, "actions2");
  const int n1 = spec.NumStates1();
  const int n2 = spec.NumStates2();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();

  const json& payoff = Require(doc, "payoff");
  spec.payoff.assign(n1, std::vector<Matrix>(n2));
  for (int s1 = 0; s1 < n1; ++s1) {
    for (int s2 = 0; s2 < n2; ++s2) {
      const json& block = Nested(payoff, {s1, s2}, {n1, n2}, "payoff");
      spec.payoff[s1][s2] = ParseMatrix(
          block, na, nb,
          "payoff[" + std::to_string(s1) + "][" + std::to_string(s2) + "]");
    }
  }
  // rate1[s][s'][a], rate2[s][s'][b].
  auto parse_controlled = [](const json& node, int ns, int nact,
                             const std::string& name) {
    std::vector<Matrix> out(nact, Matrix::Zero(ns, ns));
    for (int s = 0; s < ns; ++s) {
      for (int t = 0; t < ns; ++t) {
        const json& row = Nested(node, {s, t}, {ns, ns}, name);
        const std::string path =
            name + "[" + std::to_string(s) + "][" + std::to_string(t) + "]";
        if (!row.is_array()) Fail(SpecError::Kind::kParse, path + " is not an array");
        if (static_cast<int>(row.size()) != nact) {
          Fail(SpecError::Kind::kDimension,
               path + " has " + std::to_string(row.size()) +
                   " entries, expected " + std::to_string(nact));
        }
        for (int a = 0; a < nact; ++a) {
          out[a](s, t) = ParseNumber(row[a], path + "[" + std::to_string(a) + "]");
        }
      }
    }
    return out;
  };
  spec.rate1 = parse_controlled(Require(doc, "rate1"), n1, na, "rate1");
  spec.rate2 = parse_controlled(Require(doc, "rate2"), n2, nb, "rate2");
  spec.discount = ParseNumber(Require(doc, "discount"), "discount");
  spec.initial_belief1 =
      ParseBelief(Require(doc, "initial_belief1"), n1, "initial_belief1");
  spec.initial_belief2 =
      ParseBelief(Require(doc, "initial_belief2"), n2, "initial_belief2");
  return spec;
}

AbstractU ParseAbstract(const json& doc) {
  AbstractU spec;
  spec.states = ParseLabels(doc, "states");
  const int ns = spec.NumStates();
  const json& rate = Require(doc, "rate");
  if (Require(rate, "kind").get<std::string>() != "exogenous") {
    Fail(SpecError::Kind::kParse, "abstract-u specs require an exogenous rate");
  }
  spec.rate = ParseMatrix(Require(rate, "matrix"), ns, ns, "rate.matrix");
  spec.discount = ParseNumber(Require(doc, "discount"), "discount");
  spec.initial_belief = ParseBelief(Require(doc, "initial_belief"), ns, "initial_belief");
  const json& u = Require(doc, "u");
  const json& m = Require(u, "grid_resolution");
  if (!m.is_number_integer()) {
    Fail(SpecError::Kind::kParse, "u.grid_resolution must be an integer");
  }
  spec.grid_resolution = m.get<int>();
  const json& values = Require(u, "values");
  if (!values.is_array()) Fail(SpecError::Kind::kParse, "u.values is not an array");
  for (std::size_t i = 0; i < values.size(); ++i) {
    spec.values.push_back(ParseNumber(values[i], "u.values[" + std::to_string(i) + "]"));
  }
  return spec;
}

long long Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

bool RateData::ActionIndependent() const {
  if (kind == RateKind::kExogenous) return true;
  for (const auto& row : endogenous) {
    for (const Matrix& m : row) {
      if ((m - endogenous[0][0]).cwiseAbs().maxCoeff() != 0.0) return false;
    }
  }
  return true;
}

Matrix GameSpec::AverageGame(const Belief& p) const {
  Matrix out = Matrix::Zero(NumActions1(), NumActions2());
  for (int s = 0; s < NumStates(); ++s) out += p(s) * payoff[s];
  return out;
}

double GameSpec::MaxAbsPayoff() const {
  double m = 0.0;
  for (const Matrix& g : payoff) m = std::max(m, g.cwiseAbs().maxCoeff());
  return m;
}

Matrix GameSpecTwoSided::AverageGame(const Belief& p1, const Belief& p2) const {
  Matrix out = Matrix::Zero(NumActions1(), NumActions2());
  for (int s1 = 0; s1 < NumStates1(); ++s1) {
    for (int s2 = 0; s2 < NumStates2(); ++s2) {
      out += p1(s1) * p2(s2) * payoff[s1][s2];
    }
  }
  return out;
}

bool GameSpecTwoSided::RatesActionIndependent() const {
  for (const Matrix& m : rate1) {
    if ((m - rate1[0]).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  for (const Matrix& m : rate2) {
    if ((m - rate2[0]).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

void ValidateGenerator(const Matrix& r, const std::string& field,
                       std::vector<Violation>* out) {
  if (r.rows() != r.cols()) {
    out->push_back({field, "generator is not square"});
    return;
  }
  CheckFinite(r, field, out);
  for (int i = 0; i < r.rows(); ++i) {
    for (int j = 0; j < r.cols(); ++j) {
      if (i != j && r(i, j) < 0.0) {
        out->push_back({field, field + "[" + std::to_string(i) + "][" +
                                   std::to_string(j) + "] is negative (" +
                                   FormatNumber(r(i, j)) + ")"});
      }
    }
    const double row_sum = r.row(i).sum();
    if (std::abs(row_sum) > kRateTolerance) {
      out->push_back({field, field + " row " + std::to_string(i) + " sums to " +
                                 FormatNumber(row_sum)});
    }
  }
}

void ValidateBelief(const Belief& p, int dim, const std::string& field,
                    std::vector<Violation>* out) {
  if (p.size() != dim) {
    out->push_back({field, field + " has " + std::to_string(p.size()) +
                               " entries, expected " + std::to_string(dim)});
    return;
  }
  for (int i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0.0)) {
      out->push_back({field, field + "[" + std::to_string(i) + "] is negative (" +
                                 FormatNumber(p(i)) + ")"});
    }
  }
  const double sum = p.sum();
  if (!(std::abs(sum - 1.0) <= kBeliefTolerance)) {
    out->push_back({field, field + " sums to " + FormatNumber(sum)});
  }
}

std::vector<Violation> Validate(const GameSpec& spec) {
  std::vector<Violation> out;
  const int ns = spec.NumStates();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();
  if (ns < 1) out.push_back({"states", "at least one state required"});
  if (na < 1) out.push_back({"actions1", "at least one action required"});
  if (nb < 1) out.push_back({"actions2", "at least one action required"});
  CheckDuplicates(spec.states, "states", &out);
  CheckDuplicates(spec.actions1, "actions1", &out);
  CheckDuplicates(spec.actions2, "actions2", &out);
  if (static_cast<int>(spec.payoff.size()) != ns) {
    out.push_back({"payoff", "payoff has " + std::to_string(spec.payoff.size()) +
                                 " state slices, expected " + std::to_string(ns)});
  } else {
    for (int s = 0; s < ns; ++s) {
      const Matrix& g = spec.payoff[s];
      const std::string f = "payoff[" + std::to_string(s) + "]";
      if (g.rows() != na || g.cols() != nb) {
        out.push_back({f, f + " is " + std::to_string(g.rows()) + "x" +
                              std::to_string(g.cols()) + ", expected " +
                              std::to_string(na) + "x" + std::to_string(nb)});
      } else {
        CheckFinite(g, f, &out);
      }
    }
  }
  if (spec.rate.kind == RateKind::kExogenous) {
    if (spec.rate.exogenous.rows() != ns || spec.rate.exogenous.cols() != ns) {
      out.push_back({"rate", "rate matrix must be " + std::to_string(ns) + "x" +
                                 std::to_string(ns)});
    } else {
      ValidateGenerator(spec.rate.exogenous, "rate", &out);
    }
  } else {
    if (static_cast<int>(spec.rate.endogenous.size()) != na) {
      out.push_back({"rate", "endogenous rate must have one block per action of player 1"});
    } else {
      for (int a = 0; a < na; ++a) {
        if (static_cast<int>(spec.rate.endogenous[a].size()) != nb) {
          out.push_back({"rate", "endogenous rate must have one block per action of player 2"});
          continue;
        }
        for (int b = 0; b < nb; ++b) {
          const Matrix& r = spec.rate.endogenous[a][b];
          const std::string f =
              "rate(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
          if (r.rows() != ns || r.cols() != ns) {
            out.push_back({f, f + " must be " + std::to_string(ns) + "x" +
                                  std::to_string(ns)});
          } else {
            ValidateGenerator(r, f, &out);
          }
        }
      }
    }
  }
  CheckDiscount(spec.discount, &out);
  ValidateBelief(spec.initial_belief, ns, "initial_belief", &out);
  return out;
}

std::vector<Violation> Validate(const GameSpecTwoSided& spec) {
  std::vector<Violation> out;
  const int n1 = spec.NumStates1();
  const int n2 = spec.NumStates2();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();
  if (n1 < 1) out.push_back({"states1", "at least one state required"});
  if (n2 < 1) out.push_back({"states2", "at least one state required"});
  if (na < 1) out.push_back({"actions1", "at least one action required"});
  if (nb < 1) out.push_back({"actions2", "at least one action required"});
  CheckDuplicates(spec.states1, "states1", &out);
  CheckDuplicates(spec.states2, "states2", &out);
  CheckDuplicates(spec.actions1, "actions1", &out);
  CheckDuplicates(spec.actions2, "actions2", &out);
  bool shape_ok = static_cast<int>(spec.payoff.size()) == n1;
  for (const auto& row : spec.payoff) {
    shape_ok = shape_ok && static_cast<int>(row.size()) == n2;
    for (const Matrix& g : row) {
      shape_ok = shape_ok && g.rows() == na && g.cols() == nb;
    }
  }
  if (!shape_ok) {
    out.push_back({"payoff", "payoff must be " + std::to_string(n1) + "x" +
                                 std::to_string(n2) + "x" + std::to_string(na) +
                                 "x" + std::to_string(nb)});
  }
  auto check_controlled = [&](const std::vector<Matrix>& rates, int ns, int nact,
                              const std::string& name) {
    if (static_cast<int>(rates.size()) != nact) {
      out.push_back({name, name + " must have one generator per action"});
      return;
    }
    for (int a = 0; a < nact; ++a) {
      const std::string f = name + "(" + std::to_string(a) + ")";
      if (rates[a].rows() != ns || rates[a].cols() != ns) {
        out.push_back({f, f + " must be " + std::to_string(ns) + "x" + std::to_string(ns)});
      } else {
        ValidateGenerator(rates[a], f, &out);
      }
    }
  };
  check_controlled(spec.rate1, n1, na, "rate1");
  check_controlled(spec.rate2, n2, nb, "rate2");
  CheckDiscount(spec.discount, &out);
  ValidateBelief(spec.initial_belief1, n1, "initial_belief1", &out);
  ValidateBelief(spec.initial_belief2, n2, "initial_belief2", &out);
  return out;
}

std::vector<Violation> Validate(const AbstractU& spec) {
  std::vector<Violation> out;
  const int ns = spec.NumStates();
  if (ns < 1) out.push_back({"states", "at least one state required"});
  CheckDuplicates(spec.states, "states", &out);
  if (spec.rate.rows() != ns || spec.rate.cols() != ns) {
    out.push_back({"rate", "rate matrix must be " + std::to_string(ns) + "x" +
                               std::to_string(ns)});
  } else {
    ValidateGenerator(spec.rate, "rate", &out);
  }
  CheckDiscount(spec.discount, &out);
  ValidateBelief(spec.initial_belief, ns, "initial_belief", &out);
  if (spec.grid_resolution < 1) {
    out.push_back({"u.grid_resolution", "grid resolution must be >= 1"});
  } else if (ns >= 1) {
    const long long expected = Binomial(spec.grid_resolution + ns - 1, ns - 1);
    if (static_cast<long long>(spec.values.size()) != expected) {
      out.push_back({"u.values", "u.values has " + std::to_string(spec.values.size()) +
                                     " entries, expected " + std::to_string(expected)});
    }
  }
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    if (!std::isfinite(spec.values[i])) {
      out.push_back({"u.values", "u.values[" + std::to_string(i) + "] is not finite"});
    }
  }
  return out;
}

std::vector<Violation> Validate(const AnySpec& spec) {
  return std::visit([](const auto& s) { return Validate(s); }, spec);
}

AnySpec ParseSpec(const nlohmann::json& doc) {
  if (!doc.is_object()) Fail(SpecError::Kind::kParse, "spec document must be a JSON object");
  AnySpec spec;
  if (doc.contains("u")) {
    spec = ParseAbstract(doc);
  } else if (doc.contains("states1")) {
    spec = ParseTwoSided(doc);
  } else {
    spec = ParseOneSided(doc);
  }
  std::vector<Violation> violations = Validate(spec);
  if (!violations.empty()) {
    throw SpecError(SpecError::Kind::kValidation,
                    "spec validation failed:\n" + FormatViolations(violations),
                    violations);
  }
  return spec;
}

AnySpec LoadSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(SpecError::Kind::kIo, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    Fail(SpecError::Kind::kParse, path.string() + ": " + e.what());
  }
  try {
    return ParseSpec(doc);
  } catch (const json::exception& e) {
    Fail(SpecError::Kind::kParse, path.string() + ": " + e.what());
  }
}

nlohmann::json ToJson(const AnySpec& any) {
  json doc;
  if (const auto* spec = std::get_if<GameSpec>(&any)) {
    doc["states"] = spec->states;
    doc["actions1"] = spec->actions1;
    doc["actions2"] = spec->actions2;
    json payoff = json::array();
    for (const Matrix& g : spec->payoff) payoff.push_back(MatrixToJson(g));
    doc["payoff"] = payoff;
    if (spec->rate.kind == RateKind::kExogenous) {
      doc["rate"] = {{"kind", "exogenous"}, {"matrix", MatrixToJson(spec->rate.exogenous)}};
    } else {
      const int ns = spec->NumStates();
      json tensor = json::array();
      for (int s = 0; s < ns; ++s) {
        json row = json::array();
        for (int t = 0; t < ns; ++t) {
          Matrix ab(spec->NumActions1(), spec->NumActions2());
          for (int a = 0; a < ab.rows(); ++a) {
            for (int b = 0; b < ab.cols(); ++b) ab(a, b) = spec->rate.endogenous[a][b](s, t);
          }
          row.push_back(MatrixToJson(ab));
        }
        tensor.push_back(row);
      }
      doc["rate"] = {{"kind", "endogenous"}, {"tensor", tensor}};
    }
    doc["discount"] = spec->discount;
    doc["initial_belief"] = VectorToJson(spec->initial_belief);
  } else if (const auto* spec = std::get_if<GameSpecTwoSided>(&any)) {
    doc["states1"] = spec->states1;
    doc["states2"] = spec->states2;
    doc["actions1"] = spec->actions1;
    doc["actions2"] = spec->actions2;
    json payoff = json::array();
    for (const auto& row : spec->payoff) {
      json inner = json::array();
      for (const Matrix& g : row) inner.push_back(MatrixToJson(g));
      payoff.push_back(inner);
    }
    doc["payoff"] = payoff;
    auto controlled = [](const std::vector<Matrix>& rates) {
      const int ns = static_cast<int>(rates[0].rows());
      json out = json::array();
      for (int s = 0; s < ns; ++s) {
        json row = json::array();
        for (int t = 0; t < ns; ++t) {
          json per_action = json::array();
          for (const Matrix& r : rates) per_action.push_back(r(s, t));
          row.push_back(per_action);
        }
        out.push_back(row);
      }
      return out;
    };
    doc["rate1"] = controlled(spec->rate1);
    doc["rate2"] = controlled(spec->rate2);
    doc["discount"] = spec->discount;
    doc["initial_belief1"] = VectorToJson(spec->initial_belief1);
    doc["initial_belief2"] = VectorToJson(spec->initial_belief2);
  } else {
    const auto& abstract = std::get<AbstractU>(any);
    doc["states"] = abstract.states;
    doc["rate"] = {{"kind", "exogenous"}, {"matrix", MatrixToJson(abstract.rate)}};
    doc["discount"] = abstract.discount;
    doc["initial_belief"] = VectorToJson(abstract.initial_belief);
    doc["u"] = {{"grid_resolution", abstract.grid_resolution}, {"values", abstract.values}};
  }
  return doc;
}

void SaveSpec(const std::filesystem::path& path, const AnySpec& spec) {
  std::ofstream out(path);
  if (!out) Fail(SpecError::Kind::kIo, "cannot write " + path.string());
  out << ToJson(spec).dump(2) << "\n";
}

std::string FormatViolations(const std::vector<Violation>& violations) {
  std::string out;
  for (const Violation& v : violations) out += "  " + v.field + ": " + v.message + "\n";
  return out;
}

std::uint64_t Fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace asymgame
