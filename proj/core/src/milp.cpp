#include "railplan/milp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "highs_backend.hpp"

namespace railplan::milp {

int ModelSpec::addVariable(Variable v) {
  if (v.name.empty()) v.name = "v" + std::to_string(vars_.size());
  if (byName_.count(v.name)) throw std::invalid_argument("duplicate variable name '" + v.name + "'");
  int id = static_cast<int>(vars_.size());
  byName_.emplace(v.name, id);
  vars_.push_back(std::move(v));
  return id;
}

int ModelSpec::addConstraint(Constraint c) {
  if (c.name.empty()) c.name = "r" + std::to_string(rows_.size());
  rows_.push_back(std::move(c));
  return static_cast<int>(rows_.size()) - 1;
}

int ModelSpec::findVariable(std::string_view name) const {
  auto it = byName_.find(std::string(name));
  return it == byName_.end() ? -1 : it->second;
}

bool ModelSpec::hasIntegers() const {
  for (const auto& v : vars_)
    if (v.integer) return true;
  return false;
}

void ModelSpec::validate() const {
  for (const auto& v : vars_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || std::isnan(v.objective))
      throw std::invalid_argument("variable '" + v.name + "' has a NaN attribute");
    if (v.lower > v.upper) throw std::invalid_argument("variable '" + v.name + "' has lower > upper");
    if (v.lower == kInf || v.upper == -kInf) throw std::invalid_argument("variable '" + v.name + "' has an empty domain");
  }
  std::set<std::string> names;
  for (const auto& r : rows_) {
    if (!names.insert(r.name).second) throw std::invalid_argument("duplicate constraint name '" + r.name + "'");
    if (!std::isfinite(r.rhs)) throw std::invalid_argument("constraint '" + r.name + "' has a non-finite rhs");
    for (const Term& t : r.terms) {
      if (t.var < 0 || t.var >= numVariables())
        throw std::invalid_argument("constraint '" + r.name + "' references an unknown variable");
      if (!std::isfinite(t.coef)) throw std::invalid_argument("constraint '" + r.name + "' has a non-finite coefficient");
    }
  }
}

double ModelSpec::objectiveValue(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) s += vars_[j].objective * x[j];
  return s;
}

double ModelSpec::rowActivity(int row, std::span<const double> x) const {
  double s = 0.0;
  for (const Term& t : rows_.at(row).terms) s += t.coef * x[t.var];
  return s;
}

double ModelSpec::maxViolation(std::span<const double> x) const {
  if (x.size() != vars_.size()) return kInf;
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max(worst, vars_[j].lower - x[j]);
    worst = std::max(worst, x[j] - vars_[j].upper);
  }
  for (int i = 0; i < numConstraints(); ++i) {
    double a = rowActivity(i, x);
    const Constraint& r = rows_[i];
    if (r.sense != Sense::GreaterEqual) worst = std::max(worst, a - r.rhs);
    if (r.sense != Sense::LessEqual) worst = std::max(worst, r.rhs - a);
  }
  return worst;
}

double ModelSpec::maxIntegralityError(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size() && j < x.size(); ++j)
    if (vars_[j].integer) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  return worst;
}

ModelSpec fixVariables(const ModelSpec& m, std::span<const std::pair<int, double>> assignments) {
  ModelSpec out = m;
  for (auto [id, value] : assignments) {
    if (id < 0 || id >= out.numVariables()) throw std::invalid_argument("fix references unknown variable id");
    Variable& v = out.mutableVariable(id);
    const double tol = kFeasibilityTolerance;
    if (!(value >= v.lower - tol && value <= v.upper + tol))
      throw std::invalid_argument("fixed value out of bounds for variable '" + v.name + "'");
    v.lower = v.upper = value;
  }
  return out;
}

ModelSpec setIntegrality(const ModelSpec& m, std::span<const int> ids, bool integral) {
  ModelSpec out = m;
  for (int id : ids) {
    if (id < 0 || id >= out.numVariables()) throw std::invalid_argument("integrality references unknown variable id");
    out.mutableVariable(id).integer = integral;
  }
  return out;
}

ModelSpec relaxAll(const ModelSpec& m) {
  ModelSpec out = m;
  for (int j = 0; j < out.numVariables(); ++j) out.mutableVariable(j).integer = false;
  return out;
}

const char* toString(VarKind k) {
  switch (k) {
    case VarKind::ExtraService: return "s";
    case VarKind::BlockSelect: return "y";
    case VarKind::BlockFlow: return "z";
    case VarKind::Unmet: return "zk";
    case VarKind::LoadedCars: return "x";
    case VarKind::EmptyCars: return "w";
    case VarKind::Allocation: return "wa";
    case VarKind::PoolInventory: return "wp";
    case VarKind::SinglePlatform: return "n1";
    case VarKind::PairPlatform: return "n2";
  }
  return "?";
}

std::size_t VarKeyHash::operator()(const VarKey& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.kind) * 0x9E3779B97F4A7C15ULL;
  for (int v : k.idx) h = (h ^ static_cast<std::size_t>(v + 1)) * 0x100000001B3ULL;
  return h;
}

void VariableRegistry::add(const VarKey& key, int column) {
  if (column != static_cast<int>(keys_.size())) throw std::logic_error("registry columns must be added in order");
  if (!map_.emplace(key, column).second) throw std::logic_error("duplicate registry key");
  keys_.push_back(key);
}

std::optional<int> VariableRegistry::find(const VarKey& key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

int VariableRegistry::at(const VarKey& key) const {
  auto c = find(key);
  if (!c) throw std::out_of_range(std::string("no column for variable kind ") + toString(key.kind));
  return *c;
}

std::vector<int> VariableRegistry::columnsOf(VarKind kind) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < keys_.size(); ++j)
    if (keys_[j].kind == kind) out.push_back(static_cast<int>(j));
  return out;
}

std::size_t VariableRegistry::count(VarKind kind) const {
  std::size_t n = 0;
  for (const auto& k : keys_) n += k.kind == kind;
  return n;
}

const char* toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleAtLimit: return "feasibleAtLimit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Error: return "error";
  }
  return "?";
}

namespace {
nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}
}  // namespace

std::string solveLogJson(const SolveResult& r) {
  nlohmann::ordered_json o;
  o["status"] = toString(r.status);
  o["objective"] = num(r.objective);
  o["bound"] = num(r.bound);
  o["gap"] = num(r.gap);
  o["wallTime"] = r.wallTime;
  o["warmStartUsed"] = r.warmStartUsed;
  o["message"] = r.message;
  o["timeline"] = nlohmann::ordered_json::array();
  for (const auto& s : r.timeline) o["timeline"].push_back({{"time", s.time}, {"primal", num(s.primal)}, {"dual", num(s.dual)}});
  return o.dump();
}

std::vector<std::string> availableBackends() { return {"highs"}; }

std::unique_ptr<SolverBackend> makeBackend(std::string_view name) {
  std::string n(name);
  if (n.empty()) {
    const char* env = std::getenv("RAILPLAN_SOLVER");
    n = env && *env ? env : "highs";
  }
  if (n == "highs") return makeHighsBackend();
  throw std::invalid_argument("unknown solver backend '" + n + "'");
}

// LP format

namespace {

std::string fmt(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void writeExpr(std::ostringstream& os, const std::vector<Term>& terms, const ModelSpec& m) {
  int n = 0;
  for (const Term& t : terms) {
    if (n > 0 && n % 6 == 0) os << "\n   ";
    os << (t.coef < 0 || std::signbit(t.coef) ? " - " : " + ") << fmt(std::abs(t.coef)) << " " << m.variable(t.var).name;
    ++n;
  }
}

}  // namespace

std::string toLpFormat(const ModelSpec& m) {
  std::ostringstream os;
  os << "\\ " << m.name << "\n";
  os << "Minimize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < m.numVariables(); ++j) obj.push_back({j, m.variable(j).objective});
  writeExpr(os, obj, m);
  os << "\nSubject To\n";
  for (const auto& r : m.constraints()) {
    os << " " << r.name << ":";
    if (r.terms.empty()) os << " 0 " << (m.numVariables() ? m.variable(0).name : "x");
    writeExpr(os, r.terms, m);
    os << (r.sense == Sense::LessEqual ? " <= " : r.sense == Sense::Equal ? " = " : " >= ") << fmt(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : m.variables()) {
    if (v.lower == v.upper) os << " " << v.name << " = " << fmt(v.lower) << "\n";
    else if (v.lower == -kInf && v.upper == kInf) os << " " << v.name << " free\n";
    else os << " " << fmt(v.lower) << " <= " << v.name << " <= " << fmt(v.upper) << "\n";
  }
  bool any = false;
  for (const auto& v : m.variables())
    if (v.integer) {
      if (!any) os << "General\n";
      any = true;
      os << " " << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

namespace {

enum class Tok { Ident, Number, Colon, Op, Sign, End };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 0;
};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || std::string_view("_!\"#$%&()/,;?@`'{}|~").find(c) != std::string_view::npos; }
bool identChar(char c) { return identStart(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '[' || c == ']'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '\\') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == ':') {
      out.push_back({Tok::Colon, ":", 0, line});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++i;
      if (i < s.size() && (s[i] == '=' || s[i] == '<' || s[i] == '>')) op += s[i++];
      if (op == "=<" || op == "<") op = "<=";
      if (op == "=>" || op == ">") op = ">=";
      out.push_back({Tok::Op, op, 0, line});
    } else if (c == '+' || c == '-') {
      out.push_back({Tok::Sign, std::string(1, c), 0, line});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      std::string t(s.substr(i, j - i));
      out.push_back({Tok::Number, t, std::strtod(t.c_str(), nullptr), line});
      i = j;
    } else if (identStart(c)) {
      std::size_t j = i;
      while (j < s.size() && identChar(s[j])) ++j;
      std::string t(s.substr(i, j - i));
      std::string low;
      for (char ch : t) low += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (low == "inf" || low == "infinity") out.push_back({Tok::Number, t, kInf, line});
      else out.push_back({Tok::Ident, t, 0, line});
      i = j;
    } else {
      throw std::invalid_argument("LP parse error at line " + std::to_string(line) + ": unexpected character");
    }
  }
  out.push_back({Tok::End, "", 0, line});
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class Section { None, Objective, Constraints, Bounds, General, Binary, End };

class LpParser {
 public:
  explicit LpParser(std::string_view text) : toks_(lex(text)) {}

  ModelSpec parse() {
    Section sec = Section::None;
    bool maximize = false;
    while (peek().kind != Tok::End) {
      if (auto s = sectionAt(); s) {
        sec = *s;
        if (sec == Section::End) break;
        if (sec == Section::Objective) {
          maximize = lastMax_;
          parseObjective(maximize);
        }
        continue;
      }
      switch (sec) {
        case Section::Constraints: parseConstraint(); break;
        case Section::Bounds: parseBound(); break;
        case Section::General:
        case Section::Binary: {
          const Token& t = next();
          if (t.kind != Tok::Ident) fail(t, "expected a variable name");
          int v = var(t.text);
          m_.mutableVariable(v).integer = true;
          if (sec == Section::Binary) {
            m_.mutableVariable(v).lower = 0;
            m_.mutableVariable(v).upper = 1;
          }
          break;
        }
        default: fail(peek(), "content outside of a section");
      }
    }
    for (auto& r : pendingRows_) m_.addConstraint(std::move(r));
    return m_;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ModelSpec m_;
  std::vector<Constraint> pendingRows_;
  bool lastMax_ = false;

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw std::invalid_argument("LP parse error at line " + std::to_string(t.line) + ": " + msg);
  }

  int var(const std::string& name) {
    int v = m_.findVariable(name);
    if (v >= 0) return v;
    return m_.addVariable({name, 0.0, kInf, false, 0.0});
  }

  std::optional<Section> sectionAt() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return std::nullopt;
    std::string w = lower(t.text);
    auto take = [&](std::size_t n, Section s) {
      pos_ += n;
      return std::optional<Section>(s);
    };
    if (peek(1).kind == Tok::Colon) return std::nullopt;
    if (w == "minimize" || w == "minimum" || w == "min") {
      lastMax_ = false;
      return take(1, Section::Objective);
    }
    if (w == "maximize" || w == "maximum" || w == "max") {
      lastMax_ = true;
      return take(1, Section::Objective);
    }
    if (w == "subject" && peek(1).kind == Tok::Ident && lower(peek(1).text) == "to") return take(2, Section::Constraints);
    if (w == "such" && peek(1).kind == Tok::Ident && lower(peek(1).text) == "that") return take(2, Section::Constraints);
    if (w == "st" || w == "s.t.") return take(1, Section::Constraints);
    if (w == "bounds" || w == "bound") return take(1, Section::Bounds);
    if (w == "general" || w == "generals" || w == "gen") return take(1, Section::General);
    if (w == "binary" || w == "binaries" || w == "bin") return take(1, Section::Binary);
    if (w == "end") return take(1, Section::End);
    return std::nullopt;
  }

  // Linear expression; constants accumulate into `constant`.
  std::vector<Term> parseExpr(double& constant) {
    std::vector<Term> terms;
    constant = 0.0;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::Op || t.kind == Tok::End) break;
      if (t.kind == Tok::Ident && (peek(1).kind == Tok::Colon || isSectionWord(t))) break;
      double sign = 1.0;
      bool any = false;
      while (peek().kind == Tok::Sign) {
        if (next().text == "-") sign = -sign;
        any = true;
      }
      double coef = 1.0;
      bool hasNum = false;
      if (peek().kind == Tok::Number) {
        coef = next().value;
        hasNum = true;
      }
      if (peek().kind == Tok::Ident && !(peek(1).kind == Tok::Colon) && !isSectionWord(peek())) {
        terms.push_back({var(next().text), sign * coef});
      } else if (hasNum) {
        constant += sign * coef;
      } else if (any) {
        fail(peek(), "dangling sign");
      } else {
        break;
      }
    }
    return terms;
  }

  bool isSectionWord(const Token& t) const {
    std::string w = lower(t.text);
    return w == "subject" || w == "such" || w == "st" || w == "s.t." || w == "bounds" || w == "bound" ||
           w == "general" || w == "generals" || w == "gen" || w == "binary" || w == "binaries" || w == "bin" ||
           w == "end" || w == "minimize" || w == "maximize" || w == "min" || w == "max";
  }

  void parseObjective(bool maximize) {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) pos_ += 2;
    double c = 0.0;
    auto terms = parseExpr(c);
    for (const Term& t : terms) m_.mutableVariable(t.var).objective += maximize ? -t.coef : t.coef;
  }

  void parseConstraint() {
    Constraint r;
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
      r.name = next().text;
      next();
    } else {
      r.name = "r" + std::to_string(pendingRows_.size());
    }
    double c = 0.0;
    auto terms = parseExpr(c);
    const Token& op = next();
    if (op.kind != Tok::Op) fail(op, "expected a comparison operator");
    r.sense = op.text == "<=" ? Sense::LessEqual : op.text == ">=" ? Sense::GreaterEqual : Sense::Equal;
    double sign = 1.0;
    while (peek().kind == Tok::Sign)
      if (next().text == "-") sign = -sign;
    const Token& rhs = next();
    if (rhs.kind != Tok::Number) fail(rhs, "expected a numeric right-hand side");
    r.rhs = sign * rhs.value - c;
    // merge duplicate variables
    std::vector<Term> merged;
    for (const Term& t : terms) {
      bool found = false;
      for (Term& u : merged)
        if (u.var == t.var) {
          u.coef += t.coef;
          found = true;
        }
      if (!found) merged.push_back(t);
    }
    r.terms = std::move(merged);
    pendingRows_.push_back(std::move(r));
  }

  double number() {
    double sign = 1.0;
    while (peek().kind == Tok::Sign)
      if (next().text == "-") sign = -sign;
    const Token& t = next();
    if (t.kind != Tok::Number) fail(t, "expected a number");
    return sign * t.value;
  }

  void parseBound() {
    bool leadingNumber = peek().kind == Tok::Number || peek().kind == Tok::Sign;
    if (leadingNumber) {
      double lo = number();
      const Token& op = next();
      if (op.kind != Tok::Op) fail(op, "expected a comparison in bounds");
      const Token& name = next();
      if (name.kind != Tok::Ident) fail(name, "expected a variable in bounds");
      Variable& v = m_.mutableVariable(var(name.text));
      if (op.text == "<=") v.lower = lo;
      else if (op.text == ">=") v.upper = lo;
      else v.lower = v.upper = lo;
      if (peek().kind == Tok::Op) {
        const Token& op2 = next();
        double hi = number();
        if (op2.text == "<=") v.upper = hi;
        else if (op2.text == ">=") v.lower = hi;
        else fail(op2, "unexpected '=' in a double bound");
      }
      return;
    }
    const Token& name = next();
    if (name.kind != Tok::Ident) fail(name, "expected a variable in bounds");
    Variable& v = m_.mutableVariable(var(name.text));
    if (peek().kind == Tok::Ident && lower(peek().text) == "free") {
      next();
      v.lower = -kInf;
      v.upper = kInf;
      return;
    }
    const Token& op = next();
    if (op.kind != Tok::Op) fail(op, "expected a comparison in bounds");
    double val = number();
    if (op.text == "<=") v.upper = val;
    else if (op.text == ">=") v.lower = val;
    else v.lower = v.upper = val;
  }
};

}  // namespace

ModelSpec parseLpFormat(std::string_view text) {
  LpParser p(text);
  ModelSpec m = p.parse();
  m.validate();
  return m;
}

}  // namespace railplan::milp
