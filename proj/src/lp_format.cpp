#include "ats/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "ats/errors.hpp"

namespace ats {

namespace {

constexpr double kInfThreshold = 1e30;  // values at or beyond read as infinity

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool name_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '!': case '"': case '#': case '$': case '%': case '&': case '(':
    case ')': case ',': case '.': case ';': case '?': case '@': case '_':
    case '\'': case '`': case '{': case '}': case '|': case '~':
      return true;
    default:
      return false;
  }
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool reserved_word(const std::string& lowered) {
  return lowered == "subject" || lowered == "such" || lowered == "st" || lowered == "s.t." ||
         lowered == "bounds" || lowered == "bound" || lowered == "general" ||
         lowered == "generals" || lowered == "gen" || lowered == "binary" ||
         lowered == "binaries" || lowered == "bin" || lowered == "end" || lowered == "free" ||
         lowered == "inf" || lowered == "infinity" || lowered == "minimize" ||
         lowered == "maximize" || lowered == "min" || lowered == "max";
}

void check_name(const std::string& name, const char* what) {
  if (name.empty()) throw InvalidConfig(std::string(what) + " name is empty");
  if (std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.')
    throw InvalidConfig(std::string(what) + " name '" + name + "' starts with a digit or '.'");
  for (char c : name)
    if (!name_char(c))
      throw InvalidConfig(std::string(what) + " name '" + name +
                          "' contains a character not allowed in LP files");
  if (reserved_word(lower(name)))
    throw InvalidConfig(std::string(what) + " name '" + name + "' is an LP keyword");
}

// --- parsing -----------------------------------------------------------

struct Token {
  enum Type { Num, Name, Plus, Minus, Le, Ge, Eq, Colon } type;
  double num = 0.0;
  std::string text;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string& message) {
  throw ParseError("LP parse error at line " + std::to_string(line) + ": " + message);
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (c == '\n') { ++line; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '\\') {  // comment to end of line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '+') { out.push_back({Token::Plus, 0, "", line}); ++i; continue; }
    if (c == '-') { out.push_back({Token::Minus, 0, "", line}); ++i; continue; }
    if (c == ':') { out.push_back({Token::Colon, 0, "", line}); ++i; continue; }
    if (c == '<' || c == '>' || c == '=') {
      char kind = c;
      ++i;
      if (i < n && (text[i] == '=' || ((text[i] == '<' || text[i] == '>') && c == '='))) {
        if (c == '=') kind = text[i];
        ++i;
      }
      out.push_back({kind == '<' ? Token::Le : kind == '>' ? Token::Ge : Token::Eq, 0, "", line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t j = i;
      while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
          ++k;
          while (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      const std::string s = text.substr(i, j - i);
      char* endp = nullptr;
      const double v = std::strtod(s.c_str(), &endp);
      if (endp != s.c_str() + s.size()) fail(line, "bad number '" + s + "'");
      out.push_back({Token::Num, v, s, line});
      i = j;
      continue;
    }
    if (name_char(c)) {
      size_t j = i;
      while (j < n && name_char(text[j])) ++j;
      out.push_back({Token::Name, 0, text.substr(i, j - i), line});
      i = j;
      continue;
    }
    fail(line, std::string("unexpected character '") + c + "'");
  }
  return out;
}

enum class Section { SubjectTo, Bounds, Generals, Binaries, End };

class Parser {
 public:
  explicit Parser(const std::string& text) : t_(tokenize(text)) {}

  ModelInstance run() {
    parse_objective();
    bool done = false;
    while (!done) {
      Section s;
      if (!match_section(&s)) {
        if (pos_ >= t_.size()) break;  // tolerate a missing End
        fail(t_[pos_].line, "expected a section keyword");
      }
      switch (s) {
        case Section::SubjectTo: parse_constraints(); break;
        case Section::Bounds:    parse_bounds(); break;
        case Section::Generals:  parse_integrality(false); break;
        case Section::Binaries:  parse_integrality(true); break;
        case Section::End:       done = true; break;
      }
    }
    for (int v : binaries_) {
      Variable& var = model_.variable(v);
      var.integral = true;
      var.lower = std::max(var.lower, 0.0);
      var.upper = std::min(var.upper, 1.0);
    }
    model_.validate();
    return std::move(model_);
  }

 private:
  struct Expr {
    std::vector<LinearTerm> terms;
    double constant = 0.0;
  };

  bool at(Token::Type type) const { return pos_ < t_.size() && t_[pos_].type == type; }
  const Token& tok() const {
    if (pos_ >= t_.size()) throw ParseError("LP parse error: unexpected end of input");
    return t_[pos_];
  }

  // Recognizes a section keyword at the current position without consuming it
  // unless it matches. Keywords are reserved words and never variable names.
  bool match_section(Section* out) {
    if (!at(Token::Name)) return false;
    const std::string w = lower(t_[pos_].text);
    if (w == "subject" || w == "such") {
      if (pos_ + 1 < t_.size() && t_[pos_ + 1].type == Token::Name) {
        const std::string w2 = lower(t_[pos_ + 1].text);
        if ((w == "subject" && w2 == "to") || (w == "such" && w2 == "that")) {
          pos_ += 2;
          *out = Section::SubjectTo;
          return true;
        }
      }
      return false;
    }
    if (w == "st" || w == "s.t.") { ++pos_; *out = Section::SubjectTo; return true; }
    if (w == "bounds" || w == "bound") { ++pos_; *out = Section::Bounds; return true; }
    if (w == "general" || w == "generals" || w == "gen") {
      ++pos_; *out = Section::Generals; return true;
    }
    if (w == "binary" || w == "binaries" || w == "bin") {
      ++pos_; *out = Section::Binaries; return true;
    }
    if (w == "end") { ++pos_; *out = Section::End; return true; }
    return false;
  }

  bool peek_section() {
    const size_t save = pos_;
    Section s;
    const bool hit = match_section(&s);
    pos_ = save;
    return hit;
  }

  int var_id(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int id = model_.add_variable(name, 0.0, kInfinity, false);
    index_.emplace(name, id);
    return id;
  }

  bool infinity_name() const {
    if (!at(Token::Name)) return false;
    const std::string w = lower(t_[pos_].text);
    return w == "inf" || w == "infinity";
  }

  // [+|-] (number | inf): bound values and right-hand sides.
  double signed_value() {
    double sign = 1.0;
    while (at(Token::Plus) || at(Token::Minus)) {
      if (t_[pos_].type == Token::Minus) sign = -sign;
      ++pos_;
    }
    if (at(Token::Num)) {
      double v = t_[pos_].num;
      if (v >= kInfThreshold) v = kInfinity;
      ++pos_;
      return sign * v;
    }
    if (infinity_name()) {
      ++pos_;
      return sign * kInfinity;
    }
    fail(tok().line, "expected a number");
  }

  // Linear expression: signed terms with optional coefficients; loose numbers
  // accumulate into `constant`. Stops at a sense token or section keyword.
  Expr parse_expr() {
    Expr e;
    while (true) {
      if (pos_ >= t_.size() || at(Token::Le) || at(Token::Ge) || at(Token::Eq) || peek_section())
        break;
      double sign = 1.0;
      while (at(Token::Plus) || at(Token::Minus)) {
        if (t_[pos_].type == Token::Minus) sign = -sign;
        ++pos_;
      }
      if (at(Token::Num)) {
        const double coeff = sign * t_[pos_].num;
        ++pos_;
        if (at(Token::Name) && !peek_section()) {
          if (infinity_name()) fail(tok().line, "'" + tok().text + "' is reserved");
          e.terms.push_back({var_id(tok().text), coeff});
          ++pos_;
        } else {
          e.constant += coeff;
        }
      } else if (at(Token::Name)) {
        if (peek_section()) fail(tok().line, "dangling sign before section keyword");
        if (infinity_name()) fail(tok().line, "'" + tok().text + "' is reserved");
        e.terms.push_back({var_id(tok().text), sign});
        ++pos_;
      } else {
        fail(tok().line, "expected a term");
      }
    }
    return e;
  }

  void parse_objective() {
    if (!at(Token::Name)) throw ParseError("LP parse error: file must start with Minimize/Maximize");
    const std::string w = lower(t_[pos_].text);
    if (w == "minimize" || w == "min" || w == "minimum") model_.set_minimize(true);
    else if (w == "maximize" || w == "max" || w == "maximum") model_.set_minimize(false);
    else fail(t_[pos_].line, "file must start with Minimize/Maximize");
    ++pos_;
    if (at(Token::Name) && pos_ + 1 < t_.size() && t_[pos_ + 1].type == Token::Colon) pos_ += 2;
    const Expr e = parse_expr();
    if (e.constant != 0.0)
      throw ParseError("LP parse error: constant objective offsets are not supported");
    for (const LinearTerm& t : e.terms) model_.add_objective_coeff(t.var, t.coeff);
  }

  void parse_constraints() {
    while (pos_ < t_.size() && !peek_section()) {
      std::string label;
      if (at(Token::Name) && pos_ + 1 < t_.size() && t_[pos_ + 1].type == Token::Colon) {
        label = t_[pos_].text;
        pos_ += 2;
      } else {
        label = "c" + std::to_string(model_.constraint_count());
      }
      const int line = tok().line;
      const Expr e = parse_expr();
      Sense sense;
      if (at(Token::Le)) sense = Sense::LessEqual;
      else if (at(Token::Ge)) sense = Sense::GreaterEqual;
      else if (at(Token::Eq)) sense = Sense::Equal;
      else fail(line, "constraint '" + label + "' is missing <=, =, or >=");
      ++pos_;
      const double rhs = signed_value() - e.constant;
      if (!std::isfinite(rhs)) fail(line, "constraint '" + label + "' has a non-finite rhs");
      model_.add_constraint(label, e.terms, sense, rhs);
    }
  }

  void apply_lower(int v, double value) { model_.variable(v).lower = value; }
  void apply_upper(int v, double value) { model_.variable(v).upper = value; }

  void parse_bounds() {
    while (pos_ < t_.size() && !peek_section()) {
      if (at(Token::Name) && !infinity_name()) {
        const int v = var_id(tok().text);
        const int line = tok().line;
        ++pos_;
        if (at(Token::Name) && lower(tok().text) == "free") {
          ++pos_;
          apply_lower(v, -kInfinity);
          apply_upper(v, kInfinity);
          continue;
        }
        if (at(Token::Le)) { ++pos_; apply_upper(v, signed_value()); continue; }
        if (at(Token::Ge)) { ++pos_; apply_lower(v, signed_value()); continue; }
        if (at(Token::Eq)) {
          ++pos_;
          const double value = signed_value();
          apply_lower(v, value);
          apply_upper(v, value);
          continue;
        }
        fail(line, "malformed bound");
      }
      // value <= name [<= value]   (or the mirrored >= form)
      const int line = tok().line;
      const double v1 = signed_value();
      Sense s1;
      if (at(Token::Le)) s1 = Sense::LessEqual;
      else if (at(Token::Ge)) s1 = Sense::GreaterEqual;
      else fail(line, "malformed bound");
      ++pos_;
      if (!at(Token::Name) || infinity_name()) fail(line, "malformed bound");
      const int v = var_id(tok().text);
      ++pos_;
      if (s1 == Sense::LessEqual) apply_lower(v, v1);
      else apply_upper(v, v1);
      if (at(Token::Le) || at(Token::Ge)) {
        const Sense s2 = t_[pos_].type == Token::Le ? Sense::LessEqual : Sense::GreaterEqual;
        if (s2 != s1) fail(line, "mixed senses in a double bound");
        ++pos_;
        const double v2 = signed_value();
        if (s1 == Sense::LessEqual) apply_upper(v, v2);
        else apply_lower(v, v2);
      }
    }
  }

  void parse_integrality(bool binary) {
    while (pos_ < t_.size() && !peek_section()) {
      if (!at(Token::Name)) fail(tok().line, "expected a variable name");
      const int v = var_id(tok().text);
      ++pos_;
      if (binary) binaries_.push_back(v);
      else model_.variable(v).integral = true;
    }
  }

  std::vector<Token> t_;
  size_t pos_ = 0;
  ModelInstance model_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> binaries_;
};

}  // namespace

std::string to_lp_string(const ModelInstance& model) {
  model.validate();
  for (const Variable& v : model.variables()) check_name(v.name, "variable");

  std::string out;
  out += "\\ Problem: " + model.name + "\n";
  out += model.minimize() ? "Minimize\n" : "Maximize\n";
  out += " obj:";
  for (int j = 0; j < model.variable_count(); ++j) {
    const double c = model.objective()[j];
    if (c == 0.0) continue;
    out += c < 0.0 ? " - " : " + ";
    out += fmt(std::abs(c));
    out += ' ';
    out += model.variable(j).name;
  }
  out += "\nSubject To\n";
  for (int i = 0; i < model.constraint_count(); ++i) {
    const Constraint& c = model.constraint(i);
    std::string label = c.name.empty() ? "c" + std::to_string(i) : c.name;
    check_name(label, "constraint");
    out += ' ' + label + ':';
    if (c.terms.empty()) {
      if (model.variable_count() == 0)
        throw InvalidConfig("cannot export an empty constraint row without variables");
      out += " + 0 " + model.variable(0).name;
    }
    for (const LinearTerm& t : c.terms) {
      out += t.coeff < 0.0 ? " - " : " + ";
      out += fmt(std::abs(t.coeff));
      out += ' ';
      out += model.variable(t.var).name;
    }
    switch (c.sense) {
      case Sense::LessEqual:    out += " <= "; break;
      case Sense::Equal:        out += " = "; break;
      case Sense::GreaterEqual: out += " >= "; break;
    }
    out += fmt(c.rhs);
    out += '\n';
  }

  std::string bounds, generals, binaries;
  for (const Variable& v : model.variables()) {
    const bool is_binary = v.integral && v.lower == 0.0 && v.upper == 1.0;
    if (v.integral) (is_binary ? binaries : generals) += ' ' + v.name + '\n';
    if (is_binary) continue;
    const bool lo_inf = v.lower == -kInfinity;
    const bool hi_inf = v.upper == kInfinity;
    if (v.lower == 0.0 && hi_inf) continue;  // default bounds
    if (v.lower == v.upper) bounds += ' ' + v.name + " = " + fmt(v.lower) + '\n';
    else if (lo_inf && hi_inf) bounds += ' ' + v.name + " free\n";
    else if (lo_inf) bounds += " -infinity <= " + v.name + " <= " + fmt(v.upper) + '\n';
    else if (hi_inf) bounds += ' ' + v.name + " >= " + fmt(v.lower) + '\n';
    else if (v.lower == 0.0) bounds += ' ' + v.name + " <= " + fmt(v.upper) + '\n';
    else bounds += ' ' + fmt(v.lower) + " <= " + v.name + " <= " + fmt(v.upper) + '\n';
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;
  if (!generals.empty()) out += "Generals\n" + generals;
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

ModelInstance model_from_lp_string(const std::string& text) {
  Parser parser(text);
  return parser.run();
}

void save_lp(const ModelInstance& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << to_lp_string(model);
  if (!f) throw ParseError("failed writing '" + path + "'");
}

ModelInstance load_lp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return model_from_lp_string(ss.str());
}

}  // namespace ats
