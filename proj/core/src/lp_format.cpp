#include "sam/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace sam {

namespace {

std::string sanitize(const std::string& raw, int id, const char* fallback) {
  std::string s;
  s.reserve(raw.size());
  for (char ch : raw) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') s.push_back(ch);
    else s.push_back('_');
  }
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
    s = std::string(fallback) + std::to_string(id);
  return s;
}

std::string fmt_coeff(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_expr(std::ostream& out, const LinearExpr& e, const std::vector<std::string>& names) {
  bool first = true;
  for (const auto& [var, coeff] : e.terms()) {
    if (first) {
      out << (coeff < 0 ? "- " : "") << fmt_coeff(std::abs(coeff)) << ' ' << names[var];
      first = false;
    } else {
      out << (coeff < 0 ? " - " : " + ") << fmt_coeff(std::abs(coeff)) << ' ' << names[var];
    }
  }
  if (e.constant() != 0.0) {
    if (first) out << fmt_coeff(e.constant());
    else out << (e.constant() < 0 ? " - " : " + ") << fmt_coeff(std::abs(e.constant()));
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

std::vector<std::string> lp_var_names(const Model& m) {
  std::vector<std::string> names;
  names.reserve(m.vars().size());
  std::unordered_set<std::string> seen;
  for (const auto& v : m.vars()) {
    std::string s = sanitize(v.name, v.id, "x");
    if (!seen.insert(s).second) {
      s += "_" + std::to_string(v.id);
      seen.insert(s);
    }
    names.push_back(std::move(s));
  }
  return names;
}

void write_lp(const Model& m, std::ostream& out, const std::string& problem_name) {
  const auto names = lp_var_names(m);
  out << "\\ Problem: " << sanitize(problem_name, 0, "p") << "\n";
  out << "Minimize\n obj: ";
  write_expr(out, m.objective(), names);
  out << "\nSubject To\n";
  int cidx = 0;
  std::unordered_set<std::string> seen;
  for (const auto& c : m.constraints()) {
    std::string cname = sanitize(c.name.empty() ? "c" + std::to_string(cidx) : c.name, cidx, "c");
    if (!seen.insert(cname).second) {
      cname += "_" + std::to_string(cidx);
      seen.insert(cname);
    }
    out << ' ' << cname << ": ";
    write_expr(out, c.expr, names);
    switch (c.sense) {
      case Sense::LessEqual: out << " <= "; break;
      case Sense::Equal: out << " = "; break;
      case Sense::GreaterEqual: out << " >= "; break;
    }
    out << fmt_coeff(c.rhs) << "\n";
    ++cidx;
  }
  out << "Bounds\n";
  for (const auto& v : m.vars()) {
    if (v.domain == VarDomain::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    const std::string& n = names[v.id];
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << ' ' << n << " free\n";
    } else if (std::isinf(v.lower)) {
      out << ' ' << "-inf <= " << n << " <= " << fmt_coeff(v.upper) << "\n";
    } else if (std::isinf(v.upper)) {
      out << ' ' << fmt_coeff(v.lower) << " <= " << n << "\n";
    } else {
      out << ' ' << fmt_coeff(v.lower) << " <= " << n << " <= " << fmt_coeff(v.upper) << "\n";
    }
  }
  bool any_general = false;
  for (const auto& v : m.vars())
    if (v.domain == VarDomain::Integer) { any_general = true; break; }
  if (any_general) {
    out << "General\n";
    for (const auto& v : m.vars())
      if (v.domain == VarDomain::Integer) out << ' ' << names[v.id] << "\n";
  }
  bool any_binary = false;
  for (const auto& v : m.vars())
    if (v.domain == VarDomain::Binary) { any_binary = true; break; }
  if (any_binary) {
    out << "Binary\n";
    for (const auto& v : m.vars())
      if (v.domain == VarDomain::Binary) out << ' ' << names[v.id] << "\n";
  }
  out << "End\n";
}

std::string to_lp_string(const Model& m, const std::string& problem_name) {
  std::ostringstream os;
  write_lp(m, os, problem_name);
  return os.str();
}

}  // namespace sam
