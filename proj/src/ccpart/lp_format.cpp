// Copyright 2026 The ccpart Authors
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

#include "ccpart/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ccpart/error.hpp"

namespace ccpart::solver {

namespace {

std::string num(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostream& out, const std::vector<int>& idx, const std::vector<double>& val,
                 const std::vector<std::string>& names) {
  if (idx.empty()) {
    out << " 0 " << names.front();
    return;
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double v = val[k];
    out << (v < 0 ? " - " : " + ") << num(std::abs(v)) << ' ' << names[idx[k]];
  }
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  require(model.num_vars() > 0, "write_lp: model has no variables");
  const auto& names = model.names();
  out << "\\ ccpart model\n";
  out << "\\offset " << num(model.offset()) << "\n";
  out << "Minimize\n obj:";
  std::vector<int> idx;
  std::vector<double> val;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.cost()[j] == 0.0) continue;
    idx.push_back(j);
    val.push_back(model.cost()[j]);
  }
  write_terms(out, idx, val, names);
  out << "\nSubject To\n";
  for (const auto& r : model.rows()) {
    const bool lo = std::isfinite(r.lo), hi = std::isfinite(r.hi);
    if (lo && hi && r.lo == r.hi) {
      out << ' ' << r.name << ':';
      write_terms(out, r.index, r.value, names);
      out << " = " << num(r.hi) << '\n';
      continue;
    }
    if (lo) {
      out << ' ' << r.name << (hi ? "_lo" : "") << ':';
      write_terms(out, r.index, r.value, names);
      out << " >= " << num(r.lo) << '\n';
    }
    if (hi) {
      out << ' ' << r.name << (lo ? "_hi" : "") << ':';
      write_terms(out, r.index, r.value, names);
      out << " <= " << num(r.hi) << '\n';
    }
  }
  out << "Bounds\n";
  for (int j = 0; j < model.num_vars(); ++j) {
    const double l = model.lower()[j], u = model.upper()[j];
    if (model.is_binary(j) && l == 0.0 && u == 1.0) continue;
    if (!std::isfinite(l) && !std::isfinite(u)) {
      out << ' ' << names[j] << " free\n";
    } else if (l == u) {
      out << ' ' << names[j] << " = " << num(l) << '\n';
    } else {
      out << ' ' << num(l) << " <= " << names[j] << " <= " << num(u) << '\n';
    }
  }
  bool any_bin = false;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (!model.is_binary(j)) continue;
    if (!any_bin) out << "Binaries\n";
    any_bin = true;
    out << ' ' << names[j] << '\n';
  }
  out << "End\n";
}

void write_lp_file(const MilpModel& model, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write_lp(model, f);
  if (!f) fail(ErrorCode::kIoError, "write failed for " + path);
}

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kEnd };

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& t, double& v) {
  const std::string l = lower(t);
  if (l == "inf" || l == "+inf" || l == "infinity" || l == "+infinity") {
    v = kInf;
    return true;
  }
  if (l == "-inf" || l == "-infinity") {
    v = -kInf;
    return true;
  }
  if (t.empty()) return false;
  const char c = t[0];
  if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+'))
    return false;
  char* end = nullptr;
  v = std::strtod(t.c_str(), &end);
  return end && *end == '\0';
}

bool is_relation(const std::string& t) {
  return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">";
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(ErrorCode::kParseError, "LP parse error at line " + std::to_string(line) + ": " + what);
}

// Splits operators glued to neighbours ("x<=3", "+2").
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '<' || c == '>' || c == '=') {
      flush();
      std::string op(1, c);
      if (i + 1 < line.size() && (line[i + 1] == '=' || line[i + 1] == '<' || line[i + 1] == '>')) {
        op += line[++i];
      }
      out.push_back(op);
    } else if ((c == '+' || c == '-') && cur.empty()) {
      // Sign attached to a number stays with it; a lone sign is its own token.
      if (i + 1 < line.size() &&
          (std::isdigit(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '.' ||
           line[i + 1] == 'i' || line[i + 1] == 'I')) {
        cur += c;
      } else {
        out.push_back(std::string(1, c));
      }
    } else if ((c == '+' || c == '-') && !cur.empty() && cur.back() != 'e' && cur.back() != 'E') {
      flush();
      out.push_back(std::string(1, c));
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

struct Expr {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  std::string rel;
  double rhs = 0.0;
  bool has_rhs = false;
};

// Consumes "[name:] terms [rel rhs]" from a token list.
void parse_terms(const std::vector<std::string>& tok, std::size_t& i, Expr& e, int line) {
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  while (i < tok.size() && !is_relation(tok[i])) {
    const std::string& t = tok[i++];
    double v;
    if (t == "+") continue;
    if (t == "-") {
      sign = -sign;
      continue;
    }
    if (parse_number(t, v)) {
      if (have_coef) parse_fail(line, "two consecutive coefficients");
      coef = v;
      have_coef = true;
      continue;
    }
    e.terms.emplace_back(t, sign * coef);
    sign = 1.0;
    coef = 1.0;
    have_coef = false;
  }
  if (have_coef) {
    // Trailing constant in the expression (objective constant).
    e.terms.emplace_back("", sign * coef);
  }
}

}  // namespace

MilpModel read_lp(std::istream& in) {
  MilpModel model;
  std::map<std::string, int> index;
  Section section = Section::kNone;
  double obj_sign = 1.0;
  double offset = 0.0;
  std::vector<std::pair<std::string, double>> objective;
  struct PendingRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    double lo, hi;
  };
  std::vector<PendingRow> rows;
  struct PendingBound {
    std::string var;
    double lo, hi;
    bool set_lo, set_hi;
  };
  std::vector<PendingBound> bounds;
  std::vector<std::string> binaries;
  std::vector<std::string> order;  // first appearance order of variables
  auto touch = [&](const std::string& v) {
    if (index.count(v)) return;
    index[v] = static_cast<int>(order.size());
    order.push_back(v);
  };

  std::string raw;
  int line_no = 0;
  std::vector<std::string> pending;  // constraint tokens spanning lines
  int pending_line = 0;
  auto flush_constraint = [&](int line) {
    if (pending.empty()) return;
    std::size_t i = 0;
    Expr e;
    if (pending[0].back() == ':') {
      e.name = pending[0].substr(0, pending[0].size() - 1);
      i = 1;
    } else if (pending.size() > 1 && pending[1] == ":") {
      e.name = pending[0];
      i = 2;
    }
    parse_terms(pending, i, e, line);
    if (i >= pending.size()) parse_fail(line, "missing relation");
    const std::string rel = pending[i++];
    if (i >= pending.size()) parse_fail(line, "missing right-hand side");
    double rhs;
    if (!parse_number(pending[i], rhs)) parse_fail(line, "bad right-hand side " + pending[i]);
    PendingRow row{e.name, {}, -kInf, kInf};
    double constant = 0.0;
    for (auto& [v, c] : e.terms) {
      if (v.empty()) {
        constant += c;
        continue;
      }
      touch(v);
      row.terms.emplace_back(v, c);
    }
    rhs -= constant;
    if (rel == "<=" || rel == "=<" || rel == "<") row.hi = rhs;
    else if (rel == ">=" || rel == "=>" || rel == ">") row.lo = rhs;
    else row.lo = row.hi = rhs;
    rows.push_back(std::move(row));
    pending.clear();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto bs = line.find('\\');
    if (bs != std::string::npos) {
      const std::string comment = line.substr(bs + 1);
      if (comment.rfind("offset", 0) == 0) {
        if (!parse_number(comment.substr(7), offset)) parse_fail(line_no, "bad offset");
      }
      line = line.substr(0, bs);
    }
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string head = lower(tok[0]);
    const std::string head2 = tok.size() > 1 ? lower(tok[1]) : "";
    Section next = section;
    bool header = true;
    if (head == "minimize" || head == "minimise" || head == "min") {
      next = Section::kObjective;
      obj_sign = 1.0;
    } else if (head == "maximize" || head == "maximise" || head == "max") {
      next = Section::kObjective;
      obj_sign = -1.0;
    } else if ((head == "subject" && head2 == "to") || head == "st" || head == "s.t." ||
               head == "such") {
      next = Section::kConstraints;
    } else if (head == "bounds" || head == "bound") {
      next = Section::kBounds;
    } else if (head == "binaries" || head == "binary" || head == "bin") {
      next = Section::kBinaries;
    } else if (head == "general" || head == "generals" || head == "gen" ||
               head == "semi-continuous" || head == "sos") {
      parse_fail(line_no, "unsupported section " + tok[0]);
    } else if (head == "end") {
      next = Section::kEnd;
    } else {
      header = false;
    }
    if (header) {
      if (section == Section::kConstraints) flush_constraint(pending_line);
      section = next;
      continue;
    }
    switch (section) {
      case Section::kNone:
      case Section::kEnd:
        parse_fail(line_no, "content outside a section");
      case Section::kObjective: {
        std::size_t i = 0;
        Expr e;
        if (tok[0].back() == ':') i = 1;
        parse_terms(tok, i, e, line_no);
        if (i != tok.size()) parse_fail(line_no, "relation in objective");
        for (auto& [v, c] : e.terms) {
          if (v.empty()) {
            offset += obj_sign * c;
            continue;
          }
          touch(v);
          objective.emplace_back(v, obj_sign * c);
        }
        break;
      }
      case Section::kConstraints: {
        // A new "name:" token starts a new row.
        for (const std::string& t : tok) {
          if (t.back() == ':' && !pending.empty()) flush_constraint(pending_line);
          if (pending.empty()) pending_line = line_no;
          pending.push_back(t);
        }
        // Complete once we hold "... rel rhs".
        if (pending.size() >= 2 && is_relation(pending[pending.size() - 2]))
          flush_constraint(line_no);
        break;
      }
      case Section::kBounds: {
        PendingBound b{"", -kInf, kInf, false, false};
        double v;
        if (tok.size() == 2 && lower(tok[1]) == "free") {
          b.var = tok[0];
          b.set_lo = b.set_hi = true;
        } else if (tok.size() == 5 && parse_number(tok[0], b.lo) && parse_number(tok[4], b.hi)) {
          b.var = tok[2];
          b.set_lo = b.set_hi = true;
        } else if (tok.size() == 3 && parse_number(tok[2], v)) {
          b.var = tok[0];
          if (tok[1] == "<=" || tok[1] == "=<") { b.hi = v; b.set_hi = true; }
          else if (tok[1] == ">=" || tok[1] == "=>") { b.lo = v; b.set_lo = true; }
          else if (tok[1] == "=") { b.lo = b.hi = v; b.set_lo = b.set_hi = true; }
          else parse_fail(line_no, "bad bound");
        } else if (tok.size() == 3 && parse_number(tok[0], v)) {
          b.var = tok[2];
          if (tok[1] == "<=" || tok[1] == "=<") { b.lo = v; b.set_lo = true; }
          else if (tok[1] == ">=" || tok[1] == "=>") { b.hi = v; b.set_hi = true; }
          else parse_fail(line_no, "bad bound");
        } else {
          parse_fail(line_no, "unrecognized bound");
        }
        touch(b.var);
        bounds.push_back(b);
        break;
      }
      case Section::kBinaries:
        for (const std::string& t : tok) {
          touch(t);
          binaries.push_back(t);
        }
        break;
    }
  }
  if (!pending.empty()) parse_fail(line_no, "unterminated constraint");

  std::vector<double> cost(order.size(), 0.0), lo(order.size(), 0.0), hi(order.size(), kInf);
  std::vector<bool> bin(order.size(), false);
  for (auto& [v, c] : objective) cost[index[v]] += c;
  for (const auto& v : binaries) {
    bin[index[v]] = true;
    hi[index[v]] = 1.0;
  }
  for (const auto& b : bounds) {
    const int j = index[b.var];
    if (b.set_lo) lo[j] = b.lo;
    if (b.set_hi) hi[j] = b.hi;
  }
  for (std::size_t j = 0; j < order.size(); ++j)
    model.add_variable(order[j], lo[j], hi[j], cost[j], bin[j]);
  for (auto& r : rows) {
    std::vector<int> idx;
    std::vector<double> val;
    for (auto& [v, c] : r.terms) {
      idx.push_back(index[v]);
      val.push_back(c);
    }
    model.add_row(std::move(idx), std::move(val), r.lo, r.hi, r.name);
  }
  model.set_offset(offset);
  return model;
}

MilpModel read_lp_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIoError, "cannot open " + path);
  return read_lp(f);
}

}  // namespace ccpart::solver
