#include "pwcvx/lp_file.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace pwcvx {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string compact_fn(const UnivariateFunction& f) {
  return nlohmann::json::parse(to_json_string(f)).dump();
}

void append_expr(std::string& out, const std::vector<LinTerm>& terms,
                 const std::vector<std::string>& names) {
  bool first = true;
  for (const auto& t : terms) {
    if (t.coeff == 0) continue;
    double c = t.coeff;
    if (first) {
      if (c < 0) {
        out += "- ";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    out += fmt17(c);
    out += ' ';
    out += names[t.var];
    first = false;
  }
  if (first) out += "0 " + names.at(0);
}

std::string name_or_dash(const std::vector<std::string>& names, int idx) {
  return idx < 0 ? std::string("-") : names[idx];
}

const char* kind_word(FormulationKind k) {
  switch (k) {
    case FormulationKind::IM: return "im";
    case FormulationKind::MCM: return "mcm";
    default: return "ccm";
  }
}

}  // namespace

std::string write_lp_string(const Model& m) {
  const auto& names = m.names;
  std::string out;
  out += "\\ piecewise convex relaxation model\n";
  out += "\\ MODEL kind=";
  out += kind_word(m.kind);
  out += " strengthened=";
  out += m.strengthened ? '1' : '0';
  out += " n_original=" + std::to_string(m.n_original) + "\n";
  for (size_t i = 0; i < m.terms.size(); ++i) {
    const PerspectiveTerm& t = m.terms[i];
    out += "\\ PTERM id=" + std::to_string(i);
    out += " z=" + name_or_dash(names, t.z);
    out += " y=" + name_or_dash(names, t.y);
    out += " anchor=" + fmt17(t.anchor);
    out += " qlo=" + fmt17(t.q_lo);
    out += " qhi=" + fmt17(t.q_hi);
    out += " persp=";
    out += t.perspective ? '1' : '0';
    out += " x=";
    for (size_t k = 0; k < t.x.size(); ++k) {
      if (k) out += ',';
      out += fmt17(t.x[k].coeff) + "*" + names[t.x[k].var];
    }
    out += " fn=" + compact_fn(t.g) + "\n";
  }
  for (const SegBlock& b : m.blocks) {
    out += "\\ BLOCK row=" + std::to_string(b.row);
    out += " var=" + names[b.var];
    out += " segs=";
    for (size_t s = 0; s < b.segs.size(); ++s) {
      const SegVars& sv = b.segs[s];
      if (s) out += '|';
      out += fmt17(sv.lo) + ":" + fmt17(sv.hi) + ":";
      out += sv.convex ? '1' : '0';
      out += ":" + fmt17(sv.alpha);
      out += ":" + name_or_dash(names, sv.x);
      out += ":" + name_or_dash(names, sv.y);
      out += ":" + name_or_dash(names, sv.z);
      out += ":" + name_or_dash(names, sv.mu);
      out += ":" + name_or_dash(names, sv.lam);
      out += ":" + std::to_string(sv.term);
    }
    out += "\n";
  }

  out += "Minimize\n obj: ";
  std::vector<LinTerm> objterms;
  for (int j = 0; j < m.n_vars(); ++j)
    if (m.obj[j] != 0) objterms.push_back({j, m.obj[j]});
  if (objterms.empty() && m.n_vars() > 0) objterms.push_back({0, 0.0});
  append_expr(out, objterms, names);
  out += "\nSubject To\n";
  for (size_t i = 0; i < m.rows.size(); ++i) {
    out += " c" + std::to_string(i) + ": ";
    append_expr(out, m.rows[i].terms, names);
    switch (m.rows[i].sense) {
      case RowSense::LE: out += " <= "; break;
      case RowSense::GE: out += " >= "; break;
      case RowSense::EQ: out += " = "; break;
    }
    out += fmt17(m.rows[i].rhs) + "\n";
  }
  out += "Bounds\n";
  for (int j = 0; j < m.n_vars(); ++j)
    out += " " + fmt17(m.vars[j].lo) + " <= " + names[j] + " <= " +
           fmt17(m.vars[j].hi) + "\n";
  bool any_bin = false;
  for (const auto& v : m.vars) any_bin = any_bin || v.kind == VarKind::Binary;
  if (any_bin) {
    out += "Binaries\n";
    int on_line = 0;
    for (int j = 0; j < m.n_vars(); ++j) {
      if (m.vars[j].kind != VarKind::Binary) continue;
      out += on_line == 0 ? " " : " ";
      out += names[j];
      if (++on_line == 12) {
        out += "\n";
        on_line = 0;
      }
    }
    if (on_line) out += "\n";
  }
  out += "End\n";
  return out;
}

void write_lp(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_lp_string(m);
}

// ---------------------------------------------------------------------------
// Reader.
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

bool is_sense(const std::string& tok, RowSense& s) {
  if (tok == "<=" || tok == "<" || tok == "=<") return s = RowSense::LE, true;
  if (tok == ">=" || tok == ">" || tok == "=>") return s = RowSense::GE, true;
  if (tok == "=") return s = RowSense::EQ, true;
  return false;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct NamedTerm {
  std::string name;
  double coeff = 0;
};

struct ParsedRow {
  std::vector<NamedTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0;
  bool has_sense = false;
};

// Accumulates "3 x0 - x1 <= 5" style token streams; tolerant of split
// signs ("- 3") and of coefficientless variables.
struct ExprParser {
  ParsedRow row;
  double sign = 1.0;
  double coeff = 1.0;
  bool have_coeff = false;
  bool after_sense = false;

  void feed(const std::string& tok) {
    if (tok == "+") return;
    if (tok == "-") {
      sign = -sign;
      return;
    }
    RowSense s;
    if (!after_sense && is_sense(tok, s)) {
      row.sense = s;
      row.has_sense = true;
      after_sense = true;
      sign = 1.0;
      have_coeff = false;
      return;
    }
    double v;
    if (parse_number(tok, v)) {
      if (after_sense) {
        row.rhs = sign * v;
        sign = 1.0;
        return;
      }
      coeff = have_coeff ? coeff * v : v;
      have_coeff = true;
      return;
    }
    if (after_sense)
      throw std::runtime_error("lp parse: name after constraint sense: " + tok);
    row.terms.push_back({tok, sign * (have_coeff ? coeff : 1.0)});
    sign = 1.0;
    have_coeff = false;
  }
};

// Strip a leading "label:" from a stream of tokens (the colon may be
// glued to the label or stand alone).
void strip_label(std::vector<std::string>& toks) {
  if (toks.empty()) return;
  if (toks[0].back() == ':') {
    toks.erase(toks.begin());
    return;
  }
  if (toks.size() >= 2 && toks[1] == ":") toks.erase(toks.begin(), toks.begin() + 2);
}

struct BoundLine {
  std::string name;
  double lo = 0, hi = 0;
  bool has_lo = false, has_hi = false;
};

BoundLine parse_bound_line(const std::vector<std::string>& toks,
                           const std::string& raw) {
  BoundLine b;
  double v;
  RowSense s;
  if (toks.size() == 5 && parse_number(toks[0], b.lo) && is_sense(toks[1], s) &&
      !parse_number(toks[2], v) && is_sense(toks[3], s) &&
      parse_number(toks[4], b.hi)) {
    b.name = toks[2];
    b.has_lo = b.has_hi = true;
    return b;
  }
  if (toks.size() == 3 && !parse_number(toks[0], v) && is_sense(toks[1], s) &&
      parse_number(toks[2], b.hi)) {
    b.name = toks[0];
    if (s == RowSense::LE) b.has_hi = true;
    else if (s == RowSense::GE) b.lo = b.hi, b.has_lo = true, b.has_hi = false;
    else b.lo = b.hi, b.has_lo = b.has_hi = true;
    return b;
  }
  if (toks.size() == 3 && parse_number(toks[0], b.lo) && is_sense(toks[1], s) &&
      !parse_number(toks[2], v)) {
    b.name = toks[2];
    b.has_lo = true;
    return b;
  }
  throw std::runtime_error("lp parse: unsupported bounds line: " + raw);
}

std::unordered_map<std::string, std::string> parse_kv(
    const std::vector<std::string>& toks, size_t from) {
  std::unordered_map<std::string, std::string> kv;
  for (size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("lp parse: bad metadata token: " + toks[i]);
    kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return kv;
}

}  // namespace

Model read_lp_string(const std::string& text) {
  enum Sec { None, Obj, Rows, Bnds, Bins, Done };
  Sec sec = None;
  bool maximize = false;

  std::vector<std::string> meta;
  ExprParser obj;
  std::vector<ParsedRow> rows;
  ExprParser cur;
  bool row_open = false;
  std::vector<BoundLine> bound_lines;
  std::vector<std::string> binary_names;

  auto close_row = [&]() {
    if (!row_open) return;
    if (!cur.row.has_sense)
      throw std::runtime_error("lp parse: constraint without sense");
    rows.push_back(std::move(cur.row));
    cur = ExprParser{};
    row_open = false;
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '\\') {
      meta.push_back(line.substr(start));
      continue;
    }
    std::string low = lower(line.substr(start));
    if (low.rfind("minimize", 0) == 0 || low == "min") {
      sec = Obj;
      continue;
    }
    if (low.rfind("maximize", 0) == 0 || low == "max") {
      sec = Obj;
      maximize = true;
      continue;
    }
    if (low.rfind("subject to", 0) == 0 || low == "st" || low == "s.t.") {
      sec = Rows;
      continue;
    }
    if (low == "bounds") {
      close_row();
      sec = Bnds;
      continue;
    }
    if (low == "binaries" || low == "binary" || low == "bin" ||
        low == "generals" || low == "general" || low == "gen") {
      close_row();
      sec = Bins;
      continue;
    }
    if (low == "end") {
      close_row();
      sec = Done;
      break;
    }
    auto toks = tokenize(line);
    switch (sec) {
      case Obj: {
        strip_label(toks);
        for (const auto& t : toks) obj.feed(t);
        break;
      }
      case Rows: {
        // a label starts a new constraint; otherwise continue the open one
        std::vector<std::string> copy = toks;
        strip_label(copy);
        if (copy.size() != toks.size()) close_row();
        row_open = true;
        for (const auto& t : copy) cur.feed(t);
        break;
      }
      case Bnds:
        bound_lines.push_back(parse_bound_line(toks, line));
        break;
      case Bins:
        for (const auto& t : toks) binary_names.push_back(t);
        break;
      default:
        throw std::runtime_error("lp parse: content before a section header");
    }
  }
  close_row();

  // Variables take the order of their Bounds lines; every variable must
  // have one because the model contract requires finite bounds.
  Model m;
  std::unordered_map<std::string, int> index;
  for (const auto& b : bound_lines) {
    auto [it, fresh] = index.try_emplace(b.name, m.n_vars());
    if (fresh) {
      m.vars.push_back({});
      m.names.push_back(b.name);
    }
    ModelVar& v = m.vars[it->second];
    if (b.has_lo) v.lo = b.lo;
    if (b.has_hi) v.hi = b.hi;
  }
  auto resolve = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw std::runtime_error("lp parse: variable '" + name +
                               "' has no bounds line");
    return it->second;
  };
  for (const auto& name : binary_names)
    m.vars[resolve(name)].kind = VarKind::Binary;

  m.obj.assign(m.n_vars(), 0.0);
  for (const auto& t : obj.row.terms)
    m.obj[resolve(t.name)] += maximize ? -t.coeff : t.coeff;
  for (const auto& pr : rows) {
    ModelRow r;
    r.sense = pr.sense;
    r.rhs = pr.rhs;
    for (const auto& t : pr.terms) r.terms.push_back({resolve(t.name), t.coeff});
    m.rows.push_back(std::move(r));
  }

  // Metadata pass: model identity, epigraph terms, segment blocks.
  m.n_original = m.n_vars();
  auto opt_resolve = [&](const std::string& name) {
    return name == "-" ? -1 : resolve(name);
  };
  std::vector<std::pair<int, PerspectiveTerm>> terms;
  for (const std::string& raw : meta) {
    auto toks = tokenize(raw.substr(1));
    if (toks.empty()) continue;
    if (toks[0] == "MODEL") {
      auto kv = parse_kv(toks, 1);
      if (kv.count("kind")) {
        std::string k = kv["kind"];
        m.kind = k == "im"    ? FormulationKind::IM
                 : k == "mcm" ? FormulationKind::MCM
                              : FormulationKind::CCM;
      }
      if (kv.count("strengthened")) m.strengthened = kv["strengthened"] == "1";
      if (kv.count("n_original")) m.n_original = std::stoi(kv["n_original"]);
    } else if (toks[0] == "PTERM") {
      size_t fnpos = raw.find(" fn=");
      if (fnpos == std::string::npos)
        throw std::runtime_error("lp parse: PTERM without fn field");
      std::string fn_json = raw.substr(fnpos + 4);
      auto head = tokenize(raw.substr(1, fnpos - 1));
      auto kv = parse_kv(head, 1);
      PerspectiveTerm t;
      t.g = function_from_json(fn_json);
      t.z = opt_resolve(kv.at("z"));
      t.y = opt_resolve(kv.at("y"));
      t.anchor = std::strtod(kv.at("anchor").c_str(), nullptr);
      t.q_lo = std::strtod(kv.at("qlo").c_str(), nullptr);
      t.q_hi = std::strtod(kv.at("qhi").c_str(), nullptr);
      t.perspective = kv.at("persp") == "1";
      std::stringstream xs(kv.at("x"));
      std::string part;
      while (std::getline(xs, part, ',')) {
        auto star = part.find('*');
        if (star == std::string::npos)
          throw std::runtime_error("lp parse: bad PTERM x entry: " + part);
        t.x.push_back({resolve(part.substr(star + 1)),
                       std::strtod(part.substr(0, star).c_str(), nullptr)});
      }
      terms.emplace_back(std::stoi(kv.at("id")), std::move(t));
    } else if (toks[0] == "BLOCK") {
      auto kv = parse_kv(toks, 1);
      SegBlock b;
      b.row = std::stoi(kv.at("row"));
      b.var = resolve(kv.at("var"));
      std::stringstream segs(kv.at("segs"));
      std::string one;
      while (std::getline(segs, one, '|')) {
        std::vector<std::string> f;
        std::stringstream fs(one);
        std::string piece;
        while (std::getline(fs, piece, ':')) f.push_back(piece);
        if (f.size() != 10)
          throw std::runtime_error("lp parse: bad BLOCK segment: " + one);
        SegVars sv;
        sv.lo = std::strtod(f[0].c_str(), nullptr);
        sv.hi = std::strtod(f[1].c_str(), nullptr);
        sv.convex = f[2] == "1";
        sv.alpha = std::strtod(f[3].c_str(), nullptr);
        sv.x = opt_resolve(f[4]);
        sv.y = opt_resolve(f[5]);
        sv.z = opt_resolve(f[6]);
        sv.mu = opt_resolve(f[7]);
        sv.lam = opt_resolve(f[8]);
        sv.term = std::stoi(f[9]);
        b.segs.push_back(sv);
      }
      m.blocks.push_back(std::move(b));
    }
  }
  if (!terms.empty()) {
    size_t maxid = 0;
    for (const auto& [id, t] : terms) maxid = std::max(maxid, size_t(id));
    if (maxid + 1 != terms.size())
      throw std::runtime_error("lp parse: PTERM ids are not contiguous");
    m.terms.resize(terms.size());
    for (auto& [id, t] : terms) m.terms[id] = std::move(t);
  }
  return m;
}

Model read_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return read_lp_string(ss.str());
}

void write_solution(const LpFileSolution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "status " << sol.status << "\n";
  out << "objective " << fmt17(sol.objective) << "\n";
  for (const auto& [name, v] : sol.values) out << name << ' ' << fmt17(v) << "\n";
}

LpFileSolution read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  LpFileSolution sol;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "status" && toks.size() >= 2) {
      sol.status = toks[1];
    } else if (toks[0] == "objective" && toks.size() >= 2) {
      sol.objective = std::strtod(toks[1].c_str(), nullptr);
    } else if (toks.size() == 2) {
      sol.values.emplace_back(toks[0], std::strtod(toks[1].c_str(), nullptr));
    }
  }
  return sol;
}

}  // namespace pwcvx
