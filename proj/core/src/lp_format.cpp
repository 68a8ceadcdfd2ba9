#include <cmath>
#include <ostream>

#include "socmarket/lp.hpp"

namespace socmarket::lp {

namespace {

std::string var_name(const LpProblem& p, std::size_t j) {
  if (j < p.var_names.size() && !p.var_names[j].empty()) return p.var_names[j];
  return "x" + std::to_string(j + 1);
}

void write_terms(std::ostream& os, const LpProblem& p,
                 const std::vector<std::pair<std::size_t, double>>& terms) {
  bool first = true;
  for (const auto& [j, a] : terms) {
    if (a == 0.0) continue;
    if (first) {
      if (a < 0.0) os << "- ";
    } else {
      os << (a < 0.0 ? " - " : " + ");
    }
    const double mag = std::abs(a);
    if (mag != 1.0) os << mag << ' ';
    os << var_name(p, j);
    first = false;
  }
  if (first) os << "0 " << var_name(p, 0);
}

}  // namespace

void write_lp_format(std::ostream& os, const LpProblem& p) {
  const auto old_precision = os.precision(17);
  os << "Minimize\n obj: ";
  std::vector<std::pair<std::size_t, double>> obj;
  for (std::size_t j = 0; j < p.num_vars(); ++j) obj.emplace_back(j, p.objective[j]);
  write_terms(os, p, obj);
  os << "\nSubject To\n";
  auto rows = [&](const std::vector<Row>& rs, const char* sense, const char* prefix) {
    for (std::size_t i = 0; i < rs.size(); ++i) {
      os << ' ' << (rs[i].name.empty() ? prefix + std::to_string(i + 1) : rs[i].name) << ": ";
      write_terms(os, p, rs[i].terms);
      os << ' ' << sense << ' ' << rs[i].rhs << '\n';
    }
  };
  rows(p.ub_rows, "<=", "ub");
  rows(p.eq_rows, "=", "eq");
  os << "Bounds\n";
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    const double lo = p.lower[j];
    const double hi = p.upper[j];
    os << ' ';
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << var_name(p, j) << " free";
    } else if (lo == hi) {
      os << var_name(p, j) << " = " << lo;
    } else {
      if (std::isfinite(lo)) {
        os << lo;
      } else {
        os << "-inf";
      }
      os << " <= " << var_name(p, j) << " <= ";
      if (std::isfinite(hi)) {
        os << hi;
      } else {
        os << "+inf";
      }
    }
    os << '\n';
  }
  os << "End\n";
  os.precision(old_precision);
}

}  // namespace socmarket::lp
