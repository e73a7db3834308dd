#include "ifcascade/paths.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ifc {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values,
                       Interp interp)
    : CadlagPath(std::move(times), std::move(values), interp, {}, {}) {}

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values,
                       Interp interp, std::vector<std::size_t> jump_indices,
                       std::vector<double> jump_left_values)
    : times_(std::move(times)), values_(std::move(values)), interp_(interp) {
  validate();
  if (jump_indices.size() != jump_left_values.size())
    throw std::invalid_argument("jump registry arrays differ in length");
  left_values_ = values_;
  jump_flag_.assign(times_.size(), 0);
  for (std::size_t k = 0; k < jump_indices.size(); ++k) {
    const std::size_t i = jump_indices[k];
    if (i >= times_.size())
      throw std::invalid_argument("jump index out of range");
    if (!std::isfinite(jump_left_values[k]))
      throw std::invalid_argument("jump left value must be finite");
    jump_flag_[i] = 1;
    left_values_[i] = jump_left_values[k];
  }
  if (interp_ == Interp::Step) {
    // Every sample-to-sample change of a step path is a discontinuity.
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!jump_flag_[i] && values_[i] != values_[i - 1]) {
        jump_flag_[i] = 1;
        left_values_[i] = values_[i - 1];
      }
    }
  }
}

CadlagPath CadlagPath::constant(double value, double horizon) {
  return CadlagPath({0.0, horizon}, {value, value});
}

void CadlagPath::validate() const {
  if (times_.size() < 2)
    throw std::invalid_argument("path needs at least two samples");
  if (times_.size() != values_.size())
    throw std::invalid_argument("times/values length mismatch");
  if (times_.front() != 0.0)
    throw std::invalid_argument("path must start at t = 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
      throw std::invalid_argument("path samples must be finite");
    if (i > 0 && times_[i] <= times_[i - 1])
      throw std::invalid_argument("times must be strictly increasing");
  }
}

double CadlagPath::left_value(std::size_t i) const {
  return jump_flag_[i] ? left_values_[i] : values_[i];
}

std::size_t CadlagPath::jump_count() const {
  std::size_t n = 0;
  for (auto f : jump_flag_) n += f;
  return n;
}

std::size_t CadlagPath::segment_index(double t) const {
  if (t < times_.front() || t > times_.back())
    throw std::domain_error("evaluation time outside [0, T]");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double CadlagPath::evaluate(double t) const {
  const std::size_t i = segment_index(t);
  if (i + 1 == times_.size() || t == times_[i]) return values_[i];
  if (interp_ == Interp::Step) return values_[i];
  const double v0 = values_[i];
  const double v1 = left_value(i + 1);
  const double theta = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return v0 + theta * (v1 - v0);
}

double CadlagPath::evaluate_left(double t) const {
  if (t < times_.front() || t > times_.back())
    throw std::domain_error("evaluation time outside [0, T]");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && *it == t) {
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) return left_value(0);
    if (interp_ == Interp::Step && !jump_flag_[i]) return values_[i - 1];
    return left_value(i);
  }
  return evaluate(t);  // continuous strictly between samples
}

CadlagPath CadlagPath::hat() const {
  const std::size_t last = times_.size() - 1;
  const double terminal = jump_flag_[last] ? left_values_[last] : values_[last];
  std::vector<double> values = values_;
  values[last] = terminal;
  std::vector<std::size_t> idx;
  std::vector<double> lv;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (jump_flag_[i]) {
      idx.push_back(i);
      lv.push_back(left_values_[i]);
    }
  }
  return CadlagPath(times_, std::move(values), interp_, std::move(idx),
                    std::move(lv));
}

CadlagPath counting_map(const CadlagPath& z) {
  const auto& t = z.times();
  const auto& v = z.values();
  const std::size_t n = z.size();

  std::vector<double> out_t;
  std::vector<double> out_v;
  auto emit = [&](double time, double level) {
    if (!out_t.empty() && time <= out_t.back()) {
      out_v.back() = level;
    } else {
      out_t.push_back(time);
      out_v.push_back(level);
    }
  };

  double sup = v[0];
  double level = std::floor(positive_part(sup));
  emit(0.0, level);

  for (std::size_t i = 1; i < n; ++i) {
    const double a = v[i - 1];
    const double b = z.left_value(i);  // limit of the segment as s -> t_i
    if (z.interp() == Interp::Linear && b > a && b > sup) {
      // The running sup first crosses each integer k in (sup, b) at an
      // interior time of the segment; solve the linear crossing exactly.
      for (double k = std::floor(positive_part(sup)) + 1.0; k < b; k += 1.0) {
        if (k <= sup) continue;
        const double theta = (k - a) / (b - a);
        emit(t[i - 1] + theta * (t[i] - t[i - 1]), k);
        level = k;
      }
    }
    sup = std::max(sup, b);  // the left limit enters the closure of the sup
    sup = std::max(sup, v[i]);
    const double k_new = std::floor(positive_part(sup));
    if (k_new > level) {
      emit(t[i], k_new);
      level = k_new;
    }
  }
  if (out_t.back() < z.horizon()) emit(z.horizon(), level);
  return CadlagPath(std::move(out_t), std::move(out_v), Interp::Step);
}

namespace {

// Ordered evaluation points of f inside [lo, hi]: window-boundary values,
// sample values, and left limits at jumps (standing for times just below the
// jump). Position order encodes a legal strict time order for (t1, t2, t3).
std::vector<double> window_points(const CadlagPath& f, double lo, double hi) {
  std::vector<double> pts;
  const auto& times = f.times();
  lo = std::clamp(lo, times.front(), times.back());
  hi = std::clamp(hi, times.front(), times.back());
  pts.push_back(f.evaluate(lo));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= lo || times[i] > hi) {
      if (times[i] > hi) break;
      continue;
    }
    if (f.is_jump(i)) pts.push_back(f.left_value(i));
    pts.push_back(f.values()[i]);
  }
  pts.push_back(f.evaluate(hi));
  return pts;
}

}  // namespace

double oscillation_w(const CadlagPath& f, double t, double delta) {
  if (delta <= 0.0) throw std::domain_error("delta must be positive");
  const auto pts = window_points(f, t - delta, t + delta);
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;

  std::vector<double> lo_before(n), hi_before(n), lo_after(n), hi_after(n);
  lo_before[0] = hi_before[0] = pts[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo_before[i] = std::min(lo_before[i - 1], pts[i]);
    hi_before[i] = std::max(hi_before[i - 1], pts[i]);
  }
  lo_after[n - 1] = hi_after[n - 1] = pts[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    lo_after[i] = std::min(lo_after[i + 1], pts[i]);
    hi_after[i] = std::max(hi_after[i + 1], pts[i]);
  }

  double w = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double v = pts[j];
    const double above = v - std::max(lo_before[j - 1], lo_after[j + 1]);
    const double below = std::min(hi_before[j - 1], hi_after[j + 1]) - v;
    w = std::max(w, std::max(0.0, std::max(above, below)));
  }
  return w;
}

double oscillation_v(const CadlagPath& f, double t, double delta) {
  if (delta <= 0.0) throw std::domain_error("delta must be positive");
  const auto pts = window_points(f, t - delta, t + delta);
  const auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
  return *mx - *mn;
}

namespace {

struct Knot {
  double u, r;
};

std::vector<Knot> graph_knots(const CadlagPath& f) {
  std::vector<Knot> knots;
  if (f.is_jump(0)) knots.push_back({f.left_value(0), 0.0});
  knots.push_back({f.values()[0], 0.0});
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double lv = f.left_value(i);
    const double ti = f.times()[i];
    // For Linear this closes the segment; for Step it is the horizontal run
    // at the previous value (left_value(i) == values[i-1] there).
    if (f.interp() == Interp::Step)
      knots.push_back({f.values()[i - 1], ti});
    else
      knots.push_back({lv, ti});
    if (f.values()[i] != knots.back().u) knots.push_back({f.values()[i], ti});
  }
  return knots;
}

}  // namespace

ParametricRepresentation build_parametric(const CadlagPath& f,
                                          std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const auto knots = graph_knots(f);
  std::vector<double> len(knots.size() - 1);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    len[j] = std::max(std::fabs(knots[j + 1].u - knots[j].u),
                      std::fabs(knots[j + 1].r - knots[j].r));
    total += len[j];
  }
  ParametricRepresentation rep;
  rep.u.push_back(knots[0].u);
  rep.r.push_back(knots[0].r);
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    std::size_t pieces = 1;
    if (total > 0.0) {
      const double share = static_cast<double>(resolution) * len[j] / total;
      pieces = std::max<std::size_t>(1, static_cast<std::size_t>(share));
    }
    for (std::size_t p = 1; p <= pieces; ++p) {
      const double theta = static_cast<double>(p) / static_cast<double>(pieces);
      rep.u.push_back(knots[j].u + theta * (knots[j + 1].u - knots[j].u));
      rep.r.push_back(knots[j].r + theta * (knots[j + 1].r - knots[j].r));
    }
  }
  return rep;
}

double m1_distance(const CadlagPath& f, const CadlagPath& g,
                   std::size_t resolution) {
  const double tol = 1e-12 * std::max(1.0, f.horizon());
  if (std::fabs(f.horizon() - g.horizon()) > tol)
    throw std::domain_error("paths live on different horizons");

  const auto a = build_parametric(f.hat(), resolution);
  const auto b = build_parametric(g.hat(), resolution);
  const std::size_t na = a.u.size();
  const std::size_t nb = b.u.size();
  auto cost = [&](std::size_t i, std::size_t j) {
    return std::max(std::fabs(a.u[i] - b.u[j]), std::fabs(a.r[i] - b.r[j]));
  };

  std::vector<double> prev(nb), cur(nb);
  prev[0] = cost(0, 0);
  for (std::size_t j = 1; j < nb; ++j)
    prev[j] = std::max(prev[j - 1], cost(0, j));
  for (std::size_t i = 1; i < na; ++i) {
    cur[0] = std::max(prev[0], cost(i, 0));
    for (std::size_t j = 1; j < nb; ++j) {
      const double reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, cost(i, j));
    }
    std::swap(prev, cur);
  }
  return prev[nb - 1];
}

bool graph_contains(const CadlagPath& f, double u, double r, double eps) {
  if (r < -eps || r > f.horizon() + eps) return false;
  const double rc = std::clamp(r, 0.0, f.horizon());
  if (std::fabs(u - f.evaluate(rc)) <= eps) return true;
  if (std::fabs(u - f.evaluate_left(rc)) <= eps) return true;
  // Inside the vertical segment of a nearby jump.
  const auto& times = f.times();
  auto it = std::lower_bound(times.begin(), times.end(), rc - eps);
  for (; it != times.end() && *it <= rc + eps; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double a = std::min(f.left_value(i), f.values()[i]);
    const double b = std::max(f.left_value(i), f.values()[i]);
    if (u >= a - eps && u <= b + eps) return true;
  }
  return false;
}

double max_knot_spacing(const ParametricRepresentation& rep) {
  double m = 0.0;
  for (std::size_t i = 1; i < rep.u.size(); ++i)
    m = std::max(m, std::max(std::fabs(rep.u[i] - rep.u[i - 1]),
                             std::fabs(rep.r[i] - rep.r[i - 1])));
  return m;
}

void write_path_csv(const CadlagPath& path, std::ostream& out) {
  out << "t,value,is_jump,left_value\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.times()[i]) << ','
        << format_double(path.values()[i]) << ',' << (path.is_jump(i) ? 1 : 0)
        << ',';
    if (path.is_jump(i)) out << format_double(path.left_value(i));
    out << '\n';
  }
}

void write_path_csv(const CadlagPath& path, const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename);
  write_path_csv(path, out);
}

CadlagPath read_path_csv(std::istream& in, Interp interp) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,value,is_jump", 0) != 0)
    throw std::runtime_error("bad path CSV header");
  std::vector<double> times, values, lefts;
  std::vector<std::size_t> jumps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 4> field;
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        if (k != 3) throw std::runtime_error("bad path CSV row: " + line);
        field[k] = line.substr(start);
        break;
      }
      field[k] = line.substr(start, comma - start);
      start = comma + 1;
    }
    times.push_back(std::stod(field[0]));
    values.push_back(std::stod(field[1]));
    if (field[2] == "1") {
      jumps.push_back(times.size() - 1);
      lefts.push_back(std::stod(field[3]));
    }
  }
  return CadlagPath(std::move(times), std::move(values), interp,
                    std::move(jumps), std::move(lefts));
}

CadlagPath read_path_csv(const std::string& filename, Interp interp) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open " + filename);
  return read_path_csv(in, interp);
}

}  // namespace ifc
